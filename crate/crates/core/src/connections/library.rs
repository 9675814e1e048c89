//! Built-in bundles, cycles and chains.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bundle::{BundleWithConnection, Gauge, Structure, Transition};
use crate::error::Result;
use crate::forms::{FormField, FormValue};
use crate::mesh::{Axis, BoundedChain, ChartDomain, Frame, GeometricCycle, Integrable, Side, SmoothMap};

type CMat = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Matrix 1-form `Σ A_i dx_i` from its components and their partials
/// (`derivs[j][i] = ∂_j A_i`).
pub fn one_form<F, G>(domain: &ChartDomain, rank: usize, comps: F, derivs: G) -> FormField
where
    F: Fn(&[f64]) -> Vec<CMat> + Send + Sync + 'static,
    G: Fn(&[f64]) -> Vec<Vec<CMat>> + Send + Sync + 'static,
{
    let dim = domain.dim();
    let pack = move |cs: &[CMat]| {
        let mut v = FormValue::zeros(dim, 1, rank);
        for (i, c) in cs.iter().enumerate() {
            v.set_coeff_mask(1 << i, c);
        }
        v
    };
    FormField::new(domain.clone(), 1, rank, move |x| pack(&comps(x)))
        .with_partials(move |x| derivs(x).iter().map(|d| pack(d)).collect())
}

fn scalar(z: Complex64) -> CMat {
    DMatrix::from_element(1, 1, z)
}

/// `θ ∈ [0, π]` (Gauss–Legendre) by `φ ∈ [0, 2π)` (periodic).
pub fn sphere_domain(n: usize) -> ChartDomain {
    ChartDomain::new(vec![Axis::interval(0.0, PI, n), Axis::circle(n)]).expect("valid sphere chart")
}

/// `T^dim` with all axes `[0, 2π)`.
pub fn torus_domain(dim: usize, n: usize) -> ChartDomain {
    ChartDomain::new(vec![Axis::circle(n); dim]).expect("valid torus chart")
}

/// `S^4` as `(α, η, ξ₁, ξ₂) ∈ [0, π] x [0, π/2] x [0, 2π)²`: polar angle from
/// the north pole and Hopf coordinates on the latitude 3-spheres.
pub fn s4_domain(n: usize) -> ChartDomain {
    ChartDomain::new(vec![
        Axis::interval(0.0, PI, n),
        Axis::interval(0.0, PI / 2.0, n),
        Axis::circle(n),
        Axis::circle(n),
    ])
    .expect("valid S^4 chart")
}

pub fn identity_frame(domain: &ChartDomain, gauge: usize, rank: usize) -> Frame {
    let id = FormValue::matrix(domain.dim(), &DMatrix::identity(rank, rank));
    Frame { gauge, matrix: FormField::constant(domain, id) }
}

/// Abelian frame `e^{i w φ}` on a loop parametrized by `φ`.
pub fn winding_frame(domain: &ChartDomain, gauge: usize, w: i32) -> Frame {
    let w = w as f64;
    let m = FormField::scalar_function(domain, move |x| Complex64::from_polar(1.0, w * x[0]), move |x| {
        vec![I * w * Complex64::from_polar(1.0, w * x[0])]
    });
    Frame { gauge, matrix: m }
}

/// Trivial rank-r bundle with `θ = 0`.
pub fn trivial_flat(base: &ChartDomain, rank: usize) -> BundleWithConnection {
    BundleWithConnection::trivial_with(Structure::Unitary, FormField::zero(base, 1, rank))
        .expect("flat bundle is well formed")
}

/// Line bundle of degree `n` on `S^2` with its round connection.
/// North gauge `θ_N = −(i n/2)(1 − cos θ) dφ`, south gauge
/// `θ_S = (i n/2)(1 + cos θ) dφ`, south-to-north transition `e^{i n φ}`.
pub fn monopole(n: i32, resolution: usize) -> BundleWithConnection {
    let d = sphere_domain(resolution);
    let h = Complex64::new(0.0, n as f64 / 2.0);
    let north = one_form(
        &d,
        1,
        move |x| vec![scalar(ZERO), scalar(-h * (1.0 - x[0].cos()))],
        move |x| vec![vec![scalar(ZERO), scalar(-h * x[0].sin())], vec![scalar(ZERO), scalar(ZERO)]],
    );
    let south = one_form(
        &d,
        1,
        move |x| vec![scalar(ZERO), scalar(h * (1.0 + x[0].cos()))],
        move |x| vec![vec![scalar(ZERO), scalar(-h * x[0].sin())], vec![scalar(ZERO), scalar(ZERO)]],
    );
    let nf = n as f64;
    let g = FormField::scalar_function(&d, move |x| Complex64::from_polar(1.0, nf * x[1]), move |x| {
        vec![ZERO, I * nf * Complex64::from_polar(1.0, nf * x[1])]
    });
    BundleWithConnection::new(
        1,
        Structure::Unitary,
        d,
        vec![
            Gauge::new("north", |x| x[0] < 0.75 * PI, north),
            Gauge::new("south", |x| x[0] > 0.25 * PI, south),
        ],
        vec![Transition { from: 1, to: 0, map: g }],
    )
    .expect("monopole bundle is well formed")
}

fn so2(w: f64) -> CMat {
    DMatrix::from_row_slice(2, 2, &[ZERO, Complex64::new(w, 0.0), Complex64::new(-w, 0.0), ZERO])
}

fn rotation(a: f64) -> CMat {
    let (s, c) = a.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c].map(|v| Complex64::new(v, 0.0)))
}

/// Tangent bundle of the round `S^2` with its Levi-Civita connection in
/// frames regular at the north pole (`θ₁₂ = (1 − cos θ) dφ`) and the south
/// pole (`θ₁₂ = −(1 + cos θ) dφ`).
pub fn tangent_s2(resolution: usize) -> BundleWithConnection {
    let d = sphere_domain(resolution);
    let north = one_form(
        &d,
        2,
        |x| vec![so2(0.0), so2(1.0 - x[0].cos())],
        |x| vec![vec![so2(0.0), so2(x[0].sin())], vec![so2(0.0), so2(0.0)]],
    );
    let south = one_form(
        &d,
        2,
        |x| vec![so2(0.0), so2(-(1.0 + x[0].cos()))],
        |x| vec![vec![so2(0.0), so2(x[0].sin())], vec![so2(0.0), so2(0.0)]],
    );
    let g = FormField::matrix_function(&d, 2, |x| rotation(-2.0 * x[1]));
    BundleWithConnection::new(
        2,
        Structure::SpecialOrthogonal,
        d,
        vec![
            Gauge::new("north", |x| x[0] < 0.75 * PI, north),
            Gauge::new("south", |x| x[0] > 0.25 * PI, south),
        ],
        vec![Transition { from: 0, to: 1, map: g }],
    )
    .expect("tangent bundle is well formed")
}

/// Flat `U(1)` bundle on `T^2` with `θ = i(a dx + b dy)`.
pub fn torus_flat(a: f64, b: f64, resolution: usize) -> BundleWithConnection {
    let d = torus_domain(2, resolution);
    let theta = one_form(
        &d,
        1,
        move |_| vec![scalar(I * a), scalar(I * b)],
        |_| vec![vec![scalar(ZERO); 2]; 2],
    );
    BundleWithConnection::trivial_with(Structure::Unitary, theta).expect("flat torus bundle")
}

/// Fourier data for a smooth connection on a torus:
/// `θ_μ(x) = C_μ + Σ_modes (A_μ sin(k·x) + B_μ cos(k·x))`.
#[derive(Clone, Debug)]
pub struct TorusConnectionData {
    pub constant: Vec<CMat>,
    pub modes: Vec<(Vec<f64>, Vec<CMat>, Vec<CMat>)>,
}

impl TorusConnectionData {
    pub fn form(&self, domain: &ChartDomain) -> FormField {
        let rank = self.constant[0].nrows();
        let dim = domain.dim();
        let data = self.clone();
        let data2 = self.clone();
        one_form(
            domain,
            rank,
            move |x| {
                let mut out = data.constant.clone();
                for (k, a, b) in &data.modes {
                    let phase: f64 = k.iter().zip(x).map(|(k, x)| k * x).sum();
                    let (s, c) = phase.sin_cos();
                    for mu in 0..dim {
                        out[mu] += &a[mu] * Complex64::new(s, 0.0) + &b[mu] * Complex64::new(c, 0.0);
                    }
                }
                out
            },
            move |x| {
                let mut out = vec![vec![DMatrix::zeros(rank, rank); dim]; dim];
                for (k, a, b) in &data2.modes {
                    let phase: f64 = k.iter().zip(x).map(|(k, x)| k * x).sum();
                    let (s, c) = phase.sin_cos();
                    for (nu, row) in out.iter_mut().enumerate() {
                        if k[nu] == 0.0 {
                            continue;
                        }
                        for mu in 0..dim {
                            row[mu] += (&a[mu] * Complex64::new(c, 0.0) - &b[mu] * Complex64::new(s, 0.0))
                                * Complex64::new(k[nu], 0.0);
                        }
                    }
                }
                out
            },
        )
    }
}

fn random_generator(rng: &mut ChaCha8Rng, rank: usize, structure: Structure, scale: f64) -> CMat {
    let x = DMatrix::from_fn(rank, rank, |_, _| match structure {
        Structure::Unitary => Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        Structure::SpecialOrthogonal => Complex64::new(rng.random_range(-1.0..1.0), 0.0),
    });
    (&x - x.adjoint()) * Complex64::new(0.5 * scale, 0.0)
}

/// Random smooth connection data on `T^dim` (deterministic in `seed`).
pub fn random_torus_data(seed: u64, rank: usize, dim: usize, structure: Structure, scale: f64) -> TorusConnectionData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let constant = (0..dim).map(|_| random_generator(&mut rng, rank, structure, scale)).collect();
    let mut modes = Vec::new();
    for m in 0..dim + 2 {
        let k: Vec<f64> = (0..dim)
            .map(|i| if m < dim { if i == m { 1.0 } else { 0.0 } } else { rng.random_range(-1..=1) as f64 })
            .collect();
        let a = (0..dim).map(|_| random_generator(&mut rng, rank, structure, scale)).collect();
        let b = (0..dim).map(|_| random_generator(&mut rng, rank, structure, scale)).collect();
        modes.push((k, a, b));
    }
    TorusConnectionData { constant, modes }
}

/// Trivial bundle on `T^dim` with a random smooth unitary or orthogonal
/// connection.
pub fn random_torus_bundle(
    seed: u64,
    rank: usize,
    dim: usize,
    structure: Structure,
    resolution: usize,
) -> BundleWithConnection {
    let d = torus_domain(dim, resolution);
    let theta = random_torus_data(seed, rank, dim, structure, 0.6).form(&d);
    BundleWithConnection::trivial_with(structure, theta).expect("random torus bundle")
}

fn u_matrix(a: Complex64, b: Complex64) -> Matrix2<Complex64> {
    Matrix2::new(a, -b.conj(), b, a.conj())
}

/// Hopf-coordinate unit quaternion `U(η, ξ₁, ξ₂)` with its first and second
/// partials in `(η, ξ₁, ξ₂)`.
#[allow(clippy::type_complexity)]
fn hopf(eta: f64, x1: f64, x2: f64) -> (Matrix2<Complex64>, [Matrix2<Complex64>; 3], [[Matrix2<Complex64>; 3]; 3]) {
    let (se, ce) = eta.sin_cos();
    let e1 = Complex64::from_polar(1.0, x1);
    let e2 = Complex64::from_polar(1.0, x2);
    let a = e1 * ce;
    let b = e2 * se;
    let da = [-e1 * se, I * a, ZERO];
    let db = [e2 * ce, ZERO, I * b];
    let d2a = [[-a, I * da[0], ZERO], [I * da[0], -a, ZERO], [ZERO; 3]];
    let d2b = [[-b, ZERO, I * db[0]], [ZERO; 3], [I * db[0], ZERO, -b]];
    let u = u_matrix(a, b);
    let du = [0, 1, 2].map(|m| u_matrix(da[m], db[m]));
    let d2u = [0, 1, 2].map(|m| [0, 1, 2].map(|n| u_matrix(d2a[m][n], d2b[m][n])));
    (u, du, d2u)
}

fn to_dyn(m: &Matrix2<Complex64>) -> CMat {
    DMatrix::from_iterator(2, 2, m.iter().cloned())
}

/// Radial profile `f(α) = tan²(α/2) / (tan²(α/2) + ρ²)` and its derivative.
fn profile(alpha: f64, rho: f64) -> (f64, f64) {
    let (s, c) = (0.5 * alpha).sin_cos();
    let den = s * s + rho * rho * c * c;
    (s * s / den, rho * rho * s * c / (den * den))
}

/// Charge-one `SU(2)` instanton of scale `ρ` on `S^4`. North gauge
/// `θ_N = f(α) U†dU`, south gauge `θ_S = (f(α) − 1) dU U†`, transition `U`.
pub fn instanton(rho: f64, resolution: usize) -> BundleWithConnection {
    let d = s4_domain(resolution);
    let north = one_form(
        &d,
        2,
        move |x| {
            let (f, _) = profile(x[0], rho);
            let (u, du, _) = hopf(x[1], x[2], x[3]);
            let ud = u.adjoint();
            let mut out = vec![DMatrix::zeros(2, 2)];
            out.extend(du.iter().map(|m| to_dyn(&(ud * m)) * Complex64::new(f, 0.0)));
            out
        },
        move |x| {
            let (f, fp) = profile(x[0], rho);
            let (u, du, d2u) = hopf(x[1], x[2], x[3]);
            let ud = u.adjoint();
            let mut out = vec![vec![DMatrix::zeros(2, 2); 4]; 4];
            for mu in 0..3 {
                out[0][mu + 1] = to_dyn(&(ud * du[mu])) * Complex64::new(fp, 0.0);
                for nu in 0..3 {
                    let m = du[nu].adjoint() * du[mu] + ud * d2u[nu][mu];
                    out[nu + 1][mu + 1] = to_dyn(&m) * Complex64::new(f, 0.0);
                }
            }
            out
        },
    );
    let south = one_form(
        &d,
        2,
        move |x| {
            let (f, _) = profile(x[0], rho);
            let (u, du, _) = hopf(x[1], x[2], x[3]);
            let ud = u.adjoint();
            let mut out = vec![DMatrix::zeros(2, 2)];
            out.extend(du.iter().map(|m| to_dyn(&(m * ud)) * Complex64::new(f - 1.0, 0.0)));
            out
        },
        move |x| {
            let (f, fp) = profile(x[0], rho);
            let (u, du, d2u) = hopf(x[1], x[2], x[3]);
            let ud = u.adjoint();
            let mut out = vec![vec![DMatrix::zeros(2, 2); 4]; 4];
            for mu in 0..3 {
                out[0][mu + 1] = to_dyn(&(du[mu] * ud)) * Complex64::new(fp, 0.0);
                for nu in 0..3 {
                    let m = d2u[nu][mu] * ud + du[mu] * du[nu].adjoint();
                    out[nu + 1][mu + 1] = to_dyn(&m) * Complex64::new(f - 1.0, 0.0);
                }
            }
            out
        },
    );
    let dim = d.dim();
    let g = FormField::new(d.clone(), 0, 2, move |x| FormValue::matrix(dim, &to_dyn(&hopf(x[1], x[2], x[3]).0)))
        .with_partials(move |x| {
            let (_, du, _) = hopf(x[1], x[2], x[3]);
            let mut out = vec![FormValue::zeros(dim, 0, 2)];
            out.extend(du.iter().map(|m| FormValue::matrix(dim, &to_dyn(m))));
            out
        });
    BundleWithConnection::new(
        2,
        Structure::Unitary,
        d,
        vec![
            Gauge::new("north", |x| x[0] < 0.75 * PI, north),
            Gauge::new("south", |x| x[0] > 0.25 * PI, south),
        ],
        vec![Transition { from: 0, to: 1, map: g }],
    )
    .expect("instanton bundle is well formed")
}

/// The round `S^2` as a cycle in its own chart (poles collapsed).
pub fn sphere_cycle(resolution: usize) -> GeometricCycle {
    GeometricCycle::new(
        sphere_domain(resolution),
        SmoothMap::identity(2),
        1.0,
        &[(0, Side::Lo), (0, Side::Hi)],
    )
    .expect("sphere cycle")
}

/// `S^4` as a cycle in its own chart, oriented so that the instanton has
/// second Chern number `+1`.
pub fn s4_cycle(resolution: usize) -> GeometricCycle {
    GeometricCycle::new(
        s4_domain(resolution),
        SmoothMap::identity(4),
        S4_ORIENTATION,
        &[(0, Side::Lo), (0, Side::Hi), (1, Side::Lo), (1, Side::Hi)],
    )
    .expect("S^4 cycle")
}

pub const S4_ORIENTATION: f64 = 1.0;

/// Latitude circle `φ ↦ (θ₀, φ)` on the sphere chart.
pub fn latitude(theta0: f64, resolution: usize) -> GeometricCycle {
    let d = ChartDomain::new(vec![Axis::circle(resolution)]).expect("loop chart");
    let map = SmoothMap::new(1, 2, move |t| vec![theta0, t[0]])
        .with_jacobian(|_| DMatrix::from_column_slice(2, 1, &[0.0, 1.0]));
    GeometricCycle::new(d, map, 1.0, &[]).expect("latitude cycle")
}

/// Latitude with the identity frame of the north gauge.
pub fn framed_latitude(theta0: f64, resolution: usize, rank: usize) -> GeometricCycle {
    let lp = latitude(theta0, resolution);
    let d = lp.pieces()[0].domain.clone();
    lp.with_frame(identity_frame(&d, 0, rank)).expect("frame on loop chart")
}

/// Polar cap `θ ≤ θ₀` as a chain in the sphere chart (pole facet collapsed).
pub fn polar_cap(theta0: f64, resolution: usize) -> Result<BoundedChain> {
    let d = ChartDomain::new(vec![Axis::interval(0.0, theta0, resolution), Axis::circle(resolution)])?;
    Ok(BoundedChain::new(d, SmoothMap::identity(2), 1.0)?.with_collapsed(0, Side::Lo))
}

/// The closed torus `T^dim` as a cycle, translated by `offset`.
pub fn torus_cycle(dim: usize, resolution: usize, offset: &[f64]) -> GeometricCycle {
    let off = offset.to_vec();
    let map = SmoothMap::affine(DMatrix::identity(dim, dim), off);
    GeometricCycle::new(torus_domain(dim, resolution), map, 1.0, &[]).expect("torus cycle")
}

/// Closed loop `t ↦ offset + t·w` on a torus, `w` an integer direction.
pub fn torus_loop(direction: &[i32], offset: &[f64], resolution: usize) -> GeometricCycle {
    let dim = direction.len();
    let w = DMatrix::from_iterator(dim, 1, direction.iter().map(|&k| k as f64));
    let map = SmoothMap::affine(w, offset.to_vec());
    let d = ChartDomain::new(vec![Axis::circle(resolution)]).expect("loop chart");
    GeometricCycle::new(d, map, 1.0, &[]).expect("torus loop")
}

/// Square chain `[lo, hi]^2` inside a 2-dimensional chart.
pub fn square_chain(lo: f64, hi: f64, resolution: usize) -> Result<BoundedChain> {
    let d = ChartDomain::new(vec![Axis::interval(lo, hi, resolution); 2])?;
    BoundedChain::new(d, SmoothMap::identity(2), 1.0)
}
