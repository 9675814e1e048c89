//! Named bundles, characters and cycles addressable from the command line.

use std::f64::consts::PI;

use chernforge::connections::library::{
    self, identity_frame, latitude, polar_cap, s4_cycle, sphere_cycle, sphere_domain, s4_domain, torus_cycle,
    torus_domain, torus_loop, winding_frame,
};
use chernforge::connections::{BundleWithConnection, Structure};
use chernforge::diffchar::{differential_chern, differential_euler, differential_pontryagin, odd_differential_chern,
    DifferentialCharacter};
use chernforge::forms::FormField;
use chernforge::mesh::{Axis, ChartDomain, GeometricCycle, Integrable, SmoothMap};
use chernforge::num_complex::Complex64;

use crate::error::{CliError, CliResult};
use crate::spec::{Spec, Value};

pub const BUNDLES: &[(&str, &str)] = &[
    ("trivial", "trivial flat bundle; rank=1, base=s2|t2|t3|t4|s4"),
    ("monopole", "monopole line bundle L_n on S^2; n=1"),
    ("ts2", "tangent bundle of S^2 with Levi-Civita connection"),
    ("instanton", "rank-2 instanton on S^4; scale=1"),
    ("torus-flat", "flat U(1) bundle on T^2 with theta = i(a dx + b dy); a=0, b=0"),
    ("random-torus", "random connection on a trivial torus bundle; seed=1, rank=2, dim=2, group=u|so"),
    ("suspension", "suspension of z^m over S^1 x S^1; m=1"),
];

pub const CHARACTERS: &[(&str, &str)] = &[
    ("chern", "differential Chern class; k=1, bundle=..."),
    ("pontryagin", "differential Pontryagin class; k=1, bundle=..."),
    ("euler", "differential Euler class of a rank-2 oriented bundle; bundle=..."),
    ("odd-chern", "odd differential Chern class of z^m on S^1; k=0, m=1"),
];

pub const CYCLES: &[(&str, &str)] = &[
    ("latitude", "latitude loop on S^2; theta0=pi/2, gauge=0, w=0, frame=identity|none"),
    ("cap-boundary", "boundary of the polar cap theta <= theta0; theta0=pi/2, gauge=0"),
    ("torus-loop", "straight loop on a torus; dir1=1, dir2.., off1.."),
    ("torus", "the whole torus; off1.."),
    ("point", "a point of S^1; x=0"),
];

/// Typed access to a spec's parameters, rejecting unknown keys at the end.
pub struct Params<'a> {
    spec: &'a Spec,
    used: Vec<String>,
}

impl<'a> Params<'a> {
    pub fn new(spec: &'a Spec) -> Self {
        Params { spec, used: Vec::new() }
    }

    pub fn num(&mut self, key: &str, default: f64) -> CliResult<f64> {
        self.used.push(key.to_string());
        match self.spec.param(key) {
            None => Ok(default),
            Some(p) => match &p.value {
                Value::Number(x) => Ok(*x),
                Value::Word(w) => Err(spec_err(p.column, format!("'{key}' expects a number, got '{w}'"))),
            },
        }
    }

    pub fn int(&mut self, key: &str, default: i64) -> CliResult<i64> {
        let x = self.num(key, default as f64)?;
        if x.fract() != 0.0 || x.abs() > 1e9 {
            let col = self.spec.param(key).map_or(self.spec.column, |p| p.column);
            return Err(spec_err(col, format!("'{key}' expects an integer, got {x}")));
        }
        Ok(x as i64)
    }

    pub fn count(&mut self, key: &str, default: usize, range: std::ops::RangeInclusive<usize>) -> CliResult<usize> {
        let x = self.int(key, default as i64)?;
        if x < 0 || !range.contains(&(x as usize)) {
            let col = self.spec.param(key).map_or(self.spec.column, |p| p.column);
            return Err(spec_err(col, format!("'{key}' must lie in {}..={}", range.start(), range.end())));
        }
        Ok(x as usize)
    }

    pub fn word(&mut self, key: &str, default: &str, allowed: &[&str]) -> CliResult<String> {
        self.used.push(key.to_string());
        match self.spec.param(key) {
            None => Ok(default.to_string()),
            Some(p) => match &p.value {
                Value::Word(w) if allowed.contains(&w.as_str()) => Ok(w.clone()),
                _ => Err(spec_err(p.column, format!("'{key}' must be one of {}", allowed.join(", ")))),
            },
        }
    }

    pub fn finish(self) -> CliResult<()> {
        if let Some(p) = self.spec.params.iter().find(|p| !self.used.contains(&p.key)) {
            return Err(spec_err(p.column, format!("unknown parameter '{}' for '{}'", p.key, self.spec.kind)));
        }
        Ok(())
    }
}

fn spec_err(column: usize, message: String) -> CliError {
    CliError::Spec { column, message }
}

fn unknown(spec: &Spec, what: &str, table: &[(&str, &str)]) -> CliError {
    let names: Vec<&str> = table.iter().map(|(n, _)| *n).collect();
    spec_err(spec.column, format!("unknown {what} '{}' (known: {})", spec.kind, names.join(", ")))
}

/// Shape of a base manifold, used to match cycles with characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    Sphere,
    Sphere4,
    Torus(usize),
    Circle,
}

impl Base {
    fn name(self) -> String {
        match self {
            Base::Sphere => "S^2".into(),
            Base::Sphere4 => "S^4".into(),
            Base::Torus(d) => format!("T^{d}"),
            Base::Circle => "S^1".into(),
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Base::Sphere => 2,
            Base::Sphere4 => 4,
            Base::Torus(d) => d,
            Base::Circle => 1,
        }
    }

    /// Fundamental cycle of the base.
    pub fn fundamental(self, resolution: usize) -> GeometricCycle {
        match self {
            Base::Sphere => sphere_cycle(resolution),
            Base::Sphere4 => s4_cycle(resolution),
            Base::Torus(d) => torus_cycle(d, resolution, &vec![0.0; d]),
            Base::Circle => torus_cycle(1, resolution, &[0.0]),
        }
    }
}

pub struct Bundle {
    pub bundle: BundleWithConnection,
    pub base: Base,
}

pub fn build_bundle(spec: &Spec, res: usize) -> CliResult<Bundle> {
    if spec.bundle.is_some() {
        return Err(spec_err(spec.column, format!("bundle '{}' does not take a bundle", spec.kind)));
    }
    let mut p = Params::new(spec);
    let out = match spec.kind.as_str() {
        "trivial" => {
            let rank = p.count("rank", 1, 1..=6)?;
            let (domain, base) = match p.word("base", "s2", &["s2", "t2", "t3", "t4", "s4"])?.as_str() {
                "s2" => (sphere_domain(res), Base::Sphere),
                "s4" => (s4_domain(res), Base::Sphere4),
                t => {
                    let d = t[1..].parse().expect("validated torus name");
                    (torus_domain(d, res), Base::Torus(d))
                }
            };
            Bundle { bundle: library::trivial_flat(&domain, rank), base }
        }
        "monopole" => {
            let n = p.int("n", 1)?;
            Bundle { bundle: library::monopole(n as i32, res), base: Base::Sphere }
        }
        "ts2" => Bundle { bundle: library::tangent_s2(res), base: Base::Sphere },
        "instanton" => {
            let scale = p.num("scale", 1.0)?;
            if scale <= 0.0 {
                return Err(spec_err(spec.param("scale").map_or(spec.column, |q| q.column), "scale must be positive".into()));
            }
            Bundle { bundle: library::instanton(scale, res), base: Base::Sphere4 }
        }
        "torus-flat" => {
            let (a, b) = (p.num("a", 0.0)?, p.num("b", 0.0)?);
            Bundle { bundle: library::torus_flat(a, b, res), base: Base::Torus(2) }
        }
        "random-torus" => {
            let seed = p.int("seed", 1)?;
            let rank = p.count("rank", 2, 1..=4)?;
            let dim = p.count("dim", 2, 1..=4)?;
            let structure = match p.word("group", "u", &["u", "so"])?.as_str() {
                "so" => Structure::SpecialOrthogonal,
                _ => Structure::Unitary,
            };
            let b = library::random_torus_bundle(seed as u64, rank, dim, structure, res);
            Bundle { bundle: b, base: Base::Torus(dim) }
        }
        "suspension" => {
            let m = p.int("m", 1)?;
            Bundle { bundle: chernforge::diffchar::suspend(&winding_map(m as i32, res), res)?, base: Base::Torus(2) }
        }
        _ => return Err(unknown(spec, "bundle", BUNDLES)),
    };
    p.finish()?;
    Ok(out)
}

/// `z ↦ z^m` on the circle, with its derivative.
pub fn winding_map(m: i32, res: usize) -> FormField {
    let d = ChartDomain::new(vec![Axis::circle(res)]).expect("circle chart");
    let mf = m as f64;
    FormField::scalar_function(&d, move |x| Complex64::from_polar(1.0, mf * x[0]), move |x| {
        vec![Complex64::new(0.0, mf) * Complex64::from_polar(1.0, mf * x[0])]
    })
}

pub struct Character {
    pub character: DifferentialCharacter,
    pub rank: usize,
    pub base: Base,
}

pub fn build_character(spec: &Spec, res: usize) -> CliResult<Character> {
    let mut p = Params::new(spec);
    let bundle = |spec: &Spec| -> CliResult<Bundle> {
        let b = spec
            .bundle
            .as_deref()
            .ok_or_else(|| spec_err(spec.column, format!("'{}' needs a bundle=... parameter", spec.kind)))?;
        build_bundle(b, res)
    };
    let out = match spec.kind.as_str() {
        "chern" | "pontryagin" => {
            let k = p.count("k", 1, 1..=4)?;
            p.finish()?;
            let b = bundle(spec)?;
            let c = if spec.kind == "chern" {
                differential_chern(&b.bundle, k)?
            } else {
                differential_pontryagin(&b.bundle, k)?
            };
            Character { character: c, rank: b.bundle.rank(), base: b.base }
        }
        "euler" => {
            p.finish()?;
            let b = bundle(spec)?;
            Character { character: differential_euler(&b.bundle)?, rank: b.bundle.rank(), base: b.base }
        }
        "odd-chern" => {
            let k = p.count("k", 0, 0..=3)?;
            let m = p.int("m", 1)?;
            p.finish()?;
            if spec.bundle.is_some() {
                return Err(spec_err(spec.column, "odd-chern acts on z^m and takes no bundle".into()));
            }
            let c = odd_differential_chern(&winding_map(m as i32, res), k, res)?;
            Character { character: c, rank: 1, base: Base::Circle }
        }
        _ => return Err(unknown(spec, "character", CHARACTERS)),
    };
    Ok(out)
}

fn require(spec: &Spec, target: &Character, want: fn(Base) -> bool) -> CliResult<()> {
    if !want(target.base) {
        return Err(spec_err(
            spec.column,
            format!("cycle '{}' does not live on the character's base {}", spec.kind, target.base.name()),
        ));
    }
    Ok(())
}

pub fn frame_all(z: GeometricCycle, gauge: usize, rank: usize) -> chernforge::Result<GeometricCycle> {
    let pieces: Vec<_> = z.pieces().to_vec();
    let mut z = z;
    for (i, piece) in pieces.iter().enumerate() {
        if !piece.thin {
            z = z.with_piece_frame(i, identity_frame(&piece.domain, gauge, rank))?;
        }
    }
    Ok(z)
}

fn offsets(p: &mut Params, dim: usize) -> CliResult<Vec<f64>> {
    (1..=dim).map(|i| p.num(&format!("off{i}"), 0.0)).collect()
}

/// Build a cycle on the base of `target`, framed for its bundle.
pub fn build_cycle(spec: &Spec, target: &Character, res: usize) -> CliResult<GeometricCycle> {
    if spec.bundle.is_some() {
        return Err(spec_err(spec.column, "cycles do not take a bundle".into()));
    }
    let mut p = Params::new(spec);
    let loop_res = 2 * res;
    let z = match spec.kind.as_str() {
        "latitude" => {
            require(spec, target, |b| b == Base::Sphere)?;
            let th0 = p.num("theta0", PI / 2.0)?;
            let gauge = p.count("gauge", 0, 0..=1)?;
            let w = p.int("w", 0)?;
            let framed = p.word("frame", "identity", &["identity", "none"])? == "identity";
            let lp = latitude(th0, loop_res);
            let d = lp.pieces()[0].domain.clone();
            if !framed {
                lp
            } else if w != 0 {
                if target.rank != 1 {
                    return Err(spec_err(spec.column, "winding frames need a line bundle".into()));
                }
                lp.with_frame(winding_frame(&d, gauge, w as i32))?
            } else {
                lp.with_frame(identity_frame(&d, gauge, target.rank))?
            }
        }
        "cap-boundary" => {
            require(spec, target, |b| b == Base::Sphere)?;
            let th0 = p.num("theta0", PI / 2.0)?;
            let gauge = p.count("gauge", 0, 0..=1)?;
            if !(th0 > 0.0 && th0 < PI) {
                return Err(spec_err(spec.column, "theta0 must lie in (0, pi)".into()));
            }
            frame_all(polar_cap(th0, loop_res)?.boundary()?, gauge, target.rank)?
        }
        "torus-loop" => {
            require(spec, target, |b| matches!(b, Base::Torus(_)))?;
            let dim = target.base.dim();
            let dir = (1..=dim)
                .map(|i| p.int(&format!("dir{i}"), i64::from(i == 1)).map(|v| v as i32))
                .collect::<CliResult<Vec<_>>>()?;
            if dir.iter().all(|&d| d == 0) {
                return Err(spec_err(spec.column, "loop direction must be nonzero".into()));
            }
            let off = offsets(&mut p, dim)?;
            frame_all(torus_loop(&dir, &off, loop_res), 0, target.rank)?
        }
        "torus" => {
            require(spec, target, |b| matches!(b, Base::Torus(_)))?;
            let dim = target.base.dim();
            let off = offsets(&mut p, dim)?;
            frame_all(torus_cycle(dim, res, &off), 0, target.rank)?
        }
        "point" => {
            require(spec, target, |b| b == Base::Circle)?;
            GeometricCycle::point(vec![p.num("x", 0.0)?])
        }
        _ => return Err(unknown(spec, "cycle", CYCLES)),
    };
    p.finish()?;
    Ok(z)
}

/// Curvature integrated over the base's fundamental cycle when degrees match.
pub fn curvature_periods(target: &Character, res: usize) -> CliResult<Vec<f64>> {
    let curv = target.character.curvature();
    if curv.degree() != target.base.dim() {
        return Ok(Vec::new());
    }
    let res = if target.base == Base::Sphere4 { res.min(24) } else { res };
    Ok(vec![curv.integrate(&target.base.fundamental(res))?.re])
}

/// Latitude and cap-boundary cycles on S² framed for `rank`, labelled.
pub fn sphere_test_cycles(res: usize, rank: usize) -> chernforge::Result<Vec<(String, GeometricCycle)>> {
    let mut out = Vec::new();
    for th0 in [0.3, PI / 2.0, 2.5] {
        let lp = latitude(th0, 2 * res);
        let d = lp.pieces()[0].domain.clone();
        out.push((format!("latitude({th0:.3})"), lp.with_frame(identity_frame(&d, 0, rank))?));
        let cap = frame_all(polar_cap(th0, res)?.boundary()?, 0, rank)?;
        out.push((format!("cap-boundary({th0:.3})"), cap));
    }
    Ok(out)
}

/// Coordinate and diagonal loops on `T^dim` framed for `rank`, labelled.
pub fn torus_test_loops(dim: usize, res: usize, rank: usize) -> chernforge::Result<Vec<(String, GeometricCycle)>> {
    let mut out = Vec::new();
    for i in 0..=dim {
        let dir: Vec<i32> = (0..dim).map(|j| if i == dim || j == i { 1 } else { 0 }).collect();
        let off: Vec<f64> = (0..dim).map(|j| 0.1 * (j + 1) as f64).collect();
        let label = format!("torus-loop({dir:?})");
        out.push((label, frame_all(torus_loop(&dir, &off, 2 * res), 0, rank)?));
    }
    Ok(out)
}

pub fn framed_torus(dim: usize, res: usize, rank: usize, off: &[f64]) -> chernforge::Result<GeometricCycle> {
    frame_all(torus_cycle(dim, res, off), 0, rank)
}

/// `(s, x) ↦ (x, s)`: the suspension base with the circle factor last.
pub fn base_first(domain: &ChartDomain) -> chernforge::Result<GeometricCycle> {
    let swap = SmoothMap::new(2, 2, |x| vec![x[1], x[0]])
        .with_jacobian(|_| chernforge::nalgebra::DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    GeometricCycle::new(domain.clone(), swap, 1.0, &[])
}
