//! Registered verification scenarios.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use chernforge::charforms::{
    chern_form, chern_sequence_at, euler_form, power_sums_at, total_at, total_chern_form, transgression_chern,
};
use chernforge::connections::library::{self, monopole, polar_cap, sphere_cycle, tangent_s2, trivial_flat};
use chernforge::connections::{BundleWithConnection, Structure};
use chernforge::diffchar::{
    differential_chern, differential_euler, fiber_integrate_character, fl_differential_chern, from_form,
    odd_differential_chern, steep_step, suspend, suspend_with, suspension_lift, DifferentialCharacter, FLGenerator,
};
use chernforge::forms::{ExtValue, FormField};
use chernforge::mesh::{GeometricCycle, Integrable};
use chernforge::num_complex::Complex64;
use chernforge::numeric::frac;
use chernforge::symfunc::{sk_of_aggregate, EvenAggregate, RingElement};
use chernforge::Result;

use crate::registry::{base_first, frame_all, framed_torus, sphere_test_cycles, torus_test_loops, winding_map};
use crate::report::Check;

/// Parameters and resolution a scenario runs with.
pub struct Ctx {
    pub params: BTreeMap<String, f64>,
    pub resolution: usize,
}

impl Ctx {
    pub fn get(&self, key: &str) -> f64 {
        self.params[key]
    }

    pub fn int(&self, key: &str) -> i64 {
        self.params[key].round() as i64
    }
}

pub struct Scenario {
    pub name: &'static str,
    pub summary: &'static str,
    /// Parameters with defaults; `true` marks integer parameters.
    pub params: &'static [(&'static str, f64, bool)],
    pub resolution: usize,
    pub run: fn(&Ctx) -> Result<Vec<Check>>,
}

pub const SCENARIOS: &[Scenario] = &[
    Scenario {
        name: "flat-vanishing",
        summary: "characters of trivial flat bundles vanish on registered cycles",
        params: &[],
        resolution: 32,
        run: flat_vanishing,
    },
    Scenario {
        name: "monopole-integrality",
        summary: "first Chern number and curvature period of the monopole L_n",
        params: &[("n", 1.0, true)],
        resolution: 200,
        run: monopole_integrality,
    },
    Scenario {
        name: "holonomy",
        summary: "first differential Chern class on latitudes against parallel transport",
        params: &[("n", 1.0, true)],
        resolution: 64,
        run: holonomy,
    },
    Scenario {
        name: "bounding",
        summary: "character on cap boundaries equals the curvature integral over the cap",
        params: &[("n", 1.0, true)],
        resolution: 48,
        run: bounding,
    },
    Scenario {
        name: "gauss-bonnet",
        summary: "Euler form and differential Euler class of TS^2",
        params: &[],
        resolution: 96,
        run: gauss_bonnet,
    },
    Scenario {
        name: "instanton",
        summary: "second Chern number of the rank-2 instanton on S^4",
        params: &[("scale", 1.0, false)],
        resolution: 30,
        run: instanton,
    },
    Scenario {
        name: "frame-independence",
        summary: "monopole loop values agree across frames of different winding",
        params: &[("n", 1.0, true), ("theta0", 0.7, false)],
        resolution: 48,
        run: frame_independence,
    },
    Scenario {
        name: "transgression",
        summary: "dT c_k equals c_k(1) - c_k(0) for random U(2) pairs on T^2",
        params: &[("seed", 11.0, true)],
        resolution: 24,
        run: transgression,
    },
    Scenario {
        name: "whitney",
        summary: "total Chern form of a direct sum is the product",
        params: &[("seed", 21.0, true)],
        resolution: 8,
        run: whitney,
    },
    Scenario {
        name: "chern-bridge",
        summary: "s_k of the Chern character form equals c_k pointwise",
        params: &[("seed", 7.0, true)],
        resolution: 6,
        run: chern_bridge,
    },
    Scenario {
        name: "freed-lott",
        summary: "Freed-Lott characters against the Cheeger-Simons ones",
        params: &[("seed", 31.0, true)],
        resolution: 24,
        run: freed_lott,
    },
    Scenario {
        name: "suspension",
        summary: "clutching degree, odd class values and the suspension diagram",
        params: &[("m", 1.0, true)],
        resolution: 64,
        run: suspension,
    },
];

pub fn find(name: &str) -> Option<&'static Scenario> {
    SCENARIOS.iter().find(|s| s.name == name)
}

fn flat_vanishing(ctx: &Ctx) -> Result<Vec<Check>> {
    let res = ctx.resolution;
    let mut out = Vec::new();
    for rank in [1, 2] {
        let b = trivial_flat(&library::sphere_domain(res), rank);
        let c1 = differential_chern(&b, 1)?;
        for (label, z) in sphere_test_cycles(res, rank)? {
            out.push(Check::circle(format!("s2.rank{rank}.c1.{label}"), 0.0, c1.evaluate(&z), 1e-8));
        }
        let t3 = trivial_flat(&library::torus_domain(3, res.min(12)), rank);
        let c1 = differential_chern(&t3, 1)?;
        let c2 = differential_chern(&t3, 2)?;
        for (label, z) in torus_test_loops(3, res, rank)? {
            out.push(Check::circle(format!("t3.rank{rank}.c1.{label}"), 0.0, c1.evaluate(&z), 1e-8));
        }
        let z = framed_torus(3, res.min(12), rank, &[0.0; 3])?;
        out.push(Check::circle(format!("t3.rank{rank}.c2.torus"), 0.0, c2.evaluate(&z), 1e-8));
    }
    Ok(out)
}

fn monopole_integrality(ctx: &Ctx) -> Result<Vec<Check>> {
    let n = ctx.int("n");
    let b = monopole(n as i32, ctx.resolution);
    let sphere = sphere_cycle(ctx.resolution);
    let integral = chern_form(&b, 1).form.integrate(&sphere).map(|v| v.re);
    let period = differential_chern(&b, 1)?.delta2_periods(std::slice::from_ref(&sphere)).map(|p| p[0] as f64);
    Ok(vec![Check::abs("integral", n as f64, integral, 1e-6), Check::abs("period", n as f64, period, 1e-9)])
}

fn holonomy(ctx: &Ctx) -> Result<Vec<Check>> {
    let n = ctx.int("n");
    let b = monopole(n as i32, ctx.resolution);
    let c1 = differential_chern(&b, 1)?;
    let mut out = Vec::new();
    for (label, th0) in [("pi/6", PI / 6.0), ("pi/3", PI / 3.0), ("pi/2", PI / 2.0), ("2pi/3", 2.0 * PI / 3.0)] {
        let h = b.parallel_transport(&library::latitude(th0, 2 * ctx.resolution), 4096)?;
        let oracle = frac(h[(0, 0)].arg() / (2.0 * PI));
        let v = c1.evaluate(&library::framed_latitude(th0, 2 * ctx.resolution, 1));
        out.push(Check::circle(format!("latitude({label})"), oracle, v, 1e-6));
    }
    Ok(out)
}

fn cap_checks(out: &mut Vec<Check>, tag: &str, f: &DifferentialCharacter, rank: usize, res: usize) -> Result<()> {
    for i in 0..10 {
        let th0 = 0.15 + 0.22 * i as f64;
        let cap = polar_cap(th0, res)?;
        let expected = frac(f.curvature().integrate(&cap)?.re);
        let z = frame_all(cap.boundary()?, 0, rank)?;
        out.push(Check::circle(format!("{tag}.cap({th0:.2})"), expected, f.evaluate(&z), 1e-5));
    }
    Ok(())
}

fn bounding(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let c1 = differential_chern(&monopole(ctx.int("n") as i32, ctx.resolution), 1)?;
    cap_checks(&mut out, "c1", &c1, 1, ctx.resolution)?;
    let chi = differential_euler(&tangent_s2(ctx.resolution))?;
    cap_checks(&mut out, "euler", &chi, 2, ctx.resolution)?;
    Ok(out)
}

fn gauss_bonnet(ctx: &Ctx) -> Result<Vec<Check>> {
    let t = tangent_s2(ctx.resolution);
    let sphere = sphere_cycle(ctx.resolution);
    let integral = euler_form(&t)?.form.integrate(&sphere).map(|v| v.re);
    let chi = differential_euler(&t)?;
    let period = chi.delta2_periods(std::slice::from_ref(&sphere)).map(|p| p[0] as f64);
    let mut out = vec![Check::abs("integral", 2.0, integral, 1e-6), Check::abs("period", 2.0, period, 1e-9)];
    for (label, th0) in [("pi/2", PI / 2.0), ("2pi/3", 2.0 * PI / 3.0)] {
        let z = frame_all(polar_cap(th0, ctx.resolution)?.boundary()?, 0, 2)?;
        out.push(Check::circle(format!("cap-boundary({label})"), frac(1.0 - th0.cos()), chi.evaluate(&z), 1e-6));
    }
    Ok(out)
}

fn instanton(ctx: &Ctx) -> Result<Vec<Check>> {
    let b = library::instanton(ctx.get("scale"), ctx.resolution);
    let v = chern_form(&b, 2).form.integrate(&library::s4_cycle(ctx.resolution)).map(|v| v.re);
    Ok(vec![Check::abs("integral", 1.0, v, 1e-3)])
}

fn frame_independence(ctx: &Ctx) -> Result<Vec<Check>> {
    let th0 = ctx.get("theta0");
    let c1 = differential_chern(&monopole(ctx.int("n") as i32, ctx.resolution), 1)?;
    let lp = library::latitude(th0, 2 * ctx.resolution);
    let d = lp.pieces()[0].domain.clone();
    let base = c1.evaluate(&lp.clone().with_frame(library::identity_frame(&d, 0, 1))?)?;
    let mut out = Vec::new();
    for w in -2..=2 {
        let v = lp.clone().with_frame(library::winding_frame(&d, 0, w)).and_then(|z| c1.evaluate(&z));
        out.push(Check::circle(format!("winding({w})"), base, v, 1e-6));
    }
    Ok(out)
}

fn transgression(ctx: &Ctx) -> Result<Vec<Check>> {
    let seed = ctx.int("seed") as u64;
    let b0 = library::random_torus_bundle(2 * seed, 2, 2, Structure::Unitary, ctx.resolution);
    let b1 = library::random_torus_bundle(2 * seed + 1, 2, 2, Structure::Unitary, ctx.resolution);
    Ok((1..=2)
        .map(|k| {
            let r = transgression_chern(&b0, &b1, k).and_then(|t| t.residual(5));
            Check::abs(format!("residual(k={k})"), 0.0, r, 1e-5)
        })
        .collect())
}

fn max_abs(v: &ExtValue) -> f64 {
    v.data().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn whitney_residual(a: &BundleWithConnection, b: &BundleWithConnection, m: usize) -> Result<f64> {
    let sum = a.direct_sum(b)?;
    let (ca, cb, cs) = (total_chern_form(a), total_chern_form(b), total_chern_form(&sum));
    let mut worst = 0.0f64;
    for x in a.base().sample_grid(m) {
        let lhs = total_at(&cs, &x);
        let rhs = total_at(&ca, &x).times(&total_at(&cb, &x));
        worst = worst.max(max_abs(&lhs.minus(&rhs)));
    }
    Ok(worst)
}

fn whitney(ctx: &Ctx) -> Result<Vec<Check>> {
    let seed = ctx.int("seed") as u64;
    let res = ctx.resolution;
    let a = library::random_torus_bundle(seed, 2, 2, Structure::Unitary, res);
    let b = library::random_torus_bundle(seed + 1, 2, 2, Structure::Unitary, res);
    let c = library::random_torus_bundle(seed + 2, 1, 4, Structure::Unitary, res);
    let d = library::random_torus_bundle(seed + 3, 2, 4, Structure::Unitary, res);
    Ok(vec![
        Check::abs("t2.u2+u2", 0.0, whitney_residual(&a, &b, 6), 1e-10),
        Check::abs("t4.u1+u2", 0.0, whitney_residual(&c, &d, 3), 1e-10),
        Check::abs("monopole(2)+monopole(-1)", 0.0, whitney_residual(&monopole(2, res), &monopole(-1, res), 6), 1e-10),
    ])
}

fn chern_bridge(ctx: &Ctx) -> Result<Vec<Check>> {
    let seed = ctx.int("seed") as u64;
    let mut out = Vec::new();
    for rank in [2, 3] {
        let b = library::random_torus_bundle(seed + rank as u64, rank, 4, Structure::Unitary, ctx.resolution);
        let omega = b.patched_curvature();
        let mut worst = [0.0f64; 3];
        for x in b.base().sample_grid(3) {
            let om = omega.eval(&x);
            let p = power_sums_at(&om, 3);
            let comps: Vec<ExtValue> = std::iter::once(ExtValue::constant(4, Complex64::new(rank as f64, 0.0)))
                .chain(p.iter().zip([1.0, 2.0, 6.0]).map(|(pj, f)| pj.scale(Complex64::new(1.0 / f, 0.0))))
                .collect();
            let ch = EvenAggregate::new(comps)?;
            let seq = chern_sequence_at(&om, 3);
            for k in 1..=3 {
                let sk = sk_of_aggregate(&ch, k)?.part(2 * k).to_ext();
                let ck = seq[k].part(2 * k).to_ext();
                worst[k - 1] = worst[k - 1].max(max_abs(&sk.minus(&ck)));
            }
        }
        for k in 1..=3 {
            out.push(Check::abs(format!("u{rank}.k{k}"), 0.0, Ok(worst[k - 1]), 1e-10));
        }
    }
    Ok(out)
}

fn random_real_one_form(seed: u64, b: &BundleWithConnection, scale: f64) -> FormField {
    library::random_torus_data(seed, 1, b.base().dim(), Structure::Unitary, scale)
        .form(b.base())
        .scale(Complex64::new(0.0, -1.0))
}

fn freed_lott(ctx: &Ctx) -> Result<Vec<Check>> {
    let seed = ctx.int("seed") as u64;
    let b = library::random_torus_bundle(seed, 2, 2, Structure::Unitary, ctx.resolution);
    let c1 = differential_chern(&b, 1)?;
    let fl0 = fl_differential_chern(&FLGenerator::new(b.clone(), Vec::new())?, 1)?;
    let phi = random_real_one_form(seed + 1, &b, 0.4);
    let fl = fl_differential_chern(&FLGenerator::new(b.clone(), vec![phi.clone()])?, 1)?;
    let i2 = from_form(&phi)?;
    let mut out = Vec::new();
    for (dir, off) in [([1, 0], [0.3, 1.1]), ([0, 1], [2.0, 0.4]), ([1, 1], [0.7, 5.0]), ([2, -1], [4.1, 2.2])] {
        let lp = library::torus_loop(&dir, &off, 4 * ctx.resolution);
        let d = lp.pieces()[0].domain.clone();
        let z = lp.with_frame(library::identity_frame(&d, 0, 2))?;
        let base = c1.evaluate(&z)?;
        out.push(Check::circle(format!("zero-phi{dir:?}"), base, fl0.evaluate(&z), 1e-12));
        let shifted = frac(base + i2.evaluate(&z)?);
        out.push(Check::circle(format!("shift{dir:?}"), shifted, fl.evaluate(&z), 1e-8));
    }
    Ok(out)
}

fn suspension(ctx: &Ctx) -> Result<Vec<Check>> {
    let m = ctx.int("m") as i32;
    let res = ctx.resolution;
    let g = winding_map(m, res);
    let b = suspend(&g, res)?;
    let degree = base_first(b.base()).and_then(|z| chern_form(&b, 1).form.integrate(&z)).map(|v| v.re);
    let mut out = vec![Check::abs("degree", m as f64, degree, 1e-6)];
    let odd = odd_differential_chern(&g, 0, res)?;
    let other = suspend_with(&g, steep_step(), res)
        .and_then(|sb| differential_chern(&sb, 1))
        .and_then(|ch| fiber_integrate_character(&ch, suspension_lift(&g, res)))?;
    for x0 in [0.2, 1.7, 4.4] {
        let z = GeometricCycle::point(vec![x0]);
        let oracle = frac(m as f64 * x0 / (2.0 * PI));
        out.push(Check::circle(format!("point({x0})"), oracle, odd.evaluate(&z), 1e-6));
        let a = odd.evaluate(&z)?;
        out.push(Check::circle(format!("diagram({x0})"), a, other.evaluate(&z), 1e-6));
    }
    Ok(out)
}
