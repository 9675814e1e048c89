//! Scenario runner and verification harness for `chernforge`.

pub mod config;
pub mod error;
pub mod registry;
pub mod report;
pub mod scenarios;
pub mod spec;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use chernforge::numeric::frac;

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::report::{version, Check, Evaluation, Report, SCHEMA};
use crate::scenarios::{Ctx, Scenario};
use crate::spec::{parse_number, Spec};

/// Resolution used by `eval` when neither the flag nor the config sets one.
pub const DEFAULT_RESOLUTION: usize = 48;

/// Integrality slack allowed for curvature periods.
pub const PERIOD_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub sets: Vec<(String, f64)>,
    pub resolution: Option<usize>,
    pub tolerance: Option<f64>,
    pub config: Config,
}

/// Parse `key=value` where the value may use `pi` arithmetic.
pub fn parse_assignment(text: &str) -> CliResult<(String, f64)> {
    let (key, value) = text
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("expected key=value, got '{text}'")))?;
    if key.is_empty() {
        return Err(CliError::Usage(format!("empty key in '{text}'")));
    }
    let v = parse_number(value).map_err(|mut e| {
        e.column += key.chars().count() + 1;
        e
    })?;
    Ok((key.to_string(), v))
}

fn resolve_params(s: &Scenario, sets: &[(String, f64)]) -> CliResult<BTreeMap<String, f64>> {
    let mut params: BTreeMap<String, f64> = s.params.iter().map(|(k, v, _)| (k.to_string(), *v)).collect();
    for (key, value) in sets {
        let Some((_, _, integer)) = s.params.iter().find(|(k, _, _)| k == key) else {
            let known: Vec<&str> = s.params.iter().map(|(k, _, _)| *k).collect();
            return Err(CliError::Usage(format!(
                "scenario '{}' has no parameter '{key}' (known: {})",
                s.name,
                if known.is_empty() { "none".to_string() } else { known.join(", ") }
            )));
        };
        if *integer && value.fract() != 0.0 {
            return Err(CliError::Usage(format!("parameter '{key}' must be an integer, got {value}")));
        }
        params.insert(key.clone(), *value);
    }
    Ok(params)
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown panic".to_string())
}

pub fn run_scenario(name: &str, opts: &RunOptions) -> CliResult<Report> {
    let s = scenarios::find(name).ok_or_else(|| {
        let names: Vec<&str> = scenarios::SCENARIOS.iter().map(|s| s.name).collect();
        CliError::Usage(format!("unknown scenario '{name}' (known: {})", names.join(", ")))
    })?;
    let params = resolve_params(s, &opts.sets)?;
    let resolution = opts.resolution.or_else(|| opts.config.scenario_resolution(name)).unwrap_or(s.resolution);
    let ctx = Ctx { params: params.clone(), resolution };
    let checks = match catch_unwind(AssertUnwindSafe(|| (s.run)(&ctx))) {
        Ok(Ok(checks)) => checks,
        Ok(Err(e)) => vec![Check::failed("setup", e.to_string())],
        Err(p) => vec![Check::failed("setup", format!("panicked: {}", panic_message(p)))],
    };
    let records: Vec<_> = checks
        .into_iter()
        .map(|mut c| {
            if let Some(t) = opts.tolerance.or_else(|| opts.config.tolerance(name, &c.id)) {
                c.tolerance = t;
            }
            c.record()
        })
        .collect();
    Ok(Report {
        schema: SCHEMA,
        version: version(),
        scenario: name.to_string(),
        resolution,
        params,
        pass: !records.is_empty() && records.iter().all(|r| r.pass),
        checks: records,
    })
}

pub fn evaluate(character: &str, cycle: &str, resolution: usize) -> CliResult<Evaluation> {
    let cspec = Spec::parse(character)?;
    let zspec = Spec::parse(cycle)?;
    let target = registry::build_character(&cspec, resolution)?;
    let z = registry::build_cycle(&zspec, &target, resolution)?;
    let value = frac(target.character.evaluate(&z)?);
    let periods = registry::curvature_periods(&target, resolution)?;
    Ok(Evaluation {
        schema: SCHEMA,
        character: cspec.to_string(),
        cycle: zspec.to_string(),
        resolution,
        value_mod_1: value,
        curvature_periods: periods,
        tolerances: BTreeMap::from([("period_integrality".to_string(), PERIOD_TOLERANCE)]),
    })
}
