use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use chernforge_cli::config::Config;
use chernforge_cli::error::{CliError, CliResult};
use chernforge_cli::report::{to_json, version, Report, SuiteReport, SCHEMA};
use chernforge_cli::{evaluate, parse_assignment, registry, run_scenario, scenarios, RunOptions, DEFAULT_RESOLUTION};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chernforge", version, about = "Differential characters on concrete bundles")]
struct Cli {
    /// TOML file with [resolution] and [tolerance] tables.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List registered scenarios, bundles, characters and cycles.
    ListScenarios,
    /// Run one scenario.
    Run {
        name: String,
        /// Override a scenario parameter, e.g. `--set n=3`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        resolution: Option<u32>,
        /// Override every check tolerance.
        #[arg(long, allow_negative_numbers = true)]
        tolerance: Option<f64>,
        /// Write the JSON report here.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Print the JSON report instead of the summary.
        #[arg(long)]
        json: bool,
    },
    /// Run every scenario with its defaults.
    VerifyAll {
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a character on a cycle, e.g. `eval chern:k=1,bundle=monopole:n=1 latitude:theta0=pi/2`.
    Eval {
        character: String,
        cycle: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        resolution: Option<u32>,
        #[arg(long)]
        json: bool,
    },
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("CHERNFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("CHERNFORGE_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn write_out(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn print_summary(r: &Report, secs: f64) {
    let failed = r.checks.iter().filter(|c| !c.pass).count();
    let status = if r.pass { "PASS" } else { "FAIL" };
    println!("{status} {} ({} checks, {failed} failed, resolution {}, {secs:.2}s)", r.scenario, r.checks.len(), r.resolution);
    for c in r.checks.iter().filter(|c| !c.pass) {
        let computed = c.computed.map_or("-".to_string(), |v| format!("{v:.12}"));
        let expected = c.expected.map_or("-".to_string(), |v| format!("{v:.12}"));
        print!("  {}: expected {expected}, computed {computed}, tolerance {:e}", c.check_id, c.tolerance);
        match &c.error {
            Some(e) => println!(" ({e})"),
            None => println!(),
        }
    }
}

fn list() {
    println!("scenarios:");
    for s in scenarios::SCENARIOS {
        let params: Vec<String> = s.params.iter().map(|(k, v, _)| format!("{k}={v}")).collect();
        let params = if params.is_empty() { String::new() } else { format!(" [{}]", params.join(", ")) };
        println!("  {:<22} {}{params} (resolution {})", s.name, s.summary, s.resolution);
    }
    for (title, table) in [("bundles", registry::BUNDLES), ("characters", registry::CHARACTERS), ("cycles", registry::CYCLES)] {
        println!("{title}:");
        for (name, help) in table {
            println!("  {name:<22} {help}");
        }
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    configure_threads()?;
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::ListScenarios => {
            list();
            Ok(true)
        }
        Command::Run { name, sets, resolution, tolerance, out, json } => {
            let sets = sets.iter().map(|s| parse_assignment(s)).collect::<CliResult<Vec<_>>>()?;
            let opts = RunOptions { sets, resolution: resolution.map(|r| r as usize), tolerance, config };
            let t = Instant::now();
            let report = run_scenario(&name, &opts)?;
            let text = to_json(&report);
            if let Some(p) = out {
                write_out(&p, &text)?;
            }
            if json {
                print!("{text}");
            } else {
                print_summary(&report, t.elapsed().as_secs_f64());
            }
            Ok(report.pass)
        }
        Command::VerifyAll { out, json } => {
            let opts = RunOptions { config, ..RunOptions::default() };
            let mut reports = Vec::new();
            for s in scenarios::SCENARIOS {
                let t = Instant::now();
                let r = run_scenario(s.name, &opts)?;
                if !json {
                    print_summary(&r, t.elapsed().as_secs_f64());
                }
                reports.push(r);
            }
            let suite = SuiteReport { schema: SCHEMA, version: version(), pass: reports.iter().all(|r| r.pass), reports };
            let text = to_json(&suite);
            if let Some(p) = out {
                write_out(&p, &text)?;
            }
            if json {
                print!("{text}");
            } else {
                let passed = suite.reports.iter().filter(|r| r.pass).count();
                println!("{passed} of {} scenarios passed", suite.reports.len());
            }
            Ok(suite.pass)
        }
        Command::Eval { character, cycle, resolution, json } => {
            let res = resolution.map(|r| r as usize).or(config.default_resolution()).unwrap_or(DEFAULT_RESOLUTION);
            let e = evaluate(&character, &cycle, res)?;
            if json {
                print!("{}", to_json(&e));
            } else {
                println!("{}({}) = {:.12}", e.character, e.cycle, e.value_mod_1);
                if !e.curvature_periods.is_empty() {
                    println!("curvature periods: {:?}", e.curvature_periods);
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
