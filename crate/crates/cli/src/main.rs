use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use reslab::harness::{run_scenario_file, run_suite, suite, HarnessError, SUITES};

#[derive(Parser)]
#[command(name = "reslab", version, about = "Weighted-trace anomaly lab on the circle")]
struct Cli {
    /// Worker threads (overrides RES_LAB_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a JSON scenario.
    Eval {
        scenario: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also write a one-row-per-task CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Include per-term tables in the report.
        #[arg(long)]
        terms: bool,
    },
    /// Run a named verification suite.
    Verify {
        suite: String,
        /// Multiplies every criterion tolerance.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        /// Also write the criterion results as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// List the verification suites and their criteria.
    ListSuites,
}

fn threads(cli: Option<usize>) -> anyhow::Result<Option<usize>> {
    if cli.is_some() {
        return Ok(cli);
    }
    match std::env::var("RES_LAB_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => {
            let n: usize = s.trim().parse().with_context(|| format!("RES_LAB_THREADS={s:?}"))?;
            Ok(Some(n))
        }
    }
}

fn eval(path: PathBuf, report: Option<PathBuf>, csv: Option<PathBuf>, terms: bool) -> anyhow::Result<u8> {
    let rep = match run_scenario_file(&path, terms) {
        Ok(r) => r,
        Err(e @ (HarnessError::Parse { .. } | HarnessError::Resolution(_) | HarnessError::Task(_) | HarnessError::Io(_))) => {
            eprintln!("{}: {e}", path.display());
            return Ok(2);
        }
        Err(e) => return Err(e.into()),
    };
    let json = rep.to_json();
    match report {
        Some(p) => std::fs::write(&p, json + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{json}"),
    }
    if let Some(p) = csv {
        let f = File::create(&p).with_context(|| format!("writing {}", p.display()))?;
        rep.write_csv(BufWriter::new(f))?;
    }
    let s = &rep.summary;
    eprintln!("{} tasks: {} passed, {} failed, {} unchecked", s.tasks, s.passed, s.failed, s.unchecked);
    Ok(if rep.all_passed() { 0 } else { 1 })
}

fn verify(name: &str, tol_scale: f64, report: Option<PathBuf>) -> anyhow::Result<u8> {
    if suite(name).is_none() {
        let names: Vec<&str> = SUITES.iter().map(|s| s.0).collect();
        eprintln!("unknown suite {name:?}; available: {}", names.join(", "));
        return Ok(2);
    }
    if !(tol_scale.is_finite() && tol_scale > 0.0) {
        eprintln!("--tol-scale must be positive");
        return Ok(2);
    }
    let results = run_suite(name, tol_scale).expect("suite exists");
    for r in &results {
        println!("{}", r.line());
        for row in &r.side_table {
            println!("    {row}");
        }
    }
    if let Some(p) = report {
        let json = serde_json::to_string_pretty(&serde_json::json!({ "suite": name, "tol_scale": tol_scale, "criteria": results }))?;
        std::fs::write(&p, json + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    println!("{name}: {} passed, {failed} failed", results.len() - failed);
    Ok(if failed == 0 { 0 } else { 1 })
}

fn list_suites() -> u8 {
    for (name, ids) in SUITES {
        println!("{name}: {}", ids.join(" "));
    }
    0
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = (|| -> anyhow::Result<u8> {
        if let Some(n) = threads(cli.threads)? {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
        }
        match cli.command {
            Command::Eval { scenario, report, csv, terms } => eval(scenario, report, csv, terms),
            Command::Verify { suite, tol_scale, report } => verify(&suite, tol_scale, report),
            Command::ListSuites => Ok(list_suites()),
        }
    })();
    match code {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
