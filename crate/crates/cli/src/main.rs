use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use hca_core::hca::{attack_with, verify_assumptions, AttackConfig, AttackReport, ConfounderLift, ProblemFamily};
use hca_core::io::{write_atomic, write_json};
use hca_core::lp::{Graph, LinearProgram, SimplexSolver};
use hca_core::scenarios::{load_config, parse_config, run_scenario, Registry, RunManifest};
use hca_core::Error;

const EXIT_VALIDATION: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "hca", version, about = "Hidden confounder attacks on linear programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a bundled scenario.
    Scenario {
        name: String,
        /// Scenario config (JSON). A previous run's manifest.json works too.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory [default: $HCA_OUT_ROOT/<name>].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Horizon in hours (energy only).
        #[arg(long)]
        t: Option<usize>,
        /// Run this many consecutive seeds, one subdirectory each.
        #[arg(long)]
        sweep: Option<u64>,
        #[arg(long, env = "HCA_OUT_ROOT", default_value = "runs", hide_env_values = true)]
        out_root: PathBuf,
    },
    /// List the bundled scenarios.
    List,
    /// Attack an LP given as JSON with a lift vector.
    Attack {
        #[arg(long)]
        lp: PathBuf,
        /// JSON object with `c` and optional `confounder`, `groups`.
        #[arg(long)]
        lift: PathBuf,
        /// Attack config (JSON); defaults apply to missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "HCA_OUT_ROOT", default_value = "runs", hide_env_values = true)]
        out_root: PathBuf,
    },
    /// Search a ball around the LP's costs for ties and solution changes.
    VerifyAssumptions {
        #[arg(long)]
        lp: PathBuf,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the diagnostics to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render an edge-list CSV as DOT, highlighting solutions.
    ExportGraph {
        #[arg(long)]
        graph: PathBuf,
        /// `NAME=FILE[:FIELD]`; FILE holds a JSON array or an object with
        /// FIELD (default `x`), e.g. `adv=report.json:x_adv`.
        #[arg(long = "solution")]
        solutions: Vec<String>,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CmdResult = Result<(), Failure>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LiftFile {
    #[serde(default = "default_confounder")]
    confounder: String,
    c: Vec<f64>,
    #[serde(default)]
    groups: Option<Vec<Vec<usize>>>,
}

fn default_confounder() -> String {
    "h".into()
}

#[derive(Serialize)]
struct SweepRow {
    seed: u64,
    success: bool,
    delta_h: f64,
    rel_cost_gap: f64,
    shd: Option<usize>,
}

fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("hca-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("hca-core".to_string(), hca_core::VERSION.to_string()),
    ])
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn write_manifest(
    out: &Path,
    scenario: Option<&str>,
    config_path: Option<&Path>,
    resolved: Value,
    start: Instant,
) -> Result<(), Error> {
    let manifest = RunManifest {
        command: command_line(),
        scenario: scenario.map(str::to_string),
        config_path: config_path.map(|p| p.display().to_string()),
        resolved_config: resolved,
        output_dir: out.display().to_string(),
        versions: versions(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    write_json(&out.join("manifest.json"), &manifest)
}

/// Prints a line, ignoring a closed stdout.
fn say(line: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn summary_line(r: &AttackReport) -> String {
    let shd = r.shd_codes.map_or("n/a".to_string(), |s| s.to_string());
    format!(
        "success={} delta_h={:.6} rel_cost_gap={:.6} shd={} steps={}",
        r.success, r.delta_h, r.rel_cost_gap, shd, r.steps_taken
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_scenario(
    name: &str,
    config: Option<&Path>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    t: Option<usize>,
    sweep: Option<u64>,
    out_root: &Path,
) -> CmdResult {
    let registry = Registry::builtin();
    let scenario = registry.get(name).ok_or_else(|| {
        Failure::Usage(format!("unknown scenario `{name}`; available: {}", registry.names().join(", ")))
    })?;
    let mut cfg = match config {
        Some(p) => load_config(p)?,
        None => json!({}),
    };
    if !cfg.is_object() {
        return Err(Error::config("config must be a JSON object").into());
    }
    let seeded = scenario.resolve(&cfg)?.get("seed").is_some();
    if let Some(s) = seed {
        if !seeded {
            return Err(Failure::Usage(format!("scenario `{name}` takes no seed")));
        }
        cfg["seed"] = json!(s);
    }
    if let Some(t) = t {
        if name != "energy" {
            return Err(Failure::Usage("--t applies to the energy scenario only".into()));
        }
        cfg["hours"] = json!(t);
    }
    let out = out.unwrap_or_else(|| out_root.join(name));
    let start = Instant::now();

    let Some(n) = sweep else {
        let result = run_scenario(scenario, &cfg, &out)?;
        match &result.report {
            Some(r) => say(&format!("{name}: {}", summary_line(r))),
            None => say(&format!("{name}: wrote {}", result.files.join(", "))),
        }
        write_manifest(&out, Some(name), config, result.config, start)?;
        return Ok(());
    };

    if !seeded {
        return Err(Failure::Usage(format!("scenario `{name}` takes no seed, cannot sweep")));
    }
    if n == 0 {
        return Err(Error::config("sweep: must be at least 1").into());
    }
    let first = scenario.resolve(&cfg)?["seed"].as_u64().unwrap_or(0);
    let mut rows = Vec::new();
    for s in first..first + n {
        let mut c = cfg.clone();
        c["seed"] = json!(s);
        let result = run_scenario(scenario, &c, &out.join(format!("seed-{s}")))?;
        if let Some(r) = &result.report {
            rows.push(SweepRow {
                seed: s,
                success: r.success,
                delta_h: r.delta_h,
                rel_cost_gap: r.rel_cost_gap,
                shd: r.shd_codes,
            });
        }
    }
    let hits = rows.iter().filter(|r| r.success).count();
    hca_core::io::write_csv_with(&out.join("sweep.csv"), |buf| {
        let mut w = csv::Writer::from_writer(buf);
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    })?;
    say(&format!("{name}: {hits}/{n} seeds succeeded"));
    let mut resolved = scenario.resolve(&cfg)?;
    resolved["sweep"] = json!(n);
    write_manifest(&out, Some(name), config, resolved, start)?;
    Ok(())
}

fn read_json(path: &Path) -> Result<Value, Error> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn cmd_attack(
    lp_path: &Path,
    lift_path: &Path,
    config: Option<&Path>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    out_root: &Path,
) -> CmdResult {
    let start = Instant::now();
    let lp = LinearProgram::load(lp_path)?;
    let lift: LiftFile = parse_config(&read_json(lift_path)?)?;
    let mut cfg: AttackConfig = match config {
        Some(p) => parse_config(&read_json(p)?)?,
        None => AttackConfig::default(),
    };
    if let Some(s) = seed {
        cfg.noise.seed = s;
    }
    let confounder_lift = ConfounderLift { confounder: lift.confounder, family: ProblemFamily::Generic, c: lift.c };
    let report = attack_with(&SimplexSolver, &lp, &confounder_lift, &cfg, lift.groups.as_deref())?;
    let out = out.unwrap_or_else(|| out_root.join("attack"));
    write_json(&out.join("report.json"), &report)?;
    say(&summary_line(&report));
    let resolved = json!({
        "lp": lp_path.display().to_string(),
        "lift": lift_path.display().to_string(),
        "attack": serde_json::to_value(&cfg).map_err(Error::from)?,
    });
    write_manifest(&out, None, config, resolved, start)?;
    Ok(())
}

fn cmd_verify(lp: &Path, radius: f64, trials: usize, seed: u64, out: Option<&Path>) -> CmdResult {
    let lp = LinearProgram::load(lp)?;
    let diag = verify_assumptions(&lp, radius, trials, seed)?;
    let text = serde_json::to_string_pretty(&diag).map_err(Error::from)?;
    say(&text);
    if let Some(p) = out {
        write_json(p, &diag)?;
    }
    Ok(())
}

fn parse_solution_arg(arg: &str) -> Result<(String, Vec<f64>), Failure> {
    let (name, rest) =
        arg.split_once('=').ok_or_else(|| Failure::Usage(format!("--solution `{arg}`: expected NAME=FILE[:FIELD]")))?;
    let (file, field) = match rest.rsplit_once(':') {
        Some((f, field)) if !field.contains(['/', '\\']) && !field.is_empty() => (f, field),
        _ => (rest, "x"),
    };
    let value = read_json(Path::new(file))?;
    let x = match &value {
        Value::Array(_) => &value,
        Value::Object(map) => map.get(field).ok_or_else(|| Error::config(format!("{file}: no field `{field}`")))?,
        _ => return Err(Error::config(format!("{file}: expected an array or an object")).into()),
    };
    let x: Vec<f64> = serde_json::from_value(x.clone()).map_err(|e| Error::config(format!("{file}: {e}")))?;
    Ok((name.to_string(), x))
}

fn cmd_export_graph(graph: &Path, solutions: &[String], out: Option<&Path>) -> CmdResult {
    let graph = Graph::load(graph)?;
    let solutions = solutions.iter().map(|s| parse_solution_arg(s)).collect::<Result<Vec<_>, _>>()?;
    let dot = graph.to_dot(&solutions)?;
    match out {
        Some(p) => write_atomic(p, dot.as_bytes())?,
        None => say(dot.trim_end()),
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Scenario { name, config, seed, out, t, sweep, out_root } => {
            cmd_scenario(&name, config.as_deref(), seed, out, t, sweep, &out_root)
        }
        Command::List => {
            let registry = Registry::builtin();
            for name in registry.names() {
                let s = registry.get(name).expect("listed name");
                say(&format!("{name:<15} {}", s.description()));
            }
            Ok(())
        }
        Command::Attack { lp, lift, config, seed, out, out_root } => {
            cmd_attack(&lp, &lift, config.as_deref(), seed, out, &out_root)
        }
        Command::VerifyAssumptions { lp, radius, trials, seed, out } => {
            cmd_verify(&lp, radius, trials, seed, out.as_deref())
        }
        Command::ExportGraph { graph, solutions, out } => cmd_export_graph(&graph, &solutions, out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_solver_failure() { EXIT_SOLVER } else { EXIT_VALIDATION })
        }
    }
}
