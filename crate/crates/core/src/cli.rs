//! Command-line front end. `main` only forwards to [`run`].

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value as Json;

use crate::error::Error;
use crate::output::{compare_csv, report_json, trajectory_csv, write_atomic};
use crate::scenario::{apply_override, parse_document, Scenario};
use crate::verify::{CheckEntry, VerificationReport};

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    InputError = 1,
    CheckFailed = 2,
    Diverged = 3,
}

impl Exit {
    /// Severity used to combine sweep outcomes.
    fn rank(self) -> u8 {
        match self {
            Exit::Pass => 0,
            Exit::CheckFailed => 1,
            Exit::Diverged => 2,
            Exit::InputError => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "lsb-lab", version, about = "Lie–Scheffers–Brockett optimal control: simulate and verify scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the scenario and write the trajectory CSV
    Simulate(Common),
    /// Run the scenario's checks and write the report
    Verify(Common),
    /// Tabulate closed-form against numeric closed loop
    Compare(Common),
    /// Repeat simulate or verify over values of one parameter
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Scenario file (JSON)
    scenario: PathBuf,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the integration step
    #[arg(long)]
    step: Option<f64>,
    /// Override the horizon
    #[arg(long)]
    horizon: Option<f64>,
    /// Override any field, `key.path=json`
    #[arg(long = "set", value_parser = parse_assignment)]
    set: Vec<(String, String)>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepRun {
    Simulate,
    Verify,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Dotted path of the swept field
    #[arg(long)]
    param: String,
    /// Comma-separated values; commas inside brackets stay with their value
    #[arg(long)]
    values: String,
    #[arg(long, value_enum, default_value = "verify")]
    run: SweepRun,
}

fn parse_assignment(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    Ok((k.trim().to_string(), v.to_string()))
}

/// Splits on commas outside `[]`, `{}` and quotes.
fn split_values(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut quoted = false;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '"' => quoted = !quoted,
            '[' | '{' if !quoted => depth += 1,
            ']' | '}' if !quoted => depth -= 1,
            ',' if depth == 0 && !quoted => {
                out.push(std::mem::take(&mut cur).trim().to_string());
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur.trim().to_string());
    out
}

#[derive(Clone, Copy, Debug)]
enum Mode {
    Simulate,
    Verify,
    Compare,
}

struct Outcome {
    exit: Exit,
    log: String,
}

impl Outcome {
    fn input(log: &mut String, msg: impl std::fmt::Display) -> Self {
        let _ = writeln!(log, "error: {msg}");
        Outcome { exit: Exit::InputError, log: std::mem::take(log) }
    }
}

fn overrides(common: &Common) -> Vec<(String, String)> {
    let mut v = Vec::new();
    if let Some(h) = common.step {
        v.push(("step".to_string(), h.to_string()));
    }
    if let Some(t) = common.horizon {
        v.push(("horizon".to_string(), t.to_string()));
    }
    v.extend(common.set.iter().cloned());
    v
}

fn output_path(dir: &Path, configured: &Option<String>, default: &str) -> PathBuf {
    dir.join(configured.as_deref().unwrap_or(default))
}

fn write(path: &Path, contents: &str, log: &mut String) -> Result<(), String> {
    write_atomic(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    let _ = writeln!(log, "wrote {}", path.display());
    Ok(())
}

fn summarize(report: &VerificationReport, log: &mut String) {
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(
            log,
            "{tag} {} max_residual={:e} tolerance={:e}  {}",
            c.name, c.max_residual, c.tolerance, c.details
        );
    }
    for f in &report.findings {
        let _ = writeln!(log, "NOTE {} max_deviation={:e}  {}", f.name, f.max_deviation, f.details);
    }
}

fn execute(mode: Mode, doc: &Json, extra: &[(String, String)], out: &Path) -> Outcome {
    let mut log = String::new();
    let mut doc = doc.clone();
    for (k, v) in extra {
        if let Err(e) = apply_override(&mut doc, k, v) {
            return Outcome::input(&mut log, e);
        }
    }
    let scenario = match Scenario::from_document(&doc) {
        Ok(s) => s,
        Err(e) => return Outcome::input(&mut log, e),
    };
    let result = match mode {
        Mode::Simulate => simulate(&scenario, out, &mut log),
        Mode::Verify => verify(&scenario, out, &mut log),
        Mode::Compare => compare(&scenario, out, &mut log),
    };
    match result {
        Ok(exit) => Outcome { exit, log },
        Err(msg) => Outcome::input(&mut log, msg),
    }
}

fn simulate(s: &Scenario, out: &Path, log: &mut String) -> Result<Exit, String> {
    let path = output_path(out, &s.outputs.trajectory_csv, "trajectory.csv");
    match s.simulate() {
        Ok(traj) => {
            write(&path, &trajectory_csv(&traj), log)?;
            Ok(Exit::Pass)
        }
        Err(Error::Divergence { last_time, escape_time, partial }) => {
            write(&path, &trajectory_csv(&partial), log)?;
            let _ = writeln!(
                log,
                "error: trajectory diverged after t = {last_time}; estimated escape time {escape_time}"
            );
            Ok(Exit::Diverged)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn verify(s: &Scenario, out: &Path, log: &mut String) -> Result<Exit, String> {
    let report_path = output_path(out, &s.outputs.report_json, "report.json");
    let traj = match s.simulate() {
        Ok(t) => t,
        Err(Error::Divergence { last_time, escape_time, .. }) => {
            let mut report = VerificationReport::new();
            report.scenario_digest = Some(s.digest.clone());
            report.push(CheckEntry::new(
                "simulation.finite",
                f64::INFINITY,
                0.0,
                format!("diverged after t = {last_time}, estimated escape time {escape_time}"),
            ));
            write(&report_path, &report_json(&report), log)?;
            let _ = writeln!(log, "error: trajectory diverged; estimated escape time {escape_time}");
            return Ok(Exit::Diverged);
        }
        Err(e) => return Err(e.to_string()),
    };
    if s.outputs.trajectory_csv.is_some() {
        let path = output_path(out, &s.outputs.trajectory_csv, "trajectory.csv");
        write(&path, &trajectory_csv(&traj), log)?;
    }
    let report = s.verify_trajectory(&traj).map_err(|e| e.to_string())?;
    summarize(&report, log);
    write(&report_path, &report_json(&report), log)?;
    Ok(if report.passed() { Exit::Pass } else { Exit::CheckFailed })
}

fn compare(s: &Scenario, out: &Path, log: &mut String) -> Result<Exit, String> {
    let (rows, escape) = s.compare().map_err(|e| e.to_string())?;
    let path = out.join("compare.csv");
    write(&path, &compare_csv(&rows, s.group.is_complex()), log)?;
    let gap = rows.iter().map(|r| r.gap()).fold(0.0, f64::max);
    let _ = writeln!(log, "max gap {gap:e} over {} samples (gate 1e-7)", rows.len());
    if let Some(t) = escape {
        let _ = writeln!(log, "error: numeric closed loop diverged; estimated escape time {t}");
        return Ok(Exit::Diverged);
    }
    Ok(if gap <= 1e-7 { Exit::Pass } else { Exit::CheckFailed })
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect()
}

fn thread_cap() -> Result<Option<usize>, String> {
    match std::env::var("LSB_LAB_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("LSB_LAB_THREADS must be a positive integer, got `{v}`")),
        },
    }
}

fn sweep(args: &SweepArgs, doc: &Json, stdout: &mut dyn Write) -> Exit {
    use rayon::prelude::*;
    let values = split_values(&args.values);
    let mode = match args.run {
        SweepRun::Simulate => Mode::Simulate,
        SweepRun::Verify => Mode::Verify,
    };
    let base = overrides(&args.common);
    let mut pool = rayon::ThreadPoolBuilder::new();
    match thread_cap() {
        Ok(Some(n)) => pool = pool.num_threads(n),
        Ok(None) => {}
        Err(msg) => {
            let _ = writeln!(stdout, "error: {msg}");
            return Exit::InputError;
        }
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stdout, "error: cannot start worker threads: {e}");
            return Exit::InputError;
        }
    };
    let outcomes: Vec<(String, Outcome)> = pool.install(|| {
        values
            .par_iter()
            .map(|v| {
                let mut extra = base.clone();
                extra.push((args.param.clone(), v.clone()));
                let dir = args.common.out.join(format!("{}={}", sanitize(&args.param), sanitize(v)));
                (v.clone(), execute(mode, doc, &extra, &dir))
            })
            .collect()
    });
    let mut worst = Exit::Pass;
    let mut summary = Vec::with_capacity(outcomes.len());
    for (v, o) in &outcomes {
        let _ = writeln!(stdout, "[{}={v}] exit {}", args.param, o.exit as i32);
        let _ = stdout.write_all(o.log.as_bytes());
        if o.exit.rank() > worst.rank() {
            worst = o.exit;
        }
        summary.push(serde_json::json!({ "value": v, "exit": o.exit as i32 }));
    }
    let doc = serde_json::json!({ "param": args.param, "runs": summary });
    let path = args.common.out.join("sweep.json");
    let text = serde_json::to_string_pretty(&doc).expect("summary serializes") + "\n";
    if let Err(e) = write_atomic(&path, &text) {
        let _ = writeln!(stdout, "error: cannot write {}: {e}", path.display());
        return Exit::InputError;
    }
    worst
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Exit::InputError as i32 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let common = match &cli.command {
        Command::Simulate(c) | Command::Verify(c) | Command::Compare(c) => c,
        Command::Sweep(s) => &s.common,
    };
    let doc = match std::fs::read_to_string(&common.scenario)
        .map_err(|e| format!("cannot read {}: {e}", common.scenario.display()))
        .and_then(|text| parse_document(&text).map_err(|e| e.to_string()))
    {
        Ok(d) => d,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return Exit::InputError as i32;
        }
    };
    let exit = match &cli.command {
        Command::Sweep(args) => sweep(args, &doc, stdout),
        cmd => {
            let mode = match cmd {
                Command::Simulate(_) => Mode::Simulate,
                Command::Verify(_) => Mode::Verify,
                _ => Mode::Compare,
            };
            let o = execute(mode, &doc, &overrides(common), &common.out);
            // errors go to stderr, everything else to stdout
            for line in o.log.lines() {
                let sink: &mut dyn Write = if line.starts_with("error:") { &mut *stderr } else { &mut *stdout };
                let _ = writeln!(sink, "{line}");
            }
            o.exit
        }
    };
    exit as i32
}
