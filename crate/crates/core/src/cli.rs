//! Command-line front end. Every command writes one JSON document (to
//! `--out` or stdout) and maps its outcome to an exit code.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::catalog::{example, run_example};
use crate::clifford::{verify_system, CliffordSystem, SystemFile};
use crate::construction::{construct_family, lift_to_clifford_system};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::focal::level::MEMBERSHIP_TOL;
use crate::focal::report::{analyze, InhomogeneityOutcome};
use crate::focal::sample::sample_level_set_tol;
use crate::focal::strata::components_of;
use crate::focal::witness::{inhomogeneity_witness, n_plus_witness};

pub const DEFAULT_TOL_GEODESIC: f64 = 1e-8;

/// Process outcome, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Success = 0,
    Failure = 1,
    UserError = 2,
    HypothesisUnmet = 3,
}

impl Outcome {
    pub fn code(self) -> u8 {
        self as u8
    }

    /// Exit status of an error raised by a command.
    pub fn of_error(e: &Error) -> Self {
        match e {
            Error::InvalidParameters(_)
            | Error::Malformed(_)
            | Error::OutsideRegularRange { .. }
            | Error::DimensionMismatch { .. } => Outcome::UserError,
            Error::HypothesisUnmet(_) => Outcome::HypothesisUnmet,
            _ => Outcome::Failure,
        }
    }
}

impl From<Outcome> for ExitCode {
    fn from(o: Outcome) -> Self {
        ExitCode::from(o.code())
    }
}

#[derive(Debug, Parser)]
#[command(name = "clifford-forge", version, about = "Exact Clifford systems and certificates for their focal varieties")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a Clifford system of signature (m, r) and write it as JSON.
    Construct {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[command(flatten)]
        io: Output,
    },
    /// Re-check the relations of a system file.
    Verify {
        #[command(flatten)]
        io: InOut,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Case, eigenspaces, stratum census and witnesses of a system file.
    Analyze {
        #[command(flatten)]
        io: InOut,
    },
    /// N+ and inhomogeneity certificates for each component.
    Witness {
        #[command(flatten)]
        io: InOut,
    },
    /// Sample the level set M_c through the normal-exponential map.
    Sample {
        #[command(flatten)]
        io: InOut,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = MEMBERSHIP_TOL)]
        tol_membership: f64,
        #[arg(long, default_value_t = DEFAULT_TOL_GEODESIC)]
        tol_geodesic: f64,
    },
    /// Run a catalogued example end to end (m4r0 or m4r4).
    Example {
        name: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        io: Output,
    },
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InOut {
    /// System file written by `construct`.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A command's JSON document and exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub outcome: Outcome,
    pub body: Value,
}

impl Report {
    fn new(outcome: Outcome, body: Value) -> Self {
        Self { outcome, body }
    }

    fn pass_fail(passed: bool, body: Value) -> Self {
        Self::new(if passed { Outcome::Success } else { Outcome::Failure }, body)
    }

    fn error(e: &Error) -> Self {
        let outcome = Outcome::of_error(e);
        let status = match outcome {
            Outcome::UserError => "user_error",
            Outcome::HypothesisUnmet => "hypothesis_unmet",
            _ => "failure",
        };
        Self::new(outcome, json!({ "status": status, "error": e.to_string() }))
    }
}

fn read_system_file(path: &Path) -> Result<SystemFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameters(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

/// Reads a system and checks its relations exactly; a relation failure is
/// returned as a failing report carrying the first failed check.
fn load_verified(path: &Path) -> Result<std::result::Result<(SystemFile, CliffordSystem<Rational>), Report>> {
    let file = read_system_file(path)?;
    let sys = file.to_system()?;
    let cert = verify_system(&sys, 0);
    if !cert.passed {
        let first = cert.first_failure().cloned();
        return Ok(Err(Report::new(
            Outcome::Failure,
            json!({ "status": "failure", "error": "relation check failed", "first_failure": first, "certificate": cert }),
        )));
    }
    Ok(Ok((file, sys)))
}

pub fn cmd_construct(m: usize, r: usize, d: usize) -> Result<Report> {
    if m < 2 {
        return Err(Error::InvalidParameters(format!("Clifford systems need m >= 2, got m = {m}")));
    }
    if r > m {
        return Err(Error::InvalidParameters(format!("need 0 <= r <= m, got r = {r}, m = {m}")));
    }
    if d == 0 {
        return Err(Error::InvalidParameters("d must be at least 1".into()));
    }
    let (fam, trace) = construct_family(m, r)?;
    let sys = lift_to_clifford_system::<Rational>(&fam, d)?;
    let cert = verify_system(&sys, 0);
    let file = SystemFile::from_system(&sys, Some(d), Some(fam.order), Some(trace));
    let body = serde_json::to_value(&file).map_err(|e| Error::Malformed(e.to_string()))?;
    Ok(Report::pass_fail(cert.passed, body))
}

pub fn cmd_verify(input: &Path, seed: u64) -> Result<Report> {
    let sys = read_system_file(input)?.to_system()?;
    let cert = verify_system(&sys, seed);
    Ok(Report::pass_fail(cert.passed, json!({ "system_header": sys.header(), "certificate": cert })))
}

pub fn cmd_analyze(input: &Path) -> Result<Report> {
    let (_, sys) = match load_verified(input)? {
        Ok(v) => v,
        Err(report) => return Ok(report),
    };
    let report = analyze(&sys)?;
    let outcome = if !report.passed() {
        Outcome::Failure
    } else if report.out_of_scope.is_some() {
        Outcome::HypothesisUnmet
    } else {
        Outcome::Success
    };
    Ok(Report::new(outcome, report.to_json()))
}

pub fn cmd_witness(input: &Path) -> Result<Report> {
    let (_, sys) = match load_verified(input)? {
        Ok(v) => v,
        Err(report) => return Ok(report),
    };
    let report = analyze(&sys)?;
    let header = json!(sys.header());
    if let Some(why) = &report.out_of_scope {
        return Ok(Report::new(
            Outcome::HypothesisUnmet,
            json!({ "system_header": header, "status": "hypothesis_unmet", "reason": why }),
        ));
    }
    if let Some(InhomogeneityOutcome::HypothesisUnmet(why)) = &report.inhomogeneity {
        return Ok(Report::new(
            Outcome::HypothesisUnmet,
            json!({ "system_header": header, "status": "hypothesis_unmet", "reason": why }),
        ));
    }
    let case = report.case().ok_or_else(|| Error::Construction("analysis produced no case".into()))?;
    let mut components = Vec::new();
    let mut passed = true;
    for component in components_of(case) {
        let n_plus = n_plus_witness(&sys, component)?;
        let inhom = inhomogeneity_witness(&sys, component)?;
        passed &= n_plus.passed() && inhom.passed();
        components.push(json!({
            "component": component,
            "n_plus_witness": n_plus.to_json(),
            "inhomogeneity_witness": inhom.to_json(),
        }));
    }
    Ok(Report::pass_fail(
        passed,
        json!({ "system_header": header, "case": case, "components": components, "passed": passed }),
    ))
}

pub fn cmd_sample(
    input: &Path,
    c: f64,
    count: usize,
    seed: u64,
    tol_membership: f64,
    tol_geodesic: f64,
) -> Result<Report> {
    if !c.is_finite() {
        return Err(Error::InvalidParameters(format!("level c = {c} is not finite")));
    }
    if count == 0 {
        return Err(Error::InvalidParameters("count must be positive".into()));
    }
    let (_, sys) = match load_verified(input)? {
        Ok(v) => v,
        Err(report) => return Ok(report),
    };
    let real = sys.to_real();
    let level = sample_level_set_tol(&real, c, count, seed, tol_membership)?;
    let f_bound = tol_geodesic * c.abs().max(1.0);
    let passed = level.max_f_residual < f_bound && level.max_normal_residual < tol_geodesic;
    Ok(Report::pass_fail(
        passed,
        json!({
            "system_header": sys.header(),
            "c": c,
            "delta": level.delta,
            "count": count,
            "seed": seed,
            "tolerances": { "membership": tol_membership, "geodesic": tol_geodesic, "f_residual_bound": f_bound },
            "max_f_residual": level.max_f_residual,
            "max_normal_residual": level.max_normal_residual,
            "residuals": level.residuals,
            "passed": passed,
        }),
    ))
}

pub fn cmd_example(name: &str, count: usize, seed: u64) -> Result<Report> {
    let bundle = example(name)?;
    let report = run_example(&bundle, count, seed)?;
    Ok(Report::pass_fail(report.passed(), report.to_json()))
}

/// Runs one parsed command; errors become reports with their exit status.
pub fn execute(cli: &Cli) -> (Report, Option<&Path>) {
    let (result, out) = match &cli.command {
        Command::Construct { m, r, d, io } => (cmd_construct(*m, *r, *d), io.out.as_deref()),
        Command::Verify { io, seed } => (cmd_verify(&io.input, *seed), io.out.as_deref()),
        Command::Analyze { io } => (cmd_analyze(&io.input), io.out.as_deref()),
        Command::Witness { io } => (cmd_witness(&io.input), io.out.as_deref()),
        Command::Sample { io, c, count, seed, tol_membership, tol_geodesic } => {
            (cmd_sample(&io.input, *c, *count, *seed, *tol_membership, *tol_geodesic), io.out.as_deref())
        }
        Command::Example { name, count, seed, io } => (cmd_example(name, *count, *seed), io.out.as_deref()),
    };
    (result.unwrap_or_else(|e| Report::error(&e)), out)
}

/// Pretty JSON with a trailing newline; key order is sorted, floats use the
/// shortest round-trip form.
pub fn render(body: &Value) -> String {
    let mut text = serde_json::to_string_pretty(body).expect("JSON values always serialize");
    text.push('\n');
    text
}

/// Entry point shared by the binary.
pub fn run<I, S>(args: I) -> ExitCode
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Outcome::UserError.into() } else { Outcome::Success.into() };
        }
    };
    let (report, out) = execute(&cli);
    let text = render(&report.body);
    match out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return Outcome::UserError.into();
            }
        }
        None => print!("{text}"),
    }
    if report.outcome != Outcome::Success {
        if let Some(err) = report.body.get("error") {
            eprintln!("clifford-forge: {}", err.as_str().unwrap_or_default());
        }
    }
    report.outcome.into()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_system(m: usize, r: usize, d: usize) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sys.json");
        let report = cmd_construct(m, r, d).unwrap();
        assert_eq!(report.outcome, Outcome::Success);
        fs::write(&path, render(&report.body)).unwrap();
        (dir, path)
    }

    #[test]
    fn construct_range_errors_are_user_errors() {
        for (m, r, d) in [(1, 0, 1), (4, 5, 1), (4, 0, 0)] {
            let e = cmd_construct(m, r, d).unwrap_err();
            assert_eq!(Outcome::of_error(&e), Outcome::UserError);
        }
        assert_eq!(cmd_construct(4, 0, 1).unwrap().body["l"], 8);
    }

    #[test]
    fn analyze_and_witness_outcomes() {
        let (_dir, path) = write_system(4, 0, 1);
        let a = cmd_analyze(&path).unwrap();
        assert_eq!(a.outcome, Outcome::Success);
        assert_eq!(a.body["case"], "a");
        let w = cmd_witness(&path).unwrap();
        assert_eq!(w.outcome, Outcome::Success);
        assert_eq!(w.body["components"].as_array().unwrap().len(), 2);
        let (_dir2, unmet) = write_system(4, 2, 1);
        assert_eq!(cmd_witness(&unmet).unwrap().outcome, Outcome::HypothesisUnmet);
    }

    #[test]
    fn sample_rejects_levels_outside_the_range() {
        let (_dir, path) = write_system(4, 0, 1);
        let e = cmd_sample(&path, 2.0, 3, 0, MEMBERSHIP_TOL, DEFAULT_TOL_GEODESIC).unwrap_err();
        assert_eq!(Outcome::of_error(&e), Outcome::UserError);
        let ok = cmd_sample(&path, 0.0, 5, 0, MEMBERSHIP_TOL, DEFAULT_TOL_GEODESIC).unwrap();
        assert_eq!(ok.outcome, Outcome::Success);
        assert_eq!(ok, cmd_sample(&path, 0.0, 5, 0, MEMBERSHIP_TOL, DEFAULT_TOL_GEODESIC).unwrap());
    }

    #[test]
    fn unknown_example_is_a_user_error() {
        let e = cmd_example("m4r2", 1, 0).unwrap_err();
        assert_eq!(Outcome::of_error(&e), Outcome::UserError);
    }
}
