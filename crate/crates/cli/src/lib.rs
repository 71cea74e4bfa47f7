//! Command-line front end: argument parsing, theory loading, suite dispatch
//! and report output. The binary in `main.rs` only maps the outcome to an
//! exit code.

pub mod counts;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opcstar_core::calibration::{estimation_error, project_estimate, Calibrator};
use opcstar_core::check::CheckRecord;
use opcstar_core::io::{read_theory, theory_to_json, MatrixFragment};
use opcstar_core::models::Model;
use opcstar_core::suites;
use opcstar_core::{Error, Theory};
use serde_json::json;

use report::{Report, Timings, Tolerances};

#[derive(Debug, Parser)]
#[command(
    name = "opcstar",
    version,
    about = "Checks operational theories and their GNS representation"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Theory file (JSON).
    #[arg(long, global = true, conflicts_with = "model")]
    pub theory: Option<PathBuf>,
    /// Built-in model: `qubit` or `classicalN`.
    #[arg(long, global = true)]
    pub model: Option<String>,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Relative cut for the GNS null space.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub null_tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Leave the timings block out of the report.
    #[arg(long, global = true)]
    pub no_timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Axioms, Bayes chaining, monoid laws and convex closure.
    Validate {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dynamical and preparational faithfulness of the declared bipartite state.
    Faithful,
    /// Transposition axioms; prints the transpose of one named transformation.
    Transpose {
        #[arg(long)]
        transformation: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sign involution, adjoint, Gram matrix, quotient and representation.
    Gns {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// C*-identity and operator norms.
    Cstar {
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Born rule through the GNS representation.
    Born {
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Simulate and invert joint statistics on half of the faithful state.
    Calibrate {
        #[arg(long)]
        transformation: String,
        #[arg(long, default_value_t = 1_000_000)]
        shots: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Estimate from these counts instead of simulating.
        #[arg(long)]
        counts_in: Option<PathBuf>,
        #[arg(long)]
        counts_out: Option<PathBuf>,
        /// Estimate as a `{"matrix": ...}` fragment.
        #[arg(long)]
        estimate_out: Option<PathBuf>,
        /// Clip the estimate into the theory's cone.
        #[arg(long)]
        project: bool,
    },
    /// Write a built-in model as a theory file.
    ExportTheory { model: String },
}

/// What a run produced; `main` turns it into output and an exit code.
#[derive(Debug)]
pub enum Outcome {
    Report(Box<Report>),
    Document(String),
}

impl Outcome {
    pub fn passed(&self) -> bool {
        match self {
            Outcome::Report(r) => r.passed,
            Outcome::Document(_) => true,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Outcome::Report(r), Format::Json) => r.to_json(),
            (Outcome::Report(r), Format::Text) => r.to_text(),
            (Outcome::Document(d), _) => d.clone(),
        }
    }
}

/// Input and schema problems; everything else is a failed run.
pub fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Input(_)
            | Error::DimensionMismatch { .. }
            | Error::Unknown { .. }
            | Error::Json(_)
            | Error::Io(_)
    )
}

pub fn load_theory(global: &Global) -> Result<Theory, Error> {
    match (&global.theory, &global.model) {
        (Some(path), None) => read_theory(path),
        (None, Some(name)) => Ok(name.parse::<Model>()?.build()?.0),
        (None, None) => Err(Error::Input(
            "one of --theory or --model is required".into(),
        )),
        (Some(_), Some(_)) => Err(Error::Input("--theory and --model are exclusive".into())),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, Error> {
    let started = Instant::now();
    let g = &cli.global;
    if !(g.tol > 0.0 && g.null_tol > 0.0) {
        return Err(Error::Input("tolerances must be positive".into()));
    }
    if let Command::ExportTheory { model } = &cli.command {
        let (theory, _) = model.parse::<Model>()?.build()?;
        return Ok(Outcome::Document(theory_to_json(&theory)?));
    }
    let theory = load_theory(g)?;
    let tolerances = Tolerances {
        tol: g.tol,
        null_tol: g.null_tol,
    };
    let report =
        |name: &str, seed: Option<u64>| Report::new(name, &theory.name, tolerances.clone(), seed);

    let mut out = match &cli.command {
        Command::Validate { samples, seed } => report("validate", Some(*seed))
            .with_suite(suites::theory_suite(&theory, *samples, *seed, g.tol)),
        Command::Faithful => {
            report("faithful", None).with_suite(suites::faithful_suite(&theory, g.tol)?)
        }
        Command::Transpose {
            transformation,
            samples,
            seed,
        } => report("transpose", Some(*seed)).with_suite(suites::transpose_suite(
            &theory,
            *samples,
            *seed,
            g.tol,
            transformation.as_deref(),
        )?),
        Command::Gns { samples, seed } => report("gns", Some(*seed)).with_suite(suites::gns_suite(
            &theory, *samples, *seed, g.tol, g.null_tol,
        )?),
        Command::Cstar { samples, seed } => report("cstar", Some(*seed)).with_suite(
            suites::cstar_suite(&theory, *samples, *seed, g.tol, g.null_tol)?,
        ),
        Command::Born { trials, seed } => report("born", Some(*seed)).with_suite(
            suites::born_suite(&theory, *trials, *seed, g.tol, g.null_tol)?,
        ),
        Command::Calibrate {
            transformation,
            shots,
            seed,
            counts_in,
            counts_out,
            estimate_out,
            project,
        } => {
            let r = report("calibrate", Some(*seed));
            match counts_in {
                Some(path) => {
                    calibrate_from_counts(r, &theory, transformation, path, *project, g.tol)?
                }
                None => {
                    let (suite, counts, estimate) = suites::calibrate_suite(
                        &theory,
                        transformation,
                        *shots,
                        *seed,
                        g.tol,
                        *project,
                    )?;
                    if let (Some(path), Some(c)) = (counts_out, &counts) {
                        counts::write_counts(path, c)?;
                    }
                    if let (Some(path), Some(e)) = (estimate_out, &estimate) {
                        write_estimate(path, e)?;
                    }
                    r.with_suite(suite)
                }
            }
        }
        Command::ExportTheory { .. } => unreachable!("handled above"),
    };
    if !g.no_timings {
        out.timings = Some(Timings {
            total_ms: started.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok(Outcome::Report(Box::new(out)))
}

fn write_estimate(
    path: &std::path::Path,
    estimate: &opcstar_core::TransformationMatrix,
) -> Result<(), Error> {
    let mut s = serde_json::to_string_pretty(&MatrixFragment::from_matrix(estimate))?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

fn calibrate_from_counts(
    mut report: Report,
    theory: &Theory,
    name: &str,
    path: &std::path::Path,
    project: bool,
    tol: f64,
) -> Result<Report, Error> {
    let cal = Calibrator::for_theory(theory, tol)?;
    let truth = theory.transformation(name)?;
    let counts = counts::read_counts(path)?;
    let mut estimate = cal.estimate(&counts)?;
    if project {
        estimate = project_estimate(theory, &estimate);
    }
    let err = estimation_error(&estimate, truth, theory);
    let expected = cal.expected_error(truth, counts.shots(), tol)?;
    report.checks.push(
        CheckRecord::against("statistical_error", err.frobenius, 4.0 * expected)
            .with_detail("Frobenius distance against four times its expected rms"),
    );
    report.passed = opcstar_core::check::all_passed(&report.checks);
    let rows: Vec<Vec<f64>> = estimate.to_rows();
    report.data.insert("transformation".into(), json!(name));
    report.data.insert("shots".into(), json!(counts.shots()));
    report.data.insert("estimate".into(), json!(rows));
    report
        .data
        .insert("frobenius_error".into(), json!(err.frobenius));
    report.data.insert(
        "worst_probability_error".into(),
        json!(err.worst_probability),
    );
    report
        .data
        .insert("expected_rms_error".into(), json!(expected));
    report.data.insert("projected".into(), json!(project));
    Ok(report)
}
