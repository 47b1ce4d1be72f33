//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a violated law or failed suite, 2 bad usage or
//! malformed input.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{ParamVectorField, VectorField};
use crate::io::dot::{emit_closed_dot, emit_dot};
use crate::io::model::parse_model;
use crate::io::report::{report_text, ReportDocument};
use crate::nonautonomous::{classify_param, close_field};
use crate::oracle::oracle_classify;
use crate::properties::classify;
use crate::selftest::{
    exhaustive_lattice, nonautonomous_suite, randomized_suite, separation_search, SeparationReport,
    SuiteResult,
};
use crate::state::{State, TotalState};

#[derive(Parser, Debug)]
#[command(name = "ugd", version, about = "Delay-insensitivity and hazard analysis of Boolean vector fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify one state.
    Analyze {
        model: PathBuf,
        #[arg(long)]
        state: String,
        /// Target input; the state is then a total state of n + m bits.
        #[arg(long)]
        param: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Classify every state in ascending order.
    ClassifyAll {
        model: PathBuf,
        #[arg(long)]
        param: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Write the DOT diagram of the μ relation.
    Graph {
        model: PathBuf,
        #[arg(long)]
        state: Option<String>,
        #[arg(long)]
        param: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the orbit of the full-update iterates.
    Orbit {
        model: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long)]
        param: Option<String>,
    },
    /// Compare the decision procedures with the brute-force oracle.
    OracleCheck {
        model: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long)]
        param: Option<String>,
    },
    /// Run the verification suites.
    Selftest {
        /// Exhaustive suite over all fields of widths 1 to N.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        n: Option<u8>,
        /// Width of the seeded randomized suite.
        #[arg(long)]
        rand_n: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also compare each randomized case with the oracle.
        #[arg(long)]
        oracle: bool,
        /// Samples of the closed-field suite at n = 2, m = 1.
        #[arg(long)]
        closed: Option<usize>,
        /// Search for separation witnesses up to width 3.
        #[arg(long)]
        separations: bool,
    },
}

enum Failure {
    /// A law was violated or a suite failed.
    Defect(String),
    /// Usage or input error.
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_defect() {
            Failure::Defect(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs one invocation; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(Failure::Defect(msg)) => {
            let _ = writeln!(err, "defect: {msg}");
            1
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::Input(e.to_string())
}

fn load(path: &Path) -> std::result::Result<ParamVectorField, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_bits(text: &str, flag: &str, width: usize) -> Result<State> {
    let s: State = text.parse()?;
    if s.width() != width {
        return Err(Error::Precondition(format!(
            "--{flag} {text:?} has {} bits, expected {width}",
            s.width()
        )));
    }
    Ok(s)
}

/// The field under analysis: autonomous, or closed over a target input.
enum Subject {
    Autonomous(VectorField),
    Closed {
        f: ParamVectorField,
        target: State,
        view: VectorField,
    },
}

impl Subject {
    fn new(f: ParamVectorField, param: Option<&str>) -> Result<Self> {
        match (f.input_width(), param) {
            (0, None) => Ok(Subject::Autonomous(f.as_autonomous().expect("m = 0"))),
            (0, Some(_)) => Err(Error::Precondition("--param needs a model with inputs (m >= 1)".into())),
            (m, None) => Err(Error::Precondition(format!(
                "the model has {m} input coordinates; give the target input with --param"
            ))),
            (m, Some(text)) => {
                let target = parse_bits(text, "param", m)?;
                let view = close_field(&f, target)?.view().clone();
                Ok(Subject::Closed { f, target, view })
            }
        }
    }

    fn view(&self) -> &VectorField {
        match self {
            Subject::Autonomous(g) => g,
            Subject::Closed { view, .. } => view,
        }
    }

    fn state(&self, text: &str) -> Result<State> {
        parse_bits(text, "state", self.view().width())
    }

    fn report(&self, z: State) -> Result<ReportDocument> {
        match self {
            Subject::Autonomous(g) => Ok(ReportDocument::from_report(&classify(g, z)?)),
            Subject::Closed { f, target, .. } => {
                let total = TotalState::from_joined(z, f.state_width())?;
                Ok(ReportDocument::from_mode_report(&classify_param(f, total, *target)?))
            }
        }
    }
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Outcome {
    let text = serde_json::to_string_pretty(value).expect("documents serialize");
    writeln!(out, "{text}").map_err(io_failure)
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match command {
        Command::Analyze {
            model,
            state,
            param,
            format,
        } => {
            let subject = Subject::new(load(&model)?, param.as_deref())?;
            let doc = subject.report(subject.state(&state)?)?;
            match format {
                Format::Json => writeln!(out, "{}", doc.to_json()).map_err(io_failure),
                Format::Text => write!(out, "{}", report_text(&doc)).map_err(io_failure),
            }
        }
        Command::ClassifyAll { model, param, format } => {
            let subject = Subject::new(load(&model)?, param.as_deref())?;
            let docs = subject
                .view()
                .states()
                .map(|z| subject.report(z))
                .collect::<Result<Vec<_>>>()?;
            match format {
                Format::Json => print_json(out, &docs),
                Format::Text => {
                    let blocks: Vec<String> = docs.iter().map(report_text).collect();
                    write!(out, "{}", blocks.join("\n")).map_err(io_failure)
                }
            }
        }
        Command::Graph {
            model,
            state,
            param,
            out: path,
        } => {
            let f = load(&model)?;
            let subject = Subject::new(f.clone(), param.as_deref())?;
            let root = state.as_deref().map(|s| subject.state(s)).transpose()?;
            let text = match &subject {
                Subject::Autonomous(g) => emit_dot(g, root)?,
                Subject::Closed { f, target, .. } => emit_closed_dot(&close_field(f, *target)?, root)?,
            };
            std::fs::write(&path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
        Command::Orbit { model, state, param } => {
            let subject = Subject::new(load(&model)?, param.as_deref())?;
            let orbit = subject.view().orbit_summary(subject.state(&state)?)?;
            print_json(out, &orbit)
        }
        Command::OracleCheck { model, state, param } => {
            let subject = Subject::new(load(&model)?, param.as_deref())?;
            let g = subject.view();
            if g.width() > crate::selftest::MAX_ORACLE_WIDTH {
                return Err(Failure::Input(format!(
                    "oracle-check needs n + m <= {}, got {}",
                    crate::selftest::MAX_ORACLE_WIDTH,
                    g.width()
                )));
            }
            let z = subject.state(&state)?;
            let reference = oracle_classify(g, z)?;
            let report = classify(g, z)?;
            let differences = report.verdict_differences(&reference);
            #[derive(Serialize)]
            struct OracleCheck {
                state: State,
                agree: bool,
                differences: Vec<String>,
                oracle: ReportDocument,
            }
            print_json(
                out,
                &OracleCheck {
                    state: z,
                    agree: differences.is_empty(),
                    differences: differences.clone(),
                    oracle: ReportDocument::from_report(&reference),
                },
            )?;
            if differences.is_empty() {
                Ok(())
            } else {
                Err(Failure::Defect(format!("oracle disagrees: {}", differences.join("; "))))
            }
        }
        Command::Selftest {
            n,
            rand_n,
            samples,
            seed,
            oracle,
            closed,
            separations,
        } => selftest(
            SelftestPlan {
                n: n.map(usize::from),
                rand_n,
                samples,
                seed,
                oracle,
                closed,
                separations,
            },
            out,
            err,
        ),
    }
}

struct SelftestPlan {
    n: Option<usize>,
    rand_n: Option<usize>,
    samples: usize,
    seed: u64,
    oracle: bool,
    closed: Option<usize>,
    separations: bool,
}

fn selftest(plan: SelftestPlan, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let mut suites: Vec<SuiteResult> = Vec::new();
    let nothing_else = plan.rand_n.is_none() && plan.closed.is_none() && !plan.separations;
    let exhaustive = plan.n.or(nothing_else.then_some(2));
    if let Some(n) = exhaustive {
        for k in 1..=n {
            suites.push(exhaustive_lattice(k)?);
        }
    }
    if let Some(r) = plan.rand_n {
        suites.push(randomized_suite(r, plan.samples, plan.seed, plan.oracle)?);
    }
    if let Some(c) = plan.closed {
        suites.push(nonautonomous_suite(2, 1, c, plan.seed)?);
    }
    let separation: Option<SeparationReport> = if plan.separations {
        Some(separation_search(3, 200_000, plan.seed)?)
    } else {
        None
    };

    for s in &suites {
        writeln!(err, "{} ({:.2?})", s.summary(), s.elapsed).map_err(io_failure)?;
    }
    if let Some(sep) = &separation {
        for w in &sep.witnesses {
            writeln!(err, "separation {:?}: found at n={} state {}", w.kind, w.n, w.state).map_err(io_failure)?;
        }
        for k in &sep.missing {
            writeln!(err, "separation {k:?}: not found").map_err(io_failure)?;
        }
    }

    let passed = suites.iter().all(SuiteResult::passed)
        && separation.as_ref().is_none_or(|s| s.missing.is_empty());
    #[derive(Serialize)]
    struct SelftestDocument<'a> {
        passed: bool,
        suites: &'a [SuiteResult],
        #[serde(skip_serializing_if = "Option::is_none")]
        separations: Option<&'a SeparationReport>,
    }
    print_json(
        out,
        &SelftestDocument {
            passed,
            suites: &suites,
            separations: separation.as_ref(),
        },
    )?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Defect("self-test failed".into()))
    }
}
