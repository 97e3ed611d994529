//! `qecw`: simulate quantum programs, rewrite them into error-corrected
//! form, and compare plain against encoded programs under noise.
//!
//! Exit status is 0 on success, 1 for invalid input (bad flags, unreadable
//! or invalid programs) and 2 for errors raised while simulating.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use qecw::format::{parse_program, serialize_program, FormatError};
use qecw::ir::QProgram;
use qecw::noise::{estimate_logical_error_rate, Channel, Location, NoiseError, NoiseSpec, ReportMeta, TrialReport};
use qecw::qec::{get_code, CodeScheme, QecError, CATALOG};
use qecw::sim::{evaluate_exact, evaluate_run, SimError};
use qecw::transform::{transform_with, CorrectionPolicy, TransformError, TransformOptions};
use qecw::{corpus, report};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "qecw", version, about = "Quantum programs, error-correcting rewrites and noise trials")]
struct Cli {
    /// Print errors as one JSON object on stderr.
    #[arg(long, global = true)]
    json_errors: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the exact outcome distribution.
    Sim {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: Output,
    },
    /// Print one sampled result.
    Run {
        #[command(flatten)]
        input: Input,
        #[arg(long, env = "QECW_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Rewrite a program into its error-corrected form.
    Transform {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        encoding: Encoding,
        #[command(flatten)]
        out: Output,
    },
    /// Compare plain and encoded error rates under a noise channel.
    Trials(TrialArgs),
    /// List the built-in programs, or print one as a program document.
    Corpus {
        name: Option<String>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Input {
    /// Program file, `-` for stdin, or `corpus:NAME` for a built-in.
    program: String,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Encoding {
    #[arg(long, value_parser = PossibleValuesParser::new(CATALOG))]
    code: String,
    /// after-each-op, every-k:K or never.
    #[arg(long, default_value = "after-each-op", value_parser = parse_policy)]
    policy: CorrectionPolicy,
}

#[derive(Args)]
struct TrialArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    encoding: Encoding,
    #[arg(long, value_parser = PossibleValuesParser::new(["none", "bit_flip", "phase_flip", "depolarizing"]))]
    noise: String,
    /// Channel probability; required unless the noise is `none`.
    #[arg(long)]
    p: Option<f64>,
    #[arg(
        long,
        default_value = "per_fragment_boundary",
        value_parser = PossibleValuesParser::new(["per_gate", "per_fragment_boundary"])
    )]
    location: String,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, env = "QECW_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Add wall-clock time to the JSON report under `meta`.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_policy(s: &str) -> Result<CorrectionPolicy, String> {
    s.parse()
}

/// A reportable failure with its exit status.
struct Failure {
    exit: u8,
    kind: &'static str,
    message: String,
    detail: Value,
}

impl Failure {
    fn input(kind: &'static str, message: impl ToString) -> Self {
        Self {
            exit: 1,
            kind,
            message: message.to_string(),
            detail: Value::Null,
        }
    }

    fn runtime(kind: &'static str, message: impl ToString) -> Self {
        Self {
            exit: 2,
            ..Self::input(kind, message)
        }
    }

    fn with(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    fn to_json(&self) -> String {
        let mut v = json!({"error": self.kind, "message": self.message, "exit": self.exit});
        if !self.detail.is_null() {
            v["detail"] = self.detail.clone();
        }
        v.to_string()
    }
}

fn violations(r: &qecw::ir::ValidationReport) -> Value {
    r.violations
        .iter()
        .map(|v| json!({"statement": v.index, "kind": format!("{:?}", v.kind)}))
        .collect()
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        let detail = match &e {
            FormatError::SyntaxError { line, column, .. } => json!({"line": line, "column": column}),
            FormatError::UnsupportedVersion(v) => json!({"version": v}),
            FormatError::ValidationFailed(r) => json!({"violations": violations(r)}),
        };
        let kind = match e {
            FormatError::SyntaxError { .. } => "syntax",
            FormatError::UnsupportedVersion(_) => "unsupported_version",
            FormatError::ValidationFailed(_) => "validation",
        };
        Failure::input(kind, &e).with(detail)
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match &e {
            SimError::Invalid(r) => Failure::input("validation", &e).with(json!({"violations": violations(r)})),
            _ => Failure::runtime("simulation", e),
        }
    }
}

impl From<QecError> for Failure {
    fn from(e: QecError) -> Self {
        Failure::input("code", e)
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Invalid(ref r) => {
                Failure::input("validation", &e).with(json!({"violations": violations(r)}))
            }
            TransformError::Qec(q) => q.into(),
            TransformError::UnknownQubit(_) => Failure::input("transform", e),
        }
    }
}

impl From<NoiseError> for Failure {
    fn from(e: NoiseError) -> Self {
        match e {
            NoiseError::Transform(t) => t.into(),
            NoiseError::Sim(s) => s.into(),
            other => Failure::input("noise", other),
        }
    }
}

fn load(input: &Input) -> Result<QProgram, Failure> {
    if let Some(name) = input.program.strip_prefix("corpus:") {
        return corpus::program(name).ok_or_else(|| {
            Failure::input("input", format!("no built-in program `{name}` ({})", corpus::NAMES.join(", ")))
        });
    }
    let text = if input.program == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::input("input", format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(&input.program)
            .map_err(|e| Failure::input("input", format!("{}: {e}", input.program)))?
    };
    Ok(parse_program(&text)?)
}

fn emit(out: &Output, mut text: String) -> Result<(), Failure> {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &out.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::runtime("output", format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn code_of(e: &Encoding) -> Result<(CodeScheme, TransformOptions), Failure> {
    let opts = TransformOptions {
        policy: e.policy,
        ..TransformOptions::default()
    };
    Ok((get_code(&e.code)?, opts))
}

fn trials(a: &TrialArgs) -> Result<(), Failure> {
    let p = match (a.noise.as_str(), a.p) {
        ("none", p) => p.unwrap_or(0.0),
        (_, Some(p)) => p,
        (noise, None) => return Err(Failure::input("usage", format!("--noise {noise} requires --p"))),
    };
    let spec = NoiseSpec {
        channel: Channel::new(&a.noise, p)?,
        location: a.location.parse::<Location>()?,
    };
    let program = load(&a.input)?;
    let (code, opts) = code_of(&a.encoding)?;
    let start = Instant::now();
    let mut r = estimate_logical_error_rate(&program, &code, &spec, &opts, a.trials, a.seed)?;
    let text = match a.format {
        Format::Csv => TrialReport::to_csv(&[r]),
        Format::Json => {
            if a.timing {
                let elapsed_ms = report::round_sig(start.elapsed().as_secs_f64() * 1e3);
                r.meta = Some(ReportMeta { elapsed_ms });
            }
            r.to_json()
        }
    };
    emit(&a.out, text)
}

fn execute(command: &Command) -> Result<(), Failure> {
    match command {
        Command::Sim { input, out } => emit(out, evaluate_exact(&load(input)?)?.to_json()),
        Command::Run { input, seed, out } => {
            let r = evaluate_run(&load(input)?, *seed)?;
            emit(out, json!({"result": r.to_string(), "seed": seed}).to_string())
        }
        Command::Transform { input, encoding, out } => {
            let p = load(input)?;
            let (code, opts) = code_of(encoding)?;
            let t = transform_with(&p, &code, &opts)?;
            emit(out, serialize_program(&t.program))
        }
        Command::Trials(a) => trials(a),
        Command::Corpus { name: None, out } => emit(out, corpus::NAMES.join("\n")),
        Command::Corpus { name: Some(name), out } => {
            let p = load(&Input {
                program: format!("corpus:{name}"),
            })?;
            emit(out, serialize_program(&p))
        }
    }
}

fn report(f: &Failure, json_errors: bool) -> ExitCode {
    if json_errors {
        eprintln!("{}", f.to_json());
    } else {
        eprintln!("qecw: {}", f.message);
    }
    ExitCode::from(f.exit)
}

fn main() -> ExitCode {
    let json_errors = std::env::args_os().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) if json_errors => {
            let message = e.kind().as_str().map_or_else(|| e.to_string(), str::to_owned);
            return report(&Failure::input("usage", message), true);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(&f, cli.json_errors),
    }
}
