use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kr_cli::artifacts::{
    check, make_extend, make_flow, make_lift, make_threefold_aut, Artifact, ExtendSource,
    MakeError, ThreefoldSource,
};
use kr_cli::suites::{run, RunConfig, Target, DEFAULT_BUDGET};
use kr_core::threefold::LndSide;
use kr_core::trunc_aut::RParams;

/// Exact constructions and verification campaigns for the threefolds
/// x^d y + z^k + t^l + x = 0.
#[derive(Parser)]
#[command(name = "kr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a randomized property suite and print a JSON report.
    Verify(VerifyArgs),
    /// Construct an object and print it as JSON with its certificates.
    Make {
        #[command(subcommand)]
        kind: MakeKind,
    },
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value_t = 3)]
    l: u32,
}

impl ParamArgs {
    fn params(self) -> Result<RParams, MakeError> {
        RParams::new(self.d, self.k, self.l).map_err(|e| MakeError::new("usage", e.to_string()))
    }
}

#[derive(Args)]
struct VerifyArgs {
    target: Target,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    cases: u64,
    /// Degree bound for random inputs; suite default when omitted.
    #[arg(long)]
    degree: Option<u32>,
    /// Formal truncation order N of the series suites.
    #[arg(long = "order", default_value_t = 6)]
    order: u32,
    /// Maximal number of terms per random polynomial.
    #[arg(long, default_value_t = 4)]
    terms: usize,
    /// Cap on the image degree bound of words that get exact images.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Re-verify an artifact file (`-` for stdin) instead of building one.
    #[arg(long, value_name = "FILE")]
    check: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Z,
    T,
}

#[derive(Subcommand)]
enum MakeKind {
    /// exp(x^j D_H) mod x^d.
    Flow {
        #[arg(long = "H", required_unless_present = "check", allow_hyphen_values = true)]
        h: Option<String>,
        #[arg(long, default_value_t = 1)]
        j: u32,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[command(flatten)]
        out: Output,
    },
    /// A shear word lifting exp(x^j D_h) mod x^d.
    Lift {
        #[arg(long = "h", required_unless_present = "check", allow_hyphen_values = true)]
        h: Option<String>,
        #[arg(long, default_value_t = 1)]
        j: u32,
        #[arg(long, default_value_t = 2)]
        d: u32,
        /// Certify the word modulo x^depth (default d).
        #[arg(long)]
        depth: Option<u32>,
        #[command(flatten)]
        out: Output,
    },
    /// An automorphism of the threefold.
    ThreefoldAut {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, group = "source", allow_hyphen_values = true)]
        gamma: Option<String>,
        /// Lift to depth d + 1 (only with --gamma).
        #[arg(long, requires = "gamma")]
        deep: bool,
        #[arg(long, group = "source")]
        word: Option<String>,
        #[arg(long, group = "source", allow_hyphen_values = true)]
        torus: Option<String>,
        #[arg(long, group = "source", requires = "s")]
        lnd_side: Option<Side>,
        #[arg(long, requires = "lnd_side", allow_hyphen_values = true)]
        s: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// An automorphism of four-space preserving (P).
    Extend {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, group = "source", allow_hyphen_values = true)]
        gamma: Option<String>,
        #[arg(long, requires = "gamma")]
        deep: bool,
        #[arg(long, group = "source")]
        ad_word: Option<String>,
        #[arg(long, group = "source", allow_hyphen_values = true)]
        torus: Option<String>,
        #[command(flatten)]
        out: Output,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = kr_cli::init_thread_pool() {
        eprintln!("{e}");
        return ExitCode::from(2);
    }
    match cli.command {
        Command::Verify(args) => verify(args),
        Command::Make { kind } => make(kind),
    }
}

fn usage_error(e: &MakeError) -> ExitCode {
    let body = serde_json::json!({ "error": e });
    eprintln!("{body}");
    ExitCode::from(2)
}

fn write_output(text: &str, path: Option<&PathBuf>) -> Result<(), ExitCode> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| {
            eprintln!("cannot write {}: {e}", p.display());
            ExitCode::from(2)
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn verify(args: VerifyArgs) -> ExitCode {
    let params = match args.params.params() {
        Ok(p) => p,
        Err(e) => return usage_error(&e),
    };
    let mut cfg = RunConfig::new(args.target, params, args.seed, args.cases);
    cfg.degree = args.degree;
    cfg.order = args.order;
    cfg.terms = args.terms.max(1);
    cfg.budget = args.budget;
    if cfg.order == 0 {
        return usage_error(&MakeError::new("usage", "--order must be positive"));
    }
    let report = run(&cfg);
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Err(code) = write_output(&text, args.output.as_ref()) {
        return code;
    }
    eprintln!(
        "{} {}: {} passed, {} failed, {} skipped",
        report.target, params, report.passed, report.failed, report.skipped
    );
    if report.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn make(kind: MakeKind) -> ExitCode {
    let (expected, out) = match &kind {
        MakeKind::Flow { out, .. } => ("flow", out),
        MakeKind::Lift { out, .. } => ("lift", out),
        MakeKind::ThreefoldAut { out, .. } => ("threefold-aut", out),
        MakeKind::Extend { out, .. } => ("extend", out),
    };
    if let Some(path) = &out.check {
        return check_file(expected, path);
    }
    let output = out.output.clone();
    let built = match kind {
        MakeKind::Flow { h, j, d, .. } => make_flow(&h.unwrap_or_default(), j, d),
        MakeKind::Lift { h, j, d, depth, .. } => make_lift(&h.unwrap_or_default(), j, d, depth),
        MakeKind::ThreefoldAut {
            params,
            gamma,
            deep,
            word,
            torus,
            lnd_side,
            s,
            ..
        } => params.params().and_then(|params| {
            let source = if let Some(gamma) = gamma {
                ThreefoldSource::Gamma { gamma, deep }
            } else if let Some(word) = word {
                ThreefoldSource::Word(word)
            } else if let Some(q) = torus {
                ThreefoldSource::Torus(q)
            } else if let (Some(side), Some(s)) = (lnd_side, s) {
                let side = match side {
                    Side::Z => LndSide::ZSide,
                    Side::T => LndSide::TSide,
                };
                ThreefoldSource::Lnd { side, s }
            } else {
                return Err(MakeError::new(
                    "usage",
                    "one of --gamma, --word, --torus, --lnd-side is required",
                ));
            };
            make_threefold_aut(params, &source)
        }),
        MakeKind::Extend {
            params,
            gamma,
            deep,
            ad_word,
            torus,
            ..
        } => params.params().and_then(|params| {
            let source = if let Some(gamma) = gamma {
                ExtendSource::Gamma { gamma, deep }
            } else if let Some(word) = ad_word {
                ExtendSource::AdWord(word)
            } else if let Some(q) = torus {
                ExtendSource::Torus(q)
            } else {
                return Err(MakeError::new(
                    "usage",
                    "one of --gamma, --ad-word, --torus is required",
                ));
            };
            make_extend(params, &source)
        }),
    };
    match built {
        Ok(artifact) => {
            let text = serde_json::to_string_pretty(&artifact).expect("artifact serializes");
            match write_output(&text, output.as_ref()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(code) => code,
            }
        }
        Err(e) => usage_error(&e),
    }
}

fn check_file(expected: &str, path: &PathBuf) -> ExitCode {
    let mut text = String::new();
    let read = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    if let Err(e) = read {
        return usage_error(&MakeError::new("io", format!("{}: {e}", path.display())));
    }
    let artifact: Artifact = match serde_json::from_str(&text) {
        Ok(a) => a,
        Err(e) => return usage_error(&MakeError::new("parse", e.to_string())),
    };
    if artifact.kind() != expected {
        return usage_error(&MakeError::new(
            "usage",
            format!("artifact is a {}, not a {expected}", artifact.kind()),
        ));
    }
    match check(&artifact) {
        Ok(()) => {
            println!("{}", serde_json::json!({ "check": "pass", "kind": expected }));
            ExitCode::SUCCESS
        }
        Err(reason) => {
            println!(
                "{}",
                serde_json::json!({ "check": "fail", "kind": expected, "reason": reason })
            );
            ExitCode::from(1)
        }
    }
}
