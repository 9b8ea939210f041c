use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use nlpress::{exit, Diagnostic, Overrides, Precision, RunError, RunSettings};

/// Exact local pressure experiments on subshifts of finite type.
#[derive(Parser, Debug)]
#[command(name = "nlpress", version)]
struct Args {
    /// Experiment file (TOML).
    config: PathBuf,
    /// Directory for the CSV/JSON outputs.
    #[arg(long, default_value = "out")]
    output_dir: PathBuf,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Overrides `run.precision`.
    #[arg(long, value_enum)]
    precision: Option<PrecisionArg>,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Check the config and exit.
    #[arg(long)]
    validate_only: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PrecisionArg {
    Float,
    Exact,
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn report_diagnostics(diags: &[Diagnostic]) {
    let body = serde_json::json!({ "diagnostics": diags });
    println!("{}", serde_json::to_string_pretty(&body).expect("json"));
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return code(exit::INVALID_CONFIG);
        }
    };
    let overrides = Overrides {
        precision: args.precision.map(|p| match p {
            PrecisionArg::Float => Precision::Float,
            PrecisionArg::Exact => Precision::Exact,
        }),
        seed: args.seed,
    };
    let exp = match nlpress::load(&text, &overrides) {
        Ok(exp) => exp,
        Err(diags) => {
            report_diagnostics(&diags);
            return code(exit::INVALID_CONFIG);
        }
    };
    if args.validate_only {
        report_diagnostics(&[]);
        return code(exit::OK);
    }

    match nlpress::run(
        &exp,
        &text,
        &args.output_dir,
        &RunSettings {
            workers: args.workers,
        },
    ) {
        Ok(summary) => {
            eprintln!(
                "{}: {} audits, {} failed; wrote {} to {}",
                exp.name,
                summary.audits_total,
                summary.audits_failed,
                summary.outputs.join(", "),
                args.output_dir.display()
            );
            code(if summary.passed() {
                exit::OK
            } else {
                exit::AUDIT_FAILED
            })
        }
        Err(e) => {
            eprintln!("error: {e}");
            code(match e {
                RunError::Limit { .. } => exit::LIMIT,
                _ => exit::RUN_ERROR,
            })
        }
    }
}
