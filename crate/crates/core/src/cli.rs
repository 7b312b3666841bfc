//! Command-line front end. Exit codes: 0 all checks pass, 1 a check fails,
//! 2 usage, parse or configuration error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::coideal::Case;
use crate::verify::{self, catalog, emit_labels, emit_operator, Mode, RunConfig, Tier};

#[derive(Debug, Parser)]
#[command(name = "qonsager", version, about = "Exact checks for coideal symmetries of the open XXZ chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Symbolic,
    Generic,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a suite: a file path or one of builtin:all, builtin:open-questions, builtin:negative-controls.
    Verify {
        suite: String,
        #[arg(long)]
        sites: Option<usize>,
        #[arg(long, value_enum, default_value = "symbolic")]
        mode: ModeArg,
        /// Required in generic mode.
        #[arg(long)]
        seed: Option<u64>,
        /// generic, triangular, diagonal, special-A or special-B.
        #[arg(long)]
        case: Option<String>,
        /// JSON report path; a text rendering is written next to it with a .txt extension.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write millis as 0 so repeated runs give identical reports.
        #[arg(long)]
        no_timings: bool,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Lift the site-count limits.
        #[arg(long)]
        allow_large: bool,
    },
    /// Write the chain matrix of a labelled operator.
    Emit {
        label: String,
        #[arg(long)]
        sites: usize,
        /// `.json` gives the operator document, anything else coordinate text.
        #[arg(long)]
        out: PathBuf,
    },
    /// List catalog checks and emit labels.
    List {
        #[arg(long)]
        tier: Option<String>,
    },
}

fn text_path(p: &Path) -> PathBuf {
    p.with_extension("txt")
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match cli.command {
        Command::Verify { suite, sites, mode, seed, case, report, no_timings, threads, allow_large } => {
            let mode = match mode {
                ModeArg::Symbolic => Mode::Symbolic,
                ModeArg::Generic => Mode::Generic,
            };
            if mode == Mode::Generic && seed.is_none() {
                let _ = writeln!(err, "error: --mode generic requires --seed");
                return 2;
            }
            let case = match case.as_deref().map(|c| (c, Case::from_name(c))) {
                None => None,
                Some((_, Some(c))) => Some(c),
                Some((c, None)) => {
                    let _ = writeln!(err, "error: unknown case `{c}`");
                    return 2;
                }
            };
            if sites == Some(0) {
                let _ = writeln!(err, "error: --sites must be at least 1");
                return 2;
            }
            let text = match verify::builtin_suite(&suite) {
                Some(t) => t.to_string(),
                None => match std::fs::read_to_string(&suite) {
                    Ok(t) => t,
                    Err(e) => {
                        let _ = writeln!(err, "error: cannot read suite `{suite}`: {e}");
                        return 2;
                    }
                },
            };
            let cfg = RunConfig { mode, seed, sites, case, allow_large, timings: !no_timings, threads };
            let rep = match verify::run_suite_text(&suite, &text, &cfg) {
                Ok(r) => r,
                Err(verify::VerifyError::Parse(p)) => {
                    let _ = writeln!(err, "{suite}:{}:{}: {}", p.span.line, p.span.col, p);
                    return 2;
                }
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return 2;
                }
            };
            if rep.checks.iter().any(|c| {
                c.status == verify::Status::Error
                    && c.residual.note.as_deref().is_some_and(|n| n.contains("limit for this mode"))
            }) {
                let _ = write!(out, "{}", rep.to_text());
                let _ = writeln!(err, "error: requested site count is out of range for some checks");
                return 2;
            }
            let _ = write!(out, "{}", rep.to_text());
            if let Some(path) = report {
                if let Err(e) = std::fs::write(&path, rep.to_json()).and_then(|_| std::fs::write(text_path(&path), rep.to_text())) {
                    let _ = writeln!(err, "error: cannot write report: {e}");
                    return 2;
                }
            }
            rep.exit_code()
        }
        Command::Emit { label, sites, out: path } => {
            if sites == 0 {
                let _ = writeln!(err, "error: --sites must be at least 1");
                return 2;
            }
            let op = match emit_operator(&label, sites) {
                Ok(op) => op,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return 2;
                }
            };
            let body = if path.extension().is_some_and(|e| e == "json") {
                serde_json::to_string_pretty(&op.to_json()).expect("operator serializes") + "\n"
            } else {
                op.matrix.to_coordinate_text()
            };
            if let Err(e) = std::fs::write(&path, body) {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                return 2;
            }
            let _ = writeln!(out, "{} on {} sites: {}x{}, {} nonzero", label, sites, op.matrix.dim(), op.matrix.dim(), op.matrix.nnz());
            0
        }
        Command::List { tier } => {
            let tier = match tier.as_deref().map(|t| (t, Tier::from_name(t))) {
                None => None,
                Some((_, Some(t))) => Some(t),
                Some((t, None)) => {
                    let _ = writeln!(err, "error: unknown tier `{t}`");
                    return 2;
                }
            };
            let _ = writeln!(out, "suites: {}", verify::BUILTIN_SUITES.join(" "));
            for e in catalog().iter().filter(|e| tier.map_or(true, |t| e.tier == t)) {
                let _ = writeln!(out, "{:<44} {:<8} {}", e.id, e.tier.name(), e.anchor);
            }
            if tier.is_none() {
                let _ = writeln!(out, "emit labels: {} expr:<expression>", emit_labels().join(" "));
            }
            0
        }
    }
}
