//! Command-line front end. All logic lives in the library; the binary
//! just forwards `std::env::args` here.
//!
//! Exit codes: 0 on success (and conformant/valid/covered verdicts),
//! 1 when a check found violations or an invalid chain, 2 for usage,
//! parse, or config errors. Set `DFCI_COLOR=1` for ANSI-colored verdicts.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::conformance::{check_trace_mode, CheckMode, ConformanceReport, Verdict};
use crate::coverage::check_custody_coverage;
use crate::custody::{CustodyChain, VerifyResult};
use crate::dsl::{parse as parse_doc, render, serialize, RenderFormat};
use crate::model::MscDocument;
use crate::objectives::{check_objectives, ObjectiveReport, ObjectiveStatus};
use crate::protocols;
use crate::sim::{
    adversary_matrix, simulate, FaultKind, FaultRule, OptPolicy, Rational, SimConfig,
};
use crate::trace::{read_trace_file, write_trace_str};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "dfci",
    version,
    about = "Executable message sequence charts for digital-forensics case protocols",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a chart file and echo its canonical form.
    Parse { file: PathBuf },
    /// Check a recorded trace for conformance and objectives.
    Check {
        #[command(flatten)]
        doc: DocArg,
        /// Trace file (JSON Lines, one event per line).
        #[arg(long)]
        trace: PathBuf,
        /// Accept conformant prefixes of in-progress runs.
        #[arg(long)]
        prefix: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run the deterministic simulator, optionally injecting faults.
    Simulate {
        #[command(flatten)]
        doc: DocArg,
        #[arg(long)]
        seed: u64,
        /// Fault spec `kind:msg=ID,p=RAT`, e.g. `drop:msg=10,p=1`; repeatable.
        #[arg(long = "fault")]
        faults: Vec<String>,
        /// Write the trace here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the custody ledger here (documents with a custody span).
        #[arg(long)]
        ledger: Option<PathBuf>,
        /// Iterations for every loop.
        #[arg(long, default_value_t = 1)]
        loops: u32,
        /// Policy for optional regions: take, skip, or random.
        #[arg(long, default_value = "take")]
        opt_policy: String,
    },
    /// Render a chart as text.
    Render {
        #[command(flatten)]
        doc: DocArg,
        /// Output format: dot or ascii.
        #[arg(long)]
        format: String,
    },
    /// Custody-ledger operations.
    Custody {
        #[command(subcommand)]
        command: CustodyCommand,
    },
    /// Fault-injection detection matrix.
    Adversary {
        #[command(flatten)]
        doc: DocArg,
        /// Comma-separated fault kinds (drop,tamper,duplicate,delay).
        #[arg(long)]
        kinds: String,
        /// Seeds: a comma list (1,2,3) or an inclusive range (1..5).
        #[arg(long)]
        seeds: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum CustodyCommand {
    /// Verify the hash chain of a ledger file.
    Verify {
        #[arg(long)]
        ledger: PathBuf,
    },
    /// Check that a ledger covers a document's custody span over a trace.
    Coverage {
        #[command(flatten)]
        doc: DocArg,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        ledger: PathBuf,
    },
}

#[derive(Args)]
struct DocArg {
    /// Chart: a .msc file path, or builtin:init, builtin:investigation,
    /// builtin:trial, builtin:case.
    #[arg(long)]
    msc: String,
}

/// Run the CLI against explicit argument and output streams.
pub fn run<O: Write, E: Write>(args: &[String], out: &mut O, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_USAGE
        }
    }
}

/// Errors here are usage/parse/config problems (exit 2); verdicts are
/// encoded in the Ok exit code.
fn dispatch<O: Write, E: Write>(command: Command, out: &mut O, err: &mut E) -> Result<i32, String> {
    let color = std::env::var("DFCI_COLOR")
        .map(|v| v == "1")
        .unwrap_or(false);
    match command {
        Command::Parse { file } => {
            let doc = load_doc_file(&file)?;
            let _ = write!(out, "{}", serialize(&doc));
            Ok(EXIT_OK)
        }
        Command::Check {
            doc,
            trace,
            prefix,
            json,
        } => {
            let doc = load_doc(&doc.msc)?;
            let trace = read_trace_file(&trace).map_err(|e| e.to_string())?;
            let mode = if prefix {
                CheckMode::Prefix
            } else {
                CheckMode::Complete
            };
            let conformance = check_trace_mode(&doc, &trace, mode).map_err(|e| e.to_string())?;
            let objectives = check_objectives(&doc, &trace).map_err(|e| e.to_string())?;
            if json {
                let report = serde_json::json!({
                    "conformance": conformance,
                    "objectives": objectives,
                });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                let _ = write!(out, "{}", format_conformance(&conformance, color));
                let _ = write!(out, "{}", format_objectives(&objectives, color));
            }
            let conformant = conformance.verdict == Verdict::Conformant;
            // Prefix mode reports objectives but does not gate on them:
            // an in-progress run has not had the chance to satisfy them.
            let ok = if prefix {
                conformant
            } else {
                conformant && objectives.all_satisfied()
            };
            Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Simulate {
            doc,
            seed,
            faults,
            out: out_path,
            ledger,
            loops,
            opt_policy,
        } => {
            let doc = load_doc(&doc.msc)?;
            let mut config = SimConfig::new(seed);
            config.default_opt = match opt_policy.as_str() {
                "take" => OptPolicy::Take,
                "skip" => OptPolicy::Skip,
                "random" => OptPolicy::Random,
                other => return Err(format!("unknown opt policy '{other}'")),
            };
            let graph = crate::graph::compile(&doc).map_err(|e| e.to_string())?;
            for cp in graph.choice_points() {
                if let crate::graph::ChoiceKind::Loop { min_iter, max_iter } = cp.kind {
                    let n = match max_iter {
                        crate::model::LoopBound::Finite(max) => loops.clamp(min_iter, max),
                        crate::model::LoopBound::Unbounded => {
                            loops.clamp(min_iter, config.loop_cap.max(min_iter))
                        }
                    };
                    config.loop_iterations.insert(cp.id.0, n);
                }
            }
            for spec in &faults {
                config.faults.push(parse_fault(spec)?);
            }
            let (trace, chain) = simulate(&doc, &config).map_err(|e| e.to_string())?;
            match &out_path {
                Some(path) => {
                    crate::trace::write_trace_file(path, &trace).map_err(|e| e.to_string())?;
                    let _ = writeln!(err, "wrote {} events to {}", trace.len(), path.display());
                }
                None => {
                    let _ = write!(out, "{}", write_trace_str(&trace));
                }
            }
            match (&ledger, chain) {
                (Some(path), Some(chain)) => {
                    chain.write_file(path).map_err(|e| e.to_string())?;
                    let _ = writeln!(
                        err,
                        "wrote {} custody entries to {}",
                        chain.len(),
                        path.display()
                    );
                }
                (Some(_), None) => {
                    return Err(format!(
                        "document '{}' declares no custody span; no ledger to write",
                        doc.name
                    ));
                }
                (None, _) => {}
            }
            Ok(EXIT_OK)
        }
        Command::Render { doc, format } => {
            let doc = load_doc(&doc.msc)?;
            let format = RenderFormat::from_str(&format)?;
            let _ = write!(out, "{}", render(&doc, format));
            Ok(EXIT_OK)
        }
        Command::Custody { command } => match command {
            CustodyCommand::Verify { ledger } => {
                let chain = CustodyChain::read_file(&ledger).map_err(|e| e.to_string())?;
                match chain.verify() {
                    VerifyResult::Valid => {
                        let _ = writeln!(
                            out,
                            "custody: {} ({} entries)",
                            paint("valid", Paint::Good, color),
                            chain.len()
                        );
                        Ok(EXIT_OK)
                    }
                    VerifyResult::Invalid {
                        index,
                        check,
                        detail,
                    } => {
                        let _ = writeln!(
                            out,
                            "custody: {} index={index} check={check} {detail}",
                            paint("invalid", Paint::Bad, color)
                        );
                        Ok(EXIT_VIOLATION)
                    }
                }
            }
            CustodyCommand::Coverage { doc, trace, ledger } => {
                let doc = load_doc(&doc.msc)?;
                let trace = read_trace_file(&trace).map_err(|e| e.to_string())?;
                let chain = CustodyChain::read_file(&ledger).map_err(|e| e.to_string())?;
                let report =
                    check_custody_coverage(&doc, &trace, &chain).map_err(|e| e.to_string())?;
                if report.covered {
                    let _ = writeln!(out, "coverage: {}", paint("covered", Paint::Good, color));
                    Ok(EXIT_OK)
                } else {
                    let _ = writeln!(out, "coverage: {}", paint("uncovered", Paint::Bad, color));
                    for gap in &report.gaps {
                        let _ = writeln!(out, "gap: {} {}", gap.kind, gap.detail);
                    }
                    Ok(EXIT_VIOLATION)
                }
            }
        },
        Command::Adversary {
            doc,
            kinds,
            seeds,
            json,
        } => {
            let doc = load_doc(&doc.msc)?;
            let kinds = kinds
                .split(',')
                .map(|k| FaultKind::from_str(k.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            let seeds = parse_seeds(&seeds)?;
            let report = adversary_matrix(&doc, &kinds, &seeds).map_err(|e| e.to_string())?;
            if json {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                let _ = write!(out, "{}", report.render_text());
            }
            Ok(EXIT_OK)
        }
    }
}

/// Resolve `builtin:<name>` or load and parse a `.msc` file.
fn load_doc(spec: &str) -> Result<MscDocument, String> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return protocols::builtin(name).ok_or_else(|| {
            format!(
                "unknown builtin '{name}' (expected one of {})",
                protocols::BUILTIN_NAMES.join(", ")
            )
        });
    }
    load_doc_file(Path::new(spec))
}

fn load_doc_file(path: &Path) -> Result<MscDocument, String> {
    let source = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_doc(&source).map_err(|e| format!("{}: {e}", path.display()))
}

/// `kind:msg=ID,p=RAT`
fn parse_fault(spec: &str) -> Result<FaultRule, String> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| format!("fault spec '{spec}' must look like kind:msg=ID,p=RAT"))?;
    let kind = FaultKind::from_str(kind.trim())?;
    let mut target = None;
    let mut probability = Rational::ONE;
    for part in rest.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("malformed fault attribute '{part}'"))?;
        match key.trim() {
            "msg" => target = Some(value.trim().to_string()),
            "p" => probability = Rational::from_str(value.trim())?,
            other => return Err(format!("unknown fault attribute '{other}'")),
        }
    }
    let target = target.ok_or_else(|| format!("fault spec '{spec}' names no msg"))?;
    Ok(FaultRule {
        target,
        kind,
        probability,
    })
}

/// `1,2,3` or inclusive `1..5`.
fn parse_seeds(spec: &str) -> Result<Vec<u64>, String> {
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| format!("bad seed '{lo}'"))?;
        let hi: u64 = hi.trim().parse().map_err(|_| format!("bad seed '{hi}'"))?;
        if lo > hi {
            return Err(format!("empty seed range {lo}..{hi}"));
        }
        return Ok((lo..=hi).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse().map_err(|_| format!("bad seed '{s}'")))
        .collect()
}

enum Paint {
    Good,
    Bad,
}

fn paint(text: &str, tone: Paint, color: bool) -> String {
    if !color {
        return text.to_string();
    }
    match tone {
        Paint::Good => format!("\u{1b}[32m{text}\u{1b}[0m"),
        Paint::Bad => format!("\u{1b}[31m{text}\u{1b}[0m"),
    }
}

fn format_conformance(report: &ConformanceReport, color: bool) -> String {
    let verdict = match report.verdict {
        Verdict::Conformant => paint("conformant", Paint::Good, color),
        Verdict::Nonconformant => paint("nonconformant", Paint::Bad, color),
    };
    let mut out = format!("conformance: {verdict}\n");
    for v in &report.violations {
        out.push_str(&format!(
            "violation: {} msg={} at={} {}\n",
            v.kind, v.msg_id, v.at, v.explanation
        ));
    }
    out
}

fn format_objectives(report: &ObjectiveReport, color: bool) -> String {
    let mut out = String::new();
    for o in &report.objectives {
        let status = match o.status {
            ObjectiveStatus::Satisfied => paint("satisfied", Paint::Good, color),
            ObjectiveStatus::Violated => paint("violated", Paint::Bad, color),
        };
        out.push_str(&format!("objective: {} {status}", o.id));
        if let Some(witness) = o.witness {
            out.push_str(&format!(" witness={witness}"));
        }
        if !o.missing.is_empty() {
            out.push_str(&format!(" missing={}", o.missing.join(",")));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let args: Vec<String> = std::iter::once("dfci".to_string())
            .chain(args.iter().map(|s| s.to_string()))
            .collect();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(&args, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn unknown_subcommand_exits_2() {
        let (code, _, err) = run_str(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!err.is_empty());
    }

    #[test]
    fn render_builtin_trial_shows_court_rows() {
        let (code, out, _) = run_str(&["render", "--msc", "builtin:trial", "--format", "ascii"]);
        assert_eq!(code, EXIT_OK);
        let scene_at = out.find("scene: court").unwrap();
        let row_2a = out.find("--2a-->").unwrap();
        let row_2b = out.find("--2b-->").unwrap();
        assert!(scene_at < row_2a && row_2a < row_2b, "{out}");
    }

    #[test]
    fn fault_spec_parsing() {
        let rule = parse_fault("drop:msg=10,p=1").unwrap();
        assert_eq!(rule.kind, FaultKind::Drop);
        assert_eq!(rule.target, "10");
        assert_eq!(rule.probability, Rational::ONE);
        assert!(parse_fault("drop").is_err());
        assert!(parse_fault("zap:msg=1,p=1").is_err());
    }

    #[test]
    fn seed_spec_parsing() {
        assert_eq!(parse_seeds("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_seeds("7,9").unwrap(), vec![7, 9]);
        assert!(parse_seeds("5..1").is_err());
    }
}
