//! The `gestit` command line.
//!
//! Exit codes: 0 when nothing reaches the failure threshold, 1 when
//! something does, 2 when input cannot be read at all or the command line
//! is wrong. Reports go to stdout, summaries and notes to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use gestit_core::corpus::{self, CheckOptions};
use gestit_core::diagnostic::normalize;
use gestit_core::eaf::{self, ConversionContext};
use gestit_core::{conllu, jefferson, Diagnostic, Severity};

use crate::eaf_xml::read_eaf;
use crate::repo::{load_repository, Layout};
use crate::yaml::conversation_from_yaml;

#[derive(Parser, Debug)]
#[command(name = "gestit", version, about = "Validate, convert and report on a multimodal conversation corpus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Markdown,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Table {
    Conditions,
    Status,
    Tokens,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InputFormat {
    Eaf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Conll,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every repository check.
    Validate {
        /// Repository root.
        #[arg(long, env = "GESTIT_ROOT", default_value = ".")]
        root: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Fail on warnings too, and check gesture prefixes against articulators.
        #[arg(long)]
        strict: bool,
    },
    /// Convert an ELAN file to extended CoNLL-U.
    Convert {
        #[arg(long, value_enum)]
        from: InputFormat,
        #[arg(long, value_enum)]
        to: OutputFormat,
        input: PathBuf,
        /// Output file; `-` writes to stdout.
        #[arg(short, long)]
        output: PathBuf,
        /// Conversation code written into every unit.
        #[arg(long)]
        conversation: String,
        /// Participant codes; by default read from the conversation file under the root.
        #[arg(long, value_delimiter = ',')]
        participants: Option<Vec<String>>,
        #[arg(long, env = "GESTIT_ROOT", default_value = ".")]
        root: PathBuf,
    },
    /// Remove Jefferson notation, one line at a time.
    Strip {
        /// File to read; stdin when absent or `-`.
        input: Option<PathBuf>,
        /// Strip this text instead of reading a file.
        #[arg(long, conflicts_with = "input")]
        text: Option<String>,
    },
    /// Print a report table.
    Stats {
        #[arg(long, value_enum)]
        table: Table,
        #[arg(long, value_enum, default_value = "markdown")]
        format: ReportFormat,
        #[arg(long, env = "GESTIT_ROOT", default_value = ".")]
        root: PathBuf,
    },
}

/// Runs the tool with `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Validate { root, format, strict } => validate(&root, format, strict, out, err),
        Command::Convert { input, output, conversation, participants, root, .. } => {
            convert(&input, &output, &conversation, participants, &root, out, err)
        }
        Command::Strip { input, text } => strip(input.as_deref(), text, out, err),
        Command::Stats { table, format, root } => stats(&root, table, format, out, err),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "gestit: {msg}");
            2
        }
    }
}

type Outcome = Result<i32, String>;

fn summary(diags: &[Diagnostic]) -> String {
    let count = |s| diags.iter().filter(|d| d.severity == s).count();
    format!(
        "{} error(s), {} warning(s), {} note(s)",
        count(Severity::Error),
        count(Severity::Warning),
        count(Severity::Info)
    )
}

fn exit_code(diags: &[Diagnostic], threshold: Severity) -> i32 {
    i32::from(diags.iter().any(|d| d.severity >= threshold))
}

fn io_err(e: io::Error) -> String {
    e.to_string()
}

fn load(root: &Path) -> Result<(gestit_core::corpus::Repository, Vec<Diagnostic>), String> {
    load_repository(root, &Layout::default()).map_err(|e| e.to_string())
}

fn all_findings(root: &Path, strict: bool) -> Result<(gestit_core::corpus::Repository, Vec<Diagnostic>), String> {
    let (repo, mut diags) = load(root)?;
    let opts = CheckOptions { strict, ..CheckOptions::default() };
    diags.extend(corpus::run_all_checks(&repo, &opts));
    normalize(&mut diags);
    Ok((repo, diags))
}

fn validate(root: &Path, format: Format, strict: bool, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let (_, diags) = all_findings(root, strict)?;
    match format {
        Format::Text => {
            for d in &diags {
                writeln!(out, "{d}").map_err(io_err)?;
            }
        }
        Format::Json => {
            let json = serde_json::to_string_pretty(&diags).map_err(|e| e.to_string())?;
            writeln!(out, "{json}").map_err(io_err)?;
        }
    }
    writeln!(err, "{}", summary(&diags)).map_err(io_err)?;
    Ok(exit_code(&diags, if strict { Severity::Warning } else { Severity::Error }))
}

fn convert(
    input: &Path,
    output: &Path,
    conversation: &str,
    participants: Option<Vec<String>>,
    root: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let xml = fs::read_to_string(input).map_err(|e| format!("{}: {e}", input.display()))?;
    let name = input.display().to_string();
    let (tiers, mut diags) = read_eaf(&xml, Some(&name)).map_err(|e| format!("{name}: {e}"))?;

    let mut ctx = ConversionContext::new(conversation);
    ctx.participants = match participants {
        Some(p) => Some(p),
        None => {
            let meta = root.join("data/conversations").join(format!("{conversation}.yaml"));
            match fs::read_to_string(&meta).ok().and_then(|t| conversation_from_yaml(&t).ok()) {
                Some((rec, _)) => rec.participants,
                None => {
                    writeln!(err, "note: no metadata for {conversation}; tiers are matched by participant code shape")
                        .map_err(io_err)?;
                    None
                }
            }
        }
    };
    let (doc, more) = eaf::convert(&tiers, &ctx);
    diags.extend(more.into_iter().map(|d| d.in_file(name.clone())));
    let text = conllu::write(&doc).map_err(|e| e.to_string())?;
    if output.as_os_str() == "-" {
        out.write_all(text.as_bytes()).map_err(io_err)?;
    } else {
        fs::write(output, text).map_err(|e| format!("{}: {e}", output.display()))?;
    }
    normalize(&mut diags);
    for d in &diags {
        writeln!(err, "{d}").map_err(io_err)?;
    }
    writeln!(err, "{} unit(s) written; {}", doc.units.len(), summary(&diags)).map_err(io_err)?;
    Ok(exit_code(&diags, Severity::Error))
}

fn strip(input: Option<&Path>, text: Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let source = match (text, input) {
        (Some(t), _) => t,
        (None, Some(p)) if p.as_os_str() != "-" => fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?,
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(io_err)?;
            s
        }
    };
    let mut failed = false;
    for (n, line) in source.lines().enumerate() {
        let (parsed, errors) = jefferson::parse_lenient(line);
        writeln!(out, "{}", parsed.plain_text()).map_err(io_err)?;
        for e in errors {
            failed = true;
            writeln!(err, "line {}: {} {}: {e}", n + 1, e.rule().default_severity(), e.rule()).map_err(io_err)?;
        }
    }
    Ok(i32::from(failed))
}

fn stats(root: &Path, table: Table, format: ReportFormat, out: &mut dyn Write, _err: &mut dyn Write) -> Outcome {
    let json = |v: serde_json::Result<String>| v.map_err(|e| e.to_string());
    let text = match table {
        Table::Conditions => {
            let (repo, _) = load(root)?;
            let t = corpus::condition_table(&repo);
            match format {
                ReportFormat::Markdown => t.to_markdown(),
                ReportFormat::Json => json(serde_json::to_string_pretty(&t))?,
            }
        }
        Table::Status => {
            let (repo, diags) = all_findings(root, false)?;
            match format {
                ReportFormat::Markdown => corpus::status_table(&repo, &diags),
                ReportFormat::Json => json(serde_json::to_string_pretty(&corpus::status_rows(&repo, &diags)))?,
            }
        }
        Table::Tokens => {
            let (repo, _) = load(root)?;
            let rows = corpus::token_stats(&repo);
            match format {
                ReportFormat::Markdown => corpus::token_stats_markdown(&rows),
                ReportFormat::Json => json(serde_json::to_string_pretty(&rows))?,
            }
        }
    };
    write!(out, "{text}").map_err(io_err)?;
    if !text.ends_with('\n') {
        writeln!(out).map_err(io_err)?;
    }
    Ok(0)
}
