//! dsrev: command-line front end for review workspaces.
//!
//! Exit codes: 0 = clean, 1 = findings at or above the severity floor,
//! 2 = usage or file errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dsrev_core::config;
use dsrev_core::diag::{self, Diagnostic, Severity};
use dsrev_core::kb::{self, KbHit, KnowledgeBase};
use dsrev_core::report::{ReportFormat, ReportKind, ReportRequest, ScopeFilter};
use dsrev_core::workflow::{self, StepStatus};
use dsrev_core::workspace::Workspace;
use dsrev_core::{evaluation, format, report, scope, solution};

const WORKSPACE_FILE: &str = "review.dsrw";
const KB_FILE: &str = "kb.dsrw";

#[derive(Parser)]
#[command(
    name = "dsrev",
    version,
    about = "Workspace checker and report generator for structured reviews of design-science research papers"
)]
struct Cli {
    /// Workspace directory (default: $DSREV_WORKSPACE, then the current directory)
    #[arg(long, global = true, value_name = "DIR")]
    dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Create a starter review.dsrw in the workspace directory
    Init,
    /// Run every validator over the workspace
    Check {
        /// Fail on warnings too, not just errors
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputMode,
    },
    /// Summarize the computed FRP/IRP scopes
    Scope,
    /// Print the issue-to-component trace table
    Trace,
    /// Print the evaluation-coverage table
    Coverage,
    /// Report progress through review steps 0-12
    Status {
        /// Mark steps after the first incomplete one as blocked
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputMode,
    },
    /// Render a deliverable
    Report {
        #[arg(long, value_name = "KIND")]
        kind: String,
        #[arg(long, value_name = "FORMAT")]
        format: String,
        /// Restrict issue tables to one scope
        #[arg(long, value_name = "SCOPE", default_value = "all")]
        scope: String,
        /// Write to a file instead of standard output
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Work with the personal knowledge base (kb.dsrw)
    Kb {
        #[command(subcommand)]
        command: KbCommand,
    },
}

#[derive(Subcommand)]
enum KbCommand {
    /// Manage knowledge-base sources
    Source {
        #[command(subcommand)]
        command: SourceCommand,
    },
    /// Fold the current review's knowledge and U/K issues into the base
    Merge,
    /// List known issues the current review does not cover
    Suggest,
    /// Search entries and issue patterns
    Search { query: String },
}

#[derive(Subcommand)]
enum SourceCommand {
    /// Register a source id such as KB-KM
    Add {
        id: String,
        name: String,
        #[arg(long, default_value = "")]
        desc: String,
    },
}


fn workspace_dir(cli_dir: &Option<PathBuf>) -> PathBuf {
    if let Some(dir) = cli_dir {
        return dir.clone();
    }
    if let Ok(dir) = std::env::var("DSREV_WORKSPACE") {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    PathBuf::from(".")
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("dsrev: {message}");
    ExitCode::from(2)
}

fn load_ws(dir: &Path) -> Result<(Workspace, Vec<Diagnostic>), String> {
    let path = dir.join(WORKSPACE_FILE);
    let bytes = fs::read(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    format::load_workspace(&bytes).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_kb_file(dir: &Path) -> Result<(KnowledgeBase, Vec<Diagnostic>), String> {
    let path = dir.join(KB_FILE);
    if !path.exists() {
        return Ok((KnowledgeBase::default(), Vec::new()));
    }
    let bytes = fs::read(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    kb::load_kb(&bytes).map_err(|e| format!("{}: {e}", path.display()))
}

fn print_diagnostics_text(diags: &[Diagnostic], file: &str) {
    for d in diags {
        let mut loc = file.to_string();
        if d.location.line > 0 {
            loc.push_str(&format!(":{}", d.location.line));
        }
        if d.location.record.is_empty() {
            eprintln!("{}[{}] {}: {}", d.severity, d.code, loc, d.message);
        } else {
            eprintln!(
                "{}[{}] {} ({}): {}",
                d.severity, d.code, loc, d.location.record, d.message
            );
        }
    }
}

fn diagnostics_json(diags: &[Diagnostic], file: &str) -> String {
    let array: Vec<serde_json::Value> = diags
        .iter()
        .map(|d| {
            serde_json::json!({
                "code": d.code.as_str(),
                "severity": d.severity.to_string(),
                "file": file,
                "line": d.location.line,
                "message": d.message,
            })
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&array).expect("plain data serializes");
    text.push('\n');
    text
}

fn run_check(dir: &Path, strict: bool, mode: OutputMode) -> Result<ExitCode, String> {
    let (ws, mut diags) = load_ws(dir)?;
    diags.extend(scope::validate_category_rules(&ws));
    diags.extend(solution::validate_solution_graph(&ws));
    diags.extend(evaluation::validate_eval_refs(&ws));
    let diags = diag::normalize(diags);

    match mode {
        OutputMode::Text => print_diagnostics_text(&diags, WORKSPACE_FILE),
        OutputMode::Json => print!("{}", diagnostics_json(&diags, WORKSPACE_FILE)),
    }

    let floor = if strict {
        Severity::Warning
    } else {
        Severity::Error
    };
    let failing = diags.iter().any(|d| d.severity >= floor);
    Ok(if failing {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_scope(dir: &Path) -> Result<ExitCode, String> {
    let (ws, _) = load_ws(dir)?;
    let scopes = scope::compute_scopes(&ws).map_err(|e| e.to_string())?;
    println!(
        "FRP: {} issues, {} leaf-level",
        scopes.frp_issues.len(),
        scopes.frp_leaves.len()
    );
    let irp_only: Vec<&str> = scopes
        .irp_only_issues
        .iter()
        .map(|l| l.verbatim())
        .collect();
    println!(
        "IRP-only (X/K): {} issues{}",
        irp_only.len(),
        if irp_only.is_empty() {
            String::new()
        } else {
            format!(": {}", irp_only.join(", "))
        }
    );
    println!(
        "IRP total: {}",
        scopes.frp_issues.len() + scopes.irp_only_issues.len()
    );
    println!(
        "Assumptions: {}; Limitations: {}",
        scopes.assumptions.len(),
        scopes.limitations.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn run_status(dir: &Path, strict: bool, mode: OutputMode) -> Result<ExitCode, String> {
    let (ws, _) = load_ws(dir)?;
    let progress = workflow::review_progress(&ws, strict);
    match mode {
        OutputMode::Json => {
            let gates: Vec<serde_json::Value> = progress
                .gates
                .iter()
                .map(|g| {
                    serde_json::json!({
                        "step": g.step,
                        "name": g.name,
                        "status": g.status.name(),
                        "missing": g.missing,
                    })
                })
                .collect();
            let body = serde_json::json!({
                "first_incomplete": progress.first_incomplete,
                "steps": gates,
            });
            println!("{}", serde_json::to_string_pretty(&body).expect("serializes"));
        }
        OutputMode::Text => {
            for gate in &progress.gates {
                println!(
                    "Step {:>2}  {:<52} {}",
                    gate.step,
                    gate.name,
                    gate.status.name()
                );
                if gate.status != StepStatus::Complete {
                    for item in &gate.missing {
                        println!("          - missing: {item}");
                    }
                }
            }
            match progress.first_incomplete {
                Some(step) => println!("Next: step {step}"),
                None => println!("All steps complete."),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_report(
    dir: &Path,
    kind: &str,
    format_name: &str,
    scope_name: &str,
    out: Option<&Path>,
) -> Result<ExitCode, String> {
    let kind = ReportKind::parse(kind).ok_or_else(|| format!("unknown report kind {kind:?}"))?;
    let format = ReportFormat::parse(format_name)
        .ok_or_else(|| format!("unknown report format {format_name:?}"))?;
    let scope_filter = ScopeFilter::parse(scope_name)
        .ok_or_else(|| format!("unknown scope filter {scope_name:?}"))?;
    let (ws, _) = load_ws(dir)?;
    let text = report::render_report(
        &ws,
        ReportRequest {
            kind,
            format,
            scope_filter,
        },
    )
    .map_err(|e| e.to_string())?;
    match out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

const INIT_TEMPLATE: &str = "\
# dsrev review workspace
# One record per block: a [kind LABEL] header followed by key: value lines.
# Values continue on the next line when it is indented two spaces.
# Run `dsrev check` to validate and `dsrev status` to see step progress.

[meta]
title:
reviewer:
irp_narrative:
irp_sentence:
";

fn run_init(dir: &Path) -> Result<ExitCode, String> {
    let path = dir.join(WORKSPACE_FILE);
    if path.exists() {
        return Err(format!("{} already exists", path.display()));
    }
    if !dir.exists() {
        fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    }
    fs::write(&path, INIT_TEMPLATE)
        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    println!("Created {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn run_kb(dir: &Path, command: &KbCommand) -> Result<ExitCode, String> {
    match command {
        KbCommand::Source {
            command: SourceCommand::Add { id, name, desc },
        } => {
            let (mut base, _) = load_kb_file(dir)?;
            if base.sources.contains_key(id) {
                return Err(format!("source {id:?} is already registered"));
            }
            base.sources.insert(
                id.clone(),
                kb::KbSource {
                    name: name.clone(),
                    desc: desc.clone(),
                },
            );
            fs::write(dir.join(KB_FILE), kb::save_kb(&base))
                .map_err(|e| format!("cannot write {KB_FILE}: {e}"))?;
            println!("Registered source {id}");
            Ok(ExitCode::SUCCESS)
        }
        KbCommand::Merge => {
            let (ws, _) = load_ws(dir)?;
            let (base, _) = load_kb_file(dir)?;
            match kb::kb_merge_from_workspace(&base, &ws) {
                Err(e) => {
                    eprintln!("dsrev: {e}");
                    Ok(ExitCode::from(1))
                }
                Ok((merged, warnings)) => {
                    print_diagnostics_text(&warnings, WORKSPACE_FILE);
                    let entries = merged.entries.len() - base.entries.len();
                    let patterns = merged.issue_patterns.len() - base.issue_patterns.len();
                    fs::write(dir.join(KB_FILE), kb::save_kb(&merged))
                        .map_err(|e| format!("cannot write {KB_FILE}: {e}"))?;
                    println!("Merged review: +{entries} entries, +{patterns} issue patterns");
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        KbCommand::Suggest => {
            let (ws, _) = load_ws(dir)?;
            let (base, _) = load_kb_file(dir)?;
            let suggestions = kb::suggest_k_issues(&base, &ws);
            if suggestions.is_empty() {
                println!("No suggestions: every known issue pattern is covered.");
            } else {
                for s in &suggestions {
                    println!("[{}] {} — {}", s.pattern.source, s.pattern.desc, s.rationale);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        KbCommand::Search { query } => {
            let (base, _) = load_kb_file(dir)?;
            for hit in kb::kb_search(&base, query) {
                match hit {
                    KbHit::Entry(e) => println!(
                        "entry [{}] {} (from {})",
                        e.area.display_name(),
                        e.description,
                        e.origin
                    ),
                    KbHit::Pattern(p) => println!(
                        "pattern [{}] {}: {} (from {})",
                        p.source, p.desc, p.definition, p.origin
                    ),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_table(dir: &Path, kind: ReportKind) -> Result<ExitCode, String> {
    let (ws, _) = load_ws(dir)?;
    let text = report::render_report(
        &ws,
        ReportRequest {
            kind,
            format: ReportFormat::Markdown,
            scope_filter: ScopeFilter::All,
        },
    )
    .map_err(|e| e.to_string())?;
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let dir = workspace_dir(&cli.dir);

    // dsrev.toml applies to appropriateness lookups; surface parse errors
    // even for commands that do not consult it.
    let config_path = dir.join(config::CONFIG_FILE);
    if config_path.exists() {
        let text = match fs::read_to_string(&config_path) {
            Ok(text) => text,
            Err(e) => return fail(format!("cannot read {}: {e}", config_path.display())),
        };
        if let Err(e) = config::parse_config(&text) {
            return fail(e);
        }
    }

    let result = match &cli.command {
        Command::Init => run_init(&dir),
        Command::Check { strict, format } => run_check(&dir, *strict, *format),
        Command::Scope => run_scope(&dir),
        Command::Trace => run_table(&dir, ReportKind::Trace),
        Command::Coverage => run_table(&dir, ReportKind::Coverage),
        Command::Status { strict, format } => run_status(&dir, *strict, *format),
        Command::Report {
            kind,
            format,
            scope,
            out,
        } => run_report(&dir, kind, format, scope, out.as_deref()),
        Command::Kb { command } => run_kb(&dir, command),
    };

    match result {
        Ok(code) => code,
        Err(message) => fail(message),
    }
}
