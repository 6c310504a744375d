//! Renderers for the review deliverables: issue tables, the scope graph,
//! trace/coverage tables, and the full step-by-step report.
//!
//! Every renderer is deterministic: the same workspace bytes produce the
//! same report bytes, with no dates or environment-dependent strings.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::evaluation;
use crate::label::Label;
use crate::model::{Issue, PageRef};
use crate::scope::{self, ScopeError};
use crate::solution::{self, Confidence};
use crate::workflow::{self, StepStatus};
use crate::workspace::{FrpQuality, Workspace};

/// Which deliverable to render.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Issues,
    ScopeGraph,
    Trace,
    Coverage,
    FrpQuality,
    Justification,
    Opportunities,
    Knowledge,
    Full,
}

impl ReportKind {
    pub const ALL: [ReportKind; 9] = [
        ReportKind::Issues,
        ReportKind::ScopeGraph,
        ReportKind::Trace,
        ReportKind::Coverage,
        ReportKind::FrpQuality,
        ReportKind::Justification,
        ReportKind::Opportunities,
        ReportKind::Knowledge,
        ReportKind::Full,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ReportKind::Issues => "issues",
            ReportKind::ScopeGraph => "scope_graph",
            ReportKind::Trace => "trace",
            ReportKind::Coverage => "coverage",
            ReportKind::FrpQuality => "frp_quality",
            ReportKind::Justification => "justification",
            ReportKind::Opportunities => "opportunities",
            ReportKind::Knowledge => "knowledge",
            ReportKind::Full => "full",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let wanted = s.trim().to_ascii_lowercase().replace('-', "_");
        Self::ALL.into_iter().find(|k| k.id() == wanted)
    }
}

/// Output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
    Dot,
    Json,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 4] = [
        ReportFormat::Markdown,
        ReportFormat::Csv,
        ReportFormat::Dot,
        ReportFormat::Json,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ReportFormat::Markdown => "markdown",
            ReportFormat::Csv => "csv",
            ReportFormat::Dot => "dot",
            ReportFormat::Json => "json",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let wanted = s.trim().to_ascii_lowercase();
        if wanted == "md" {
            return Some(ReportFormat::Markdown);
        }
        Self::ALL.into_iter().find(|f| f.id() == wanted)
    }
}

/// Which issues a table includes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScopeFilter {
    /// D, I, U issues.
    Frp,
    /// X and K issues only.
    IrpOnly,
    All,
}

impl ScopeFilter {
    pub fn id(self) -> &'static str {
        match self {
            ScopeFilter::Frp => "frp",
            ScopeFilter::IrpOnly => "irp",
            ScopeFilter::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "frp" => Some(ScopeFilter::Frp),
            "irp" | "irp_only" | "irp-only" => Some(ScopeFilter::IrpOnly),
            "all" => Some(ScopeFilter::All),
            _ => None,
        }
    }
}

/// A fully specified render request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportRequest {
    pub kind: ReportKind,
    pub format: ReportFormat,
    pub scope_filter: ScopeFilter,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("format {format} is not valid for report kind {kind}",
        format = .format.id(), kind = .kind.id())]
    InvalidRequest {
        kind: ReportKind,
        format: ReportFormat,
    },
    #[error(transparent)]
    Scope(#[from] ScopeError),
}

/// Formats each report kind accepts.
pub fn allowed_formats(kind: ReportKind) -> &'static [ReportFormat] {
    match kind {
        ReportKind::ScopeGraph => &[ReportFormat::Dot, ReportFormat::Json],
        ReportKind::Full => &[ReportFormat::Markdown, ReportFormat::Json],
        _ => &[ReportFormat::Markdown, ReportFormat::Csv, ReportFormat::Json],
    }
}

// ---------------------------------------------------------------------------
// Table plumbing
// ---------------------------------------------------------------------------

fn md_escape(cell: &str) -> String {
    cell.replace('|', "\\|")
}

fn md_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&headers.join(" | "));
    out.push('\n');
    out.push_str(&vec!["---"; headers.len()].join(" | "));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| md_escape(c)).collect();
        out.push_str(&cells.join(" | "));
        out.push('\n');
    }
    out
}

fn csv_field(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn csv_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let head: Vec<String> = headers.iter().map(|h| csv_field(h)).collect();
    out.push_str(&head.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn json_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let objects: Vec<serde_json::Value> = rows
        .iter()
        .map(|row| {
            let mut object = serde_json::Map::new();
            for (header, cell) in headers.iter().zip(row) {
                object.insert(header.to_string(), serde_json::Value::String(cell.clone()));
            }
            serde_json::Value::Object(object)
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&objects).expect("strings serialize");
    text.push('\n');
    text
}

fn table(headers: &[&str], rows: &[Vec<String>], format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => md_table(headers, rows),
        ReportFormat::Csv => csv_table(headers, rows),
        ReportFormat::Json => json_table(headers, rows),
        ReportFormat::Dot => unreachable!("tables are never rendered as DOT"),
    }
}

// ---------------------------------------------------------------------------
// Issue table
// ---------------------------------------------------------------------------

fn pages_cell(issue: &Issue) -> String {
    let mut pages: Vec<String> = Vec::new();
    for entry in &issue.evidence {
        if let Some(p) = &entry.pages {
            let shown = p.to_string();
            if !pages.contains(&shown) {
                pages.push(shown);
            }
        }
    }
    if pages.is_empty() {
        if let Some(kb) = &issue.kb_source {
            return kb.clone();
        }
    }
    pages.join(", ")
}

fn issue_row(issue: &Issue) -> Vec<String> {
    let texts: Vec<&str> = issue.evidence.iter().map(|e| e.text.as_str()).collect();
    vec![
        issue.label.verbatim().to_string(),
        issue.desc.clone(),
        texts.join("; "),
        issue.category.letter().to_string(),
        pages_cell(issue),
    ]
}

const ISSUE_HEADERS: [&str; 5] = ["Label", "Issue_Desc", "Issue_Text", "Category", "Page#"];

/// The issue table, filtered by scope, in label order.
pub fn render_issue_table(
    ws: &Workspace,
    filter: ScopeFilter,
    format: ReportFormat,
) -> Result<String, ReportError> {
    if format == ReportFormat::Dot {
        return Err(ReportError::InvalidRequest {
            kind: ReportKind::Issues,
            format,
        });
    }
    let (tree, _) = scope::merged_tree(ws);
    let rows: Vec<Vec<String>> = tree
        .iter()
        .filter(|i| match filter {
            ScopeFilter::Frp => i.category.in_frp(),
            ScopeFilter::IrpOnly => !i.category.in_frp(),
            ScopeFilter::All => true,
        })
        .map(issue_row)
        .collect();
    Ok(table(&ISSUE_HEADERS, &rows, format))
}

// ---------------------------------------------------------------------------
// Scope graph
// ---------------------------------------------------------------------------

fn dot_escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// The issue graph as DOT: one node per issue, parent-child edges, the FRP
/// in one cluster and the IRP-only issues in another.
pub fn render_scope_graph(ws: &Workspace) -> Result<String, ReportError> {
    let (tree, _) = scope::merged_tree(ws);
    let scopes = scope::compute_scopes(ws)?;
    let mut out = String::new();
    out.push_str("digraph scope {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=box];\n");

    let cluster = |out: &mut String, name: &str, title: &str, members: &BTreeSet<Label>| {
        let _ = writeln!(out, "  subgraph cluster_{name} {{");
        let _ = writeln!(out, "    label=\"{}\";", dot_escape(title));
        for label in members {
            let issue = tree.get(label).expect("scope labels come from the tree");
            let _ = writeln!(
                out,
                "    \"{}\" [label=\"{}\"];",
                dot_escape(&label.normalized()),
                dot_escape(&format!("{}: {}", label.verbatim(), issue.desc))
            );
        }
        out.push_str("  }\n");
    };
    cluster(&mut out, "frp", "FRP", &scopes.frp_issues);
    cluster(&mut out, "irp_only", "IRP-only (X, K)", &scopes.irp_only_issues);

    for issue in tree.iter() {
        if let Some(parent) = issue.label.parent() {
            if tree.contains(&parent) {
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\";",
                    dot_escape(&parent.normalized()),
                    dot_escape(&issue.label.normalized())
                );
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

fn scope_graph_json(ws: &Workspace) -> Result<String, ReportError> {
    let (tree, _) = scope::merged_tree(ws);
    let scopes = scope::compute_scopes(ws)?;
    let nodes: Vec<serde_json::Value> = tree
        .iter()
        .map(|issue| {
            serde_json::json!({
                "label": issue.label.verbatim(),
                "desc": issue.desc,
                "category": issue.category.letter().to_string(),
                "scope": if scopes.frp_issues.contains(&issue.label) { "frp" } else { "irp_only" },
            })
        })
        .collect();
    let edges: Vec<serde_json::Value> = tree
        .iter()
        .filter_map(|issue| {
            let parent = issue.label.parent()?;
            tree.contains(&parent).then(|| {
                serde_json::json!({
                    "parent": parent.verbatim(),
                    "child": issue.label.verbatim(),
                })
            })
        })
        .collect();
    let mut text =
        serde_json::to_string_pretty(&serde_json::json!({ "nodes": nodes, "edges": edges }))
            .expect("plain data serializes");
    text.push('\n');
    Ok(text)
}

// ---------------------------------------------------------------------------
// Trace and coverage tables
// ---------------------------------------------------------------------------

const TRACE_HEADERS: [&str; 3] = ["Leaf-level Issue", "Solution Component(s)", "Assessment"];

fn trace_rows(ws: &Workspace) -> Vec<Vec<String>> {
    let matrix = solution::trace_matrix(ws);
    let (tree, _) = scope::merged_tree(ws);
    matrix
        .rows
        .iter()
        .map(|leaf| {
            let desc = tree.get(leaf).map(|i| i.desc.as_str()).unwrap_or("");
            let issue_cell = format!("{}: {}", leaf.verbatim(), desc);
            let links = matrix.row_links(leaf);
            if links.is_empty() {
                let note = ws
                    .unaddressed
                    .iter()
                    .find(|a| &a.issue == leaf)
                    .map(|a| a.note.clone())
                    .unwrap_or_default();
                return vec![issue_cell, "— unaddressed —".to_string(), note];
            }
            let confidence = links[0].1;
            let names: Vec<&str> = links.iter().map(|(l, _)| l.verbatim()).collect();
            let components = match confidence {
                Confidence::Stated => names.join("; "),
                Confidence::Unclear => format!("Possibly {}", names.join("; ")),
                Confidence::Inferred => format!("Inferred: {}", names.join("; ")),
            };
            let assessment = ws
                .traces
                .iter()
                .find(|t| &t.issue == leaf)
                .map(|t| t.assessment.clone())
                .unwrap_or_default();
            vec![issue_cell, components, assessment]
        })
        .collect()
}

/// The reviewer's solution assessment, one row per leaf FRP issue.
pub fn render_trace_table(ws: &Workspace, format: ReportFormat) -> Result<String, ReportError> {
    if format == ReportFormat::Dot {
        return Err(ReportError::InvalidRequest {
            kind: ReportKind::Trace,
            format,
        });
    }
    Ok(table(&TRACE_HEADERS, &trace_rows(ws), format))
}

const COVERAGE_HEADERS: [&str; 3] = ["Leaf-level Issue", "Adequately Evaluated?", "Result"];

fn coverage_rows(ws: &Workspace) -> Vec<Vec<String>> {
    let (tree, _) = scope::merged_tree(ws);
    evaluation::evaluation_coverage(ws)
        .into_iter()
        .map(|row| {
            let desc = tree.get(&row.issue).map(|i| i.desc.as_str()).unwrap_or("");
            let status = if row.status_note.is_empty() {
                row.status.display_name().to_string()
            } else {
                format!("{}: {}", row.status.display_name(), row.status_note)
            };
            vec![
                format!("{}: {}", row.issue.verbatim(), desc),
                status,
                row.result,
            ]
        })
        .collect()
}

/// The evaluation-coverage table, one row per leaf FRP issue.
pub fn render_coverage_table(ws: &Workspace, format: ReportFormat) -> Result<String, ReportError> {
    if format == ReportFormat::Dot {
        return Err(ReportError::InvalidRequest {
            kind: ReportKind::Coverage,
            format,
        });
    }
    Ok(table(&COVERAGE_HEADERS, &coverage_rows(ws), format))
}

// ---------------------------------------------------------------------------
// Small tables
// ---------------------------------------------------------------------------

fn frp_quality_rows(quality: &FrpQuality) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (i, question) in FrpQuality::QUESTIONS.iter().enumerate() {
        let (answer, reason) = match &quality.answers[i] {
            Some(a) => (if a.yes { "Y" } else { "N" }, a.reason.as_str()),
            None => ("", ""),
        };
        rows.push(vec![
            format!("{}) {}", char::from(b'a' + i as u8), question),
            answer.to_string(),
            reason.to_string(),
        ]);
    }
    rows
}

fn justification_rows(ws: &Workspace) -> Vec<Vec<String>> {
    let j = ws.justification.as_ref();
    vec![
        vec![
            "Validity".to_string(),
            j.map(|j| j.validity.clone()).unwrap_or_default(),
        ],
        vec![
            "Importance".to_string(),
            j.map(|j| j.importance.clone()).unwrap_or_default(),
        ],
    ]
}

fn opportunity_rows(ws: &Workspace) -> Vec<Vec<String>> {
    let mut sorted: Vec<_> = ws.opportunities.iter().collect();
    sorted.sort_by_key(|op| (op.source_step, op.description.clone()));
    sorted
        .iter()
        .map(|op| {
            vec![
                format!("Step {}", op.source_step),
                op.description.clone(),
                format!(
                    "Skills: {}; Knowledge: {}; Resources: {}",
                    op.skills, op.knowledge, op.resources
                ),
            ]
        })
        .collect()
}

fn knowledge_rows(ws: &Workspace) -> Vec<Vec<String>> {
    let mut sorted: Vec<_> = ws.knowledge.iter().collect();
    sorted.sort_by_key(|k| (k.area, k.description.clone()));
    sorted
        .iter()
        .map(|k| vec![k.area.display_name().to_string(), k.description.clone()])
        .collect()
}

// ---------------------------------------------------------------------------
// Full report
// ---------------------------------------------------------------------------

fn not_completed(step: u8) -> String {
    format!("NOT YET COMPLETED (Step {step})\n")
}

/// The whole review as one Markdown document: twelve sections in step
/// order, with explicit markers for steps whose deliverable is missing.
pub fn render_full_report(ws: &Workspace) -> String {
    let progress = workflow::review_progress(ws, false);
    let complete = |step: u8| progress.gates[step as usize].status == StepStatus::Complete;
    let md = ReportFormat::Markdown;
    let mut out = String::new();

    match &ws.meta {
        Some(meta) if !meta.title.trim().is_empty() => {
            let _ = writeln!(out, "# Review Report: {}\n", meta.title);
            if !meta.venue.trim().is_empty() {
                let _ = writeln!(out, "Venue: {}  ", meta.venue);
            }
            if !meta.reviewer.trim().is_empty() {
                let _ = writeln!(out, "Reviewer: {}  ", meta.reviewer);
            }
            out.push('\n');
        }
        _ => {
            out.push_str("# Review Report\n\n");
            out.push_str(&not_completed(0));
            out.push('\n');
        }
    }

    let section = |out: &mut String, step: u8, title: &str, body: Option<String>| {
        let _ = writeln!(out, "## Step {step}: {title}\n");
        match body {
            Some(body) if complete(step) => {
                out.push_str(&body);
                if !body.ends_with('\n') {
                    out.push('\n');
                }
            }
            _ => out.push_str(&not_completed(step)),
        }
        out.push('\n');
    };

    // Step 1: the IRP narrative.
    let narrative = ws.meta.as_ref().map(|meta| {
        format!(
            "{}\n\nCondensed: {}\n",
            meta.irp_narrative, meta.irp_sentence
        )
    });
    section(&mut out, 1, "Informal Research Problem", narrative);

    // Step 2: every identified issue.
    let all_issues = render_issue_table(ws, ScopeFilter::All, md).ok();
    section(&mut out, 2, "Identified Issues", all_issues);

    // Step 3: duplicate refinement.
    let groups = scope::detect_duplicates(&ws.raw_issues);
    let (tree, _) = scope::merged_tree(ws);
    let refine = (!ws.raw_issues.is_empty()).then(|| {
        if groups.is_empty() {
            format!("No duplicate labels; {} issues.\n", tree.len())
        } else {
            let mut text = String::new();
            for g in &groups {
                let _ = writeln!(
                    text,
                    "- {} recorded {} times; rows merged",
                    g.label,
                    g.members.len()
                );
            }
            let _ = writeln!(text, "\n{} issues after merging.", tree.len());
            text
        }
    });
    section(&mut out, 3, "Refined Issue Set", refine);

    // Step 4: the FRP.
    let frp_body = render_issue_table(ws, ScopeFilter::Frp, md).ok().map(|t| {
        let mut body = t;
        body.push_str("\n### Assumptions\n\n");
        if ws.assumptions.is_empty() {
            let note = ws
                .no_assumptions
                .as_ref()
                .map(|n| n.value.clone())
                .unwrap_or_default();
            if note.is_empty() {
                body.push_str("None recorded.\n");
            } else {
                let _ = writeln!(body, "{note}");
            }
        } else {
            let rows: Vec<Vec<String>> = ws
                .assumptions
                .iter()
                .map(|a| {
                    vec![
                        a.label.verbatim().to_string(),
                        a.desc.clone().unwrap_or_default(),
                        a.text.clone(),
                        a.pages.as_ref().map(PageRef::to_string).unwrap_or_default(),
                    ]
                })
                .collect();
            body.push_str(&md_table(
                &["Label", "Assumption", "Supporting Text", "Page#"],
                &rows,
            ));
        }
        body.push_str("\n### Limitations\n\n");
        if ws.limitations.is_empty() {
            let note = ws
                .no_limitations
                .as_ref()
                .map(|n| n.value.clone())
                .unwrap_or_default();
            if note.is_empty() {
                body.push_str("None recorded.\n");
            } else {
                let _ = writeln!(body, "{note}");
            }
        } else {
            let rows: Vec<Vec<String>> = ws
                .limitations
                .iter()
                .map(|l| {
                    vec![
                        l.label.verbatim().to_string(),
                        l.desc.clone().unwrap_or_default(),
                        l.text.clone(),
                        l.pages.as_ref().map(PageRef::to_string).unwrap_or_default(),
                    ]
                })
                .collect();
            body.push_str(&md_table(
                &["Label", "Limitation", "Supporting Text", "Page#"],
                &rows,
            ));
        }
        if !ws.terms.is_empty() {
            body.push_str("\n### Concepts & Terms\n\n");
            let rows: Vec<Vec<String>> = ws
                .terms
                .iter()
                .map(|t| {
                    vec![
                        t.term.clone(),
                        t.definition.clone(),
                        t.pages.as_ref().map(PageRef::to_string).unwrap_or_default(),
                    ]
                })
                .collect();
            body.push_str(&md_table(&["Concept/Term", "Definition", "Page#"], &rows));
        }
        body
    });
    section(&mut out, 4, "Formal Research Problem", frp_body);

    // Step 5: the IRP-only issues and scope totals.
    let irp_body = scope::compute_scopes(ws).ok().map(|scopes| {
        let mut body = render_issue_table(ws, ScopeFilter::IrpOnly, md).expect("markdown table");
        let _ = writeln!(
            body,
            "\nFRP: {} issues ({} leaf-level). IRP-only (X/K): {}. IRP total: {}.",
            scopes.frp_issues.len(),
            scopes.frp_leaves.len(),
            scopes.irp_only_issues.len(),
            scopes.frp_issues.len() + scopes.irp_only_issues.len(),
        );
        body
    });
    section(&mut out, 5, "Informal Research Problem Scope", irp_body);

    // Step 6: FRP quality.
    let quality_body = ws.frp_quality.as_ref().map(|q| {
        let mut body = md_table(&["Question", "Y/N", "Reason"], &frp_quality_rows(q));
        let _ = writeln!(body, "\nSummary: {}", q.summary);
        body
    });
    section(&mut out, 6, "Quality of the FRP", quality_body);

    // Step 7: justification.
    let justification_body = ws
        .justification
        .as_ref()
        .map(|_| md_table(&["What", "Author's Justification"], &justification_rows(ws)));
    section(&mut out, 7, "Authors' Justification of the FRP", justification_body);

    // Step 8: the proposed solution.
    let solution_body = (!ws.sags.is_empty()).then(|| {
        let mut body = String::new();
        let rows: Vec<Vec<String>> = ws
            .sags
            .iter()
            .map(|sag| {
                let utilized: Vec<&str> =
                    sag.utilizes.iter().map(|l| l.verbatim()).collect();
                vec![
                    sag.label.verbatim().to_string(),
                    sag.artifact_type.display_name().to_string(),
                    sag.desc.clone(),
                    sag.pages.as_ref().map(PageRef::to_string).unwrap_or_default(),
                    utilized.join(", "),
                ]
            })
            .collect();
        body.push_str(&md_table(
            &["SAG Label", "Artifact Type", "Description", "Page#", "Utilized SAGs"],
            &rows,
        ));
        for sag in &ws.sags {
            let components = ws.components_of(&sag.label);
            if components.is_empty() {
                continue;
            }
            let _ = writeln!(
                body,
                "\n### Components of {} ({})\n",
                sag.label,
                sag.artifact_type.display_name()
            );
            let rows: Vec<Vec<String>> = components
                .iter()
                .map(|sc| {
                    let interacts: Vec<&str> =
                        sc.interacts.iter().map(|l| l.verbatim()).collect();
                    vec![
                        sc.label.verbatim().to_string(),
                        sc.desc.clone(),
                        interacts.join(", "),
                        sc.pages.as_ref().map(PageRef::to_string).unwrap_or_default(),
                    ]
                })
                .collect();
            body.push_str(&md_table(
                &["SC Label", "Description", "Interacts with", "Page#"],
                &rows,
            ));
        }
        body
    });
    section(&mut out, 8, "Proposed Solution", solution_body);

    // Step 9: traceability.
    let trace_body =
        (!tree.is_empty()).then(|| render_trace_table(ws, md).expect("markdown table"));
    section(&mut out, 9, "Assessment of the Proposed Solution", trace_body);

    // Step 10: the authors' evaluation.
    let eval_body = (!ws.evals.is_empty() || !ws.coverage.is_empty()).then(|| {
        let mut body = String::new();
        let rows: Vec<Vec<String>> = ws
            .evals
            .iter()
            .map(|e| {
                vec![
                    e.sag.verbatim().to_string(),
                    e.method.display_name().to_string(),
                    format!("{}: {}", e.selection.display_name(), e.selection_rationale),
                    format!("{}: {}", e.application.display_name(), e.application_rationale),
                ]
            })
            .collect();
        body.push_str(&md_table(
            &["Solution Artifact Group", "Evaluation Method", "Selection", "Application"],
            &rows,
        ));
        body.push('\n');
        body.push_str(&render_coverage_table(ws, md).expect("markdown table"));
        body
    });
    section(&mut out, 10, "Authors' Evaluation of the Solution", eval_body);

    // Step 11: research opportunities.
    let opportunity_body = (!ws.opportunities.is_empty()).then(|| {
        md_table(
            &["Step", "Research Opportunity", "Required Skills, Knowledge, Resources"],
            &opportunity_rows(ws),
        )
    });
    section(&mut out, 11, "Research Opportunities", opportunity_body);

    // Step 12: knowledge gained.
    let knowledge_body = (!ws.knowledge.is_empty())
        .then(|| md_table(&["Knowledge Area", "Description"], &knowledge_rows(ws)));
    section(&mut out, 12, "Knowledge Gained", knowledge_body);

    out
}

fn full_report_json(ws: &Workspace) -> String {
    let progress = workflow::review_progress(ws, false);
    let markdown = render_full_report(ws);
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
    let mut text = serde_json::to_string_pretty(&serde_json::json!({
        "title": ws.meta.as_ref().map(|m| m.title.clone()).unwrap_or_default(),
        "steps": gates,
        "markdown": markdown,
    }))
    .expect("plain data serializes");
    text.push('\n');
    text
}

/// Render any report request.
pub fn render_report(ws: &Workspace, request: ReportRequest) -> Result<String, ReportError> {
    let ReportRequest {
        kind,
        format,
        scope_filter,
    } = request;
    if !allowed_formats(kind).contains(&format) {
        return Err(ReportError::InvalidRequest { kind, format });
    }
    match kind {
        ReportKind::Issues => render_issue_table(ws, scope_filter, format),
        ReportKind::ScopeGraph => match format {
            ReportFormat::Dot => render_scope_graph(ws),
            _ => scope_graph_json(ws),
        },
        ReportKind::Trace => render_trace_table(ws, format),
        ReportKind::Coverage => render_coverage_table(ws, format),
        ReportKind::FrpQuality => {
            let rows = ws
                .frp_quality
                .as_ref()
                .map(|q| frp_quality_rows(q))
                .unwrap_or_default();
            Ok(table(&["Question", "Y/N", "Reason"], &rows, format))
        }
        ReportKind::Justification => Ok(table(
            &["What", "Author's Justification"],
            &justification_rows(ws),
            format,
        )),
        ReportKind::Opportunities => Ok(table(
            &["Step", "Research Opportunity", "Required Skills, Knowledge, Resources"],
            &opportunity_rows(ws),
            format,
        )),
        ReportKind::Knowledge => Ok(table(
            &["Knowledge Area", "Description"],
            &knowledge_rows(ws),
            format,
        )),
        ReportKind::Full => Ok(match format {
            ReportFormat::Json => full_report_json(ws),
            _ => render_full_report(ws),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::load_workspace_str;

    fn single_issue_ws() -> Workspace {
        let (ws, diags) = load_workspace_str(
            "[issue I01]\ndesc: Only issue\ncategory: D\ntext: the text\npages: 7\n",
        );
        assert!(diags.is_empty());
        ws
    }

    #[test]
    fn empty_workspace_renders_header_only_table() {
        let text =
            render_issue_table(&Workspace::default(), ScopeFilter::All, ReportFormat::Markdown)
                .unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "Label | Issue_Desc | Issue_Text | Category | Page#");
    }

    #[test]
    fn single_issue_graph_has_one_node_in_frp_cluster() {
        let dot = render_scope_graph(&single_issue_ws()).unwrap();
        assert!(dot.contains("subgraph cluster_frp"));
        assert!(dot.contains("subgraph cluster_irp_only"));
        assert!(dot.contains("\"I1\" [label=\"I01: Only issue\"]"));
        assert!(!dot.contains("->"));
    }

    #[test]
    fn scope_graph_rejects_csv() {
        let request = ReportRequest {
            kind: ReportKind::ScopeGraph,
            format: ReportFormat::Csv,
            scope_filter: ScopeFilter::All,
        };
        assert!(matches!(
            render_report(&single_issue_ws(), request),
            Err(ReportError::InvalidRequest { .. })
        ));
    }

    #[test]
    fn full_report_rejects_csv() {
        let request = ReportRequest {
            kind: ReportKind::Full,
            format: ReportFormat::Csv,
            scope_filter: ScopeFilter::All,
        };
        assert!(matches!(
            render_report(&single_issue_ws(), request),
            Err(ReportError::InvalidRequest { .. })
        ));
    }

    #[test]
    fn empty_workspace_full_report_marks_every_step() {
        let text = render_full_report(&Workspace::default());
        for step in 0..=12 {
            assert!(
                text.contains(&format!("NOT YET COMPLETED (Step {step})")),
                "step {step} missing from:\n{text}"
            );
        }
    }

    #[test]
    fn untraced_leaf_is_marked_unaddressed() {
        let text = render_trace_table(&single_issue_ws(), ReportFormat::Markdown).unwrap();
        assert!(text.contains("— unaddressed —"), "{text}");
    }

    #[test]
    fn csv_quotes_fields_with_commas() {
        let (ws, _) = load_workspace_str(
            "[issue I01]\ndesc: a, b\ncategory: D\ntext: quote \" inside\npages: 7\n",
        );
        let csv = render_issue_table(&ws, ScopeFilter::All, ReportFormat::Csv).unwrap();
        assert!(csv.contains("\"a, b\""));
        assert!(csv.contains("\"quote \"\" inside\""));
    }

    #[test]
    fn markdown_pipes_are_escaped() {
        let (ws, _) = load_workspace_str(
            "[issue I01]\ndesc: has | pipe\ncategory: D\ntext: t\npages: 7\n",
        );
        let text = render_issue_table(&ws, ScopeFilter::All, ReportFormat::Markdown).unwrap();
        assert!(text.contains("has \\| pipe"));
    }
}
