//! The `review.dsrw` line-oriented record format: loader and canonical
//! serializer.
//!
//! A file is a sequence of record blocks. A block opens with a `[kind]` or
//! `[kind LABEL]` header, followed by `key: value` lines. Values continue
//! onto the next line when it is indented two spaces. Lines starting with
//! `#` are comments. Loading is total: record-level faults become
//! diagnostics with line numbers and the rest of the file still loads; only
//! non-UTF-8 input is refused outright.

use thiserror::Error;

use crate::diag::{DiagCode, Diagnostic, Location};
use crate::evaluation::{
    ApplicationAssessment, CoverageEntry, CoverageStatus, EvaluationMethod, EvaluationRecord,
    SelectionAssessment,
};
use crate::label::{Label, LabelKind};
use crate::model::{
    ArtifactType, Assumption, Evidence, Issue, IssueCategory, Limitation, PageRef, TermDefinition,
};
use crate::solution::{
    Confidence, SolutionArtifactGroup, SolutionComponent, TraceLink, UnaddressedAck,
};
use crate::workspace::{
    FrpQuality, Justification, KnowledgeArea, KnowledgeEntry, Opportunity, QualityAnswer,
    ReviewMeta, Sourced, Workspace,
};
use crate::{evaluation, solution};

#[derive(Debug, Error)]
#[error("input is not valid UTF-8 ({0})")]
pub struct EncodingError(#[from] std::str::Utf8Error);

/// Nesting deeper than this draws a W-DEEP-LABEL warning.
pub const MAX_LABEL_DEPTH: usize = 6;

#[derive(Debug)]
pub(crate) struct RawField {
    pub key: String,
    pub value: String,
    pub line: u32,
}

#[derive(Debug)]
pub(crate) struct RawRecord {
    pub kind: String,
    pub token: Option<String>,
    pub line: u32,
    pub fields: Vec<RawField>,
}

/// Split text into raw record blocks, reporting malformed lines.
pub(crate) fn scan_records(text: &str) -> (Vec<RawRecord>, Vec<Diagnostic>) {
    let mut records: Vec<RawRecord> = Vec::new();
    let mut diags = Vec::new();
    // Keys seen before any good header, or under a bad one, land in a sink.
    let mut in_sink = true;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx as u32 + 1;
        if raw_line.starts_with('#') {
            continue;
        }
        if raw_line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = raw_line.strip_prefix("  ") {
            let attached = (!in_sink)
                .then(|| records.last_mut())
                .flatten()
                .and_then(|r| r.fields.last_mut());
            match attached {
                Some(field) => {
                    if !field.value.is_empty() {
                        field.value.push(' ');
                    }
                    field.value.push_str(rest.trim());
                }
                None if in_sink => {}
                None => diags.push(Diagnostic::new(
                    DiagCode::EBadHeader,
                    Location::new("", line_no),
                    "continuation line without a key to continue",
                )),
            }
            continue;
        }
        if let Some(body) = raw_line.strip_prefix('[') {
            let Some(body) = body.trim_end().strip_suffix(']') else {
                diags.push(Diagnostic::new(
                    DiagCode::EBadHeader,
                    Location::new("", line_no),
                    "record header is missing its closing bracket",
                ));
                in_sink = true;
                continue;
            };
            let mut parts = body.split_whitespace();
            let kind = parts.next().unwrap_or("").to_string();
            let token = parts.next().map(str::to_string);
            if kind.is_empty()
                || !kind.chars().all(|c| c.is_ascii_lowercase() || c == '_')
                || parts.next().is_some()
            {
                diags.push(Diagnostic::new(
                    DiagCode::EBadHeader,
                    Location::new("", line_no),
                    format!("malformed record header {:?}", raw_line.trim()),
                ));
                in_sink = true;
                continue;
            }
            records.push(RawRecord {
                kind,
                token,
                line: line_no,
                fields: Vec::new(),
            });
            in_sink = false;
            continue;
        }
        if let Some(colon) = raw_line.find(':') {
            let key = raw_line[..colon].trim().to_ascii_lowercase();
            let value = raw_line[colon + 1..].trim().to_string();
            let key_ok = !key.is_empty()
                && key
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
            if !key_ok {
                diags.push(Diagnostic::new(
                    DiagCode::EBadHeader,
                    Location::new("", line_no),
                    format!("unrecognized line {:?}", raw_line.trim()),
                ));
                continue;
            }
            if in_sink {
                continue;
            }
            match records.last_mut() {
                Some(record) => record.fields.push(RawField {
                    key,
                    value,
                    line: line_no,
                }),
                None => diags.push(Diagnostic::new(
                    DiagCode::EBadHeader,
                    Location::new("", line_no),
                    "key line outside of any record block",
                )),
            }
            continue;
        }
        diags.push(Diagnostic::new(
            DiagCode::EBadHeader,
            Location::new("", line_no),
            format!(
                "line is neither a record header nor a key: value line: {:?}",
                raw_line.trim()
            ),
        ));
    }

    (records, diags)
}

/// Helper over one raw record while interpreting it.
struct Fields<'a> {
    record: &'a RawRecord,
    display: String,
    diags: &'a mut Vec<Diagnostic>,
}

impl<'a> Fields<'a> {
    fn new(record: &'a RawRecord, diags: &'a mut Vec<Diagnostic>) -> Self {
        let display = match &record.token {
            Some(token) => format!("{} {}", record.kind, token),
            None => record.kind.clone(),
        };
        Fields {
            record,
            display,
            diags,
        }
    }

    fn loc(&self, line: u32) -> Location {
        Location::new(self.display.clone(), line)
    }

    fn head_loc(&self) -> Location {
        self.loc(self.record.line)
    }

    fn push(&mut self, code: DiagCode, line: u32, message: impl Into<String>) {
        let loc = self.loc(line);
        self.diags.push(Diagnostic::new(code, loc, message));
    }

    /// First value of a single-valued key; repeats draw W-DUP-KEY.
    fn single(&mut self, key: &str) -> Option<(String, u32)> {
        let mut found: Option<(String, u32)> = None;
        let mut dups = Vec::new();
        for field in &self.record.fields {
            if field.key == key {
                if found.is_none() {
                    found = Some((field.value.clone(), field.line));
                } else {
                    dups.push(field.line);
                }
            }
        }
        for line in dups {
            self.push(
                DiagCode::WDupKey,
                line,
                format!("{key:?} given more than once; the first value wins"),
            );
        }
        found
    }

    /// Single-valued key whose blank form counts as absent.
    fn optional(&mut self, key: &str) -> Option<(String, u32)> {
        self.single(key).filter(|(v, _)| !v.is_empty())
    }

    /// Required non-blank key; reports E-MISSING-KEY when absent.
    fn required(&mut self, key: &str) -> Option<(String, u32)> {
        let found = self.optional(key);
        if found.is_none() {
            let line = self.record.line;
            self.push(
                DiagCode::EMissingKey,
                line,
                format!("required key {key:?} is missing or empty"),
            );
        }
        found
    }

    fn warn_unknown(&mut self, known: &[&str]) {
        let unknown: Vec<(String, u32)> = self
            .record
            .fields
            .iter()
            .filter(|f| !known.contains(&f.key.as_str()))
            .map(|f| (f.key.clone(), f.line))
            .collect();
        for (key, line) in unknown {
            self.push(
                DiagCode::WUnknownKey,
                line,
                format!("unknown key {key:?} ignored"),
            );
        }
    }

    fn pages(&mut self, key: &str) -> Result<Option<(PageRef, u32)>, ()> {
        match self.optional(key) {
            None => Ok(None),
            Some((value, line)) => match PageRef::parse(&value) {
                Ok(p) => Ok(Some((p, line))),
                Err(e) => {
                    self.push(DiagCode::EBadValue, line, e.to_string());
                    Err(())
                }
            },
        }
    }

    /// Parse the header token as a label of the expected kind.
    fn label(&mut self, expect: LabelKind) -> Option<Label> {
        let Some(token) = self.record.token.clone() else {
            let line = self.record.line;
            self.push(
                DiagCode::EBadLabel,
                line,
                format!("{} record is missing its label", self.record.kind),
            );
            return None;
        };
        self.parse_label(&token, expect, self.record.line)
    }

    fn parse_label(&mut self, text: &str, expect: LabelKind, line: u32) -> Option<Label> {
        match Label::parse(text) {
            Err(e) => {
                self.push(DiagCode::EBadLabel, line, e.to_string());
                None
            }
            Ok(label) if label.kind() != expect => {
                self.push(
                    DiagCode::EBadLabel,
                    line,
                    format!(
                        "{} names a {}, expected a {}",
                        text,
                        label.kind().as_str(),
                        expect.as_str()
                    ),
                );
                None
            }
            Ok(label) => {
                if label.depth() > MAX_LABEL_DEPTH {
                    self.push(
                        DiagCode::WDeepLabel,
                        line,
                        format!(
                            "{} nests {} levels deep (supported depth is {})",
                            text,
                            label.depth(),
                            MAX_LABEL_DEPTH
                        ),
                    );
                }
                Some(label)
            }
        }
    }

    /// Comma-separated labels of kind `expect` (or a SAG when
    /// `allow_sag`), preserving list order.
    fn label_list(
        &mut self,
        value: &str,
        line: u32,
        expect: LabelKind,
        allow_sag: bool,
    ) -> Option<Vec<Label>> {
        let mut out = Vec::new();
        for part in value.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            match Label::parse(part) {
                Err(e) => {
                    self.push(DiagCode::EBadValue, line, e.to_string());
                    return None;
                }
                Ok(label) => {
                    let ok = label.kind() == expect || (allow_sag && label.kind() == LabelKind::Sag);
                    if !ok {
                        self.push(
                            DiagCode::EBadValue,
                            line,
                            format!("{part} names a {}, which cannot appear here", label.kind().as_str()),
                        );
                        return None;
                    }
                    out.push(label);
                }
            }
        }
        Some(out)
    }
}

/// Split "level: rationale" into its leading word and the rest.
fn split_leveled(value: &str) -> (&str, &str) {
    match value.split_once(':') {
        Some((level, rest)) => (level.trim(), rest.trim()),
        None => (value.trim(), ""),
    }
}

/// Load a workspace from file bytes. Refuses only non-UTF-8 input; every
/// record-level fault becomes a diagnostic.
pub fn load_workspace(bytes: &[u8]) -> Result<(Workspace, Vec<Diagnostic>), EncodingError> {
    let text = std::str::from_utf8(bytes)?;
    Ok(load_workspace_str(text))
}

/// Load a workspace from text.
pub fn load_workspace_str(text: &str) -> (Workspace, Vec<Diagnostic>) {
    let (records, mut diags) = scan_records(text);
    let mut ws = Workspace::default();

    for record in &records {
        interpret(record, &mut ws, &mut diags);
    }

    // Dangling cross-references are part of the load report.
    let dangling = solution::validate_solution_graph(&ws)
        .into_iter()
        .chain(evaluation::validate_eval_refs(&ws))
        .filter(|d| {
            matches!(
                d.code,
                DiagCode::EDanglingTrace
                    | DiagCode::EDanglingEval
                    | DiagCode::EDanglingCoverage
                    | DiagCode::EDanglingSc
                    | DiagCode::EDanglingInteract
                    | DiagCode::EDanglingUtilizes
            )
        });
    diags.extend(dangling);

    (ws, crate::diag::normalize(diags))
}

fn interpret(record: &RawRecord, ws: &mut Workspace, diags: &mut Vec<Diagnostic>) {
    let mut f = Fields::new(record, diags);
    match record.kind.as_str() {
        "meta" => {
            f.warn_unknown(&["title", "venue", "reviewer", "irp_narrative", "irp_sentence"]);
            if ws.meta.is_some() {
                let loc = f.head_loc();
                f.diags.push(Diagnostic::new(
                    DiagCode::EDupRecord,
                    loc,
                    "a meta record already exists",
                ));
                return;
            }
            let meta = ReviewMeta {
                title: f.optional("title").map(|(v, _)| v).unwrap_or_default(),
                venue: f.optional("venue").map(|(v, _)| v).unwrap_or_default(),
                reviewer: f.optional("reviewer").map(|(v, _)| v).unwrap_or_default(),
                irp_narrative: f
                    .optional("irp_narrative")
                    .map(|(v, _)| v)
                    .unwrap_or_default(),
                irp_sentence: f
                    .optional("irp_sentence")
                    .map(|(v, _)| v)
                    .unwrap_or_default(),
            };
            ws.meta = Some(Sourced::at(meta, record.line));
        }
        "issue" => {
            f.warn_unknown(&["desc", "category", "kb_source", "text", "pages"]);
            let Some(label) = f.label(LabelKind::Issue) else {
                return;
            };
            let Some((desc, _)) = f.required("desc") else {
                return;
            };
            let Some((cat_text, cat_line)) = f.required("category") else {
                return;
            };
            let mut chars = cat_text.chars();
            let category = match (chars.next().and_then(IssueCategory::from_letter), chars.next())
            {
                (Some(c), None) => c,
                _ => {
                    f.push(
                        DiagCode::EBadValue,
                        cat_line,
                        format!("category must be one of D, I, X, U, K (got {cat_text:?})"),
                    );
                    return;
                }
            };
            let kb_source = f.optional("kb_source").map(|(v, _)| v);

            let mut evidence: Vec<Evidence> = Vec::new();
            for field in &record.fields {
                match field.key.as_str() {
                    "text" => {
                        if field.value.is_empty() {
                            f.push(DiagCode::WStrayKey, field.line, "empty text entry ignored");
                        } else {
                            evidence.push(Evidence {
                                text: field.value.clone(),
                                pages: None,
                            });
                        }
                    }
                    "pages" => match evidence.last_mut() {
                        Some(entry) if entry.pages.is_none() => match PageRef::parse(&field.value)
                        {
                            Ok(p) => entry.pages = Some(p),
                            Err(e) => {
                                f.push(DiagCode::EBadValue, field.line, e.to_string());
                                return;
                            }
                        },
                        _ => f.push(
                            DiagCode::WStrayKey,
                            field.line,
                            "pages without a preceding text entry ignored",
                        ),
                    },
                    _ => {}
                }
            }
            if evidence.is_empty() && kb_source.is_none() {
                let line = record.line;
                f.push(
                    DiagCode::EMissingKey,
                    line,
                    "an issue needs supporting text or a kb_source",
                );
                return;
            }
            ws.raw_issues.push(Sourced::at(
                Issue {
                    label,
                    desc,
                    category,
                    evidence,
                    kb_source,
                },
                record.line,
            ));
        }
        "assumption" => {
            f.warn_unknown(&["desc", "text", "pages"]);
            if record.token.as_deref().is_some_and(|t| t.eq_ignore_ascii_case("none")) {
                if ws.no_assumptions.is_some() {
                    let loc = f.head_loc();
                    f.diags.push(Diagnostic::new(
                        DiagCode::EDupRecord,
                        loc,
                        "the assumptions section is already marked empty",
                    ));
                    return;
                }
                let note = f.optional("text").map(|(v, _)| v).unwrap_or_default();
                ws.no_assumptions = Some(Sourced::at(note, record.line));
                return;
            }
            let Some(label) = f.label(LabelKind::Assumption) else {
                return;
            };
            if ws.assumptions.iter().any(|a| a.label == label) {
                let loc = f.head_loc();
                f.diags.push(Diagnostic::new(
                    DiagCode::EDupRecord,
                    loc,
                    format!("assumption {label} is already defined"),
                ));
                return;
            }
            let Some((text, _)) = f.required("text") else {
                return;
            };
            let Ok(pages) = f.pages("pages") else {
                return;
            };
            ws.assumptions.push(Sourced::at(
                Assumption {
                    label,
                    desc: f.optional("desc").map(|(v, _)| v),
                    text,
                    pages: pages.map(|(p, _)| p),
                },
                record.line,
            ));
        }
        "limitation" => {
            f.warn_unknown(&["desc", "text", "pages"]);
            if record.token.as_deref().is_some_and(|t| t.eq_ignore_ascii_case("none")) {
                if ws.no_limitations.is_some() {
                    let loc = f.head_loc();
                    f.diags.push(Diagnostic::new(
                        DiagCode::EDupRecord,
                        loc,
                        "the limitations section is already marked empty",
                    ));
                    return;
                }
                let note = f.optional("text").map(|(v, _)| v).unwrap_or_default();
                ws.no_limitations = Some(Sourced::at(note, record.line));
                return;
            }
            let Some(label) = f.label(LabelKind::Limitation) else {
                return;
            };
            if ws.limitations.iter().any(|l| l.label == label) {
                let loc = f.head_loc();
                f.diags.push(Diagnostic::new(
                    DiagCode::EDupRecord,
                    loc,
                    format!("limitation {label} is already defined"),
                ));
                return;
            }
            let Some((text, _)) = f.required("text") else {
                return;
            };
            let Ok(pages) = f.pages("pages") else {
                return;
            };
            ws.limitations.push(Sourced::at(
                Limitation {
                    label,
                    desc: f.optional("desc").map(|(v, _)| v),
                    text,
                    pages: pages.map(|(p, _)| p),
                },
                record.line,
            ));
        }
        "term" => {
            f.warn_unknown(&["term", "definition", "pages"]);
            let Some((term, _)) = f.required("term") else {
                return;
            };
            if ws.terms.iter().any(|t| t.term == term) {
                let loc = f.head_loc();
                f.diags.push(Diagnostic::new(
                    DiagCode::EDupRecord,
                    loc,
                    format!("term {term:?} is already defined"),
                ));
                return;
            }
            let Some((definition, _)) = f.required("definition") else {
                return;
            };
            let Ok(pages) = f.pages("pages") else {
                return;
            };
            ws.terms.push(Sourced::at(
                TermDefinition {
                    term,
                    definition,
                    pages: pages.map(|(p, _)| p),
                },
                record.line,
            ));
        }
        "sag" => {
            f.warn_unknown(&["type", "desc", "pages", "utilizes", "components", "evaluation"]);
            let Some(label) = f.label(LabelKind::Sag) else {
                return;
            };
            if ws.sags.iter().any(|s| s.label == label) {
                let loc = f.head_loc();
                f.diags.push(Diagnostic::new(
                    DiagCode::EDupRecord,
                    loc,
                    format!("SAG {label} is already defined"),
                ));
                return;
            }
            let Some((type_text, type_line)) = f.required("type") else {
                return;
            };
            let Some(artifact_type) = ArtifactType::parse(&type_text) else {
                f.push(
                    DiagCode::EBadValue,
                    type_line,
                    format!("unknown artifact type {type_text:?}"),
                );
                return;
            };
            let Some((desc, _)) = f.required("desc") else {
                return;
            };
            let Ok(pages) = f.pages("pages") else {
                return;
            };
            let mut utilizes = Vec::new();
            for field in &record.fields {
                if field.key == "utilizes" {
                    match f.label_list(&field.value, field.line, LabelKind::Sag, false) {
                        Some(labels) => utilizes.extend(labels),
                        None => return,
                    }
                }
            }
            let ack = |key: &str, f: &mut Fields| -> Result<Option<String>, ()> {
                match f.optional(key) {
                    None => Ok(None),
                    Some((value, line)) => {
                        let (word, note) = split_leveled(&value);
                        if word.eq_ignore_ascii_case("none") {
                            Ok(Some(note.to_string()))
                        } else {
                            f.push(
                                DiagCode::EBadValue,
                                line,
                                format!("{key} only takes the form \"none[: note]\""),
                            );
                            Err(())
                        }
                    }
                }
            };
            let Ok(components_ack) = ack("components", &mut f) else {
                return;
            };
            let Ok(evaluation_ack) = ack("evaluation", &mut f) else {
                return;
            };
            ws.sags.push(Sourced::at(
                SolutionArtifactGroup {
                    label,
                    artifact_type,
                    desc,
                    pages: pages.map(|(p, _)| p),
                    utilizes,
                    components_ack,
                    evaluation_ack,
                },
                record.line,
            ));
        }
        "sc" => {
            f.warn_unknown(&["desc", "pages", "interacts"]);
            let Some(label) = f.label(LabelKind::Sc) else {
                return;
            };
            if ws.scs.iter().any(|s| s.label == label) {
                let loc = f.head_loc();
                f.diags.push(Diagnostic::new(
                    DiagCode::EDupRecord,
                    loc,
                    format!("solution component {label} is already defined"),
                ));
                return;
            }
            let Some((desc, _)) = f.required("desc") else {
                return;
            };
            let Ok(pages) = f.pages("pages") else {
                return;
            };
            let mut interacts = Vec::new();
            for field in &record.fields {
                if field.key == "interacts" {
                    match f.label_list(&field.value, field.line, LabelKind::Sc, false) {
                        Some(labels) => interacts.extend(labels),
                        None => return,
                    }
                }
            }
            ws.scs.push(Sourced::at(
                SolutionComponent {
                    label,
                    desc,
                    pages: pages.map(|(p, _)| p),
                    interacts,
                },
                record.line,
            ));
        }
        "trace" => {
            f.warn_unknown(&["issue", "components", "confidence", "assessment"]);
            let Some((issue_text, issue_line)) = f.required("issue") else {
                return;
            };
            let Some(issue) = f.parse_label(&issue_text, LabelKind::Issue, issue_line) else {
                return;
            };
            let taken = ws.traces.iter().any(|t| t.issue == issue)
                || ws.unaddressed.iter().any(|a| a.issue == issue);
            if taken {
                let loc = f.head_loc();
                f.diags.push(Diagnostic::new(
                    DiagCode::EDupRecord,
                    loc,
                    format!("a trace record for {issue} already exists"),
                ));
                return;
            }
            let Some((components_text, components_line)) = f.required("components") else {
                return;
            };
            if components_text.eq_ignore_ascii_case("none") {
                if let Some((_, line)) = f.optional("confidence") {
                    f.push(
                        DiagCode::WStrayKey,
                        line,
                        "confidence does not apply to an unaddressed acknowledgment",
                    );
                }
                let note = f.optional("assessment").map(|(v, _)| v).unwrap_or_default();
                ws.unaddressed
                    .push(Sourced::at(UnaddressedAck { issue, note }, record.line));
                return;
            }
            let Some(components) =
                f.label_list(&components_text, components_line, LabelKind::Sc, true)
            else {
                return;
            };
            if components.is_empty() {
                f.push(
                    DiagCode::EMissingKey,
                    components_line,
                    "a trace needs at least one component (or the explicit \"none\")",
                );
                return;
            }
            let Some((conf_text, conf_line)) = f.required("confidence") else {
                return;
            };
            let Some(confidence) = Confidence::parse(&conf_text) else {
                f.push(
                    DiagCode::EBadValue,
                    conf_line,
                    format!("confidence must be stated, inferred, or unclear (got {conf_text:?})"),
                );
                return;
            };
            let Some((assessment, _)) = f.required("assessment") else {
                return;
            };
            ws.traces.push(Sourced::at(
                TraceLink {
                    issue,
                    components,
                    confidence,
                    assessment,
                },
                record.line,
            ));
        }
        "eval" => {
            f.warn_unknown(&["sag", "method", "selection", "application", "notes"]);
            let Some((sag_text, sag_line)) = f.required("sag") else {
                return;
            };
            let Some(sag) = f.parse_label(&sag_text, LabelKind::Sag, sag_line) else {
                return;
            };
            let Some((method_text, method_line)) = f.required("method") else {
                return;
            };
            let Some(method) = EvaluationMethod::parse(&method_text) else {
                f.push(
                    DiagCode::EBadValue,
                    method_line,
                    format!("unknown evaluation method {method_text:?}"),
                );
                return;
            };
            let Some((sel_text, sel_line)) = f.required("selection") else {
                return;
            };
            let (sel_word, sel_rationale) = split_leveled(&sel_text);
            let Some(selection) = SelectionAssessment::parse(sel_word) else {
                f.push(
                    DiagCode::EBadValue,
                    sel_line,
                    format!(
                        "selection must be appropriate, questionable, or inappropriate (got {sel_word:?})"
                    ),
                );
                return;
            };
            let Some((app_text, app_line)) = f.required("application") else {
                return;
            };
            let (app_word, app_rationale) = split_leveled(&app_text);
            let Some(application) = ApplicationAssessment::parse(app_word) else {
                f.push(
                    DiagCode::EBadValue,
                    app_line,
                    format!("application must be good, moderate, or poor (got {app_word:?})"),
                );
                return;
            };
            ws.evals.push(Sourced::at(
                EvaluationRecord {
                    sag,
                    method,
                    selection,
                    selection_rationale: sel_rationale.to_string(),
                    application,
                    application_rationale: app_rationale.to_string(),
                    notes: f.optional("notes").map(|(v, _)| v),
                },
                record.line,
            ));
        }
        "coverage" => {
            f.warn_unknown(&["issue", "status", "result"]);
            let Some((issue_text, issue_line)) = f.required("issue") else {
                return;
            };
            let Some(issue) = f.parse_label(&issue_text, LabelKind::Issue, issue_line) else {
                return;
            };
            if ws.coverage.iter().any(|c| c.issue == issue) {
                let loc = f.head_loc();
                f.diags.push(Diagnostic::new(
                    DiagCode::EDupRecord,
                    loc,
                    format!("a coverage entry for {issue} already exists"),
                ));
                return;
            }
            let Some((status_text, status_line)) = f.required("status") else {
                return;
            };
            let (status_word, status_note) = split_leveled(&status_text);
            let Some(status) = CoverageStatus::parse(status_word) else {
                f.push(
                    DiagCode::EBadValue,
                    status_line,
                    format!(
                        "status must be adequate, partly, no, or unassessed (got {status_word:?})"
                    ),
                );
                return;
            };
            let Some((result, _)) = f.required("result") else {
                return;
            };
            ws.coverage.push(Sourced::at(
                CoverageEntry {
                    issue,
                    status,
                    status_note: status_note.to_string(),
                    result,
                },
                record.line,
            ));
        }
        "frp_quality" => {
            let mut known: Vec<&str> = vec!["summary"];
            known.extend(FrpQuality::KEYS);
            f.warn_unknown(&known);
            if ws.frp_quality.is_some() {
                let loc = f.head_loc();
                f.diags.push(Diagnostic::new(
                    DiagCode::EDupRecord,
                    loc,
                    "an frp_quality record already exists",
                ));
                return;
            }
            let mut quality = FrpQuality::default();
            for (i, key) in FrpQuality::KEYS.iter().enumerate() {
                let Some((value, line)) = f.optional(key) else {
                    continue;
                };
                let (word, reason) = split_leveled(&value);
                let yes = match word.to_ascii_uppercase().as_str() {
                    "Y" | "YES" => true,
                    "N" | "NO" => false,
                    _ => {
                        f.push(
                            DiagCode::EBadValue,
                            line,
                            format!("{key} must start with Y or N (got {word:?})"),
                        );
                        return;
                    }
                };
                quality.answers[i] = Some(QualityAnswer {
                    yes,
                    reason: reason.to_string(),
                });
            }
            quality.summary = f.optional("summary").map(|(v, _)| v).unwrap_or_default();
            ws.frp_quality = Some(Sourced::at(quality, record.line));
        }
        "justification" => {
            f.warn_unknown(&["validity", "importance"]);
            if ws.justification.is_some() {
                let loc = f.head_loc();
                f.diags.push(Diagnostic::new(
                    DiagCode::EDupRecord,
                    loc,
                    "a justification record already exists",
                ));
                return;
            }
            let justification = Justification {
                validity: f.optional("validity").map(|(v, _)| v).unwrap_or_default(),
                importance: f.optional("importance").map(|(v, _)| v).unwrap_or_default(),
            };
            ws.justification = Some(Sourced::at(justification, record.line));
        }
        "opportunity" => {
            f.warn_unknown(&["source_step", "description", "skills", "knowledge", "resources"]);
            let Some((step_text, step_line)) = f.required("source_step") else {
                return;
            };
            let source_step = match step_text.trim().parse::<u8>() {
                Ok(s @ (6 | 9 | 10)) => s,
                _ => {
                    f.push(
                        DiagCode::EBadValue,
                        step_line,
                        format!("source_step must be 6, 9, or 10 (got {step_text:?})"),
                    );
                    return;
                }
            };
            let Some((description, _)) = f.required("description") else {
                return;
            };
            ws.opportunities.push(Sourced::at(
                Opportunity {
                    source_step,
                    description,
                    skills: f.optional("skills").map(|(v, _)| v).unwrap_or_default(),
                    knowledge: f.optional("knowledge").map(|(v, _)| v).unwrap_or_default(),
                    resources: f.optional("resources").map(|(v, _)| v).unwrap_or_default(),
                },
                record.line,
            ));
        }
        "knowledge" => {
            f.warn_unknown(&["area", "description"]);
            let Some((area_text, area_line)) = f.required("area") else {
                return;
            };
            let Some(area) = KnowledgeArea::parse(&area_text) else {
                f.push(
                    DiagCode::EBadValue,
                    area_line,
                    format!("area must be issues, solutions, or evaluation_methods (got {area_text:?})"),
                );
                return;
            };
            let Some((description, _)) = f.required("description") else {
                return;
            };
            ws.knowledge
                .push(Sourced::at(KnowledgeEntry { area, description }, record.line));
        }
        other => {
            let loc = f.head_loc();
            f.diags.push(Diagnostic::new(
                DiagCode::EUnknownKind,
                loc,
                format!("unknown record kind {other:?}; the record is skipped"),
            ));
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical serialization
// ---------------------------------------------------------------------------

/// Collapse a value onto one trimmed line.
fn clean(value: &str) -> String {
    value
        .replace(['\r', '\n'], " ")
        .trim()
        .to_string()
}

struct Writer {
    out: String,
}

impl Writer {
    fn new() -> Self {
        Writer { out: String::new() }
    }

    fn header(&mut self, kind: &str, token: Option<&str>) {
        if !self.out.is_empty() {
            self.out.push('\n');
        }
        match token {
            Some(token) => self.out.push_str(&format!("[{kind} {token}]\n")),
            None => self.out.push_str(&format!("[{kind}]\n")),
        }
    }

    fn kv(&mut self, key: &str, value: &str) {
        let value = clean(value);
        if value.is_empty() {
            self.out.push_str(&format!("{key}:\n"));
        } else {
            self.out.push_str(&format!("{key}: {value}\n"));
        }
    }

    fn kv_opt(&mut self, key: &str, value: &str) {
        if !clean(value).is_empty() {
            self.kv(key, value);
        }
    }

    fn leveled(&mut self, key: &str, level: &str, note: &str) {
        let note = clean(note);
        if note.is_empty() {
            self.kv(key, level);
        } else {
            self.kv(key, &format!("{level}: {note}"));
        }
    }
}

fn label_list(labels: &[Label]) -> String {
    let mut sorted: Vec<&Label> = labels.iter().collect();
    sorted.sort();
    sorted.dedup();
    sorted
        .iter()
        .map(|l| l.verbatim())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Serialize a workspace to canonical bytes: fixed record-kind order,
/// records sorted within each kind, fixed key order, LF endings. The result
/// is independent of the input's record order.
pub fn save_canonical(ws: &Workspace) -> String {
    let mut ws = ws.clone();
    ws.canonicalize();
    let mut w = Writer::new();

    if let Some(meta) = &ws.meta {
        w.header("meta", None);
        w.kv_opt("title", &meta.title);
        w.kv_opt("venue", &meta.venue);
        w.kv_opt("reviewer", &meta.reviewer);
        w.kv_opt("irp_narrative", &meta.irp_narrative);
        w.kv_opt("irp_sentence", &meta.irp_sentence);
    }

    for issue in &ws.raw_issues {
        w.header("issue", Some(issue.label.verbatim()));
        w.kv("desc", &issue.desc);
        w.kv("category", &issue.category.letter().to_string());
        if let Some(kb) = &issue.kb_source {
            w.kv_opt("kb_source", kb);
        }
        for entry in &issue.evidence {
            w.kv("text", &entry.text);
            if let Some(pages) = &entry.pages {
                w.kv("pages", &pages.to_string());
            }
        }
    }

    if let Some(note) = &ws.no_assumptions {
        w.header("assumption", Some("none"));
        w.kv_opt("text", note);
    }
    for a in &ws.assumptions {
        w.header("assumption", Some(a.label.verbatim()));
        if let Some(desc) = &a.desc {
            w.kv_opt("desc", desc);
        }
        w.kv("text", &a.text);
        if let Some(pages) = &a.pages {
            w.kv("pages", &pages.to_string());
        }
    }

    if let Some(note) = &ws.no_limitations {
        w.header("limitation", Some("none"));
        w.kv_opt("text", note);
    }
    for l in &ws.limitations {
        w.header("limitation", Some(l.label.verbatim()));
        if let Some(desc) = &l.desc {
            w.kv_opt("desc", desc);
        }
        w.kv("text", &l.text);
        if let Some(pages) = &l.pages {
            w.kv("pages", &pages.to_string());
        }
    }

    for term in &ws.terms {
        w.header("term", None);
        w.kv("term", &term.term);
        w.kv("definition", &term.definition);
        if let Some(pages) = &term.pages {
            w.kv("pages", &pages.to_string());
        }
    }

    for sag in &ws.sags {
        w.header("sag", Some(sag.label.verbatim()));
        w.kv("type", sag.artifact_type.id());
        w.kv("desc", &sag.desc);
        if let Some(pages) = &sag.pages {
            w.kv("pages", &pages.to_string());
        }
        if !sag.utilizes.is_empty() {
            w.kv("utilizes", &label_list(&sag.utilizes));
        }
        if let Some(note) = &sag.components_ack {
            w.leveled("components", "none", note);
        }
        if let Some(note) = &sag.evaluation_ack {
            w.leveled("evaluation", "none", note);
        }
    }

    for sc in &ws.scs {
        w.header("sc", Some(sc.label.verbatim()));
        w.kv("desc", &sc.desc);
        if let Some(pages) = &sc.pages {
            w.kv("pages", &pages.to_string());
        }
        if !sc.interacts.is_empty() {
            w.kv("interacts", &label_list(&sc.interacts));
        }
    }

    // Trace records and unaddressed acknowledgments interleave by issue.
    let mut trace_rows: Vec<(&Label, bool, usize)> = Vec::new();
    for (i, t) in ws.traces.iter().enumerate() {
        trace_rows.push((&t.issue, false, i));
    }
    for (i, a) in ws.unaddressed.iter().enumerate() {
        trace_rows.push((&a.issue, true, i));
    }
    trace_rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    for (_, is_ack, i) in trace_rows {
        w.header("trace", None);
        if is_ack {
            let ack = &ws.unaddressed[i];
            w.kv("issue", ack.issue.verbatim());
            w.kv("components", "none");
            w.kv_opt("assessment", &ack.note);
        } else {
            let t = &ws.traces[i];
            w.kv("issue", t.issue.verbatim());
            w.kv("components", &label_list(&t.components));
            w.kv("confidence", t.confidence.id());
            w.kv("assessment", &t.assessment);
        }
    }

    for eval in &ws.evals {
        w.header("eval", None);
        w.kv("sag", eval.sag.verbatim());
        w.kv("method", eval.method.id());
        w.leveled("selection", eval.selection.id(), &eval.selection_rationale);
        w.leveled(
            "application",
            eval.application.id(),
            &eval.application_rationale,
        );
        if let Some(notes) = &eval.notes {
            w.kv_opt("notes", notes);
        }
    }

    for entry in &ws.coverage {
        w.header("coverage", None);
        w.kv("issue", entry.issue.verbatim());
        w.leveled("status", entry.status.id(), &entry.status_note);
        w.kv("result", &entry.result);
    }

    if let Some(quality) = &ws.frp_quality {
        w.header("frp_quality", None);
        for (i, key) in FrpQuality::KEYS.iter().enumerate() {
            if let Some(answer) = &quality.answers[i] {
                w.leveled(key, if answer.yes { "Y" } else { "N" }, &answer.reason);
            }
        }
        w.kv_opt("summary", &quality.summary);
    }

    if let Some(j) = &ws.justification {
        w.header("justification", None);
        w.kv_opt("validity", &j.validity);
        w.kv_opt("importance", &j.importance);
    }

    for op in &ws.opportunities {
        w.header("opportunity", None);
        w.kv("source_step", &op.source_step.to_string());
        w.kv("description", &op.description);
        w.kv_opt("skills", &op.skills);
        w.kv_opt("knowledge", &op.knowledge);
        w.kv_opt("resources", &op.resources);
    }

    for entry in &ws.knowledge {
        w.header("knowledge", None);
        w.kv("area", entry.area.id());
        w.kv("description", &entry.description);
    }

    w.out
}
