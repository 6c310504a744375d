//! The personal knowledge base: sources, knowledge entries, and issue
//! patterns accumulated across reviews, stored in `kb.dsrw` using the same
//! record syntax as the review workspace.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::diag::{DiagCode, Diagnostic, Location};
use crate::format::{scan_records, EncodingError};
use crate::scope;
use crate::workspace::{KnowledgeArea, Workspace};

/// A registered knowledge-base source ("KB-KM", "KB-UA", ...).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KbSource {
    pub name: String,
    pub desc: String,
}

/// One piece of knowledge gained, filed under its area.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct KbEntry {
    pub area: KnowledgeArea,
    pub description: String,
    /// The review this was learnt from.
    pub origin: String,
}

/// A reusable issue pattern harvested from a review's U/K issues.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IssuePattern {
    pub desc: String,
    pub source: String,
    /// The canonical definition text that travels with the pattern.
    pub definition: String,
    pub origin: String,
}

/// The whole knowledge base.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeBase {
    pub sources: BTreeMap<String, KbSource>,
    pub entries: Vec<KbEntry>,
    pub issue_patterns: Vec<IssuePattern>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("issue {issue} cites unregistered knowledge-base source {source_id:?}")]
    UnknownSource { issue: String, source_id: String },
}

/// A suggested known issue missing from the current review.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suggestion {
    pub pattern: IssuePattern,
    pub rationale: String,
}

impl KnowledgeBase {
    pub fn is_empty(&self) -> bool {
        self.sources.is_empty() && self.entries.is_empty() && self.issue_patterns.is_empty()
    }

    fn canonicalize(&mut self) {
        self.entries.sort();
        self.entries.dedup();
        self.issue_patterns.sort();
        self.issue_patterns.dedup();
    }
}

fn normalize_desc(desc: &str) -> String {
    desc.trim().to_lowercase()
}

/// Fold a finished review into the knowledge base.
///
/// Knowledge entries land under their areas; U/K issues that carry a
/// definition text become issue patterns under their source. Merging the
/// same review twice changes nothing. Warns (without failing) when the
/// review has no step-12 knowledge entries.
pub fn kb_merge_from_workspace(
    kb: &KnowledgeBase,
    ws: &Workspace,
) -> Result<(KnowledgeBase, Vec<Diagnostic>), KbError> {
    let mut out = kb.clone();
    let mut diags = Vec::new();
    let origin = ws
        .meta
        .as_ref()
        .map(|m| m.title.trim().to_string())
        .filter(|t| !t.is_empty())
        .unwrap_or_else(|| "untitled review".to_string());

    if ws.knowledge.is_empty() {
        diags.push(Diagnostic::new(
            DiagCode::WNoKnowledge,
            Location::record("knowledge"),
            "the review has no knowledge entries (step 12) to merge",
        ));
    }

    for entry in &ws.knowledge {
        out.entries.push(KbEntry {
            area: entry.area,
            description: entry.description.clone(),
            origin: origin.clone(),
        });
    }

    let (tree, _) = scope::merged_tree(ws);
    for issue in tree.iter() {
        if !issue.category.needs_kb_source() {
            continue;
        }
        let Some(source) = issue
            .kb_source
            .as_deref()
            .map(str::trim)
            .filter(|s| !s.is_empty())
        else {
            continue;
        };
        if !out.sources.contains_key(source) {
            return Err(KbError::UnknownSource {
                issue: issue.label.verbatim().to_string(),
                source_id: source.to_string(),
            });
        }
        let Some(definition) = issue.evidence.first().map(|e| e.text.clone()) else {
            continue;
        };
        out.issue_patterns.push(IssuePattern {
            desc: issue.desc.clone(),
            source: source.to_string(),
            definition,
            origin: origin.clone(),
        });
    }

    out.canonicalize();
    Ok((out, diags))
}

/// Patterns whose description matches no issue in the review, sorted by
/// source then description. Suggestions are never auto-inserted.
pub fn suggest_k_issues(kb: &KnowledgeBase, ws: &Workspace) -> Vec<Suggestion> {
    let (tree, _) = scope::merged_tree(ws);
    let present: BTreeSet<String> = tree.iter().map(|i| normalize_desc(&i.desc)).collect();
    let mut seen = BTreeSet::new();
    let mut out: Vec<Suggestion> = kb
        .issue_patterns
        .iter()
        .filter(|p| !present.contains(&normalize_desc(&p.desc)))
        .filter(|p| seen.insert((normalize_desc(&p.desc), p.source.clone())))
        .map(|p| Suggestion {
            pattern: p.clone(),
            rationale: format!(
                "known issue from {} (first seen in {:?}) is not covered by this review",
                p.source, p.origin
            ),
        })
        .collect();
    out.sort_by(|a, b| {
        (&a.pattern.source, &a.pattern.desc).cmp(&(&b.pattern.source, &b.pattern.desc))
    });
    out
}

/// What a search hit points at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KbHit {
    Entry(KbEntry),
    Pattern(IssuePattern),
}

/// Case-insensitive substring search over entry descriptions and pattern
/// descriptions/definitions. An empty query matches everything.
pub fn kb_search(kb: &KnowledgeBase, query: &str) -> Vec<KbHit> {
    let needle = query.trim().to_lowercase();
    let matches = |hay: &str| needle.is_empty() || hay.to_lowercase().contains(&needle);
    let mut out = Vec::new();
    for entry in &kb.entries {
        if matches(&entry.description) {
            out.push(KbHit::Entry(entry.clone()));
        }
    }
    for pattern in &kb.issue_patterns {
        if matches(&pattern.desc) || matches(&pattern.definition) {
            out.push(KbHit::Pattern(pattern.clone()));
        }
    }
    out
}

/// Load a knowledge base from `kb.dsrw` bytes.
pub fn load_kb(bytes: &[u8]) -> Result<(KnowledgeBase, Vec<Diagnostic>), EncodingError> {
    let text = std::str::from_utf8(bytes)?;
    Ok(load_kb_str(text))
}

pub fn load_kb_str(text: &str) -> (KnowledgeBase, Vec<Diagnostic>) {
    let (records, mut diags) = scan_records(text);
    let mut kb = KnowledgeBase::default();

    for record in &records {
        let loc = Location::new(
            match &record.token {
                Some(t) => format!("{} {}", record.kind, t),
                None => record.kind.clone(),
            },
            record.line,
        );
        let get = |key: &str| -> Option<String> {
            record
                .fields
                .iter()
                .find(|f| f.key == key)
                .map(|f| f.value.clone())
                .filter(|v| !v.is_empty())
        };
        match record.kind.as_str() {
            "source" => {
                let Some(id) = record.token.clone() else {
                    diags.push(Diagnostic::new(
                        DiagCode::EBadLabel,
                        loc,
                        "source record is missing its id",
                    ));
                    continue;
                };
                if kb.sources.contains_key(&id) {
                    diags.push(Diagnostic::new(
                        DiagCode::EDupRecord,
                        loc,
                        format!("source {id:?} is already registered"),
                    ));
                    continue;
                }
                kb.sources.insert(
                    id,
                    KbSource {
                        name: get("name").unwrap_or_default(),
                        desc: get("desc").unwrap_or_default(),
                    },
                );
            }
            "kb_entry" => {
                let (Some(area_text), Some(description)) = (get("area"), get("description"))
                else {
                    diags.push(Diagnostic::new(
                        DiagCode::EMissingKey,
                        loc,
                        "kb_entry needs area and description",
                    ));
                    continue;
                };
                let Some(area) = KnowledgeArea::parse(&area_text) else {
                    diags.push(Diagnostic::new(
                        DiagCode::EBadValue,
                        loc,
                        format!("unknown knowledge area {area_text:?}"),
                    ));
                    continue;
                };
                kb.entries.push(KbEntry {
                    area,
                    description,
                    origin: get("origin").unwrap_or_default(),
                });
            }
            "issue_pattern" => {
                let (Some(desc), Some(source), Some(definition)) =
                    (get("desc"), get("source"), get("definition"))
                else {
                    diags.push(Diagnostic::new(
                        DiagCode::EMissingKey,
                        loc,
                        "issue_pattern needs desc, source, and definition",
                    ));
                    continue;
                };
                kb.issue_patterns.push(IssuePattern {
                    desc,
                    source,
                    definition,
                    origin: get("origin").unwrap_or_default(),
                });
            }
            other => {
                diags.push(Diagnostic::new(
                    DiagCode::EUnknownKind,
                    loc,
                    format!("unknown record kind {other:?} in a knowledge base"),
                ));
            }
        }
    }

    // Patterns must cite registered sources.
    for pattern in &kb.issue_patterns {
        if !kb.sources.contains_key(&pattern.source) {
            diags.push(Diagnostic::new(
                DiagCode::EKbMissing,
                Location::record(format!("issue_pattern {}", pattern.desc)),
                format!(
                    "pattern {:?} cites unregistered source {:?}",
                    pattern.desc, pattern.source
                ),
            ));
        }
    }

    kb.canonicalize();
    (kb, crate::diag::normalize(diags))
}

/// Serialize a knowledge base in canonical order.
pub fn save_kb(kb: &KnowledgeBase) -> String {
    let mut kb = kb.clone();
    kb.canonicalize();
    let mut out = String::new();
    let sep = |out: &mut String| {
        if !out.is_empty() {
            out.push('\n');
        }
    };
    for (id, source) in &kb.sources {
        sep(&mut out);
        out.push_str(&format!("[source {id}]\n"));
        if !source.name.is_empty() {
            out.push_str(&format!("name: {}\n", source.name));
        }
        if !source.desc.is_empty() {
            out.push_str(&format!("desc: {}\n", source.desc));
        }
    }
    for entry in &kb.entries {
        sep(&mut out);
        out.push_str("[kb_entry]\n");
        out.push_str(&format!("area: {}\n", entry.area.id()));
        out.push_str(&format!("description: {}\n", entry.description));
        if !entry.origin.is_empty() {
            out.push_str(&format!("origin: {}\n", entry.origin));
        }
    }
    for pattern in &kb.issue_patterns {
        sep(&mut out);
        out.push_str("[issue_pattern]\n");
        out.push_str(&format!("desc: {}\n", pattern.desc));
        out.push_str(&format!("source: {}\n", pattern.source));
        out.push_str(&format!("definition: {}\n", pattern.definition));
        if !pattern.origin.is_empty() {
            out.push_str(&format!("origin: {}\n", pattern.origin));
        }
    }
    out
}
