//! The thirteen review-step gates (steps 0-12), each a checkable predicate
//! over the workspace's written deliverables.
//!
//! Gates check artifacts, not understanding: a step whose work is cognitive
//! counts as complete once its written output exists.

use thiserror::Error;

use crate::diag::Severity;
use crate::model::IssueCategory;
use crate::scope;
use crate::workspace::{FrpQuality, KnowledgeArea, Workspace};

pub const STEP_COUNT: u8 = 13;

pub const STEP_NAMES: [&str; 13] = [
    "Preparation",
    "Develop an initial overview narrative of the IRP",
    "Preliminary identification of the issues",
    "Review and refine the set of issues",
    "Define the FRP",
    "Describe the IRP",
    "Assess the quality of the FRP",
    "Describe the authors' justification of the FRP",
    "Describe the proposed solution",
    "Assess the proposed solution",
    "Analyze the authors' evaluation",
    "Identify research opportunities",
    "Describe knowledge gained",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("step {0} is outside the 0-12 range")]
pub struct BadStep(pub u8);

/// Gate state for one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepStatus {
    Complete,
    Incomplete,
    /// Own requirements unmet while an earlier step is also incomplete
    /// (strict mode only).
    Blocked,
}

impl StepStatus {
    pub fn name(self) -> &'static str {
        match self {
            StepStatus::Complete => "Complete",
            StepStatus::Incomplete => "Incomplete",
            StepStatus::Blocked => "Blocked",
        }
    }
}

/// One evaluated gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepGate {
    pub step: u8,
    pub name: &'static str,
    pub status: StepStatus,
    /// Human-readable deficits; empty when complete.
    pub missing: Vec<String>,
}

/// All thirteen gates in step order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewProgress {
    pub gates: Vec<StepGate>,
    /// The lowest Incomplete step, if any.
    pub first_incomplete: Option<u8>,
}

fn missing_for(ws: &Workspace, step: u8) -> Vec<String> {
    let mut missing = Vec::new();
    match step {
        0 => {
            match &ws.meta {
                None => missing.push("meta record".to_string()),
                Some(meta) if meta.title.trim().is_empty() => missing.push("title".to_string()),
                Some(_) => {}
            };
        }
        1 => {
            let narrative_ok = ws
                .meta
                .as_ref()
                .is_some_and(|m| !m.irp_narrative.trim().is_empty());
            let sentence_ok = ws
                .meta
                .as_ref()
                .is_some_and(|m| !m.irp_sentence.trim().is_empty());
            if !narrative_ok {
                missing.push("irp_narrative".to_string());
            }
            if !sentence_ok {
                missing.push("irp_sentence".to_string());
            }
        }
        2 => {
            let any = ws
                .raw_issues
                .iter()
                .any(|i| i.evidence.iter().any(|e| !e.text.trim().is_empty()));
            if !any {
                missing.push("at least one issue with supporting text".to_string());
            }
        }
        3 => {
            let (tree, conflicts) = scope::merged_tree(ws);
            for diag in conflicts {
                missing.push(diag.message);
            }
            for issue in tree.iter() {
                if let Some(parent) = issue.label.parent() {
                    if !tree.contains(&parent) {
                        missing.push(format!("{}: parent {} is missing", issue.label, parent));
                    }
                }
            }
        }
        4 => {
            let (tree, _) = scope::merged_tree(ws);
            if !tree.iter().any(|i| i.category == IssueCategory::Direct) {
                missing.push("at least one direct (D) issue".to_string());
            }
            let errors = scope::validate_category_rules(ws)
                .into_iter()
                .filter(|d| d.severity == Severity::Error)
                .count();
            if errors > 0 {
                missing.push(format!("{errors} category rule violation(s)"));
            }
            if ws.assumptions.is_empty() && ws.no_assumptions.is_none() {
                missing.push("assumptions section (records or an explicit none)".to_string());
            }
            if ws.limitations.is_empty() && ws.no_limitations.is_none() {
                missing.push("limitations section (records or an explicit none)".to_string());
            }
        }
        5 => {
            let (tree, _) = scope::merged_tree(ws);
            if tree.is_empty() {
                missing.push("at least one issue to draw the scope graph from".to_string());
            }
            for issue in tree.iter() {
                if issue.category == IssueCategory::KnownUnmentioned
                    && issue.kb_source.as_deref().unwrap_or("").trim().is_empty()
                {
                    missing.push(format!("{}: kb_source", issue.label));
                }
            }
        }
        6 => match &ws.frp_quality {
            None => missing.push("frp_quality record".to_string()),
            Some(q) => {
                for (i, key) in FrpQuality::KEYS.iter().enumerate() {
                    if q.answers[i].is_none() {
                        missing.push(format!("answer {key}"));
                    }
                }
                if q.summary.trim().is_empty() {
                    missing.push("summary".to_string());
                }
            }
        },
        7 => match &ws.justification {
            None => missing.push("justification record".to_string()),
            Some(j) => {
                if j.validity.trim().is_empty() {
                    missing.push("validity".to_string());
                }
                if j.importance.trim().is_empty() {
                    missing.push("importance".to_string());
                }
            }
        },
        8 => {
            if ws.sags.is_empty() {
                missing.push("at least one solution artifact group".to_string());
            }
            for sag in &ws.sags {
                let has_components = ws.scs.iter().any(|sc| sc.label.root() == sag.label);
                if !has_components && sag.components_ack.is_none() {
                    missing.push(format!(
                        "{}: no components and no acknowledgment",
                        sag.label
                    ));
                }
            }
        }
        9 => {
            let (tree, _) = scope::merged_tree(ws);
            for leaf in tree.leaf_labels(|i| i.category.in_frp()) {
                let traced = ws.traces.iter().any(|t| t.issue == leaf);
                let acked = ws.unaddressed.iter().any(|a| a.issue == leaf);
                if !traced && !acked {
                    missing.push(format!("{leaf}: not traced or acknowledged"));
                }
            }
        }
        10 => {
            for sag in &ws.sags {
                let evaluated = ws.evals.iter().any(|e| e.sag == sag.label);
                if !evaluated && sag.evaluation_ack.is_none() {
                    missing.push(format!("{}: no evaluation record", sag.label));
                }
            }
            let (tree, _) = scope::merged_tree(ws);
            for leaf in tree.leaf_labels(|i| i.category.in_frp()) {
                if !ws.coverage.iter().any(|c| c.issue == leaf) {
                    missing.push(format!("{leaf}: no coverage entry"));
                }
            }
        }
        11 => {
            let ok = ws.opportunities.iter().any(|op| {
                matches!(op.source_step, 6 | 9 | 10)
                    && !op.skills.trim().is_empty()
                    && !op.knowledge.trim().is_empty()
                    && !op.resources.trim().is_empty()
            });
            if !ok {
                missing.push(
                    "a research opportunity from step 6, 9, or 10 with skills, knowledge, and resources"
                        .to_string(),
                );
            }
        }
        12 => {
            for area in KnowledgeArea::ALL {
                if !ws.knowledge.iter().any(|k| k.area == area) {
                    missing.push(format!("knowledge entry for area {}", area.display_name()));
                }
            }
        }
        _ => unreachable!("caller validates the step number"),
    }
    missing
}

/// Evaluate one gate in isolation (never Blocked).
pub fn step_status(ws: &Workspace, step: u8) -> Result<StepGate, BadStep> {
    if step >= STEP_COUNT {
        return Err(BadStep(step));
    }
    let missing = missing_for(ws, step);
    Ok(StepGate {
        step,
        name: STEP_NAMES[step as usize],
        status: if missing.is_empty() {
            StepStatus::Complete
        } else {
            StepStatus::Incomplete
        },
        missing,
    })
}

/// Evaluate all thirteen gates. In strict mode a failing step after the
/// first incomplete one reports as Blocked instead of Incomplete.
pub fn review_progress(ws: &Workspace, strict: bool) -> ReviewProgress {
    let mut gates = Vec::with_capacity(STEP_COUNT as usize);
    let mut first_incomplete = None;
    for step in 0..STEP_COUNT {
        let mut gate = step_status(ws, step).expect("step in range");
        if gate.status == StepStatus::Incomplete {
            if strict && first_incomplete.is_some() {
                gate.status = StepStatus::Blocked;
            } else if first_incomplete.is_none() {
                first_incomplete = Some(step);
            }
        }
        gates.push(gate);
    }
    ReviewProgress {
        gates,
        first_incomplete,
    }
}
