//! Scope engine: duplicate detection and merging over raw issue rows,
//! category rule validation, and FRP/IRP scope computation.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::diag::{DiagCode, Diagnostic, Location};
use crate::label::Label;
use crate::model::{Evidence, Issue, IssueCategory, IssueTree, ScopeSets};
use crate::workspace::{Sourced, Workspace};

/// Raw issue rows that share one normalized label.
#[derive(Debug, Clone, PartialEq)]
pub struct DuplicateGroup {
    /// The shared label (spelling of the first row).
    pub label: Label,
    /// The rows, in file order. Always at least two.
    pub members: Vec<Issue>,
    /// Header line of the first member, when file-sourced.
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("issue {label} is recorded both inside ({included}) and outside ({excluded}) the FRP")]
    CategoryConflict {
        label: String,
        included: char,
        excluded: char,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ScopeError {
    #[error("the workspace has no issues; the research-problem scope is undefined")]
    ScopeUndefined,
}

/// Find groups of raw rows that describe the same issue (same normalized
/// label), sorted by label.
pub fn detect_duplicates(raw: &[Sourced<Issue>]) -> Vec<DuplicateGroup> {
    let mut by_label: BTreeMap<Label, Vec<&Sourced<Issue>>> = BTreeMap::new();
    for row in raw {
        by_label.entry(row.label.clone()).or_default().push(row);
    }
    by_label
        .into_values()
        .filter(|rows| rows.len() >= 2)
        .map(|rows| DuplicateGroup {
            label: rows[0].label.clone(),
            members: rows.iter().map(|r| r.value.clone()).collect(),
            line: rows[0].line,
        })
        .collect()
}

/// Collapse a duplicate group into one issue.
///
/// Evidence is the union of the members' evidence; the first member's
/// description and label spelling survive. Category resolves by precedence
/// D > I > U > X > K, except that mixing an included category (D/I) with an
/// excluded one (X/K) is a conflict, never silently resolved.
pub fn merge_duplicates(group: &DuplicateGroup) -> Result<Issue, MergeError> {
    let cats: BTreeSet<IssueCategory> = group.members.iter().map(|m| m.category).collect();
    let included = [IssueCategory::Direct, IssueCategory::IndirectIncluded]
        .into_iter()
        .find(|c| cats.contains(c));
    let excluded = [IssueCategory::Excluded, IssueCategory::KnownUnmentioned]
        .into_iter()
        .find(|c| cats.contains(c));
    if let (Some(inc), Some(exc)) = (included, excluded) {
        return Err(MergeError::CategoryConflict {
            label: group.label.verbatim().to_string(),
            included: inc.letter(),
            excluded: exc.letter(),
        });
    }

    let category = [
        IssueCategory::Direct,
        IssueCategory::IndirectIncluded,
        IssueCategory::Unidentified,
        IssueCategory::Excluded,
        IssueCategory::KnownUnmentioned,
    ]
    .into_iter()
    .find(|c| cats.contains(c))
    .expect("group is non-empty");

    let mut evidence: Vec<Evidence> = Vec::new();
    for member in &group.members {
        for entry in &member.evidence {
            if !evidence.contains(entry) {
                evidence.push(entry.clone());
            }
        }
    }
    let kb_source = group
        .members
        .iter()
        .find_map(|m| m.kb_source.clone());

    let first = &group.members[0];
    Ok(Issue {
        label: first.label.clone(),
        desc: first.desc.clone(),
        category,
        evidence,
        kb_source,
    })
}

/// Merge raw rows into the issue tree. Groups that fail to merge surface as
/// E-CATEGORY-CONFLICT diagnostics and contribute their first row, so the
/// label still exists downstream.
pub fn merged_tree(ws: &Workspace) -> (IssueTree, Vec<Diagnostic>) {
    let mut tree = IssueTree::new();
    let mut diags = Vec::new();
    let mut grouped: BTreeMap<Label, DuplicateGroup> = detect_duplicates(&ws.raw_issues)
        .into_iter()
        .map(|g| (g.label.clone(), g))
        .collect();
    let mut done: BTreeSet<Label> = BTreeSet::new();
    for row in &ws.raw_issues {
        if done.contains(&row.label) {
            continue;
        }
        done.insert(row.label.clone());
        match grouped.remove(&row.label) {
            None => {
                tree.insert(row.value.clone());
            }
            Some(group) => match merge_duplicates(&group) {
                Ok(issue) => {
                    tree.insert(issue);
                }
                Err(err) => {
                    diags.push(Diagnostic::new(
                        DiagCode::ECategoryConflict,
                        Location::new(format!("issue {}", group.label), group.line),
                        err.to_string(),
                    ));
                    tree.insert(group.members[0].clone());
                }
            },
        }
    }
    (tree, diags)
}

/// Check every category rule over the merged tree.
///
/// Emits E-U-PARENT, E-K-CHILD, E-NO-EVIDENCE, E-KB-MISSING, E-ORPHAN-ISSUE,
/// E-CATEGORY-CONFLICT (from merging), W-X-CHILDREN, W-SIMILAR-DESC, and the
/// informational I-X-CHILDREN.
pub fn validate_category_rules(ws: &Workspace) -> Vec<Diagnostic> {
    let (tree, mut diags) = merged_tree(ws);

    for issue in tree.iter() {
        let loc = || {
            let line = ws
                .raw_issues
                .iter()
                .find(|r| r.label == issue.label)
                .map(|r| r.line)
                .unwrap_or(0);
            Location::new(format!("issue {}", issue.label), line)
        };
        match issue.category {
            IssueCategory::Unidentified => match tree.parent_of(&issue.label) {
                None => diags.push(Diagnostic::new(
                    DiagCode::EUParent,
                    loc(),
                    format!(
                        "U issue {} has no parent in the tree; a U issue must be the child of a D or I issue",
                        issue.label
                    ),
                )),
                Some(parent) if !matches!(
                    parent.category,
                    IssueCategory::Direct | IssueCategory::IndirectIncluded
                ) =>
                {
                    diags.push(Diagnostic::new(
                        DiagCode::EUParent,
                        loc(),
                        format!(
                            "U issue {} has parent {} of category {}; a U issue must be the child of a D or I issue",
                            issue.label,
                            parent.label,
                            parent.category
                        ),
                    ));
                }
                Some(_) => {}
            },
            IssueCategory::KnownUnmentioned => {
                if let Some(parent) = tree.parent_of(&issue.label) {
                    if matches!(
                        parent.category,
                        IssueCategory::Direct | IssueCategory::IndirectIncluded
                    ) {
                        diags.push(Diagnostic::new(
                            DiagCode::EKChild,
                            loc(),
                            format!(
                                "K issue {} is a child of {} issue {}; a known child of a D/I issue is a U issue",
                                issue.label,
                                parent.category,
                                parent.label
                            ),
                        ));
                    }
                }
            }
            _ => {}
        }

        if issue.category != IssueCategory::Unidentified
            && issue.label.parent().is_some()
            && tree.parent_of(&issue.label).is_none()
        {
            diags.push(Diagnostic::new(
                DiagCode::EOrphanIssue,
                loc(),
                format!(
                    "issue {} has no parent {} in the tree",
                    issue.label,
                    issue.label.parent().unwrap()
                ),
            ));
        }

        match issue.category {
            IssueCategory::Direct | IssueCategory::IndirectIncluded | IssueCategory::Excluded => {
                if !issue.has_paged_evidence() {
                    diags.push(Diagnostic::new(
                        DiagCode::ENoEvidence,
                        loc(),
                        format!(
                            "{} issue {} has no page-cited supporting text",
                            issue.category, issue.label
                        ),
                    ));
                }
            }
            IssueCategory::Unidentified | IssueCategory::KnownUnmentioned => {
                if issue.kb_source.as_deref().unwrap_or("").trim().is_empty() {
                    diags.push(Diagnostic::new(
                        DiagCode::EKbMissing,
                        loc(),
                        format!(
                            "{} issue {} cites no knowledge-base source",
                            issue.category, issue.label
                        ),
                    ));
                }
            }
        }

        if issue.category == IssueCategory::Excluded {
            let children = tree.children_of(&issue.label);
            let included: Vec<&str> = children
                .iter()
                .filter(|c| {
                    matches!(
                        c.category,
                        IssueCategory::Direct | IssueCategory::IndirectIncluded
                    )
                })
                .map(|c| c.label.verbatim())
                .collect();
            if !included.is_empty() {
                diags.push(Diagnostic::new(
                    DiagCode::WXChildren,
                    loc(),
                    format!(
                        "excluded issue {} has included (D/I) children: {}",
                        issue.label,
                        included.join(", ")
                    ),
                ));
            } else if !children.is_empty() {
                diags.push(Diagnostic::new(
                    DiagCode::IXChildren,
                    loc(),
                    format!("excluded issue {} has child issues", issue.label),
                ));
            }
        }
    }

    // Same description under different labels is worth a look, but never
    // auto-merged.
    let mut by_desc: BTreeMap<&str, Vec<&Issue>> = BTreeMap::new();
    for issue in tree.iter() {
        by_desc.entry(issue.desc.as_str()).or_default().push(issue);
    }
    for (desc, issues) in by_desc {
        if issues.len() >= 2 {
            let labels: Vec<&str> = issues.iter().map(|i| i.label.verbatim()).collect();
            diags.push(Diagnostic::new(
                DiagCode::WSimilarDesc,
                Location::record(format!("issue {}", issues[0].label)),
                format!(
                    "issues {} share the description {:?}",
                    labels.join(", "),
                    desc
                ),
            ));
        }
    }

    diags
}

/// Compute the FRP/IRP scope sets from the merged tree.
pub fn compute_scopes(ws: &Workspace) -> Result<ScopeSets, ScopeError> {
    let (tree, _) = merged_tree(ws);
    if tree.is_empty() {
        return Err(ScopeError::ScopeUndefined);
    }
    let mut frp_issues = BTreeSet::new();
    let mut irp_only_issues = BTreeSet::new();
    for issue in tree.iter() {
        if issue.category.in_frp() {
            frp_issues.insert(issue.label.clone());
        } else {
            irp_only_issues.insert(issue.label.clone());
        }
    }
    let frp_leaves = tree.leaf_labels(|i| i.category.in_frp());
    Ok(ScopeSets {
        frp_issues,
        irp_only_issues,
        frp_leaves,
        assumptions: ws.assumptions.iter().map(|a| a.value.clone()).collect(),
        limitations: ws.limitations.iter().map(|l| l.value.clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PageRef;

    fn lbl(s: &str) -> Label {
        Label::parse(s).unwrap()
    }

    fn issue(label: &str, category: IssueCategory) -> Issue {
        Issue {
            label: lbl(label),
            desc: format!("desc {label}"),
            category,
            evidence: vec![Evidence {
                text: format!("text {label}"),
                pages: Some(PageRef::Range { start: 10, end: 10 }),
            }],
            kb_source: category.needs_kb_source().then(|| "KB-X".to_string()),
        }
    }

    fn ws_of(issues: Vec<Issue>) -> Workspace {
        Workspace {
            raw_issues: issues.into_iter().map(Sourced::new).collect(),
            ..Workspace::default()
        }
    }

    #[test]
    fn no_duplicates_no_groups() {
        let ws = ws_of(vec![issue("I01", IssueCategory::Direct)]);
        assert!(detect_duplicates(&ws.raw_issues).is_empty());
    }

    #[test]
    fn normalized_labels_group_together() {
        let mut a = issue("I1", IssueCategory::Direct);
        a.desc = "first".into();
        let mut b = issue("I01", IssueCategory::Direct);
        b.desc = "second".into();
        let ws = ws_of(vec![a, b]);
        let groups = detect_duplicates(&ws.raw_issues);
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].members.len(), 2);
        let merged = merge_duplicates(&groups[0]).unwrap();
        assert_eq!(merged.desc, "first");
        assert_eq!(merged.label.verbatim(), "I1");
        assert_eq!(merged.evidence.len(), 2);
    }

    #[test]
    fn precedence_direct_over_indirect() {
        let a = issue("I02", IssueCategory::IndirectIncluded);
        let b = issue("I02", IssueCategory::Direct);
        let ws = ws_of(vec![a, b]);
        let groups = detect_duplicates(&ws.raw_issues);
        let merged = merge_duplicates(&groups[0]).unwrap();
        assert_eq!(merged.category, IssueCategory::Direct);
    }

    #[test]
    fn included_with_excluded_conflicts() {
        let a = issue("I02", IssueCategory::Direct);
        let b = issue("I02", IssueCategory::Excluded);
        let ws = ws_of(vec![a, b]);
        let groups = detect_duplicates(&ws.raw_issues);
        assert!(matches!(
            merge_duplicates(&groups[0]),
            Err(MergeError::CategoryConflict { .. })
        ));
        let (tree, diags) = merged_tree(&ws);
        assert_eq!(tree.len(), 1);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagCode::ECategoryConflict);
    }

    #[test]
    fn merge_count_arithmetic() {
        let rows = vec![
            issue("I01", IssueCategory::Direct),
            issue("I02", IssueCategory::Direct),
            issue("I02", IssueCategory::Direct),
            issue("I02", IssueCategory::Direct),
            issue("I03", IssueCategory::Direct),
            issue("I03", IssueCategory::Direct),
        ];
        let raw_count = rows.len();
        let ws = ws_of(rows);
        let groups = detect_duplicates(&ws.raw_issues);
        let collapsed: usize = groups.iter().map(|g| g.members.len() - 1).sum();
        let (tree, _) = merged_tree(&ws);
        assert_eq!(tree.len(), raw_count - collapsed);
    }

    #[test]
    fn u_issue_under_indirect_parent_is_clean() {
        let ws = ws_of(vec![
            issue("I11", IssueCategory::IndirectIncluded),
            issue("I11.3", IssueCategory::Unidentified),
        ]);
        let diags = validate_category_rules(&ws);
        assert!(diags.is_empty(), "{diags:?}");
    }

    #[test]
    fn u_issue_under_excluded_parent_flagged() {
        let ws = ws_of(vec![
            issue("I11", IssueCategory::Excluded),
            issue("I11.3", IssueCategory::Unidentified),
        ]);
        let diags = validate_category_rules(&ws);
        assert!(diags.iter().any(|d| d.code == DiagCode::EUParent));
    }

    #[test]
    fn k_child_of_known_parent_is_clean_but_direct_parent_flags() {
        let clean = ws_of(vec![
            issue("I15", IssueCategory::KnownUnmentioned),
            issue("I15.1", IssueCategory::KnownUnmentioned),
        ]);
        assert!(validate_category_rules(&clean).is_empty());

        let bad = ws_of(vec![
            issue("I15", IssueCategory::Direct),
            issue("I15.1", IssueCategory::KnownUnmentioned),
        ]);
        let diags = validate_category_rules(&bad);
        assert!(diags.iter().any(|d| d.code == DiagCode::EKChild));
    }

    #[test]
    fn missing_evidence_and_kb_source_flagged() {
        let mut d = issue("I01", IssueCategory::Direct);
        d.evidence.clear();
        let mut u = issue("I01.1", IssueCategory::Unidentified);
        u.kb_source = None;
        let ws = ws_of(vec![d, u]);
        let diags = validate_category_rules(&ws);
        assert!(diags.iter().any(|d| d.code == DiagCode::ENoEvidence));
        assert!(diags.iter().any(|d| d.code == DiagCode::EKbMissing));
    }

    #[test]
    fn scope_of_single_direct_issue() {
        let ws = ws_of(vec![issue("I01", IssueCategory::Direct)]);
        let scopes = compute_scopes(&ws).unwrap();
        assert_eq!(scopes.frp_issues.len(), 1);
        assert!(scopes.irp_only_issues.is_empty());
        assert_eq!(scopes.frp_leaves, scopes.frp_issues);
    }

    #[test]
    fn empty_workspace_has_no_scope() {
        assert_eq!(
            compute_scopes(&Workspace::default()),
            Err(ScopeError::ScopeUndefined)
        );
    }

    #[test]
    fn orphan_issue_flagged() {
        let ws = ws_of(vec![issue("I06.3", IssueCategory::Direct)]);
        let diags = validate_category_rules(&ws);
        assert!(diags.iter().any(|d| d.code == DiagCode::EOrphanIssue));
    }

    #[test]
    fn excluded_parent_children_severity_depends_on_their_category() {
        let warn = ws_of(vec![
            issue("I14", IssueCategory::Excluded),
            issue("I14.1", IssueCategory::Direct),
        ]);
        let diags = validate_category_rules(&warn);
        assert!(diags.iter().any(|d| d.code == DiagCode::WXChildren));

        let info = ws_of(vec![
            issue("I14", IssueCategory::Excluded),
            issue("I14.1", IssueCategory::Excluded),
        ]);
        let diags = validate_category_rules(&info);
        assert!(diags.iter().any(|d| d.code == DiagCode::IXChildren));
        assert!(diags.iter().all(|d| d.code != DiagCode::WXChildren));
    }

    #[test]
    fn similar_desc_reported_not_merged() {
        let mut a = issue("I01", IssueCategory::Direct);
        a.desc = "same words".into();
        let mut b = issue("I02", IssueCategory::Direct);
        b.desc = "same words".into();
        let ws = ws_of(vec![a, b]);
        let diags = validate_category_rules(&ws);
        assert!(diags.iter().any(|d| d.code == DiagCode::WSimilarDesc));
        let (tree, _) = merged_tree(&ws);
        assert_eq!(tree.len(), 2);
    }
}
