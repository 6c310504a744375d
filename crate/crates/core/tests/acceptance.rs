//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (run with `--nocapture` to see them).
//!
//! The expected scope numbers come from an independent oracle: a hand-typed
//! (label, category) enumeration of the example review's issue table,
//! reduced by brute force, never by the engine under test.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use dsrev_core::diag::Severity;
use dsrev_core::evaluation::{self, CoverageStatus, EvaluationMethod, Rating};
use dsrev_core::kb::{self, KbSource, KnowledgeBase};
use dsrev_core::label::Label;
use dsrev_core::model::{ArtifactType, IssueCategory};
use dsrev_core::solution::{self, Confidence};
use dsrev_core::workflow::{self, StepStatus};
use dsrev_core::workspace::Workspace;
use dsrev_core::{format, scope, DiagCode, EvalConfig};

const FIXTURE: &str = include_str!("../fixtures/review.dsrw");

/// Independent enumeration of the example review's issues: every
/// (label, category) row after duplicate removal.
const ISSUE_ORACLE: &[(&str, char)] = &[
    ("I01", 'D'),
    ("I01.1", 'D'),
    ("I01.2", 'I'),
    ("I01.3", 'I'),
    ("I01.4", 'D'),
    ("I01.5", 'D'),
    ("I02", 'D'),
    ("I03", 'D'),
    ("I04", 'D'),
    ("I05", 'I'),
    ("I06", 'D'),
    ("I06.1", 'D'),
    ("I06.2", 'D'),
    ("I06.3", 'D'),
    ("I06.4", 'D'),
    ("I06.5", 'D'),
    ("I07", 'I'),
    ("I08", 'I'),
    ("I09", 'I'),
    ("I10", 'D'),
    ("I11", 'I'),
    ("I11.1", 'I'),
    ("I11.2", 'I'),
    ("I11.3", 'U'),
    ("I12", 'I'),
    ("I12.1", 'I'),
    ("I12.2", 'I'),
    ("I12.3", 'I'),
    ("I12.4", 'I'),
    ("I13", 'I'),
    ("I13.1", 'I'),
    ("I13.2", 'I'),
    ("I13.3", 'U'),
    ("I13.4", 'I'),
    ("I14", 'X'),
    ("I15", 'K'),
    ("I15.1", 'K'),
    ("I15.2", 'K'),
    ("I15.3", 'K'),
    ("I15.4", 'K'),
    ("I15.5", 'K'),
];

fn oracle_parent(label: &str) -> Option<&str> {
    label.rfind('.').map(|cut| &label[..cut])
}

fn oracle_frp() -> BTreeSet<&'static str> {
    ISSUE_ORACLE
        .iter()
        .filter(|(_, c)| matches!(c, 'D' | 'I' | 'U'))
        .map(|(l, _)| *l)
        .collect()
}

fn oracle_irp_only() -> BTreeSet<&'static str> {
    ISSUE_ORACLE
        .iter()
        .filter(|(_, c)| matches!(c, 'X' | 'K'))
        .map(|(l, _)| *l)
        .collect()
}

fn oracle_frp_leaves() -> BTreeSet<&'static str> {
    let parents: BTreeSet<&str> = ISSUE_ORACLE
        .iter()
        .filter_map(|(l, _)| oracle_parent(l))
        .collect();
    oracle_frp()
        .into_iter()
        .filter(|l| !parents.contains(l))
        .collect()
}

fn load_fixture() -> Workspace {
    let (ws, diags) = format::load_workspace_str(FIXTURE);
    let errors: Vec<_> = diags
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .collect();
    assert!(errors.is_empty(), "fixture load errors: {errors:?}");
    ws
}

fn labels(set: &BTreeSet<Label>) -> BTreeSet<String> {
    set.iter().map(|l| l.normalized()).collect()
}

fn normalize_names(set: &BTreeSet<&str>) -> BTreeSet<String> {
    set.iter()
        .map(|l| Label::parse(l).unwrap().normalized())
        .collect()
}

#[test]
fn acceptance_1_golden_fixture_fidelity() {
    let started = Instant::now();

    let (ws, diags) = format::load_workspace_str(FIXTURE);
    assert!(
        diags.iter().all(|d| d.severity != Severity::Error),
        "fixture must load with zero Error diagnostics: {diags:?}"
    );
    assert!(diags.is_empty(), "fixture is expected pristine: {diags:?}");

    let groups = scope::detect_duplicates(&ws.raw_issues);
    assert_eq!(groups.len(), 1, "exactly one duplicate group");
    assert_eq!(groups[0].label.normalized(), "I3");
    assert_eq!(groups[0].members.len(), 2);

    let (tree, merge_diags) = scope::merged_tree(&ws);
    assert!(merge_diags.is_empty());
    assert_eq!(tree.len(), 41, "post-merge issue count");
    assert_eq!(tree.len(), ISSUE_ORACLE.len());

    let scopes = scope::compute_scopes(&ws).unwrap();
    assert_eq!(scopes.frp_issues.len(), 34, "FRP node count");
    assert_eq!(scopes.frp_leaves.len(), 29, "FRP leaf count");
    assert_eq!(labels(&scopes.frp_issues), normalize_names(&oracle_frp()));
    assert_eq!(labels(&scopes.frp_leaves), normalize_names(&oracle_frp_leaves()));

    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "fixture analysis took {elapsed:?}, must stay under 1 s"
    );
    println!("ACCEPTANCE 1 golden fixture fidelity: PASS ({elapsed:?})");
}

#[test]
fn acceptance_2_scope_algebra() {
    let ws = load_fixture();
    let scopes = scope::compute_scopes(&ws).unwrap();
    assert_eq!(
        labels(&scopes.irp_only_issues),
        normalize_names(&oracle_irp_only()),
        "IRP-only set must be exactly I14 plus the I15 family"
    );
    assert_eq!(scopes.assumptions.len(), 2, "A01 and A02 attach to the FRP");
    assert!(scopes.limitations.is_empty(), "no limitations were expressed");
    assert!(ws.no_limitations.is_some(), "the empty section is explicit");

    // Partition, monotonicity, determinism over generated workspaces.
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        ..Config::default()
    });
    runner
        .run(
            &(common::arb_issue_labels(), any::<u64>()),
            |(labels_in, seed)| {
                let ws = common::build_workspace(&labels_in, seed);
                let (tree, _) = scope::merged_tree(&ws);
                match scope::compute_scopes(&ws) {
                    Err(_) => prop_assert!(tree.is_empty()),
                    Ok(scopes) => {
                        // Partition of the merged tree.
                        prop_assert!(scopes.frp_issues.is_disjoint(&scopes.irp_only_issues));
                        let union: BTreeSet<Label> = scopes
                            .frp_issues
                            .union(&scopes.irp_only_issues)
                            .cloned()
                            .collect();
                        let all: BTreeSet<Label> = tree.labels().cloned().collect();
                        prop_assert_eq!(&union, &all);
                        prop_assert!(scopes.frp_leaves.is_subset(&scopes.frp_issues));

                        // Determinism.
                        let again = scope::compute_scopes(&ws).unwrap();
                        prop_assert_eq!(&scopes.frp_issues, &again.frp_issues);
                        prop_assert_eq!(&scopes.irp_only_issues, &again.irp_only_issues);
                        prop_assert_eq!(&scopes.frp_leaves, &again.frp_leaves);

                        // Monotonicity: a fresh D/I/U issue only grows the
                        // FRP; a fresh X/K issue never changes it.
                        let mut rng = common::Rng::new(seed ^ 0xabcdef);
                        let category = [
                            IssueCategory::Direct,
                            IssueCategory::IndirectIncluded,
                            IssueCategory::Unidentified,
                            IssueCategory::Excluded,
                            IssueCategory::KnownUnmentioned,
                        ][rng.below(5)];
                        let mut grown = ws.clone();
                        grown.raw_issues.push(
                            common::build_issue("I99", category, &mut rng).into(),
                        );
                        let grown_scopes = scope::compute_scopes(&grown).unwrap();
                        if category.in_frp() {
                            prop_assert!(
                                scopes.frp_issues.is_subset(&grown_scopes.frp_issues)
                            );
                        } else {
                            prop_assert_eq!(&scopes.frp_issues, &grown_scopes.frp_issues);
                        }
                    }
                }
                Ok(())
            },
        )
        .unwrap();
    println!("ACCEPTANCE 2 scope algebra: PASS (1000 generated workspaces)");
}

#[test]
fn acceptance_3_category_rules() {
    let ws = load_fixture();
    let clean = scope::validate_category_rules(&ws);
    assert!(
        clean.iter().all(|d| d.severity != Severity::Error),
        "fixture category validation must be error-free: {clean:?}"
    );

    let has = |diags: &[dsrev_core::Diagnostic], code: DiagCode| {
        diags.iter().any(|d| d.code == code)
    };
    let find = |label: &str, ws: &Workspace| -> usize {
        ws.raw_issues
            .iter()
            .position(|i| i.label.verbatim() == label)
            .unwrap()
    };

    // E-U-PARENT: make I11.3's parent an excluded issue.
    let mut mutated = ws.clone();
    let at = find("I11", &mutated);
    mutated.raw_issues[at].value.category = IssueCategory::Excluded;
    assert!(has(&scope::validate_category_rules(&mutated), DiagCode::EUParent));

    // E-K-CHILD: make I15 direct so its K children violate the rule.
    let mut mutated = ws.clone();
    let at = find("I15", &mutated);
    mutated.raw_issues[at].value.category = IssueCategory::Direct;
    assert!(has(&scope::validate_category_rules(&mutated), DiagCode::EKChild));

    // E-NO-EVIDENCE: strip I01's page citation.
    let mut mutated = ws.clone();
    let at = find("I01", &mutated);
    mutated.raw_issues[at].value.evidence[0].pages = None;
    assert!(has(&scope::validate_category_rules(&mutated), DiagCode::ENoEvidence));

    // E-KB-MISSING: drop I11.3's source.
    let mut mutated = ws.clone();
    let at = find("I11.3", &mutated);
    mutated.raw_issues[at].value.kb_source = None;
    assert!(has(&scope::validate_category_rules(&mutated), DiagCode::EKbMissing));

    // E-CATEGORY-CONFLICT: a second I03 row recorded as excluded.
    let mut mutated = ws.clone();
    let at = find("I03", &mutated);
    let mut conflicting = mutated.raw_issues[at].value.clone();
    conflicting.category = IssueCategory::Excluded;
    mutated.raw_issues.push(conflicting.into());
    assert!(has(
        &scope::validate_category_rules(&mutated),
        DiagCode::ECategoryConflict
    ));

    println!("ACCEPTANCE 3 category rules: PASS");
}

#[test]
fn acceptance_4_traceability() {
    let ws = load_fixture();

    let matrix = solution::trace_matrix(&ws);
    let row = Label::parse("I01.1").unwrap();
    let links = matrix.row_links(&row);
    let shown: Vec<(String, Confidence)> = links
        .iter()
        .map(|(l, c)| (l.normalized(), *c))
        .collect();
    assert_eq!(
        shown,
        vec![
            ("SAG2.SC2.1".to_string(), Confidence::Stated),
            ("SAG2.SC2.2".to_string(), Confidence::Stated),
        ],
        "row I01.1 must map to SAG2.SC2.01 and SAG2.SC2.02, stated"
    );

    let row = Label::parse("I01.2").unwrap();
    let links = matrix.row_links(&row);
    assert!(!links.is_empty());
    assert!(
        links.iter().all(|(_, c)| *c == Confidence::Unclear),
        "row I01.2 carries Unclear confidence"
    );

    let diags = solution::validate_solution_graph(&ws);
    assert!(
        diags.iter().all(|d| d.code != DiagCode::EUtilizesCycle),
        "fixture utilizes chain is acyclic"
    );
    let order = solution::utilizes_topo_order(&ws).expect("acyclic");
    assert_eq!(
        order.iter().map(|l| l.verbatim()).collect::<Vec<_>>(),
        ["SAG1", "SAG2", "SAG3"]
    );

    let mut mutated = ws.clone();
    let sag1 = mutated
        .sags
        .iter()
        .position(|s| s.label.verbatim() == "SAG1")
        .unwrap();
    mutated.sags[sag1]
        .value
        .utilizes
        .push(Label::parse("SAG3").unwrap());
    let diags = solution::validate_solution_graph(&mutated);
    let cycle: Vec<_> = diags
        .iter()
        .filter(|d| d.code == DiagCode::EUtilizesCycle)
        .collect();
    assert_eq!(cycle.len(), 1, "injected back-edge yields the cycle");
    for name in ["SAG1", "SAG2", "SAG3"] {
        assert!(cycle[0].message.contains(name), "{}", cycle[0].message);
    }

    // Leaves minus the traced rows, against the oracle enumeration.
    let traced: BTreeSet<&str> = [
        "I01.1", "I01.2", "I01.3", "I01.4", "I01.5", "I02", "I03", "I04",
    ]
    .into_iter()
    .collect();
    let expected: BTreeSet<String> = oracle_frp_leaves()
        .into_iter()
        .filter(|l| !traced.contains(l))
        .map(|l| Label::parse(l).unwrap().normalized())
        .collect();
    let unaddressed: BTreeSet<String> = solution::unaddressed_issues(&ws)
        .iter()
        .map(|l| l.normalized())
        .collect();
    assert_eq!(unaddressed, expected);
    assert_eq!(unaddressed.len(), 21);

    println!("ACCEPTANCE 4 traceability: PASS");
}

#[test]
fn acceptance_5_evaluation_engine() {
    let config = EvalConfig::default();
    let high = evaluation::appropriateness(
        EvaluationMethod::TechnicalExperiment,
        ArtifactType::Algorithm,
        &config,
    );
    assert_eq!(high.rating, Rating::High);
    assert!(high.basis.contains("60"), "{}", high.basis);

    let low = evaluation::appropriateness(
        EvaluationMethod::ExpertEvaluation,
        ArtifactType::Algorithm,
        &config,
    );
    assert_eq!(low.rating, Rating::Low);

    let ws = load_fixture();
    let coverage = evaluation::evaluation_coverage(&ws);
    let expected = [
        ("I01.1", CoverageStatus::Partly),
        ("I01.2", CoverageStatus::No),
        ("I01.3", CoverageStatus::No),
        ("I01.4", CoverageStatus::Partly),
        ("I01.5", CoverageStatus::No),
        ("I02", CoverageStatus::Partly),
        ("I03", CoverageStatus::Partly),
        ("I04", CoverageStatus::Partly),
        ("I05", CoverageStatus::Partly),
        ("I13.1", CoverageStatus::Partly),
        ("I13.2", CoverageStatus::Partly),
        ("I13.4", CoverageStatus::Partly),
    ];
    for (label, status) in expected {
        let wanted = Label::parse(label).unwrap();
        let row = coverage
            .iter()
            .find(|r| r.issue == wanted)
            .unwrap_or_else(|| panic!("coverage row for {label}"));
        assert_eq!(row.status, status, "status for {label}");
    }
    assert_eq!(coverage.len(), 29, "one row per FRP leaf");
    let row = |label: &str| {
        let wanted = Label::parse(label).unwrap();
        coverage.iter().find(|r| r.issue == wanted).unwrap().clone()
    };
    assert!(row("I01.1").result.contains("Very Good to Excellent"));
    assert_eq!(row("I01.2").result, "Not Applicable (N/A)");
    assert_eq!(row("I01.3").result, "N/A");

    let gaps = evaluation::coverage_gaps(&ws);
    assert_eq!(
        gaps.unevaluated_sags
            .iter()
            .map(|l| l.verbatim())
            .collect::<Vec<_>>(),
        ["SAG1"],
        "only the conceptual model went unevaluated"
    );
    for weak in ["I01.2", "I01.3", "I01.5"] {
        assert!(
            gaps.weak_issues.contains(&Label::parse(weak).unwrap()),
            "{weak} is weakly covered"
        );
    }

    println!("ACCEPTANCE 5 evaluation engine: PASS");
}

#[test]
fn acceptance_6_workflow_gates() {
    let ws = load_fixture();
    let progress = workflow::review_progress(&ws, false);
    assert_eq!(progress.gates.len(), 13);
    for gate in &progress.gates {
        assert_eq!(
            gate.status,
            StepStatus::Complete,
            "step {} should be complete, missing: {:?}",
            gate.step,
            gate.missing
        );
    }
    assert_eq!(progress.first_incomplete, None);

    // Wipe out all evaluation work: records and acknowledgments.
    let mut mutated = ws.clone();
    mutated.evals.clear();
    for sag in &mut mutated.sags {
        sag.value.evaluation_ack = None;
    }
    let progress = workflow::review_progress(&mutated, false);
    for gate in &progress.gates {
        if gate.step == 10 {
            assert_eq!(gate.status, StepStatus::Incomplete);
            for sag in ["SAG1", "SAG2", "SAG3"] {
                assert!(
                    gate.missing.iter().any(|m| m.contains(sag)),
                    "step 10 must name {sag}: {:?}",
                    gate.missing
                );
            }
        } else {
            assert_eq!(
                gate.status,
                StepStatus::Complete,
                "only step 10 flips; step {} changed",
                gate.step
            );
        }
    }
    assert_eq!(progress.first_incomplete, Some(10));

    let progress = workflow::review_progress(&Workspace::default(), false);
    let first = progress.first_incomplete.expect("empty workspace incomplete");
    assert!(first <= 1, "empty workspace starts at step 0 or 1, got {first}");

    println!("ACCEPTANCE 6 workflow gates: PASS");
}

#[test]
fn acceptance_7_format_round_trip() {
    let ws = load_fixture();
    let canonical = format::save_canonical(&ws);
    assert_eq!(
        canonical, FIXTURE,
        "the shipped fixture is in canonical form"
    );
    let (reloaded, diags) = format::load_workspace_str(&canonical);
    assert!(diags.is_empty());
    assert_eq!(format::save_canonical(&reloaded), canonical);

    let mut runner = TestRunner::new(Config {
        cases: 500,
        ..Config::default()
    });
    runner
        .run(
            &(common::arb_issue_labels(), any::<u64>()),
            |(labels_in, seed)| {
                let ws = common::build_workspace(&labels_in, seed);
                let first = format::save_canonical(&ws);
                let (reloaded, diags) = format::load_workspace_str(&first);
                prop_assert!(
                    diags.iter().all(|d| d.severity != Severity::Error),
                    "generated workspaces reload without errors: {:?}",
                    diags
                );
                let second = format::save_canonical(&reloaded);
                prop_assert_eq!(&first, &second, "save-load-save is byte-idempotent");

                // Canonical bytes ignore input record order.
                let shuffled = common::shuffle_blocks(&first, seed ^ 0x5eed);
                let (from_shuffled, _) = format::load_workspace_str(&shuffled);
                prop_assert_eq!(
                    &format::save_canonical(&from_shuffled),
                    &first,
                    "record shuffling never changes canonical output"
                );
                Ok(())
            },
        )
        .unwrap();
    println!("ACCEPTANCE 7 format round-trip: PASS (fixture + 500 generated workspaces)");
}

#[test]
fn acceptance_8_kb_loop() {
    let ws = load_fixture();
    let mut kb = KnowledgeBase::default();
    for (id, name) in [
        ("KB-KM", "Knowledge Management"),
        ("KB-UA", "User Acceptance"),
        ("KB-Sc", "IS Security"),
    ] {
        kb.sources.insert(
            id.to_string(),
            KbSource {
                name: name.to_string(),
                desc: String::new(),
            },
        );
    }

    let (merged, _) = kb::kb_merge_from_workspace(&kb, &ws).unwrap();
    let (twice, _) = kb::kb_merge_from_workspace(&merged, &ws).unwrap();
    assert_eq!(merged, twice, "double merge is idempotent");

    // Each knowledge area from the review lands in the base; the
    // user-satisfaction pattern travels with its definition text.
    for area in dsrev_core::workspace::KnowledgeArea::ALL {
        assert!(
            merged.entries.iter().any(|e| e.area == area),
            "entry under {area:?}"
        );
    }
    let satisfaction = merged
        .issue_patterns
        .iter()
        .find(|p| p.desc == "User Satisfaction")
        .expect("harvested pattern");
    assert_eq!(satisfaction.source, "KB-UA");
    assert!(satisfaction
        .definition
        .contains("meets their information requirements"));

    let mut trimmed = ws.clone();
    trimmed
        .raw_issues
        .retain(|i| i.label.root().normalized() != "I15");
    trimmed.traces.retain(|t| t.issue.root().normalized() != "I15");
    trimmed
        .unaddressed
        .retain(|a| a.issue.root().normalized() != "I15");
    trimmed
        .coverage
        .retain(|c| c.issue.root().normalized() != "I15");

    let suggestions = kb::suggest_k_issues(&merged, &trimmed);
    let got: BTreeSet<(String, String)> = suggestions
        .iter()
        .map(|s| (s.pattern.source.clone(), s.pattern.desc.clone()))
        .collect();
    let want: BTreeSet<(String, String)> = [
        "Currency",
        "Credibility",
        "Transactional Availability",
        "Volatility",
        "Scalability & Flexibility",
    ]
    .into_iter()
    .map(|desc| ("KB-KM".to_string(), desc.to_string()))
    .collect();
    assert_eq!(got, want, "exactly the five knowledge-management patterns");

    println!("ACCEPTANCE 8 kb loop: PASS");
}
