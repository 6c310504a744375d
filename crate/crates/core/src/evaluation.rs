//! Evaluation-method catalog, appropriateness ratings derived from the
//! prior-use distribution, and per-issue evaluation coverage.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::diag::{DiagCode, Diagnostic, Location};
use crate::label::Label;
use crate::model::ArtifactType;
use crate::scope;
use crate::workspace::Workspace;

/// Which of the two source catalogs lists a method ("H", "P", both, or
/// neither).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceTag {
    H,
    P,
    Both,
    None,
}

impl SourceTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceTag::H => "H",
            SourceTag::P => "P",
            SourceTag::Both => "H+P",
            SourceTag::None => "",
        }
    }
}

/// The closed catalog of evaluation methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EvaluationMethod {
    LogicalInformedArgument,
    IllustrativeScenario,
    AnalyticalStatic,
    TechnicalExperiment,
    ControlledExperiment,
    SimulationExperiment,
    TestingBlackBox,
    TestingWhiteBox,
    Prototype,
    SubjectBasedResearch,
    ExpertEvaluation,
    ActionResearch,
    CaseStudy,
    FieldStudy,
    StaticAnalysis,
    ArchitectureAnalysis,
    Optimization,
    DynamicAnalysis,
}

impl EvaluationMethod {
    pub const ALL: [EvaluationMethod; 18] = [
        EvaluationMethod::LogicalInformedArgument,
        EvaluationMethod::IllustrativeScenario,
        EvaluationMethod::AnalyticalStatic,
        EvaluationMethod::TechnicalExperiment,
        EvaluationMethod::ControlledExperiment,
        EvaluationMethod::SimulationExperiment,
        EvaluationMethod::TestingBlackBox,
        EvaluationMethod::TestingWhiteBox,
        EvaluationMethod::Prototype,
        EvaluationMethod::SubjectBasedResearch,
        EvaluationMethod::ExpertEvaluation,
        EvaluationMethod::ActionResearch,
        EvaluationMethod::CaseStudy,
        EvaluationMethod::FieldStudy,
        EvaluationMethod::StaticAnalysis,
        EvaluationMethod::ArchitectureAnalysis,
        EvaluationMethod::Optimization,
        EvaluationMethod::DynamicAnalysis,
    ];

    /// Accepted alias: the distribution table calls subject-based research
    /// a "subject-based experiment".
    pub const SUBJECT_BASED_ALIAS: &'static str = "subject_based_experiment";

    pub fn id(self) -> &'static str {
        match self {
            EvaluationMethod::LogicalInformedArgument => "logical_informed_argument",
            EvaluationMethod::IllustrativeScenario => "illustrative_scenario",
            EvaluationMethod::AnalyticalStatic => "analytical_static",
            EvaluationMethod::TechnicalExperiment => "technical_experiment",
            EvaluationMethod::ControlledExperiment => "controlled_experiment",
            EvaluationMethod::SimulationExperiment => "simulation_experiment",
            EvaluationMethod::TestingBlackBox => "testing_black_box",
            EvaluationMethod::TestingWhiteBox => "testing_white_box",
            EvaluationMethod::Prototype => "prototype",
            EvaluationMethod::SubjectBasedResearch => "subject_based_research",
            EvaluationMethod::ExpertEvaluation => "expert_evaluation",
            EvaluationMethod::ActionResearch => "action_research",
            EvaluationMethod::CaseStudy => "case_study",
            EvaluationMethod::FieldStudy => "field_study",
            EvaluationMethod::StaticAnalysis => "static_analysis",
            EvaluationMethod::ArchitectureAnalysis => "architecture_analysis",
            EvaluationMethod::Optimization => "optimization",
            EvaluationMethod::DynamicAnalysis => "dynamic_analysis",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let wanted = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        if wanted == Self::SUBJECT_BASED_ALIAS {
            return Some(EvaluationMethod::SubjectBasedResearch);
        }
        Self::ALL.into_iter().find(|m| m.id() == wanted)
    }

    pub fn display_name(self) -> &'static str {
        match self {
            EvaluationMethod::LogicalInformedArgument => "Logical Informed Argument",
            EvaluationMethod::IllustrativeScenario => "Illustrative Scenario",
            EvaluationMethod::AnalyticalStatic => "Analytical: Static",
            EvaluationMethod::TechnicalExperiment => "Technical Experiment",
            EvaluationMethod::ControlledExperiment => "Controlled Experiment",
            EvaluationMethod::SimulationExperiment => "Simulation Experiment",
            EvaluationMethod::TestingBlackBox => "Testing: Black Box",
            EvaluationMethod::TestingWhiteBox => "Testing: White Box",
            EvaluationMethod::Prototype => "Prototype",
            EvaluationMethod::SubjectBasedResearch => "Subject-based Research",
            EvaluationMethod::ExpertEvaluation => "Expert Evaluation",
            EvaluationMethod::ActionResearch => "Action Research",
            EvaluationMethod::CaseStudy => "Observational: Case Study",
            EvaluationMethod::FieldStudy => "Observational: Field Study",
            EvaluationMethod::StaticAnalysis => "Static Analysis",
            EvaluationMethod::ArchitectureAnalysis => "Architecture Analysis",
            EvaluationMethod::Optimization => "Optimization",
            EvaluationMethod::DynamicAnalysis => "Dynamic Analysis",
        }
    }

    pub fn source_tag(self) -> SourceTag {
        match self {
            EvaluationMethod::LogicalInformedArgument | EvaluationMethod::IllustrativeScenario => {
                SourceTag::Both
            }
            EvaluationMethod::TechnicalExperiment
            | EvaluationMethod::SubjectBasedResearch
            | EvaluationMethod::ExpertEvaluation
            | EvaluationMethod::ActionResearch => SourceTag::P,
            EvaluationMethod::Prototype => SourceTag::None,
            _ => SourceTag::H,
        }
    }
}

impl fmt::Display for EvaluationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

/// Artifact rows of the prior-use distribution table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DistributionRow {
    Algorithm,
    Construct,
    Framework,
    Instantiation,
    Method,
    Model,
}

impl DistributionRow {
    pub const ALL: [DistributionRow; 6] = [
        DistributionRow::Algorithm,
        DistributionRow::Construct,
        DistributionRow::Framework,
        DistributionRow::Instantiation,
        DistributionRow::Method,
        DistributionRow::Model,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistributionRow::Algorithm => "Algorithm",
            DistributionRow::Construct => "Construct",
            DistributionRow::Framework => "Framework",
            DistributionRow::Instantiation => "Instantiation",
            DistributionRow::Method => "Method",
            DistributionRow::Model => "Model",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let wanted = s.trim().to_ascii_lowercase();
        Self::ALL.into_iter().find(|r| r.name().to_ascii_lowercase() == wanted)
    }

    fn index(self) -> usize {
        Self::ALL.iter().position(|r| *r == self).unwrap()
    }
}

/// Methods that appear as columns in the distribution table, in column order.
pub const DISTRIBUTION_COLUMNS: [EvaluationMethod; 8] = [
    EvaluationMethod::LogicalInformedArgument,
    EvaluationMethod::ExpertEvaluation,
    EvaluationMethod::TechnicalExperiment,
    EvaluationMethod::SubjectBasedResearch,
    EvaluationMethod::Prototype,
    EvaluationMethod::ActionResearch,
    EvaluationMethod::CaseStudy,
    EvaluationMethod::IllustrativeScenario,
];

/// Prior-use counts across all surveyed journals, row x column. Cells are
/// stored verbatim and never re-totaled.
const DISTRIBUTION_COUNTS: [[u32; 8]; 6] = [
    // LIA  EE  TE SBR  Pr  AR  CS  IS
    [1, 0, 60, 1, 0, 0, 0, 3],  // Algorithm
    [3, 0, 3, 2, 2, 0, 0, 2],   // Construct
    [1, 1, 0, 0, 1, 0, 1, 4],   // Framework
    [0, 0, 5, 1, 1, 0, 0, 1],   // Instantiation
    [2, 0, 14, 4, 0, 0, 7, 6],  // Method
    [3, 0, 10, 0, 2, 2, 0, 4],  // Model
];

/// Count of prior uses for a method on a distribution row, or `None` when
/// the method is not a column of the distribution at all.
pub fn distribution_count(method: EvaluationMethod, row: DistributionRow) -> Option<u32> {
    let col = DISTRIBUTION_COLUMNS.iter().position(|m| *m == method)?;
    Some(DISTRIBUTION_COUNTS[row.index()][col])
}

/// Appropriateness of a method for an artifact type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rating {
    Unknown,
    Low,
    Medium,
    High,
}

impl Rating {
    pub fn name(self) -> &'static str {
        match self {
            Rating::Unknown => "Unknown",
            Rating::Low => "Low",
            Rating::Medium => "Medium",
            Rating::High => "High",
        }
    }
}

impl fmt::Display for Rating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

enum OverrideKind {
    Exactly,
    AtLeast,
}

struct Override {
    method: EvaluationMethod,
    artifact: ArtifactType,
    kind: OverrideKind,
    rating: Rating,
    basis: &'static str,
}

/// Judgment-based corrections that win over the raw counts.
const OVERRIDES: [Override; 2] = [
    Override {
        method: EvaluationMethod::ExpertEvaluation,
        artifact: ArtifactType::Algorithm,
        kind: OverrideKind::Exactly,
        rating: Rating::Low,
        basis: "expert judgment alone is not persuasive evidence of algorithmic performance",
    },
    Override {
        method: EvaluationMethod::ExpertEvaluation,
        artifact: ArtifactType::Framework,
        kind: OverrideKind::AtLeast,
        rating: Rating::Medium,
        basis: "expert assessment is an accepted fit for framework artifacts",
    },
];

/// Tunable settings for the appropriateness lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    /// Prior-use count at or above which a pairing rates High.
    pub high_threshold: u32,
    /// Which distribution row stands in for each artifact type.
    pub row_map: BTreeMap<ArtifactType, DistributionRow>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        let mut row_map = BTreeMap::new();
        row_map.insert(ArtifactType::Algorithm, DistributionRow::Algorithm);
        row_map.insert(ArtifactType::Construct, DistributionRow::Construct);
        row_map.insert(ArtifactType::Framework, DistributionRow::Framework);
        row_map.insert(ArtifactType::Instantiation, DistributionRow::Instantiation);
        row_map.insert(ArtifactType::Method, DistributionRow::Method);
        row_map.insert(ArtifactType::Model, DistributionRow::Model);
        row_map.insert(ArtifactType::Architecture, DistributionRow::Framework);
        row_map.insert(ArtifactType::DesignPrinciples, DistributionRow::Framework);
        row_map.insert(ArtifactType::DesignTheory, DistributionRow::Model);
        EvalConfig {
            high_threshold: 5,
            row_map,
        }
    }
}

/// A rating plus the reasoning behind it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Appropriateness {
    pub rating: Rating,
    pub basis: String,
}

/// Rate how appropriate `method` is for evaluating an artifact of type `at`.
pub fn appropriateness(
    method: EvaluationMethod,
    at: ArtifactType,
    config: &EvalConfig,
) -> Appropriateness {
    let row = config
        .row_map
        .get(&at)
        .copied()
        .unwrap_or_else(|| EvalConfig::default().row_map[&at]);

    let (mut rating, mut basis) = match distribution_count(method, row) {
        None => (
            Rating::Unknown,
            format!(
                "{} does not appear in the prior-use distribution",
                method.display_name()
            ),
        ),
        Some(count) if count >= config.high_threshold => (
            Rating::High,
            format!(
                "{} prior uses recorded for {} artifacts",
                count,
                row.name()
            ),
        ),
        Some(count) if count >= 1 => (
            Rating::Medium,
            format!("{} prior use(s) recorded for {} artifacts", count, row.name()),
        ),
        Some(_) => {
            let used_elsewhere = DistributionRow::ALL
                .iter()
                .any(|r| distribution_count(method, *r).unwrap_or(0) > 0);
            if used_elsewhere {
                (
                    Rating::Low,
                    format!(
                        "no prior use recorded for {} artifacts; the method appears only for other artifact types",
                        row.name()
                    ),
                )
            } else {
                (
                    Rating::Unknown,
                    "no prior use recorded for any artifact type".to_string(),
                )
            }
        }
    };

    for ov in &OVERRIDES {
        if ov.method != method || ov.artifact != at {
            continue;
        }
        match ov.kind {
            OverrideKind::Exactly => {
                rating = ov.rating;
                basis = format!("{}; override: {}", basis, ov.basis);
            }
            OverrideKind::AtLeast => {
                if rating < ov.rating {
                    rating = ov.rating;
                }
                basis = format!("{}; override floor: {}", basis, ov.basis);
            }
        }
    }

    Appropriateness { rating, basis }
}

/// The reviewer's verdict on whether a method was a fit choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SelectionAssessment {
    Appropriate,
    Questionable,
    Inappropriate,
}

impl SelectionAssessment {
    pub fn id(self) -> &'static str {
        match self {
            SelectionAssessment::Appropriate => "appropriate",
            SelectionAssessment::Questionable => "questionable",
            SelectionAssessment::Inappropriate => "inappropriate",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "appropriate" => Some(SelectionAssessment::Appropriate),
            "questionable" => Some(SelectionAssessment::Questionable),
            "inappropriate" => Some(SelectionAssessment::Inappropriate),
            _ => None,
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            SelectionAssessment::Appropriate => "Appropriate",
            SelectionAssessment::Questionable => "Questionable",
            SelectionAssessment::Inappropriate => "Inappropriate",
        }
    }
}

/// The reviewer's verdict on how well a method was applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ApplicationAssessment {
    Good,
    Moderate,
    Poor,
}

impl ApplicationAssessment {
    pub fn id(self) -> &'static str {
        match self {
            ApplicationAssessment::Good => "good",
            ApplicationAssessment::Moderate => "moderate",
            ApplicationAssessment::Poor => "poor",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "good" => Some(ApplicationAssessment::Good),
            "moderate" => Some(ApplicationAssessment::Moderate),
            "poor" => Some(ApplicationAssessment::Poor),
            _ => None,
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ApplicationAssessment::Good => "Good",
            ApplicationAssessment::Moderate => "Moderate",
            ApplicationAssessment::Poor => "Poor",
        }
    }
}

/// One evaluation method the authors applied to one SAG, with the
/// reviewer's assessment of the selection and its application.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRecord {
    pub sag: Label,
    pub method: EvaluationMethod,
    pub selection: SelectionAssessment,
    pub selection_rationale: String,
    pub application: ApplicationAssessment,
    pub application_rationale: String,
    pub notes: Option<String>,
}

/// Whether a leaf-level issue was adequately evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoverageStatus {
    Adequate,
    Partly,
    No,
    Unassessed,
}

impl CoverageStatus {
    pub fn id(self) -> &'static str {
        match self {
            CoverageStatus::Adequate => "adequate",
            CoverageStatus::Partly => "partly",
            CoverageStatus::No => "no",
            CoverageStatus::Unassessed => "unassessed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "adequate" => Some(CoverageStatus::Adequate),
            "partly" => Some(CoverageStatus::Partly),
            "no" => Some(CoverageStatus::No),
            "unassessed" => Some(CoverageStatus::Unassessed),
            _ => None,
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            CoverageStatus::Adequate => "Adequate",
            CoverageStatus::Partly => "Partly",
            CoverageStatus::No => "No",
            CoverageStatus::Unassessed => "Unassessed",
        }
    }
}

/// The reviewer's record of how one leaf-level issue fared in the authors'
/// evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageEntry {
    pub issue: Label,
    pub status: CoverageStatus,
    /// Free text qualifying the status ("Expert evaluation; ...").
    pub status_note: String,
    pub result: String,
}

/// One output row of [`evaluation_coverage`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRow {
    pub issue: Label,
    pub status: CoverageStatus,
    pub status_note: String,
    pub result: String,
}

/// One row per leaf FRP issue, in label order; leaves without a coverage
/// entry report as Unassessed.
pub fn evaluation_coverage(ws: &Workspace) -> Vec<CoverageRow> {
    let (tree, _) = scope::merged_tree(ws);
    let by_issue: BTreeMap<Label, &CoverageEntry> = ws
        .coverage
        .iter()
        .map(|c| (c.issue.clone(), &c.value))
        .collect();
    tree.leaf_labels(|i| i.category.in_frp())
        .into_iter()
        .map(|leaf| match by_issue.get(&leaf) {
            Some(entry) => CoverageRow {
                issue: leaf,
                status: entry.status,
                status_note: entry.status_note.clone(),
                result: entry.result.clone(),
            },
            None => CoverageRow {
                issue: leaf,
                status: CoverageStatus::Unassessed,
                status_note: String::new(),
                result: String::new(),
            },
        })
        .collect()
}

/// SAGs the authors never evaluated plus issues that remain weakly covered.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageGaps {
    pub unevaluated_sags: BTreeSet<Label>,
    pub weak_issues: BTreeSet<Label>,
}

pub fn coverage_gaps(ws: &Workspace) -> CoverageGaps {
    let evaluated: BTreeSet<Label> = ws.evals.iter().map(|e| e.sag.clone()).collect();
    let unevaluated_sags = ws
        .sags
        .iter()
        .map(|s| s.label.clone())
        .filter(|l| !evaluated.contains(l))
        .collect();
    let weak_issues = evaluation_coverage(ws)
        .into_iter()
        .filter(|row| matches!(row.status, CoverageStatus::No | CoverageStatus::Unassessed))
        .map(|row| row.issue)
        .collect();
    CoverageGaps {
        unevaluated_sags,
        weak_issues,
    }
}

/// Dangling-reference checks for evaluation and coverage records.
pub fn validate_eval_refs(ws: &Workspace) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let sags: BTreeSet<Label> = ws.sags.iter().map(|s| s.label.clone()).collect();
    for eval in &ws.evals {
        if !sags.contains(&eval.sag) {
            diags.push(Diagnostic::new(
                DiagCode::EDanglingEval,
                Location::new(format!("eval {}", eval.sag), eval.line),
                format!("evaluation record references unknown SAG {}", eval.sag),
            ));
        }
    }
    let (tree, _) = scope::merged_tree(ws);
    let leaves = tree.leaf_labels(|i| i.category.in_frp());
    for entry in &ws.coverage {
        let loc = Location::new(format!("coverage {}", entry.issue), entry.line);
        if !tree.contains(&entry.issue) {
            diags.push(Diagnostic::new(
                DiagCode::EDanglingCoverage,
                loc,
                format!("coverage entry references unknown issue {}", entry.issue),
            ));
        } else if !leaves.contains(&entry.issue) {
            diags.push(Diagnostic::new(
                DiagCode::WCoverageNotLeaf,
                loc,
                format!("{} is not a leaf-level FRP issue", entry.issue),
            ));
        }
    }
    diags
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn technical_experiment_on_algorithm_rates_high() {
        let a = appropriateness(
            EvaluationMethod::TechnicalExperiment,
            ArtifactType::Algorithm,
            &EvalConfig::default(),
        );
        assert_eq!(a.rating, Rating::High);
        assert!(a.basis.contains("60"), "{}", a.basis);
    }

    #[test]
    fn expert_evaluation_on_algorithm_is_overridden_low() {
        let a = appropriateness(
            EvaluationMethod::ExpertEvaluation,
            ArtifactType::Algorithm,
            &EvalConfig::default(),
        );
        assert_eq!(a.rating, Rating::Low);
        assert!(a.basis.contains("override"), "{}", a.basis);
    }

    #[test]
    fn expert_evaluation_on_framework_is_medium_with_floor() {
        let a = appropriateness(
            EvaluationMethod::ExpertEvaluation,
            ArtifactType::Framework,
            &EvalConfig::default(),
        );
        assert_eq!(a.rating, Rating::Medium);
        assert!(a.basis.contains("1 prior use"), "{}", a.basis);
        assert!(a.basis.contains("override floor"), "{}", a.basis);
    }

    #[test]
    fn dynamic_analysis_on_model_is_unknown() {
        let a = appropriateness(
            EvaluationMethod::DynamicAnalysis,
            ArtifactType::Model,
            &EvalConfig::default(),
        );
        assert_eq!(a.rating, Rating::Unknown);
    }

    #[test]
    fn architecture_maps_to_framework_row() {
        let a = appropriateness(
            EvaluationMethod::IllustrativeScenario,
            ArtifactType::Architecture,
            &EvalConfig::default(),
        );
        assert_eq!(a.rating, Rating::Medium);
        assert!(a.basis.contains("Framework"), "{}", a.basis);
    }

    #[test]
    fn appropriateness_is_total_and_deterministic() {
        let cfg = EvalConfig::default();
        for method in EvaluationMethod::ALL {
            for at in ArtifactType::ALL {
                let first = appropriateness(method, at, &cfg);
                let second = appropriateness(method, at, &cfg);
                assert_eq!(first, second);
            }
        }
    }

    #[test]
    fn alias_parses_to_subject_based_research() {
        assert_eq!(
            EvaluationMethod::parse("subject_based_experiment"),
            Some(EvaluationMethod::SubjectBasedResearch)
        );
        assert_eq!(
            EvaluationMethod::parse("Subject-based Research"),
            Some(EvaluationMethod::SubjectBasedResearch)
        );
    }

    #[test]
    fn distribution_column_totals_match_source() {
        let totals: Vec<u32> = (0..8)
            .map(|c| (0..6).map(|r| DISTRIBUTION_COUNTS[r][c]).sum())
            .collect();
        assert_eq!(totals, vec![10, 1, 92, 8, 6, 2, 8, 20]);
    }

    #[test]
    fn prototype_has_blank_source_tag() {
        assert_eq!(EvaluationMethod::Prototype.source_tag(), SourceTag::None);
        assert_eq!(SourceTag::None.as_str(), "");
    }
}
