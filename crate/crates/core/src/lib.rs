//! Core engine for dsrev: a machine-checkable workspace for structured
//! reviews of design-science research papers.
//!
//! The library is organized around one [`workspace::Workspace`] snapshot:
//!
//! - [`label`] / [`model`]: the hierarchical label grammar and domain types
//! - [`format`](mod@format): the `review.dsrw` line format, loader and canonical writer
//! - [`scope`]: duplicate merging, category rules, FRP/IRP scope sets
//! - [`solution`]: the SAG/SC graph and issue traceability
//! - [`evaluation`]: the method catalog, appropriateness, coverage
//! - [`workflow`]: the thirteen review-step gates
//! - [`kb`]: the personal knowledge base accumulated across reviews
//! - [`report`]: table, graph, and full-report renderers
//!
//! All operations are pure functions over immutable snapshots and safe to
//! call concurrently.

pub mod config;
pub mod diag;
pub mod evaluation;
pub mod format;
pub mod kb;
pub mod label;
pub mod model;
pub mod report;
pub mod scope;
pub mod solution;
pub mod workflow;
pub mod workspace;

pub use diag::{DiagCode, Diagnostic, Location, Severity};
pub use format::{load_workspace, load_workspace_str, save_canonical, EncodingError};
pub use label::{compare_labels, Label, LabelError, LabelKind};
pub use model::{
    ArtifactType, Assumption, Evidence, Issue, IssueCategory, IssueTree, Limitation, PageRef,
    ScopeSets, TermDefinition,
};
pub use scope::{
    compute_scopes, detect_duplicates, merge_duplicates, merged_tree, validate_category_rules,
    DuplicateGroup, MergeError, ScopeError,
};
pub use solution::{
    trace_matrix, unaddressed_issues, utilizes_topo_order, validate_solution_graph, Confidence,
    SolutionArtifactGroup, SolutionComponent, TraceLink, TraceMatrix, UnaddressedAck,
};
pub use evaluation::{
    appropriateness, coverage_gaps, evaluation_coverage, ApplicationAssessment, Appropriateness,
    CoverageEntry, CoverageGaps, CoverageRow, CoverageStatus, DistributionRow, EvalConfig,
    EvaluationMethod, EvaluationRecord, Rating, SelectionAssessment,
};
pub use workflow::{review_progress, step_status, BadStep, ReviewProgress, StepGate, StepStatus};
pub use workspace::{
    FrpQuality, Justification, KnowledgeArea, KnowledgeEntry, Opportunity, QualityAnswer,
    ReviewMeta, Sourced, Workspace,
};
pub use kb::{kb_merge_from_workspace, kb_search, suggest_k_issues, KbError, KnowledgeBase};
pub use report::{
    render_coverage_table, render_full_report, render_issue_table, render_scope_graph,
    render_trace_table, ReportError, ReportFormat, ReportKind, ReportRequest, ScopeFilter,
};
