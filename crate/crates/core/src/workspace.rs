//! The in-memory form of one review workspace: an instance store for every
//! record kind the file format defines.

use std::ops::{Deref, DerefMut};

use crate::evaluation::{CoverageEntry, EvaluationRecord};
use crate::label::Label;
use crate::model::{Assumption, Issue, IssueTree, Limitation, TermDefinition};
use crate::solution::{SolutionArtifactGroup, SolutionComponent, TraceLink, UnaddressedAck};

/// A record plus the line its header occupied when loaded from a file
/// (0 for records built in memory).
///
/// Equality ignores the line, so canonical reordering and round-trips
/// compare on content alone.
#[derive(Debug, Clone)]
pub struct Sourced<T> {
    pub value: T,
    pub line: u32,
}

impl<T> Sourced<T> {
    pub fn new(value: T) -> Self {
        Sourced { value, line: 0 }
    }

    pub fn at(value: T, line: u32) -> Self {
        Sourced { value, line }
    }
}

impl<T: PartialEq> PartialEq for Sourced<T> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl<T> Deref for Sourced<T> {
    type Target = T;

    fn deref(&self) -> &T {
        &self.value
    }
}

impl<T> DerefMut for Sourced<T> {
    fn deref_mut(&mut self) -> &mut T {
        &mut self.value
    }
}

impl<T> From<T> for Sourced<T> {
    fn from(value: T) -> Self {
        Sourced::new(value)
    }
}

/// Review header data.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReviewMeta {
    pub title: String,
    pub venue: String,
    pub reviewer: String,
    /// Brief narrative overview of the informal research problem.
    pub irp_narrative: String,
    /// The narrative condensed into a single sentence.
    pub irp_sentence: String,
}

/// A yes/no answer with the reviewer's reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QualityAnswer {
    pub yes: bool,
    pub reason: String,
}

/// The six-question quality assessment of the formal research problem.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrpQuality {
    /// Answers to questions a-f, in order.
    pub answers: [Option<QualityAnswer>; 6],
    pub summary: String,
}

impl FrpQuality {
    pub const KEYS: [&'static str; 6] = ["q_a", "q_b", "q_c", "q_d", "q_e", "q_f"];

    /// The checklist wording, indexed like `answers`.
    pub const QUESTIONS: [&'static str; 6] = [
        "Any inconsistency between Issues included in the scope of the FRP?",
        "Are the Assumptions reasonable?",
        "Any Issue in the FRP scope inconsistent with an Assumption?",
        "Given the scope of the IRP, is the FRP a substantive research problem?",
        "Is the FRP much different from FRPs that have been adequately addressed?",
        "Is the FRP similar to significant FRPs still lacking an adequate solution?",
    ];
}

/// The authors' case for the formal research problem.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Justification {
    pub validity: String,
    pub importance: String,
}

/// A future-research opportunity harvested from the quality, solution, or
/// evaluation analysis (steps 6, 9, and 10).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Opportunity {
    pub source_step: u8,
    pub description: String,
    pub skills: String,
    pub knowledge: String,
    pub resources: String,
}

/// The three areas knowledge gained is filed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KnowledgeArea {
    Issues,
    Solutions,
    EvaluationMethods,
}

impl KnowledgeArea {
    pub const ALL: [KnowledgeArea; 3] = [
        KnowledgeArea::Issues,
        KnowledgeArea::Solutions,
        KnowledgeArea::EvaluationMethods,
    ];

    pub fn id(self) -> &'static str {
        match self {
            KnowledgeArea::Issues => "issues",
            KnowledgeArea::Solutions => "solutions",
            KnowledgeArea::EvaluationMethods => "evaluation_methods",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let wanted = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        Self::ALL.into_iter().find(|a| a.id() == wanted)
    }

    pub fn display_name(self) -> &'static str {
        match self {
            KnowledgeArea::Issues => "Issues",
            KnowledgeArea::Solutions => "Solutions",
            KnowledgeArea::EvaluationMethods => "Evaluation Methods",
        }
    }
}

/// What the reviewer learnt from this review.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeEntry {
    pub area: KnowledgeArea,
    pub description: String,
}

/// One review workspace: the parsed contents of a `review.dsrw` file.
///
/// Issues are kept as raw rows in file order; duplicate labels are legal
/// here and merged by the scope engine.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Workspace {
    pub meta: Option<Sourced<ReviewMeta>>,
    pub raw_issues: Vec<Sourced<Issue>>,
    pub assumptions: Vec<Sourced<Assumption>>,
    /// Explicit "no assumptions" marker, with its note.
    pub no_assumptions: Option<Sourced<String>>,
    pub limitations: Vec<Sourced<Limitation>>,
    /// Explicit "no limitations" marker, with its note.
    pub no_limitations: Option<Sourced<String>>,
    pub terms: Vec<Sourced<TermDefinition>>,
    pub sags: Vec<Sourced<SolutionArtifactGroup>>,
    pub scs: Vec<Sourced<SolutionComponent>>,
    pub traces: Vec<Sourced<TraceLink>>,
    pub unaddressed: Vec<Sourced<UnaddressedAck>>,
    pub evals: Vec<Sourced<EvaluationRecord>>,
    pub coverage: Vec<Sourced<CoverageEntry>>,
    pub frp_quality: Option<Sourced<FrpQuality>>,
    pub justification: Option<Sourced<Justification>>,
    pub opportunities: Vec<Sourced<Opportunity>>,
    pub knowledge: Vec<Sourced<KnowledgeEntry>>,
}

impl Workspace {
    /// Merge duplicate issue rows into the issue tree. Conflicting groups
    /// surface as diagnostics; see [`crate::scope::merged_tree`].
    pub fn issue_tree(&self) -> (IssueTree, Vec<crate::diag::Diagnostic>) {
        crate::scope::merged_tree(self)
    }

    /// Solution components rooted at `sag`, in file order.
    pub fn components_of(&self, sag: &Label) -> Vec<&Sourced<SolutionComponent>> {
        self.scs
            .iter()
            .filter(|sc| &sc.label.root() == sag)
            .collect()
    }

    /// Sort every record list into canonical order. Sorting is stable, so
    /// duplicate issue rows keep their relative order (merge semantics
    /// depend on which row came first).
    pub fn canonicalize(&mut self) {
        self.raw_issues.sort_by(|a, b| a.label.cmp(&b.label));
        self.assumptions.sort_by(|a, b| a.label.cmp(&b.label));
        self.limitations.sort_by(|a, b| a.label.cmp(&b.label));
        self.terms
            .sort_by(|a, b| (&a.term, &a.definition).cmp(&(&b.term, &b.definition)));
        self.sags.sort_by(|a, b| a.label.cmp(&b.label));
        for sag in &mut self.sags {
            sag.value.utilizes.sort();
            sag.value.utilizes.dedup();
        }
        self.scs.sort_by(|a, b| a.label.cmp(&b.label));
        for sc in &mut self.scs {
            sc.value.interacts.sort();
            sc.value.interacts.dedup();
        }
        self.traces.sort_by(|a, b| a.issue.cmp(&b.issue));
        for trace in &mut self.traces {
            trace.value.components.sort();
            trace.value.components.dedup();
        }
        self.unaddressed.sort_by(|a, b| a.issue.cmp(&b.issue));
        self.evals
            .sort_by(|a, b| (&a.sag, a.method.id()).cmp(&(&b.sag, b.method.id())));
        self.coverage.sort_by(|a, b| a.issue.cmp(&b.issue));
        self.opportunities.sort_by(|a, b| {
            (a.source_step, &a.description).cmp(&(b.source_step, &b.description))
        });
        self.knowledge
            .sort_by(|a, b| (a.area, &a.description).cmp(&(b.area, &b.description)));
    }
}
