//! Core review-domain types: issue categories, page references, issues and
//! the issue tree, assumptions/limitations/terms, artifact types, and the
//! computed scope sets.
//!
//! Everything here is immutable after construction and safe to share across
//! threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::label::Label;

/// The five issue categories.
///
/// D, I, and U issues fall inside the formal research problem; X and K
/// belong only to the broader informal one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IssueCategory {
    /// Directly articulated as in scope.
    Direct,
    /// Indirectly included (discussed as relevant, never excluded).
    IndirectIncluded,
    /// Explicitly excluded from scope.
    Excluded,
    /// Known child of a D/I issue the authors did not identify.
    Unidentified,
    /// Known, relevant, but unmentioned knowledge-base issue.
    KnownUnmentioned,
}

impl IssueCategory {
    pub const ALL: [IssueCategory; 5] = [
        IssueCategory::Direct,
        IssueCategory::IndirectIncluded,
        IssueCategory::Excluded,
        IssueCategory::Unidentified,
        IssueCategory::KnownUnmentioned,
    ];

    pub fn letter(self) -> char {
        match self {
            IssueCategory::Direct => 'D',
            IssueCategory::IndirectIncluded => 'I',
            IssueCategory::Excluded => 'X',
            IssueCategory::Unidentified => 'U',
            IssueCategory::KnownUnmentioned => 'K',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'D' => Some(IssueCategory::Direct),
            'I' => Some(IssueCategory::IndirectIncluded),
            'X' => Some(IssueCategory::Excluded),
            'U' => Some(IssueCategory::Unidentified),
            'K' => Some(IssueCategory::KnownUnmentioned),
            _ => None,
        }
    }

    /// Whether issues of this category belong to the formal research problem.
    pub fn in_frp(self) -> bool {
        matches!(
            self,
            IssueCategory::Direct | IssueCategory::IndirectIncluded | IssueCategory::Unidentified
        )
    }

    /// Whether this category requires a knowledge-base source instead of
    /// page-cited evidence.
    pub fn needs_kb_source(self) -> bool {
        matches!(
            self,
            IssueCategory::Unidentified | IssueCategory::KnownUnmentioned
        )
    }
}

impl fmt::Display for IssueCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid page reference {text:?}: {reason}")]
pub struct PageRefError {
    pub text: String,
    pub reason: String,
}

/// A page range ("147", "152-156") or a knowledge-base source tag ("KB-KM").
///
/// Both forms share one grammar because the source material mixes them in a
/// single column.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PageRef {
    Range { start: u32, end: u32 },
    Tag(String),
}

impl PageRef {
    pub fn parse(text: &str) -> Result<Self, PageRefError> {
        let err = |reason: &str| PageRefError {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let text = text.trim();
        if text.is_empty() {
            return Err(err("empty page reference"));
        }
        if text.starts_with(|c: char| c.is_ascii_digit()) {
            let (start, end) = match text.split_once('-') {
                None => {
                    let n: u32 = text.parse().map_err(|_| err("not a page number"))?;
                    (n, n)
                }
                Some((a, b)) => {
                    let start: u32 = a.parse().map_err(|_| err("bad range start"))?;
                    let end: u32 = b.parse().map_err(|_| err("bad range end"))?;
                    (start, end)
                }
            };
            if start > end {
                return Err(err("range start exceeds range end"));
            }
            Ok(PageRef::Range { start, end })
        } else if text.starts_with(|c: char| c.is_ascii_alphabetic())
            && text
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            Ok(PageRef::Tag(text.to_string()))
        } else {
            Err(err("neither a page range nor a source tag"))
        }
    }

    pub fn is_range(&self) -> bool {
        matches!(self, PageRef::Range { .. })
    }
}

impl fmt::Display for PageRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PageRef::Range { start, end } if start == end => write!(f, "{start}"),
            PageRef::Range { start, end } => write!(f, "{start}-{end}"),
            PageRef::Tag(tag) => f.write_str(tag),
        }
    }
}

/// One verbatim extract supporting an issue, with where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evidence {
    pub text: String,
    pub pages: Option<PageRef>,
}

/// One atomized requirement/objective of the research problem under review.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub label: Label,
    pub desc: String,
    pub category: IssueCategory,
    pub evidence: Vec<Evidence>,
    pub kb_source: Option<String>,
}

impl Issue {
    /// Whether at least one evidence entry cites a numeric page range.
    pub fn has_paged_evidence(&self) -> bool {
        self.evidence
            .iter()
            .any(|e| e.pages.as_ref().is_some_and(PageRef::is_range))
    }
}

/// The merged set of issues keyed by normalized label, with parent/child
/// edges implied by label prefixes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IssueTree {
    issues: BTreeMap<Label, Issue>,
}

impl IssueTree {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert an issue, replacing (and returning) any previous issue with
    /// the same normalized label.
    pub fn insert(&mut self, issue: Issue) -> Option<Issue> {
        self.issues.insert(issue.label.clone(), issue)
    }

    pub fn get(&self, label: &Label) -> Option<&Issue> {
        self.issues.get(label)
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.issues.contains_key(label)
    }

    pub fn len(&self) -> usize {
        self.issues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    /// Issues in label order.
    pub fn iter(&self) -> impl Iterator<Item = &Issue> {
        self.issues.values()
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.issues.keys()
    }

    pub fn parent_of(&self, label: &Label) -> Option<&Issue> {
        label.parent().and_then(|p| self.issues.get(&p))
    }

    /// Direct children of `label`, in label order.
    pub fn children_of(&self, label: &Label) -> Vec<&Issue> {
        self.issues
            .values()
            .filter(|i| i.label.parent().as_ref() == Some(label))
            .collect()
    }

    /// Labels that have at least one direct child in the tree.
    pub fn parent_labels(&self) -> BTreeSet<Label> {
        self.issues
            .keys()
            .filter_map(|l| l.parent())
            .filter(|p| self.issues.contains_key(p))
            .collect()
    }

    /// Labels of issues with no children that satisfy `filter`, sorted.
    pub fn leaf_labels(&self, filter: impl Fn(&Issue) -> bool) -> BTreeSet<Label> {
        let parents = self.parent_labels();
        self.issues
            .values()
            .filter(|i| !parents.contains(&i.label) && filter(i))
            .map(|i| i.label.clone())
            .collect()
    }
}

/// An author-specified assumption framing the formal research problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assumption {
    pub label: Label,
    pub desc: Option<String>,
    pub text: String,
    pub pages: Option<PageRef>,
}

/// An author-specified limitation or constraint on the formal research
/// problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limitation {
    pub label: Label,
    pub desc: Option<String>,
    pub text: String,
    pub pages: Option<PageRef>,
}

/// The authors' definition of a concept or term used by the problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermDefinition {
    pub term: String,
    pub definition: String,
    pub pages: Option<PageRef>,
}

/// Artifact types a solution artifact group can have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArtifactType {
    Construct,
    Model,
    Framework,
    Architecture,
    Method,
    Algorithm,
    Instantiation,
    DesignPrinciples,
    DesignTheory,
}

impl ArtifactType {
    pub const ALL: [ArtifactType; 9] = [
        ArtifactType::Construct,
        ArtifactType::Model,
        ArtifactType::Framework,
        ArtifactType::Architecture,
        ArtifactType::Method,
        ArtifactType::Algorithm,
        ArtifactType::Instantiation,
        ArtifactType::DesignPrinciples,
        ArtifactType::DesignTheory,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ArtifactType::Construct => "construct",
            ArtifactType::Model => "model",
            ArtifactType::Framework => "framework",
            ArtifactType::Architecture => "architecture",
            ArtifactType::Method => "method",
            ArtifactType::Algorithm => "algorithm",
            ArtifactType::Instantiation => "instantiation",
            ArtifactType::DesignPrinciples => "design_principles",
            ArtifactType::DesignTheory => "design_theory",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let wanted = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        Self::ALL.into_iter().find(|a| a.id() == wanted)
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ArtifactType::Construct => "Construct",
            ArtifactType::Model => "Model",
            ArtifactType::Framework => "Framework",
            ArtifactType::Architecture => "Architecture",
            ArtifactType::Method => "Method",
            ArtifactType::Algorithm => "Algorithm",
            ArtifactType::Instantiation => "Instantiation",
            ArtifactType::DesignPrinciples => "Design Principles",
            ArtifactType::DesignTheory => "Design Theory",
        }
    }
}

impl fmt::Display for ArtifactType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

/// The computed formal/informal research-problem scopes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScopeSets {
    /// D, I, and U issues.
    pub frp_issues: BTreeSet<Label>,
    /// X and K issues (in the IRP but outside the FRP).
    pub irp_only_issues: BTreeSet<Label>,
    /// FRP issues with no children.
    pub frp_leaves: BTreeSet<Label>,
    pub assumptions: Vec<Assumption>,
    pub limitations: Vec<Limitation>,
}
