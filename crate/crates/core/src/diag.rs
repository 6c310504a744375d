//! Diagnostic severities, the fixed code catalog, and the finding type
//! shared by the loader and every validator.

use std::fmt;

use serde::Serialize;

/// Severity of a finding. Ordered so a floor check is a simple `>=`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

/// Every diagnostic code the tool can emit.
///
/// The catalog is closed: new codes are added here, never invented at call
/// sites. The `E-`/`W-`/`I-` prefix fixes the severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagCode {
    /// Line is neither a record header, a key line, nor a continuation.
    EBadHeader,
    /// Record label does not parse or names the wrong kind of thing.
    EBadLabel,
    /// Unrecognized record kind; the record is skipped.
    EUnknownKind,
    /// A key required to construct the record is absent.
    EMissingKey,
    /// A key value does not parse (category letter, page range, enum, ...).
    EBadValue,
    /// A second record claims an identity that allows only one.
    EDupRecord,
    /// A nested issue whose parent label is absent from the tree.
    EOrphanIssue,
    /// A duplicate-label group mixes included (D/I) with excluded (X/K).
    ECategoryConflict,
    /// A U issue whose parent is absent or not a D/I issue.
    EUParent,
    /// A K issue that is the child of a D/I issue.
    EKChild,
    /// A D/I/X issue with no page-cited supporting text.
    ENoEvidence,
    /// A U/K issue with no knowledge-base source, or an unregistered one.
    EKbMissing,
    /// A trace that references an unknown issue or solution label.
    EDanglingTrace,
    /// An evaluation record that references an unknown SAG.
    EDanglingEval,
    /// A coverage entry that references an unknown issue.
    EDanglingCoverage,
    /// A solution component whose SAG or parent component is missing.
    EDanglingSc,
    /// An interaction that targets a missing solution component.
    EDanglingInteract,
    /// A utilizes edge that targets a missing SAG.
    EDanglingUtilizes,
    /// A cycle in the SAG utilizes graph.
    EUtilizesCycle,
    /// A key the format does not define; kept for forward compatibility.
    WUnknownKey,
    /// A single-valued key given twice; the first value wins.
    WDupKey,
    /// A key that cannot apply where it appeared (e.g. pages with no text).
    WStrayKey,
    /// A label nested deeper than the supported six levels.
    WDeepLabel,
    /// An excluded (X) issue with D/I children.
    WXChildren,
    /// Two differently labeled issues with the same description.
    WSimilarDesc,
    /// A SAG with no components and no acknowledgment.
    WEmptySag,
    /// A trace whose issue is not a leaf-level FRP issue.
    WTraceNotLeaf,
    /// A knowledge-base merge found no knowledge entries in the review.
    WNoKnowledge,
    /// A coverage entry whose issue is not a leaf-level FRP issue.
    WCoverageNotLeaf,
    /// An excluded (X) issue that has children.
    IXChildren,
}

impl DiagCode {
    pub const CATALOG: [DiagCode; 30] = [
        DiagCode::EBadHeader,
        DiagCode::EBadLabel,
        DiagCode::EUnknownKind,
        DiagCode::EMissingKey,
        DiagCode::EBadValue,
        DiagCode::EDupRecord,
        DiagCode::EOrphanIssue,
        DiagCode::ECategoryConflict,
        DiagCode::EUParent,
        DiagCode::EKChild,
        DiagCode::ENoEvidence,
        DiagCode::EKbMissing,
        DiagCode::EDanglingTrace,
        DiagCode::EDanglingEval,
        DiagCode::EDanglingCoverage,
        DiagCode::EDanglingSc,
        DiagCode::EDanglingInteract,
        DiagCode::EDanglingUtilizes,
        DiagCode::EUtilizesCycle,
        DiagCode::WUnknownKey,
        DiagCode::WDupKey,
        DiagCode::WStrayKey,
        DiagCode::WDeepLabel,
        DiagCode::WXChildren,
        DiagCode::WSimilarDesc,
        DiagCode::WEmptySag,
        DiagCode::WTraceNotLeaf,
        DiagCode::WCoverageNotLeaf,
        DiagCode::WNoKnowledge,
        DiagCode::IXChildren,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::EBadHeader => "E-BAD-HEADER",
            DiagCode::EBadLabel => "E-BAD-LABEL",
            DiagCode::EUnknownKind => "E-UNKNOWN-KIND",
            DiagCode::EMissingKey => "E-MISSING-KEY",
            DiagCode::EBadValue => "E-BAD-VALUE",
            DiagCode::EDupRecord => "E-DUP-RECORD",
            DiagCode::EOrphanIssue => "E-ORPHAN-ISSUE",
            DiagCode::ECategoryConflict => "E-CATEGORY-CONFLICT",
            DiagCode::EUParent => "E-U-PARENT",
            DiagCode::EKChild => "E-K-CHILD",
            DiagCode::ENoEvidence => "E-NO-EVIDENCE",
            DiagCode::EKbMissing => "E-KB-MISSING",
            DiagCode::EDanglingTrace => "E-DANGLING-TRACE",
            DiagCode::EDanglingEval => "E-DANGLING-EVAL",
            DiagCode::EDanglingCoverage => "E-DANGLING-COVERAGE",
            DiagCode::EDanglingSc => "E-DANGLING-SC",
            DiagCode::EDanglingInteract => "E-DANGLING-INTERACT",
            DiagCode::EDanglingUtilizes => "E-DANGLING-UTILIZES",
            DiagCode::EUtilizesCycle => "E-UTILIZES-CYCLE",
            DiagCode::WUnknownKey => "W-UNKNOWN-KEY",
            DiagCode::WDupKey => "W-DUP-KEY",
            DiagCode::WStrayKey => "W-STRAY-KEY",
            DiagCode::WDeepLabel => "W-DEEP-LABEL",
            DiagCode::WXChildren => "W-X-CHILDREN",
            DiagCode::WSimilarDesc => "W-SIMILAR-DESC",
            DiagCode::WEmptySag => "W-EMPTY-SAG",
            DiagCode::WTraceNotLeaf => "W-TRACE-NOT-LEAF",
            DiagCode::WNoKnowledge => "W-NO-KNOWLEDGE",
            DiagCode::WCoverageNotLeaf => "W-COVERAGE-NOT-LEAF",
            DiagCode::IXChildren => "I-X-CHILDREN",
        }
    }

    pub fn severity(self) -> Severity {
        match self.as_str().as_bytes()[0] {
            b'E' => Severity::Error,
            b'W' => Severity::Warning,
            _ => Severity::Info,
        }
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a diagnostic points.
///
/// `record` names the originating record (e.g. "issue I11.3"); `line` is the
/// 1-based line of the offending line or record header when the workspace
/// came from a file, and 0 for workspaces built in memory.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Location {
    pub record: String,
    pub line: u32,
}

impl Location {
    pub fn new(record: impl Into<String>, line: u32) -> Self {
        Location {
            record: record.into(),
            line,
        }
    }

    pub fn record(record: impl Into<String>) -> Self {
        Location {
            record: record.into(),
            line: 0,
        }
    }
}

/// One validation finding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub severity: Severity,
    pub location: Location,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: DiagCode, location: Location, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity: code.severity(),
            location,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.severity, self.code)?;
        if self.location.line > 0 {
            write!(f, " line {}", self.location.line)?;
        }
        if !self.location.record.is_empty() {
            write!(f, " ({})", self.location.record)?;
        }
        write!(f, ": {}", self.message)
    }
}

/// Sort and deduplicate findings from several validators into a stable
/// report order.
pub fn normalize(mut diags: Vec<Diagnostic>) -> Vec<Diagnostic> {
    diags.sort_by(|a, b| {
        (a.location.line, a.code, &a.location.record, &a.message).cmp(&(
            b.location.line,
            b.code,
            &b.location.record,
            &b.message,
        ))
    });
    diags.dedup();
    diags
}

/// Highest severity present, if any diagnostics exist.
pub fn max_severity(diags: &[Diagnostic]) -> Option<Severity> {
    diags.iter().map(|d| d.severity).max()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_prefix_fixes_severity() {
        for code in DiagCode::CATALOG {
            let expect = match code.as_str().as_bytes()[0] {
                b'E' => Severity::Error,
                b'W' => Severity::Warning,
                b'I' => Severity::Info,
                _ => unreachable!(),
            };
            assert_eq!(code.severity(), expect);
        }
    }

    #[test]
    fn catalog_codes_are_unique() {
        let mut names: Vec<&str> = DiagCode::CATALOG.iter().map(|c| c.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), DiagCode::CATALOG.len());
    }

    #[test]
    fn normalize_orders_and_dedups() {
        let a = Diagnostic::new(DiagCode::EBadLabel, Location::new("issue X", 9), "late");
        let b = Diagnostic::new(DiagCode::EBadHeader, Location::new("", 2), "early");
        let out = normalize(vec![a.clone(), b.clone(), a.clone()]);
        assert_eq!(out, vec![b, a]);
    }
}
