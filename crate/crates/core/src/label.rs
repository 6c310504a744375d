//! Hierarchical label grammar shared by issues, solution artifacts, and
//! assumptions/limitations.
//!
//! A label is a dotted path of segments ("I02.01", "SAG2.SC2.01.1"). The
//! alpha prefix of the first segment decides what the label names; child
//! segments carry bare numbers, except the `SC` marker that roots a solution
//! component under its artifact group. Comparison is numeric per segment, so
//! "I1" and "I01" address the same node while each keeps its authored
//! spelling for rendering.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

/// What a label names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LabelKind {
    Issue,
    Sag,
    Sc,
    Assumption,
    Limitation,
}

impl LabelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LabelKind::Issue => "issue",
            LabelKind::Sag => "SAG",
            LabelKind::Sc => "solution component",
            LabelKind::Assumption => "assumption",
            LabelKind::Limitation => "limitation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("malformed label {text:?}: {reason}")]
    Malformed { text: String, reason: String },
    #[error("cannot compare a {0:?} label with a {1:?} label")]
    KindMismatch(LabelKind, LabelKind),
}

/// One dotted segment: an optional alpha prefix plus a number ("SC2", "01").
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    prefix: String,
    number: u32,
}

impl Segment {
    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn number(&self) -> u32 {
        self.number
    }
}

/// A parsed hierarchical label.
///
/// Equality, ordering, and hashing use the normalized form (kind plus
/// per-segment prefix and number), so "I1" and "I01" are the same label.
/// The authored spelling is kept in `verbatim` and used for rendering.
#[derive(Debug, Clone)]
pub struct Label {
    kind: LabelKind,
    segments: Vec<Segment>,
    verbatim: String,
}

impl Label {
    /// Parse a raw label such as "I02.01" or "SAG2.SC2.01.1".
    pub fn parse(text: &str) -> Result<Self, LabelError> {
        let malformed = |reason: String| LabelError::Malformed {
            text: text.to_string(),
            reason,
        };
        if text.is_empty() {
            return Err(malformed("label is empty".into()));
        }
        if !text
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '.')
        {
            return Err(malformed(
                "only ASCII letters, digits, and dots are allowed".into(),
            ));
        }

        let mut segments = Vec::new();
        for raw in text.split('.') {
            if raw.is_empty() {
                return Err(malformed("empty segment".into()));
            }
            let digit_at = raw
                .find(|c: char| c.is_ascii_digit())
                .ok_or_else(|| malformed(format!("segment {raw:?} is missing its number")))?;
            let (alpha, digits) = raw.split_at(digit_at);
            if !digits.chars().all(|c| c.is_ascii_digit()) {
                return Err(malformed(format!(
                    "segment {raw:?} mixes digits and letters"
                )));
            }
            let number: u32 = digits
                .parse()
                .map_err(|_| malformed(format!("segment number {digits:?} is out of range")))?;
            segments.push(Segment {
                prefix: alpha.to_ascii_uppercase(),
                number,
            });
        }

        let kind = match segments[0].prefix.as_str() {
            "I" => LabelKind::Issue,
            "SAG" => {
                if segments.len() == 1 {
                    LabelKind::Sag
                } else {
                    LabelKind::Sc
                }
            }
            "A" => LabelKind::Assumption,
            "L" => LabelKind::Limitation,
            other => return Err(malformed(format!("unknown label prefix {other:?}"))),
        };

        for (i, seg) in segments.iter().enumerate().skip(1) {
            if kind == LabelKind::Sc && i == 1 {
                if seg.prefix != "SC" {
                    return Err(malformed(
                        "second segment of a solution-component label must be SC<n>".into(),
                    ));
                }
            } else if !seg.prefix.is_empty() {
                return Err(malformed(format!(
                    "unexpected prefix {:?} in a child segment",
                    seg.prefix
                )));
            }
        }

        Ok(Label {
            kind,
            segments,
            verbatim: text.to_string(),
        })
    }

    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn depth(&self) -> usize {
        self.segments.len()
    }

    /// The label as originally written.
    pub fn verbatim(&self) -> &str {
        &self.verbatim
    }

    /// Canonical spelling without zero padding ("I1", "SAG2.SC2.1.1").
    pub fn normalized(&self) -> String {
        let mut out = String::new();
        for (i, seg) in self.segments.iter().enumerate() {
            if i > 0 {
                out.push('.');
            }
            out.push_str(&seg.prefix);
            out.push_str(&seg.number.to_string());
        }
        out
    }

    /// The label one level up, or `None` for depth-1 labels. A depth-2
    /// solution component's parent is its artifact group.
    pub fn parent(&self) -> Option<Label> {
        if self.segments.len() <= 1 {
            return None;
        }
        let cut = self.verbatim.rfind('.').expect("multi-segment label");
        let parent =
            Label::parse(&self.verbatim[..cut]).expect("prefix of a valid label is valid");
        Some(parent)
    }

    /// The first segment as its own label (the SAG of a solution component,
    /// the top-level issue of a nested one).
    pub fn root(&self) -> Label {
        match self.verbatim.find('.') {
            None => self.clone(),
            Some(cut) => {
                Label::parse(&self.verbatim[..cut]).expect("prefix of a valid label is valid")
            }
        }
    }
}

/// Numeric-aware ordering between labels of the same kind (I2 < I10).
pub fn compare_labels(a: &Label, b: &Label) -> Result<Ordering, LabelError> {
    if a.kind != b.kind {
        return Err(LabelError::KindMismatch(a.kind, b.kind));
    }
    Ok(a.cmp(b))
}

impl PartialEq for Label {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.segments == other.segments
    }
}

impl Eq for Label {}

impl Hash for Label {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state);
        self.segments.hash(state);
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        self.kind
            .cmp(&other.kind)
            .then_with(|| self.segments.cmp(&other.segments))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.verbatim)
    }
}
