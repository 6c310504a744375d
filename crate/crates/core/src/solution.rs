//! The proposed-solution model and its traceability to leaf-level issues:
//! solution artifact groups, solution components, trace links, graph
//! validation, and the issue x component matrix.

use std::collections::{BTreeMap, BTreeSet};

use crate::diag::{DiagCode, Diagnostic, Location};
use crate::label::{Label, LabelKind};
use crate::model::{ArtifactType, PageRef};
use crate::scope;
use crate::workspace::Workspace;

/// A top-level artifact of the proposed solution. SAGs may utilize other
/// SAGs but are never components of one another.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionArtifactGroup {
    pub label: Label,
    pub artifact_type: ArtifactType,
    pub desc: String,
    pub pages: Option<PageRef>,
    pub utilizes: Vec<Label>,
    /// Explicit statement that this SAG has no component breakdown.
    pub components_ack: Option<String>,
    /// Explicit statement that the authors did not evaluate this SAG.
    pub evaluation_ack: Option<String>,
}

/// A (possibly nested) component of a SAG.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionComponent {
    pub label: Label,
    pub desc: String,
    pub pages: Option<PageRef>,
    pub interacts: Vec<Label>,
}

/// How firmly the reviewed paper ties components to an issue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Confidence {
    /// The paper states the components address the issue.
    Stated,
    /// The reviewer inferred the connection.
    Inferred,
    /// "Possibly" — the connection is uncertain.
    Unclear,
}

impl Confidence {
    pub fn id(self) -> &'static str {
        match self {
            Confidence::Stated => "stated",
            Confidence::Inferred => "inferred",
            Confidence::Unclear => "unclear",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "stated" => Some(Confidence::Stated),
            "inferred" => Some(Confidence::Inferred),
            "unclear" => Some(Confidence::Unclear),
            _ => None,
        }
    }
}

/// A leaf-level issue mapped to the components designed to address it.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceLink {
    pub issue: Label,
    /// SC labels, or SAG labels for subsystem-level links.
    pub components: Vec<Label>,
    pub confidence: Confidence,
    pub assessment: String,
}

/// Explicit acknowledgment that a leaf-level issue is not addressed by any
/// component.
#[derive(Debug, Clone, PartialEq)]
pub struct UnaddressedAck {
    pub issue: Label,
    pub note: String,
}

/// The traceability matrix: leaf FRP issues x solution components.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceMatrix {
    /// Leaf FRP issues, in label order.
    pub rows: Vec<Label>,
    /// Solution components, in label order.
    pub columns: Vec<Label>,
    /// (row index, column index) -> confidence.
    pub cells: BTreeMap<(usize, usize), Confidence>,
    /// SAG-level links per row, kept out of the SC columns.
    pub sag_links: BTreeMap<Label, Vec<(Label, Confidence)>>,
}

impl TraceMatrix {
    pub fn cell(&self, row: &Label, column: &Label) -> Option<Confidence> {
        let r = self.rows.iter().position(|l| l == row)?;
        let c = self.columns.iter().position(|l| l == column)?;
        self.cells.get(&(r, c)).copied()
    }

    /// Component labels linked to `row`, with confidence, in label order.
    pub fn row_links(&self, row: &Label) -> Vec<(Label, Confidence)> {
        let mut out = Vec::new();
        if let Some(r) = self.rows.iter().position(|l| l == row) {
            for ((ri, ci), conf) in &self.cells {
                if *ri == r {
                    out.push((self.columns[*ci].clone(), *conf));
                }
            }
        }
        if let Some(sags) = self.sag_links.get(row) {
            out.extend(sags.iter().cloned());
        }
        out.sort();
        out
    }
}

fn sag_set(ws: &Workspace) -> BTreeSet<Label> {
    ws.sags.iter().map(|s| s.label.clone()).collect()
}

fn sc_set(ws: &Workspace) -> BTreeSet<Label> {
    ws.scs.iter().map(|s| s.label.clone()).collect()
}

/// Validate the SAG/SC graph and the trace links against it.
///
/// Clean output guarantees the utilizes relation is a DAG and every
/// reference in components, interactions, and traces resolves.
pub fn validate_solution_graph(ws: &Workspace) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let sags = sag_set(ws);
    let scs = sc_set(ws);

    for sag in &ws.sags {
        let loc = Location::new(format!("sag {}", sag.label), sag.line);
        for target in &sag.utilizes {
            if !sags.contains(target) {
                diags.push(Diagnostic::new(
                    DiagCode::EDanglingUtilizes,
                    loc.clone(),
                    format!("{} utilizes {}, which is not a known SAG", sag.label, target),
                ));
            }
        }
        let has_components = ws
            .scs
            .iter()
            .any(|sc| sc.label.root() == sag.label);
        if !has_components && sag.components_ack.is_none() {
            diags.push(Diagnostic::new(
                DiagCode::WEmptySag,
                loc,
                format!("{} has no solution components", sag.label),
            ));
        }
    }

    diags.extend(utilizes_cycles(ws));

    for sc in &ws.scs {
        let loc = Location::new(format!("sc {}", sc.label), sc.line);
        let parent = sc.label.parent().expect("SC labels have depth >= 2");
        let parent_ok = match parent.kind() {
            LabelKind::Sag => sags.contains(&parent),
            _ => scs.contains(&parent),
        };
        if !parent_ok {
            diags.push(Diagnostic::new(
                DiagCode::EDanglingSc,
                loc.clone(),
                format!("{} has no parent {} in the workspace", sc.label, parent),
            ));
        } else if !sags.contains(&sc.label.root()) {
            diags.push(Diagnostic::new(
                DiagCode::EDanglingSc,
                loc.clone(),
                format!("{} is not rooted at a known SAG", sc.label),
            ));
        }
        for target in &sc.interacts {
            if !scs.contains(target) {
                diags.push(Diagnostic::new(
                    DiagCode::EDanglingInteract,
                    loc.clone(),
                    format!(
                        "{} interacts with {}, which is not a known solution component",
                        sc.label, target
                    ),
                ));
            }
        }
    }

    let (tree, _) = scope::merged_tree(ws);
    let leaves = tree.leaf_labels(|i| i.category.in_frp());
    for trace in &ws.traces {
        let loc = Location::new(format!("trace {}", trace.issue), trace.line);
        if !tree.contains(&trace.issue) {
            diags.push(Diagnostic::new(
                DiagCode::EDanglingTrace,
                loc.clone(),
                format!("trace references unknown issue {}", trace.issue),
            ));
        } else if !leaves.contains(&trace.issue) {
            diags.push(Diagnostic::new(
                DiagCode::WTraceNotLeaf,
                loc.clone(),
                format!("{} is not a leaf-level FRP issue", trace.issue),
            ));
        }
        for target in &trace.components {
            let known = match target.kind() {
                LabelKind::Sag => sags.contains(target),
                _ => scs.contains(target),
            };
            if !known {
                diags.push(Diagnostic::new(
                    DiagCode::EDanglingTrace,
                    loc.clone(),
                    format!(
                        "trace for {} references unknown component {}",
                        trace.issue, target
                    ),
                ));
            }
        }
    }
    for ack in &ws.unaddressed {
        if !tree.contains(&ack.issue) {
            diags.push(Diagnostic::new(
                DiagCode::EDanglingTrace,
                Location::new(format!("trace {}", ack.issue), ack.line),
                format!(
                    "unaddressed acknowledgment references unknown issue {}",
                    ack.issue
                ),
            ));
        }
    }

    diags
}

/// Cycles in the utilizes graph, one diagnostic per distinct cycle.
fn utilizes_cycles(ws: &Workspace) -> Vec<Diagnostic> {
    let mut edges: BTreeMap<Label, Vec<Label>> = BTreeMap::new();
    let sags = sag_set(ws);
    let mut lines: BTreeMap<Label, u32> = BTreeMap::new();
    for sag in &ws.sags {
        lines.insert(sag.label.clone(), sag.line);
        let mut targets: Vec<Label> = sag
            .utilizes
            .iter()
            .filter(|t| sags.contains(t))
            .cloned()
            .collect();
        targets.sort();
        edges.insert(sag.label.clone(), targets);
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Unvisited,
        Active,
        Done,
    }

    fn walk(
        node: &Label,
        edges: &BTreeMap<Label, Vec<Label>>,
        marks: &mut BTreeMap<Label, Mark>,
        path: &mut Vec<Label>,
        cycles: &mut Vec<Vec<Label>>,
    ) {
        marks.insert(node.clone(), Mark::Active);
        path.push(node.clone());
        for next in edges.get(node).into_iter().flatten() {
            match marks.get(next).copied().unwrap_or(Mark::Unvisited) {
                Mark::Active => {
                    let start = path.iter().position(|l| l == next).unwrap();
                    let mut cycle = path[start..].to_vec();
                    cycle.push(next.clone());
                    cycles.push(cycle);
                }
                Mark::Unvisited => walk(next, edges, marks, path, cycles),
                Mark::Done => {}
            }
        }
        path.pop();
        marks.insert(node.clone(), Mark::Done);
    }

    let mut marks: BTreeMap<Label, Mark> = BTreeMap::new();
    let mut cycles = Vec::new();
    for node in edges.keys().cloned().collect::<Vec<_>>() {
        if marks.get(&node).copied().unwrap_or(Mark::Unvisited) == Mark::Unvisited {
            let mut path = Vec::new();
            walk(&node, &edges, &mut marks, &mut path, &mut cycles);
        }
    }

    cycles
        .into_iter()
        .map(|cycle| {
            let head = &cycle[0];
            let shown: Vec<&str> = cycle.iter().map(|l| l.verbatim()).collect();
            Diagnostic::new(
                DiagCode::EUtilizesCycle,
                Location::new(
                    format!("sag {head}"),
                    lines.get(head).copied().unwrap_or(0),
                ),
                format!("utilizes cycle: {}", shown.join(" -> ")),
            )
        })
        .collect()
}

/// A topological order of the SAGs under utilizes (dependencies first), or
/// `None` while the graph has a cycle. Deterministic: ties break by label.
pub fn utilizes_topo_order(ws: &Workspace) -> Option<Vec<Label>> {
    let sags = sag_set(ws);
    // out-degree toward dependencies; emit a SAG once everything it
    // utilizes has been emitted
    let mut pending: BTreeMap<Label, BTreeSet<Label>> = ws
        .sags
        .iter()
        .map(|s| {
            let deps: BTreeSet<Label> = s
                .utilizes
                .iter()
                .filter(|t| sags.contains(t))
                .cloned()
                .collect();
            (s.label.clone(), deps)
        })
        .collect();
    let mut order = Vec::new();
    while !pending.is_empty() {
        let ready: Vec<Label> = pending
            .iter()
            .filter(|(_, deps)| deps.is_empty())
            .map(|(l, _)| l.clone())
            .collect();
        if ready.is_empty() {
            return None;
        }
        for label in ready {
            pending.remove(&label);
            for deps in pending.values_mut() {
                deps.remove(&label);
            }
            order.push(label);
        }
    }
    Some(order)
}

/// Build the leaf-issue x component matrix from the trace links.
pub fn trace_matrix(ws: &Workspace) -> TraceMatrix {
    let (tree, _) = scope::merged_tree(ws);
    let rows: Vec<Label> = tree
        .leaf_labels(|i| i.category.in_frp())
        .into_iter()
        .collect();
    let mut columns: Vec<Label> = sc_set(ws).into_iter().collect();
    columns.sort();

    let mut cells = BTreeMap::new();
    let mut sag_links: BTreeMap<Label, Vec<(Label, Confidence)>> = BTreeMap::new();
    for trace in &ws.traces {
        let Some(r) = rows.iter().position(|l| *l == trace.issue) else {
            continue;
        };
        for target in &trace.components {
            match target.kind() {
                LabelKind::Sag => sag_links
                    .entry(rows[r].clone())
                    .or_default()
                    .push((target.clone(), trace.confidence)),
                _ => {
                    if let Some(c) = columns.iter().position(|l| l == target) {
                        cells.insert((r, c), trace.confidence);
                    }
                }
            }
        }
    }
    for links in sag_links.values_mut() {
        links.sort();
        links.dedup();
    }

    TraceMatrix {
        rows,
        columns,
        cells,
        sag_links,
    }
}

/// Leaf FRP issues with no trace link at all, sorted. An unaddressed
/// acknowledgment records intent but does not make an issue addressed.
pub fn unaddressed_issues(ws: &Workspace) -> BTreeSet<Label> {
    let (tree, _) = scope::merged_tree(ws);
    let mut leaves = tree.leaf_labels(|i| i.category.in_frp());
    for trace in &ws.traces {
        leaves.remove(&trace.issue);
    }
    leaves
}
