//! Shared generators for the acceptance and property suites: structurally
//! valid random workspaces (loadable with no Error diagnostics) plus a
//! small deterministic RNG for derived choices.

#![allow(dead_code)]

use proptest::prelude::*;

use dsrev_core::evaluation::{
    ApplicationAssessment, CoverageEntry, CoverageStatus, EvaluationMethod, EvaluationRecord,
    SelectionAssessment,
};
use dsrev_core::label::Label;
use dsrev_core::model::{ArtifactType, Evidence, Issue, IssueCategory, PageRef};
use dsrev_core::solution::{
    Confidence, SolutionArtifactGroup, SolutionComponent, TraceLink, UnaddressedAck,
};
use dsrev_core::workspace::{
    FrpQuality, Justification, KnowledgeArea, KnowledgeEntry, Opportunity, QualityAnswer,
    ReviewMeta, Sourced, Workspace,
};

/// Splitmix-style generator so a single proptest-shrunk seed derives all
/// the secondary choices.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next() % n.max(1) as u64) as usize
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.next() % den < num
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

/// Issue label trees: top-level issues, children, grandchildren. Parents
/// always exist, labels are unique.
pub fn arb_issue_labels() -> impl Strategy<Value = Vec<String>> {
    proptest::collection::btree_map(
        1u32..12,
        proptest::collection::vec(0u32..3, 0..4),
        0..6,
    )
    .prop_map(|roots| {
        let mut labels = Vec::new();
        for (root, kids) in roots {
            labels.push(format!("I{root:02}"));
            for (k, &grandchildren) in kids.iter().enumerate() {
                labels.push(format!("I{root:02}.{}", k + 1));
                for g in 0..grandchildren {
                    labels.push(format!("I{root:02}.{}.{}", k + 1, g + 1));
                }
            }
        }
        labels
    })
}

const CATEGORY_POOL: [IssueCategory; 9] = [
    IssueCategory::Direct,
    IssueCategory::Direct,
    IssueCategory::Direct,
    IssueCategory::IndirectIncluded,
    IssueCategory::IndirectIncluded,
    IssueCategory::IndirectIncluded,
    IssueCategory::Unidentified,
    IssueCategory::Excluded,
    IssueCategory::KnownUnmentioned,
];

pub fn build_issue(label: &str, category: IssueCategory, rng: &mut Rng) -> Issue {
    let start = 100 + rng.below(80) as u32;
    let mut evidence = vec![Evidence {
        text: format!("extract {} number {}", label.to_lowercase(), rng.below(1000)),
        pages: Some(PageRef::Range {
            start,
            end: start + rng.below(4) as u32,
        }),
    }];
    if rng.chance(1, 4) {
        evidence.push(Evidence {
            text: format!("second extract {}", rng.below(1000)),
            pages: Some(PageRef::Range { start, end: start }),
        });
    }
    Issue {
        label: Label::parse(label).unwrap(),
        desc: format!("topic {} v{}", label.to_lowercase(), rng.below(100)),
        category,
        evidence,
        kb_source: category
            .needs_kb_source()
            .then(|| format!("KB-G{}", rng.below(3))),
    }
}

/// A structurally valid workspace derived from a label tree and a seed.
/// Same inputs, same workspace.
pub fn build_workspace(labels: &[String], seed: u64) -> Workspace {
    let mut rng = Rng::new(seed);
    let reviewer = format!("reviewer-{}", rng.below(50));
    let mut ws = Workspace {
        meta: Some(Sourced::new(ReviewMeta {
            title: format!("Generated Review {}", seed % 100_000),
            venue: "Synthetic Venue".to_string(),
            reviewer,
            irp_narrative: "A generated narrative of the informal research problem.".to_string(),
            irp_sentence: "A generated one-sentence informal research problem.".to_string(),
        })),
        ..Workspace::default()
    };

    for label in labels {
        let category = CATEGORY_POOL[rng.below(CATEGORY_POOL.len())];
        ws.raw_issues
            .push(Sourced::new(build_issue(label, category, &mut rng)));
    }

    let sag_count = rng.below(3);
    for s in 1..=sag_count {
        let sag_label = Label::parse(&format!("SAG{s}")).unwrap();
        let utilizes = (1..s)
            .filter(|_| rng.chance(1, 2))
            .map(|u| Label::parse(&format!("SAG{u}")).unwrap())
            .collect();
        let sc_count = rng.below(3);
        ws.sags.push(Sourced::new(SolutionArtifactGroup {
            label: sag_label,
            artifact_type: ArtifactType::ALL[rng.below(ArtifactType::ALL.len())],
            desc: format!("artifact group {s}"),
            pages: Some(PageRef::Range {
                start: 150,
                end: 150 + rng.below(9) as u32,
            }),
            utilizes,
            components_ack: (sc_count == 0).then(|| "described as a whole".to_string()),
            evaluation_ack: rng.chance(1, 3).then(|| "not evaluated".to_string()),
        }));
        for c in 1..=sc_count {
            ws.scs.push(Sourced::new(SolutionComponent {
                label: Label::parse(&format!("SAG{s}.SC{c}")).unwrap(),
                desc: format!("component {s}.{c}"),
                pages: Some(PageRef::Range { start: 151, end: 153 }),
                interacts: Vec::new(),
            }));
        }
    }
    // Interactions target generated components only.
    let sc_labels: Vec<Label> = ws.scs.iter().map(|sc| sc.label.clone()).collect();
    for sc in &mut ws.scs {
        if sc_labels.len() > 1 && rng.chance(1, 2) {
            let target = sc_labels[rng.below(sc_labels.len())].clone();
            if target != sc.label {
                sc.value.interacts.push(target);
            }
        }
    }

    for label in labels {
        let parsed = Label::parse(label).unwrap();
        match rng.below(4) {
            0 if !sc_labels.is_empty() => {
                let mut components = vec![sc_labels[rng.below(sc_labels.len())].clone()];
                if rng.chance(1, 3) {
                    components.push(sc_labels[rng.below(sc_labels.len())].clone());
                }
                components.sort();
                components.dedup();
                let confidence = [Confidence::Stated, Confidence::Inferred, Confidence::Unclear]
                    [rng.below(3)];
                ws.traces.push(Sourced::new(TraceLink {
                    issue: parsed,
                    components,
                    confidence,
                    assessment: format!("assessment {}", rng.below(1000)),
                }));
            }
            1 => ws.unaddressed.push(Sourced::new(UnaddressedAck {
                issue: parsed,
                note: "acknowledged as unaddressed".to_string(),
            })),
            _ => {}
        }
    }

    for label in labels {
        if rng.chance(1, 2) {
            let status = [
                CoverageStatus::Adequate,
                CoverageStatus::Partly,
                CoverageStatus::No,
                CoverageStatus::Unassessed,
            ][rng.below(4)];
            ws.coverage.push(Sourced::new(CoverageEntry {
                issue: Label::parse(label).unwrap(),
                status,
                status_note: if rng.chance(1, 2) {
                    format!("note {}", rng.below(100))
                } else {
                    String::new()
                },
                result: format!("result {}", rng.below(1000)),
            }));
        }
    }

    for sag in &ws.sags {
        if rng.chance(2, 3) {
            ws.evals.push(Sourced::new(EvaluationRecord {
                sag: sag.label.clone(),
                method: EvaluationMethod::ALL[rng.below(EvaluationMethod::ALL.len())],
                selection: [
                    SelectionAssessment::Appropriate,
                    SelectionAssessment::Questionable,
                    SelectionAssessment::Inappropriate,
                ][rng.below(3)],
                selection_rationale: format!("selection rationale {}", rng.below(100)),
                application: [
                    ApplicationAssessment::Good,
                    ApplicationAssessment::Moderate,
                    ApplicationAssessment::Poor,
                ][rng.below(3)],
                application_rationale: format!("application rationale {}", rng.below(100)),
                notes: rng.chance(1, 3).then(|| "extra note".to_string()),
            }));
        }
    }

    if rng.chance(2, 3) {
        let mut quality = FrpQuality::default();
        for slot in quality.answers.iter_mut() {
            if rng.chance(3, 4) {
                *slot = Some(QualityAnswer {
                    yes: rng.chance(1, 2),
                    reason: format!("reason {}", rng.below(100)),
                });
            }
        }
        quality.summary = "a generated summary".to_string();
        ws.frp_quality = Some(Sourced::new(quality));
    }
    if rng.chance(2, 3) {
        ws.justification = Some(Sourced::new(Justification {
            validity: "generated validity argument".to_string(),
            importance: "generated importance argument".to_string(),
        }));
    }
    for _ in 0..rng.below(3) {
        ws.opportunities.push(Sourced::new(Opportunity {
            source_step: [6u8, 9, 10][rng.below(3)],
            description: format!("opportunity {}", rng.below(1000)),
            skills: "skill set".to_string(),
            knowledge: "knowledge set".to_string(),
            resources: "resource set".to_string(),
        }));
    }
    for _ in 0..rng.below(4) {
        ws.knowledge.push(Sourced::new(KnowledgeEntry {
            area: KnowledgeArea::ALL[rng.below(KnowledgeArea::ALL.len())],
            description: format!("learnt item {}", rng.below(1000)),
        }));
    }

    ws
}

/// Strategy form of [`build_workspace`].
pub fn arb_workspace() -> impl Strategy<Value = Workspace> {
    (arb_issue_labels(), any::<u64>()).prop_map(|(labels, seed)| build_workspace(&labels, seed))
}

/// Split canonical text into record blocks and reassemble them in a
/// seed-shuffled order.
pub fn shuffle_blocks(text: &str, seed: u64) -> String {
    let mut blocks: Vec<&str> = text.split("\n\n").collect();
    let mut rng = Rng::new(seed);
    rng.shuffle(&mut blocks);
    let mut out = blocks.join("\n\n");
    if !out.ends_with('\n') {
        out.push('\n');
    }
    out
}
