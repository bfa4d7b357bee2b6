//! The built-in case protocols — `init`, `investigation`, `trial` — and
//! their sequential composition into one full case document.
//!
//! Message numbering follows the charted steps, including the split
//! steps (`2a`/`2b`, `9a`/`9b` in the trial, where one charted arrow has
//! two receivers) and the declared gap `2`–`5` in `init`, whose content
//! is not documented anywhere and is recorded as a note.

use crate::model::{
    CustodySpan, Fragment, Item, Lifeline, LifelineAlias, LoopBound, MessageSpec, MscDocument,
    ObjectiveSpec, Phase, Predicate, Scene,
};

/// Names accepted by `builtin:` document references.
pub const BUILTIN_NAMES: [&str; 4] = ["init", "investigation", "trial", "case"];

fn prosecutor() -> Lifeline {
    Lifeline::new("Prosecutor").with_role("prosecution")
}

fn df_expert() -> Lifeline {
    Lifeline::named("DFExpert", "DF Expert").with_role("forensics")
}

fn suspect() -> Lifeline {
    Lifeline::new("Suspect").with_role("defence")
}

/// Opening protocol: the report of a potential crime, retention of the
/// digital-forensics expert, and notification of the suspect at the
/// crime scene.
pub fn protocol_init() -> MscDocument {
    let mut doc = MscDocument::new("init");
    doc.lifelines = vec![
        Lifeline::named("ThirdParty", "Third Party").with_role("informant"),
        prosecutor(),
        Lifeline::new("Police").with_role("law_enforcement"),
        df_expert(),
        suspect(),
    ];
    doc.body = vec![
        Item::Message(MessageSpec::new(
            "0",
            "ThirdParty",
            "Prosecutor",
            "notitia criminis",
        )),
        Item::Message(MessageSpec::new(
            "1",
            "Prosecutor",
            "Police",
            "orders for preliminary investigations",
        )),
        Item::Note("msg ids 2-5 are reserved numbering gaps".to_string()),
        Item::Message(MessageSpec::new(
            "6",
            "Prosecutor",
            "DFExpert",
            "retain for case",
        )),
        Item::Scene(Scene::new("crime scene")),
        Item::Message(MessageSpec::new(
            "7",
            "Prosecutor",
            "Suspect",
            "notify of investigation",
        )),
        Item::Message(MessageSpec::new(
            "8",
            "Prosecutor",
            "Suspect",
            "show search warrant",
        )),
    ];
    doc.objectives = vec![ObjectiveSpec {
        id: "suspect_has_warrant".to_string(),
        description: "the suspect receives the search warrant".to_string(),
        predicate: Predicate::Eventually("8".to_string()),
    }];
    doc.stamp_scenes();
    doc
}

/// Investigation protocol: interrogation cycle, device identification,
/// collection with optional sealing, laboratory examination, and the
/// evidence report. Custody runs from the seizure (5) to the report (10).
pub fn protocol_investigation() -> MscDocument {
    let mut doc = MscDocument::new("investigation");
    doc.lifelines = vec![
        prosecutor(),
        suspect(),
        df_expert(),
        Lifeline::named("DFTools", "DF Tools").with_role("tooling"),
    ];
    doc.body = vec![
        Item::Fragment(Fragment::repeated(
            1,
            LoopBound::Unbounded,
            vec![
                Item::Message(MessageSpec::new(
                    "1",
                    "Prosecutor",
                    "Suspect",
                    "interrogation question",
                )),
                Item::Message(MessageSpec::new("2", "Suspect", "Prosecutor", "answer")),
            ],
        )),
        Item::Message(
            MessageSpec::new("3", "Prosecutor", "DFExpert", "additional case information")
                .with_phase(Phase::Identification),
        ),
        Item::Message(
            MessageSpec::new("4", "DFExpert", "Prosecutor", "list of target devices")
                .with_phase(Phase::Identification),
        ),
        Item::Message(
            MessageSpec::new("5", "DFExpert", "Suspect", "request/seize devices")
                .with_phase(Phase::Collection),
        ),
        Item::Message(
            MessageSpec::new("6", "DFExpert", "Suspect", "show seals")
                .optional()
                .with_phase(Phase::Collection),
        ),
        Item::Message(
            MessageSpec::new("7", "Suspect", "DFExpert", "system under investigation")
                .with_phase(Phase::Collection),
        ),
        Item::Scene(Scene::new("Digital Forensics Laboratory")),
        Item::Message(
            MessageSpec::new("8", "DFExpert", "DFTools", "system + filters")
                .with_phase(Phase::Examination),
        ),
        Item::Message(
            MessageSpec::new("9", "DFTools", "DFExpert", "extracted data/information")
                .with_phase(Phase::Examination),
        ),
        Item::Message(
            MessageSpec::new("10", "DFExpert", "Prosecutor", "digital evidence report")
                .with_phase(Phase::Analysis),
        ),
    ];
    doc.objectives = vec![ObjectiveSpec {
        id: "evidence_set_obtained".to_string(),
        description: "the investigation yields an evidence report".to_string(),
        predicate: Predicate::Eventually("10".to_string()),
    }];
    doc.custody_span = Some(CustodySpan {
        start: "5".to_string(),
        end: "10".to_string(),
    });
    doc.stamp_scenes();
    doc
}

/// Trial protocol: documentation handover, a hearing cycle in which each
/// principal may challenge the expert with a technical request, and the
/// sentence closing the case.
pub fn protocol_trial() -> MscDocument {
    let mut doc = MscDocument::new("trial");
    doc.lifelines = vec![
        prosecutor(),
        Lifeline::new("Defendant").with_role("defence"),
        Lifeline::new("Judge").with_role("judiciary"),
        df_expert(),
    ];
    let request_pair = |req: &str, req_from: &str, ans: &str, ans_to: &str| {
        Item::Fragment(Fragment::opt(vec![
            Item::Message(
                MessageSpec::new(req, req_from, "DFExpert", "technical request")
                    .with_phase(Phase::Presentation),
            ),
            Item::Message(
                MessageSpec::new(ans, "DFExpert", ans_to, "technical answer")
                    .with_phase(Phase::Presentation),
            ),
        ]))
    };
    doc.body = vec![
        Item::Message(MessageSpec::new(
            "1",
            "Prosecutor",
            "Judge",
            "documentation",
        )),
        Item::Scene(Scene::new("court")),
        Item::Fragment(Fragment::repeated(
            1,
            LoopBound::Unbounded,
            vec![
                Item::Message(
                    MessageSpec::new("2a", "Prosecutor", "Judge", "charge proof")
                        .with_phase(Phase::Presentation),
                ),
                Item::Message(
                    MessageSpec::new("2b", "Defendant", "Judge", "defence proof")
                        .with_phase(Phase::Presentation),
                ),
                request_pair("3", "Prosecutor", "4", "Prosecutor"),
                request_pair("5", "Judge", "6", "Judge"),
                request_pair("7", "Defendant", "8", "Defendant"),
            ],
        )),
        Item::Message(
            MessageSpec::new("9a", "Judge", "Prosecutor", "sentence").with_phase(Phase::Decision),
        ),
        Item::Message(
            MessageSpec::new("9b", "Judge", "Defendant", "sentence").with_phase(Phase::Decision),
        ),
    ];
    doc.objectives = vec![
        ObjectiveSpec {
            id: "sentence_delivered".to_string(),
            description: "the defendant receives a sentence".to_string(),
            predicate: Predicate::Eventually("9b".to_string()),
        },
        ObjectiveSpec {
            id: "fair_process".to_string(),
            description: "the run completes cleanly and every technical request sent is answered"
                .to_string(),
            predicate: Predicate::Conformant
                .and(Predicate::Answered {
                    request: "3".to_string(),
                    answer: "4".to_string(),
                })
                .and(Predicate::Answered {
                    request: "5".to_string(),
                    answer: "6".to_string(),
                })
                .and(Predicate::Answered {
                    request: "7".to_string(),
                    answer: "8".to_string(),
                }),
        },
    ];
    doc.stamp_scenes();
    doc
}

/// All three protocols plus their composition into a single document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfciCase {
    pub init: MscDocument,
    pub investigation: MscDocument,
    pub trial: MscDocument,
    /// The three bodies concatenated in order, message ids qualified by
    /// protocol name, custody spanning from the seizure to the sentence.
    pub composition: MscDocument,
    pub custody_span: CustodySpan,
}

/// Compose the three protocols into one case document. Message ids are
/// qualified (`init.0` … `trial.9b`); the suspect is renamed to the
/// defendant at the trial boundary through a lifeline alias, so traces
/// may use either name.
pub fn compose_case() -> DfciCase {
    let init = protocol_init();
    let investigation = protocol_investigation();
    let trial = protocol_trial();

    let mut composition = MscDocument::new("case");
    composition.lifelines = vec![
        Lifeline::named("ThirdParty", "Third Party").with_role("informant"),
        prosecutor(),
        Lifeline::new("Police").with_role("law_enforcement"),
        df_expert(),
        suspect(),
        Lifeline::named("DFTools", "DF Tools").with_role("tooling"),
        Lifeline::new("Judge").with_role("judiciary"),
    ];
    composition.aliases = vec![LifelineAlias {
        alias: "Defendant".to_string(),
        canonical: "Suspect".to_string(),
    }];

    for part in [&init, &investigation, &trial] {
        composition
            .body
            .extend(qualify_items(&part.body, &part.name));
        for objective in &part.objectives {
            composition.objectives.push(ObjectiveSpec {
                id: objective.id.clone(),
                description: objective.description.clone(),
                predicate: qualify_pred(&objective.predicate, &part.name),
            });
        }
    }
    let custody_span = CustodySpan {
        start: "investigation.5".to_string(),
        end: "trial.9b".to_string(),
    };
    composition.custody_span = Some(custody_span.clone());
    composition.stamp_scenes();

    DfciCase {
        init,
        investigation,
        trial,
        composition,
        custody_span,
    }
}

fn qualify_items(items: &[Item], protocol: &str) -> Vec<Item> {
    items
        .iter()
        .map(|item| match item {
            Item::Message(m) => {
                let mut m = m.clone();
                m.msg_id = format!("{protocol}.{}", m.msg_id);
                Item::Message(m)
            }
            Item::Fragment(f) => Item::Fragment(Fragment {
                kind: f.kind,
                body: qualify_items(&f.body, protocol),
            }),
            other => other.clone(),
        })
        .collect()
}

fn qualify_pred(pred: &Predicate, protocol: &str) -> Predicate {
    match pred {
        Predicate::Eventually(m) => Predicate::Eventually(format!("{protocol}.{m}")),
        Predicate::Conformant => Predicate::Conformant,
        Predicate::Answered { request, answer } => Predicate::Answered {
            request: format!("{protocol}.{request}"),
            answer: format!("{protocol}.{answer}"),
        },
        Predicate::And(l, r) => Predicate::And(
            Box::new(qualify_pred(l, protocol)),
            Box::new(qualify_pred(r, protocol)),
        ),
        Predicate::Or(l, r) => Predicate::Or(
            Box::new(qualify_pred(l, protocol)),
            Box::new(qualify_pred(r, protocol)),
        ),
    }
}

/// Resolve a `builtin:` name to its document.
pub fn builtin(name: &str) -> Option<MscDocument> {
    match name {
        "init" => Some(protocol_init()),
        "investigation" => Some(protocol_investigation()),
        "trial" => Some(protocol_trial()),
        "case" => Some(compose_case().composition),
        _ => None,
    }
}
