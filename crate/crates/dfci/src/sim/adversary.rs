//! Adversary exercise: inject each fault kind on each message and record
//! which detector notices. The detectors are exactly the toolkit's
//! verification surfaces — trace conformance, functional objectives,
//! ledger integrity, and the trace/ledger digest cross-check.

use std::fmt::Write as _;

use serde::Serialize;

use crate::conformance::{check_trace, Verdict};
use crate::custody::CustodyChain;
use crate::model::MscDocument;
use crate::objectives::check_objectives;
use crate::trace::TraceEvent;

use super::{simulate, FaultKind, FaultRule, SimConfig, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    Conformance,
    Objective,
    Custody,
    DigestMismatch,
}

impl std::fmt::Display for Detector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Detector::Conformance => "conformance",
            Detector::Objective => "objective",
            Detector::Custody => "custody",
            Detector::DigestMismatch => "digest_mismatch",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetectionCell {
    pub msg_id: String,
    pub kind: FaultKind,
    pub seed: u64,
    /// Every detector that fired, in fixed precedence order; empty when
    /// the fault went unnoticed.
    pub detectors: Vec<Detector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetectionReport {
    pub document: String,
    pub cells: Vec<DetectionCell>,
}

impl DetectionReport {
    pub fn cell(&self, msg_id: &str, kind: FaultKind, seed: u64) -> Option<&DetectionCell> {
        self.cells
            .iter()
            .find(|c| c.msg_id == msg_id && c.kind == kind && c.seed == seed)
    }

    /// Aligned-column rendering, one row per cell.
    pub fn render_text(&self) -> String {
        let mut rows: Vec<[String; 4]> = vec![[
            "message".to_string(),
            "fault".to_string(),
            "seed".to_string(),
            "detected_by".to_string(),
        ]];
        for cell in &self.cells {
            let detectors = if cell.detectors.is_empty() {
                "none".to_string()
            } else {
                cell.detectors
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            rows.push([
                cell.msg_id.clone(),
                cell.kind.to_string(),
                cell.seed.to_string(),
                detectors,
            ]);
        }
        let mut widths = [0usize; 4];
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row.iter()) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = format!("adversary matrix for {}\n", self.document);
        for row in rows {
            let mut line = String::new();
            for (i, cell) in row.iter().enumerate() {
                let _ = write!(line, "{cell:<width$}", width = widths[i] + 2);
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DigestMismatch {
    pub entry_index: u64,
    pub payload_digest: String,
}

/// Ledger entries whose anchor event (matched by timestamp) is present
/// in the trace with a different payload digest — the sign of content
/// altered after custody recorded it. Entries whose anchor event is
/// absent altogether are not mismatches; an omission is the conformance
/// checker's to notice.
pub fn digest_cross_check(trace: &[TraceEvent], chain: &CustodyChain) -> Vec<DigestMismatch> {
    chain
        .entries
        .iter()
        .filter(|entry| {
            trace
                .iter()
                .any(|e| e.ts == entry.ts && e.payload_digest != entry.payload_digest)
        })
        .map(|entry| DigestMismatch {
            entry_index: entry.index,
            payload_digest: entry.payload_digest.clone(),
        })
        .collect()
}

/// For every (message, fault kind, seed), run a single-fault simulation
/// at probability 1 and record which detectors fire.
pub fn adversary_matrix(
    doc: &MscDocument,
    kinds: &[FaultKind],
    seeds: &[u64],
) -> Result<DetectionReport, SimError> {
    let mut cells = Vec::new();
    for message in doc.messages() {
        for &kind in kinds {
            for &seed in seeds {
                let config =
                    SimConfig::new(seed).with_fault(FaultRule::certain(&message.msg_id, kind));
                let (trace, chain) = simulate(doc, &config)?;

                let mut detectors = Vec::new();
                let conformance =
                    check_trace(doc, &trace).map_err(|e| SimError::Check(e.to_string()))?;
                if conformance.verdict == Verdict::Nonconformant {
                    detectors.push(Detector::Conformance);
                }
                let objectives =
                    check_objectives(doc, &trace).map_err(|e| SimError::Check(e.to_string()))?;
                if !objectives.all_satisfied() {
                    detectors.push(Detector::Objective);
                }
                if let Some(chain) = &chain {
                    if !chain.verify().is_valid() {
                        detectors.push(Detector::Custody);
                    }
                    if !digest_cross_check(&trace, chain).is_empty() {
                        detectors.push(Detector::DigestMismatch);
                    }
                }
                cells.push(DetectionCell {
                    msg_id: message.msg_id.clone(),
                    kind,
                    seed,
                    detectors,
                });
            }
        }
    }
    Ok(DetectionReport {
        document: doc.name.clone(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{protocol_init, protocol_investigation};

    #[test]
    fn dropping_the_warrant_violates_the_objective() {
        let doc = protocol_init();
        let report = adversary_matrix(&doc, &[FaultKind::Drop], &[7]).unwrap();
        let cell = report.cell("8", FaultKind::Drop, 7).unwrap();
        assert!(cell.detectors.contains(&Detector::Objective));
        assert!(cell.detectors.contains(&Detector::Conformance));
    }

    #[test]
    fn dropping_the_optional_seal_goes_unnoticed() {
        let doc = protocol_investigation();
        let report = adversary_matrix(&doc, &[FaultKind::Drop], &[7]).unwrap();
        let cell = report.cell("6", FaultKind::Drop, 7).unwrap();
        assert!(cell.detectors.is_empty(), "{:?}", cell.detectors);
    }

    #[test]
    fn tampering_a_ledger_entry_is_detected_by_verification() {
        let doc = protocol_investigation();
        let (_, chain) = simulate(&doc, &SimConfig::new(7)).unwrap();
        let mut chain = chain.unwrap();
        chain.entries[3].actor = "Intruder".into();
        assert!(!chain.verify().is_valid());
    }

    #[test]
    fn text_rendering_is_aligned_and_total() {
        let doc = protocol_init();
        let report = adversary_matrix(&doc, &[FaultKind::Drop, FaultKind::Tamper], &[1]).unwrap();
        let text = report.render_text();
        assert!(text.contains("message"));
        assert_eq!(text.lines().count(), 1 + 1 + doc.messages().len() * 2);
    }
}
