//! Append-only, hash-chained chain-of-custody ledger.
//!
//! Every entry's `entry_hash` is the SHA-256 of the canonical
//! serialization of `(index, ts, actor, action, evidence_id,
//! payload_digest, prev_hash)` — those fields in that order, joined by
//! `\n`, digest rendered as lowercase hex. Entry 0 carries an all-zero
//! `prev_hash`; every later entry carries the previous `entry_hash`, so
//! any single-field tampering breaks verification at that index.
//!
//! Chains are values: appending returns a new chain and never mutates
//! the input. Concurrent appends to the same logical case must be
//! serialized by the caller.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// `prev_hash` of the genesis entry.
pub const GENESIS_HASH: &str = "0000000000000000000000000000000000000000000000000000000000000000";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CustodyAction {
    Seize,
    Seal,
    Transfer,
    Examine,
    Present,
}

impl CustodyAction {
    pub fn as_str(self) -> &'static str {
        match self {
            CustodyAction::Seize => "seize",
            CustodyAction::Seal => "seal",
            CustodyAction::Transfer => "transfer",
            CustodyAction::Examine => "examine",
            CustodyAction::Present => "present",
        }
    }
}

impl fmt::Display for CustodyAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustodyEntry {
    pub index: u64,
    /// ISO-8601 UTC timestamp, recorded as supplied.
    pub ts: String,
    /// Lifeline performing the action.
    pub actor: String,
    pub action: CustodyAction,
    pub evidence_id: String,
    /// SHA-256 of the evidence content or report, lowercase hex.
    pub payload_digest: String,
    pub prev_hash: String,
    pub entry_hash: String,
}

/// Entry fields supplied by the caller; index and hashes are computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryDraft {
    pub ts: String,
    pub actor: String,
    pub action: CustodyAction,
    pub evidence_id: String,
    pub payload_digest: String,
}

impl EntryDraft {
    pub fn new(
        ts: impl Into<String>,
        actor: impl Into<String>,
        action: CustodyAction,
        evidence_id: impl Into<String>,
        payload_digest: impl Into<String>,
    ) -> Self {
        EntryDraft {
            ts: ts.into(),
            actor: actor.into(),
            action,
            evidence_id: evidence_id.into(),
            payload_digest: payload_digest.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CustodyChain {
    pub case_id: String,
    pub entries: Vec<CustodyEntry>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CustodyError {
    #[error("a chain must be opened with a seize entry, got '{0}'")]
    InvalidFirstAction(CustodyActionName),
    #[error("chain fails verification at index {index}: {check}")]
    BrokenChain { index: u64, check: ChainCheck },
    #[error("document declares no custody span")]
    NoCustodySpan,
    #[error("timestamp '{0}' is not ISO-8601")]
    InvalidTimestamp(String),
    #[error("ledger file error: {0}")]
    File(String),
}

/// Owned action name for error display.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CustodyActionName(pub String);

impl fmt::Display for CustodyActionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Which invariant a failing entry broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainCheck {
    IndexContiguity,
    PrevHashLink,
    EntryHash,
}

impl fmt::Display for ChainCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ChainCheck::IndexContiguity => "index_contiguity",
            ChainCheck::PrevHashLink => "prev_hash_link",
            ChainCheck::EntryHash => "entry_hash",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum VerifyResult {
    Valid,
    Invalid {
        index: u64,
        check: ChainCheck,
        detail: String,
    },
}

impl VerifyResult {
    pub fn is_valid(&self) -> bool {
        matches!(self, VerifyResult::Valid)
    }
}

/// Canonical preimage: the seven fields in order, `\n`-joined.
pub fn entry_hash(
    index: u64,
    ts: &str,
    actor: &str,
    action: CustodyAction,
    evidence_id: &str,
    payload_digest: &str,
    prev_hash: &str,
) -> String {
    let preimage =
        format!("{index}\n{ts}\n{actor}\n{action}\n{evidence_id}\n{payload_digest}\n{prev_hash}");
    hex::encode(Sha256::digest(preimage.as_bytes()))
}

fn seal_entry(index: u64, prev_hash: &str, draft: EntryDraft) -> CustodyEntry {
    let hash = entry_hash(
        index,
        &draft.ts,
        &draft.actor,
        draft.action,
        &draft.evidence_id,
        &draft.payload_digest,
        prev_hash,
    );
    CustodyEntry {
        index,
        ts: draft.ts,
        actor: draft.actor,
        action: draft.action,
        evidence_id: draft.evidence_id,
        payload_digest: draft.payload_digest,
        prev_hash: prev_hash.to_string(),
        entry_hash: hash,
    }
}

/// Start a chain for a case; custody always opens with a seizure.
pub fn open_chain(
    case_id: impl Into<String>,
    first: EntryDraft,
) -> Result<CustodyChain, CustodyError> {
    if first.action != CustodyAction::Seize {
        return Err(CustodyError::InvalidFirstAction(CustodyActionName(
            first.action.to_string(),
        )));
    }
    Ok(CustodyChain {
        case_id: case_id.into(),
        entries: vec![seal_entry(0, GENESIS_HASH, first)],
    })
}

impl CustodyChain {
    pub fn from_entries(case_id: impl Into<String>, entries: Vec<CustodyEntry>) -> Self {
        CustodyChain {
            case_id: case_id.into(),
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last_hash(&self) -> &str {
        self.entries
            .last()
            .map(|e| e.entry_hash.as_str())
            .unwrap_or(GENESIS_HASH)
    }

    /// Append to a verified chain, returning the extended chain. The
    /// input is left untouched; a chain that no longer verifies cannot
    /// be extended.
    pub fn append_entry(&self, next: EntryDraft) -> Result<CustodyChain, CustodyError> {
        if let VerifyResult::Invalid { index, check, .. } = self.verify() {
            return Err(CustodyError::BrokenChain { index, check });
        }
        let mut entries = self.entries.clone();
        entries.push(seal_entry(
            self.entries.len() as u64,
            self.last_hash(),
            next,
        ));
        Ok(CustodyChain {
            case_id: self.case_id.clone(),
            entries,
        })
    }

    /// Check every hash and index invariant; reports the lowest failing
    /// index and which check failed.
    pub fn verify(&self) -> VerifyResult {
        for (pos, entry) in self.entries.iter().enumerate() {
            let index = pos as u64;
            if entry.index != index {
                return VerifyResult::Invalid {
                    index,
                    check: ChainCheck::IndexContiguity,
                    detail: format!("entry at position {pos} carries index {}", entry.index),
                };
            }
            let expected_prev = if pos == 0 {
                GENESIS_HASH
            } else {
                self.entries[pos - 1].entry_hash.as_str()
            };
            if entry.prev_hash != expected_prev {
                return VerifyResult::Invalid {
                    index,
                    check: ChainCheck::PrevHashLink,
                    detail: format!(
                        "prev_hash of entry {index} does not match the preceding entry"
                    ),
                };
            }
            let recomputed = entry_hash(
                entry.index,
                &entry.ts,
                &entry.actor,
                entry.action,
                &entry.evidence_id,
                &entry.payload_digest,
                &entry.prev_hash,
            );
            if entry.entry_hash != recomputed {
                return VerifyResult::Invalid {
                    index,
                    check: ChainCheck::EntryHash,
                    detail: format!("entry_hash of entry {index} does not match its fields"),
                };
            }
        }
        VerifyResult::Valid
    }

    /// Ledger file format: a JSON array of entries in index order.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.entries).expect("entries serialize");
        s.push('\n');
        s
    }

    pub fn write_file(&self, path: &Path) -> Result<(), CustodyError> {
        fs::write(path, self.to_json()).map_err(|e| CustodyError::File(e.to_string()))
    }

    /// Load a ledger file; the case id is taken from the file stem.
    pub fn read_file(path: &Path) -> Result<CustodyChain, CustodyError> {
        let text = fs::read_to_string(path).map_err(|e| CustodyError::File(e.to_string()))?;
        let entries: Vec<CustodyEntry> =
            serde_json::from_str(&text).map_err(|e| CustodyError::File(e.to_string()))?;
        let case_id = path
            .file_name()
            .and_then(|n| n.to_str())
            .map(|n| {
                n.trim_end_matches(".custody.json")
                    .trim_end_matches(".json")
            })
            .unwrap_or("case")
            .to_string();
        Ok(CustodyChain { case_id, entries })
    }
}
