//! Ledger properties: any single-field mutation of any entry is caught
//! at the right index, appending preserves validity, hashing is
//! deterministic.

mod common;

use dfci::custody::{open_chain, CustodyAction, CustodyChain, EntryDraft, VerifyResult};
use dfci::sim::rng::SplitMix64;
use proptest::prelude::*;

fn chain_of(len: usize, rng: &mut SplitMix64) -> CustodyChain {
    let actions = [
        CustodyAction::Seal,
        CustodyAction::Transfer,
        CustodyAction::Examine,
        CustodyAction::Present,
    ];
    let mut chain = open_chain(
        "case",
        EntryDraft::new(
            "2026-01-01T00:00:00Z",
            "DFExpert",
            CustodyAction::Seize,
            "device_set",
            SplitMix64::new(rng.next_u64()).next_digest(),
        ),
    )
    .unwrap();
    for i in 1..len {
        chain = chain
            .append_entry(EntryDraft::new(
                format!("2026-01-01T00:{:02}:00Z", i),
                format!("actor{}", rng.next_below(3)),
                actions[rng.next_below(4) as usize],
                "device_set",
                SplitMix64::new(rng.next_u64()).next_digest(),
            ))
            .unwrap();
    }
    chain
}

/// Overwrite one field of one entry with a different value; returns the
/// entry index.
fn mutate(chain: &mut CustodyChain, rng: &mut SplitMix64) -> u64 {
    let entry_idx = rng.next_below(chain.entries.len() as u64) as usize;
    let entry = &mut chain.entries[entry_idx];
    match rng.next_below(8) {
        0 => entry.index += 1 + rng.next_below(5),
        1 => entry.ts = format!("2031-06-0{}T12:00:00Z", 1 + rng.next_below(9)),
        2 => entry.actor = format!("intruder{}", rng.next_u64()),
        3 => {
            entry.action = if entry.action == CustodyAction::Seal {
                CustodyAction::Transfer
            } else {
                CustodyAction::Seal
            }
        }
        4 => entry.evidence_id = format!("planted{}", rng.next_u64()),
        5 => entry.payload_digest = rng.next_digest(),
        6 => entry.prev_hash = rng.next_digest(),
        _ => entry.entry_hash = rng.next_digest(),
    }
    entry_idx as u64
}

proptest! {
    #[test]
    fn any_single_field_mutation_is_detected_at_its_index(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let len = 1 + rng.next_below(8) as usize;
        let mut chain = chain_of(len, &mut rng);
        prop_assert!(chain.verify().is_valid());
        let mutated = mutate(&mut chain, &mut rng);
        match chain.verify() {
            VerifyResult::Invalid { index, .. } => prop_assert_eq!(index, mutated),
            VerifyResult::Valid => prop_assert!(false, "mutation went unnoticed"),
        }
    }

    #[test]
    fn append_preserves_validity(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let len = 1 + rng.next_below(6) as usize;
        let chain = chain_of(len, &mut rng);
        let extended = chain
            .append_entry(EntryDraft::new(
                "2026-01-01T01:00:00Z",
                "DFExpert",
                CustodyAction::Present,
                "device_set",
                rng.next_digest(),
            ))
            .unwrap();
        prop_assert!(extended.verify().is_valid());
        prop_assert_eq!(extended.len(), chain.len() + 1);
    }
}
