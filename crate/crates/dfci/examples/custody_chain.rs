//! Hash-chained custody ledgers: building one across the evidence
//! lifecycle, verifying it, and watching tampering get caught.
//!
//! ```bash
//! cargo run --example custody_chain
//! ```

use dfci::custody::{open_chain, CustodyAction, EntryDraft, VerifyResult};

fn draft(ts: &str, actor: &str, action: CustodyAction, digest_seed: u8) -> EntryDraft {
    EntryDraft::new(
        ts,
        actor,
        action,
        "device_set",
        format!("{:02x}", digest_seed).repeat(32),
    )
}

fn main() {
    let chain = open_chain(
        "case-2026-014",
        draft(
            "2026-03-02T09:15:00Z",
            "DFExpert",
            CustodyAction::Seize,
            0x11,
        ),
    )
    .unwrap()
    .append_entry(draft(
        "2026-03-02T09:20:00Z",
        "DFExpert",
        CustodyAction::Seal,
        0x22,
    ))
    .unwrap()
    .append_entry(draft(
        "2026-03-02T10:05:00Z",
        "DFExpert",
        CustodyAction::Transfer,
        0x33,
    ))
    .unwrap()
    .append_entry(draft(
        "2026-03-03T14:00:00Z",
        "DFExpert",
        CustodyAction::Examine,
        0x44,
    ))
    .unwrap()
    .append_entry(draft(
        "2026-04-11T11:30:00Z",
        "DFExpert",
        CustodyAction::Present,
        0x55,
    ))
    .unwrap();

    println!("case {} with {} entries", chain.case_id, chain.len());
    for entry in &chain.entries {
        println!(
            "  [{}] {:<8} by {:<9} hash {}..",
            entry.index,
            entry.action.to_string(),
            entry.actor,
            &entry.entry_hash[..12]
        );
    }
    println!("verify: {:?}", chain.verify());

    // Rewriting history breaks the chain at the rewritten entry.
    let mut tampered = chain.clone();
    tampered.entries[2].actor = "unknown".to_string();
    match tampered.verify() {
        VerifyResult::Invalid {
            index,
            check,
            detail,
        } => {
            println!("after editing entry 2: invalid at index {index} ({check}): {detail}");
        }
        VerifyResult::Valid => unreachable!("tampering must be detected"),
    }

    // So does deleting one.
    let mut shortened = chain.clone();
    shortened.entries.remove(3);
    println!("after deleting entry 3: {:?}", shortened.verify());

    // Appending to a broken chain is refused.
    println!(
        "append to tampered chain: {:?}",
        tampered
            .append_entry(draft(
                "2026-04-12T08:00:00Z",
                "DFExpert",
                CustodyAction::Present,
                0x66
            ))
            .err()
    );
}
