//! Custody coverage over the composed case: the ledger must open with a
//! seizure no later than the charted seizure message and stay alive
//! until the sentence.
//!
//! ```bash
//! cargo run --example custody_coverage
//! ```

use dfci::coverage::check_custody_coverage;
use dfci::custody::CustodyChain;
use dfci::protocols::compose_case;
use dfci::sim::{simulate, SimConfig};

fn main() {
    let case = compose_case();
    let (trace, chain) = simulate(&case.composition, &SimConfig::new(7)).unwrap();
    let chain = chain.expect("the composed case declares a custody span");

    println!(
        "custody span: {} .. {}",
        case.custody_span.start, case.custody_span.end
    );
    for entry in &chain.entries {
        println!(
            "  [{}] {:<8} at {}",
            entry.index,
            entry.action.to_string(),
            entry.ts
        );
    }

    let report = check_custody_coverage(&case.composition, &trace, &chain).unwrap();
    println!("full ledger covered: {}", report.covered);

    // Custody abandoned after the laboratory examination: the trial is
    // no longer covered.
    let truncated = CustodyChain::from_entries(chain.case_id.clone(), chain.entries[..4].to_vec());
    let report = check_custody_coverage(&case.composition, &trace, &truncated).unwrap();
    println!("truncated ledger covered: {}", report.covered);
    for gap in &report.gaps {
        println!("  gap {}: {}", gap.kind, gap.detail);
    }
}
