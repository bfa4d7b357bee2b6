//! The four fault kinds applied to a clean run, and which verification
//! surface notices each one.
//!
//! ```bash
//! cargo run --example simulate_faults
//! ```

use dfci::conformance::check_trace;
use dfci::objectives::check_objectives;
use dfci::protocols::protocol_investigation;
use dfci::sim::{digest_cross_check, simulate, FaultKind, FaultRule, SimConfig};

fn main() {
    let doc = protocol_investigation();

    for kind in FaultKind::ALL {
        let config = SimConfig::new(7).with_fault(FaultRule::certain("10", kind));
        let (trace, chain) = simulate(&doc, &config).unwrap();
        let chain = chain.unwrap();

        let conformance = check_trace(&doc, &trace).unwrap();
        let objectives = check_objectives(&doc, &trace).unwrap();
        let mismatches = digest_cross_check(&trace, &chain);

        println!("fault {kind} on msg 10:");
        println!("  trace events: {}", trace.len());
        println!("  conformance:  {}", conformance.verdict);
        for violation in &conformance.violations {
            println!(
                "    {} msg={} {}",
                violation.kind, violation.msg_id, violation.explanation
            );
        }
        println!(
            "  objectives:   {}",
            if objectives.all_satisfied() {
                "all satisfied"
            } else {
                "violated"
            }
        );
        println!("  ledger:       {:?}", chain.verify());
        println!(
            "  digest cross-check: {}",
            if mismatches.is_empty() {
                "clean".to_string()
            } else {
                format!("{} entr(ies) diverge from the trace", mismatches.len())
            }
        );
        println!();
    }
}
