//! Conformance and objective checking of recorded traces: a clean run,
//! a reordered run, and a prefix of an in-progress run.
//!
//! ```bash
//! cargo run --example check_trace
//! ```

use dfci::conformance::{check_trace, check_trace_mode, CheckMode};
use dfci::objectives::check_objectives;
use dfci::protocols::protocol_investigation;
use dfci::sim::{simulate, SimConfig};

fn main() {
    let doc = protocol_investigation();
    let (trace, _) = simulate(&doc, &SimConfig::new(7)).unwrap();

    let report = check_trace(&doc, &trace).unwrap();
    println!("clean run: {}", report.verdict);
    for objective in check_objectives(&doc, &trace).unwrap().objectives {
        println!("  objective {}: {}", objective.id, objective.status);
    }

    // Swap the evidence report in front of the lab examination.
    let mut reordered = trace.clone();
    let pos8 = reordered.iter().position(|e| e.msg_id == "8").unwrap();
    let tail: Vec<_> = reordered.split_off(pos8);
    let (report_events, rest): (Vec<_>, Vec<_>) = tail.into_iter().partition(|e| e.msg_id == "10");
    reordered.extend(report_events);
    reordered.extend(rest);
    for (i, e) in reordered.iter_mut().enumerate() {
        e.seq = i as u64;
    }
    let report = check_trace(&doc, &reordered).unwrap();
    println!("report delivered before examination: {}", report.verdict);
    for violation in &report.violations {
        println!(
            "  {} msg={} at={} {}",
            violation.kind, violation.msg_id, violation.at, violation.explanation
        );
    }

    // An in-progress case: fine as a prefix, incomplete as a whole.
    let partial = &trace[..8];
    println!(
        "first 8 events, complete mode: {}",
        check_trace(&doc, partial).unwrap().verdict
    );
    println!(
        "first 8 events, prefix mode:   {}",
        check_trace_mode(&doc, partial, CheckMode::Prefix)
            .unwrap()
            .verdict
    );
}
