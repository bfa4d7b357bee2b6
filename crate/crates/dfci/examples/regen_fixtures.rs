//! Rewrites the shipped fixtures under `models/`: the canonical `.msc`
//! sources of the built-in protocols, the golden traces produced by the
//! fault-free reference run (seed 7, optional regions taken, one loop
//! iteration), and the golden custody ledger of the composed case.
//!
//! ```bash
//! cargo run --example regen_fixtures
//! ```
//!
//! The test suite asserts byte-identity between these files and what the
//! library builds, so run this after any deliberate model change.

use std::fs;
use std::path::PathBuf;

use dfci::protocols::{compose_case, protocol_init, protocol_investigation, protocol_trial};
use dfci::sim::{simulate, SimConfig};
use dfci::trace::write_trace_str;

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models");
    fs::create_dir_all(&dir).expect("create models dir");

    let case = compose_case();
    for doc in [protocol_init(), protocol_investigation(), protocol_trial()] {
        let path = dir.join(format!("{}.msc", doc.name));
        fs::write(&path, dfci::serialize(&doc)).expect("write model");
        println!("wrote {}", path.display());
    }

    for doc in [
        &case.init,
        &case.investigation,
        &case.trial,
        &case.composition,
    ] {
        let (trace, chain) = simulate(doc, &SimConfig::new(7)).expect("reference run");
        let path = dir.join(format!("golden_{}.jsonl", doc.name));
        fs::write(&path, write_trace_str(&trace)).expect("write trace");
        println!("wrote {} ({} events)", path.display(), trace.len());
        if doc.name == "case" {
            let chain = chain.expect("case declares custody");
            let path = dir.join("golden_case.custody.json");
            chain.write_file(&path).expect("write ledger");
            println!("wrote {} ({} entries)", path.display(), chain.len());
        }
    }
}
