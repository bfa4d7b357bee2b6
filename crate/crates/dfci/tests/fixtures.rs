//! The shipped fixtures under `models/` must stay byte-identical to what
//! the library builds: `.msc` sources equal to `serialize()` of the
//! built-in documents, golden traces equal to the seed-7 reference run,
//! and the golden ledger equal to its chain. `cargo run --example
//! regen_fixtures` rewrites them after a deliberate model change.

use std::fs;
use std::path::PathBuf;

use dfci::conformance::{check_trace, Verdict};
use dfci::custody::CustodyChain;
use dfci::objectives::check_objectives;
use dfci::protocols::{compose_case, protocol_init, protocol_investigation, protocol_trial};
use dfci::sim::{simulate, SimConfig};
use dfci::trace::{read_trace_file, write_trace_str};

fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models")
}

#[test]
fn msc_sources_are_byte_identical_to_serialization() {
    for doc in [protocol_init(), protocol_investigation(), protocol_trial()] {
        let path = models_dir().join(format!("{}.msc", doc.name));
        let shipped = fs::read_to_string(&path).unwrap();
        assert_eq!(shipped, dfci::serialize(&doc), "{} drifted", path.display());
        assert_eq!(dfci::parse(&shipped).unwrap(), doc);
    }
}

#[test]
fn golden_traces_match_the_reference_run() {
    let case = compose_case();
    for doc in [
        &case.init,
        &case.investigation,
        &case.trial,
        &case.composition,
    ] {
        let path = models_dir().join(format!("golden_{}.jsonl", doc.name));
        let shipped = fs::read_to_string(&path).unwrap();
        let (trace, _) = simulate(doc, &SimConfig::new(7)).unwrap();
        assert_eq!(
            shipped,
            write_trace_str(&trace),
            "{} drifted",
            path.display()
        );
    }
}

#[test]
fn golden_ledger_matches_and_verifies() {
    let case = compose_case();
    let (_, chain) = simulate(&case.composition, &SimConfig::new(7)).unwrap();
    let chain = chain.unwrap();
    let path = models_dir().join("golden_case.custody.json");
    assert_eq!(fs::read_to_string(&path).unwrap(), chain.to_json());
    let loaded = CustodyChain::read_file(&path).unwrap();
    assert_eq!(loaded.case_id, "golden_case");
    assert!(loaded.verify().is_valid());
    assert_eq!(loaded.len(), 6);
}

#[test]
fn golden_traces_conform_and_satisfy_objectives() {
    let case = compose_case();
    for doc in [
        &case.init,
        &case.investigation,
        &case.trial,
        &case.composition,
    ] {
        let path = models_dir().join(format!("golden_{}.jsonl", doc.name));
        let trace = read_trace_file(&path).unwrap();
        assert_eq!(
            check_trace(doc, &trace).unwrap().verdict,
            Verdict::Conformant,
            "{}",
            doc.name
        );
        assert!(check_objectives(doc, &trace).unwrap().all_satisfied());
    }
}
