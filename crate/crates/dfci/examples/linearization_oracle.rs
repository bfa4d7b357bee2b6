//! Exhaustive linearization enumeration: every admissible interleaving
//! of a small chart, and the brute-force conformance oracle built on it.
//!
//! ```bash
//! cargo run --example linearization_oracle
//! ```

use dfci::graph::{compile, FragmentExpansion};
use dfci::linearize::linearizations;
use dfci::model::{Item, Lifeline, MessageSpec, MscDocument};
use dfci::oracle::oracle_check;

fn independent(k: usize) -> MscDocument {
    let mut doc = MscDocument::new("par");
    for i in 0..k {
        doc.lifelines.push(Lifeline::new(format!("A{i}")));
        doc.lifelines.push(Lifeline::new(format!("B{i}")));
        doc.body.push(Item::Message(MessageSpec::new(
            format!("{}", i + 1),
            format!("A{i}"),
            format!("B{i}"),
            "m",
        )));
    }
    doc
}

fn main() {
    // k pairwise-independent messages interleave in (2k)!/2^k ways.
    for k in 1..=3 {
        let doc = independent(k);
        let graph = compile(&doc).unwrap();
        let expansion = FragmentExpansion::take_all(&graph, 1);
        let all = linearizations(&graph, &expansion, 10_000).unwrap();
        println!("{k} independent message(s): {} linearizations", all.len());
        if k == 2 {
            for seq in &all {
                let rendered: Vec<String> = seq
                    .iter()
                    .map(|s| format!("{}({})", s.kind, s.msg_id))
                    .collect();
                println!("  {}", rendered.join(" "));
            }
        }
    }

    // The oracle checks membership of a trace in that enumeration.
    let doc = independent(2);
    let graph = compile(&doc).unwrap();
    let expansion = FragmentExpansion::take_all(&graph, 1);
    let all = linearizations(&graph, &expansion, 10_000).unwrap();
    let good: Vec<_> = all[3]
        .iter()
        .enumerate()
        .map(|(i, s)| dfci::TraceEvent {
            seq: i as u64,
            ts: format!("2026-01-01T00:00:{i:02}Z"),
            protocol: doc.name.clone(),
            msg_id: s.msg_id.clone(),
            kind: s.kind,
            from: s.from.clone(),
            to: s.to.clone(),
            payload_digest: "0".repeat(64),
            meta: Default::default(),
        })
        .collect();
    println!(
        "a sampled interleaving: {:?}",
        oracle_check(&doc, &good).unwrap()
    );

    let mut bad = good;
    bad.swap(0, 3); // receive before send
    for (i, e) in bad.iter_mut().enumerate() {
        e.seq = i as u64;
    }
    println!(
        "after swapping send/recv: {:?}",
        oracle_check(&doc, &bad).unwrap()
    );
}
