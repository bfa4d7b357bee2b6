//! The three built-in case protocols and their composition.
//!
//! ```bash
//! cargo run --example builtin_protocols
//! ```

use dfci::protocols::{compose_case, protocol_init, protocol_investigation, protocol_trial};
use dfci::validate_document;

fn main() {
    for doc in [protocol_init(), protocol_investigation(), protocol_trial()] {
        println!("=== {} ===", doc.name);
        print!("{}", dfci::serialize(&doc));
        assert!(validate_document(&doc).is_empty());
        println!();
    }

    let case = compose_case();
    let composition = &case.composition;
    println!("=== composition ===");
    println!(
        "document '{}': {} lifelines, {} messages, custody {} .. {}",
        composition.name,
        composition.lifelines.len(),
        composition.messages().len(),
        case.custody_span.start,
        case.custody_span.end,
    );
    println!(
        "the Suspect answers to '{}' in the trial section: resolve_lifeline(\"Defendant\") = {:?}",
        composition.message("trial.9b").unwrap().to,
        composition.resolve_lifeline("Defendant"),
    );
    for objective in &composition.objectives {
        println!("objective {}: {}", objective.id, objective.description);
    }
}
