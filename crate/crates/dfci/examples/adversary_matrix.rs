//! Full detection matrix: every fault kind against every message of the
//! built-in protocols, with the detector that noticed (or `none`).
//!
//! ```bash
//! cargo run --example adversary_matrix
//! ```

use dfci::protocols::{protocol_init, protocol_investigation, protocol_trial};
use dfci::sim::{adversary_matrix, FaultKind};

fn main() {
    for doc in [protocol_init(), protocol_investigation(), protocol_trial()] {
        let report = adversary_matrix(&doc, &FaultKind::ALL, &[7]).unwrap();
        print!("{}", report.render_text());
        println!();
    }
}
