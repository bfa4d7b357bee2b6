//! Parse a chart from source text, echo its canonical form, and render
//! it as ASCII rows and as a DOT graph.
//!
//! ```bash
//! cargo run --example parse_and_render
//! ```

use dfci::{parse, render, serialize, RenderFormat};

const SOURCE: &str = r#"
# A two-party exchange with an optional acknowledgement.
protocol handover {
  actors Courier, Clerk: "Records Clerk";
  objective delivered: eventually(2);
  msg 1 Courier -> Clerk: "sealed envelope";
  opt {
    msg 2 Clerk -> Courier: "signed receipt";
  }
  scene "archive room";
  msg 3 Clerk -> Courier: "done" [phase=Decision];
}
"#;

fn main() {
    let doc = parse(SOURCE).expect("source is well-formed");
    println!("--- canonical form ---");
    print!("{}", serialize(&doc));
    println!("--- ascii ---");
    print!("{}", render(&doc, RenderFormat::Ascii));
    println!("--- dot ---");
    print!("{}", render(&doc, RenderFormat::Dot));

    // Parse errors carry the offending token and its position.
    let err = parse("protocol broken { actors A, B; msg 1 A -> A: \"loop\"; }").unwrap_err();
    println!("--- a parse error ---");
    println!("{err}");
}
