//! Parses a graph, prints its canonical text and JSON forms, and checks both
//! parse back to the same graph.

use flowgame::graphlang::{from_json, parse, serialize, to_json};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/assets/graphs/cube_removal.fg").into());
    let src = std::fs::read_to_string(&path).unwrap();
    let graph = parse(&src).unwrap_or_else(|diags| {
        for d in diags {
            eprintln!("{}", d.render(&path));
        }
        std::process::exit(2);
    });
    let text = serialize(&graph);
    let json = to_json(&graph);
    println!("{text}\n{json}");
    assert!(parse(&text).unwrap().structurally_eq(&graph));
    assert!(from_json(&json).unwrap().structurally_eq(&graph));
    println!("round trip ok: {} nodes", graph.nodes.len());
}
