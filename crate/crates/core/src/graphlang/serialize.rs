use std::fmt::Write;

use crate::graph::{Graph, Literal, Wire};

/// Canonical `.fg` text. Wires are sorted (exec first, then data, each by
/// source then target); nodes appear in order of first use in that wire list,
/// unwired nodes last by id; parameters follow catalog order. Two-space
/// indent, trailing newline. Parsing the output yields a graph structurally
/// equal to the input.
pub fn serialize(g: &Graph) -> String {
    let mut exec: Vec<&Wire> = g.exec_wires.iter().collect();
    exec.sort();
    let mut data: Vec<&Wire> = g.data_wires.iter().collect();
    data.sort();

    let mut order: Vec<&str> = Vec::new();
    for w in exec.iter().chain(&data) {
        for id in [w.from.node.as_str(), w.to.node.as_str()] {
            if !order.contains(&id) {
                order.push(id);
            }
        }
    }
    let mut rest: Vec<&str> = g
        .nodes
        .iter()
        .map(|n| n.id.as_str())
        .filter(|id| !order.contains(id))
        .collect();
    rest.sort();
    order.extend(rest);

    let mut out = String::new();
    writeln!(out, "graph {} {{", g.name).unwrap();
    for n in order.iter().filter_map(|id| g.find(id)) {
        write!(out, "  node {} : {}", n.id, n.kind).unwrap();
        let spec = n.kind.spec();
        let mut params: Vec<_> = n.params.iter().collect();
        params.sort_by_key(|(name, _)| {
            spec.inputs
                .iter()
                .position(|i| i.name == name.as_str())
                .unwrap_or(usize::MAX)
        });
        if !params.is_empty() {
            let body: Vec<String> = params.iter().map(|(k, v)| format!("{k}={}", literal(v))).collect();
            write!(out, "({})", body.join(", ")).unwrap();
        }
        out.push('\n');
    }
    for (kw, wires) in [("exec", &exec), ("data", &data)] {
        for w in wires.iter() {
            writeln!(out, "  {kw} {} -> {}", w.from, w.to).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

fn number(x: f64) -> String {
    format!("{x:?}")
}

fn literal(l: &Literal) -> String {
    match l {
        Literal::Bool(b) => b.to_string(),
        Literal::Float(f) => number(*f),
        Literal::Text(s) => {
            let mut q = String::with_capacity(s.len() + 2);
            q.push('"');
            for c in s.chars() {
                match c {
                    '"' => q.push_str("\\\""),
                    '\\' => q.push_str("\\\\"),
                    '\n' => q.push_str("\\n"),
                    '\t' => q.push_str("\\t"),
                    '\r' => q.push_str("\\r"),
                    c => q.push(c),
                }
            }
            q.push('"');
            q
        }
        Literal::Triple([a, b, c]) => format!("({}, {}, {})", number(*a), number(*b), number(*c)),
    }
}
