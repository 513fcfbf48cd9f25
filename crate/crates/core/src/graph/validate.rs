//! Static checks over a [`Graph`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use super::catalog::{Category, NodeKind};
use super::model::{Graph, Literal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DiagCode {
    // produced by the parser
    SyntaxError,
    UnknownKind,
    UnknownPin,
    DuplicateNodeId,
    BadLiteral,
    // parser warning
    UnknownAxis,
    // produced by validation
    TypeMismatch,
    UnwiredInput,
    DataCycle,
    ExecCycle,
    CrossEventPayload,
    ExecIntoPure,
    ExecFanOut,
    MultipleDrivers,
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Where in the graph a diagnostic points. Wire indices are positions in
/// `Graph::exec_wires` / `Graph::data_wires`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum Location {
    Graph,
    Node { node: String },
    Pin { node: String, pin: String },
    ExecWire { index: usize },
    DataWire { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub location: Location,
    pub message: String,
}

impl Diagnostic {
    fn new(code: DiagCode, location: Location, message: impl Into<String>) -> Self {
        Self {
            code,
            location,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

/// Checks every graph invariant. An empty result means the graph may be
/// compiled and fired.
pub fn validate(g: &Graph) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, node) in g.nodes.iter().enumerate() {
        if index.contains_key(node.id.as_str()) {
            out.push(Diagnostic::new(
                DiagCode::DuplicateNodeId,
                Location::Node { node: node.id.clone() },
                format!("node id `{}` declared more than once", node.id),
            ));
        } else {
            index.insert(&node.id, i);
        }
    }

    check_params(g, &mut out);

    // Resolved data edges: (from node, output idx) -> (to node, input idx)
    let mut data_edges: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut drivers: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (wi, w) in g.data_wires.iter().enumerate() {
        let loc = Location::DataWire { index: wi };
        let (Some(&fi), Some(&ti)) = (index.get(w.from.node.as_str()), index.get(w.to.node.as_str())) else {
            let missing = if index.contains_key(w.from.node.as_str()) { &w.to.node } else { &w.from.node };
            out.push(Diagnostic::new(DiagCode::UnknownPin, loc, format!("no node named `{missing}`")));
            continue;
        };
        let (fs, ts) = (g.nodes[fi].kind.spec(), g.nodes[ti].kind.spec());
        let Some((oi, o)) = fs.output(&w.from.pin) else {
            out.push(Diagnostic::new(
                DiagCode::UnknownPin,
                loc,
                format!("`{}` is not a data output of {}", w.from, g.nodes[fi].kind),
            ));
            continue;
        };
        let Some((ii, inp)) = ts.input(&w.to.pin).filter(|(_, p)| p.wireable) else {
            out.push(Diagnostic::new(
                DiagCode::UnknownPin,
                loc,
                format!("`{}` is not a wireable data input of {}", w.to, g.nodes[ti].kind),
            ));
            continue;
        };
        if o.ty != inp.ty {
            out.push(Diagnostic::new(
                DiagCode::TypeMismatch,
                loc,
                format!("cannot wire {} `{}` into {} `{}`", o.ty, w.from, inp.ty, w.to),
            ));
            // the input is still driven; don't also report it unwired
            *drivers.entry((ti, ii)).or_default() += 1;
            continue;
        }
        *drivers.entry((ti, ii)).or_default() += 1;
        data_edges.push((fi, oi, ti, ii));
    }

    for (i, node) in g.nodes.iter().enumerate() {
        for (ii, inp) in node.kind.spec().inputs.iter().enumerate() {
            let n = drivers.get(&(i, ii)).copied().unwrap_or(0);
            let loc = Location::Pin {
                node: node.id.clone(),
                pin: inp.name.to_string(),
            };
            if n > 1 {
                out.push(Diagnostic::new(
                    DiagCode::MultipleDrivers,
                    loc,
                    format!("input `{}.{}` has {n} incoming wires", node.id, inp.name),
                ));
            } else if n == 0 && !inp.zero_default && !node.params.contains_key(inp.name) {
                out.push(Diagnostic::new(
                    DiagCode::UnwiredInput,
                    loc,
                    format!("input `{}.{}` has no wire and no literal", node.id, inp.name),
                ));
            }
        }
    }

    // Resolved exec edges: (from node, exec-out idx) -> to node
    let mut exec_edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut fan: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (wi, w) in g.exec_wires.iter().enumerate() {
        let loc = Location::ExecWire { index: wi };
        let (Some(&fi), Some(&ti)) = (index.get(w.from.node.as_str()), index.get(w.to.node.as_str())) else {
            let missing = if index.contains_key(w.from.node.as_str()) { &w.to.node } else { &w.from.node };
            out.push(Diagnostic::new(DiagCode::UnknownPin, loc, format!("no node named `{missing}`")));
            continue;
        };
        let (fk, tk) = (g.nodes[fi].kind, g.nodes[ti].kind);
        if fk.category() == Category::Pure || tk.category() == Category::Pure {
            let pure = if fk.category() == Category::Pure { &w.from.node } else { &w.to.node };
            out.push(Diagnostic::new(
                DiagCode::ExecIntoPure,
                loc,
                format!("exec wire touches pure node `{pure}`, which has no exec pins"),
            ));
            continue;
        }
        let Some(oi) = fk.spec().exec_out(&w.from.pin) else {
            out.push(Diagnostic::new(
                DiagCode::UnknownPin,
                loc,
                format!("`{}` is not an exec output of {fk}", w.from),
            ));
            continue;
        };
        if !tk.spec().exec_in || w.to.pin != "in" {
            out.push(Diagnostic::new(
                DiagCode::UnknownPin,
                loc,
                format!("`{}` is not an exec input of {tk}", w.to),
            ));
            continue;
        }
        let count = fan.entry((fi, oi)).or_default();
        *count += 1;
        if *count == 2 {
            out.push(Diagnostic::new(
                DiagCode::ExecFanOut,
                Location::Pin {
                    node: w.from.node.clone(),
                    pin: w.from.pin.clone(),
                },
                format!("exec output `{}` has more than one outgoing wire", w.from),
            ));
        }
        exec_edges.push((fi, oi, ti));
    }

    let n = g.nodes.len();
    let mut exec_adj = vec![Vec::new(); n];
    for &(f, _, t) in &exec_edges {
        exec_adj[f].push(t);
    }
    let exec_cycle = find_cycle(&exec_adj);
    if let Some(node) = exec_cycle {
        out.push(Diagnostic::new(
            DiagCode::ExecCycle,
            Location::Node { node: g.nodes[node].id.clone() },
            format!("exec flow through `{}` loops back on itself", g.nodes[node].id),
        ));
    }

    // Data dependency: consumer -> producer.
    let mut deps = vec![Vec::new(); n];
    for &(f, _, t, _) in &data_edges {
        deps[t].push(f);
    }
    let data_cycle = find_cycle(&deps);
    if let Some(node) = data_cycle {
        out.push(Diagnostic::new(
            DiagCode::DataCycle,
            Location::Node { node: g.nodes[node].id.clone() },
            format!("data dependencies of `{}` form a cycle", g.nodes[node].id),
        ));
    }

    if exec_cycle.is_none() && data_cycle.is_none() {
        check_payload_scope(g, &exec_adj, &data_edges, &mut out);
    }

    out
}

fn check_params(g: &Graph, out: &mut Vec<Diagnostic>) {
    for node in &g.nodes {
        let spec = node.kind.spec();
        for (name, lit) in &node.params {
            let loc = Location::Pin {
                node: node.id.clone(),
                pin: name.clone(),
            };
            match spec.input(name) {
                None => out.push(Diagnostic::new(
                    DiagCode::UnknownPin,
                    loc,
                    format!("{} has no parameter `{name}`", node.kind),
                )),
                Some((_, inp)) => {
                    if lit.to_value(inp.ty).is_none() {
                        out.push(Diagnostic::new(
                            DiagCode::BadLiteral,
                            loc,
                            format!("`{name}` expects a finite {} literal, found {}", inp.ty, lit.describe()),
                        ));
                    }
                }
            }
        }
    }
}

/// Returns some node on a cycle, if any. Iterative three-colour DFS.
fn find_cycle(adj: &[Vec<usize>]) -> Option<usize> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let mut mark = vec![Mark::White; adj.len()];
    for root in 0..adj.len() {
        if mark[root] != Mark::White {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Grey;
        while let Some((v, i)) = stack.last_mut() {
            if let Some(&w) = adj[*v].get(*i) {
                *i += 1;
                match mark[w] {
                    Mark::Grey => return Some(w),
                    Mark::White => {
                        mark[w] = Mark::Grey;
                        stack.push((w, 0));
                    }
                    Mark::Black => {}
                }
            } else {
                mark[*v] = Mark::Black;
                stack.pop();
            }
        }
    }
    None
}

/// An event's payload may only be pulled by exec nodes that are reachable
/// from that event and from no other.
fn check_payload_scope(
    g: &Graph,
    exec_adj: &[Vec<usize>],
    data_edges: &[(usize, usize, usize, usize)],
    out: &mut Vec<Diagnostic>,
) {
    let n = g.nodes.len();
    let mut reached_by: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (e, node) in g.nodes.iter().enumerate() {
        if !node.kind.is_event() {
            continue;
        }
        let mut stack = vec![e];
        while let Some(v) = stack.pop() {
            if reached_by[v].insert(e) {
                stack.extend(exec_adj[v].iter().copied());
            }
        }
    }

    let mut producers: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &(f, _, t, ii) in data_edges {
        producers[t].push((f, ii));
    }

    for (v, node) in g.nodes.iter().enumerate() {
        if node.kind.category() != Category::Effect {
            continue;
        }
        for &(src, ii) in &producers[v] {
            let mut events = BTreeSet::new();
            payload_sources(g, &producers, src, &mut events, &mut vec![false; n]);
            for e in events {
                let only_e = reached_by[v].len() == 1 && reached_by[v].contains(&e);
                if !only_e {
                    let pin = node.kind.spec().inputs[ii].name;
                    out.push(Diagnostic::new(
                        DiagCode::CrossEventPayload,
                        Location::Pin {
                            node: node.id.clone(),
                            pin: pin.to_string(),
                        },
                        format!(
                            "`{}.{pin}` reads the payload of event `{}` but runs outside that event",
                            node.id, g.nodes[e].id
                        ),
                    ));
                }
            }
        }
    }
}

fn payload_sources(
    g: &Graph,
    producers: &[Vec<(usize, usize)>],
    v: usize,
    events: &mut BTreeSet<usize>,
    seen: &mut Vec<bool>,
) {
    if std::mem::replace(&mut seen[v], true) {
        return;
    }
    if g.nodes[v].kind.is_event() {
        events.insert(v);
        return;
    }
    for &(p, _) in &producers[v] {
        payload_sources(g, producers, p, events, seen);
    }
}

/// Literal helper used by tests and tooling: the canonical kind-ordered list
/// of a node's params.
pub fn ordered_params(kind: NodeKind, params: &BTreeMap<String, Literal>) -> Vec<(&'static str, &Literal)> {
    kind.spec()
        .inputs
        .iter()
        .filter_map(|inp| params.get(inp.name).map(|l| (inp.name, l)))
        .collect()
}
