//! `fgjson/1`: the same graph as a JSON document.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Literal, Node, NodeKind, PinRef, Wire};

pub const FGJSON_FORMAT: &str = "fgjson/1";

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format `{0}`, expected `{FGJSON_FORMAT}`")]
    Format(String),
    #[error("unknown node kind `{0}`")]
    UnknownKind(String),
    #[error("`{0}` is not a valid identifier")]
    BadIdentifier(String),
    #[error("wire end `{0}` must be written `node.pin`")]
    BadPinRef(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    format: String,
    name: String,
    nodes: Vec<JsonNode>,
    #[serde(default)]
    exec: Vec<JsonWire>,
    #[serde(default)]
    data: Vec<JsonWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonNode {
    id: String,
    kind: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    params: BTreeMap<String, Literal>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonWire {
    from: String,
    to: String,
}

pub fn to_json(g: &Graph) -> String {
    let wires = |ws: &[Wire]| {
        ws.iter()
            .map(|w| JsonWire {
                from: w.from.to_string(),
                to: w.to.to_string(),
            })
            .collect()
    };
    let doc = Doc {
        format: FGJSON_FORMAT.into(),
        name: g.name.clone(),
        nodes: g
            .nodes
            .iter()
            .map(|n| JsonNode {
                id: n.id.clone(),
                kind: n.kind.name().into(),
                params: n.params.clone(),
            })
            .collect(),
        exec: wires(&g.exec_wires),
        data: wires(&g.data_wires),
    };
    serde_json::to_string_pretty(&doc).expect("graph documents always serialize")
}

/// Imports a graph. Identifiers are checked so the result can be written as
/// `.fg`; everything else is left to validation.
pub fn from_json(text: &str) -> Result<Graph, JsonError> {
    let doc: Doc = serde_json::from_str(text)?;
    if doc.format != FGJSON_FORMAT {
        return Err(JsonError::Format(doc.format));
    }
    ident(&doc.name)?;
    let mut g = Graph::new(doc.name);
    for n in doc.nodes {
        ident(&n.id)?;
        let kind: NodeKind = n.kind.parse().map_err(|_| JsonError::UnknownKind(n.kind.clone()))?;
        for k in n.params.keys() {
            ident(k)?;
        }
        g.nodes.push(Node {
            id: n.id,
            kind,
            params: n.params,
        });
    }
    let wire = |w: JsonWire| -> Result<Wire, JsonError> {
        Ok(Wire {
            from: pin_ref(&w.from)?,
            to: pin_ref(&w.to)?,
        })
    };
    g.exec_wires = doc.exec.into_iter().map(wire).collect::<Result<_, _>>()?;
    g.data_wires = doc.data.into_iter().map(wire).collect::<Result<_, _>>()?;
    Ok(g)
}

fn ident(s: &str) -> Result<(), JsonError> {
    let mut chars = s.chars();
    let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(JsonError::BadIdentifier(s.into()))
    }
}

fn pin_ref(s: &str) -> Result<PinRef, JsonError> {
    let (node, pin) = s.split_once('.').ok_or_else(|| JsonError::BadPinRef(s.into()))?;
    ident(node).map_err(|_| JsonError::BadPinRef(s.into()))?;
    ident(pin).map_err(|_| JsonError::BadPinRef(s.into()))?;
    Ok(PinRef::new(node, pin))
}
