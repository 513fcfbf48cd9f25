use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::catalog::{NodeKind, PinType};
use crate::math::{Rotator, Vec3};
use crate::scene::ActorId;

/// A literal as written in source: the pin type decides how a triple is read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Bool(bool),
    Float(f64),
    Text(String),
    Triple([f64; 3]),
}

impl Literal {
    /// Converts to a runtime value of type `ty`, or `None` if the literal does
    /// not fit the type or is not finite.
    pub fn to_value(&self, ty: PinType) -> Option<Value> {
        match (self, ty) {
            (Literal::Float(f), PinType::Float) if f.is_finite() => Some(Value::Float(*f)),
            (Literal::Bool(b), PinType::Bool) => Some(Value::Bool(*b)),
            (Literal::Text(s), PinType::Text) => Some(Value::Text(s.clone())),
            (Literal::Triple([x, y, z]), PinType::Vector) if [x, y, z].iter().all(|c| c.is_finite()) => {
                Some(Value::Vector(Vec3::new(*x, *y, *z)))
            }
            (Literal::Triple([r, p, y]), PinType::Rotator) if [r, p, y].iter().all(|c| c.is_finite()) => {
                Some(Value::Rotator(Rotator::new(*r, *p, *y)))
            }
            _ => None,
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Literal::Bool(_) => "bool",
            Literal::Float(_) => "float",
            Literal::Text(_) => "text",
            Literal::Triple(_) => "triple",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Bool(bool),
    Text(String),
    Vector(Vec3),
    Rotator(Rotator),
    Actor(ActorId),
}

impl Value {
    pub fn ty(&self) -> PinType {
        match self {
            Value::Float(_) => PinType::Float,
            Value::Bool(_) => PinType::Bool,
            Value::Text(_) => PinType::Text,
            Value::Vector(_) => PinType::Vector,
            Value::Rotator(_) => PinType::Rotator,
            Value::Actor(_) => PinType::ActorRef,
        }
    }

    pub fn zero(ty: PinType) -> Option<Value> {
        match ty {
            PinType::Float => Some(Value::Float(0.0)),
            PinType::Vector => Some(Value::Vector(Vec3::ZERO)),
            PinType::Rotator => Some(Value::Rotator(Rotator::ZERO)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    /// Literal settings and pin defaults, keyed by input name.
    pub params: BTreeMap<String, Literal>,
}

impl Node {
    pub fn new(id: impl Into<String>, kind: NodeKind) -> Self {
        Self {
            id: id.into(),
            kind,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, lit: Literal) -> Self {
        self.params.insert(name.to_string(), lit);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PinRef {
    pub node: String,
    pub pin: String,
}

impl PinRef {
    pub fn new(node: impl Into<String>, pin: impl Into<String>) -> Self {
        Self {
            node: node.into(),
            pin: pin.into(),
        }
    }
}

impl fmt::Display for PinRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.node, self.pin)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Wire {
    pub from: PinRef,
    pub to: PinRef,
}

impl Wire {
    pub fn new(from: (&str, &str), to: (&str, &str)) -> Self {
        Self {
            from: PinRef::new(from.0, from.1),
            to: PinRef::new(to.0, to.1),
        }
    }
}

/// A node-and-wire program. Structurally complete when every wire names a
/// declared node; everything else is checked by [`super::validate`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Graph {
    pub name: String,
    pub nodes: Vec<Node>,
    pub exec_wires: Vec<Wire>,
    pub data_wires: Vec<Wire>,
}

impl Graph {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn node(mut self, node: Node) -> Self {
        self.nodes.push(node);
        self
    }

    pub fn exec(mut self, from: (&str, &str), to: (&str, &str)) -> Self {
        self.exec_wires.push(Wire::new(from, to));
        self
    }

    pub fn data(mut self, from: (&str, &str), to: (&str, &str)) -> Self {
        self.data_wires.push(Wire::new(from, to));
        self
    }

    pub fn find(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Equality up to declaration order of nodes and wires.
    pub fn structurally_eq(&self, other: &Graph) -> bool {
        fn key(g: &Graph) -> (Vec<&Node>, Vec<&Wire>, Vec<&Wire>) {
            let mut nodes: Vec<_> = g.nodes.iter().collect();
            nodes.sort_by(|a, b| a.id.cmp(&b.id));
            let mut exec: Vec<_> = g.exec_wires.iter().collect();
            exec.sort();
            let mut data: Vec<_> = g.data_wires.iter().collect();
            data.sort();
            (nodes, exec, data)
        }
        self.name == other.name && key(self) == key(other)
    }
}
