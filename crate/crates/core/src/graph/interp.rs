//! Event-driven interpreter: follows exec wires from an event and pulls data
//! pins lazily through pure nodes on every read (no caching).

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::catalog::{Category, NodeKind};
use super::model::{Graph, Value};
use super::validate::{validate, Diagnostic};
use crate::math::{Rotator, Vec3};
use crate::scene::{ActorId, World};

#[derive(Debug, Clone, PartialEq)]
enum Source {
    Wire { node: usize, output: usize },
    Literal(Value),
}

#[derive(Debug, Clone, PartialEq)]
struct CompiledNode {
    id: String,
    kind: NodeKind,
    inputs: Vec<Source>,
    exec_next: Vec<Option<usize>>,
}

/// A validated graph with wires resolved to indices. Immutable and shareable.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledGraph {
    name: String,
    nodes: Vec<CompiledNode>,
    events: Vec<usize>,
}

/// The occurrence an event node responds to.
#[derive(Debug, Clone, PartialEq)]
pub enum Trigger<'a> {
    Tick { delta_seconds: f64 },
    FixedTick { delta_seconds: f64 },
    InputAxis { axis: &'a str, value: f64 },
    BeginOverlap { other: ActorId },
}

impl Trigger<'_> {
    fn matches(&self, node: &CompiledNode) -> Option<Value> {
        match (self, node.kind) {
            (Trigger::Tick { delta_seconds }, NodeKind::EventTick)
            | (Trigger::FixedTick { delta_seconds }, NodeKind::EventFixedTick) => Some(Value::Float(*delta_seconds)),
            (Trigger::InputAxis { axis, value }, NodeKind::EventInputAxis) => match &node.inputs[0] {
                Source::Literal(Value::Text(name)) if name == axis => Some(Value::Float(*value)),
                _ => None,
            },
            (Trigger::BeginOverlap { other }, NodeKind::EventActorBeginOverlap) => Some(Value::Actor(*other)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "effect", rename_all = "snake_case")]
pub enum Effect {
    AddWorldRotation { target: ActorId, delta: Rotator },
    AddTorque { target: ActorId, torque: Vec3 },
    AddForce { target: ActorId, force: Vec3 },
    DestroyActor { target: ActorId },
    SetActorActive { target: ActorId, active: bool },
    Branch { taken: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectRecord {
    pub node: String,
    #[serde(flatten)]
    pub effect: Effect,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FaultKind {
    /// The effect's target is no longer in the scene.
    TargetGone(ActorId),
    NonFinite,
    /// A payload pin was pulled outside its event. Validation rules this out.
    PayloadUnavailable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuntimeFault {
    pub graph: String,
    pub node: String,
    pub kind: FaultKind,
}

impl fmt::Display for RuntimeFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FaultKind::TargetGone(a) => write!(f, "{}:{}: target actor {a} is gone", self.graph, self.node),
            FaultKind::NonFinite => write!(f, "{}:{}: non-finite value", self.graph, self.node),
            FaultKind::PayloadUnavailable => {
                write!(f, "{}:{}: event payload read outside its event", self.graph, self.node)
            }
        }
    }
}

impl std::error::Error for RuntimeFault {}

/// Effects performed during one firing, in execution order. A fault aborts the
/// firing; effects already performed stay performed.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EffectLog {
    pub records: Vec<EffectRecord>,
    pub fault: Option<RuntimeFault>,
}

/// Everything a single firing needs; lives only for that firing.
pub struct FiringContext<'w> {
    pub owner: ActorId,
    pub world: &'w mut dyn World,
}

impl CompiledGraph {
    pub fn compile(g: &Graph) -> Result<CompiledGraph, Vec<Diagnostic>> {
        let diags = validate(g);
        if !diags.is_empty() {
            return Err(diags);
        }
        let index: HashMap<&str, usize> = g.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
        struct PendingNode {
            id: String,
            kind: NodeKind,
            inputs: Vec<Option<Source>>,
            exec_next: Vec<Option<usize>>,
        }
        let mut nodes: Vec<PendingNode> = g
            .nodes
            .iter()
            .map(|n| {
                let spec = n.kind.spec();
                let inputs = spec
                    .inputs
                    .iter()
                    .map(|inp| {
                        n.params
                            .get(inp.name)
                            .and_then(|l| l.to_value(inp.ty))
                            .or_else(|| Value::zero(inp.ty).filter(|_| inp.zero_default))
                            .map(Source::Literal)
                    })
                    .collect();
                PendingNode {
                    id: n.id.clone(),
                    kind: n.kind,
                    inputs,
                    exec_next: vec![None; spec.exec_outs.len()],
                }
            })
            .collect();
        for w in &g.data_wires {
            let (f, t) = (index[w.from.node.as_str()], index[w.to.node.as_str()]);
            let (output, _) = nodes[f].kind.spec().output(&w.from.pin).expect("validated");
            let (input, _) = nodes[t].kind.spec().input(&w.to.pin).expect("validated");
            nodes[t].inputs[input] = Some(Source::Wire { node: f, output });
        }
        for w in &g.exec_wires {
            let (f, t) = (index[w.from.node.as_str()], index[w.to.node.as_str()]);
            let out = nodes[f].kind.spec().exec_out(&w.from.pin).expect("validated");
            nodes[f].exec_next[out] = Some(t);
        }
        let nodes: Vec<CompiledNode> = nodes
            .into_iter()
            .map(|n| CompiledNode {
                inputs: n.inputs.into_iter().map(|s| s.expect("validated: every input is driven")).collect(),
                id: n.id,
                kind: n.kind,
                exec_next: n.exec_next,
            })
            .collect();
        let events = nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.kind.is_event())
            .map(|(i, _)| i)
            .collect();
        Ok(CompiledGraph {
            name: g.name.clone(),
            nodes,
            events,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Event node ids in declaration order.
    pub fn event_ids(&self) -> impl Iterator<Item = (&str, NodeKind)> {
        self.events.iter().map(|&i| (self.nodes[i].id.as_str(), self.nodes[i].kind))
    }

    pub fn handles(&self, trigger: &Trigger<'_>) -> bool {
        self.events.iter().any(|&e| trigger.matches(&self.nodes[e]).is_some())
    }

    /// Fires every event node matching `trigger`, in declaration order.
    pub fn fire(&self, trigger: &Trigger<'_>, ctx: &mut FiringContext<'_>) -> Vec<EffectLog> {
        let mut logs = Vec::new();
        for &e in &self.events {
            if let Some(payload) = trigger.matches(&self.nodes[e]) {
                logs.push(self.fire_event(e, payload, ctx));
            }
        }
        logs
    }

    /// Fires the event node with id `event`. Returns `None` if no such event node.
    pub fn fire_by_id(&self, event: &str, payload: Value, ctx: &mut FiringContext<'_>) -> Option<EffectLog> {
        let e = self.events.iter().copied().find(|&i| self.nodes[i].id == event)?;
        Some(self.fire_event(e, payload, ctx))
    }

    fn fire_event(&self, event: usize, payload: Value, ctx: &mut FiringContext<'_>) -> EffectLog {
        let mut log = EffectLog::default();
        let firing = Firing {
            graph: self,
            event,
            payload,
            owner: ctx.owner,
        };
        let mut cur = self.nodes[event].exec_next[0];
        let mut budget = self.nodes.len();
        while let Some(v) = cur {
            // acyclic exec flow visits each node at most once
            debug_assert!(budget > 0);
            if budget == 0 {
                break;
            }
            budget -= 1;
            match firing.execute(v, ctx.world) {
                Ok((record, next)) => {
                    log.records.push(record);
                    cur = next;
                }
                Err(kind) => {
                    log.fault = Some(RuntimeFault {
                        graph: self.name.clone(),
                        node: self.nodes[v].id.clone(),
                        kind,
                    });
                    break;
                }
            }
        }
        log
    }
}

struct Firing<'g> {
    graph: &'g CompiledGraph,
    event: usize,
    payload: Value,
    owner: ActorId,
}

impl Firing<'_> {
    fn input(&self, node: usize, idx: usize, world: &dyn World) -> Result<Value, FaultKind> {
        match &self.graph.nodes[node].inputs[idx] {
            Source::Literal(v) => Ok(v.clone()),
            Source::Wire { node: src, output } => self.pull(*src, *output, world),
        }
    }

    fn float(&self, node: usize, idx: usize, world: &dyn World) -> Result<f64, FaultKind> {
        match self.input(node, idx, world)? {
            Value::Float(f) => Ok(f),
            other => unreachable!("validated Float input, got {other:?}"),
        }
    }

    fn vector(&self, node: usize, idx: usize, world: &dyn World) -> Result<Vec3, FaultKind> {
        match self.input(node, idx, world)? {
            Value::Vector(v) => Ok(v),
            other => unreachable!("validated Vector input, got {other:?}"),
        }
    }

    fn actor(&self, node: usize, idx: usize, world: &dyn World) -> Result<ActorId, FaultKind> {
        match self.input(node, idx, world)? {
            Value::Actor(a) => Ok(a),
            other => unreachable!("validated ActorRef input, got {other:?}"),
        }
    }

    fn boolean(&self, node: usize, idx: usize, world: &dyn World) -> Result<bool, FaultKind> {
        match self.input(node, idx, world)? {
            Value::Bool(b) => Ok(b),
            other => unreachable!("validated Bool input, got {other:?}"),
        }
    }

    /// Evaluates a data output. Pure nodes have a single output.
    fn pull(&self, node: usize, _output: usize, world: &dyn World) -> Result<Value, FaultKind> {
        let n = &self.graph.nodes[node];
        let value = match n.kind {
            k if k.is_event() => {
                if node == self.event {
                    self.payload.clone()
                } else {
                    return Err(FaultKind::PayloadUnavailable);
                }
            }
            NodeKind::ConstFloat | NodeKind::ConstText | NodeKind::ConstVector => self.input(node, 0, world)?,
            NodeKind::MultiplyFloat => Value::Float(self.float(node, 0, world)? * self.float(node, 1, world)?),
            NodeKind::ScaleVector => Value::Vector(self.vector(node, 0, world)? * self.float(node, 1, world)?),
            NodeKind::MakeVector => Value::Vector(Vec3::new(
                self.float(node, 0, world)?,
                self.float(node, 1, world)?,
                self.float(node, 2, world)?,
            )),
            NodeKind::MakeRotator => Value::Rotator(Rotator::new(
                self.float(node, 0, world)?,
                self.float(node, 1, world)?,
                self.float(node, 2, world)?,
            )),
            NodeKind::CompareTag => {
                let actor = self.actor(node, 0, world)?;
                let Value::Text(tag) = self.input(node, 1, world)? else {
                    unreachable!("validated Text input")
                };
                Value::Bool(world.compare_tag(actor, &tag))
            }
            NodeKind::SelfActor => Value::Actor(self.owner),
            k => unreachable!("{k} has no data outputs"),
        };
        Ok(value)
    }

    fn execute(&self, node: usize, world: &mut dyn World) -> Result<(EffectRecord, Option<usize>), FaultKind> {
        let n = &self.graph.nodes[node];
        debug_assert_eq!(n.kind.category(), Category::Effect);
        let gone = |a: ActorId| move |_| FaultKind::TargetGone(a);
        let mut next = n.exec_next.first().copied().flatten();
        let effect = match n.kind {
            NodeKind::AddWorldRotation => {
                let target = self.actor(node, 0, world)?;
                let Value::Rotator(delta) = self.input(node, 1, world)? else {
                    unreachable!("validated Rotator input")
                };
                if !delta.is_finite() {
                    return Err(FaultKind::NonFinite);
                }
                world.rotate_world(target, delta).map_err(gone(target))?;
                Effect::AddWorldRotation { target, delta }
            }
            NodeKind::AddTorque => {
                let target = self.actor(node, 0, world)?;
                let torque = self.vector(node, 1, world)?;
                if !torque.is_finite() {
                    return Err(FaultKind::NonFinite);
                }
                world.add_torque(target, torque).map_err(gone(target))?;
                Effect::AddTorque { target, torque }
            }
            NodeKind::AddForce => {
                let target = self.actor(node, 0, world)?;
                let force = self.vector(node, 1, world)?;
                if !force.is_finite() {
                    return Err(FaultKind::NonFinite);
                }
                world.add_force(target, force).map_err(gone(target))?;
                Effect::AddForce { target, force }
            }
            NodeKind::DestroyActor => {
                let target = self.actor(node, 0, world)?;
                world.destroy(target).map_err(gone(target))?;
                Effect::DestroyActor { target }
            }
            NodeKind::SetActorActive => {
                let target = self.actor(node, 0, world)?;
                let active = self.boolean(node, 1, world)?;
                world.set_active(target, active).map_err(gone(target))?;
                Effect::SetActorActive { target, active }
            }
            NodeKind::Branch => {
                let taken = self.boolean(node, 0, world)?;
                next = n.exec_next[if taken { 0 } else { 1 }];
                Effect::Branch { taken }
            }
            k => unreachable!("{k} is not an effect node"),
        };
        Ok((
            EffectRecord {
                node: n.id.clone(),
                effect,
            },
            next,
        ))
    }
}
