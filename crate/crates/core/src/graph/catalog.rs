//! The closed node catalog: every kind, its pins, and their types.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PinType {
    Float,
    Bool,
    Text,
    Vector,
    Rotator,
    ActorRef,
}

impl fmt::Display for PinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Event,
    Pure,
    Effect,
}

/// A data input. `wireable == false` marks a setting that only takes a literal
/// (e.g. `ConstFloat.value`); `zero_default` inputs may be left unwired.
#[derive(Debug, Clone, Copy)]
pub struct InputSpec {
    pub name: &'static str,
    pub ty: PinType,
    pub wireable: bool,
    pub zero_default: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct OutputSpec {
    pub name: &'static str,
    pub ty: PinType,
}

#[derive(Debug, Clone, Copy)]
pub struct KindSpec {
    pub category: Category,
    pub inputs: &'static [InputSpec],
    pub outputs: &'static [OutputSpec],
    pub exec_in: bool,
    pub exec_outs: &'static [&'static str],
}

impl KindSpec {
    pub fn input(&self, name: &str) -> Option<(usize, &InputSpec)> {
        self.inputs.iter().enumerate().find(|(_, p)| p.name == name)
    }

    pub fn output(&self, name: &str) -> Option<(usize, &OutputSpec)> {
        self.outputs.iter().enumerate().find(|(_, p)| p.name == name)
    }

    pub fn exec_out(&self, name: &str) -> Option<usize> {
        self.exec_outs.iter().position(|p| *p == name)
    }

    /// True if `name` names any data pin (input or output) of this kind.
    pub fn has_data_pin(&self, name: &str) -> bool {
        self.input(name).is_some() || self.output(name).is_some()
    }
}

/// Exec pin names recognised anywhere in the language.
pub const EXEC_PIN_NAMES: [&str; 4] = ["in", "out", "true", "false"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    EventTick,
    EventFixedTick,
    EventInputAxis,
    EventActorBeginOverlap,
    ConstFloat,
    ConstText,
    ConstVector,
    MultiplyFloat,
    ScaleVector,
    MakeVector,
    MakeRotator,
    CompareTag,
    SelfActor,
    AddWorldRotation,
    AddTorque,
    AddForce,
    DestroyActor,
    SetActorActive,
    Branch,
}

const fn wired(name: &'static str, ty: PinType) -> InputSpec {
    InputSpec { name, ty, wireable: true, zero_default: false }
}
const fn zeroed(name: &'static str, ty: PinType) -> InputSpec {
    InputSpec { name, ty, wireable: true, zero_default: true }
}
const fn setting(name: &'static str, ty: PinType) -> InputSpec {
    InputSpec { name, ty, wireable: false, zero_default: false }
}
const fn out(name: &'static str, ty: PinType) -> OutputSpec {
    OutputSpec { name, ty }
}

use PinType::*;

const EVENT_TICK: KindSpec = KindSpec {
    category: Category::Event,
    inputs: &[],
    outputs: &[out("DeltaSeconds", Float)],
    exec_in: false,
    exec_outs: &["out"],
};
const EVENT_AXIS: KindSpec = KindSpec {
    category: Category::Event,
    inputs: &[setting("axis_name", Text)],
    outputs: &[out("AxisValue", Float)],
    exec_in: false,
    exec_outs: &["out"],
};
const EVENT_OVERLAP: KindSpec = KindSpec {
    category: Category::Event,
    inputs: &[],
    outputs: &[out("OtherActor", ActorRef)],
    exec_in: false,
    exec_outs: &["out"],
};

const fn pure(inputs: &'static [InputSpec], outputs: &'static [OutputSpec]) -> KindSpec {
    KindSpec {
        category: Category::Pure,
        inputs,
        outputs,
        exec_in: false,
        exec_outs: &[],
    }
}
const fn effect(inputs: &'static [InputSpec]) -> KindSpec {
    KindSpec {
        category: Category::Effect,
        inputs,
        outputs: &[],
        exec_in: true,
        exec_outs: &["out"],
    }
}

impl NodeKind {
    pub const ALL: [NodeKind; 19] = [
        NodeKind::EventTick,
        NodeKind::EventFixedTick,
        NodeKind::EventInputAxis,
        NodeKind::EventActorBeginOverlap,
        NodeKind::ConstFloat,
        NodeKind::ConstText,
        NodeKind::ConstVector,
        NodeKind::MultiplyFloat,
        NodeKind::ScaleVector,
        NodeKind::MakeVector,
        NodeKind::MakeRotator,
        NodeKind::CompareTag,
        NodeKind::SelfActor,
        NodeKind::AddWorldRotation,
        NodeKind::AddTorque,
        NodeKind::AddForce,
        NodeKind::DestroyActor,
        NodeKind::SetActorActive,
        NodeKind::Branch,
    ];

    pub fn spec(self) -> &'static KindSpec {
        static CONST_FLOAT: KindSpec = pure(&[setting("value", Float)], &[out("out", Float)]);
        static CONST_TEXT: KindSpec = pure(&[setting("value", Text)], &[out("out", Text)]);
        static CONST_VECTOR: KindSpec = pure(&[setting("value", Vector)], &[out("out", Vector)]);
        static MULTIPLY: KindSpec = pure(&[wired("a", Float), wired("b", Float)], &[out("out", Float)]);
        static SCALE: KindSpec = pure(&[wired("v", Vector), wired("s", Float)], &[out("out", Vector)]);
        static MAKE_VECTOR: KindSpec =
            pure(&[zeroed("x", Float), zeroed("y", Float), zeroed("z", Float)], &[out("out", Vector)]);
        static MAKE_ROTATOR: KindSpec = pure(
            &[zeroed("roll", Float), zeroed("pitch", Float), zeroed("yaw", Float)],
            &[out("out", Rotator)],
        );
        static COMPARE_TAG: KindSpec = pure(&[wired("actor", ActorRef), wired("tag", Text)], &[out("out", Bool)]);
        static SELF_ACTOR: KindSpec = pure(&[], &[out("out", ActorRef)]);
        static ADD_ROTATION: KindSpec = effect(&[wired("target", ActorRef), wired("delta", Rotator)]);
        static ADD_TORQUE: KindSpec = effect(&[wired("target", ActorRef), wired("torque", Vector)]);
        static ADD_FORCE: KindSpec = effect(&[wired("target", ActorRef), wired("force", Vector)]);
        static DESTROY: KindSpec = effect(&[wired("target", ActorRef)]);
        static SET_ACTIVE: KindSpec = effect(&[wired("target", ActorRef), wired("active", Bool)]);
        static BRANCH: KindSpec = KindSpec {
            category: Category::Effect,
            inputs: &[wired("condition", Bool)],
            outputs: &[],
            exec_in: true,
            exec_outs: &["true", "false"],
        };

        match self {
            NodeKind::EventTick | NodeKind::EventFixedTick => &EVENT_TICK,
            NodeKind::EventInputAxis => &EVENT_AXIS,
            NodeKind::EventActorBeginOverlap => &EVENT_OVERLAP,
            NodeKind::ConstFloat => &CONST_FLOAT,
            NodeKind::ConstText => &CONST_TEXT,
            NodeKind::ConstVector => &CONST_VECTOR,
            NodeKind::MultiplyFloat => &MULTIPLY,
            NodeKind::ScaleVector => &SCALE,
            NodeKind::MakeVector => &MAKE_VECTOR,
            NodeKind::MakeRotator => &MAKE_ROTATOR,
            NodeKind::CompareTag => &COMPARE_TAG,
            NodeKind::SelfActor => &SELF_ACTOR,
            NodeKind::AddWorldRotation => &ADD_ROTATION,
            NodeKind::AddTorque => &ADD_TORQUE,
            NodeKind::AddForce => &ADD_FORCE,
            NodeKind::DestroyActor => &DESTROY,
            NodeKind::SetActorActive => &SET_ACTIVE,
            NodeKind::Branch => &BRANCH,
        }
    }

    pub fn category(self) -> Category {
        self.spec().category
    }

    pub fn is_event(self) -> bool {
        self.category() == Category::Event
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::EventTick => "EventTick",
            NodeKind::EventFixedTick => "EventFixedTick",
            NodeKind::EventInputAxis => "EventInputAxis",
            NodeKind::EventActorBeginOverlap => "EventActorBeginOverlap",
            NodeKind::ConstFloat => "ConstFloat",
            NodeKind::ConstText => "ConstText",
            NodeKind::ConstVector => "ConstVector",
            NodeKind::MultiplyFloat => "MultiplyFloat",
            NodeKind::ScaleVector => "ScaleVector",
            NodeKind::MakeVector => "MakeVector",
            NodeKind::MakeRotator => "MakeRotator",
            NodeKind::CompareTag => "CompareTag",
            NodeKind::SelfActor => "SelfActor",
            NodeKind::AddWorldRotation => "AddWorldRotation",
            NodeKind::AddTorque => "AddTorque",
            NodeKind::AddForce => "AddForce",
            NodeKind::DestroyActor => "DestroyActor",
            NodeKind::SetActorActive => "SetActorActive",
            NodeKind::Branch => "Branch",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownKind(pub String);

impl FromStr for NodeKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| UnknownKind(s.to_string()))
    }
}
