//! Node graphs: the catalog of node kinds, the graph model, static
//! validation, and the interpreter.

pub mod catalog;
pub mod interp;
pub mod model;
pub mod validate;

pub use catalog::{Category, NodeKind, PinType};
pub use interp::{CompiledGraph, Effect, EffectLog, EffectRecord, FaultKind, FiringContext, RuntimeFault, Trigger};
pub use model::{Graph, Literal, Node, PinRef, Value, Wire};
pub use validate::{validate, DiagCode, Diagnostic, Location};
