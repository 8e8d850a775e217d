//! Problem instances, solutions and the JSON instance file format.

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::graph::{CutSystem, EdgeSpec, GraphError, MixedGraph, Orientation, Vertex};
use crate::numeric::{LiteralError, NumericMode, Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    pub graph: MixedGraph<T>,
    pub budget: T,
    pub risk_threshold: Option<T>,
}

impl<T: Scalar> Instance<T> {
    pub fn new(graph: MixedGraph<T>, budget: T, risk_threshold: Option<T>) -> Result<Self, FormatError> {
        if budget < T::zero() {
            return Err(FormatError::schema("budget", "must be non-negative"));
        }
        if risk_threshold.as_ref().is_some_and(|r| *r < T::zero()) {
            return Err(FormatError::schema("risk_threshold", "must be non-negative"));
        }
        Ok(Instance { graph, budget, risk_threshold })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub cut: CutSystem,
    pub cost: T,
    pub risk: T,
    pub saved: T,
}

/// An instance whose numeric mode is only known at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyInstance {
    Rational(Instance<Rational>),
    Float(Instance<f64>),
}

impl AnyInstance {
    pub fn mode(&self) -> NumericMode {
        match self {
            AnyInstance::Rational(_) => NumericMode::Rational,
            AnyInstance::Float(_) => NumericMode::Float,
        }
    }

    pub fn to_json_string(&self) -> String {
        match self {
            AnyInstance::Rational(i) => serialize_instance(i),
            AnyInstance::Float(i) => serialize_instance(i),
        }
    }
}

impl From<Instance<Rational>> for AnyInstance {
    fn from(i: Instance<Rational>) -> Self {
        AnyInstance::Rational(i)
    }
}

impl From<Instance<f64>> for AnyInstance {
    fn from(i: Instance<f64>) -> Self {
        AnyInstance::Float(i)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {source}")]
    Literal { path: String, source: LiteralError },
    #[error("{path}: {source}")]
    Graph { path: String, source: GraphError },
}

impl FormatError {
    fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        FormatError::Schema { path: path.into(), message: message.into() }
    }

    /// Dotted path of the offending field, when known.
    pub fn path(&self) -> Option<&str> {
        match self {
            FormatError::Json { .. } => None,
            FormatError::Schema { path, .. } | FormatError::Literal { path, .. } | FormatError::Graph { path, .. } => {
                Some(path)
            }
        }
    }
}

pub fn parse_instance_str(text: &str) -> Result<AnyInstance, FormatError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| FormatError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = doc.as_object().ok_or_else(|| FormatError::schema("$", "expected a JSON object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "mode" | "vertices" | "edges" | "budget" | "risk_threshold") {
            return Err(FormatError::schema(key.clone(), "unknown field"));
        }
    }
    let mode: NumericMode = match obj.get("mode") {
        None => return Err(FormatError::schema("mode", "missing field")),
        Some(v) => serde_json::from_value(v.clone())
            .map_err(|_| FormatError::schema("mode", "expected \"rational\" or \"float\""))?,
    };
    Ok(match mode {
        NumericMode::Rational => AnyInstance::Rational(parse_typed(&doc)?),
        NumericMode::Float => AnyInstance::Float(parse_typed(&doc)?),
    })
}

/// Parses a document that must be in mode `T::MODE`.
pub fn parse_instance_as<T: Scalar>(text: &str) -> Result<Instance<T>, FormatError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| FormatError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mode = doc.get("mode").and_then(Value::as_str).unwrap_or_default();
    if mode != T::MODE.to_string() {
        return Err(FormatError::schema("mode", format!("expected {:?}, found {mode:?}", T::MODE.to_string())));
    }
    parse_typed(&doc)
}

fn field<'a>(obj: &'a serde_json::Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, FormatError> {
    obj.get(key).ok_or_else(|| FormatError::schema(format!("{path}.{key}"), "missing field"))
}

fn scalar<T: Scalar>(v: &Value, path: String) -> Result<T, FormatError> {
    T::parse_json(v).map_err(|source| FormatError::Literal { path, source })
}

fn index(v: &Value, path: String) -> Result<usize, FormatError> {
    v.as_u64().map(|u| u as usize).ok_or_else(|| FormatError::schema(path, "expected a non-negative integer"))
}

fn parse_typed<T: Scalar>(doc: &Value) -> Result<Instance<T>, FormatError> {
    let obj = doc.as_object().expect("checked by caller");
    let vertices =
        field(obj, "vertices", "$")?.as_array().ok_or_else(|| FormatError::schema("vertices", "expected an array"))?;
    let mut slots: Vec<Option<Vertex<T>>> = vec![None; vertices.len()];
    for (i, v) in vertices.iter().enumerate() {
        let path = format!("vertices[{i}]");
        let o = v.as_object().ok_or_else(|| FormatError::schema(path.clone(), "expected an object"))?;
        let id = index(field(o, "id", &path)?, format!("{path}.id"))?;
        if id >= slots.len() {
            return Err(FormatError::schema(
                format!("{path}.id"),
                format!("ids must be 0..{} (found {id})", slots.len()),
            ));
        }
        if slots[id].is_some() {
            return Err(FormatError::schema(format!("{path}.id"), format!("duplicate id {id}")));
        }
        let value: T = scalar(field(o, "value", &path)?, format!("{path}.value"))?;
        let ignition: T = scalar(field(o, "ignition", &path)?, format!("{path}.ignition"))?;
        if !ignition.is_probability() {
            return Err(FormatError::schema(format!("{path}.ignition"), format!("{ignition} is not in [0, 1]")));
        }
        if value < T::zero() {
            return Err(FormatError::schema(format!("{path}.value"), format!("{value} is negative")));
        }
        slots[id] = Some(Vertex::new(value, ignition));
    }
    let vertices: Vec<Vertex<T>> = slots.into_iter().map(|s| s.expect("ids are a permutation")).collect();

    let edges =
        field(obj, "edges", "$")?.as_array().ok_or_else(|| FormatError::schema("edges", "expected an array"))?;
    let mut specs = Vec::with_capacity(edges.len());
    for (i, e) in edges.iter().enumerate() {
        let path = format!("edges[{i}]");
        let o = e.as_object().ok_or_else(|| FormatError::schema(path.clone(), "expected an object"))?;
        let tail = index(field(o, "tail", &path)?, format!("{path}.tail"))?;
        let head = index(field(o, "head", &path)?, format!("{path}.head"))?;
        let directed = field(o, "directed", &path)?
            .as_bool()
            .ok_or_else(|| FormatError::schema(format!("{path}.directed"), "expected a boolean"))?;
        let spread: T = scalar(field(o, "spread", &path)?, format!("{path}.spread"))?;
        let cost: T = scalar(field(o, "cost", &path)?, format!("{path}.cost"))?;
        specs.push(EdgeSpec {
            tail: crate::graph::VertexId(tail),
            head: crate::graph::VertexId(head),
            orientation: if directed { Orientation::Directed } else { Orientation::Undirected },
            spread,
            cost,
        });
    }
    let graph = MixedGraph::build(vertices, specs).map_err(|source| {
        let path = match &source {
            GraphError::VertexOutOfRange { edge, .. }
            | GraphError::SelfLoop(edge)
            | GraphError::ParallelEdge { second: edge, .. }
            | GraphError::UnequalPairCost { second: edge, .. } => format!("edges[{edge}]"),
            GraphError::ProbabilityOutOfRange { what: "edge", index, .. } => format!("edges[{index}].spread"),
            GraphError::Negative { what: "cost of edge", index, .. } => format!("edges[{index}].cost"),
            _ => "$".to_string(),
        };
        FormatError::Graph { path, source }
    })?;
    let budget: T = scalar(field(obj, "budget", "$")?, "budget".to_string())?;
    let risk_threshold = match obj.get("risk_threshold") {
        None | Some(Value::Null) => None,
        Some(v) => Some(scalar::<T>(v, "risk_threshold".to_string())?),
    };
    Instance::new(graph, budget, risk_threshold)
}

#[derive(Serialize)]
struct VertexOut {
    id: usize,
    value: Value,
    ignition: Value,
}

#[derive(Serialize)]
struct EdgeOut {
    tail: usize,
    head: usize,
    directed: bool,
    spread: Value,
    cost: Value,
}

#[derive(Serialize)]
struct InstanceOut {
    mode: NumericMode,
    vertices: Vec<VertexOut>,
    edges: Vec<EdgeOut>,
    budget: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    risk_threshold: Option<Value>,
}

/// Pretty-printed JSON with a fixed field order and a trailing newline.
pub fn serialize_instance<T: Scalar>(inst: &Instance<T>) -> String {
    let g = &inst.graph;
    let out = InstanceOut {
        mode: T::MODE,
        vertices: g
            .vertices()
            .iter()
            .enumerate()
            .map(|(id, v)| VertexOut { id, value: v.value.to_json(), ignition: v.ignition.to_json() })
            .collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeOut {
                tail: e.tail.0,
                head: e.head.0,
                directed: e.is_directed(),
                spread: e.spread.to_json(),
                cost: e.cost.to_json(),
            })
            .collect(),
        budget: inst.budget.to_json(),
        risk_threshold: inst.risk_threshold.as_ref().map(Scalar::to_json),
    };
    let mut text = serde_json::to_string_pretty(&out).expect("instance serializes");
    text.push('\n');
    text
}
