//! Instance transformations relating firebreak location to Partition and
//! Max 2SAT, plus the value and cost flattening steps.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::exact::ExactError;
use crate::graph::GraphError;
use crate::instance::FormatError;
use crate::risk::RiskError;

pub mod chains;
pub mod flatten;
pub mod partition;
pub mod sat;
pub mod structure;
pub mod wfl;

pub use flatten::{default_cost_factor, flatten_costs, flatten_values};
pub use partition::partition_to_star;
pub use sat::{
    max2sat_brute, r3sat_to_max2sat, verify_gadget_claims, CnfInstance, GadgetReport, Literal, Max2SatInstance,
    Max2SatReduction,
};
pub use structure::{check_structure, StructureReport};
pub use wfl::{max2sat_to_wfl, WflParameters};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("input too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Risk(#[from] RiskError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Machine-readable record of how an output instance was built.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionCertificate {
    pub reduction: &'static str,
    pub parameters: BTreeMap<String, Value>,
    /// Gadget or source element each output vertex belongs to.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub vertex_origin: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub edge_origin: Vec<String>,
    /// For each input edge, the output edges that represent it.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub edge_map: Vec<Vec<usize>>,
}

impl ReductionCertificate {
    pub fn new(reduction: &'static str) -> Self {
        ReductionCertificate {
            reduction,
            parameters: BTreeMap::new(),
            vertex_origin: Vec::new(),
            edge_origin: Vec::new(),
            edge_map: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }
}
