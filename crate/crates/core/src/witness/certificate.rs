use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    Halfline,
    Cylinder,
    Compact,
    Halfspace,
}

/// Outcome of a witness construction. `value` is the reflected pairing that
/// was certified negative.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessCertificate {
    pub kind: WitnessKind,
    pub value: f64,
    pub predicted: Option<f64>,
    pub n: Option<u32>,
    pub lambda_star: Option<f64>,
    pub residual: Option<f64>,
    pub smallest_singular_value: Option<f64>,
    pub parameters: BTreeMap<String, f64>,
}

impl WitnessCertificate {
    pub(crate) fn new(kind: WitnessKind, value: f64) -> Self {
        WitnessCertificate {
            kind,
            value,
            predicted: None,
            n: None,
            lambda_star: None,
            residual: None,
            smallest_singular_value: None,
            parameters: BTreeMap::new(),
        }
    }

    pub(crate) fn param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }
}
