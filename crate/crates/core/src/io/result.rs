//! JSON result record of a recovery run.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::inversion::{IterationRecord, ReconstructionResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRecord {
    pub dielectric_constant: f64,
    pub argmax_location: [f64; 3],
    pub outer_iterations: usize,
    pub total_inner_iterations: usize,
    /// Full per-iteration log, including the relative-error sequence for
    /// post-hoc stopping-rule audits.
    pub iterations: Vec<IterationRecord>,
}

impl From<&ReconstructionResult> for ResultRecord {
    fn from(r: &ReconstructionResult) -> Self {
        ResultRecord {
            dielectric_constant: r.dielectric_constant,
            argmax_location: r.argmax_location,
            outer_iterations: r.outer_count,
            total_inner_iterations: r.iterations.len(),
            iterations: r.iterations.clone(),
        }
    }
}

pub fn write_result_json(path: &Path, record: &ResultRecord) -> Result<()> {
    let mut text = serde_json::to_string_pretty(record)?;
    text.push('\n');
    super::atomic_write(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_serialization_round_trips() {
        let rec = ResultRecord {
            dielectric_constant: 4.0,
            argmax_location: [0.0, 0.1, 0.5],
            outer_iterations: 3,
            total_inner_iterations: 9,
            iterations: vec![IterationRecord {
                n: 1,
                i: 1,
                e_value: None,
                max_eps: 3.9,
                bvp_residual: 1e-9,
                bvp_iterations: 120,
                ls_residual: 1e-8,
                peclet_warning: false,
            }],
        };
        let text = serde_json::to_string(&rec).unwrap();
        let back: ResultRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back.dielectric_constant, 4.0);
        assert_eq!(back.iterations.len(), 1);
        assert_eq!(back.iterations[0].e_value, None);
    }
}
