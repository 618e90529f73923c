//! Machine-readable result documents.
//!
//! State strings are `n`-character 0/1 strings with variable 1 leftmost;
//! index lists are 1-based; witness keys are `"i->j"` with 1-based
//! positions in the `attractors` list.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::control::ControlSolution;
use crate::state::StateSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub control: Vec<usize>,
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockReport {
    pub block: Vec<usize>,
    pub hat: Vec<usize>,
    pub solutions: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlReport {
    pub method: String,
    pub attractors: Vec<Vec<String>>,
    pub minimum_size: usize,
    pub solutions: Vec<Vec<usize>>,
    pub witnesses: BTreeMap<String, WitnessReport>,
    pub per_block: Vec<BlockReport>,
}

fn state_strings(set: &StateSet) -> Vec<String> {
    set.to_bit_strings()
}

impl ControlReport {
    pub fn from_solution(solution: &ControlSolution, width: usize) -> ControlReport {
        let witnesses = solution
            .witnesses
            .iter()
            .map(|(&(i, j), w)| {
                (
                    format!("{}->{}", i + 1, j + 1),
                    WitnessReport {
                        control: w.control.to_one_based(),
                        from: w.from.to_bit_string(width),
                        to: w.to.to_bit_string(width),
                    },
                )
            })
            .collect();
        ControlReport {
            method: solution.method.as_str().to_string(),
            attractors: solution.attractors.iter().map(state_strings).collect(),
            minimum_size: solution.minimum_size,
            solutions: solution
                .all_minimum_solutions
                .iter()
                .map(|c| c.to_one_based())
                .collect(),
            witnesses,
            per_block: solution
                .per_block
                .iter()
                .map(|b| BlockReport {
                    block: b.nodes.to_one_based(),
                    hat: b.hat.to_one_based(),
                    solutions: b.cover.solutions.iter().map(|c| c.to_one_based()).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttractorEntry {
    pub id: usize,
    pub states: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub basin_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub basin: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttractorsReport {
    pub variables: Vec<String>,
    pub attractors: Vec<AttractorEntry>,
}
