//! Enhancement ablation grids.
//!
//! The add direction compares plain B-PETs (baseline) against B-PETs with
//! one enhancement switched on. The remove direction compares full EB-PETs
//! (baseline) against EB-PETs with one enhancement switched off, so a loss
//! there means the enhancement helps. Both grids end with an "all" row:
//! B-PETs against full EB-PETs, oriented accordingly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::estimators::{EstimatorKind, Smoothing};
use crate::harness::config::{Comparison, EstimatorSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Add,
    Remove,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "add" => Ok(Direction::Add),
            "remove" => Ok(Direction::Remove),
            _ => Err(Error::InvalidArgument(format!(
                "direction must be add or remove, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Add => "add",
            Direction::Remove => "remove",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Enhancement {
    OobExamples,
    NoSmoothing,
    RandomFeatures,
    All,
}

impl Enhancement {
    pub const ALL: [Enhancement; 4] = [
        Enhancement::OobExamples,
        Enhancement::NoSmoothing,
        Enhancement::RandomFeatures,
        Enhancement::All,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Enhancement::OobExamples => "OB examples",
            Enhancement::NoSmoothing => "no smoothing",
            Enhancement::RandomFeatures => "random features",
            Enhancement::All => "all",
        }
    }

    fn key(self) -> &'static str {
        match self {
            Enhancement::OobExamples => "oob",
            Enhancement::NoSmoothing => "nosmooth",
            Enhancement::RandomFeatures => "rf",
            Enhancement::All => "all",
        }
    }
}

pub const BPETS_ID: &str = "bpets";
pub const EBPETS_ID: &str = "ebpets";

/// EB-PETs with the given enhancements switched on.
fn ebpets_with(oob: bool, no_smoothing: bool, rf: bool, id: String) -> EstimatorSpec {
    EstimatorSpec {
        id,
        ..EstimatorSpec::new("", EstimatorKind::Ebpets)
            .include_oob(oob)
            .smoothing(if no_smoothing {
                Smoothing::None
            } else {
                Smoothing::Laplace
            })
            .random_features(rf)
    }
}

/// Estimators and comparisons of one ablation grid, with the enhancement
/// each comparison row measures.
pub fn ablation_grid(direction: Direction) -> (Vec<EstimatorSpec>, Vec<(Enhancement, Comparison)>) {
    let bpets = EstimatorSpec::new(BPETS_ID, EstimatorKind::Bpets);
    let full = ebpets_with(true, true, true, EBPETS_ID.to_string());
    let mut estimators = Vec::new();
    let mut rows = Vec::new();
    match direction {
        Direction::Add => {
            estimators.push(bpets);
            for e in Enhancement::ALL {
                let spec = match e {
                    Enhancement::OobExamples => {
                        ebpets_with(true, false, false, format!("bpets+{}", e.key()))
                    }
                    Enhancement::NoSmoothing => {
                        ebpets_with(false, true, false, format!("bpets+{}", e.key()))
                    }
                    Enhancement::RandomFeatures => {
                        ebpets_with(false, false, true, format!("bpets+{}", e.key()))
                    }
                    Enhancement::All => full.clone(),
                };
                rows.push((
                    e,
                    Comparison {
                        baseline: BPETS_ID.into(),
                        challenger: spec.id.clone(),
                    },
                ));
                estimators.push(spec);
            }
        }
        Direction::Remove => {
            estimators.push(full);
            for e in Enhancement::ALL {
                let spec = match e {
                    Enhancement::OobExamples => {
                        ebpets_with(false, true, true, format!("ebpets-{}", e.key()))
                    }
                    Enhancement::NoSmoothing => {
                        ebpets_with(true, false, true, format!("ebpets-{}", e.key()))
                    }
                    Enhancement::RandomFeatures => {
                        ebpets_with(true, true, false, format!("ebpets-{}", e.key()))
                    }
                    Enhancement::All => bpets.clone(),
                };
                rows.push((
                    e,
                    Comparison {
                        baseline: EBPETS_ID.into(),
                        challenger: spec.id.clone(),
                    },
                ));
                estimators.push(spec);
            }
        }
    }
    (estimators, rows)
}
