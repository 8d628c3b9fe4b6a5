// Copyright 2026 The gpgo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Numerical procedures over experiment tables: exploration-constant
//! fitting, accuracy extrapolation and Pareto fronts.
//!
//! The published tables these procedures were designed around ship as CSV
//! fixtures (see [`fixtures`]), so everything here runs without training.

mod accuracy;
mod constants;
pub mod fixtures;
mod pareto;
mod tables;

use thiserror::Error;

pub use self::accuracy::{
    fit_accuracy_model, predict_accuracy, AccuracyFit, AccuracyGrid, AccuracyModel, FixedParams, GridPoint,
};
pub use self::constants::{best_constant_per_budget, fit_gpuct, gpuct_objective, GpuctFit, WinrateTable};
pub use self::pareto::{pareto_front, ParetoPoint, ParetoSplit};
pub use self::tables::{read_networks, write_networks, NetworkRow};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("empty table")]
    EmptyTable,
    #[error("insufficient points: need at least {needed}, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
