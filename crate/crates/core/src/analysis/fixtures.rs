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

//! Published experiment tables, embedded at compile time.
//!
//! - `winrates_by_constant.csv`: PUCT with constant c against PUCT with 0.1,
//!   400 games per cell, by descent budget.
//! - `puct_vs_gpuct.csv`: PUCT with constant c against GPUCT (tau 0.737,
//!   c 0.057), win rate of GPUCT.
//! - `networks.csv`: 19x19 networks with parameter counts, GPU/CPU speed,
//!   validation accuracy and value MSE (empty cells are unmeasured).
//! - `extrapolated_accuracy.csv`: accuracies predicted for untrained sizes.

use super::{read_networks, AccuracyGrid, AnalysisError, NetworkRow, ParetoPoint, WinrateTable};

pub const WINRATES_BY_CONSTANT: &str = include_str!("../../fixtures/winrates_by_constant.csv");
pub const PUCT_VS_GPUCT: &str = include_str!("../../fixtures/puct_vs_gpuct.csv");
pub const NETWORKS: &str = include_str!("../../fixtures/networks.csv");
pub const EXTRAPOLATED_ACCURACY: &str = include_str!("../../fixtures/extrapolated_accuracy.csv");

/// Games per cell in the win-rate tables.
pub const GAMES_PER_CELL: u32 = 400;

pub fn winrates_by_constant() -> WinrateTable {
    WinrateTable::from_csv(WINRATES_BY_CONSTANT.as_bytes(), 0.1, Some(GAMES_PER_CELL)).expect("embedded fixture")
}

pub fn networks() -> Vec<NetworkRow> {
    read_networks(NETWORKS.as_bytes()).expect("embedded fixture")
}

/// The 23 trained MobileSE accuracies.
pub fn accuracy_grid() -> AccuracyGrid {
    AccuracyGrid::from_networks(&networks(), "mobile_se").expect("embedded fixture")
}

/// `(depth, width, predicted accuracy)` triples.
pub fn extrapolated_accuracy() -> Result<Vec<(u32, u32, f64)>, AnalysisError> {
    let mut rdr = csv::Reader::from_reader(EXTRAPOLATED_ACCURACY.as_bytes());
    Ok(rdr.deserialize().collect::<Result<Vec<(u32, u32, f64)>, _>>()?)
}

/// Trained networks as (GPU speed, accuracy) points.
pub fn accuracy_points(rows: &[NetworkRow]) -> Vec<ParetoPoint> {
    rows.iter()
        .filter_map(|r| {
            Some(ParetoPoint { name: r.name.clone(), cost: r.gpu_batch32_per_s?, score: r.accuracy? })
        })
        .collect()
}

/// Trained networks as (GPU speed, negated value MSE) points.
pub fn value_points(rows: &[NetworkRow]) -> Vec<ParetoPoint> {
    rows.iter()
        .filter_map(|r| {
            Some(ParetoPoint { name: r.name.clone(), cost: r.gpu_batch32_per_s?, score: -r.value_mse? })
        })
        .collect()
}
