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

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// A candidate: `cost` is a throughput (higher is better), `score` is a
/// quality such as accuracy or negated MSE (higher is better).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub name: String,
    pub cost: f64,
    pub score: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParetoSplit {
    /// Non-dominated names, in input order.
    pub front: Vec<String>,
    /// Dominated names, in input order.
    pub dominated: Vec<String>,
}

fn dominates(a: &ParetoPoint, b: &ParetoPoint) -> bool {
    a.cost >= b.cost && a.score >= b.score && (a.cost > b.cost || a.score > b.score)
}

/// Splits points into the Pareto front and the dominated rest.
pub fn pareto_front(points: &[ParetoPoint]) -> Result<ParetoSplit, AnalysisError> {
    let mut seen = HashSet::new();
    for p in points {
        if !seen.insert(p.name.as_str()) {
            return Err(AnalysisError::DuplicateName(p.name.clone()));
        }
    }
    let mut split = ParetoSplit::default();
    for p in points {
        if points.iter().any(|q| dominates(q, p)) {
            split.dominated.push(p.name.clone());
        } else {
            split.front.push(p.name.clone());
        }
    }
    Ok(split)
}
