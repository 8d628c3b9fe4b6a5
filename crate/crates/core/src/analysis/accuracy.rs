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

//! Accuracy as a function of depth `d` and width `w`:
//!
//! ```text
//! A(d, w) = p - p1 / d - p2 / w - 1 / (d / p3 + w / p4)
//! ```
//!
//! The model is linear in `p`, `p1` and `p2`, so for fixed `p3`, `p4` those
//! are solved exactly by least squares; `p3` and `p4` are searched in log
//! space (which keeps them positive) by multi-start coordinate descent.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, NetworkRow};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub depth: u32,
    pub width: u32,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyGrid {
    points: Vec<GridPoint>,
}

impl AccuracyGrid {
    pub fn new(points: Vec<GridPoint>) -> Result<Self, AnalysisError> {
        let mut seen = HashSet::new();
        for p in &points {
            if !(p.accuracy > 0.0 && p.accuracy < 100.0) {
                return Err(AnalysisError::InvalidValue(format!("accuracy {} outside (0, 100)", p.accuracy)));
            }
            if p.depth == 0 || p.width == 0 {
                return Err(AnalysisError::InvalidValue("depth and width must be positive".into()));
            }
            if !seen.insert((p.depth, p.width)) {
                return Err(AnalysisError::DuplicateName(format!("({}, {})", p.depth, p.width)));
            }
        }
        Ok(AccuracyGrid { points })
    }

    /// Networks of one family that have a measured accuracy.
    pub fn from_networks(rows: &[NetworkRow], family: &str) -> Result<Self, AnalysisError> {
        AccuracyGrid::new(
            rows.iter()
                .filter(|r| r.family == family)
                .filter_map(|r| Some(GridPoint { depth: r.depth, width: r.width, accuracy: r.accuracy? }))
                .collect(),
        )
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyModel {
    pub p: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
}

impl AccuracyModel {
    fn eval(&self, d: f64, w: f64) -> f64 {
        self.p - self.p1 / d - self.p2 / w - 1.0 / (d / self.p3 + w / self.p4)
    }
}

pub fn predict_accuracy(m: &AccuracyModel, depth: f64, width: f64) -> Result<f64, AnalysisError> {
    if !(depth > 0.0 && width > 0.0) {
        return Err(AnalysisError::InvalidValue("depth and width must be positive".into()));
    }
    Ok(m.eval(depth, width))
}

/// Parameters held at a given value during fitting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FixedParams {
    pub p: Option<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub p3: Option<f64>,
    pub p4: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyFit {
    pub model: AccuracyModel,
    /// Sum of squared residuals.
    pub ss: f64,
    /// Square root of `ss`.
    pub rss: f64,
    /// Sum of absolute residuals.
    pub l1: f64,
    /// Largest absolute residual.
    pub max_abs: f64,
    pub points: usize,
    /// Best `ss` after each descent iteration of the winning start.
    pub history: Vec<f64>,
}

impl AccuracyFit {
    /// Names of the error metrics (`"ss"`, `"rss"`) within `tol` of
    /// `target`.
    pub fn matching_metrics(&self, target: f64, tol: f64) -> Vec<&'static str> {
        [("ss", self.ss), ("rss", self.rss)]
            .into_iter()
            .filter(|(_, v)| (v - target).abs() <= tol)
            .map(|(n, _)| n)
            .collect()
    }
}

struct Problem<'a> {
    d: Vec<f64>,
    w: Vec<f64>,
    acc: Vec<f64>,
    fixed: &'a FixedParams,
}

impl Problem<'_> {
    /// Solves the free linear parameters for the given `p3`, `p4` and
    /// returns the completed model and its sum of squares.
    fn project(&self, p3: f64, p4: f64) -> Option<(AccuracyModel, f64)> {
        let n = self.d.len();
        // Feature columns for p, p1, p2 with their signs in the model.
        let features: [Box<dyn Fn(usize) -> f64 + '_>; 3] =
            [Box::new(|_| 1.0), Box::new(|i| -1.0 / self.d[i]), Box::new(|i| -1.0 / self.w[i])];
        let fixed = [self.fixed.p, self.fixed.p1, self.fixed.p2];
        let free: Vec<usize> = (0..3).filter(|&k| fixed[k].is_none()).collect();
        let target: Vec<f64> = (0..n)
            .map(|i| {
                let h = 1.0 / (self.d[i] / p3 + self.w[i] / p4);
                let known: f64 = (0..3).filter_map(|k| fixed[k].map(|v| v * features[k](i))).sum();
                self.acc[i] + h - known
            })
            .collect();
        let m = free.len();
        let mut theta = [0.0; 3];
        if m > 0 {
            let mut a = vec![vec![0.0; m + 1]; m];
            for i in 0..n {
                for (r, &kr) in free.iter().enumerate() {
                    let fr = features[kr](i);
                    for (c, &kc) in free.iter().enumerate() {
                        a[r][c] += fr * features[kc](i);
                    }
                    a[r][m] += fr * target[i];
                }
            }
            let sol = solve_linear(a)?;
            for (j, &k) in free.iter().enumerate() {
                theta[k] = sol[j];
            }
        }
        for k in 0..3 {
            if let Some(v) = fixed[k] {
                theta[k] = v;
            }
        }
        let model = AccuracyModel { p: theta[0], p1: theta[1], p2: theta[2], p3, p4 };
        let ss = (0..n).map(|i| (model.eval(self.d[i], self.w[i]) - self.acc[i]).powi(2)).sum();
        Some((model, ss))
    }
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_linear(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let m = a.len();
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).max(1e-300);
    for col in 0..m {
        let pivot = (col..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..m {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..=m {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    Some((0..m).map(|i| a[i][m] / a[i][i]).collect())
}

const MIN_POINTS: usize = 5;
const MAX_ITERATIONS: usize = 20_000;

/// Least-squares fit of the accuracy model, holding any `fixed` parameters.
pub fn fit_accuracy_model(grid: &AccuracyGrid, fixed: &FixedParams) -> Result<AccuracyFit, AnalysisError> {
    if grid.len() < MIN_POINTS {
        return Err(AnalysisError::InsufficientPoints { needed: MIN_POINTS, got: grid.len() });
    }
    let distinct = |f: fn(&GridPoint) -> u32| grid.points().iter().map(f).collect::<HashSet<_>>().len();
    if distinct(|p| p.depth) < 2 || distinct(|p| p.width) < 2 {
        return Err(AnalysisError::DegenerateDomain("need at least two depths and two widths".into()));
    }
    for v in [fixed.p3, fixed.p4].into_iter().flatten() {
        if !(v > 0.0) {
            return Err(AnalysisError::InvalidValue("p3 and p4 must be positive".into()));
        }
    }
    let problem = Problem {
        d: grid.points().iter().map(|p| p.depth as f64).collect(),
        w: grid.points().iter().map(|p| p.width as f64).collect(),
        acc: grid.points().iter().map(|p| p.accuracy).collect(),
        fixed,
    };
    let degenerate = || AnalysisError::DegenerateDomain("linear parameters are not identifiable".into());

    // Log-space coordinates of the free nonlinear parameters.
    let free: Vec<bool> = vec![fixed.p3.is_none(), fixed.p4.is_none()];
    let eval = |x: [f64; 2]| -> Option<(AccuracyModel, f64)> {
        let p3 = fixed.p3.unwrap_or_else(|| x[0].exp());
        let p4 = fixed.p4.unwrap_or_else(|| x[1].exp());
        problem.project(p3, p4).filter(|(_, ss)| ss.is_finite())
    };

    let starts: Vec<[f64; 2]> = if free.iter().any(|&f| f) {
        let coarse = [10.0f64, 100.0, 1_000.0, 10_000.0];
        let mut s = Vec::new();
        for a in coarse {
            for b in coarse {
                s.push([a.ln(), b.ln()]);
            }
        }
        s
    } else {
        vec![[0.0, 0.0]]
    };

    let mut best: Option<(AccuracyModel, f64, Vec<f64>)> = None;
    for start in starts {
        let Some((mut model, mut ss)) = eval(start) else {
            continue;
        };
        let mut x = start;
        let mut history = vec![ss];
        let mut step = 1.0;
        let mut iterations = 0;
        while free.iter().any(|&f| f) && step > 1e-12 && iterations < MAX_ITERATIONS {
            iterations += 1;
            let before = x;
            let mut improved = false;
            for k in (0..2).filter(|&k| free[k]) {
                for dir in [1.0, -1.0] {
                    let mut trial = x;
                    trial[k] += dir * step;
                    if let Some((m, s)) = eval(trial) {
                        if s < ss {
                            (x, model, ss, improved) = (trial, m, s, true);
                            break;
                        }
                    }
                }
            }
            if improved {
                // Pattern move: keep going in the direction that worked.
                let mut trial = x;
                for k in 0..2 {
                    trial[k] += x[k] - before[k];
                }
                if let Some((m, s)) = eval(trial) {
                    if s < ss {
                        (x, model, ss) = (trial, m, s);
                    }
                }
                step *= 1.5;
            } else {
                step *= 0.5;
            }
            history.push(ss);
        }
        if best.as_ref().map_or(true, |b| ss < b.1) {
            best = Some((model, ss, history));
        }
    }
    let (model, ss, history) = best.ok_or_else(degenerate)?;
    let residuals: Vec<f64> = (0..problem.d.len())
        .map(|i| model.eval(problem.d[i], problem.w[i]) - problem.acc[i])
        .collect();
    Ok(AccuracyFit {
        model,
        ss,
        rss: ss.sqrt(),
        l1: residuals.iter().map(|r| r.abs()).sum(),
        max_abs: residuals.iter().fold(0.0, |m, r| m.max(r.abs())),
        points: residuals.len(),
        history,
    })
}
