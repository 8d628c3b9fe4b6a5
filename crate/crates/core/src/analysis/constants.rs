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

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// Win rates (percent) of PUCT with various constants against a baseline
/// constant, one row per descent budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WinrateTable {
    pub budgets: Vec<u32>,
    pub constants: Vec<f64>,
    /// `cells[row][col]`; `None` where no match was played.
    pub cells: Vec<Vec<Option<f64>>>,
    /// Constant of the opponent every cell was measured against.
    pub baseline: f64,
    /// Games per cell, when known.
    pub games: Option<u32>,
}

impl WinrateTable {
    pub fn new(
        budgets: Vec<u32>,
        constants: Vec<f64>,
        cells: Vec<Vec<Option<f64>>>,
        baseline: f64,
        games: Option<u32>,
    ) -> Result<Self, AnalysisError> {
        if budgets.is_empty() || constants.is_empty() {
            return Err(AnalysisError::EmptyTable);
        }
        if budgets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AnalysisError::InvalidValue("budgets must be strictly increasing".into()));
        }
        if cells.len() != budgets.len() || cells.iter().any(|r| r.len() != constants.len()) {
            return Err(AnalysisError::InvalidValue("cell matrix does not match the headers".into()));
        }
        if cells.iter().flatten().flatten().any(|v| !(0.0..=100.0).contains(v)) {
            return Err(AnalysisError::InvalidValue("win rates must lie in [0, 100]".into()));
        }
        Ok(WinrateTable { budgets, constants, cells, baseline, games })
    }

    /// Reads `budget,<c1>,<c2>,...` with one row per budget; empty cells
    /// are allowed.
    pub fn from_csv<R: Read>(input: R, baseline: f64, games: Option<u32>) -> Result<Self, AnalysisError> {
        let mut rdr = csv::Reader::from_reader(input);
        let bad = |m: String| AnalysisError::InvalidValue(m);
        let constants = rdr
            .headers()?
            .iter()
            .skip(1)
            .map(|h| h.trim().parse::<f64>().map_err(|_| bad(format!("header {h:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let mut budgets = Vec::new();
        let mut cells = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let mut fields = rec.iter();
            let b = fields.next().unwrap_or_default().trim();
            budgets.push(b.parse::<u32>().map_err(|_| bad(format!("budget {b:?}")))?);
            let row = fields
                .map(|f| match f.trim() {
                    "" => Ok(None),
                    v => v.parse::<f64>().map(Some).map_err(|_| bad(format!("cell {v:?}"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            cells.push(row);
        }
        WinrateTable::new(budgets, constants, cells, baseline, games)
    }

    pub fn to_csv<W: Write>(&self, out: W) -> Result<(), AnalysisError> {
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = vec!["budget".to_string()];
        header.extend(self.constants.iter().map(|c| c.to_string()));
        wtr.write_record(&header)?;
        for (b, row) in self.budgets.iter().zip(&self.cells) {
            let mut rec = vec![b.to_string()];
            rec.extend(row.iter().map(|v| v.map(|x| format!("{x:.2}")).unwrap_or_default()));
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Standard error of a cell in percentage points, `sqrt(p (1 - p) / n)`.
    pub fn stderr(&self, row: usize, col: usize) -> Option<f64> {
        let p = self.cells.get(row)?.get(col).copied().flatten()? / 100.0;
        let n = self.games? as f64;
        Some(100.0 * (p * (1.0 - p) / n).sqrt())
    }
}

/// Best constant for each budget: the row maximum, with the baseline
/// constant counted at 50%. Ties go to the smaller constant.
pub fn best_constant_per_budget(table: &WinrateTable) -> Result<Vec<(u32, f64)>, AnalysisError> {
    if table.budgets.is_empty() {
        return Err(AnalysisError::EmptyTable);
    }
    Ok(table
        .budgets
        .iter()
        .zip(&table.cells)
        .map(|(&budget, row)| {
            let mut candidates: Vec<(f64, f64)> = vec![(table.baseline, 50.0)];
            candidates.extend(table.constants.iter().zip(row).filter_map(|(&c, v)| Some((c, (*v)?))));
            candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut best = candidates[0];
            for &cand in &candidates[1..] {
                if cand.1 > best.1 {
                    best = cand;
                }
            }
            (budget, best.0)
        })
        .collect())
}

/// `sum_d |c e^(tau ln d) - c_d e^(0.5 ln d)|`.
pub fn gpuct_objective(best: &[(u32, f64)], tau: f64, c: f64) -> f64 {
    best.iter()
        .map(|&(d, c_d)| {
            let ln_d = (d as f64).ln();
            (c * (tau * ln_d).exp() - c_d * (0.5 * ln_d).exp()).abs()
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpuctFit {
    pub tau: f64,
    pub c: f64,
    pub objective: f64,
}

/// Grid minimizer of [`gpuct_objective`] over `tau` in `[0, 1]` and `c` in
/// `(0, 0.5]` at step 1e-3, refined on a 1e-4 grid around the best point.
/// Ties keep the first point in (tau, c) scan order.
pub fn fit_gpuct(best: &[(u32, f64)]) -> Result<GpuctFit, AnalysisError> {
    if best.is_empty() {
        return Err(AnalysisError::EmptyTable);
    }
    if best.iter().any(|&(d, c)| d == 0 || !c.is_finite()) {
        return Err(AnalysisError::InvalidValue("budgets must be positive".into()));
    }
    let mut fit = GpuctFit { tau: 0.0, c: 0.0, objective: f64::INFINITY };
    let consider = |tau: f64, c: f64, fit: &mut GpuctFit| {
        let obj = gpuct_objective(best, tau, c);
        if obj < fit.objective {
            *fit = GpuctFit { tau, c, objective: obj };
        }
    };
    for i in 0..=1000u32 {
        let tau = i as f64 / 1000.0;
        for j in 1..=500u32 {
            consider(tau, j as f64 / 1000.0, &mut fit);
        }
    }
    // Refine: a 1e-4 grid over one coarse step on each side.
    let (ti, cj) = ((fit.tau * 1e4).round() as i64, (fit.c * 1e4).round() as i64);
    for i in (ti - 10).max(0)..=(ti + 10).min(10_000) {
        for j in (cj - 10).max(1)..=(cj + 10).min(5_000) {
            consider(i as f64 / 1e4, j as f64 / 1e4, &mut fit);
        }
    }
    Ok(fit)
}
