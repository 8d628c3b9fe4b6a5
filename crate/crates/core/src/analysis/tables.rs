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

/// One network with whatever measurements are known for it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkRow {
    pub name: String,
    pub family: String,
    pub depth: u32,
    pub width: u32,
    pub params: Option<u64>,
    /// Batches of 32 per second on GPU.
    pub gpu_batch32_per_s: Option<f64>,
    /// Batches of 1 per second on CPU.
    pub cpu_batch1_per_s: Option<f64>,
    /// Policy accuracy on the validation set, in percent.
    pub accuracy: Option<f64>,
    /// Value mean squared error on the validation set.
    pub value_mse: Option<f64>,
}

pub fn read_networks<R: Read>(input: R) -> Result<Vec<NetworkRow>, AnalysisError> {
    let mut rdr = csv::Reader::from_reader(input);
    let rows = rdr.deserialize().collect::<Result<Vec<NetworkRow>, _>>()?;
    Ok(rows)
}

pub fn write_networks<W: Write>(rows: &[NetworkRow], out: W) -> Result<(), AnalysisError> {
    let mut wtr = csv::Writer::from_writer(out);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}
