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

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{Network, NnError};
use crate::board::Board;
use crate::encoding::{encode, InputTensor};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub network: String,
    pub params: usize,
    pub batch_size: usize,
    pub batches: usize,
    pub seconds: f64,
    pub batches_per_second: f64,
}

fn sample_batch(size: usize, batch_size: usize) -> Result<Vec<InputTensor>, NnError> {
    let board = Board::new(size, 7.5).map_err(|e| NnError::InvalidDescriptor(e.to_string()))?;
    let mut inputs = Vec::with_capacity(batch_size);
    let mut b = board;
    for i in 0..batch_size {
        // A few distinct positions so nothing is trivially constant.
        let moves = b.legal_moves();
        if let Some(&mv) = moves.get((i * 7) % moves.len().max(1)) {
            if !b.is_terminal() {
                b = b.play(mv).unwrap_or(b);
            }
        }
        inputs.push(encode(&b));
    }
    Ok(inputs)
}

/// Times full batches of forward passes for at least `min_time` (and at
/// least one batch).
pub fn bench_forward(net: &Network, batch_size: usize, min_time: Duration) -> Result<BenchResult, NnError> {
    let batch = sample_batch(net.descriptor().board_size, batch_size.max(1))?;
    let start = Instant::now();
    let mut batches = 0;
    loop {
        std::hint::black_box(net.forward(&batch)?);
        batches += 1;
        if start.elapsed() >= min_time {
            break;
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    Ok(BenchResult {
        network: net.descriptor().name(),
        params: net.num_params(),
        batch_size: batch.len(),
        batches,
        seconds,
        batches_per_second: batches as f64 / seconds,
    })
}
