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

use crate::board::{Action, Board, Color};
use crate::encoding::encode;
use crate::nn::{ops::sigmoid, Network, NnError, Prediction};

/// Something that scores positions for the search: policy logits over
/// `size * size + 1` moves (pass last) and White's win probability.
pub trait Evaluator: Send + Sync {
    fn evaluate(&self, board: &Board) -> Result<Prediction, NnError>;
}

impl Evaluator for Network {
    fn evaluate(&self, board: &Board) -> Result<Prediction, NnError> {
        self.forward_one(&encode(board))
    }
}

/// Flat priors and an even value: search guided by visits alone.
#[derive(Clone, Copy, Debug, Default)]
pub struct UniformEvaluator;

impl Evaluator for UniformEvaluator {
    fn evaluate(&self, board: &Board) -> Result<Prediction, NnError> {
        let n = board.size();
        Ok(Prediction { policy_logits: vec![0.0; n * n + 1], value: 0.5 })
    }
}

/// Greedy Tromp-Taylor oracle. The value is a logistic of the current area
/// score; each move's logit is the mover's area score after playing it,
/// with pass charged one point so that neutral points get filled first.
#[derive(Clone, Copy, Debug)]
pub struct AreaScoreEvaluator {
    /// Score points per logit unit.
    pub scale: f64,
}

impl Default for AreaScoreEvaluator {
    fn default() -> Self {
        AreaScoreEvaluator { scale: 2.0 }
    }
}

impl Evaluator for AreaScoreEvaluator {
    fn evaluate(&self, board: &Board) -> Result<Prediction, NnError> {
        let n = board.size();
        let mover = board.to_play();
        let sign = |s: f64| if mover == Color::Black { s } else { -s };
        let floor = (sign(board.area_score()) - 1.0 - 2.0 * (n * n) as f64) / self.scale;
        let mut logits = vec![floor as f32; n * n + 1];
        for mv in board.legal_moves() {
            let after = match mv.action {
                Action::Pass => sign(board.area_score()) - 1.0,
                Action::Play(_) => sign(board.play(mv).expect("legal").area_score()),
            };
            logits[mv.action.policy_index(n)] = (after / self.scale) as f32;
        }
        let value = sigmoid((-board.area_score() / self.scale) as f32).clamp(f32::EPSILON, 1.0 - f32::EPSILON);
        Ok(Prediction { policy_logits: logits, value })
    }
}
