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

//! Self-play data generation.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Dirichlet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{pool, random_opening_move, GameConfig, GameOutcome, HarnessError, Player, PlayerKind};
use crate::board::{Action, Board, Color, Move};
use crate::encoding::{make_example, TrainingExample};
use crate::search::{policy_move, run, Tree};
use crate::sgf::{GameRecord, GameResult};

/// Dirichlet noise mixed into the root priors before each search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootNoise {
    pub alpha: f64,
    pub fraction: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfPlayConfig {
    pub game: GameConfig,
    pub games: usize,
    pub base_seed: u64,
    pub threads: usize,
    pub noise: Option<RootNoise>,
    /// Moves are sampled in proportion to `visits^(1 / temperature)` for the
    /// first `temperature_moves` searched moves, then played greedily.
    pub temperature: f64,
    pub temperature_moves: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelfPlayData {
    /// One example per searched move of every decisive game, in game order.
    pub examples: Vec<TrainingExample>,
    pub outcomes: Vec<GameOutcome>,
}

impl SelfPlayData {
    pub fn drawn_games(&self) -> usize {
        self.outcomes.iter().filter(|o| o.winner.is_none()).count()
    }
}

fn sample_visits(children: &[crate::search::EdgeStats], temperature: f64, rng: &mut ChaCha8Rng) -> Option<Action> {
    let weights: Vec<f64> = children.iter().map(|e| (e.visits as f64).powf(1.0 / temperature)).collect();
    let dist = WeightedIndex::new(&weights).ok()?;
    Some(children[dist.sample(rng)].action)
}

fn choose(
    player: &Player,
    board: &Board,
    cfg: &SelfPlayConfig,
    searched: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Action, HarnessError> {
    if player.spec.kind == PlayerKind::PolicyOnly {
        return Ok(policy_move(board, player.eval.as_ref())?);
    }
    let bandit = player.spec.bandit.expect("validated on load");
    let budget = player.spec.budget.expect("validated on load");
    let mut tree = Tree::new(board.clone(), bandit)?;
    if let Some(noise) = cfg.noise {
        tree.descend(player.eval.as_ref())?;
        let k = tree.root_edges().len();
        if k >= 2 {
            let dir = Dirichlet::new_with_size(noise.alpha, k)
                .map_err(|e| HarnessError::InvalidConfig(format!("dirichlet: {e}")))?;
            let sample = dir.sample(rng);
            tree.add_root_noise(player.eval.as_ref(), &sample, noise.fraction)?;
        }
    }
    let result = run(&mut tree, player.eval.as_ref(), budget)?;
    if searched < cfg.temperature_moves && cfg.temperature > 0.0 {
        if let Some(a) = sample_visits(&result.children, cfg.temperature, rng) {
            return Ok(a);
        }
    }
    Ok(result.best)
}

fn selfplay_game(player: &Player, cfg: &SelfPlayConfig, seed: u64) -> Result<(GameOutcome, Vec<TrainingExample>), HarnessError> {
    let g = &cfg.game;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut board = Board::new(g.board_size, g.komi)?;
    let mut record = GameRecord::new(g.board_size, g.komi);
    record.metadata.insert("PB".into(), player.name().into());
    record.metadata.insert("PW".into(), player.name().into());
    // (position, move) pairs that become examples once the winner is known.
    let mut searched: Vec<(Board, Move)> = Vec::new();
    while !board.is_terminal() && record.moves.len() < g.move_cap {
        let mv = if record.moves.len() < g.opening_plies {
            random_opening_move(&board, &mut rng)
        } else {
            let action = choose(player, &board, cfg, searched.len(), &mut rng)?;
            let mv = Move { color: board.to_play(), action };
            searched.push((board.clone(), mv));
            mv
        };
        board = board.play(mv)?;
        record.moves.push(mv);
    }
    let score = board.area_score();
    record.result = GameResult::from_score(score);
    let winner = board.winner();
    let examples = match winner {
        Some(w) => searched
            .iter()
            .map(|(b, m)| make_example(b, *m, w).expect("searched moves are legal"))
            .collect(),
        None => Vec::new(),
    };
    let outcome = GameOutcome {
        seed,
        a_color: Color::Black,
        winner,
        score,
        moves: record.moves.len(),
        capped: !board.is_terminal(),
        record,
    };
    Ok((outcome, examples))
}

/// Plays `cfg.games` self-play games with seeds `base_seed + i`. Drawn games
/// contribute no examples.
pub fn selfplay_generate(player: &Player, cfg: &SelfPlayConfig) -> Result<SelfPlayData, HarnessError> {
    if let Some(n) = cfg.noise {
        if !(n.alpha > 0.0) || !(0.0..=1.0).contains(&n.fraction) {
            return Err(HarnessError::InvalidConfig("noise needs alpha > 0 and fraction in [0, 1]".into()));
        }
    }
    let games: Vec<(GameOutcome, Vec<TrainingExample>)> = pool(cfg.threads)?.install(|| {
        (0..cfg.games as u64)
            .into_par_iter()
            .map(|i| selfplay_game(player, cfg, cfg.base_seed + i))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut data = SelfPlayData { examples: Vec::new(), outcomes: Vec::new() };
    for (o, ex) in games {
        data.outcomes.push(o);
        data.examples.extend(ex);
    }
    Ok(data)
}
