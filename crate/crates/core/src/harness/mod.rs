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

//! Play experiments: single games, matches, round robins and self-play.
//!
//! Every game is a pure function of the two players, the game settings and
//! its seed. Player A takes Black on even seeds and White on odd ones, and
//! the first `opening_plies` moves are uniformly random legal points drawn
//! from the seed, so deterministic players still produce varied games.

mod selfplay;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{Action, Board, BoardError, Color, Move};
use crate::nn::{build, load_weights, Network, NetworkDescriptor, NnError};
use crate::search::{
    policy_move, search, AreaScoreEvaluator, BanditConfig, Budget, Evaluator, SearchError, UniformEvaluator,
};
use crate::sgf::{emit_sgf, GameRecord, GameResult};

pub use self::selfplay::{selfplay_generate, RootNoise, SelfPlayConfig, SelfPlayData};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("weight file {path}: {source}")]
    WeightFile { path: PathBuf, source: io::Error },
    #[error("network: {0}")]
    Network(#[from] NnError),
    #[error("descriptor mismatch: {0}")]
    DescriptorMismatch(String),
    #[error("invalid player {name:?}: {msg}")]
    InvalidPlayer { name: String, msg: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("duplicate player name {0:?}")]
    DuplicateName(String),
    #[error("board: {0}")]
    Board(#[from] BoardError),
    #[error("search: {0}")]
    Search(#[from] SearchError),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

/// Where a player's policy and value come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EvaluatorSpec {
    /// Flat priors, value 0.5.
    Uniform,
    /// Greedy area-score oracle.
    AreaScore {
        #[serde(default = "default_area_scale")]
        scale: f64,
    },
    /// All-zero network of the given descriptor.
    Zero { descriptor: String },
    /// Randomly initialized network.
    Random { descriptor: String, seed: u64 },
    /// Weight file; `descriptor`, when given, must match the file.
    Weights { path: PathBuf, descriptor: Option<String> },
}

fn default_area_scale() -> f64 {
    AreaScoreEvaluator::default().scale
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlayerKind {
    /// Plays the policy's top legal move instantly.
    PolicyOnly,
    Search,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayerSpec {
    pub name: String,
    pub kind: PlayerKind,
    pub evaluator: EvaluatorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandit: Option<BanditConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<Budget>,
}

impl PlayerSpec {
    pub fn policy_only(name: &str, evaluator: EvaluatorSpec) -> Self {
        PlayerSpec { name: name.into(), kind: PlayerKind::PolicyOnly, evaluator, bandit: None, budget: None }
    }

    pub fn search(name: &str, evaluator: EvaluatorSpec, bandit: BanditConfig, budget: Budget) -> Self {
        PlayerSpec { name: name.into(), kind: PlayerKind::Search, evaluator, bandit: Some(bandit), budget: Some(budget) }
    }

    /// Builds the evaluator and checks the spec against the board size.
    pub fn load(&self, board_size: usize) -> Result<Player, HarnessError> {
        let invalid = |msg: &str| HarnessError::InvalidPlayer { name: self.name.clone(), msg: msg.into() };
        if self.kind == PlayerKind::Search {
            let bandit = self.bandit.ok_or_else(|| invalid("search players need a bandit"))?;
            if !(bandit.c >= 0.0) || !(0.0..=1.0).contains(&bandit.tau()) {
                return Err(invalid("bandit needs c >= 0 and tau in [0, 1]"));
            }
            match self.budget {
                None => return Err(invalid("search players need a budget")),
                Some(Budget::Descents(0)) => return Err(invalid("budget must be positive")),
                Some(Budget::Time(t)) if t.is_zero() => return Err(invalid("budget must be positive")),
                _ => {}
            }
        }
        let check_size = |d: &NetworkDescriptor| {
            if d.board_size == board_size {
                Ok(())
            } else {
                Err(HarnessError::DescriptorMismatch(format!(
                    "{} is for {}x{}, games are {board_size}x{board_size}",
                    d.name(),
                    d.board_size,
                    d.board_size
                )))
            }
        };
        let eval: Arc<dyn Evaluator> = match &self.evaluator {
            EvaluatorSpec::Uniform => Arc::new(UniformEvaluator),
            EvaluatorSpec::AreaScore { scale } => Arc::new(AreaScoreEvaluator { scale: *scale }),
            EvaluatorSpec::Zero { descriptor } => {
                Arc::new(Network::zeros(&NetworkDescriptor::parse(descriptor, board_size)?)?)
            }
            EvaluatorSpec::Random { descriptor, seed } => {
                Arc::new(build(&NetworkDescriptor::parse(descriptor, board_size)?, *seed)?)
            }
            EvaluatorSpec::Weights { path, descriptor } => {
                let file = fs::File::open(path)
                    .map_err(|source| HarnessError::WeightFile { path: path.clone(), source })?;
                let net = load_weights(io::BufReader::new(file))?;
                check_size(net.descriptor())?;
                if let Some(want) = descriptor {
                    if *want != net.descriptor().name() {
                        return Err(HarnessError::DescriptorMismatch(format!(
                            "expected {want}, file holds {}",
                            net.descriptor().name()
                        )));
                    }
                }
                Arc::new(net)
            }
        };
        Ok(Player { spec: self.clone(), eval })
    }
}

/// A loaded player, cheap to clone and share across games.
#[derive(Clone)]
pub struct Player {
    pub spec: PlayerSpec,
    pub eval: Arc<dyn Evaluator>,
}

impl Player {
    pub fn name(&self) -> &str {
        &self.spec.name
    }

    /// Chooses a move for the side to move on a non-terminal board.
    pub fn choose(&self, board: &Board) -> Result<Action, HarnessError> {
        Ok(match self.spec.kind {
            PlayerKind::PolicyOnly => policy_move(board, self.eval.as_ref())?,
            PlayerKind::Search => {
                let bandit = self.spec.bandit.expect("validated on load");
                let budget = self.spec.budget.expect("validated on load");
                search(board, self.eval.as_ref(), &bandit, budget)?.best
            }
        })
    }
}

impl std::fmt::Debug for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Player").field("spec", &self.spec).finish_non_exhaustive()
    }
}

/// Default number of random opening plies for a board size.
pub fn default_opening_plies(board_size: usize) -> usize {
    match board_size {
        0..=9 => 4,
        10..=13 => 6,
        _ => 8,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub board_size: usize,
    pub komi: f64,
    /// Uniformly random legal opening moves (never passes).
    pub opening_plies: usize,
    /// Games stop here and are scored as they stand; defaults to
    /// `2 * size^2`.
    pub move_cap: usize,
}

impl GameConfig {
    pub fn new(board_size: usize, komi: f64) -> Self {
        GameConfig {
            board_size,
            komi,
            opening_plies: default_opening_plies(board_size),
            move_cap: 2 * board_size * board_size,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameOutcome {
    pub seed: u64,
    /// Color player A played.
    pub a_color: Color,
    /// `None` for a drawn score.
    pub winner: Option<Color>,
    /// Area score from Black's side, komi included.
    pub score: f64,
    pub moves: usize,
    /// True when the move cap ended the game.
    pub capped: bool,
    pub record: GameRecord,
}

impl GameOutcome {
    /// 1 for a win by A, 0.5 for a draw, 0 for a loss.
    pub fn points_a(&self) -> f64 {
        match self.winner {
            Some(c) if c == self.a_color => 1.0,
            Some(_) => 0.0,
            None => 0.5,
        }
    }

    pub fn sgf(&self) -> String {
        emit_sgf(&self.record)
    }
}

fn random_opening_move(board: &Board, rng: &mut ChaCha8Rng) -> Move {
    let plays: Vec<Move> = board.legal_moves().into_iter().filter(|m| m.action != Action::Pass).collect();
    plays.choose(rng).copied().unwrap_or(Move::pass(board.to_play()))
}

/// Plays one game between `a` and `b`; A is Black on even seeds.
pub fn play_game(a: &Player, b: &Player, cfg: &GameConfig, seed: u64) -> Result<GameOutcome, HarnessError> {
    let mut board = Board::new(cfg.board_size, cfg.komi)?;
    let a_color = if seed % 2 == 0 { Color::Black } else { Color::White };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut record = GameRecord::new(cfg.board_size, cfg.komi);
    let (black, white) = if a_color == Color::Black { (a, b) } else { (b, a) };
    record.metadata.insert("PB".into(), black.name().into());
    record.metadata.insert("PW".into(), white.name().into());

    while !board.is_terminal() && record.moves.len() < cfg.move_cap {
        let mv = if record.moves.len() < cfg.opening_plies {
            random_opening_move(&board, &mut rng)
        } else {
            let player = if board.to_play() == Color::Black { black } else { white };
            Move { color: board.to_play(), action: player.choose(&board)? }
        };
        board = board.play(mv)?;
        record.moves.push(mv);
    }
    let score = board.area_score();
    record.result = GameResult::from_score(score);
    Ok(GameOutcome {
        seed,
        a_color,
        winner: board.winner(),
        score,
        moves: record.moves.len(),
        capped: !board.is_terminal(),
        record,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub games: usize,
    /// Points scored by A; draws count one half.
    pub wins_a: f64,
    pub draws: usize,
    /// `wins_a / games`.
    pub winrate: f64,
    /// `sqrt(winrate (1 - winrate) / games)`.
    pub stderr: f64,
    pub a_black_games: usize,
    pub capped_games: usize,
}

impl MatchResult {
    pub fn from_outcomes(outcomes: &[GameOutcome]) -> MatchResult {
        let games = outcomes.len();
        let wins_a: f64 = outcomes.iter().map(GameOutcome::points_a).sum();
        let winrate = if games == 0 { 0.0 } else { wins_a / games as f64 };
        MatchResult {
            games,
            wins_a,
            draws: outcomes.iter().filter(|o| o.winner.is_none()).count(),
            winrate,
            stderr: stderr(winrate, games),
            a_black_games: outcomes.iter().filter(|o| o.a_color == Color::Black).count(),
            capped_games: outcomes.iter().filter(|o| o.capped).count(),
        }
    }
}

/// Standard error of a win rate over `n` games.
pub fn stderr(winrate: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (winrate * (1.0 - winrate) / n as f64).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub game: GameConfig,
    /// Game `i` uses seed `base_seed + i`.
    pub base_seed: u64,
    /// Worker threads; results do not depend on it.
    pub threads: usize,
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, HarnessError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| HarnessError::InvalidConfig(e.to_string()))
}

/// Plays `n_games` games (even, so colors balance) with consecutive seeds.
pub fn run_match(
    a: &Player,
    b: &Player,
    n_games: usize,
    cfg: &MatchConfig,
) -> Result<(MatchResult, Vec<GameOutcome>), HarnessError> {
    if n_games < 2 || n_games % 2 != 0 {
        return Err(HarnessError::InvalidConfig(format!("match needs an even number of games >= 2, got {n_games}")));
    }
    let outcomes: Vec<GameOutcome> = pool(cfg.threads)?.install(|| {
        (0..n_games as u64)
            .into_par_iter()
            .map(|i| play_game(a, b, &cfg.game, cfg.base_seed + i))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok((MatchResult::from_outcomes(&outcomes), outcomes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standing {
    pub name: String,
    pub games: usize,
    pub points: f64,
    pub winrate: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub a: String,
    pub b: String,
    pub result: MatchResult,
}

/// Per-player standings, best first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub standings: Vec<Standing>,
    pub pairs: Vec<PairResult>,
}

impl ResultTable {
    /// `name,winrate,stderr` with both numbers in percent.
    pub fn to_csv<W: io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["name", "winrate", "stderr"])?;
        for s in &self.standings {
            wtr.write_record([s.name.clone(), format!("{:.2}", 100.0 * s.winrate), format!("{:.2}", 100.0 * s.stderr)])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Every unordered pair plays `games_per_pair` games. Pair `k` (in
/// `(i, j)`, `i < j` order) uses seeds from `base_seed + k * games_per_pair`.
pub fn round_robin(
    players: &[Player],
    games_per_pair: usize,
    cfg: &MatchConfig,
) -> Result<(ResultTable, Vec<GameOutcome>), HarnessError> {
    if players.len() < 2 {
        return Err(HarnessError::InvalidConfig("round robin needs at least two players".into()));
    }
    for (i, p) in players.iter().enumerate() {
        if players[..i].iter().any(|q| q.name() == p.name()) {
            return Err(HarnessError::DuplicateName(p.name().into()));
        }
    }
    let mut points = vec![0.0; players.len()];
    let mut games = vec![0usize; players.len()];
    let mut pairs = Vec::new();
    let mut all = Vec::new();
    let mut k = 0u64;
    for i in 0..players.len() {
        for j in i + 1..players.len() {
            let pair_cfg = MatchConfig { base_seed: cfg.base_seed + k * games_per_pair as u64, ..*cfg };
            let (result, outcomes) = run_match(&players[i], &players[j], games_per_pair, &pair_cfg)?;
            points[i] += result.wins_a;
            points[j] += result.games as f64 - result.wins_a;
            games[i] += result.games;
            games[j] += result.games;
            pairs.push(PairResult { a: players[i].name().into(), b: players[j].name().into(), result });
            all.extend(outcomes);
            k += 1;
        }
    }
    let mut standings: Vec<Standing> = players
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let winrate = points[i] / games[i] as f64;
            Standing { name: p.name().into(), games: games[i], points: points[i], winrate, stderr: stderr(winrate, games[i]) }
        })
        .collect();
    standings.sort_by(|a, b| b.winrate.total_cmp(&a.winrate).then_with(|| a.name.cmp(&b.name)));
    Ok((ResultTable { standings, pairs }, all))
}

/// Writes `game-<seed>.sgf` files for every outcome.
pub fn write_sgfs(dir: &Path, outcomes: &[GameOutcome]) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    for (i, o) in outcomes.iter().enumerate() {
        fs::write(dir.join(format!("game-{i:05}-seed{}.sgf", o.seed)), o.sgf())?;
    }
    Ok(())
}

/// JSON description of a run, written next to its outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub players: Vec<PlayerSpec>,
    pub config: serde_json::Value,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, players: Vec<PlayerSpec>, config: serde_json::Value) -> Self {
        RunManifest { command: command.into(), version: env!("CARGO_PKG_VERSION").into(), seed, players, config }
    }
}
