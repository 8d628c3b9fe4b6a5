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

//! Monte Carlo tree search driven by a policy/value evaluator.
//!
//! Each descent walks down the tree with [`select_child`], expands the first
//! unexpanded node with one evaluation, and backs the leaf value up the path,
//! flipping perspective at every ply. Values are win probabilities from the
//! point of view of the player who chose the edge, so they stay in `[0, 1]`.
//!
//! Conventions: `N(s)` counts the expansion visit, so an expanded node
//! always has `N(s) = 1 + sum_a N(s, a)`; unvisited edges use the configured
//! first-play urgency (0 by default) as their `Q`.

mod evaluator;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{Action, Board, Color, Move};
use crate::nn::NnError;

pub use self::evaluator::{AreaScoreEvaluator, Evaluator, UniformEvaluator};

#[derive(Debug, Error, PartialEq)]
pub enum SearchError {
    #[error("the root position is terminal")]
    TerminalRoot,
    #[error("node has no legal moves")]
    NoLegalMoves,
    #[error("evaluator failed: {0}")]
    Evaluator(#[from] NnError),
}

/// Form of the exploration term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Bandit {
    /// `c * P * sqrt(N(s)) / (1 + N(s, a))`.
    Puct,
    /// `c * P * N(s)^tau / (1 + N(s, a))`; `tau = 0.5` is PUCT.
    Gpuct { tau: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BanditConfig {
    pub c: f64,
    pub bandit: Bandit,
    /// `Q` of an edge that has never been visited.
    #[serde(default)]
    pub fpu: f64,
}

impl BanditConfig {
    pub fn puct(c: f64) -> Self {
        BanditConfig { c, bandit: Bandit::Puct, fpu: 0.0 }
    }

    pub fn gpuct(c: f64, tau: f64) -> Self {
        BanditConfig { c, bandit: Bandit::Gpuct { tau }, fpu: 0.0 }
    }

    /// Exponent applied to `N(s)`.
    pub fn tau(&self) -> f64 {
        match self.bandit {
            Bandit::Puct => 0.5,
            Bandit::Gpuct { tau } => tau,
        }
    }
}

/// Generalized exploration term `c * P * N_s^tau / (1 + N_sa)`, zero when
/// `N_s` is zero.
pub fn exploration_term(cfg: &BanditConfig, prior: f64, n_s: u32, n_sa: u32) -> f64 {
    if n_s == 0 {
        return 0.0;
    }
    match cfg.bandit {
        Bandit::Puct => puct_term(cfg.c, prior, n_s, n_sa),
        Bandit::Gpuct { tau } => cfg.c * prior * (n_s as f64).powf(tau) / (1.0 + n_sa as f64),
    }
}

/// Square-root form, kept separate from the generalized one.
pub fn puct_term(c: f64, prior: f64, n_s: u32, n_sa: u32) -> f64 {
    c * prior * (n_s as f64).sqrt() / (1.0 + n_sa as f64)
}

/// Converts a White win probability to the given side's point of view.
pub fn value_perspective(v_white: f64, to_play: Color) -> f64 {
    match to_play {
        Color::White => v_white,
        Color::Black => 1.0 - v_white,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeStats {
    pub action: Action,
    pub prior: f64,
    pub visits: u32,
    /// Sum of backed-up values from the perspective of the side choosing
    /// this edge.
    pub value_sum: f64,
}

impl EdgeStats {
    pub fn q(&self) -> Option<f64> {
        (self.visits > 0).then(|| self.value_sum / self.visits as f64)
    }
}

/// Index of the edge maximizing `Q + exploration`; ties go to the earliest
/// edge, and edges are kept in ascending move-index order.
pub fn select_child(edges: &[EdgeStats], parent_visits: u32, cfg: &BanditConfig) -> Result<usize, SearchError> {
    let mut best: Option<(usize, f64)> = None;
    for (i, e) in edges.iter().enumerate() {
        let score = e.q().unwrap_or(cfg.fpu) + exploration_term(cfg, e.prior, parent_visits, e.visits);
        if best.map_or(true, |(_, s)| score > s) {
            best = Some((i, score));
        }
    }
    best.map(|(i, _)| i).ok_or(SearchError::NoLegalMoves)
}

/// Per-move search allowance. Text form: `descents:32`, `time:10s`,
/// `time:250ms`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Budget {
    Descents(u32),
    Time(Duration),
}

impl FromStr for Budget {
    type Err = String;

    fn from_str(s: &str) -> Result<Budget, String> {
        let bad = || format!("invalid budget {s:?} (expected descents:N or time:<secs>s|<ms>ms)");
        let (kind, value) = s.trim().split_once(':').ok_or_else(bad)?;
        let budget = match kind {
            "descents" => Budget::Descents(value.parse().map_err(|_| bad())?),
            "time" => {
                let secs = if let Some(ms) = value.strip_suffix("ms") {
                    ms.parse::<f64>().map_err(|_| bad())? / 1000.0
                } else {
                    value.strip_suffix('s').unwrap_or(value).parse::<f64>().map_err(|_| bad())?
                };
                if !secs.is_finite() || secs < 0.0 {
                    return Err(bad());
                }
                Budget::Time(Duration::from_secs_f64(secs))
            }
            _ => return Err(bad()),
        };
        match budget {
            Budget::Descents(0) => Err(bad()),
            Budget::Time(t) if t.is_zero() => Err(bad()),
            b => Ok(b),
        }
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Descents(n) => write!(f, "descents:{n}"),
            Budget::Time(t) => write!(f, "time:{}ms", t.as_millis()),
        }
    }
}

impl TryFrom<String> for Budget {
    type Error = String;

    fn try_from(s: String) -> Result<Budget, String> {
        s.parse()
    }
}

impl From<Budget> for String {
    fn from(b: Budget) -> String {
        b.to_string()
    }
}

#[derive(Clone, Debug)]
struct Node {
    board: Board,
    visits: u32,
    expanded: bool,
    edges: Vec<EdgeStats>,
    children: Vec<Option<usize>>,
}

impl Node {
    fn new(board: Board) -> Node {
        Node { board, visits: 0, expanded: false, edges: Vec::new(), children: Vec::new() }
    }
}

/// Priors over the legal moves: a softmax of their logits.
pub fn legal_priors(board: &Board, logits: &[f32]) -> Vec<(Action, f64)> {
    let n = board.size();
    let moves = board.legal_moves();
    let raw: Vec<f64> = moves.iter().map(|m| logits[m.action.policy_index(n)] as f64).collect();
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = raw.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    let mut out: Vec<(Action, f64)> = moves.iter().zip(exps).map(|(m, e)| (m.action, e / total)).collect();
    out.sort_by_key(|(a, _)| a.policy_index(n));
    out
}

/// Value of a finished game for the side to move.
fn terminal_value(board: &Board) -> f64 {
    match board.winner() {
        Some(c) if c == board.to_play() => 1.0,
        Some(_) => 0.0,
        None => 0.5,
    }
}

/// A search tree rooted at one position. Owned by a single worker.
#[derive(Clone, Debug)]
pub struct Tree {
    nodes: Vec<Node>,
    cfg: BanditConfig,
}

impl Tree {
    pub fn new(root: Board, cfg: BanditConfig) -> Result<Tree, SearchError> {
        if root.is_terminal() {
            return Err(SearchError::TerminalRoot);
        }
        Ok(Tree { nodes: vec![Node::new(root)], cfg })
    }

    pub fn root(&self) -> &Board {
        &self.nodes[0].board
    }

    pub fn root_visits(&self) -> u32 {
        self.nodes[0].visits
    }

    pub fn root_edges(&self) -> &[EdgeStats] {
        &self.nodes[0].edges
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Expands `id` and returns its value for the side to move.
    fn expand(&mut self, id: usize, eval: &dyn Evaluator) -> Result<f64, SearchError> {
        let node = &mut self.nodes[id];
        let out = eval.evaluate(&node.board)?;
        let priors = legal_priors(&node.board, &out.policy_logits);
        node.edges = priors
            .into_iter()
            .map(|(action, prior)| EdgeStats { action, prior, visits: 0, value_sum: 0.0 })
            .collect();
        node.children = vec![None; node.edges.len()];
        node.expanded = true;
        Ok(value_perspective(out.value as f64, node.board.to_play()))
    }

    /// Runs one descent.
    pub fn descend(&mut self, eval: &dyn Evaluator) -> Result<(), SearchError> {
        let mut path: Vec<(usize, usize)> = Vec::new();
        let mut id = 0;
        let leaf_value = loop {
            let node = &self.nodes[id];
            if node.board.is_terminal() {
                break terminal_value(&node.board);
            }
            if !node.expanded {
                break self.expand(id, eval)?;
            }
            let e = select_child(&node.edges, node.visits, &self.cfg)?;
            path.push((id, e));
            id = match node.children[e] {
                Some(child) => child,
                None => {
                    let mv = Move { color: node.board.to_play(), action: node.edges[e].action };
                    let board = node.board.play(mv).expect("edges hold legal moves");
                    self.nodes.push(Node::new(board));
                    let child = self.nodes.len() - 1;
                    self.nodes[id].children[e] = Some(child);
                    child
                }
            };
        };
        self.nodes[id].visits += 1;
        let mut v = leaf_value;
        for &(nid, e) in path.iter().rev() {
            v = 1.0 - v;
            let node = &mut self.nodes[nid];
            node.visits += 1;
            node.edges[e].visits += 1;
            node.edges[e].value_sum += v;
        }
        debug_assert!(self.check_invariants().is_ok());
        Ok(())
    }

    /// Mixes `noise` into the root priors as `(1 - fraction) P + fraction
    /// noise`; expands the root first if needed.
    pub fn add_root_noise(&mut self, eval: &dyn Evaluator, noise: &[f64], fraction: f64) -> Result<(), SearchError> {
        if !self.nodes[0].expanded {
            self.descend(eval)?;
        }
        for (e, n) in self.nodes[0].edges.iter_mut().zip(noise) {
            e.prior = (1.0 - fraction) * e.prior + fraction * n;
        }
        Ok(())
    }

    /// Most visited root edge; ties by Q, then prior, then move index.
    pub fn best_action(&self) -> Action {
        let edges = &self.nodes[0].edges;
        let mut best = &edges[0];
        for e in &edges[1..] {
            let key = |x: &EdgeStats| (x.visits, x.q().unwrap_or(self.cfg.fpu), x.prior);
            let (a, b) = (key(e), key(best));
            if a.0 > b.0 || (a.0 == b.0 && (a.1 > b.1 || (a.1 == b.1 && a.2 > b.2))) {
                best = e;
            }
        }
        best.action
    }

    /// Checks visit bookkeeping and value ranges on every node.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (i, node) in self.nodes.iter().enumerate() {
            if !node.expanded {
                continue;
            }
            let sum: u32 = node.edges.iter().map(|e| e.visits).sum();
            if node.visits != sum + 1 {
                return Err(format!("node {i}: N(s) = {} but edges sum to {sum}", node.visits));
            }
            let priors: f64 = node.edges.iter().map(|e| e.prior).sum();
            if (priors - 1.0).abs() > 1e-6 {
                return Err(format!("node {i}: priors sum to {priors}"));
            }
            for e in &node.edges {
                if let Some(q) = e.q() {
                    if !(0.0..=1.0).contains(&q) {
                        return Err(format!("node {i}: Q = {q}"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub best: Action,
    pub descents: u32,
    pub root_visits: u32,
    pub children: Vec<EdgeStats>,
}

/// Searches from `root` within `budget` (at least one descent) and returns
/// the most visited move with the root statistics.
pub fn search(root: &Board, eval: &dyn Evaluator, cfg: &BanditConfig, budget: Budget) -> Result<SearchResult, SearchError> {
    let mut tree = Tree::new(root.clone(), *cfg)?;
    run(&mut tree, eval, budget)
}

/// Continues an existing tree for `budget` more descents.
pub fn run(tree: &mut Tree, eval: &dyn Evaluator, budget: Budget) -> Result<SearchResult, SearchError> {
    let mut descents = 0;
    match budget {
        Budget::Descents(n) => {
            for _ in 0..n.max(1) {
                tree.descend(eval)?;
                descents += 1;
            }
        }
        Budget::Time(limit) => {
            let start = Instant::now();
            loop {
                tree.descend(eval)?;
                descents += 1;
                if start.elapsed() >= limit {
                    break;
                }
            }
        }
    }
    Ok(SearchResult {
        best: tree.best_action(),
        descents,
        root_visits: tree.root_visits(),
        children: tree.root_edges().to_vec(),
    })
}

/// Plays the legal move with the highest policy logit (ties to the lowest
/// move index), with no search.
pub fn policy_move(board: &Board, eval: &dyn Evaluator) -> Result<Action, SearchError> {
    if board.is_terminal() {
        return Err(SearchError::TerminalRoot);
    }
    let out = eval.evaluate(board)?;
    let priors = legal_priors(board, &out.policy_logits);
    let mut best = priors.first().ok_or(SearchError::NoLegalMoves)?;
    for p in &priors[1..] {
        if p.1 > best.1 {
            best = p;
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests;
