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

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::board::tests::random_game;
use crate::board::Point;
use crate::nn::{build, NetworkDescriptor};

fn edge(i: u16, prior: f64, visits: u32, value_sum: f64) -> EdgeStats {
    EdgeStats { action: Action::Play(Point(i)), prior, visits, value_sum }
}

#[test]
fn exploration_term_examples() {
    let cfg = BanditConfig::gpuct(0.1, 0.5);
    assert!((exploration_term(&cfg, 1.0, 16, 0) - 0.4).abs() < 1e-15);

    // 0.057 * 512^0.737 evaluated with 32-digit arithmetic.
    let oracle = 5.657_268_833_507_747_153_854_949_846_189_4_f64;
    let got = exploration_term(&BanditConfig::gpuct(0.057, 0.737), 1.0, 512, 0);
    assert!((got - oracle).abs() / oracle < 1e-12, "{got}");

    for cfg in [BanditConfig::puct(0.3), BanditConfig::gpuct(0.2, 0.9)] {
        assert_eq!(exploration_term(&cfg, 0.7, 0, 3), 0.0);
    }
    assert_eq!(exploration_term(&BanditConfig::gpuct(0.2, 0.9), 0.7, 10, 9), 0.2 * 0.7 * 10f64.powf(0.9) / 10.0);
}

#[test]
fn value_perspective_flips_for_black() {
    assert_eq!(value_perspective(0.7, Color::White), 0.7);
    assert!((value_perspective(0.7, Color::Black) - 0.3).abs() < 1e-15);
    assert_eq!(value_perspective(1.0 - value_perspective(0.25, Color::Black), Color::White), 0.25);
}

#[test]
fn select_child_prefers_prior_then_explores() {
    let cfg = BanditConfig::puct(0.1);
    let edges = [edge(0, 0.1, 2, 1.0), edge(1, 0.9, 2, 1.0)];
    assert_eq!(select_child(&edges, 5, &cfg).unwrap(), 1);

    // A has Q = 1 and many visits; B is unvisited with Q = FPU = 0.
    let mut n_s = 1;
    loop {
        let edges = [edge(0, 0.5, 1_000_000, 1_000_000.0), edge(1, 0.5, 0, 0.0)];
        if select_child(&edges, n_s, &cfg).unwrap() == 1 {
            break;
        }
        n_s = n_s.checked_mul(2).expect("exploration never took over");
    }
    assert!(select_child(&[], 1, &cfg).is_err());

    // Exact ties go to the first (lowest index) edge.
    let tied = [edge(3, 0.25, 1, 0.5), edge(7, 0.25, 1, 0.5)];
    assert_eq!(select_child(&tied, 3, &cfg).unwrap(), 0);
}

fn random_edges(rng: &mut ChaCha8Rng) -> (Vec<EdgeStats>, u32) {
    let k = rng.gen_range(1..20);
    let mut priors: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
    let total: f64 = priors.iter().sum();
    priors.iter_mut().for_each(|p| *p /= total);
    let edges: Vec<EdgeStats> = priors
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let visits = if rng.gen_bool(0.3) { 0 } else { rng.gen_range(1..500) };
            let value_sum = visits as f64 * rng.gen::<f64>();
            edge(i as u16, p, visits, value_sum)
        })
        .collect();
    let n_s = edges.iter().map(|e| e.visits).sum::<u32>() + 1;
    (edges, n_s)
}

#[test]
fn gpuct_at_one_half_selects_like_puct() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let (edges, n_s) = random_edges(&mut rng);
        let c = rng.gen_range(0.0..1.0);
        let a = select_child(&edges, n_s, &BanditConfig::gpuct(c, 0.5)).unwrap();
        let b = select_child(&edges, n_s, &BanditConfig::puct(c)).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn selection_ignores_prior_scale_after_renormalizing() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let (edges, n_s) = random_edges(&mut rng);
        let scaled: Vec<EdgeStats> = edges.iter().map(|e| EdgeStats { prior: e.prior * 4.0, ..*e }).collect();
        let total: f64 = scaled.iter().map(|e| e.prior).sum();
        let renorm: Vec<EdgeStats> = scaled.iter().map(|e| EdgeStats { prior: e.prior / total, ..*e }).collect();
        let cfg = BanditConfig::gpuct(0.3, 0.737);
        assert_eq!(select_child(&edges, n_s, &cfg).unwrap(), select_child(&renorm, n_s, &cfg).unwrap());
    }
}

#[test]
fn single_descent_returns_policy_argmax() {
    let net = build(&NetworkDescriptor::mobile_se(2, 24, 8, 9), 3).unwrap();
    for board in random_game(9, 2, 40).iter().step_by(7) {
        if board.is_terminal() {
            continue;
        }
        let r = search(board, &net, &BanditConfig::puct(0.1), Budget::Descents(1)).unwrap();
        assert_eq!(r.best, policy_move(board, &net).unwrap());
        assert_eq!(r.root_visits, 1);
        assert!(r.children.iter().all(|e| e.visits == 0));
    }
}

#[test]
fn bookkeeping_holds_for_descent_budgets() {
    let net = build(&NetworkDescriptor::residual(1, 8, 9), 4).unwrap();
    let board = &random_game(9, 5, 12)[10];
    for cfg in [BanditConfig::puct(0.1), BanditConfig::gpuct(0.057, 0.737), BanditConfig::gpuct(1.0, 1.0)] {
        for n in [2, 17, 200] {
            let mut tree = Tree::new(board.clone(), cfg).unwrap();
            let r = run(&mut tree, &net, Budget::Descents(n)).unwrap();
            assert_eq!(r.descents, n);
            assert_eq!(r.children.iter().map(|e| e.visits).sum::<u32>(), n - 1);
            assert_eq!(r.root_visits, n);
            tree.check_invariants().unwrap();
        }
    }
}

#[test]
fn search_is_deterministic_and_rejects_terminal_roots() {
    let board = &random_game(9, 6, 20)[15];
    let run_once = || search(board, &UniformEvaluator, &BanditConfig::gpuct(0.057, 0.737), Budget::Descents(150)).unwrap();
    assert_eq!(run_once(), run_once());

    let done = Board::new(9, 7.5)
        .unwrap()
        .play(Move::pass(Color::Black))
        .unwrap()
        .play(Move::pass(Color::White))
        .unwrap();
    assert_eq!(search(&done, &UniformEvaluator, &BanditConfig::puct(0.1), Budget::Descents(4)), Err(SearchError::TerminalRoot));
}

#[test]
fn time_budget_runs_at_least_one_descent() {
    let board = Board::new(9, 7.5).unwrap();
    let r = search(&board, &UniformEvaluator, &BanditConfig::puct(0.1), Budget::Time(Duration::ZERO)).unwrap();
    assert_eq!(r.descents, 1);
    let r = search(&board, &UniformEvaluator, &BanditConfig::puct(0.1), Budget::Time(Duration::from_millis(30))).unwrap();
    assert!(r.descents > 1);
}

#[test]
fn root_noise_keeps_priors_normalized() {
    let board = Board::new(5, 0.5).unwrap();
    let mut tree = Tree::new(board, BanditConfig::puct(0.1)).unwrap();
    let k = 26;
    let noise: Vec<f64> = (0..k).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
    tree.add_root_noise(&UniformEvaluator, &noise, 0.25).unwrap();
    let p: Vec<f64> = tree.root_edges().iter().map(|e| e.prior).collect();
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((p[0] - (0.75 / 26.0 + 0.25)).abs() < 1e-12);
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Solved {
    Win,
    Loss,
    Unknown,
}

/// Depth-limited minimax over every legal move for the side to move.
fn solve(board: &Board, depth: u32) -> Solved {
    if board.is_terminal() {
        return if board.winner() == Some(board.to_play()) { Solved::Win } else { Solved::Loss };
    }
    if depth == 0 {
        return Solved::Unknown;
    }
    let mut unknown = false;
    for mv in board.legal_moves() {
        match solve(&board.play(mv).unwrap(), depth - 1) {
            Solved::Loss => return Solved::Win,
            Solved::Unknown => unknown = true,
            Solved::Win => {}
        }
    }
    if unknown {
        Solved::Unknown
    } else {
        Solved::Loss
    }
}

#[test]
fn endgame_search_finds_the_solved_win() {
    // Two living groups; White has just passed and Black leads by 0.5.
    let diagram = "
        X X X O .
        X . X O O
        X X X O .
        . X X O O
        X X X O .";
    let board = Board::from_diagram(diagram, 4.5, Color::White)
        .unwrap()
        .play(Move::pass(Color::White))
        .unwrap();
    let winning: Vec<Action> = board
        .legal_moves()
        .into_iter()
        .filter(|&mv| solve(&board.play(mv).unwrap(), 4) == Solved::Loss)
        .map(|mv| mv.action)
        .collect();
    assert_eq!(winning, vec![Action::Pass]);

    let eval = AreaScoreEvaluator::default();
    // The greedy policy alone prefers filling an eye.
    assert_ne!(policy_move(&board, &eval).unwrap(), Action::Pass);
    for cfg in [BanditConfig::puct(0.1), BanditConfig::gpuct(0.057, 0.737)] {
        let r = search(&board, &eval, &cfg, Budget::Descents(256)).unwrap();
        assert_eq!(r.best, Action::Pass);
        let pass = r.children.iter().find(|e| e.action == Action::Pass).unwrap();
        assert!(pass.visits * 2 > 255, "pass visits {}", pass.visits);
    }
}

#[test]
fn budgets_parse_and_print() {
    assert_eq!("descents:32".parse::<Budget>().unwrap(), Budget::Descents(32));
    assert_eq!("time:10s".parse::<Budget>().unwrap(), Budget::Time(Duration::from_secs(10)));
    assert_eq!("time:250ms".parse::<Budget>().unwrap(), Budget::Time(Duration::from_millis(250)));
    for bad in ["descents:0", "time:0s", "descents:-1", "32", "steps:4", "time:xs"] {
        assert!(bad.parse::<Budget>().is_err(), "{bad}");
    }
    for b in [Budget::Descents(7), Budget::Time(Duration::from_millis(1500))] {
        assert_eq!(b.to_string().parse::<Budget>().unwrap(), b);
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(serde_json::from_str::<Budget>(&json).unwrap(), b);
    }
}
