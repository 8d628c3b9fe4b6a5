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

//! Oracles and corpora shared by the integration tests. Everything here is
//! written against the public API only.

#![allow(dead_code)]

use std::collections::HashSet;

use gpgo::board::{Board, Color, LadderStatus, Move, Point, Stone, LADDER_MAX_PLIES};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn neighbors(p: Point, n: usize) -> Vec<Point> {
    let (r, c) = (p.row(n) as i64, p.col(n) as i64);
    [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)]
        .into_iter()
        .filter(|&(r, c)| r >= 0 && c >= 0 && r < n as i64 && c < n as i64)
        .map(|(r, c)| Point::new(r as usize, c as usize, n))
        .collect()
}

fn stone_list(board: &Board) -> Vec<(Point, Color)> {
    board
        .points()
        .filter_map(|p| match board.stone(p) {
            Stone::Black => Some((p, Color::Black)),
            Stone::White => Some((p, Color::White)),
            Stone::Empty => None,
        })
        .collect()
}

/// Plays `color` at `p` on a history-free copy of `board`, so that repetition
/// rules do not interfere with reading.
fn place(board: &Board, p: Point, color: Color) -> Option<Board> {
    Board::from_stones(board.size(), board.komi(), &stone_list(board), color)
        .ok()?
        .play(Move::play(color, p))
        .ok()
}

fn libs(board: &Board, target: Point) -> Option<Vec<Point>> {
    board.string_at(target).map(|s| s.liberties)
}

/// Exhaustive two-sided race: true when the attacker forces capture of the
/// string at `target` within `depth` plies.
fn race_captures(board: &Board, target: Point, defender: Color, attacker_to_move: bool, depth: u32) -> bool {
    let Some(l) = libs(board, target) else {
        return true;
    };
    if l.len() >= 3 {
        return false;
    }
    if attacker_to_move {
        if l.len() <= 1 {
            return true;
        }
        if depth == 0 {
            return false;
        }
        l.iter().any(|&q| match place(board, q, defender.opposite()) {
            None => false,
            Some(next) => {
                next.stone(target) == Stone::Empty || race_captures(&next, target, defender, false, depth - 1)
            }
        })
    } else {
        if depth == 0 {
            return false;
        }
        let n = board.size();
        let string = board.string_at(target).expect("checked above");
        let mut moves = l.clone();
        let mut seen_enemy = HashSet::new();
        for &s in &string.stones {
            for q in neighbors(s, n) {
                if board.stone(q) == defender.opposite().stone() {
                    let enemy = board.string_at(q).expect("occupied");
                    if seen_enemy.insert(enemy.stones[0]) && enemy.liberties.len() == 1 {
                        moves.push(enemy.liberties[0]);
                    }
                }
            }
        }
        moves.sort();
        moves.dedup();
        moves.iter().all(|&q| match place(board, q, defender) {
            None => true,
            Some(next) => {
                let k = libs(&next, target).map_or(0, |l| l.len());
                k < 3 && (k == 0 || race_captures(&next, target, defender, true, depth - 1))
            }
        })
    }
}

/// Independent ladder reader: strings with one liberty start with the
/// defender to move, strings with two with the attacker.
pub fn oracle_ladder_status(board: &Board, p: Point) -> LadderStatus {
    let Some(string) = board.string_at(p) else {
        return LadderStatus::NotInLadder;
    };
    let attacker_to_move = match string.liberties.len() {
        1 => false,
        2 => true,
        _ => return LadderStatus::NotInLadder,
    };
    if race_captures(board, string.stones[0], string.color, attacker_to_move, LADDER_MAX_PLIES) {
        LadderStatus::CapturedInLadder
    } else {
        LadderStatus::EscapesLadder
    }
}

/// The classic atari shape around a defender at the origin: attackers above,
/// left, below and below-right; the defender runs up and to the right.
const LADDER_SHAPE: [(i64, i64); 4] = [(-1, 0), (0, -1), (1, 0), (1, 1)];

fn orient(d: (i64, i64), k: usize) -> (i64, i64) {
    let (mut r, mut c) = d;
    for _ in 0..k % 4 {
        (r, c) = (c, -r);
    }
    if k >= 4 {
        c = -c;
    }
    (r, c)
}

/// 50 positions and one point each whose string has one or two liberties:
/// ladder shapes in every orientation with random extra stones (which may or
/// may not break the ladder), plus positions from random playouts.
pub fn ladder_corpus() -> Vec<(Board, Point)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1add_e7);
    let mut corpus = Vec::new();
    let sizes = [9usize, 13, 19];
    while corpus.len() < 36 {
        let n = sizes[corpus.len() % 3];
        let k = rng.gen_range(0..8);
        let (r0, c0) = (rng.gen_range(2..n - 2) as i64, rng.gen_range(2..n - 2) as i64);
        let defender = if rng.gen() { Color::Black } else { Color::White };
        let at = |(dr, dc): (i64, i64)| Point::new((r0 + dr) as usize, (c0 + dc) as usize, n);
        let mut stones = vec![(at((0, 0)), defender)];
        let shape: &[(i64, i64)] = if corpus.len() % 4 == 3 { &LADDER_SHAPE[..3] } else { &LADDER_SHAPE };
        for &d in shape {
            stones.push((at(orient(d, k)), defender.opposite()));
        }
        let used: HashSet<Point> = stones.iter().map(|s| s.0).collect();
        let mut extra = 0;
        let want = rng.gen_range(0..4);
        while extra < want {
            let q = Point::new(rng.gen_range(0..n), rng.gen_range(0..n), n);
            let near = neighbors(q, n).iter().any(|x| used.contains(x));
            if used.contains(&q) || near || stones.iter().any(|s| s.0 == q) {
                continue;
            }
            let color = if rng.gen_bool(0.6) { defender } else { defender.opposite() };
            stones.push((q, color));
            extra += 1;
        }
        let Ok(board) = Board::from_stones(n, 7.5, &stones, defender) else {
            continue;
        };
        let target = at((0, 0));
        if matches!(board.liberties(target), Ok(1 | 2)) {
            corpus.push((board, target));
        }
    }
    let mut seed = 0;
    while corpus.len() < 50 {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = if seed % 2 == 0 { 9 } else { 7 };
        let mut board = Board::new(n, 7.5).unwrap();
        for _ in 0..rng.gen_range(10..40) {
            let moves = board.legal_moves();
            let Some(&mv) = moves[..moves.len() - 1].choose(&mut rng) else { break };
            board = board.play(mv).unwrap();
        }
        let candidates: Vec<Point> =
            board.points().filter(|&p| matches!(board.liberties(p), Ok(1 | 2))).collect();
        if let Some(&p) = candidates.choose(&mut rng) {
            let history_free = Board::from_stones(n, 7.5, &stone_list(&board), board.to_play()).unwrap();
            corpus.push((history_free, p));
        }
    }
    corpus
}

/// Flood-fill liberty count of the string at `p`.
fn flood_liberties(board: &Board, p: Point) -> (usize, usize) {
    let n = board.size();
    let color = board.stone(p);
    let mut stack = vec![p];
    let mut seen = HashSet::from([p]);
    let mut liberties = HashSet::new();
    while let Some(q) = stack.pop() {
        for x in neighbors(q, n) {
            let s = board.stone(x);
            if s == Stone::Empty {
                liberties.insert(x);
            } else if s == color && seen.insert(x) {
                stack.push(x);
            }
        }
    }
    (seen.len(), liberties.len())
}

#[derive(Debug, Default, Clone, Copy)]
pub struct FuzzStats {
    pub games: usize,
    pub moves: usize,
    pub captures: usize,
    pub superko_rejections: usize,
}

/// Plays one random game and checks liberty, repetition and stone
/// conservation invariants after every move. Returns the first violation.
pub fn fuzz_game(seed: u64, stats: &mut FuzzStats) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = [5, 7, 9][(seed % 3) as usize];
    let mut board = Board::new(n, 7.5).unwrap();
    let mut positions: HashSet<Vec<Stone>> = HashSet::from([board.stones().to_vec()]);
    let mut placed = [0usize; 2];
    stats.games += 1;
    for ply in 0..3 * n * n {
        let color = board.to_play();
        let mut empties: Vec<Point> = board.points().filter(|&p| board.stone(p) == Stone::Empty).collect();
        empties.shuffle(&mut rng);
        let mut played = None;
        for p in empties {
            let mv = Move::play(color, p);
            match board.play(mv) {
                Ok(next) => {
                    if !board.is_legal(mv) {
                        return Err(format!("seed {seed} ply {ply}: play accepted a move is_legal rejects"));
                    }
                    played = Some((p, next));
                    break;
                }
                Err(gpgo::board::BoardError::Superko) => stats.superko_rejections += 1,
                Err(_) => {}
            }
        }
        let Some((p, next)) = played else {
            board = board.play(Move::pass(color)).map_err(|e| format!("seed {seed}: pass failed: {e}"))?;
            if board.is_terminal() {
                break;
            }
            continue;
        };
        let ci = if color == Color::Black { 0 } else { 1 };
        placed[ci] += 1;
        stats.moves += 1;

        // Removed stones must be opponent stones whose string had only the
        // played point as a liberty.
        let mut removed = 0;
        for q in board.points() {
            let (before, after) = (board.stone(q), next.stone(q));
            if before != after && q != p {
                if before != color.opposite().stone() || after != Stone::Empty {
                    return Err(format!("seed {seed} ply {ply}: {q:?} changed from {before:?} to {after:?}"));
                }
                let libs = board.string_at(q).unwrap().liberties;
                if libs != vec![p] {
                    return Err(format!("seed {seed} ply {ply}: captured a string with liberties {libs:?}"));
                }
                removed += 1;
            }
        }
        stats.captures += removed;
        if next.stone(p) != color.stone() {
            return Err(format!("seed {seed} ply {ply}: stone missing at {p:?}"));
        }
        if next.captures(color) as usize != board.captures(color) as usize + removed {
            return Err(format!("seed {seed} ply {ply}: capture counter drifted"));
        }
        for c in [Color::Black, Color::White] {
            let on_board = next.points().filter(|&q| next.stone(q) == c.stone()).count();
            let i = if c == Color::Black { 0 } else { 1 };
            let lost = next.captures(c.opposite()) as usize;
            if on_board + lost != placed[i] {
                return Err(format!("seed {seed} ply {ply}: {c} has {on_board} stones + {lost} lost != {}", placed[i]));
            }
        }
        for s in next.strings() {
            let (size, libs) = flood_liberties(&next, s.stones[0]);
            if libs == 0 || libs != s.liberties.len() || size != s.stones.len() {
                return Err(format!("seed {seed} ply {ply}: string {:?} liberties {} vs {libs}", s.stones, s.liberties.len()));
            }
            if next.liberties(s.stones[0]) != Ok(libs) {
                return Err(format!("seed {seed} ply {ply}: liberties() disagrees"));
            }
        }
        if !positions.insert(next.stones().to_vec()) {
            return Err(format!("seed {seed} ply {ply}: position repeated"));
        }
        board = next;
    }
    Ok(())
}
