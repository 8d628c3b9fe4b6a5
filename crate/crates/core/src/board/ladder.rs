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

//! Ladder reading.
//!
//! A string with one or two liberties is read out as a two-sided forced
//! race. The attacker only fills liberties of the target; the defender only
//! extends from a liberty or captures an adjacent attacking string that is
//! in atari. A string in atari starts with the defender to move, a string
//! with two liberties starts with the attacker to move. Reaching three
//! liberties is an escape. Ko and superko are ignored while reading.
//!
//! Results are memoized per race on (position, side to move, remaining
//! depth), which keeps the answer exact while collapsing transpositions.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::{Color, Point, Stone};

/// Depth limit of the race, in plies.
pub const LADDER_MAX_PLIES: u32 = 64;

/// Reading stops (and counts as an escape) after this many race nodes.
const NODE_BUDGET: u32 = 50_000;

/// Ordered by severity: `NotInLadder < EscapesLadder < CapturedInLadder`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LadderStatus {
    NotInLadder,
    EscapesLadder,
    CapturedInLadder,
}

struct Race {
    target: Point,
    defender: Color,
    nodes: u32,
    memo: HashMap<(u64, bool, u32), bool>,
}

fn position_key(grid: &Grid) -> u64 {
    let mut h = DefaultHasher::new();
    grid.cells().hash(&mut h);
    h.finish()
}

impl Race {
    fn liberties(&self, grid: &Grid) -> Option<Vec<Point>> {
        grid.string_at(self.target).map(|s| s.liberties)
    }

    fn spend(&mut self) -> bool {
        self.nodes += 1;
        self.nodes <= NODE_BUDGET
    }

    fn memoized(&mut self, grid: &Grid, attacker: bool, depth: u32) -> bool {
        let key = (position_key(grid), attacker, depth);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = if attacker { self.attacker_search(grid, depth) } else { self.defender_search(grid, depth) };
        self.memo.insert(key, v);
        v
    }

    /// True if the defender, moving first, cannot avoid capture.
    fn defender_loses(&mut self, grid: &Grid, depth: u32) -> bool {
        self.memoized(grid, false, depth)
    }

    /// True if the attacker, moving first, can force capture.
    fn attacker_wins(&mut self, grid: &Grid, depth: u32) -> bool {
        self.memoized(grid, true, depth)
    }

    fn defender_search(&mut self, grid: &Grid, depth: u32) -> bool {
        let Some(libs) = self.liberties(grid) else {
            return true;
        };
        if libs.len() >= 3 {
            return false;
        }
        if depth == 0 || !self.spend() {
            return false;
        }
        let string = grid.string_at(self.target).expect("target present");
        let mut candidates = libs.clone();
        for enemy in grid.adjacent_enemy_strings(&string) {
            if enemy.liberties.len() == 1 && !candidates.contains(&enemy.liberties[0]) {
                candidates.push(enemy.liberties[0]);
            }
        }
        for mv in candidates {
            let Ok(next) = grid.place(mv, self.defender) else {
                continue;
            };
            let n = self.liberties(&next).map_or(0, |l| l.len());
            if n >= 3 {
                return false;
            }
            if n >= 1 && !self.attacker_wins(&next, depth - 1) {
                return false;
            }
        }
        true
    }

    fn attacker_search(&mut self, grid: &Grid, depth: u32) -> bool {
        let Some(libs) = self.liberties(grid) else {
            return true;
        };
        match libs.len() {
            0 | 1 => true,
            2 => {
                if depth == 0 || !self.spend() {
                    return false;
                }
                let attacker = self.defender.opposite();
                for mv in libs {
                    let Ok(next) = grid.place(mv, attacker) else {
                        continue;
                    };
                    if next.get(self.target) == Stone::Empty
                        || self.defender_loses(&next, depth - 1)
                    {
                        return true;
                    }
                }
                false
            }
            _ => false,
        }
    }
}

pub(super) fn status(grid: &Grid, p: Point) -> LadderStatus {
    let Some(string) = grid.string_at(p) else {
        return LadderStatus::NotInLadder;
    };
    let mut race = Race { target: string.stones[0], defender: string.color, nodes: 0, memo: HashMap::new() };
    let captured = match string.liberties.len() {
        1 => race.defender_loses(grid, LADDER_MAX_PLIES),
        2 => race.attacker_wins(grid, LADDER_MAX_PLIES),
        _ => return LadderStatus::NotInLadder,
    };
    if captured {
        LadderStatus::CapturedInLadder
    } else {
        LadderStatus::EscapesLadder
    }
}
