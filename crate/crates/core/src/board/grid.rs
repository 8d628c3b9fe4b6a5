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

use std::sync::Arc;

use super::{BoardError, Color, Point, MAX_SIZE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
#[repr(u8)]
pub enum Stone {
    #[default]
    Empty,
    Black,
    White,
}

impl Stone {
    pub fn color(self) -> Option<Color> {
        match self {
            Stone::Empty => None,
            Stone::Black => Some(Color::Black),
            Stone::White => Some(Color::White),
        }
    }
}

/// A maximal group of orthogonally connected same-colored stones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoString {
    pub color: Color,
    /// Sorted ascending.
    pub stones: Vec<Point>,
    /// Empty points adjacent to the string, sorted ascending.
    pub liberties: Vec<Point>,
}

const WORDS: usize = (MAX_SIZE * MAX_SIZE).div_ceil(64);

#[derive(Clone, Copy, Default)]
struct Marks([u64; WORDS]);

impl Marks {
    #[inline]
    fn test_and_set(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let was = self.0[w] & b != 0;
        self.0[w] |= b;
        was
    }
}

pub(crate) struct Placement {
    pub captured: Vec<Point>,
}

/// Stone configuration of a square board.
#[derive(Clone)]
pub(crate) struct Grid {
    size: usize,
    cells: Arc<[Stone]>,
}

impl Grid {
    pub fn empty(size: usize) -> Grid {
        Grid { size, cells: vec![Stone::Empty; size * size].into() }
    }

    pub fn from_cells(size: usize, cells: Vec<Stone>) -> Grid {
        debug_assert_eq!(cells.len(), size * size);
        Grid { size, cells: cells.into() }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn cells(&self) -> &[Stone] {
        &self.cells
    }

    pub fn shared(&self) -> Arc<[Stone]> {
        self.cells.clone()
    }

    #[inline]
    pub fn get(&self, p: Point) -> Stone {
        self.cells[p.index()]
    }

    #[inline]
    pub fn neighbors(&self, p: Point) -> impl Iterator<Item = Point> {
        let n = self.size;
        let i = p.index();
        let (r, c) = (i / n, i % n);
        let mut out = [Point(0); 4];
        let mut len = 0;
        if r > 0 {
            out[len] = Point((i - n) as u16);
            len += 1;
        }
        if r + 1 < n {
            out[len] = Point((i + n) as u16);
            len += 1;
        }
        if c > 0 {
            out[len] = Point((i - 1) as u16);
            len += 1;
        }
        if c + 1 < n {
            out[len] = Point((i + 1) as u16);
            len += 1;
        }
        out.into_iter().take(len)
    }

    fn flood(&self, start: Point, stones: &mut Vec<Point>, liberties: &mut Vec<Point>) {
        let color = self.get(start);
        debug_assert!(color != Stone::Empty);
        let mut seen = Marks::default();
        let mut lib_seen = Marks::default();
        seen.test_and_set(start.index());
        stones.push(start);
        let mut head = 0;
        while head < stones.len() {
            let p = stones[head];
            head += 1;
            for q in self.neighbors(p) {
                let s = self.get(q);
                if s == color {
                    if !seen.test_and_set(q.index()) {
                        stones.push(q);
                    }
                } else if s == Stone::Empty && !lib_seen.test_and_set(q.index()) {
                    liberties.push(q);
                }
            }
        }
    }

    pub fn string_at(&self, p: Point) -> Option<GoString> {
        let color = self.get(p).color()?;
        let mut stones = Vec::new();
        let mut liberties = Vec::new();
        self.flood(p, &mut stones, &mut liberties);
        stones.sort_unstable();
        liberties.sort_unstable();
        Some(GoString { color, stones, liberties })
    }

    pub fn strings(&self) -> Vec<GoString> {
        let mut done = Marks::default();
        let mut out = Vec::new();
        for i in 0..self.cells.len() {
            if self.cells[i] == Stone::Empty || done.test_and_set(i) {
                continue;
            }
            let s = self.string_at(Point(i as u16)).expect("occupied");
            for p in &s.stones {
                done.test_and_set(p.index());
            }
            out.push(s);
        }
        out
    }

    pub fn adjacent_enemy_strings(&self, string: &GoString) -> Vec<GoString> {
        let enemy = string.color.opposite().stone();
        let mut done = Marks::default();
        let mut out = Vec::new();
        for p in &string.stones {
            for q in self.neighbors(*p) {
                if self.get(q) == enemy && !done.test_and_set(q.index()) {
                    let s = self.string_at(q).expect("occupied");
                    for r in &s.stones {
                        done.test_and_set(r.index());
                    }
                    out.push(s);
                }
            }
        }
        out
    }

    /// Whether the string through `start` has a liberty other than `except`.
    fn has_liberty_besides(&self, start: Point, except: Point) -> bool {
        let color = self.get(start);
        let mut seen = Marks::default();
        let mut stack = vec![start];
        seen.test_and_set(start.index());
        while let Some(p) = stack.pop() {
            for q in self.neighbors(p) {
                let s = self.get(q);
                if s == Stone::Empty && q != except {
                    return true;
                }
                if s == color && !seen.test_and_set(q.index()) {
                    stack.push(q);
                }
            }
        }
        false
    }

    /// Resolves captures and suicide for placing `color` at `p`.
    pub fn probe(&self, p: Point, color: Color) -> Result<Placement, BoardError> {
        if self.get(p) != Stone::Empty {
            return Err(BoardError::Occupied);
        }
        let enemy = color.opposite().stone();
        let mut captured: Vec<Point> = Vec::new();
        let mut has_liberty = false;
        let mut dead_marks = Marks::default();
        for q in self.neighbors(p) {
            let s = self.get(q);
            if s == Stone::Empty {
                has_liberty = true;
            } else if s == enemy {
                if dead_marks.test_and_set(q.index()) {
                    continue;
                }
                if !self.has_liberty_besides(q, p) {
                    let mut stones = Vec::new();
                    let mut libs = Vec::new();
                    self.flood(q, &mut stones, &mut libs);
                    for r in &stones {
                        dead_marks.test_and_set(r.index());
                    }
                    captured.extend(stones);
                }
            } else if !has_liberty && self.has_liberty_besides(q, p) {
                has_liberty = true;
            }
        }
        if captured.is_empty() && !has_liberty {
            return Err(BoardError::Suicide);
        }
        Ok(Placement { captured })
    }

    pub fn apply(&self, p: Point, color: Color, captured: &[Point]) -> Grid {
        let mut cells = self.cells.to_vec();
        cells[p.index()] = color.stone();
        for q in captured {
            cells[q.index()] = Stone::Empty;
        }
        Grid { size: self.size, cells: cells.into() }
    }

    /// Places a stone with full capture rules but no superko or turn order.
    pub fn place(&self, p: Point, color: Color) -> Result<Grid, BoardError> {
        let placement = self.probe(p, color)?;
        Ok(self.apply(p, color, &placement.captured))
    }

    /// (Black area, White area) under Tromp-Taylor.
    pub fn area(&self) -> (usize, usize) {
        let mut black = 0;
        let mut white = 0;
        let mut seen = Marks::default();
        for i in 0..self.cells.len() {
            match self.cells[i] {
                Stone::Black => black += 1,
                Stone::White => white += 1,
                Stone::Empty => {
                    if seen.test_and_set(i) {
                        continue;
                    }
                    let mut region = vec![Point(i as u16)];
                    let mut head = 0;
                    let (mut touches_black, mut touches_white) = (false, false);
                    while head < region.len() {
                        let p = region[head];
                        head += 1;
                        for q in self.neighbors(p) {
                            match self.get(q) {
                                Stone::Black => touches_black = true,
                                Stone::White => touches_white = true,
                                Stone::Empty => {
                                    if !seen.test_and_set(q.index()) {
                                        region.push(q);
                                    }
                                }
                            }
                        }
                    }
                    match (touches_black, touches_white) {
                        (true, false) => black += region.len(),
                        (false, true) => white += region.len(),
                        _ => {}
                    }
                }
            }
        }
        (black, white)
    }
}
