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

//! Go rules under Tromp-Taylor: area scoring, positional superko and no
//! suicide. A [`Board`] is an immutable value; [`Board::play`] returns the
//! successor position.

mod grid;
mod ladder;
mod zobrist;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::grid::{GoString, Stone};
pub use self::ladder::{LadderStatus, LADDER_MAX_PLIES};

use self::grid::Grid;

/// Board sides accepted by [`Board::new`].
pub const SUPPORTED_SIZES: [usize; 5] = [5, 7, 9, 13, 19];

/// Largest supported side length.
pub const MAX_SIZE: usize = 19;

/// Number of predecessor grids kept for the network input.
pub const HISTORY_LEN: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }

    pub fn stone(self) -> Stone {
        match self {
            Color::Black => Stone::Black,
            Color::White => Stone::White,
        }
    }

    fn index(self) -> usize {
        match self {
            Color::Black => 0,
            Color::White => 1,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Black => f.write_str("black"),
            Color::White => f.write_str("white"),
        }
    }
}

/// A board intersection as a row-major index (`row * size + col`, row 0 at
/// the top).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point(pub u16);

impl Point {
    pub fn new(row: usize, col: usize, size: usize) -> Point {
        debug_assert!(row < size && col < size);
        Point((row * size + col) as u16)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn row(self, size: usize) -> usize {
        self.index() / size
    }

    pub fn col(self, size: usize) -> usize {
        self.index() % size
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Play(Point),
    Pass,
}

impl Action {
    /// Flattened policy index: row-major points, then `size * size` for pass.
    pub fn policy_index(self, size: usize) -> usize {
        match self {
            Action::Play(p) => p.index(),
            Action::Pass => size * size,
        }
    }

    pub fn from_policy_index(index: usize, size: usize) -> Option<Action> {
        if index == size * size {
            Some(Action::Pass)
        } else if index < size * size {
            Some(Action::Play(Point(index as u16)))
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub color: Color,
    pub action: Action,
}

impl Move {
    pub fn play(color: Color, point: Point) -> Move {
        Move { color, action: Action::Play(point) }
    }

    pub fn pass(color: Color) -> Move {
        Move { color, action: Action::Pass }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoardError {
    #[error("unsupported board size {0}")]
    UnsupportedSize(usize),
    #[error("komi {0} is not a multiple of 0.5")]
    InvalidKomi(f64),
    #[error("point is outside the board")]
    OutOfBounds,
    #[error("point is occupied")]
    Occupied,
    #[error("suicide")]
    Suicide,
    #[error("positional superko")]
    Superko,
    #[error("wrong color: {0} is not to play")]
    WrongColor(Color),
    #[error("game is over")]
    GameOver,
    #[error("point is empty")]
    EmptyPoint,
    #[error("game is not terminal")]
    NotTerminal,
}

/// Persistent list of stone-configuration hashes seen since the start.
struct HistoryLink {
    hash: u64,
    prev: Option<Arc<HistoryLink>>,
}

#[derive(Clone)]
pub struct Board {
    grid: Grid,
    komi: f64,
    to_play: Color,
    consecutive_passes: u8,
    stones_hash: u64,
    history: Arc<HistoryLink>,
    predecessors: [Option<Arc<[Stone]>>; HISTORY_LEN],
    captures: [u32; 2],
    move_number: u32,
}

impl Board {
    pub fn new(size: usize, komi: f64) -> Result<Board, BoardError> {
        if !SUPPORTED_SIZES.contains(&size) {
            return Err(BoardError::UnsupportedSize(size));
        }
        if !komi.is_finite() || (komi * 2.0).fract() != 0.0 {
            return Err(BoardError::InvalidKomi(komi));
        }
        let grid = Grid::empty(size);
        Ok(Board {
            grid,
            komi,
            to_play: Color::Black,
            consecutive_passes: 0,
            stones_hash: 0,
            history: Arc::new(HistoryLink { hash: 0, prev: None }),
            predecessors: Default::default(),
            captures: [0; 2],
            move_number: 0,
        })
    }

    pub fn size(&self) -> usize {
        self.grid.size()
    }

    pub fn komi(&self) -> f64 {
        self.komi
    }

    pub fn to_play(&self) -> Color {
        self.to_play
    }

    pub fn consecutive_passes(&self) -> u8 {
        self.consecutive_passes
    }

    pub fn is_terminal(&self) -> bool {
        self.consecutive_passes >= 2
    }

    pub fn move_number(&self) -> u32 {
        self.move_number
    }

    /// Stones captured so far by `color`.
    pub fn captures(&self, color: Color) -> u32 {
        self.captures[color.index()]
    }

    pub fn stone(&self, p: Point) -> Stone {
        self.grid.get(p)
    }

    pub fn stones(&self) -> &[Stone] {
        self.grid.cells()
    }

    pub fn stone_count(&self) -> usize {
        self.grid.cells().iter().filter(|s| **s != Stone::Empty).count()
    }

    /// Predecessor grids, most recent first; `None` before enough moves.
    pub fn predecessor(&self, k: usize) -> Option<&[Stone]> {
        self.predecessors.get(k).and_then(|g| g.as_deref())
    }

    pub fn point(&self, row: usize, col: usize) -> Option<Point> {
        let n = self.size();
        (row < n && col < n).then(|| Point::new(row, col, n))
    }

    pub fn points(&self) -> impl Iterator<Item = Point> {
        (0..(self.size() * self.size()) as u16).map(Point)
    }

    /// Zobrist hash over stones plus side to move.
    pub fn position_hash(&self) -> u64 {
        match self.to_play {
            Color::Black => self.stones_hash,
            Color::White => self.stones_hash ^ zobrist::white_to_play(),
        }
    }

    /// Hash of the stone configuration alone, as used for superko.
    pub fn stones_hash(&self) -> u64 {
        self.stones_hash
    }

    /// Whether a stone configuration with `hash` has occurred in this game.
    pub fn seen(&self, hash: u64) -> bool {
        let mut link = Some(&self.history);
        while let Some(l) = link {
            if l.hash == hash {
                return true;
            }
            link = l.prev.as_ref();
        }
        false
    }

    /// All stone hashes in the game so far, most recent first.
    pub fn history_hashes(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut link = Some(&self.history);
        while let Some(l) = link {
            out.push(l.hash);
            link = l.prev.as_ref();
        }
        out
    }

    pub fn string_at(&self, p: Point) -> Option<GoString> {
        self.grid.string_at(p)
    }

    pub fn strings(&self) -> Vec<GoString> {
        self.grid.strings()
    }

    pub fn liberties(&self, p: Point) -> Result<usize, BoardError> {
        self.check_point(p)?;
        self.grid
            .string_at(p)
            .map(|s| s.liberties.len())
            .ok_or(BoardError::EmptyPoint)
    }

    pub fn ladder_status(&self, p: Point) -> LadderStatus {
        if p.index() >= self.grid.cells().len() {
            return LadderStatus::NotInLadder;
        }
        ladder::status(&self.grid, p)
    }

    /// Most severe ladder status among opposing strings adjacent to the
    /// string containing `p`.
    pub fn adjacent_ladder_status(&self, p: Point) -> LadderStatus {
        let Some(string) = (p.index() < self.grid.cells().len())
            .then(|| self.grid.string_at(p))
            .flatten()
        else {
            return LadderStatus::NotInLadder;
        };
        self.grid
            .adjacent_enemy_strings(&string)
            .iter()
            .map(|s| ladder::status(&self.grid, s.stones[0]))
            .max()
            .unwrap_or(LadderStatus::NotInLadder)
    }

    /// Every string with its [`ladder_status`](Self::ladder_status) and
    /// [`adjacent_ladder_status`](Self::adjacent_ladder_status), reading each
    /// string only once.
    pub fn ladder_statuses(&self) -> Vec<(GoString, LadderStatus, LadderStatus)> {
        let strings = self.grid.strings();
        let own: Vec<LadderStatus> = strings.iter().map(|s| ladder::status(&self.grid, s.stones[0])).collect();
        let mut owner = vec![usize::MAX; self.grid.cells().len()];
        for (i, s) in strings.iter().enumerate() {
            for p in &s.stones {
                owner[p.index()] = i;
            }
        }
        strings
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let adjacent = s
                    .stones
                    .iter()
                    .flat_map(|p| self.grid.neighbors(*p))
                    .map(|q| owner[q.index()])
                    .filter(|&j| j != usize::MAX && strings[j].color != s.color)
                    .map(|j| own[j])
                    .max()
                    .unwrap_or(LadderStatus::NotInLadder);
                (s.clone(), own[i], adjacent)
            })
            .collect()
    }

    fn check_point(&self, p: Point) -> Result<(), BoardError> {
        if p.index() < self.size() * self.size() {
            Ok(())
        } else {
            Err(BoardError::OutOfBounds)
        }
    }

    /// Checks a stone placement for the side to move without building the
    /// successor.
    pub fn is_legal(&self, mv: Move) -> bool {
        self.check(mv).is_ok()
    }

    fn check(&self, mv: Move) -> Result<Option<grid::Placement>, BoardError> {
        if self.is_terminal() {
            return Err(BoardError::GameOver);
        }
        if mv.color != self.to_play {
            return Err(BoardError::WrongColor(mv.color));
        }
        match mv.action {
            Action::Pass => Ok(None),
            Action::Play(p) => {
                self.check_point(p)?;
                let placement = self.grid.probe(p, mv.color)?;
                let hash = self.placement_hash(p, mv.color, &placement.captured);
                if self.seen(hash) {
                    return Err(BoardError::Superko);
                }
                Ok(Some(placement))
            }
        }
    }

    fn placement_hash(&self, p: Point, color: Color, captured: &[Point]) -> u64 {
        let mut h = self.stones_hash ^ zobrist::stone(p, color);
        for q in captured {
            h ^= zobrist::stone(*q, color.opposite());
        }
        h
    }

    pub fn play(&self, mv: Move) -> Result<Board, BoardError> {
        let placement = self.check(mv)?;
        let mut next = self.clone();
        next.predecessors.rotate_right(1);
        next.predecessors[0] = Some(self.grid.shared());
        next.to_play = self.to_play.opposite();
        next.move_number += 1;
        match (mv.action, placement) {
            (Action::Play(p), Some(placement)) => {
                next.stones_hash = self.placement_hash(p, mv.color, &placement.captured);
                next.captures[mv.color.index()] += placement.captured.len() as u32;
                next.grid = self.grid.apply(p, mv.color, &placement.captured);
                next.consecutive_passes = 0;
                next.history = Arc::new(HistoryLink {
                    hash: next.stones_hash,
                    prev: Some(self.history.clone()),
                });
            }
            _ => {
                next.consecutive_passes = self.consecutive_passes + 1;
            }
        }
        Ok(next)
    }

    /// Legal moves for the side to move; Pass is last. Empty when terminal.
    pub fn legal_moves(&self) -> Vec<Move> {
        if self.is_terminal() {
            return Vec::new();
        }
        let color = self.to_play;
        let mut moves: Vec<Move> = self
            .points()
            .filter(|p| self.grid.get(*p) == Stone::Empty)
            .map(|p| Move::play(color, p))
            .filter(|m| self.check(*m).is_ok())
            .collect();
        moves.push(Move::pass(color));
        moves
    }

    /// Tromp-Taylor area score from Black's side (komi subtracted),
    /// regardless of whether the game has ended.
    pub fn area_score(&self) -> f64 {
        let (black, white) = self.grid.area();
        black as f64 - white as f64 - self.komi
    }

    /// Final score; positive means Black wins.
    pub fn score(&self) -> Result<f64, BoardError> {
        if !self.is_terminal() {
            return Err(BoardError::NotTerminal);
        }
        Ok(self.area_score())
    }

    /// Winner by area score, `None` for a draw.
    pub fn winner(&self) -> Option<Color> {
        let s = self.area_score();
        if s > 0.0 {
            Some(Color::Black)
        } else if s < 0.0 {
            Some(Color::White)
        } else {
            None
        }
    }

    /// Board with the given stones set and no history, for composing test
    /// and analysis positions. Captures are not resolved; strings without
    /// liberties are rejected.
    pub fn from_stones(
        size: usize,
        komi: f64,
        stones: &[(Point, Color)],
        to_play: Color,
    ) -> Result<Board, BoardError> {
        let mut board = Board::new(size, komi)?;
        let mut cells = vec![Stone::Empty; size * size];
        let mut hash = 0;
        for (p, c) in stones {
            board.check_point(*p)?;
            if cells[p.index()] != Stone::Empty {
                return Err(BoardError::Occupied);
            }
            cells[p.index()] = c.stone();
            hash ^= zobrist::stone(*p, *c);
        }
        board.grid = Grid::from_cells(size, cells);
        if board.grid.strings().iter().any(|s| s.liberties.is_empty()) {
            return Err(BoardError::Suicide);
        }
        board.stones_hash = hash;
        board.history = Arc::new(HistoryLink { hash, prev: None });
        board.to_play = to_play;
        Ok(board)
    }

    /// Parses a diagram of `.`, `X` (Black) and `O` (White) rows.
    pub fn from_diagram(diagram: &str, komi: f64, to_play: Color) -> Result<Board, BoardError> {
        let rows: Vec<&str> = diagram
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let size = rows.len();
        let mut stones = Vec::new();
        for (r, line) in rows.iter().enumerate() {
            let cells: Vec<char> = line.chars().filter(|c| !c.is_whitespace()).collect();
            if cells.len() != size {
                return Err(BoardError::UnsupportedSize(cells.len()));
            }
            for (c, ch) in cells.iter().enumerate() {
                let color = match ch {
                    'X' | 'x' | 'B' => Color::Black,
                    'O' | 'o' | 'W' => Color::White,
                    _ => continue,
                };
                stones.push((Point::new(r, c, size), color));
            }
        }
        Board::from_stones(size, komi, &stones, to_play)
    }

    /// Same position with the side to move swapped; consumes no history.
    pub fn with_to_play(&self, color: Color) -> Board {
        let mut b = self.clone();
        b.to_play = color;
        b
    }
}

impl PartialEq for Board {
    fn eq(&self, other: &Board) -> bool {
        self.grid.cells() == other.grid.cells()
            && self.to_play == other.to_play
            && self.komi == other.komi
            && self.consecutive_passes == other.consecutive_passes
    }
}

impl fmt::Debug for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.size();
        for r in 0..n {
            for c in 0..n {
                let ch = match self.grid.get(Point::new(r, c, n)) {
                    Stone::Empty => '.',
                    Stone::Black => 'X',
                    Stone::White => 'O',
                };
                if c > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", ch)?;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}
