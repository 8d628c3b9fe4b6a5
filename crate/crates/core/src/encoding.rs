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

//! Network input planes and training labels.
//!
//! Plane order (part of the weight-file contract, see [`PLANE_ORDER`]):
//!
//! | planes | content |
//! |--------|---------|
//! | 0, 1   | Black, White stones of the current position |
//! | 2..=11 | Black, White stones of the 5 predecessor positions, most recent first |
//! | 12..=15| liberties of the string at each stone, one-hot over 1, 2, 3, 4+ |
//! | 16, 17 | ladder status of the stone: captured, escapes |
//! | 18, 19 | ladder status of adjacent enemy strings: captured, escapes |
//! | 20     | side to move, all ones when White is to play |
//!
//! "The last 5 states" is read as 5 predecessors plus the current one, which
//! is what brings the total to 21. Missing predecessors at the start of a
//! game are all-zero plane pairs. Ladder planes do not distinguish friendly
//! from enemy strings.

use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{Action, Board, Color, LadderStatus, Move, Point, Stone, HISTORY_LEN};

pub const NUM_PLANES: usize = 21;

/// Canonical description of the plane layout; its hash is stored in weight
/// files so a network trained on another layout is refused.
pub const PLANE_ORDER: &str = "gpgo-planes-v1:\
    cur.black,cur.white,\
    prev1.black,prev1.white,prev2.black,prev2.white,prev3.black,prev3.white,\
    prev4.black,prev4.white,prev5.black,prev5.white,\
    libs.1,libs.2,libs.3,libs.4+,\
    ladder.captured,ladder.escapes,adj_ladder.captured,adj_ladder.escapes,\
    to_play.white";

const LIBERTY_PLANE: usize = 12;
const LADDER_PLANE: usize = 16;
const ADJ_LADDER_PLANE: usize = 18;
const TO_PLAY_PLANE: usize = 20;

/// 64-bit FNV-1a hash of [`PLANE_ORDER`].
pub fn plane_order_hash() -> u64 {
    PLANE_ORDER.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Binary feature planes, plane-major (`plane * size * size + point`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InputTensor {
    size: usize,
    planes: Vec<u8>,
}

impl InputTensor {
    pub fn zeros(size: usize) -> InputTensor {
        InputTensor { size, planes: vec![0; NUM_PLANES * size * size] }
    }

    pub fn from_planes(size: usize, planes: Vec<u8>) -> Option<InputTensor> {
        (planes.len() == NUM_PLANES * size * size && planes.iter().all(|v| *v <= 1))
            .then_some(InputTensor { size, planes })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_planes(&self) -> usize {
        self.planes.len() / (self.size * self.size)
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.planes
    }

    pub fn plane(&self, k: usize) -> &[u8] {
        let area = self.size * self.size;
        &self.planes[k * area..(k + 1) * area]
    }

    pub fn get(&self, plane: usize, p: Point) -> u8 {
        self.planes[plane * self.size * self.size + p.index()]
    }

    fn set(&mut self, plane: usize, p: Point) {
        let area = self.size * self.size;
        self.planes[plane * area + p.index()] = 1;
    }

    pub fn to_f32(&self) -> Vec<f32> {
        self.planes.iter().map(|v| *v as f32).collect()
    }

    pub fn transform(&self, sym: Symmetry) -> InputTensor {
        let n = self.size;
        let area = n * n;
        let mut out = vec![0u8; self.planes.len()];
        for k in 0..self.num_planes() {
            for i in 0..area {
                let j = sym.apply(Point(i as u16), n).index();
                out[k * area + j] = self.planes[k * area + i];
            }
        }
        InputTensor { size: n, planes: out }
    }
}

fn stone_planes(t: &mut InputTensor, cells: &[Stone], first: usize) {
    for (i, s) in cells.iter().enumerate() {
        match s {
            Stone::Black => t.set(first, Point(i as u16)),
            Stone::White => t.set(first + 1, Point(i as u16)),
            Stone::Empty => {}
        }
    }
}

fn ladder_planes(t: &mut InputTensor, status: LadderStatus, first: usize, points: &[Point]) {
    let plane = match status {
        LadderStatus::CapturedInLadder => first,
        LadderStatus::EscapesLadder => first + 1,
        LadderStatus::NotInLadder => return,
    };
    for p in points {
        t.set(plane, *p);
    }
}

pub fn encode(board: &Board) -> InputTensor {
    let mut t = InputTensor::zeros(board.size());
    stone_planes(&mut t, board.stones(), 0);
    for k in 0..HISTORY_LEN {
        if let Some(cells) = board.predecessor(k) {
            stone_planes(&mut t, cells, 2 + 2 * k);
        }
    }
    for (string, own, adjacent) in board.ladder_statuses() {
        let libs = string.liberties.len().clamp(1, 4);
        for p in &string.stones {
            t.set(LIBERTY_PLANE + libs - 1, *p);
        }
        ladder_planes(&mut t, own, LADDER_PLANE, &string.stones);
        ladder_planes(&mut t, adjacent, ADJ_LADDER_PLANE, &string.stones);
    }
    if board.to_play() == Color::White {
        for p in board.points() {
            t.set(TO_PLAY_PLANE, p);
        }
    }
    t
}

#[derive(Debug, Error, PartialEq)]
pub enum EncodingError {
    #[error("illegal move {0:?}")]
    IllegalMove(Move),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainingExample {
    pub input: InputTensor,
    /// Row-major point index, `size * size` for pass.
    pub policy_label: u16,
    /// 0 when Black won, 1 when White won.
    pub value_label: u8,
}

pub fn value_label(winner: Color) -> u8 {
    match winner {
        Color::Black => 0,
        Color::White => 1,
    }
}

pub fn make_example(board: &Board, played: Move, winner: Color) -> Result<TrainingExample, EncodingError> {
    if !board.is_legal(played) {
        return Err(EncodingError::IllegalMove(played));
    }
    Ok(TrainingExample {
        input: encode(board),
        policy_label: played.action.policy_index(board.size()) as u16,
        value_label: value_label(winner),
    })
}

/// One of the 8 symmetries of the square. `0` is the identity, `1..=3`
/// rotate clockwise by 90°, 180°, 270°, `4..=7` are those followed by a
/// horizontal mirror.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symmetry(pub u8);

impl Symmetry {
    pub const IDENTITY: Symmetry = Symmetry(0);

    pub fn all() -> impl Iterator<Item = Symmetry> {
        (0..8).map(Symmetry)
    }

    pub fn apply_rc(self, row: usize, col: usize, n: usize) -> (usize, usize) {
        let (mut r, mut c) = (row, col);
        for _ in 0..(self.0 % 4) {
            (r, c) = (c, n - 1 - r);
        }
        if self.0 >= 4 {
            c = n - 1 - c;
        }
        (r, c)
    }

    pub fn apply(self, p: Point, n: usize) -> Point {
        let (r, c) = self.apply_rc(p.row(n), p.col(n), n);
        Point::new(r, c, n)
    }

    pub fn apply_action(self, a: Action, n: usize) -> Action {
        match a {
            Action::Play(p) => Action::Play(self.apply(p, n)),
            Action::Pass => Action::Pass,
        }
    }

    pub fn inverse(self) -> Symmetry {
        match self.0 {
            1 => Symmetry(3),
            3 => Symmetry(1),
            s => Symmetry(s),
        }
    }

    pub fn apply_policy_index(self, index: usize, n: usize) -> usize {
        match Action::from_policy_index(index, n) {
            Some(a) => self.apply_action(a, n).policy_index(n),
            None => index,
        }
    }
}

/// The 8 dihedral images of an (input, policy label) pair.
pub fn symmetries(input: &InputTensor, policy_label: u16) -> Vec<(Symmetry, InputTensor, u16)> {
    let n = input.size();
    Symmetry::all()
        .map(|s| {
            let label = s.apply_policy_index(policy_label as usize, n) as u16;
            (s, input.transform(s), label)
        })
        .collect()
}

const DATASET_MAGIC: &[u8; 4] = b"GPGD";
pub const DATASET_VERSION: u32 = 1;

/// Writes examples in the dataset dump format: magic `GPGD`, version,
/// board size, plane count, example count (all u32 LE), then per example
/// the planes packed LSB-first into `ceil(planes*size*size/8)` bytes, the
/// policy label (u16 LE) and the value label (u8).
pub fn write_dataset<W: Write>(mut w: W, size: usize, examples: &[TrainingExample]) -> io::Result<()> {
    w.write_all(DATASET_MAGIC)?;
    for v in [DATASET_VERSION, size as u32, NUM_PLANES as u32, examples.len() as u32] {
        w.write_all(&v.to_le_bytes())?;
    }
    let bits = NUM_PLANES * size * size;
    let mut packed = vec![0u8; bits.div_ceil(8)];
    for ex in examples {
        if ex.input.size() != size {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, "board size mismatch"));
        }
        packed.iter_mut().for_each(|b| *b = 0);
        for (i, v) in ex.input.as_slice().iter().enumerate() {
            packed[i / 8] |= v << (i % 8);
        }
        w.write_all(&packed)?;
        w.write_all(&ex.policy_label.to_le_bytes())?;
        w.write_all(&[ex.value_label])?;
    }
    Ok(())
}

pub fn read_dataset<R: Read>(mut r: R) -> io::Result<(usize, Vec<TrainingExample>)> {
    let invalid = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, msg.to_string());
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != DATASET_MAGIC {
        return Err(invalid("bad magic"));
    }
    let mut word = [0u8; 4];
    let mut header = [0u32; 4];
    for h in header.iter_mut() {
        r.read_exact(&mut word)?;
        *h = u32::from_le_bytes(word);
    }
    let [version, size, planes, count] = header;
    if version != DATASET_VERSION {
        return Err(invalid("unsupported dataset version"));
    }
    if planes as usize != NUM_PLANES {
        return Err(invalid("plane count mismatch"));
    }
    let size = size as usize;
    let bits = NUM_PLANES * size * size;
    let mut packed = vec![0u8; bits.div_ceil(8)];
    let mut out = Vec::with_capacity(count as usize);
    for _ in 0..count {
        r.read_exact(&mut packed)?;
        let planes = (0..bits).map(|i| (packed[i / 8] >> (i % 8)) & 1).collect();
        let mut label = [0u8; 2];
        r.read_exact(&mut label)?;
        let mut value = [0u8; 1];
        r.read_exact(&mut value)?;
        out.push(TrainingExample {
            input: InputTensor { size, planes },
            policy_label: u16::from_le_bytes(label),
            value_label: value[0],
        });
    }
    Ok((size, out))
}
