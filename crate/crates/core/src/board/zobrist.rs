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

use std::sync::LazyLock;

use super::{Color, Point, MAX_SIZE};

const POINTS: usize = MAX_SIZE * MAX_SIZE;

struct Keys {
    stones: [[u64; POINTS]; 2],
    white_to_play: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

static KEYS: LazyLock<Keys> = LazyLock::new(|| {
    let mut state = 0x6770_676f_5a6f_6272;
    let mut stones = [[0u64; POINTS]; 2];
    for color in stones.iter_mut() {
        for key in color.iter_mut() {
            *key = splitmix64(&mut state);
        }
    }
    Keys { stones, white_to_play: splitmix64(&mut state) }
});

#[inline]
pub(super) fn stone(p: Point, color: Color) -> u64 {
    KEYS.stones[color.index()][p.index()]
}

#[inline]
pub(super) fn white_to_play() -> u64 {
    KEYS.white_to_play
}
