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

mod common;

use gpgo::board::{Board, Color, LadderStatus, Move, Stone};
use gpgo::encoding::{encode, Symmetry, NUM_PLANES};
use proptest::prelude::*;

fn playout(size: usize, picks: &[usize]) -> Board {
    let mut board = Board::new(size, 7.5).unwrap();
    for &k in picks {
        if board.is_terminal() {
            break;
        }
        let moves = board.legal_moves();
        board = board.play(moves[k % moves.len()]).unwrap();
    }
    board
}

fn ladder_plane(status: LadderStatus) -> Option<usize> {
    match status {
        LadderStatus::CapturedInLadder => Some(0),
        LadderStatus::EscapesLadder => Some(1),
        LadderStatus::NotInLadder => None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn planes_agree_with_pointwise_board_queries(picks in prop::collection::vec(0usize..1000, 0..60)) {
        let board = playout(9, &picks);
        let x = encode(&board);
        prop_assert_eq!(x.num_planes(), NUM_PLANES);
        for p in board.points() {
            let stone = board.stone(p);
            prop_assert_eq!(x.get(0, p), u8::from(stone == Stone::Black));
            prop_assert_eq!(x.get(1, p), u8::from(stone == Stone::White));
            let libs = board.liberties(p).ok();
            for (k, want) in [(12, Some(1)), (13, Some(2)), (14, Some(3))] {
                prop_assert_eq!(x.get(k, p), u8::from(libs == want));
            }
            prop_assert_eq!(x.get(15, p), u8::from(libs.is_some_and(|l| l >= 4)));
            for (base, status) in [(16, board.ladder_status(p)), (18, board.adjacent_ladder_status(p))] {
                for k in 0..2 {
                    prop_assert_eq!(x.get(base + k, p), u8::from(ladder_plane(status) == Some(k)));
                }
            }
            prop_assert_eq!(x.get(20, p), u8::from(board.to_play() == Color::White));
        }
    }

    #[test]
    fn encoding_commutes_with_symmetries(picks in prop::collection::vec(0usize..1000, 0..40), s in 0u8..8) {
        // Replay the same game under the symmetry; all planes, history
        // included, must be the transformed planes.
        let sym = Symmetry(s);
        let mut a = Board::new(9, 7.5).unwrap();
        let mut b = a.clone();
        for &k in &picks {
            if a.is_terminal() {
                break;
            }
            let moves = a.legal_moves();
            let mv = moves[k % moves.len()];
            let image = Move { color: mv.color, action: sym.apply_action(mv.action, 9) };
            a = a.play(mv).unwrap();
            b = b.play(image).unwrap();
        }
        prop_assert_eq!(encode(&a).transform(sym), encode(&b));
    }
}
