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

fn session(size: usize) -> GtpSession {
    let spec = PlayerSpec::search("gtp", EvaluatorSpec::Uniform, BanditConfig::puct(1.0), Budget::Descents(8));
    GtpSession::new(spec, size).unwrap()
}

#[test]
fn vertices_skip_i_and_count_from_the_bottom() {
    assert_eq!(parse_vertex("A1", 19), Some(Action::Play(Point::new(18, 0, 19))));
    assert_eq!(parse_vertex("t19", 19), Some(Action::Play(Point::new(0, 18, 19))));
    assert_eq!(parse_vertex("J10", 19), Some(Action::Play(Point::new(9, 8, 19))));
    assert_eq!(parse_vertex("I5", 19), None);
    assert_eq!(parse_vertex("K1", 9), None);
    assert_eq!(parse_vertex("A0", 9), None);
    assert_eq!(parse_vertex("Pass", 9), Some(Action::Pass));
    for p in 0..81u16 {
        let v = format_vertex(Point(p), 9);
        assert_eq!(parse_vertex(&v, 9), Some(Action::Play(Point(p))), "{v}");
    }
}

#[test]
fn framing_and_basic_commands() {
    let mut s = session(19);
    assert_eq!(s.handle("protocol_version"), "= 2\n\n");
    assert_eq!(s.handle("7 name"), "=7 gpgo\n\n");
    assert_eq!(s.handle("known_command genmove"), "= true\n\n");
    assert_eq!(s.handle("known_command frobnicate"), "= false\n\n");
    assert_eq!(s.handle("frobnicate"), "? unknown command\n\n");
    assert_eq!(s.handle("3 frobnicate"), "?3 unknown command\n\n");
    assert_eq!(s.handle("boardsize 10"), "? unacceptable size\n\n");
    assert_eq!(s.handle("   # just a comment"), "");
    assert_eq!(s.handle(""), "");
    let list = s.handle("list_commands");
    for c in COMMANDS {
        assert!(list.contains(c));
    }
    assert_eq!(s.commands(), 8);
}

#[test]
fn play_and_genmove_follow_the_rules() {
    let mut s = session(19);
    assert_eq!(s.handle("play b Q16"), "=\n\n");
    assert_eq!(s.handle("play w Q16"), "? illegal move\n\n");
    let reply = s.handle("genmove w");
    let vertex = reply.strip_prefix("= ").unwrap().trim_end();
    let action = parse_vertex(vertex, 19).unwrap();
    assert_ne!(action, parse_vertex("Q16", 19).unwrap());
    assert_eq!(s.board().to_play(), Color::Black);
    assert_eq!(s.board().stone_count(), if action == Action::Pass { 1 } else { 2 });
}

#[test]
fn komi_and_size_changes_rebuild_the_board() {
    let mut s = session(9);
    s.handle("play b E5");
    assert_eq!(s.handle("komi 6.5"), "=\n\n");
    assert_eq!(s.board().komi(), 6.5);
    assert_eq!(s.board().stone_count(), 1);
    assert!(s.handle("komi 6.3").starts_with('?'));
    assert_eq!(s.board().komi(), 6.5);
    assert_eq!(s.handle("boardsize 13"), "=\n\n");
    assert_eq!((s.board().size(), s.board().stone_count()), (13, 0));
    let shown = s.handle("showboard");
    assert!(shown.starts_with("=\n"));
    assert!(shown.contains("N"));
    assert!(!shown.contains(" I "));
}

#[test]
fn extensions_change_the_player() {
    let mut s = session(9);
    assert_eq!(s.handle("gpgo-set-bandit 0.057 0.737"), "=\n\n");
    assert_eq!(s.spec().bandit, Some(BanditConfig::gpuct(0.057, 0.737)));
    assert_eq!(s.handle("gpgo-set-bandit 0.1"), "=\n\n");
    assert_eq!(s.spec().bandit, Some(BanditConfig::puct(0.1)));
    assert_eq!(s.handle("gpgo-set-budget descents:16"), "=\n\n");
    assert_eq!(s.spec().budget, Some(Budget::Descents(16)));
    assert!(s.handle("gpgo-set-budget 16").starts_with('?'));
    assert_eq!(s.handle("gpgo-policy-only"), "=\n\n");
    assert_eq!(s.spec().kind, PlayerKind::PolicyOnly);
    assert_eq!(s.handle("gpgo-policy-only off"), "=\n\n");
    assert_eq!(s.spec().kind, PlayerKind::Search);
    assert!(s.handle("gpgo-load-weights /nonexistent/w.gpgo").starts_with('?'));
    assert_eq!(s.spec().evaluator, EvaluatorSpec::Uniform);
    assert_eq!(s.handle("time_settings 0 10 5"), "=\n\n");
    assert_eq!(s.spec().budget, Some(Budget::Time(Duration::from_secs(2))));
    assert_eq!(s.handle("time_settings 0 0 0"), "=\n\n");
    assert_eq!(s.spec().budget, Some(Budget::Descents(16)));
}

#[test]
fn genmove_after_two_passes_passes() {
    let mut s = session(5);
    s.handle("play b pass");
    s.handle("play w pass");
    assert_eq!(s.handle("genmove b"), "= pass\n\n");
    assert_eq!(s.handle("play b C3"), "? illegal move\n\n");
    assert_eq!(s.handle("clear_board"), "=\n\n");
    assert_eq!(s.handle("play b C3"), "=\n\n");
}

const WORDS: &[&str] = &[
    "play", "genmove", "boardsize", "komi", "clear_board", "showboard", "b", "w", "white", "pass", "A1", "C3",
    "E5", "J9", "Z99", "5", "9", "7.5", "-3", "time_settings", "gpgo-set-budget", "descents:2", "gpgo-set-bandit",
    "0.5", "gpgo-policy-only", "off", "on", "known_command", "#", "\t", "name", "", "xyzzy", "12",
];

fn random_transcript(seed: u64, len: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| {
            let n = rng.gen_range(0..4);
            (0..n).map(|_| WORDS[rng.gen_range(0..WORDS.len())]).collect::<Vec<_>>().join(" ")
        })
        .collect()
}

#[test]
fn fuzzed_transcripts_never_panic_and_genmove_is_legal() {
    for seed in 0..40 {
        let mut s = session(5);
        s.handle("gpgo-set-budget descents:2");
        for line in random_transcript(seed, 120) {
            let before = s.board().clone();
            let reply = s.handle(&line);
            assert!(reply.is_empty() || reply.ends_with("\n\n"), "{line:?} -> {reply:?}");
            assert!(reply.is_empty() || reply.starts_with('=') || reply.starts_with('?'));
            let mut words = line.split_whitespace();
            if words.next() == Some("genmove") && reply.starts_with('=') {
                let size = before.size();
                let color = if s.board().to_play() == Color::Black { Color::White } else { Color::Black };
                let action = parse_vertex(reply[1..].trim(), size).unwrap();
                if !before.is_terminal() {
                    assert!(before.with_to_play(color).is_legal(Move { color, action }), "{line:?} -> {reply:?}");
                }
            }
        }
    }
}

#[test]
fn replaying_a_transcript_reproduces_every_response() {
    for seed in 100..110 {
        let lines = random_transcript(seed, 80);
        let run = || {
            let mut s = session(5);
            lines.iter().map(|l| s.handle(l)).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}

#[test]
fn serve_stops_at_quit() {
    let mut s = session(9);
    let input = "protocol_version\nquit\nname\n";
    let mut out = Vec::new();
    serve(&mut s, input.as_bytes(), &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "= 2\n\n=\n\n");
}
