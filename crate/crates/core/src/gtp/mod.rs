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

//! Go Text Protocol (version 2) front end.
//!
//! [`GtpSession::handle`] takes one command line and returns the framed
//! response (`=[id] result\n\n` or `?[id] error\n\n`), or an empty string for
//! blank and comment-only lines. Besides the standard subset the session
//! understands a few `gpgo-` extensions for experiment control:
//!
//! ```text
//! gpgo-set-budget descents:512 | time:2s
//! gpgo-set-bandit <c> [<tau>]        (no tau: PUCT)
//! gpgo-load-weights <path> [<descriptor>]
//! gpgo-policy-only [on|off]
//! ```

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::time::Duration;

use crate::board::{Action, Board, Color, Move, Point, SUPPORTED_SIZES};
use crate::harness::{EvaluatorSpec, Player, PlayerKind, PlayerSpec};
use crate::search::{BanditConfig, Budget};

const COMMANDS: &[&str] = &[
    "protocol_version",
    "name",
    "version",
    "known_command",
    "list_commands",
    "boardsize",
    "clear_board",
    "komi",
    "play",
    "genmove",
    "showboard",
    "time_settings",
    "quit",
    "gpgo-set-budget",
    "gpgo-set-bandit",
    "gpgo-load-weights",
    "gpgo-policy-only",
];

const DEFAULT_KOMI: f64 = 7.5;
/// Moves a main-time-only clock is spread over.
const MAIN_TIME_MOVES: f64 = 60.0;

const COLUMNS: &str = "ABCDEFGHJKLMNOPQRSTUVWXYZ";

/// Formats a point as a GTP vertex (`A1` is the lower left; no `I`).
pub fn format_vertex(p: Point, size: usize) -> String {
    let col = COLUMNS.as_bytes()[p.col(size)] as char;
    format!("{col}{}", size - p.row(size))
}

/// Parses a GTP vertex or `pass`, case-insensitively.
pub fn parse_vertex(text: &str, size: usize) -> Option<Action> {
    let t = text.to_ascii_uppercase();
    if t == "PASS" {
        return Some(Action::Pass);
    }
    let mut chars = t.chars();
    let col = COLUMNS[..size].find(chars.next()?)?;
    let number: usize = chars.as_str().parse().ok()?;
    if number == 0 || number > size {
        return None;
    }
    Some(Action::Play(Point::new(size - number, col, size)))
}

fn parse_color(text: &str) -> Option<Color> {
    match text.to_ascii_lowercase().as_str() {
        "b" | "black" => Some(Color::Black),
        "w" | "white" => Some(Color::White),
        _ => None,
    }
}

/// One GTP connection: the game so far and the engine playing it.
pub struct GtpSession {
    size: usize,
    komi: f64,
    /// Every move since `clear_board`; the board is rebuilt from these when
    /// komi changes mid-game.
    moves: Vec<Move>,
    board: Board,
    spec: PlayerSpec,
    player: Player,
    /// Budget from the spec, restored when `time_settings` sets no limit.
    configured_budget: Option<Budget>,
    commands: u64,
    quit: bool,
}

impl GtpSession {
    /// Starts a session on an empty `size` board with komi 7.5.
    pub fn new(spec: PlayerSpec, size: usize) -> Result<GtpSession, crate::harness::HarnessError> {
        let player = spec.load(size)?;
        let board = Board::new(size, DEFAULT_KOMI)?;
        Ok(GtpSession {
            size,
            komi: DEFAULT_KOMI,
            moves: Vec::new(),
            board,
            configured_budget: spec.budget,
            spec,
            player,
            commands: 0,
            quit: false,
        })
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn spec(&self) -> &PlayerSpec {
        &self.spec
    }

    /// Commands handled so far, including failed ones.
    pub fn commands(&self) -> u64 {
        self.commands
    }

    /// True once `quit` has been handled.
    pub fn finished(&self) -> bool {
        self.quit
    }

    /// Handles one command line and returns the framed response.
    pub fn handle(&mut self, line: &str) -> String {
        let cleaned: String = line
            .split('#')
            .next()
            .unwrap_or("")
            .chars()
            .filter_map(|c| match c {
                '\t' => Some(' '),
                c if c.is_control() => None,
                c => Some(c),
            })
            .collect();
        let mut words = cleaned.split_whitespace().peekable();
        let Some(first) = words.peek().copied() else {
            return String::new();
        };
        let id = match first.parse::<u64>() {
            Ok(id) => {
                words.next();
                Some(id)
            }
            Err(_) => None,
        };
        self.commands += 1;
        let id = id.map(|n| n.to_string()).unwrap_or_default();
        let Some(command) = words.next() else {
            return format!("?{id} syntax error\n\n");
        };
        let args: Vec<&str> = words.collect();
        match self.dispatch(command, &args) {
            Ok(result) if result.is_empty() => format!("={id}\n\n"),
            Ok(result) if result.starts_with('\n') => format!("={id}{result}\n\n"),
            Ok(result) => format!("={id} {result}\n\n"),
            Err(msg) => format!("?{id} {msg}\n\n"),
        }
    }

    fn dispatch(&mut self, command: &str, args: &[&str]) -> Result<String, String> {
        let syntax = || "syntax error".to_string();
        match command {
            "protocol_version" => Ok("2".into()),
            "name" => Ok("gpgo".into()),
            "version" => Ok(env!("CARGO_PKG_VERSION").into()),
            "known_command" => {
                Ok(args.first().map_or(false, |c| COMMANDS.contains(c)).to_string())
            }
            "list_commands" => Ok(COMMANDS.join("\n")),
            "quit" => {
                self.quit = true;
                Ok(String::new())
            }
            "boardsize" => {
                let size: usize = args.first().and_then(|s| s.parse().ok()).ok_or_else(syntax)?;
                if !SUPPORTED_SIZES.contains(&size) {
                    return Err("unacceptable size".into());
                }
                let player = self.spec.load(size).map_err(|_| "unacceptable size".to_string())?;
                self.size = size;
                self.player = player;
                self.reset()
            }
            "clear_board" => self.reset(),
            "komi" => {
                let komi: f64 = args.first().and_then(|s| s.parse().ok()).ok_or_else(syntax)?;
                let old = self.komi;
                self.komi = komi;
                self.rebuild().map_err(|e| {
                    self.komi = old;
                    e
                })?;
                Ok(String::new())
            }
            "play" => {
                let [color, vertex] = args else {
                    return Err(syntax());
                };
                let color = parse_color(color).ok_or_else(syntax)?;
                let action = parse_vertex(vertex, self.size).ok_or_else(syntax)?;
                self.apply(Move { color, action }).map_err(|_| "illegal move".to_string())?;
                Ok(String::new())
            }
            "genmove" => {
                let color = args.first().and_then(|c| parse_color(c)).ok_or_else(syntax)?;
                self.genmove(color)
            }
            "showboard" => Ok(self.showboard()),
            "time_settings" => {
                let [main, byo, stones] = args else {
                    return Err(syntax());
                };
                let parse = |s: &str| s.parse::<f64>().ok().filter(|v| *v >= 0.0 && v.is_finite());
                let (main, byo) = (parse(main).ok_or_else(syntax)?, parse(byo).ok_or_else(syntax)?);
                let stones: u32 = stones.parse().map_err(|_| syntax())?;
                self.spec.budget = time_budget(main, byo, stones).or(self.configured_budget);
                self.reload()
            }
            "gpgo-set-budget" => {
                let budget: Budget = args.first().ok_or_else(syntax)?.parse().map_err(|_| syntax())?;
                self.spec.budget = Some(budget);
                self.configured_budget = Some(budget);
                if self.spec.bandit.is_some() {
                    self.spec.kind = PlayerKind::Search;
                }
                self.reload()
            }
            "gpgo-set-bandit" => {
                let num = |i: usize| args.get(i).map(|s| s.parse::<f64>().map_err(|_| syntax())).transpose();
                let c = num(0)?.ok_or_else(syntax)?;
                let bandit = match num(1)? {
                    Some(tau) => BanditConfig::gpuct(c, tau),
                    None => BanditConfig::puct(c),
                };
                self.spec.bandit = Some(bandit);
                self.reload()
            }
            "gpgo-load-weights" => {
                let path = PathBuf::from(args.first().ok_or_else(syntax)?);
                let descriptor = args.get(1).map(|s| s.to_string());
                let old = std::mem::replace(&mut self.spec.evaluator, EvaluatorSpec::Weights { path, descriptor });
                self.reload().map_err(|e| {
                    self.spec.evaluator = old;
                    e
                })
            }
            "gpgo-policy-only" => {
                let on = match args.first().map(|s| s.to_ascii_lowercase()) {
                    None => true,
                    Some(s) if s == "on" || s == "true" || s == "1" => true,
                    Some(s) if s == "off" || s == "false" || s == "0" => false,
                    Some(_) => return Err(syntax()),
                };
                if !on && (self.spec.bandit.is_none() || self.spec.budget.is_none()) {
                    return Err("search needs a bandit and a budget".into());
                }
                self.spec.kind = if on { PlayerKind::PolicyOnly } else { PlayerKind::Search };
                self.reload()
            }
            _ => Err("unknown command".into()),
        }
    }

    fn reload(&mut self) -> Result<String, String> {
        self.player = self.spec.load(self.size).map_err(|e| e.to_string())?;
        Ok(String::new())
    }

    fn reset(&mut self) -> Result<String, String> {
        self.moves.clear();
        self.rebuild()?;
        Ok(String::new())
    }

    fn rebuild(&mut self) -> Result<(), String> {
        let mut board = Board::new(self.size, self.komi).map_err(|e| e.to_string())?;
        for &mv in &self.moves {
            board = play_any_color(&board, mv).map_err(|e| e.to_string())?;
        }
        self.board = board;
        Ok(())
    }

    fn apply(&mut self, mv: Move) -> Result<(), crate::board::BoardError> {
        self.board = play_any_color(&self.board, mv)?;
        self.moves.push(mv);
        Ok(())
    }

    fn genmove(&mut self, color: Color) -> Result<String, String> {
        if self.board.is_terminal() {
            // Both sides have passed; there is nothing left to play.
            return Ok("pass".into());
        }
        let board = self.board.with_to_play(color);
        let action = self.player.choose(&board).map_err(|e| e.to_string())?;
        self.apply(Move { color, action }).map_err(|e| e.to_string())?;
        Ok(match action {
            Action::Pass => "pass".into(),
            Action::Play(p) => format_vertex(p, self.size),
        })
    }

    fn showboard(&self) -> String {
        let n = self.size;
        let letters: String = COLUMNS[..n].chars().map(|c| format!(" {c}")).collect();
        let mut out = format!("\n  {letters}\n");
        let rows: Vec<String> = self.board.to_string().lines().map(str::to_string).collect();
        for (r, row) in rows.iter().enumerate() {
            out.push_str(&format!("{:>2} {row} {}\n", n - r, n - r));
        }
        out.push_str(&format!("  {letters}\n"));
        out.push_str(&format!(
            "{} to play, komi {}, captures B {} W {}",
            self.board.to_play(),
            self.komi,
            self.board.captures(Color::Black),
            self.board.captures(Color::White)
        ));
        out
    }
}

/// Plays `mv` even if the other color is to move, as GTP allows.
fn play_any_color(board: &Board, mv: Move) -> Result<Board, crate::board::BoardError> {
    if board.to_play() == mv.color {
        board.play(mv)
    } else {
        board.with_to_play(mv.color).play(mv)
    }
}

/// Per-move time for a GTP clock: the byo-yomi period split over its
/// stones, or else main time spread over a fixed number of moves. `None`
/// means no limit.
fn time_budget(main: f64, byo: f64, stones: u32) -> Option<Budget> {
    let seconds = if byo > 0.0 && stones > 0 {
        byo / stones as f64
    } else if main > 0.0 {
        main / MAIN_TIME_MOVES
    } else {
        return None;
    };
    Some(Budget::Time(Duration::from_secs_f64(seconds.max(0.001))))
}

/// Runs a session over a reader and writer until `quit` or end of input.
pub fn serve<R: BufRead, W: Write>(session: &mut GtpSession, input: R, mut output: W) -> std::io::Result<()> {
    for line in input.lines() {
        let response = session.handle(&line?);
        output.write_all(response.as_bytes())?;
        output.flush()?;
        if session.finished() {
            break;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
