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

//! SGF (FF\[4\]) game records and dataset preparation.
//!
//! Only the main line is read; variations are skipped.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{Action, Board, Color, Move, Point, SUPPORTED_SIZES};

#[derive(Debug, Error, PartialEq)]
pub enum SgfError {
    #[error("malformed SGF at byte {pos}: {msg}")]
    Malformed { pos: usize, msg: &'static str },
    #[error("unsupported board size {0}")]
    UnsupportedSize(String),
    #[error("illegal coordinate {0:?}")]
    IllegalCoordinate(String),
    #[error("bad komi {0:?}")]
    BadKomi(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GameResult {
    BlackWin,
    WhiteWin,
    Draw,
    Unknown,
}

impl GameResult {
    pub fn parse(re: &str) -> GameResult {
        let re = re.trim();
        let upper = re.to_ascii_uppercase();
        if upper.starts_with("B+") {
            GameResult::BlackWin
        } else if upper.starts_with("W+") {
            GameResult::WhiteWin
        } else if upper == "0" || upper == "DRAW" || upper == "JIGO" {
            GameResult::Draw
        } else {
            GameResult::Unknown
        }
    }

    pub fn winner(self) -> Option<Color> {
        match self {
            GameResult::BlackWin => Some(Color::Black),
            GameResult::WhiteWin => Some(Color::White),
            _ => None,
        }
    }

    pub fn from_score(score: f64) -> GameResult {
        if score > 0.0 {
            GameResult::BlackWin
        } else if score < 0.0 {
            GameResult::WhiteWin
        } else {
            GameResult::Draw
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameRecord {
    pub board_size: usize,
    pub komi: f64,
    /// Setup stones (AB/AW) on the root node.
    pub setup: Vec<(Color, Point)>,
    pub moves: Vec<Move>,
    pub result: GameResult,
    /// Remaining root properties, values joined with `,` when repeated.
    pub metadata: BTreeMap<String, String>,
    /// `C[]` comments on move nodes, keyed by move index.
    pub comments: BTreeMap<usize, String>,
}

impl GameRecord {
    pub fn new(board_size: usize, komi: f64) -> GameRecord {
        GameRecord {
            board_size,
            komi,
            setup: Vec::new(),
            moves: Vec::new(),
            result: GameResult::Unknown,
            metadata: BTreeMap::new(),
            comments: BTreeMap::new(),
        }
    }

    /// Initial board after setup stones, with the side to move from PL or
    /// the first move.
    pub fn initial_board(&self) -> Result<Board, crate::board::BoardError> {
        let first = self
            .moves
            .first()
            .map(|m| m.color)
            .or_else(|| match self.metadata.get("PL").map(String::as_str) {
                Some("W") | Some("w") => Some(Color::White),
                _ => None,
            })
            .unwrap_or(Color::Black);
        if self.setup.is_empty() && first == Color::Black {
            return Board::new(self.board_size, self.komi);
        }
        let stones: Vec<(Point, Color)> = self.setup.iter().map(|(c, p)| (*p, *c)).collect();
        Board::from_stones(self.board_size, self.komi, &stones, first)
    }

    /// Replays the move list under our ruleset, returning every position
    /// (initial included).
    pub fn replay(&self) -> Result<Vec<Board>, crate::board::BoardError> {
        let mut board = self.initial_board()?;
        let mut out = Vec::with_capacity(self.moves.len() + 1);
        out.push(board.clone());
        for mv in &self.moves {
            // Two passes in a row end the game; later moves are invalid.
            board = board.play(*mv)?;
            out.push(board.clone());
        }
        Ok(out)
    }
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

type Node = Vec<(String, Vec<String>)>;

impl<'a> Parser<'a> {
    fn err(&self, msg: &'static str) -> SgfError {
        SgfError::Malformed { pos: self.pos, msg }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8, msg: &'static str) -> Result<(), SgfError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(msg))
        }
    }

    /// Parses one game tree and returns its main-line nodes.
    fn game_tree(&mut self) -> Result<Vec<Node>, SgfError> {
        self.expect(b'(', "expected '('")?;
        let mut nodes = Vec::new();
        while self.peek() == Some(b';') {
            self.pos += 1;
            nodes.push(self.node()?);
        }
        if nodes.is_empty() {
            return Err(self.err("game tree without nodes"));
        }
        let mut first_variation = true;
        while self.peek() == Some(b'(') {
            let sub = self.game_tree()?;
            if first_variation {
                nodes.extend(sub);
                first_variation = false;
            }
        }
        self.expect(b')', "expected ')'")?;
        Ok(nodes)
    }

    fn node(&mut self) -> Result<Node, SgfError> {
        let mut props = Vec::new();
        while let Some(c) = self.peek() {
            if !c.is_ascii_alphabetic() {
                break;
            }
            let start = self.pos;
            while self.pos < self.text.len() && self.text[self.pos].is_ascii_alphabetic() {
                self.pos += 1;
            }
            // FF[3] allowed lowercase letters in identifiers; keep capitals.
            let ident: String = self.text[start..self.pos]
                .iter()
                .filter(|c| c.is_ascii_uppercase())
                .map(|c| *c as char)
                .collect();
            let mut values = Vec::new();
            while self.peek() == Some(b'[') {
                self.pos += 1;
                values.push(self.value()?);
            }
            if values.is_empty() {
                return Err(self.err("property without value"));
            }
            props.push((ident, values));
        }
        Ok(props)
    }

    fn value(&mut self) -> Result<String, SgfError> {
        let mut out = Vec::new();
        loop {
            let Some(&c) = self.text.get(self.pos) else {
                return Err(self.err("unterminated property value"));
            };
            self.pos += 1;
            match c {
                b']' => break,
                b'\\' => {
                    let Some(&next) = self.text.get(self.pos) else {
                        return Err(self.err("dangling escape"));
                    };
                    self.pos += 1;
                    // Escaped line break is a soft break and is dropped.
                    if next == b'\n' || next == b'\r' {
                        if let Some(&n2) = self.text.get(self.pos) {
                            if (n2 == b'\n' || n2 == b'\r') && n2 != next {
                                self.pos += 1;
                            }
                        }
                    } else {
                        out.push(next);
                    }
                }
                _ => out.push(c),
            }
        }
        Ok(String::from_utf8_lossy(&out).into_owned())
    }
}

fn parse_point(value: &str, size: usize) -> Result<Option<Point>, SgfError> {
    let v = value.trim();
    if v.is_empty() || (v == "tt" && size <= 19) {
        return Ok(None);
    }
    let bytes = v.as_bytes();
    if bytes.len() != 2 {
        return Err(SgfError::IllegalCoordinate(value.to_string()));
    }
    let coord = |b: u8| -> Option<usize> {
        b.is_ascii_lowercase().then(|| (b - b'a') as usize).filter(|i| *i < size)
    };
    match (coord(bytes[0]), coord(bytes[1])) {
        (Some(col), Some(row)) => Ok(Some(Point::new(row, col, size))),
        _ => Err(SgfError::IllegalCoordinate(value.to_string())),
    }
}

fn record_from_nodes(nodes: Vec<Node>) -> Result<GameRecord, SgfError> {
    let root = &nodes[0];
    let mut size = 19;
    if let Some((_, v)) = root.iter().find(|(k, _)| k == "SZ") {
        let s = v[0].trim();
        size = s.parse().map_err(|_| SgfError::UnsupportedSize(s.to_string()))?;
        if !SUPPORTED_SIZES.contains(&size) {
            return Err(SgfError::UnsupportedSize(s.to_string()));
        }
    }
    let mut komi: f64 = 0.0;
    if let Some((_, v)) = root.iter().find(|(k, _)| k == "KM") {
        let s = v[0].trim();
        if !s.is_empty() {
            komi = s.parse().map_err(|_| SgfError::BadKomi(s.to_string()))?;
            if !komi.is_finite() || (komi * 2.0).fract() != 0.0 {
                return Err(SgfError::BadKomi(s.to_string()));
            }
        }
    }
    let mut record = GameRecord::new(size, komi);
    for (index, node) in nodes.iter().enumerate() {
        for (key, values) in node {
            match key.as_str() {
                "B" | "W" => {
                    let color = if key == "B" { Color::Black } else { Color::White };
                    let action = match parse_point(&values[0], size)? {
                        Some(p) => Action::Play(p),
                        None => Action::Pass,
                    };
                    record.moves.push(Move { color, action });
                }
                "AB" | "AW" => {
                    let color = if key == "AB" { Color::Black } else { Color::White };
                    for v in values {
                        if let Some(p) = parse_point(v, size)? {
                            record.setup.push((color, p));
                        }
                    }
                }
                "SZ" | "KM" | "GM" | "FF" if index == 0 => {}
                "RE" if index == 0 => {
                    record.result = GameResult::parse(&values[0]);
                    record.metadata.insert(key.clone(), values.join(","));
                }
                "C" if index > 0 => {
                    // A comment on a move node belongs to the move it carries.
                    if let Some(i) = record.moves.len().checked_sub(1) {
                        record.comments.insert(i, values.join(","));
                    }
                }
                _ if index == 0 => {
                    record.metadata.insert(key.clone(), values.join(","));
                }
                _ => {}
            }
        }
    }
    Ok(record)
}

/// Parses the first game of an SGF collection.
pub fn parse_sgf(text: &[u8]) -> Result<GameRecord, SgfError> {
    let mut parser = Parser { text, pos: 0 };
    let nodes = parser.game_tree()?;
    record_from_nodes(nodes)
}

/// Parses every game of an SGF collection.
pub fn parse_collection(text: &[u8]) -> Result<Vec<GameRecord>, SgfError> {
    let mut parser = Parser { text, pos: 0 };
    let mut out = Vec::new();
    while parser.peek() == Some(b'(') {
        out.push(record_from_nodes(parser.game_tree()?)?);
    }
    if parser.peek().is_some() {
        return Err(parser.err("trailing data"));
    }
    Ok(out)
}

fn escape(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        if c == ']' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

fn point_text(p: Point, size: usize) -> String {
    let col = (b'a' + p.col(size) as u8) as char;
    let row = (b'a' + p.row(size) as u8) as char;
    format!("{col}{row}")
}

fn format_komi(komi: f64) -> String {
    if komi.fract() == 0.0 {
        format!("{komi:.0}")
    } else {
        format!("{komi}")
    }
}

fn result_text(result: GameResult, raw: Option<&String>) -> Option<String> {
    if let Some(raw) = raw {
        if GameResult::parse(raw) == result {
            return Some(raw.clone());
        }
    }
    match result {
        GameResult::BlackWin => Some("B+".into()),
        GameResult::WhiteWin => Some("W+".into()),
        GameResult::Draw => Some("0".into()),
        GameResult::Unknown => None,
    }
}

pub fn emit_sgf(g: &GameRecord) -> String {
    let mut out = String::new();
    let size = g.board_size;
    write!(out, "(;GM[1]FF[4]SZ[{}]KM[{}]", size, format_komi(g.komi)).unwrap();
    if let Some(re) = result_text(g.result, g.metadata.get("RE")) {
        write!(out, "RE[{}]", escape(&re)).unwrap();
    }
    for (key, value) in &g.metadata {
        if matches!(key.as_str(), "GM" | "FF" | "SZ" | "KM" | "RE") {
            continue;
        }
        write!(out, "{}[{}]", key, escape(value)).unwrap();
    }
    for (color, key) in [(Color::Black, "AB"), (Color::White, "AW")] {
        let stones: Vec<_> = g.setup.iter().filter(|(c, _)| *c == color).collect();
        if !stones.is_empty() {
            out.push_str(key);
            for (_, p) in stones {
                write!(out, "[{}]", point_text(*p, size)).unwrap();
            }
        }
    }
    for (i, mv) in g.moves.iter().enumerate() {
        let key = match mv.color {
            Color::Black => "B",
            Color::White => "W",
        };
        let value = match mv.action {
            Action::Play(p) => point_text(p, size),
            Action::Pass => String::new(),
        };
        write!(out, ";{key}[{value}]").unwrap();
        if let Some(c) = g.comments.get(&i) {
            write!(out, "C[{}]", escape(c)).unwrap();
        }
    }
    out.push(')');
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterSummary {
    pub seen: usize,
    pub kept: usize,
    pub skipped_size: usize,
    pub skipped_komi: usize,
    /// Games whose moves do not replay under our ruleset.
    pub rejected_replay: usize,
    /// Matching games dropped because only the last `take_last` are kept.
    pub dropped_older: usize,
    pub parse_errors: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KatagoFilter {
    pub min_komi: f64,
    pub max_komi: f64,
    pub size: usize,
    pub take_last: usize,
    pub check_replay: bool,
}

impl Default for KatagoFilter {
    /// 19×19, komi in [5.5, 7.5], last 1,000,000 games.
    fn default() -> Self {
        KatagoFilter {
            min_komi: 5.5,
            max_komi: 7.5,
            size: 19,
            take_last: 1_000_000,
            check_replay: true,
        }
    }
}

/// Keeps games on `size` with komi in `[min_komi, max_komi]` whose moves
/// replay legally, then the last `take_last` survivors in stream order.
pub fn filter_katago<I>(games: I, filter: &KatagoFilter) -> (Vec<GameRecord>, FilterSummary)
where
    I: IntoIterator<Item = GameRecord>,
{
    let mut summary = FilterSummary::default();
    let mut kept: VecDeque<GameRecord> = VecDeque::new();
    for g in games {
        summary.seen += 1;
        if g.board_size != filter.size {
            summary.skipped_size += 1;
            continue;
        }
        if g.komi < filter.min_komi || g.komi > filter.max_komi {
            summary.skipped_komi += 1;
            continue;
        }
        if filter.check_replay && g.replay().is_err() {
            summary.rejected_replay += 1;
            continue;
        }
        kept.push_back(g);
        if kept.len() > filter.take_last {
            kept.pop_front();
            summary.dropped_older += 1;
        }
    }
    summary.kept = kept.len();
    (kept.into(), summary)
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("validation count {requested} exceeds {available} games")]
    TooFewGames { requested: usize, available: usize },
}

/// Reads a manifest of newline-separated SGF paths (relative paths resolve
/// against the manifest's directory) and parses every game, preserving
/// manifest order. Unparsable files count as parse errors.
pub fn ingest_manifest(
    manifest: &Path,
    filter: &KatagoFilter,
) -> Result<(Vec<GameRecord>, FilterSummary), IngestError> {
    let text = std::fs::read_to_string(manifest)
        .map_err(|source| IngestError::Io { path: manifest.to_path_buf(), source })?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let paths: Vec<PathBuf> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| base.join(l))
        .collect();
    let parsed: Vec<Result<Vec<GameRecord>, IngestError>> = paths
        .par_iter()
        .map(|path| {
            let bytes = std::fs::read(path)
                .map_err(|source| IngestError::Io { path: path.clone(), source })?;
            Ok(parse_collection(&bytes).unwrap_or_default())
        })
        .collect();
    let mut games = Vec::new();
    let mut parse_errors = 0;
    for (path, result) in paths.iter().zip(parsed) {
        let found = result?;
        if found.is_empty() {
            log_parse_failure(path);
            parse_errors += 1;
        }
        games.extend(found);
    }
    let (kept, mut summary) = filter_katago(games, filter);
    summary.parse_errors = parse_errors;
    Ok((kept, summary))
}

fn log_parse_failure(path: &Path) {
    eprintln!("skipping {}: no parsable game", path.display());
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    /// Indices of training games, in input order.
    pub training: Vec<usize>,
    /// (game index, move index) of the single state sampled per validation
    /// game. The state is the position before that move.
    pub validation_states: Vec<(usize, usize)>,
}

pub fn make_split(games: &[GameRecord], validation_count: usize, seed: u64) -> Result<DatasetSplit, IngestError> {
    if validation_count > games.len() {
        return Err(IngestError::TooFewGames { requested: validation_count, available: games.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..games.len()).collect();
    order.shuffle(&mut rng);
    let mut chosen = order[..validation_count].to_vec();
    chosen.sort_unstable();
    let validation_states = chosen
        .iter()
        .map(|&g| (g, rng.gen_range(0..games[g].moves.len().max(1))))
        .collect();
    let mut is_validation = vec![false; games.len()];
    for g in &chosen {
        is_validation[*g] = true;
    }
    let training = (0..games.len()).filter(|g| !is_validation[*g]).collect();
    Ok(DatasetSplit { training, validation_states })
}
