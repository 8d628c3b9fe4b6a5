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

//! `gpgo`: experiments, analysis and a GTP engine from the command line.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use gpgo::analysis::{
    best_constant_per_budget, fit_accuracy_model, fit_gpuct, fixtures, pareto_front, predict_accuracy,
    read_networks, AccuracyGrid, FixedParams, NetworkRow, WinrateTable,
};
use gpgo::encoding::{make_example, write_dataset};
use gpgo::gtp::{serve, GtpSession};
use gpgo::harness::{
    round_robin, run_match, selfplay_generate, write_sgfs, EvaluatorSpec, GameConfig, MatchConfig, PlayerKind,
    PlayerSpec, RootNoise, RunManifest, SelfPlayConfig,
};
use gpgo::nn::{bench_forward, build, param_count, NetworkDescriptor};
use gpgo::search::{BanditConfig, Budget};
use gpgo::sgf::{ingest_manifest, make_split, KatagoFilter};

#[derive(Parser)]
#[command(name = "gpgo", version, about = "Go engine experiments")]
struct Cli {
    /// Seed for every random choice the command makes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct GameArgs {
    #[arg(long, default_value_t = 9)]
    size: usize,
    #[arg(long, default_value_t = 7.0)]
    komi: f64,
    /// Random opening plies (default depends on the board size).
    #[arg(long)]
    opening_plies: Option<usize>,
    /// Move cap (default 2 * size^2).
    #[arg(long)]
    move_cap: Option<usize>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

impl GameArgs {
    fn config(&self) -> GameConfig {
        let mut cfg = GameConfig::new(self.size, self.komi);
        if let Some(p) = self.opening_plies {
            cfg.opening_plies = p;
        }
        if let Some(m) = self.move_cap {
            cfg.move_cap = m;
        }
        cfg
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Accuracy,
    Value,
}

#[derive(Subcommand)]
enum Command {
    /// Round robin between the players of a JSON file; writes standings CSV.
    Tournament {
        #[arg(long)]
        players: PathBuf,
        /// Games per pair (even).
        #[arg(long, default_value_t = 2)]
        games: usize,
        /// Overrides every search player's budget.
        #[arg(long)]
        budget: Option<Budget>,
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for SGF files and the run manifest.
        #[arg(long)]
        sgf_dir: Option<PathBuf>,
    },
    /// Match between exactly two players; writes a JSON summary.
    Match {
        #[arg(long)]
        players: PathBuf,
        #[arg(long, default_value_t = 2)]
        games: usize,
        #[arg(long)]
        budget: Option<Budget>,
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        sgf_dir: Option<PathBuf>,
    },
    /// Self-play games dumped as a training dataset.
    Selfplay {
        /// JSON file holding one player.
        #[arg(long)]
        player: PathBuf,
        #[arg(long, default_value_t = 2)]
        games: usize,
        #[arg(long)]
        budget: Option<Budget>,
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        noise_alpha: Option<f64>,
        #[arg(long, default_value_t = 0.25)]
        noise_fraction: f64,
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        #[arg(long, default_value_t = 0)]
        temperature_moves: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        sgf_dir: Option<PathBuf>,
    },
    /// Best constant per budget and the GPUCT (tau, c) fit; JSON output.
    FitConstants {
        /// Win-rate CSV (default: the built-in table).
        #[arg(long)]
        table: Option<PathBuf>,
        /// Constant of the reference player (its cells count as 50%).
        #[arg(long, default_value_t = 0.1)]
        baseline: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pareto front of networks by speed versus accuracy or value; CSV.
    Pareto {
        #[arg(long)]
        networks: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Metric::Accuracy)]
        metric: Metric,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fits the accuracy model and predicts unseen sizes; JSON output.
    Extrapolate {
        #[arg(long)]
        networks: Option<PathBuf>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        p1: Option<f64>,
        #[arg(long)]
        p2: Option<f64>,
        #[arg(long)]
        p3: Option<f64>,
        #[arg(long)]
        p4: Option<f64>,
        /// `depth,width` pairs to predict, e.g. `--predict 40,256`.
        #[arg(long)]
        predict: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Speaks GTP on stdin/stdout.
    Gtp {
        /// JSON file holding one player (default: PUCT search on a flat
        /// prior with the area-score value).
        #[arg(long)]
        player: Option<PathBuf>,
        #[arg(long, default_value_t = 19)]
        size: usize,
    },
    /// Forward-pass throughput of randomly initialized networks; CSV.
    Bench {
        /// Descriptors such as `se.8.384.64`.
        #[arg(required = true)]
        networks: Vec<String>,
        #[arg(long, default_value_t = 19)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        batch: usize,
        #[arg(long, default_value_t = 1000)]
        min_ms: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameter count and per-layer breakdown; CSV.
    Params {
        network: String,
        #[arg(long, default_value_t = 19)]
        size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Filters SGF games listed in a manifest and dumps a dataset.
    Ingest {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 19)]
        size: usize,
        #[arg(long, default_value_t = 5.5)]
        min_komi: f64,
        #[arg(long, default_value_t = 7.5)]
        max_komi: f64,
        #[arg(long, default_value_t = 1_000_000)]
        take_last: usize,
        /// Games held out, one sampled state each.
        #[arg(long, default_value_t = 0)]
        validation: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json(path: &Option<PathBuf>, value: &serde_json::Value) -> Result<()> {
    let mut out = output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn read_players(path: &Path, budget: Option<Budget>) -> Result<Vec<PlayerSpec>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut specs: Vec<PlayerSpec> = match serde_json::from_str(&text) {
        Ok(list) => list,
        Err(_) => vec![serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?],
    };
    if let Some(b) = budget {
        for s in specs.iter_mut().filter(|s| s.kind == PlayerKind::Search) {
            s.budget = Some(b);
        }
    }
    Ok(specs)
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(manifest)?)?;
    Ok(())
}

fn networks_table(path: &Option<PathBuf>) -> Result<Vec<NetworkRow>> {
    Ok(match path {
        Some(p) => read_networks(fs::File::open(p).with_context(|| format!("opening {}", p.display()))?)?,
        None => fixtures::networks(),
    })
}

fn main() -> Result<()> {
    match run(Cli::parse()) {
        // A closed stdout (e.g. piping into `head`) is not a failure.
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => Ok(()),
        other => other,
    }
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Tournament { players, games, budget, game, out, sgf_dir } => {
            let specs = read_players(&players, budget)?;
            let cfg = MatchConfig { game: game.config(), base_seed: seed, threads: game.threads };
            let loaded = specs.iter().map(|s| s.load(game.size)).collect::<Result<Vec<_>, _>>()?;
            let (table, outcomes) = round_robin(&loaded, games, &cfg)?;
            table.to_csv(output(&out)?)?;
            if let Some(dir) = sgf_dir {
                write_sgfs(&dir, &outcomes)?;
                let config = json!({ "games_per_pair": games, "match": cfg, "pairs": table.pairs });
                write_manifest(&dir, &RunManifest::new("tournament", seed, specs, config))?;
            }
        }
        Command::Match { players, games, budget, game, out, sgf_dir } => {
            let specs = read_players(&players, budget)?;
            if specs.len() != 2 {
                bail!("match needs exactly two players, found {}", specs.len());
            }
            let cfg = MatchConfig { game: game.config(), base_seed: seed, threads: game.threads };
            let (a, b) = (specs[0].load(game.size)?, specs[1].load(game.size)?);
            let (result, outcomes) = run_match(&a, &b, games, &cfg)?;
            write_json(&out, &json!({ "a": a.name(), "b": b.name(), "result": result }))?;
            if let Some(dir) = sgf_dir {
                write_sgfs(&dir, &outcomes)?;
                write_manifest(&dir, &RunManifest::new("match", seed, specs, json!({ "games": games, "match": cfg })))?;
            }
        }
        Command::Selfplay {
            player,
            games,
            budget,
            game,
            noise_alpha,
            noise_fraction,
            temperature,
            temperature_moves,
            out,
            sgf_dir,
        } => {
            let specs = read_players(&player, budget)?;
            let [spec] = specs.as_slice() else {
                bail!("selfplay needs exactly one player");
            };
            let cfg = SelfPlayConfig {
                game: game.config(),
                games,
                base_seed: seed,
                threads: game.threads,
                noise: noise_alpha.map(|alpha| RootNoise { alpha, fraction: noise_fraction }),
                temperature,
                temperature_moves,
            };
            let data = selfplay_generate(&spec.load(game.size)?, &cfg)?;
            let file = fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_dataset(io::BufWriter::new(file), game.size, &data.examples)?;
            eprintln!(
                "{} games, {} drawn, {} examples -> {}",
                data.outcomes.len(),
                data.drawn_games(),
                data.examples.len(),
                out.display()
            );
            if let Some(dir) = sgf_dir {
                write_sgfs(&dir, &data.outcomes)?;
                write_manifest(&dir, &RunManifest::new("selfplay", seed, specs.clone(), serde_json::to_value(cfg)?))?;
            }
        }
        Command::FitConstants { table, baseline, out } => {
            let table = match table {
                Some(p) => WinrateTable::from_csv(fs::File::open(&p)?, baseline, None)?,
                None => fixtures::winrates_by_constant(),
            };
            let best = best_constant_per_budget(&table)?;
            let fit = fit_gpuct(&best)?;
            let best: Vec<_> = best.iter().map(|(d, c)| json!({ "budget": d, "constant": c })).collect();
            write_json(&out, &json!({ "best_constants": best, "fit": fit }))?;
        }
        Command::Pareto { networks, metric, out } => {
            let rows = networks_table(&networks)?;
            let points = match metric {
                Metric::Accuracy => fixtures::accuracy_points(&rows),
                Metric::Value => fixtures::value_points(&rows),
            };
            let split = pareto_front(&points)?;
            let mut w = output(&out)?;
            writeln!(w, "name,speed,score,dominated")?;
            for p in &points {
                writeln!(w, "{},{},{},{}", p.name, p.cost, p.score, split.dominated.contains(&p.name))?;
            }
        }
        Command::Extrapolate { networks, p, p1, p2, p3, p4, predict, out } => {
            let grid = AccuracyGrid::from_networks(&networks_table(&networks)?, "mobile_se")?;
            let fit = fit_accuracy_model(&grid, &FixedParams { p, p1, p2, p3, p4 })?;
            let mut predictions = Vec::new();
            for pair in &predict {
                let (d, w) = pair.split_once(',').context("--predict takes depth,width")?;
                let (d, w): (f64, f64) = (d.trim().parse()?, w.trim().parse()?);
                predictions.push(json!({ "depth": d, "width": w, "accuracy": predict_accuracy(&fit.model, d, w)? }));
            }
            let fit_json = json!({
                "model": fit.model, "ss": fit.ss, "rss": fit.rss, "l1": fit.l1,
                "max_abs": fit.max_abs, "points": fit.points,
            });
            write_json(&out, &json!({ "fit": fit_json, "predictions": predictions }))?;
        }
        Command::Gtp { player, size } => {
            let spec = match player {
                Some(p) => read_players(&p, None)?.into_iter().next().context("empty player file")?,
                None => PlayerSpec::search(
                    "gpgo",
                    EvaluatorSpec::AreaScore { scale: 2.0 },
                    BanditConfig::puct(1.0),
                    Budget::Descents(64),
                ),
            };
            let mut session = GtpSession::new(spec, size)?;
            serve(&mut session, io::stdin().lock(), io::stdout().lock())?;
        }
        Command::Bench { networks, size, batch, min_ms, out } => {
            let mut w = output(&out)?;
            writeln!(w, "network,params,batch_size,batches,seconds,batches_per_second")?;
            for name in &networks {
                let net = build(&NetworkDescriptor::parse(name, size)?, seed)?;
                let r = bench_forward(&net, batch, Duration::from_millis(min_ms))?;
                writeln!(
                    w,
                    "{},{},{},{},{:.4},{:.3}",
                    r.network, r.params, r.batch_size, r.batches, r.seconds, r.batches_per_second
                )?;
            }
        }
        Command::Params { network, size, out } => {
            let desc = NetworkDescriptor::parse(&network, size)?;
            let mut w = output(&out)?;
            writeln!(w, "layer,params")?;
            for (layer, n) in desc.param_breakdown() {
                writeln!(w, "{layer},{n}")?;
            }
            writeln!(w, "total,{}", param_count(&desc))?;
        }
        Command::Ingest { manifest, size, min_komi, max_komi, take_last, validation, out_dir } => {
            let filter = KatagoFilter { min_komi, max_komi, size, take_last, check_replay: true };
            let (games, summary) = ingest_manifest(&manifest, &filter)?;
            let split = make_split(&games, validation, seed)?;
            let mut train = Vec::new();
            for &g in &split.training {
                let game = &games[g];
                let Some(winner) = game.result.winner() else { continue };
                for (board, mv) in game.replay()?.iter().zip(&game.moves) {
                    train.push(make_example(board, *mv, winner)?);
                }
            }
            let mut valid = Vec::new();
            for &(g, m) in &split.validation_states {
                let game = &games[g];
                if let (Some(winner), Some(mv)) = (game.result.winner(), game.moves.get(m)) {
                    valid.push(make_example(&game.replay()?[m], *mv, winner)?);
                }
            }
            fs::create_dir_all(&out_dir)?;
            write_dataset(io::BufWriter::new(fs::File::create(out_dir.join("train.bin"))?), size, &train)?;
            write_dataset(io::BufWriter::new(fs::File::create(out_dir.join("validation.bin"))?), size, &valid)?;
            let report = json!({
                "summary": summary,
                "training_games": split.training.len(),
                "training_examples": train.len(),
                "validation_examples": valid.len(),
                "seed": seed,
            });
            fs::write(out_dir.join("summary.json"), serde_json::to_string_pretty(&report)?)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(())
}
