//! Replicated strategy comparisons with CSV output.
//!
//! Every strategy runs the same replication seeds (`seed_base + j`), so the
//! comparison at each checkpoint is paired.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::controller::{run_mscs_on, ControllerConfig, StageRecord};
use crate::distribution::KlDirection;
use crate::error::{Error, Result};
use crate::generate::GeneratorSpec;
use crate::graph::{load_edge_list, Graph};
use crate::measures::Measure;
use crate::numfmt::{round_sig6, sig6};
use crate::profile::NetworkProfile;
use crate::strategy::Strategy;

pub const TRAJECTORY_HEADER: &str = "run_id,strategy,seed,stage,targeted,responded,sample_size,sample_fraction,kl_indegree,kl_outdegree,kl_degree,kl_clustering,ev";
pub const AGGREGATE_HEADER: &str = "strategy,fraction,replications,mean_ev,sd_ev";

#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    Generate(GeneratorSpec),
}

impl GraphSource {
    pub fn load(&self) -> Result<Graph> {
        match self {
            GraphSource::File(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                Ok(load_edge_list(&text)?.graph)
            }
            GraphSource::Generate(spec) => spec.generate(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub source: GraphSource,
    pub strategies: Vec<Strategy>,
    pub replications: usize,
    pub seed_base: u64,
    /// Checkpoint sample fractions, ascending in (0, 1].
    pub fractions: Vec<f64>,
    /// Template for every run; `strategy`, `seed`, `ev_opt` and
    /// `max_stages` are set per run.
    pub controller: ControllerConfig,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::config("replications must be at least one"));
        }
        if self.strategies.is_empty() {
            return Err(Error::config("no strategies to compare"));
        }
        if self.fractions.is_empty() {
            return Err(Error::config("no checkpoint fractions"));
        }
        if self.fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
            return Err(Error::config("fractions must lie in (0, 1]"));
        }
        if self.fractions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("fractions must be strictly ascending"));
        }
        self.controller.validate()
    }
}

/// Parses the line-oriented `key = value` experiment file. Relative paths
/// resolve against `base_dir`.
///
/// Keys: `graph`, `generate`, `strategies`, `replications`, `seed_base`,
/// `fractions`, `target_size`, `rate`, `beta`, `weights`, `bins`, `kbins`,
/// `within_bin`, `kbins_quota`, `epsilon`, `initial`, `kl_direction`, `out`.
pub fn parse_experiment_config(text: &str, base_dir: &Path) -> Result<ExperimentConfig> {
    let mut source = None;
    let mut strategies = vec![Strategy::Random, Strategy::KBins];
    let mut replications = 1usize;
    let mut seed_base = 0u64;
    let mut fractions = vec![0.01, 0.02, 0.05, 0.1, 0.2];
    let mut controller = ControllerConfig::default();
    let mut out_dir = base_dir.join("results");

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let line_no = lineno + 1;
        let perr = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| perr(format!("expected 'key = value', got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = || perr(format!("bad value for {key}: '{value}'"));
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        let count = |v: &str| v.trim().parse::<usize>().map_err(|_| bad());
        match key {
            "graph" => source = Some(GraphSource::File(base_dir.join(value))),
            "generate" => {
                source = Some(GraphSource::Generate(
                    value.parse().map_err(|e: Error| perr(e.to_string()))?,
                ))
            }
            "strategies" => {
                strategies = value
                    .split(',')
                    .map(|s| s.trim().parse::<Strategy>())
                    .collect::<Result<_>>()
                    .map_err(|e| perr(e.to_string()))?
            }
            "initial" => {
                controller.initial = value.parse().map_err(|e: Error| perr(e.to_string()))?
            }
            "replications" => replications = count(value)?,
            "seed_base" => seed_base = value.parse().map_err(|_| bad())?,
            "fractions" => fractions = value.split(',').map(num).collect::<Result<_>>()?,
            "target_size" => controller.target_size = count(value)?,
            "rate" => controller.response.rate = num(value)?,
            "beta" => controller.response.bias_exponent = num(value)?,
            "weights" => controller.weights = value.split(',').map(num).collect::<Result<_>>()?,
            "bins" => controller.bins = count(value)?,
            "kbins" => controller.kbins.k = count(value)?,
            "within_bin" => {
                controller.kbins.within = value.parse().map_err(|e: Error| perr(e.to_string()))?
            }
            "kbins_quota" => {
                controller.kbins.basis = value.parse().map_err(|e: Error| perr(e.to_string()))?
            }
            "epsilon" => controller.epsilon = num(value)?,
            "kl_direction" => {
                controller.direction = match value {
                    "reference-first" => KlDirection::ReferenceFirst,
                    "sample-first" => KlDirection::SampleFirst,
                    _ => return Err(bad()),
                }
            }
            "out" => out_dir = base_dir.join(value),
            other => return Err(perr(format!("unknown key '{other}'"))),
        }
    }
    let config = ExperimentConfig {
        source: source.ok_or_else(|| Error::config("config needs 'graph' or 'generate'"))?,
        strategies,
        replications,
        seed_base,
        fractions,
        controller,
        out_dir,
    };
    config.validate()?;
    Ok(config)
}

/// One row of the trajectory CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub run_id: usize,
    pub strategy: String,
    pub seed: u64,
    pub record: StageRecord,
}

pub fn write_trajectory_csv<W: Write>(mut w: W, rows: &[TrajectoryRow]) -> std::io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for row in rows {
        let r = &row.record;
        write!(
            w,
            "{},{},{},{},{},{},{},{}",
            row.run_id,
            row.strategy,
            row.seed,
            r.stage,
            r.targeted,
            r.responded,
            r.sample_size,
            sig6(r.sample_fraction)
        )?;
        for kl in &r.kl {
            write!(w, ",{}", sig6(*kl))?;
        }
        writeln!(w, ",{}", sig6(r.ev))?;
    }
    Ok(())
}

pub fn read_trajectory_csv(text: &str) -> Result<Vec<TrajectoryRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == TRAJECTORY_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "missing trajectory header".into(),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let perr = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 13 {
                return Err(perr(format!("expected 13 fields, found {}", f.len())));
            }
            let int = |s: &str| {
                s.parse::<u64>()
                    .map_err(|_| perr(format!("bad integer '{s}'")))
            };
            let real = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| perr(format!("bad number '{s}'")))
            };
            Ok(TrajectoryRow {
                run_id: int(f[0])? as usize,
                strategy: f[1].to_string(),
                seed: int(f[2])?,
                record: StageRecord {
                    stage: int(f[3])? as usize,
                    targeted: int(f[4])? as usize,
                    responded: int(f[5])? as usize,
                    sample_size: int(f[6])? as usize,
                    sample_fraction: real(f[7])?,
                    kl: f[8..12].iter().map(|s| real(s)).collect::<Result<_>>()?,
                    ev: real(f[12])?,
                },
            })
        })
        .collect()
}

/// Score at the first stage whose sample fraction reaches `checkpoint`.
pub fn ev_at_checkpoint(records: &[StageRecord], checkpoint: f64) -> Option<f64> {
    records
        .iter()
        .find(|r| r.sample_fraction >= checkpoint)
        .map(|r| r.ev)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub strategy: String,
    pub fraction: f64,
    /// Runs that reached this checkpoint.
    pub replications: usize,
    pub mean_ev: f64,
    pub sd_ev: f64,
}

/// Mean and sample standard deviation of the printed (six-digit) scores per
/// strategy and checkpoint, so the result can be recomputed from the
/// trajectory CSV alone.
pub fn aggregate(
    rows: &[TrajectoryRow],
    strategies: &[String],
    fractions: &[f64],
) -> Vec<AggregateRow> {
    let mut out = Vec::new();
    for strategy in strategies {
        let mut runs: Vec<(usize, Vec<StageRecord>)> = Vec::new();
        for row in rows.iter().filter(|r| &r.strategy == strategy) {
            match runs.last_mut() {
                Some((id, recs)) if *id == row.run_id => recs.push(row.record.clone()),
                _ => runs.push((row.run_id, vec![row.record.clone()])),
            }
        }
        for &fraction in fractions {
            let evs: Vec<f64> = runs
                .iter()
                .filter_map(|(_, recs)| ev_at_checkpoint(recs, fraction))
                .map(round_sig6)
                .collect();
            let (mean_ev, sd_ev) = mean_sd(&evs);
            out.push(AggregateRow {
                strategy: strategy.clone(),
                fraction,
                replications: evs.len(),
                mean_ev,
                sd_ev,
            });
        }
    }
    out
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn write_aggregate_csv<W: Write>(mut w: W, rows: &[AggregateRow]) -> std::io::Result<()> {
    writeln!(w, "{AGGREGATE_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.strategy,
            sig6(r.fraction),
            r.replications,
            sig6(r.mean_ev),
            sig6(r.sd_ev)
        )?;
    }
    Ok(())
}

/// Smallest checkpoint where the random baseline's mean score is at most
/// the other strategy's.
#[derive(Clone, Debug, PartialEq)]
pub struct Crossover {
    pub strategy: String,
    pub baseline: String,
    pub fraction: Option<f64>,
}

pub fn crossovers(rows: &[AggregateRow], baseline: &str) -> Vec<Crossover> {
    let base: Vec<&AggregateRow> = rows.iter().filter(|r| r.strategy == baseline).collect();
    let mut names: Vec<&str> = Vec::new();
    for r in rows {
        if r.strategy != baseline && !names.contains(&r.strategy.as_str()) {
            names.push(&r.strategy);
        }
    }
    names
        .into_iter()
        .map(|name| {
            let fraction = rows
                .iter()
                .filter(|r| r.strategy == name)
                .find(|r| {
                    base.iter()
                        .find(|b| b.fraction == r.fraction)
                        .is_some_and(|b| b.mean_ev <= r.mean_ev)
                })
                .map(|r| r.fraction);
            Crossover {
                strategy: name.to_string(),
                baseline: baseline.to_string(),
                fraction,
            }
        })
        .collect()
}

pub fn write_crossover_csv<W: Write>(mut w: W, rows: &[Crossover]) -> std::io::Result<()> {
    writeln!(w, "strategy,baseline,crossover_fraction")?;
    for c in rows {
        let f = c.fraction.map_or_else(|| "none".to_string(), sig6);
        writeln!(w, "{},{},{}", c.strategy, c.baseline, f)?;
    }
    Ok(())
}

/// Gnuplot script with the aggregate series inlined.
pub fn plot_script(rows: &[AggregateRow]) -> String {
    let mut names: Vec<&str> = Vec::new();
    for r in rows {
        if !names.contains(&r.strategy.as_str()) {
            names.push(&r.strategy);
        }
    }
    let block = |name: &str| {
        format!(
            "${}",
            name.replace(|c: char| !c.is_ascii_alphanumeric(), "_")
        )
    };
    let mut s = String::new();
    s.push_str("# gnuplot -p plot.gp\n");
    s.push_str("set title 'EV vs sample fraction'\n");
    s.push_str("set xlabel 'sample fraction'\nset ylabel 'EV'\nset key top right\nset grid\n");
    for name in &names {
        s.push_str(&format!("{} << EOD\n", block(name)));
        for r in rows
            .iter()
            .filter(|r| r.strategy == *name && r.replications > 0)
        {
            s.push_str(&format!(
                "{} {} {}\n",
                sig6(r.fraction),
                sig6(r.mean_ev),
                sig6(r.sd_ev)
            ));
        }
        s.push_str("EOD\n");
    }
    let series: Vec<String> = names
        .iter()
        .map(|name| {
            format!(
                "{b} using 1:2:3 with yerrorlines title '{name}'",
                b = block(name)
            )
        })
        .collect();
    s.push_str(&format!("plot {}\n", series.join(", \\\n     ")));
    s
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub trajectories: Vec<TrajectoryRow>,
    pub aggregate: Vec<AggregateRow>,
    pub crossovers: Vec<Crossover>,
    pub trajectory_path: PathBuf,
    pub aggregate_path: PathBuf,
    pub crossover_path: PathBuf,
    pub plot_path: PathBuf,
}

/// Runs every strategy × replication and writes `trajectories.csv`,
/// `aggregate.csv`, `crossover.csv` and `plot.gp` into the output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let out = &config.out_dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let paths = [
        out.join("trajectories.csv"),
        out.join("aggregate.csv"),
        out.join("crossover.csv"),
        out.join("plot.gp"),
    ];
    // open everything up front so an unwritable directory fails before any run
    let mut files = paths
        .iter()
        .map(|p| {
            File::create(p)
                .map(BufWriter::new)
                .map_err(|e| Error::io(p, e))
        })
        .collect::<Result<Vec<_>>>()?;

    let graph = config.source.load()?;
    let profile = NetworkProfile::new(&graph, config.controller.bins)?;
    let rows = run_replications(&profile, config)?;
    let names: Vec<String> = config.strategies.iter().map(|s| s.to_string()).collect();
    let agg = aggregate(&rows, &names, &config.fractions);
    let cross = if names.iter().any(|n| n == "random") {
        crossovers(&agg, "random")
    } else {
        Vec::new()
    };

    let werr = |i: usize| {
        let p = paths[i].clone();
        move |e| Error::io(p, e)
    };
    write_trajectory_csv(&mut files[0], &rows).map_err(werr(0))?;
    write_aggregate_csv(&mut files[1], &agg).map_err(werr(1))?;
    write_crossover_csv(&mut files[2], &cross).map_err(werr(2))?;
    files[3]
        .write_all(plot_script(&agg).as_bytes())
        .map_err(werr(3))?;
    for (i, f) in files.iter_mut().enumerate() {
        f.flush().map_err(werr(i))?;
    }

    let [trajectory_path, aggregate_path, crossover_path, plot_path] = paths;
    Ok(ExperimentReport {
        trajectories: rows,
        aggregate: agg,
        crossovers: cross,
        trajectory_path,
        aggregate_path,
        crossover_path,
        plot_path,
    })
}

/// Controller settings for one replication: run until the largest
/// checkpoint fraction is reached.
pub fn replication_config(
    config: &ExperimentConfig,
    strategy: Strategy,
    seed: u64,
    n: usize,
) -> ControllerConfig {
    let max_fraction = config.fractions.last().copied().unwrap_or(1.0);
    let per_stage =
        config.controller.target_size as f64 * config.controller.response.rate.max(1e-3);
    let stages = (max_fraction * n as f64 / per_stage).ceil() as usize;
    ControllerConfig {
        strategy,
        seed,
        ev_opt: 0.0,
        // response noise can make extra stages necessary; stop_fraction ends the run
        max_stages: stages.saturating_mul(4).saturating_add(10),
        stop_fraction: Some(max_fraction),
        ..config.controller.clone()
    }
}

/// All runs of an experiment, ordered by strategy then replication.
pub fn run_replications(
    profile: &NetworkProfile,
    config: &ExperimentConfig,
) -> Result<Vec<TrajectoryRow>> {
    let tasks: Vec<(usize, Strategy, u64)> = config
        .strategies
        .iter()
        .enumerate()
        .flat_map(|(si, &s)| {
            (0..config.replications)
                .map(move |j| (si * config.replications + j, s, config.seed_base + j as u64))
        })
        .collect();
    let run = |&(run_id, strategy, seed): &(usize, Strategy, u64)| -> Result<Vec<TrajectoryRow>> {
        let cfg = replication_config(config, strategy, seed, profile.node_count());
        let result = run_mscs_on(profile, &cfg).map_err(|e| Error::Replication {
            strategy: strategy.to_string(),
            seed,
            message: e.to_string(),
        })?;
        Ok(result
            .records
            .into_iter()
            .map(|record| TrajectoryRow {
                run_id,
                strategy: strategy.to_string(),
                seed,
                record,
            })
            .collect())
    };
    #[cfg(feature = "parallel")]
    let results: Vec<Result<Vec<TrajectoryRow>>> = tasks.par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<Vec<TrajectoryRow>>> = tasks.iter().map(run).collect();

    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Names of the per-measure KL columns, in CSV order.
pub fn kl_columns() -> [String; 4] {
    Measure::ALL.map(|m| format!("kl_{m}"))
}
