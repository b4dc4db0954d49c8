//! The `mscs` command line: graph statistics, graph generation, single
//! sampling runs and full experiments.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use mscs_core::experiment::{
    parse_experiment_config, run_experiment, write_trajectory_csv, GraphSource, TrajectoryRow,
};
use mscs_core::*;

#[derive(Parser, Debug)]
#[command(name = "mscs", version, about = "Adaptive network sampling simulator")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print summary statistics of an edge list.
    Stats {
        edgelist: PathBuf,
        /// Histogram bins for --distributions.
        #[arg(long, default_value_t = 20)]
        bins: usize,
        /// Also write the normalized measure distributions to this CSV.
        #[arg(long, value_name = "CSV")]
        distributions: Option<PathBuf>,
    },
    /// Generate a synthetic graph and write it as an edge list.
    Generate {
        /// e.g. pa:n=10000,m=5,rho=0.75 or uniform:n=1000,p=0.01
        spec: GeneratorSpec,
        /// Overrides the seed given in the spec.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Run one multistage sampling simulation.
    Sample(SampleArgs),
    /// Run a strategy comparison described by a config file.
    Experiment {
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(
        long,
        conflicts_with = "generate",
        required_unless_present = "generate"
    )]
    graph: Option<PathBuf>,
    #[arg(long)]
    generate: Option<GeneratorSpec>,
    #[arg(long, default_value = "kbins")]
    strategy: Strategy,
    #[arg(long, default_value = "random")]
    initial: Strategy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Base response probability.
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    /// Degree bias exponent of the response model.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long, value_delimiter = ',', default_value = "1,1,1,1")]
    weights: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    bins: usize,
    #[arg(long, default_value_t = 20)]
    kbins: usize,
    /// border, stride or random
    #[arg(long, default_value = "stride")]
    within_bin: WithinBin,
    /// stage or cumulative
    #[arg(long, default_value = "cumulative")]
    kbins_quota: QuotaBasis,
    #[arg(long, default_value_t = 10)]
    target_size: usize,
    #[arg(long, default_value_t = 0.0)]
    ev_opt: f64,
    #[arg(long, default_value_t = 100)]
    max_stages: usize,
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "reference-first")]
    kl_direction: Direction,
    /// Greedily prune the final sample down to no fewer than this many nodes.
    #[arg(long, value_name = "MIN_SIZE")]
    prune: Option<usize>,
    /// Write trajectory.csv and sample.txt here instead of printing the trajectory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum Direction {
    ReferenceFirst,
    SampleFirst,
}

impl From<Direction> for KlDirection {
    fn from(d: Direction) -> Self {
        match d {
            Direction::ReferenceFirst => KlDirection::ReferenceFirst,
            Direction::SampleFirst => KlDirection::SampleFirst,
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// status: 0 on success, 1 on usage errors, 2 on runtime errors.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    1
                }
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match command {
        Command::Stats {
            edgelist,
            bins,
            distributions,
        } => stats(&edgelist, bins, distributions.as_deref(), stdout),
        Command::Generate { spec, seed, out } => generate(spec, seed, &out, stdout),
        Command::Sample(args) => sample(args, stdout, stderr),
        Command::Experiment { config, out } => experiment(&config, out, stdout),
    }
}

fn out_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn stats(
    path: &Path,
    bins: usize,
    distributions: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<()> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let report = load_edge_list(&text)?;
    writeln!(stdout, "{}", summary_stats(&report.graph)).map_err(out_err)?;
    if report.duplicates + report.self_loops > 0 {
        writeln!(
            stdout,
            "skipped {} duplicate edges and {} self-loops",
            report.duplicates, report.self_loops
        )
        .map_err(out_err)?;
    }
    if let Some(csv) = distributions {
        let profile = NetworkProfile::new(&report.graph, bins)?;
        let pairs: Vec<(Measure, &Distribution)> = Measure::ALL
            .iter()
            .copied()
            .zip(profile.reference())
            .collect();
        let mut w = create(csv)?;
        mscs_core::distribution::write_distributions_csv(&mut w, &pairs)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(csv, e))?;
    }
    Ok(())
}

fn generate(
    mut spec: GeneratorSpec,
    seed: Option<u64>,
    out: &Path,
    stdout: &mut dyn Write,
) -> Result<()> {
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let g = spec.generate()?;
    let mut w = create(out)?;
    g.write_edge_list(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(out, e))?;
    writeln!(
        stdout,
        "{spec}: {} nodes, {} edges -> {}",
        g.node_count(),
        g.edge_count(),
        out.display()
    )
    .map_err(out_err)
}

fn sample(args: SampleArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let source = match (args.graph, args.generate) {
        (Some(path), _) => GraphSource::File(path),
        (None, Some(spec)) => GraphSource::Generate(spec),
        (None, None) => return Err(Error::config("give --graph or --generate")),
    };
    let config = ControllerConfig {
        ev_opt: args.ev_opt,
        max_stages: args.max_stages,
        target_size: args.target_size,
        strategy: args.strategy,
        initial: args.initial,
        weights: args.weights,
        bins: args.bins,
        kbins: KBinsMode {
            k: args.kbins,
            within: args.within_bin,
            basis: args.kbins_quota,
        },
        epsilon: args.epsilon,
        direction: args.kl_direction.into(),
        response: ResponseModel {
            rate: args.rate,
            bias_exponent: args.beta,
        },
        seed: args.seed,
        ..Default::default()
    };
    config.validate()?;
    let graph = source.load()?;
    let profile = NetworkProfile::new(&graph, config.bins)?;
    let run = run_mscs_on(&profile, &config)?;
    let rows: Vec<TrajectoryRow> = run
        .records
        .into_iter()
        .map(|record| TrajectoryRow {
            run_id: 0,
            strategy: config.strategy.to_string(),
            seed: config.seed,
            record,
        })
        .collect();

    let mut state = run.state;
    if let Some(min_size) = args.prune {
        let before = (state.surveyed.len(), state.last_evaluation.ev);
        state = prune_sample(state, &profile, &config, min_size)?;
        writeln!(
            stderr,
            "pruned {} -> {} nodes, ev {} -> {}",
            before.0,
            state.surveyed.len(),
            mscs_core::numfmt::sig6(before.1),
            mscs_core::numfmt::sig6(state.last_evaluation.ev)
        )
        .map_err(out_err)?;
    }

    match args.out {
        Some(dir) => {
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            let path = dir.join("trajectory.csv");
            let mut w = create(&path)?;
            write_trajectory_csv(&mut w, &rows)
                .and_then(|_| w.flush())
                .map_err(|e| Error::io(&path, e))?;
            let path = dir.join("sample.txt");
            let mut w = create(&path)?;
            state
                .surveyed
                .iter()
                .try_for_each(|id| writeln!(w, "{id}"))
                .and_then(|_| w.flush())
                .map_err(|e| Error::io(&path, e))?;
            writeln!(
                stdout,
                "{} stages, {} nodes surveyed, final ev {}, written to {}",
                rows.len(),
                state.surveyed.len(),
                mscs_core::numfmt::sig6(state.last_evaluation.ev),
                dir.display()
            )
            .map_err(out_err)
        }
        None => write_trajectory_csv(stdout, &rows).map_err(out_err),
    }
}

fn experiment(path: &Path, out: Option<PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut config = parse_experiment_config(&text, base)?;
    if let Some(out) = out {
        config.out_dir = out;
    }
    let report = run_experiment(&config)?;
    for c in &report.crossovers {
        let at = c
            .fraction
            .map_or("none".to_string(), mscs_core::numfmt::sig6);
        writeln!(stdout, "crossover {} vs {}: {at}", c.strategy, c.baseline).map_err(out_err)?;
    }
    for p in [
        &report.trajectory_path,
        &report.aggregate_path,
        &report.crossover_path,
        &report.plot_path,
    ] {
        writeln!(stdout, "wrote {}", p.display()).map_err(out_err)?;
    }
    Ok(())
}
