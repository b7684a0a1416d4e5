use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ylab::cli::{run_experiment, Experiment, ExperimentConfig, ProbeSpec, TheoremConfig};
use ylab::data::DataSpec;
use ylab::solver::SolverConfig;
use ylab::{Error, Result};

#[derive(Parser)]
#[command(name = "ylab", version, about = "2D Euler experiments with bounded, non-Lipschitz vorticity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DataArg {
    Theorem,
    BahouriChemin,
    H1Log,
    TaylorGreen,
}

#[derive(clap::Args)]
struct Common {
    /// TOML experiment file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, short)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form toy flow: trajectories, cusps and its regularity index.
    Toy(Common),
    /// Shear-flow W^{1,p} classification.
    Shear(Common),
    /// Evolve initial vorticity and save the run directory.
    EulerRun {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        data: Option<DataArg>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Probe stored snapshots.
    Diagnose {
        #[command(flatten)]
        common: Common,
        /// Snapshot files; replaces the configured list.
        #[arg(long = "snapshot")]
        snapshots: Vec<PathBuf>,
    },
    /// Measured regularity index of the evolved theorem data.
    Theorem {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
    },
}

fn base(common: &Common, experiment: Experiment) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path)?;
            if cfg.experiment != experiment {
                return Err(Error::Config(format!(
                    "{} describes a {:?} experiment",
                    path.display(),
                    cfg.experiment
                )));
            }
            cfg
        }
        None => ExperimentConfig::new(experiment, "out"),
    };
    if let Some(o) = &common.output_dir {
        cfg.output_dir = o.clone();
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn build(command: Command) -> Result<ExperimentConfig> {
    match command {
        Command::Toy(c) => base(&c, Experiment::Toy),
        Command::Shear(c) => base(&c, Experiment::Shear),
        Command::EulerRun { common, data, beta, n, dt, t_end } => {
            let mut cfg = base(&common, Experiment::Euler)?;
            let mut spec = match data {
                Some(DataArg::Theorem) => DataSpec::theorem(0.25),
                Some(DataArg::BahouriChemin) => DataSpec::bahouri_chemin(),
                Some(DataArg::H1Log) => DataSpec::h1_log(1.0),
                Some(DataArg::TaylorGreen) => DataSpec::taylor_green(),
                None => cfg.data.clone().unwrap_or_else(|| DataSpec::theorem(0.25)),
            };
            if let Some(b) = beta {
                spec.beta = b;
            }
            cfg.data = Some(spec);
            let mut solver = cfg.solver.clone().unwrap_or_else(|| SolverConfig::new(256, 0.01, 0.25));
            solver.n = n.unwrap_or(solver.n);
            solver.dt = dt.unwrap_or(solver.dt);
            solver.t_end = t_end.unwrap_or(solver.t_end);
            cfg.solver = Some(solver);
            Ok(cfg)
        }
        Command::Diagnose { common, snapshots } => {
            let mut cfg = base(&common, Experiment::Diagnose)?;
            if !snapshots.is_empty() {
                cfg.snapshots = snapshots;
            }
            if common.config.is_none() {
                cfg.diagnostics = vec![
                    ProbeSpec::KeyIntegral { points: vec![[0.05, 0.05], [0.1, 0.2]], random: 0 },
                    ProbeSpec::Sobolev { exponents: vec![1.0, 1.5, 2.0] },
                ];
            }
            Ok(cfg)
        }
        Command::Theorem { common, beta, n_list, t_end, dt } => {
            let mut cfg = base(&common, Experiment::Theorem)?;
            let mut th = cfg.theorem.clone().unwrap_or_else(TheoremConfig::default);
            th.beta = beta.unwrap_or(th.beta);
            th.n_list = n_list.unwrap_or(th.n_list);
            th.t_end = t_end.unwrap_or(th.t_end);
            th.dt = dt.unwrap_or(th.dt);
            cfg.theorem = Some(th);
            Ok(cfg)
        }
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("YLAB_THREADS") {
        let k: usize = v
            .parse()
            .map_err(|_| Error::Config(format!("YLAB_THREADS must be a positive integer, got {v:?}")))?;
        if k == 0 {
            return Err(Error::Config("YLAB_THREADS must be positive".into()));
        }
        // the pool may already exist when embedded; that is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| build(cli.command)).and_then(|cfg| run_experiment(&cfg));
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
