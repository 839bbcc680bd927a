use std::path::{Path, PathBuf};
use std::process::ExitCode;

use carnot_lab::config::{ExperimentConfig, Operation};
use carnot_lab::output::{output_dir, Artifacts};
use carnot_lab::runner::{run, Outcome};
use carnot_lab::suite::{run_suite, SUITES};
use clap::{Args, CommandFactory, Parser, Subcommand};
use rayon::prelude::*;

/// Packing pre-measures, energies and inequality checks on Carnot groups.
///
/// Exit status: 0 on success, 2 when an inequality check fails, 1 on errors.
/// Artifacts go to --out, else the config's output.dir, else $CARNOT_LAB_OUT,
/// else ./out.
#[derive(Parser, Debug)]
#[command(name = "carnot-lab", version)]
struct Cli {
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also print each JSON verdict to stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Packing dimension from a dyadic sweep of ball counts.
    Dimension(ExperimentArgs),
    /// Packing pre-measure sweep, checked against closed-form bounds.
    Premeasure(ExperimentArgs),
    /// Covering values of a curve.
    Cover(ExperimentArgs),
    /// Packing energy of a map at one exponent.
    Energy(ExperimentArgs),
    /// Exponent at which the energy scaling crosses zero.
    EnergyDim(ExperimentArgs),
    /// Coarea inequality for a real-valued map.
    Coarea(ExperimentArgs),
    /// Modulus lower bound for a family of horizontal segments.
    Modulus(ExperimentArgs),
    /// Hoelder covariance of packing pre-measures.
    Holder(ExperimentArgs),
    /// Transport of packings by a quasisymmetric map.
    Qs(ExperimentArgs),
    /// Quasiconformal-submersion profile of a real-valued map.
    QcCheck(ExperimentArgs),
    /// Jacobian of a homomorphism and the energy bound it gives.
    Jacobian(ExperimentArgs),
    /// Hoelder exponent and curvature pinching bounds.
    Bound(BoundArgs),
    /// Empirical doubling multiplicity N(ell).
    Doubling(ExperimentArgs),
    /// Named battery: examples, inequalities or all.
    Suite(SuiteArgs),
    /// Runs experiments from TOML configuration files.
    Run(RunArgs),
}

/// Flags mirroring the fields of an experiment configuration.
#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Group name: heis<m> or euclid<n>.
    #[arg(long, default_value = "heis1")]
    group: String,
    /// Region, e.g. vertical-segment:h=1 or box:sides=1/1/0.25.
    #[arg(long)]
    region: Option<String>,
    /// Map, e.g. coord:x, quotient-yz, hom:euclid1:1/0/0, dist:0/0:coord:y.
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    /// Comma-separated exponents for energy-dim.
    #[arg(long, value_delimiter = ',')]
    p_grid: Option<Vec<f64>>,
    /// Number of color classes N.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    ell: Option<f64>,
    /// a..b for meshes 2^-a..2^-b, or a comma-separated list.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    resolution: Option<usize>,
    /// radius or scaled:<k>.
    #[arg(long)]
    gauge: Option<String>,
    #[arg(long)]
    source_group: Option<String>,
    #[arg(long)]
    source_region: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Hoelder constant C.
    #[arg(long)]
    constant: Option<f64>,
    /// dilation:<lambda>, translation:<a/b/c> or radial-power:<s>.
    #[arg(long)]
    qs_map: Option<String>,
    #[arg(long)]
    ell_target: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    /// Segment length of the modulus family.
    #[arg(long)]
    length: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    lower: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    upper: Option<Vec<f64>>,
    #[arg(long)]
    per_axis: Option<usize>,
    /// File stem for the artifacts.
    #[arg(long)]
    stem: Option<String>,
    /// Write the effective configuration to this path as well.
    #[arg(long)]
    save_config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundArgs {
    /// Topological dimension of the source.
    #[arg(long)]
    n: i64,
    /// Homogeneous dimension of the target.
    #[arg(long = "Q")]
    q: i64,
    /// Dimension of the fibers.
    #[arg(long, default_value_t = 1)]
    fiber: i64,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    name: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 picks the number of cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(required = true)]
    configs: Vec<PathBuf>,
    /// Worker threads (0 picks the number of cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl ExperimentArgs {
    fn config(self, op: Operation) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(op, &self.group);
        c.region = self.region;
        c.map = self.map;
        let p = &mut c.params;
        p.p = self.p;
        p.p_grid = self.p_grid;
        p.n = self.n;
        p.ell = self.ell;
        p.sweep = self.sweep;
        p.epsilon = self.epsilon;
        p.seed = self.seed;
        p.resolution = self.resolution;
        p.gauge = self.gauge;
        p.source_group = self.source_group;
        p.source_region = self.source_region;
        p.alpha = self.alpha;
        p.constant = self.constant;
        p.qs_map = self.qs_map;
        p.ell_target = self.ell_target;
        p.lambdas = self.lambdas;
        p.length = self.length;
        p.lower = self.lower;
        p.upper = self.upper;
        p.per_axis = self.per_axis;
        c.output.stem = self.stem;
        c
    }
}

const EXIT_FAILED_CHECK: u8 = 2;

fn emit(artifacts: &Artifacts, dir: &Path, json: bool) -> carnot_lab::Result<()> {
    for path in artifacts.write(dir)? {
        println!("wrote {}", path.display());
    }
    if json {
        print!("{}", artifacts.json);
    }
    Ok(())
}

fn report(outcome: &Outcome, dir: &Path, json: bool) -> carnot_lab::Result<u8> {
    for line in &outcome.summary {
        println!("{line}");
    }
    emit(&outcome.artifacts, dir, json)?;
    Ok(match outcome.holds {
        Some(false) => {
            println!("{}: inequality check failed", outcome.operation.name());
            EXIT_FAILED_CHECK
        }
        _ => 0,
    })
}

fn run_one(cfg: &ExperimentConfig, out: Option<&Path>, json: bool) -> carnot_lab::Result<u8> {
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| output_dir(cfg.output.dir.as_deref()));
    report(&run(cfg)?, &dir, json)
}

fn pool(threads: usize) -> carnot_lab::Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| carnot_lab::Error::Io(e.to_string()))
}

fn execute(cli: Cli) -> carnot_lab::Result<u8> {
    let out = cli.out.as_deref();
    let op = |args: ExperimentArgs, op: Operation| -> carnot_lab::Result<u8> {
        let save = args.save_config.clone();
        let cfg = args.config(op);
        if let Some(path) = save {
            std::fs::write(path, cfg.to_toml())?;
        }
        run_one(&cfg, out, cli.json)
    };
    match cli.command {
        Command::Dimension(a) => op(a, Operation::Dimension),
        Command::Premeasure(a) => op(a, Operation::Premeasure),
        Command::Cover(a) => op(a, Operation::Cover),
        Command::Energy(a) => op(a, Operation::Energy),
        Command::EnergyDim(a) => op(a, Operation::EnergyDim),
        Command::Coarea(a) => op(a, Operation::Coarea),
        Command::Modulus(a) => op(a, Operation::Modulus),
        Command::Holder(a) => op(a, Operation::Holder),
        Command::Qs(a) => op(a, Operation::Qs),
        Command::QcCheck(a) => op(a, Operation::QcCheck),
        Command::Jacobian(a) => op(a, Operation::Jacobian),
        Command::Doubling(a) => op(a, Operation::Doubling),
        Command::Bound(b) => {
            let mut cfg = ExperimentConfig::new(Operation::Bound, "heis1");
            cfg.params.topological_dim = Some(b.n);
            cfg.params.homogeneous_dim = Some(b.q);
            cfg.params.fiber_dim = Some(b.fiber);
            run_one(&cfg, out, cli.json)
        }
        Command::Suite(s) => {
            if !SUITES.contains(&s.name.as_str()) {
                let mut cmd = Cli::command();
                cmd.build();
                let usage = cmd.find_subcommand_mut("suite").map(|c| c.render_usage().to_string()).unwrap_or_default();
                eprintln!("error: unknown suite `{}`; expected one of {}\n\n{usage}", s.name, SUITES.join(", "));
                return Ok(1);
            }
            let report = run_suite(&s.name, s.seed, s.threads)?;
            print!("{}", report.table());
            let dir = out.map(Path::to_path_buf).unwrap_or_else(|| output_dir(None));
            for a in &report.artifacts {
                emit(a, &dir, false)?;
            }
            if cli.json {
                if let Some(summary) = report.artifacts.last() {
                    print!("{}", summary.json);
                }
            }
            Ok(if report.pass() { 0 } else { EXIT_FAILED_CHECK })
        }
        Command::Run(r) => {
            let configs: Vec<ExperimentConfig> = r.configs.iter().map(|p| ExperimentConfig::load(p)).collect::<Result<_, _>>()?;
            let outcomes: Vec<carnot_lab::Result<Outcome>> = pool(r.threads)?.install(|| configs.par_iter().map(run).collect());
            let (mut failed, mut errored) = (false, false);
            for (cfg, outcome) in configs.iter().zip(outcomes) {
                let dir = out.map(Path::to_path_buf).unwrap_or_else(|| output_dir(cfg.output.dir.as_deref()));
                match outcome {
                    Ok(o) => failed |= report(&o, &dir, cli.json)? != 0,
                    Err(e) => {
                        eprintln!("error: {e}");
                        errored = true;
                    }
                }
            }
            Ok(if errored { 1 } else if failed { EXIT_FAILED_CHECK } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
