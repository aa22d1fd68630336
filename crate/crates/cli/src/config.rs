//! Command-line grammar and validated run configuration.

use std::ffi::OsString;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use distkern::datagen::{Marginal, Scenario, ScenarioSpec};
use distkern::kernels::parse_kernel_list;
use distkern::testing::{QFORM_MAX_ALPHA, DEFAULT_NUM_DRAWS, DEFAULT_NUM_PERMS};
use distkern::{KernelSpec, NullSpec};

use crate::error::{usage, CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "distkern", version, about = "Energy distance, dCov, MMD and HSIC tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test whether two CSV samples come from the same distribution.
    Twosample {
        #[command(flatten)]
        test: TestArgs,
        /// First sample (rows are observations).
        z: PathBuf,
        /// Second sample.
        w: PathBuf,
    },
    /// Test whether the two column blocks of a CSV sample are independent.
    Independence {
        #[command(flatten)]
        test: TestArgs,
        /// First column of the y block (default: half the columns).
        #[arg(long)]
        split: Option<usize>,
        input: PathBuf,
    },
    /// Rejection rates over seeded synthetic trials, written as CSV.
    Benchmark {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Kernel specs, comma separated.
        #[arg(long, default_value = "dist:q=1")]
        kernel: String,
        /// Null calibrations, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "spectral")]
        null: Vec<NullKind>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        calib: CalibArgs,
        #[arg(long)]
        seed: Option<u64>,
        /// Report path (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic sample as CSV.
    Gen {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; two-sample scenarios write OUT_z.csv and OUT_w.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct TestArgs {
    /// Kernel spec; independence accepts one (shared) or two (x, y).
    #[arg(long, default_value = "dist:q=1")]
    kernel: String,
    #[arg(long, value_enum, default_value = "spectral")]
    null: NullKind,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[command(flatten)]
    calib: CalibArgs,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct CalibArgs {
    /// Permutations for the permutation null.
    #[arg(long, default_value_t = DEFAULT_NUM_PERMS)]
    perms: usize,
    /// Monte Carlo draws for the spectral null.
    #[arg(long, default_value_t = DEFAULT_NUM_DRAWS)]
    draws: usize,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    #[arg(long, value_enum)]
    scenario: ScenarioKind,
    /// Mean shifts (mean).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    delta: Vec<f64>,
    /// Variance ratios (var).
    #[arg(long = "var-ratio", value_delimiter = ',')]
    var_ratio: Vec<f64>,
    /// Perturbation frequencies (sine).
    #[arg(long, value_delimiter = ',')]
    freq: Vec<f64>,
    /// Rotation angles in radians (rotation).
    #[arg(long, value_delimiter = ',')]
    angle: Vec<f64>,
    /// Dependence frequencies (sine-dep).
    #[arg(long, value_delimiter = ',')]
    l: Vec<u32>,
    /// Dimension (mean, var).
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Sample size.
    #[arg(long, default_value_t = 100)]
    m: usize,
    /// Gaussian noise dimensions added to each block (rotation).
    #[arg(long = "extra-dims", default_value_t = 1)]
    extra_dims: usize,
    #[arg(long, value_enum, default_value = "uniform")]
    marginal: MarginalKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NullKind {
    Spectral,
    Permutation,
    Qform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScenarioKind {
    Mean,
    Var,
    Sine,
    Rotation,
    SineDep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MarginalKind {
    Uniform,
    ExpSymmetric,
}

/// A fully validated invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub job: Job,
    pub seed: u64,
    /// False when the seed was generated rather than passed.
    pub seed_given: bool,
}

#[derive(Debug, Clone)]
pub enum Job {
    TwoSample {
        test: SingleTest,
        z: PathBuf,
        w: PathBuf,
    },
    Independence {
        test: SingleTest,
        split: Option<usize>,
        input: PathBuf,
    },
    Benchmark(BenchmarkConfig),
    Gen { scenario: ScenarioSpec, out: Option<PathBuf> },
}

#[derive(Debug, Clone)]
pub struct SingleTest {
    pub kernel_text: String,
    pub kernels: Vec<KernelSpec<f64>>,
    pub null: NullSpec,
}

#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    /// One scenario per value of the difficulty parameter.
    pub scenarios: Vec<ScenarioSpec>,
    pub kernels: Vec<KernelSpec<f64>>,
    pub nulls: Vec<NullSpec>,
    pub trials: usize,
    pub out: Option<PathBuf>,
}

impl BenchmarkConfig {
    /// Number of (parameter, kernel, null) cells in the sweep.
    pub fn cells(&self) -> usize {
        self.scenarios.len() * self.kernels.len() * self.nulls.len()
    }
}

/// Parses and validates a command line (`argv[0]` is the program name).
pub fn parse_args<I, A>(argv: I) -> CliResult<RunConfig>
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    match cli.command {
        Command::Twosample { test, z, w } => {
            let (test, seed) = single_test(test, 1)?;
            require_file(&z)?;
            require_file(&w)?;
            Ok(config(Job::TwoSample { test, z, w }, seed))
        }
        Command::Independence {
            test,
            split,
            input,
        } => {
            let (test, seed) = single_test(test, 2)?;
            if split == Some(0) {
                return usage("--split must be at least 1");
            }
            require_file(&input)?;
            Ok(config(Job::Independence { test, split, input }, seed))
        }
        Command::Benchmark {
            scenario,
            kernel,
            null,
            alpha,
            trials,
            calib,
            seed,
            out,
        } => {
            let kernels = kernels(&kernel)?;
            if null.is_empty() {
                return usage("--null needs at least one method");
            }
            let nulls = null
                .iter()
                .map(|&kind| null_spec(kind, alpha, &calib))
                .collect::<CliResult<Vec<_>>>()?;
            if trials == 0 {
                return usage("--trials must be at least 1");
            }
            let scenarios = scenarios(&scenario)?;
            Ok(config(
                Job::Benchmark(BenchmarkConfig {
                    scenarios,
                    kernels,
                    nulls,
                    trials,
                    out,
                }),
                seed,
            ))
        }
        Command::Gen {
            scenario,
            seed,
            out,
        } => {
            let mut list = scenarios(&scenario)?;
            if list.len() != 1 {
                return usage("gen takes a single value of the scenario parameter");
            }
            let scenario = list.remove(0);
            if scenario.family.is_two_sample() && out.is_none() {
                return usage("two-sample scenarios need --out PREFIX (writes PREFIX_z.csv and PREFIX_w.csv)");
            }
            Ok(config(Job::Gen { scenario, out }, seed))
        }
    }
}

fn config(job: Job, seed: Option<u64>) -> RunConfig {
    RunConfig {
        job,
        seed: seed.unwrap_or_else(fresh_seed),
        seed_given: seed.is_some(),
    }
}

fn fresh_seed() -> u64 {
    use std::hash::{BuildHasher, Hasher};
    let mut h = std::collections::hash_map::RandomState::new().build_hasher();
    h.write_u128(
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_nanos()),
    );
    h.write_u32(std::process::id());
    h.finish()
}

fn single_test(args: TestArgs, max_kernels: usize) -> CliResult<(SingleTest, Option<u64>)> {
    let kernels = kernels(&args.kernel)?;
    if kernels.len() > max_kernels {
        return usage(format!(
            "--kernel takes at most {max_kernels} spec(s) here, got {}",
            kernels.len()
        ));
    }
    let null = null_spec(args.null, args.alpha, &args.calib)?;
    Ok((
        SingleTest {
            kernel_text: args.kernel.trim().to_string(),
            kernels,
            null,
        },
        args.seed,
    ))
}

fn kernels(text: &str) -> CliResult<Vec<KernelSpec<f64>>> {
    parse_kernel_list(text).map_err(|e| CliError::Usage(format!("--kernel: {e}")))
}

fn null_spec(kind: NullKind, alpha: f64, calib: &CalibArgs) -> CliResult<NullSpec> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return usage(format!("--alpha must lie in (0, 1), got {alpha}"));
    }
    if kind == NullKind::Qform && alpha > QFORM_MAX_ALPHA {
        return usage(format!(
            "--alpha {alpha} is above {QFORM_MAX_ALPHA}: the quadratic-form bound is only valid for 0 < alpha <= {QFORM_MAX_ALPHA}"
        ));
    }
    let spec = match kind {
        NullKind::Spectral => NullSpec::spectral(alpha).with_draws(calib.draws),
        NullKind::Permutation => NullSpec::permutation(alpha).with_perms(calib.perms),
        NullKind::Qform => NullSpec::qform(alpha),
    };
    spec.validate()
        .map_err(|e| CliError::Usage(format!("--null {}: {e}", spec.method.name())))?;
    Ok(spec)
}

fn scenarios(a: &ScenarioArgs) -> CliResult<Vec<ScenarioSpec>> {
    let or = |v: &[f64], default: f64| if v.is_empty() { vec![default] } else { v.to_vec() };
    let families: Vec<Scenario> = match a.scenario {
        ScenarioKind::Mean => or(&a.delta, 0.0)
            .into_iter()
            .map(|delta| Scenario::MeanShift { dim: a.d, delta })
            .collect(),
        ScenarioKind::Var => or(&a.var_ratio, 1.0)
            .into_iter()
            .map(|var_ratio| Scenario::VarShift { dim: a.d, var_ratio })
            .collect(),
        ScenarioKind::Sine => or(&a.freq, 0.0)
            .into_iter()
            .map(|freq| Scenario::SinePerturb { freq })
            .collect(),
        ScenarioKind::Rotation => or(&a.angle, 0.0)
            .into_iter()
            .map(|angle| Scenario::RotatedPair {
                angle,
                extra_dims: a.extra_dims,
                marginal: match a.marginal {
                    MarginalKind::Uniform => Marginal::Uniform,
                    MarginalKind::ExpSymmetric => Marginal::ExpSymmetric,
                },
            })
            .collect(),
        ScenarioKind::SineDep => {
            let l = if a.l.is_empty() { vec![1] } else { a.l.clone() };
            l.into_iter()
                .map(|freq| Scenario::SineDependence { freq })
                .collect()
        }
    };
    families
        .into_iter()
        .map(|family| {
            let spec = ScenarioSpec::new(family, a.m);
            spec.validate().map_err(|e| {
                let hint = if matches!(family, Scenario::RotatedPair { .. }) {
                    format!(" (angles are radians in [0, {:.6}])", PI / 4.0)
                } else {
                    String::new()
                };
                CliError::Usage(format!("--scenario {}: {e}{hint}", family.name()))
            })?;
            Ok(spec)
        })
        .collect()
}

fn require_file(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        usage(format!("input file '{}' does not exist", path.display()))
    }
}
