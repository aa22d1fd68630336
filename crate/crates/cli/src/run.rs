//! Executes a validated [`RunConfig`].

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use distkern::datagen::{gen_dependence, gen_two_sample, ScenarioSpec};
use distkern::testing::{independence_test, two_sample_test};
use distkern::{KernelSpec, NullSpec, PairedSample, RngSpec, SampleMatrix, TestResult};
use serde::Serialize;

use crate::config::{BenchmarkConfig, Job, RunConfig, SingleTest};
use crate::data::{column_names, load_csv, sample_rows, write_csv, Loaded};
use crate::error::{usage, CliResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_REJECT: i32 = 2;

/// JSON result of a single test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub statistic: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    pub reject: bool,
    pub method: String,
    pub kernel: String,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
}

/// One row of the benchmark CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub scenario: String,
    pub parameter: f64,
    pub kernel: String,
    pub null: String,
    pub trials: usize,
    pub rejections: usize,
    pub rejection_rate: f64,
    pub mean_statistic: f64,
    pub wall_time_s: f64,
}

/// Runs `config`, writing results to `out` and notes to `err`, and returns
/// the process exit code.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let rng = RngSpec::from_seed(config.seed);
    match &config.job {
        Job::TwoSample { test, z, w } => {
            let z = load_csv(z, None)?.into_sample();
            let w = load_csv(w, None)?.into_sample();
            let result = two_sample_test(&test.kernels[0], &z, &w, &test.null, rng)?;
            emit(out, report(&result, test, config.seed, z.rows(), w.rows()))
        }
        Job::Independence { test, split, input } => {
            let sample = paired(input, *split)?;
            let (kx, ky) = match test.kernels.as_slice() {
                [k] => (k, k),
                [kx, ky] => (kx, ky),
                _ => unreachable!("kernel count is validated"),
            };
            let result = independence_test(kx, ky, &sample, &test.null, rng)?;
            let m = sample.len();
            emit(out, report(&result, test, config.seed, m, m))
        }
        Job::Benchmark(bench) => {
            echo_seed(config, err)?;
            let rows = benchmark(bench, rng)?;
            match &bench.out {
                Some(path) => write_report(BufWriter::new(File::create(path)?), &rows)?,
                None => write_report(&mut *out, &rows)?,
            }
            Ok(EXIT_OK)
        }
        Job::Gen { scenario, out: path } => {
            echo_seed(config, err)?;
            generate(scenario, rng, path.as_deref(), out)?;
            Ok(EXIT_OK)
        }
    }
}

fn echo_seed(config: &RunConfig, err: &mut dyn Write) -> CliResult<()> {
    if !config.seed_given {
        writeln!(err, "seed: {}", config.seed)?;
    }
    Ok(())
}

fn paired(path: &Path, split: Option<usize>) -> CliResult<PairedSample<f64>> {
    let joint = load_csv(path, None)?.into_sample();
    if joint.dim() < 2 {
        return usage(format!(
            "'{}' has one column; independence needs an x block and a y block",
            path.display()
        ));
    }
    let split = split.unwrap_or(joint.dim() / 2);
    match load_csv(path, Some(split))? {
        Loaded::Paired(p) => Ok(p),
        Loaded::Sample(_) => unreachable!("split was given"),
    }
}

fn report(r: &TestResult<f64>, test: &SingleTest, seed: u64, m: usize, n: usize) -> TestReport {
    TestReport {
        statistic: r.statistic,
        threshold: r.threshold,
        p_value: r.p_value,
        reject: r.reject,
        method: test.null.method.name().to_string(),
        kernel: test.kernel_text.clone(),
        seed,
        m,
        n,
    }
}

fn emit(out: &mut dyn Write, report: TestReport) -> CliResult<i32> {
    serde_json::to_writer(&mut *out, &report)?;
    writeln!(out)?;
    Ok(if report.reject { EXIT_REJECT } else { EXIT_OK })
}

struct Cell {
    rejections: usize,
    statistic_sum: f64,
    elapsed: Duration,
}

enum Trial {
    TwoSample(SampleMatrix<f64>, SampleMatrix<f64>),
    Paired(PairedSample<f64>),
}

fn run_trial(data: &Trial, k: &KernelSpec<f64>, null: &NullSpec, rng: RngSpec) -> CliResult<TestResult<f64>> {
    Ok(match data {
        Trial::TwoSample(z, w) => two_sample_test(k, z, w, null, rng)?,
        Trial::Paired(s) => independence_test(k, k, s, null, rng)?,
    })
}

/// Runs every (parameter, kernel, null) cell. Trial `t` at parameter `p`
/// draws its data from substream `(p, t)`, shared by all kernels and nulls.
pub fn benchmark(config: &BenchmarkConfig, rng: RngSpec) -> CliResult<Vec<BenchmarkRow>> {
    let mut rows = Vec::with_capacity(config.cells());
    for (p, scenario) in config.scenarios.iter().enumerate() {
        let mut cells: Vec<Cell> = (0..config.kernels.len() * config.nulls.len())
            .map(|_| Cell {
                rejections: 0,
                statistic_sum: 0.0,
                elapsed: Duration::ZERO,
            })
            .collect();
        for t in 0..config.trials {
            let data_rng = rng.substream(p as u64).substream(t as u64);
            let test_rng = data_rng.substream(1);
            let data = if scenario.family.is_two_sample() {
                let (z, w) = gen_two_sample(scenario, data_rng)?;
                Trial::TwoSample(z, w)
            } else {
                Trial::Paired(gen_dependence(scenario, data_rng)?)
            };
            for (ki, k) in config.kernels.iter().enumerate() {
                for (ni, null) in config.nulls.iter().enumerate() {
                    let start = Instant::now();
                    let result = run_trial(&data, k, null, test_rng)?;
                    let cell = &mut cells[ki * config.nulls.len() + ni];
                    cell.elapsed += start.elapsed();
                    cell.rejections += usize::from(result.reject);
                    cell.statistic_sum += result.statistic;
                }
            }
        }
        for (ki, k) in config.kernels.iter().enumerate() {
            for (ni, null) in config.nulls.iter().enumerate() {
                let cell = &cells[ki * config.nulls.len() + ni];
                let trials = config.trials as f64;
                rows.push(BenchmarkRow {
                    scenario: scenario.family.name().to_string(),
                    parameter: scenario.family.difficulty(),
                    kernel: k.to_string(),
                    null: null.method.name().to_string(),
                    trials: config.trials,
                    rejections: cell.rejections,
                    rejection_rate: cell.rejections as f64 / trials,
                    mean_statistic: cell.statistic_sum / trials,
                    wall_time_s: cell.elapsed.as_secs_f64(),
                });
            }
        }
    }
    Ok(rows)
}

fn write_report<W: Write>(out: W, rows: &[BenchmarkRow]) -> CliResult<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}

fn generate(scenario: &ScenarioSpec, rng: RngSpec, path: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    if scenario.family.is_two_sample() {
        let prefix = path.expect("two-sample output prefix is validated");
        let (z, w) = gen_two_sample::<f64>(scenario, rng)?;
        for (sample, name, suffix) in [(&z, "z", "_z.csv"), (&w, "w", "_w.csv")] {
            let file = BufWriter::new(File::create(suffixed(prefix, suffix))?);
            write_csv(file, &column_names(name, sample.dim()), &sample_rows(sample))?;
        }
        return Ok(());
    }
    let s = gen_dependence::<f64>(scenario, rng)?;
    let mut header = column_names("x", s.x().dim());
    header.extend(column_names("y", s.y().dim()));
    let rows = sample_rows(&s.joint());
    match path {
        Some(p) => write_csv(BufWriter::new(File::create(p)?), &header, &rows),
        None => write_csv(out, &header, &rows),
    }
}
