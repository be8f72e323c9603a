//! Worst-case FASTNORM runtime against `t` for both sampling modes.
//!
//! Each cell `(t, mode)` samples `runs` decompositions and times only the
//! fixed-`L` estimator on each one, single-threaded, on a monotonic clock.
//! A run's runtime is its minimum over `repeats` passes of the whole sweep;
//! the worst case is the maximum over runs.
//! Sampling, CSV formatting and I/O happen outside the timed section.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::magic_states::Phi;
use crate::norms::fastnorm_fixed;
use crate::rng::{self, Domain};
use crate::sparsify::{self, SamplerConfig, SamplingMode};

pub const RUNS_FILE: &str = "bench_runs.csv";
pub const WORST_CASE_FILE: &str = "bench_worst_case.csv";
pub const DIFFERENCE_FILE: &str = "bench_difference.csv";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub t_min: usize,
    pub t_max: usize,
    pub delta: f64,
    pub runs: usize,
    /// Fixed FASTNORM sample count, shared by every cell.
    pub samples: usize,
    pub seed: u64,
    pub warmup: usize,
    /// Passes over the sweep; a run's runtime is its minimum over passes.
    pub repeats: usize,
    /// Run cells concurrently. Timings are then not trustworthy.
    pub parallel_cells: bool,
}

impl BenchConfig {
    pub fn new(t_min: usize, t_max: usize, samples: usize, seed: u64) -> Self {
        BenchConfig {
            t_min,
            t_max,
            delta: 0.1,
            runs: 10,
            samples,
            seed,
            warmup: 1,
            repeats: 3,
            parallel_cells: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_min < 1 || self.t_min > self.t_max {
            return Err(Error::Config(format!(
                "need 1 <= t_min <= t_max, got {}..{}",
                self.t_min, self.t_max
            )));
        }
        if self.runs < 1 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.repeats < 1 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if self.samples < 1 {
            return Err(Error::Config("L must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Domain(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BenchRecord {
    Run {
        t: usize,
        mode: SamplingMode,
        k: usize,
        run_index: usize,
        runtime_seconds: f64,
        /// Equatorial overlaps evaluated inside the timed section.
        overlaps: u64,
    },
    WorstCase {
        t: usize,
        mode: SamplingMode,
        k: usize,
        runtime_max_seconds: f64,
    },
    /// i.i.d. worst case minus correlated worst case.
    Difference { t: usize, runtime_diff_seconds: f64 },
    /// A cell that could not be run, e.g. an infeasible sample count.
    Failed {
        t: usize,
        mode: SamplingMode,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub records: Vec<BenchRecord>,
    pub warnings: Vec<String>,
}

impl BenchResult {
    pub fn worst_case(&self, t: usize, mode: SamplingMode) -> Option<(usize, f64)> {
        self.records.iter().find_map(|r| match *r {
            BenchRecord::WorstCase {
                t: rt,
                mode: rm,
                k,
                runtime_max_seconds,
            } if rt == t && rm == mode => Some((k, runtime_max_seconds)),
            _ => None,
        })
    }

    /// Total overlaps counted across the runs of one cell.
    pub fn overlaps(&self, t: usize, mode: SamplingMode) -> u64 {
        self.records
            .iter()
            .map(|r| match *r {
                BenchRecord::Run {
                    t: rt,
                    mode: rm,
                    overlaps,
                    ..
                } if rt == t && rm == mode => overlaps,
                _ => 0,
            })
            .sum()
    }

    pub fn runs_csv(&self) -> String {
        let mut out = String::from("t,mode,k,run_index,runtime_seconds\n");
        for r in &self.records {
            match r {
                BenchRecord::Run {
                    t,
                    mode,
                    k,
                    run_index,
                    runtime_seconds,
                    ..
                } => {
                    let _ = writeln!(out, "{t},{mode},{k},{run_index},{}", sig9(*runtime_seconds));
                }
                BenchRecord::Failed { t, mode, .. } => {
                    let _ = writeln!(out, "{t},{mode},NA,NA,NaN");
                }
                _ => {}
            }
        }
        out
    }

    pub fn worst_case_csv(&self) -> String {
        let mut out = String::from("t,mode,k,runtime_max_seconds\n");
        for r in &self.records {
            match r {
                BenchRecord::WorstCase {
                    t,
                    mode,
                    k,
                    runtime_max_seconds,
                } => {
                    let _ = writeln!(out, "{t},{mode},{k},{}", sig9(*runtime_max_seconds));
                }
                BenchRecord::Failed { t, mode, .. } => {
                    let _ = writeln!(out, "{t},{mode},NA,NaN");
                }
                _ => {}
            }
        }
        out
    }

    pub fn difference_csv(&self) -> String {
        let mut out = String::from("t,runtime_diff_seconds\n");
        for r in &self.records {
            if let BenchRecord::Difference {
                t,
                runtime_diff_seconds,
            } = r
            {
                let _ = writeln!(out, "{t},{}", sig9(*runtime_diff_seconds));
            }
        }
        out
    }

    /// Writes the three CSV files into `dir` and returns their paths.
    pub fn write_csvs(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let files = [
            (RUNS_FILE, self.runs_csv()),
            (WORST_CASE_FILE, self.worst_case_csv()),
            (DIFFERENCE_FILE, self.difference_csv()),
        ];
        let mut paths = Vec::new();
        for (name, body) in files {
            let path = dir.join(name);
            write_atomic(&path, body.as_bytes())?;
            paths.push(path);
        }
        Ok(paths)
    }
}

/// Nine significant digits in scientific notation.
pub fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

fn cell_index(t: usize, mode: SamplingMode) -> u64 {
    let m = match mode {
        SamplingMode::Iid => 0,
        SamplingMode::Correlated => 1,
    };
    ((t as u64) << 1) | m
}

struct ModeCell {
    t: usize,
    mode: SamplingMode,
    k: usize,
    seed: u64,
    /// Per-run minimum over passes; warmup runs included.
    best: Vec<f64>,
    decomposition_k: Vec<usize>,
    overlaps: Vec<u64>,
    failure: Option<String>,
}

impl ModeCell {
    fn time_run(&mut self, cfg: &BenchConfig, i: usize) -> Result<()> {
        let sampler = SamplerConfig::new(
            Phi::pi_over_4(),
            self.t,
            cfg.delta,
            self.mode,
            rng::derive_seed(self.seed, Domain::Run, i as u64),
        );
        let d = sparsify::sparsify(&sampler)?;
        let norm_seed = rng::derive_seed(self.seed, Domain::Equatorial, i as u64);
        let start = Instant::now();
        let run = fastnorm_fixed(&d, cfg.samples, norm_seed);
        let elapsed = start.elapsed().as_secs_f64();
        std::hint::black_box(run.value);
        self.best[i] = self.best[i].min(elapsed);
        self.decomposition_k[i] = d.k();
        self.overlaps[i] = run.overlaps;
        Ok(())
    }

    fn records(self, warmup: usize) -> Vec<BenchRecord> {
        let (t, mode) = (self.t, self.mode);
        if let Some(message) = self.failure {
            return vec![BenchRecord::Failed { t, mode, message }];
        }
        let mut out = Vec::new();
        let mut worst = 0.0f64;
        for i in warmup..self.best.len() {
            // Clock granularity can report zero for tiny cells.
            let runtime_seconds = self.best[i].max(f64::MIN_POSITIVE);
            worst = worst.max(runtime_seconds);
            out.push(BenchRecord::Run {
                t,
                mode,
                k: self.decomposition_k[i],
                run_index: i - warmup,
                runtime_seconds,
                overlaps: self.overlaps[i],
            });
        }
        out.push(BenchRecord::WorstCase {
            t,
            mode,
            k: self.k,
            runtime_max_seconds: worst,
        });
        out
    }
}

fn cells_for(cfg: &BenchConfig, t: usize) -> Vec<ModeCell> {
    let n = cfg.warmup + cfg.runs;
    SamplingMode::ALL
        .into_iter()
        .map(|mode| {
            let count = sparsify::sample_count(Phi::pi_over_4(), t, cfg.delta, mode);
            ModeCell {
                t,
                mode,
                k: count.as_ref().map_or(0, |c| c.k),
                seed: rng::derive_seed(cfg.seed, Domain::Bench, cell_index(t, mode)),
                best: vec![f64::INFINITY; n],
                decomposition_k: vec![0; n],
                overlaps: vec![0; n],
                failure: count.err().map(|e| e.to_string()),
            }
        })
        .collect()
}

/// One pass over all runs at one `t`. Runs of the two modes alternate.
fn pass_t(cfg: &BenchConfig, cells: &mut [ModeCell]) {
    for i in 0..cfg.warmup + cfg.runs {
        for cell in cells.iter_mut() {
            if cell.failure.is_some() {
                continue;
            }
            if let Err(e) = cell.time_run(cfg, i) {
                cell.failure = Some(e.to_string());
            }
        }
    }
}

/// Runs the sweep over `t_min..=t_max` for both modes. Per-cell failures
/// become [`BenchRecord::Failed`] rows; only an invalid config is an error.
///
/// The sweep is repeated `repeats` times and each run keeps its fastest
/// pass, so a slow phase of the machine must hit the same run in every pass
/// to show up in the worst case.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchResult> {
    cfg.validate()?;
    let mut per_t: Vec<Vec<ModeCell>> =
        (cfg.t_min..=cfg.t_max).map(|t| cells_for(cfg, t)).collect();
    for _ in 0..cfg.repeats {
        if cfg.parallel_cells {
            per_t.par_iter_mut().for_each(|cells| pass_t(cfg, cells));
        } else {
            per_t.iter_mut().for_each(|cells| pass_t(cfg, cells));
        }
    }
    let mut result = BenchResult {
        records: per_t
            .into_iter()
            .flatten()
            .flat_map(|cell| cell.records(cfg.warmup))
            .collect(),
        warnings: Vec::new(),
    };
    for t in cfg.t_min..=cfg.t_max {
        if let (Some((_, iid)), Some((_, corr))) = (
            result.worst_case(t, SamplingMode::Iid),
            result.worst_case(t, SamplingMode::Correlated),
        ) {
            result.records.push(BenchRecord::Difference {
                t,
                runtime_diff_seconds: iid - corr,
            });
        }
    }
    if cfg.parallel_cells {
        result
            .warnings
            .push("WARN_PARALLEL_CELLS: timings taken concurrently are not reliable".into());
    }
    Ok(result)
}
