//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage error, 3 infeasible configuration,
//! 4 failed validation check, 1 anything else.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench::{run_benchmark, BenchConfig};
use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::magic_states::{self, Phi};
use crate::norms::{fastnorm_seeded, gram_norm_exact, FastNormOptions, NormMethod};
use crate::sparsify::{self, regime_check, SamplerConfig, SamplingMode};
use crate::stab_terms::SparseDecomposition;
use crate::validate::{
    gram_error, mc_expected_error, mc_tail_check, CheckStatus, ValidationConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "corrsparse",
    version,
    about = "Sparsified stabilizer decompositions of magic states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Stabilizer extent and L1 norm of the t-fold magic state.
    Extent {
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
        #[arg(long)]
        t: usize,
    },
    /// Sample a sparse decomposition and write it as JSON.
    Sparsify(SparsifyArgs),
    /// Norm of a decomposition file.
    Norm(NormArgs),
    /// Monte Carlo estimate of the expected squared error.
    Validate(EnsembleArgs),
    /// Empirical frequency of the tail event against its bound.
    Tailcheck(EnsembleArgs),
    /// Worst-case estimator runtime sweep, written as CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct SparsifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    phi: f64,
    #[arg(long)]
    t: usize,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    mode: SamplingMode,
    #[arg(long)]
    seed: u64,
    /// Resample until <psi|psi> - 1 <= factor * delta^2.
    #[arg(long)]
    postselect: bool,
    #[arg(long, default_value_t = 2.0, requires = "postselect")]
    factor: f64,
    #[arg(long, default_value_t = 64, requires = "postselect")]
    max_attempts: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct NormArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "exact")]
    method: NormMethod,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    pfail: f64,
    /// Required for the randomized method.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the sample count L.
    #[arg(long = "L")]
    samples: Option<usize>,
    #[arg(long)]
    median_of_means: bool,
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    #[arg(long)]
    t: usize,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    mode: SamplingMode,
    #[arg(long)]
    runs: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, allow_hyphen_values = true, default_value_t = std::f64::consts::FRAC_PI_4)]
    phi: f64,
    /// Write the report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    t_min: usize,
    #[arg(long)]
    t_max: usize,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long = "L")]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    warmup: usize,
    /// Passes over the sweep; each run keeps its fastest pass.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Time cells concurrently; the timings are then unreliable.
    #[arg(long)]
    parallel_cells: bool,
    #[arg(long)]
    out_dir: PathBuf,
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        e if e.is_infeasible() => EXIT_INFEASIBLE,
        Error::Domain(_) => EXIT_USAGE,
        _ => EXIT_OTHER,
    }
}

/// Parses `args` (including the program name) and runs the subcommand,
/// writing results to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let msg = e.to_string();
                    let first = msg.lines().next().unwrap_or("usage error");
                    let _ = writeln!(err, "{first}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Extent { phi, t } => {
            let phi = Phi::new(phi)?;
            let xi = magic_states::extent(phi, t)?;
            let l1 = magic_states::l1_norm(phi, t)?;
            writeln!(out, "extent {xi:.12}")?;
            writeln!(out, "l1 {l1:.12}")?;
            writeln!(out, "log2_extent {:.12}", xi.log2())?;
            Ok(EXIT_OK)
        }
        Command::Sparsify(a) => sparsify_cmd(a, out, err),
        Command::Norm(a) => norm_cmd(a, out),
        Command::Validate(a) => {
            let cfg = ensemble_config(&a)?;
            let report = mc_expected_error(&cfg)?;
            write!(out, "{report}")?;
            if let Some(path) = &a.out {
                write_atomic(path, report.to_json().as_bytes())?;
            }
            Ok(if report.has_failure() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            })
        }
        Command::Tailcheck(a) => {
            let cfg = ensemble_config(&a)?;
            let report = mc_tail_check(&cfg)?;
            writeln!(out, "tail_fraction {:.6}", report.tail_fraction)?;
            writeln!(out, "tail_bound {:.6}", report.tail_bound_value)?;
            writeln!(out, "status {}", report.tail_check)?;
            if let Some(path) = &a.out {
                write_atomic(path, report.to_json().as_bytes())?;
            }
            Ok(if report.tail_check == CheckStatus::Fail {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            })
        }
        Command::Bench(a) => {
            let cfg = BenchConfig {
                t_min: a.t_min,
                t_max: a.t_max,
                delta: a.delta,
                runs: a.runs,
                samples: a.samples,
                seed: a.seed,
                warmup: a.warmup,
                repeats: a.repeats,
                parallel_cells: a.parallel_cells,
            };
            let result = run_benchmark(&cfg)?;
            for w in &result.warnings {
                writeln!(err, "{w}")?;
            }
            for path in result.write_csvs(&a.out_dir)? {
                writeln!(out, "wrote {}", path.display())?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn sparsify_cmd(a: SparsifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let mut cfg = SamplerConfig::new(Phi::new(a.phi)?, a.t, a.delta, a.mode, a.seed);
    cfg.postselect = a.postselect;
    cfg.postselect_factor = a.factor;
    cfg.max_attempts = a.max_attempts;
    cfg.validate()?;
    let (d, attempts) = if cfg.postselect {
        sparsify::sparsify_with_postselection(&cfg, |d| Ok(gram_norm_exact(d)?.value))?
    } else {
        (sparsify::sparsify(&cfg)?, 1)
    };
    for w in regime_check(a.t, a.delta) {
        writeln!(err, "{w}")?;
    }
    d.write_file(&a.out)?;
    writeln!(out, "k {}", d.k())?;
    writeln!(out, "gamma {:.12}", d.gamma)?;
    if cfg.postselect {
        writeln!(out, "attempts {attempts}")?;
        writeln!(out, "sq_error {:.12e}", gram_error(&d)?)?;
    }
    writeln!(out, "wrote {}", a.out.display())?;
    Ok(EXIT_OK)
}

fn norm_cmd(a: NormArgs, out: &mut dyn Write) -> Result<i32> {
    let d = SparseDecomposition::read_file(&a.input)?;
    let estimate = match a.method {
        NormMethod::Exact => gram_norm_exact(&d)?,
        NormMethod::Fastnorm => {
            let seed = a
                .seed
                .ok_or_else(|| Error::Domain("--seed is required with --method fastnorm".into()))?;
            let opts = FastNormOptions {
                samples: a.samples,
                median_of_means: a.median_of_means,
                ..FastNormOptions::new(a.epsilon, a.pfail)
            };
            fastnorm_seeded(&d, &opts, seed)?
        }
    };
    let json = serde_json::to_string(&estimate).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(out, "{json}")?;
    Ok(EXIT_OK)
}

fn ensemble_config(a: &EnsembleArgs) -> Result<ValidationConfig> {
    Ok(ValidationConfig {
        phi: Phi::new(a.phi)?,
        ..ValidationConfig::new(a.t, a.delta, a.mode, a.runs, a.seed)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("corrsparse").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn extent_output() {
        let (code, out, _) = call(&["extent", "--phi", "0.7853981633974483", "--t", "1"]);
        assert_eq!(code, 0);
        assert!(out.contains("extent 1.171572875254"));
        assert!(out.contains("l1 1.082392200292"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["extent", "--phi", "0.7"]).0, EXIT_USAGE);
        assert_eq!(
            call(&["extent", "--phi", "0.7", "--t", "1", "--bogus"]).0,
            EXIT_USAGE
        );
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        let (code, _, err) = call(&["extent", "--phi", "2.0", "--t", "1"]);
        assert_eq!(code, EXIT_USAGE);
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn correlated_off_pi_over_4_is_infeasible() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.json");
        let (code, _, err) = call(&[
            "sparsify",
            "--phi",
            "1.0",
            "--t",
            "8",
            "--delta",
            "0.3",
            "--mode",
            "correlated",
            "--seed",
            "1",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_INFEASIBLE);
        assert!(err.contains("pi/4"));
        assert_eq!(err.lines().count(), 1);
        assert!(!path.exists());
    }

    #[test]
    fn fastnorm_needs_seed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.json");
        let p = path.to_str().unwrap();
        let args = [
            "sparsify", "--phi", "0.5", "--t", "6", "--delta", "0.3", "--mode", "iid", "--seed",
            "2", "--out", p,
        ];
        assert_eq!(call(&args).0, 0);
        assert_eq!(
            call(&["norm", "--in", p, "--method", "fastnorm"]).0,
            EXIT_USAGE
        );
        let (code, out, _) = call(&[
            "norm", "--in", p, "--method", "fastnorm", "--seed", "3", "--L", "50",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("\"samples\":50"));
    }
}
