//! Exact and Monte Carlo measurements of sparsification quality.
//!
//! The approximation error is `||D - psi||^2 = 1 - 2 Re<D|psi> + <psi|psi>`,
//! computed from the Gram sum and the O(t) product overlaps with the target,
//! so it runs at any `t`. For `t <= 16` each run is also expanded densely and
//! the two routes must agree.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::magic_states::{self, Phi, DENSE_MAX_QUBITS};
use crate::norms::gram_norm_exact;
use crate::rng::{self, Domain};
use crate::sparsify::{self, gamma, regime_check, SamplerConfig, SamplingMode};
use crate::stab_terms::{dense_expand, overlap_table, SparseDecomposition};

/// Largest `t` at which Monte Carlo runs are also checked densely.
pub const DENSE_CHECK_MAX_QUBITS: usize = 16;

/// Largest `t` for the exhaustive ensemble-norm oracle.
pub const ENUMERATION_MAX_QUBITS: usize = 10;

/// Allowed disagreement between the Gram and dense error routes.
pub const DUAL_PATH_TOLERANCE: f64 = 1e-9;

/// `<D|psi>` from the per-term product overlaps.
pub fn target_inner(d: &SparseDecomposition) -> Complex64 {
    d.terms
        .iter()
        .map(|term| magic_states::target_overlap(term, d.phi).conj() * term.coeff().norm())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactError {
    /// `||D - psi||^2` from the Gram route.
    pub value: f64,
    /// The dense route, when `t <= 20`.
    pub dense_value: Option<f64>,
}

impl ExactError {
    pub fn dense_checked(&self) -> bool {
        self.dense_value.is_some()
    }
}

/// `1 - 2 Re<D|psi> + <psi|psi>` without any dense object.
pub fn gram_error(d: &SparseDecomposition) -> Result<f64> {
    let norm = gram_norm_exact(d)?.value;
    Ok(1.0 - 2.0 * target_inner(d).re + norm)
}

fn dense_error(d: &SparseDecomposition) -> Result<f64> {
    let psi = dense_expand(d)?;
    let target = magic_states::target_dense(d.phi, d.t)?;
    psi.distance_sqr(&target)
}

fn cross_check(gram: f64, dense: f64) -> Result<()> {
    if (gram - dense).abs() > DUAL_PATH_TOLERANCE * dense.abs().max(1.0) {
        return Err(Error::Validation(format!(
            "Gram error {gram:.12e} and dense error {dense:.12e} disagree"
        )));
    }
    Ok(())
}

/// `||D - psi||^2` by both routes; the Gram value is returned. Above the
/// dense cap only the Gram route runs and `dense_value` is `None`.
pub fn exact_error(d: &SparseDecomposition) -> Result<ExactError> {
    let value = gram_error(d)?;
    let dense_value = if d.t <= DENSE_MAX_QUBITS {
        let dense = dense_error(d)?;
        cross_check(value, dense)?;
        Some(dense)
    } else {
        None
    };
    Ok(ExactError { value, dense_value })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossTermStats {
    /// `sum_{i != j} |<omega_i|omega_j>|`.
    pub sum_abs: f64,
    /// `k - ||c||_1^2 sum_abs / k`: the offset the single sample realizes.
    pub implied_gamma: f64,
    /// Part of `sum_abs` from pairs inside the same group.
    pub within_group: f64,
}

/// Cross-term magnitudes of the normalized terms.
pub fn cross_term_stats(d: &SparseDecomposition) -> CrossTermStats {
    let table = overlap_table(d.t);
    let gs = d.group_size.max(1);
    let k = d.k();
    let rows: Vec<(f64, f64)> = (0..k)
        .into_par_iter()
        .map(|i| {
            let a = d.terms[i].bits();
            let mut all = 0.0;
            let mut within = 0.0;
            for (j, b) in d.terms.iter().enumerate() {
                if i == j {
                    continue;
                }
                let o = table[a.hamming(b.bits()) as usize];
                all += o;
                if i / gs == j / gs {
                    within += o;
                }
            }
            (all, within)
        })
        .collect();
    let (sum_abs, within_group) = rows
        .into_iter()
        .fold((0.0, 0.0), |(s, w), (a, b)| (s + a, w + b));
    let implied_gamma = if k == 0 {
        0.0
    } else {
        k as f64 - d.l1 * d.l1 * sum_abs / k as f64
    };
    CrossTermStats {
        sum_abs,
        implied_gamma,
        within_group,
    }
}

/// Within-group contribution for `m` correlated groups on `t` qubits:
/// `m (2t 2^{-1/2} + t(t-1)/2)`.
pub fn correlated_within_group_sum(t: usize, m: usize) -> f64 {
    let t = t as f64;
    m as f64 * (2.0 * t * FRAC_1_SQRT_2 + t * (t - 1.0) * 0.5)
}

/// `1 - 2 exp(-delta^2 xi^t / 8 + gamma delta^2 / 8)` at `phi = pi/4`; may be
/// negative, in which case the bound is vacuous.
pub fn tail_bound(t: usize, delta: f64, gamma_val: f64) -> f64 {
    let xi = magic_states::extent(Phi::pi_over_4(), t.max(1)).unwrap_or(1.0);
    let d2 = delta * delta;
    1.0 - 2.0 * (-d2 * xi / 8.0 + gamma_val * d2 / 8.0).exp()
}

/// Exact `E<psi|psi>` of the sampler ensemble at `phi = pi/4`, by
/// enumerating base strings.
///
/// At `pi/4` every tilde string is equally likely and all terms share one
/// phase, so `<psi|psi> = (||c||_1/k)^2 sum_{i,j} 2^{-d_ij/2}`. Pairs inside a
/// group are averaged over all `2^t` bases; pairs from different groups over
/// all `4^t` base pairs.
pub fn expected_norm_enumerated(t: usize, delta: f64, mode: SamplingMode) -> Result<f64> {
    if t == 0 || t > ENUMERATION_MAX_QUBITS {
        return Err(Error::Size {
            what: "enumeration qubit count",
            got: t,
            limit: ENUMERATION_MAX_QUBITS,
        });
    }
    let phi = Phi::pi_over_4();
    let count = sparsify::sample_count(phi, t, delta, mode)?;
    let l1 = magic_states::l1_norm(phi, t)?;
    let k = count.k as f64;
    let n = 1u64 << t;
    let table = overlap_table(t);
    let group = |base: u64| -> Vec<u64> {
        match mode {
            SamplingMode::Iid => vec![base],
            SamplingMode::Correlated => std::iter::once(base)
                .chain((0..t).map(|j| base ^ (1 << j)))
                .collect(),
        }
    };
    let groups = match mode {
        SamplingMode::Iid => count.k as f64,
        SamplingMode::Correlated => count.groups.expect("correlated groups") as f64,
    };
    let mut within = 0.0;
    for b in 0..n {
        let g = group(b);
        for (i, x) in g.iter().enumerate() {
            for (j, y) in g.iter().enumerate() {
                if i != j {
                    within += table[(x ^ y).count_ones() as usize];
                }
            }
        }
    }
    within /= n as f64;
    let mut across = 0.0;
    for b in 0..n {
        let gb = group(b);
        for c in 0..n {
            for x in &gb {
                for y in group(c) {
                    across += table[(x ^ y).count_ones() as usize];
                }
            }
        }
    }
    across /= (n * n) as f64;
    let pair_sum = k + groups * within + groups * (groups - 1.0) * across;
    Ok(l1 * l1 / (k * k) * pair_sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckStatus {
    Pass,
    Fail,
    Vacuous,
    Undefined,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Vacuous => "VACUOUS",
            CheckStatus::Undefined => "UNDEFINED",
        })
    }
}

/// Parameters of a Monte Carlo validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationConfig {
    pub phi: Phi,
    pub t: usize,
    pub delta: f64,
    pub mode: SamplingMode,
    pub runs: usize,
    pub seed: u64,
}

impl ValidationConfig {
    pub fn new(t: usize, delta: f64, mode: SamplingMode, runs: usize, seed: u64) -> Self {
        ValidationConfig {
            phi: Phi::pi_over_4(),
            t,
            delta,
            mode,
            runs,
            seed,
        }
    }

    fn sampler(&self, run: usize) -> SamplerConfig {
        SamplerConfig::new(
            self.phi,
            self.t,
            self.delta,
            self.mode,
            rng::derive_seed(self.seed, Domain::Run, run as u64),
        )
    }
}

/// Measurements of one sampled decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
struct RunSample {
    sq_error: f64,
    norm: f64,
    target_inner: Complex64,
    implied_gamma: f64,
}

fn measure(d: &SparseDecomposition, dense_check: bool) -> Result<RunSample> {
    let norm = gram_norm_exact(d)?.value;
    let inner = target_inner(d);
    let sq_error = 1.0 - 2.0 * inner.re + norm;
    if dense_check {
        cross_check(sq_error, dense_error(d)?)?;
    }
    Ok(RunSample {
        sq_error,
        norm,
        target_inner: inner,
        implied_gamma: cross_term_stats(d).implied_gamma,
    })
}

fn run_ensemble(cfg: &ValidationConfig, dense_check: bool) -> Result<Vec<RunSample>> {
    if cfg.runs == 0 {
        return Err(Error::Config("runs must be at least 1".into()));
    }
    cfg.sampler(0).validate()?;
    sparsify::sample_count(cfg.phi, cfg.t, cfg.delta, cfg.mode)?;
    (0..cfg.runs)
        .into_par_iter()
        .map(|r| measure(&sparsify::sparsify(&cfg.sampler(r))?, dense_check))
        .collect()
}

/// Mean and standard error (`None` for a single run).
fn mean_stderr(values: impl Iterator<Item = f64> + Clone) -> (f64, Option<f64>) {
    let n = values.clone().count();
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, None);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, Some((var / n as f64).sqrt()))
}

/// Summary of a Monte Carlo validation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub t: usize,
    pub phi: f64,
    pub delta: f64,
    pub mode: SamplingMode,
    pub runs: usize,
    pub seed: String,
    pub k: usize,
    pub gamma: f64,
    pub extent: f64,
    pub mean_sq_error: f64,
    pub stderr: Option<f64>,
    pub mean_norm: f64,
    pub norm_stderr: Option<f64>,
    pub mean_norm_gap: f64,
    pub mean_target_overlap_re: f64,
    pub mean_target_overlap_im: f64,
    pub target_overlap_stderr: Option<f64>,
    pub implied_gamma: f64,
    /// `(xi^t - gamma) / k`, the expected squared error the sizing rule assumes.
    pub claimed_bound: f64,
    /// `mean_sq_error <= delta^2 + 3 stderr`.
    pub claimed_bound_check: CheckStatus,
    pub oracle_mean_norm: Option<f64>,
    /// `|mean_norm - oracle| <= 3 norm_stderr`.
    pub oracle_check: Option<CheckStatus>,
    pub tail_fraction: f64,
    pub tail_bound_value: f64,
    pub tail_check: CheckStatus,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl RunReport {
    fn from_samples(cfg: &ValidationConfig, samples: &[RunSample]) -> Result<Self> {
        let count = sparsify::sample_count(cfg.phi, cfg.t, cfg.delta, cfg.mode)?;
        let g = gamma(cfg.mode, cfg.t);
        let xi = magic_states::extent(cfg.phi, cfg.t)?;
        let d2 = cfg.delta * cfg.delta;
        let (mean_sq_error, stderr) = mean_stderr(samples.iter().map(|s| s.sq_error));
        let (mean_norm, norm_stderr) = mean_stderr(samples.iter().map(|s| s.norm));
        let (overlap_re, overlap_stderr) = mean_stderr(samples.iter().map(|s| s.target_inner.re));
        let overlap_im =
            samples.iter().map(|s| s.target_inner.im).sum::<f64>() / samples.len() as f64;
        let implied_gamma =
            samples.iter().map(|s| s.implied_gamma).sum::<f64>() / samples.len() as f64;

        let mut warnings: Vec<String> = regime_check(cfg.t, cfg.delta)
            .into_iter()
            .map(|w| w.to_string())
            .collect();
        if stderr.is_none() {
            warnings.push("STDERR_UNDEFINED".into());
        }

        let claimed_bound_check = match stderr {
            Some(se) if mean_sq_error <= d2 + 3.0 * se => CheckStatus::Pass,
            Some(_) => CheckStatus::Fail,
            None => CheckStatus::Undefined,
        };

        let oracle_mean_norm = if cfg.phi.is_pi_over_4() && cfg.t <= ENUMERATION_MAX_QUBITS.min(8) {
            Some(expected_norm_enumerated(cfg.t, cfg.delta, cfg.mode)?)
        } else {
            None
        };
        let oracle_check = oracle_mean_norm.map(|oracle| match norm_stderr {
            Some(se) => {
                let slack = 3.0 * se + 1e-12 * oracle.abs().max(1.0);
                if (mean_norm - oracle).abs() <= slack {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail
                }
            }
            None => CheckStatus::Undefined,
        });

        let hits = samples
            .iter()
            .filter(|s| s.sq_error <= s.norm - 1.0 + d2)
            .count();
        let tail_fraction = hits as f64 / samples.len() as f64;
        let tail_bound_value = if cfg.phi.is_pi_over_4() {
            tail_bound(cfg.t, cfg.delta, g)
        } else {
            f64::NAN
        };
        let tail_check = tail_status(tail_fraction, tail_bound_value, samples.len());

        Ok(RunReport {
            t: cfg.t,
            phi: cfg.phi.value(),
            delta: cfg.delta,
            mode: cfg.mode,
            runs: samples.len(),
            seed: cfg.seed.to_string(),
            k: count.k,
            gamma: g,
            extent: xi,
            mean_sq_error,
            stderr,
            mean_norm,
            norm_stderr,
            mean_norm_gap: mean_norm - 1.0,
            mean_target_overlap_re: overlap_re,
            mean_target_overlap_im: overlap_im,
            target_overlap_stderr: overlap_stderr,
            implied_gamma,
            claimed_bound: (xi - g) / count.k as f64,
            claimed_bound_check,
            oracle_mean_norm,
            oracle_check,
            tail_fraction,
            tail_bound_value,
            tail_check,
            warnings,
            notes: vec!["tail event uses <psi|psi> as the norm term".into()],
        })
    }

    /// True when an assertion-bearing check failed: the enumeration oracle
    /// in either mode, the squared-error bound for i.i.d. sampling, and the
    /// tail bound whenever it is not vacuous.
    pub fn has_failure(&self) -> bool {
        self.oracle_check == Some(CheckStatus::Fail)
            || (self.mode == SamplingMode::Iid && self.claimed_bound_check == CheckStatus::Fail)
            || self.tail_check == CheckStatus::Fail
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn tail_status(fraction: f64, bound: f64, runs: usize) -> CheckStatus {
    if bound.is_nan() || bound <= 0.0 {
        return CheckStatus::Vacuous;
    }
    let se = (bound * (1.0 - bound) / runs as f64).sqrt();
    if fraction >= bound - 3.0 * se {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| format!("{x:.6e}"))
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode                 {}", self.mode)?;
        writeln!(
            f,
            "t / delta / runs     {} / {} / {}",
            self.t, self.delta, self.runs
        )?;
        writeln!(f, "k / gamma            {} / {:.6}", self.k, self.gamma)?;
        writeln!(f, "extent               {:.6}", self.extent)?;
        writeln!(
            f,
            "mean sq error        {:.6e} +- {}",
            self.mean_sq_error,
            opt(self.stderr)
        )?;
        writeln!(
            f,
            "mean <psi|psi>       {:.6e} +- {}",
            self.mean_norm,
            opt(self.norm_stderr)
        )?;
        writeln!(
            f,
            "mean <D|psi>         {:.12}",
            self.mean_target_overlap_re
        )?;
        writeln!(f, "implied gamma        {:.6}", self.implied_gamma)?;
        writeln!(
            f,
            "sq error vs delta^2  {} (delta^2 = {:.6e})",
            self.claimed_bound_check,
            self.delta * self.delta
        )?;
        if let (Some(oracle), Some(check)) = (self.oracle_mean_norm, self.oracle_check) {
            writeln!(f, "norm vs enumeration  {check} (exact {oracle:.6e})")?;
        }
        writeln!(
            f,
            "tail fraction        {:.4} vs bound {:.4}: {}",
            self.tail_fraction, self.tail_bound_value, self.tail_check
        )?;
        for w in &self.warnings {
            writeln!(f, "warning              {w}")?;
        }
        Ok(())
    }
}

/// Expected squared error over `runs` independent decompositions, with
/// dense cross-checks at `t <= 16`.
pub fn mc_expected_error(cfg: &ValidationConfig) -> Result<RunReport> {
    let samples = run_ensemble(cfg, cfg.t <= DENSE_CHECK_MAX_QUBITS)?;
    RunReport::from_samples(cfg, &samples)
}

/// Empirical frequency of `||D - psi||^2 <= <psi|psi> - 1 + delta^2`,
/// evaluated by the Gram route only.
pub fn mc_tail_check(cfg: &ValidationConfig) -> Result<RunReport> {
    let samples = run_ensemble(cfg, false)?;
    RunReport::from_samples(cfg, &samples)
}
