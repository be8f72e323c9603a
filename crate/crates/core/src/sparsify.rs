//! L1 sparsification of `|D_phi>^{(x)t}` into `k` equal-weight stabilizer terms.
//!
//! Two samplers are provided:
//!
//! * [`SamplingMode::Iid`]: `k` independent tilde strings, bit `j` set with
//!   probability `|c1| / (|c0| + |c1|)`;
//! * [`SamplingMode::Correlated`] (`phi = pi/4` only): `m` uniform base
//!   strings, each followed by its `t` single-bit flips in qubit order, so
//!   `k = m (t + 1)`.
//!
//! Every emitted term carries the coefficient `(||c||_1 / k) * c_x / |c_x|`.
//! The term count is sized as `k = ceil((xi^t - gamma) / delta^2)` with
//! `gamma = 1` for i.i.d. sampling and `1 + (1 - 2^{-1/2}) t` for correlated
//! sampling (rounded up to whole groups).

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::magic_states::{self, Phi};
use crate::rng::{self, Domain};
use crate::stab_terms::{BitString, DecompositionMode, ProductStabTerm, SparseDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    Iid,
    Correlated,
}

impl SamplingMode {
    pub const ALL: [SamplingMode; 2] = [SamplingMode::Iid, SamplingMode::Correlated];

    pub fn as_str(self) -> &'static str {
        match self {
            SamplingMode::Iid => "iid",
            SamplingMode::Correlated => "correlated",
        }
    }
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iid" => Ok(SamplingMode::Iid),
            "correlated" => Ok(SamplingMode::Correlated),
            other => Err(Error::Config(format!("unknown sampling mode {other:?}"))),
        }
    }
}

impl From<SamplingMode> for DecompositionMode {
    fn from(mode: SamplingMode) -> Self {
        match mode {
            SamplingMode::Iid => DecompositionMode::Iid,
            SamplingMode::Correlated => DecompositionMode::Correlated,
        }
    }
}

/// Everything that determines a sampled decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub phi: Phi,
    pub t: usize,
    pub delta: f64,
    pub mode: SamplingMode,
    pub seed: u64,
    pub postselect: bool,
    pub postselect_factor: f64,
    pub max_attempts: usize,
}

impl SamplerConfig {
    pub fn new(phi: Phi, t: usize, delta: f64, mode: SamplingMode, seed: u64) -> Self {
        SamplerConfig {
            phi,
            t,
            delta,
            mode,
            seed,
            postselect: false,
            postselect_factor: 2.0,
            max_attempts: 64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::Config("t must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!(
                "delta = {} must lie in (0, 1)",
                self.delta
            )));
        }
        if self.mode == SamplingMode::Correlated && !self.phi.is_pi_over_4() {
            return Err(Error::Config(format!(
                "correlated sampling is only defined for phi = pi/4 (got phi = {})",
                self.phi.value()
            )));
        }
        if self.postselect_factor.is_nan() || self.postselect_factor <= 0.0 {
            return Err(Error::Config("postselect factor must be positive".into()));
        }
        if self.max_attempts == 0 {
            return Err(Error::Config("max_attempts must be positive".into()));
        }
        Ok(())
    }
}

/// Cross-term offset used to size `k`.
pub fn gamma(mode: SamplingMode, t: usize) -> f64 {
    match mode {
        SamplingMode::Iid => 1.0,
        SamplingMode::Correlated => 1.0 + (1.0 - FRAC_1_SQRT_2) * t as f64,
    }
}

/// Result of [`sample_count`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleCount {
    /// Realized number of terms.
    pub k: usize,
    /// `ceil((xi^t - gamma) / delta^2)` before group rounding.
    pub k_target: usize,
    /// Number of base strings in correlated mode.
    pub groups: Option<usize>,
}

pub fn sample_count(phi: Phi, t: usize, delta: f64, mode: SamplingMode) -> Result<SampleCount> {
    let xi = magic_states::extent(phi, t)?;
    let g = gamma(mode, t);
    if xi <= g {
        return Err(Error::Infeasible {
            extent: xi,
            gamma: g,
        });
    }
    let k_target = ((xi - g) / (delta * delta)).ceil() as usize;
    Ok(match mode {
        SamplingMode::Iid => SampleCount {
            k: k_target,
            k_target,
            groups: None,
        },
        SamplingMode::Correlated => {
            let m = k_target.div_ceil(t + 1);
            SampleCount {
                k: m * (t + 1),
                k_target,
                groups: Some(m),
            }
        }
    })
}

fn decomposition_shell(
    cfg: &SamplerConfig,
    terms: Vec<ProductStabTerm>,
) -> Result<SparseDecomposition> {
    Ok(SparseDecomposition {
        t: cfg.t,
        phi: cfg.phi,
        mode: cfg.mode.into(),
        delta: cfg.delta,
        gamma: gamma(cfg.mode, cfg.t),
        l1: magic_states::l1_norm(cfg.phi, cfg.t)?,
        seed: cfg.seed,
        group_size: match cfg.mode {
            SamplingMode::Iid => 1,
            SamplingMode::Correlated => cfg.t + 1,
        },
        terms,
    })
}

/// Unit phase `c_x / |c_x|` of a tilde string: the tilde coefficients share
/// a common phase at every `phi`, but it is computed per string anyway.
fn string_phase(coeffs: &magic_states::TildeCoeffs, bits: &BitString) -> Complex64 {
    let u0 = coeffs.zero / coeffs.zero.norm();
    let u1 = coeffs.plus / coeffs.plus.norm();
    let ones = bits.count_ones() as i32;
    u0.powi(bits.len() as i32 - ones) * u1.powi(ones)
}

fn uniform_bits<R: Rng + ?Sized>(t: usize, rng: &mut R) -> BitString {
    let words = (0..t.div_ceil(64)).map(|_| rng.random::<u64>()).collect();
    BitString::from_words(t, words)
}

/// Independent L1 sampling; term `i` draws from its own sub-stream.
pub fn sparsify_iid(cfg: &SamplerConfig) -> Result<SparseDecomposition> {
    cfg.validate()?;
    if cfg.mode != SamplingMode::Iid {
        return Err(Error::Config("sparsify_iid requires mode = iid".into()));
    }
    let count = sample_count(cfg.phi, cfg.t, cfg.delta, cfg.mode)?;
    let coeffs = magic_states::tilde_coeffs(cfg.phi);
    let p_plus = coeffs.plus_probability();
    let weight = magic_states::l1_norm(cfg.phi, cfg.t)? / count.k as f64;
    let uniform = cfg.phi.is_pi_over_4();
    let terms = (0..count.k)
        .map(|i| {
            let mut rng = rng::substream(cfg.seed, Domain::IidTerm, i as u64);
            let bits = if uniform {
                uniform_bits(cfg.t, &mut rng)
            } else {
                let mut bits = BitString::zeros(cfg.t);
                for j in 0..cfg.t {
                    bits.set(j, rng.random_bool(p_plus));
                }
                bits
            };
            let coeff = string_phase(&coeffs, &bits) * weight;
            ProductStabTerm::new(bits, coeff)
        })
        .collect();
    decomposition_shell(cfg, terms)
}

/// Correlated L1 sampling at `phi = pi/4`: each uniform base string is
/// followed by its `t` single-bit flips.
pub fn sparsify_correlated(cfg: &SamplerConfig) -> Result<SparseDecomposition> {
    cfg.validate()?;
    if cfg.mode != SamplingMode::Correlated {
        return Err(Error::Config(
            "sparsify_correlated requires mode = correlated".into(),
        ));
    }
    let count = sample_count(cfg.phi, cfg.t, cfg.delta, cfg.mode)?;
    let m = count.groups.expect("correlated count has groups");
    let coeffs = magic_states::tilde_coeffs(cfg.phi);
    let weight = magic_states::l1_norm(cfg.phi, cfg.t)? / count.k as f64;
    let mut terms = Vec::with_capacity(count.k);
    for g in 0..m {
        let mut rng = rng::substream(cfg.seed, Domain::CorrelatedGroup, g as u64);
        let base = uniform_bits(cfg.t, &mut rng);
        let phase = string_phase(&coeffs, &base);
        terms.push(ProductStabTerm::new(base.clone(), phase * weight));
        for j in 0..cfg.t {
            let mut flipped = base.clone();
            flipped.flip(j);
            let phase = string_phase(&coeffs, &flipped);
            terms.push(ProductStabTerm::new(flipped, phase * weight));
        }
    }
    decomposition_shell(cfg, terms)
}

/// Dispatches on `cfg.mode` (no post-selection).
pub fn sparsify(cfg: &SamplerConfig) -> Result<SparseDecomposition> {
    match cfg.mode {
        SamplingMode::Iid => sparsify_iid(cfg),
        SamplingMode::Correlated => sparsify_correlated(cfg),
    }
}

/// Resamples until `norm_fn(psi) - 1 <= factor * delta^2`.
///
/// Attempt 0 uses `cfg.seed`; attempt `a > 0` uses a seed derived from
/// `(cfg.seed, a)`, recorded in the returned decomposition. Returns the
/// accepted decomposition and the number of attempts made.
pub fn sparsify_with_postselection<F>(
    cfg: &SamplerConfig,
    mut norm_fn: F,
) -> Result<(SparseDecomposition, usize)>
where
    F: FnMut(&SparseDecomposition) -> Result<f64>,
{
    cfg.validate()?;
    let threshold = cfg.postselect_factor * cfg.delta * cfg.delta;
    let mut last_gap = f64::NAN;
    for attempt in 0..cfg.max_attempts {
        let mut attempt_cfg = *cfg;
        if attempt > 0 {
            attempt_cfg.seed = rng::derive_seed(cfg.seed, Domain::Attempt, attempt as u64);
        }
        let d = sparsify(&attempt_cfg)?;
        last_gap = norm_fn(&d)? - 1.0;
        if last_gap <= threshold {
            return Ok((d, attempt + 1));
        }
    }
    Err(Error::PostselectExhausted {
        attempts: cfg.max_attempts,
        last_gap,
        threshold,
    })
}

/// Regime warnings; never fatal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegimeWarning {
    /// `xi^t` is not large compared to `delta^{-2}`.
    WarnExtentSmall,
    /// `delta^2` is not small compared to `1/t`.
    WarnDeltaLarge,
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegimeWarning::WarnExtentSmall => "WARN_EXTENT_SMALL",
            RegimeWarning::WarnDeltaLarge => "WARN_DELTA_LARGE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeThresholds {
    /// Warn when `xi^t < extent_factor * delta^{-2}`.
    pub extent_factor: f64,
    /// Warn when `delta^2 > delta_factor / t`.
    pub delta_factor: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds {
            extent_factor: 10.0,
            delta_factor: 0.1,
        }
    }
}

pub fn regime_check(t: usize, delta: f64) -> Vec<RegimeWarning> {
    regime_check_with(t, delta, RegimeThresholds::default())
}

pub fn regime_check_with(t: usize, delta: f64, th: RegimeThresholds) -> Vec<RegimeWarning> {
    let mut warnings = Vec::new();
    let d2 = delta * delta;
    let xi = magic_states::extent(Phi::pi_over_4(), t.max(1)).unwrap_or(1.0);
    if xi < th.extent_factor / d2 {
        warnings.push(RegimeWarning::WarnExtentSmall);
    }
    if d2 > th.delta_factor / t.max(1) as f64 {
        warnings.push(RegimeWarning::WarnDeltaLarge);
    }
    warnings
}
