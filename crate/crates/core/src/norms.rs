//! Norm of a sparse decomposition: exact Gram sum and the randomized
//! estimator over random equatorial stabilizer states.
//!
//! An equatorial state has amplitudes `2^{-t/2} i^{q(x)}` for a `Z_4`
//! quadratic form `q`. With the diagonal of `q` uniform on `Z_4`,
//! `E[2^t |<theta|psi>|^2] = <psi|psi>`, because every off-diagonal pair
//! `x != y` picks up a factor `E[i^{d_j (y_j - x_j)}] = 0`. The estimator
//! averages `L` such samples; each overlap with a product term is one
//! restricted Gauss sum.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gauss_sum::{gauss_eval_restricted, QuadraticFormZ4};
use crate::magic_states::DenseState;
use crate::rng::{self, Domain};
use crate::stab_terms::{gram_dot, BitString, ProductStabTerm, SparseDecomposition};

/// Largest `t` accepted by [`exhaustive_diagonal_average`].
pub const EXHAUSTIVE_MAX_QUBITS: usize = 8;

/// `2^{-t/2} sum_x i^{q(x)} |x>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquatorialState {
    form: QuadraticFormZ4,
}

impl EquatorialState {
    pub fn new(form: QuadraticFormZ4) -> Self {
        EquatorialState { form }
    }

    pub fn qubits(&self) -> usize {
        self.form.vars()
    }

    pub fn form(&self) -> &QuadraticFormZ4 {
        &self.form
    }

    /// Dense amplitudes for `t <= 20`.
    pub fn to_dense(&self) -> Result<DenseState> {
        let t = self.qubits();
        let mut state = DenseState::zeros(t)?;
        let scale = 2f64.powf(-(t as f64) / 2.0);
        let phases = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        for (x, amp) in state.amplitudes_mut().iter_mut().enumerate() {
            *amp = phases[self.form.value_word(x as u64) as usize] * scale;
        }
        Ok(state)
    }

    /// `2^{t/2} <theta|bits>`, i.e. `2^{-s/2} conj(G_S)` where `S` is the set
    /// of `|+>` positions and `G_S` the Gauss sum restricted to `S`.
    #[inline]
    pub fn scaled_basis_overlap(&self, bits: &BitString) -> Complex64 {
        let g = gauss_eval_restricted(&self.form, bits.words());
        g.conj().to_complex_scaled(-(bits.count_ones() as i32))
    }

    /// `<theta|bits>` for the normalized product state `|bits>`.
    pub fn basis_overlap(&self, bits: &BitString) -> Complex64 {
        self.scaled_basis_overlap(bits) * 2f64.powf(-(self.qubits() as f64) / 2.0)
    }
}

/// Uniform diagonal on `Z_4`, uniform binary couplings.
pub fn random_equatorial<R: Rng + ?Sized>(t: usize, rng: &mut R) -> Result<EquatorialState> {
    if t == 0 {
        return Err(Error::Domain("qubit count t must be at least 1".into()));
    }
    Ok(EquatorialState::new(QuadraticFormZ4::random(t, rng)))
}

/// `<theta|omega>` for the term's normalized state `omega = u |bits>`.
pub fn equatorial_overlap(theta: &EquatorialState, term: &ProductStabTerm) -> Result<Complex64> {
    if theta.qubits() != term.qubits() {
        return Err(Error::DimensionMismatch {
            left: theta.qubits(),
            right: term.qubits(),
        });
    }
    Ok(term.unit_phase() * theta.basis_overlap(term.bits()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    Exact,
    Fastnorm,
}

impl std::str::FromStr for NormMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(NormMethod::Exact),
            "fastnorm" => Ok(NormMethod::Fastnorm),
            other => Err(Error::Config(format!("unknown norm method {other:?}"))),
        }
    }
}

/// An estimate of `<psi|psi>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub samples: usize,
    pub method: NormMethod,
    pub epsilon: Option<f64>,
    pub pfail: Option<f64>,
}

/// Imaginary residue tolerated in the exact Gram norm, relative to its size.
const GRAM_IMAG_TOLERANCE: f64 = 1e-10;

/// `<psi|psi>` by the full Gram double sum, O(k^2 t / 64).
pub fn gram_norm_exact(d: &SparseDecomposition) -> Result<NormEstimate> {
    let g = gram_dot(d, d)?;
    if g.im.abs() > GRAM_IMAG_TOLERANCE * g.re.abs().max(1.0) {
        return Err(Error::Validation(format!(
            "Gram norm has imaginary residue {:.3e}",
            g.im
        )));
    }
    Ok(NormEstimate {
        value: g.re.max(0.0),
        samples: 0,
        method: NormMethod::Exact,
        epsilon: None,
        pfail: None,
    })
}

/// Settings of the randomized estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastNormOptions {
    pub epsilon: f64,
    pub pfail: f64,
    /// Overrides the default `L = ceil(8 / (epsilon^2 pfail))`.
    pub samples: Option<usize>,
    /// Median of `ceil(8 ln(1/pfail))` block means instead of the plain mean.
    pub median_of_means: bool,
}

impl FastNormOptions {
    pub fn new(epsilon: f64, pfail: f64) -> Self {
        FastNormOptions {
            epsilon,
            pfail,
            samples: None,
            median_of_means: false,
        }
    }

    pub fn sample_count(&self) -> usize {
        self.samples
            .unwrap_or_else(|| default_samples(self.epsilon, self.pfail))
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!(
                "epsilon = {} must lie in (0, 1)",
                self.epsilon
            )));
        }
        if !(self.pfail > 0.0 && self.pfail < 1.0) {
            return Err(Error::Config(format!(
                "pfail = {} must lie in (0, 1)",
                self.pfail
            )));
        }
        if self.samples == Some(0) {
            return Err(Error::Config("sample count must be positive".into()));
        }
        Ok(())
    }
}

/// `L = ceil(8 / (epsilon^2 pfail))`.
pub fn default_samples(epsilon: f64, pfail: f64) -> usize {
    (8.0 / (epsilon * epsilon * pfail)).ceil() as usize
}

/// Number of blocks used by the median-of-means variant.
pub fn median_of_means_groups(pfail: f64) -> usize {
    (8.0 * (1.0 / pfail).ln()).ceil().max(1.0) as usize
}

/// `2^t |<theta|psi>|^2` for one equatorial state.
fn sample_value(theta: &EquatorialState, d: &SparseDecomposition) -> f64 {
    let mut amp = Complex64::new(0.0, 0.0);
    for term in &d.terms {
        amp += term.coeff() * theta.scaled_basis_overlap(term.bits());
    }
    amp.norm_sqr()
}

fn equatorial_sample(t: usize, base_seed: u64, j: usize) -> EquatorialState {
    let mut rng = rng::substream(base_seed, Domain::Equatorial, j as u64);
    EquatorialState::new(QuadraticFormZ4::random(t, &mut rng))
}

/// Per-sample values `2^t |<theta_j|psi>|^2`, `j = 0..samples`, computed in
/// parallel and returned in index order.
pub fn fastnorm_values(d: &SparseDecomposition, samples: usize, base_seed: u64) -> Vec<f64> {
    (0..samples)
        .into_par_iter()
        .map(|j| sample_value(&equatorial_sample(d.t, base_seed, j), d))
        .collect()
}

fn ordered_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn median_of_means(values: &[f64], groups: usize) -> f64 {
    let groups = groups.clamp(1, values.len());
    let mut means: Vec<f64> = (0..groups)
        .map(|g| {
            let lo = g * values.len() / groups;
            let hi = (g + 1) * values.len() / groups;
            ordered_mean(&values[lo..hi])
        })
        .collect();
    means.sort_by(f64::total_cmp);
    let mid = means.len() / 2;
    if means.len() % 2 == 1 {
        means[mid]
    } else {
        0.5 * (means[mid - 1] + means[mid])
    }
}

/// Randomized estimate of `<psi|psi>`; the equatorial states are drawn from
/// sub-streams of a base seed taken from `rng`.
pub fn fastnorm<R: Rng + ?Sized>(
    d: &SparseDecomposition,
    opts: &FastNormOptions,
    rng: &mut R,
) -> Result<NormEstimate> {
    fastnorm_seeded(d, opts, rng.random())
}

pub fn fastnorm_seeded(
    d: &SparseDecomposition,
    opts: &FastNormOptions,
    base_seed: u64,
) -> Result<NormEstimate> {
    opts.validate()?;
    let samples = opts.sample_count();
    let values = fastnorm_values(d, samples, base_seed);
    let value = if opts.median_of_means {
        median_of_means(&values, median_of_means_groups(opts.pfail))
    } else {
        ordered_mean(&values)
    };
    Ok(NormEstimate {
        value,
        samples,
        method: NormMethod::Fastnorm,
        epsilon: Some(opts.epsilon),
        pfail: Some(opts.pfail),
    })
}

/// Result of the single-threaded benchmark path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedRun {
    pub value: f64,
    /// Number of equatorial overlaps evaluated (`samples * k`).
    pub overlaps: u64,
}

/// Sequential estimator with a fixed sample count; used for timing.
///
/// Term-major order: each term is evaluated against every equatorial state
/// before moving on. Per-sample sums run over the terms in index order, so
/// the value matches [`fastnorm_values`] with the same seed.
pub fn fastnorm_fixed(d: &SparseDecomposition, samples: usize, base_seed: u64) -> FixedRun {
    let thetas: Vec<EquatorialState> = (0..samples)
        .map(|j| equatorial_sample(d.t, base_seed, j))
        .collect();
    let mut amps = vec![Complex64::new(0.0, 0.0); samples];
    let mut overlaps = 0u64;
    for term in &d.terms {
        let c = term.coeff();
        for (amp, theta) in amps.iter_mut().zip(&thetas) {
            *amp += c * theta.scaled_basis_overlap(term.bits());
        }
        overlaps += samples as u64;
    }
    let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    FixedRun {
        value: total / samples.max(1) as f64,
        overlaps,
    }
}

/// Average of `2^t |<theta|psi>|^2` over all `4^t` diagonals with the
/// couplings of `couplings` held fixed. Equals `<psi|psi>` exactly.
pub fn exhaustive_diagonal_average(
    d: &SparseDecomposition,
    couplings: &QuadraticFormZ4,
) -> Result<f64> {
    let t = d.t;
    if couplings.vars() != t {
        return Err(Error::DimensionMismatch {
            left: couplings.vars(),
            right: t,
        });
    }
    if t > EXHAUSTIVE_MAX_QUBITS {
        return Err(Error::Size {
            what: "exhaustive-diagonal qubit count",
            got: t,
            limit: EXHAUSTIVE_MAX_QUBITS,
        });
    }
    let mut form = couplings.clone();
    let total = 1u64 << (2 * t);
    let mut sum = 0.0;
    for code in 0..total {
        for j in 0..t {
            form.set_diag(j, ((code >> (2 * j)) & 3) as u8);
        }
        sum += sample_value(&EquatorialState::new(form.clone()), d);
    }
    Ok(sum / total as f64)
}
