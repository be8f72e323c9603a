//! Product stabilizer terms and the decompositions built from them.
//!
//! A term is a complex coefficient times a tensor product of `|0>` and
//! `|+>` states, labelled by a tilde bit string (bit `j` set means qubit `j`
//! is `|+>`). Single-qubit overlaps are `<0|0> = <+|+> = 1` and
//! `<0|+> = 2^{-1/2}`, so the overlap of two normalized terms is
//! `2^{-d/2}` times their relative phase, with `d` the Hamming distance of
//! the labels.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::magic_states::{self, DenseState, Phi};

/// Largest `t` for which [`SparseDecomposition::exact_full`] enumerates all strings.
pub const EXACT_FULL_MAX_QUBITS: usize = 12;

/// A fixed-length bit string packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Builds from raw words; bits above `len` are cleared.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(len.div_ceil(64), 0);
        if !len.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        BitString { len, words }
    }

    /// Parses a `0`/`1` string, qubit 0 first.
    pub fn parse(s: &str) -> Result<Self> {
        let mut bits = BitString::zeros(s.len());
        for (j, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits.set(j, true),
                other => {
                    return Err(Error::Parse(format!(
                        "invalid character {other:?} at position {j} of bit string"
                    )))
                }
            }
        }
        Ok(bits)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, j: usize) -> bool {
        debug_assert!(j < self.len);
        (self.words[j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn set(&mut self, j: usize, value: bool) {
        debug_assert!(j < self.len);
        let mask = 1u64 << (j % 64);
        if value {
            self.words[j / 64] |= mask;
        } else {
            self.words[j / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, j: usize) {
        debug_assert!(j < self.len);
        self.words[j / 64] ^= 1u64 << (j % 64);
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Hamming distance via XOR + popcount.
    #[inline]
    pub fn hamming(&self, other: &BitString) -> u32 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }

    pub fn xor(&self, other: &BitString) -> BitString {
        BitString {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    /// Little-endian integer value; only meaningful for `len <= 64`.
    pub fn as_index(&self) -> usize {
        self.words.first().copied().unwrap_or(0) as usize
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            f.write_str(if self.get(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// `coeff * |bits>`, where `|bits>` is the normalized product state.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductStabTerm {
    bits: BitString,
    coeff: Complex64,
}

impl ProductStabTerm {
    pub fn new(bits: BitString, coeff: Complex64) -> Self {
        ProductStabTerm { bits, coeff }
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn coeff(&self) -> Complex64 {
        self.coeff
    }

    pub fn qubits(&self) -> usize {
        self.bits.len()
    }

    /// `coeff / |coeff|`, or 1 for a zero coefficient.
    pub fn unit_phase(&self) -> Complex64 {
        let n = self.coeff.norm();
        if n > 0.0 {
            self.coeff / n
        } else {
            Complex64::new(1.0, 0.0)
        }
    }
}

/// How a decomposition was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecompositionMode {
    Iid,
    Correlated,
    ExactFull,
}

impl fmt::Display for DecompositionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecompositionMode::Iid => "iid",
            DecompositionMode::Correlated => "correlated",
            DecompositionMode::ExactFull => "exact_full",
        })
    }
}

/// A `k`-term stabilizer approximation together with how it was sized and sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDecomposition {
    pub t: usize,
    pub phi: Phi,
    pub mode: DecompositionMode,
    pub delta: f64,
    pub gamma: f64,
    pub l1: f64,
    pub seed: u64,
    pub group_size: usize,
    pub terms: Vec<ProductStabTerm>,
}

impl SparseDecomposition {
    pub fn k(&self) -> usize {
        self.terms.len()
    }

    /// Every string of `F_2^t` with its exact coefficient `c_x`; `t <= 12`.
    pub fn exact_full(phi: Phi, t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::Domain("qubit count t must be at least 1".into()));
        }
        if t > EXACT_FULL_MAX_QUBITS {
            return Err(Error::Size {
                what: "exact_full qubit count",
                got: t,
                limit: EXACT_FULL_MAX_QUBITS,
            });
        }
        let c = magic_states::tilde_coeffs(phi);
        let terms = (0..1u64 << t)
            .map(|x| {
                let bits = BitString::from_words(t, vec![x]);
                let coeff =
                    (0..t).fold(Complex64::new(1.0, 0.0), |acc, j| acc * c.get(bits.get(j)));
                ProductStabTerm::new(bits, coeff)
            })
            .collect();
        Ok(SparseDecomposition {
            t,
            phi,
            mode: DecompositionMode::ExactFull,
            delta: 0.0,
            gamma: 0.0,
            l1: magic_states::l1_norm(phi, t)?,
            seed: 0,
            group_size: 1,
            terms,
        })
    }

    /// Structural checks shared by constructors and the file parser.
    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::Validation("t must be at least 1".into()));
        }
        for (i, term) in self.terms.iter().enumerate() {
            if term.qubits() != self.t {
                return Err(Error::Validation(format!(
                    "term {i} has {} bits but t = {}",
                    term.qubits(),
                    self.t
                )));
            }
            if !term.coeff.re.is_finite() || !term.coeff.im.is_finite() {
                return Err(Error::Validation(format!(
                    "term {i} has a non-finite coefficient"
                )));
            }
        }
        if self.group_size == 0 {
            return Err(Error::Validation("group_size must be positive".into()));
        }
        if self.mode == DecompositionMode::Correlated {
            if self.group_size != self.t + 1 {
                return Err(Error::Validation(format!(
                    "correlated decomposition must have group_size t + 1 = {}, got {}",
                    self.t + 1,
                    self.group_size
                )));
            }
            if self.k() == 0 || !self.k().is_multiple_of(self.group_size) {
                return Err(Error::Validation(format!(
                    "correlated decomposition has k = {} not a positive multiple of {}",
                    self.k(),
                    self.group_size
                )));
            }
        }
        Ok(())
    }

    /// Contiguous term groups (`group_size` terms each).
    pub fn groups(&self) -> std::slice::Chunks<'_, ProductStabTerm> {
        self.terms.chunks(self.group_size)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DecompositionFile::from(self))
            .expect("decomposition serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DecompositionFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_decomposition()
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json();
        text.push('\n');
        crate::io::write_atomic(path, text.as_bytes())
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        SparseDecomposition::from_json(&text)
    }
}

/// On-disk JSON layout of a decomposition.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecompositionFile {
    t: usize,
    phi: f64,
    mode: DecompositionMode,
    delta: f64,
    gamma: f64,
    k: usize,
    l1: f64,
    seed: String,
    group_size: usize,
    terms: Vec<TermRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRecord {
    bits: String,
    re: f64,
    im: f64,
}

impl From<&SparseDecomposition> for DecompositionFile {
    fn from(d: &SparseDecomposition) -> Self {
        DecompositionFile {
            t: d.t,
            phi: d.phi.value(),
            mode: d.mode,
            delta: d.delta,
            gamma: d.gamma,
            k: d.k(),
            l1: d.l1,
            seed: d.seed.to_string(),
            group_size: d.group_size,
            terms: d
                .terms
                .iter()
                .map(|term| TermRecord {
                    bits: term.bits.to_string(),
                    re: term.coeff.re,
                    im: term.coeff.im,
                })
                .collect(),
        }
    }
}

impl DecompositionFile {
    fn into_decomposition(self) -> Result<SparseDecomposition> {
        let phi = Phi::new(self.phi).map_err(|e| Error::Parse(format!("field `phi`: {e}")))?;
        let seed = self
            .seed
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("field `seed`: {e}")))?;
        if self.k != self.terms.len() {
            return Err(Error::Validation(format!(
                "field `k` = {} but `terms` holds {} entries",
                self.k,
                self.terms.len()
            )));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, rec) in self.terms.into_iter().enumerate() {
            if rec.bits.len() != self.t {
                return Err(Error::Validation(format!(
                    "terms[{i}].bits has length {} but t = {}",
                    rec.bits.len(),
                    self.t
                )));
            }
            let bits = BitString::parse(&rec.bits)
                .map_err(|e| Error::Parse(format!("terms[{i}].bits: {e}")))?;
            terms.push(ProductStabTerm::new(bits, Complex64::new(rec.re, rec.im)));
        }
        let d = SparseDecomposition {
            t: self.t,
            phi,
            mode: self.mode,
            delta: self.delta,
            gamma: self.gamma,
            l1: self.l1,
            seed,
            group_size: self.group_size,
            terms,
        };
        d.validate()?;
        Ok(d)
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        Err(Error::DimensionMismatch { left: a, right: b })
    } else {
        Ok(())
    }
}

/// `2^{-d/2}` for `d = 0..=t`.
pub(crate) fn overlap_table(t: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(t + 1);
    let mut v = 1.0;
    for _ in 0..=t {
        table.push(v);
        v *= FRAC_1_SQRT_2;
    }
    table
}

/// Overlap `<omega_a|omega_b>` of the two terms' normalized states
/// (unit phases only, magnitudes dropped).
pub fn term_overlap(a: &ProductStabTerm, b: &ProductStabTerm) -> Result<Complex64> {
    check_dims(a.qubits(), b.qubits())?;
    let d = a.bits.hamming(&b.bits) as i32;
    Ok(a.unit_phase().conj() * b.unit_phase() * FRAC_1_SQRT_2.powi(d))
}

/// Dense vector `sum_i coeff_i |bits_i>` for `t <= 20`.
pub fn dense_expand(d: &SparseDecomposition) -> Result<DenseState> {
    let t = d.t;
    let mut state = DenseState::zeros(t)?;
    let amps = state.amplitudes_mut();
    let table = overlap_table(t);
    for term in &d.terms {
        check_dims(term.qubits(), t)?;
        let plus = term.bits.as_index();
        let scale = term.coeff * table[term.bits.count_ones() as usize];
        // Support is every index whose set bits lie inside the |+> positions.
        let mut sub = plus;
        loop {
            amps[sub] += scale;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & plus;
        }
    }
    Ok(state)
}

/// Exact `<psi_1|psi_2> = sum_{i,j} conj(c_i) c_j 2^{-d_H/2}`.
///
/// Rows are reduced in parallel; each row sum is sequential and rows are
/// combined in index order, so the result does not depend on the thread count.
pub fn gram_dot(d1: &SparseDecomposition, d2: &SparseDecomposition) -> Result<Complex64> {
    check_dims(d1.t, d2.t)?;
    let table = overlap_table(d1.t);
    let rows: Vec<Complex64> = d1
        .terms
        .par_iter()
        .map(|a| {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in &d2.terms {
                acc += b.coeff * table[a.bits.hamming(&b.bits) as usize];
            }
            a.coeff.conj() * acc
        })
        .collect();
    Ok(rows.into_iter().sum())
}
