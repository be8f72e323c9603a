//! Exact quadratic exponential sums `sum_{x in F_2^m} i^{q(x)}`.
//!
//! `q(x) = sum_j d_j x_j + 2 sum_{j<k} J_jk x_j x_k (mod 4)`. The sum is
//! always zero or `2^{p/2} e^{i pi b/4}`, and is computed by eliminating one
//! variable at a time:
//!
//! * odd `d_1`: summing `x_1` gives `sqrt 2 * w8^{+-1} * i^{-+l(x)}` where `l`
//!   is the linear form of `x_1`'s couplings; the parity `l` is lifted to
//!   `Z_4` with `x XOR y = x + y - 2xy` and folded back into the form;
//! * even `d_1`: summing `x_1` gives `2 * [l(x) = d_1/2]`; a constant `l`
//!   either contributes 2 or makes the whole sum zero, otherwise the lowest
//!   variable of `l` is solved for and substituted.
//!
//! Each elimination touches O(m) adjacency rows of `ceil(m/64)` words.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Largest `m` accepted by [`gauss_brute`].
pub const BRUTE_MAX_VARS: usize = 20;

/// Quadratic form over `Z_4` on `F_2^m`.
///
/// Couplings are stored as a symmetric adjacency bit matrix with a zero
/// diagonal, one row of `ceil(m/64)` words per variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticFormZ4 {
    m: usize,
    words: usize,
    diag: Vec<u8>,
    adj: Vec<u64>,
}

impl QuadraticFormZ4 {
    pub fn new(m: usize) -> Self {
        let words = m.div_ceil(64).max(1);
        QuadraticFormZ4 {
            m,
            words,
            diag: vec![0; m],
            adj: vec![0; m * words],
        }
    }

    /// Builds a form from its diagonal (values taken mod 4) and a list of
    /// coupled pairs `(j, k)`, `j != k`.
    pub fn from_parts(diag: &[u8], couplings: &[(usize, usize)]) -> Result<Self> {
        let mut form = QuadraticFormZ4::new(diag.len());
        for (j, &d) in diag.iter().enumerate() {
            form.set_diag(j, d);
        }
        for &(j, k) in couplings {
            if j == k || j >= form.m || k >= form.m {
                return Err(Error::Domain(format!(
                    "invalid coupling ({j}, {k}) for {} variables",
                    form.m
                )));
            }
            form.set_coupling(j, k, true);
        }
        Ok(form)
    }

    /// Uniform `d in Z_4^m` and uniform strictly-upper `J`.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let mut form = QuadraticFormZ4::new(m);
        for j in 0..m {
            form.diag[j] = rng.random_range(0..4u8);
        }
        for j in 0..m {
            for k in j + 1..m {
                if rng.random::<bool>() {
                    form.set_coupling(j, k, true);
                }
            }
        }
        form
    }

    pub fn vars(&self) -> usize {
        self.m
    }

    pub fn diag(&self, j: usize) -> u8 {
        self.diag[j]
    }

    pub fn diagonal(&self) -> &[u8] {
        &self.diag
    }

    pub fn set_diag(&mut self, j: usize, value: u8) {
        self.diag[j] = value & 3;
    }

    pub fn coupling(&self, j: usize, k: usize) -> bool {
        (self.adj[j * self.words + k / 64] >> (k % 64)) & 1 == 1
    }

    pub fn set_coupling(&mut self, j: usize, k: usize, value: bool) {
        assert!(j != k, "couplings are off-diagonal");
        for (r, c) in [(j, k), (k, j)] {
            let w = &mut self.adj[r * self.words + c / 64];
            if value {
                *w |= 1 << (c % 64);
            } else {
                *w &= !(1 << (c % 64));
            }
        }
    }

    fn row(&self, j: usize) -> &[u64] {
        &self.adj[j * self.words..(j + 1) * self.words]
    }

    /// `q(x) mod 4` with `x` given as a bit per variable.
    pub fn value(&self, x: &[bool]) -> u8 {
        assert_eq!(x.len(), self.m);
        let mut q = 0u32;
        for j in 0..self.m {
            if !x[j] {
                continue;
            }
            q += self.diag[j] as u32;
            for (k, &xk) in x.iter().enumerate().skip(j + 1) {
                if xk && self.coupling(j, k) {
                    q += 2;
                }
            }
        }
        (q & 3) as u8
    }

    /// `q(x) mod 4` for `m <= 64`, `x` as a little-endian word.
    pub fn value_word(&self, x: u64) -> u8 {
        debug_assert!(self.m <= 64);
        let mut q = 0u32;
        let mut rest = x;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            q += self.diag[j] as u32;
            // Each coupled pair inside the support is counted from both ends.
            q += (self.adj[j] & x).count_ones();
        }
        (q & 3) as u8
    }
}

/// An exact value `0` or `2^{p/2} e^{i pi b / 4}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiscreteComplex {
    Zero,
    Polar {
        /// Magnitude is `2^{sqrt2_exp / 2}`.
        sqrt2_exp: u32,
        /// Phase is `e^{i pi octant / 4}`, `octant` in `0..8`.
        octant: u8,
    },
}

const OCTANT_PHASES: [Complex64; 8] = {
    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;
    [
        Complex64::new(1.0, 0.0),
        Complex64::new(H, H),
        Complex64::new(0.0, 1.0),
        Complex64::new(-H, H),
        Complex64::new(-1.0, 0.0),
        Complex64::new(-H, -H),
        Complex64::new(0.0, -1.0),
        Complex64::new(H, -H),
    ]
};

/// `e^{i pi octant / 4}`.
pub fn octant_phase(octant: u8) -> Complex64 {
    OCTANT_PHASES[(octant & 7) as usize]
}

/// `2^{e/2}` for a signed exponent.
pub fn sqrt2_pow(e: i32) -> f64 {
    let half = e.div_euclid(2);
    let base = 2f64.powi(half);
    if e.rem_euclid(2) == 1 {
        base * SQRT_2
    } else {
        base
    }
}

impl DiscreteComplex {
    pub fn new(sqrt2_exp: u32, octant: u32) -> Self {
        DiscreteComplex::Polar {
            sqrt2_exp,
            octant: (octant % 8) as u8,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, DiscreteComplex::Zero)
    }

    pub fn conj(self) -> Self {
        match self {
            DiscreteComplex::Zero => DiscreteComplex::Zero,
            DiscreteComplex::Polar { sqrt2_exp, octant } => DiscreteComplex::Polar {
                sqrt2_exp,
                octant: (8 - octant) & 7,
            },
        }
    }

    pub fn magnitude(&self) -> f64 {
        match *self {
            DiscreteComplex::Zero => 0.0,
            DiscreteComplex::Polar { sqrt2_exp, .. } => sqrt2_pow(sqrt2_exp as i32),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match *self {
            DiscreteComplex::Zero => Complex64::new(0.0, 0.0),
            DiscreteComplex::Polar { sqrt2_exp, octant } => {
                octant_phase(octant) * sqrt2_pow(sqrt2_exp as i32)
            }
        }
    }

    /// The value times `2^{scale/2}` as a float.
    pub fn to_complex_scaled(&self, scale: i32) -> Complex64 {
        match *self {
            DiscreteComplex::Zero => Complex64::new(0.0, 0.0),
            DiscreteComplex::Polar { sqrt2_exp, octant } => {
                octant_phase(octant) * sqrt2_pow(sqrt2_exp as i32 + scale)
            }
        }
    }

    /// Normalizes a Gaussian integer `re + i im` into this representation,
    /// or `None` if it is not of the form `2^{p/2} w8^b`.
    pub fn from_gaussian(re: i64, im: i64) -> Option<Self> {
        if re == 0 && im == 0 {
            return Some(DiscreteComplex::Zero);
        }
        let pow2 = |v: i64| -> Option<u32> {
            let a = v.unsigned_abs();
            a.is_power_of_two().then(|| a.trailing_zeros())
        };
        if im == 0 {
            let e = pow2(re)?;
            return Some(DiscreteComplex::new(2 * e, if re > 0 { 0 } else { 4 }));
        }
        if re == 0 {
            let e = pow2(im)?;
            return Some(DiscreteComplex::new(2 * e, if im > 0 { 2 } else { 6 }));
        }
        if re.abs() != im.abs() {
            return None;
        }
        let e = pow2(re)?;
        let octant = match (re > 0, im > 0) {
            (true, true) => 1,
            (false, true) => 3,
            (false, false) => 5,
            (true, false) => 7,
        };
        Some(DiscreteComplex::new(2 * e + 1, octant))
    }
}

/// Running state of one elimination: accumulated `sqrt 2` power and octant.
struct Accum {
    p: u32,
    b: u8,
}

impl Accum {
    fn finish(self) -> DiscreteComplex {
        DiscreteComplex::new(self.p, self.b as u32)
    }
}

#[inline]
fn add4(x: &mut u8, v: u8) {
    *x = (*x + v) & 3;
}

/// Elimination for `m <= 64`: one word per adjacency row, `live` marks the
/// variables still being summed.
fn eliminate_small(diag: &mut [u8; 64], adj: &mut [u64; 64], mut live: u64) -> DiscreteComplex {
    #[inline]
    fn for_bits(mut set: u64, mut f: impl FnMut(usize)) {
        while set != 0 {
            f(set.trailing_zeros() as usize);
            set &= set - 1;
        }
    }
    #[inline]
    fn toggle_clique(adj: &mut [u64; 64], set: u64) {
        for_bits(set, |k| adj[k] ^= set & !(1u64 << k));
    }

    let mut acc = Accum { p: 0, b: 0 };
    while live != 0 {
        let v1 = live.trailing_zeros() as usize;
        live &= live - 1;
        let nbrs = adj[v1] & live;
        let d1 = diag[v1];
        if d1 & 1 == 1 {
            let shift = if d1 == 1 { 3 } else { 1 };
            acc.b = (acc.b + if d1 == 1 { 1 } else { 7 }) & 7;
            acc.p += 1;
            for_bits(nbrs, |k| add4(&mut diag[k], shift));
            toggle_clique(adj, nbrs);
            continue;
        }
        if nbrs == 0 {
            if d1 == 2 {
                return DiscreteComplex::Zero;
            }
            acc.p += 2;
            continue;
        }
        // Constraint: sum_{k in nbrs} x_k = a (mod 2); solve for v.
        let a = d1 >> 1;
        let v = nbrs.trailing_zeros() as usize;
        let rest = nbrs & (nbrs - 1);
        live &= !(1u64 << v);
        let dv = diag[v];
        let vn = adj[v] & live;
        acc.b = (acc.b + 2 * ((dv * a) & 3)) & 7;
        let lin = if a == 0 { dv } else { (4 - dv) & 3 };
        for_bits(rest, |z| add4(&mut diag[z], lin));
        if dv & 1 == 1 {
            toggle_clique(adj, rest);
        }
        if a == 1 {
            for_bits(vn, |k| add4(&mut diag[k], 2));
        }
        for_bits(rest, |z| adj[z] ^= vn & !(1u64 << z));
        for_bits(vn, |k| adj[k] ^= rest & !(1u64 << k));
        for_bits(rest & vn, |z| add4(&mut diag[z], 2));
        acc.p += 2;
    }
    acc.finish()
}

/// Multi-word elimination for any `m`.
fn eliminate_general(
    diag: &mut [u8],
    adj: &mut [u64],
    live: &mut [u64],
    words: usize,
) -> DiscreteComplex {
    fn lowest(set: &[u64]) -> Option<usize> {
        set.iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }
    fn bits(set: &[u64]) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &w) in set.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(i * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }
    fn clear(set: &mut [u64], j: usize) {
        set[j / 64] &= !(1u64 << (j % 64));
    }
    // row[k] ^= set \ {k}
    fn xor_row(adj: &mut [u64], words: usize, k: usize, set: &[u64]) {
        let row = &mut adj[k * words..(k + 1) * words];
        for (r, s) in row.iter_mut().zip(set) {
            *r ^= s;
        }
        // Undo the self bit if `set` contained k.
        if (set[k / 64] >> (k % 64)) & 1 == 1 {
            row[k / 64] ^= 1u64 << (k % 64);
        }
    }
    let masked = |adj: &[u64], j: usize, live: &[u64]| -> Vec<u64> {
        adj[j * words..(j + 1) * words]
            .iter()
            .zip(live)
            .map(|(a, l)| a & l)
            .collect()
    };

    let mut acc = Accum { p: 0, b: 0 };
    while let Some(v1) = lowest(live) {
        clear(live, v1);
        let nbrs = masked(adj, v1, live);
        let nbr_list = bits(&nbrs);
        let d1 = diag[v1];
        if d1 & 1 == 1 {
            let shift = if d1 == 1 { 3 } else { 1 };
            acc.b = (acc.b + if d1 == 1 { 1 } else { 7 }) & 7;
            acc.p += 1;
            for &k in &nbr_list {
                add4(&mut diag[k], shift);
                xor_row(adj, words, k, &nbrs);
            }
            continue;
        }
        let Some(&v) = nbr_list.first() else {
            if d1 == 2 {
                return DiscreteComplex::Zero;
            }
            acc.p += 2;
            continue;
        };
        let a = d1 >> 1;
        let mut rest = nbrs.clone();
        clear(&mut rest, v);
        clear(live, v);
        let rest_list = &nbr_list[1..];
        let dv = diag[v];
        let vn = masked(adj, v, live);
        let vn_list = bits(&vn);
        acc.b = (acc.b + 2 * ((dv * a) & 3)) & 7;
        let lin = if a == 0 { dv } else { (4 - dv) & 3 };
        for &z in rest_list {
            add4(&mut diag[z], lin);
        }
        if dv & 1 == 1 {
            for &z in rest_list {
                xor_row(adj, words, z, &rest);
            }
        }
        if a == 1 {
            for &k in &vn_list {
                add4(&mut diag[k], 2);
            }
        }
        for &z in rest_list {
            xor_row(adj, words, z, &vn);
        }
        for &k in &vn_list {
            xor_row(adj, words, k, &rest);
        }
        for &z in rest_list {
            if (vn[z / 64] >> (z % 64)) & 1 == 1 {
                add4(&mut diag[z], 2);
            }
        }
        acc.p += 2;
    }
    acc.finish()
}

/// Exact `sum_{x in F_2^m} i^{q(x)}` in O(m^3 / 64) word operations.
pub fn gauss_eval(form: &QuadraticFormZ4) -> DiscreteComplex {
    let all: Vec<u64> = (0..form.words)
        .map(|w| {
            let lo = w * 64;
            let n = form.m.saturating_sub(lo).min(64);
            if n == 64 {
                u64::MAX
            } else {
                (1u64 << n) - 1
            }
        })
        .collect();
    gauss_eval_restricted(form, &all)
}

/// Sum over the `x` supported inside `mask` (the other variables pinned to 0).
pub fn gauss_eval_restricted(form: &QuadraticFormZ4, mask: &[u64]) -> DiscreteComplex {
    if form.m <= 64 {
        let live = mask.first().copied().unwrap_or(0);
        let mut diag = [0u8; 64];
        let mut adj = [0u64; 64];
        let mut rest = live;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            diag[j] = form.diag[j];
            adj[j] = form.adj[j] & live;
        }
        eliminate_small(&mut diag, &mut adj, live)
    } else {
        gauss_eval_general(form, mask)
    }
}

/// The multi-word path regardless of `m`; exposed for cross-checking.
pub fn gauss_eval_general(form: &QuadraticFormZ4, mask: &[u64]) -> DiscreteComplex {
    let words = form.words;
    let mut live: Vec<u64> = (0..words)
        .map(|w| mask.get(w).copied().unwrap_or(0))
        .collect();
    let mut diag = form.diag.clone();
    let mut adj = vec![0u64; form.m * words];
    for j in 0..form.m {
        for (dst, (src, l)) in adj[j * words..(j + 1) * words]
            .iter_mut()
            .zip(form.row(j).iter().zip(&live))
        {
            *dst = src & l;
        }
    }
    if form.m > 0 && !form.m.is_multiple_of(64) {
        live[words - 1] &= (1u64 << (form.m % 64)) - 1;
    }
    eliminate_general(&mut diag, &mut adj, &mut live, words)
}

/// Integer counts `(re, im)` of `sum_x i^{q(x)}` by enumeration.
pub fn gauss_brute_exact(form: &QuadraticFormZ4) -> Result<(i64, i64)> {
    if form.m > BRUTE_MAX_VARS {
        return Err(Error::Size {
            what: "brute-force variable count",
            got: form.m,
            limit: BRUTE_MAX_VARS,
        });
    }
    let mut counts = [0i64; 4];
    let mut x = vec![false; form.m];
    for index in 0..1u64 << form.m {
        for (j, bit) in x.iter_mut().enumerate() {
            *bit = (index >> j) & 1 == 1;
        }
        counts[form.value(&x) as usize] += 1;
    }
    Ok((counts[0] - counts[2], counts[1] - counts[3]))
}

/// Direct `2^m`-term summation.
pub fn gauss_brute(form: &QuadraticFormZ4) -> Result<Complex64> {
    let (re, im) = gauss_brute_exact(form)?;
    Ok(Complex64::new(re as f64, im as f64))
}
