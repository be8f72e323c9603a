//! Closed-form description of the diagonal magic states `|D_phi>^{(x)t}`.
//!
//! Each qubit of the target is written as `c0 |0> + c1 |+>`, where the two
//! coefficients come from the tilde-basis states and already include the
//! `(2 cos(pi/8))^{-1}` normalization. Summing the tensor products of these
//! two-term expansions over all `2^t` tilde strings reproduces the target.
//!
//! Dense vectors use little-endian qubit order: bit `j` of an amplitude
//! index is the computational-basis value of qubit `j`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::stab_terms::ProductStabTerm;

/// Largest qubit count for which dense vectors are built (`2^20` amplitudes).
pub const DENSE_MAX_QUBITS: usize = 20;

/// Tolerance used to recognise `phi = pi/4`.
pub const PI_OVER_4_TOLERANCE: f64 = 1e-12;

/// Angle parameter of the diagonal state, strictly inside `(0, pi/2)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Phi(f64);

impl Phi {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value < FRAC_PI_2 {
            Ok(Phi(value))
        } else {
            Err(Error::Domain(format!(
                "phi = {value} must lie strictly inside (0, pi/2)"
            )))
        }
    }

    /// The H/T magic-state angle.
    pub fn pi_over_4() -> Self {
        Phi(FRAC_PI_4)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_pi_over_4(self) -> bool {
        (self.0 - FRAC_PI_4).abs() <= PI_OVER_4_TOLERANCE
    }
}

/// Per-qubit coefficients of `|0>` and `|+>` in the tilde expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TildeCoeffs {
    pub zero: Complex64,
    pub plus: Complex64,
}

impl TildeCoeffs {
    /// `|c0| + |c1|`, the per-qubit L1 norm.
    pub fn l1(&self) -> f64 {
        self.zero.norm() + self.plus.norm()
    }

    /// Probability that an L1 sample picks `|+>` on a given qubit.
    pub fn plus_probability(&self) -> f64 {
        self.plus.norm() / self.l1()
    }

    /// Coefficient for tilde bit `bit` (false = `|0>`, true = `|+>`).
    pub fn get(&self, bit: bool) -> Complex64 {
        if bit {
            self.plus
        } else {
            self.zero
        }
    }
}

fn two_nu() -> f64 {
    2.0 * FRAC_PI_8.cos()
}

/// Tilde coefficients obtained by evaluating the complex prefactors of the
/// tilde states directly.
pub fn tilde_coeffs(phi: Phi) -> TildeCoeffs {
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let e_m_pi4 = Complex64::from_polar(1.0, -FRAC_PI_4);
    let e_phi = Complex64::from_polar(1.0, phi.value());
    let pref = i * FRAC_1_SQRT_2;
    let alpha0 = pref * (-i + e_m_pi4) * (-i + e_phi);
    let alpha1 = pref * (one + e_m_pi4) * (one - e_phi);
    TildeCoeffs {
        zero: alpha0 / two_nu(),
        plus: alpha1 / two_nu(),
    }
}

fn check_qubits(t: usize) -> Result<()> {
    if t == 0 {
        Err(Error::Domain("qubit count t must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Stabilizer extent `(sqrt(1 - sin phi) + sqrt(1 - cos phi))^{2t}`.
pub fn extent(phi: Phi, t: usize) -> Result<f64> {
    check_qubits(t)?;
    let per_qubit = (1.0 - phi.value().sin()).sqrt() + (1.0 - phi.value().cos()).sqrt();
    Ok(per_qubit.powi(2 * t as i32))
}

/// `||c||_1 = (|c0| + |c1|)^t`, the square root of the extent.
pub fn l1_norm(phi: Phi, t: usize) -> Result<f64> {
    check_qubits(t)?;
    let per_qubit = (1.0 - phi.value().sin()).sqrt() + (1.0 - phi.value().cos()).sqrt();
    Ok(per_qubit.powi(t as i32))
}

/// A dense state vector of `2^t` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    t: usize,
    amplitudes: Vec<Complex64>,
}

impl DenseState {
    pub fn zeros(t: usize) -> Result<Self> {
        if t > DENSE_MAX_QUBITS {
            return Err(Error::Size {
                what: "dense qubit count",
                got: t,
                limit: DENSE_MAX_QUBITS,
            });
        }
        Ok(DenseState {
            t,
            amplitudes: vec![Complex64::new(0.0, 0.0); 1 << t],
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::Domain(format!(
                "dense state length {len} is not a power of two"
            )));
        }
        let t = len.trailing_zeros() as usize;
        if t > DENSE_MAX_QUBITS {
            return Err(Error::Size {
                what: "dense qubit count",
                got: t,
                limit: DENSE_MAX_QUBITS,
            });
        }
        Ok(DenseState { t, amplitudes })
    }

    pub fn qubits(&self) -> usize {
        self.t
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &DenseState) -> Result<Complex64> {
        if self.t != other.t {
            return Err(Error::DimensionMismatch {
                left: self.t,
                right: other.t,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &DenseState) -> Result<f64> {
        if self.t != other.t {
            return Err(Error::DimensionMismatch {
                left: self.t,
                right: other.t,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `||self - other||^2`.
    pub fn distance_sqr(&self, other: &DenseState) -> Result<f64> {
        if self.t != other.t {
            return Err(Error::DimensionMismatch {
                left: self.t,
                right: other.t,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum())
    }

    /// Tensor power of a single-qubit vector.
    pub fn product(single: [Complex64; 2], t: usize) -> Result<Self> {
        let mut state = DenseState::zeros(t)?;
        for (index, amp) in state.amplitudes.iter_mut().enumerate() {
            *amp = (0..t).fold(Complex64::new(1.0, 0.0), |acc, q| {
                acc * single[(index >> q) & 1]
            });
        }
        Ok(state)
    }
}

/// The single-qubit factor `c0 |0> + c1 |+>` of the target.
pub fn target_qubit(phi: Phi) -> [Complex64; 2] {
    let c = tilde_coeffs(phi);
    [c.zero + c.plus * FRAC_1_SQRT_2, c.plus * FRAC_1_SQRT_2]
}

/// Dense target `|D_phi>^{(x)t}` for `t <= 20`.
pub fn target_dense(phi: Phi, t: usize) -> Result<DenseState> {
    check_qubits(t)?;
    DenseState::product(target_qubit(phi), t)
}

/// Outcome of comparing two single-qubit vectors entrywise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationCheck {
    pub holds: bool,
    pub max_deviation: f64,
}

const RELATION_TOLERANCE: f64 = 1e-12;

fn compare(lhs: [Complex64; 2], rhs: [Complex64; 2]) -> RelationCheck {
    let max_deviation = lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    RelationCheck {
        holds: max_deviation <= RELATION_TOLERANCE,
        max_deviation,
    }
}

/// `e^{i phase} S H |T>` with `|T> = (|0> + e^{i pi/4}|1>)/sqrt 2`.
pub fn phased_sh_t(phase: f64) -> [Complex64; 2] {
    let t_state = [
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4),
    ];
    let h0 = (t_state[0] + t_state[1]) * FRAC_1_SQRT_2;
    let h1 = (t_state[0] - t_state[1]) * FRAC_1_SQRT_2;
    let s1 = h1 * Complex64::i();
    let g = Complex64::from_polar(1.0, phase);
    [g * h0, g * s1]
}

/// `(|0> + sqrt(i) |1>)/sqrt 2`.
pub fn sqrt_i_form() -> [Complex64; 2] {
    [
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4),
    ]
}

/// Checks `e^{-i pi/8} S H |T>` against a single-qubit vector.
pub fn h_magic_relation_check_against(rhs: [Complex64; 2], phase: f64) -> RelationCheck {
    compare(phased_sh_t(phase), rhs)
}

/// Both readings of the H-state relation at the canonical phase `-pi/8`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HMagicReport {
    /// Against the dense target factor at `phi = pi/4`.
    pub versus_target: RelationCheck,
    /// Against `(|0> + sqrt(i)|1>)/sqrt 2`.
    pub versus_sqrt_i_form: RelationCheck,
}

/// Evaluates `e^{-i pi/8} S H |T>` with 2-dim dense vectors.
///
/// The product equals `cos(pi/8)|0> + sin(pi/8)|1>`, which is the target
/// factor at `phi = pi/4`; it is *not* entrywise equal to
/// `(|0> + sqrt(i)|1>)/sqrt 2`. Both comparisons are reported.
pub fn h_magic_relation_check() -> HMagicReport {
    HMagicReport {
        versus_target: h_magic_relation_check_against(target_qubit(Phi::pi_over_4()), -FRAC_PI_8),
        versus_sqrt_i_form: h_magic_relation_check_against(sqrt_i_form(), -FRAC_PI_8),
    }
}

/// Per-qubit overlaps `<0|D_phi>` and `<+|D_phi>`.
pub fn qubit_target_overlaps(phi: Phi) -> (Complex64, Complex64) {
    let c = tilde_coeffs(phi);
    (
        c.zero + c.plus * FRAC_1_SQRT_2,
        c.zero * FRAC_1_SQRT_2 + c.plus,
    )
}

/// `<omega|D_phi^{(x)t}>` for a term's normalized state `omega = u |bits>`,
/// with `u` the unit phase of the term coefficient. O(t).
pub fn target_overlap(term: &ProductStabTerm, phi: Phi) -> Complex64 {
    let (on_zero, on_plus) = qubit_target_overlaps(phi);
    let plus = term.bits().count_ones() as i32;
    let zero = term.bits().len() as i32 - plus;
    term.unit_phase().conj() * on_zero.powi(zero) * on_plus.powi(plus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stab_terms::BitString;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn phi_domain() {
        assert!(Phi::new(0.0).is_err());
        assert!(Phi::new(FRAC_PI_2).is_err());
        assert!(Phi::new(f64::NAN).is_err());
        assert!(Phi::new(1.0).is_ok());
        assert!(Phi::new(FRAC_PI_4 + 1e-13).unwrap().is_pi_over_4());
        assert!(!Phi::new(1.0).unwrap().is_pi_over_4());
    }

    #[test]
    fn tilde_coeffs_at_pi_over_4() {
        let c = tilde_coeffs(Phi::pi_over_4());
        let expected = (1.0 - 2f64.sqrt() / 2.0).sqrt();
        assert!(close(c.zero.re, expected, 1e-12));
        assert!(close(c.plus.re, expected, 1e-12));
        assert!(c.zero.im.abs() < 1e-12 && c.plus.im.abs() < 1e-12);
        assert!(close(c.zero.re, 0.541196, 1e-6));
        assert!(close(c.l1().powi(2), 4.0 - 2.0 * 2f64.sqrt(), 1e-12));
    }

    #[test]
    fn tilde_magnitudes_match_closed_form_on_grid() {
        for i in 1..64 {
            let phi = Phi::new(FRAC_PI_2 * i as f64 / 64.0).unwrap();
            let c = tilde_coeffs(phi);
            assert!(close(
                c.zero.norm(),
                (1.0 - phi.value().sin()).sqrt(),
                1e-12
            ));
            assert!(close(
                c.plus.norm(),
                (1.0 - phi.value().cos()).sqrt(),
                1e-12
            ));
            assert!(close(c.l1().powi(2), extent(phi, 1).unwrap(), 1e-12));
        }
    }

    #[test]
    fn tilde_limit_near_pi_over_2() {
        let c = tilde_coeffs(Phi::new(FRAC_PI_2 - 1e-9).unwrap());
        assert!(c.zero.norm() < 1e-4);
        assert!(close(c.plus.norm(), 1.0, 1e-8));
    }

    #[test]
    fn extent_values() {
        let phi = Phi::pi_over_4();
        let e1 = extent(phi, 1).unwrap();
        assert!(close(e1, 1.1715729, 1e-7));
        assert!(close(e1.log2(), 0.228447, 1e-6));
        assert!(close(extent(phi, 10).unwrap(), 4.872, 1e-3));
        assert!(extent(phi, 0).is_err());
        assert!(close(
            l1_norm(phi, 1).unwrap(),
            1.0 / FRAC_PI_8.cos(),
            1e-12
        ));
        assert!(close(l1_norm(phi, 10).unwrap(), 2.2073, 1e-4));
    }

    #[test]
    fn extent_is_multiplicative() {
        for &p in &[0.1, 0.5, FRAC_PI_4, 1.2, 1.5] {
            let phi = Phi::new(p).unwrap();
            let e1 = extent(phi, 1).unwrap();
            for t in 1..=64 {
                let et = extent(phi, t).unwrap();
                assert!(((et - e1.powi(t as i32)) / et).abs() < 1e-12);
                let l1 = l1_norm(phi, t).unwrap();
                assert!(((l1 * l1 - et) / et).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn target_dense_examples() {
        let d = target_dense(Phi::pi_over_4(), 1).unwrap();
        assert!(close(d.amplitudes()[0].re, FRAC_PI_8.cos(), 1e-12));
        assert!(close(d.amplitudes()[1].re, FRAC_PI_8.sin(), 1e-12));
        let d2 = target_dense(Phi::pi_over_4(), 2).unwrap();
        assert!(close(d2.norm_sqr(), 1.0, 1e-10));
        assert!(close(
            d2.amplitudes()[3].re,
            FRAC_PI_8.sin() * FRAC_PI_8.sin(),
            1e-12
        ));
        let d3 = target_dense(Phi::new(PI / 3.0).unwrap(), 1).unwrap();
        assert!(close(d3.norm_sqr(), 1.0, 1e-10));
        assert!(target_dense(Phi::pi_over_4(), 21).is_err());
    }

    #[test]
    fn h_magic_relation() {
        let report = h_magic_relation_check();
        assert!(report.versus_target.holds);
        // The sqrt(i) form differs by more than a phase: |cos(pi/8) - 1/sqrt 2|.
        assert!(!report.versus_sqrt_i_form.holds);
        let expected = (FRAC_PI_8.cos() - FRAC_1_SQRT_2)
            .abs()
            .max((Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4) - FRAC_PI_8.sin()).norm());
        assert!(close(
            report.versus_sqrt_i_form.max_deviation,
            expected,
            1e-12
        ));
        let perturbed = h_magic_relation_check_against(target_qubit(Phi::pi_over_4()), -FRAC_PI_4);
        assert!(!perturbed.holds);
        let v = phased_sh_t(-FRAC_PI_8);
        assert!(close(v[0].norm_sqr() + v[1].norm_sqr(), 1.0, 1e-12));
    }

    #[test]
    fn target_overlap_examples() {
        let phi = Phi::pi_over_4();
        let zero = ProductStabTerm::new(BitString::zeros(1), Complex64::new(1.0, 0.0));
        assert!(close(target_overlap(&zero, phi).re, 0.92388, 1e-5));
        let plus = ProductStabTerm::new(BitString::parse("1").unwrap(), Complex64::new(1.0, 0.0));
        let expected = (FRAC_PI_8.cos() + FRAC_PI_8.sin()) * FRAC_1_SQRT_2;
        assert!(close(target_overlap(&plus, phi).re, expected, 1e-12));
        let zero3 = ProductStabTerm::new(BitString::zeros(3), Complex64::new(2.0, 0.0));
        assert!(close(
            target_overlap(&zero3, phi).re,
            FRAC_PI_8.cos().powi(3),
            1e-12
        ));
    }
}
