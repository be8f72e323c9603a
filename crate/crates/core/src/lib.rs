//! Sparsified stabilizer decompositions of tensored diagonal magic states.
//!
//! The crate builds `k`-term approximations `psi` of `|D_phi>^{(x)t}` from
//! product stabilizer states by L1 sampling, either independently or in
//! correlated groups of a base string plus its single-bit flips, and provides
//! the machinery to measure them:
//!
//! - [`magic_states`]: tilde-basis coefficients, stabilizer extent, dense targets;
//! - [`stab_terms`]: bit-packed product terms, Gram inner products, JSON files;
//! - [`gauss_sum`]: exact `Z_4` quadratic exponential sums;
//! - [`sparsify`]: the i.i.d. and correlated samplers and `k` sizing;
//! - [`norms`]: exact Gram norm and the equatorial-state norm estimator;
//! - [`validate`]: dense and Monte Carlo checks of error, cross terms and tails;
//! - [`bench`]: norm-estimation runtime sweeps written as CSV;
//! - [`cli`]: the `corrsparse` command-line front end.
//!
//! ```
//! use corrsparse::magic_states::Phi;
//! use corrsparse::sparsify::{sparsify, SamplerConfig, SamplingMode};
//! use corrsparse::norms::gram_norm_exact;
//!
//! let cfg = SamplerConfig::new(Phi::pi_over_4(), 12, 0.2, SamplingMode::Correlated, 7);
//! let psi = sparsify(&cfg).unwrap();
//! assert_eq!(psi.k(), 65);
//! let norm = gram_norm_exact(&psi).unwrap();
//! assert!(norm.value > 1.0);
//! ```

pub mod bench;
pub mod cli;
pub mod error;
pub mod gauss_sum;
pub mod io;
pub mod magic_states;
pub mod norms;
pub mod rng;
pub mod sparsify;
pub mod stab_terms;
pub mod validate;

pub use error::{Error, Result};
pub use magic_states::Phi;
pub use sparsify::{SamplerConfig, SamplingMode};
pub use stab_terms::{ProductStabTerm, SparseDecomposition};
