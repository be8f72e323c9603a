//! Randomized norm estimation against the exact Gram sum.
//!
//! cargo run --example fastnorm -- [t] [epsilon] [pfail]

use corrsparse::norms::{default_samples, fastnorm_seeded, gram_norm_exact, FastNormOptions};
use corrsparse::sparsify::{self, SamplerConfig, SamplingMode};
use corrsparse::Phi;

fn main() -> corrsparse::Result<()> {
    let mut args = std::env::args().skip(1);
    let t: usize = args.next().map_or(12, |s| s.parse().expect("t"));
    let epsilon: f64 = args.next().map_or(0.05, |s| s.parse().expect("epsilon"));
    let pfail: f64 = args.next().map_or(0.1, |s| s.parse().expect("pfail"));

    let cfg = SamplerConfig::new(Phi::pi_over_4(), t, 0.2, SamplingMode::Iid, 3);
    let d = sparsify::sparsify(&cfg)?;
    let exact = gram_norm_exact(&d)?.value;
    println!("t = {t}, k = {}, exact norm {exact:.6}", d.k());
    println!("L = {}", default_samples(epsilon, pfail));

    let mut opts = FastNormOptions::new(epsilon, pfail);
    for seed in 0..5 {
        let est = fastnorm_seeded(&d, &opts, seed)?;
        println!(
            "seed {seed}: estimate {:.6} relative error {:+.4}",
            est.value,
            est.value / exact - 1.0
        );
    }
    opts.median_of_means = true;
    let est = fastnorm_seeded(&d, &opts, 99)?;
    println!("median of means: {:.6}", est.value);
    Ok(())
}
