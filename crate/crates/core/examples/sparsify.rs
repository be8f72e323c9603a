//! Sample sizes and decompositions for both sampling modes.
//!
//! cargo run --example sparsify -- [t] [delta] [seed]

use corrsparse::sparsify::{self, sample_count, SamplerConfig, SamplingMode};
use corrsparse::validate::exact_error;
use corrsparse::Phi;

fn main() -> corrsparse::Result<()> {
    let mut args = std::env::args().skip(1);
    let t: usize = args.next().map_or(12, |s| s.parse().expect("t"));
    let delta: f64 = args.next().map_or(0.2, |s| s.parse().expect("delta"));
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("seed"));
    let phi = Phi::pi_over_4();

    for mode in SamplingMode::ALL {
        let count = sample_count(phi, t, delta, mode)?;
        let cfg = SamplerConfig::new(phi, t, delta, mode, seed);
        let d = sparsify::sparsify(&cfg)?;
        let err = exact_error(&d)?;
        println!(
            "{mode:<10} k = {:>5} (target {:>5}, groups {:?}) gamma = {:.4}  ||D - psi||^2 = {:.5}",
            d.k(),
            count.k_target,
            count.groups,
            d.gamma,
            err.value
        );
        for term in d.terms.iter().take(3) {
            println!("    {} {:.6}", term.bits(), term.coeff());
        }
    }

    let out = std::env::temp_dir().join("corrsparse_example.json");
    let cfg = SamplerConfig::new(phi, t, delta, SamplingMode::Correlated, seed);
    let d = sparsify::sparsify(&cfg)?;
    d.write_file(&out)?;
    let back = corrsparse::SparseDecomposition::read_file(&out)?;
    println!("round trip through {}: {}", out.display(), back == d);
    Ok(())
}
