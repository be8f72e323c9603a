//! Empirical tail-event frequency against the concentration bound.
//!
//! cargo run --release --example tail_bound -- [t] [delta] [runs]

use corrsparse::sparsify::gamma;
use corrsparse::validate::{mc_tail_check, tail_bound, ValidationConfig};
use corrsparse::SamplingMode;

fn main() -> corrsparse::Result<()> {
    let mut args = std::env::args().skip(1);
    let t: usize = args.next().map_or(30, |s| s.parse().expect("t"));
    let delta: f64 = args.next().map_or(0.5, |s| s.parse().expect("delta"));
    let runs: usize = args.next().map_or(200, |s| s.parse().expect("runs"));

    println!("{:>4} {:>10} {:>10}", "t", "iid", "correlated");
    for tt in (10..=60).step_by(10) {
        println!(
            "{tt:>4} {:>10.4} {:>10.4}",
            tail_bound(tt, delta, gamma(SamplingMode::Iid, tt)),
            tail_bound(tt, delta, gamma(SamplingMode::Correlated, tt))
        );
    }

    let cfg = ValidationConfig::new(t, delta, SamplingMode::Correlated, runs, 11);
    let r = mc_tail_check(&cfg)?;
    println!(
        "t = {t}, delta = {delta}: fraction {:.4} bound {:.4} -> {}",
        r.tail_fraction, r.tail_bound_value, r.tail_check
    );
    println!(
        "mean <psi|psi> - 1 = {:.4}, implied gamma {:.3}",
        r.mean_norm_gap, r.implied_gamma
    );
    Ok(())
}
