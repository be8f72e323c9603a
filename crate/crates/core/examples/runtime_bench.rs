//! Worst-case estimator runtime against t for both sampling modes.
//!
//! cargo run --release --example runtime_bench -- [t_min] [t_max] [L] [out_dir]

use std::path::PathBuf;

use corrsparse::bench::{run_benchmark, BenchConfig};
use corrsparse::SamplingMode;

fn main() -> corrsparse::Result<()> {
    let mut args = std::env::args().skip(1);
    let t_min: usize = args.next().map_or(14, |s| s.parse().expect("t_min"));
    let t_max: usize = args.next().map_or(22, |s| s.parse().expect("t_max"));
    let samples: usize = args.next().map_or(16, |s| s.parse().expect("L"));
    let out: PathBuf = args.next().map_or_else(
        || std::env::temp_dir().join("corrsparse_bench"),
        PathBuf::from,
    );

    let result = run_benchmark(&BenchConfig::new(t_min, t_max, samples, 42))?;
    println!(
        "{:>4} {:>6} {:>6} {:>12} {:>12} {:>8} {:>8}",
        "t", "k_iid", "k_corr", "iid_max_s", "corr_max_s", "ratio", "k_ratio"
    );
    for t in t_min..=t_max {
        let (Some((ki, ri)), Some((kc, rc))) = (
            result.worst_case(t, SamplingMode::Iid),
            result.worst_case(t, SamplingMode::Correlated),
        ) else {
            continue;
        };
        println!(
            "{t:>4} {ki:>6} {kc:>6} {ri:>12.6} {rc:>12.6} {:>8.3} {:>8.3}",
            rc / ri,
            kc as f64 / ki as f64
        );
    }
    for p in result.write_csvs(&out)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}
