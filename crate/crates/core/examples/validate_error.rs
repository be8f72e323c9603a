//! Monte Carlo expected squared error for both sampling modes.
//!
//! cargo run --release --example validate_error -- [t] [delta] [runs]

use corrsparse::validate::{mc_expected_error, ValidationConfig};
use corrsparse::SamplingMode;

fn main() -> corrsparse::Result<()> {
    let mut args = std::env::args().skip(1);
    let t: usize = args.next().map_or(8, |s| s.parse().expect("t"));
    let delta: f64 = args.next().map_or(0.3, |s| s.parse().expect("delta"));
    let runs: usize = args.next().map_or(500, |s| s.parse().expect("runs"));

    for mode in SamplingMode::ALL {
        let cfg = ValidationConfig::new(t, delta, mode, runs, 2024);
        match mc_expected_error(&cfg) {
            Ok(report) => println!("{report}"),
            Err(e) => println!("{mode}: {e}\n"),
        }
    }
    Ok(())
}
