//! Closed-form quadratic Gauss sums over Z4 against brute-force enumeration.
//!
//! cargo run --example gauss_sums

use std::time::Instant;

use corrsparse::gauss_sum::{gauss_brute, gauss_eval, QuadraticFormZ4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> corrsparse::Result<()> {
    // q(x) = x0 + x1 + 2 x0 x1
    let form = QuadraticFormZ4::from_parts(&[1, 1], &[(0, 1)])?;
    println!(
        "two-variable example: {:?} = {}",
        gauss_eval(&form),
        gauss_brute(&form)?
    );

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for m in [4, 10, 16] {
        let form = QuadraticFormZ4::random(m, &mut rng);
        let fast = gauss_eval(&form);
        println!(
            "m = {m:>2}: elimination {:>8.3} brute {:>8.3}",
            fast.to_complex(),
            gauss_brute(&form)?
        );
    }

    for m in [16, 32, 64, 128, 256] {
        let forms: Vec<_> = (0..200)
            .map(|_| QuadraticFormZ4::random(m, &mut rng))
            .collect();
        let start = Instant::now();
        let zeros = forms.iter().filter(|f| gauss_eval(f).is_zero()).count();
        let per = start.elapsed().as_secs_f64() / forms.len() as f64;
        println!(
            "m = {m:>3}: {:.2} us per sum, {zeros} of 200 vanish",
            per * 1e6
        );
    }
    Ok(())
}
