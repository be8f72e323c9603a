use std::time::Instant;

use corrsparse::gauss_sum::{
    gauss_brute_exact, gauss_eval, gauss_eval_general, gauss_eval_restricted, DiscreteComplex,
    QuadraticFormZ4,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Brute-force sum over the `x` supported inside `mask`.
fn brute_masked(form: &QuadraticFormZ4, mask: u64) -> (i64, i64) {
    let mut acc = [0i64; 4];
    let mut sub = mask;
    loop {
        acc[form.value_word(sub) as usize] += 1;
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }
    (acc[0] - acc[2], acc[1] - acc[3])
}

#[test]
fn elimination_equals_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a55);
    for m in 1..=12 {
        for _ in 0..1000 {
            let form = QuadraticFormZ4::random(m, &mut rng);
            let (re, im) = gauss_brute_exact(&form).unwrap();
            let expected =
                DiscreteComplex::from_gaussian(re, im).expect("brute sum has Gauss-sum shape");
            assert_eq!(gauss_eval(&form), expected, "m = {m}");
        }
    }
}

#[test]
fn outputs_have_power_of_sqrt2_magnitude() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for m in [3, 17, 40, 64, 65, 100] {
        for _ in 0..50 {
            let v = gauss_eval(&QuadraticFormZ4::random(m, &mut rng));
            let mag = v.magnitude();
            if !v.is_zero() {
                let p = 2.0 * mag.log2();
                assert!(
                    (p - p.round()).abs() < 1e-9 && p.round() <= 2.0 * m as f64,
                    "{v:?}"
                );
            }
        }
    }
}

proptest! {
    #[test]
    fn restricted_sums_match_brute(m in 1usize..=14, seed in any::<u64>(), mask in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let form = QuadraticFormZ4::random(m, &mut rng);
        let mask = mask & ((1u64 << m) - 1);
        let (re, im) = brute_masked(&form, mask);
        let got = gauss_eval_restricted(&form, &[mask]);
        prop_assert_eq!(Some(got), DiscreteComplex::from_gaussian(re, im));
        prop_assert_eq!(got, gauss_eval_general(&form, &[mask]));
    }

    #[test]
    fn word_paths_agree(m in 1usize..=64, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let form = QuadraticFormZ4::random(m, &mut rng);
        let all = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        prop_assert_eq!(gauss_eval(&form), gauss_eval_general(&form, &[all]));
    }
}

fn median_seconds(m: usize, rng: &mut ChaCha8Rng) -> f64 {
    let forms: Vec<_> = (0..40).map(|_| QuadraticFormZ4::random(m, rng)).collect();
    let mut times: Vec<f64> = (0..9)
        .map(|_| {
            let start = Instant::now();
            for f in &forms {
                std::hint::black_box(gauss_eval(f));
            }
            start.elapsed().as_secs_f64() / forms.len() as f64
        })
        .collect();
    times.sort_by(f64::total_cmp);
    times[times.len() / 2]
}

#[test]
fn runtime_grows_polynomially() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ms = [16usize, 32, 64, 128];
    let pts: Vec<(f64, f64)> = ms
        .iter()
        .map(|&m| ((m as f64).ln(), median_seconds(m, &mut rng).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    println!("fit exponent {slope:.3}");
    assert!(slope <= 3.5, "fit exponent {slope}");
}
