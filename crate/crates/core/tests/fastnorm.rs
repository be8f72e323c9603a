use corrsparse::gauss_sum::QuadraticFormZ4;
use corrsparse::norms::{
    exhaustive_diagonal_average, fastnorm_seeded, fastnorm_values, gram_norm_exact, FastNormOptions,
};
use corrsparse::sparsify::{sparsify, SamplerConfig, SamplingMode};
use corrsparse::Phi;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn exhaustive_diagonals_reproduce_gram_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for t in [2, 4, 6] {
        for seed in 0..5 {
            let cfg = SamplerConfig::new(Phi::new(0.9).unwrap(), t, 0.4, SamplingMode::Iid, seed);
            let d = sparsify(&cfg).unwrap();
            let couplings = QuadraticFormZ4::random(t, &mut rng);
            let exact = gram_norm_exact(&d).unwrap().value;
            let avg = exhaustive_diagonal_average(&d, &couplings).unwrap();
            assert!((avg - exact).abs() < 1e-9, "t = {t}: {avg} vs {exact}");
        }
    }
}

#[test]
fn standard_error_scales_as_inverse_sqrt_l() {
    let cfg = SamplerConfig::new(Phi::pi_over_4(), 8, 0.3, SamplingMode::Iid, 5);
    let d = sparsify(&cfg).unwrap();
    let reps = 40u64;
    let mut pts = Vec::new();
    for l in [64usize, 256, 1024, 4096] {
        let means: Vec<f64> = (0..reps)
            .map(|r| {
                let v = fastnorm_values(&d, l, 1000 * l as u64 + r);
                v.iter().sum::<f64>() / l as f64
            })
            .collect();
        let mu = means.iter().sum::<f64>() / reps as f64;
        let sd = (means.iter().map(|m| (m - mu).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
        pts.push(((l as f64).ln(), sd.ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 0.5).abs() <= 0.1, "slope {slope}");
}

#[test]
fn seeded_estimate_is_reproducible() {
    let cfg = SamplerConfig::new(Phi::pi_over_4(), 10, 0.3, SamplingMode::Correlated, 8);
    let d = sparsify(&cfg).unwrap();
    let opts = FastNormOptions {
        samples: Some(500),
        ..FastNormOptions::new(0.05, 0.1)
    };
    let a = fastnorm_seeded(&d, &opts, 3).unwrap();
    let b = fastnorm_seeded(&d, &opts, 3).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.value, fastnorm_seeded(&d, &opts, 4).unwrap().value);
}
