mod common;

use unsharp_lab::quantum::{bell_like_basis, BellLabel, State};
use unsharp_lab::sga::{
    bell_probabilities, classify, histogram, moments, sample_positions, tv_distance,
    unsharp_bell_sampling, Model, SgaConfig,
};

const N: usize = 1_000_000;

#[test]
fn p_hat_within_three_sigma() {
    for (k, p_up) in [0.1, 0.5, 0.73].into_iter().enumerate() {
        for model in [Model::Sharp, Model::Unsharp] {
            let cfg = SgaConfig {
                p_up,
                model,
                n_samples: N,
                seed: 100 + k as u64,
                ..SgaConfig::default()
            };
            let p_hat = classify(&sample_positions(&cfg).unwrap(), 0.0).p_plus_hat;
            let sd = (p_up * (1.0 - p_up) / N as f64).sqrt();
            assert!((p_hat - p_up).abs() <= 3.0 * sd, "{model:?} p_up={p_up}: {p_hat}");
        }
    }
}

#[test]
fn matched_models_are_indistinguishable() {
    let unsharp = SgaConfig {
        n_samples: N,
        seed: 11,
        ..SgaConfig::default()
    };
    let sharp = SgaConfig {
        seed: 12,
        ..unsharp.matched_sharp()
    };
    assert!((sharp.population_sd() - unsharp.population_sd()).abs() < 1e-15);
    let a = histogram(&sample_positions(&unsharp).unwrap(), 100, (-2.0, 2.0)).unwrap();
    let b = histogram(&sample_positions(&sharp).unwrap(), 100, (-2.0, 2.0)).unwrap();
    let tv = tv_distance(&a, &b).unwrap();
    assert!(tv < 0.01, "tv={tv}");
}

#[test]
fn variance_for_pure_populations() {
    for p_up in [0.0, 1.0] {
        let cfg = SgaConfig {
            p_up,
            n_samples: N,
            seed: 21,
            ..SgaConfig::default()
        };
        let m = moments(&sample_positions(&cfg).unwrap());
        let s = cfg.deflection_scale;
        let sigma2 = s * s * cfg.spin_sd * cfg.spin_sd + cfg.device_sd * cfg.device_sd;
        let var_sd = sigma2 * (2.0 / (N as f64 - 1.0)).sqrt();
        assert!((m.variance - sigma2).abs() <= 4.0 * var_sd, "p_up={p_up}: {}", m.variance);
        let mean = if p_up == 1.0 { s } else { -s };
        assert!((m.mean - mean).abs() <= 4.0 * (sigma2 / N as f64).sqrt());
    }
}

#[test]
fn counts_are_conserved() {
    let cfg = SgaConfig {
        n_samples: 200_000,
        seed: 5,
        device_sd: 0.6,
        ..SgaConfig::default()
    };
    let h = histogram(&sample_positions(&cfg).unwrap(), 37, (-1.5, 1.5)).unwrap();
    assert!(h.underflow > 0 && h.overflow > 0);
    assert_eq!(h.counts.iter().sum::<u64>() + h.underflow + h.overflow, 200_000);
    assert_eq!(h.n_total, 200_000);
}

#[test]
fn parallelism_does_not_change_samples() {
    let cfg = SgaConfig {
        n_samples: 300_000,
        seed: 77,
        ..SgaConfig::default()
    };
    let many = sample_positions(&cfg).unwrap();
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let other = pool.install(|| sample_positions(&cfg).unwrap());
        assert!(many.iter().zip(&other).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}

fn born_check(state: &State, seed: u64) {
    let n = 100_000;
    let probs = bell_probabilities(state).unwrap();
    let triples = unsharp_bell_sampling(state, 0.05, n, seed).unwrap();
    for (label, p) in BellLabel::ALL.iter().zip(probs) {
        let count = triples.iter().filter(|t| t.outcome == *label).count();
        let f = count as f64 / n as f64;
        let sd = (p * (1.0 - p) / n as f64).sqrt().max(1e-12);
        assert!((f - p).abs() <= 4.0 * sd, "{label:?}: {f} vs {p}");
    }
    // Mean of v_ZZ against Σ p λ_ZZ; spread adds 0.05² to the variance.
    let mean_zz: f64 = triples.iter().map(|t| t.v_zz).sum::<f64>() / n as f64;
    let want: f64 = BellLabel::ALL.iter().zip(probs).map(|(l, p)| p * l.eigenvalues().0).sum();
    let var = 1.0 - want * want + 0.05 * 0.05;
    assert!((mean_zz - want).abs() <= 4.0 * (var / n as f64).sqrt(), "{mean_zz} vs {want}");
    assert!(triples.iter().all(|t| t.v_yx == t.v_zz * t.v_xy));
}

#[test]
fn born_frequencies_and_product_rule() {
    born_check(&State::singlet(), 1);
    born_check(&bell_like_basis()[2].1, 2);
    let mut rng = common::rng(9);
    for k in 0..4 {
        born_check(&common::random_state(&mut rng, 4), 10 + k);
    }
}

#[test]
fn bell_basis_state_gives_its_own_outcome() {
    for (k, (label, s)) in bell_like_basis().iter().enumerate() {
        let triples = unsharp_bell_sampling(s, 0.0, 1000, k as u64).unwrap();
        let (zz, xy) = label.eigenvalues();
        assert!(triples.iter().all(|t| t.outcome == *label && t.v_zz == zz && t.v_xy == xy));
    }
}
