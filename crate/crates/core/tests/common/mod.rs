#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use unsharp_lab::quantum::{ComplexMatrix, State};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_c(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_pure(rng: &mut impl Rng, dim: usize) -> State {
    let v: Vec<Complex64> = (0..dim).map(|_| gaussian_c(rng)).collect();
    State::pure_normalized(v).expect("nonzero vector")
}

/// `G G† / tr(G G†)` with `G` complex Ginibre; full rank almost surely.
pub fn random_mixed(rng: &mut impl Rng, dim: usize) -> State {
    let g = ComplexMatrix::from_entries(dim, (0..dim * dim).map(|_| gaussian_c(rng)).collect())
        .unwrap();
    let rho = g.mul(&g.adjoint()).unwrap();
    let tr = rho.trace().re;
    let mut rho = rho.scale(Complex64::new(1.0 / tr, 0.0));
    // Exact Hermiticity after rounding.
    for i in 0..dim {
        for j in i + 1..dim {
            let z = rho[(i, j)];
            rho[(j, i)] = z.conj();
        }
        rho[(i, i)] = Complex64::new(rho[(i, i)].re, 0.0);
    }
    State::mixed(rho).expect("Ginibre matrix is a valid density")
}

pub fn random_state(rng: &mut impl Rng, dim: usize) -> State {
    if rng.random_bool(0.5) {
        random_pure(rng, dim)
    } else {
        random_mixed(rng, dim)
    }
}

/// Random Hermitian matrix `(M + M†)/2` with Gaussian entries.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let m = ComplexMatrix::from_entries(dim, (0..dim * dim).map(|_| gaussian_c(rng)).collect())
        .unwrap();
    let mut h = m.add(&m.adjoint()).unwrap().scale(Complex64::new(0.5, 0.0));
    for i in 0..dim {
        h[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
    }
    h
}

pub fn random_unit(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}
