//! Eigenvalues of small Hermitian matrices by cyclic Jacobi rotation.
//!
//! An n×n Hermitian `H = A + iB` is embedded as the real symmetric
//! `[[A, −B], [B, A]]`, whose spectrum is that of `H` with every eigenvalue
//! doubled. Only used on 2×2 and 4×4 inputs.

use super::matrix::ComplexMatrix;

const MAX_SWEEPS: usize = 64;

pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.dim();
    let m = 2 * n;
    let mut a = vec![0.0f64; m * m];
    for r in 0..n {
        for c in 0..n {
            let z = h[(r, c)];
            a[r * m + c] = z.re;
            a[(r + n) * m + (c + n)] = z.re;
            a[r * m + (c + n)] = -z.im;
            a[(r + n) * m + c] = z.im;
        }
    }
    jacobi(&mut a, m);
    let mut diag: Vec<f64> = (0..m).map(|i| a[i * m + i]).collect();
    diag.sort_by(f64::total_cmp);
    // Pairs are degenerate; keep one of each.
    diag.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

fn jacobi(a: &mut [f64], m: usize) {
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..m)
            .flat_map(|p| (0..m).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p * m + q] * a[p * m + q])
            .sum();
        let scale: f64 = a.iter().map(|x| x * x).sum();
        if off <= 1e-30 * scale.max(f64::MIN_POSITIVE) {
            return;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn pauli_y_spectrum() {
        let i = Complex64::new(0.0, 1.0);
        let z = Complex64::new(0.0, 0.0);
        let y = ComplexMatrix::from_entries(2, vec![z, -i, i, z]).unwrap();
        let ev = hermitian_eigenvalues(&y);
        assert!((ev[0] + 1.0).abs() < 1e-13);
        assert!((ev[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn diagonal_spectrum_is_sorted_diagonal() {
        let mut d = ComplexMatrix::zeros(4);
        for (k, v) in [0.3, -0.1, 0.7, 0.1].into_iter().enumerate() {
            d[(k, k)] = Complex64::new(v, 0.0);
        }
        let ev = hermitian_eigenvalues(&d);
        let want = [-0.1, 0.1, 0.3, 0.7];
        for (e, w) in ev.iter().zip(want) {
            assert!((e - w).abs() < 1e-14);
        }
    }
}
