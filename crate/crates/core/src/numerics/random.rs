//! Random matrices for tests, fixtures and Monte Carlo sampling.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::ComplexMatrix;

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    ComplexMatrix::from_vec(rows, cols, data).expect("finite gaussian entries")
}

/// Haar-random unitary via Gram–Schmidt QR of a Ginibre matrix with the
/// diagonal phase correction of Mezzadri.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    let mut q = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut v = g.col(j);
        for _ in 0..2 {
            for k in 0..j {
                let qk = q.col(k);
                let p: Complex64 = qk.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(&qk) {
                    *x -= p * y;
                }
            }
        }
        let r = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // R_jj = r is already positive, so Mezzadri's phase fix is implicit.
        for x in v.iter_mut() {
            *x /= r;
        }
        q.set_col(j, &v);
    }
    q
}

/// First `k` columns of a Haar-random `n×n` unitary.
pub fn haar_isometry<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> ComplexMatrix {
    haar_unitary(rng, n).block(0, 0, n, k)
}

/// Random PSD matrix `B†B` with Gaussian `B`.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let b = gaussian_matrix(rng, n, n);
    (&b.adjoint() * &b).hermitian_part()
}

/// Random full-rank density matrix (Hilbert–Schmidt measure).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let a = random_psd(rng, n);
    let t = a.trace().re;
    a.scale_re(1.0 / t)
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    gaussian_matrix(rng, n, n).hermitian_part()
}
