//! Singular value decomposition by one-sided (Hestenes) Jacobi rotations.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use super::ops::gram_schmidt_columns;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// `A = U · diag(singular_values) · V†` with `U` (m×m) and `V` (n×n) unitary
/// and singular values real, non-negative and descending.
///
/// Phase convention: for every index `k`, the first entry of column `k` of
/// `V` whose magnitude exceeds `1e-12` is real and non-negative, and the
/// matching column of `U` absorbs the phase.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    /// The `m×n` diagonal factor.
    pub fn d(&self) -> ComplexMatrix {
        let mut d = ComplexMatrix::zeros(self.u.cols(), self.v.cols());
        for (i, &s) in self.singular_values.iter().enumerate() {
            d[(i, i)] = Complex64::new(s, 0.0);
        }
        d
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        &(&self.u * &self.d()) * &self.v.adjoint()
    }
}

pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    if a.rows() < a.cols() {
        // A† = V Σ U†
        let t = svd(&a.adjoint())?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    let (m, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(n);

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for k in 0..m {
                    alpha += w[(k, i)].norm_sqr();
                    beta += w[(k, j)].norm_sqr();
                    gamma += w[(k, i)].conj() * w[(k, j)];
                }
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let pc = phase.conj();
                for k in 0..m {
                    let wi = w[(k, i)];
                    let wj = w[(k, j)] * pc;
                    w[(k, i)] = wi * cs - wj * sn;
                    w[(k, j)] = wi * sn + wj * cs;
                }
                for k in 0..n {
                    let vi = v[(k, i)];
                    let vj = v[(k, j)] * pc;
                    v[(k, i)] = vi * cs - vj * sn;
                    v[(k, j)] = vi * sn + vj * cs;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure("one-sided Jacobi SVD"));
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|k| w[(k, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));

    let smax = norms.iter().cloned().fold(0.0, f64::max);
    let tiny = smax * 1e-300_f64.max(f64::EPSILON * f64::EPSILON);
    let mut singular_values = Vec::with_capacity(n);
    let mut u_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut v_sorted = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        singular_values.push(s);
        v_sorted.set_col(dst, &v.col(src));
        if s > tiny && s > 0.0 {
            u_cols.push((0..m).map(|k| w[(k, src)] / s).collect());
        } else {
            u_cols.push(vec![ZERO; m]);
        }
    }

    // Fix phases: first significant entry of each V column real non-negative.
    for (k, u_col) in u_cols.iter_mut().enumerate() {
        let col = v_sorted.col(k);
        if let Some(z) = col.iter().find(|z| z.norm() > 1e-12) {
            let ph = z.conj() / z.norm();
            let new_col: Vec<Complex64> = col.iter().map(|x| x * ph).collect();
            v_sorted.set_col(k, &new_col);
            for x in u_col.iter_mut() {
                *x *= ph;
            }
        }
    }

    // Columns of U belonging to (numerically) zero singular values, and the
    // extra m − n columns, are filled by orthonormal completion.
    let kept: Vec<usize> = (0..n)
        .filter(|&k| singular_values[k] > tiny && singular_values[k] > 0.0)
        .collect();
    let seeds: Vec<Vec<Complex64>> = kept.iter().map(|&k| u_cols[k].clone()).collect();
    let basis = gram_schmidt_columns(&seeds, m);
    let mut u = ComplexMatrix::zeros(m, m);
    let mut extra = kept.len();
    for k in 0..m {
        match kept.iter().position(|&x| x == k) {
            Some(pos) => u.set_col(k, &basis[pos]),
            None => {
                u.set_col(k, &basis[extra]);
                extra += 1;
            }
        }
    }

    Ok(Svd {
        u,
        singular_values,
        v: v_sorted,
    })
}
