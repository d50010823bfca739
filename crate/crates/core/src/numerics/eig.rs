//! Hermitian spectral calculus.
//!
//! Eigenpairs come from the cyclic complex Jacobi method, which is accurate to
//! a few ulps for the small matrices used here and needs no external LAPACK.

use num_complex::Complex64;

use super::matrix::{cr, ComplexMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Default tolerance on `‖A − A†‖_F / ‖A‖_F` accepted by [`herm_eig`].
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Negative eigenvalues down to `−PSD_CLIP · max|λ|` are clipped to zero.
pub const PSD_CLIP: f64 = 1e-12;
/// Default relative cutoff for pseudo-inverses.
pub const PINV_CUTOFF: f64 = 1e-12;

/// Eigenvalues in descending order with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl SpectralDecomposition {
    /// `V f(Λ) V†`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &w) in fv.iter().enumerate() {
                    if w != 0.0 {
                        acc += v[(i, k)] * v[(j, k)].conj() * w;
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|l| l)
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0, |m, l| m.max(l.abs()))
    }
}

fn ensure_square(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized before
/// diagonalization; a Hermiticity defect above `1e-10·‖A‖_F` is rejected.
pub fn herm_eig(a: &ComplexMatrix) -> Result<SpectralDecomposition> {
    ensure_square(a)?;
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = a.hermiticity_defect();
    if defect > HERMITIAN_TOL * a.frobenius_norm().max(f64::MIN_POSITIVE) && defect > 1e-300 {
        return Err(Error::NotHermitian { defect });
    }
    jacobi(a.hermitian_part())
}

fn off_diag_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(mut a: ComplexMatrix) -> Result<SpectralDecomposition> {
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok(SpectralDecomposition {
            values: vec![0.0; n],
            vectors: v,
        });
    }
    let tol = f64::EPSILON * 0.5 * scale;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diag_norm(&a) <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Phase e^{iφ} = apq/|apq| is rotated into column q first, then a
                // real Jacobi rotation annihilates the now-real (p,q) entry.
                let phase = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // J has columns p and q:
                //   J[p,p] = c,            J[p,q] = s
                //   J[q,p] = -s·conj(ph),  J[q,q] = c·conj(ph)
                let jpp = cr(cs);
                let jpq = cr(sn);
                let jqp = -phase.conj() * sn;
                let jqq = phase.conj() * cs;
                // A <- A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                // A <- J† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = cr(a[(p, p)].re);
                a[(q, q)] = cr(a[(q, q)].re);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    if !converged && off_diag_norm(&a) > 1e3 * tol {
        return Err(Error::ConvergenceFailure("Hermitian Jacobi eigensolver"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_col(dst, &v.col(src));
    }
    Ok(SpectralDecomposition { values, vectors })
}

/// Eigendecomposition of a Hermitian matrix that must be PSD; small negative
/// eigenvalues (above `−1e-12·max|λ|`) are clipped to zero.
pub fn psd_eig(a: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let mut sd = herm_eig(a)?;
    let bound = PSD_CLIP * sd.max_abs_value();
    for l in sd.values.iter_mut() {
        if *l < 0.0 {
            if *l < -bound {
                return Err(Error::NotPsd { min_eig: *l });
            }
            *l = 0.0;
        }
    }
    Ok(sd)
}

/// Principal square root of a PSD matrix.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(psd_eig(a)?.apply_fn(f64::sqrt))
}

/// Inverse square root on the support: eigenvalues above
/// `cutoff · λ_max` map to `1/√λ`, everything else to zero.
pub fn psd_pinv_sqrt(a: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix> {
    let sd = psd_eig(a)?;
    let thresh = cutoff * sd.values.first().copied().unwrap_or(0.0).max(0.0);
    Ok(sd.apply_fn(|l| if l > thresh && l > 0.0 { 1.0 / l.sqrt() } else { 0.0 }))
}

/// Projector onto the span of eigenvectors with eigenvalue above `cutoff · λ_max`.
pub fn support_projector(a: &ComplexMatrix, cutoff: f64) -> Result<(ComplexMatrix, usize)> {
    let sd = psd_eig(a)?;
    let thresh = cutoff * sd.values.first().copied().unwrap_or(0.0).max(0.0);
    let rank = sd.values.iter().filter(|&&l| l > thresh && l > 0.0).count();
    Ok((sd.apply_fn(|l| if l > thresh && l > 0.0 { 1.0 } else { 0.0 }), rank))
}

/// Diagonalizes a normal matrix (here: unitaries) with a unitary eigenbasis by
/// jointly diagonalizing its commuting Hermitian and anti-Hermitian parts.
/// Returns the complex eigenvalues and eigenvector columns.
pub fn normal_eig(a: &ComplexMatrix) -> Result<(Vec<Complex64>, ComplexMatrix)> {
    ensure_square(a)?;
    let n = a.rows();
    let h1 = a.hermitian_part();
    let h2 = (a - &a.adjoint()).scale(Complex64::new(0.0, -0.5));
    let scale = a.frobenius_norm().max(1.0);
    // Fixed irrational mixing weights; a second and third try only matter when a
    // combination happens to merge two distinct eigenvalues.
    #[allow(clippy::approx_constant)]
    let weights = [0.618_033_988_749_894_9, 1.414_213_562_373_095, -2.718_281_828_459_045];
    for w in weights {
        let mix = &h1 + &h2.scale_re(w);
        let sd = herm_eig(&mix)?;
        let v = sd.vectors;
        let d = &(&v.adjoint() * a) * &v;
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += d[(i, j)].norm_sqr();
                }
            }
        }
        if off.sqrt() <= 1e-12 * scale {
            return Ok((d.diag(), v));
        }
    }
    Err(Error::ConvergenceFailure("normal-matrix eigensolver"))
}
