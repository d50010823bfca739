use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list, left factor most significant.
pub fn kron_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| kron(&acc, f))
}

/// Which tensor factor survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Partial trace of an operator on `H_A ⊗ H_B` (A most significant).
pub fn partial_trace(rho: &ComplexMatrix, dims: (usize, usize), keep: Keep) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if !rho.is_square() || rho.rows() != da * db {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator is not on a {da}·{db} space",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(match keep {
        Keep::A => {
            let mut out = ComplexMatrix::zeros(da, da);
            for i in 0..da {
                for j in 0..da {
                    out[(i, j)] = (0..db).map(|k| rho[(i * db + k, j * db + k)]).sum();
                }
            }
            out
        }
        Keep::B => {
            let mut out = ComplexMatrix::zeros(db, db);
            for k in 0..db {
                for l in 0..db {
                    out[(k, l)] = (0..da).map(|i| rho[(i * db + k, i * db + l)]).sum();
                }
            }
            out
        }
    })
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Residual norm below which a Gram–Schmidt candidate is discarded.
pub const GS_SKIP: f64 = 1e-10;

/// Extends orthonormal `seeds` (each of length `n`) to a full orthonormal
/// basis of `C^n`. Seeds are re-orthonormalized in order; candidates are the
/// canonical basis vectors in index order, each projected twice against the
/// accepted set and skipped when the residual norm falls below `1e-10`.
pub fn gram_schmidt_columns(seeds: &[Vec<Complex64>], n: usize) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let push = |basis: &mut Vec<Vec<Complex64>>, mut v: Vec<Complex64>| {
        for _ in 0..2 {
            for b in basis.iter() {
                let p = dot(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= p * y;
                }
            }
        }
        let r = norm(&v);
        if r >= GS_SKIP {
            for x in v.iter_mut() {
                *x /= r;
            }
            basis.push(v);
        }
    };
    for s in seeds {
        push(&mut basis, s.clone());
    }
    for e in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![ZERO; n];
        v[e] = Complex64::new(1.0, 0.0);
        push(&mut basis, v);
    }
    basis
}

/// Completes an isometry (`n × k`, orthonormal columns) to an `n × n`
/// unitary whose first `k` columns are exactly the input columns.
pub fn gram_schmidt_complete(iso: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (n, k) = (iso.rows(), iso.cols());
    if k > n {
        return Err(Error::DimensionMismatch(format!("{k} columns in dimension {n}")));
    }
    let defect = iso.unitarity_defect();
    if defect > 1e-9 {
        return Err(Error::NotIsometry { defect });
    }
    let seeds: Vec<Vec<Complex64>> = (0..k).map(|j| iso.col(j)).collect();
    let basis = gram_schmidt_columns(&seeds, n);
    let mut u = ComplexMatrix::zeros(n, n);
    for (j, col) in basis.iter().enumerate() {
        u.set_col(j, col);
    }
    // The given columns are kept verbatim; only the completion is computed.
    for j in 0..k {
        u.set_col(j, &iso.col(j));
    }
    Ok(u)
}
