//! Distances and divergences between density matrices.

use super::eig::{herm_eig, psd_eig};
use super::matrix::ComplexMatrix;
use super::svd::svd;
use crate::error::{Error, Result};

/// Trace and positivity tolerance for accepting a density matrix.
pub const STATE_TOL: f64 = 1e-9;
/// Relative eigenvalue cutoff defining the support of a state.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Checks unit trace, Hermiticity and positivity within [`STATE_TOL`].
pub fn check_state(rho: &ComplexMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::NotState(format!("{}x{} is not square", rho.rows(), rho.cols())));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::NotState(format!("trace {tr}")));
    }
    if rho.hermiticity_defect() > STATE_TOL {
        return Err(Error::NotState("not Hermitian".into()));
    }
    let sd = herm_eig(rho)?;
    let min = *sd.values.last().unwrap();
    if min < -STATE_TOL {
        return Err(Error::NotState(format!("eigenvalue {min:.3e}")));
    }
    Ok(())
}

/// Square root of a state with eigenvalues below `n·ε·λ_max` set to zero.
/// Fidelity is computed from products of these roots, so the clipping keeps
/// rounding noise on a null space from entering as `√ε`.
fn state_sqrt(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let sd = psd_eig(rho).map_err(|_| Error::NotState("not positive semidefinite".into()))?;
    let floor = 8.0 * f64::EPSILON * rho.rows() as f64 * sd.values[0].max(0.0);
    Ok(sd.apply_fn(|l| if l > floor { l.sqrt() } else { 0.0 }))
}

/// Uhlmann fidelity `F(ρ₀, ρ₁) = (Tr √(√ρ₀ ρ₁ √ρ₀))²`, evaluated as the
/// squared trace norm of `√ρ₀ √ρ₁` and clamped to `[0, 1]`.
pub fn uhlmann_fidelity(rho0: &ComplexMatrix, rho1: &ComplexMatrix) -> Result<f64> {
    check_state(rho0)?;
    check_state(rho1)?;
    if rho0.rows() != rho1.rows() {
        return Err(Error::DimensionMismatch("fidelity of states with different dimensions".into()));
    }
    let prod = &state_sqrt(rho0)? * &state_sqrt(rho1)?;
    let nuclear: f64 = svd(&prod)?.singular_values.iter().sum();
    Ok((nuclear * nuclear).clamp(0.0, 1.0))
}

/// Umegaki relative entropy `D(ρ‖γ) = Tr ρ(ln ρ − ln γ)` in nats.
///
/// Returns `f64::INFINITY` when `ρ` has weight outside the support of `γ`
/// (eigenvalues of `γ` at or below `1e-12·λ_max` count as zero).
pub fn relative_entropy(rho: &ComplexMatrix, gamma: &ComplexMatrix) -> Result<f64> {
    check_state(rho)?;
    check_state(gamma)?;
    if rho.rows() != gamma.rows() {
        return Err(Error::DimensionMismatch("relative entropy of states with different dimensions".into()));
    }
    let sr = psd_eig(rho)?;
    let neg_entropy: f64 = sr
        .values
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.ln())
        .sum();

    let sg = psd_eig(gamma)?;
    let gmax = sg.values[0];
    let v = &sg.vectors;
    let mut cross = 0.0;
    for (k, &mu) in sg.values.iter().enumerate() {
        // ⟨k|ρ|k⟩
        let col = v.col(k);
        let mut w = 0.0;
        for i in 0..rho.rows() {
            for j in 0..rho.rows() {
                w += (col[i].conj() * rho[(i, j)] * col[j]).re;
            }
        }
        if mu <= SUPPORT_CUTOFF * gmax {
            if w > SUPPORT_CUTOFF {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += w * mu.ln();
    }
    Ok((neg_entropy - cross).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::{c, cr};

    fn plus() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[0.5, 0.5], [0.5, 0.5]])
    }

    #[test]
    fn fidelity_examples() {
        let r = ComplexMatrix::from_rows(&[[cr(0.6), c(0.1, 0.2)], [c(0.1, -0.2), cr(0.4)]]);
        assert!((uhlmann_fidelity(&r, &r).unwrap() - 1.0).abs() < 1e-12);
        let zero = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let one = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        assert!(uhlmann_fidelity(&zero, &one).unwrap() < 1e-15);
        let mixed = ComplexMatrix::identity(2).scale_re(0.5);
        assert!((uhlmann_fidelity(&mixed, &zero).unwrap() - 0.5).abs() < 1e-14);
        assert!((uhlmann_fidelity(&plus(), &zero).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn fidelity_rejects_non_states() {
        let bad = ComplexMatrix::from_real_diag(&[1.0, 1.0]);
        assert!(matches!(uhlmann_fidelity(&bad, &bad), Err(Error::NotState(_))));
    }

    #[test]
    fn relative_entropy_examples() {
        let mixed = ComplexMatrix::identity(2).scale_re(0.5);
        let zero = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        assert!((relative_entropy(&zero, &mixed).unwrap() - 2f64.ln()).abs() < 1e-14);
        assert!(relative_entropy(&plus(), &plus()).unwrap().abs() < 1e-10);
        assert_eq!(relative_entropy(&plus(), &zero).unwrap(), f64::INFINITY);
        assert!(relative_entropy(&zero, &zero).unwrap().abs() < 1e-12);
    }
}
