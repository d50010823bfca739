//! Stinespring dilation of a recovery map to a unitary on ancilla ⊗ system.
//!
//! The ancilla register is the most significant tensor factor and starts in
//! `|0…0⟩`, so the 2×2 block in block-row `m` and block-column 0 of the
//! unitary is the `m`-th Kraus operator.

use serde::{Deserialize, Serialize};

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::numerics::{gram_schmidt_complete, kron, partial_trace, pauli, svd, ComplexMatrix, Keep, I};
use crate::petz::PetzMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationUnitary {
    pub u: ComplexMatrix,
    /// Number of Kraus operators actually present.
    pub rank: usize,
    /// Qubits `0..ancilla_qubits` are ancillas; the system is the last qubit.
    pub ancilla_qubits: usize,
    /// Ancilla basis indices whose Kraus slot is zero padding.
    pub padding: Vec<usize>,
}

impl DilationUnitary {
    pub fn slots(&self) -> usize {
        1 << self.ancilla_qubits
    }

    pub fn width(&self) -> usize {
        self.ancilla_qubits + 1
    }

    pub fn system_qubit(&self) -> usize {
        self.ancilla_qubits
    }

    /// Block `(m, 0)` for every ancilla slot.
    pub fn kraus_blocks(&self) -> Vec<ComplexMatrix> {
        (0..self.slots()).map(|m| self.u.block(2 * m, 0, 2, 2)).collect()
    }

    /// Column-major table of the unitary: a header line, then one `re im`
    /// pair per line with 17 significant digits.
    pub fn to_column_major_text(&self) -> String {
        let n = self.u.rows();
        let mut s = format!("# {n} {n} column-major re im\n");
        for j in 0..n {
            for i in 0..n {
                let z = self.u[(i, j)];
                s.push_str(&format!("{:.16e} {:.16e}\n", z.re, z.im));
            }
        }
        s
    }
}

/// Parses the output of [`DilationUnitary::to_column_major_text`].
pub fn parse_column_major_text(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty table".into(),
    })?;
    let dims: Vec<usize> = header
        .trim_start_matches('#')
        .split_whitespace()
        .take(2)
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse {
            line: 1,
            msg: format!("bad header: {e}"),
        })?;
    if dims.len() != 2 {
        return Err(Error::Parse {
            line: 1,
            msg: "header needs rows and cols".into(),
        });
    }
    let (rows, cols) = (dims[0], dims[1]);
    let mut m = ComplexMatrix::zeros(rows, cols);
    let mut count = 0;
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: ln + 1,
                msg: format!("{e}"),
            })?;
        if parts.len() != 2 || count >= rows * cols {
            return Err(Error::Parse {
                line: ln + 1,
                msg: "expected one 're im' pair per entry".into(),
            });
        }
        m[(count % rows, count / rows)] = num_complex::Complex64::new(parts[0], parts[1]);
        count += 1;
    }
    if count != rows * cols {
        return Err(Error::Parse {
            line: count + 2,
            msg: format!("{count} entries for a {rows}x{cols} table"),
        });
    }
    Ok(m)
}

fn ancillas_for(rank: usize) -> Result<usize> {
    match rank {
        0 => Err(Error::RankUnsupported(0)),
        1 | 2 => Ok(1),
        3 | 4 => Ok(2),
        r => Err(Error::RankUnsupported(r)),
    }
}

/// Stacks the Kraus operators (completion included, zero-padded to a power
/// of two) into the first two columns and completes them by Gram–Schmidt.
pub fn dilate_general(pm: &PetzMap) -> Result<DilationUnitary> {
    let kraus = pm.all_kraus();
    let rank = kraus.len();
    let ancilla_qubits = ancillas_for(rank)?;
    let slots = 1 << ancilla_qubits;
    let mut iso = ComplexMatrix::zeros(2 * slots, 2);
    for (m, k) in kraus.iter().enumerate() {
        iso.set_block(2 * m, 0, k);
    }
    Ok(DilationUnitary {
        u: gram_schmidt_complete(&iso)?,
        rank,
        ancilla_qubits,
        padding: (rank..slots).collect(),
    })
}

/// Closed-form dilation for two Kraus operators from their singular value
/// decompositions `K_m = U_m D_m V_m†`:
///
/// ```text
/// U = diag(Ũ₀, U₁) · [[D̃₀, D₁(−iσ_y)], [D₁, D̃₀(iσ_y)]] · diag(V₁†, I)
/// ```
///
/// with `D̃₀ = V₁†V₀ D₀ V₀†V₁` (diagonal, since `K₀†K₀ = I − K₁†K₁`) and
/// `Ũ₀ = U₀V₀†V₁`.
pub fn dilate_rank2_analytic(pm: &PetzMap) -> Result<DilationUnitary> {
    let kraus = pm.all_kraus();
    if kraus.len() != 2 {
        return Err(Error::RankMismatch {
            expected: 2,
            found: kraus.len(),
        });
    }
    let s0 = svd(&kraus[0])?;
    let s1 = svd(&kraus[1])?;
    let v0v1 = &s0.v.adjoint() * &s1.v;
    let d0_tilde = (&(&v0v1.adjoint() * &s0.d()) * &v0v1).hermitian_part();
    let u0_tilde = &s0.u * &v0v1;
    let d1 = s1.d();
    let isy = pauli::y().scale(I);

    let mut core = ComplexMatrix::zeros(4, 4);
    core.set_block(0, 0, &d0_tilde);
    core.set_block(0, 2, &(&d1 * &(-&isy)));
    core.set_block(2, 0, &d1);
    core.set_block(2, 2, &(&d0_tilde * &isy));

    let left = ComplexMatrix::block_diag(&u0_tilde, &s1.u);
    let right = ComplexMatrix::block_diag(&s1.v.adjoint(), &ComplexMatrix::identity(2));
    Ok(DilationUnitary {
        u: &(&left * &core) * &right,
        rank: 2,
        ancilla_qubits: 1,
        padding: Vec::new(),
    })
}

/// `Tr_anc[U (|0…0⟩⟨0…0| ⊗ ρ) U†]`.
pub fn apply_dilation(d: &DilationUnitary, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.rows() != 2 || rho.cols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "dilation acts on a qubit, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let slots = d.slots();
    let mut anc = ComplexMatrix::zeros(slots, slots);
    anc[(0, 0)] = crate::numerics::ONE;
    let full = &(&d.u * &kron(&anc, rho)) * &d.u.adjoint();
    partial_trace(&full, (slots, 2), Keep::B)
}

impl QuantumChannel for DilationUnitary {
    fn dim_in(&self) -> usize {
        2
    }

    fn dim_out(&self) -> usize {
        2
    }

    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply_dilation(self, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{superop_distance, KrausChannel};
    use crate::petz::{build_petz, BlochState};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn petz(ch: KrausChannel, gamma: BlochState) -> PetzMap {
        build_petz(&ch, &gamma).unwrap()
    }

    #[test]
    fn identity_channel_dilates_to_identity() {
        let pm = petz(
            KrausChannel::custom(vec![ComplexMatrix::identity(2)]).unwrap(),
            BlochState::maximally_mixed(),
        );
        let d = dilate_general(&pm).unwrap();
        assert_eq!(d.u, ComplexMatrix::identity(4));
        assert_eq!(d.padding, vec![1]);
    }

    #[test]
    fn dephasing_blocks() {
        let pm = petz(KrausChannel::dephasing(0.5).unwrap(), BlochState::maximally_mixed());
        for d in [dilate_general(&pm).unwrap(), dilate_rank2_analytic(&pm).unwrap()] {
            assert!(d.u.unitarity_defect() < 1e-12);
            let b = d.kraus_blocks();
            assert!(b[0].distance(&ComplexMatrix::identity(2).scale_re(0.75f64.sqrt())) < 1e-12);
            assert!(b[1].distance(&pauli::z().scale_re(0.5)) < 1e-12);
        }
    }

    #[test]
    fn analytic_and_general_agree_on_amplitude_damping() {
        let gamma = BlochState::new(0.5, FRAC_PI_2, FRAC_PI_4).unwrap();
        let pm = petz(KrausChannel::amplitude_damping(0.5).unwrap(), gamma);
        let a = dilate_rank2_analytic(&pm).unwrap();
        let g = dilate_general(&pm).unwrap();
        assert!(a.u.unitarity_defect() < 1e-12);
        assert!(superop_distance(&a, &pm).unwrap() < 1e-12);
        assert!(superop_distance(&a, &g).unwrap() < 1e-12);
    }

    #[test]
    fn analytic_edge_with_vanishing_second_operator() {
        let ch = KrausChannel::dephasing(0.0).unwrap();
        let pm = petz(ch, BlochState::new(0.3, 1.0, 2.0).unwrap());
        let d = dilate_rank2_analytic(&pm).unwrap();
        assert!(d.u.unitarity_defect() < 1e-12);
        assert!(d.u.block(0, 0, 2, 2).distance(&ComplexMatrix::identity(2)) < 1e-12);
        assert!(d.u.block(2, 0, 2, 2).max_abs() < 1e-12);
    }

    #[test]
    fn rank_errors() {
        let gamma = BlochState::new(0.5, FRAC_PI_2, FRAC_PI_4).unwrap();
        let pm = petz(KrausChannel::depolarizing(0.5).unwrap(), gamma);
        assert!(matches!(
            dilate_rank2_analytic(&pm),
            Err(Error::RankMismatch { expected: 2, found: 4 })
        ));
        let d = dilate_general(&pm).unwrap();
        assert_eq!((d.u.rows(), d.ancilla_qubits), (8, 2));
        let five = KrausChannel::custom(vec![ComplexMatrix::identity(2).scale_re(0.2f64.sqrt()); 5]).unwrap();
        let pm5 = petz(five, gamma);
        assert!(matches!(dilate_general(&pm5), Err(Error::RankUnsupported(5))));
    }

    #[test]
    fn text_table_round_trips() {
        let gamma = BlochState::new(0.5, FRAC_PI_2, FRAC_PI_4).unwrap();
        let d = dilate_general(&petz(KrausChannel::amplitude_damping(0.3).unwrap(), gamma)).unwrap();
        let text = d.to_column_major_text();
        assert_eq!(text.lines().count(), 17);
        let back = parse_column_major_text(&text).unwrap();
        assert_eq!(back, d.u);
    }
}
