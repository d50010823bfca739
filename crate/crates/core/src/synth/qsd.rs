//! Three-qubit synthesis by quantum Shannon decomposition.
//!
//! The cosine–sine split on qubit 0 gives two block-diagonal factors around a
//! multiplexed `Ry`; each block-diagonal factor is demultiplexed into two
//! unconditioned two-qubit unitaries around a multiplexed `Rz`. Three of the
//! four two-qubit unitaries are synthesized only up to a diagonal, which is
//! absorbed by the next factor, for a total of 20 CNOTs.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{herm_eig, kron, normal_eig, pauli, svd, ComplexMatrix};
use crate::numerics::ops::gram_schmidt_columns;
use crate::synth::euler::{one_qubit_gates, simplify};
use crate::synth::gate::{verify_equiv, Gate, GateSequence};
use crate::synth::kak::{check_unitary, decompose_su4, decompose_su4_up_to_diagonal};

/// CNOT budget for a three-qubit unitary.
pub const CNOT_BUDGET_3Q: usize = 20;
/// Largest accepted reconstruction error for a three-qubit synthesis.
pub const QSD_TOL: f64 = 1e-6;

/// `U = diag(L0, L1) · [[C, −S], [S, C]] · diag(R0, R1)` with
/// `C = diag(cos θ)`, `S = diag(sin θ)`.
struct Csd {
    l0: ComplexMatrix,
    l1: ComplexMatrix,
    r0: ComplexMatrix,
    r1: ComplexMatrix,
    theta: Vec<f64>,
}

fn csd(u: &ComplexMatrix) -> Result<Csd> {
    let n = u.rows() / 2;
    let (u00, u01) = (u.block(0, 0, n, n), u.block(0, n, n, n));
    let (u10, u11) = (u.block(n, 0, n, n), u.block(n, n, n, n));
    let s00 = svd(&u00)?;
    let (l0, r0) = (s00.u, s00.v.adjoint());
    let t = &u10 * &s00.v;

    // Columns of T = L1·S are orthogonal; normalize the well-conditioned ones
    // (largest first) and complete the rest.
    let norms: Vec<f64> = (0..n).map(|j| t.col(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let seeds: Vec<Vec<Complex64>> = order
        .iter()
        .take_while(|&&j| norms[j] > 1e-7)
        .map(|&j| t.col(j).iter().map(|z| z / norms[j]).collect())
        .collect();
    let basis = gram_schmidt_columns(&seeds, n);
    if basis.len() != n {
        return Err(Error::ConvergenceFailure("cosine-sine completion"));
    }
    let mut l1 = ComplexMatrix::zeros(n, n);
    for (col, &j) in basis.iter().zip(&order) {
        l1.set_col(j, col);
    }
    let theta: Vec<f64> = (0..n)
        .map(|j| {
            let s: Complex64 = l1.col(j).iter().zip(t.col(j)).map(|(a, b)| a.conj() * b).sum();
            s.re.atan2(s00.singular_values[j])
        })
        .collect();
    let cm = ComplexMatrix::from_real_diag(&theta.iter().map(|t| t.cos()).collect::<Vec<_>>());
    let sm = ComplexMatrix::from_real_diag(&theta.iter().map(|t| t.sin()).collect::<Vec<_>>());
    let r1 = &(&cm * &(&l1.adjoint() * &u11)) - &(&sm * &(&l0.adjoint() * &u01));
    Ok(Csd { l0, l1, r0, r1, theta })
}

/// `diag(A, B) = (I⊗V) · diag(D, D†) · (I⊗W)`; returns `(V, D, W)`.
fn demultiplex(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<Complex64>, ComplexMatrix)> {
    let (eigs, v) = normal_eig(&(a * &b.adjoint()))?;
    let d: Vec<Complex64> = eigs.iter().map(|z| (z / z.norm()).sqrt()).collect();
    let w = &(&ComplexMatrix::from_diag(&d) * &v.adjoint()) * b;
    Ok((v, d, w))
}

/// Which rotation a multiplexor applies to qubit 0.
#[derive(Clone, Copy)]
enum Axis {
    Y,
    Z,
}

/// Rotation on qubit 0 by `angles[x]` conditioned on qubits 1, 2 being in
/// basis state `x`. For `Z` the Gray-code pattern uses four CNOTs; for `Y`
/// the final entangler is a CZ that the caller has already absorbed, leaving
/// three.
fn multiplexor(axis: Axis, angles: &[f64]) -> Vec<Gate> {
    // θ(x1,x2) = α0 + (−1)^{x2} α1 + (−1)^{x1+x2} α2 + (−1)^{x1} α3
    let sign = |x: usize, k: usize| {
        let (x1, x2) = (x >> 1, x & 1);
        let e = match k {
            0 => 0,
            1 => x2,
            2 => x1 + x2,
            _ => x1,
        };
        if e % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let alpha: Vec<f64> = (0..4).map(|k| (0..4).map(|x| sign(x, k) * angles[x]).sum::<f64>() / 4.0).collect();
    let rot = |t: f64| match axis {
        Axis::Y => Gate::Ry(t, 0),
        Axis::Z => Gate::Rz(t, 0),
    };
    let ent = |ctrl: usize| -> Vec<Gate> {
        match axis {
            Axis::Z => vec![Gate::Cnot(ctrl, 0)],
            Axis::Y => vec![Gate::H(0), Gate::Cnot(ctrl, 0), Gate::H(0)],
        }
    };
    let mut g = Vec::new();
    for (k, ctrl) in [2usize, 1, 2, 1].into_iter().enumerate() {
        g.push(rot(alpha[k]));
        if k < 3 || matches!(axis, Axis::Z) {
            g.extend(ent(ctrl));
        }
    }
    g
}

fn shift(gs: &GateSequence) -> Vec<Gate> {
    gs.gates.iter().map(|g| g.remap(|q| q + 1)).collect()
}

fn times_diag(m: &ComplexMatrix, d: &[Complex64]) -> ComplexMatrix {
    m * &ComplexMatrix::from_diag(d)
}

fn shannon(u: &ComplexMatrix) -> Result<GateSequence> {
    let cs = csd(u)?;
    // The Ry multiplexor's last CZ(q1, q0) becomes a Z on qubit 1 inside L1.
    let z1 = kron(&pauli::z(), &ComplexMatrix::identity(2));
    let l1 = &cs.l1 * &z1;
    let (v_r, d_r, w_r) = demultiplex(&cs.r0, &cs.r1)?;
    let (v_l, d_l, w_l) = demultiplex(&cs.l0, &l1)?;

    // Each trailing diagonal commutes with the multiplexor after it.
    let (c1, e1) = decompose_su4_up_to_diagonal(&w_r)?;
    let (c2, e2) = decompose_su4_up_to_diagonal(&times_diag(&v_r, &e1))?;
    let (c3, e3) = decompose_su4_up_to_diagonal(&times_diag(&w_l, &e2))?;
    let c4 = decompose_su4(&times_diag(&v_l, &e3))?;

    let rz_angles = |d: &[Complex64]| d.iter().map(|z| -2.0 * z.arg()).collect::<Vec<_>>();
    let ry_angles: Vec<f64> = cs.theta.iter().map(|t| 2.0 * t).collect();

    let mut gs = GateSequence::new(3);
    gs.gates.extend(shift(&c1));
    gs.gates.extend(multiplexor(Axis::Z, &rz_angles(&d_r)));
    gs.gates.extend(shift(&c2));
    gs.gates.extend(multiplexor(Axis::Y, &ry_angles));
    gs.gates.extend(shift(&c3));
    gs.gates.extend(multiplexor(Axis::Z, &rz_angles(&d_l)));
    gs.gates.extend(shift(&c4));
    Ok(simplify(&gs))
}

/// Tries to write `u` as a one-qubit unitary on qubit `k` tensored with a
/// two-qubit unitary on the others.
fn split_qubit(u: &ComplexMatrix, k: usize) -> Option<(ComplexMatrix, ComplexMatrix, [usize; 2])> {
    let rest: Vec<usize> = (0..3).filter(|&q| q != k).collect();
    let bit = |i: usize, q: usize| (i >> (2 - q)) & 1;
    let rest_idx = |i: usize| 2 * bit(i, rest[0]) + bit(i, rest[1]);
    // Operator-Schmidt matrix: rows index the qubit-k entry, columns the rest.
    let mut m = ComplexMatrix::zeros(4, 16);
    for i in 0..8 {
        for j in 0..8 {
            m[(2 * bit(i, k) + bit(j, k), 4 * rest_idx(i) + rest_idx(j))] = u[(i, j)];
        }
    }
    let top = herm_eig(&(&m * &m.adjoint())).ok()?.vectors.col(0);
    let mut a = ComplexMatrix::zeros(2, 2);
    for (idx, z) in top.iter().enumerate() {
        a[(idx / 2, idx % 2)] = z * std::f64::consts::SQRT_2;
    }
    let mut v = ComplexMatrix::zeros(4, 4);
    for col in 0..16 {
        let s: Complex64 = (0..4).map(|r| top[r].conj() * m[(r, col)]).sum();
        v[(col / 4, col % 4)] = s / std::f64::consts::SQRT_2;
    }
    let mut rebuilt = ComplexMatrix::zeros(8, 8);
    for i in 0..8 {
        for j in 0..8 {
            rebuilt[(i, j)] = a[(bit(i, k), bit(j, k))] * v[(rest_idx(i), rest_idx(j))];
        }
    }
    (rebuilt.distance(u) < 1e-10 && v.unitarity_defect() < 1e-9).then_some((a, v, [rest[0], rest[1]]))
}

/// Synthesizes a three-qubit unitary with at most 20 CNOTs. Unitaries with a
/// tensor-product factor are routed through the two-qubit synthesis.
pub fn decompose_3q(u: &ComplexMatrix) -> Result<GateSequence> {
    check_unitary(u, 8)?;
    for k in 0..3 {
        if let Some((a, v, rest)) = split_qubit(u, k) {
            let Ok(two) = decompose_su4(&v) else { continue };
            let mut gs = GateSequence::new(3);
            gs.gates.extend(one_qubit_gates(&a, k));
            gs.gates.extend(two.gates.iter().map(|g| g.remap(|q| rest[q])));
            if verify_equiv(u, &gs)? <= QSD_TOL {
                return Ok(gs);
            }
        }
    }
    let gs = shannon(u)?;
    let used = gs.cnot_count();
    if used > CNOT_BUDGET_3Q {
        return Err(Error::BudgetExceeded {
            used,
            budget: CNOT_BUDGET_3Q,
        });
    }
    if verify_equiv(u, &gs)? > QSD_TOL {
        return Err(Error::ConvergenceFailure("three-qubit synthesis round trip"));
    }
    Ok(gs)
}

/// Dispatches on dimension: 2, 4 or 8.
pub fn synthesize(u: &ComplexMatrix) -> Result<GateSequence> {
    match u.rows() {
        2 => {
            check_unitary(u, 2)?;
            Ok(GateSequence {
                width: 1,
                gates: one_qubit_gates(u, 0),
            })
        }
        4 => decompose_su4(u),
        8 => decompose_3q(u),
        n => Err(Error::DimensionMismatch(format!("no synthesis for dimension {n}"))),
    }
}
