//! Single-qubit Euler decomposition and adjacent-rotation merging.

use std::f64::consts::PI;

use crate::numerics::ComplexMatrix;
use crate::synth::gate::{Gate, GateSequence};

/// Rotation angles below this are dropped when emitting gates.
pub const ANGLE_EPS: f64 = 1e-12;

/// Wraps an angle into `(−π, π]`. Shifting a rotation by 2π only flips its
/// sign, which is a global phase.
pub fn wrap_angle(t: f64) -> f64 {
    let r = t.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Angles `[δ, γ, β]` with `u ∝ Rz(β)·Ry(γ)·Rz(δ)`, listed in time order.
pub fn euler_zyz(u: &ComplexMatrix) -> [f64; 3] {
    let v = u.scale(u.det().sqrt().inv());
    let (a, b) = (v[(0, 0)], v[(1, 0)]);
    let gamma = 2.0 * b.norm().atan2(a.norm());
    let (sum, diff) = (-2.0 * a.arg(), 2.0 * b.arg());
    // When one of a, b vanishes its phase is meaningless; put everything in β.
    let (beta, delta) = if b.norm() < 1e-14 {
        (sum, 0.0)
    } else if a.norm() < 1e-14 {
        (diff, 0.0)
    } else {
        ((sum + diff) / 2.0, (sum - diff) / 2.0)
    };
    [delta, gamma, beta]
}

/// Rz·Ry·Rz gates on qubit `q` implementing `u` up to phase, omitting
/// negligible rotations.
pub fn one_qubit_gates(u: &ComplexMatrix, q: usize) -> Vec<Gate> {
    let [d, g, b] = euler_zyz(u).map(wrap_angle);
    let mut out = Vec::with_capacity(3);
    if g.abs() < ANGLE_EPS {
        let z = wrap_angle(b + d);
        if z.abs() >= ANGLE_EPS {
            out.push(Gate::Rz(z, q));
        }
        return out;
    }
    if d.abs() >= ANGLE_EPS {
        out.push(Gate::Rz(d, q));
    }
    out.push(Gate::Ry(g, q));
    if b.abs() >= ANGLE_EPS {
        out.push(Gate::Rz(b, q));
    }
    out
}

/// Merges every maximal run of single-qubit gates on a wire into at most
/// three rotations. Two-qubit gates are left in place.
pub fn simplify(gs: &GateSequence) -> GateSequence {
    let mut pending: Vec<Option<ComplexMatrix>> = vec![None; gs.width];
    let mut out = GateSequence::new(gs.width);
    let flush = |q: usize, pending: &mut Vec<Option<ComplexMatrix>>, out: &mut GateSequence| {
        if let Some(m) = pending[q].take() {
            out.gates.extend(one_qubit_gates(&m, q));
        }
    };
    for g in &gs.gates {
        if g.is_two_qubit() {
            for q in g.qubits() {
                flush(q, &mut pending, &mut out);
            }
            out.push(*g);
        } else {
            let q = g.qubits()[0];
            let m = g.local_matrix();
            pending[q] = Some(match pending[q].take() {
                Some(acc) => &m * &acc,
                None => m,
            });
        }
    }
    for q in 0..gs.width {
        flush(q, &mut pending, &mut out);
    }
    out
}
