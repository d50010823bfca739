//! Rewriting CNOT and CZ into geometric phase gates.
//!
//! `CNOT(c,t) = H_t · CZ(c,t) · H_t` and
//! `CZ = e^{−iπ/4} · Rz_a(−π/2) · Rz_b(−π/2) · GPG(π/2)`, all factors of the
//! latter commuting. Hadamards become `Ry(π/2)·Rz(π)` up to phase.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::synth::gate::{Gate, GateSequence};

fn hadamard(q: usize) -> [Gate; 2] {
    [Gate::Rz(PI, q), Gate::Ry(FRAC_PI_2, q)]
}

fn cz(a: usize, b: usize) -> [Gate; 3] {
    [Gate::Gpg(FRAC_PI_2, a, b), Gate::Rz(-FRAC_PI_2, a), Gate::Rz(-FRAC_PI_2, b)]
}

/// Replaces every CNOT and CZ with one `GPG(π/2)` plus single-qubit
/// rotations. Input GPG gates are rejected.
pub fn rewrite_cnot_to_gpg(gs: &GateSequence) -> Result<GateSequence> {
    gs.validate()?;
    let mut out = GateSequence::new(gs.width);
    for g in &gs.gates {
        match *g {
            Gate::Cnot(c, t) => {
                out.gates.extend(hadamard(t));
                out.gates.extend(cz(c, t));
                out.gates.extend(hadamard(t));
            }
            Gate::Cz(a, b) => out.gates.extend(cz(a, b)),
            Gate::H(q) => out.gates.extend(hadamard(q)),
            Gate::Gpg(..) => {
                return Err(Error::UnsupportedGate(format!("{g} is already a geometric phase gate")));
            }
            _ => out.push(*g),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, random::haar_unitary};
    use crate::synth::gate::{cz_matrix, phase_distance, raw_unitary};
    use crate::synth::kak::decompose_su4;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one(g: Gate) -> GateSequence {
        GateSequence { width: 2, gates: vec![g] }
    }

    #[test]
    fn cz_identity_is_exact_with_phase() {
        let out = rewrite_cnot_to_gpg(&one(Gate::Cz(0, 1))).unwrap();
        assert_eq!(out.gpg_count(), 1);
        let u = raw_unitary(&out).unwrap();
        let phase = c(std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2);
        assert!(u.scale(phase).distance(&cz_matrix()) < 1e-15);
    }

    #[test]
    fn cnot_rewrite_preserves_unitary() {
        for g in [Gate::Cnot(0, 1), Gate::Cnot(1, 0)] {
            let src = one(g);
            let out = rewrite_cnot_to_gpg(&src).unwrap();
            assert_eq!(out.gpg_count(), 1);
            assert!(out.gates.iter().all(|g| matches!(g, Gate::Rz(..) | Gate::Ry(..) | Gate::Gpg(..))));
            let d = phase_distance(&raw_unitary(&src).unwrap(), &raw_unitary(&out).unwrap()).unwrap();
            assert!(d < 1e-14);
        }
    }

    #[test]
    fn synthesized_circuits_keep_entangler_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let gs = decompose_su4(&haar_unitary(&mut rng, 4)).unwrap();
            let out = rewrite_cnot_to_gpg(&gs).unwrap();
            assert_eq!(out.gpg_count(), 3);
            assert_eq!(out.entangler_count(), gs.entangler_count());
            let d = phase_distance(&raw_unitary(&gs).unwrap(), &raw_unitary(&out).unwrap()).unwrap();
            assert!(d < 1e-10);
        }
    }

    #[test]
    fn rejects_gpg_input() {
        let err = rewrite_cnot_to_gpg(&one(Gate::Gpg(0.1, 0, 1))).unwrap_err();
        assert!(matches!(err, Error::UnsupportedGate(_)));
    }
}
