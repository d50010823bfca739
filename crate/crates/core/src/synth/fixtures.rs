//! Hand-compiled two-qubit recovery circuits for `p = 0.5` and reference
//! state `γ = (R, θ, φ) = (0.5, π/2, π/4)`, with angles printed to three
//! significant figures.
//!
//! Qubit 0 is the ancilla and qubit 1 the system. The printed angles follow
//! the `exp(+iθσ/2)` rotation convention, so every angle is negated here to
//! match this crate's `exp(−iθσ/2)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::synth::gate::{Gate, GateSequence};

const ANC: usize = 0;
const SYS: usize = 1;

fn negated(gates: Vec<Gate>) -> GateSequence {
    let gates = gates
        .into_iter()
        .map(|g| match g {
            Gate::Rx(t, q) => Gate::Rx(-t, q),
            Gate::Ry(t, q) => Gate::Ry(-t, q),
            Gate::Rz(t, q) => Gate::Rz(-t, q),
            other => other,
        })
        .collect();
    GateSequence { width: 2, gates }
}

/// Recovery circuit for the dephasing channel.
pub fn dephasing_recovery_circuit() -> GateSequence {
    negated(vec![
        Gate::Rz(3.0 * FRAC_PI_2, ANC),
        Gate::Rz(FRAC_PI_4, SYS),
        Gate::Ry(FRAC_PI_2, ANC),
        Gate::Ry(FRAC_PI_2, SYS),
        Gate::Rz(3.61, ANC),
        Gate::Rz(3.0 * FRAC_PI_2, SYS),
        Gate::Cnot(SYS, ANC),
        Gate::Rx(3.0 * FRAC_PI_2, SYS),
        Gate::Rz(5.18, ANC),
        Gate::Cnot(SYS, ANC),
        Gate::Ry(PI, SYS),
        Gate::Rz(5.0 * FRAC_PI_4, SYS),
        Gate::Ry(FRAC_PI_2, ANC),
        Gate::Rz(3.0 * FRAC_PI_2, ANC),
    ])
}

/// Recovery circuit for the amplitude-damping channel.
pub fn amplitude_damping_recovery_circuit() -> GateSequence {
    negated(vec![
        Gate::Rz(FRAC_PI_4, ANC),
        Gate::Rz(FRAC_PI_4, SYS),
        Gate::Ry(FRAC_PI_2, ANC),
        Gate::Ry(1.04, SYS),
        Gate::Rz(3.49, ANC),
        Gate::Rz(FRAC_PI_2, SYS),
        Gate::Cnot(SYS, ANC),
        Gate::Rz(5.60, ANC),
        Gate::Rx(2.51, ANC),
        Gate::Rx(5.11, SYS),
        Gate::Rz(3.0 * FRAC_PI_2, SYS),
        Gate::Cnot(SYS, ANC),
        Gate::Ry(1.07, ANC),
        Gate::Rx(5.70, ANC),
        Gate::Cnot(ANC, SYS),
        Gate::Rz(7.0 * FRAC_PI_4, SYS),
    ])
}
