//! Compiling dilation unitaries into rotations and entangling gates.

pub mod euler;
pub mod fixtures;
pub mod gate;
pub mod gpg;
pub mod kak;
pub mod qsd;

use crate::channels::KrausChannel;
use crate::error::{Error, Result};

pub use euler::simplify;
pub use gate::{phase_distance, raw_unitary, sequence_unitary, verify_equiv, Gate, GateSequence};
pub use gpg::rewrite_cnot_to_gpg;
pub use kak::{decompose_su4, decompose_su4_up_to_diagonal};
pub use qsd::{decompose_3q, synthesize};

/// The channel on the last qubit obtained by running `gs` with the first
/// `ancilla_qubits` qubits prepared in `|0…0⟩` and then discarded.
pub fn circuit_channel(gs: &GateSequence, ancilla_qubits: usize) -> Result<KrausChannel> {
    if gs.width != ancilla_qubits + 1 {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit circuit with {ancilla_qubits} ancillas and one system qubit",
            gs.width
        )));
    }
    let u = raw_unitary(gs)?;
    let kraus = (0..1usize << ancilla_qubits).map(|m| u.block(2 * m, 0, 2, 2)).collect();
    KrausChannel::custom(kraus)
}

/// Which dilation construction feeds the synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DilationMethod {
    /// Gram–Schmidt completion; any rank up to four.
    #[default]
    General,
    /// Closed form from the singular value decompositions; rank two only.
    Analytic,
}

/// A recovery map carried through dilation, synthesis and the phase-gate
/// rewrite.
#[derive(Debug, Clone)]
pub struct CompiledRecovery {
    pub dilation: crate::dilation::DilationUnitary,
    pub circuit: GateSequence,
    pub gpg_circuit: GateSequence,
}

pub fn compile_recovery(pm: &crate::petz::PetzMap, method: DilationMethod) -> Result<CompiledRecovery> {
    let dilation = match method {
        DilationMethod::General => crate::dilation::dilate_general(pm)?,
        DilationMethod::Analytic => crate::dilation::dilate_rank2_analytic(pm)?,
    };
    let circuit = synthesize(&dilation.u)?;
    let gpg_circuit = rewrite_cnot_to_gpg(&circuit)?;
    Ok(CompiledRecovery {
        dilation,
        circuit,
        gpg_circuit,
    })
}
