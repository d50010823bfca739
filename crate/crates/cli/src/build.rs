//! Artifacts for one channel and reference state.

use petz_core::petz::build_petz;
use petz_core::synth::compile_recovery;

use crate::config::SweepConfig;
use crate::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Emit {
    /// The noise channel as `{kind, p, kraus}`.
    Channel,
    /// The Petz map with its Kraus operators.
    Kraus,
    /// Dilation unitary as JSON.
    Unitary,
    /// Dilation unitary as a column-major table.
    UnitaryText,
    /// CNOT circuit, one gate per line.
    Circuit,
    /// Phase-gate circuit, one gate per line.
    GpgCircuit,
}

/// One emitted file: its contents and the suffix appended to the output
/// path when a command writes more than one.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub suffix: Option<&'static str>,
    pub contents: String,
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("artifact serializes");
    s.push('\n');
    s
}

/// Builds the requested artifact. Asking for the unitary also yields the
/// column-major table as a second artifact.
pub fn build(cfg: &SweepConfig, emit: Emit) -> CliResult<Vec<Artifact>> {
    cfg.validate()?;
    let ch = cfg.channel_at(cfg.p)?;
    let main = |contents| Artifact { suffix: None, contents };
    if emit == Emit::Channel {
        return Ok(vec![main(json(&ch))]);
    }
    let pm = build_petz(&ch, &cfg.gamma0)?;
    if emit == Emit::Kraus {
        return Ok(vec![main(json(&pm))]);
    }
    let compiled = compile_recovery(&pm, cfg.dilation)?;
    Ok(match emit {
        Emit::Unitary => vec![
            main(json(&compiled.dilation)),
            Artifact {
                suffix: Some("txt"),
                contents: compiled.dilation.to_column_major_text(),
            },
        ],
        Emit::UnitaryText => vec![main(compiled.dilation.to_column_major_text())],
        Emit::Circuit => vec![main(compiled.circuit.to_text())],
        Emit::GpgCircuit => vec![main(compiled.gpg_circuit.to_text())],
        Emit::Channel | Emit::Kraus => unreachable!("handled above"),
    })
}
