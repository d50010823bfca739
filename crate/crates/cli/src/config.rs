//! Sweep and build settings, read from JSON and overridden by flags.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::{Path, PathBuf};

use petz_core::channels::{ChannelKind, KrausChannel};
use petz_core::ionnoise::ErmMode;
use petz_core::petz::BlochState;
use petz_core::synth::DilationMethod;
use serde::{Deserialize, Serialize};

use crate::sampling::SamplingMode;
use crate::{CliError, CliResult};

/// Evenly spaced points `min, …, max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridAxis {
    pub fn points(&self) -> Vec<f64> {
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                let t = k as f64 / n;
                self.min * (1.0 - t) + self.max * t
            })
            .collect()
    }

    fn validate(&self, name: &str) -> CliResult<()> {
        if self.steps < 2 {
            return Err(CliError::Config(format!("{name}.steps must be at least 2, got {}", self.steps)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(CliError::Config(format!("{name} needs finite min < max")));
        }
        Ok(())
    }
}

/// Which reference state the threshold sweep tunes the recovery to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceMode {
    /// `γ = ρ` for every sample, so the ideal recovery is perfect.
    #[default]
    Matched,
    /// One recovery built at `gamma0` for all samples.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub channel: ChannelKind,
    pub p: f64,
    /// Overrides `p` when present; each entry gets its own output.
    pub p_list: Option<Vec<f64>>,
    pub gamma0: BlochState,
    pub dr: f64,
    pub dtheta: GridAxis,
    pub dphi: GridAxis,
    pub level: f64,
    pub deltas: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub sampling: SamplingMode,
    pub reference: ReferenceMode,
    pub dilation: DilationMethod,
    pub erm_mode: ErmMode,
    pub single_qubit_offset: f64,
    pub output: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let axis = GridAxis {
            min: -FRAC_PI_2,
            max: FRAC_PI_2,
            steps: 201,
        };
        Self {
            channel: ChannelKind::Dephasing,
            p: 0.5,
            p_list: None,
            gamma0: BlochState {
                r: 0.5,
                theta: FRAC_PI_2,
                phi: FRAC_PI_4,
            },
            dr: 0.0,
            dtheta: axis,
            dphi: axis,
            level: 0.01,
            deltas: vec![0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2],
            samples: 10_000,
            seed: 1,
            sampling: SamplingMode::Ball,
            reference: ReferenceMode::Matched,
            dilation: DilationMethod::General,
            erm_mode: ErmMode::Combined,
            single_qubit_offset: 0.0,
            output: None,
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config JSON: {e}")))
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn p_values(&self) -> Vec<f64> {
        self.p_list.clone().unwrap_or_else(|| vec![self.p])
    }

    pub fn channel_at(&self, p: f64) -> CliResult<KrausChannel> {
        Ok(KrausChannel::from_kind(self.channel, p)?)
    }

    /// Checks everything either sweep or `build` depends on.
    pub fn validate(&self) -> CliResult<()> {
        if !matches!(
            self.channel,
            ChannelKind::Dephasing | ChannelKind::AmplitudeDamping | ChannelKind::Depolarizing
        ) {
            return Err(CliError::Config(format!("channel '{}' needs explicit Kraus operators", self.channel)));
        }
        let ps = self.p_values();
        if ps.is_empty() {
            return Err(CliError::Config("p_list is empty".into()));
        }
        if let Some(p) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(CliError::Config(format!("p = {p} outside [0, 1]")));
        }
        let g = self.gamma0;
        BlochState::new(g.r, g.theta, g.phi).map_err(|e| CliError::Config(format!("gamma0: {e}")))?;
        g.shifted(&petz_core::petz::Mismatch {
            dr: self.dr,
            ..Default::default()
        })
        .map_err(|e| CliError::Config(e.to_string()))?;
        self.dtheta.validate("dtheta")?;
        self.dphi.validate("dphi")?;
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(CliError::Config(format!("contour level {} outside (0, 1)", self.level)));
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(CliError::Config("deltas must be a nonempty list of finite values ≥ 0".into()));
        }
        if self.samples < 1 {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        if !self.single_qubit_offset.is_finite() {
            return Err(CliError::Config("single_qubit_offset must be finite".into()));
        }
        Ok(())
    }

    /// Where the sweep for `p` is written. With several p values the file
    /// stem gets a `_p<value>` suffix.
    pub fn output_for(&self, p: f64) -> Option<PathBuf> {
        let out = self.output.as_ref()?;
        if self.p_values().len() == 1 {
            return Some(out.clone());
        }
        let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let name = match out.extension() {
            Some(ext) => format!("{stem}_p{p}.{}", ext.to_string_lossy()),
            None => format!("{stem}_p{p}"),
        };
        Some(out.with_file_name(name))
    }

    /// The configuration with a single `p`, as echoed in output metadata.
    pub fn for_p(&self, p: f64) -> Self {
        Self {
            p,
            p_list: None,
            output: None,
            ..self.clone()
        }
    }
}
