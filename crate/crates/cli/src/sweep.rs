//! The prior-mismatch sweep and the gate-error threshold sweep.
//!
//! Both fan work out over rayon and collect results by index, then reduce
//! sequentially, so outputs do not depend on the worker count.

use petz_core::channels::KrausChannel;
use petz_core::ionnoise::{NoiseModel, NoisyPetz};
use petz_core::petz::{build_petz, recovery_error_delta_f, BlochState, Mismatch};
use petz_core::synth::{compile_recovery, GateSequence};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ReferenceMode, SweepConfig};
use crate::contour::{region_around, Grid};
use crate::sampling::sample_one;
use crate::{CliError, CliResult};

pub const TOOL: &str = concat!("petz ", env!("CARGO_PKG_VERSION"));

/// δF over the `(Δθ, Δφ)` grid for one `p`, with the contour around the
/// origin.
#[derive(Debug, Clone)]
pub struct PriorSweep {
    pub config: SweepConfig,
    pub dtheta: Vec<f64>,
    pub dphi: Vec<f64>,
    /// Row-major with `Δθ` as the row index.
    pub delta_f: Vec<f64>,
    /// Ordered `(Δθ, Δφ)` vertices; empty when the origin is not enclosed.
    pub contour: Vec<(f64, f64)>,
    pub area: f64,
}

impl PriorSweep {
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let ny = self.dphi.len();
        self.delta_f
            .iter()
            .enumerate()
            .map(move |(k, &v)| (self.dtheta[k / ny], self.dphi[k % ny], v))
    }

    /// δF at the grid point nearest the origin.
    pub fn origin_value(&self) -> f64 {
        let nearest = |xs: &[f64]| {
            (0..xs.len())
                .min_by(|&a, &b| xs[a].abs().total_cmp(&xs[b].abs()))
                .unwrap_or(0)
        };
        self.delta_f[nearest(&self.dtheta) * self.dphi.len() + nearest(&self.dphi)]
    }

    pub fn summary(&self) -> SweepSummary {
        SweepSummary {
            kind: "prior",
            channel: self.config.channel.to_string(),
            p: self.config.p,
            area: Some(self.area),
            contour_points: Some(self.contour.len()),
            origin_delta_f: Some(self.origin_value()),
            rows: self.delta_f.len(),
        }
    }

    fn metadata(&self) -> String {
        let cfg = serde_json::to_string(&self.config).expect("config serializes");
        format!(
            "# {TOOL} sweep=prior seed={} area={:e} contour_points={} config={cfg}",
            self.config.seed,
            self.area,
            self.contour.len()
        )
    }

    pub fn to_csv(&self) -> String {
        csv_with_metadata(
            &self.metadata(),
            &["dtheta", "dphi", "deltaF"],
            self.rows().map(|(a, b, c)| [a, b, c].map(num).to_vec()),
        )
    }

    /// The contour polyline as `dtheta,dphi` rows.
    pub fn contour_csv(&self) -> String {
        csv_with_metadata(
            &format!("# {TOOL} contour level={} area={:e}", self.config.level, self.area),
            &["dtheta", "dphi"],
            self.contour.iter().map(|&(a, b)| vec![num(a), num(b)]),
        )
    }
}

/// Per-Δ statistics of ε over the sample set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub delta: f64,
    pub mean_eps: f64,
    pub max_eps: f64,
    pub n: usize,
}

#[derive(Debug, Clone)]
pub struct ThresholdSweep {
    pub config: SweepConfig,
    pub rows: Vec<ThresholdRow>,
    /// CNOT count of the compiled circuit, or the largest one in matched mode.
    pub cnots: usize,
}

impl ThresholdSweep {
    pub fn summary(&self) -> SweepSummary {
        SweepSummary {
            kind: "threshold",
            channel: self.config.channel.to_string(),
            p: self.config.p,
            area: None,
            contour_points: None,
            origin_delta_f: None,
            rows: self.rows.len(),
        }
    }

    pub fn to_csv(&self) -> String {
        let cfg = serde_json::to_string(&self.config).expect("config serializes");
        let meta = format!(
            "# {TOOL} sweep=threshold seed={} cnots={} config={cfg}",
            self.config.seed, self.cnots
        );
        csv_with_metadata(
            &meta,
            &["delta", "mean_eps", "max_eps", "n"],
            self.rows
                .iter()
                .map(|r| vec![num(r.delta), num(r.mean_eps), num(r.max_eps), r.n.to_string()]),
        )
    }
}

/// What a sweep prints to stdout.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub kind: &'static str,
    pub channel: String,
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub area: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contour_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin_delta_f: Option<f64>,
    pub rows: usize,
}

/// Shortest round-trip representation.
fn num(x: f64) -> String {
    format!("{x:e}")
}

fn csv_with_metadata(meta: &str, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output");
    format!("{meta}\n{body}")
}

/// The part of a sweep CSV that must be identical across runs: everything
/// after the metadata line.
pub fn csv_body(csv: &str) -> &str {
    match csv.split_once('\n') {
        Some((first, rest)) if first.starts_with('#') => rest,
        _ => csv,
    }
}

fn first_error<T>(results: Vec<petz_core::Result<T>>) -> CliResult<Vec<T>> {
    results.into_iter().collect::<petz_core::Result<Vec<T>>>().map_err(CliError::from)
}

/// δF on the full grid for a single `p`.
pub fn sweep_prior_at(cfg: &SweepConfig, p: f64) -> CliResult<PriorSweep> {
    cfg.validate()?;
    let config = cfg.for_p(p);
    let ch = config.channel_at(p)?;
    let (dtheta, dphi) = (config.dtheta.points(), config.dphi.points());
    let ny = dphi.len();
    let gamma0 = config.gamma0;
    let dr = config.dr;
    let results: Vec<petz_core::Result<f64>> = (0..dtheta.len() * ny)
        .into_par_iter()
        .map(|k| {
            let m = Mismatch {
                dr,
                dtheta: dtheta[k / ny],
                dphi: dphi[k % ny],
            };
            recovery_error_delta_f(&gamma0, &m, &ch)
        })
        .collect();
    let delta_f = first_error(results)?;
    let grid = Grid {
        xs: &dtheta,
        ys: &dphi,
        values: &delta_f,
    };
    let (contour, area) = region_around(&grid, config.level, (0.0, 0.0)).unwrap_or_default();
    Ok(PriorSweep {
        config,
        dtheta,
        dphi,
        delta_f,
        contour,
        area,
    })
}

pub fn sweep_prior(cfg: &SweepConfig) -> CliResult<Vec<PriorSweep>> {
    cfg.validate()?;
    cfg.p_values().into_iter().map(|p| sweep_prior_at(cfg, p)).collect()
}

struct Recovery {
    petz: petz_core::petz::PetzMap,
    circuit: GateSequence,
}

fn compile(cfg: &SweepConfig, ch: &KrausChannel, gamma: &BlochState) -> petz_core::Result<Recovery> {
    let petz = build_petz(ch, gamma)?;
    let circuit = compile_recovery(&petz, cfg.dilation)?.gpg_circuit;
    Ok(Recovery { petz, circuit })
}

fn model(cfg: &SweepConfig, delta: f64) -> NoiseModel {
    NoiseModel {
        delta,
        mode: cfg.erm_mode,
        single_qubit_offset: cfg.single_qubit_offset,
    }
}

/// ε for every Δ of the grid at one sample.
fn epsilons(cfg: &SweepConfig, rec: &Recovery, rho: &BlochState) -> petz_core::Result<Vec<f64>> {
    let r = rho.density();
    cfg.deltas
        .iter()
        .map(|&d| NoisyPetz::new(&rec.petz, &rec.circuit, &model(cfg, d))?.epsilon(&r))
        .collect()
}

/// Mean and max ε per Δ for a single `p`.
pub fn sweep_threshold_at(cfg: &SweepConfig, p: f64) -> CliResult<ThresholdSweep> {
    cfg.validate()?;
    let config = cfg.for_p(p);
    let ch = config.channel_at(p)?;
    let (seed, mode) = (config.seed, config.sampling);
    let (per_sample, cnots): (Vec<Vec<f64>>, usize) = match config.reference {
        ReferenceMode::Fixed => {
            let rec = compile(&config, &ch, &config.gamma0)?;
            let results: Vec<_> = (0..config.samples as u64)
                .into_par_iter()
                .map(|i| epsilons(&config, &rec, &sample_one(seed, i, mode)))
                .collect();
            (first_error(results)?, rec.circuit.entangler_count())
        }
        ReferenceMode::Matched => {
            let results: Vec<_> = (0..config.samples as u64)
                .into_par_iter()
                .map(|i| {
                    let rho = sample_one(seed, i, mode);
                    let rec = compile(&config, &ch, &rho)?;
                    Ok((epsilons(&config, &rec, &rho)?, rec.circuit.entangler_count()))
                })
                .collect();
            let pairs = first_error(results)?;
            let cnots = pairs.iter().map(|x| x.1).max().unwrap_or(0);
            (pairs.into_iter().map(|x| x.0).collect(), cnots)
        }
    };
    let n = per_sample.len();
    let rows = config
        .deltas
        .iter()
        .enumerate()
        .map(|(k, &delta)| {
            let (mut sum, mut max) = (0.0, 0.0f64);
            for eps in &per_sample {
                sum += eps[k];
                max = max.max(eps[k]);
            }
            ThresholdRow {
                delta,
                mean_eps: sum / n as f64,
                max_eps: max,
                n,
            }
        })
        .collect();
    Ok(ThresholdSweep { config, rows, cnots })
}

pub fn sweep_threshold(cfg: &SweepConfig) -> CliResult<Vec<ThresholdSweep>> {
    cfg.validate()?;
    cfg.p_values().into_iter().map(|p| sweep_threshold_at(cfg, p)).collect()
}
