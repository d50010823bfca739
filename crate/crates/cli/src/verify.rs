//! Quick invariant suites across every module, reported as JSON.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use petz_core::channels::{average_gate_fidelity, superop_distance, ChannelKind, KrausChannel, QuantumChannel};
use petz_core::dilation::{dilate_general, dilate_rank2_analytic};
use petz_core::ionnoise::{
    eph_channel, fock_oracle_channel, residual_generators, residual_motion_channel, ErmMode, DEFAULT_CUTOFF,
};
use petz_core::numerics::random::haar_unitary;
use petz_core::numerics::{uhlmann_fidelity, ComplexMatrix, ONE};
use petz_core::petz::{build_petz, BlochState};
use petz_core::synth::fixtures::{amplitude_damping_recovery_circuit, dephasing_recovery_circuit};
use petz_core::synth::{circuit_channel, compile_recovery, decompose_3q, decompose_su4, verify_equiv, DilationMethod};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::sampling::{sample_bloch, SamplingMode};
use crate::sweep::TOOL;

/// Deliberately broken inputs that must make the report fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Inject {
    /// A channel whose Kraus operators are not trace preserving.
    TpViolation,
    /// The Fock-space oracle run with a cutoff of 4.
    OracleCutoff,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    /// Largest observed violation measure.
    pub worst: f64,
    pub tolerance: f64,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub tool: &'static str,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

struct Suite {
    report: SuiteReport,
}

impl Suite {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            report: SuiteReport {
                name,
                passed: true,
                checks: 0,
                worst: 0.0,
                tolerance,
                failures: Vec::new(),
            },
        }
    }

    /// Records `value ≤ tolerance`.
    fn bound(&mut self, what: impl FnOnce() -> String, value: f64) {
        self.bound_with(what, value, self.report.tolerance);
    }

    fn bound_with(&mut self, what: impl FnOnce() -> String, value: f64, tol: f64) {
        self.report.checks += 1;
        if value.is_nan() || value > self.report.worst {
            self.report.worst = value;
        }
        // NaN counts as a failure.
        if value.is_nan() || value > tol {
            self.fail(format!("{}: {value:.3e} > {tol:.1e}", what()));
        }
    }

    fn fail(&mut self, msg: String) {
        self.report.passed = false;
        self.report.failures.push(msg);
    }

    /// Runs `f`, turning an error into a failure.
    fn run(mut self, f: impl FnOnce(&mut Self) -> petz_core::Result<()>) -> SuiteReport {
        if let Err(e) = f(&mut self) {
            self.report.checks += 1;
            self.fail(e.to_string());
        }
        self.report
    }
}

const KINDS: [ChannelKind; 3] = [ChannelKind::Dephasing, ChannelKind::AmplitudeDamping, ChannelKind::Depolarizing];
const PS: [f64; 3] = [0.1, 0.5, 0.9];

fn references() -> Vec<BlochState> {
    sample_bloch(8, 2024, SamplingMode::Ball)
}

fn channels_suite() -> SuiteReport {
    Suite::new("channels", 1e-10).run(|s| {
        for kind in KINDS {
            for p in PS {
                let r = KrausChannel::from_kind(kind, p)?.validate();
                s.bound(|| format!("{kind} p={p} TP residual"), r.tp_residual);
                s.bound(|| format!("{kind} p={p} Choi eigenvalue"), (-r.min_choi_eig).max(0.0));
            }
        }
        Ok(())
    })
}

fn petz_suite() -> SuiteReport {
    Suite::new("petz", 1e-9).run(|s| {
        for kind in KINDS {
            for p in PS {
                let ch = KrausChannel::from_kind(kind, p)?;
                for g in references() {
                    let pm = build_petz(&ch, &g)?;
                    s.bound(|| format!("{kind} p={p} support residual"), pm.support_residual());
                    s.bound(|| format!("{kind} p={p} TP residual"), pm.tp_residual());
                    let gamma = g.density();
                    let back = pm.apply(&ch.apply(&gamma)?)?.hermitian_part();
                    let defect = 1.0 - uhlmann_fidelity(&gamma, &back)?;
                    s.bound(|| format!("{kind} p={p} reference recovery"), defect);
                }
            }
        }
        Ok(())
    })
}

fn dilation_suite() -> SuiteReport {
    Suite::new("dilation", 1e-9).run(|s| {
        for kind in KINDS {
            let ch = KrausChannel::from_kind(kind, 0.5)?;
            for g in references() {
                let pm = build_petz(&ch, &g)?;
                let mut dils = vec![dilate_general(&pm)?];
                if pm.rank() == 2 {
                    dils.push(dilate_rank2_analytic(&pm)?);
                }
                for d in dils {
                    s.bound_with(|| format!("{kind} unitarity"), d.u.unitarity_defect(), 1e-10);
                    s.bound(|| format!("{kind} induced channel"), superop_distance(&d, &pm)?);
                }
            }
        }
        Ok(())
    })
}

fn synthesis_suite() -> SuiteReport {
    Suite::new("synthesis", 1e-8).run(|s| {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let u = haar_unitary(&mut rng, 4);
            let gs = decompose_su4(&u)?;
            s.bound_with(|| "two-qubit CNOT count".into(), gs.cnot_count() as f64, 3.0);
            s.bound(|| "two-qubit reconstruction".into(), verify_equiv(&u, &gs)?);
        }
        for _ in 0..5 {
            let u = haar_unitary(&mut rng, 8);
            let gs = decompose_3q(&u)?;
            s.bound_with(|| "three-qubit CNOT count".into(), gs.cnot_count() as f64, 20.0);
            s.bound_with(|| "three-qubit reconstruction".into(), verify_equiv(&u, &gs)?, 1e-6);
        }
        let g = BlochState::new(0.5, FRAC_PI_2, FRAC_PI_4)?;
        for kind in KINDS {
            let pm = build_petz(&KrausChannel::from_kind(kind, 0.5)?, &g)?;
            let c = compile_recovery(&pm, DilationMethod::General)?;
            let induced = circuit_channel(&c.gpg_circuit, c.dilation.ancilla_qubits)?;
            s.bound(|| format!("{kind} phase-gate circuit channel"), superop_distance(&induced, &pm)?);
        }
        Ok(())
    })
}

fn fixtures_suite() -> SuiteReport {
    Suite::new("fixtures", 0.02).run(|s| {
        let g = BlochState::new(0.5, FRAC_PI_2, FRAC_PI_4)?;
        let cases = [
            ("dephasing", KrausChannel::dephasing(0.5)?, dephasing_recovery_circuit()),
            ("amplitude_damping", KrausChannel::amplitude_damping(0.5)?, amplitude_damping_recovery_circuit()),
        ];
        for (name, ch, gs) in cases {
            let pm = build_petz(&ch, &g)?;
            let err = 1.0 - average_gate_fidelity(&circuit_channel(&gs, 1)?, &pm)?;
            s.bound(|| format!("{name} printed circuit"), err);
        }
        Ok(())
    })
}

fn noise_suite() -> SuiteReport {
    Suite::new("noise", 1e-8).run(|s| {
        for k in 0..20 {
            let d = 1e-5 * 1.5f64.powi(k);
            let ch = eph_channel(d, (0, 1), 2)?;
            s.bound_with(|| format!("E_ph TP residual at Δ={d:e}"), ch.validate().tp_residual, 1e-14);
            let mut x = ComplexMatrix::zeros(4, 4);
            x[(0, 3)] = ONE;
            let y = ch.apply(&x)?;
            s.bound_with(|| format!("coherence factor at Δ={d:e}"), (y[(0, 3)].re - (-2.0 * d).exp()).abs(), 1e-12);
        }
        let g = BlochState::new(0.5, FRAC_PI_2, FRAC_PI_4)?;
        for kind in KINDS {
            let pm = build_petz(&KrausChannel::from_kind(kind, 0.5)?, &g)?;
            let gs = compile_recovery(&pm, DilationMethod::General)?.gpg_circuit;
            for d in [1e-4, 1e-2] {
                let gens = residual_generators(&gs, d)?;
                let oracle = fock_oracle_channel(&gens, d, DEFAULT_CUTOFF)?;
                let combined = residual_motion_channel(&gens, d, ErmMode::Combined)?;
                s.bound(|| format!("{kind} oracle vs combined at Δ={d:e}"), superop_distance(&oracle, &combined)?);
            }
        }
        Ok(())
    })
}

fn injected_suite(inject: Inject) -> SuiteReport {
    match inject {
        Inject::TpViolation => Suite::new("injected_tp_violation", 1e-10).run(|s| {
            let ch = KrausChannel::custom(vec![ComplexMatrix::identity(2).scale_re(0.9f64.sqrt())])?;
            s.bound(|| "TP residual".into(), ch.validate().tp_residual);
            Ok(())
        }),
        Inject::OracleCutoff => Suite::new("injected_oracle_cutoff", 1e-8).run(|s| {
            let g = BlochState::new(0.5, FRAC_PI_2, FRAC_PI_4)?;
            let pm = build_petz(&KrausChannel::dephasing(0.5)?, &g)?;
            let gs = compile_recovery(&pm, DilationMethod::General)?.gpg_circuit;
            let gens = residual_generators(&gs, 1e-2)?;
            let oracle = fock_oracle_channel(&gens, 1e-2, 4)?;
            let combined = residual_motion_channel(&gens, 1e-2, ErmMode::Combined)?;
            s.bound(|| "oracle vs combined".into(), superop_distance(&oracle, &combined)?);
            Ok(())
        }),
    }
}

/// Every suite, plus any injected failures. Suites run in parallel on the
/// current rayon pool; the report order is fixed.
pub fn run_verify(inject: &[Inject]) -> VerifyReport {
    let suites: [fn() -> SuiteReport; 6] = [
        channels_suite,
        petz_suite,
        dilation_suite,
        synthesis_suite,
        fixtures_suite,
        noise_suite,
    ];
    use rayon::prelude::*;
    let mut reports: Vec<SuiteReport> = suites.par_iter().map(|f| f()).collect();
    reports.extend(inject.iter().map(|&i| injected_suite(i)));
    VerifyReport {
        tool: TOOL,
        passed: reports.iter().all(|r| r.passed),
        suites: reports,
    }
}
