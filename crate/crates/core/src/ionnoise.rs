//! Trapped-ion noise model for geometric-phase-gate circuits.
//!
//! A coupling offset `ε_g` leaves the spins entangled with the motional mode
//! (a residual displacement `D(√Δ·J_z)`) and over-rotates the phase gate by
//! `Δ = (ε_g/δ)²`. With `J_z = (σ_z⊗I + I⊗σ_z)/2` the motional trace is a
//! dephasing in the eigenbasis of `J_z` with factors `e^{−Δ(λ_i−λ_j)²/2}`.
//! Commuting every such dephaser past the rest of the circuit turns it into
//! a dephaser in the eigenbasis of the conjugated generator `Ĝ_l`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{KrausChannel, QuantumChannel};
use crate::error::{Error, Result};
use crate::numerics::{
    herm_eig, kron, partial_trace, pauli, uhlmann_fidelity, ComplexMatrix, Keep, SpectralDecomposition, ONE,
};
use crate::petz::PetzMap;
use crate::synth::gate::{apply_gate_left, embed1, embed2, zz, Gate, GateSequence};

/// Default motional Fock-space truncation for the oracle.
pub const DEFAULT_CUTOFF: usize = 32;
const MIN_CUTOFF: usize = 16;
const TAIL_LIMIT: f64 = 1e-12;

/// Laser and trap parameters of one geometric phase gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapParams {
    /// Spin-motion coupling strength (rad/s).
    pub g: f64,
    /// Detuning `ω − ω₀` (rad/s).
    pub delta: f64,
    /// Offset of the coupling strength (rad/s).
    pub eps_g: f64,
    /// Evolution time (s).
    pub t: f64,
}

impl TrapParams {
    /// Gate time `2Lπ/δ` closing `L` loops in phase space.
    pub fn gate_time(&self, loops: u32) -> Result<f64> {
        if self.delta == 0.0 {
            return Err(Error::ZeroDetuning);
        }
        Ok(2.0 * f64::from(loops) * std::f64::consts::PI / self.delta.abs())
    }

    pub fn gate_error(&self) -> Result<GateError> {
        if self.delta == 0.0 {
            return Err(Error::ZeroDetuning);
        }
        GateError::new((self.eps_g / self.delta).powi(2))
    }
}

/// Dimensionless two-qubit gate error `Δ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct GateError(f64);

impl GateError {
    pub fn new(delta: f64) -> Result<Self> {
        if delta.is_nan() || delta < 0.0 {
            return Err(Error::NegativeDelta(delta));
        }
        if !delta.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self(delta))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Phase-space displacement `α(t) = −i(g/δ)(e^{iδt} − 1)` and enclosed
/// phase `Φ(t) = (g/δ)²(δt − sin δt)`.
pub fn trajectory(tp: &TrapParams) -> Result<(Complex64, f64)> {
    if tp.delta == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    let r = tp.g / tp.delta;
    let x = tp.delta * tp.t;
    let alpha = Complex64::new(0.0, -r) * (Complex64::from_polar(1.0, x) - ONE);
    Ok((alpha, r * r * (x - x.sin())))
}

fn check_delta(delta: f64) -> Result<f64> {
    GateError::new(delta).map(GateError::value)
}

fn check_pair(pair: (usize, usize), width: usize) -> Result<()> {
    Gate::Cz(pair.0, pair.1).validate(width)
}

/// `J_z = (σ_z^{(a)} + σ_z^{(b)})/2` on a `width`-qubit register.
pub fn embedded_jz(pair: (usize, usize), width: usize) -> ComplexMatrix {
    let z = pauli::z();
    (&embed1(&z, pair.0, width) + &embed1(&z, pair.1, width)).scale_re(0.5)
}

/// Phase-flip channel `{e^{−Δ/2}√cosh Δ · I, e^{−Δ/2}√sinh Δ · CZ}` on `pair`.
pub fn eph_channel(delta: f64, pair: (usize, usize), width: usize) -> Result<KrausChannel> {
    let delta = check_delta(delta)?;
    check_pair(pair, width)?;
    let n = 1 << width;
    let damp = (-delta / 2.0).exp();
    let cz = embed2(&crate::synth::gate::cz_matrix(), pair.0, pair.1, width);
    KrausChannel::custom(vec![
        ComplexMatrix::identity(n).scale_re(damp * delta.cosh().sqrt()),
        cz.scale_re(damp * delta.sinh().sqrt()),
    ])
}

/// Noisy phase gate `E_ph ∘ U_ZZ(Δ) ∘ U_ZZ(Φ)`.
pub fn gpg_noise_channel(delta: f64, phi: f64, pair: (usize, usize), width: usize) -> Result<KrausChannel> {
    let eph = eph_channel(delta, pair, width)?;
    let u = embed2(&(&zz(delta) * &zz(phi)), pair.0, pair.1, width);
    let kraus = eph.kraus.iter().map(|e| e * &u).collect();
    KrausChannel::custom(kraus)
}

/// Gates of `gs` with the systematic shift `U_ZZ(Δ)` after every phase gate
/// and `offset` added to every single-qubit rotation angle. The flag marks
/// the original phase gates.
fn noisy_gates(gs: &GateSequence, delta: f64, offset: f64) -> Result<Vec<(Gate, bool)>> {
    gs.validate()?;
    let mut out = Vec::with_capacity(gs.gates.len() * 2);
    for g in &gs.gates {
        match *g {
            Gate::Gpg(_, a, b) => {
                out.push((*g, true));
                if delta != 0.0 {
                    out.push((Gate::Gpg(delta, a, b), false));
                }
            }
            Gate::Rx(t, q) => out.push((Gate::Rx(t + offset, q), false)),
            Gate::Ry(t, q) => out.push((Gate::Ry(t + offset, q), false)),
            Gate::Rz(t, q) => out.push((Gate::Rz(t + offset, q), false)),
            Gate::H(_) => out.push((*g, false)),
            Gate::Cnot(..) | Gate::Cz(..) => {
                return Err(Error::UnsupportedGate(format!(
                    "{g}: rewrite entanglers into phase gates before applying the noise model"
                )))
            }
        }
    }
    Ok(out)
}

fn product(gates: &[(Gate, bool)], width: usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(1 << width);
    for (g, _) in gates {
        apply_gate_left(g, &mut u, width);
    }
    u
}

/// One conjugated `J_z` per phase gate and their sum.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub width: usize,
    pub generators: Vec<ComplexMatrix>,
    pub pairs: Vec<(usize, usize)>,
    pub total: ComplexMatrix,
    pub spectrum: SpectralDecomposition,
}

/// `Ĝ_l = V_l · J_z(pair_l) · V_l†` with `V_l` the product of all gates after
/// phase gate `l`, systematic shifts included.
pub fn residual_generators(gs: &GateSequence, delta: f64) -> Result<GeneratorSet> {
    residual_generators_with_offset(gs, delta, 0.0)
}

pub fn residual_generators_with_offset(gs: &GateSequence, delta: f64, offset: f64) -> Result<GeneratorSet> {
    let delta = check_delta(delta)?;
    let gates = noisy_gates(gs, delta, offset)?;
    let width = gs.width;
    let n = 1 << width;
    let mut after = ComplexMatrix::identity(n);
    let mut found = Vec::new();
    for (g, original) in gates.iter().rev() {
        if let (true, Gate::Gpg(_, a, b)) = (*original, g) {
            let j = embedded_jz((*a, *b), width);
            found.push(((*a, *b), (&(&after * &j) * &after.adjoint()).hermitian_part()));
        }
        // V_{k−1} = V_k · G_k
        let mut gm = ComplexMatrix::identity(n);
        apply_gate_left(g, &mut gm, width);
        after = &after * &gm;
    }
    found.reverse();
    let mut total = ComplexMatrix::zeros(n, n);
    for (_, g) in &found {
        total += g;
    }
    let spectrum = herm_eig(&total)?;
    let (pairs, generators) = found.into_iter().unzip();
    Ok(GeneratorSet {
        width,
        generators,
        pairs,
        total,
        spectrum,
    })
}

/// `ρ ↦ W (F ∘ (W†ρW)) W†`: a Schur-product map in the orthonormal basis
/// `W`.
#[derive(Debug, Clone)]
pub struct SchurDephaser {
    pub basis: ComplexMatrix,
    pub factors: ComplexMatrix,
}

impl SchurDephaser {
    /// Factors `e^{−Δ(λ_i−λ_j)²/2}` for the spectrum of a generator.
    pub fn gaussian(spectrum: &SpectralDecomposition, delta: f64) -> Self {
        let l = &spectrum.values;
        let n = l.len();
        let mut f = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                f[(i, j)] = Complex64::new((-delta * (l[i] - l[j]).powi(2) / 2.0).exp(), 0.0);
            }
        }
        Self {
            basis: spectrum.vectors.clone(),
            factors: f,
        }
    }
}

impl QuantumChannel for SchurDephaser {
    fn dim_in(&self) -> usize {
        self.basis.rows()
    }

    fn dim_out(&self) -> usize {
        self.basis.rows()
    }

    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim_in() || !x.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator for a {}-dimensional map",
                x.rows(),
                x.cols(),
                self.dim_in()
            )));
        }
        let w = &self.basis;
        let mut inner = &(&w.adjoint() * x) * w;
        let n = inner.rows();
        for i in 0..n {
            for j in 0..n {
                inner[(i, j)] *= self.factors[(i, j)];
            }
        }
        Ok(&(w * &inner) * &w.adjoint())
    }
}

/// How the per-gate dephasers are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErmMode {
    /// One dephaser in the eigenbasis of `Σ Ĝ_l` (commutator corrections dropped).
    #[default]
    Combined,
    /// Each conjugated dephaser applied in turn, first gate first.
    ExactProduct,
}

/// The residual-motion channel `E_RM`, a chain of Schur dephasers applied
/// in order.
#[derive(Debug, Clone)]
pub struct ResidualMotion {
    pub dim: usize,
    pub stages: Vec<SchurDephaser>,
}

impl QuantumChannel for ResidualMotion {
    fn dim_in(&self) -> usize {
        self.dim
    }

    fn dim_out(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut y = x.clone();
        for s in &self.stages {
            y = s.apply(&y)?;
        }
        Ok(y)
    }
}

pub fn residual_motion_channel(gens: &GeneratorSet, delta: f64, mode: ErmMode) -> Result<ResidualMotion> {
    let delta = check_delta(delta)?;
    let dim = 1 << gens.width;
    if delta == 0.0 || gens.generators.is_empty() {
        return Ok(ResidualMotion { dim, stages: Vec::new() });
    }
    let stages = match mode {
        ErmMode::Combined => vec![SchurDephaser::gaussian(&gens.spectrum, delta)],
        ErmMode::ExactProduct => gens
            .generators
            .iter()
            .map(|g| Ok(SchurDephaser::gaussian(&herm_eig(g)?, delta)))
            .collect::<Result<_>>()?,
    };
    Ok(ResidualMotion { dim, stages })
}

/// `P(n ≥ cutoff)` for a coherent state with mean phonon number `mu`.
fn poisson_tail(mu: f64, cutoff: usize) -> f64 {
    if mu == 0.0 {
        return 0.0;
    }
    let mut log_term = -mu + cutoff as f64 * mu.ln() - ln_factorial(cutoff);
    let mut sum = 0.0;
    for m in cutoff..cutoff + 400 {
        let t = log_term.exp();
        sum += t;
        if t < 1e-30 * sum.max(1e-300) {
            break;
        }
        log_term += mu.ln() - ((m + 1) as f64).ln();
    }
    sum
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `exp(β(a† − a))|0⟩` in a Fock space truncated to `cutoff` levels, by
/// Taylor steps on the vector.
pub fn truncated_coherent_state(beta: f64, cutoff: usize) -> Vec<f64> {
    let steps = (beta.abs() * 2.0 * (cutoff as f64).sqrt()).ceil().max(1.0) as usize;
    let h = beta / steps as f64;
    let gen = |v: &[f64]| -> Vec<f64> {
        // (a† − a) v
        (0..cutoff)
            .map(|n| {
                let up = if n > 0 { (n as f64).sqrt() * v[n - 1] } else { 0.0 };
                let down = if n + 1 < cutoff { ((n + 1) as f64).sqrt() * v[n + 1] } else { 0.0 };
                up - down
            })
            .collect()
    };
    let mut psi = vec![0.0; cutoff];
    psi[0] = 1.0;
    for _ in 0..steps {
        let mut term = psi.clone();
        let mut acc = psi.clone();
        for k in 1..40 {
            term = gen(&term).into_iter().map(|x| x * h / k as f64).collect();
            let mag: f64 = term.iter().map(|x| x.abs()).sum();
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
            if mag < 1e-18 {
                break;
            }
        }
        psi = acc;
    }
    psi
}

/// Explicit motional trace of `D(√Δ·ΣĜ)` acting on `ρ ⊗ |0⟩⟨0|` with the
/// phonon mode truncated to `cutoff` levels.
pub fn fock_oracle_channel(gens: &GeneratorSet, delta: f64, cutoff: usize) -> Result<SchurDephaser> {
    let delta = check_delta(delta)?;
    let lmax = gens.spectrum.max_abs_value();
    let tail = poisson_tail(delta * lmax * lmax, cutoff);
    if cutoff < MIN_CUTOFF || tail > TAIL_LIMIT {
        return Err(Error::CutoffTooSmall { cutoff, tail });
    }
    let states: Vec<Vec<f64>> = gens
        .spectrum
        .values
        .iter()
        .map(|&l| truncated_coherent_state(delta.sqrt() * l, cutoff))
        .collect();
    let n = states.len();
    let mut f = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let overlap: f64 = states[i].iter().zip(&states[j]).map(|(a, b)| a * b).sum();
            f[(i, j)] = Complex64::new(overlap, 0.0);
        }
    }
    Ok(SchurDephaser {
        basis: gens.spectrum.vectors.clone(),
        factors: f,
    })
}

/// Noise settings for a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    pub delta: f64,
    #[serde(default)]
    pub mode: ErmMode,
    /// Added to every single-qubit rotation angle.
    #[serde(default)]
    pub single_qubit_offset: f64,
}

impl NoiseModel {
    pub fn new(delta: f64) -> Self {
        Self {
            delta,
            ..Self::default()
        }
    }
}

/// `E_RM ∘ U^Δ` for a phase-gate circuit.
#[derive(Debug, Clone)]
pub struct NoisyCircuit {
    pub width: usize,
    pub unitary: ComplexMatrix,
    pub residual: ResidualMotion,
}

impl NoisyCircuit {
    pub fn new(gs: &GateSequence, model: &NoiseModel) -> Result<Self> {
        let delta = check_delta(model.delta)?;
        let gates = noisy_gates(gs, delta, model.single_qubit_offset)?;
        let gens = residual_generators_with_offset(gs, delta, model.single_qubit_offset)?;
        Ok(Self {
            width: gs.width,
            unitary: product(&gates, gs.width),
            residual: residual_motion_channel(&gens, delta, model.mode)?,
        })
    }
}

impl QuantumChannel for NoisyCircuit {
    fn dim_in(&self) -> usize {
        1 << self.width
    }

    fn dim_out(&self) -> usize {
        1 << self.width
    }

    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let u = &self.unitary;
        self.residual.apply(&(&(u * x) * &u.adjoint()))
    }
}

/// Recovery map run on noisy hardware: ancillas start in `|0…0⟩`, the noisy
/// circuit acts, ancillas are discarded.
#[derive(Debug, Clone)]
pub struct NoisyPetz {
    pub petz: PetzMap,
    pub circuit: NoisyCircuit,
    pub ancilla_qubits: usize,
}

impl NoisyPetz {
    /// `gs` must be a phase-gate circuit on ancillas followed by the system.
    pub fn new(pm: &PetzMap, gs: &GateSequence, model: &NoiseModel) -> Result<Self> {
        if gs.width < 2 {
            return Err(Error::DimensionMismatch("recovery circuit needs an ancilla".into()));
        }
        let ancilla_qubits = gs.width - 1;
        if pm.all_kraus().len() > 1 << ancilla_qubits {
            return Err(Error::RankMismatch {
                expected: 1 << ancilla_qubits,
                found: pm.all_kraus().len(),
            });
        }
        Ok(Self {
            petz: pm.clone(),
            circuit: NoisyCircuit::new(gs, model)?,
            ancilla_qubits,
        })
    }

    /// `1 − F(R∘E(ρ), R^Δ∘E(ρ))`.
    pub fn epsilon(&self, rho: &ComplexMatrix) -> Result<f64> {
        let decohered = self.petz.channel.apply(rho)?;
        let ideal = self.petz.apply(&decohered)?;
        let noisy = self.apply(&decohered)?;
        Ok((1.0 - uhlmann_fidelity(&ideal.hermitian_part(), &noisy.hermitian_part())?).clamp(0.0, 1.0))
    }
}

impl QuantumChannel for NoisyPetz {
    fn dim_in(&self) -> usize {
        2
    }

    fn dim_out(&self) -> usize {
        2
    }

    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != 2 || x.cols() != 2 {
            return Err(Error::DimensionMismatch(format!("expected a qubit operator, got {}x{}", x.rows(), x.cols())));
        }
        let slots = 1 << self.ancilla_qubits;
        let mut anc = ComplexMatrix::zeros(slots, slots);
        anc[(0, 0)] = ONE;
        let out = self.circuit.apply(&kron(&anc, x))?;
        partial_trace(&out, (slots, 2), Keep::B)
    }
}

/// `R^Δ(ρ)` with the default noise settings.
pub fn noisy_petz_apply(pm: &PetzMap, gs: &GateSequence, delta: f64, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    NoisyPetz::new(pm, gs, &NoiseModel::new(delta))?.apply(rho)
}

/// `ε = 1 − F(R∘E(ρ), R^Δ∘E(ρ))` with the default noise settings.
pub fn recovery_error_epsilon(pm: &PetzMap, gs: &GateSequence, delta: f64, rho: &ComplexMatrix) -> Result<f64> {
    NoisyPetz::new(pm, gs, &NoiseModel::new(delta))?.epsilon(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::superop_distance;
    use crate::numerics::{c, ZERO};
    use crate::synth::gate::{raw_unitary, sequence_unitary};
    use std::f64::consts::PI;

    #[test]
    fn closed_loop_trajectory() {
        let tp = TrapParams {
            g: 2.0,
            delta: 7.0,
            eps_g: 0.0,
            t: 2.0 * PI / 7.0,
        };
        let (alpha, phi) = trajectory(&tp).unwrap();
        assert!(alpha.norm() <= 1e-12 * 2.0 / 7.0 * 10.0);
        assert!((phi - 2.0 * PI * 4.0 / 49.0).abs() < 1e-12);
        assert!(matches!(trajectory(&TrapParams { delta: 0.0, ..tp }), Err(Error::ZeroDetuning)));
    }

    #[test]
    fn phase_matches_quadrature() {
        let tp = TrapParams {
            g: 1.3,
            delta: 2.1,
            eps_g: 0.0,
            t: PI / 2.1,
        };
        let (alpha, phi) = trajectory(&tp).unwrap();
        let direct = Complex64::new(0.0, -tp.g / tp.delta) * (Complex64::from_polar(1.0, PI) - ONE);
        assert!((alpha - direct).norm() < 1e-14);
        // Simpson's rule on Im[A(t) α*(t)].
        let n = 2000;
        let h = tp.t / n as f64;
        let f = |t: f64| {
            let a = Complex64::from_polar(tp.g, tp.delta * t);
            let al = trajectory(&TrapParams { t, ..tp }).unwrap().0;
            (a * al.conj()).im
        };
        let mut s = f(0.0) + f(tp.t);
        for k in 1..n {
            s += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        assert!((s * h / 3.0 - phi).abs() < 1e-10);
    }

    #[test]
    fn eph_is_trace_preserving_with_expected_coherence() {
        for k in 0..100 {
            let d = 1e-4 * 1.1f64.powi(k);
            let ch = eph_channel(d, (0, 1), 2).unwrap();
            assert!(ch.validate().tp_residual <= 1e-14);
        }
        let d = 0.03;
        let ch = eph_channel(d, (0, 1), 2).unwrap();
        let mut x = ComplexMatrix::zeros(4, 4);
        x[(0, 3)] = ONE;
        let y = ch.apply(&x).unwrap();
        assert!((y[(0, 3)].re - (-2.0 * d).exp()).abs() < 1e-12);
        let id = eph_channel(0.0, (0, 1), 2).unwrap();
        assert_eq!(id.kraus[1], ComplexMatrix::zeros(4, 4));
        assert!(matches!(eph_channel(-1e-3, (0, 1), 2), Err(Error::NegativeDelta(_))));
    }

    #[test]
    fn gpg_noise_limits() {
        let ideal = gpg_noise_channel(0.0, 0.7, (0, 1), 2).unwrap();
        let u = zz(0.7);
        let x = ComplexMatrix::from_real_rows(&[[0.25; 4]; 4]);
        assert!(ideal.apply(&x).unwrap().distance(&(&(&u * &x) * &u.adjoint())) < 1e-15);
        let noisy = gpg_noise_channel(0.05, 0.7, (0, 1), 2).unwrap();
        let y = noisy.apply(&x).unwrap();
        let purity = (&y * &y).trace().re;
        assert!(purity < 1.0 - 1e-3);
    }

    #[test]
    fn single_generator_and_sign_flip() {
        let gs = GateSequence {
            width: 2,
            gates: vec![Gate::Gpg(PI / 2.0, 0, 1)],
        };
        let gens = residual_generators(&gs, 1e-3).unwrap();
        assert!(gens.generators[0].distance(&embedded_jz((0, 1), 2)) < 1e-15);
        let vals = &gens.spectrum.values;
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[3] + 1.0).abs() < 1e-14);
        let flipped = GateSequence {
            width: 2,
            gates: vec![Gate::Gpg(0.3, 0, 1), Gate::Rx(PI, 0), Gate::Rx(PI, 1)],
        };
        let g = residual_generators(&flipped, 1e-3).unwrap();
        assert!(g.generators[0].distance(&embedded_jz((0, 1), 2).scale_re(-1.0)) < 1e-14);
    }

    #[test]
    fn combined_equals_exact_for_one_generator() {
        let gs = GateSequence {
            width: 2,
            gates: vec![Gate::Ry(0.4, 1), Gate::Gpg(PI / 2.0, 0, 1), Gate::Rx(1.1, 0)],
        };
        let gens = residual_generators(&gs, 1e-2).unwrap();
        let a = residual_motion_channel(&gens, 1e-2, ErmMode::Combined).unwrap();
        let b = residual_motion_channel(&gens, 1e-2, ErmMode::ExactProduct).unwrap();
        assert!(superop_distance(&a, &b).unwrap() < 1e-13);
    }

    #[test]
    fn stacked_gates_accumulate_coherently() {
        // Two phase gates on one pair share the generator J_z. Displacements
        // add in amplitude for the combined form (e^{−8Δ} on |00⟩⟨11|) and in
        // probability for the product form (e^{−4Δ}), so the two differ at
        // first order in Δ.
        let gs = GateSequence {
            width: 2,
            gates: vec![Gate::Gpg(0.4, 0, 1), Gate::Gpg(0.7, 0, 1)],
        };
        let mut x = ComplexMatrix::zeros(4, 4);
        x[(0, 3)] = ONE;
        let mut gaps = Vec::new();
        for d in [1e-3, 5e-4] {
            let gens = residual_generators(&gs, d).unwrap();
            let comb = residual_motion_channel(&gens, d, ErmMode::Combined).unwrap();
            let prod = residual_motion_channel(&gens, d, ErmMode::ExactProduct).unwrap();
            assert!((comb.apply(&x).unwrap()[(0, 3)].re - (-8.0 * d).exp()).abs() < 1e-13);
            assert!((prod.apply(&x).unwrap()[(0, 3)].re - (-4.0 * d).exp()).abs() < 1e-13);
            gaps.push(superop_distance(&comb, &prod).unwrap());
        }
        assert!((gaps[0] / gaps[1] - 2.0).abs() < 0.05, "{gaps:?}");
    }

    #[test]
    fn coherent_overlap_reproduced() {
        for beta in [0.0, 0.05, 0.1, 0.5, 1.0] {
            let psi = truncated_coherent_state(beta, DEFAULT_CUTOFF);
            assert!((psi[0] - (-beta * beta / 2.0f64).exp()).abs() < 1e-12);
            let norm: f64 = psi.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_matches_eph_on_populations_and_extreme_coherence() {
        let gs = GateSequence {
            width: 2,
            gates: vec![Gate::Gpg(PI / 2.0, 0, 1)],
        };
        let d = 1e-3;
        let gens = residual_generators(&gs, d).unwrap();
        let oracle = fock_oracle_channel(&gens, d, DEFAULT_CUTOFF).unwrap();
        let eph = eph_channel(d, (0, 1), 2).unwrap();
        let x = ComplexMatrix::from_rows(&[
            [c(0.4, 0.0), ZERO, ZERO, c(0.1, 0.2)],
            [ZERO, c(0.3, 0.0), ZERO, ZERO],
            [ZERO, ZERO, c(0.2, 0.0), ZERO],
            [c(0.1, -0.2), ZERO, ZERO, c(0.1, 0.0)],
        ]);
        assert!(oracle.apply(&x).unwrap().distance(&eph.apply(&x).unwrap()) < 1e-10);
        assert!(matches!(
            fock_oracle_channel(&gens, d, 8),
            Err(Error::CutoffTooSmall { cutoff: 8, .. })
        ));
    }

    #[test]
    fn oracle_matches_combined() {
        let gs = GateSequence {
            width: 2,
            gates: vec![
                Gate::Gpg(PI / 2.0, 0, 1),
                Gate::Ry(0.7, 0),
                Gate::Gpg(PI / 2.0, 0, 1),
                Gate::Rx(-1.3, 1),
                Gate::Gpg(PI / 2.0, 1, 0),
            ],
        };
        for d in [1e-4, 1e-3, 1e-2] {
            let gens = residual_generators(&gs, d).unwrap();
            let oracle = fock_oracle_channel(&gens, d, DEFAULT_CUTOFF).unwrap();
            let combined = residual_motion_channel(&gens, d, ErmMode::Combined).unwrap();
            assert!(superop_distance(&oracle, &combined).unwrap() < 1e-8);
        }
    }

    #[test]
    fn zero_delta_is_ideal() {
        let gs = GateSequence {
            width: 2,
            gates: vec![Gate::Ry(0.3, 0), Gate::Gpg(PI / 2.0, 0, 1), Gate::Rz(0.9, 1)],
        };
        let nc = NoisyCircuit::new(&gs, &NoiseModel::new(0.0)).unwrap();
        assert!(nc.residual.stages.is_empty());
        assert!(nc.unitary.distance(&raw_unitary(&gs).unwrap()) < 1e-15);
        let _ = sequence_unitary(&gs).unwrap();
    }

    #[test]
    fn rejects_cnot_circuits() {
        let gs = GateSequence {
            width: 2,
            gates: vec![Gate::Cnot(0, 1)],
        };
        assert!(matches!(residual_generators(&gs, 1e-3), Err(Error::UnsupportedGate(_))));
    }
}
