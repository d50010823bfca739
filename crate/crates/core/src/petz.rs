//! Bloch-sphere states and the Petz recovery map
//! `R(X) = √γ E†(E(γ)^{-1/2} X E(γ)^{-1/2}) √γ`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::channels::{KrausChannel, QuantumChannel};
use crate::error::{Error, Result};
use crate::numerics::eig::{psd_eig, PINV_CUTOFF};
use crate::numerics::{check_state, pauli, psd_sqrt, relative_entropy, uhlmann_fidelity, ComplexMatrix};

/// Qubit state `(I + R(sinθ cosφ σ_x + sinθ sinφ σ_y + cosθ σ_z))/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    #[serde(rename = "R")]
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Offsets of the reference state from the true input.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mismatch {
    pub dr: f64,
    pub dtheta: f64,
    pub dphi: f64,
}

const RADIUS_SLACK: f64 = 1e-12;

impl BlochState {
    /// Validates the radius; angles are taken as given.
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(r.is_finite() && theta.is_finite() && phi.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(0.0..=1.0 + RADIUS_SLACK).contains(&r) {
            return Err(Error::RadiusOutOfRange(r));
        }
        Ok(Self { r, theta, phi })
    }

    pub fn maximally_mixed() -> Self {
        Self {
            r: 0.0,
            theta: 0.0,
            phi: 0.0,
        }
    }

    pub fn bloch_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [self.r * st * cp, self.r * st * sp, self.r * ct]
    }

    pub fn density(&self) -> ComplexMatrix {
        let [x, y, z] = self.bloch_vector();
        let [sx, sy, sz] = pauli::all();
        let v = &(&sx.scale_re(x) + &sy.scale_re(y)) + &sz.scale_re(z);
        (&ComplexMatrix::identity(2) + &v).scale_re(0.5)
    }

    /// The reference state obtained by shifting every coordinate.
    pub fn shifted(&self, m: &Mismatch) -> Result<Self> {
        let r = self.r + m.dr;
        if !(-RADIUS_SLACK..=1.0 + RADIUS_SLACK).contains(&r) {
            return Err(Error::ReferenceOutOfBall(r));
        }
        Ok(Self {
            r: r.clamp(0.0, 1.0),
            theta: self.theta + m.dtheta,
            phi: self.phi + m.dphi,
        })
    }
}

pub fn bloch_to_density(s: &BlochState) -> Result<ComplexMatrix> {
    BlochState::new(s.r, s.theta, s.phi).map(|s| s.density())
}

/// Inverse of [`bloch_to_density`] with `θ ∈ [0, π]`, `φ ∈ [0, 2π)`, and
/// `φ = 0` whenever `R·sinθ < 1e-12`.
pub fn density_to_bloch(rho: &ComplexMatrix) -> Result<BlochState> {
    if rho.rows() != 2 {
        return Err(Error::NotState(format!("{}x{} is not a qubit state", rho.rows(), rho.cols())));
    }
    check_state(rho)?;
    let comp = |s: ComplexMatrix| (&s * rho).trace().re;
    let [x, y, z] = pauli::all().map(comp);
    let r = (x * x + y * y + z * z).sqrt();
    if r < 1e-15 {
        return Ok(BlochState::maximally_mixed());
    }
    let theta = (z / r).clamp(-1.0, 1.0).acos();
    let rho_xy = (x * x + y * y).sqrt();
    let phi = if rho_xy < 1e-12 {
        0.0
    } else {
        y.atan2(x).rem_euclid(std::f64::consts::TAU)
    };
    Ok(BlochState {
        r: r.min(1.0),
        theta,
        phi,
    })
}

/// Kraus form of the Petz map of `channel` at reference `gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct PetzMap {
    /// `K_m = √γ E_m† E(γ)^{-1/2}`, one per channel Kraus operator.
    pub kraus: Vec<ComplexMatrix>,
    pub channel: KrausChannel,
    pub gamma: BlochState,
    /// Projector onto the support of `E(γ)`.
    pub support_projector: ComplexMatrix,
    pub support_rank: usize,
    /// Extra operators making the map trace preserving off the support of
    /// `E(γ)`; empty when `E(γ)` has full rank.
    pub completion: Vec<ComplexMatrix>,
}

impl PetzMap {
    pub fn is_completed(&self) -> bool {
        !self.completion.is_empty()
    }

    /// Every Kraus operator, completion last.
    pub fn all_kraus(&self) -> Vec<ComplexMatrix> {
        self.kraus.iter().chain(&self.completion).cloned().collect()
    }

    pub fn as_channel(&self) -> KrausChannel {
        KrausChannel::custom(self.all_kraus()).expect("Petz Kraus operators share one shape")
    }

    pub fn rank(&self) -> usize {
        self.kraus.len() + self.completion.len()
    }

    /// `‖Σ K_m†K_m − P‖_F` over the main operators only.
    pub fn support_residual(&self) -> f64 {
        let mut s = ComplexMatrix::zeros(self.dim_in(), self.dim_in());
        for k in &self.kraus {
            s += &(&k.adjoint() * k);
        }
        s.distance(&self.support_projector)
    }

    /// `‖Σ K†K − I‖_F` including the completion.
    pub fn tp_residual(&self) -> f64 {
        let mut s = ComplexMatrix::zeros(self.dim_in(), self.dim_in());
        for k in self.kraus.iter().chain(&self.completion) {
            s += &(&k.adjoint() * k);
        }
        s.distance(&ComplexMatrix::identity(self.dim_in()))
    }
}

impl QuantumChannel for PetzMap {
    fn dim_in(&self) -> usize {
        self.kraus[0].cols()
    }

    fn dim_out(&self) -> usize {
        self.kraus[0].rows()
    }

    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim_in() || x.cols() != self.dim_in() {
            return Err(Error::DimensionMismatch("Petz map applied to an operator of the wrong size".into()));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out(), self.dim_out());
        for k in self.kraus.iter().chain(&self.completion) {
            out += &(&(k * x) * &k.adjoint());
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct PetzMapRepr {
    kraus: Vec<ComplexMatrix>,
    gamma: BlochState,
    channel: KrausChannel,
    support_rank: usize,
    completed: bool,
}

impl Serialize for PetzMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PetzMapRepr {
            kraus: self.all_kraus(),
            gamma: self.gamma,
            channel: self.channel.clone(),
            support_rank: self.support_rank,
            completed: self.is_completed(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PetzMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = PetzMapRepr::deserialize(d)?;
        // The projector is not stored; rebuild it and keep the stored operators.
        let rebuilt = build_petz(&repr.channel, &repr.gamma).map_err(D::Error::custom)?;
        let n = repr.channel.rank();
        if repr.kraus.len() < n {
            return Err(D::Error::custom("fewer Petz Kraus operators than channel Kraus operators"));
        }
        let mut kraus = repr.kraus;
        let completion = kraus.split_off(n);
        if repr.completed == completion.is_empty() {
            return Err(D::Error::custom("completion flag disagrees with the operator count"));
        }
        Ok(PetzMap {
            kraus,
            channel: repr.channel,
            gamma: repr.gamma,
            support_projector: rebuilt.support_projector,
            support_rank: repr.support_rank,
            completion,
        })
    }
}

/// Builds the Petz map of `ch` for reference `gamma`.
///
/// When `E(γ)` is singular its inverse square root is taken on the support
/// only, so `Σ K†K` is the support projector `P`. For every unit vector `f`
/// spanning the kernel a completion operator `√γ|f⟩⟨f| / √⟨f|γ|f⟩` is added
/// (or `|f⟩⟨f|` if `⟨f|γ|f⟩` vanishes), which restores trace preservation.
pub fn build_petz(ch: &KrausChannel, gamma: &BlochState) -> Result<PetzMap> {
    let gamma = BlochState::new(gamma.r, gamma.theta, gamma.phi)?;
    if ch.dim_in() != 2 || ch.dim_out() != 2 {
        return Err(Error::DegenerateReference(format!(
            "Petz maps are built for qubit channels, not {}→{}",
            ch.dim_in(),
            ch.dim_out()
        )));
    }
    let g = gamma.density();
    let eg = ch.apply(&g)?.hermitian_part();
    let sd = psd_eig(&eg)?;
    let lmax = sd.values[0];
    if lmax <= 0.0 {
        return Err(Error::DegenerateReference("E(γ) vanishes".into()));
    }
    let thresh = PINV_CUTOFF * lmax;
    let on = |l: f64| l > thresh;
    let q = sd.apply_fn(|l| if on(l) { 1.0 / l.sqrt() } else { 0.0 });
    let proj = sd.apply_fn(|l| if on(l) { 1.0 } else { 0.0 });
    let rank = sd.values.iter().filter(|&&l| on(l)).count();

    let sg = psd_sqrt(&g)?;
    let kraus: Vec<ComplexMatrix> = ch.kraus.iter().map(|e| &(&sg * &e.adjoint()) * &q).collect();

    let mut completion = Vec::new();
    for (k, &l) in sd.values.iter().enumerate() {
        if on(l) {
            continue;
        }
        let f = sd.vectors.col(k);
        let ff = ComplexMatrix::outer(&f, &f);
        let w = (&ff * &g).trace().re;
        completion.push(if w > 1e-12 {
            (&sg * &ff).scale_re(1.0 / w.sqrt())
        } else {
            ff
        });
    }

    Ok(PetzMap {
        kraus,
        channel: ch.clone(),
        gamma,
        support_projector: proj,
        support_rank: rank,
        completion,
    })
}

/// `δF = 1 − F(ρ, R∘E(ρ))` where the recovery map uses the reference
/// `γ = ρ(R₀ + ΔR, θ₀ + Δθ, φ₀ + Δφ)`.
pub fn recovery_error_delta_f(rho0: &BlochState, mismatch: &Mismatch, ch: &KrausChannel) -> Result<f64> {
    let gamma = rho0.shifted(mismatch)?;
    let pm = build_petz(ch, &gamma)?;
    let rho = BlochState::new(rho0.r, rho0.theta, rho0.phi)?.density();
    let recovered = pm.apply(&ch.apply(&rho)?)?.hermitian_part();
    Ok((1.0 - uhlmann_fidelity(&rho, &recovered)?).clamp(0.0, 1.0))
}

/// `|D(E(ρ)‖E(γ)) − D(ρ‖γ)|`, or `+∞` when either divergence is infinite.
pub fn perfect_recovery_residual(rho: &BlochState, gamma: &BlochState, ch: &KrausChannel) -> Result<f64> {
    let (r, g) = (rho.density(), gamma.density());
    let before = relative_entropy(&r, &g)?;
    let after = relative_entropy(&ch.apply(&r)?.hermitian_part(), &ch.apply(&g)?.hermitian_part())?;
    if before.is_infinite() || after.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok((after - before).abs())
}
