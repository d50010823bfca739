//! Single-qubit decoherence channels in Kraus form, plus a few generic
//! channel utilities (superoperators, Choi matrices, gate fidelity).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{herm_eig, kron, pauli, uhlmann_fidelity, ComplexMatrix, ONE, ZERO};

/// Tolerance for trace preservation and Choi positivity in [`KrausChannel::validate`].
pub const CHANNEL_TOL: f64 = 1e-10;

/// Anything that maps operators linearly to operators.
pub trait QuantumChannel {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    /// Applies the map to an arbitrary (not necessarily positive) operator.
    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Dephasing,
    AmplitudeDamping,
    Depolarizing,
    Erasure,
    Custom,
}

impl ChannelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::Dephasing => "dephasing",
            ChannelKind::AmplitudeDamping => "amplitude_damping",
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::Erasure => "erasure",
            ChannelKind::Custom => "custom",
        }
    }
}

impl std::str::FromStr for ChannelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "dephasing" => ChannelKind::Dephasing,
            "amplitude_damping" | "amplitude-damping" | "ad" => ChannelKind::AmplitudeDamping,
            "depolarizing" | "depolarising" => ChannelKind::Depolarizing,
            "erasure" => ChannelKind::Erasure,
            "custom" => ChannelKind::Custom,
            other => return Err(Error::Config(format!("unknown channel kind '{other}'"))),
        })
    }
}

impl std::fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `E(ρ) = Σ_m E_m ρ E_m†`. The order of the Kraus operators is significant:
/// dilations stack them in this order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausChannel {
    pub kind: ChannelKind,
    pub p: Option<f64>,
    pub kraus: Vec<ComplexMatrix>,
}

/// Result of [`KrausChannel::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Spectral norm of `Σ E_m†E_m − I`.
    pub tp_residual: f64,
    pub min_choi_eig: f64,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.tp_residual <= CHANNEL_TOL && self.min_choi_eig >= -CHANNEL_TOL
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ParamOutOfRange { name: "p", value: p });
    }
    Ok(())
}

impl KrausChannel {
    /// A channel from an arbitrary Kraus list. All operators must share one
    /// shape; nothing else is checked (see [`validate`](Self::validate)).
    pub fn custom(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty Kraus list".into()))?;
        let shape = (first.rows(), first.cols());
        if kraus.iter().any(|k| (k.rows(), k.cols()) != shape) {
            return Err(Error::DimensionMismatch("Kraus operators of different shapes".into()));
        }
        if kraus.iter().any(|k| !k.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            kind: ChannelKind::Custom,
            p: None,
            kraus,
        })
    }

    /// Phase flip with probability `p/2`: `{√(1−p/2)·I, √(p/2)·σ_z}`.
    pub fn dephasing(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self {
            kind: ChannelKind::Dephasing,
            p: Some(p),
            kraus: vec![pauli::id2().scale_re((1.0 - p / 2.0).sqrt()), pauli::z().scale_re((p / 2.0).sqrt())],
        })
    }

    /// `{|0⟩⟨0| + √(1−p)|1⟩⟨1|, √p|0⟩⟨1|}`.
    pub fn amplitude_damping(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self {
            kind: ChannelKind::AmplitudeDamping,
            p: Some(p),
            kraus: vec![
                ComplexMatrix::from_real_diag(&[1.0, (1.0 - p).sqrt()]),
                ComplexMatrix::from_real_rows(&[[0.0, p.sqrt()], [0.0, 0.0]]),
            ],
        })
    }

    /// `{√(1−p)·I, √(p/3)·σ_x, √(p/3)·σ_y, √(p/3)·σ_z}`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_p(p)?;
        let w = (p / 3.0).sqrt();
        let mut kraus = vec![pauli::id2().scale_re((1.0 - p).sqrt())];
        kraus.extend(pauli::all().iter().map(|s| s.scale_re(w)));
        Ok(Self {
            kind: ChannelKind::Depolarizing,
            p: Some(p),
            kraus,
        })
    }

    /// Replaces every input by the pure state `|e⟩`: `{|e⟩⟨0|, |e⟩⟨1|}`.
    pub fn erasure(target: [Complex64; 2]) -> Result<Self> {
        let n2 = target[0].norm_sqr() + target[1].norm_sqr();
        if (n2 - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(n2));
        }
        let kraus = (0..2)
            .map(|i| {
                let mut bra = [ZERO; 2];
                bra[i] = ONE;
                ComplexMatrix::outer(&target, &bra)
            })
            .collect();
        Ok(Self {
            kind: ChannelKind::Erasure,
            p: None,
            kraus,
        })
    }

    /// Builds one of the parametrized families by kind.
    pub fn from_kind(kind: ChannelKind, p: f64) -> Result<Self> {
        match kind {
            ChannelKind::Dephasing => Self::dephasing(p),
            ChannelKind::AmplitudeDamping => Self::amplitude_damping(p),
            ChannelKind::Depolarizing => Self::depolarizing(p),
            ChannelKind::Erasure => Self::erasure([ONE, ZERO]),
            ChannelKind::Custom => Err(Error::Config("custom channels need explicit Kraus operators".into())),
        }
    }

    pub fn rank(&self) -> usize {
        self.kraus.len()
    }

    /// `E†(X) = Σ_m E_m† X E_m`.
    pub fn adjoint_apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim_out() || x.cols() != self.dim_out() {
            return Err(Error::DimensionMismatch(format!(
                "adjoint of a channel into dimension {} applied to {}x{}",
                self.dim_out(),
                x.rows(),
                x.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_in(), self.dim_in());
        for k in &self.kraus {
            out += &(&(&k.adjoint() * x) * k);
        }
        Ok(out)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut s = ComplexMatrix::zeros(self.dim_in(), self.dim_in());
        for k in &self.kraus {
            s += &(&k.adjoint() * k);
        }
        let defect = &s - &ComplexMatrix::identity(self.dim_in());
        let tp_residual = match herm_eig(&defect.hermitian_part()) {
            Ok(sd) => sd.max_abs_value(),
            Err(_) => f64::INFINITY,
        };
        let min_choi_eig = choi(self)
            .ok()
            .and_then(|c| herm_eig(&c.hermitian_part()).ok())
            .map_or(f64::NEG_INFINITY, |sd| *sd.values.last().unwrap());
        ValidationReport {
            tp_residual,
            min_choi_eig,
        }
    }

    /// `self ∘ first`: applies `first`, then `self`.
    pub fn after(&self, first: &KrausChannel) -> Result<KrausChannel> {
        if first.dim_out() != self.dim_in() {
            return Err(Error::DimensionMismatch("composing channels of incompatible dimensions".into()));
        }
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| first.kraus.iter().map(move |b| a * b))
            .collect();
        KrausChannel::custom(kraus)
    }
}

impl QuantumChannel for KrausChannel {
    fn dim_in(&self) -> usize {
        self.kraus[0].cols()
    }

    fn dim_out(&self) -> usize {
        self.kraus[0].rows()
    }

    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim_in() || x.cols() != self.dim_in() {
            return Err(Error::DimensionMismatch(format!(
                "channel on dimension {} applied to {}x{}",
                self.dim_in(),
                x.rows(),
                x.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out(), self.dim_out());
        for k in &self.kraus {
            out += &(&(k * x) * &k.adjoint());
        }
        Ok(out)
    }
}

fn unit(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut e = ComplexMatrix::zeros(d, d);
    e[(i, j)] = ONE;
    e
}

/// Matrix `S` with `vec(E(X)) = S·vec(X)`, where `vec` stacks rows.
pub fn superoperator<C: QuantumChannel + ?Sized>(ch: &C) -> Result<ComplexMatrix> {
    let (di, d_o) = (ch.dim_in(), ch.dim_out());
    let mut s = ComplexMatrix::zeros(d_o * d_o, di * di);
    for i in 0..di {
        for j in 0..di {
            let y = ch.apply(&unit(di, i, j))?;
            for a in 0..d_o {
                for b in 0..d_o {
                    s[(a * d_o + b, i * di + j)] = y[(a, b)];
                }
            }
        }
    }
    Ok(s)
}

/// Unnormalized Choi matrix `Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
pub fn choi<C: QuantumChannel + ?Sized>(ch: &C) -> Result<ComplexMatrix> {
    let di = ch.dim_in();
    let mut out = ComplexMatrix::zeros(di * ch.dim_out(), di * ch.dim_out());
    for i in 0..di {
        for j in 0..di {
            out += &kron(&unit(di, i, j), &ch.apply(&unit(di, i, j))?);
        }
    }
    Ok(out)
}

/// Frobenius distance between the superoperators of two channels.
pub fn superop_distance<A, B>(a: &A, b: &B) -> Result<f64>
where
    A: QuantumChannel + ?Sized,
    B: QuantumChannel + ?Sized,
{
    Ok(superoperator(a)?.distance(&superoperator(b)?))
}

/// Average gate fidelity `(d·F_e + 1)/(d + 1)`, where `F_e` is the Uhlmann
/// fidelity of the normalized Choi states.
pub fn average_gate_fidelity<A, B>(a: &A, b: &B) -> Result<f64>
where
    A: QuantumChannel + ?Sized,
    B: QuantumChannel + ?Sized,
{
    let d = a.dim_in();
    if b.dim_in() != d || a.dim_out() != b.dim_out() {
        return Err(Error::DimensionMismatch("channels act on different spaces".into()));
    }
    let norm = 1.0 / d as f64;
    let ca = choi(a)?.scale_re(norm).hermitian_part();
    let cb = choi(b)?.scale_re(norm).hermitian_part();
    let fe = uhlmann_fidelity(&ca, &cb)?;
    Ok((d as f64 * fe + 1.0) / (d as f64 + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, cr};

    fn plus() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[0.5, 0.5], [0.5, 0.5]])
    }

    #[test]
    fn dephasing_examples() {
        let id = KrausChannel::dephasing(0.0).unwrap();
        let rho = ComplexMatrix::from_rows(&[[cr(0.6), c(0.1, 0.3)], [c(0.1, -0.3), cr(0.4)]]);
        assert!(id.apply(&rho).unwrap().distance(&rho) < 1e-15);
        let full = KrausChannel::dephasing(1.0).unwrap();
        let half = ComplexMatrix::identity(2).scale_re(0.5);
        assert!(full.apply(&plus()).unwrap().distance(&half) < 1e-15);
        let diag = ComplexMatrix::from_real_diag(&[0.3, 0.7]);
        let mid = KrausChannel::dephasing(0.5).unwrap();
        assert!(mid.apply(&diag).unwrap().distance(&diag) < 1e-15);
    }

    #[test]
    fn amplitude_damping_examples() {
        let one = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        let out = KrausChannel::amplitude_damping(0.5).unwrap().apply(&one).unwrap();
        assert!(out.distance(&ComplexMatrix::from_real_diag(&[0.5, 0.5])) < 1e-15);
        let ground = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let decayed = KrausChannel::amplitude_damping(1.0).unwrap().apply(&plus()).unwrap();
        assert!(decayed.distance(&ground) < 1e-15);
    }

    #[test]
    fn depolarizing_examples() {
        let zero = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let out = KrausChannel::depolarizing(0.5).unwrap().apply(&zero).unwrap();
        assert!(out.distance(&ComplexMatrix::from_real_diag(&[2.0 / 3.0, 1.0 / 3.0])) < 1e-15);
        let rho = ComplexMatrix::from_rows(&[[cr(0.9), c(0.2, 0.1)], [c(0.2, -0.1), cr(0.1)]]);
        let mixed = KrausChannel::depolarizing(0.75).unwrap().apply(&rho).unwrap();
        assert!(mixed.distance(&ComplexMatrix::identity(2).scale_re(0.5)) < 1e-15);
    }

    #[test]
    fn erasure_is_constant_and_idempotent() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let e = [cr(s), c(0.0, s)];
        let ch = KrausChannel::erasure(e).unwrap();
        let target = ComplexMatrix::outer(&e, &e);
        assert!(ch.apply(&plus()).unwrap().distance(&target) < 1e-15);
        assert!(ch.validate().passes());
        let twice = ch.after(&ch).unwrap();
        assert!(superop_distance(&twice, &ch).unwrap() < 1e-15);
        assert!(matches!(
            KrausChannel::erasure([cr(1.0), cr(1.0)]),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn rejects_out_of_range_p() {
        assert!(matches!(
            KrausChannel::dephasing(1.5),
            Err(Error::ParamOutOfRange { .. })
        ));
        assert!(KrausChannel::depolarizing(-0.1).is_err());
    }

    #[test]
    fn validation_report() {
        assert!(KrausChannel::dephasing(0.3).unwrap().validate().passes());
        let identity = KrausChannel::custom(vec![ComplexMatrix::identity(2)]).unwrap();
        assert!(identity.validate().passes());
        let lossy = KrausChannel::custom(vec![ComplexMatrix::identity(2).scale_re(0.9)]).unwrap();
        let r = lossy.validate();
        assert!(!r.passes());
        assert!((r.tp_residual - 0.19).abs() < 1e-14);
    }

    #[test]
    fn adjoint_examples() {
        let ch = KrausChannel::dephasing(0.4).unwrap();
        let id = ComplexMatrix::identity(2);
        assert!(ch.adjoint_apply(&id).unwrap().distance(&id) < 1e-15);
        assert!(ch.adjoint_apply(&pauli::z()).unwrap().distance(&pauli::z()) < 1e-15);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let ch = KrausChannel::amplitude_damping(0.3).unwrap();
        let s = serde_json::to_string(&ch).unwrap();
        assert!(s.starts_with("{\"kind\":\"amplitude_damping\",\"p\":0.3,\"kraus\":"));
        let back: KrausChannel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, ch);
    }

    #[test]
    fn average_gate_fidelity_of_identical_channels_is_one() {
        let ch = KrausChannel::depolarizing(0.2).unwrap();
        assert!((average_gate_fidelity(&ch, &ch).unwrap() - 1.0).abs() < 1e-12);
        // identity vs full dephasing: F_e = 1/2, so the average fidelity is 2/3
        let id = KrausChannel::dephasing(0.0).unwrap();
        let deph = KrausChannel::dephasing(1.0).unwrap();
        assert!((average_gate_fidelity(&id, &deph).unwrap() - 2.0 / 3.0).abs() < 1e-9);
    }
}
