//! Gates, gate sequences and their text format.
//!
//! Qubit 0 is the most significant tensor factor. Rotations follow
//! `R_a(θ) = exp(−iθσ_a/2)` and `GPG(Φ) = exp(−iΦ/2 · σ_z⊗σ_z)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{c, cr, pauli, ComplexMatrix, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Rx(f64, usize),
    Ry(f64, usize),
    Rz(f64, usize),
    H(usize),
    /// `Cnot(control, target)`.
    Cnot(usize, usize),
    Cz(usize, usize),
    Gpg(f64, usize, usize),
}

pub fn rx(theta: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_rows(&[[cr(co), c(0.0, -s)], [c(0.0, -s), cr(co)]])
}

pub fn ry(theta: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_real_rows(&[[co, -s], [s, co]])
}

pub fn rz(theta: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_diag(&[c(co, -s), c(co, s)])
}

/// `exp(−iΦ/2 · σ_z⊗σ_z)`.
pub fn zz(phi: f64) -> ComplexMatrix {
    let (s, co) = (phi / 2.0).sin_cos();
    let m = c(co, -s);
    let p = c(co, s);
    ComplexMatrix::from_diag(&[m, p, p, m])
}

pub fn cnot_matrix() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
}

pub fn cz_matrix() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, 1.0, 1.0, -1.0])
}

#[inline]
fn bit(index: usize, q: usize, width: usize) -> usize {
    (index >> (width - 1 - q)) & 1
}

/// Embeds a one-qubit operator acting on qubit `q`.
pub fn embed1(u: &ComplexMatrix, q: usize, width: usize) -> ComplexMatrix {
    let n = 1 << width;
    let mask = 1 << (width - 1 - q);
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if (i & !mask) == (j & !mask) {
                out[(i, j)] = u[(bit(i, q, width), bit(j, q, width))];
            }
        }
    }
    out
}

/// Embeds a two-qubit operator acting on qubits `(a, b)` with `a` the more
/// significant index of `u`.
pub fn embed2(u: &ComplexMatrix, a: usize, b: usize, width: usize) -> ComplexMatrix {
    let n = 1 << width;
    let mask = (1 << (width - 1 - a)) | (1 << (width - 1 - b));
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if (i & !mask) == (j & !mask) {
                let r = 2 * bit(i, a, width) + bit(i, b, width);
                let s = 2 * bit(j, a, width) + bit(j, b, width);
                out[(i, j)] = u[(r, s)];
            }
        }
    }
    out
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rx(_, q) | Gate::Ry(_, q) | Gate::Rz(_, q) | Gate::H(q) => vec![q],
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::Gpg(_, a, b) => vec![a, b],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot(..) | Gate::Cz(..) | Gate::Gpg(..))
    }

    /// The gate's own 2×2 or 4×4 matrix.
    pub fn local_matrix(&self) -> ComplexMatrix {
        match *self {
            Gate::Rx(t, _) => rx(t),
            Gate::Ry(t, _) => ry(t),
            Gate::Rz(t, _) => rz(t),
            Gate::H(_) => pauli::hadamard(),
            Gate::Cnot(..) => cnot_matrix(),
            Gate::Cz(..) => cz_matrix(),
            Gate::Gpg(phi, _, _) => zz(phi),
        }
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= width {
                return Err(Error::IndexOutOfRange { index: q, width });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::UnsupportedGate(format!("two-qubit gate on a single qubit: {self}")));
        }
        if let Gate::Rx(t, _) | Gate::Ry(t, _) | Gate::Rz(t, _) | Gate::Gpg(t, _, _) = *self {
            if !t.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(())
    }

    /// Full `2^width` matrix.
    pub fn matrix(&self, width: usize) -> Result<ComplexMatrix> {
        self.validate(width)?;
        let m = self.local_matrix();
        Ok(match *self {
            Gate::Rx(_, q) | Gate::Ry(_, q) | Gate::Rz(_, q) | Gate::H(q) => embed1(&m, q, width),
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::Gpg(_, a, b) => embed2(&m, a, b, width),
        })
    }

    /// The same gate with qubit indices passed through `map`.
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::Rx(t, q) => Gate::Rx(t, map(q)),
            Gate::Ry(t, q) => Gate::Ry(t, map(q)),
            Gate::Rz(t, q) => Gate::Rz(t, map(q)),
            Gate::H(q) => Gate::H(map(q)),
            Gate::Cnot(a, b) => Gate::Cnot(map(a), map(b)),
            Gate::Cz(a, b) => Gate::Cz(map(a), map(b)),
            Gate::Gpg(t, a, b) => Gate::Gpg(t, map(a), map(b)),
        }
    }
}

/// Fixed 15-digit fraction. Emitting a parsed line reproduces it exactly and
/// the parsed angle is within 5e-16 of the original.
fn fmt_angle(x: f64) -> String {
    format!("{x:.15}")
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Rx(t, q) => write!(f, "RX q{q} {}", fmt_angle(t)),
            Gate::Ry(t, q) => write!(f, "RY q{q} {}", fmt_angle(t)),
            Gate::Rz(t, q) => write!(f, "RZ q{q} {}", fmt_angle(t)),
            Gate::H(q) => write!(f, "H q{q}"),
            Gate::Cnot(a, b) => write!(f, "CNOT q{a} q{b}"),
            Gate::Cz(a, b) => write!(f, "CZ q{a} q{b}"),
            Gate::Gpg(t, a, b) => write!(f, "GPG q{a} q{b} {}", fmt_angle(t)),
        }
    }
}

impl FromStr for Gate {
    type Err = String;
    fn from_str(line: &str) -> std::result::Result<Self, String> {
        let tok: Vec<&str> = line.split_whitespace().collect();
        let qubit = |s: &str| -> std::result::Result<usize, String> {
            s.strip_prefix('q')
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| format!("bad qubit '{s}'"))
        };
        let angle = |s: &str| -> std::result::Result<f64, String> {
            let v: f64 = s.parse().map_err(|_| format!("bad angle '{s}'"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("non-finite angle '{s}'"))
            }
        };
        let name = tok.first().ok_or("empty line")?.to_ascii_uppercase();
        let arity = match name.as_str() {
            "H" => 2,
            "RX" | "RY" | "RZ" | "CNOT" | "CZ" => 3,
            "GPG" => 4,
            other => return Err(format!("unknown gate '{other}'")),
        };
        if tok.len() != arity {
            return Err(format!("{name} takes {} operands, got {}", arity - 1, tok.len() - 1));
        }
        Ok(match name.as_str() {
            "RX" => Gate::Rx(angle(tok[2])?, qubit(tok[1])?),
            "RY" => Gate::Ry(angle(tok[2])?, qubit(tok[1])?),
            "RZ" => Gate::Rz(angle(tok[2])?, qubit(tok[1])?),
            "H" => Gate::H(qubit(tok[1])?),
            "CNOT" => Gate::Cnot(qubit(tok[1])?, qubit(tok[2])?),
            "CZ" => Gate::Cz(qubit(tok[1])?, qubit(tok[2])?),
            _ => Gate::Gpg(angle(tok[3])?, qubit(tok[1])?, qubit(tok[2])?),
        })
    }
}

/// Gates in time order: the first gate acts first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSequence {
    pub width: usize,
    pub gates: Vec<Gate>,
}

impl GateSequence {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub fn extend(&mut self, other: &GateSequence) {
        self.gates.extend_from_slice(&other.gates);
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cnot(..))).count()
    }

    /// CNOT, CZ and GPG gates.
    pub fn entangler_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub fn gpg_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Gpg(..))).count()
    }

    pub fn validate(&self) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.validate(self.width))
    }

    /// One gate per line.
    pub fn to_text(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }

    /// Parses the text format; the width is the larger of `min_width` and one
    /// more than the highest qubit index used. Blank lines and lines starting
    /// with `#` are skipped.
    pub fn parse(text: &str, min_width: usize) -> Result<Self> {
        let mut gates = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            gates.push(t.parse::<Gate>().map_err(|msg| Error::Parse { line: i + 1, msg })?);
        }
        let used = gates.iter().flat_map(Gate::qubits).max().map_or(0, |q| q + 1);
        let gs = Self {
            width: used.max(min_width).max(1),
            gates,
        };
        gs.validate()?;
        Ok(gs)
    }
}

/// Applies `g` on the left of `m` in place, touching only the affected
/// amplitudes instead of forming the full gate matrix.
pub fn apply_gate_left(g: &Gate, m: &mut ComplexMatrix, width: usize) {
    let local = g.local_matrix();
    let cols = m.cols();
    match *g {
        Gate::Rx(_, q) | Gate::Ry(_, q) | Gate::Rz(_, q) | Gate::H(q) => {
            let mask = 1 << (width - 1 - q);
            for i0 in (0..1 << width).filter(|i| i & mask == 0) {
                let i1 = i0 | mask;
                for j in 0..cols {
                    let (a, b) = (m[(i0, j)], m[(i1, j)]);
                    m[(i0, j)] = local[(0, 0)] * a + local[(0, 1)] * b;
                    m[(i1, j)] = local[(1, 0)] * a + local[(1, 1)] * b;
                }
            }
        }
        Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::Gpg(_, a, b) => {
            let ma = 1 << (width - 1 - a);
            let mb = 1 << (width - 1 - b);
            for base in (0..1 << width).filter(|i| i & (ma | mb) == 0) {
                let idx = [base, base | mb, base | ma, base | ma | mb];
                for j in 0..cols {
                    let v: [Complex64; 4] = idx.map(|i| m[(i, j)]);
                    for (r, &i) in idx.iter().enumerate() {
                        let mut acc = ZERO;
                        for (s, vs) in v.iter().enumerate() {
                            let l = local[(r, s)];
                            if l != ZERO {
                                acc += l * vs;
                            }
                        }
                        m[(i, j)] = acc;
                    }
                }
            }
        }
    }
}

/// Product of the gates in time order, without phase normalization.
pub fn raw_unitary(gs: &GateSequence) -> Result<ComplexMatrix> {
    gs.validate()?;
    let mut u = ComplexMatrix::identity(1 << gs.width);
    for g in &gs.gates {
        apply_gate_left(g, &mut u, gs.width);
    }
    Ok(u)
}

/// Product of the gates in time order, with the global phase fixed so the
/// first non-negligible entry of the first column is real and positive.
pub fn sequence_unitary(gs: &GateSequence) -> Result<ComplexMatrix> {
    Ok(raw_unitary(gs)?.with_canonical_phase())
}

/// `min_α ‖e^{iα}V − U‖_F` for two matrices of equal shape.
pub fn phase_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    if (u.rows(), u.cols()) != (v.rows(), v.cols()) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            u.rows(),
            u.cols(),
            v.rows(),
            v.cols()
        )));
    }
    // The optimal phase aligns Tr(V†U); subtracting explicitly avoids the
    // cancellation in the closed form ‖U‖² + ‖V‖² − 2|Tr(V†U)|.
    let t = v.inner(u);
    let phase = if t.norm() > 0.0 { t / t.norm() } else { ONE };
    Ok(u.distance(&v.scale(phase)))
}

/// Phase-minimized Frobenius distance between `u` and the sequence's unitary.
pub fn verify_equiv(u: &ComplexMatrix, gs: &GateSequence) -> Result<f64> {
    if u.rows() != 1 << gs.width || !u.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix vs a {}-qubit sequence",
            u.rows(),
            u.cols(),
            gs.width
        )));
    }
    phase_distance(u, &raw_unitary(gs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn sequence_unitary_examples() {
        let empty = GateSequence::new(2);
        assert_eq!(sequence_unitary(&empty).unwrap(), ComplexMatrix::identity(4));
        let hh = GateSequence {
            width: 1,
            gates: vec![Gate::H(0), Gate::H(0)],
        };
        assert!(sequence_unitary(&hh).unwrap().distance(&ComplexMatrix::identity(2)) < 1e-15);
        let cx = GateSequence {
            width: 2,
            gates: vec![Gate::Cnot(0, 1)],
        };
        assert_eq!(sequence_unitary(&cx).unwrap(), cnot_matrix());
        let rev = GateSequence {
            width: 2,
            gates: vec![Gate::Cnot(1, 0)],
        };
        let expect = ComplexMatrix::from_real_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ]);
        assert_eq!(sequence_unitary(&rev).unwrap(), expect);
    }

    #[test]
    fn in_place_application_matches_embedding() {
        let gates = [
            Gate::Rx(0.3, 2),
            Gate::Ry(-1.2, 0),
            Gate::Rz(2.5, 1),
            Gate::H(1),
            Gate::Cnot(2, 0),
            Gate::Cz(0, 1),
            Gate::Gpg(0.7, 2, 1),
        ];
        for g in gates {
            let full = g.matrix(3).unwrap();
            let mut m = ComplexMatrix::identity(8);
            apply_gate_left(&g, &mut m, 3);
            assert!(m.distance(&full) < 1e-15, "{g}");
            assert!(full.is_unitary(1e-14));
        }
    }

    #[test]
    fn time_order_is_left_to_right() {
        let gs = GateSequence {
            width: 1,
            gates: vec![Gate::Rz(0.4, 0), Gate::Ry(1.1, 0)],
        };
        let expect = &ry(1.1) * &rz(0.4);
        assert!(raw_unitary(&gs).unwrap().distance(&expect) < 1e-15);
    }

    #[test]
    fn index_errors() {
        let gs = GateSequence {
            width: 2,
            gates: vec![Gate::Cnot(0, 2)],
        };
        assert!(matches!(
            sequence_unitary(&gs),
            Err(Error::IndexOutOfRange { index: 2, width: 2 })
        ));
        let same = GateSequence {
            width: 2,
            gates: vec![Gate::Cz(1, 1)],
        };
        assert!(same.validate().is_err());
    }

    #[test]
    fn text_round_trip() {
        let gs = GateSequence {
            width: 2,
            gates: vec![
                Gate::Rz(3.0 * FRAC_PI_2, 0),
                Gate::Cnot(1, 0),
                Gate::Gpg(FRAC_PI_2, 0, 1),
                Gate::Ry(0.1 + 0.2, 1),
                Gate::H(1),
                Gate::Cz(0, 1),
                Gate::Rx(-PI, 0),
            ],
        };
        let text = gs.to_text();
        assert!(text.starts_with("RZ q0 4.712388980384690\nCNOT q1 q0\nGPG q0 q1 1.570796326794897\n"));
        let back = GateSequence::parse(&text, 2).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.gates.len(), gs.gates.len());
        for (a, b) in back.gates.iter().zip(&gs.gates) {
            assert!(a.local_matrix().distance(&b.local_matrix()) < 1e-15);
            assert_eq!(a.qubits(), b.qubits());
        }
        assert!(GateSequence::parse("FOO q0", 1).is_err());
        assert!(matches!(
            GateSequence::parse("H q0\nRZ q0", 1),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn verify_equiv_examples() {
        let id = GateSequence::new(2);
        assert!(verify_equiv(&ComplexMatrix::identity(4), &id).unwrap() < 1e-15);
        let cx = GateSequence {
            width: 2,
            gates: vec![Gate::Cnot(0, 1)],
        };
        let x1 = embed1(&pauli::x(), 0, 2);
        assert!(verify_equiv(&x1, &cx).unwrap() > 0.1);
        let phased = cnot_matrix().scale(c(0.6, 0.8));
        assert!(verify_equiv(&phased, &cx).unwrap() < 1e-14);
    }
}
