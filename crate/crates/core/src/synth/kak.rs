//! Two-qubit synthesis through the Cartan decomposition
//! `U ∝ (A₁⊗B₁) · N(a,b,c) · (A₂⊗B₂)` with
//! `N(a,b,c) = exp(i(a·XX + b·YY + c·ZZ))`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{c, herm_eig, kron, pauli, ComplexMatrix, ONE, ZERO};
use crate::synth::euler::{one_qubit_gates, simplify};
use crate::synth::gate::{verify_equiv, Gate, GateSequence};

/// Input unitarity slack.
pub const UNITARY_TOL: f64 = 1e-9;
/// Largest accepted reconstruction error for a two-qubit synthesis.
pub const SU4_TOL: f64 = 1e-8;
/// Canonical coordinates closer than this to 0 or π/4 are snapped.
const COORD_SNAP: f64 = 1e-10;

// Diagonals of XX, YY, ZZ in the magic basis.
const D_XX: [f64; 4] = [1.0, 1.0, -1.0, -1.0];
const D_YY: [f64; 4] = [-1.0, 1.0, -1.0, 1.0];
const D_ZZ: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

fn magic() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (o, r, i) = (ZERO, c(h, 0.0), c(0.0, h));
    ComplexMatrix::from_rows(&[[r, o, o, i], [o, i, r, o], [o, i, -r, o], [r, o, o, -i]])
}

/// `exp(i(a·XX + b·YY + c·ZZ))`.
pub fn canonical_gate(a: f64, b: f64, cc: f64) -> ComplexMatrix {
    let phases: Vec<Complex64> = (0..4)
        .map(|k| Complex64::from_polar(1.0, a * D_XX[k] + b * D_YY[k] + cc * D_ZZ[k]))
        .collect();
    let m = magic();
    &(&m * &ComplexMatrix::from_diag(&phases)) * &m.adjoint()
}

/// `U ∝ k1 · N(coords) · k2` with `k1`, `k2` local.
#[derive(Debug, Clone)]
pub struct Kak {
    pub k1: ComplexMatrix,
    pub coords: [f64; 3],
    pub k2: ComplexMatrix,
}

pub(crate) fn check_unitary(u: &ComplexMatrix, n: usize) -> Result<()> {
    if u.rows() != n || u.cols() != n {
        return Err(Error::DimensionMismatch(format!("expected {n}x{n}, got {}x{}", u.rows(), u.cols())));
    }
    if !u.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = u.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary { defect });
    }
    Ok(())
}

pub(crate) fn to_special(u: &ComplexMatrix) -> ComplexMatrix {
    let n = u.rows() as f64;
    u.scale(u.det().powf(1.0 / n).inv())
}

// Pencil weights tried when diagonalizing Re M + r·Im M; any value avoiding
// accidental eigenvalue coincidences works.
#[allow(clippy::approx_constant)]
const PENCIL: [f64; 6] = [0.577_215_664_9, 1.414_213_562_4, -0.739_085_133_2, 2.718_281_828_5, -3.141_592_653_6, 0.318_309_886_2];

/// Real orthogonal `P` (det +1) with `Pᵀ M P` diagonal, for a complex
/// symmetric unitary `M`.
fn real_diagonalizer(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let re = m.map(|z| c(z.re, 0.0));
    let im = m.map(|z| c(z.im, 0.0));
    for r in PENCIL {
        let pencil = (&re + &im.scale_re(r)).hermitian_part();
        let eig = herm_eig(&pencil)?;
        let mut p = eig.vectors.map(|z| c(z.re, 0.0));
        if (&p.transpose() * &p).distance(&ComplexMatrix::identity(4)) > 1e-10 {
            continue;
        }
        let d = &(&p.transpose() * m) * &p;
        let off: f64 = (0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| d[(i, j)].norm())
            .fold(0.0, f64::max);
        if off > 1e-10 {
            continue;
        }
        if p.det().re < 0.0 {
            for i in 0..4 {
                p[(i, 0)] = -p[(i, 0)];
            }
        }
        return Ok(p);
    }
    Err(Error::ConvergenceFailure("simultaneous real diagonalization"))
}

pub fn kak(u: &ComplexMatrix) -> Result<Kak> {
    check_unitary(u, 4)?;
    let b = magic();
    let up = &(&b.adjoint() * &to_special(u)) * &b;
    let m2 = &up.transpose() * &up;
    let p = real_diagonalizer(&m2)?;
    let d = (&(&p.transpose() * &m2) * &p).diag();
    let mut th: Vec<f64> = d.iter().map(|z| z.arg() / 2.0).collect();
    let rot = |th: &[f64]| {
        let ph: Vec<Complex64> = th.iter().map(|&t| Complex64::from_polar(1.0, -t)).collect();
        &(&up * &p) * &ComplexMatrix::from_diag(&ph)
    };
    let mut k1p = rot(&th);
    // Σθ is fixed only modulo π; shifting one θ by π restores det = +1.
    if k1p.det().re < 0.0 {
        th[0] += PI;
        k1p = rot(&th);
    }
    let coord = |dv: &[f64; 4]| th.iter().zip(dv).map(|(t, s)| t * s).sum::<f64>() / 4.0;
    Ok(Kak {
        k1: &(&b * &k1p) * &b.adjoint(),
        coords: [coord(&D_XX), coord(&D_YY), coord(&D_ZZ)],
        k2: &(&b * &p.transpose()) * &b.adjoint(),
    })
}

/// Splits a 4×4 `k ∝ A⊗B` into unitary factors.
pub fn factor_local(k: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (mut best, mut norm) = ((0, 0), -1.0);
    for r in 0..2 {
        for s in 0..2 {
            let n = k.block(2 * r, 2 * s, 2, 2).frobenius_norm();
            if n > norm {
                best = (r, s);
                norm = n;
            }
        }
    }
    let mut bm = k.block(2 * best.0, 2 * best.1, 2, 2).scale_re(std::f64::consts::SQRT_2 / norm);
    let det = bm.det();
    bm = bm.scale(det.sqrt().inv());
    let mut a = ComplexMatrix::zeros(2, 2);
    for r in 0..2 {
        for s in 0..2 {
            a[(r, s)] = (&bm.adjoint() * &k.block(2 * r, 2 * s, 2, 2)).trace() / 2.0;
        }
    }
    if kron(&a, &bm).distance(k) > 1e-8 * k.frobenius_norm().max(1.0) {
        return Err(Error::ConvergenceFailure("local factor is not a tensor product"));
    }
    Ok((a, bm))
}

fn paulis2() -> [ComplexMatrix; 3] {
    let [x, y, z] = pauli::all();
    [kron(&x, &x), kron(&y, &y), kron(&z, &z)]
}

/// Folds each coordinate into `(−π/4, π/4]`, pushing the removed
/// `exp(iπ/2·PP) ∝ PP` factors into `k2`, and snaps values near 0 or π/4.
fn reduce(k: &mut Kak) {
    let pp = paulis2();
    for (i, x) in k.coords.iter_mut().enumerate() {
        let mut n = ((*x - FRAC_PI_4) / FRAC_PI_2).ceil();
        let mut y = *x - n * FRAC_PI_2;
        if (y + FRAC_PI_4).abs() < COORD_SNAP {
            y += FRAC_PI_2;
            n -= 1.0;
        }
        if (n as i64).rem_euclid(2) == 1 {
            k.k2 = &pp[i] * &k.k2;
        }
        if y.abs() < COORD_SNAP {
            y = 0.0;
        } else if (y - FRAC_PI_4).abs() < COORD_SNAP {
            y = FRAC_PI_4;
        }
        *x = y;
    }
}

/// Local conjugation swapping two canonical coordinates.
#[derive(Clone, Copy)]
enum Swap {
    /// `Rz(π/2)⊗Rz(π/2)` exchanges a and b.
    Ab,
    /// `Rx(π/2)⊗Rx(π/2)` exchanges b and c.
    Bc,
    /// `Ry(π/2)⊗Ry(π/2)` exchanges a and c.
    Ac,
}

impl Swap {
    fn gates(self, sign: f64) -> [Gate; 2] {
        let t = sign * FRAC_PI_2;
        match self {
            Swap::Ab => [Gate::Rz(t, 0), Gate::Rz(t, 1)],
            Swap::Bc => [Gate::Rx(t, 0), Gate::Rx(t, 1)],
            Swap::Ac => [Gate::Ry(t, 0), Gate::Ry(t, 1)],
        }
    }
}

/// `N(π/4, 0, 0)` up to phase.
fn one_cnot_core() -> Vec<Gate> {
    vec![
        Gate::H(0),
        Gate::Cnot(0, 1),
        Gate::Rz(-FRAC_PI_2, 0),
        Gate::Rx(-FRAC_PI_2, 1),
        Gate::H(0),
    ]
}

/// `N(a, 0, c)`.
fn two_cnot_core(a: f64, cc: f64) -> Vec<Gate> {
    vec![Gate::Cnot(0, 1), Gate::Rx(-2.0 * a, 0), Gate::Rz(-2.0 * cc, 1), Gate::Cnot(0, 1)]
}

/// `N(a, b, c)` up to phase with three CNOTs.
fn three_cnot_core(a: f64, b: f64, cc: f64) -> Vec<Gate> {
    vec![
        Gate::Rz(-FRAC_PI_2, 1),
        Gate::Cnot(1, 0),
        Gate::Rz(FRAC_PI_2 - 2.0 * cc, 0),
        Gate::Ry(2.0 * a - FRAC_PI_2, 1),
        Gate::Cnot(0, 1),
        Gate::Ry(FRAC_PI_2 - 2.0 * b, 1),
        Gate::Cnot(1, 0),
        Gate::Rz(FRAC_PI_2, 0),
    ]
}

/// Gates for `N(a, b, c)` using the fewest CNOTs the coordinates allow.
/// Expects reduced, snapped coordinates.
pub fn canonical_circuit(coords: [f64; 3]) -> Vec<Gate> {
    let nonzero: Vec<usize> = (0..3).filter(|&i| coords[i] != 0.0).collect();
    let [a, b, cc] = coords;
    let (core, swap) = match nonzero.as_slice() {
        [] => return Vec::new(),
        [i] if coords[*i] == FRAC_PI_4 => (
            one_cnot_core(),
            match i {
                0 => None,
                1 => Some(Swap::Ab),
                _ => Some(Swap::Ac),
            },
        ),
        [_] | [_, _] => {
            if b == 0.0 {
                (two_cnot_core(a, cc), None)
            } else if cc == 0.0 {
                (two_cnot_core(a, b), Some(Swap::Bc))
            } else {
                (two_cnot_core(b, cc), Some(Swap::Ab))
            }
        }
        _ => (three_cnot_core(a, b, cc), None),
    };
    match swap {
        None => core,
        Some(s) => {
            let mut g = s.gates(-1.0).to_vec();
            g.extend(core);
            g.extend(s.gates(1.0));
            g
        }
    }
}

fn assemble(k: &Kak) -> Result<GateSequence> {
    let (a2, b2) = factor_local(&k.k2)?;
    let (a1, b1) = factor_local(&k.k1)?;
    let mut gs = GateSequence::new(2);
    gs.gates.extend(one_qubit_gates(&a2, 0));
    gs.gates.extend(one_qubit_gates(&b2, 1));
    gs.gates.extend(canonical_circuit(k.coords));
    gs.gates.extend(one_qubit_gates(&a1, 0));
    gs.gates.extend(one_qubit_gates(&b1, 1));
    Ok(simplify(&gs))
}

/// Synthesizes a two-qubit unitary with at most three CNOTs.
pub fn decompose_su4(u: &ComplexMatrix) -> Result<GateSequence> {
    let mut k = kak(u)?;
    reduce(&mut k);
    let gs = assemble(&k)?;
    if verify_equiv(u, &gs)? > SU4_TOL {
        return Err(Error::ConvergenceFailure("two-qubit synthesis round trip"));
    }
    Ok(gs)
}

/// Diagonal `D` making `D·U` (U special unitary) have a vanishing canonical
/// coordinate, so `D·U` needs only two CNOTs.
fn zz_stripping_diagonal(m: &ComplexMatrix) -> [Complex64; 4] {
    let e = |i, j| m[(i, j)];
    let a1 = -e(1, 3) * e(2, 0) + e(1, 2) * e(2, 1) + e(1, 1) * e(2, 2) - e(1, 0) * e(2, 3);
    let a2 = e(0, 3) * e(3, 0) - e(0, 2) * e(3, 1) - e(0, 1) * e(3, 2) + e(0, 0) * e(3, 3);
    let psi = (a1.im + a2.im).atan2(a1.re - a2.re);
    [ONE, ONE, Complex64::from_polar(1.0, -psi), Complex64::from_polar(1.0, psi)]
}

/// Two-CNOT synthesis up to a trailing diagonal: returns `(C, d)` with
/// `U ∝ diag(d) · C`.
pub fn decompose_su4_up_to_diagonal(u: &ComplexMatrix) -> Result<(GateSequence, [Complex64; 4])> {
    check_unitary(u, 4)?;
    let d = zz_stripping_diagonal(&to_special(u));
    let du = &ComplexMatrix::from_diag(&d) * u;
    let mut k = kak(&du)?;
    reduce(&mut k);
    // One coordinate is zero up to rounding; force it.
    let smallest = (0..3)
        .min_by(|&i, &j| k.coords[i].abs().total_cmp(&k.coords[j].abs()))
        .unwrap_or(0);
    k.coords[smallest] = 0.0;
    let gs = assemble(&k)?;
    if verify_equiv(&du, &gs)? > SU4_TOL {
        return Err(Error::ConvergenceFailure("two-qubit synthesis up to diagonal"));
    }
    Ok((gs, d.map(|z| z.conj())))
}
