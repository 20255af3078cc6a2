//! Small dense operator algebra on one and two qubits.
//!
//! Everything here works on 2×2 or 4×4 complex matrices. The computational
//! basis is the Z eigenbasis, ordered `|++⟩, |+−⟩, |−+⟩, |−−⟩` with qubit 1
//! as the major index, and `Z|±⟩ = ±|±⟩`.

mod eigen;
mod matrix;
mod state;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eigen::hermitian_eigenvalues;
pub use matrix::ComplexMatrix;
pub use state::State;

/// Max-norm tolerance for Hermiticity and operator identities.
pub const OPERATOR_TOL: f64 = 1e-12;
/// Largest imaginary part of an expectation value that is silently dropped.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted for a density matrix.
pub const POSITIVITY_TOL: f64 = -1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("unsupported dimension {0}, expected 2 or 4")]
    InvalidDimension(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian (max-norm deviation {0:e})")]
    NotHermitian(f64),
    #[error("expectation has imaginary part {0:e}")]
    ImaginaryResidue(f64),
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("density matrix trace is {0}, expected 1")]
    TraceNotOne(f64),
    #[error("density matrix has negative eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("row {row} product is neither +I nor -I (distance {distance:e})")]
    NotIdentity { row: usize, distance: f64 },
    #[error("expected a single-qubit state, got dimension {0}")]
    NotSingleQubit(usize),
}

pub type Result<T> = std::result::Result<T, QuantumError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Standard Pauli matrix in the Z eigenbasis.
pub fn pauli(axis: Axis) -> ComplexMatrix {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let entries = match axis {
        Axis::X => [o, one, one, o],
        Axis::Y => [o, -i, i, o],
        Axis::Z => [one, o, o, -one],
    };
    ComplexMatrix::from_entries(2, entries.to_vec()).expect("2x2 literal")
}

/// Kronecker product `a ⊗ b`; `a` acts on qubit 1.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    for m in [a, b] {
        if m.dim() != 2 {
            return Err(QuantumError::DimensionMismatch {
                left: m.dim(),
                right: 2,
            });
        }
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); 16];
    for r1 in 0..2 {
        for c1 in 0..2 {
            for r2 in 0..2 {
                for c2 in 0..2 {
                    entries[(2 * r1 + r2) * 4 + (2 * c1 + c2)] = a[(r1, c1)] * b[(r2, c2)];
                }
            }
        }
    }
    ComplexMatrix::from_entries(4, entries)
}

/// `ab − ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let ab = a.mul(b)?;
    let ba = b.mul(a)?;
    ab.sub(&ba)
}

/// The nine two-qubit observables of the Mermin–Peres square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    X1,
    X2,
    X1X2,
    Y1,
    Y2,
    Y1Y2,
    X1Y2,
    Y1X2,
    Z1Z2,
}

impl Label {
    pub const ALL: [Label; 9] = [
        Label::X1,
        Label::X2,
        Label::X1X2,
        Label::Y1,
        Label::Y2,
        Label::Y1Y2,
        Label::X1Y2,
        Label::Y1X2,
        Label::Z1Z2,
    ];

    /// Pauli factor on (qubit 1, qubit 2); `None` is the identity.
    fn factors(self) -> (Option<Axis>, Option<Axis>) {
        use Axis::*;
        match self {
            Label::X1 => (Some(X), None),
            Label::X2 => (None, Some(X)),
            Label::X1X2 => (Some(X), Some(X)),
            Label::Y1 => (Some(Y), None),
            Label::Y2 => (None, Some(Y)),
            Label::Y1Y2 => (Some(Y), Some(Y)),
            Label::X1Y2 => (Some(X), Some(Y)),
            Label::Y1X2 => (Some(Y), Some(X)),
            Label::Z1Z2 => (Some(Z), Some(Z)),
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        let (q1, q2) = self.factors();
        let factor = |a: Option<Axis>| a.map(pauli).unwrap_or_else(|| ComplexMatrix::identity(2));
        tensor(&factor(q1), &factor(q2)).expect("2x2 factors")
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::X1 => "X1",
            Label::X2 => "X2",
            Label::X1X2 => "X1X2",
            Label::Y1 => "Y1",
            Label::Y2 => "Y2",
            Label::Y1Y2 => "Y1Y2",
            Label::X1Y2 => "X1Y2",
            Label::Y1X2 => "Y1X2",
            Label::Z1Z2 => "Z1Z2",
        }
    }

    pub fn index(self) -> usize {
        Label::ALL.iter().position(|&l| l == self).expect("listed")
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The six rows of the Mermin system, in equation order.
pub const MERMIN_ROWS: [[Label; 3]; 6] = [
    [Label::X1, Label::X2, Label::X1X2],
    [Label::Y1, Label::Y2, Label::Y1Y2],
    [Label::X1, Label::Y2, Label::X1Y2],
    [Label::Y1, Label::X2, Label::Y1X2],
    [Label::X1Y2, Label::Y1X2, Label::Z1Z2],
    [Label::X1X2, Label::Y1Y2, Label::Z1Z2],
];

/// Right-hand sides of the Mermin system.
pub const MERMIN_TARGETS: [i8; 6] = [1, 1, 1, 1, 1, -1];

/// Multiplies the three operators of every Mermin row and reports whether
/// each product is `+I` or `−I`.
pub fn verify_row_identities() -> Result<[i8; 6]> {
    let id = ComplexMatrix::identity(4);
    let neg_id = id.scale(Complex64::new(-1.0, 0.0));
    let mut signs = [0i8; 6];
    for (row, labels) in MERMIN_ROWS.iter().enumerate() {
        let product = labels[0]
            .matrix()
            .mul(&labels[1].matrix())?
            .mul(&labels[2].matrix())?;
        let to_plus = product.sub(&id)?.max_norm();
        let to_minus = product.sub(&neg_id)?.max_norm();
        signs[row] = if to_plus <= OPERATOR_TOL {
            1
        } else if to_minus <= OPERATOR_TOL {
            -1
        } else {
            return Err(QuantumError::NotIdentity {
                row: row + 1,
                distance: to_plus.min(to_minus),
            });
        };
    }
    Ok(signs)
}

/// Labels of the Bell-like basis that diagonalizes `Z1Z2` and `X1Y2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];

    /// Eigenvalues `(Z1Z2, X1Y2)` on this basis vector.
    pub fn eigenvalues(self) -> (f64, f64) {
        match self {
            BellLabel::PhiPlus => (1.0, -1.0),
            BellLabel::PhiMinus => (1.0, 1.0),
            BellLabel::PsiPlus => (-1.0, 1.0),
            BellLabel::PsiMinus => (-1.0, -1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "Phi+",
            BellLabel::PhiMinus => "Phi-",
            BellLabel::PsiPlus => "Psi+",
            BellLabel::PsiMinus => "Psi-",
        }
    }

    pub fn amplitudes(self) -> [Complex64; 4] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let re = Complex64::new(h, 0.0);
        let ip = Complex64::new(0.0, h);
        match self {
            // (±i|++⟩ + |−−⟩)/√2
            BellLabel::PhiPlus => [ip, z, z, re],
            BellLabel::PhiMinus => [-ip, z, z, re],
            // (±i|+−⟩ + |−+⟩)/√2
            BellLabel::PsiPlus => [z, ip, re, z],
            BellLabel::PsiMinus => [z, -ip, re, z],
        }
    }
}

pub fn bell_like_basis() -> [(BellLabel, State); 4] {
    BellLabel::ALL.map(|l| (l, State::pure(l.amplitudes().to_vec()).expect("normalized")))
}

/// Eigenvalue of `obs` on `vector`, if `vector` is an eigenvector within
/// [`OPERATOR_TOL`].
pub fn eigenvalue_on(obs: &ComplexMatrix, vector: &[Complex64]) -> Result<Option<f64>> {
    let image = obs.apply(vector)?;
    let norm2: f64 = vector.iter().map(|c| c.norm_sqr()).sum();
    let rayleigh: Complex64 = vector
        .iter()
        .zip(&image)
        .map(|(v, w)| v.conj() * w)
        .sum::<Complex64>()
        / norm2;
    let off = vector
        .iter()
        .zip(&image)
        .map(|(v, w)| (w - rayleigh * v).norm())
        .fold(0.0, f64::max);
    if off <= OPERATOR_TOL && rayleigh.im.abs() <= OPERATOR_TOL {
        Ok(Some(rayleigh.re))
    } else {
        Ok(None)
    }
}

/// `⟨ψ|O|ψ⟩` or `tr(ρO)`.
pub fn expectation(obs: &ComplexMatrix, state: &State) -> Result<f64> {
    let dev = obs.hermiticity_deviation();
    if dev > OPERATOR_TOL {
        return Err(QuantumError::NotHermitian(dev));
    }
    let value = state.raw_expectation(obs)?;
    if value.im.abs() > IMAG_RESIDUE_TOL {
        return Err(QuantumError::ImaginaryResidue(value.im));
    }
    Ok(value.re)
}

/// `⟨σx⟩² + ⟨σy⟩² + ⟨σz⟩²` for a single-qubit state.
pub fn bloch_norm_check(state: &State) -> Result<f64> {
    if state.dim() != 2 {
        return Err(QuantumError::NotSingleQubit(state.dim()));
    }
    Axis::ALL.iter().try_fold(0.0, |acc, &axis| {
        let e = expectation(&pauli(axis), state)?;
        Ok(acc + e * e)
    })
}

/// Both sides of the Robertson–Schrödinger relation
/// `(ΔA)²(ΔB)² ≥ (⟨C⟩² + ⟨F⟩²)/4` with `[A,B] = iC` and
/// `F = AB + BA − 2⟨A⟩⟨B⟩`.
pub fn robertson_schrodinger_check(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    state: &State,
) -> Result<(f64, f64)> {
    let mean_a = expectation(a, state)?;
    let mean_b = expectation(b, state)?;
    let var_a = expectation(&a.mul(a)?, state)? - mean_a * mean_a;
    let var_b = expectation(&b.mul(b)?, state)? - mean_b * mean_b;
    // C = -i[A,B]
    let c = commutator(a, b)?.scale(Complex64::new(0.0, -1.0));
    let anti = a.mul(b)?.add(&b.mul(a)?)?;
    let mean_c = expectation(&c, state)?;
    let mean_f = expectation(&anti, state)? - 2.0 * mean_a * mean_b;
    Ok((var_a * var_b, (mean_c * mean_c + mean_f * mean_f) / 4.0))
}
