//! Value assignments with unsharp eigenvalues.
//!
//! Each observable takes a value `s + d` where `s = ±1` is the mean and `d`
//! a small deviation. Product observables get first-order propagated
//! deviations, `d_jk = s_j d_k + d_j s_k`, and each sharp Mermin row turns
//! into a polynomial equation in the deviations:
//!
//! ```text
//! (v1+δ1)²(v2+δ2)² = 1 + 2 v1 v2 δ12        (X1, X2)
//! (v3+δ3)²(v4+δ4)² = 1 + 2 v3 v4 δ34        (Y1, Y2)
//! (v1+δ1)²(v4+δ4)² = 1 + 2 v1 v4 δ14        (X1, Y2)
//! (v3+δ3)²(v2+δ2)² = 1 + 2 v3 v2 δ32        (Y1, X2)
//! (w1+Δ1)²(w2+Δ2)² = 1 + 2 w1 w2 Δ12        (Z1Z2, X1Y2)
//! −(w1+Δ1)²(w3+Δ3)² = −1 + 2 w1 w3 Δ13      (Z1Z2, Y1Y2)
//! ```
//!
//! Substituting `x_j = v_j δ_j` and `y_j = w_j Δ_j` removes every sign and
//! leaves the single relation `(1+a)²(1+b)² = 1 + 2(a+b)` for the first five
//! rows, so all sign patterns share one reduced solution set.

mod family;
mod pair;
mod solve;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use family::{fit_slope_through_origin, trace_family, FamilyKind, FamilyPoint, SolutionFamily};
pub use pair::{branch_solve_pair, literal_closing, pair_relation, Branch};
pub use solve::{
    enumerate_all_patterns, solve_v_reduced, solve_v_system, solve_w_system, EnumerationTable,
    PatternPairResult, VBranches, VPatternResult, VSolution, WPatternResult, WSolution,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("sign entries must be +1 or -1")]
    NotSign,
    #[error("free parameter {t:e} outside [t_min = {t_min:e}, epsilon = {epsilon:e}] in magnitude")]
    SeedOutOfRange { t: f64, t_min: f64, epsilon: f64 },
    #[error("no real solution for a = {0} (discriminant < 0)")]
    NoRealSolution(f64),
    #[error("degenerate pair relation at a = -1")]
    Degenerate,
    #[error("Newton closure did not converge in {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },
    #[error("branch combination cannot close the cycle (residual {0:e})")]
    ClosureFailed(f64),
    #[error("deviation {value:e} exceeds the bound epsilon = {epsilon:e}")]
    BoundViolated { value: f64, epsilon: f64 },
    #[error("verified residual {0:e} exceeds newton_tol")]
    ResidualTooLarge(f64),
    #[error("invalid continuation grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, SolverError>;

/// Means `v1..v4` of the single-qubit observables and `w1..w3` of
/// `Z1Z2, X1Y2, Y1Y2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignPattern {
    v: [i8; 4],
    w: [i8; 3],
}

fn all_signs(values: &[i8]) -> bool {
    values.iter().all(|&s| s == 1 || s == -1)
}

impl SignPattern {
    pub fn new(v: [i8; 4], w: [i8; 3]) -> Result<Self> {
        if all_signs(&v) && all_signs(&w) {
            Ok(Self { v, w })
        } else {
            Err(SolverError::NotSign)
        }
    }

    pub fn v(&self) -> [i8; 4] {
        self.v
    }

    pub fn w(&self) -> [i8; 3] {
        self.w
    }

    pub fn vf(&self, j: usize) -> f64 {
        f64::from(self.v[j])
    }

    pub fn wf(&self, j: usize) -> f64 {
        f64::from(self.w[j])
    }

    /// The 16 v-sign tuples in binary order, `+1` before `−1`.
    pub fn all_v() -> Vec<[i8; 4]> {
        (0u8..16).map(|b| std::array::from_fn(|k| sign_bit(b, 3 - k))).collect()
    }

    pub fn all_w() -> Vec<[i8; 3]> {
        (0u8..8).map(|b| std::array::from_fn(|k| sign_bit(b, 2 - k))).collect()
    }

    pub fn negated(&self) -> Self {
        Self {
            v: self.v.map(|s| -s),
            w: self.w.map(|s| -s),
        }
    }
}

fn sign_bit(bits: u8, k: usize) -> i8 {
    if bits >> k & 1 == 1 {
        -1
    } else {
        1
    }
}

/// Sign treatment of `Δ13` in the last row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `Δ13 = w1 Δ3 + Δ1 w3`, as written.
    Literal,
    /// `Δ13 = −(w1 Δ3 + Δ1 w3)`, following `(Z1Z2)(Y1Y2) = −X1X2`.
    IdentitySigned,
}

impl Convention {
    pub const ALL: [Convention; 2] = [Convention::Literal, Convention::IdentitySigned];

    pub fn name(self) -> &'static str {
        match self {
            Convention::Literal => "literal",
            Convention::IdentitySigned => "identity-signed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub newton_tol: f64,
    pub max_iter: usize,
    pub t_min: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            newton_tol: 1e-14,
            max_iter: 50,
            t_min: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(SolverError::InvalidConfig("epsilon must be > 0".into()));
        }
        if !(self.newton_tol > 0.0) {
            return Err(SolverError::InvalidConfig("newton_tol must be > 0".into()));
        }
        if self.max_iter == 0 {
            return Err(SolverError::InvalidConfig("max_iter must be positive".into()));
        }
        if !(self.t_min >= 0.0 && self.t_min < self.epsilon) {
            return Err(SolverError::InvalidConfig("need 0 <= t_min < epsilon".into()));
        }
        Ok(())
    }

    /// Checks `|t| ∈ [t_min, ε]` (a zero seed is rejected only when t_min > 0).
    pub fn check_seed(&self, t: f64) -> Result<()> {
        self.validate()?;
        let mag = t.abs();
        if !(mag >= self.t_min && mag <= self.epsilon) {
            return Err(SolverError::SeedOutOfRange {
                t,
                t_min: self.t_min,
                epsilon: self.epsilon,
            });
        }
        Ok(())
    }

    pub(crate) fn check_bound(&self, values: &[f64]) -> Result<()> {
        match values.iter().copied().find(|d| !(d.abs() <= self.epsilon)) {
            Some(value) => Err(SolverError::BoundViolated {
                value,
                epsilon: self.epsilon,
            }),
            None => Ok(()),
        }
    }
}

/// Deviations `δ1..δ4` and `Δ1..Δ3`. Product deviations are always derived.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DeltaAssignment {
    pub delta: [f64; 4],
    #[serde(rename = "big_delta")]
    pub big_delta: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedDeviations {
    pub d12: f64,
    pub d34: f64,
    pub d14: f64,
    pub d32: f64,
    pub big_d12: f64,
    pub big_d13: f64,
}

impl DeltaAssignment {
    pub fn max_abs(&self) -> f64 {
        self.delta
            .iter()
            .chain(&self.big_delta)
            .fold(0.0, |m, d| m.max(d.abs()))
    }

    pub fn derived(&self, p: &SignPattern, c: Convention) -> DerivedDeviations {
        let d = &self.delta;
        let g = &self.big_delta;
        let v = |j| p.vf(j);
        let w = |j| p.wf(j);
        let d13 = propagate(w(0), g[0], w(2), g[2]);
        DerivedDeviations {
            d12: propagate(v(0), d[0], v(1), d[1]),
            d34: propagate(v(2), d[2], v(3), d[3]),
            d14: propagate(v(0), d[0], v(3), d[3]),
            d32: propagate(v(2), d[2], v(1), d[1]),
            big_d12: propagate(w(0), g[0], w(1), g[1]),
            big_d13: match c {
                Convention::Literal => d13,
                Convention::IdentitySigned => -d13,
            },
        }
    }
}

/// First-order deviation of a product of two unsharp values:
/// `vj·dk + dj·vk`.
pub fn propagate(vj: f64, dj: f64, vk: f64, dk: f64) -> f64 {
    vj * dk + dj * vk
}

/// Left minus right side of each of the six rows, evaluated directly in the
/// original (signed) coordinates.
pub fn residuals(p: &SignPattern, d: &DeltaAssignment, c: Convention) -> [f64; 6] {
    let der = d.derived(p, c);
    let sq = |s: f64, x: f64| (s + x) * (s + x);
    let v = |j: usize| p.vf(j);
    let w = |j: usize| p.wf(j);
    let x = &d.delta;
    let g = &d.big_delta;
    [
        sq(v(0), x[0]) * sq(v(1), x[1]) - (1.0 + 2.0 * v(0) * v(1) * der.d12),
        sq(v(2), x[2]) * sq(v(3), x[3]) - (1.0 + 2.0 * v(2) * v(3) * der.d34),
        sq(v(0), x[0]) * sq(v(3), x[3]) - (1.0 + 2.0 * v(0) * v(3) * der.d14),
        sq(v(2), x[2]) * sq(v(1), x[1]) - (1.0 + 2.0 * v(2) * v(1) * der.d32),
        sq(w(0), g[0]) * sq(w(1), g[1]) - (1.0 + 2.0 * w(0) * w(1) * der.big_d12),
        -sq(w(0), g[0]) * sq(w(2), g[2]) - (-1.0 + 2.0 * w(0) * w(2) * der.big_d13),
    ]
}

pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, r| m.max(r.abs()))
}

/// Sign-free coordinates `x_j = v_j δ_j`, `y_j = w_j Δ_j`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Reduced {
    pub x: [f64; 4],
    pub y: [f64; 3],
}

impl Reduced {
    pub fn expand(&self, p: &SignPattern) -> DeltaAssignment {
        DeltaAssignment {
            delta: std::array::from_fn(|j| p.vf(j) * self.x[j]),
            big_delta: std::array::from_fn(|j| p.wf(j) * self.y[j]),
        }
    }
}

pub fn reduce(p: &SignPattern, d: &DeltaAssignment) -> Reduced {
    Reduced {
        x: std::array::from_fn(|j| p.vf(j) * d.delta[j]),
        y: std::array::from_fn(|j| p.wf(j) * d.big_delta[j]),
    }
}

/// The sharp limit: deviations zero, with the product rule fixing `X1X2` and
/// `Y1X2` from rows one and four. Used to show the contradiction returns.
pub fn sharp_limit_assignment(p: &SignPattern) -> crate::mermin::MerminAssignment {
    let [v1, v2, v3, v4] = p.v();
    let [w1, w2, w3] = p.w();
    // Label order: X1, X2, X1X2, Y1, Y2, Y1Y2, X1Y2, Y1X2, Z1Z2.
    crate::mermin::MerminAssignment::new([v1, v2, v1 * v2, v3, v4, w3, w2, v3 * v2, w1])
        .expect("products of signs are signs")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mermin::{evaluate_rows, exhaustive_search};
    use crate::quantum::MERMIN_TARGETS;

    fn all_patterns() -> Vec<SignPattern> {
        let mut out = Vec::new();
        for v in SignPattern::all_v() {
            for w in SignPattern::all_w() {
                out.push(SignPattern::new(v, w).unwrap());
            }
        }
        out
    }

    #[test]
    fn propagate_examples() {
        assert!((propagate(1.0, 0.1, 1.0, 0.2) - 0.3).abs() < 1e-15);
        assert!((propagate(-1.0, 0.1, 1.0, 0.2) + 0.1).abs() < 1e-15);
        for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            assert_eq!(propagate(a, 0.0, b, 0.0), 0.0);
        }
    }

    #[test]
    fn pattern_rejects_zero() {
        assert!(SignPattern::new([1, 0, 1, 1], [1, 1, 1]).is_err());
    }

    #[test]
    fn pattern_enumeration_sizes() {
        assert_eq!(SignPattern::all_v().len(), 16);
        assert_eq!(SignPattern::all_w().len(), 8);
        assert_eq!(SignPattern::all_v()[0], [1, 1, 1, 1]);
    }

    #[test]
    fn zero_deviation_solves_every_pattern_and_convention() {
        let zero = DeltaAssignment::default();
        for p in all_patterns() {
            for c in Convention::ALL {
                assert_eq!(residuals(&p, &zero, c), [0.0; 6]);
            }
        }
    }

    #[test]
    fn reduce_example_and_round_trip() {
        let p = SignPattern::new([-1, 1, 1, -1], [1, -1, -1]).unwrap();
        let d = DeltaAssignment {
            delta: [0.887444e-4, 0.23779e-4, -0.63717e-5, -0.23779e-4],
            big_delta: [-0.15470e-3, -0.57722e-3, 0.15469e-3],
        };
        let r = reduce(&p, &d);
        assert_eq!(r.x[0], -0.887444e-4);
        assert_eq!(r.expand(&p), d);
        assert_eq!(reduce(&p, &DeltaAssignment::default()), Reduced::default());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            t_min: 1e-2,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(SolverConfig::with_epsilon(0.0).validate().is_err());
        let cfg = SolverConfig::default();
        assert!(matches!(cfg.check_seed(0.0), Err(SolverError::SeedOutOfRange { .. })));
        assert!(cfg.check_seed(-1e-4).is_ok());
    }

    #[test]
    fn sharp_limit_restores_contradiction() {
        assert_eq!(exhaustive_search(MERMIN_TARGETS).count, 0);
        for p in all_patterns() {
            let a = sharp_limit_assignment(&p);
            assert_ne!(evaluate_rows(&a), MERMIN_TARGETS);
        }
    }
}
