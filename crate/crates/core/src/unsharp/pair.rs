//! Closed-form roots of the reduced two-variable relations.

use serde::{Deserialize, Serialize};

use super::{Result, SolverError};

/// Root selector for `(1+a)²(1+b)² = 1 + 2(a+b)`. Near the origin the two
/// roots leave along `b = λ± a` with `λ± = −2 ± √3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const ALL: [Branch; 2] = [Branch::Plus, Branch::Minus];

    /// Limiting slope `b/a` as `a → 0`.
    pub fn slope(self) -> f64 {
        match self {
            Branch::Plus => -2.0 + 3f64.sqrt(),
            Branch::Minus => -2.0 - 3f64.sqrt(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

/// `(1+a)²(1+b)² − 1 − 2(a+b)`, evaluated as `2ab + (a+b+ab)²` so that
/// small arguments do not cancel against the constant.
pub fn pair_relation(a: f64, b: f64) -> f64 {
    let u = a + b + a * b;
    2.0 * a * b + u * u
}

/// `∂/∂a` of [`pair_relation`].
pub(crate) fn pair_relation_da(a: f64, b: f64) -> f64 {
    2.0 * (a + 2.0 * b + 2.0 * a * b + b * b + a * b * b)
}

/// Solves the pair relation for `b`:
/// `b = a·(−(a+2) ± √(2a+3)) / (1+a)²`.
pub fn branch_solve_pair(a: f64, branch: Branch) -> Result<f64> {
    let disc = 2.0 * a + 3.0;
    if !(disc >= 0.0) {
        return Err(SolverError::NoRealSolution(a));
    }
    let denom = (1.0 + a) * (1.0 + a);
    if denom == 0.0 {
        return Err(SolverError::Degenerate);
    }
    let root = disc.sqrt();
    let num = match branch {
        Branch::Plus => -(a + 2.0) + root,
        Branch::Minus => -(a + 2.0) - root,
    };
    Ok(a * num / denom)
}

/// Small root `c` of the last row under the literal convention, in reduced
/// coordinates: `(1+a)²(1+c)² = 1 − 2(a+c)`.
///
/// Written as `c = −a(4+a) / (2 + 2a + a² + √(4 + 4a − a² − 2a³))` to avoid
/// cancellation near the origin, where `c = −a + O(a²)`. The other root sits
/// near `c = −4`.
pub fn literal_closing(a: f64) -> Result<f64> {
    let disc = 4.0 + 4.0 * a - a * a - 2.0 * a * a * a;
    if !(disc >= 0.0) {
        return Err(SolverError::NoRealSolution(a));
    }
    Ok(-a * (4.0 + a) / (2.0 + 2.0 * a + a * a + disc.sqrt()))
}

/// `(1+a)²(1+c)² − 1 + 2(a+c)`, expanded as `4(a+c) + 2ac + (a+c+ac)²`.
pub(crate) fn literal_relation(a: f64, c: f64) -> f64 {
    let u = a + c + a * c;
    4.0 * (a + c) + 2.0 * a * c + u * u
}
