//! CHSH functional: quantum value and its optimization over spin directions,
//! the sharp hidden-variable bound, and the bound for values with bounded
//! unsharpness.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantum::{expectation, pauli, tensor, Axis, ComplexMatrix, QuantumError, State};

pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChshError {
    #[error("direction {0:?} is not a unit vector")]
    NotUnit([f64; 3]),
    #[error("epsilon must be finite and >= 0, got {0}")]
    InvalidEpsilon(f64),
    #[error("target {0} is below the sharp bound 2")]
    TargetBelowSharp(f64),
    #[error("CHSH needs a two-qubit state, got dimension {0}")]
    NotTwoQubit(usize),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

pub type Result<T> = std::result::Result<T, ChshError>;

pub type Direction = [f64; 3];

/// Unit direction from polar angle `theta` and azimuth `phi`.
pub fn direction(theta: f64, phi: f64) -> Direction {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn norm(v: &Direction) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `n·σ`.
pub fn spin_operator(n: &Direction) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    for (axis, &c) in Axis::ALL.iter().zip(n) {
        m = m.add(&pauli(*axis).scale(Complex64::new(c, 0.0))).expect("2x2");
    }
    m
}

/// Measurement directions for `A1, A1′` (qubit 1) and `B2, B2′` (qubit 2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSetting {
    pub a1: Direction,
    pub a1p: Direction,
    pub b2: Direction,
    pub b2p: Direction,
}

impl ChshSetting {
    pub fn new(a1: Direction, a1p: Direction, b2: Direction, b2p: Direction) -> Result<Self> {
        for d in [a1, a1p, b2, b2p] {
            if (norm(&d) - 1.0).abs() > UNIT_TOL {
                return Err(ChshError::NotUnit(d));
            }
        }
        Ok(Self { a1, a1p, b2, b2p })
    }

    /// `a1 = z`, `a1′ = x`, `b2 = −(z+x)/√2`, `b2′ = (x−z)/√2`; reaches 2√2
    /// on the singlet.
    pub fn canonical() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            a1: [0.0, 0.0, 1.0],
            a1p: [1.0, 0.0, 0.0],
            b2: [-h, 0.0, -h],
            b2p: [h, 0.0, -h],
        }
    }
}

fn correlator(state: &State, a: &Direction, b: &Direction) -> Result<f64> {
    let op = tensor(&spin_operator(a), &spin_operator(b))?;
    Ok(expectation(&op, state)?)
}

/// `⟨A1B2⟩ + ⟨A1′B2⟩ + ⟨A1B2′⟩ − ⟨A1′B2′⟩`.
pub fn chsh_value(state: &State, s: &ChshSetting) -> Result<f64> {
    if state.dim() != 4 {
        return Err(ChshError::NotTwoQubit(state.dim()));
    }
    Ok(correlator(state, &s.a1, &s.b2)? + correlator(state, &s.a1p, &s.b2)?
        + correlator(state, &s.a1, &s.b2p)?
        - correlator(state, &s.a1p, &s.b2p)?)
}

/// `T[i][j] = ⟨σi ⊗ σj⟩`, so that `⟨(a·σ)(b·σ)⟩ = aᵀ T b`.
pub fn correlation_matrix(state: &State) -> Result<[[f64; 3]; 3]> {
    if state.dim() != 4 {
        return Err(ChshError::NotTwoQubit(state.dim()));
    }
    let mut t = [[0.0; 3]; 3];
    for (i, ai) in Axis::ALL.iter().enumerate() {
        for (j, bj) in Axis::ALL.iter().enumerate() {
            t[i][j] = expectation(&tensor(&pauli(*ai), &pauli(*bj))?, state)?;
        }
    }
    Ok(t)
}

fn t_transpose_times(t: &[[f64; 3]; 3], a: &Direction) -> Direction {
    std::array::from_fn(|j| (0..3).map(|i| a[i] * t[i][j]).sum())
}

fn dot(a: &Direction, b: &Direction) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn chsh_from_matrix(t: &[[f64; 3]; 3], angles: &[f64; 8]) -> f64 {
    let a1 = direction(angles[0], angles[1]);
    let a1p = direction(angles[2], angles[3]);
    let b2 = direction(angles[4], angles[5]);
    let b2p = direction(angles[6], angles[7]);
    let ta1 = t_transpose_times(t, &a1);
    let ta1p = t_transpose_times(t, &a1p);
    dot(&ta1, &b2) + dot(&ta1p, &b2) + dot(&ta1, &b2p) - dot(&ta1p, &b2p)
}

fn angles_of(v: &Direction) -> (f64, f64) {
    let n = norm(v);
    if n == 0.0 {
        return (0.0, 0.0);
    }
    ((v[2] / n).clamp(-1.0, 1.0).acos(), v[1].atan2(v[0]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumOptimum {
    /// Largest `|S|` found, re-evaluated through [`chsh_value`].
    pub max_abs_s: f64,
    pub setting: ChshSetting,
}

const GRID_STEP_DEG: usize = 15;
const GOLDEN_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 60;

fn grid_directions() -> Vec<(f64, f64)> {
    let step = (GRID_STEP_DEG as f64).to_radians();
    let n_theta = 180 / GRID_STEP_DEG;
    let n_phi = 360 / GRID_STEP_DEG;
    let mut out = Vec::with_capacity((n_theta + 1) * n_phi);
    for i in 0..=n_theta {
        for k in 0..n_phi {
            out.push((i as f64 * step, k as f64 * step));
        }
    }
    out
}

/// Maximizes `f` on `[lo, hi]` by golden-section search.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > GOLDEN_TOL {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Deterministic search for the largest `|S|`: a 15° grid over the two
/// qubit-1 directions with the qubit-2 directions maximized in closed form
/// (`max_b xᵀb = |x|`), then coordinate-wise golden-section refinement of
/// all eight angles. Ties on the grid keep the smallest grid index.
pub fn optimize_quantum(state: &State) -> Result<QuantumOptimum> {
    let t = correlation_matrix(state)?;
    let grid = grid_directions();
    let dirs: Vec<Direction> = grid.iter().map(|&(th, ph)| direction(th, ph)).collect();
    let projected: Vec<Direction> = dirs.iter().map(|d| t_transpose_times(&t, d)).collect();

    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    for i in 0..dirs.len() {
        for j in 0..dirs.len() {
            let (p, q) = (&projected[i], &projected[j]);
            let plus: Direction = std::array::from_fn(|k| p[k] + q[k]);
            let minus: Direction = std::array::from_fn(|k| p[k] - q[k]);
            let value = norm(&plus) + norm(&minus);
            if value > best.0 {
                best = (value, i, j);
            }
        }
    }
    let (_, i, j) = best;
    let (p, q) = (&projected[i], &projected[j]);
    let (tb, pb) = angles_of(&std::array::from_fn(|k| p[k] + q[k]));
    let (tbp, pbp) = angles_of(&std::array::from_fn(|k| p[k] - q[k]));
    let mut angles = [grid[i].0, grid[i].1, grid[j].0, grid[j].1, tb, pb, tbp, pbp];
    let mut current = chsh_from_matrix(&t, &angles);

    let mut half_width = (GRID_STEP_DEG as f64).to_radians();
    for _ in 0..MAX_SWEEPS {
        let before = current;
        for k in 0..8 {
            let objective = |x: f64| {
                let mut trial = angles;
                trial[k] = x;
                chsh_from_matrix(&t, &trial)
            };
            let (x, fx) = golden_max(objective, angles[k] - half_width, angles[k] + half_width);
            if fx > current {
                angles[k] = x;
                current = fx;
            }
        }
        if current - before <= 1e-15 {
            half_width *= 0.5;
            if half_width < 1e-9 {
                break;
            }
        }
    }

    let setting = ChshSetting::new(
        direction(angles[0], angles[1]),
        direction(angles[2], angles[3]),
        direction(angles[4], angles[5]),
        direction(angles[6], angles[7]),
    )?;
    let s = chsh_value(state, &setting)?;
    // The closed-form qubit-2 choice makes S ≥ 0; flip B if round-off did not.
    let (max_abs_s, setting) = if s >= 0.0 {
        (s, setting)
    } else {
        let flipped = ChshSetting {
            b2: setting.b2.map(|x| -x),
            b2p: setting.b2p.map(|x| -x),
            ..setting
        };
        (chsh_value(state, &flipped)?, flipped)
    };
    Ok(QuantumOptimum { max_abs_s, setting })
}

/// `(a1 + a1′) b2 + (a1 − a1′) b2′`.
pub fn chsh_combination(a1: f64, a1p: f64, b2: f64, b2p: f64) -> f64 {
    (a1 + a1p) * b2 + (a1 - a1p) * b2p
}

/// The combination for each of the 16 sharp sign tuples.
pub fn sharp_hv_values() -> Vec<([i8; 4], f64)> {
    (0u8..16)
        .map(|bits| {
            let s: [i8; 4] = std::array::from_fn(|k| if bits >> (3 - k) & 1 == 1 { -1 } else { 1 });
            let f = |k: usize| f64::from(s[k]);
            (s, chsh_combination(f(0), f(1), f(2), f(3)))
        })
        .collect()
}

pub fn sharp_hv_bound() -> f64 {
    sharp_hv_values()
        .into_iter()
        .map(|(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RangeVariant {
    /// Values in `[−1−ε, −1+ε] ∪ [1−ε, 1+ε]`.
    TwoInterval,
    /// Values anywhere in `[−1−ε, 1+ε]`.
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnsharpRange {
    epsilon: f64,
    variant: RangeVariant,
}

impl UnsharpRange {
    pub fn new(epsilon: f64, variant: RangeVariant) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(ChshError::InvalidEpsilon(epsilon));
        }
        Ok(Self { epsilon, variant })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn variant(&self) -> RangeVariant {
        self.variant
    }

    /// Interval endpoints a single hidden value can take.
    pub fn endpoints(&self) -> Vec<f64> {
        let e = self.epsilon;
        match self.variant {
            RangeVariant::TwoInterval => vec![-1.0 - e, -1.0 + e, 1.0 - e, 1.0 + e],
            RangeVariant::Continuous => vec![-1.0 - e, 1.0 + e],
        }
    }
}

/// Maximum of the CHSH combination over the allowed values. The combination
/// is multilinear, so the maximum over each box is attained at a vertex and
/// enumerating endpoint tuples is exact.
pub fn unsharp_hv_bound(r: &UnsharpRange) -> f64 {
    let ends = r.endpoints();
    let mut best = f64::NEG_INFINITY;
    for &a1 in &ends {
        for &a1p in &ends {
            for &b2 in &ends {
                for &b2p in &ends {
                    best = best.max(chsh_combination(a1, a1p, b2, b2p));
                }
            }
        }
    }
    best
}

/// `2(1+ε)²`.
pub fn unsharp_bound_closed_form(epsilon: f64) -> f64 {
    2.0 * (1.0 + epsilon) * (1.0 + epsilon)
}

/// Unsharpness at which the hidden-variable bound reaches `target_s`.
pub fn epsilon_to_reach(target_s: f64) -> Result<f64> {
    if !(target_s >= 2.0) {
        return Err(ChshError::TargetBelowSharp(target_s));
    }
    Ok((target_s / 2.0).sqrt() - 1.0)
}

pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;
