use serde::{Deserialize, Serialize};

use super::pair::{
    branch_solve_pair, literal_closing, literal_relation, pair_relation, pair_relation_da, Branch,
};
use super::{
    max_abs, residuals, Convention, DeltaAssignment, Result, SignPattern, SolverConfig,
    SolverError,
};

/// Branch choices for the v rows: `x2` from `x1`, `x4` from `x1`, and the
/// root of `x3` against `x2` used to seed the cycle closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VBranches {
    pub pair12: Branch,
    pub pair14: Branch,
    pub close32: Branch,
}

impl VBranches {
    pub const fn uniform(b: Branch) -> Self {
        Self {
            pair12: b,
            pair14: b,
            close32: b,
        }
    }

    /// All eight combinations, plus/plus/plus first.
    pub fn all() -> [VBranches; 8] {
        std::array::from_fn(|k| {
            let pick = |bit: usize| if k >> bit & 1 == 0 { Branch::Plus } else { Branch::Minus };
            VBranches {
                pair12: pick(2),
                pair14: pick(1),
                close32: pick(0),
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VSolution {
    pub delta: [f64; 4],
    pub reduced: [f64; 4],
    pub branches: VBranches,
    /// Residuals of the four v rows, recomputed in signed coordinates.
    pub residuals: [f64; 4],
    pub max_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WSolution {
    pub big_delta: [f64; 3],
    pub reduced: [f64; 3],
    pub branch: Branch,
    pub convention: Convention,
    pub residuals: [f64; 2],
    pub max_residual: f64,
}

/// Newton iteration on `x ↦ pair_relation(x, partner)`.
fn newton_close(partner: f64, seed: f64, cfg: &SolverConfig) -> Result<f64> {
    let mut x = seed;
    let mut f = pair_relation(x, partner);
    for _ in 0..cfg.max_iter {
        if f.abs() <= cfg.newton_tol {
            return Ok(x);
        }
        let df = pair_relation_da(x, partner);
        if df == 0.0 || !df.is_finite() {
            break;
        }
        x -= f / df;
        f = pair_relation(x, partner);
    }
    if f.abs() <= cfg.newton_tol {
        return Ok(x);
    }
    Err(SolverError::NewtonDiverged {
        iterations: cfg.max_iter,
        residual: f.abs(),
    })
}

/// Finds `x3` with `pair_relation(x3, x2) = 0` on the requested root,
/// starting Newton from `warm` when given and from the closed form otherwise.
fn close_cycle(x2: f64, branch: Branch, warm: Option<f64>, cfg: &SolverConfig) -> Result<f64> {
    let closed = branch_solve_pair(x2, branch)?;
    if let Some(seed) = warm {
        let other = branch_solve_pair(x2, other_branch(branch))?;
        if let Ok(x3) = newton_close(x2, seed, cfg) {
            // Keep the continuation on the requested root.
            if (x3 - closed).abs() <= (x3 - other).abs() {
                return Ok(x3);
            }
        }
    }
    newton_close(x2, closed, cfg)
}

fn other_branch(b: Branch) -> Branch {
    match b {
        Branch::Plus => Branch::Minus,
        Branch::Minus => Branch::Plus,
    }
}

/// Reduced solution `(x1, x2, x3, x4)` of the four v rows for seed `x1`.
/// Independent of the sign pattern.
pub fn solve_v_reduced(x1: f64, branches: VBranches, cfg: &SolverConfig) -> Result<[f64; 4]> {
    solve_v_reduced_warm(x1, branches, cfg, None)
}

pub(super) fn solve_v_reduced_warm(
    x1: f64,
    branches: VBranches,
    cfg: &SolverConfig,
    warm: Option<f64>,
) -> Result<[f64; 4]> {
    let x2 = branch_solve_pair(x1, branches.pair12)?;
    let x4 = branch_solve_pair(x1, branches.pair14)?;
    let x3 = close_cycle(x2, branches.close32, warm, cfg)?;
    let closure = pair_relation(x3, x4).abs();
    if closure > cfg.newton_tol {
        return Err(SolverError::ClosureFailed(closure));
    }
    Ok([x1, x2, x3, x4])
}

/// Solves the four v rows with `δ1 = t`.
pub fn solve_v_system(
    p: &SignPattern,
    t: f64,
    branches: VBranches,
    cfg: &SolverConfig,
) -> Result<VSolution> {
    solve_v_warm(p, t, branches, cfg, None)
}

pub(super) fn solve_v_warm(
    p: &SignPattern,
    t: f64,
    branches: VBranches,
    cfg: &SolverConfig,
    warm_x3: Option<f64>,
) -> Result<VSolution> {
    cfg.check_seed(t)?;
    let x1 = p.vf(0) * t;
    let reduced = solve_v_reduced_warm(x1, branches, cfg, warm_x3)?;
    let delta: [f64; 4] = std::array::from_fn(|j| p.vf(j) * reduced[j]);
    let d = DeltaAssignment {
        delta,
        big_delta: [0.0; 3],
    };
    let all = residuals(p, &d, Convention::Literal);
    let res = [all[0], all[1], all[2], all[3]];
    let max_residual = max_abs(&res);
    if max_residual > cfg.newton_tol {
        return Err(SolverError::ResidualTooLarge(max_residual));
    }
    cfg.check_bound(&delta)?;
    Ok(VSolution {
        delta,
        reduced,
        branches,
        residuals: res,
        max_residual,
    })
}

/// Solves the two w rows with `Δ1 = t`: `Δ2` from the pair relation on the
/// given branch, `Δ3` from the last row under `convention` (under the
/// identity-signed convention that row is the pair relation again, solved on
/// the same branch).
pub fn solve_w_system(
    p: &SignPattern,
    t: f64,
    branch: Branch,
    convention: Convention,
    cfg: &SolverConfig,
) -> Result<WSolution> {
    cfg.check_seed(t)?;
    let y1 = p.wf(0) * t;
    let y2 = branch_solve_pair(y1, branch)?;
    let y3 = match convention {
        Convention::Literal => literal_closing(y1)?,
        Convention::IdentitySigned => branch_solve_pair(y1, branch)?,
    };
    let internal = match convention {
        Convention::Literal => literal_relation(y1, y3),
        Convention::IdentitySigned => pair_relation(y1, y3),
    };
    if !internal.is_finite() {
        return Err(SolverError::NoRealSolution(y1));
    }
    let reduced = [y1, y2, y3];
    let big_delta: [f64; 3] = std::array::from_fn(|j| p.wf(j) * reduced[j]);
    let d = DeltaAssignment {
        delta: [0.0; 4],
        big_delta,
    };
    let all = residuals(p, &d, convention);
    let res = [all[4], all[5]];
    let max_residual = max_abs(&res);
    if max_residual > cfg.newton_tol {
        return Err(SolverError::ResidualTooLarge(max_residual));
    }
    cfg.check_bound(&big_delta)?;
    Ok(WSolution {
        big_delta,
        reduced,
        branch,
        convention,
        residuals: res,
        max_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VPatternResult {
    pub v: [i8; 4],
    pub solved: bool,
    pub branches: Option<VBranches>,
    pub delta: Option<[f64; 4]>,
    pub max_residual: Option<f64>,
    pub max_abs_deviation: Option<f64>,
    /// Failure of the last attempted branch combination when unsolved.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WPatternResult {
    pub w: [i8; 3],
    pub convention: Convention,
    pub solved: bool,
    pub branch: Option<Branch>,
    pub big_delta: Option<[f64; 3]>,
    pub max_residual: Option<f64>,
    pub max_abs_deviation: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternPairResult {
    pub v: [i8; 4],
    pub w: [i8; 3],
    pub convention: Convention,
    pub solved: bool,
    pub max_residual: Option<f64>,
    pub max_abs_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationTable {
    pub t: f64,
    pub config: SolverConfig,
    pub v_patterns: Vec<VPatternResult>,
    /// Eight w patterns for each convention.
    pub w_patterns: Vec<WPatternResult>,
    /// 16 × 8 pattern pairs for each convention.
    pub pairs: Vec<PatternPairResult>,
}

impl EnumerationTable {
    pub fn solved_v(&self) -> usize {
        self.v_patterns.iter().filter(|r| r.solved).count()
    }

    pub fn solved_w(&self, c: Convention) -> usize {
        self.w_patterns
            .iter()
            .filter(|r| r.convention == c && r.solved)
            .count()
    }

    pub fn solved_pairs(&self, c: Convention) -> usize {
        self.pairs
            .iter()
            .filter(|r| r.convention == c && r.solved)
            .count()
    }

    pub fn all_solved(&self) -> bool {
        self.pairs.iter().all(|r| r.solved)
    }

    pub fn max_residual(&self) -> f64 {
        self.pairs
            .iter()
            .filter_map(|r| r.max_residual)
            .fold(0.0, f64::max)
    }

    pub fn max_abs_deviation(&self) -> f64 {
        self.pairs
            .iter()
            .filter_map(|r| r.max_abs_deviation)
            .fold(0.0, f64::max)
    }
}

/// Tries every branch combination, in fixed order, for every sign pattern and
/// both conventions, with `δ1 = Δ1 = t`.
pub fn enumerate_all_patterns(cfg: &SolverConfig, t: f64) -> Result<EnumerationTable> {
    cfg.check_seed(t)?;
    let v_patterns: Vec<VPatternResult> = SignPattern::all_v()
        .into_iter()
        .map(|v| {
            let p = SignPattern::new(v, [1, 1, 1]).expect("enumerated signs");
            let mut last_err = None;
            for branches in VBranches::all() {
                match solve_v_system(&p, t, branches, cfg) {
                    Ok(sol) => {
                        return VPatternResult {
                            v,
                            solved: true,
                            branches: Some(branches),
                            delta: Some(sol.delta),
                            max_residual: Some(sol.max_residual),
                            max_abs_deviation: Some(max_abs(&sol.delta)),
                            error: None,
                        }
                    }
                    Err(e) => last_err = Some(e.to_string()),
                }
            }
            VPatternResult {
                v,
                solved: false,
                branches: None,
                delta: None,
                max_residual: None,
                max_abs_deviation: None,
                error: last_err,
            }
        })
        .collect();

    let mut w_patterns = Vec::new();
    for convention in Convention::ALL {
        for w in SignPattern::all_w() {
            let p = SignPattern::new([1, 1, 1, 1], w).expect("enumerated signs");
            let mut result = WPatternResult {
                w,
                convention,
                solved: false,
                branch: None,
                big_delta: None,
                max_residual: None,
                max_abs_deviation: None,
                error: None,
            };
            for branch in Branch::ALL {
                match solve_w_system(&p, t, branch, convention, cfg) {
                    Ok(sol) => {
                        result.solved = true;
                        result.branch = Some(branch);
                        result.big_delta = Some(sol.big_delta);
                        result.max_residual = Some(sol.max_residual);
                        result.max_abs_deviation = Some(max_abs(&sol.big_delta));
                        result.error = None;
                        break;
                    }
                    Err(e) => result.error = Some(e.to_string()),
                }
            }
            w_patterns.push(result);
        }
    }

    let mut pairs = Vec::with_capacity(256);
    for wr in &w_patterns {
        for vr in &v_patterns {
            let both = |a: Option<f64>, b: Option<f64>| Some(a?.max(b?));
            pairs.push(PatternPairResult {
                v: vr.v,
                w: wr.w,
                convention: wr.convention,
                solved: vr.solved && wr.solved,
                max_residual: both(vr.max_residual, wr.max_residual),
                max_abs_deviation: both(vr.max_abs_deviation, wr.max_abs_deviation),
            });
        }
    }

    Ok(EnumerationTable {
        t,
        config: *cfg,
        v_patterns,
        w_patterns,
        pairs,
    })
}
