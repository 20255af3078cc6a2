use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::pair::Branch;
use super::solve::{solve_v_warm, solve_w_system, VBranches};
use super::{
    max_abs, reduce, residuals, Convention, DeltaAssignment, Result, SignPattern, SolverConfig,
    SolverError,
};

/// Which half of the system a family traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "lowercase")]
pub enum FamilyKind {
    /// Rows one to four, free parameter `δ1`.
    V { branches: VBranches },
    /// Rows five and six, free parameter `Δ1`.
    W { branch: Branch, convention: Convention },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyPoint {
    pub t: f64,
    pub deviations: DeltaAssignment,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFamily {
    pub pattern: SignPattern,
    pub kind: FamilyKind,
    pub points: Vec<FamilyPoint>,
    /// Why continuation stopped before the end of the grid, if it did.
    pub truncated: Option<String>,
}

impl SolutionFamily {
    pub fn convention(&self) -> Convention {
        match self.kind {
            FamilyKind::V { .. } => Convention::Literal,
            FamilyKind::W { convention, .. } => convention,
        }
    }

    /// Reduced coordinates along the family; `x` for v families, `y` for w.
    pub fn reduced_columns(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .map(|pt| {
                let r = reduce(&self.pattern, &pt.deviations);
                match self.kind {
                    FamilyKind::V { .. } => r.x.to_vec(),
                    FamilyKind::W { .. } => r.y.to_vec(),
                }
            })
            .collect()
    }

    /// Least-squares slope through the origin of reduced column `j` against
    /// reduced column 0.
    pub fn reduced_slope(&self, j: usize) -> f64 {
        let cols = self.reduced_columns();
        let xs: Vec<f64> = cols.iter().map(|c| c[0]).collect();
        let ys: Vec<f64> = cols.iter().map(|c| c[j]).collect();
        fit_slope_through_origin(&xs, &ys)
    }

    /// `t,δ1,…,δ4,max_residual` or `t,Δ1,Δ2,Δ3,max_residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self.kind {
            FamilyKind::V { .. } => out.push_str("t,delta1,delta2,delta3,delta4,max_residual\n"),
            FamilyKind::W { .. } => out.push_str("t,Delta1,Delta2,Delta3,max_residual\n"),
        }
        for pt in &self.points {
            let values: &[f64] = match self.kind {
                FamilyKind::V { .. } => &pt.deviations.delta,
                FamilyKind::W { .. } => &pt.deviations.big_delta,
            };
            let _ = write!(out, "{:.17e}", pt.t);
            for v in values {
                let _ = write!(out, ",{v:.17e}");
            }
            let _ = writeln!(out, ",{:.17e}", pt.max_residual);
        }
        out
    }
}

pub fn fit_slope_through_origin(xs: &[f64], ys: &[f64]) -> f64 {
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    sxy / sxx
}

fn validate_grid(grid: &[f64], cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    if grid.is_empty() {
        return Err(SolverError::InvalidGrid("empty grid".into()));
    }
    for &t in grid {
        cfg.check_seed(t)
            .map_err(|_| SolverError::InvalidGrid(format!("t = {t:e} outside [t_min, epsilon]")))?;
    }
    let increasing = grid.windows(2).all(|w| w[0] < w[1]);
    let decreasing = grid.windows(2).all(|w| w[0] > w[1]);
    if !(increasing || decreasing) {
        return Err(SolverError::InvalidGrid("grid must be strictly monotone".into()));
    }
    Ok(())
}

/// Continues a solution along `t_grid`. For v families the closing unknown
/// is warm-started from the previous point, scaled linearly in `t`.
pub fn trace_family(
    p: &SignPattern,
    kind: FamilyKind,
    t_grid: &[f64],
    cfg: &SolverConfig,
) -> Result<SolutionFamily> {
    validate_grid(t_grid, cfg)?;
    let mut family = SolutionFamily {
        pattern: *p,
        kind,
        points: Vec::with_capacity(t_grid.len()),
        truncated: None,
    };
    let mut prev: Option<(f64, f64)> = None;
    for &t in t_grid {
        let step = match kind {
            FamilyKind::V { branches } => {
                let warm = prev.map(|(t0, x3)| x3 * t / t0);
                solve_v_warm(p, t, branches, cfg, warm).map(|sol| {
                    prev = Some((t, sol.reduced[2]));
                    DeltaAssignment {
                        delta: sol.delta,
                        big_delta: [0.0; 3],
                    }
                })
            }
            FamilyKind::W { branch, convention } => {
                solve_w_system(p, t, branch, convention, cfg).map(|sol| DeltaAssignment {
                    delta: [0.0; 4],
                    big_delta: sol.big_delta,
                })
            }
        };
        match step {
            Ok(deviations) => {
                let max_residual = max_abs(&residuals(p, &deviations, family.convention()));
                family.points.push(FamilyPoint {
                    t,
                    deviations,
                    max_residual,
                });
            }
            Err(e) => {
                family.truncated = Some(format!("stopped at t = {t:e}: {e}"));
                break;
            }
        }
    }
    Ok(family)
}
