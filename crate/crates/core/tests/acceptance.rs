//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Criterion 4 is known to fail: the printed Δ2 is not the root of the pair
//! row for the stated means (it is for w = (−1, 1, −1)). The test asserts
//! that exactly the known set fails, so a regression elsewhere, or a change
//! that silently "fixes" criterion 4, both break the build.

mod common;

use std::time::{Duration, Instant};

use num_complex::Complex64;
use unsharp_lab::chsh::{
    epsilon_to_reach, optimize_quantum, sharp_hv_bound, sharp_hv_values, unsharp_bound_closed_form,
    unsharp_hv_bound, RangeVariant, UnsharpRange, TSIRELSON,
};
use unsharp_lab::mermin::{exhaustive_search, parity_certificate};
use unsharp_lab::quantum::{
    bloch_norm_check, commutator, pauli, robertson_schrodinger_check, verify_row_identities, Axis,
    Label, State, MERMIN_TARGETS,
};
use unsharp_lab::report::{big_delta_analysis, cmd_verify_paper, reference};
use unsharp_lab::sga::{classify, histogram, sample_positions, tv_distance, Model, SgaConfig};
use unsharp_lab::unsharp::{
    enumerate_all_patterns, max_abs, residuals, solve_v_system, solve_w_system, trace_family,
    Branch, Convention, DeltaAssignment, FamilyKind, SignPattern, SolverConfig, VBranches,
};

const KNOWN_FAILURES: &[usize] = &[4];

struct Outcome {
    passed: bool,
    detail: String,
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.detail = format!("{} [{:.3}s]", out.detail, elapsed.as_secs_f64());
    if let Some(limit) = limit {
        if elapsed > limit {
            out.passed = false;
            out.detail.push_str(&format!(" exceeds {:.0}s", limit.as_secs_f64()));
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let search = exhaustive_search(MERMIN_TARGETS);
    let cert = parity_certificate().unwrap();
    Outcome {
        passed: search.count == 0 && cert.lhs_product == 1 && cert.rhs_product == -1,
        detail: format!(
            "satisfiers={} certificate=({:+}, {:+})",
            search.count, cert.lhs_product, cert.rhs_product
        ),
    }
}

fn criterion_2() -> Outcome {
    let signs = verify_row_identities();
    let zz_yy = Label::Z1Z2.matrix().mul(&Label::Y1Y2.matrix()).unwrap();
    let d1 = zz_yy.add(&Label::X1X2.matrix()).unwrap().max_norm();
    let comm = commutator(&pauli(Axis::X), &pauli(Axis::Y)).unwrap();
    let d2 = comm
        .sub(&pauli(Axis::Z).scale(Complex64::new(0.0, 2.0)))
        .unwrap()
        .max_norm();
    let signs_ok = matches!(signs, Ok(s) if s == MERMIN_TARGETS);
    Outcome {
        passed: signs_ok && d1 <= 1e-12 && d2 <= 1e-12,
        detail: format!("row signs={signs:?} |ZZ*YY+XX|={d1:e} |[X,Y]-2iZ|={d2:e}"),
    }
}

fn criterion_3() -> Outcome {
    let cfg = SolverConfig::with_epsilon(1e-3);
    let table = enumerate_all_patterns(&cfg, 1e-4).unwrap();
    let nontrivial = table
        .v_patterns
        .iter()
        .filter_map(|r| r.delta)
        .all(|d| d.iter().all(|x| *x != 0.0))
        && table
            .w_patterns
            .iter()
            .filter_map(|r| r.big_delta)
            .all(|d| d.iter().all(|x| *x != 0.0));
    let w_ok = Convention::ALL.iter().all(|&c| table.solved_w(c) == 8);
    let passed = table.solved_v() == 16
        && w_ok
        && table.all_solved()
        && nontrivial
        && table.max_abs_deviation() <= 1e-3
        && table.max_residual() <= 1e-13;
    Outcome {
        passed,
        detail: format!(
            "v={}/16 w literal={}/8 identity-signed={}/8 max|dev|={:e} max residual={:e}",
            table.solved_v(),
            table.solved_w(Convention::Literal),
            table.solved_w(Convention::IdentitySigned),
            table.max_abs_deviation(),
            table.max_residual()
        ),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_4() -> Outcome {
    let cfg = SolverConfig::with_epsilon(reference::EPSILON);
    let p = SignPattern::new(reference::V, reference::W).unwrap();
    let v = solve_v_system(&p, reference::DELTA[0], VBranches::uniform(Branch::Plus), &cfg).unwrap();
    let e2 = rel(v.delta[1], reference::DELTA[1]);
    let e4 = rel(v.delta[3], reference::DELTA[3]);
    let w = solve_w_system(&p, reference::BIG_DELTA[0], Branch::Minus, Convention::Literal, &cfg)
        .unwrap();
    let eb2 = rel(w.big_delta[1], reference::BIG_DELTA[1]);

    let report = cmd_verify_paper().unwrap();
    let has = |code: &str| {
        report
            .warnings
            .iter()
            .any(|w| w.code == code && !w.details.is_null())
    };
    let warnings_ok = has("delta3_exponent_anomaly") && has("last_row_convention_mismatch");
    let (_, w_warnings) = big_delta_analysis(&cfg).unwrap();
    let flipped_err = w_warnings
        .iter()
        .find(|w| w.code == "big_delta2_mismatch")
        .and_then(|w| w.details["consistent_means"]["big_delta2_relative_error"].as_f64());

    Outcome {
        passed: e2 <= 1e-4 && e4 <= 1e-4 && eb2 <= 1e-4 && warnings_ok,
        detail: format!(
            "rel err delta2={e2:.2e} delta4={e4:.2e} Delta2={eb2:.2e} (tol 1e-4); \
             warnings present={warnings_ok}; Delta2 rel err with w=(-1,1,-1): {}",
            flipped_err.map_or("n/a".into(), |e| format!("{e:.2e}"))
        ),
    }
}

fn criterion_5() -> Outcome {
    let cfg = SolverConfig::with_epsilon(1e-3);
    let grid: Vec<f64> = (0..=40).map(|k| 10f64.powf(-6.0 + 2.0 * k as f64 / 40.0)).collect();
    let p = SignPattern::new([1, 1, 1, 1], [1, 1, 1]).unwrap();
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    let mut check = |name: &str, kind: FamilyKind, j: usize, want: f64| {
        let fam = trace_family(&p, kind, &grid, &cfg).unwrap();
        let complete = fam.truncated.is_none() && fam.points.len() == grid.len();
        let slope = fam.reduced_slope(j);
        let err = if complete { rel(slope, want) } else { f64::INFINITY };
        worst = worst.max(err);
        lines.push(format!("{name}={slope:.7}"));
    };
    let plus = FamilyKind::V {
        branches: VBranches::uniform(Branch::Plus),
    };
    let minus_pair = FamilyKind::V {
        branches: VBranches {
            pair12: Branch::Minus,
            pair14: Branch::Minus,
            close32: Branch::Plus,
        },
    };
    check("x2/x1(+)", plus, 1, Branch::Plus.slope());
    check("x4/x1(+)", plus, 3, Branch::Plus.slope());
    check("x2/x1(-)", minus_pair, 1, Branch::Minus.slope());
    for c in Convention::ALL {
        for b in Branch::ALL {
            check(
                &format!("y2/y1({},{})", b.name(), c.name()),
                FamilyKind::W { branch: b, convention: c },
                1,
                b.slope(),
            );
        }
    }
    Outcome {
        passed: worst <= 1e-3,
        detail: format!("worst rel err={worst:.2e}; {}", lines.join(" ")),
    }
}

fn criterion_6() -> Outcome {
    let sharp = sharp_hv_bound();
    let n_values = sharp_hv_values().len();
    let opt = optimize_quantum(&State::singlet()).unwrap();
    let mut worst: f64 = 0.0;
    let mut increasing = true;
    let mut prev = f64::NEG_INFINITY;
    for k in 1..=100 {
        let eps = 0.005 * k as f64;
        let brute = unsharp_hv_bound(&UnsharpRange::new(eps, RangeVariant::TwoInterval).unwrap());
        let brute_c = unsharp_hv_bound(&UnsharpRange::new(eps, RangeVariant::Continuous).unwrap());
        let closed = 2.0 * (1.0 + eps) * (1.0 + eps);
        worst = worst
            .max((brute - closed).abs())
            .max((brute_c - closed).abs())
            .max((unsharp_bound_closed_form(eps) - closed).abs());
        increasing &= brute > prev;
        prev = brute;
    }
    let eps_t = epsilon_to_reach(TSIRELSON).unwrap();
    let passed = sharp == 2.0
        && n_values == 16
        && (opt.max_abs_s - TSIRELSON).abs() <= 1e-6
        && worst <= 1e-12
        && increasing
        && (eps_t - 0.1892071).abs() <= 1e-7;
    Outcome {
        passed,
        detail: format!(
            "sharp={sharp} ({n_values} tuples) singlet max={:.10} unsharp worst dev={worst:e} \
             increasing={increasing} eps(2sqrt2)={eps_t:.9}",
            opt.max_abs_s
        ),
    }
}

fn criterion_7() -> Outcome {
    let n = 1_000_000;
    let mut ok = true;
    let mut parts = Vec::new();
    for p_up in [0.5, 0.3] {
        let cfg = SgaConfig {
            p_up,
            n_samples: n,
            seed: 42,
            ..SgaConfig::default()
        };
        let samples = sample_positions(&cfg).unwrap();
        let p_hat = classify(&samples, 0.0).p_plus_hat;
        let sd = (p_up * (1.0 - p_up) / n as f64).sqrt();
        let z = (p_hat - p_up) / sd;
        ok &= z.abs() <= 3.0;
        parts.push(format!("p_up={p_up}: z={z:.2}"));
    }

    let unsharp = SgaConfig {
        n_samples: n,
        seed: 1,
        ..SgaConfig::default()
    };
    let sharp = SgaConfig {
        seed: 2,
        ..unsharp.matched_sharp()
    };
    assert_eq!(sharp.model, Model::Sharp);
    let a = sample_positions(&unsharp).unwrap();
    let b = sample_positions(&sharp).unwrap();
    let tv = tv_distance(
        &histogram(&a, 100, (-2.0, 2.0)).unwrap(),
        &histogram(&b, 100, (-2.0, 2.0)).unwrap(),
    )
    .unwrap();
    ok &= tv < 0.01;

    let again = sample_positions(&unsharp).unwrap();
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| sample_positions(&unsharp).unwrap());
    let same = |x: &[f64], y: &[f64]| x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits());
    let reproducible = same(&a, &again) && same(&a, &single);
    ok &= reproducible;
    Outcome {
        passed: ok,
        detail: format!("{} tv={tv:.4} bit-reproducible={reproducible}", parts.join(" ")),
    }
}

fn criterion_8() -> Outcome {
    let mut rng = common::rng(8);
    let n = 10_000;
    let mut bloch_max: f64 = 0.0;
    let mut rs_worst = f64::INFINITY;
    for k in 0..n {
        let q = common::random_state(&mut rng, 2);
        bloch_max = bloch_max.max(bloch_norm_check(&q).unwrap());
        let dim = if k % 2 == 0 { 2 } else { 4 };
        let s = common::random_state(&mut rng, dim);
        let a = common::random_hermitian(&mut rng, dim);
        let b = common::random_hermitian(&mut rng, dim);
        let (lhs, rhs) = robertson_schrodinger_check(&a, &b, &s).unwrap();
        rs_worst = rs_worst.min(lhs - rhs + 1e-10 * (1.0 + lhs.abs()));
    }

    // Re-verify every solver output with the independent signed residuals.
    let cfg = SolverConfig::with_epsilon(1e-3);
    let table = enumerate_all_patterns(&cfg, 1e-4).unwrap();
    let mut reverify: f64 = 0.0;
    let mut checked = 0;
    for v in &table.v_patterns {
        for w in &table.w_patterns {
            let (Some(delta), Some(big_delta)) = (v.delta, w.big_delta) else {
                reverify = f64::INFINITY;
                continue;
            };
            let p = SignPattern::new(v.v, w.w).unwrap();
            let r = residuals(&p, &DeltaAssignment { delta, big_delta }, w.convention);
            reverify = reverify.max(max_abs(&r));
            checked += 1;
        }
    }

    let zero_cfg = SolverConfig {
        t_min: 0.0,
        ..cfg
    };
    let mut zero_ok = 0;
    for v in SignPattern::all_v() {
        for w in SignPattern::all_w() {
            let p = SignPattern::new(v, w).unwrap();
            let vs = solve_v_system(&p, 0.0, VBranches::uniform(Branch::Plus), &zero_cfg);
            let ws = solve_w_system(&p, 0.0, Branch::Plus, Convention::Literal, &zero_cfg);
            if let (Ok(vs), Ok(ws)) = (vs, ws) {
                let d = DeltaAssignment {
                    delta: vs.delta,
                    big_delta: ws.big_delta,
                };
                if d.max_abs() == 0.0 && max_abs(&residuals(&p, &d, Convention::Literal)) == 0.0 {
                    zero_ok += 1;
                }
            }
        }
    }
    let passed = bloch_max <= 1.0 + 1e-12 && rs_worst >= 0.0 && reverify <= 1e-13 && zero_ok == 128;
    Outcome {
        passed,
        detail: format!(
            "{n} states: max Bloch norm={bloch_max:.15} min RS margin={rs_worst:e}; \
             {checked} solver outputs re-verified, max residual={reverify:e}; \
             zero solutions {zero_ok}/128"
        ),
    }
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let results = [
        (1, timed(Some(s(1)), criterion_1)),
        (2, timed(Some(s(1)), criterion_2)),
        (3, timed(Some(s(5)), criterion_3)),
        (4, timed(Some(s(1)), criterion_4)),
        (5, timed(None, criterion_5)),
        (6, timed(Some(s(10)), criterion_6)),
        (7, timed(Some(s(30)), criterion_7)),
        (8, timed(None, criterion_8)),
    ];
    let mut failed = Vec::new();
    for (id, out) in &results {
        let tag = if out.passed { "PASS" } else { "FAIL" };
        let known = if !out.passed && KNOWN_FAILURES.contains(id) {
            " (known, see analysis)"
        } else {
            ""
        };
        println!("criterion {id}: {tag}{known}: {}", out.detail);
        if !out.passed {
            failed.push(*id);
        }
    }
    assert_eq!(failed, KNOWN_FAILURES, "unexpected acceptance outcome");
}
