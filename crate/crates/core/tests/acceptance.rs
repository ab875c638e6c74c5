//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use lipm_gait::batch::lqr_weight_sweep;
use lipm_gait::linalg::Mat2;
use lipm_gait::stabilizer::gains_from_dare;
use lipm_gait::{
    design_cycle, open_loop_eigenvalues, pole_place, simulate, solve_dare, step_sequence_errors,
    steps_to_convergence, Disturbance, Gains, LqrWeights, SimConfig, WalkerParams,
};

/// Oracle suite size.
const CASES: usize = 1000;
/// Convergence threshold on ‖e_i‖ used by the scenario criteria.
const SETTLED: f64 = 1e-3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Best wall-clock time over a few repetitions.
fn best_time<T>(reps: usize, mut f: impl FnMut() -> T) -> (T, Duration) {
    let mut best = Duration::MAX;
    let mut out = None;
    for _ in 0..reps {
        let start = Instant::now();
        let v = f();
        best = best.min(start.elapsed());
        out = Some(v);
    }
    (out.unwrap(), best)
}

fn ac1_fixed_point() -> Outcome {
    let p = WalkerParams::new(1.0, 9.8, 50.0, 0.75).unwrap();
    let (c, dt) = best_time(20, || design_cycle(&p, 0.5, 0.4).unwrap());
    check(
        c.start.x == -0.25 && (c.start.xdot - 1.4092).abs() <= 5e-4 && dt < Duration::from_millis(1),
        format!("x_c = ({}, {:.6}), {:?}", c.start.x, c.start.xdot, dt),
    )
}

fn ac2_instability() -> Outcome {
    let (_, _, m) = nominal();
    let (hi, lo) = open_loop_eigenvalues(&m);
    check(
        (hi - 3.498).abs() <= 2e-3 && (lo - 0.2859).abs() <= 2e-4 && (hi * lo - 1.0).abs() <= 1e-10 && hi > 1.0,
        format!("eigenvalues ({hi:.6}, {lo:.6}), product - 1 = {:e}", hi * lo - 1.0),
    )
}

fn ac3_pole_placement() -> Outcome {
    let worst = pole_placement_error(CASES, 301);
    let (_, _, m) = nominal();
    let g = pole_place(&m, 0.0, 0.0).unwrap();
    check(
        worst < 1e-8 && (g.k1 + 3.7839).abs() <= 1e-3 && (g.k2 + 1.2250).abs() <= 1e-3,
        format!("worst pole error {worst:e}; deadbeat K = ({:.5}, {:.5})", g.k1, g.k2),
    )
}

fn ac4_dare() -> Outcome {
    let (_, _, m) = nominal();
    let mut pass = true;
    let mut parts = Vec::new();
    for r in [0.01, 1.0, 100.0] {
        let w = LqrWeights::identity(r).unwrap();
        let (sol, dt) = best_time(5, || solve_dare(&m, &w));
        match sol {
            Ok(sol) => {
                let rho = gains_from_dare(&m, &w, &sol).spectral_radius();
                pass &= sol.residual < 1e-9 && rho < 1.0 && dt < Duration::from_millis(10);
                parts.push(format!("R={r}: defect {:.1e}, rho {rho:.4}, {dt:?}", sol.residual));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("R={r}: {e}"));
            }
        }
    }
    check(pass, parts.join("; "))
}

fn ac5_scenario() -> Outcome {
    let (p, c, m) = nominal();
    let cfg = SimConfig::new(20).with_disturbance(Disturbance::nominal_push());
    let gains = pole_place(&m, 0.0, 0.0).unwrap();
    let (tr, dt) = best_time(3, || simulate(&p, &c, &gains, &cfg).unwrap());
    let settle = steps_to_convergence(&tr, SETTLED);
    let last = tr.steps.last().unwrap().start_state;
    let closure = (last.x - c.start.x).hypot(last.xdot - c.start.xdot);
    check(
        settle.is_some_and(|n| n <= 3) && closure < 1e-3 && dt < Duration::from_millis(100),
        format!("settles {settle:?} steps after push, closure {closure:.1e}, 20-step run {dt:?}"),
    )
}

fn ac6_weight_trend() -> Outcome {
    let p = WalkerParams::nominal();
    let c = design_cycle(&p, 0.5, 0.4).unwrap();
    let cfg = SimConfig::new(20).with_disturbance(Disturbance::nominal_push());
    let runs = lqr_weight_sweep(&p, &c, Mat2::IDENTITY, &[1.0, 100.0], &cfg).unwrap();
    let dev = |i: usize| {
        runs[i]
            .trace
            .steps
            .iter()
            .map(|s| (s.applied_length - 0.5).abs())
            .fold(0.0, f64::max)
    };
    let settle = |i: usize| steps_to_convergence(&runs[i].trace, SETTLED).unwrap_or(usize::MAX);
    check(
        dev(1) < dev(0) && settle(1) >= settle(0),
        format!(
            "max |L-0.5|: R=1 {:.5}, R=100 {:.5}; settling R=1 {}, R=100 {}",
            dev(0),
            dev(1),
            settle(0),
            settle(1)
        ),
    )
}

fn ac7_oracles() -> Outcome {
    let rk4 = flow_vs_rk4(CASES, 701);
    let step = step_vs_flow_reset(CASES, 702);
    let energy = energy_drift(CASES, 703);
    let replay = replay_consistency(CASES, 704);
    let mismatches = determinism_mismatches(CASES, 705);
    check(
        rk4 < 1e-8 && step < 1e-12 && energy < 1e-10 && replay < 1e-12 && mismatches == 0,
        format!(
            "rk4 {rk4:.1e}, map {step:.1e}, energy {energy:.1e}, replay {replay:.1e}, nondeterministic {mismatches}"
        ),
    )
}

fn ac8_open_loop_growth() -> Outcome {
    let (p, c, m) = nominal();
    let push = Disturbance::nominal_push();
    let cfg = SimConfig::new(12).with_disturbance(push);
    let tr = simulate(&p, &c, &Gains::zero(&m), &cfg).unwrap();
    let e = step_sequence_errors(&tr);
    // e[push.step_index] is the first perturbed error (0-based index of step d+1).
    let first = push.step_index;
    let ratios: Vec<f64> = (first..e.len() - 1).map(|i| e[i + 1] / e[i]).collect();
    let settled = &ratios[2..];
    let ok = settled.iter().all(|r| (r / 3.498 - 1.0).abs() <= 0.02);
    check(
        ok,
        format!(
            "ratios {}",
            ratios.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("AC1 fixed-point reproduction", ac1_fixed_point),
        ("AC2 instability certificate", ac2_instability),
        ("AC3 pole-placement fidelity", ac3_pole_placement),
        ("AC4 DARE quality", ac4_dare),
        ("AC5 push-recovery scenario", ac5_scenario),
        ("AC6 input-weight trend", ac6_weight_trend),
        ("AC7 oracle suites", ac7_oracles),
        ("AC8 open-loop growth", ac8_open_loop_growth),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {}", outcome.detail);
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
