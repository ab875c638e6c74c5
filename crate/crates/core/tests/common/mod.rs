//! Independent oracles shared by the integration and acceptance suites.
//!
//! Nothing here calls the closed-form flows or the library's eigenvalue
//! routine; each check reaches its answer by a different route.

#![allow(dead_code)]

use lipm_gait::batch;
use lipm_gait::linalg::{Mat2, Vec2};
use lipm_gait::sim::PushWindow;
use lipm_gait::stabilizer::closed_loop_matrix;
use lipm_gait::{
    apply_step, build_step_matrices, design_cycle, flow, flow_forced, orbital_energy,
    pole_place, pole_place_pair, simulate, Disturbance, GaitCycle, GaitState, Gains,
    LqrWeights, PolePair, SimConfig, SimTrace, StepMatrices, WalkerParams,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const RK4_STEP: f64 = 1e-6;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn nominal() -> (WalkerParams, GaitCycle, StepMatrices) {
    let p = WalkerParams::nominal();
    let c = design_cycle(&p, 0.5, 0.4).unwrap();
    let m = build_step_matrices(&p, 0.4).unwrap();
    (p, c, m)
}

/// Classical fixed-step RK4 on `ẍ = (g/h)·x + F/m`, with a short final step.
pub fn rk4(params: &WalkerParams, s0: GaitState, force: f64, t: f64, h: f64) -> GaitState {
    let k = params.gravity() / params.com_height();
    let push = force / params.mass();
    let f = |[x, v]: [f64; 2]| [v, k * x + push];
    let step = |y: [f64; 2], dt: f64| {
        let k1 = f(y);
        let k2 = f([y[0] + 0.5 * dt * k1[0], y[1] + 0.5 * dt * k1[1]]);
        let k3 = f([y[0] + 0.5 * dt * k2[0], y[1] + 0.5 * dt * k2[1]]);
        let k4 = f([y[0] + dt * k3[0], y[1] + dt * k3[1]]);
        [
            y[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    };
    let n = (t / h).floor() as usize;
    let mut y = [s0.x, s0.xdot];
    for _ in 0..n {
        y = step(y, h);
    }
    let rest = t - n as f64 * h;
    if rest > 0.0 {
        y = step(y, rest);
    }
    GaitState::new(y[0], y[1])
}

pub fn state_dist(a: GaitState, b: GaitState) -> f64 {
    (a.x - b.x).abs().max((a.xdot - b.xdot).abs())
}

/// `det(M − zI)` evaluated directly.
pub fn char_poly_at(m: Mat2, z: Complex64) -> Complex64 {
    let [[a, b], [c, d]] = m.0;
    (Complex64::new(a, 0.0) - z) * (Complex64::new(d, 0.0) - z) - b * c
}

/// Smallest distance between two unordered pairs of complex numbers.
pub fn pair_distance(a: [Complex64; 2], b: [Complex64; 2]) -> f64 {
    let direct = (a[0] - b[0]).norm().max((a[1] - b[1]).norm());
    let swapped = (a[0] - b[1]).norm().max((a[1] - b[0]).norm());
    direct.min(swapped)
}

/// A pole pair drawn uniformly from the open disc of the given radius,
/// real or complex-conjugate with equal probability.
pub fn random_poles(rng: &mut ChaCha8Rng, radius: f64) -> PolePair {
    if rng.random_bool(0.5) {
        PolePair::Real(
            rng.random_range(-radius..radius),
            rng.random_range(-radius..radius),
        )
    } else {
        let r = radius * rng.random_range(0.0f64..1.0).sqrt();
        let theta = rng.random_range(1e-3..std::f64::consts::PI - 1e-3);
        PolePair::Conjugate {
            re: r * theta.cos(),
            im: r * theta.sin(),
        }
    }
}

/// Riccati defect `AᵀPA − AᵀPB(R + BᵀPB)⁻¹BᵀPA − P + Q`, written out entrywise.
pub fn riccati_defect(m: &StepMatrices, w: &LqrWeights, p: [f64; 3]) -> [[f64; 2]; 2] {
    let a = m.a.0;
    let b = m.b.0;
    let q = w.q().0;
    let pm = [[p[0], p[1]], [p[1], p[2]]];
    let mut out = [[0.0; 2]; 2];
    let pb = [
        pm[0][0] * b[0] + pm[0][1] * b[1],
        pm[1][0] * b[0] + pm[1][1] * b[1],
    ];
    let denom = w.r() + b[0] * pb[0] + b[1] * pb[1];
    // AᵀPB as a column
    let atpb = [
        a[0][0] * pb[0] + a[1][0] * pb[1],
        a[0][1] * pb[0] + a[1][1] * pb[1],
    ];
    for i in 0..2 {
        for j in 0..2 {
            let mut atpa = 0.0;
            for k in 0..2 {
                for l in 0..2 {
                    atpa += a[k][i] * pm[k][l] * a[l][j];
                }
            }
            out[i][j] = atpa - atpb[i] * atpb[j] / denom - pm[i][j] + q[i][j];
        }
    }
    out
}

/// Brute-force DARE: pattern search over the three free entries of a
/// symmetric `P`, minimizing the squared Frobenius norm of the defect. The
/// grid is refined only when the centre stops moving.
pub fn dare_grid_search(m: &StepMatrices, w: &LqrWeights, center: [f64; 3], span: f64) -> Mat2 {
    let objective = |p: [f64; 3]| {
        riccati_defect(m, w, p)
            .iter()
            .flat_map(|r| r.iter())
            .map(|v| v * v)
            .sum::<f64>()
    };
    let n = 6i32;
    let mut best = center;
    let mut best_val = objective(best);
    let mut half = span;
    for _ in 0..2000 {
        if half < 1e-13 * span {
            break;
        }
        let base = best;
        for i in -n..=n {
            for j in -n..=n {
                for k in -n..=n {
                    let cand = [
                        base[0] + half * i as f64 / n as f64,
                        base[1] + half * j as f64 / n as f64,
                        base[2] + half * k as f64 / n as f64,
                    ];
                    let v = objective(cand);
                    // Ignore gains too small to be more than drift along flat directions.
                    if v < best_val * (1.0 - 1e-9) {
                        best_val = v;
                        best = cand;
                    }
                }
            }
        }
        if best == base {
            half *= 0.5;
        }
    }
    Mat2::new(best[0], best[1], best[1], best[2])
}

// ---------------------------------------------------------------------------
// Randomized suites. Each returns the worst error seen over `cases` draws.
// ---------------------------------------------------------------------------

fn random_state(rng: &mut ChaCha8Rng, bound: f64) -> GaitState {
    // ‖s‖∞ ≤ bound/√2 keeps the Euclidean norm within `bound`.
    let b = bound / 2f64.sqrt();
    GaitState::new(rng.random_range(-b..b), rng.random_range(-b..b))
}

pub fn flow_vs_rk4(cases: usize, seed: u64) -> f64 {
    let p = WalkerParams::nominal();
    let mut r = rng(seed);
    let draws: Vec<(GaitState, f64)> = (0..cases)
        .map(|_| (random_state(&mut r, 10.0), r.random_range(0.0..1.0)))
        .collect();
    batch::map(&draws, |&(s, t)| {
        state_dist(flow(&p, s, t).unwrap(), rk4(&p, s, 0.0, t, RK4_STEP))
    })
    .into_iter()
    .fold(0.0, f64::max)
}

pub fn forced_flow_vs_rk4(cases: usize, seed: u64) -> f64 {
    let p = WalkerParams::nominal();
    let mut r = rng(seed);
    let draws: Vec<(GaitState, f64, f64)> = (0..cases)
        .map(|_| {
            (
                random_state(&mut r, 2.0),
                r.random_range(-50.0..50.0),
                r.random_range(0.0..0.05),
            )
        })
        .collect();
    batch::map(&draws, |&(s, f, t)| {
        state_dist(flow_forced(&p, s, f, t).unwrap(), rk4(&p, s, f, t, RK4_STEP))
    })
    .into_iter()
    .fold(0.0, f64::max)
}

pub fn step_vs_flow_reset(cases: usize, seed: u64) -> f64 {
    let p = WalkerParams::nominal();
    let mut r = rng(seed);
    (0..cases)
        .map(|_| {
            let s = random_state(&mut r, 3.0);
            let l = r.random_range(-0.75..0.75);
            let t = r.random_range(0.05..1.0);
            let m = build_step_matrices(&p, t).unwrap();
            let via_map = apply_step(&m, s, l).unwrap();
            let end = flow(&p, s, t).unwrap();
            state_dist(via_map, GaitState::new(end.x - l, end.xdot))
        })
        .fold(0.0, f64::max)
}

pub fn energy_drift(cases: usize, seed: u64) -> f64 {
    let p = WalkerParams::nominal();
    let mut r = rng(seed);
    (0..cases)
        .map(|_| {
            let s = random_state(&mut r, 3.0);
            let t = r.random_range(0.0..1.0);
            (orbital_energy(&p, flow(&p, s, t).unwrap()) - orbital_energy(&p, s)).abs()
        })
        .fold(0.0, f64::max)
}

/// A random closed-loop run: random stabilizing gains, step count and push.
pub fn random_run(r: &mut ChaCha8Rng) -> (WalkerParams, GaitCycle, Gains, SimConfig) {
    let p = WalkerParams::nominal();
    let step_time = r.random_range(0.2..0.6);
    let cycle = design_cycle(&p, r.random_range(0.2..0.7), step_time).unwrap();
    let m = build_step_matrices(&p, step_time).unwrap();
    let gains = pole_place_pair(&m, random_poles(r, 0.6)).unwrap();
    let n_steps = r.random_range(3..12);
    let phase = r.random_range(0.0..0.9);
    let duration = r.random_range(0.0..(1.0 - phase) * step_time);
    let cfg = SimConfig::new(n_steps)
        .with_sample_rate(50.0)
        .with_disturbance(Disturbance {
            step_index: r.random_range(1..=n_steps),
            phase,
            force: r.random_range(-40.0..40.0),
            duration,
        });
    (p, cycle, gains, cfg)
}

/// Recomputes each step's end state from its start state using only the
/// pendulum flows and the push window boundaries.
pub fn replay_error(trace: &SimTrace) -> f64 {
    let p = &trace.params;
    let t_step = trace.cycle.step_time;
    trace
        .steps
        .iter()
        .map(|s| {
            let end = match trace.config.disturbances.iter().find(|d| d.step_index == s.index) {
                None => flow(p, s.start_state, t_step).unwrap(),
                Some(d) => {
                    let t_on = d.phase * t_step;
                    let t_off = (t_on + d.duration).min(t_step);
                    let on = flow(p, s.start_state, t_on).unwrap();
                    let off = flow_forced(p, on, d.force, t_off - t_on).unwrap();
                    flow(p, off, t_step - t_off).unwrap()
                }
            };
            state_dist(end, s.end_state)
        })
        .fold(0.0, f64::max)
}

pub fn replay_consistency(cases: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    (0..cases)
        .map(|_| {
            let (p, c, g, cfg) = random_run(&mut r);
            replay_error(&simulate(&p, &c, &g, &cfg).unwrap())
        })
        .fold(0.0, f64::max)
}

fn trace_bits(t: &SimTrace) -> Vec<u64> {
    let mut out = Vec::new();
    for s in &t.steps {
        out.extend(
            [
                s.start_state.x,
                s.start_state.xdot,
                s.end_state.x,
                s.end_state.xdot,
                s.commanded_length,
                s.applied_length,
                s.error_norm,
                s.cop_world,
            ]
            .map(f64::to_bits),
        );
        if let Some(PushWindow { state_off, .. }) = s.push {
            out.extend([state_off.x.to_bits(), state_off.xdot.to_bits()]);
        }
    }
    for s in &t.samples {
        out.extend([s.t, s.x_world, s.x_rel, s.xdot, s.cop_world, s.fx, s.fy].map(f64::to_bits));
    }
    out
}

/// Number of configurations whose two runs differ in any bit.
pub fn determinism_mismatches(cases: usize, seed: u64) -> usize {
    let mut r = rng(seed);
    let runs: Vec<_> = (0..cases).map(|_| random_run(&mut r)).collect();
    batch::map(&runs, |(p, c, g, cfg)| {
        let a = simulate(p, c, g, cfg).unwrap();
        let b = simulate(p, c, g, cfg).unwrap();
        trace_bits(&a) != trace_bits(&b)
    })
    .into_iter()
    .filter(|differs| *differs)
    .count()
}

/// Worst eigenvalue mismatch between requested and achieved poles.
pub fn pole_placement_error(cases: usize, seed: u64) -> f64 {
    let p = WalkerParams::nominal();
    let mut r = rng(seed);
    (0..cases)
        .map(|_| {
            let t = r.random_range(0.1..=1.0);
            let m = build_step_matrices(&p, t).unwrap();
            let req = random_poles(&mut r, 1.0 - 1e-9);
            let g = pole_place_pair(&m, req).unwrap();
            let cl = closed_loop_matrix(&m, g.k1, g.k2);
            let achieved = pair_distance(cl.eigenvalues(), req.roots());
            let residual = req
                .roots()
                .iter()
                .map(|z| char_poly_at(cl, *z).norm())
                .fold(0.0, f64::max);
            assert!(residual < 1e-8, "characteristic polynomial residual {residual}");
            achieved
        })
        .fold(0.0, f64::max)
}

pub fn deadbeat(m: &StepMatrices) -> Gains {
    pole_place(m, 0.0, 0.0).unwrap()
}

pub fn vec2(x: f64, y: f64) -> Vec2 {
    Vec2::new(x, y)
}
