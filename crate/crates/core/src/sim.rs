//! Hybrid closed-loop walking simulation.
//!
//! Each step is a single-support phase of fixed duration `T_c`, propagated
//! in closed form (with an optional push window), followed by an
//! instantaneous support exchange. The step-length controller acts once per
//! step on the error of the step's initial state.

use crate::error::{GaitError, Result};
use crate::lipm::{flow, flow_forced, grf, GaitState, WalkerParams};
use crate::stabilizer::{control, saturate_step, Gains};
use crate::step_map::{reset, GaitCycle, StepError};

pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 1000.0;

/// Slack allowed when checking that a push window fits in its step.
const WINDOW_SLACK: f64 = 1e-12;

/// Constant horizontal push on the COM during part of one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disturbance {
    /// 1-based step ordinal.
    pub step_index: usize,
    /// Fraction of the step time at which the push starts, in `[0, 1)`.
    pub phase: f64,
    /// Horizontal force (N).
    pub force: f64,
    /// Push duration (s).
    pub duration: f64,
}

impl Disturbance {
    /// −20 N for 20 ms starting halfway through the third step.
    pub fn nominal_push() -> Self {
        Self {
            step_index: 3,
            phase: 0.5,
            force: -20.0,
            duration: 0.02,
        }
    }

    fn validate(&self, step_time: f64) -> Result<()> {
        let bad = |msg: String| Err(GaitError::Configuration(msg));
        if self.step_index == 0 {
            return bad("disturbance step_index is 1-based".into());
        }
        if !(self.phase.is_finite() && (0.0..1.0).contains(&self.phase)) {
            return bad(format!("disturbance phase {} outside [0, 1)", self.phase));
        }
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return bad(format!("disturbance duration {} must be >= 0", self.duration));
        }
        if !self.force.is_finite() {
            return bad("disturbance force must be finite".into());
        }
        if self.phase * step_time + self.duration > step_time + WINDOW_SLACK {
            return bad(format!(
                "push window [{}, {}] s does not fit in a {step_time} s step",
                self.phase * step_time,
                self.phase * step_time + self.duration
            ));
        }
        Ok(())
    }
}

/// How a push is applied to the single-support dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DisturbanceModel {
    /// Constant force integrated in closed form over the window.
    #[default]
    Exact,
    /// Velocity jump `F·ΔT/m` at the window midpoint.
    Impulse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_steps: usize,
    pub sample_rate_hz: f64,
    pub disturbances: Vec<Disturbance>,
    pub model: DisturbanceModel,
}

impl SimConfig {
    pub fn new(n_steps: usize) -> Self {
        Self {
            n_steps,
            sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ,
            disturbances: Vec::new(),
            model: DisturbanceModel::Exact,
        }
    }

    pub fn with_disturbance(mut self, d: Disturbance) -> Self {
        self.disturbances.push(d);
        self
    }

    pub fn with_sample_rate(mut self, hz: f64) -> Self {
        self.sample_rate_hz = hz;
        self
    }

    pub fn with_model(mut self, model: DisturbanceModel) -> Self {
        self.model = model;
        self
    }

    pub fn validate(&self, step_time: f64) -> Result<()> {
        if self.n_steps == 0 {
            return Err(GaitError::Configuration("n_steps must be >= 1".into()));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(GaitError::Configuration(format!(
                "sample rate must be > 0, got {}",
                self.sample_rate_hz
            )));
        }
        for (i, d) in self.disturbances.iter().enumerate() {
            d.validate(step_time)?;
            if d.step_index > self.n_steps {
                return Err(GaitError::Configuration(format!(
                    "disturbance on step {} but only {} steps are simulated",
                    d.step_index, self.n_steps
                )));
            }
            if self.disturbances[..i].iter().any(|o| o.step_index == d.step_index) {
                return Err(GaitError::Configuration(format!(
                    "more than one disturbance on step {}",
                    d.step_index
                )));
            }
        }
        Ok(())
    }

    /// Index of the last disturbed step, or 0 for an undisturbed run.
    pub fn last_disturbed_step(&self) -> usize {
        self.disturbances.iter().map(|d| d.step_index).max().unwrap_or(0)
    }

    fn disturbance_on(&self, step_index: usize) -> Option<&Disturbance> {
        self.disturbances.iter().find(|d| d.step_index == step_index)
    }
}

/// States at the edges of a push window, in step-local time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PushWindow {
    pub t_on: f64,
    pub t_off: f64,
    pub state_on: GaitState,
    pub state_off: GaitState,
    /// Where the state would be at `t_off` without the push.
    pub unpushed_off: GaitState,
}

impl PushWindow {
    /// Velocity change caused by the push over the window.
    pub fn velocity_kick(&self) -> f64 {
        self.state_off.xdot - self.unpushed_off.xdot
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// 1-based.
    pub index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub start_state: GaitState,
    /// State just before the support exchange.
    pub end_state: GaitState,
    pub commanded_length: f64,
    pub applied_length: f64,
    pub clamped: bool,
    pub error_norm: f64,
    /// World position of the COP during this step.
    pub cop_world: f64,
    pub push: Option<PushWindow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x_world: f64,
    pub x_rel: f64,
    pub xdot: f64,
    pub cop_world: f64,
    pub fx: f64,
    pub fy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub params: WalkerParams,
    pub cycle: GaitCycle,
    pub gains: Gains,
    pub config: SimConfig,
    pub steps: Vec<StepRecord>,
    pub samples: Vec<Sample>,
}

/// Continuous phase of one step, split at the push window.
#[derive(Debug, Clone, Copy)]
struct StepPhase {
    start: GaitState,
    push: Option<(Disturbance, PushWindow)>,
    model: DisturbanceModel,
}

impl StepPhase {
    fn new(
        params: &WalkerParams,
        step_time: f64,
        start: GaitState,
        disturbance: Option<&Disturbance>,
        model: DisturbanceModel,
    ) -> Result<Self> {
        let push = match disturbance {
            None => None,
            Some(d) => {
                let t_on = d.phase * step_time;
                let t_off = (t_on + d.duration).min(step_time);
                let state_on = flow(params, start, t_on)?;
                let state_off = match model {
                    DisturbanceModel::Exact => flow_forced(params, state_on, d.force, t_off - t_on)?,
                    DisturbanceModel::Impulse => {
                        let half = 0.5 * (t_off - t_on);
                        let mid = kick(params, flow(params, state_on, half)?, d);
                        flow(params, mid, t_off - t_on - half)?
                    }
                };
                Some((
                    *d,
                    PushWindow {
                        t_on,
                        t_off,
                        state_on,
                        state_off,
                        unpushed_off: flow(params, state_on, t_off - t_on)?,
                    },
                ))
            }
        };
        Ok(Self { start, push, model })
    }

    /// State at step-local time `tau`.
    fn state_at(&self, params: &WalkerParams, tau: f64) -> Result<GaitState> {
        let Some((d, w)) = &self.push else {
            return flow(params, self.start, tau);
        };
        if tau <= w.t_on {
            return flow(params, self.start, tau);
        }
        if tau >= w.t_off {
            return flow(params, w.state_off, tau - w.t_off);
        }
        match self.model {
            DisturbanceModel::Exact => flow_forced(params, w.state_on, d.force, tau - w.t_on),
            DisturbanceModel::Impulse => {
                let half = 0.5 * (w.t_off - w.t_on);
                if tau - w.t_on < half {
                    flow(params, w.state_on, tau - w.t_on)
                } else {
                    let mid = kick(params, flow(params, w.state_on, half)?, d);
                    flow(params, mid, tau - w.t_on - half)
                }
            }
        }
    }
}

fn kick(params: &WalkerParams, s: GaitState, d: &Disturbance) -> GaitState {
    GaitState::new(s.x, s.xdot + d.force * d.duration / params.mass())
}

/// Runs the closed loop from the cycle's fixed point for `config.n_steps` steps.
pub fn simulate(
    params: &WalkerParams,
    cycle: &GaitCycle,
    gains: &Gains,
    config: &SimConfig,
) -> Result<SimTrace> {
    config.validate(cycle.step_time)?;
    let step_time = cycle.step_time;

    let mut steps = Vec::with_capacity(config.n_steps);
    let mut phases = Vec::with_capacity(config.n_steps);
    let mut state = cycle.start;
    let mut cop = 0.0;
    for index in 1..=config.n_steps {
        let error = StepError::between(state, cycle);
        let u = control(gains, error);
        let step = saturate_step(cycle, params, u);
        let phase = StepPhase::new(
            params,
            step_time,
            state,
            config.disturbance_on(index),
            config.model,
        )?;
        let end = phase.state_at(params, step_time)?;
        steps.push(StepRecord {
            index,
            t_start: (index - 1) as f64 * step_time,
            t_end: index as f64 * step_time,
            start_state: state,
            end_state: end,
            commanded_length: cycle.step_length + u,
            applied_length: step.length,
            clamped: step.clamped,
            error_norm: error.norm(),
            cop_world: cop,
            push: phase.push.map(|(_, w)| w),
        });
        phases.push(phase);
        state = reset(end, step.length);
        cop += step.length;
    }

    let samples = sample_trajectory(params, step_time, &steps, &phases, config.sample_rate_hz)?;
    Ok(SimTrace {
        params: *params,
        cycle: *cycle,
        gains: *gains,
        config: config.clone(),
        steps,
        samples,
    })
}

fn sample_trajectory(
    params: &WalkerParams,
    step_time: f64,
    steps: &[StepRecord],
    phases: &[StepPhase],
    rate: f64,
) -> Result<Vec<Sample>> {
    let total = steps.len() as f64 * step_time;
    let count = (total * rate).ceil() as usize;
    let mut samples = Vec::with_capacity(count);
    for j in 0.. {
        let t = j as f64 / rate;
        if t >= total {
            break;
        }
        let mut k = ((t / step_time) as usize).min(steps.len() - 1);
        if t < steps[k].t_start {
            k -= 1;
        } else if k + 1 < steps.len() && t >= steps[k + 1].t_start {
            k += 1;
        }
        let rec = &steps[k];
        let s = phases[k].state_at(params, t - rec.t_start)?;
        let f = grf(params, s)?;
        samples.push(Sample {
            t,
            x_world: s.x + rec.cop_world,
            x_rel: s.x,
            xdot: s.xdot,
            cop_world: rec.cop_world,
            fx: f.fx,
            fy: f.fy,
        });
    }
    Ok(samples)
}

/// Error norms `‖e_i‖` of every step, in order.
pub fn step_sequence_errors(trace: &SimTrace) -> Vec<f64> {
    trace.steps.iter().map(|s| s.error_norm).collect()
}

/// First step index `i > after` from which every error norm stays below
/// `threshold`, or `None` if the run never settles.
pub fn convergence_step(steps: &[StepRecord], after: usize, threshold: f64) -> Option<usize> {
    let mut candidate = None;
    for s in steps.iter().filter(|s| s.index > after) {
        if s.error_norm < threshold {
            candidate.get_or_insert(s.index);
        } else {
            candidate = None;
        }
    }
    candidate
}

/// Steps after the last push until the error settles below `threshold`.
pub fn steps_to_convergence(trace: &SimTrace, threshold: f64) -> Option<usize> {
    let after = trace.config.last_disturbed_step();
    convergence_step(&trace.steps, after, threshold).map(|i| i - after)
}

/// Phase-plane polyline `(x_rel, ẋ)` of a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhasePortrait {
    pub points: Vec<(f64, f64)>,
    /// Indices of points where a support exchange starts; the segment from
    /// `points[i]` to `points[i + 1]` is the reset jump.
    pub resets: Vec<usize>,
    /// Index ranges `[start, end]` of each step's continuous arc.
    pub arcs: Vec<(usize, usize)>,
}

pub fn phase_portrait(trace: &SimTrace) -> PhasePortrait {
    phase_portrait_from(&trace.steps, &trace.samples)
}

/// Builds the portrait from step records and samples: each step contributes
/// its start state, the samples strictly inside it and its end state,
/// followed by the horizontal reset jump.
pub fn phase_portrait_from(steps: &[StepRecord], samples: &[Sample]) -> PhasePortrait {
    let mut out = PhasePortrait::default();
    let mut cursor = 0;
    for (k, step) in steps.iter().enumerate() {
        let begin = out.points.len();
        if k == 0 {
            out.points.push((step.start_state.x, step.start_state.xdot));
        }
        while cursor < samples.len() && samples[cursor].t <= step.t_start {
            cursor += 1;
        }
        while cursor < samples.len() && samples[cursor].t < step.t_end {
            out.points.push((samples[cursor].x_rel, samples[cursor].xdot));
            cursor += 1;
        }
        out.points.push((step.end_state.x, step.end_state.xdot));
        let end = out.points.len() - 1;
        out.arcs.push((if k == 0 { begin } else { begin - 1 }, end));
        out.resets.push(end);
        let next = reset(step.end_state, step.applied_length);
        out.points.push((next.x, next.xdot));
    }
    out
}
