//! Step-to-step map between the initial states of consecutive steps, and the
//! symmetric limit cycle that is its fixed point.

use crate::error::{ensure_finite, GaitError, Result};
use crate::linalg::{Mat2, Vec2};
use crate::lipm::{GaitState, WalkerParams};

/// Input matrix of the step map: the support exchange subtracts `L` from `x`.
pub const STEP_INPUT: Vec2 = Vec2([-1.0, 0.0]);

/// The linear map `x_{i+1,0} = A·x_{i,0} + B·L_i` for a fixed step duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMatrices {
    pub a: Mat2,
    pub b: Vec2,
    /// Step duration the map was built for (s).
    pub duration: f64,
}

impl StepMatrices {
    pub fn a11(&self) -> f64 {
        self.a.0[0][0]
    }

    pub fn a12(&self) -> f64 {
        self.a.0[0][1]
    }

    pub fn a21(&self) -> f64 {
        self.a.0[1][0]
    }

    pub fn a22(&self) -> f64 {
        self.a.0[1][1]
    }
}

/// A period-one gait: every step has length `step_length` and lasts `step_time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitCycle {
    pub step_length: f64,
    pub step_time: f64,
    /// Initial state of every step on the cycle.
    pub start: GaitState,
}

/// Deviation of a step-start state from the cycle's fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepError(pub Vec2);

impl StepError {
    pub fn between(state: GaitState, cycle: &GaitCycle) -> Self {
        StepError(state.to_vec() - cycle.start.to_vec())
    }

    pub fn x(&self) -> f64 {
        self.0 .0[0]
    }

    pub fn xdot(&self) -> f64 {
        self.0 .0[1]
    }

    /// Euclidean norm over (m, m/s).
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

/// Controllability test result; `det` is `det[B, A·B]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Controllability {
    pub controllable: bool,
    pub det: f64,
}

pub fn build_step_matrices(params: &WalkerParams, duration: f64) -> Result<StepMatrices> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(GaitError::InvalidArgument(format!(
            "step duration must be finite and > 0, got {duration}"
        )));
    }
    let w = params.omega();
    let (sh, ch) = ((w * duration).sinh(), (w * duration).cosh());
    Ok(StepMatrices {
        a: Mat2::new(ch, sh / w, w * sh, ch),
        b: STEP_INPUT,
        duration,
    })
}

/// Initial state of the next step after a step of length `step_length`.
pub fn apply_step(m: &StepMatrices, s0: GaitState, step_length: f64) -> Result<GaitState> {
    ensure_finite("step input", &[s0.x, s0.xdot, step_length])?;
    Ok(GaitState::from_vec(
        m.a * s0.to_vec() + m.b.scale(step_length),
    ))
}

/// Support exchange at touchdown: the COP jumps forward by `step_length`,
/// the COM velocity is unchanged.
pub fn reset(end: GaitState, step_length: f64) -> GaitState {
    GaitState::new(end.x - step_length, end.xdot)
}

/// Symmetric limit cycle with the given step length and time.
///
/// The cycle starts at `x = −L/2` with velocity `(L/2)·ω·coth(ωT/2)`.
pub fn design_cycle(params: &WalkerParams, step_length: f64, step_time: f64) -> Result<GaitCycle> {
    if !(step_time.is_finite() && step_time > 0.0) {
        return Err(GaitError::InvalidArgument(format!(
            "cycle step time must be finite and > 0, got {step_time}"
        )));
    }
    if !(step_length.is_finite() && step_length > 0.0 && step_length <= params.max_step_length()) {
        return Err(GaitError::ConstraintViolation(format!(
            "cycle step length {step_length} outside (0, L_max = {}]",
            params.max_step_length()
        )));
    }
    let w = params.omega();
    let half = 0.5 * step_length;
    let coth = 1.0 / (0.5 * w * step_time).tanh();
    Ok(GaitCycle {
        step_length,
        step_time,
        start: GaitState::new(-half, half * w * coth),
    })
}

/// Open-loop eigenvalues `(e^{ωT}, e^{−ωT})`, sorted descending.
pub fn open_loop_eigenvalues(m: &StepMatrices) -> (f64, f64) {
    let [hi, lo] = m.a.eigenvalues();
    (hi.re, lo.re)
}

pub fn is_controllable(m: &StepMatrices) -> Controllability {
    let ab = m.a * m.b;
    let det = m.b.0[0] * ab.0[1] - m.b.0[1] * ab.0[0];
    Controllability {
        controllable: det.abs() > 1e-12,
        det,
    }
}
