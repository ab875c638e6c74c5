//! Single-support dynamics of the linear inverted pendulum.
//!
//! The horizontal COM position relative to the COP obeys `ẍ = (g/h)·x` while
//! the COM height and the centroidal angular momentum are held constant and
//! the COP stays put for the whole step. Everything here is closed-form.

use crate::error::{ensure_finite, GaitError, Result};
use crate::linalg::Vec2;

/// Physical constants of the walker.
///
/// The natural frequency `ω = √(g/h)` is computed once on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkerParams {
    com_height: f64,
    gravity: f64,
    mass: f64,
    max_step_length: f64,
    omega: f64,
}

impl WalkerParams {
    pub fn new(com_height: f64, gravity: f64, mass: f64, max_step_length: f64) -> Result<Self> {
        for (name, v) in [
            ("COM height h", com_height),
            ("gravity g", gravity),
            ("mass m", mass),
            ("maximum step length", max_step_length),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(GaitError::InvalidArgument(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(Self {
            com_height,
            gravity,
            mass,
            max_step_length,
            omega: (gravity / com_height).sqrt(),
        })
    }

    /// h = 1 m, g = 9.8 m/s², m = 50 kg, L_max = 0.75 m.
    pub fn nominal() -> Self {
        Self::new(1.0, 9.8, 50.0, 0.75).expect("table 1 constants are valid")
    }

    pub fn com_height(&self) -> f64 {
        self.com_height
    }

    pub fn gravity(&self) -> f64 {
        self.gravity
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn max_step_length(&self) -> f64 {
        self.max_step_length
    }

    /// √(g/h), in 1/s.
    pub fn omega(&self) -> f64 {
        self.omega
    }
}

/// COM position relative to the COP and COM velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GaitState {
    pub x: f64,
    pub xdot: f64,
}

impl GaitState {
    pub const ORIGIN: GaitState = GaitState { x: 0.0, xdot: 0.0 };

    pub const fn new(x: f64, xdot: f64) -> Self {
        Self { x, xdot }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.xdot.is_finite()
    }

    pub fn to_vec(self) -> Vec2 {
        Vec2([self.x, self.xdot])
    }

    pub fn from_vec(v: Vec2) -> Self {
        Self::new(v.0[0], v.0[1])
    }
}

/// Ground reaction at one instant, with the angular-momentum balance residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrfSample {
    pub fx: f64,
    pub fy: f64,
    /// `fx·h − fy·x`; zero when the centroidal angular momentum is constant.
    pub hdot_residual: f64,
}

fn check_duration(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(GaitError::InvalidArgument(format!(
            "duration must be finite and >= 0, got {t}"
        )))
    }
}

/// Exact free flow of `ẍ = ω²x` over `t` seconds.
pub fn flow(params: &WalkerParams, s0: GaitState, t: f64) -> Result<GaitState> {
    ensure_finite("initial state", &[s0.x, s0.xdot])?;
    check_duration(t)?;
    let w = params.omega;
    let (sh, ch) = ((w * t).sinh(), (w * t).cosh());
    Ok(GaitState {
        x: ch * s0.x + sh * s0.xdot / w,
        xdot: w * sh * s0.x + ch * s0.xdot,
    })
}

/// Exact flow of `ẍ = ω²x + F/m` under a constant horizontal push `force`.
///
/// The push moves the equilibrium to `x* = −F/(m·ω²)`; the state then evolves
/// as the free flow about `x*`.
pub fn flow_forced(params: &WalkerParams, s0: GaitState, force: f64, t: f64) -> Result<GaitState> {
    ensure_finite("force", &[force])?;
    if force == 0.0 {
        return flow(params, s0, t);
    }
    ensure_finite("initial state", &[s0.x, s0.xdot])?;
    check_duration(t)?;
    let w = params.omega;
    let x_eq = -force / (params.mass * w * w);
    let (sh, ch) = ((w * t).sinh(), (w * t).cosh());
    let dx = s0.x - x_eq;
    Ok(GaitState {
        x: x_eq + ch * dx + sh * s0.xdot / w,
        xdot: w * sh * dx + ch * s0.xdot,
    })
}

/// Ground reaction force reconstructed from Newton's balance.
pub fn grf(params: &WalkerParams, s: GaitState) -> Result<GrfSample> {
    ensure_finite("state", &[s.x, s.xdot])?;
    let fx = params.mass * (params.gravity / params.com_height) * s.x;
    let fy = params.mass * params.gravity;
    Ok(GrfSample {
        fx,
        fy,
        hdot_residual: fx * params.com_height - fy * s.x,
    })
}

/// Orbital energy per unit mass, `½ẋ² − (g/2h)x²`. Conserved by [`flow`].
pub fn orbital_energy(params: &WalkerParams, s: GaitState) -> f64 {
    0.5 * s.xdot * s.xdot - 0.5 * (params.gravity / params.com_height) * s.x * s.x
}
