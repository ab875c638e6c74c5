//! Step-length feedback `u_i = −Kᵀ·e_i`, with gains from closed-form pole
//! placement or from a discrete LQR design.

use num_complex::Complex64;

use crate::error::{ensure_finite, GaitError, Result};
use crate::linalg::{Mat2, Vec2};
use crate::lipm::WalkerParams;
use crate::step_map::{is_controllable, GaitCycle, StepError, StepMatrices};

/// Successive-iterate tolerance of the Riccati iteration.
pub const DARE_TOLERANCE: f64 = 1e-12;
/// Iterate changes below this many ulps of `max|P|` are rounding noise.
const DARE_ROUNDING_ULPS: f64 = 8.0;
pub const DARE_MAX_ITERATIONS: usize = 1_000_000;

/// Feedback gains and the closed-loop eigenvalues they produce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    pub k1: f64,
    pub k2: f64,
    /// Eigenvalues of `A − B·Kᵀ`.
    pub poles: [Complex64; 2],
}

impl Gains {
    /// `K = 0`: the nominal step length is always used.
    pub fn zero(m: &StepMatrices) -> Self {
        Self::from_k(m, 0.0, 0.0)
    }

    /// Wraps a raw gain vector, computing its closed-loop eigenvalues.
    pub fn from_k(m: &StepMatrices, k1: f64, k2: f64) -> Self {
        let poles = closed_loop_matrix(m, k1, k2).eigenvalues();
        Self { k1, k2, poles }
    }

    pub fn k(&self) -> Vec2 {
        Vec2::new(self.k1, self.k2)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.poles[0].norm().max(self.poles[1].norm())
    }
}

/// Requested closed-loop pole pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolePair {
    Real(f64, f64),
    /// `re ± i·im`.
    Conjugate { re: f64, im: f64 },
}

impl PolePair {
    pub const DEADBEAT: PolePair = PolePair::Real(0.0, 0.0);

    pub fn sum(&self) -> f64 {
        match *self {
            PolePair::Real(a, b) => a + b,
            PolePair::Conjugate { re, .. } => 2.0 * re,
        }
    }

    pub fn product(&self) -> f64 {
        match *self {
            PolePair::Real(a, b) => a * b,
            PolePair::Conjugate { re, im } => re * re + im * im,
        }
    }

    pub fn roots(&self) -> [Complex64; 2] {
        match *self {
            PolePair::Real(a, b) => [Complex64::new(a, 0.0), Complex64::new(b, 0.0)],
            PolePair::Conjugate { re, im } => [Complex64::new(re, im), Complex64::new(re, -im)],
        }
    }

    fn validate(&self) -> Result<()> {
        let parts: Vec<f64> = match *self {
            PolePair::Real(a, b) => vec![a, b],
            PolePair::Conjugate { re, im } => vec![re, im],
        };
        if parts.iter().any(|v| !v.is_finite()) {
            return Err(GaitError::InvalidPoles(format!("{self:?} is not finite")));
        }
        if let Some(bad) = self.roots().iter().find(|z| z.norm() >= 1.0) {
            return Err(GaitError::InvalidPoles(format!(
                "requested pole {bad} has magnitude {:.6} >= 1",
                bad.norm()
            )));
        }
        Ok(())
    }
}

/// Quadratic state weight and scalar input weight of the LQR cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LqrWeights {
    q: Mat2,
    r: f64,
}

impl LqrWeights {
    pub fn new(q: Mat2, r: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(GaitError::InvalidArgument("Q must be finite".into()));
        }
        if q != q.transpose() {
            return Err(GaitError::InvalidArgument(format!("Q must be symmetric, got {:?}", q.0)));
        }
        let [e1, e2] = q.eigenvalues();
        if e1.re < 0.0 || e2.re < 0.0 {
            return Err(GaitError::InvalidArgument(format!(
                "Q must be positive semidefinite, eigenvalues {} and {}",
                e1.re, e2.re
            )));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(GaitError::InvalidArgument(format!("R must be finite and > 0, got {r}")));
        }
        Ok(Self { q, r })
    }

    /// `Q = I` with the given `R`.
    pub fn identity(r: f64) -> Result<Self> {
        Self::new(Mat2::IDENTITY, r)
    }

    pub fn q(&self) -> Mat2 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// Stabilizing solution of the discrete algebraic Riccati equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DareSolution {
    pub p: Mat2,
    pub iterations: usize,
    /// Infinity norm of the Riccati defect at `p`.
    pub residual: f64,
}

/// `A − B·Kᵀ`.
pub fn closed_loop_matrix(m: &StepMatrices, k1: f64, k2: f64) -> Mat2 {
    m.a - m.b.outer(Vec2::new(k1, k2))
}

fn require_controllable(m: &StepMatrices) -> Result<()> {
    let c = is_controllable(m);
    if c.controllable {
        Ok(())
    } else {
        Err(GaitError::Uncontrollable { det: c.det })
    }
}

/// Gains placing the closed-loop poles at `lambda1`, `lambda2`.
pub fn pole_place(m: &StepMatrices, lambda1: f64, lambda2: f64) -> Result<Gains> {
    pole_place_pair(m, PolePair::Real(lambda1, lambda2))
}

/// Pole placement for a real or complex-conjugate pair.
///
/// With `B = (−1, 0)` the closed loop is `[[A11 + k1, A12 + k2], [A21, A22]]`,
/// so matching its trace and determinant to the requested pair gives
/// `k1 = λ1 + λ2 − 2·A11` and `k2 = (k1·A11 − λ1·λ2 + 1) / A21`.
pub fn pole_place_pair(m: &StepMatrices, poles: PolePair) -> Result<Gains> {
    poles.validate()?;
    require_controllable(m)?;
    let a11 = m.a11();
    let k1 = poles.sum() - 2.0 * a11;
    let k2 = (k1 * a11 - poles.product() + 1.0) / m.a21();
    Ok(Gains::from_k(m, k1, k2))
}

/// Infinity norm of `AᵀPA − AᵀPB(R + BᵀPB)⁻¹BᵀPA − P + Q`.
pub fn dare_defect(m: &StepMatrices, w: &LqrWeights, p: Mat2) -> f64 {
    (riccati_step(m, w, p) - p).norm_inf()
}

fn riccati_step(m: &StepMatrices, w: &LqrWeights, p: Mat2) -> Mat2 {
    let at = m.a.transpose();
    let pb = p * m.b;
    let atpb = at * pb;
    let denom = w.r + m.b.dot(pb);
    at * p * m.a - atpb.outer(atpb).scale(1.0 / denom) + w.q
}

/// Solves the Riccati equation by value iteration from `P₀ = Q`.
///
/// Stops once successive iterates differ by at most 1e-12 (or by rounding
/// noise, when `P` is large enough that 1e-12 is below it).
pub fn solve_dare(m: &StepMatrices, w: &LqrWeights) -> Result<DareSolution> {
    require_controllable(m)?;
    let mut p = w.q;
    for iteration in 1..=DARE_MAX_ITERATIONS {
        let next = riccati_step(m, w, p).symmetrize();
        if !next.is_finite() {
            return Err(GaitError::SolverFailure {
                iterations: iteration,
                residual: f64::INFINITY,
            });
        }
        let change = (next - p).max_abs();
        p = next;
        if change <= DARE_TOLERANCE.max(DARE_ROUNDING_ULPS * f64::EPSILON * p.max_abs()) {
            return Ok(DareSolution {
                p,
                iterations: iteration,
                residual: dare_defect(m, w, p),
            });
        }
    }
    Err(GaitError::SolverFailure {
        iterations: DARE_MAX_ITERATIONS,
        residual: dare_defect(m, w, p),
    })
}

/// `K = (R + BᵀPB)⁻¹·BᵀPA` for a solved Riccati equation.
pub fn gains_from_dare(m: &StepMatrices, w: &LqrWeights, dare: &DareSolution) -> Gains {
    let pb = dare.p * m.b;
    let k = (m.a.transpose() * pb).scale(1.0 / (w.r + m.b.dot(pb)));
    Gains::from_k(m, k.0[0], k.0[1])
}

/// LQR gains minimizing `Σ eᵀQe + R·u²`.
pub fn lqr_gains(m: &StepMatrices, w: &LqrWeights) -> Result<Gains> {
    let dare = solve_dare(m, w)?;
    Ok(gains_from_dare(m, w, &dare))
}

/// Step-length correction `u = −(k1·e_x + k2·e_ẋ)`.
pub fn control(gains: &Gains, e: StepError) -> f64 {
    -(gains.k1 * e.x() + gains.k2 * e.xdot())
}

/// Step length actually taken after clamping to `[0, L_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturatedStep {
    pub length: f64,
    pub clamped: bool,
}

pub fn saturate_step(cycle: &GaitCycle, params: &WalkerParams, u: f64) -> SaturatedStep {
    let commanded = cycle.step_length + u;
    let length = commanded.clamp(0.0, params.max_step_length());
    SaturatedStep {
        length,
        clamped: length != commanded,
    }
}

/// Cost `Σ_{i<horizon} eᵢᵀQeᵢ + R·uᵢ²` of the unsaturated closed loop from `e0`.
pub fn finite_horizon_cost(
    m: &StepMatrices,
    w: &LqrWeights,
    gains: &Gains,
    e0: Vec2,
    horizon: usize,
) -> Result<f64> {
    ensure_finite("initial error", &e0.0)?;
    let mut e = e0;
    let mut cost = 0.0;
    for _ in 0..horizon {
        let u = -gains.k().dot(e);
        cost += e.dot(w.q * e) + w.r * u * u;
        e = m.a * e + m.b.scale(u);
    }
    Ok(cost)
}
