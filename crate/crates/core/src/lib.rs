//! Limit-cycle walking on the linear inverted pendulum.
//!
//! The crate models the horizontal COM motion of a planar biped as a
//! linear inverted pendulum, reduces walking to a linear map between the
//! initial states of consecutive steps, and stabilizes the resulting
//! (open-loop unstable) limit cycle by adjusting the length of each step.
//!
//! * [`lipm`]: single-support dynamics, exact flows, ground reaction forces.
//! * [`step_map`]: the step-to-step map, its fixed point and spectrum.
//! * [`stabilizer`]: pole placement, discrete LQR and step saturation.
//! * [`sim`]: the hybrid closed-loop simulator.
//! * [`batch`]: data-parallel sweeps over many runs or gain candidates.

pub mod batch;
pub mod error;
pub mod linalg;
pub mod lipm;
pub mod sim;
pub mod stabilizer;
pub mod step_map;

pub use error::{GaitError, Result};
pub use linalg::{Mat2, Vec2};
pub use lipm::{flow, flow_forced, grf, orbital_energy, GaitState, GrfSample, WalkerParams};
pub use sim::{
    phase_portrait, simulate, step_sequence_errors, steps_to_convergence, Disturbance,
    DisturbanceModel, PhasePortrait, Sample, SimConfig, SimTrace, StepRecord,
};
pub use stabilizer::{
    control, lqr_gains, pole_place, pole_place_pair, saturate_step, solve_dare, DareSolution,
    Gains, LqrWeights, PolePair, SaturatedStep,
};
pub use step_map::{
    apply_step, build_step_matrices, design_cycle, is_controllable, open_loop_eigenvalues,
    GaitCycle, StepError, StepMatrices,
};
