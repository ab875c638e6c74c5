//! Batch evaluation over many independent runs.
//!
//! With the `parallel` feature (on by default) the batch entry points fan
//! out over rayon's global pool; without it they run sequentially. Both
//! paths return results in input order and are bit-identical, since every
//! item is a pure function of its inputs.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;
use crate::linalg::{Mat2, Vec2};
use crate::lipm::WalkerParams;
use crate::sim::{simulate, SimConfig, SimTrace};
use crate::stabilizer::{finite_horizon_cost, gains_from_dare, solve_dare, DareSolution, Gains, LqrWeights};
use crate::step_map::{build_step_matrices, GaitCycle, StepMatrices};

pub fn map_sequential<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_parallel<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Maps `f` over `items`, in parallel when the `parallel` feature is enabled.
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_parallel(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_sequential(items, f)
    }
}

/// Everything [`simulate`] needs for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: WalkerParams,
    pub cycle: GaitCycle,
    pub gains: Gains,
    pub config: SimConfig,
}

impl Scenario {
    pub fn run(&self) -> Result<SimTrace> {
        simulate(&self.params, &self.cycle, &self.gains, &self.config)
    }
}

pub fn simulate_batch(scenarios: &[Scenario]) -> Vec<Result<SimTrace>> {
    map(scenarios, Scenario::run)
}

pub fn simulate_batch_sequential(scenarios: &[Scenario]) -> Vec<Result<SimTrace>> {
    map_sequential(scenarios, Scenario::run)
}

#[cfg(feature = "parallel")]
pub fn simulate_batch_parallel(scenarios: &[Scenario]) -> Vec<Result<SimTrace>> {
    map_parallel(scenarios, Scenario::run)
}

/// One LQR design and its closed-loop run for a given input weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightRun {
    pub r: f64,
    pub dare: DareSolution,
    pub gains: Gains,
    pub trace: SimTrace,
}

/// Designs an LQR controller for every `R` in `input_weights` (same `Q`) and
/// simulates each on the same scenario.
pub fn lqr_weight_sweep(
    params: &WalkerParams,
    cycle: &GaitCycle,
    state_weight: Mat2,
    input_weights: &[f64],
    config: &SimConfig,
) -> Result<Vec<WeightRun>> {
    let m = build_step_matrices(params, cycle.step_time)?;
    map(input_weights, |&r| {
        let w = LqrWeights::new(state_weight, r)?;
        let dare = solve_dare(&m, &w)?;
        let gains = gains_from_dare(&m, &w, &dare);
        let trace = simulate(params, cycle, &gains, config)?;
        Ok(WeightRun { r, dare, gains, trace })
    })
    .into_iter()
    .collect()
}

/// Finite-horizon closed-loop cost of each candidate gain from the same `e0`.
pub fn horizon_costs(
    m: &StepMatrices,
    w: &LqrWeights,
    candidates: &[Gains],
    e0: Vec2,
    horizon: usize,
) -> Result<Vec<f64>> {
    map(candidates, |g| finite_horizon_cost(m, w, g, e0, horizon))
        .into_iter()
        .collect()
}
