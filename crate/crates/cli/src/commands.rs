//! The four subcommands. Each returns a human-readable report plus the
//! files it would write; [`write_outputs`] puts them on disk.

use std::path::Path;

use lipm_gait::sim::convergence_step;
use lipm_gait::stabilizer::gains_from_dare;
use lipm_gait::{
    is_controllable, open_loop_eigenvalues, pole_place_pair, simulate, solve_dare, DareSolution,
    Gains, LqrWeights, StepMatrices,
};
use serde_json::json;

use crate::config::{ControllerSpec, Format, Scenario};
use crate::error::{CliError, Result};
use crate::figures::{self, FIG_COM, FIG_PHASE, FIG_STEPS};
use crate::output::{self, StepRow, TraceRow, STEPS_FILE, TRACE_FILE};

/// Error norm below which a run counts as back on the limit cycle.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub report: String,
    pub files: Vec<(String, String)>,
}

pub fn write_outputs(dir: &Path, files: &[(String, String)]) -> Result<()> {
    if files.is_empty() {
        return Ok(());
    }
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("cannot create {}", dir.display()), e))?;
    for (name, contents) in files {
        output::write_file(&dir.join(name), contents)?;
    }
    Ok(())
}

/// Feedback gains for a scenario, with the Riccati solution for LQR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Design {
    pub gains: Gains,
    pub dare: Option<DareSolution>,
}

pub fn design_for(m: &StepMatrices, spec: &ControllerSpec) -> Result<Design> {
    match spec {
        ControllerSpec::None => Ok(Design { gains: Gains::zero(m), dare: None }),
        ControllerSpec::PolePlace(pair) => Ok(Design { gains: pole_place_pair(m, *pair)?, dare: None }),
        ControllerSpec::Lqr { weights, .. } => lqr_design(m, weights),
    }
}

fn lqr_design(m: &StepMatrices, w: &LqrWeights) -> Result<Design> {
    let dare = solve_dare(m, w)?;
    Ok(Design { gains: gains_from_dare(m, w, &dare), dare: Some(dare) })
}

/// Four decimals, without a sign on values that round to zero.
fn fixed4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn complex(re: f64, im: f64) -> String {
    if im == 0.0 {
        fixed4(re)
    } else {
        format!("{} {} {:.4}i", fixed4(re), if im < 0.0 { '-' } else { '+' }, im.abs())
    }
}

pub fn limit_cycle(scn: &Scenario) -> Result<Outcome> {
    let c = &scn.cycle;
    let (l1, l2) = open_loop_eigenvalues(&scn.matrices);
    let ctrl = is_controllable(&scn.matrices);
    let report = format!(
        "limit cycle\n\
         \x20 L_c          {:.4} m\n\
         \x20 T_c          {:.4} s\n\
         \x20 omega        {:.4} 1/s\n\
         \x20 x_c          ({:.4}, {:.4})\n\
         \x20 eigenvalues  {:.4}, {:.4}\n\
         \x20 controllable {} (det = {:.4})\n",
        c.step_length,
        c.step_time,
        scn.params.omega(),
        c.start.x,
        c.start.xdot,
        l1,
        l2,
        if ctrl.controllable { "yes" } else { "no" },
        ctrl.det,
    );
    let mut files = Vec::new();
    if scn.formats.contains(&Format::Csv) {
        let csv = format!(
            "step_length,step_time,omega,x0,xdot0,lambda1,lambda2\n{},{},{},{},{},{},{}\n",
            c.step_length,
            c.step_time,
            scn.params.omega(),
            c.start.x,
            c.start.xdot,
            l1,
            l2
        );
        files.push(("limit_cycle.csv".into(), csv));
    }
    Ok(Outcome { report, files })
}

fn gains_json(d: &Design, r: Option<f64>) -> serde_json::Value {
    let mut v = json!({
        "k1": d.gains.k1,
        "k2": d.gains.k2,
        "lambda1_re": d.gains.poles[0].re,
        "lambda1_im": d.gains.poles[0].im,
        "lambda2_re": d.gains.poles[1].re,
        "lambda2_im": d.gains.poles[1].im,
        "spectral_radius": d.gains.spectral_radius(),
    });
    if let Some(dare) = &d.dare {
        v["dare_iterations"] = json!(dare.iterations);
        v["dare_residual"] = json!(dare.residual);
        v["p"] = json!(dare.p.0);
    }
    if let Some(r) = r {
        v["r"] = json!(r);
    }
    v
}

fn gains_lines(d: &Design) -> String {
    let g = &d.gains;
    let mut s = format!(
        "  k1               {}\n  k2               {}\n  eigenvalues      {}, {}\n  spectral radius  {:.4}\n",
        fixed4(g.k1),
        fixed4(g.k2),
        complex(g.poles[0].re, g.poles[0].im),
        complex(g.poles[1].re, g.poles[1].im),
        g.spectral_radius()
    );
    if let Some(dare) = &d.dare {
        s += &format!(
            "  riccati          {} iterations, residual {:.3e}\n",
            dare.iterations, dare.residual
        );
    }
    s
}

pub fn design_gains(scn: &Scenario) -> Result<Outcome> {
    let d = design_for(&scn.matrices, &scn.controller)?;
    let mut report = format!("controller: {}\n{}", scn.controller.describe(), gains_lines(&d));
    let mut doc = gains_json(&d, None);
    doc["controller"] = json!(match scn.controller {
        ControllerSpec::None => "none",
        ControllerSpec::PolePlace(_) => "pole-place",
        ControllerSpec::Lqr { .. } => "lqr",
    });
    if let ControllerSpec::Lqr { compare, .. } = &scn.controller {
        let mut runs = Vec::new();
        for w in compare {
            let d = lqr_design(&scn.matrices, w)?;
            report += &format!("R = {}\n{}", w.r(), gains_lines(&d));
            runs.push(gains_json(&d, Some(w.r())));
        }
        if !runs.is_empty() {
            doc["compare"] = json!(runs);
        }
    }
    let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::io("cannot encode gains", e))?;
    Ok(Outcome { report, files: vec![("gains.json".into(), text + "\n")] })
}

/// Figures and summary of a results directory, computed from CSV text only.
fn render(
    trace_csv: &str,
    steps_csv: &str,
    weight_runs: &[(f64, String)],
    formats: &[Format],
) -> Result<Outcome> {
    let trace = output::parse_trace(trace_csv)?;
    let steps = output::parse_steps(steps_csv)?;
    let mut series = Vec::new();
    for (r, text) in weight_runs {
        series.push((format!("R = {r}"), output::parse_steps(text)?));
    }
    let mut report = summarize("run", &steps);
    for (label, rows) in &series {
        report += &summarize(label, rows);
    }
    let mut files = Vec::new();
    if formats.contains(&Format::Svg) {
        if series.is_empty() {
            series.push(("applied".into(), steps.clone()));
        }
        files.push((FIG_COM.into(), figures::com_figure(&trace, &steps)));
        files.push((FIG_PHASE.into(), figures::phase_figure(&trace, &steps)));
        files.push((FIG_STEPS.into(), figures::step_length_figure(&series)));
    }
    Ok(Outcome { report, files })
}

/// Steps after the last pushed step until the error stays below
/// [`CONVERGENCE_THRESHOLD`].
pub fn settling_steps(rows: &[StepRow]) -> Option<usize> {
    let after = rows.iter().filter(|r| r.pushed).map(|r| r.index).max().unwrap_or(0);
    let records: Vec<_> = rows.iter().map(StepRow::to_record).collect();
    convergence_step(&records, after, CONVERGENCE_THRESHOLD).map(|i| i - after)
}

/// Largest deviation of the applied step length from the final one.
pub fn max_step_deviation(rows: &[StepRow]) -> f64 {
    let Some(last) = rows.last() else { return 0.0 };
    rows.iter().map(|r| (r.l_applied - last.l_applied).abs()).fold(0.0, f64::max)
}

fn summarize(label: &str, rows: &[StepRow]) -> String {
    let settle = match settling_steps(rows) {
        Some(n) => n.to_string(),
        None => "not settled".into(),
    };
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.l_applied), hi.max(r.l_applied)));
    format!(
        "{label}\n\
         \x20 steps              {} ({} pushed, {} clamped)\n\
         \x20 step length        [{:.4}, {:.4}] m, max deviation {:.4} m\n\
         \x20 final error        {:.4}\n\
         \x20 steps to converge  {settle}\n",
        rows.len(),
        rows.iter().filter(|r| r.pushed).count(),
        rows.iter().filter(|r| r.clamped).count(),
        lo,
        hi,
        max_step_deviation(rows),
        rows.last().map_or(0.0, |r| r.error_norm),
    )
}

pub fn simulate_scenario(scn: &Scenario) -> Result<Outcome> {
    let d = design_for(&scn.matrices, &scn.controller)?;
    let trace = simulate(&scn.params, &scn.cycle, &d.gains, &scn.sim)?;
    let trace_csv = output::trace_csv(&trace)?;
    let steps_csv = output::steps_csv(&trace)?;
    let mut weight_runs = Vec::new();
    if let ControllerSpec::Lqr { compare, .. } = &scn.controller {
        for w in compare {
            let d = lqr_design(&scn.matrices, w)?;
            let tr = simulate(&scn.params, &scn.cycle, &d.gains, &scn.sim)?;
            weight_runs.push((w.r(), output::steps_csv(&tr)?));
        }
    }
    let rendered = render(&trace_csv, &steps_csv, &weight_runs, &scn.formats)?;
    let mut files = Vec::new();
    if scn.formats.contains(&Format::Csv) {
        files.push((TRACE_FILE.into(), trace_csv));
        files.push((STEPS_FILE.into(), steps_csv));
        for (r, text) in weight_runs {
            files.push((output::weight_steps_file(r), text));
        }
    }
    files.extend(rendered.files);
    let report = format!(
        "controller: {}\n{}{}",
        scn.controller.describe(),
        gains_lines(&d),
        rendered.report
    );
    Ok(Outcome { report, files })
}

/// Re-reads the CSV files in `dir` and regenerates the figures and summary.
pub fn analyze(dir: &Path) -> Result<Outcome> {
    let trace = output::read_file(&dir.join(TRACE_FILE))?;
    let steps = output::read_file(&dir.join(STEPS_FILE))?;
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(format!("cannot read {}", dir.display()), e))?;
    let mut weight_runs = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| CliError::io(format!("cannot read {}", dir.display()), e))?;
        let name = entry.file_name();
        if let Some(r) = name.to_str().and_then(output::weight_from_file_name) {
            weight_runs.push((r, output::read_file(&entry.path())?));
        }
    }
    weight_runs.sort_by(|a, b| a.0.total_cmp(&b.0));
    render(&trace, &steps, &weight_runs, &[Format::Csv, Format::Svg])
}

/// Trace rows parsed back from a `trace.csv` produced by `simulate`.
pub fn load_trace(dir: &Path) -> Result<Vec<TraceRow>> {
    output::parse_trace(&output::read_file(&dir.join(TRACE_FILE))?)
}

pub fn load_steps(dir: &Path) -> Result<Vec<StepRow>> {
    output::parse_steps(&output::read_file(&dir.join(STEPS_FILE))?)
}
