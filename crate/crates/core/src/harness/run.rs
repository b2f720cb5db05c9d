use crate::diagnostics::{
    check_step, diagnose, sesav2_practical_tau, summarize, RunSummary, StepDiagnostics,
    Tolerances, Violation,
};
use crate::error::Result;
use crate::grid::norm_inf;
use crate::potential::{c0_of, Potential};
use crate::schemes::{Family, Integrator, SchemeId, SchemeParams, SchemeState};

use super::config::RunConfig;
use super::initial::build_initial;
use super::io::{write_csv, write_snapshot};

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub rows: Vec<StepDiagnostics>,
    pub summary: RunSummary,
    pub violations: Vec<Violation>,
    pub final_state: SchemeState,
    pub model: Potential,
    pub params: SchemeParams,
    pub warnings: Vec<String>,
}

impl RunOutput {
    pub fn energy_violations(&self) -> usize {
        self.violations.iter().filter(|v| v.is_energy()).count()
    }

    pub fn guaranteed_bound_violations(&self) -> usize {
        self.violations.iter().filter(|v| v.is_guaranteed_bound()).count()
    }

    pub fn diverged(&self) -> bool {
        self.summary.diverged_at.is_some()
    }

    pub fn mbp_violated(&self) -> bool {
        self.summary.first_mbp_violation_step.is_some()
    }

    pub fn last_row(&self) -> &StepDiagnostics {
        self.rows.last().expect("a run records at least its initial row")
    }
}

/// Resolves model and scheme parameters from a config.
pub(crate) fn resolve(config: &RunConfig) -> Result<(Potential, SchemeParams)> {
    config.validate()?;
    let model = config.model()?;
    let kappa = config.kappa.resolve(&model);
    let mut params = SchemeParams::new(config.scheme, config.eps, kappa, config.tau)?;
    if config.scheme.family() == Family::Sav {
        let area = config.length * config.length;
        params = params.with_delta(c0_of(&model, kappa)? * area + config.delta_offset);
    }
    Ok((model, params))
}

/// Runs one configuration, writing the configured outputs.
///
/// Divergence is not an error: the state freezes and later rows carry
/// `diverged = true`.
pub fn run_simulation(config: &RunConfig) -> Result<RunOutput> {
    let (model, params) = resolve(config)?;
    let grid = config.grid()?;
    let h = grid.spacing();
    let mut warnings = Vec::new();
    if params.scheme == SchemeId::Sesav2 && params.tau > sesav2_practical_tau(&params, h) {
        warnings.push(format!(
            "tau = {} exceeds the sESAV2 bound-preserving step (kappa/2 + eps^2/h^2)^-1 = {}",
            params.tau,
            sesav2_practical_tau(&params, h)
        ));
    }

    let mut integrator = Integrator::new(model, params, grid)?;
    let u0 = build_initial(&config.initial, grid, config.seed)?;
    let mut state = integrator.init(u0)?;
    let first = diagnose(&model, &params, &state, config.mbp_tol);
    let scale = first.modified_energy.abs();
    let tol = Tolerances {
        mbp: config.mbp_tol,
        energy_rel: config.energy_rel_tol,
        energy_scale: if scale > 0.0 && scale.is_finite() { scale } else { 1.0 },
    };

    let output = &config.output;
    let snapshot_path = |step: usize| {
        output
            .snapshot_dir
            .as_ref()
            .map(|d| d.join(format!("snap_{step:08}.acfd")))
    };
    if output.snapshot_stride > 0 {
        if let Some(p) = snapshot_path(0) {
            write_snapshot(&p, &state.u, 0.0)?;
        }
    }

    let n_steps = config.steps();
    let mut max_sup = first.sup_norm;
    let mut first_violation = (!first.mbp_ok).then_some(0);
    let mut rows = vec![first];
    let mut violations = Vec::new();
    let mut steady = None;

    for k in 1..=n_steps {
        let was_diverged = state.diverged;
        state = integrator.step(&state);
        if !state.diverged {
            let sup = norm_inf(&state.u);
            max_sup = max_sup.max(sup);
            if first_violation.is_none() && !(sup <= model.beta() + config.mbp_tol) {
                first_violation = Some(k);
            }
        }
        let newly_diverged = state.diverged && !was_diverged;
        if k % config.stride == 0 || k == n_steps || newly_diverged {
            let row = diagnose(&model, &params, &state, config.mbp_tol);
            let prev = rows.last().expect("initial row");
            violations.extend(check_step(&model, &params, h, prev, &row, &tol));
            let energy_jump = (row.original_energy - prev.original_energy).abs();
            rows.push(row);
            if let Some(steady_tol) = config.steady_tol {
                if !state.diverged && energy_jump < steady_tol {
                    steady = Some(k as f64 * params.tau);
                    break;
                }
            }
        }
        if output.snapshot_stride > 0 && k % output.snapshot_stride == 0 {
            if let Some(p) = snapshot_path(k) {
                write_snapshot(&p, &state.u, k as f64 * params.tau)?;
            }
        }
    }

    let mut summary = summarize(&rows, steady);
    summary.max_sup_norm = summary.max_sup_norm.max(max_sup);
    summary.first_mbp_violation_step = match (summary.first_mbp_violation_step, first_violation) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };

    if let Some(path) = &output.csv {
        write_csv(path, &rows)?;
    }
    if let Some(dir) = &output.snapshot_dir {
        write_snapshot(
            &dir.join("final.acfd"),
            &state.u,
            state.step_index as f64 * params.tau,
        )?;
    }

    Ok(RunOutput {
        rows,
        summary,
        violations,
        final_state: state,
        model,
        params,
        warnings,
    })
}
