use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{norm2, Field};
use crate::schemes::SchemeId;

use super::config::{KappaSpec, OutputSpec, RunConfig};
use super::run::{run_simulation, RunOutput};

/// Distance from `+-beta` accepted for a converged coarsening state.
pub const BOUND_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub tau: f64,
    /// Discrete L2 distance to the benchmark at the final time.
    pub l2_error: f64,
    /// `ln(e_prev / e) / ln(tau_prev / tau)`; `None` for the first row.
    pub observed_order: Option<f64>,
}

fn total_time(base: &RunConfig) -> f64 {
    base.t_end
        .unwrap_or_else(|| base.n_steps.unwrap_or(0) as f64 * base.tau)
}

fn with_step(base: &RunConfig, scheme: SchemeId, tau: f64, t_end: f64) -> Result<RunConfig> {
    let n = (t_end / tau).round();
    if (n * tau - t_end).abs() > 1e-9 * t_end.max(1.0) {
        return Err(Error::Config(format!(
            "T = {t_end} is not a whole number of steps of tau = {tau}"
        )));
    }
    let mut cfg = base.clone();
    cfg.scheme = scheme;
    cfg.tau = tau;
    cfg.t_end = None;
    cfg.n_steps = Some(n as usize);
    cfg.stride = (n as usize).max(1);
    cfg.steady_tol = None;
    cfg.output = OutputSpec::default();
    Ok(cfg)
}

/// Runs a configuration and returns its final field; divergence is an error.
pub fn final_field(config: &RunConfig) -> Result<Field> {
    let out = run_simulation(config)?;
    if let Some(step) = out.summary.diverged_at {
        return Err(Error::Diverged { step });
    }
    Ok(out.final_state.u)
}

/// Observed orders from consecutive `(tau, error)` pairs.
pub fn observed_orders(taus: &[f64], errors: &[f64]) -> Vec<Option<f64>> {
    (0..taus.len())
        .map(|k| {
            (k > 0).then(|| (errors[k - 1] / errors[k]).ln() / (taus[k - 1] / taus[k]).ln())
        })
        .collect()
}

/// Temporal convergence of `base.scheme` against a fine-step sESAV2
/// benchmark at the final time.
pub fn convergence_study(
    base: &RunConfig,
    taus: &[f64],
    benchmark_tau: f64,
) -> Result<Vec<ConvergenceRecord>> {
    let mut all = convergence_study_schemes(base, &[base.scheme], taus, benchmark_tau)?;
    Ok(all.pop().map(|(_, r)| r).unwrap_or_default())
}

/// Same as [`convergence_study`] for several schemes sharing one benchmark.
pub fn convergence_study_schemes(
    base: &RunConfig,
    schemes: &[SchemeId],
    taus: &[f64],
    benchmark_tau: f64,
) -> Result<Vec<(SchemeId, Vec<ConvergenceRecord>)>> {
    let min_tau = taus.iter().cloned().fold(f64::INFINITY, f64::min);
    if taus.is_empty() || !(benchmark_tau < min_tau) {
        return Err(Error::Config(format!(
            "benchmark tau {benchmark_tau} must be below every study tau (min {min_tau})"
        )));
    }
    let t_end = total_time(base);
    let mut configs = vec![with_step(base, SchemeId::Sesav2, benchmark_tau, t_end)?];
    for &scheme in schemes {
        for &tau in taus {
            configs.push(with_step(base, scheme, tau, t_end)?);
        }
    }
    let fields = configs
        .par_iter()
        .map(final_field)
        .collect::<Result<Vec<_>>>()?;
    let bench = &fields[0];
    Ok(schemes
        .iter()
        .enumerate()
        .map(|(s, &scheme)| {
            let errors: Vec<f64> = fields[1 + s * taus.len()..1 + (s + 1) * taus.len()]
                .iter()
                .map(|u| norm2(&u.zip_map(bench, |a, b| a - b)))
                .collect();
            let orders = observed_orders(taus, &errors);
            let records = taus
                .iter()
                .zip(errors)
                .zip(orders)
                .map(|((&tau, l2_error), observed_order)| ConvergenceRecord {
                    tau,
                    l2_error,
                    observed_order,
                })
                .collect();
            (scheme, records)
        })
        .collect())
}

/// One cell of a scheme comparison.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub scheme: SchemeId,
    pub kappa: f64,
    pub output: RunOutput,
}

impl ComparisonRow {
    pub fn max_sup_norm(&self) -> f64 {
        self.output.summary.max_sup_norm
    }

    pub fn mbp_violated(&self) -> bool {
        self.output.mbp_violated()
    }

    pub fn energy_violations(&self) -> usize {
        self.output.energy_violations()
    }

    pub fn diverged(&self) -> bool {
        self.output.diverged()
    }

    pub fn series_name(&self) -> String {
        format!("{}_kappa{}.csv", self.scheme, self.kappa)
    }
}

/// One run per `(kappa, scheme)`, kappas outer. Series CSVs go to
/// `series_dir` when given.
pub fn comparison_study(
    base: &RunConfig,
    schemes: &[SchemeId],
    kappas: &[KappaSpec],
    series_dir: Option<&Path>,
) -> Result<Vec<ComparisonRow>> {
    let model = base.model()?;
    let cells: Vec<(SchemeId, KappaSpec)> = kappas
        .iter()
        .flat_map(|&k| schemes.iter().map(move |&s| (s, k)))
        .collect();
    cells
        .par_iter()
        .map(|&(scheme, kappa)| {
            let mut cfg = base.clone();
            cfg.scheme = scheme;
            cfg.kappa = kappa;
            cfg.steady_tol = None;
            cfg.output = OutputSpec::default();
            let mut row = ComparisonRow {
                scheme,
                kappa: kappa.resolve(&model),
                output: run_simulation(&cfg)?,
            };
            if let Some(dir) = series_dir {
                super::io::write_csv(&dir.join(row.series_name()), &row.output.rows)?;
            }
            row.output.rows.shrink_to_fit();
            Ok(row)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct CoarseningResult {
    pub output: RunOutput,
    pub steady_time: Option<f64>,
    pub final_field: Field,
    /// Value of the final field if it is constant within [`BOUND_TOL`].
    pub constant_state: Option<f64>,
    /// Steady state reached with the field constant at `+-beta` within [`BOUND_TOL`].
    pub reached_bound: bool,
}

/// Long run that stops once the energy settles.
pub fn coarsening_study(config: &RunConfig) -> Result<CoarseningResult> {
    if config.steady_tol.is_none() {
        return Err(Error::Config("coarsening needs steady_tol".into()));
    }
    let output = run_simulation(config)?;
    let beta = output.model.beta();
    let final_field = output.final_state.u.clone();
    let constant_state = final_field.constant_value(BOUND_TOL);
    let steady_time = output.summary.steady_state_time;
    let reached_bound = steady_time.is_some()
        && constant_state.is_some_and(|c| (c.abs() - beta).abs() <= BOUND_TOL);
    Ok(CoarseningResult {
        output,
        steady_time,
        final_field,
        constant_state,
        reached_bound,
    })
}
