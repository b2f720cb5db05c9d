//! Energies, bound monitoring, dissipation checks and steady-state detection.

use crate::grid::{grad_norm_sq, norm2, norm_inf, Field};
use crate::potential::Potential;
use crate::schemes::{g_value, Family, SchemeId, SchemeParams, SchemeState};

/// One recorded moment of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    pub time: f64,
    pub sup_norm: f64,
    /// `E_h(u)`.
    pub original_energy: f64,
    /// The scheme's own Lyapunov functional.
    pub modified_energy: f64,
    pub aux: f64,
    /// `g(u, s)` for sESAV, `r / exp(E_2h(u))` for ESAV, `None` for SAV.
    pub g: Option<f64>,
    pub mbp_ok: bool,
    pub diverged: bool,
    /// Nonlinear coefficient used by the step that produced this row
    /// (the predictor `g` for sESAV2). Not serialized.
    pub step_coefficient: Option<f64>,
}

/// Aggregates over one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub g_min: Option<f64>,
    pub g_max: Option<f64>,
    pub max_sup_norm: f64,
    pub first_mbp_violation_step: Option<usize>,
    /// Largest positive jump of the modified energy between consecutive
    /// recorded rows; zero if it never increases.
    pub max_energy_increase: f64,
    pub steady_state_time: Option<f64>,
    pub diverged_at: Option<usize>,
}

/// Thresholds used by [`check_step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute headroom above `beta`.
    pub mbp: f64,
    /// Energy increase allowed per step, relative to `energy_scale`.
    pub energy_rel: f64,
    /// Magnitude of the initial modified energy.
    pub energy_scale: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            mbp: 1e-12,
            energy_rel: 1e-10,
            energy_scale: 1.0,
        }
    }
}

impl Tolerances {
    pub fn energy_abs(&self) -> f64 {
        self.energy_rel * self.energy_scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ViolationKind {
    /// Modified energy grew by more than the tolerance.
    EnergyIncrease { amount: f64 },
    /// `sup_norm > beta + tol`. `guaranteed` is set when the scheme, `kappa`
    /// and `tau` carry a theoretical bound, i.e. this is a real failure
    /// rather than expected baseline behavior.
    BoundExceeded { sup_norm: f64, guaranteed: bool },
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub step: usize,
    pub kind: ViolationKind,
}

impl Violation {
    pub fn is_energy(&self) -> bool {
        matches!(self.kind, ViolationKind::EnergyIncrease { .. })
    }

    pub fn is_guaranteed_bound(&self) -> bool {
        matches!(self.kind, ViolationKind::BoundExceeded { guaranteed: true, .. })
    }
}

/// `E_h(u) = eps^2/2 ||grad_h u||^2 + <F(u), 1>`.
pub fn original_energy(model: &Potential, params: &SchemeParams, u: &Field) -> f64 {
    0.5 * params.eps2() * grad_norm_sq(u) + model.e1h(u)
}

pub fn modified_energy(
    scheme: SchemeId,
    params: &SchemeParams,
    state: &SchemeState,
) -> f64 {
    let u = &state.u;
    let gradient_part = 0.5 * params.eps2() * grad_norm_sq(u);
    match scheme.family() {
        Family::Sesav => gradient_part + state.aux,
        Family::Sav => {
            let n = norm2(u);
            gradient_part + 0.5 * params.kappa * n * n + state.aux * state.aux - params.delta
        }
        Family::Esav => {
            let n = norm2(u);
            gradient_part + 0.5 * params.kappa * n * n + state.aux
        }
    }
}

/// Whether the step that produced `cur` is covered by a bound-preservation
/// guarantee, given that its input satisfied the bound.
///
/// sESAV1 needs `1/(tau g) + kappa >= ||f'||`, which `kappa >= ||f'||` implies.
/// sESAV2 needs `kappa >= ||f'||` and `tau <= (kappa g_hat / 2 + eps^2/h^2)^-1`
/// with the observed predictor coefficient `g_hat`.
pub fn bound_guaranteed(
    model: &Potential,
    params: &SchemeParams,
    spacing: f64,
    step_coefficient: Option<f64>,
) -> bool {
    let lip = model.lipschitz();
    match params.scheme {
        SchemeId::Sesav1 => {
            params.kappa >= lip
                || step_coefficient.is_some_and(|g| 1.0 / (params.tau * g) + params.kappa >= lip)
        }
        SchemeId::Sesav2 => {
            params.kappa >= lip
                && step_coefficient.is_some_and(|g| {
                    params.tau <= 1.0 / (0.5 * params.kappa * g + params.eps2() / (spacing * spacing))
                })
        }
        _ => false,
    }
}

/// Practical sESAV2 step bound `(kappa/2 + eps^2/h^2)^-1`.
pub fn sesav2_practical_tau(params: &SchemeParams, spacing: f64) -> f64 {
    1.0 / (0.5 * params.kappa + params.eps2() / (spacing * spacing))
}

pub fn diagnose(
    model: &Potential,
    params: &SchemeParams,
    state: &SchemeState,
    mbp_tol: f64,
) -> StepDiagnostics {
    let u = &state.u;
    let sup_norm = norm_inf(u);
    let g = match params.scheme.family() {
        Family::Sesav => Some(g_value(model, u, state.aux)),
        Family::Esav => Some((state.aux - model.e2h(u, params.kappa)).exp()),
        Family::Sav => None,
    };
    StepDiagnostics {
        step: state.step_index,
        time: state.step_index as f64 * params.tau,
        sup_norm,
        original_energy: original_energy(model, params, u),
        modified_energy: modified_energy(params.scheme, params, state),
        aux: state.aux,
        g,
        mbp_ok: sup_norm <= model.beta() + mbp_tol,
        diverged: state.diverged,
        step_coefficient: state.coefficient,
    }
}

/// Compares two consecutive rows of one run.
pub fn check_step(
    model: &Potential,
    params: &SchemeParams,
    spacing: f64,
    prev: &StepDiagnostics,
    cur: &StepDiagnostics,
    tol: &Tolerances,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let finite = cur.sup_norm.is_finite() && cur.modified_energy.is_finite() && cur.aux.is_finite();
    if cur.diverged || !finite {
        // A diverging step is reported once.
        if !prev.diverged {
            out.push(Violation {
                step: cur.step,
                kind: ViolationKind::NonFinite,
            });
        }
        return out;
    }
    let increase = cur.modified_energy - prev.modified_energy;
    if increase > tol.energy_abs() {
        out.push(Violation {
            step: cur.step,
            kind: ViolationKind::EnergyIncrease { amount: increase },
        });
    }
    if !cur.mbp_ok {
        let guaranteed =
            prev.mbp_ok && bound_guaranteed(model, params, spacing, cur.step_coefficient);
        out.push(Violation {
            step: cur.step,
            kind: ViolationKind::BoundExceeded {
                sup_norm: cur.sup_norm,
                guaranteed,
            },
        });
    }
    out
}

/// First recorded time `t_{k+1}` with `|E_h(t_{k+1}) - E_h(t_k)| < tol`.
pub fn detect_steady(series: &[StepDiagnostics], tol: f64) -> Option<f64> {
    series
        .windows(2)
        .find(|w| (w[1].original_energy - w[0].original_energy).abs() < tol)
        .map(|w| w[1].time)
}

/// Summary over recorded rows.
pub fn summarize(series: &[StepDiagnostics], steady_state_time: Option<f64>) -> RunSummary {
    let mut summary = RunSummary {
        g_min: None,
        g_max: None,
        max_sup_norm: 0.0,
        first_mbp_violation_step: None,
        max_energy_increase: 0.0,
        steady_state_time,
        diverged_at: None,
    };
    for (k, row) in series.iter().enumerate() {
        if row.diverged {
            summary.diverged_at.get_or_insert(row.step);
            continue;
        }
        if let Some(g) = row.g.filter(|g| g.is_finite()) {
            summary.g_min = Some(summary.g_min.map_or(g, |m| m.min(g)));
            summary.g_max = Some(summary.g_max.map_or(g, |m| m.max(g)));
        }
        if row.sup_norm.is_finite() {
            summary.max_sup_norm = summary.max_sup_norm.max(row.sup_norm);
        }
        if !row.mbp_ok && summary.first_mbp_violation_step.is_none() {
            summary.first_mbp_violation_step = Some(row.step);
        }
        if k > 0 && !series[k - 1].diverged {
            let jump = row.modified_energy - series[k - 1].modified_energy;
            if jump.is_finite() && jump > summary.max_energy_increase {
                summary.max_energy_increase = jump;
            }
        }
    }
    summary
}
