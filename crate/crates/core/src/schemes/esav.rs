//! Exponential SAV schemes. The auxiliary variable is carried as `ln r`, and
//! `r / exp(E_2h(u))` is evaluated as a single exponential of a difference.

use super::{advance, frozen, PredictorOutput, SchemeParams, SchemeState};
use crate::grid::{inner_unchecked, laplacian, Field};
use crate::helmholtz::HelmholtzSolver;
use crate::potential::Potential;

/// `exp(ln_r - E_2h(u))` and `f(u) + kappa u`.
fn ratio_and_force(model: &Potential, u: &Field, ln_r: f64, kappa: f64) -> (f64, Field) {
    let ratio = (ln_r - model.e2h(u, kappa)).exp();
    (ratio, u.map(|v| model.f(v) + kappa * v))
}

/// Implicit update with step `dt`:
/// `((1/dt + kappa) I - eps^2 lap_h) u' = u/dt + ratio w`,
/// `ln r' = ln r - ratio <w, u' - u>`.
fn esav1_update(
    u: &Field,
    ln_r: f64,
    model: &Potential,
    params: &SchemeParams,
    dt: f64,
    solver: &mut HelmholtzSolver,
) -> Option<(Field, f64, f64)> {
    let (ratio, w) = ratio_and_force(model, u, ln_r, params.kappa);
    let rhs = u.zip_map(&w, |v, wv| v / dt + ratio * wv);
    let u1 = solver.solve(1.0 / dt + params.kappa, params.eps2(), &rhs).ok()?;
    let ln_r1 = ln_r - ratio * inner_unchecked(&w, &u1.zip_map(u, |a, b| a - b));
    Some((u1, ln_r1, ratio))
}

pub fn step_esav1(
    state: &SchemeState,
    model: &Potential,
    params: &SchemeParams,
    solver: &mut HelmholtzSolver,
) -> SchemeState {
    if state.diverged {
        return frozen(state);
    }
    let update = esav1_update(&state.u, state.aux, model, params, params.tau, solver)
        .map(|(u, a, ratio)| (u, a, Some(ratio)));
    advance(state, update)
}

/// ESAV1 with half the step size.
pub fn esav2_predictor(
    state: &SchemeState,
    model: &Potential,
    params: &SchemeParams,
    solver: &mut HelmholtzSolver,
) -> Option<PredictorOutput> {
    let (u_hat, aux_hat, _) =
        esav1_update(&state.u, state.aux, model, params, 0.5 * params.tau, solver)?;
    Some(PredictorOutput { u_hat, aux_hat })
}

pub fn step_esav2(
    state: &SchemeState,
    model: &Potential,
    params: &SchemeParams,
    solver: &mut HelmholtzSolver,
) -> SchemeState {
    if state.diverged {
        return frozen(state);
    }
    let update = (|| {
        let (tau, kappa, eps2) = (params.tau, params.kappa, params.eps2());
        let u = &state.u;
        let pred = esav2_predictor(state, model, params, solver)?;
        let (ratio_h, wh) = ratio_and_force(model, &pred.u_hat, pred.aux_hat, kappa);
        let lap_u = laplacian(u);
        let explicit = 2.0 / tau - kappa;
        let mut rhs = Field::zeros(*u.grid());
        for (k, r) in rhs.values_mut().iter_mut().enumerate() {
            *r = explicit * u.values()[k] + eps2 * lap_u.values()[k] + 2.0 * ratio_h * wh.values()[k];
        }
        let u1 = solver.solve(2.0 / tau + kappa, eps2, &rhs).ok()?;
        let ln_r1 = state.aux - ratio_h * inner_unchecked(&wh, &u1.zip_map(u, |a, b| a - b));
        Some((u1, ln_r1, Some(ratio_h)))
    })();
    advance(state, update)
}
