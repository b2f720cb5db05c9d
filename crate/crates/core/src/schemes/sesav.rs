//! Stabilized exponential-SAV schemes.
//!
//! With `g = exp(s - E_1h(u))`, sESAV1 solves
//! `((1/tau + kappa g) I - eps^2 lap_h) u' = u/tau + g f(u) + kappa g u`
//! and updates `s' = s - g <f(u), u' - u>`. The stabilizer `kappa g` is
//! always positive, which is what keeps `|u| <= beta`.

use super::{advance, frozen, g_value, PredictorOutput, SchemeParams, SchemeState};
use crate::grid::{inner_unchecked, laplacian, Field};
use crate::helmholtz::HelmholtzSolver;
use crate::potential::Potential;

/// One sESAV1 update of size `tau`; returns `(u', s', g)`.
fn sesav1_update(
    u: &Field,
    s: f64,
    model: &Potential,
    eps2: f64,
    kappa: f64,
    tau: f64,
    solver: &mut HelmholtzSolver,
) -> Option<(Field, f64, f64)> {
    let g = g_value(model, u, s);
    let fu = model.f_field(u);
    let rhs = u.zip_map(&fu, |v, fv| v / tau + g * fv + kappa * g * v);
    let u1 = solver.solve(1.0 / tau + kappa * g, eps2, &rhs).ok()?;
    let du = u1.zip_map(u, |a, b| a - b);
    let s1 = s - g * inner_unchecked(&fu, &du);
    Some((u1, s1, g))
}

pub fn step_sesav1(
    state: &SchemeState,
    model: &Potential,
    params: &SchemeParams,
    solver: &mut HelmholtzSolver,
) -> SchemeState {
    if state.diverged {
        return frozen(state);
    }
    let update = sesav1_update(
        &state.u,
        state.aux,
        model,
        params.eps2(),
        params.kappa,
        params.tau,
        solver,
    )
    .map(|(u, s, g)| (u, s, Some(g)));
    advance(state, update)
}

/// sESAV1 with step `tau / 2` from `(u^n, s^n)`.
pub fn sesav2_predictor(
    state: &SchemeState,
    model: &Potential,
    params: &SchemeParams,
    solver: &mut HelmholtzSolver,
) -> Option<PredictorOutput> {
    let (u_hat, aux_hat, _) = sesav1_update(
        &state.u,
        state.aux,
        model,
        params.eps2(),
        params.kappa,
        0.5 * params.tau,
        solver,
    )?;
    Some(PredictorOutput { u_hat, aux_hat })
}

pub fn step_sesav2(
    state: &SchemeState,
    model: &Potential,
    params: &SchemeParams,
    solver: &mut HelmholtzSolver,
) -> SchemeState {
    if state.diverged {
        return frozen(state);
    }
    let update = (|| {
        let pred = sesav2_predictor(state, model, params, solver)?;
        let (tau, kappa, eps2) = (params.tau, params.kappa, params.eps2());
        let u = &state.u;
        let uh = &pred.u_hat;
        let gh = g_value(model, uh, pred.aux_hat);
        let fuh = model.f_field(uh);
        let lap_u = laplacian(u);
        let explicit = 2.0 / tau - kappa * gh;
        let mut rhs = Field::zeros(*u.grid());
        for (k, r) in rhs.values_mut().iter_mut().enumerate() {
            *r = explicit * u.values()[k]
                + eps2 * lap_u.values()[k]
                + 2.0 * gh * (fuh.values()[k] + kappa * uh.values()[k]);
        }
        let u1 = solver.solve(2.0 / tau + kappa * gh, eps2, &rhs).ok()?;
        // s' = s - gh <f(uh) - kappa (u_mid - uh), u' - u>
        let mut weight = Field::zeros(*u.grid());
        let mut du = Field::zeros(*u.grid());
        for k in 0..u.values().len() {
            let (a, b, c) = (u1.values()[k], u.values()[k], uh.values()[k]);
            weight.values_mut()[k] = fuh.values()[k] - kappa * (0.5 * (a + b) - c);
            du.values_mut()[k] = a - b;
        }
        let s1 = state.aux - gh * inner_unchecked(&weight, &du);
        Some((u1, s1, Some(gh)))
    })();
    advance(state, update)
}
