//! Classic SAV schemes with `r = sqrt(E_2h(u) + delta)`.
//!
//! The coupled `(u, r)` system is decoupled with two solves against the same
//! operator: `u' = p + c q` where `c` is the scalar multiplying `b` and is
//! found from the `r` equation.

use super::{advance, frozen, PredictorOutput, SchemeParams, SchemeState};
use crate::grid::{inner_unchecked, laplacian, Field};
use crate::helmholtz::HelmholtzSolver;
use crate::potential::Potential;

/// `(f(v) + kappa v) / sqrt(E_2h(v) + delta)`, or `None` if the root is not real.
fn sav_coefficient_field(model: &Potential, v: &Field, kappa: f64, delta: f64) -> Option<Field> {
    let radicand = model.e2h(v, kappa) + delta;
    if !(radicand > 0.0) {
        return None;
    }
    let inv = 1.0 / radicand.sqrt();
    Some(v.map(|x| (model.f(x) + kappa * x) * inv))
}

pub fn step_sav1(
    state: &SchemeState,
    model: &Potential,
    params: &SchemeParams,
    solver: &mut HelmholtzSolver,
) -> SchemeState {
    if state.diverged {
        return frozen(state);
    }
    let update = (|| {
        let (tau, kappa) = (params.tau, params.kappa);
        let u = &state.u;
        let b = sav_coefficient_field(model, u, kappa, params.delta)?;
        let scaled = u.map(|v| v / tau);
        let (p, q) = solver
            .solve_pair(1.0 / tau + kappa, params.eps2(), &scaled, &b)
            .ok()?;
        let bp = inner_unchecked(&b, &p.zip_map(u, |a, c| a - c));
        let bq = inner_unchecked(&b, &q);
        let denom = 1.0 + 0.5 * bq;
        if denom == 0.0 {
            return None;
        }
        let r1 = (state.aux - 0.5 * bp) / denom;
        let u1 = p.zip_map(&q, |pv, qv| pv + r1 * qv);
        Some((u1, r1, None))
    })();
    advance(state, update)
}

/// Stabilized semi-implicit half step
/// `((2/tau + kappa) I - eps^2 lap_h) u_hat = (2/tau + kappa) u + f(u)`.
pub fn sav2_predictor(
    state: &SchemeState,
    model: &Potential,
    params: &SchemeParams,
    solver: &mut HelmholtzSolver,
) -> Option<PredictorOutput> {
    let a = 2.0 / params.tau + params.kappa;
    let rhs = state.u.map(|v| a * v + model.f(v));
    let u_hat = solver.solve(a, params.eps2(), &rhs).ok()?;
    Some(PredictorOutput {
        u_hat,
        aux_hat: f64::NAN,
    })
}

pub fn step_sav2(
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
        let r = state.aux;
        let pred = sav2_predictor(state, model, params, solver)?;
        let bh = sav_coefficient_field(model, &pred.u_hat, kappa, params.delta)?;
        let lap_u = laplacian(u);
        let explicit = 2.0 / tau - kappa;
        let c = u.zip_map(&lap_u, |v, l| explicit * v + eps2 * l);
        // (2/tau + kappa - eps^2 lap) u' = c + (r' + r) bh
        let (p, q) = solver.solve_pair(2.0 / tau + kappa, eps2, &c, &bh).ok()?;
        let bp = inner_unchecked(&bh, &p.zip_map(u, |a, b| a - b));
        let bq = inner_unchecked(&bh, &q);
        let denom = 1.0 + 0.5 * bq;
        if denom == 0.0 {
            return None;
        }
        let r1 = (r - 0.5 * bp - 0.5 * r * bq) / denom;
        let sum = r1 + r;
        let u1 = p.zip_map(&q, |pv, qv| pv + sum * qv);
        Some((u1, r1, None))
    })();
    advance(state, update)
}
