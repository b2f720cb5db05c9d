//! Oracles shared by the integration tests. Nothing here calls the crate's
//! own stencil, energies or potentials.
#![allow(dead_code)]

use acsav::potential::PotentialKind;
use acsav::schemes::{
    esav2_predictor, sav2_predictor, sesav2_predictor, step, SchemeId, SchemeParams, SchemeState,
};
use acsav::helmholtz::HelmholtzSolver;
use acsav::{Field, Grid, Potential};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Five-point periodic Laplacian by explicit index arithmetic.
pub fn lap(u: &[f64], m: usize, h: f64) -> Vec<f64> {
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let ip = (i + 1) % m;
            let im = (i + m - 1) % m;
            let jp = (j + 1) % m;
            let jm = (j + m - 1) % m;
            out[i * m + j] = (u[ip * m + j] + u[im * m + j] + u[i * m + jp] + u[i * m + jm]
                - 4.0 * u[i * m + j])
                / (h * h);
        }
    }
    out
}

pub fn dot(a: &[f64], b: &[f64], h: f64) -> f64 {
    h * h * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn pot_f(kind: PotentialKind, u: f64) -> f64 {
    match kind {
        PotentialKind::DoubleWell => u - u * u * u,
        PotentialKind::FloryHuggins { theta, theta_c } => {
            0.5 * theta * ((1.0 - u) / (1.0 + u)).ln() + theta_c * u
        }
        PotentialKind::Zero => 0.0,
    }
}

pub fn pot_big_f(kind: PotentialKind, u: f64) -> f64 {
    match kind {
        PotentialKind::DoubleWell => 0.25 * (u * u - 1.0) * (u * u - 1.0),
        PotentialKind::FloryHuggins { theta, theta_c } => {
            0.5 * theta * ((1.0 + u) * (1.0 + u).ln() + (1.0 - u) * (1.0 - u).ln())
                - 0.5 * theta_c * u * u
        }
        PotentialKind::Zero => 0.0,
    }
}

pub fn e1(kind: PotentialKind, u: &[f64], h: f64) -> f64 {
    h * h * u.iter().map(|&x| pot_big_f(kind, x)).sum::<f64>()
}

pub fn e2(kind: PotentialKind, u: &[f64], kappa: f64, h: f64) -> f64 {
    e1(kind, u, h) - 0.5 * kappa * dot(u, u, h)
}

pub fn uniform_values(seed: u64, n: usize, low: f64, high: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| low + (high - low) * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
        .collect()
}

pub fn random_field(grid: Grid, seed: u64, low: f64, high: f64) -> Field {
    Field::from_vec(grid, uniform_values(seed, grid.len(), low, high)).unwrap()
}

/// A state whose auxiliary value is deliberately off its consistent value,
/// so residuals exercise the full scalar update.
pub fn perturbed_state(model: &Potential, params: &SchemeParams, u: Field, shift: f64) -> SchemeState {
    let h = u.grid().spacing();
    let kind = model.kind();
    let aux = match params.scheme {
        SchemeId::Sesav1 | SchemeId::Sesav2 => e1(kind, u.values(), h) + shift,
        SchemeId::Sav1 | SchemeId::Sav2 => {
            (e2(kind, u.values(), params.kappa, h) + params.delta).sqrt() * (1.0 + shift)
        }
        SchemeId::Esav1 | SchemeId::Esav2 => e2(kind, u.values(), params.kappa, h) + shift,
    };
    SchemeState {
        u,
        aux,
        step_index: 0,
        diverged: false,
        coefficient: None,
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn mid(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
}

/// Max-norm residuals `(field, scalar)` of the defining equations after one
/// step, with every term evaluated pointwise.
pub fn scheme_residuals(
    model: &Potential,
    params: &SchemeParams,
    state: &SchemeState,
) -> Vec<(&'static str, f64)> {
    let grid = *state.u.grid();
    let (m, h) = (grid.points(), grid.spacing());
    let kind = model.kind();
    let (tau, k, e2c) = (params.tau, params.kappa, params.eps2());
    let mut solver = HelmholtzSolver::new(grid);
    let next = step(state, model, params, &mut solver);
    assert!(!next.diverged, "step diverged");
    let u = state.u.values();
    let u1 = next.u.values();
    let du = sub(u1, u);
    let fu: Vec<f64> = u.iter().map(|&x| pot_f(kind, x)).collect();
    let w: Vec<f64> = u.iter().zip(&fu).map(|(&x, &f)| f + k * x).collect();
    let mut out = Vec::new();
    match params.scheme {
        SchemeId::Sesav1 => {
            let g = (state.aux - e1(kind, u, h)).exp();
            let l1 = lap(u1, m, h);
            let r: Vec<f64> = (0..m * m)
                .map(|p| du[p] / tau - e2c * l1[p] - g * fu[p] + k * g * du[p])
                .collect();
            out.push(("field", max_abs(&r)));
            out.push(("scalar", (next.aux - state.aux + g * dot(&fu, &du, h)).abs()));
        }
        SchemeId::Sesav2 => {
            let g = (state.aux - e1(kind, u, h)).exp();
            let pred = sesav2_predictor(state, model, params, &mut solver).unwrap();
            let uh = pred.u_hat.values();
            let duh = sub(uh, u);
            let lh = lap(uh, m, h);
            let r: Vec<f64> = (0..m * m)
                .map(|p| duh[p] / (0.5 * tau) - e2c * lh[p] - g * fu[p] + k * g * duh[p])
                .collect();
            out.push(("predictor field", max_abs(&r)));
            out.push((
                "predictor scalar",
                (pred.aux_hat - state.aux + g * dot(&fu, &duh, h)).abs(),
            ));
            let gh = (pred.aux_hat - e1(kind, uh, h)).exp();
            let fh: Vec<f64> = uh.iter().map(|&x| pot_f(kind, x)).collect();
            let um = mid(u1, u);
            let lm = lap(&um, m, h);
            let r: Vec<f64> = (0..m * m)
                .map(|p| du[p] / tau - e2c * lm[p] - gh * fh[p] + k * gh * (um[p] - uh[p]))
                .collect();
            out.push(("field", max_abs(&r)));
            let stab = sub(&um, uh);
            out.push((
                "scalar",
                (next.aux - state.aux + gh * dot(&fh, &du, h) - k * gh * dot(&stab, &du, h))
                    .abs(),
            ));
        }
        SchemeId::Sav1 => {
            let root = (e2(kind, u, k, h) + params.delta).sqrt();
            let l1 = lap(u1, m, h);
            let r: Vec<f64> = (0..m * m)
                .map(|p| du[p] / tau - e2c * l1[p] + k * u1[p] - next.aux / root * w[p])
                .collect();
            out.push(("field", max_abs(&r)));
            out.push((
                "scalar",
                (next.aux - state.aux + dot(&w, &du, h) / (2.0 * root)).abs(),
            ));
        }
        SchemeId::Sav2 => {
            let pred = sav2_predictor(state, model, params, &mut solver).unwrap();
            let uh = pred.u_hat.values();
            let duh = sub(uh, u);
            let lh = lap(uh, m, h);
            let r: Vec<f64> = (0..m * m)
                .map(|p| duh[p] / (0.5 * tau) - e2c * lh[p] - fu[p] + k * duh[p])
                .collect();
            out.push(("predictor field", max_abs(&r)));
            let root = (e2(kind, uh, k, h) + params.delta).sqrt();
            let wh: Vec<f64> = uh.iter().map(|&x| pot_f(kind, x) + k * x).collect();
            let um = mid(u1, u);
            let lm = lap(&um, m, h);
            let rs = next.aux + state.aux;
            let r: Vec<f64> = (0..m * m)
                .map(|p| du[p] / tau - e2c * lm[p] + k * um[p] - rs / (2.0 * root) * wh[p])
                .collect();
            out.push(("field", max_abs(&r)));
            out.push((
                "scalar",
                (next.aux - state.aux + dot(&wh, &du, h) / (2.0 * root)).abs(),
            ));
        }
        SchemeId::Esav1 => {
            let ratio = (state.aux - e2(kind, u, k, h)).exp();
            let l1 = lap(u1, m, h);
            let r: Vec<f64> = (0..m * m)
                .map(|p| du[p] / tau - e2c * l1[p] + k * u1[p] - ratio * w[p])
                .collect();
            out.push(("field", max_abs(&r)));
            out.push(("scalar", (next.aux - state.aux + ratio * dot(&w, &du, h)).abs()));
        }
        SchemeId::Esav2 => {
            let ratio = (state.aux - e2(kind, u, k, h)).exp();
            let pred = esav2_predictor(state, model, params, &mut solver).unwrap();
            let uh = pred.u_hat.values();
            let duh = sub(uh, u);
            let lh = lap(uh, m, h);
            let r: Vec<f64> = (0..m * m)
                .map(|p| duh[p] / (0.5 * tau) - e2c * lh[p] + k * uh[p] - ratio * w[p])
                .collect();
            out.push(("predictor field", max_abs(&r)));
            out.push((
                "predictor scalar",
                (pred.aux_hat - state.aux + ratio * dot(&w, &duh, h)).abs(),
            ));
            let rh = (pred.aux_hat - e2(kind, uh, k, h)).exp();
            let wh: Vec<f64> = uh.iter().map(|&x| pot_f(kind, x) + k * x).collect();
            let um = mid(u1, u);
            let lm = lap(&um, m, h);
            let r: Vec<f64> = (0..m * m)
                .map(|p| du[p] / tau - e2c * lm[p] + k * um[p] - rh * wh[p])
                .collect();
            out.push(("field", max_abs(&r)));
            out.push(("scalar", (next.aux - state.aux + rh * dot(&wh, &du, h)).abs()));
        }
    }
    out
}

/// Parameters used by the residual checks: both potentials, kappa at the
/// Lipschitz bound, and SAV's delta above `C_0`.
pub fn residual_setup(scheme: SchemeId, model: &Potential) -> SchemeParams {
    let kappa = model.lipschitz();
    let params = SchemeParams::new(scheme, 0.1, kappa, 0.05).unwrap();
    let c0 = acsav::potential::c0_of(model, kappa).unwrap();
    params.with_delta(c0 + 0.01)
}

/// sESAV2 at one point with no diffusion, solved by hand.
pub fn sesav2_scalar(kind: PotentialKind, u: f64, s: f64, tau: f64, k: f64) -> (f64, f64) {
    let g = (s - pot_big_f(kind, u)).exp();
    let half = 0.5 * tau;
    let uh = (u / half + g * pot_f(kind, u) + k * g * u) / (1.0 / half + k * g);
    let sh = s - g * pot_f(kind, u) * (uh - u);
    let gh = (sh - pot_big_f(kind, uh)).exp();
    let fh = pot_f(kind, uh);
    // (u1 - u)/tau = gh fh - k gh ((u1 + u)/2 - uh), linear in u1
    let u1 = (u / tau + gh * fh - k * gh * (0.5 * u - uh)) / (1.0 / tau + 0.5 * k * gh);
    let s1 = s - gh * (fh - k * (0.5 * (u1 + u) - uh)) * (u1 - u);
    (u1, s1)
}

/// SAV1 at one point with no diffusion: `p = u / (tau a)`, `q = b / a`.
pub fn sav1_scalar(kind: PotentialKind, u: f64, r: f64, tau: f64, k: f64, delta: f64) -> (f64, f64) {
    let a = 1.0 / tau + k;
    let b = (pot_f(kind, u) + k * u) / (pot_big_f(kind, u) - 0.5 * k * u * u + delta).sqrt();
    let (p, q) = (u / tau / a, b / a);
    let r1 = (r - 0.5 * b * (p - u)) / (1.0 + 0.5 * b * q);
    (p + r1 * q, r1)
}

/// SAV2 at one point with no diffusion.
pub fn sav2_scalar(kind: PotentialKind, u: f64, r: f64, tau: f64, k: f64, delta: f64) -> (f64, f64) {
    let half = 0.5 * tau;
    let uh = (u / half + pot_f(kind, u) + k * u) / (1.0 / half + k);
    let root = (pot_big_f(kind, uh) - 0.5 * k * uh * uh + delta).sqrt();
    let w = pot_f(kind, uh) + k * uh;
    // u1 (1/tau + k/2) = u/tau - k u/2 + (r1 + r) w / (2 root)
    // r1 - r = -w (u1 - u) / (2 root)
    let a = 1.0 / tau + 0.5 * k;
    let c = w / (2.0 * root);
    // u1 = (u/tau - k u/2 + c (r1 + r)) / a, substitute into r1
    let base = (u / tau - 0.5 * k * u + c * r) / a;
    let r1 = (r - c * (base - u)) / (1.0 + c * c / a);
    let u1 = base + c * r1 / a;
    (u1, r1)
}

/// ESAV2 at one point with no diffusion.
pub fn esav2_scalar(kind: PotentialKind, u: f64, aux: f64, tau: f64, k: f64) -> (f64, f64) {
    let e2p = |x: f64| pot_big_f(kind, x) - 0.5 * k * x * x;
    let ratio = (aux - e2p(u)).exp();
    let w = pot_f(kind, u) + k * u;
    let half = 0.5 * tau;
    let uh = (u / half + ratio * w) / (1.0 / half + k);
    let auxh = aux - ratio * w * (uh - u);
    let rh = (auxh - e2p(uh)).exp();
    let wh = pot_f(kind, uh) + k * uh;
    let u1 = (u / tau - 0.5 * k * u + rh * wh) / (1.0 / tau + 0.5 * k);
    (u1, aux - rh * wh * (u1 - u))
}
