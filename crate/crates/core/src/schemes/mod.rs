//! One-step integrators for the semi-discrete Allen-Cahn system
//! `u_t = eps^2 lap_h u + f(u)`.
//!
//! Six schemes share one state layout and one dispatch entry point:
//!
//! | scheme  | auxiliary scalar stored in [`SchemeState::aux`] |
//! |---------|--------------------------------------------------|
//! | sESAV1/2 | `s`, started at `E_1h(u^0)`                     |
//! | SAV1/2   | `r`, started at `sqrt(E_2h(u^0) + delta)`       |
//! | ESAV1/2  | `ln r`, started at `E_2h(u^0)`                  |
//!
//! Every step costs one or two FFT Helmholtz solves. A step that produces a
//! non-finite value returns the previous field and auxiliary value with
//! `diverged = true`; later steps leave such a state untouched.

mod esav;
mod sav;
mod sesav;

use std::fmt;
use std::str::FromStr;

pub use esav::{esav2_predictor, step_esav1, step_esav2};
pub use sav::{sav2_predictor, step_sav1, step_sav2};
pub use sesav::{sesav2_predictor, step_sesav1, step_sesav2};

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::helmholtz::HelmholtzSolver;
use crate::potential::{c0_of, Potential};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeId {
    Sesav1,
    Sesav2,
    Sav1,
    Sav2,
    Esav1,
    Esav2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Sesav,
    Sav,
    Esav,
}

impl SchemeId {
    pub const ALL: [SchemeId; 6] = [
        SchemeId::Sesav1,
        SchemeId::Sesav2,
        SchemeId::Sav1,
        SchemeId::Sav2,
        SchemeId::Esav1,
        SchemeId::Esav2,
    ];

    pub fn family(self) -> Family {
        match self {
            SchemeId::Sesav1 | SchemeId::Sesav2 => Family::Sesav,
            SchemeId::Sav1 | SchemeId::Sav2 => Family::Sav,
            SchemeId::Esav1 | SchemeId::Esav2 => Family::Esav,
        }
    }

    /// Temporal order of accuracy.
    pub fn order(self) -> u32 {
        match self {
            SchemeId::Sesav1 | SchemeId::Sav1 | SchemeId::Esav1 => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::Sesav1 => "sesav1",
            SchemeId::Sesav2 => "sesav2",
            SchemeId::Sav1 => "sav1",
            SchemeId::Sav2 => "sav2",
            SchemeId::Esav1 => "esav1",
            SchemeId::Esav2 => "esav2",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}`")))
    }
}

/// Parameters shared by all schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub scheme: SchemeId,
    /// Interface width `eps`.
    pub eps: f64,
    /// Stabilizing constant `kappa >= 0`.
    pub kappa: f64,
    /// Time step `tau > 0`.
    pub tau: f64,
    /// Shift `delta` of the SAV square root; ignored by the other families.
    pub delta: f64,
}

impl SchemeParams {
    pub fn new(scheme: SchemeId, eps: f64, kappa: f64, tau: f64) -> Result<Self> {
        let p = SchemeParams {
            scheme,
            eps,
            kappa,
            tau,
            delta: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "kappa must be nonnegative, got {}",
                self.kappa
            )));
        }
        Ok(())
    }

    pub fn eps2(&self) -> f64 {
        self.eps * self.eps
    }
}

/// Solution field plus the scheme's auxiliary scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeState {
    pub u: Field,
    pub aux: f64,
    pub step_index: usize,
    pub diverged: bool,
    /// Positive coefficient of the nonlinear term used by the step that
    /// produced this state: `g` for sESAV1, the predictor `g` for sESAV2,
    /// `r / exp(E_2h)` for ESAV. `None` for SAV and for initial states.
    pub coefficient: Option<f64>,
}

/// Half-step prediction used by the second-order schemes.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorOutput {
    pub u_hat: Field,
    /// `s` hat for sESAV2, `ln r` hat for ESAV2, unused (NaN) for SAV2.
    pub aux_hat: f64,
}

/// Builds the starting state and checks `delta > C_0 |Omega|` for SAV.
pub fn init_state(model: &Potential, params: &SchemeParams, u0: Field) -> Result<SchemeState> {
    params.validate()?;
    if !u0.is_finite() {
        return Err(Error::InvalidArgument("initial field is not finite".into()));
    }
    let aux = match params.scheme.family() {
        Family::Sesav => model.e1h(&u0),
        Family::Sav => {
            let c0 = c0_of(model, params.kappa)? * u0.grid().area();
            if !(params.delta > c0) {
                return Err(Error::InvalidArgument(format!(
                    "SAV needs delta > C0 |Omega| = {c0}, got {}",
                    params.delta
                )));
            }
            (model.e2h(&u0, params.kappa) + params.delta).sqrt()
        }
        Family::Esav => model.e2h(&u0, params.kappa),
    };
    Ok(SchemeState {
        u: u0,
        aux,
        step_index: 0,
        diverged: false,
        coefficient: None,
    })
}

/// `g(u, s) = exp(s - E_1h(u))`.
pub fn g_value(model: &Potential, u: &Field, s: f64) -> f64 {
    (s - model.e1h(u)).exp()
}

/// Advances `state` by one step of `params.scheme`.
pub fn step(
    state: &SchemeState,
    model: &Potential,
    params: &SchemeParams,
    solver: &mut HelmholtzSolver,
) -> SchemeState {
    match params.scheme {
        SchemeId::Sesav1 => step_sesav1(state, model, params, solver),
        SchemeId::Sesav2 => step_sesav2(state, model, params, solver),
        SchemeId::Sav1 => step_sav1(state, model, params, solver),
        SchemeId::Sav2 => step_sav2(state, model, params, solver),
        SchemeId::Esav1 => step_esav1(state, model, params, solver),
        SchemeId::Esav2 => step_esav2(state, model, params, solver),
    }
}

/// Shared tail of every stepper: accept a finite update or freeze.
pub(crate) fn advance(
    state: &SchemeState,
    update: Option<(Field, f64, Option<f64>)>,
) -> SchemeState {
    match update {
        Some((u, aux, coefficient)) if aux.is_finite() && u.is_finite() => SchemeState {
            u,
            aux,
            step_index: state.step_index + 1,
            diverged: false,
            coefficient,
        },
        _ => SchemeState {
            u: state.u.clone(),
            aux: state.aux,
            step_index: state.step_index + 1,
            diverged: true,
            coefficient: None,
        },
    }
}

/// Frozen copy of a diverged state, one step further.
pub(crate) fn frozen(state: &SchemeState) -> SchemeState {
    SchemeState {
        step_index: state.step_index + 1,
        ..state.clone()
    }
}

/// Owns the solver workspace for one run of one scheme.
#[derive(Debug)]
pub struct Integrator {
    pub model: Potential,
    pub params: SchemeParams,
    solver: HelmholtzSolver,
}

impl Integrator {
    pub fn new(model: Potential, params: SchemeParams, grid: crate::grid::Grid) -> Result<Self> {
        params.validate()?;
        Ok(Integrator {
            model,
            params,
            solver: HelmholtzSolver::new(grid),
        })
    }

    pub fn init(&self, u0: Field) -> Result<SchemeState> {
        init_state(&self.model, &self.params, u0)
    }

    pub fn step(&mut self, state: &SchemeState) -> SchemeState {
        step(state, &self.model, &self.params, &mut self.solver)
    }
}
