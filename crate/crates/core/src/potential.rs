//! Reaction terms `f = -F'` and the constants derived from them.
//!
//! Two physical models are provided, the quartic double well and the
//! logarithmic Flory-Huggins potential, plus a zero potential that turns
//! every scheme into a linear heat-equation integrator.

use crate::error::{Error, Result};
use crate::grid::{integral, norm2, Field};

/// Absolute tolerance used by every bisection in this module.
pub const BISECTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind {
    DoubleWell,
    FloryHuggins { theta: f64, theta_c: f64 },
    Zero,
}

/// A potential together with its bound `beta`, the Lipschitz constant of `f`
/// on `[-beta, beta]`, and `c_star = max(0, -min F)` on that interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
    beta: f64,
    lipschitz: f64,
    c_star: f64,
}

impl Potential {
    pub fn double_well() -> Self {
        Potential {
            kind: PotentialKind::DoubleWell,
            beta: 1.0,
            lipschitz: 2.0,
            c_star: 0.0,
        }
    }

    pub fn flory_huggins(theta: f64, theta_c: f64) -> Result<Self> {
        if !(theta > 0.0 && theta_c > theta && theta_c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Flory-Huggins needs theta_c > theta > 0, got theta={theta}, theta_c={theta_c}"
            )));
        }
        let kind = PotentialKind::FloryHuggins { theta, theta_c };
        let mut p = Potential {
            kind,
            beta: f64::NAN,
            lipschitz: f64::NAN,
            c_star: 0.0,
        };
        p.beta = beta_of(&p)?;
        let fp0 = theta_c - theta;
        let fpb = theta_c - theta / (1.0 - p.beta * p.beta);
        p.lipschitz = fp0.abs().max(fpb.abs());
        // F is even with minima at +-beta.
        p.c_star = (-p.big_f(p.beta)).max(0.0);
        Ok(p)
    }

    /// `f = 0`, `F = 0`; `beta` is infinite.
    pub fn zero() -> Self {
        Potential {
            kind: PotentialKind::Zero,
            beta: f64::INFINITY,
            lipschitz: 0.0,
            c_star: 0.0,
        }
    }

    pub fn from_kind(kind: PotentialKind) -> Result<Self> {
        match kind {
            PotentialKind::DoubleWell => Ok(Self::double_well()),
            PotentialKind::FloryHuggins { theta, theta_c } => Self::flory_huggins(theta, theta_c),
            PotentialKind::Zero => Ok(Self::zero()),
        }
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `max |f'|` on `[-beta, beta]`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn c_star(&self) -> f64 {
        self.c_star
    }

    /// Reaction term `f(u) = -F'(u)`.
    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        match self.kind {
            PotentialKind::DoubleWell => u - u * u * u,
            PotentialKind::FloryHuggins { theta, theta_c } => {
                0.5 * theta * ((1.0 - u) / (1.0 + u)).ln() + theta_c * u
            }
            PotentialKind::Zero => 0.0,
        }
    }

    /// Potential `F(u)`. Flory-Huggins is non-finite for `|u| > 1`.
    #[inline]
    pub fn big_f(&self, u: f64) -> f64 {
        match self.kind {
            PotentialKind::DoubleWell => {
                let w = u * u - 1.0;
                0.25 * w * w
            }
            PotentialKind::FloryHuggins { theta, theta_c } => {
                0.5 * theta * (xlogx(1.0 + u) + xlogx(1.0 - u)) - 0.5 * theta_c * u * u
            }
            PotentialKind::Zero => 0.0,
        }
    }

    #[inline]
    pub fn fprime(&self, u: f64) -> f64 {
        match self.kind {
            PotentialKind::DoubleWell => 1.0 - 3.0 * u * u,
            PotentialKind::FloryHuggins { theta, theta_c } => theta_c - theta / (1.0 - u * u),
            PotentialKind::Zero => 0.0,
        }
    }

    pub fn f_field(&self, u: &Field) -> Field {
        u.map(|v| self.f(v))
    }

    /// `E_1h(u) = <F(u), 1>`.
    pub fn e1h(&self, u: &Field) -> f64 {
        integral(&u.map(|v| self.big_f(v)))
    }

    /// `E_2h(u) = <F(u) - kappa/2 u^2, 1>`.
    pub fn e2h(&self, u: &Field, kappa: f64) -> f64 {
        let n = norm2(u);
        self.e1h(u) - 0.5 * kappa * n * n
    }
}

/// `x ln x`, continuous at 0; NaN for negative input.
#[inline]
fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Bisection for a sign change of `g` on `[lo, hi]`.
fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, what: &str) -> Result<f64> {
    let mut glo = g(lo);
    let ghi = g(hi);
    if !(glo.signum() * ghi.signum() < 0.0) {
        return Err(Error::NoBracket(format!(
            "{what}: g({lo})={glo}, g({hi})={ghi}"
        )));
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn below_one() -> f64 {
    1.0 - f64::EPSILON
}

/// Positive root of `f`: the bound in the maximum principle.
pub fn beta_of(model: &Potential) -> Result<f64> {
    match model.kind {
        PotentialKind::DoubleWell => Ok(1.0),
        PotentialKind::FloryHuggins { .. } => {
            // f > 0 just right of 0 because f'(0) = theta_c - theta > 0.
            bisect(|u| model.f(u), 1e-8, below_one(), "positive root of f")
        }
        PotentialKind::Zero => Ok(f64::INFINITY),
    }
}

/// `max |f'|` on `[-beta, beta]`.
pub fn lipschitz_bound(model: &Potential) -> f64 {
    model.lipschitz
}

/// Lower-bound constant `C_0` for `E_2` per unit area:
/// `max_u (kappa/2 u^2 - F(u))`.
pub fn c0_of(model: &Potential, kappa: f64) -> Result<f64> {
    if !(kappa >= 0.0) {
        return Err(Error::InvalidArgument(format!("kappa must be nonnegative, got {kappa}")));
    }
    match model.kind {
        PotentialKind::DoubleWell => Ok(0.25 * (kappa * kappa + 2.0 * kappa)),
        PotentialKind::FloryHuggins { .. } => {
            let alpha = bisect(
                |u| model.f(u) + kappa * u,
                1e-8,
                below_one(),
                "root of f(u) + kappa u",
            )?;
            Ok(-model.big_f(alpha) + 0.5 * kappa * alpha * alpha)
        }
        PotentialKind::Zero => Ok(0.0),
    }
}
