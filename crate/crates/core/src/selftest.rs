//! Small built-in checks behind `acsav selftest`.

use crate::grid::{grad_norm_sq, inner, laplacian, norm_inf, Field, Grid};
use crate::harness::{
    build_initial, run_simulation, InitialSpec, KappaName, KappaSpec, PotentialName, RunConfig,
};
use crate::helmholtz::{helmholtz_solve, helmholtz_solve_dense};
use crate::potential::Potential;
use crate::schemes::{init_state, step, SchemeId, SchemeParams};

type Check = std::result::Result<(), String>;

fn close(name: &str, got: f64, want: f64, tol: f64) -> Check {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{name}: got {got}, expected {want} (tol {tol:e})"))
    }
}

fn random_field(grid: Grid, seed: u64) -> Field {
    build_initial(&InitialSpec::UniformRandom { low: -1.0, high: 1.0 }, grid, seed)
        .expect("valid spec")
}

fn hand_step() -> Check {
    let grid = Grid::new(1.0, 1).map_err(|e| e.to_string())?;
    let model = Potential::double_well();
    let params = SchemeParams::new(SchemeId::Sesav1, 0.1, 2.0, 0.1).map_err(|e| e.to_string())?;
    let state = init_state(&model, &params, Field::constant(grid, 0.5)).map_err(|e| e.to_string())?;
    let mut solver = crate::helmholtz::HelmholtzSolver::new(grid);
    let next = step(&state, &model, &params, &mut solver);
    close("u1", next.u.values()[0], 0.53125, 1e-14)?;
    close("s1", next.aux, 0.12890625, 1e-14)
}

fn fft_matches_dense() -> Check {
    let grid = Grid::new(1.0, 8).map_err(|e| e.to_string())?;
    let rhs = random_field(grid, 7);
    let fast = helmholtz_solve(grid, 3.0, 0.01, &rhs).map_err(|e| e.to_string())?;
    let dense = helmholtz_solve_dense(grid, 3.0, 0.01, &rhs).map_err(|e| e.to_string())?;
    close("max diff", norm_inf(&fast.zip_map(&dense, |a, b| a - b)), 0.0, 1e-12)
}

fn summation_by_parts() -> Check {
    let grid = Grid::new(2.0, 8).map_err(|e| e.to_string())?;
    let v = random_field(grid, 1);
    let w = random_field(grid, 2);
    let a = inner(&laplacian(&v), &w).map_err(|e| e.to_string())?;
    let b = inner(&v, &laplacian(&w)).map_err(|e| e.to_string())?;
    close("<Lv,w>-<v,Lw>", a - b, 0.0, 1e-10)?;
    if grad_norm_sq(&v) < 0.0 {
        return Err("negative gradient norm".into());
    }
    Ok(())
}

fn bounded_run(scheme: SchemeId, potential: PotentialName, tau: f64) -> Check {
    let cfg = RunConfig::new(
        scheme,
        potential,
        16,
        0.05,
        KappaSpec::Named(KappaName::Lipschitz),
        tau,
        InitialSpec::UniformRandom { low: -0.8, high: 0.8 },
    )
    .with_n_steps(40);
    let out = run_simulation(&cfg).map_err(|e| e.to_string())?;
    if out.diverged() {
        return Err("diverged".into());
    }
    let beta = out.model.beta();
    if out.summary.max_sup_norm > beta + 1e-12 {
        return Err(format!("sup norm {} exceeds {beta}", out.summary.max_sup_norm));
    }
    if out.energy_violations() > 0 {
        return Err(format!("{} energy increases", out.energy_violations()));
    }
    Ok(())
}

fn potential_constants() -> Check {
    let fh = Potential::flory_huggins(0.8, 1.6).map_err(|e| e.to_string())?;
    close("beta", fh.beta(), 0.9575, 5e-4)?;
    close("lipschitz", fh.lipschitz(), 8.02, 0.01)
}

pub(crate) fn run_all() -> Vec<(&'static str, Check)> {
    vec![
        ("hand_step", hand_step()),
        ("fft_matches_dense", fft_matches_dense()),
        ("summation_by_parts", summation_by_parts()),
        ("potential_constants", potential_constants()),
        (
            "sesav1_flory_huggins_large_step",
            bounded_run(SchemeId::Sesav1, PotentialName::FloryHuggins, 1.0),
        ),
        (
            "sesav2_double_well",
            bounded_run(SchemeId::Sesav2, PotentialName::DoubleWell, 0.01),
        ),
    ]
}
