mod common;

use acsav::potential::{beta_of, c0_of, lipschitz_bound};
use acsav::{Field, Grid, Potential};
use common::*;
use proptest::prelude::*;

fn fh() -> Potential {
    Potential::flory_huggins(0.8, 1.6).unwrap()
}

#[test]
fn constants() {
    let dw = Potential::double_well();
    assert_eq!(beta_of(&dw).unwrap(), 1.0);
    assert_eq!(lipschitz_bound(&dw), 2.0);
    assert_eq!(c0_of(&dw, 2.0).unwrap(), 2.0);
    let p = fh();
    let beta = beta_of(&p).unwrap();
    assert!((beta - 0.9575).abs() < 5e-4);
    assert!(pot_f(p.kind(), beta).abs() < 1e-10);
    assert!((lipschitz_bound(&p) - 8.02).abs() < 0.01);
    // the maximum of |f'| on [-beta, beta], sampled independently
    let sampled = (0..=20_000)
        .map(|k| -beta + 2.0 * beta * k as f64 / 20_000.0)
        .map(|u| (0.8 / (1.0 - u * u) - 1.6).abs().max((1.6 - 0.8 / (1.0 - u * u)).abs()))
        .fold(0.0, f64::max);
    assert!((lipschitz_bound(&p) - sampled).abs() < 1e-9);
}

#[test]
fn flory_huggins_parameters_are_checked() {
    assert!(Potential::flory_huggins(0.8, 0.8).is_err());
    assert!(Potential::flory_huggins(-1.0, 1.6).is_err());
}

proptest! {
    #[test]
    fn f_is_minus_derivative_of_big_f(u in -0.9f64..0.9, which in 0usize..2) {
        let p = if which == 0 { Potential::double_well() } else { fh() };
        let h = 1e-5;
        let fd = -(p.big_f(u + h) - p.big_f(u - h)) / (2.0 * h);
        prop_assert!((fd - p.f(u)).abs() < 1e-8);
        let fd2 = (p.f(u + h) - p.f(u - h)) / (2.0 * h);
        prop_assert!((fd2 - p.fprime(u)).abs() < 1e-6);
        prop_assert!((p.f(u) - pot_f(p.kind(), u)).abs() < 1e-12);
        prop_assert!((p.big_f(u) - pot_big_f(p.kind(), u)).abs() < 1e-12);
    }

    #[test]
    fn f_is_odd_and_big_f_even(u in -0.95f64..0.95, which in 0usize..2) {
        let p = if which == 0 { Potential::double_well() } else { fh() };
        prop_assert!((p.f(u) + p.f(-u)).abs() < 1e-12);
        prop_assert!((p.big_f(u) - p.big_f(-u)).abs() < 1e-12);
    }

    /// Stabilized map `u -> f(u) + kappa u` stays inside `[-kappa beta, kappa beta]`.
    #[test]
    fn stabilized_nonlinearity_is_bounded(t in -1.0f64..1.0, extra in 0.0f64..5.0, which in 0usize..2) {
        let p = if which == 0 { Potential::double_well() } else { fh() };
        let beta = p.beta();
        let kappa = p.lipschitz() + extra;
        let u = t * beta;
        prop_assert!((p.f(u) + kappa * u).abs() <= kappa * beta * (1.0 + 1e-12));
    }

    #[test]
    fn energies_have_lower_bounds(
        values in prop::collection::vec(-1.0f64..1.0, 16),
        kappa in 0.0f64..10.0,
        which in 0usize..2,
    ) {
        let p = if which == 0 { Potential::double_well() } else { fh() };
        let grid = Grid::new(1.0, 4).unwrap();
        let u = Field::from_vec(grid, values.iter().map(|v| v * p.beta()).collect()).unwrap();
        let h = grid.spacing();
        prop_assert!(p.e1h(&u) >= -p.c_star() * grid.area() - 1e-12);
        prop_assert!((p.e1h(&u) - e1(p.kind(), u.values(), h)).abs() < 1e-12);
        prop_assert!((p.e2h(&u, kappa) - e2(p.kind(), u.values(), kappa, h)).abs() < 1e-12);
        let c0 = c0_of(&p, kappa).unwrap();
        prop_assert!(p.e2h(&u, kappa) >= -c0 * grid.area() - 1e-10);
    }
}
