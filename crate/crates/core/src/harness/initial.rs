//! Initial data.
//!
//! Random fields are drawn from ChaCha8 (`rand_chacha` 0.3) seeded with
//! `seed_from_u64(seed)`. Points are visited row-major (`i` outer, `j`
//! inner); each value is `low + (high - low) * k * 2^-53` where `k` is the
//! top 53 bits of the next `u64`. Fixed seed, fixed bits.

use std::f64::consts::PI;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::InitialSpec;
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

pub fn build_initial(spec: &InitialSpec, grid: Grid, seed: u64) -> Result<Field> {
    match *spec {
        InitialSpec::SmoothSine => {
            let k = 2.0 * PI / grid.length();
            Ok(Field::from_fn(grid, |x, y| 0.1 * (k * x).sin() * (k * y).sin()))
        }
        InitialSpec::UniformRandom { low, high } => {
            if !(low < high) {
                return Err(Error::InvalidArgument(format!(
                    "uniform_random needs low < high, got [{low}, {high}]"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let width = high - low;
            let values = (0..grid.len())
                .map(|_| {
                    let k = (rng.next_u64() >> 11) as f64;
                    low + width * (k * (1.0 / (1u64 << 53) as f64))
                })
                .collect();
            Field::from_vec(grid, values)
        }
        InitialSpec::Constant { value } => Ok(Field::constant(grid, value)),
    }
}
