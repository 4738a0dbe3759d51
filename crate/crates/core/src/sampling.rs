//! Seeded sample points.
//!
//! Point `i` is drawn from its own ChaCha8 stream (`seed`, stream `i`), so the
//! sample set does not depend on how points are split across workers.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::Region;
use crate::chart::{Chart, ChartPoint};
use crate::error::{GeometryError, Result};
use crate::jets::DIM;
use crate::scalar::Scalar;

/// Draws per point before the region is declared mostly invalid.
pub const MAX_ATTEMPTS: usize = 1000;

fn draw(rng: &mut ChaCha8Rng, region: &Region) -> [f64; DIM] {
    region.bounds.map(|(lo, hi)| {
        let x = rng.gen_range(lo..hi);
        // gen_range is half-open already; guard against rounding onto `hi`
        if x >= hi {
            lo
        } else {
            x
        }
    })
}

/// The `index`-th sample: the first draw of stream `index` that passes the
/// chart guards.
pub fn sample_point<T: Scalar>(chart: &Chart<T>, region: &Region, seed: u64, index: u64) -> Result<ChartPoint<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    for _ in 0..MAX_ATTEMPTS {
        let p = chart.point(draw(&mut rng, region).map(T::lit));
        if p.valid {
            return Ok(p);
        }
    }
    Err(GeometryError::Parameter(format!(
        "no valid point on chart `{}` after {MAX_ATTEMPTS} draws in region {:?}",
        chart.name(),
        region.bounds
    )))
}

/// `count` valid points, identical for any thread count.
pub fn sample_points<T: Scalar>(
    chart: &Chart<T>,
    region: &Region,
    seed: u64,
    count: usize,
) -> Result<Vec<ChartPoint<T>>> {
    (0..count as u64).into_par_iter().map(|i| sample_point(chart, region, seed, i)).collect()
}
