use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Shape;
use crate::math::sqrt;
use crate::tensor::SymMatrix;
use crate::{Error, Result};

pub const MIN_SAMPLES: usize = 10_000;

/// Sampled estimates of the measure, static moment and Euler tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloInertia {
    pub samples: usize,
    pub measure: f64,
    pub measure_error: f64,
    pub static_moment: Vec<f64>,
    pub static_moment_error: Vec<f64>,
    pub euler: SymMatrix,
    /// Standard errors of the Euler tensor entries, row-major.
    pub euler_error: Vec<f64>,
}

impl MonteCarloInertia {
    /// Largest entrywise relative deviation from `exact`, measured against
    /// the largest diagonal entry of `exact`.
    pub fn relative_error(&self, exact: &SymMatrix) -> f64 {
        let n = exact.dim().n();
        let scale = (0..n).map(|i| exact.entry(i, i).abs()).fold(0.0, f64::max);
        crate::math::relative(self.euler.max_abs_diff(exact), scale)
    }
}

struct Moments {
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.sum += v;
        self.sum_sq += v * v;
    }

    /// Mean and standard error of `box_measure * v` over `count` draws.
    fn estimate(&self, count: usize, box_measure: f64) -> (f64, f64) {
        let m = count as f64;
        let mean = self.sum / m;
        let var = (self.sum_sq / m - mean * mean).max(0.0);
        (box_measure * mean, box_measure * sqrt(var / (m - 1.0)))
    }
}

/// Hit-or-miss estimate over the bounding box with a ChaCha8 stream.
pub fn monte_carlo_inertia(s: &Shape, samples: usize, seed: u64) -> Result<MonteCarloInertia> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: samples as f64,
            reason: "Monte-Carlo needs at least 10000 samples",
        });
    }
    let n = s.dim().n();
    let (centre, half) = s.bounding_box();
    let box_measure: f64 = half.iter().map(|h| 2.0 * h).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let zero = || Moments { sum: 0.0, sum_sq: 0.0 };
    let mut measure = zero();
    let mut first: Vec<Moments> = (0..n).map(|_| zero()).collect();
    let mut second: Vec<Moments> = (0..n * n).map(|_| zero()).collect();
    let mut x = vec![0.0; n];
    for _ in 0..samples {
        for a in 0..n {
            x[a] = centre[a] + half[a] * rng.random_range(-1.0..1.0);
        }
        let hit = s.contains(&x);
        let w = if hit { 1.0 } else { 0.0 };
        measure.push(w);
        for a in 0..n {
            first[a].push(w * x[a]);
            for b in 0..n {
                second[a * n + b].push(w * x[a] * x[b]);
            }
        }
    }

    let (m, me) = measure.estimate(samples, box_measure);
    let (static_moment, static_moment_error) = first.iter().map(|f| f.estimate(samples, box_measure)).unzip();
    let (rows, euler_error): (Vec<f64>, Vec<f64>) =
        second.iter().map(|f| f.estimate(samples, box_measure)).unzip();
    Ok(MonteCarloInertia {
        samples,
        measure: m,
        measure_error: me,
        static_moment,
        static_moment_error,
        euler: SymMatrix::new(s.dim(), &rows)?,
        euler_error,
    })
}

/// Fraction of `samples` points drawn uniformly in `inner`'s bounding box
/// that lie inside `inner` but outside `outer`, relative to hits in `inner`.
pub(crate) fn escape_fraction(inner: &Shape, outer: &Shape, samples: usize, seed: u64) -> f64 {
    let n = inner.dim().n();
    let (centre, half) = inner.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; n];
    let (mut hits, mut escaped) = (0usize, 0usize);
    for _ in 0..samples {
        for a in 0..n {
            x[a] = centre[a] + half[a] * rng.random_range(-1.0..1.0);
        }
        if inner.contains(&x) {
            hits += 1;
            if !outer.contains(&x) {
                escaped += 1;
            }
        }
    }
    if hits == 0 {
        0.0
    } else {
        escaped as f64 / hits as f64
    }
}
