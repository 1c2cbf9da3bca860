//! Bias of the stochastic multi-gradient.
//!
//! For a batch size `b` the harness draws `reps` independent sets of sampled
//! gradients `g_i`, solves for `λ^g`, and averages the error
//!
//! * estimated weights: `Σ λ^g_i g_i - Σ λ^g_i ∇f_i(x)`,
//! * true weights:      `Σ λ^g_i g_i - Σ λ_i ∇f_i(x)`, `λ` from the true gradients.
//!
//! The reported bias is the norm of the mean error; its standard error is the
//! norm of the per-coordinate standard errors of that mean.

use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use super::multi_gradient;
use crate::error::{invalid, Error, Result};
use crate::problems::{FiniteSumLinear, Problem};
use crate::simplex::combine;

/// Mean gradients of the two linear finite sums.
pub const BIAS_CENTERS: [[f64; 4]; 2] = [
    [-31.22, -26.57, -17.20, 18.77],
    [-7.50, 15.62, -16.69, 15.31],
];
/// Summands per objective.
pub const BIAS_TERMS: usize = 3000;
/// Per-coordinate variance of the summands around their center.
pub const BIAS_VARIANCE: f64 = 0.2;
pub const BIAS_REPS: usize = 10_000;
pub const BIAS_BATCHES: [usize; 5] = [10, 50, 200, 1000, 3000];

/// Two linear finite sums of Gaussian gradients around [`BIAS_CENTERS`].
pub fn bias_instance(rng: &mut dyn RngCore) -> Result<FiniteSumLinear> {
    let centers: Vec<Vec<f64>> = BIAS_CENTERS.iter().map(|c| c.to_vec()).collect();
    FiniteSumLinear::gaussian_around(&centers, BIAS_TERMS, BIAS_VARIANCE, rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    Estimated,
    True,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasPoint {
    pub batch: usize,
    pub bias: f64,
    pub std_error: f64,
}

struct Moments {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl Moments {
    fn new(n: usize) -> Self {
        Self {
            sum: vec![0.0; n],
            sum_sq: vec![0.0; n],
        }
    }

    fn push(&mut self, e: &[f64]) {
        for ((s, s2), v) in self.sum.iter_mut().zip(&mut self.sum_sq).zip(e) {
            *s += v;
            *s2 += v * v;
        }
    }

    fn point(&self, batch: usize, reps: usize) -> BiasPoint {
        let r = reps as f64;
        let mut mean_sq = 0.0;
        let mut se_sq = 0.0;
        for (s, s2) in self.sum.iter().zip(&self.sum_sq) {
            let mean = s / r;
            mean_sq += mean * mean;
            if reps > 1 {
                let var = ((s2 - r * mean * mean) / (r - 1.0)).max(0.0);
                se_sq += var / r;
            }
        }
        BiasPoint {
            batch,
            bias: libm::sqrt(mean_sq),
            std_error: libm::sqrt(se_sq),
        }
    }
}

/// Bias curves for both weight modes from the same draws, `(estimated, true)`.
pub fn measure_bias_both<P: Problem + ?Sized>(
    p: &P,
    x: &[f64],
    batch_sizes: &[usize],
    reps: usize,
    rng: &mut dyn RngCore,
) -> Result<(Vec<BiasPoint>, Vec<BiasPoint>)> {
    if reps == 0 {
        return Err(invalid!("reps must be at least 1"));
    }
    if batch_sizes.contains(&0) {
        return Err(invalid!("batch sizes must be positive"));
    }
    if !p.has_true_gradient() {
        return Err(Error::Unsupported(
            "bias needs the true gradients, which this problem does not expose".into(),
        ));
    }
    p.region().check_dim(x.len())?;
    let (n, m) = (p.dim(), p.num_objectives());
    let truth: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut g = vec![0.0; n];
            p.gradient(i, x, &mut g);
            g
        })
        .collect();
    let full = multi_gradient(&truth)?;
    let mut sampled = vec![vec![0.0; n]; m];
    let (mut est, mut tru) = (Vec::new(), Vec::new());
    for &b in batch_sizes {
        let mut est_m = Moments::new(n);
        let mut tru_m = Moments::new(n);
        let mut err = vec![0.0; n];
        for _ in 0..reps {
            for (i, g) in sampled.iter_mut().enumerate() {
                p.stochastic_gradient(i, x, b, rng, g)?;
            }
            let mg = multi_gradient(&sampled)?;
            let reference = combine(&truth, &mg.weights);
            for ((e, d), r) in err.iter_mut().zip(&mg.direction).zip(&reference) {
                *e = d - r;
            }
            est_m.push(&err);
            for ((e, d), r) in err.iter_mut().zip(&mg.direction).zip(&full.direction) {
                *e = d - r;
            }
            tru_m.push(&err);
        }
        est.push(est_m.point(b, reps));
        tru.push(tru_m.point(b, reps));
    }
    Ok((est, tru))
}

/// Bias curve for one weight mode.
pub fn measure_bias<P: Problem + ?Sized>(
    p: &P,
    x: &[f64],
    batch_sizes: &[usize],
    reps: usize,
    rng: &mut dyn RngCore,
    mode: WeightMode,
) -> Result<Vec<BiasPoint>> {
    let (est, tru) = measure_bias_both(p, x, batch_sizes, reps, rng)?;
    Ok(match mode {
        WeightMode::Estimated => est,
        WeightMode::True => tru,
    })
}
