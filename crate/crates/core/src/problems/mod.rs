//! Objective oracles.
//!
//! A [`Problem`] bundles `m` objectives over a box region with their true
//! gradients and a stochastic gradient oracle. Concrete problems:
//!
//! * [`synthetic`]: the thirteen two-objective benchmarks (ZDT1-3, JOS2, SP1,
//!   IM1, FF1, Far1, SK1, MOP1-3, DEB41);
//! * [`noise`]: a wrapper perturbing the variables with uniform noise;
//! * [`quadratic`]: strongly convex quadratics with Gaussian gradient noise;
//! * [`finite_sum`]: linear finite sums with minibatch gradient sampling.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Debug;

use rand::RngCore;

use crate::error::{invalid, Result};
use crate::types::BoxRegion;

pub mod finite_sum;
pub mod noise;
pub mod quadratic;
pub mod synthetic;

pub use finite_sum::FiniteSumLinear;
pub use noise::{with_variable_noise, NoiseSpec, VariableNoise};
pub use quadratic::{make_quadratic_pair, Quadratics};
pub use synthetic::{make_synthetic, Geometry, Synthetic, SyntheticKind};

/// A bundle of `m` objective oracles over a box-constrained decision space.
pub trait Problem: Debug + Send + Sync {
    fn name(&self) -> &str;

    /// Number of decision variables `n`.
    fn dim(&self) -> usize;

    /// Number of objectives `m`.
    fn num_objectives(&self) -> usize;

    fn region(&self) -> &BoxRegion;

    /// Bounded box used to draw starting points. Defaults to [`Problem::region`],
    /// which then has to be bounded.
    fn sampling_region(&self) -> BoxRegion {
        self.region().clone()
    }

    /// True value of objective `i` at `x`.
    fn value(&self, i: usize, x: &[f64]) -> f64;

    /// True gradient of objective `i` at `x`, written to `out`.
    fn gradient(&self, i: usize, x: &[f64], out: &mut [f64]);

    /// Stochastic estimate of the gradient of objective `i` averaged over `batch` draws.
    fn stochastic_gradient(
        &self,
        i: usize,
        x: &[f64],
        batch: usize,
        rng: &mut dyn RngCore,
        out: &mut [f64],
    ) -> Result<()>;

    /// Whether [`Problem::gradient`] is meaningful (used by the bias harness).
    fn has_true_gradient(&self) -> bool {
        true
    }

    fn values(&self, x: &[f64]) -> Vec<f64> {
        (0..self.num_objectives()).map(|i| self.value(i, x)).collect()
    }
}

pub(crate) fn check_batch(batch: usize) -> Result<()> {
    if batch == 0 {
        return Err(invalid!("batch size must be positive"));
    }
    Ok(())
}

macro_rules! forward_problem {
    ($($ty:ty),*) => {$(
        impl<P: Problem + ?Sized> Problem for $ty {
            fn name(&self) -> &str {
                (**self).name()
            }
            fn dim(&self) -> usize {
                (**self).dim()
            }
            fn num_objectives(&self) -> usize {
                (**self).num_objectives()
            }
            fn region(&self) -> &BoxRegion {
                (**self).region()
            }
            fn sampling_region(&self) -> BoxRegion {
                (**self).sampling_region()
            }
            fn value(&self, i: usize, x: &[f64]) -> f64 {
                (**self).value(i, x)
            }
            fn gradient(&self, i: usize, x: &[f64], out: &mut [f64]) {
                (**self).gradient(i, x, out)
            }
            fn stochastic_gradient(
                &self,
                i: usize,
                x: &[f64],
                batch: usize,
                rng: &mut dyn RngCore,
                out: &mut [f64],
            ) -> Result<()> {
                (**self).stochastic_gradient(i, x, batch, rng, out)
            }
            fn has_true_gradient(&self) -> bool {
                (**self).has_true_gradient()
            }
            fn values(&self, x: &[f64]) -> Vec<f64> {
                (**self).values(x)
            }
        }
    )*};
}

forward_problem!(Box<P>, Arc<P>, &P);
