//! Noise on the decision variables.
//!
//! `VariableNoise` keeps the inner problem's values and true gradients and
//! replaces its stochastic gradient by the average of true gradients taken at
//! `x + w_r`, `w_r` uniform on `Π_j [-h_j, h_j]`. The perturbed point is clamped
//! back into the region before the gradient is taken, so the oracle never sees
//! an infeasible point.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use super::{check_batch, Problem};
use crate::error::{invalid, Result};
use crate::types::BoxRegion;

/// Fraction of a bounded side used as the full noise interval length.
pub const BOUNDED_FRACTION: f64 = 0.1;

/// Default `default_fraction` for coordinates without bounds.
pub const DEFAULT_UNBOUNDED_FRACTION: f64 = 0.05;

/// Per-coordinate half-widths. `None` entries are derived from the region.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    half_widths: Vec<Option<f64>>,
}

impl NoiseSpec {
    pub fn new(half_widths: Vec<Option<f64>>) -> Result<Self> {
        for (j, h) in half_widths.iter().enumerate() {
            if let Some(h) = *h {
                if !(h.is_finite() && h >= 0.0) {
                    return Err(invalid!("noise half-width {j} must be finite and >= 0, got {h}"));
                }
            }
        }
        Ok(Self { half_widths })
    }

    /// Every width derived from the region.
    pub fn derived(n: usize) -> Self {
        Self {
            half_widths: vec![None; n],
        }
    }

    /// The same explicit width on every coordinate.
    pub fn fixed(n: usize, h: f64) -> Result<Self> {
        Self::new(vec![Some(h); n])
    }

    pub fn zero(n: usize) -> Self {
        Self {
            half_widths: vec![Some(0.0); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.half_widths.len()
    }

    pub fn half_widths(&self) -> &[Option<f64>] {
        &self.half_widths
    }
}

/// A problem whose stochastic gradients are true gradients at perturbed points.
#[derive(Debug, Clone)]
pub struct VariableNoise<P> {
    inner: P,
    spec: NoiseSpec,
    default_fraction: f64,
    name: alloc::string::String,
}

/// Wraps `p` with uniform variable noise.
///
/// Bounded coordinates get `h_j = side_j / 20`; unbounded ones get
/// `h_j = default_fraction · (1 + |x_j|)`. Explicit entries of `spec` win.
pub fn with_variable_noise<P: Problem>(
    p: P,
    spec: NoiseSpec,
    default_fraction: f64,
) -> Result<VariableNoise<P>> {
    if spec.dim() != p.dim() {
        return Err(invalid!(
            "noise spec has {} widths, problem has {} variables",
            spec.dim(),
            p.dim()
        ));
    }
    if !(default_fraction > 0.0 && default_fraction <= 1.0) {
        return Err(invalid!("default_fraction must lie in (0, 1], got {default_fraction}"));
    }
    let name = alloc::format!("{}+noise", p.name());
    Ok(VariableNoise {
        inner: p,
        spec,
        default_fraction,
        name,
    })
}

impl<P: Problem> VariableNoise<P> {
    pub fn inner(&self) -> &P {
        &self.inner
    }

    /// Half-width of coordinate `j` at `x`.
    pub fn half_width(&self, j: usize, x: &[f64]) -> f64 {
        match self.spec.half_widths[j] {
            Some(h) => h,
            None => noise_half_width(self.inner.region(), j, x[j], self.default_fraction),
        }
    }
}

/// `side/20` on bounded coordinates, `fraction · (1 + |x_j|)` otherwise.
pub fn noise_half_width(region: &BoxRegion, j: usize, xj: f64, fraction: f64) -> f64 {
    match region.side(j) {
        Some(side) => 0.5 * BOUNDED_FRACTION * side,
        None => fraction * (1.0 + xj.abs()),
    }
}

impl<P: Problem> Problem for VariableNoise<P> {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn num_objectives(&self) -> usize {
        self.inner.num_objectives()
    }

    fn region(&self) -> &BoxRegion {
        self.inner.region()
    }

    fn sampling_region(&self) -> BoxRegion {
        self.inner.sampling_region()
    }

    fn value(&self, i: usize, x: &[f64]) -> f64 {
        self.inner.value(i, x)
    }

    fn gradient(&self, i: usize, x: &[f64], out: &mut [f64]) {
        self.inner.gradient(i, x, out)
    }

    fn stochastic_gradient(
        &self,
        i: usize,
        x: &[f64],
        batch: usize,
        rng: &mut dyn RngCore,
        out: &mut [f64],
    ) -> Result<()> {
        check_batch(batch)?;
        let n = x.len();
        let widths: Vec<f64> = (0..n).map(|j| self.half_width(j, x)).collect();
        if widths.iter().all(|&h| h == 0.0) {
            self.inner.gradient(i, x, out);
            return Ok(());
        }
        let mut y = vec![0.0; n];
        let mut g = vec![0.0; n];
        out.fill(0.0);
        for _ in 0..batch {
            for ((yj, &xj), &h) in y.iter_mut().zip(x).zip(&widths) {
                *yj = if h > 0.0 {
                    xj + h * (2.0 * rng.random::<f64>() - 1.0)
                } else {
                    xj
                };
            }
            self.inner.region().clamp_in_place(&mut y);
            self.inner.gradient(i, &y, &mut g);
            for (o, v) in out.iter_mut().zip(&g) {
                *o += v;
            }
        }
        let scale = 1.0 / batch as f64;
        for o in out.iter_mut() {
            *o *= scale;
        }
        Ok(())
    }
}
