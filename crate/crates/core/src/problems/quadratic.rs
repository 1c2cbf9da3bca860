//! Strongly convex quadratics `f_i(x) = (c_i/2) ‖x - center_i‖²`.
//!
//! The stochastic gradient adds `N(0, σ²/b)` noise independently per coordinate
//! to the true gradient, one draw per coordinate per call.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use super::{check_batch, Problem};
use crate::error::{invalid, Result};
use crate::types::BoxRegion;

#[derive(Debug, Clone)]
pub struct Quadratics {
    curvatures: Vec<f64>,
    centers: Vec<Vec<f64>>,
    sigma: f64,
    region: BoxRegion,
    name: String,
}

/// Two quadratics with curvatures `c1`, `c2` around `center1`, `center2`.
pub fn make_quadratic_pair(
    c1: f64,
    c2: f64,
    center1: Vec<f64>,
    center2: Vec<f64>,
    noise_sigma: f64,
) -> Result<Quadratics> {
    Quadratics::new(alloc::vec![c1, c2], alloc::vec![center1, center2], noise_sigma)
}

impl Quadratics {
    pub fn new(curvatures: Vec<f64>, centers: Vec<Vec<f64>>, noise_sigma: f64) -> Result<Self> {
        if curvatures.is_empty() || curvatures.len() != centers.len() {
            return Err(invalid!(
                "need one center per curvature ({} curvatures, {} centers)",
                curvatures.len(),
                centers.len()
            ));
        }
        if let Some(c) = curvatures.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
            return Err(invalid!("curvature must be positive and finite, got {c}"));
        }
        let n = centers[0].len();
        if n == 0 || centers.iter().any(|c| c.len() != n) {
            return Err(invalid!("centers must share a positive dimension"));
        }
        if centers.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid!("centers must be finite"));
        }
        if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
            return Err(invalid!("noise sigma must be finite and >= 0, got {noise_sigma}"));
        }
        let name = alloc::format!("quadratic{}", curvatures.len());
        Ok(Self {
            curvatures,
            centers,
            sigma: noise_sigma,
            region: BoxRegion::unbounded(n),
            name,
        })
    }

    /// Restricts the decision space to `region`.
    pub fn with_region(mut self, region: BoxRegion) -> Result<Self> {
        region.check_dim(self.region.dim())?;
        self.region = region;
        Ok(self)
    }

    pub fn curvatures(&self) -> &[f64] {
        &self.curvatures
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn noise_sigma(&self) -> f64 {
        self.sigma
    }

    /// Strong-convexity modulus `min_i c_i`.
    pub fn strong_convexity(&self) -> f64 {
        self.curvatures.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Unconstrained minimizer of `Σ λ_i f_i`: `Σ λ_i c_i center_i / Σ λ_i c_i`.
    pub fn weighted_minimizer(&self, lambda: &[f64]) -> Vec<f64> {
        let n = self.region.dim();
        let mut out = alloc::vec![0.0; n];
        let mut total = 0.0;
        for ((l, c), center) in lambda.iter().zip(&self.curvatures).zip(&self.centers) {
            let w = l * c;
            total += w;
            for (o, v) in out.iter_mut().zip(center) {
                *o += w * v;
            }
        }
        for o in &mut out {
            *o /= total;
        }
        out
    }

    /// `Σ λ_i f_i(x)`.
    pub fn weighted_value(&self, lambda: &[f64], x: &[f64]) -> f64 {
        lambda
            .iter()
            .enumerate()
            .map(|(i, l)| l * self.value(i, x))
            .sum()
    }
}

/// Euclidean distance from `x` to the segment `[a, b]`.
pub fn segment_distance(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = b.iter().zip(a).map(|(u, v)| u - v).collect();
    let len2: f64 = ab.iter().map(|v| v * v).sum();
    let t = if len2 == 0.0 {
        0.0
    } else {
        let proj: f64 = x.iter().zip(a).zip(&ab).map(|((xi, ai), d)| (xi - ai) * d).sum();
        (proj / len2).clamp(0.0, 1.0)
    };
    let d2: f64 = x
        .iter()
        .zip(a)
        .zip(&ab)
        .map(|((xi, ai), d)| {
            let r = xi - (ai + t * d);
            r * r
        })
        .sum();
    libm::sqrt(d2)
}

impl Problem for Quadratics {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.region.dim()
    }

    fn num_objectives(&self) -> usize {
        self.curvatures.len()
    }

    fn region(&self) -> &BoxRegion {
        &self.region
    }

    /// The region where bounded, else the centers' bounding box widened by 2.
    fn sampling_region(&self) -> BoxRegion {
        let n = self.region.dim();
        let (mut lo, mut hi) = (alloc::vec![0.0; n], alloc::vec![0.0; n]);
        for j in 0..n {
            let cmin = self.centers.iter().map(|c| c[j]).fold(f64::INFINITY, f64::min);
            let cmax = self.centers.iter().map(|c| c[j]).fold(f64::NEG_INFINITY, f64::max);
            let (rl, ru) = (self.region.lower()[j], self.region.upper()[j]);
            lo[j] = if rl.is_finite() { rl } else { cmin - 2.0 };
            hi[j] = if ru.is_finite() { ru } else { cmax + 2.0 };
        }
        BoxRegion::new(lo, hi).expect("ordered bounds")
    }

    fn value(&self, i: usize, x: &[f64]) -> f64 {
        let d2: f64 = x
            .iter()
            .zip(&self.centers[i])
            .map(|(u, v)| (u - v) * (u - v))
            .sum();
        0.5 * self.curvatures[i] * d2
    }

    fn gradient(&self, i: usize, x: &[f64], out: &mut [f64]) {
        let c = self.curvatures[i];
        for ((o, u), v) in out.iter_mut().zip(x).zip(&self.centers[i]) {
            *o = c * (u - v);
        }
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
        self.gradient(i, x, out);
        if self.sigma > 0.0 {
            let scale = self.sigma / libm::sqrt(batch as f64);
            for o in out.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *o += scale * z;
            }
        }
        Ok(())
    }
}
