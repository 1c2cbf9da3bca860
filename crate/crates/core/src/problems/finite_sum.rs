//! Linear finite sums `f_i(x) = (1/N) Σ_j a_ijᵀ x`.
//!
//! The stochastic gradient is the mean of `b` of the `a_ij`, drawn without
//! replacement. A batch of size `N` uses every term in natural order and is
//! therefore bit-identical to the true gradient.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use super::{check_batch, Problem};
use crate::error::{invalid, Result};
use crate::types::BoxRegion;

#[derive(Debug, Clone)]
pub struct FiniteSumLinear {
    /// `terms[i][j]` is the gradient of the `j`-th summand of objective `i`.
    terms: Vec<Vec<Vec<f64>>>,
    means: Vec<Vec<f64>>,
    region: BoxRegion,
}

fn mean_of<'a>(rows: impl Iterator<Item = &'a Vec<f64>>, out: &mut [f64]) {
    out.fill(0.0);
    let mut count = 0usize;
    for row in rows {
        for (o, v) in out.iter_mut().zip(row) {
            *o += v;
        }
        count += 1;
    }
    let scale = 1.0 / count as f64;
    for o in out.iter_mut() {
        *o *= scale;
    }
}

impl FiniteSumLinear {
    pub fn new(terms: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if terms.is_empty() || terms.iter().any(|t| t.is_empty()) {
            return Err(invalid!("every objective needs at least one summand"));
        }
        let n = terms[0][0].len();
        if n == 0 || terms.iter().flatten().any(|row| row.len() != n) {
            return Err(invalid!("summand gradients must share a positive dimension"));
        }
        if terms.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(invalid!("summand gradients must be finite"));
        }
        let means = terms
            .iter()
            .map(|t| {
                let mut m = vec![0.0; n];
                mean_of(t.iter(), &mut m);
                m
            })
            .collect();
        Ok(Self {
            terms,
            means,
            region: BoxRegion::unbounded(n),
        })
    }

    /// `count` summands per objective, `a_ij = centers[i] + √variance · z`, `z ~ N(0, I)`.
    pub fn gaussian_around(
        centers: &[Vec<f64>],
        count: usize,
        variance: f64,
        rng: &mut dyn RngCore,
    ) -> Result<Self> {
        if !(variance >= 0.0 && variance.is_finite()) {
            return Err(invalid!("variance must be finite and >= 0, got {variance}"));
        }
        if count == 0 {
            return Err(invalid!("need at least one summand"));
        }
        let sd = libm::sqrt(variance);
        let terms = centers
            .iter()
            .map(|c| {
                (0..count)
                    .map(|_| {
                        c.iter()
                            .map(|v| {
                                let z: f64 = rng.sample(StandardNormal);
                                v + sd * z
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self::new(terms)
    }

    /// Number of summands of objective `i`.
    pub fn len(&self, i: usize) -> usize {
        self.terms[i].len()
    }

    pub fn terms(&self, i: usize) -> &[Vec<f64>] {
        &self.terms[i]
    }
}

impl Problem for FiniteSumLinear {
    fn name(&self) -> &str {
        "finite-sum-linear"
    }

    fn dim(&self) -> usize {
        self.region.dim()
    }

    fn num_objectives(&self) -> usize {
        self.terms.len()
    }

    fn region(&self) -> &BoxRegion {
        &self.region
    }

    fn sampling_region(&self) -> BoxRegion {
        BoxRegion::cube(self.dim(), -1.0, 1.0).expect("static bounds")
    }

    fn value(&self, i: usize, x: &[f64]) -> f64 {
        crate::types::dot(&self.means[i], x)
    }

    fn gradient(&self, i: usize, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.means[i]);
    }

    fn stochastic_gradient(
        &self,
        i: usize,
        _x: &[f64],
        batch: usize,
        rng: &mut dyn RngCore,
        out: &mut [f64],
    ) -> Result<()> {
        check_batch(batch)?;
        let total = self.terms[i].len();
        if batch > total {
            return Err(invalid!("batch {batch} exceeds the {total} summands"));
        }
        if batch == total {
            out.copy_from_slice(&self.means[i]);
            return Ok(());
        }
        let picks = index::sample(rng, total, batch);
        mean_of(picks.iter().map(|j| &self.terms[i][j]), out);
        Ok(())
    }
}
