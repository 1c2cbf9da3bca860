//! The stochastic multi-gradient (SMG) iteration
//!
//! ```text
//! g_i   = sampled gradient of f_i at x_k        (i = 1..m, shared RNG, objective order)
//! λ_k   = argmin_{λ ∈ Δ^m} ‖Σ λ_i g_i‖²
//! x_k+1 = P_X(x_k - α_k Σ λ_k,i g_i)
//! ```
//!
//! There is no stopping test besides the iteration budget.
//!
//! The convergence theory behind the schedules involves Lipschitz constants,
//! the strong-convexity modulus and moment bounds of the sampled gradients.
//! None of them enter the iteration, so none of them are represented here.

use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use crate::error::{invalid, Error, Result};
use crate::problems::Problem;
use crate::simplex::{self, MultiGradient, SimplexWeights};
use crate::types::DecisionVector;

mod bias;
mod schedule;

pub use bias::{
    bias_instance, measure_bias, measure_bias_both, BiasPoint, WeightMode, BIAS_BATCHES,
    BIAS_CENTERS, BIAS_REPS, BIAS_TERMS, BIAS_VARIANCE,
};
pub use schedule::{step_size, StepSchedule};

/// Constants for the dynamic sample-size rule
/// `σ_i √n / √b_i ≤ α (C_i + Ĉ_i · proxy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchPolicy {
    pub sigma: Vec<f64>,
    pub dim: usize,
    pub c: Vec<f64>,
    pub c_hat: Vec<f64>,
    /// Stand-in for `‖∇f_i(x_k)‖`.
    pub grad_norm_proxy: f64,
}

impl BatchPolicy {
    pub fn validate(&self, m: usize) -> Result<()> {
        if self.sigma.len() != m || self.c.len() != m || self.c_hat.len() != m {
            return Err(invalid!("batch policy needs {m} entries for sigma, C and C_hat"));
        }
        let nonneg = |v: &f64| *v >= 0.0 && v.is_finite();
        if !self.sigma.iter().all(nonneg)
            || !self.c.iter().all(nonneg)
            || !self.c_hat.iter().all(nonneg)
            || !nonneg(&self.grad_norm_proxy)
        {
            return Err(invalid!("batch policy entries must be finite and >= 0"));
        }
        if self.dim == 0 {
            return Err(invalid!("batch policy dimension must be positive"));
        }
        Ok(())
    }
}

/// `b_i = ⌈(σ_i √n / (α (C_i + Ĉ_i · proxy)))²⌉`, at least 1.
pub fn dynamic_batch_size(policy: &BatchPolicy, alpha: f64) -> Result<Vec<usize>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid!("step must be positive, got {alpha}"));
    }
    policy.validate(policy.sigma.len())?;
    let root_n = libm::sqrt(policy.dim as f64);
    policy
        .sigma
        .iter()
        .zip(&policy.c)
        .zip(&policy.c_hat)
        .map(|((&s, &c), &ch)| {
            let bound = c + ch * policy.grad_norm_proxy;
            if bound == 0.0 {
                return Err(invalid!("C_i + C_hat_i * proxy is zero"));
            }
            let ratio = s * root_n / (alpha * bound);
            let b = libm::ceil(ratio * ratio);
            if !b.is_finite() || b > usize::MAX as f64 {
                return Err(Error::Numeric(alloc::format!("batch size {b} overflows")));
            }
            Ok((b as usize).max(1))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum BatchSize {
    Fixed(usize),
    Dynamic(BatchPolicy),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmgConfig {
    pub max_iters: usize,
    pub schedule: StepSchedule,
    pub batch: BatchSize,
    pub seed: u64,
    pub record_trajectory: bool,
}

impl SmgConfig {
    pub fn validate(&self, m: usize) -> Result<()> {
        self.schedule.validate()?;
        match &self.batch {
            BatchSize::Fixed(0) => Err(invalid!("batch size must be positive")),
            BatchSize::Fixed(_) => Ok(()),
            BatchSize::Dynamic(policy) => policy.validate(m),
        }
    }
}

/// Record of one SMG run. Row `k` of `weights`, `steps` and `values` belongs to
/// the step from `x_k` to `x_{k+1}`; `values[k]` holds `F(x_{k+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmgTrace {
    pub initial_values: Vec<f64>,
    /// `x_0, ..., x_K` when trajectories are recorded.
    pub iterates: Option<Vec<DecisionVector>>,
    pub weights: Vec<SimplexWeights>,
    pub values: Vec<Vec<f64>>,
    pub steps: Vec<f64>,
    pub final_point: DecisionVector,
}

impl SmgTrace {
    pub fn final_values(&self) -> &[f64] {
        self.values.last().unwrap_or(&self.initial_values)
    }
}

/// Min-norm combination, with the closed form for two objectives.
pub(crate) fn multi_gradient(gradients: &[Vec<f64>]) -> Result<MultiGradient> {
    if gradients.len() == 2 {
        simplex::solve_min_norm_pair(&gradients[0], &gradients[1])
    } else {
        let m = gradients.len();
        simplex::solve_min_norm(gradients, simplex::DEFAULT_TOL, simplex::default_max_iters(m))
    }
}

/// Where the per-objective gradients come from.
pub(crate) enum Oracle<'a> {
    Sampled {
        batches: &'a [usize],
        rng: &'a mut dyn RngCore,
    },
    Exact,
}

/// One projected step along the negative multi-gradient.
pub(crate) fn step_with<P: Problem + ?Sized>(
    p: &P,
    x: &[f64],
    alpha: f64,
    oracle: Oracle<'_>,
    grads: &mut Vec<Vec<f64>>,
) -> Result<(Vec<f64>, MultiGradient)> {
    let (n, m) = (p.dim(), p.num_objectives());
    debug_assert!(p.region().contains(x), "iterate left the feasible region");
    grads.resize_with(m, Vec::new);
    for g in grads.iter_mut() {
        g.resize(n, 0.0);
    }
    match oracle {
        Oracle::Sampled { batches, rng } => {
            for (i, g) in grads.iter_mut().enumerate() {
                p.stochastic_gradient(i, x, batches[i], rng, g)?;
            }
        }
        Oracle::Exact => {
            for (i, g) in grads.iter_mut().enumerate() {
                p.gradient(i, x, g);
            }
        }
    }
    if grads.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite gradient".into()));
    }
    let mg = multi_gradient(grads)?;
    let mut next: Vec<f64> = x.iter().zip(&mg.direction).map(|(u, d)| u - alpha * d).collect();
    p.region().clamp_in_place(&mut next);
    if next.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("iterate became non-finite".into()));
    }
    Ok((next, mg))
}

/// One SMG step with the same batch size for every objective.
pub fn smg_step<P: Problem + ?Sized>(
    x: &DecisionVector,
    p: &P,
    alpha: f64,
    batch: usize,
    rng: &mut dyn RngCore,
) -> Result<(DecisionVector, MultiGradient)> {
    check_start(x, p)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid!("step must be positive, got {alpha}"));
    }
    let batches = vec![batch; p.num_objectives()];
    let mut grads = Vec::new();
    let (next, mg) = step_with(p, x, alpha, Oracle::Sampled { batches: &batches, rng }, &mut grads)?;
    Ok((DecisionVector::new(next)?, mg))
}

/// One deterministic multi-gradient step using true gradients.
pub fn mg_step<P: Problem + ?Sized>(
    x: &DecisionVector,
    p: &P,
    alpha: f64,
) -> Result<(DecisionVector, MultiGradient)> {
    check_start(x, p)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid!("step must be positive, got {alpha}"));
    }
    let (next, mg) = step_with(p, x, alpha, Oracle::Exact, &mut Vec::new())?;
    Ok((DecisionVector::new(next)?, mg))
}

fn check_start<P: Problem + ?Sized>(x: &DecisionVector, p: &P) -> Result<()> {
    p.region().check_dim(x.len())?;
    if !p.region().contains(x) {
        return Err(invalid!("starting point lies outside the feasible region"));
    }
    Ok(())
}

/// Runs SMG from `x0` with the RNG stream derived from `cfg.seed`.
pub fn run_smg<P: Problem + ?Sized>(x0: &DecisionVector, p: &P, cfg: &SmgConfig) -> Result<SmgTrace> {
    let mut rng = crate::rng::stream(cfg.seed, &[]);
    run_smg_with_rng(x0, p, cfg, &mut rng)
}

/// Runs SMG drawing every sample from `rng`.
pub fn run_smg_with_rng<P: Problem + ?Sized>(
    x0: &DecisionVector,
    p: &P,
    cfg: &SmgConfig,
    rng: &mut dyn RngCore,
) -> Result<SmgTrace> {
    let m = p.num_objectives();
    cfg.validate(m)?;
    check_start(x0, p)?;
    let mut x = x0.as_slice().to_vec();
    let mut trace = SmgTrace {
        initial_values: p.values(&x),
        iterates: cfg.record_trajectory.then(|| vec![x0.clone()]),
        weights: Vec::with_capacity(cfg.max_iters),
        values: Vec::with_capacity(cfg.max_iters),
        steps: Vec::with_capacity(cfg.max_iters),
        final_point: x0.clone(),
    };
    let mut grads = Vec::new();
    let mut batches = vec![0usize; m];
    for k in 0..cfg.max_iters {
        let alpha = cfg.schedule.at(k);
        match &cfg.batch {
            BatchSize::Fixed(b) => batches.fill(*b),
            BatchSize::Dynamic(policy) => batches = dynamic_batch_size(policy, alpha)?,
        }
        let oracle = Oracle::Sampled {
            batches: &batches,
            rng: &mut *rng,
        };
        let (next, mg) = step_with(p, &x, alpha, oracle, &mut grads)?;
        x = next;
        trace.values.push(p.values(&x));
        trace.weights.push(mg.weights);
        trace.steps.push(alpha);
        if let Some(iterates) = trace.iterates.as_mut() {
            iterates.push(DecisionVector::new(x.clone())?);
        }
    }
    trace.final_point = DecisionVector::new(x)?;
    Ok(trace)
}
