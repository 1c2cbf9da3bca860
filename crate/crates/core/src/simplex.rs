//! The min-norm element of the convex hull of a set of gradients.
//!
//! Given gradients `g_1, ..., g_m` the weights `λ ∈ Δ^m` minimizing
//! `‖Σ λ_i g_i‖²` define the multi-gradient `d = Σ λ_i g_i`; `-d` is a
//! common descent direction, and `d = 0` exactly at Pareto stationary points.
//!
//! [`solve_min_norm`] is a primal active-set method started from the uniform
//! weights. On each face it moves to the closest minimizer of that face, so
//! when the minimizer is not unique (parallel or repeated gradients) the
//! returned weights are the ones nearest the starting point.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::types::{dot, norm};

/// Default tolerance on objective decrease and KKT violation.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Sum-to-one tolerance accepted by [`SimplexWeights::new`].
const SIMPLEX_SUM_TOL: f64 = 1e-12;

/// Default iteration cap for `m` gradients.
pub fn default_max_iters(m: usize) -> usize {
    10 * m.max(1) * 1000
}

/// A point of the unit simplex `Δ^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexWeights(Vec<f64>);

impl SimplexWeights {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(invalid!("simplex weights must be nonempty"));
        }
        if lambda.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(invalid!("simplex weights must be finite and nonnegative"));
        }
        let sum: f64 = lambda.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
            return Err(invalid!("simplex weights sum to {sum}, not 1"));
        }
        Ok(Self(lambda))
    }

    /// `(1/m, ..., 1/m)`.
    pub fn uniform(m: usize) -> Self {
        Self(vec![1.0 / m as f64; m])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for SimplexWeights {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// The combined gradient `direction = Σ λ_i g_i` (not negated) with its weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiGradient {
    pub direction: Vec<f64>,
    pub weights: SimplexWeights,
    /// `‖direction‖`
    pub norm: f64,
}

impl MultiGradient {
    fn from_weights<G: AsRef<[f64]>>(gradients: &[G], lambda: Vec<f64>) -> Self {
        let direction = combine(gradients, &lambda);
        let norm = norm(&direction);
        Self {
            direction,
            weights: SimplexWeights(lambda),
            norm,
        }
    }
}

/// `Σ λ_i g_i`.
pub fn combine<G: AsRef<[f64]>>(gradients: &[G], lambda: &[f64]) -> Vec<f64> {
    let n = gradients[0].as_ref().len();
    let mut out = vec![0.0; n];
    for (g, &l) in gradients.iter().zip(lambda) {
        for (o, v) in out.iter_mut().zip(g.as_ref()) {
            *o += l * v;
        }
    }
    out
}

fn validate<G: AsRef<[f64]>>(gradients: &[G]) -> Result<usize> {
    let first = gradients
        .first()
        .ok_or_else(|| invalid!("gradient list is empty"))?;
    let n = first.as_ref().len();
    for (i, g) in gradients.iter().enumerate() {
        let g = g.as_ref();
        if g.len() != n {
            return Err(invalid!(
                "gradient {i} has dimension {}, expected {n}",
                g.len()
            ));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(invalid!("gradient {i} has non-finite entries"));
        }
    }
    Ok(n)
}

/// Orthonormal basis of `{p ∈ R^s : Σ p = 0}` (Helmert contrasts), column-major `s × (s-1)`.
fn sum_zero_basis(s: usize) -> DMatrix<f64> {
    DMatrix::from_fn(s, s - 1, |row, col| {
        let k = (col + 1) as f64;
        let scale = 1.0 / libm::sqrt(k * (k + 1.0));
        if row <= col {
            scale
        } else if row == col + 1 {
            -k * scale
        } else {
            0.0
        }
    })
}

/// Smallest-norm step `p` (supported on `support`, summing to zero) that
/// minimizes `‖G (λ + p)‖²` over the face.
fn face_step<G: AsRef<[f64]>>(
    gradients: &[G],
    support: &[usize],
    direction: &[f64],
    rank_tol: f64,
) -> Vec<f64> {
    let s = support.len();
    if s < 2 {
        return vec![0.0; s];
    }
    let n = direction.len();
    let basis = sum_zero_basis(s);
    let gs = DMatrix::from_fn(n, s, |row, col| gradients[support[col]].as_ref()[row]);
    let a = &gs * &basis;
    let b = DVector::from_iterator(n, direction.iter().map(|v| -v));
    let svd = a.svd(true, true);
    let y = match svd.solve(&b, rank_tol) {
        Ok(y) => y,
        Err(_) => return vec![0.0; s],
    };
    let p = basis * y;
    p.iter().copied().collect()
}

/// Min-norm point of the convex hull of `gradients`.
///
/// `tol` bounds the KKT violation `min_i g_i·d - ‖d‖²` relative to
/// `max_i ‖g_i‖²`; `max_iters` caps the number of face changes.
pub fn solve_min_norm<G: AsRef<[f64]>>(
    gradients: &[G],
    tol: f64,
    max_iters: usize,
) -> Result<MultiGradient> {
    let n = validate(gradients)?;
    if !(tol > 0.0) {
        return Err(invalid!("tolerance must be positive, got {tol}"));
    }
    let m = gradients.len();
    if m == 1 {
        return Ok(MultiGradient {
            direction: gradients[0].as_ref().to_vec(),
            norm: norm(gradients[0].as_ref()),
            weights: SimplexWeights(vec![1.0]),
        });
    }

    let scale = gradients
        .iter()
        .map(|g| dot(g.as_ref(), g.as_ref()))
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Ok(MultiGradient::from_weights(gradients, vec![1.0 / m as f64; m]));
    }
    let kkt_tol = tol * scale;
    let rank_tol = 1e-12 * libm::sqrt(scale) * libm::sqrt(n.max(m) as f64);

    let mut lambda = vec![1.0 / m as f64; m];
    let mut support: Vec<usize> = (0..m).collect();
    let mut at_face_minimum = false;

    for _ in 0..max_iters {
        let direction = combine(gradients, &lambda);
        if !at_face_minimum {
            let p = face_step(gradients, &support, &direction, rank_tol);
            let moves = p
                .iter()
                .zip(&support)
                .any(|(&pi, &i)| pi.abs() > 1e-15 * (1.0 + lambda[i]));
            if moves {
                // ratio test against the nonnegativity constraints
                let mut t = 1.0;
                let mut blocking = None;
                for (k, (&pi, &i)) in p.iter().zip(&support).enumerate() {
                    if pi < 0.0 {
                        let ti = lambda[i] / -pi;
                        if ti < t {
                            t = ti;
                            blocking = Some(k);
                        }
                    }
                }
                for (&pi, &i) in p.iter().zip(&support) {
                    lambda[i] = (lambda[i] + t * pi).max(0.0);
                }
                match blocking {
                    Some(k) => {
                        lambda[support[k]] = 0.0;
                        support.remove(k);
                    }
                    None => at_face_minimum = true,
                }
                normalize(&mut lambda);
                continue;
            }
        }

        // face minimum reached: check the Wolfe / KKT condition off the support
        let dd = dot(&direction, &direction);
        let entering = (0..m)
            .filter(|i| !support.contains(i))
            .map(|i| (i, dot(gradients[i].as_ref(), &direction) - dd))
            .filter(|&(_, v)| v < -kkt_tol)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match entering {
            Some((i, _)) => {
                let pos = support.partition_point(|&j| j < i);
                support.insert(pos, i);
                at_face_minimum = false;
            }
            None => return Ok(MultiGradient::from_weights(gradients, lambda)),
        }
    }
    // iteration cap: the current weights are feasible, return them
    Ok(MultiGradient::from_weights(gradients, lambda))
}

fn normalize(lambda: &mut [f64]) {
    let sum: f64 = lambda.iter().sum();
    for l in lambda.iter_mut() {
        *l /= sum;
    }
}

/// Projected-gradient variant: `λ ← P_Δ(λ - η ∇q(λ))` from the uniform weights,
/// with `η = 1 / (2‖GᵀG‖_F + ε)`, stopping once `q` decreases by less than `tol`.
///
/// Slower and less accurate than [`solve_min_norm`] on ill-conditioned
/// instances; kept as an independent route.
pub fn solve_min_norm_projected<G: AsRef<[f64]>>(
    gradients: &[G],
    tol: f64,
    max_iters: usize,
) -> Result<MultiGradient> {
    validate(gradients)?;
    if !(tol > 0.0) {
        return Err(invalid!("tolerance must be positive, got {tol}"));
    }
    let m = gradients.len();
    let gram: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| dot(gradients[i].as_ref(), gradients[j].as_ref()))
                .collect()
        })
        .collect();
    let frob = libm::sqrt(gram.iter().flatten().map(|v| v * v).sum::<f64>());
    let step = 1.0 / (2.0 * frob + f64::EPSILON);
    let objective = |l: &[f64]| -> f64 {
        (0..m)
            .map(|i| l[i] * (0..m).map(|j| gram[i][j] * l[j]).sum::<f64>())
            .sum()
    };

    let mut lambda = vec![1.0 / m as f64; m];
    let mut q = objective(&lambda);
    for _ in 0..max_iters {
        let trial: Vec<f64> = (0..m)
            .map(|i| lambda[i] - step * 2.0 * (0..m).map(|j| gram[i][j] * lambda[j]).sum::<f64>())
            .collect();
        let next = project_simplex(&trial)?.into_inner();
        let q_next = objective(&next);
        let improvement = q - q_next;
        lambda = next;
        q = q_next;
        if improvement < tol {
            break;
        }
    }
    Ok(MultiGradient::from_weights(gradients, lambda))
}

/// Closed form for two gradients:
/// `λ_1 = clamp((g2 - g1)·g2 / ‖g1 - g2‖², 0, 1)`, and `(0.5, 0.5)` when `g1 = g2`.
pub fn solve_min_norm_pair(g1: &[f64], g2: &[f64]) -> Result<MultiGradient> {
    validate(&[g1, g2])?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in g1.iter().zip(g2) {
        num += (b - a) * b;
        den += (a - b) * (a - b);
    }
    let l1 = if den == 0.0 {
        0.5
    } else {
        (num / den).clamp(0.0, 1.0)
    };
    Ok(MultiGradient::from_weights(&[g1, g2], vec![l1, 1.0 - l1]))
}

/// Euclidean projection onto the unit simplex (sort and threshold).
pub fn project_simplex(v: &[f64]) -> Result<SimplexWeights> {
    if v.is_empty() {
        return Err(invalid!("cannot project an empty vector onto the simplex"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(invalid!("cannot project a non-finite vector onto the simplex"));
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|x| (x - theta).max(0.0)).collect();
    let sum: f64 = out.iter().sum();
    if !(sum > 0.0) {
        return Err(Error::Numeric("simplex projection lost all mass".into()));
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
    Ok(SimplexWeights(out))
}

/// True when the min-norm element of the convex hull has norm at most `tol`.
pub fn is_pareto_stationary<G: AsRef<[f64]>>(gradients: &[G], tol: f64) -> Result<bool> {
    let mg = solve_min_norm(gradients, DEFAULT_TOL, default_max_iters(gradients.len()))?;
    Ok(mg.norm <= tol)
}
