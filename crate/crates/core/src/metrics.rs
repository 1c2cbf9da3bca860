//! Front-quality metrics and performance profiles.
//!
//! For a front with `M` points and a fixed pair of extreme points, sort the
//! `M + 2` values of each objective `i` and let `δ_{i,0}, ..., δ_{i,M}` be the
//! consecutive gaps. Then
//!
//! ```text
//! Γ = max_i max_j δ_{i,j}
//! Δ = max_i (δ_{i,0} + δ_{i,M} + Σ_{j=1}^{M-1} |δ_{i,j} - δ̄_i|) / (δ_{i,0} + δ_{i,M} + (M - 1) δ̄_i)
//! ```
//!
//! with `δ̄_i` the mean of the interior gaps `δ_{i,1..M-1}`. Front points equal
//! to an extreme point are dropped first. With `M ≤ 1` there are no interior
//! gaps and Δ is 1.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::pareto::nondominated_mask;

/// Default infinity-norm tolerance for matching front points to the reference.
pub const PURITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontMetrics {
    pub purity: f64,
    pub gamma: f64,
    pub delta: f64,
}

fn check_m<V: AsRef<[f64]>>(points: &[V], m: usize) -> Result<()> {
    if let Some(p) = points.iter().find(|p| p.as_ref().len() != m) {
        return Err(invalid!("objective vectors of length {} and {m} mixed", p.as_ref().len()));
    }
    if points.iter().flat_map(|p| p.as_ref()).any(|v| !v.is_finite()) {
        return Err(invalid!("objective values must be finite"));
    }
    Ok(())
}

/// Nondominated members of the union of `fronts`, without exact repeats.
pub fn build_reference<V: AsRef<[f64]>>(fronts: &[Vec<V>]) -> Result<Vec<Vec<f64>>> {
    let mut seen = BTreeSet::new();
    let union: Vec<Vec<f64>> = fronts
        .iter()
        .flatten()
        .map(|p| p.as_ref().to_vec())
        .filter(|p| seen.insert(p.iter().map(|v| (v + 0.0).to_bits()).collect::<Vec<_>>()))
        .collect();
    if let Some(first) = union.first() {
        check_m(&union, first.len())?;
    }
    let keep = nondominated_mask(&union);
    Ok(union.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect())
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(u, v)| (u - v).abs() <= tol)
}

/// Fraction of `front` within `tol` (infinity norm) of some reference point.
pub fn purity<V: AsRef<[f64]>, W: AsRef<[f64]>>(front: &[V], reference: &[W], tol: f64) -> Result<f64> {
    if front.is_empty() {
        return Err(invalid!("purity of an empty front is undefined"));
    }
    let m = front[0].as_ref().len();
    check_m(front, m)?;
    check_m(reference, m)?;
    let hits = front
        .iter()
        .filter(|p| reference.iter().any(|r| close(p.as_ref(), r.as_ref(), tol)))
        .count();
    Ok(hits as f64 / front.len() as f64)
}

/// The reference points with the smallest and largest value of the objective
/// with the widest range (lowest index on ties).
pub fn extreme_points<V: AsRef<[f64]>>(reference: &[V]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut seen = BTreeSet::new();
    let unique: Vec<&[f64]> = reference
        .iter()
        .map(|p| p.as_ref())
        .filter(|p| seen.insert(p.iter().map(|v| (v + 0.0).to_bits()).collect::<Vec<_>>()))
        .collect();
    if unique.len() < 2 {
        return Err(invalid!("need at least two distinct reference points, got {}", unique.len()));
    }
    let m = unique[0].len();
    check_m(&unique, m)?;
    let argmin = |i: usize| (0..unique.len()).fold(0, |b, j| if unique[j][i] < unique[b][i] { j } else { b });
    let argmax = |i: usize| (0..unique.len()).fold(0, |b, j| if unique[j][i] > unique[b][i] { j } else { b });
    let mut k = 0;
    let mut widest = f64::NEG_INFINITY;
    for i in 0..m {
        let range = unique[argmax(i)][i] - unique[argmin(i)][i];
        if range > widest {
            widest = range;
            k = i;
        }
    }
    Ok((unique[argmin(k)].to_vec(), unique[argmax(k)].to_vec()))
}

/// Sorted gaps `δ_{i,0..M}` per objective.
fn axis_gaps<V: AsRef<[f64]>>(front: &[V], extremes: (&[f64], &[f64])) -> Result<Vec<Vec<f64>>> {
    if front.is_empty() {
        return Err(invalid!("spread of an empty front is undefined"));
    }
    let m = extremes.0.len();
    if extremes.1.len() != m {
        return Err(invalid!("extreme points have different lengths"));
    }
    check_m(front, m)?;
    check_m(&[extremes.0, extremes.1], m)?;
    let inner: Vec<&[f64]> = front
        .iter()
        .map(|p| p.as_ref())
        .filter(|p| *p != extremes.0 && *p != extremes.1)
        .collect();
    Ok((0..m)
        .map(|i| {
            let mut v: Vec<f64> = inner.iter().map(|p| p[i]).collect();
            v.push(extremes.0[i]);
            v.push(extremes.1[i]);
            v.sort_by(f64::total_cmp);
            v.windows(2).map(|w| w[1] - w[0]).collect()
        })
        .collect())
}

/// Largest gap Γ between consecutive values along any objective.
pub fn gamma_spread<V: AsRef<[f64]>>(front: &[V], extremes: (&[f64], &[f64])) -> Result<f64> {
    let gaps = axis_gaps(front, extremes)?;
    Ok(gaps.iter().flatten().copied().fold(0.0, f64::max))
}

/// Point spread Δ.
pub fn delta_spread<V: AsRef<[f64]>>(front: &[V], extremes: (&[f64], &[f64])) -> Result<f64> {
    let gaps = axis_gaps(front, extremes)?;
    let mut worst: f64 = 0.0;
    for (i, g) in gaps.iter().enumerate() {
        let last = g.len() - 1;
        if last == 0 {
            // no front point strictly between the extremes
            worst = worst.max(1.0);
            continue;
        }
        let interior = &g[1..last];
        let mean = if interior.is_empty() {
            0.0
        } else {
            interior.iter().sum::<f64>() / interior.len() as f64
        };
        let ends = g[0] + g[last];
        let num = ends + interior.iter().map(|d| (d - mean).abs()).sum::<f64>();
        let den = ends + interior.len() as f64 * mean;
        if den == 0.0 {
            return Err(Error::Numeric(alloc::format!(
                "point spread undefined: all values on objective {i} coincide"
            )));
        }
        worst = worst.max(num / den);
    }
    Ok(worst)
}

/// Purity against `reference` and spreads against its extreme points.
pub fn front_metrics<V: AsRef<[f64]>, W: AsRef<[f64]>>(
    front: &[V],
    reference: &[W],
    extremes: (&[f64], &[f64]),
    tol: f64,
) -> Result<FrontMetrics> {
    Ok(FrontMetrics {
        purity: purity(front, reference, tol)?,
        gamma: gamma_spread(front, extremes)?,
        delta: delta_spread(front, extremes)?,
    })
}

/// Performance ratios `r[s][p] ≥ 1` of solvers `s` on problems `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceProfile {
    ratios: Vec<Vec<f64>>,
}

impl PerformanceProfile {
    pub fn ratios(&self) -> &[Vec<f64>] {
        &self.ratios
    }

    /// Fraction of problems on which solver `s` is within a factor `tau` of the best.
    pub fn rho(&self, s: usize, tau: f64) -> f64 {
        let r = &self.ratios[s];
        r.iter().filter(|&&v| v <= tau).count() as f64 / r.len() as f64
    }

    /// Distinct ratios across all solvers, ascending; the curves only jump there.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut taus: Vec<f64> = self.ratios.iter().flatten().copied().collect();
        taus.sort_by(f64::total_cmp);
        taus.dedup();
        taus
    }
}

/// Ratios against the best solver per problem: `value / best` when lower is
/// better, `best / value` when higher is better.
pub fn performance_profile(values: &[Vec<f64>], higher_is_better: bool) -> Result<PerformanceProfile> {
    if values.is_empty() || values[0].is_empty() {
        return Err(invalid!("need at least one solver and one problem"));
    }
    let np = values[0].len();
    if values.iter().any(|row| row.len() != np) {
        return Err(invalid!("every solver needs a value for each of the {np} problems"));
    }
    if let Some(v) = values.iter().flatten().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(invalid!("profile values must be finite and positive, got {v}"));
    }
    let best: Vec<f64> = (0..np)
        .map(|p| {
            let col = values.iter().map(|row| row[p]);
            if higher_is_better {
                col.fold(f64::NEG_INFINITY, f64::max)
            } else {
                col.fold(f64::INFINITY, f64::min)
            }
        })
        .collect();
    let ratios = values
        .iter()
        .map(|row| {
            row.iter()
                .zip(&best)
                .map(|(&v, &b)| if higher_is_better { b / v } else { v / b })
                .collect()
        })
        .collect();
    Ok(PerformanceProfile { ratios })
}
