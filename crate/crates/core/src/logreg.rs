//! Per-group regularized logistic regression.
//!
//! For a group `J` of rows `(a_j, y_j)`, `y_j = ±1`, and a model `(x, b)`:
//!
//! ```text
//! f_J(x, b) = (1/|J|) Σ_{j ∈ J} log(1 + exp(-y_j (xᵀa_j + b))) + (reg/2) ‖x‖²
//! ```
//!
//! The intercept `b` is not regularized. As a [`Problem`] the decision vector is
//! `(x_1, ..., x_d, b)`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::RngCore;

use crate::error::{invalid, Result};
use crate::problems::{check_batch, Problem};
use crate::smg::StepSchedule;
use crate::types::BoxRegion;

/// One labelled example with sparse features `(index, value)`, indices 0-based
/// and strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: f64,
    pub features: Vec<(usize, f64)>,
}

impl Row {
    pub fn value(&self, j: usize) -> f64 {
        self.features
            .binary_search_by_key(&j, |&(i, _)| i)
            .map_or(0.0, |k| self.features[k].1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: Vec<Row>,
    feature_dim: usize,
}

impl Dataset {
    pub fn new(rows: Vec<Row>, feature_dim: usize) -> Result<Self> {
        for (r, row) in rows.iter().enumerate() {
            if row.label != 1.0 && row.label != -1.0 {
                return Err(invalid!("row {r}: label {} is not +1 or -1", row.label));
            }
            let mut prev: Option<usize> = None;
            for &(j, v) in &row.features {
                if j >= feature_dim {
                    return Err(invalid!("row {r}: feature {j} outside dimension {feature_dim}"));
                }
                if prev.is_some_and(|p| j <= p) {
                    return Err(invalid!("row {r}: feature indices must increase"));
                }
                if !v.is_finite() {
                    return Err(invalid!("row {r}: feature {j} is not finite"));
                }
                prev = Some(j);
            }
        }
        Ok(Self { rows, feature_dim })
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    /// The same rows with feature `j` removed and later features shifted down.
    pub fn without_feature(&self, j: usize) -> Result<Self> {
        if j >= self.feature_dim {
            return Err(invalid!("feature {j} outside dimension {}", self.feature_dim));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| Row {
                label: r.label,
                features: r
                    .features
                    .iter()
                    .filter(|&&(i, _)| i != j)
                    .map(|&(i, v)| (if i > j { i - 1 } else { i }, v))
                    .collect(),
            })
            .collect();
        Ok(Self {
            rows,
            feature_dim: self.feature_dim - 1,
        })
    }

    pub fn all_rows(&self) -> Vec<usize> {
        (0..self.rows.len()).collect()
    }
}

/// Two disjoint, nonempty row groups covering the dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSplit {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    /// 0-based feature the split was made on.
    pub feature: usize,
}

/// Rows with the smaller value of feature `feature` (0-based, absent = 0) go
/// to the first group, the others to the second.
pub fn split_by_feature(d: &Dataset, feature: usize) -> Result<GroupSplit> {
    if feature >= d.feature_dim() {
        return Err(invalid!("feature {} outside dimension {}", feature + 1, d.feature_dim()));
    }
    let values: Vec<f64> = d.rows().iter().map(|r| r.value(feature)).collect();
    let mut distinct = values.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() != 2 {
        let shown: Vec<f64> = distinct.iter().copied().take(10).collect();
        return Err(invalid!(
            "feature {} takes {} distinct values {:?}, expected exactly two",
            feature + 1,
            distinct.len(),
            shown
        ));
    }
    let (first, second) = (0..values.len()).partition(|&r| values[r] == distinct[0]);
    Ok(GroupSplit { first, second, feature })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            weights: vec![0.0; dim],
            intercept: 0.0,
        }
    }

    /// Splits `(x_1, ..., x_d, b)`.
    pub fn from_params(params: &[f64]) -> Result<Self> {
        let (&b, x) = params
            .split_last()
            .ok_or_else(|| invalid!("parameter vector is empty"))?;
        Ok(Self {
            weights: x.to_vec(),
            intercept: b,
        })
    }

    pub fn to_params(&self) -> Vec<f64> {
        let mut p = self.weights.clone();
        p.push(self.intercept);
        p
    }

    fn score(&self, row: &Row) -> f64 {
        score(&self.weights, self.intercept, row)
    }
}

fn score(x: &[f64], b: f64, row: &Row) -> f64 {
    row.features.iter().map(|&(j, v)| x[j] * v).sum::<f64>() + b
}

/// `log(1 + exp(t))` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + libm::log1p(libm::exp(-t))
    } else {
        libm::log1p(libm::exp(t))
    }
}

/// `1 / (1 + exp(-t))` without overflow.
fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + libm::exp(-t))
    } else {
        let e = libm::exp(t);
        e / (1.0 + e)
    }
}

fn check_group(d: &Dataset, group: &[usize]) -> Result<()> {
    if group.is_empty() {
        return Err(invalid!("row group is empty"));
    }
    if let Some(r) = group.iter().find(|&&r| r >= d.len()) {
        return Err(invalid!("row {r} outside the dataset"));
    }
    Ok(())
}

fn check_model(model: &LinearModel, d: &Dataset) -> Result<()> {
    if model.weights.len() != d.feature_dim() {
        return Err(invalid!(
            "model has {} weights, data has {} features",
            model.weights.len(),
            d.feature_dim()
        ));
    }
    Ok(())
}

fn loss_over(x: &[f64], b: f64, d: &Dataset, rows: impl Iterator<Item = usize>, reg: f64) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for r in rows {
        let row = &d.rows[r];
        total += softplus(-row.label * score(x, b, row));
        count += 1;
    }
    total / count as f64 + 0.5 * reg * x.iter().map(|v| v * v).sum::<f64>()
}

fn gradient_over(
    x: &[f64],
    b: f64,
    d: &Dataset,
    rows: impl Iterator<Item = usize>,
    reg: f64,
    out: &mut [f64],
) {
    out.fill(0.0);
    let n = x.len();
    let mut count = 0usize;
    for r in rows {
        let row = &d.rows[r];
        // d/dz log(1 + exp(-z)) = -sigmoid(-z), z = y (xᵀa + b)
        let coef = -row.label * sigmoid(-row.label * score(x, b, row));
        for &(j, v) in &row.features {
            out[j] += coef * v;
        }
        out[n] += coef;
        count += 1;
    }
    let scale = 1.0 / count as f64;
    for o in out.iter_mut() {
        *o *= scale;
    }
    for (o, w) in out[..n].iter_mut().zip(x) {
        *o += reg * w;
    }
}

pub fn group_objective_value(model: &LinearModel, d: &Dataset, group: &[usize], reg: f64) -> Result<f64> {
    check_group(d, group)?;
    check_model(model, d)?;
    if !(reg >= 0.0 && reg.is_finite()) {
        return Err(invalid!("regularization must be finite and >= 0, got {reg}"));
    }
    Ok(loss_over(&model.weights, model.intercept, d, group.iter().copied(), reg))
}

/// Gradient over `(x, b)` of the group loss on a minibatch of `batch` rows drawn
/// without replacement, or on the whole group for `None` (or `batch = |J|`).
pub fn group_objective_gradient(
    model: &LinearModel,
    d: &Dataset,
    group: &[usize],
    reg: f64,
    batch: Option<usize>,
    rng: &mut dyn RngCore,
) -> Result<Vec<f64>> {
    check_group(d, group)?;
    check_model(model, d)?;
    let mut out = vec![0.0; d.feature_dim() + 1];
    minibatch_gradient(&model.weights, model.intercept, d, group, reg, batch, rng, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn minibatch_gradient(
    x: &[f64],
    b: f64,
    d: &Dataset,
    group: &[usize],
    reg: f64,
    batch: Option<usize>,
    rng: &mut dyn RngCore,
    out: &mut [f64],
) -> Result<()> {
    match batch {
        Some(size) if size < group.len() => {
            check_batch(size)?;
            let picks = index::sample(rng, group.len(), size);
            gradient_over(x, b, d, picks.iter().map(|k| group[k]), reg, out);
        }
        Some(size) if size > group.len() => {
            return Err(invalid!("batch {size} exceeds the group size {}", group.len()));
        }
        _ => gradient_over(x, b, d, group.iter().copied(), reg, out),
    }
    Ok(())
}

/// Fraction of `group` classified correctly, predicting `+1` iff `xᵀa + b ≥ 0`.
pub fn accuracy(model: &LinearModel, d: &Dataset, group: &[usize]) -> Result<f64> {
    check_group(d, group)?;
    check_model(model, d)?;
    let hits = group
        .iter()
        .filter(|&&r| {
            let row = &d.rows[r];
            let predicted = if model.score(row) >= 0.0 { 1.0 } else { -1.0 };
            predicted == row.label
        })
        .count();
    Ok(hits as f64 / group.len() as f64)
}

/// Minibatch SG on the group loss from the zero model.
pub fn train_sg(
    d: &Dataset,
    group: &[usize],
    reg: f64,
    iters: usize,
    schedule: &StepSchedule,
    batch: usize,
    rng: &mut dyn RngCore,
) -> Result<LinearModel> {
    check_group(d, group)?;
    schedule.validate()?;
    check_batch(batch)?;
    let n = d.feature_dim();
    let mut params = vec![0.0; n + 1];
    let mut g = vec![0.0; n + 1];
    for k in 0..iters {
        let (x, b) = params.split_at(n);
        minibatch_gradient(x, b[0], d, group, reg, Some(batch), rng, &mut g)?;
        let alpha = schedule.at(k);
        for (p, gi) in params.iter_mut().zip(&g) {
            *p -= alpha * gi;
        }
    }
    LinearModel::from_params(&params)
}

/// One logistic objective per row group, over the unbounded `(x, b)` space.
#[derive(Debug, Clone)]
pub struct FairnessProblem {
    data: Arc<Dataset>,
    groups: Vec<Vec<usize>>,
    regs: Vec<f64>,
    region: BoxRegion,
}

/// The two-group problem for `split` with regularization `reg1`, `reg2`.
pub fn make_fairness_problem(
    d: Arc<Dataset>,
    split: &GroupSplit,
    reg1: f64,
    reg2: f64,
) -> Result<FairnessProblem> {
    FairnessProblem::new(d, vec![split.first.clone(), split.second.clone()], vec![reg1, reg2])
}

impl FairnessProblem {
    pub fn new(data: Arc<Dataset>, groups: Vec<Vec<usize>>, regs: Vec<f64>) -> Result<Self> {
        if groups.is_empty() || groups.len() != regs.len() {
            return Err(invalid!("need one regularization weight per group"));
        }
        for g in &groups {
            check_group(&data, g)?;
        }
        if let Some(r) = regs.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
            return Err(invalid!("regularization must be finite and >= 0, got {r}"));
        }
        let region = BoxRegion::unbounded(data.feature_dim() + 1);
        Ok(Self {
            data,
            groups,
            regs,
            region,
        })
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Accuracy of the model `params = (x, b)` on each group.
    pub fn group_accuracies(&self, params: &[f64]) -> Result<Vec<f64>> {
        let model = LinearModel::from_params(params)?;
        self.groups.iter().map(|g| accuracy(&model, &self.data, g)).collect()
    }
}

impl Problem for FairnessProblem {
    fn name(&self) -> &str {
        "fairness-logistic"
    }

    fn dim(&self) -> usize {
        self.region.dim()
    }

    fn num_objectives(&self) -> usize {
        self.groups.len()
    }

    fn region(&self) -> &BoxRegion {
        &self.region
    }

    fn sampling_region(&self) -> BoxRegion {
        BoxRegion::cube(self.dim(), -1.0, 1.0).expect("static bounds")
    }

    fn value(&self, i: usize, x: &[f64]) -> f64 {
        let (w, b) = x.split_at(x.len() - 1);
        loss_over(w, b[0], &self.data, self.groups[i].iter().copied(), self.regs[i])
    }

    fn gradient(&self, i: usize, x: &[f64], out: &mut [f64]) {
        let (w, b) = x.split_at(x.len() - 1);
        gradient_over(w, b[0], &self.data, self.groups[i].iter().copied(), self.regs[i], out);
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
        let (w, b) = x.split_at(x.len() - 1);
        minibatch_gradient(w, b[0], &self.data, &self.groups[i], self.regs[i], Some(batch), rng, out)
    }
}

/// Indices of `count` points at evenly spaced quantiles of `values`
/// (positions `round(j (L - 1) / (count - 1))` in ascending order).
pub fn quantile_indices(values: &[f64], count: usize) -> Vec<usize> {
    if values.is_empty() || count == 0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let last = values.len() - 1;
    if count == 1 {
        return vec![order[last / 2]];
    }
    (0..count)
        .map(|j| {
            let pos = libm::round(j as f64 * last as f64 / (count - 1) as f64) as usize;
            order[pos]
        })
        .collect()
}
