//! Pareto-front approximation with multi-gradient bursts.
//!
//! Each outer iteration `k` of [`run_pf`]:
//!
//! 1. finds, for every objective, the adjacent pair of list points with the
//!    largest gap along that axis and adds `r` perturbations of both endpoints;
//! 2. runs, from every list point, `p` independent bursts of `q` steps
//!    (stochastic multi-gradient, or true multi-gradient with `p = 1`);
//! 3. keeps the points of the enlarged list that no other point dominates
//!    under the configured [`Dominance`] (weak by default, so ties in one
//!    objective cannot accumulate).
//!
//! All bursts of iteration `k` use step `α_k` of the schedule. The loop stops
//! after `max_outer_iters` iterations or once the list holds `max_list_size`
//! points, checked at the end of an iteration.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, RngCore};

use crate::error::{invalid, Error, Result};
use crate::problems::Problem;
use crate::rng::stream;
use crate::smg::{step_with, Oracle, StepSchedule};
use crate::types::{strictly_less, BoxRegion, DecisionVector, ObjectiveVector};

const INIT_STREAM: u64 = 1;
const PERTURB_STREAM: u64 = 2;
const BURST_STREAM: u64 = 3;

/// A decision vector with its true objective values.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    pub x: DecisionVector,
    pub fx: ObjectiveVector,
}

impl ArchiveEntry {
    /// Evaluates `p` at `x`; fails with [`Error::Numeric`] on non-finite values.
    pub fn evaluate<P: Problem + ?Sized>(p: &P, x: DecisionVector) -> Result<Self> {
        let fx = ObjectiveVector::new(p.values(&x))
            .map_err(|e| Error::Numeric(alloc::format!("{e}")))?;
        Ok(Self { x, fx })
    }
}

/// Entries no other entry strictly dominates, without repeated decision vectors.
///
/// Lists pruned with [`Dominance::Weak`] also hold no weakly dominated entry.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParetoArchive {
    entries: Vec<ArchiveEntry>,
}

impl ParetoArchive {
    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<ArchiveEntry> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn objective_vectors(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|e| e.fx.to_vec()).collect()
    }
}

fn bit_key(x: &[f64]) -> Vec<u64> {
    x.iter().map(|v| (v + 0.0).to_bits()).collect()
}

/// Which dominance relation prunes the list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dominance {
    /// Remove a point only if another is strictly smaller in every objective.
    Strict,
    /// Remove a point if another is no larger in every objective and differs.
    #[default]
    Weak,
}

/// Which of `points` no other point strictly dominates.
pub fn nondominated_mask<V: AsRef<[f64]>>(points: &[V]) -> Vec<bool> {
    mask(points, Dominance::Strict)
}

/// Which of `points` no other point weakly dominates.
pub fn weakly_nondominated_mask<V: AsRef<[f64]>>(points: &[V]) -> Vec<bool> {
    mask(points, Dominance::Weak)
}

fn leq(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(u, v)| u <= v)
}

fn mask<V: AsRef<[f64]>>(points: &[V], dominance: Dominance) -> Vec<bool> {
    let n = points.len();
    let mut keep = vec![true; n];
    if n < 2 {
        return keep;
    }
    let weak = dominance == Dominance::Weak;
    let m = points[0].as_ref().len();
    let mut order: Vec<usize> = (0..n).collect();
    let f = |i: usize, k: usize| points[i].as_ref()[k];
    let rest = |i: usize| &points[i].as_ref()[1..];
    order.sort_by(|&a, &b| f(a, 0).total_cmp(&f(b, 0)).then(a.cmp(&b)));
    if m == 1 {
        let best = f(order[0], 0);
        for &i in &order {
            keep[i] = f(i, 0) <= best;
        }
        return keep;
    }
    // Only points with a no larger first objective can dominate, and a
    // dominated dominator implies a surviving one.
    let mut survivors: Vec<usize> = Vec::new();
    let mut best_second = f64::INFINITY;
    let mut start = 0;
    while start < n {
        let f1 = f(order[start], 0);
        let mut end = start;
        while end < n && f(order[end], 0) == f1 {
            end += 1;
        }
        let group = &order[start..end];
        let group_second = group.iter().map(|&i| f(i, 1)).fold(f64::INFINITY, f64::min);
        for &i in group {
            keep[i] = match (m, weak) {
                (2, false) => !(best_second < f(i, 1)),
                (2, true) => best_second > f(i, 1) && f(i, 1) <= group_second,
                (_, false) => !survivors.iter().any(|&s| strictly_less(rest(s), rest(i))),
                (_, true) => {
                    !survivors.iter().any(|&s| leq(rest(s), rest(i)))
                        && !group
                            .iter()
                            .any(|&j| leq(rest(j), rest(i)) && rest(j) != rest(i))
                }
            };
        }
        for &i in group {
            if keep[i] {
                best_second = best_second.min(f(i, 1));
                survivors.push(i);
            }
        }
        start = end;
    }
    keep
}

/// Drops strictly dominated entries and repeated decision vectors, keeping order.
pub fn filter_nondominated(entries: Vec<ArchiveEntry>) -> ParetoArchive {
    filter_with(entries, Dominance::Strict)
}

/// Drops entries under `dominance` and repeated decision vectors, keeping order.
pub fn filter_with(entries: Vec<ArchiveEntry>, dominance: Dominance) -> ParetoArchive {
    let mut seen = BTreeSet::new();
    let unique: Vec<ArchiveEntry> = entries
        .into_iter()
        .filter(|e| seen.insert(bit_key(&e.x)))
        .collect();
    let keep = mask(&unique.iter().map(|e| e.fx.as_slice()).collect::<Vec<_>>(), dominance);
    ParetoArchive {
        entries: unique
            .into_iter()
            .zip(keep)
            .filter_map(|(e, k)| k.then_some(e))
            .collect(),
    }
}

/// For each objective, the adjacent pair (by that objective) with the largest gap.
///
/// Indices refer to `archive.entries()`; the pair is ordered by objective value.
/// Ties go to the lowest sorted position.
pub fn largest_holes(archive: &ParetoArchive) -> Vec<(usize, usize)> {
    let entries = archive.entries();
    if entries.len() < 2 {
        return Vec::new();
    }
    let m = entries[0].fx.len();
    let mut order: Vec<usize> = (0..entries.len()).collect();
    (0..m)
        .map(|i| {
            let f = |j: usize| entries[j].fx[i];
            order.sort_by(|&a, &b| f(a).total_cmp(&f(b)).then(a.cmp(&b)));
            let mut best = (order[0], order[1]);
            let mut best_gap = f(order[1]) - f(order[0]);
            for w in order.windows(2).skip(1) {
                let gap = f(w[1]) - f(w[0]);
                if gap > best_gap {
                    best_gap = gap;
                    best = (w[0], w[1]);
                }
            }
            best
        })
        .collect()
}

/// `r` points `P(x + u)`, `u` uniform on `Π_j [-radius_j, radius_j]`.
pub fn perturb_points(
    x: &DecisionVector,
    r: usize,
    radius: &[f64],
    region: &BoxRegion,
    rng: &mut dyn RngCore,
) -> Result<Vec<DecisionVector>> {
    region.check_dim(x.len())?;
    if radius.len() != x.len() || radius.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(invalid!("perturbation radius must have {} finite entries >= 0", x.len()));
    }
    (0..r)
        .map(|_| {
            let mut y: Vec<f64> = x
                .iter()
                .zip(radius)
                .map(|(v, h)| v + h * (2.0 * rng.random::<f64>() - 1.0))
                .collect();
            region.clamp_in_place(&mut y);
            DecisionVector::new(y)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfMode {
    /// Sampled gradients, `p` restarts per point.
    Smg,
    /// True gradients, one burst per point.
    Mg,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PerturbRadius {
    /// `fraction ×` the side of the sampling box, per coordinate.
    SideFraction(f64),
    PerCoordinate(Vec<f64>),
}

impl PerturbRadius {
    pub fn resolve(&self, sampling: &BoxRegion) -> Result<Vec<f64>> {
        match self {
            PerturbRadius::SideFraction(f) => {
                if !(f.is_finite() && *f >= 0.0) {
                    return Err(invalid!("radius fraction must be finite and >= 0, got {f}"));
                }
                Ok((0..sampling.dim())
                    .map(|j| f * sampling.side(j).unwrap_or(0.0))
                    .collect())
            }
            PerturbRadius::PerCoordinate(r) => Ok(r.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PfConfig {
    pub start_count: usize,
    /// Perturbations `r` per spawning point.
    pub perturbations: usize,
    /// Bursts `p` per list point in SMG mode.
    pub restarts: usize,
    /// Steps `q` per burst.
    pub burst_len: usize,
    pub max_outer_iters: usize,
    pub max_list_size: usize,
    pub perturb_radius: PerturbRadius,
    pub schedule: StepSchedule,
    /// Sample size of every stochastic gradient.
    pub batch: usize,
    /// Relation used to prune the list after each iteration.
    pub dominance: Dominance,
    pub seed: u64,
}

impl PfConfig {
    pub fn smg_defaults() -> Self {
        Self {
            start_count: 30,
            perturbations: 5,
            restarts: 2,
            burst_len: 2,
            max_outer_iters: 1000,
            max_list_size: 1500,
            perturb_radius: PerturbRadius::SideFraction(0.05),
            schedule: StepSchedule::PF_DEFAULT,
            batch: 1,
            dominance: Dominance::Weak,
            seed: 0,
        }
    }

    pub fn mg_defaults() -> Self {
        Self {
            perturbations: 10,
            restarts: 1,
            ..Self::smg_defaults()
        }
    }

    pub fn defaults(mode: PfMode) -> Self {
        match mode {
            PfMode::Smg => Self::smg_defaults(),
            PfMode::Mg => Self::mg_defaults(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        if self.batch == 0 {
            return Err(invalid!("batch size must be positive"));
        }
        Ok(())
    }

    fn bursts_per_point(&self, mode: PfMode) -> usize {
        match mode {
            PfMode::Smg => self.restarts,
            PfMode::Mg => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PfStats {
    pub outer_iters: usize,
    pub list_size: usize,
    /// Candidates dropped because a burst or an evaluation produced non-finite values.
    pub discarded: usize,
}

/// One burst: `(list point, restart)` for a given outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BurstTask {
    pub outer_iter: usize,
    pub point: usize,
    pub restart: usize,
}

/// Runs the independent bursts of one outer iteration.
///
/// Implementations must return the outcomes in task order.
pub trait BurstExecutor {
    fn run(
        &self,
        tasks: &[BurstTask],
        job: &(dyn Fn(&BurstTask) -> Result<Vec<f64>> + Sync),
    ) -> Vec<Result<Vec<f64>>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl BurstExecutor for Sequential {
    fn run(
        &self,
        tasks: &[BurstTask],
        job: &(dyn Fn(&BurstTask) -> Result<Vec<f64>> + Sync),
    ) -> Vec<Result<Vec<f64>>> {
        tasks.iter().map(job).collect()
    }
}

/// `count` points uniform in `region` (which must be bounded).
pub fn sample_uniform(region: &BoxRegion, count: usize, rng: &mut dyn RngCore) -> Result<Vec<DecisionVector>> {
    if !region.is_bounded() {
        return Err(invalid!("cannot sample uniformly from an unbounded region"));
    }
    (0..count)
        .map(|_| {
            let x = region
                .lower()
                .iter()
                .zip(region.upper())
                .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                .collect();
            DecisionVector::new(x)
        })
        .collect()
}

/// Starting points drawn uniformly from the problem's sampling box.
pub fn initial_points<P: Problem + ?Sized>(p: &P, cfg: &PfConfig) -> Result<Vec<DecisionVector>> {
    let mut rng = stream(cfg.seed, &[INIT_STREAM]);
    let sampling = p.sampling_region();
    let mut points = sample_uniform(&sampling, cfg.start_count, &mut rng)?;
    for x in &mut points {
        let mut y = x.to_vec();
        p.region().clamp_in_place(&mut y);
        *x = DecisionVector::new(y)?;
    }
    Ok(points)
}

fn is_numeric(e: &Error) -> bool {
    matches!(e, Error::Numeric(_))
}

/// Runs the front driver from sampled starting points, sequentially.
pub fn run_pf<P: Problem + ?Sized>(p: &P, cfg: &PfConfig, mode: PfMode) -> Result<(ParetoArchive, PfStats)> {
    let start = initial_points(p, cfg)?;
    run_pf_with(p, cfg, mode, start, &Sequential, &mut |_, _| {})
}

/// Runs the front driver from `start`, calling `observer(k, list)` after each
/// outer iteration `k`.
pub fn run_pf_with<P: Problem + ?Sized>(
    p: &P,
    cfg: &PfConfig,
    mode: PfMode,
    start: Vec<DecisionVector>,
    executor: &dyn BurstExecutor,
    observer: &mut dyn FnMut(usize, &ParetoArchive),
) -> Result<(ParetoArchive, PfStats)> {
    cfg.validate()?;
    if start.is_empty() {
        return Err(invalid!("the initial list is empty"));
    }
    let region = p.region();
    let radius = cfg.perturb_radius.resolve(&p.sampling_region())?;
    let mut stats = PfStats::default();

    let mut initial = Vec::with_capacity(start.len());
    for x in start {
        region.check_dim(x.len())?;
        if !region.contains(&x) {
            return Err(invalid!("initial point outside the feasible region"));
        }
        match ArchiveEntry::evaluate(p, x) {
            Ok(e) => initial.push(e),
            Err(e) if is_numeric(&e) => stats.discarded += 1,
            Err(e) => return Err(e),
        }
    }
    let mut archive = filter_with(initial, cfg.dominance);
    let bursts = cfg.bursts_per_point(mode);
    let batches = vec![cfg.batch; p.num_objectives()];

    let mut k = 0;
    while k < cfg.max_outer_iters && archive.len() < cfg.max_list_size && !archive.is_empty() {
        let alpha = cfg.schedule.at(k);
        let holes = largest_holes(&archive);
        let mut list = archive.into_entries();

        let mut spawn: Vec<usize> = Vec::new();
        for (a, b) in holes {
            for j in [a, b] {
                if !spawn.contains(&j) {
                    spawn.push(j);
                }
            }
        }
        let mut rng = stream(cfg.seed, &[PERTURB_STREAM, k as u64]);
        let mut perturbed = Vec::new();
        for &j in &spawn {
            for y in perturb_points(&list[j].x, cfg.perturbations, &radius, region, &mut rng)? {
                match ArchiveEntry::evaluate(p, y) {
                    Ok(e) => perturbed.push(e),
                    Err(e) if is_numeric(&e) => stats.discarded += 1,
                    Err(e) => return Err(e),
                }
            }
        }
        list.extend(perturbed);

        let tasks: Vec<BurstTask> = (0..list.len())
            .flat_map(|point| (0..bursts).map(move |restart| BurstTask { outer_iter: k, point, restart }))
            .collect();
        let starts: &[ArchiveEntry] = &list;
        let job = |t: &BurstTask| -> Result<Vec<f64>> {
            let mut x = starts[t.point].x.to_vec();
            let mut grads = Vec::new();
            let mut rng = stream(
                cfg.seed,
                &[BURST_STREAM, t.outer_iter as u64, t.point as u64, t.restart as u64],
            );
            for _ in 0..cfg.burst_len {
                let oracle = match mode {
                    PfMode::Smg => Oracle::Sampled {
                        batches: &batches,
                        rng: &mut rng,
                    },
                    PfMode::Mg => Oracle::Exact,
                };
                x = step_with(p, &x, alpha, oracle, &mut grads)?.0;
            }
            Ok(x)
        };
        let outcomes = executor.run(&tasks, &job);

        let mut candidates = list;
        for outcome in outcomes {
            let entry = outcome
                .and_then(DecisionVector::new)
                .and_then(|x| ArchiveEntry::evaluate(p, x));
            match entry {
                Ok(e) => candidates.push(e),
                Err(e) if is_numeric(&e) => stats.discarded += 1,
                Err(e) => return Err(e),
            }
        }
        archive = filter_with(candidates, cfg.dominance);
        observer(k, &archive);
        k += 1;
    }
    stats.outer_iters = k;
    stats.list_size = archive.len();
    Ok((archive, stats))
}

impl fmt::Display for PfMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PfMode::Smg => "smg",
            PfMode::Mg => "mg",
        })
    }
}
