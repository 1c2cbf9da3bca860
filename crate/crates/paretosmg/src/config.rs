//! Subcommand options.
//!
//! Every option can come from the command line or from a TOML file passed with
//! `--config`; keys in the file are the long flag names with `_` for `-`.
//! Command-line values override file values, and unknown keys are rejected.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use paretosmg_core::pareto::{Dominance, PerturbRadius, PfConfig, PfMode};
use paretosmg_core::problems::noise::DEFAULT_UNBOUNDED_FRACTION;
use paretosmg_core::problems::{make_quadratic_pair, make_synthetic, with_variable_noise, NoiseSpec, Problem};
use paretosmg_core::smg::StepSchedule;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{CliError, CliResult, ExitKind};

macro_rules! options {
    ($(#[$meta:meta])* pub struct $name:ident {
        $($(#[$fmeta:meta])* pub $field:ident: Option<$ty:ty>,)*
    }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq, clap::Args, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $($(#[$fmeta])* pub $field: Option<$ty>,)*
        }

        impl $name {
            /// Fields set on `self` win over those in `file`.
            pub fn overlay(self, file: Self) -> Self {
                Self { $($field: self.$field.or(file.$field),)* }
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Constant,
    StronglyConvex,
    Harmonic,
    Sqrt,
    Halving,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Smg,
    Mg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DominanceArg {
    Strict,
    Weak,
}

impl From<DominanceArg> for Dominance {
    fn from(d: DominanceArg) -> Self {
        match d {
            DominanceArg::Strict => Dominance::Strict,
            DominanceArg::Weak => Dominance::Weak,
        }
    }
}

impl From<ModeArg> for PfMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Smg => PfMode::Smg,
            ModeArg::Mg => PfMode::Mg,
        }
    }
}

options! {
    pub struct SmgOptions {
        /// Problem name (see `list-problems`) or `quadratic`.
        #[arg(long)]
        pub problem: Option<String>,
        /// Use exact gradients for synthetic problems, zero noise for `quadratic`.
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        pub noiseless: Option<bool>,
        /// Noise half-width per unit of `1 + |x_j|` on unbounded coordinates.
        #[arg(long)]
        pub noise_fraction: Option<f64>,
        /// Gaussian noise level of `quadratic`.
        #[arg(long)]
        pub sigma: Option<f64>,
        #[arg(long)]
        pub c1: Option<f64>,
        #[arg(long)]
        pub c2: Option<f64>,
        /// Dimension of `quadratic`.
        #[arg(long)]
        pub dim: Option<usize>,
        #[arg(long, value_enum)]
        pub schedule: Option<ScheduleKind>,
        #[arg(long)]
        pub step: Option<f64>,
        #[arg(long)]
        pub curvature: Option<f64>,
        #[arg(long)]
        pub gamma: Option<f64>,
        #[arg(long)]
        pub period: Option<usize>,
        #[arg(long)]
        pub max_iters: Option<usize>,
        #[arg(long)]
        pub batch: Option<usize>,
        #[arg(long)]
        pub seed: Option<u64>,
        /// Starting point, comma separated; sampled from the problem's box when absent.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        pub x0: Option<Vec<f64>>,
    }
}

options! {
    pub struct PfOptions {
        #[arg(long)]
        pub problem: Option<String>,
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        pub noiseless: Option<bool>,
        #[arg(long)]
        pub noise_fraction: Option<f64>,
        #[arg(long)]
        pub sigma: Option<f64>,
        #[arg(long)]
        pub c1: Option<f64>,
        #[arg(long)]
        pub c2: Option<f64>,
        #[arg(long)]
        pub dim: Option<usize>,
        #[arg(long, value_enum)]
        pub mode: Option<ModeArg>,
        #[arg(long, value_enum)]
        pub schedule: Option<ScheduleKind>,
        #[arg(long)]
        pub step: Option<f64>,
        #[arg(long)]
        pub curvature: Option<f64>,
        #[arg(long)]
        pub gamma: Option<f64>,
        #[arg(long)]
        pub period: Option<usize>,
        #[arg(long)]
        pub start_count: Option<usize>,
        #[arg(long)]
        pub perturbations: Option<usize>,
        #[arg(long)]
        pub restarts: Option<usize>,
        #[arg(long)]
        pub burst_len: Option<usize>,
        #[arg(long)]
        pub max_outer_iters: Option<usize>,
        #[arg(long)]
        pub max_list_size: Option<usize>,
        /// Perturbation radius as a fraction of the sampling box side.
        #[arg(long)]
        pub perturb_radius: Option<f64>,
        /// Dominance relation used to prune the list (default weak).
        #[arg(long, value_enum)]
        pub dominance: Option<DominanceArg>,
        #[arg(long)]
        pub batch: Option<usize>,
        #[arg(long)]
        pub seed: Option<u64>,
        /// Worker threads for the bursts; all cores when absent.
        #[arg(long)]
        pub threads: Option<usize>,
    }
}

options! {
    pub struct BiasOptions {
        /// Independent draws per batch size.
        #[arg(long)]
        pub reps: Option<usize>,
        /// Batch sizes, comma separated.
        #[arg(long, value_delimiter = ',')]
        pub batches: Option<Vec<usize>>,
        #[arg(long)]
        pub seed: Option<u64>,
    }
}

options! {
    pub struct LogregOptions {
        /// Dataset in LIBSVM format.
        #[arg(long)]
        pub data: Option<PathBuf>,
        /// 1-based binary feature whose two values define the groups.
        #[arg(long)]
        pub split: Option<usize>,
        /// Remove the split feature from the model.
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        pub drop_split: Option<bool>,
        #[arg(long)]
        pub reg1: Option<f64>,
        #[arg(long)]
        pub reg2: Option<f64>,
        #[arg(long)]
        pub baseline_iters: Option<usize>,
        #[arg(long)]
        pub baseline_step: Option<f64>,
        #[arg(long)]
        pub baseline_batch: Option<usize>,
        /// Front points reported in `accuracy.csv`.
        #[arg(long)]
        pub representatives: Option<usize>,
        #[arg(long, value_enum)]
        pub mode: Option<ModeArg>,
        #[arg(long, value_enum)]
        pub schedule: Option<ScheduleKind>,
        #[arg(long)]
        pub step: Option<f64>,
        #[arg(long)]
        pub curvature: Option<f64>,
        #[arg(long)]
        pub gamma: Option<f64>,
        #[arg(long)]
        pub period: Option<usize>,
        #[arg(long)]
        pub start_count: Option<usize>,
        #[arg(long)]
        pub perturbations: Option<usize>,
        #[arg(long)]
        pub restarts: Option<usize>,
        #[arg(long)]
        pub burst_len: Option<usize>,
        #[arg(long)]
        pub max_outer_iters: Option<usize>,
        #[arg(long)]
        pub max_list_size: Option<usize>,
        #[arg(long)]
        pub perturb_radius: Option<f64>,
        #[arg(long, value_enum)]
        pub dominance: Option<DominanceArg>,
        #[arg(long)]
        pub batch: Option<usize>,
        #[arg(long)]
        pub seed: Option<u64>,
        #[arg(long)]
        pub threads: Option<usize>,
    }
}

options! {
    pub struct MetricsOptions {
        /// Front CSVs, one per solver; every column is an objective.
        #[arg(num_args = 0..)]
        pub fronts: Option<Vec<PathBuf>>,
        /// Solver names, comma separated; file stems when absent.
        #[arg(long, value_delimiter = ',')]
        pub names: Option<Vec<String>>,
        /// Tolerance for matching front points to the reference front.
        #[arg(long)]
        pub tol: Option<f64>,
    }
}

options! {
    pub struct ProfileOptions {
        /// CSV with header `problem,<solver>...` and one row per problem.
        pub table: Option<PathBuf>,
        /// Larger values are better (e.g. purity).
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        pub higher_is_better: Option<bool>,
    }
}

/// Reads a TOML options file, or the empty options when `path` is `None`.
pub fn load_file<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::from(e).context(path.display()))?;
    toml::from_str(&text)
        .map_err(|e| CliError::new(ExitKind::Usage, anyhow::anyhow!("{}: {e}", path.display())))
}

/// Problem selection shared by the optimizing subcommands.
#[derive(Debug, Clone, Default)]
pub struct ProblemChoice {
    pub name: Option<String>,
    pub noiseless: bool,
    pub noise_fraction: Option<f64>,
    pub sigma: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub dim: Option<usize>,
}

pub const QUADRATIC: &str = "quadratic";

impl ProblemChoice {
    pub fn build(&self) -> CliResult<Box<dyn Problem>> {
        let name = self
            .name
            .as_deref()
            .ok_or_else(|| CliError::usage("missing problem name (--problem); see `list-problems`"))?;
        if name.eq_ignore_ascii_case(QUADRATIC) {
            let n = self.dim.unwrap_or(2);
            if n == 0 {
                return Err(CliError::usage("--dim must be at least 1"));
            }
            let mut a = vec![0.0; n];
            let mut b = vec![0.0; n];
            a[0] = 1.0;
            b[0] = -1.0;
            let sigma = if self.noiseless { 0.0 } else { self.sigma.unwrap_or(1.0) };
            let p = make_quadratic_pair(self.c1.unwrap_or(1.0), self.c2.unwrap_or(1.0), a, b, sigma)?;
            return Ok(Box::new(p));
        }
        let p = make_synthetic(name)?;
        if self.noiseless {
            return Ok(Box::new(p));
        }
        let spec = NoiseSpec::derived(p.dim());
        let fraction = self.noise_fraction.unwrap_or(DEFAULT_UNBOUNDED_FRACTION);
        Ok(Box::new(with_variable_noise(p, spec, fraction)?))
    }
}

/// Step-size selection; a missing parameter takes that schedule's default.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScheduleChoice {
    pub kind: Option<ScheduleKind>,
    pub step: Option<f64>,
    pub curvature: Option<f64>,
    pub gamma: Option<f64>,
    pub period: Option<usize>,
}

impl ScheduleChoice {
    /// `fallback` applies when no schedule is named.
    pub fn build(&self, fallback: StepSchedule) -> CliResult<StepSchedule> {
        let s = match self.kind {
            None => fallback,
            Some(ScheduleKind::Constant) => StepSchedule::Constant {
                step: self.step.unwrap_or(0.1),
            },
            Some(ScheduleKind::StronglyConvex) => StepSchedule::StronglyConvex {
                c: self.curvature.unwrap_or(1.0),
            },
            Some(ScheduleKind::Harmonic) => StepSchedule::Harmonic {
                gamma: self.gamma.unwrap_or(1.0),
            },
            Some(ScheduleKind::Sqrt) => StepSchedule::Sqrt {
                step: self.step.unwrap_or(0.1),
            },
            Some(ScheduleKind::Halving) => StepSchedule::Halving {
                initial: self.step.unwrap_or(0.3),
                period: self.period.unwrap_or(200),
            },
        };
        s.validate()?;
        Ok(s)
    }
}

/// Driver fields shared by `run-pf` and `logreg`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DriverChoice {
    pub start_count: Option<usize>,
    pub perturbations: Option<usize>,
    pub restarts: Option<usize>,
    pub burst_len: Option<usize>,
    pub max_outer_iters: Option<usize>,
    pub max_list_size: Option<usize>,
    pub perturb_radius: Option<f64>,
    pub dominance: Option<DominanceArg>,
    pub batch: Option<usize>,
    pub seed: Option<u64>,
}

impl DriverChoice {
    pub fn build(&self, mode: PfMode, schedule: &ScheduleChoice) -> CliResult<PfConfig> {
        let mut cfg = PfConfig::defaults(mode);
        cfg.start_count = self.start_count.unwrap_or(cfg.start_count);
        cfg.perturbations = self.perturbations.unwrap_or(cfg.perturbations);
        cfg.restarts = self.restarts.unwrap_or(cfg.restarts);
        cfg.burst_len = self.burst_len.unwrap_or(cfg.burst_len);
        cfg.max_outer_iters = self.max_outer_iters.unwrap_or(cfg.max_outer_iters);
        cfg.max_list_size = self.max_list_size.unwrap_or(cfg.max_list_size);
        if let Some(f) = self.perturb_radius {
            cfg.perturb_radius = PerturbRadius::SideFraction(f);
        }
        if let Some(d) = self.dominance {
            cfg.dominance = d.into();
        }
        cfg.batch = self.batch.unwrap_or(cfg.batch);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        cfg.schedule = schedule.build(cfg.schedule)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl SmgOptions {
    pub fn problem_choice(&self) -> ProblemChoice {
        ProblemChoice {
            name: self.problem.clone(),
            noiseless: self.noiseless.unwrap_or(false),
            noise_fraction: self.noise_fraction,
            sigma: self.sigma,
            c1: self.c1,
            c2: self.c2,
            dim: self.dim,
        }
    }

    pub fn schedule_choice(&self) -> ScheduleChoice {
        ScheduleChoice {
            kind: self.schedule,
            step: self.step,
            curvature: self.curvature,
            gamma: self.gamma,
            period: self.period,
        }
    }
}

impl PfOptions {
    pub fn problem_choice(&self) -> ProblemChoice {
        ProblemChoice {
            name: self.problem.clone(),
            noiseless: self.noiseless.unwrap_or(false),
            noise_fraction: self.noise_fraction,
            sigma: self.sigma,
            c1: self.c1,
            c2: self.c2,
            dim: self.dim,
        }
    }

    pub fn schedule_choice(&self) -> ScheduleChoice {
        ScheduleChoice {
            kind: self.schedule,
            step: self.step,
            curvature: self.curvature,
            gamma: self.gamma,
            period: self.period,
        }
    }

    pub fn driver_choice(&self) -> DriverChoice {
        DriverChoice {
            start_count: self.start_count,
            perturbations: self.perturbations,
            restarts: self.restarts,
            burst_len: self.burst_len,
            max_outer_iters: self.max_outer_iters,
            max_list_size: self.max_list_size,
            perturb_radius: self.perturb_radius,
            dominance: self.dominance,
            batch: self.batch,
            seed: self.seed,
        }
    }
}

impl LogregOptions {
    pub fn schedule_choice(&self) -> ScheduleChoice {
        ScheduleChoice {
            kind: self.schedule,
            step: self.step,
            curvature: self.curvature,
            gamma: self.gamma,
            period: self.period,
        }
    }

    pub fn driver_choice(&self) -> DriverChoice {
        DriverChoice {
            start_count: self.start_count,
            perturbations: self.perturbations,
            restarts: self.restarts,
            burst_len: self.burst_len,
            max_outer_iters: self.max_outer_iters,
            max_list_size: self.max_list_size,
            perturb_radius: self.perturb_radius,
            dominance: self.dominance,
            batch: self.batch,
            seed: self.seed,
        }
    }
}
