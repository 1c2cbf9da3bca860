//! Step-size sequences `α_k` with a 0-based iteration counter `k`.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    /// `α_k = step`.
    Constant { step: f64 },
    /// `α_k = 2 / (c (k + 2))`.
    StronglyConvex { c: f64 },
    /// `α_k = gamma / (k + 1)`.
    Harmonic { gamma: f64 },
    /// `α_k = step / √(k + 1)`.
    Sqrt { step: f64 },
    /// `α_k = initial · 2^(-⌊k / period⌋)`.
    Halving { initial: f64, period: usize },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid!("{name} must be positive and finite, got {v}"))
    }
}

impl StepSchedule {
    /// Halving from 0.3 every 200 iterations.
    pub const PF_DEFAULT: StepSchedule = StepSchedule::Halving {
        initial: 0.3,
        period: 200,
    };

    pub fn validate(&self) -> Result<()> {
        match *self {
            StepSchedule::Constant { step } | StepSchedule::Sqrt { step } => positive("step", step),
            StepSchedule::StronglyConvex { c } => positive("c", c),
            StepSchedule::Harmonic { gamma } => positive("gamma", gamma),
            StepSchedule::Halving { initial, period } => {
                positive("initial step", initial)?;
                if period == 0 {
                    return Err(invalid!("halving period must be at least 1"));
                }
                Ok(())
            }
        }
    }

    /// `α_k` for an already validated schedule.
    pub fn at(&self, k: usize) -> f64 {
        let k1 = (k + 1) as f64;
        match *self {
            StepSchedule::Constant { step } => step,
            StepSchedule::StronglyConvex { c } => 2.0 / (c * (k1 + 1.0)),
            StepSchedule::Harmonic { gamma } => gamma / k1,
            StepSchedule::Sqrt { step } => step / libm::sqrt(k1),
            StepSchedule::Halving { initial, period } => {
                let halvings = (k / period).min(i32::MAX as usize) as i32;
                // floored so the step never underflows to zero
                (initial * libm::exp2(-(halvings as f64))).max(initial.min(f64::MIN_POSITIVE))
            }
        }
    }
}

/// `α_k` of `schedule`.
pub fn step_size(schedule: &StepSchedule, k: usize) -> Result<f64> {
    schedule.validate()?;
    Ok(schedule.at(k))
}
