//! Decision and objective vectors, box regions, dominance and projection.

use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{invalid, Result};

macro_rules! finite_vector {
    ($(#[$meta:meta])* $name:ident, $what:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(Vec<f64>);

        impl $name {
            /// Wraps `values`, rejecting NaN and infinities.
            pub fn new(values: Vec<f64>) -> Result<Self> {
                if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                    return Err(invalid!(
                        concat!($what, " entry {} is not finite ({})"),
                        i,
                        values[i]
                    ));
                }
                Ok(Self(values))
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }
        }

        impl Deref for $name {
            type Target = [f64];

            fn deref(&self) -> &[f64] {
                &self.0
            }
        }

        impl AsRef<[f64]> for $name {
            fn as_ref(&self) -> &[f64] {
                &self.0
            }
        }

        impl TryFrom<Vec<f64>> for $name {
            type Error = crate::Error;

            fn try_from(values: Vec<f64>) -> Result<Self> {
                Self::new(values)
            }
        }
    };
}

finite_vector!(
    /// A point `x` in decision space. All coordinates are finite.
    DecisionVector,
    "decision vector"
);

finite_vector!(
    /// Objective values `F(x) = (f_1(x), ..., f_m(x))`. All entries are finite.
    ObjectiveVector,
    "objective vector"
);

/// Simple bounds `lower <= x <= upper`; a missing bound is stored as an infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRegion {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(invalid!(
                "box bounds have different dimensions ({} vs {})",
                lower.len(),
                upper.len()
            ));
        }
        for (j, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if lo.is_nan() || hi.is_nan() {
                return Err(invalid!("box bound {j} is NaN"));
            }
            if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(invalid!("box bound {j} is empty ([{lo}, {hi}])"));
            }
            if lo > hi {
                return Err(invalid!("box bound {j} has lower {lo} > upper {hi}"));
            }
        }
        Ok(Self { lower, upper })
    }

    /// `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(alloc::vec![lo; n], alloc::vec![hi; n])
    }

    /// All of `R^n`.
    pub fn unbounded(n: usize) -> Self {
        Self {
            lower: alloc::vec![f64::NEG_INFINITY; n],
            upper: alloc::vec![f64::INFINITY; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Side length of coordinate `j`, or `None` when either bound is missing.
    pub fn side(&self, j: usize) -> Option<f64> {
        let (lo, hi) = (self.lower[j], self.upper[j]);
        (lo.is_finite() && hi.is_finite()).then(|| hi - lo)
    }

    /// True when every coordinate has two finite bounds.
    pub fn is_bounded(&self) -> bool {
        (0..self.dim()).all(|j| self.side(j).is_some())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| lo <= v && v <= hi)
    }

    /// Clamps `x` into the box without checking its length.
    pub(crate) fn clamp_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim());
        for ((v, &lo), &hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(lo, hi);
        }
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(invalid!(
                "dimension mismatch: vector has {n} coordinates, region has {}",
                self.dim()
            ));
        }
        Ok(())
    }
}

/// Euclidean projection onto a box: the componentwise clamp of `x`.
pub fn project_box(x: &DecisionVector, region: &BoxRegion) -> Result<DecisionVector> {
    region.check_dim(x.len())?;
    let mut out = x.as_slice().to_vec();
    region.clamp_in_place(&mut out);
    Ok(DecisionVector(out))
}

fn check_same_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(invalid!(
            "dimension mismatch: {} vs {} objectives",
            a.len(),
            b.len()
        ));
    }
    Ok(())
}

/// `a` dominates `b` when `a_i < b_i` for every objective.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    check_same_len(a, b)?;
    Ok(strictly_less(a, b))
}

/// `a <= b` componentwise and `a != b`.
pub fn weakly_dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    check_same_len(a, b)?;
    let mut some_strict = false;
    for (&u, &v) in a.iter().zip(b) {
        if u > v {
            return Ok(false);
        }
        some_strict |= u < v;
    }
    Ok(some_strict)
}

#[inline]
pub(crate) fn strictly_less(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(u, v)| u < v)
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}
