//! Two-objective benchmark problems.
//!
//! Formulas follow the usual definitions in the multi-objective test-problem
//! literature:
//!
//! | name  | n  | bounds      | f1, f2 |
//! |-------|----|-------------|--------|
//! | ZDT1  | 30 | [0, 1]      | `x1`, `g (1 - √(x1/g))`, `g = 1 + 9 Σ_{i≥2} x_i / (n-1)` |
//! | ZDT2  | 30 | [0, 1]      | `x1`, `g (1 - (x1/g)²)` |
//! | ZDT3  | 30 | [0, 1]      | `x1`, `g (1 - √(x1/g) - (x1/g) sin(10π x1))` |
//! | JOS2  | 10 | [0, 1]      | `x1`, `g (1 - (x1/g)^¼ - (x1/g)⁴)` |
//! | SP1   | 2  | none        | `(x1-1)² + (x1-x2)²`, `(x2-3)² + (x1-x2)²` |
//! | IM1   | 2  | [1, 4]      | `2√x1`, `x1 (1 - x2) + 5` |
//! | FF1   | 2  | none        | `1 - exp(-(x1-1)² - (x2+1)²)`, `1 - exp(-(x1+1)² - (x2-1)²)` |
//! | Far1  | 2  | [-1, 1]     | sums of Gaussian bumps (see [`FAR1_F1`], [`FAR1_F2`]) |
//! | SK1   | 1  | none        | `x⁴ + 3x³ - 10x² - 10x - 10`, `0.5x⁴ - 2x³ - 10x² + 10x - 5` |
//! | MOP1  | 1  | none        | `x²`, `(x-2)²` |
//! | MOP2  | 15 | [-4, 4]     | `1 - exp(-Σ (x_i ∓ 1/√n)²)` |
//! | MOP3  | 2  | [-π, π]     | `1 + (A1-B1)² + (A2-B2)²`, `(x1+3)² + (x2+1)²` |
//! | DEB41 | 2  | [0, 1]      | `x1`, `g (1 - (x1/g)^¼)`, `g = 1 + 10 x2` |
//!
//! SK1 is the minimization form (both objectives negated) of the maximization
//! problem usually listed. For DEB41 the convex member `α = 1/4` of the
//! `h = 1 - (f1/g)^α` family is used.
//!
//! The `(x1/g)^α` terms with `α < 1` have unbounded slope at `x1 = 0`; the
//! gradient oracles evaluate that slope at `max(x1, 1e-12)`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use rand::RngCore;

use super::{check_batch, Problem};
use crate::error::{Error, Result};
use crate::types::BoxRegion;

const X1_FLOOR: f64 = 1e-12;

/// Shape of the Pareto front.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Convex,
    Concave,
    Mixed,
    Disconnected,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::Convex => "convex",
            Geometry::Concave => "concave",
            Geometry::Mixed => "mixed",
            Geometry::Disconnected => "disconnected",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    Zdt1,
    Zdt2,
    Zdt3,
    Jos2,
    Sp1,
    Im1,
    Ff1,
    Far1,
    Sk1,
    Mop1,
    Mop2,
    Mop3,
    Deb41,
}

impl SyntheticKind {
    pub const ALL: [SyntheticKind; 13] = [
        SyntheticKind::Zdt1,
        SyntheticKind::Zdt2,
        SyntheticKind::Zdt3,
        SyntheticKind::Jos2,
        SyntheticKind::Sp1,
        SyntheticKind::Im1,
        SyntheticKind::Ff1,
        SyntheticKind::Far1,
        SyntheticKind::Sk1,
        SyntheticKind::Mop1,
        SyntheticKind::Mop2,
        SyntheticKind::Mop3,
        SyntheticKind::Deb41,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SyntheticKind::Zdt1 => "ZDT1",
            SyntheticKind::Zdt2 => "ZDT2",
            SyntheticKind::Zdt3 => "ZDT3",
            SyntheticKind::Jos2 => "JOS2",
            SyntheticKind::Sp1 => "SP1",
            SyntheticKind::Im1 => "IM1",
            SyntheticKind::Ff1 => "FF1",
            SyntheticKind::Far1 => "Far1",
            SyntheticKind::Sk1 => "SK1",
            SyntheticKind::Mop1 => "MOP1",
            SyntheticKind::Mop2 => "MOP2",
            SyntheticKind::Mop3 => "MOP3",
            SyntheticKind::Deb41 => "DEB41",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            SyntheticKind::Zdt1 | SyntheticKind::Zdt2 | SyntheticKind::Zdt3 => 30,
            SyntheticKind::Jos2 => 10,
            SyntheticKind::Mop2 => 15,
            SyntheticKind::Sk1 | SyntheticKind::Mop1 => 1,
            _ => 2,
        }
    }

    pub fn geometry(self) -> Geometry {
        match self {
            SyntheticKind::Zdt1 | SyntheticKind::Sp1 | SyntheticKind::Mop1 | SyntheticKind::Deb41 => {
                Geometry::Convex
            }
            SyntheticKind::Zdt2 | SyntheticKind::Im1 | SyntheticKind::Ff1 | SyntheticKind::Mop2 => {
                Geometry::Concave
            }
            SyntheticKind::Jos2 | SyntheticKind::Far1 => Geometry::Mixed,
            SyntheticKind::Zdt3 | SyntheticKind::Sk1 | SyntheticKind::Mop3 => Geometry::Disconnected,
        }
    }

    /// `Some((lo, hi))` for the simple bounds applied to every coordinate.
    pub fn bounds(self) -> Option<(f64, f64)> {
        match self {
            SyntheticKind::Zdt1
            | SyntheticKind::Zdt2
            | SyntheticKind::Zdt3
            | SyntheticKind::Jos2
            | SyntheticKind::Deb41 => Some((0.0, 1.0)),
            SyntheticKind::Im1 => Some((1.0, 4.0)),
            SyntheticKind::Far1 => Some((-1.0, 1.0)),
            SyntheticKind::Mop2 => Some((-4.0, 4.0)),
            SyntheticKind::Mop3 => Some((-PI, PI)),
            SyntheticKind::Sp1 | SyntheticKind::Ff1 | SyntheticKind::Sk1 | SyntheticKind::Mop1 => None,
        }
    }

    /// Box for drawing starting points of the unbounded problems.
    fn sampling_bounds(self) -> (f64, f64) {
        match self {
            SyntheticKind::Sp1 => (-1.0, 5.0),
            SyntheticKind::Ff1 => (-2.0, 2.0),
            SyntheticKind::Sk1 => (-4.0, 5.0),
            SyntheticKind::Mop1 => (-2.0, 4.0),
            other => other.bounds().unwrap_or((-1.0, 1.0)),
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(name))
    }
}

/// `(amplitude, rate, center_x1, center_x2)` of the terms
/// `amplitude · exp(rate · (-(x1 - c1)² - (x2 - c2)²))` of Far1's first objective.
pub const FAR1_F1: [(f64, f64, f64, f64); 5] = [
    (-2.0, 15.0, 0.1, 0.0),
    (-1.0, 20.0, 0.6, 0.6),
    (1.0, 20.0, -0.6, 0.6),
    (1.0, 20.0, 0.6, -0.6),
    (1.0, 20.0, -0.6, -0.6),
];

/// Terms of Far1's second objective, same layout as [`FAR1_F1`].
pub const FAR1_F2: [(f64, f64, f64, f64); 5] = [
    (2.0, 20.0, 0.0, 0.0),
    (1.0, 20.0, 0.4, 0.6),
    (-1.0, 20.0, -0.5, 0.7),
    (-1.0, 20.0, 0.5, -0.7),
    (1.0, 20.0, -0.4, -0.8),
];

/// One of the benchmark problems, with deterministic oracles.
///
/// The stochastic gradient of a bare benchmark is its true gradient; wrap it
/// with [`super::with_variable_noise`] for the noisy version.
#[derive(Debug, Clone)]
pub struct Synthetic {
    kind: SyntheticKind,
    region: BoxRegion,
    sampling: BoxRegion,
}

/// Looks a benchmark up by name (case-insensitive).
pub fn make_synthetic(name: &str) -> Result<Synthetic> {
    let kind = SyntheticKind::parse(name)
        .ok_or_else(|| Error::NotFound(format!("unknown problem {name:?}")))?;
    Ok(Synthetic::new(kind))
}

impl Synthetic {
    pub fn new(kind: SyntheticKind) -> Self {
        let n = kind.dim();
        let region = match kind.bounds() {
            Some((lo, hi)) => BoxRegion::cube(n, lo, hi).expect("static bounds"),
            None => BoxRegion::unbounded(n),
        };
        let (lo, hi) = kind.sampling_bounds();
        let sampling = BoxRegion::cube(n, lo, hi).expect("static bounds");
        Self {
            kind,
            region,
            sampling,
        }
    }

    pub fn kind(&self) -> SyntheticKind {
        self.kind
    }

    fn zdt_g(x: &[f64]) -> f64 {
        let n = x.len();
        1.0 + 9.0 * x[1..].iter().sum::<f64>() / (n - 1) as f64
    }

    fn bump_sum(terms: &[(f64, f64, f64, f64)], x: &[f64]) -> f64 {
        terms
            .iter()
            .map(|&(a, k, c1, c2)| {
                a * libm::exp(k * (-(x[0] - c1) * (x[0] - c1) - (x[1] - c2) * (x[1] - c2)))
            })
            .sum()
    }

    fn bump_grad(terms: &[(f64, f64, f64, f64)], x: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
        out[1] = 0.0;
        for &(a, k, c1, c2) in terms {
            let e = a * libm::exp(k * (-(x[0] - c1) * (x[0] - c1) - (x[1] - c2) * (x[1] - c2)));
            out[0] += e * k * -2.0 * (x[0] - c1);
            out[1] += e * k * -2.0 * (x[1] - c2);
        }
    }

    fn mop3_terms(x: &[f64]) -> (f64, f64) {
        let a1 = 0.5 * libm::sin(1.0) - 2.0 * libm::cos(1.0) + libm::sin(2.0) - 1.5 * libm::cos(2.0);
        let a2 = 1.5 * libm::sin(1.0) - libm::cos(1.0) + 2.0 * libm::sin(2.0) - 0.5 * libm::cos(2.0);
        let (s1, c1) = (libm::sin(x[0]), libm::cos(x[0]));
        let (s2, c2) = (libm::sin(x[1]), libm::cos(x[1]));
        let b1 = 0.5 * s1 - 2.0 * c1 + s2 - 1.5 * c2;
        let b2 = 1.5 * s1 - c1 + 2.0 * s2 - 0.5 * c2;
        (a1 - b1, a2 - b2)
    }

    fn gaussian_well(x: &[f64], shift: f64) -> f64 {
        libm::exp(-x.iter().map(|v| (v - shift) * (v - shift)).sum::<f64>())
    }

    fn eval(&self, i: usize, x: &[f64]) -> f64 {
        use SyntheticKind::*;
        match (self.kind, i) {
            (Zdt1 | Zdt2 | Zdt3 | Jos2 | Deb41, 0) => x[0],
            (Zdt1, _) => {
                let g = Self::zdt_g(x);
                g * (1.0 - libm::sqrt(x[0] / g))
            }
            (Zdt2, _) => {
                let g = Self::zdt_g(x);
                g * (1.0 - (x[0] / g) * (x[0] / g))
            }
            (Zdt3, _) => {
                let g = Self::zdt_g(x);
                let r = x[0] / g;
                g * (1.0 - libm::sqrt(r) - r * libm::sin(10.0 * PI * x[0]))
            }
            (Jos2, _) => {
                let g = Self::zdt_g(x);
                let r = x[0] / g;
                g * (1.0 - libm::pow(r, 0.25) - libm::pow(r, 4.0))
            }
            (Deb41, _) => {
                let g = 1.0 + 10.0 * x[1];
                g * (1.0 - libm::pow(x[0] / g, 0.25))
            }
            (Sp1, 0) => (x[0] - 1.0) * (x[0] - 1.0) + (x[0] - x[1]) * (x[0] - x[1]),
            (Sp1, _) => (x[1] - 3.0) * (x[1] - 3.0) + (x[0] - x[1]) * (x[0] - x[1]),
            (Im1, 0) => 2.0 * libm::sqrt(x[0]),
            (Im1, _) => x[0] * (1.0 - x[1]) + 5.0,
            (Ff1, 0) => {
                1.0 - libm::exp(-(x[0] - 1.0) * (x[0] - 1.0) - (x[1] + 1.0) * (x[1] + 1.0))
            }
            (Ff1, _) => {
                1.0 - libm::exp(-(x[0] + 1.0) * (x[0] + 1.0) - (x[1] - 1.0) * (x[1] - 1.0))
            }
            (Far1, 0) => Self::bump_sum(&FAR1_F1, x),
            (Far1, _) => Self::bump_sum(&FAR1_F2, x),
            (Sk1, 0) => {
                let t = x[0];
                t * t * t * t + 3.0 * t * t * t - 10.0 * t * t - 10.0 * t - 10.0
            }
            (Sk1, _) => {
                let t = x[0];
                0.5 * t * t * t * t - 2.0 * t * t * t - 10.0 * t * t + 10.0 * t - 5.0
            }
            (Mop1, 0) => x[0] * x[0],
            (Mop1, _) => (x[0] - 2.0) * (x[0] - 2.0),
            (Mop2, 0) => 1.0 - Self::gaussian_well(x, 1.0 / libm::sqrt(x.len() as f64)),
            (Mop2, _) => 1.0 - Self::gaussian_well(x, -1.0 / libm::sqrt(x.len() as f64)),
            (Mop3, 0) => {
                let (u, v) = Self::mop3_terms(x);
                1.0 + u * u + v * v
            }
            (Mop3, _) => (x[0] + 3.0) * (x[0] + 3.0) + (x[1] + 1.0) * (x[1] + 1.0),
        }
    }

    fn grad(&self, i: usize, x: &[f64], out: &mut [f64]) {
        use SyntheticKind::*;
        out.fill(0.0);
        match (self.kind, i) {
            (Zdt1 | Zdt2 | Zdt3 | Jos2 | Deb41, 0) => out[0] = 1.0,
            (Zdt1 | Zdt2 | Zdt3 | Jos2, _) => {
                let n = x.len();
                let g = Self::zdt_g(x);
                let f1 = x[0];
                let f1s = f1.max(X1_FLOOR);
                let (d_f1, d_g) = match self.kind {
                    Zdt1 => (-0.5 * libm::sqrt(g / f1s), 1.0 - 0.5 * libm::sqrt(f1 / g)),
                    Zdt2 => (-2.0 * f1 / g, 1.0 + (f1 / g) * (f1 / g)),
                    Zdt3 => {
                        let a = 10.0 * PI;
                        (
                            -0.5 * libm::sqrt(g / f1s) - libm::sin(a * f1) - a * f1 * libm::cos(a * f1),
                            1.0 - 0.5 * libm::sqrt(f1 / g),
                        )
                    }
                    _ => (
                        -0.25 * libm::pow(f1s, -0.75) * libm::pow(g, 0.75)
                            - 4.0 * libm::pow(f1, 3.0) / libm::pow(g, 3.0),
                        1.0 - 0.75 * libm::pow(f1, 0.25) * libm::pow(g, -0.25)
                            + 3.0 * libm::pow(f1, 4.0) / libm::pow(g, 4.0),
                    ),
                };
                out[0] = d_f1;
                let dg = d_g * 9.0 / (n - 1) as f64;
                for o in &mut out[1..] {
                    *o = dg;
                }
            }
            (Deb41, _) => {
                let g = 1.0 + 10.0 * x[1];
                let f1s = x[0].max(X1_FLOOR);
                out[0] = -0.25 * libm::pow(f1s, -0.75) * libm::pow(g, 0.75);
                out[1] = 10.0 * (1.0 - 0.75 * libm::pow(x[0], 0.25) * libm::pow(g, -0.25));
            }
            (Sp1, 0) => {
                out[0] = 2.0 * (x[0] - 1.0) + 2.0 * (x[0] - x[1]);
                out[1] = -2.0 * (x[0] - x[1]);
            }
            (Sp1, _) => {
                out[0] = 2.0 * (x[0] - x[1]);
                out[1] = 2.0 * (x[1] - 3.0) - 2.0 * (x[0] - x[1]);
            }
            (Im1, 0) => out[0] = 1.0 / libm::sqrt(x[0]),
            (Im1, _) => {
                out[0] = 1.0 - x[1];
                out[1] = -x[0];
            }
            (Ff1, _) => {
                let (c1, c2) = if i == 0 { (1.0, -1.0) } else { (-1.0, 1.0) };
                let e = libm::exp(-(x[0] - c1) * (x[0] - c1) - (x[1] - c2) * (x[1] - c2));
                out[0] = 2.0 * (x[0] - c1) * e;
                out[1] = 2.0 * (x[1] - c2) * e;
            }
            (Far1, 0) => Self::bump_grad(&FAR1_F1, x, out),
            (Far1, _) => Self::bump_grad(&FAR1_F2, x, out),
            (Sk1, 0) => {
                let t = x[0];
                out[0] = 4.0 * t * t * t + 9.0 * t * t - 20.0 * t - 10.0;
            }
            (Sk1, _) => {
                let t = x[0];
                out[0] = 2.0 * t * t * t - 6.0 * t * t - 20.0 * t + 10.0;
            }
            (Mop1, 0) => out[0] = 2.0 * x[0],
            (Mop1, _) => out[0] = 2.0 * (x[0] - 2.0),
            (Mop2, _) => {
                let s = 1.0 / libm::sqrt(x.len() as f64);
                let shift = if i == 0 { s } else { -s };
                let e = Self::gaussian_well(x, shift);
                for (o, v) in out.iter_mut().zip(x) {
                    *o = 2.0 * (v - shift) * e;
                }
            }
            (Mop3, 0) => {
                let (u, v) = Self::mop3_terms(x);
                let (s1, c1) = (libm::sin(x[0]), libm::cos(x[0]));
                let (s2, c2) = (libm::sin(x[1]), libm::cos(x[1]));
                // u = A1 - B1, v = A2 - B2
                let db1 = [0.5 * c1 + 2.0 * s1, c2 + 1.5 * s2];
                let db2 = [1.5 * c1 + s1, 2.0 * c2 + 0.5 * s2];
                out[0] = -2.0 * u * db1[0] - 2.0 * v * db2[0];
                out[1] = -2.0 * u * db1[1] - 2.0 * v * db2[1];
            }
            (Mop3, _) => {
                out[0] = 2.0 * (x[0] + 3.0);
                out[1] = 2.0 * (x[1] + 1.0);
            }
        }
    }
}

impl Problem for Synthetic {
    fn name(&self) -> &str {
        self.kind.name()
    }

    fn dim(&self) -> usize {
        self.kind.dim()
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn region(&self) -> &BoxRegion {
        &self.region
    }

    fn sampling_region(&self) -> BoxRegion {
        self.sampling.clone()
    }

    fn value(&self, i: usize, x: &[f64]) -> f64 {
        self.eval(i, x)
    }

    fn gradient(&self, i: usize, x: &[f64], out: &mut [f64]) {
        self.grad(i, x, out)
    }

    fn stochastic_gradient(
        &self,
        i: usize,
        x: &[f64],
        batch: usize,
        _rng: &mut dyn RngCore,
        out: &mut [f64],
    ) -> Result<()> {
        check_batch(batch)?;
        self.grad(i, x, out);
        Ok(())
    }
}

/// Names of all registered benchmarks, in table order.
pub fn names() -> Vec<&'static str> {
    SyntheticKind::ALL.iter().map(|k| k.name()).collect()
}
