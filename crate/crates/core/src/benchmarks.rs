//! The twelve-function benchmark suite.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::problem::{Bounds, Problem, SuccessTarget};

/// Distance from the known optimum value that counts as a hit.
pub const SUCCESS_TOLERANCE: f64 = 1.0e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchmarkId {
    Ackley,
    Rosenbrock,
    ChungReynolds,
    Step,
    Alpine1,
    SumSquares,
    Sphere,
    Bohachevsky3,
    Bohachevsky2,
    BartelsConn,
    GoldsteinPrice,
    Matyas,
}

impl BenchmarkId {
    pub const ALL: [BenchmarkId; 12] = [
        BenchmarkId::Ackley,
        BenchmarkId::Rosenbrock,
        BenchmarkId::ChungReynolds,
        BenchmarkId::Step,
        BenchmarkId::Alpine1,
        BenchmarkId::SumSquares,
        BenchmarkId::Sphere,
        BenchmarkId::Bohachevsky3,
        BenchmarkId::Bohachevsky2,
        BenchmarkId::BartelsConn,
        BenchmarkId::GoldsteinPrice,
        BenchmarkId::Matyas,
    ];

    /// Stable lowercase name used on the command line and in result files.
    pub fn name(&self) -> &'static str {
        match self {
            BenchmarkId::Ackley => "ackley",
            BenchmarkId::Rosenbrock => "rosenbrock",
            BenchmarkId::ChungReynolds => "chung-reynolds",
            BenchmarkId::Step => "step",
            BenchmarkId::Alpine1 => "alpine1",
            BenchmarkId::SumSquares => "sumsquares",
            BenchmarkId::Sphere => "sphere",
            BenchmarkId::Bohachevsky3 => "bohachevsky3",
            BenchmarkId::Bohachevsky2 => "bohachevsky2",
            BenchmarkId::BartelsConn => "bartels-conn",
            BenchmarkId::GoldsteinPrice => "goldstein-price",
            BenchmarkId::Matyas => "matyas",
        }
    }

    pub fn spec(self) -> BenchmarkSpec {
        use BenchmarkId::*;
        let (dimension, lo, hi, global_min) = match self {
            Ackley => (30, -10.0, 10.0, 0.0),
            Rosenbrock => (30, -10.0, 10.0, 0.0),
            ChungReynolds => (30, -10.0, 10.0, 0.0),
            Step => (30, -100.0, 100.0, 0.0),
            Alpine1 => (30, -10.0, 10.0, 0.0),
            SumSquares => (30, -10.0, 10.0, 0.0),
            Sphere => (30, -100.0, 100.0, 0.0),
            Bohachevsky3 => (2, -100.0, 100.0, 0.0),
            Bohachevsky2 => (2, -100.0, 100.0, 0.0),
            BartelsConn => (2, -500.0, 500.0, 1.0),
            GoldsteinPrice => (2, -2.0, 2.0, 3.0),
            Matyas => (2, -10.0, 10.0, 0.0),
        };
        BenchmarkSpec {
            id: self,
            dimension,
            lower: lo,
            upper: hi,
            global_min_value: global_min,
            success_tolerance: SUCCESS_TOLERANCE,
        }
    }

    /// A global minimizer.
    pub fn optimum_point(&self) -> Vec<f64> {
        let d = self.spec().dimension;
        match self {
            BenchmarkId::Rosenbrock => vec![1.0; d],
            BenchmarkId::GoldsteinPrice => vec![0.0, -1.0],
            _ => vec![0.0; d],
        }
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase();
        // Results tables label SumSquares "F2-Rao".
        if key == "f2-rao" {
            return Ok(BenchmarkId::SumSquares);
        }
        BenchmarkId::ALL
            .into_iter()
            .find(|id| id.name() == key)
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkSpec {
    pub id: BenchmarkId,
    pub dimension: usize,
    pub lower: f64,
    pub upper: f64,
    pub global_min_value: f64,
    pub success_tolerance: f64,
}

impl BenchmarkSpec {
    pub fn bounds(&self) -> Bounds {
        Bounds::uniform(self.dimension, self.lower, self.upper).expect("static bounds are valid")
    }

    pub fn target(&self) -> SuccessTarget {
        SuccessTarget::Near {
            value: self.global_min_value,
            tolerance: self.success_tolerance,
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension {
            return Err(Error::Dimension {
                expected: self.dimension,
                actual: x.len(),
            });
        }
        Ok(evaluate_unchecked(self.id, x))
    }

    pub fn problem(&self) -> Problem {
        let id = self.id;
        Problem::new(id.name(), self.bounds(), self.target(), move |x: &[f64]| {
            evaluate_unchecked(id, x)
        })
        .with_known_optimum(self.global_min_value)
    }
}

pub fn evaluate(id: BenchmarkId, x: &[f64]) -> Result<f64> {
    id.spec().evaluate(x)
}

/// All twelve benchmark problems, in table order.
pub fn suite() -> Vec<Problem> {
    BenchmarkId::ALL.iter().map(|id| id.spec().problem()).collect()
}

fn evaluate_unchecked(id: BenchmarkId, x: &[f64]) -> f64 {
    match id {
        BenchmarkId::Ackley => ackley(x),
        BenchmarkId::Rosenbrock => rosenbrock(x),
        BenchmarkId::ChungReynolds => {
            let s = sphere(x);
            s * s
        }
        BenchmarkId::Step => x.iter().map(|v| v.abs().floor()).sum(),
        BenchmarkId::Alpine1 => x.iter().map(|v| (v * v.sin() + 0.1 * v).abs()).sum(),
        BenchmarkId::SumSquares => x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v * v).sum(),
        BenchmarkId::Sphere => sphere(x),
        BenchmarkId::Bohachevsky3 => {
            let (a, b) = (x[0], x[1]);
            a * a + 2.0 * b * b - 0.3 * (3.0 * PI * a + 4.0 * PI * b).cos() + 0.3
        }
        BenchmarkId::Bohachevsky2 => {
            let (a, b) = (x[0], x[1]);
            a * a + 2.0 * b * b - 0.3 * (3.0 * PI * a).cos() * (4.0 * PI * b).cos() + 0.3
        }
        BenchmarkId::BartelsConn => {
            let (a, b) = (x[0], x[1]);
            (a * a + b * b + a * b).abs() + a.sin().abs() + b.cos().abs()
        }
        BenchmarkId::GoldsteinPrice => goldstein_price(x[0], x[1]),
        BenchmarkId::Matyas => {
            let (a, b) = (x[0], x[1]);
            0.26 * (a * a + b * b) - 0.48 * a * b
        }
    }
}

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
    let cos = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
    -20.0 * (-0.2 * sq.sqrt()).exp() - cos.exp() + 20.0 + E
}

fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let a = w[1] - w[0] * w[0];
            let b = 1.0 - w[0];
            100.0 * a * a + b * b
        })
        .sum()
}

fn goldstein_price(a: f64, b: f64) -> f64 {
    let s = a + b + 1.0;
    let t = 2.0 * a - 3.0 * b;
    let left = 1.0 + s * s * (19.0 - 14.0 * a + 3.0 * a * a - 14.0 * b + 6.0 * a * b + 3.0 * b * b);
    let right = 30.0 + t * t * (18.0 - 32.0 * a + 12.0 * a * a + 48.0 * b - 36.0 * a * b + 27.0 * b * b);
    left * right
}
