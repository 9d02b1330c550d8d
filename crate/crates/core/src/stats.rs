//! Significance tests for comparing two optimizers.
//!
//! * Smith-Satterthwaite (Welch) two-sample t-test on summary statistics, with
//!   Student-t tail probabilities from the regularized incomplete beta
//!   function.
//! * Wilcoxon signed-rank test on paired samples with the normal approximation
//!   of the signed-rank statistic.
//!
//! By convention the first argument is the baseline (Jaya) and the second the
//! challenger (SJaya), so positive t and large `W+` favour the challenger on a
//! minimization metric.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub std: f64,
    pub n: usize,
}

impl SampleSummary {
    pub fn new(mean: f64, std: f64, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Config("sample size must be at least 1".into()));
        }
        if std.is_nan() || std < 0.0 || !mean.is_finite() {
            return Err(Error::Config(format!("invalid summary mean {mean}, std {std}")));
        }
        Ok(Self { mean, std, n })
    }

    /// Mean and sample standard deviation of `xs`; the std of a single value is 0.
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::Config("cannot summarize an empty sample".into()));
        }
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self { mean, std, n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchT {
    pub t: f64,
    pub df: f64,
}

impl WelchT {
    /// One-tailed p-value in the direction of the observed difference.
    pub fn p_one_tailed(&self) -> f64 {
        t_sf(self.t.abs(), self.df)
    }
}

/// Welch t statistic and Welch–Satterthwaite degrees of freedom.
///
/// `None` when the test is not applicable: both standard deviations are zero,
/// or either sample has a single observation.
pub fn welch_t(a: &SampleSummary, b: &SampleSummary) -> Option<WelchT> {
    if a.n < 2 || b.n < 2 || (a.std == 0.0 && b.std == 0.0) {
        return None;
    }
    // Scaling by the larger std keeps the squares clear of underflow.
    let scale = a.std.max(b.std);
    let va = (a.std / scale).powi(2) / a.n as f64;
    let vb = (b.std / scale).powi(2) / b.n as f64;
    let se2 = va + vb;
    let t = (a.mean - b.mean) / scale / se2.sqrt();
    let df = se2 * se2 / (va * va / (a.n - 1) as f64 + vb * vb / (b.n - 1) as f64);
    Some(WelchT { t, df })
}

/// Upper-tail probability `P(T > t)` of Student's t with `df` degrees of freedom.
pub fn t_sf(t: f64, df: f64) -> f64 {
    assert!(df > 0.0, "degrees of freedom must be positive");
    if t == 0.0 {
        return 0.5;
    }
    let x = df / (df + t * t);
    let tail = 0.5 * regularized_incomplete_beta(x, df / 2.0, 0.5);
    if t > 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

const BETA_CF_MAX_ITER: usize = 200;
const BETA_CF_EPS: f64 = 1e-15;
const TINY: f64 = 1e-300;

/// `I_x(a, b)`, evaluated with a Lentz continued fraction.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    // The fraction converges quickly for x < (a + 1) / (a + b + 2).
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(x, a, b) / a
    } else {
        1.0 - front * beta_cf(1.0 - x, b, a) / b
    }
}

fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=BETA_CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < BETA_CF_EPS {
            break;
        }
    }
    h
}

/// Complementary error function.
///
/// Below 3 it uses the positive-term series
/// `erf x = 2/√π · e^{-x²} · Σ 2ⁿ x^{2n+1} / (1·3·…·(2n+1))`; above, the
/// continued fraction for `erfc`.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 3.0 {
        return 1.0 - erf_series(x);
    }
    // erfc x = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), Lentz.
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..300 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = c * d;
        f *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term > sum * 1e-17 {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
    }
    2.0 / PI.sqrt() * (-x2).exp() * sum
}

pub fn erf(x: f64) -> f64 {
    if x.abs() < 3.0 {
        x.signum() * erf_series(x.abs())
    } else {
        1.0 - erfc(x)
    }
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// One-tailed critical values of the signed-rank statistic at α = 0.05,
/// for n = 5..=30.
const CRITICAL_W_05: [u32; 26] = [
    0, 2, 3, 5, 8, 10, 13, 17, 21, 25, 30, 35, 41, 47, 53, 60, 67, 75, 83, 91, 100, 110, 119, 130, 140, 151,
];

pub fn critical_w(n: usize) -> Option<u32> {
    n.checked_sub(5).and_then(|i| CRITICAL_W_05.get(i)).copied()
}

/// Smallest sample for which the normal approximation is reported.
pub const MIN_NORMAL_APPROX_N: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalApprox {
    pub mean_w: f64,
    pub std_w: f64,
    pub z: f64,
    /// Lower-tail probability of `z`.
    pub p_one_tailed: f64,
}

/// Normal approximation of the signed-rank statistic `w` for `n` non-zero pairs.
pub fn signed_rank_normal(n: usize, w: f64) -> NormalApprox {
    let nf = n as f64;
    let mean_w = nf * (nf + 1.0) / 4.0;
    let std_w = (nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0).sqrt();
    let z = (w - mean_w) / std_w;
    NormalApprox {
        mean_w,
        std_w,
        z,
        p_one_tailed: normal_cdf(z),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonReport {
    pub n_zero_diffs: usize,
    pub n_effective: usize,
    pub w_plus: f64,
    pub w_minus: f64,
    pub w: f64,
    pub critical_w: Option<u32>,
    /// Absent when fewer than [`MIN_NORMAL_APPROX_N`] differences are non-zero.
    pub normal: Option<NormalApprox>,
}

impl WilcoxonReport {
    pub fn is_degenerate(&self) -> bool {
        self.n_effective == 0
    }

    /// `W` at or below the tabulated critical value.
    pub fn significant_by_table(&self) -> Option<bool> {
        self.critical_w.map(|c| self.w <= c as f64)
    }
}

/// Paired signed-rank test on `a - b`. Zero differences are dropped and tied
/// absolute differences share their average rank.
pub fn wilcoxon(pairs: &[(f64, f64)]) -> Result<WilcoxonReport> {
    if let Some((a, b)) = pairs.iter().find(|(a, b)| !(a.is_finite() && b.is_finite())) {
        return Err(Error::Config(format!("non-finite pair ({a}, {b})")));
    }
    let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    let n_zero_diffs = pairs.len() - diffs.len();
    let n = diffs.len();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && diffs[order[end]].abs() == diffs[order[start]].abs() {
            end += 1;
        }
        // Ranks start+1 ..= end share their mean.
        let avg = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = avg;
        }
        start = end;
    }

    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let w_minus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d < 0.0)
        .map(|(_, r)| r)
        .sum();
    let w = w_plus.min(w_minus);
    Ok(WilcoxonReport {
        n_zero_diffs,
        n_effective: n,
        w_plus,
        w_minus,
        w,
        critical_w: critical_w(n),
        normal: (n >= MIN_NORMAL_APPROX_N).then(|| signed_rank_normal(n, w)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn s(mean: f64, std: f64, n: usize) -> SampleSummary {
        SampleSummary::new(mean, std, n).unwrap()
    }

    #[test]
    fn welch_table_rows() {
        let r = welch_t(&s(8.2624e-08, 2.5913e-08, 30), &s(2.7097e-12, 7.9283e-13, 30)).unwrap();
        assert!((r.t - 17.4636).abs() < 1e-3, "{r:?}");
        let r = welch_t(&s(26.8113, 27.5200, 30), &s(25.4532, 28.8764, 30)).unwrap();
        assert!((r.t - 0.1865).abs() < 1e-3, "{r:?}");
    }

    #[test]
    fn welch_identical_and_not_applicable() {
        let a = s(3.0, 1.5, 12);
        let r = welch_t(&a, &a).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p_one_tailed(), 0.5);
        assert!(welch_t(&s(1.0, 0.0, 30), &s(2.0, 0.0, 30)).is_none());
        assert!(welch_t(&s(1.0, 1.0, 1), &s(2.0, 1.0, 30)).is_none());
    }

    #[test]
    fn welch_one_zero_std_uses_other_df() {
        let r = welch_t(&s(0.0301, 0.1624, 30), &s(0.0, 0.0, 30)).unwrap();
        assert_relative_eq!(r.df, 29.0, max_relative = 1e-12);
    }

    #[test]
    fn t_sf_basics() {
        assert_eq!(t_sf(0.0, 7.0), 0.5);
        // df = 1 is Cauchy: P(T > 1) = 1/4.
        assert_relative_eq!(t_sf(1.0, 1.0), 0.25, max_relative = 1e-12);
        // df = 2: P(T > t) = (1 - t / sqrt(t² + 2)) / 2.
        let t: f64 = 1.7;
        assert_relative_eq!(
            t_sf(t, 2.0),
            0.5 * (1.0 - t / (t * t + 2.0).sqrt()),
            max_relative = 1e-12
        );
        assert_relative_eq!(t_sf(-t, 2.0), 1.0 - t_sf(t, 2.0), max_relative = 1e-14);
    }

    #[test]
    fn ln_gamma_values() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert_relative_eq!(ln_gamma(0.5), PI.sqrt().ln(), max_relative = 1e-14);
        assert_relative_eq!(ln_gamma(11.0), 3_628_800f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn normal_cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(-3.2194) - 0.0006).abs() < 5e-5);
        assert!((normal_cdf(-3.4206) - 0.0003).abs() < 5e-5);
        assert!((normal_cdf(1.959963984540054) - 0.975).abs() < 1e-12);
        assert!((erf(0.5) - 0.520_499_877_813_046_5).abs() < 1e-15);
        assert!((erfc(4.0) - 1.541_725_790_028_002e-8).abs() < 1e-20);
    }

    #[test]
    fn signed_rank_normal_rows() {
        let a = signed_rank_normal(19, 15.0);
        assert_eq!(a.mean_w, 95.0);
        assert!((a.std_w - 24.8495).abs() < 1e-4);
        assert!((a.z + 3.2194).abs() < 1e-3);
        let b = signed_rank_normal(12, 7.0);
        assert_eq!(b.mean_w, 39.0);
        assert!((b.std_w - 12.7475).abs() < 1e-4);
        assert!((b.z + 2.5103).abs() < 1e-3);
    }

    #[test]
    fn wilcoxon_small_by_hand() {
        // d = [3, -1, 2, 0, -2]: zero dropped, |d| = 3,1,2,2 -> ranks 4,1,2.5,2.5.
        let pairs = [(4.0, 1.0), (0.0, 1.0), (5.0, 3.0), (7.0, 7.0), (1.0, 3.0)];
        let r = wilcoxon(&pairs).unwrap();
        assert_eq!(r.n_zero_diffs, 1);
        assert_eq!(r.n_effective, 4);
        assert_eq!(r.w_plus, 6.5);
        assert_eq!(r.w_minus, 3.5);
        assert_eq!(r.w, 3.5);
        assert!(r.normal.is_none());
    }

    #[test]
    fn wilcoxon_degenerate() {
        let r = wilcoxon(&[(1.0, 1.0), (2.0, 2.0)]).unwrap();
        assert!(r.is_degenerate());
        assert_eq!(r.w, 0.0);
        assert!(r.normal.is_none());
        assert!(wilcoxon(&[(f64::NAN, 1.0)]).is_err());
    }

    #[test]
    fn critical_table_edges() {
        assert_eq!(critical_w(4), None);
        assert_eq!(critical_w(5), Some(0));
        assert_eq!(critical_w(12), Some(17));
        assert_eq!(critical_w(13), Some(21));
        assert_eq!(critical_w(19), Some(53));
        assert_eq!(critical_w(30), Some(151));
        assert_eq!(critical_w(31), None);
    }
}
