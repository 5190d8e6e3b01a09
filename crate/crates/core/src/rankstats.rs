//! Friedman rank test over a datasets × algorithms score matrix.

use std::cmp::Ordering;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    /// One row per dataset, one column per algorithm.
    pub scores: Vec<Vec<f64>>,
    pub higher_is_better: bool,
}

impl ScoreMatrix {
    pub fn new(scores: Vec<Vec<f64>>, higher_is_better: bool) -> Result<Self> {
        let sm = Self {
            scores,
            higher_is_better,
        };
        sm.check()?;
        Ok(sm)
    }

    fn check(&self) -> Result<()> {
        let n = self.scores.len();
        let k = self.scores.first().map_or(0, Vec::len);
        if n < 2 || k < 2 {
            return Err(Error::DegenerateInput(format!(
                "need at least 2 datasets and 2 algorithms, got {n} x {k}"
            )));
        }
        for row in &self.scores {
            if row.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::DegenerateInput("non-finite score".into()));
            }
        }
        Ok(())
    }

    pub fn n_datasets(&self) -> usize {
        self.scores.len()
    }

    pub fn n_algorithms(&self) -> usize {
        self.scores.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriedmanResult {
    pub mean_ranks: Vec<f64>,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

pub const FRIEDMAN_CSV_HEADER: &str = "metric,algorithm,mean_rank,statistic,dof,p_value,status";

impl FriedmanResult {
    /// One CSV line per algorithm.
    pub fn csv_rows(&self, metric: &str, algorithms: &[String]) -> Vec<String> {
        algorithms
            .iter()
            .zip(&self.mean_ranks)
            .map(|(a, r)| {
                format!(
                    "{metric},{a},{r:.4},{:.6},{},{:.6e},ok",
                    self.statistic, self.dof, self.p_value
                )
            })
            .collect()
    }
}

/// Rank 1 is the best value; tied values share the mean of their positions.
pub fn rank_row(values: &[f64], higher_is_better: bool) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    let better = |a: &usize, b: &usize| {
        let c = values[*a].partial_cmp(&values[*b]).unwrap_or(Ordering::Equal);
        if higher_is_better {
            c.reverse()
        } else {
            c
        }
    };
    order.sort_by(better);
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their average
        let avg = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

pub fn friedman(sm: &ScoreMatrix) -> Result<FriedmanResult> {
    sm.check()?;
    let n = sm.n_datasets();
    let k = sm.n_algorithms();
    let mut sums = vec![0.0; k];
    for row in &sm.scores {
        for (s, r) in sums.iter_mut().zip(rank_row(row, sm.higher_is_better)) {
            *s += r;
        }
    }
    let mean_ranks: Vec<f64> = sums.iter().map(|s| s / n as f64).collect();
    let (nf, kf) = (n as f64, k as f64);
    let sq: f64 = mean_ranks.iter().map(|r| r * r).sum();
    let statistic = (12.0 * nf / (kf * (kf + 1.0)) * (sq - kf * (kf + 1.0).powi(2) / 4.0)).max(0.0);
    let dof = k - 1;
    Ok(FriedmanResult {
        mean_ranks,
        statistic,
        dof,
        p_value: chi_square_sf(statistic, dof as f64),
    })
}

/// Upper tail P(X > x) of a chi-square variable with `dof` degrees of freedom.
pub fn chi_square_sf(x: f64, dof: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_q(dof / 2.0, x / 2.0).clamp(0.0, 1.0)
}

const LANCZOS: [f64; 9] = [
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

fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

/// Regularized upper incomplete gamma Q(a, x).
fn gamma_q(a: f64, x: f64) -> f64 {
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_fraction(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

// modified Lentz
fn gamma_q_fraction(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}
