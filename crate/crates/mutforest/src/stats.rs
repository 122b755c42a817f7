//! Estimators and two-sample tests used by the simulation experiments.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::pmf::Point;
use crate::{Error, Pmf, ProgenyLaw, Result};

/// Point estimate with its standard error and sample size.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub n: u64,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        if samples.is_empty() {
            return Self {
                mean: f64::NAN,
                se: f64::NAN,
                n: 0,
            };
        }
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            f64::NAN
        };
        Self {
            mean,
            se: (var / n).sqrt(),
            n: samples.len() as u64,
        }
    }
}

/// Outcome of a two-sample homogeneity chi-square test.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub df: u64,
    pub p_value: f64,
    /// Number of cells after merging rare outcomes.
    pub cells: usize,
}

/// Two-sample chi-square over discrete vector outcomes. Outcomes whose
/// expected count in either sample falls below `min_expected` are merged
/// into one pooled cell, rarest first.
pub fn chi_square_two_sample(
    xs: &[Point],
    ys: &[Point],
    min_expected: f64,
) -> Result<ChiSquareReport> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::Domain("chi-square needs nonempty samples".into()));
    }
    let mut counts: BTreeMap<&Point, (u64, u64)> = BTreeMap::new();
    for p in xs {
        counts.entry(p).or_default().0 += 1;
    }
    for p in ys {
        counts.entry(p).or_default().1 += 1;
    }
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let total = na + nb;
    // The smaller sample fraction controls which expected count is binding.
    let min_frac = na.min(nb) / total;
    let mut cells: Vec<(u64, u64)> = counts.values().copied().collect();
    cells.sort_by_key(|&(a, b)| a + b);
    // Merge from the rare end until every remaining cell is safe.
    let mut pooled = (0u64, 0u64);
    let mut keep = Vec::with_capacity(cells.len());
    for (idx, &(a, b)) in cells.iter().enumerate() {
        let expected_min = (a + b) as f64 * min_frac;
        if expected_min < min_expected && idx + 1 < cells.len() {
            pooled.0 += a;
            pooled.1 += b;
        } else {
            keep.push((a, b));
        }
    }
    let pooled_expected = (pooled.0 + pooled.1) as f64 * min_frac;
    if pooled.0 + pooled.1 > 0 {
        if pooled_expected < min_expected && !keep.is_empty() {
            // Fold the still-thin pool into the rarest kept cell.
            keep[0].0 += pooled.0;
            keep[0].1 += pooled.1;
        } else {
            keep.push(pooled);
        }
    }
    if keep.len() < 2 {
        return Err(Error::Domain(
            "chi-square needs at least two outcome cells after merging".into(),
        ));
    }
    let mut stat = 0.0f64;
    for &(a, b) in &keep {
        let row = (a + b) as f64;
        let ea = row * na / total;
        let eb = row * nb / total;
        stat += (a as f64 - ea).powi(2) / ea + (b as f64 - eb).powi(2) / eb;
    }
    let df = (keep.len() - 1) as u64;
    let chi = ChiSquared::new(df as f64)
        .map_err(|e| Error::Numeric(format!("chi-square distribution: {e}")))?;
    Ok(ChiSquareReport {
        statistic: stat,
        df,
        p_value: 1.0 - chi.cdf(stat),
        cells: keep.len(),
    })
}

/// Outcome of a two-sample Kolmogorov-Smirnov test.
#[derive(Debug, Clone, serde::Serialize)]
pub struct KsReport {
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Rejection threshold `c(alpha) sqrt((n+m)/(nm))` of the two-sample KS
/// test, with `c(alpha) = sqrt(-ln(alpha/2)/2)`.
pub fn ks_threshold(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Two-sample KS test at level `alpha`; ties are handled by comparing the
/// empirical CDFs at every pooled sample point.
pub fn ks_two_sample(xs: &[f64], ys: &[f64], alpha: f64) -> Result<KsReport> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::Domain("KS needs nonempty samples".into()));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let mut stat = 0.0f64;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n || j < m {
        let t = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < n && a[i] <= t {
            i += 1;
        }
        while j < m && b[j] <= t {
            j += 1;
        }
        let d = (i as f64 / n as f64 - j as f64 / m as f64).abs();
        stat = stat.max(d);
    }
    let threshold = ks_threshold(n, m, alpha);
    Ok(KsReport {
        statistic: stat,
        threshold,
        pass: stat <= threshold,
    })
}

/// Total variation distance between an empirical sample of lattice points
/// and a reference pmf: `(1/2) sum |phat - p|`, counting reference mass
/// off the sample support and sample mass off the reference support.
pub fn empirical_tv(samples: &[Point], reference: &Pmf) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Domain("TV needs a nonempty sample".into()));
    }
    let mut counts: BTreeMap<&Point, u64> = BTreeMap::new();
    for p in samples {
        if p.len() != reference.dim() {
            return Err(Error::DimMismatch {
                expected: reference.dim(),
                got: p.len(),
            });
        }
        *counts.entry(p).or_default() += 1;
    }
    let n = samples.len() as f64;
    let mut tv = 0.0f64;
    for (p, &c) in &counts {
        tv += (c as f64 / n - reference.prob(p)).abs();
    }
    for (p, &w) in reference.iter() {
        if !counts.contains_key(p) {
            tv += w;
        }
    }
    Ok(tv / 2.0)
}

/// One point of an empirical survival curve.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SurvivalPoint {
    pub t: f64,
    pub prob: f64,
    pub se: f64,
}

/// Survival probabilities `P(T > t)` at the query times, from lifetimes
/// that are `None` when the replicate outlived the horizon (treated as
/// surviving every query time; callers must keep queries within horizon).
pub fn survival_curve(lifetimes: &[Option<f64>], times: &[f64]) -> Result<Vec<SurvivalPoint>> {
    if lifetimes.is_empty() {
        return Err(Error::Domain("survival curve needs samples".into()));
    }
    let n = lifetimes.len() as f64;
    Ok(times
        .iter()
        .map(|&t| {
            let alive = lifetimes
                .iter()
                .filter(|l| l.map_or(true, |x| x > t))
                .count() as f64;
            let p = alive / n;
            SurvivalPoint {
                t,
                prob: p,
                se: (p * (1.0 - p) / n).sqrt(),
            }
        })
        .collect())
}

/// Extinction probability vector: the smallest root of `q = f(q)` where
/// `f_i` is the pgf of litter law `i`. Monotone iteration from 0 converges
/// to the smallest fixed point from below.
pub fn extinction_probability(law: &ProgenyLaw) -> Result<Vec<f64>> {
    let d = law.d();
    let mut q = vec![0.0f64; d];
    for _ in 0..200_000 {
        let mut next = vec![0.0f64; d];
        for i in 0..d {
            let mut v = 0.0;
            for (k, &w) in law.law(i).iter() {
                let mut term = w;
                for j in 0..d {
                    for _ in 0..k[j] {
                        term *= q[j];
                    }
                }
                v += term;
            }
            next[i] = v;
        }
        let delta = q
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        q = next;
        if delta < 1e-14 {
            return Ok(q);
        }
    }
    // Critical laws approach 1 at rate 1/t; surface the slow tail rather
    // than an inaccurate answer.
    Err(Error::Numeric(
        "extinction fixed point did not converge to 1e-14".into(),
    ))
}
