//! The progeny law of the forest of mutations and joint mutation counts.
//!
//! A type-`i` cluster begets mutants of the other types; the law of that
//! mutant vector is the series
//! `mu_i(k) = sum_{n>=1} n^{-1} nu_i^{*n}(k + (n-1)e_i)` on `{k : k_i = 0}`,
//! a pmf whenever `m_ii <= 1`. The n-th term's total mass is the
//! first-passage probability `(1/n) P(X^{i,i}_n = -1)` (Kemperman's formula
//! for walks that descend by single steps), so partial sums carry a true
//! bound on the missing mass and truncation is driven by that bound, not by
//! a term count.

use crate::means::{self, Criticality, MeanReport};
use crate::pmf::SupportBox;
use crate::{ConditionAB, Error, Pmf, ProgenyLaw, Result};

/// How a per-type mutation law was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesMode {
    /// Condition A: the first-passage series, truncated by mass.
    Series,
    /// Condition B: clusters are sterile for mutations, law is a Dirac at 0.
    Dirac,
}

/// The mutation progeny law of one type, with its error accounting.
#[derive(Debug, Clone)]
pub struct MutationSeries {
    pub type_index: usize,
    pub mode: SeriesMode,
    /// Pmf on `{k : k_i = 0}`; every weight is a lower bound on the true
    /// value, short by at most `truncation_error + capped_loss`.
    pub pmf: Pmf,
    /// Number of series terms accumulated.
    pub terms_used: u32,
    /// Unaccumulated first-passage mass, `1 - sum(kemperman)`.
    pub truncation_error: f64,
    /// Walk mass clipped by the finite work grid; kept separate from the
    /// series truncation because it bounds a different error.
    pub capped_loss: f64,
    /// Per-term slab masses; entry `n-1` is the mass the n-th term added.
    pub kemperman: Vec<f64>,
}

/// Hard ceiling on series terms; reached only for laws whose diagonal mean
/// is 1 (the first-passage tail then decays like `n^{-1/2}`) with a small
/// `eps`, and reported as an error rather than a silent short pmf.
pub const MAX_TERMS: u32 = 200_000;

/// Ceiling on dense-grid cells (64 MB of f64 per buffer at the limit).
const MAX_CELLS: usize = 4_000_000;

/// First-passage mass `(1/n) P(X^{i,i}_n = -1)` of the type-`i` coding walk.
pub fn kemperman_mass(law: &ProgenyLaw, i: usize, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("kemperman mass needs n >= 1".into()));
    }
    Ok(*kemperman_masses(law, i, n)?.last().expect("n >= 1"))
}

/// First-passage masses for `n = 1..=n_max` by one-dimensional dense
/// convolution of the own-coordinate step marginal. Work grows like
/// `n_max^2`, intended for tables of a few thousand terms.
pub fn kemperman_masses(law: &ProgenyLaw, i: usize, n_max: u32) -> Result<Vec<f64>> {
    if i >= law.d() {
        return Err(Error::Domain(format!("type {i} out of range")));
    }
    let step = law.step_law(i).marginal(i)?;
    let atoms: Vec<(i64, f64)> = step.iter().map(|(p, w)| (i64::from(p[0]), *w)).collect();
    let max_up = atoms.iter().map(|&(d, _)| d).max().unwrap_or(0).max(0);
    let n_max_us = n_max as usize;
    // Positions range over [-n, n * max_up]; offset by n_max.
    let width = n_max_us * (max_up as usize + 1) + 1;
    let mut cur = vec![0.0f64; width];
    let mut next = vec![0.0f64; width];
    let off = n_max_us;
    cur[off] = 1.0;
    let mut out = Vec::with_capacity(n_max_us);
    for n in 1..=n_max_us {
        next[..].fill(0.0);
        for (pos, &v) in cur.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            for &(d, w) in &atoms {
                let t = pos as i64 + d;
                // Support after n steps stays inside the buffer by
                // construction; negative excursions below -n_max cannot
                // happen within n_max single-unit descents.
                next[t as usize] += v * w;
            }
        }
        std::mem::swap(&mut cur, &mut next);
        out.push(cur[off - 1] / n as f64);
    }
    Ok(out)
}

/// Which series engine to use; `Auto` takes the dense grid for `d = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesEngine {
    Auto,
    Dense,
    Sparse,
}

/// Mutation progeny law of type `i` to within `eps` of missing mass.
pub fn mutation_progeny(law: &ProgenyLaw, i: usize, eps: f64) -> Result<MutationSeries> {
    mutation_progeny_with(law, i, eps, SeriesEngine::Auto)
}

/// As [`mutation_progeny`], with an explicit engine choice (the sparse and
/// dense engines must agree; tests compare them).
pub fn mutation_progeny_with(
    law: &ProgenyLaw,
    i: usize,
    eps: f64,
    engine: SeriesEngine,
) -> Result<MutationSeries> {
    if i >= law.d() {
        return Err(Error::Domain(format!("type {i} out of range")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must be in (0,1), got {eps}")));
    }
    match law.condition_ab(i) {
        ConditionAB::A => {}
        ConditionAB::B => {
            return Ok(MutationSeries {
                type_index: i,
                mode: SeriesMode::Dirac,
                pmf: Pmf::dirac(&vec![0; law.d()]),
                terms_used: 0,
                truncation_error: 0.0,
                capped_loss: 0.0,
                kemperman: Vec::new(),
            })
        }
        ConditionAB::Neither => {
            return Err(Error::Domain(format!(
                "type {i} has supercritical same-type mean with cross-type children; \
                 clusters beget infinitely many mutants with positive probability"
            )))
        }
    }
    let dense = match engine {
        SeriesEngine::Auto => law.d() == 2,
        SeriesEngine::Dense => {
            if law.d() != 2 {
                return Err(Error::Domain("dense series engine needs d = 2".into()));
            }
            true
        }
        SeriesEngine::Sparse => false,
    };
    // The error budget left to grid clipping; the series stop itself is
    // governed by eps.
    let clip_budget = (eps * 1e-3).min(1e-11);
    let mut caps = GridCaps {
        own_lo: 64,
        own_hi: 64,
        oth_hi: 64,
    };
    loop {
        let run = if dense {
            run_dense(law, i, eps, clip_budget, caps)?
        } else {
            run_sparse(law, i, eps, clip_budget, caps)?
        };
        match run {
            RunOutcome::Done(series) => return Ok(series),
            RunOutcome::Clipped { low, high, oth } => {
                if low {
                    caps.own_lo *= 2;
                }
                if high {
                    caps.own_hi *= 2;
                }
                if oth {
                    caps.oth_hi *= 2;
                }
                let cells = (caps.own_lo + caps.own_hi + 1) as usize
                    * (caps.oth_hi + 1) as usize
                    * law.d().saturating_sub(1).max(1);
                if cells > MAX_CELLS {
                    return Err(Error::Numeric(
                        "mutation series work grid exceeded its cell limit".into(),
                    ));
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct GridCaps {
    /// Own coordinate ranges over `[-own_lo, own_hi]`.
    own_lo: i32,
    own_hi: i32,
    /// Every other coordinate ranges over `[0, oth_hi]`.
    oth_hi: i32,
}

enum RunOutcome {
    Done(MutationSeries),
    Clipped { low: bool, high: bool, oth: bool },
}

/// Dense two-type engine: the walk law lives on a rectangle indexed by
/// (own, other) and is advanced in place one convolution per term.
fn run_dense(
    law: &ProgenyLaw,
    i: usize,
    eps: f64,
    clip_budget: f64,
    caps: GridCaps,
) -> Result<RunOutcome> {
    let oth_axis = 1 - i;
    let step = law.step_law(i);
    let atoms: Vec<(i32, i32, f64)> = step
        .iter()
        .map(|(p, w)| (p[i], p[oth_axis], *w))
        .collect();
    let w = (caps.own_lo + caps.own_hi + 1) as usize;
    let h = (caps.oth_hi + 1) as usize;
    if w * h > MAX_CELLS {
        return Err(Error::Numeric(
            "mutation series work grid exceeded its cell limit".into(),
        ));
    }
    let idx = |own: i32, oth: i32| (own + caps.own_lo) as usize * h + oth as usize;
    let mut cur = vec![0.0f64; w * h];
    let mut next = vec![0.0f64; w * h];
    cur[idx(0, 0)] = 1.0;
    let (mut lost_low, mut lost_high, mut lost_oth) = (0.0f64, 0.0, 0.0);
    let mut out = vec![0.0f64; h];
    let mut kem = Vec::new();
    let mut acc = 0.0f64;
    let mut terms = 0u32;
    while acc < 1.0 - eps {
        if terms >= MAX_TERMS {
            return Err(Error::Numeric(format!(
                "first-passage mass reached only {acc} after {MAX_TERMS} terms; \
                 a diagonal mean of 1 converges like n^(-1/2), choose eps accordingly"
            )));
        }
        next.fill(0.0);
        for own in -caps.own_lo..=caps.own_hi {
            let row = (own + caps.own_lo) as usize * h;
            for oth in 0..=caps.oth_hi {
                let v = cur[row + oth as usize];
                if v == 0.0 {
                    continue;
                }
                for &(d_own, d_oth, p) in &atoms {
                    let (t_own, t_oth) = (own + d_own, oth + d_oth);
                    if t_own < -caps.own_lo {
                        lost_low += v * p;
                    } else if t_own > caps.own_hi {
                        lost_high += v * p;
                    } else if t_oth > caps.oth_hi {
                        lost_oth += v * p;
                    } else {
                        next[idx(t_own, t_oth)] += v * p;
                    }
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
        terms += 1;
        if lost_low + lost_high + lost_oth > clip_budget {
            return Ok(RunOutcome::Clipped {
                low: lost_low > 0.0,
                high: lost_high > 0.0,
                oth: lost_oth > 0.0,
            });
        }
        let mut slab = 0.0f64;
        let row = (caps.own_lo - 1) as usize * h;
        for oth in 0..h {
            let v = cur[row + oth];
            if v != 0.0 {
                slab += v;
                out[oth] += v / f64::from(terms);
            }
        }
        kem.push(slab / f64::from(terms));
        acc += slab / f64::from(terms);
    }
    let mut pmf = Pmf::zero(2);
    for (oth, &v) in out.iter().enumerate() {
        if v != 0.0 {
            let mut k = vec![0i32; 2];
            k[oth_axis] = oth as i32;
            pmf.add_atom(&k, v)?;
        }
    }
    Ok(RunOutcome::Done(MutationSeries {
        type_index: i,
        mode: SeriesMode::Series,
        pmf,
        terms_used: terms,
        truncation_error: 1.0 - acc,
        capped_loss: lost_low + lost_high + lost_oth,
        kemperman: kem,
    }))
}

/// Sparse engine for any dimension; same stopping rules as the dense one.
fn run_sparse(
    law: &ProgenyLaw,
    i: usize,
    eps: f64,
    clip_budget: f64,
    caps: GridCaps,
) -> Result<RunOutcome> {
    let d = law.d();
    let step = law.step_law(i);
    let mut lo = vec![0i32; d];
    let mut hi = vec![caps.oth_hi; d];
    lo[i] = -caps.own_lo;
    hi[i] = caps.own_hi;
    let keep = SupportBox::new(lo, hi)?;
    let mut cur = Pmf::dirac(&vec![0; d]);
    let mut out = Pmf::zero(d);
    let mut kem = Vec::new();
    let mut lost = 0.0f64;
    let mut acc = 0.0f64;
    let mut terms = 0u32;
    let mut e_i = vec![0i32; d];
    e_i[i] = 1;
    while acc < 1.0 - eps {
        if terms >= MAX_TERMS {
            return Err(Error::Numeric(format!(
                "first-passage mass reached only {acc} after {MAX_TERMS} terms; \
                 a diagonal mean of 1 converges like n^(-1/2), choose eps accordingly"
            )));
        }
        let (next, l) = cur.convolve_capped(&step, Some(&keep))?;
        cur = next;
        lost += l;
        terms += 1;
        if lost > clip_budget {
            // Direction of the clipping is not tracked by the sparse path;
            // grow every cap.
            return Ok(RunOutcome::Clipped {
                low: true,
                high: true,
                oth: true,
            });
        }
        let (slab, _) = cur.filter(|p| p[i] == -1);
        let mass = slab.mass();
        let mut term = slab.shift(&e_i)?;
        term.scale(&(1.0 / f64::from(terms)));
        out = out.add(&term)?;
        kem.push(mass / f64::from(terms));
        acc += mass / f64::from(terms);
    }
    Ok(RunOutcome::Done(MutationSeries {
        type_index: i,
        mode: SeriesMode::Series,
        pmf: out,
        terms_used: terms,
        truncation_error: 1.0 - acc,
        capped_loss: lost,
        kemperman: kem,
    }))
}

/// The full mutation progeny law, one series per type.
#[derive(Debug, Clone)]
pub struct MutationLaw {
    pub d: usize,
    pub series: Vec<MutationSeries>,
}

impl MutationLaw {
    pub fn compute(law: &ProgenyLaw, eps: f64) -> Result<Self> {
        let series = (0..law.d())
            .map(|i| mutation_progeny(law, i, eps))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { d: law.d(), series })
    }
}

/// An entry of the mutation mean matrix, possibly infinite (supercritical
/// same-type mean with cross-type children keeps the entry out of R).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanEntry {
    Finite(f64),
    Infinite,
}

impl MeanEntry {
    pub fn finite(self) -> Option<f64> {
        match self {
            MeanEntry::Finite(x) => Some(x),
            MeanEntry::Infinite => None,
        }
    }
}

impl std::fmt::Display for MeanEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeanEntry::Finite(x) => write!(f, "{x}"),
            MeanEntry::Infinite => write!(f, "inf"),
        }
    }
}

/// Mean structure of the mutation law.
#[derive(Debug, Clone)]
pub struct MutationMeanReport {
    pub d: usize,
    /// `mbar[i][j] = m_ij / (1 - m_ii)` off the diagonal, zero on it.
    pub mbar: Vec<Vec<MeanEntry>>,
    pub irreducible: bool,
    pub primitive: bool,
    pub all_finite: bool,
    /// Spectral data, present when every entry is finite.
    pub rho: Option<f64>,
    pub ubar: Option<Vec<f64>>,
    pub vbar: Option<Vec<f64>>,
    pub criticality: Option<Criticality>,
}

/// Builds the mutation mean report from the base-law report.
pub fn mutation_mean_report(r: &MeanReport) -> Result<MutationMeanReport> {
    let d = r.d;
    let mut all_finite = true;
    let mbar: Vec<Vec<MeanEntry>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if i == j || r.m[i][j] == 0.0 {
                        MeanEntry::Finite(0.0)
                    } else if r.m[i][i] < 1.0 {
                        MeanEntry::Finite(r.m[i][j] / (1.0 - r.m[i][i]))
                    } else {
                        all_finite = false;
                        MeanEntry::Infinite
                    }
                })
                .collect()
        })
        .collect();
    // Structure never depends on magnitudes: the support pattern of the
    // collapsed matrix is the off-diagonal pattern of the base matrix.
    let adj: Vec<Vec<bool>> = (0..d)
        .map(|i| (0..d).map(|j| i != j && r.m[i][j] > 0.0).collect())
        .collect();
    let irreducible = means::is_irreducible(&adj);
    let primitive = irreducible && means::period(&adj) == 1;
    let (rho, ubar, vbar, criticality) = if all_finite {
        let m: Vec<Vec<f64>> = mbar
            .iter()
            .map(|row| row.iter().map(|e| e.finite().expect("all finite")).collect())
            .collect();
        let p = means::perron(&m)?;
        let crit = if (p.rho - 1.0).abs() <= means::CRIT_TOL {
            Criticality::Critical
        } else if p.rho < 1.0 {
            Criticality::Subcritical
        } else {
            Criticality::Supercritical
        };
        (Some(p.rho), Some(p.u), Some(p.v), Some(crit))
    } else {
        (None, None, None, None)
    };
    Ok(MutationMeanReport {
        d,
        mbar,
        irreducible,
        primitive,
        all_finite,
        rho,
        ubar,
        vbar,
        criticality,
    })
}

/// Result of comparing the eigen structures of `M` and `Mbar`.
#[derive(Debug, Clone)]
pub struct EigenRelation {
    /// Criticality classes of the two matrices agree.
    pub transfer_ok: bool,
    /// Max deviation of the right eigenvectors (meaningful at criticality,
    /// where `ubar = u` exactly).
    pub ubar_dev: f64,
    /// Max deviation of `vbar` from `v (I - diag(m_ii))`, renormalized
    /// (again an identity at criticality).
    pub vbar_dev: f64,
}

/// Checks criticality transfer and the critical eigenvector identities
/// `ubar = u`, `vbar = c v (I - diag(m_ii))`. The identities characterize
/// the critical case: away from it the deviations are reported but nonzero.
pub fn eigen_relation_check(r: &MeanReport, rbar: &MutationMeanReport) -> Result<EigenRelation> {
    if !(r.primitive && rbar.primitive) {
        return Err(Error::Domain(
            "eigen relation check needs primitive mean matrices".into(),
        ));
    }
    let (Some(rho_bar), Some(ubar), Some(vbar)) = (rbar.rho, &rbar.ubar, &rbar.vbar) else {
        return Err(Error::Domain(
            "eigen relation check needs a finite collapsed mean matrix".into(),
        ));
    };
    let side = |x: f64| {
        if (x - 1.0).abs() <= means::CRIT_TOL {
            0
        } else if x < 1.0 {
            -1
        } else {
            1
        }
    };
    let transfer_ok = side(r.rho) == side(rho_bar);
    let ubar_dev = r
        .u
        .iter()
        .zip(ubar)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    // Candidate left vector, rescaled to the same normalization as vbar
    // (inner product 1 against ubar).
    let mut cand: Vec<f64> = (0..r.d).map(|i| r.v[i] * (1.0 - r.m[i][i])).collect();
    let dot: f64 = ubar.iter().zip(&cand).map(|(a, b)| a * b).sum();
    if dot.abs() < 1e-300 {
        return Err(Error::Numeric("degenerate left eigenvector candidate".into()));
    }
    for c in cand.iter_mut() {
        *c /= dot;
    }
    let vbar_dev = cand
        .iter()
        .zip(vbar)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    Ok(EigenRelation {
        transfer_ok,
        ubar_dev,
        vbar_dev,
    })
}

/// A point query for the joint law of mutation counts: seeds `x`, cluster
/// totals `n` (so type `i` contributes `n_i - x_i` mutants), and cross
/// counts `k[i][j]` of type-`j` mutants with type-`i` parents.
#[derive(Debug, Clone)]
pub struct JointQuery {
    pub x: Vec<u64>,
    pub n: Vec<u64>,
    pub k: Vec<Vec<u64>>,
}

impl JointQuery {
    fn validate(&self, d: usize) -> Result<()> {
        if self.x.len() != d || self.n.len() != d || self.k.len() != d {
            return Err(Error::DimMismatch {
                expected: d,
                got: self.x.len().min(self.n.len()).min(self.k.len()),
            });
        }
        for (i, row) in self.k.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            if row[i] != 0 {
                return Err(Error::Domain(format!(
                    "diagonal cross count k[{i}][{i}] must be 0"
                )));
            }
        }
        for j in 0..d {
            let col: u64 = (0..d).filter(|&i| i != j).map(|i| self.k[i][j]).sum();
            if self.n[j] != self.x[j] + col {
                return Err(Error::Domain(format!(
                    "inconsistent query: n_{j} = {} but x_{j} + sum_i k[i][{j}] = {}",
                    self.n[j],
                    self.x[j] + col
                )));
            }
        }
        Ok(())
    }
}

/// Exact determinant of an integer matrix by fraction-free (Bareiss)
/// elimination; the empty matrix has determinant 1.
pub fn det_bareiss(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return 0;
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Joint probability of one fully specified mutation outcome:
/// `det(K)/(nbar_1 ... nbar_d) * prod_i mu_i^{*n_i}(row i of k)`, where `K`
/// is `(-k_ij)` with `k_ii = -n_i` and the rows/columns of types with
/// `n_i = 0` removed. Values are lower bounds within the series'
/// accumulated truncation errors.
pub fn joint_mutation_pmf(mu: &MutationLaw, q: &JointQuery) -> Result<f64> {
    q.validate(mu.d)?;
    let d = mu.d;
    let active: Vec<usize> = (0..d).filter(|&i| q.n[i] > 0).collect();
    // K over active types.
    let kmat: Vec<Vec<i128>> = active
        .iter()
        .map(|&i| {
            active
                .iter()
                .map(|&j| {
                    if i == j {
                        q.n[i] as i128
                    } else {
                        -(q.k[i][j] as i128)
                    }
                })
                .collect()
        })
        .collect();
    let det = det_bareiss(kmat);
    if det <= 0 {
        // Inconsistent wiring (for instance a mutation cycle with no seed)
        // has zero probability.
        return Ok(0.0);
    }
    let mut value = det as f64;
    for i in 0..d {
        value /= (q.n[i].max(1)) as f64;
    }
    let hi: Vec<i32> = q.n.iter().map(|&n| n as i32).collect();
    let keep = SupportBox::new(vec![0; d], hi)?;
    for i in 0..d {
        let row: Vec<i32> = (0..d).map(|j| q.k[i][j] as i32).collect();
        if q.n[i] == 0 {
            if row.iter().any(|&k| k != 0) {
                return Ok(0.0);
            }
            continue;
        }
        // Supports live in Z_+^d, so clipping outside the box is exact for
        // point queries inside it.
        let (pow, _) = mu.series[i].pmf.convolve_power(q.n[i] as u32, Some(&keep))?;
        value *= pow.prob(&row);
        if value == 0.0 {
            return Ok(0.0);
        }
    }
    Ok(value)
}

/// Probability that the cluster totals equal `n` from seeds `x`, summing
/// [`joint_mutation_pmf`] over every consistent cross-count matrix.
pub fn total_counts_pmf(mu: &MutationLaw, x: &[u64], n: &[u64]) -> Result<f64> {
    let d = mu.d;
    if x.len() != d || n.len() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: x.len().min(n.len()),
        });
    }
    // Column targets; a type with fewer clusters than seeds is impossible.
    let mut targets = Vec::with_capacity(d);
    for j in 0..d {
        match n[j].checked_sub(x[j]) {
            Some(t) => targets.push(t),
            None => return Ok(0.0),
        }
    }
    let mut k = vec![vec![0u64; d]; d];
    let mut total = 0.0;
    // Enumerate column by column: all ways to split column j's target over
    // the d-1 off-diagonal rows.
    fn rec(
        mu: &MutationLaw,
        x: &[u64],
        n: &[u64],
        targets: &[u64],
        k: &mut Vec<Vec<u64>>,
        j: usize,
        total: &mut f64,
    ) -> Result<()> {
        let d = mu.d;
        if j == d {
            let q = JointQuery {
                x: x.to_vec(),
                n: n.to_vec(),
                k: k.clone(),
            };
            *total += joint_mutation_pmf(mu, &q)?;
            return Ok(());
        }
        let rows: Vec<usize> = (0..d).filter(|&i| i != j).collect();
        fn split(
            mu: &MutationLaw,
            x: &[u64],
            n: &[u64],
            targets: &[u64],
            k: &mut Vec<Vec<u64>>,
            j: usize,
            rows: &[usize],
            pos: usize,
            left: u64,
            total: &mut f64,
        ) -> Result<()> {
            if pos + 1 == rows.len() {
                // A row with no individuals cannot produce mutants.
                if left > 0 && n[rows[pos]] == 0 {
                    return Ok(());
                }
                k[rows[pos]][j] = left;
                rec(mu, x, n, targets, k, j + 1, total)?;
                k[rows[pos]][j] = 0;
                return Ok(());
            }
            for take in 0..=left {
                if take > 0 && n[rows[pos]] == 0 {
                    break;
                }
                k[rows[pos]][j] = take;
                split(mu, x, n, targets, k, j, rows, pos + 1, left - take, total)?;
                k[rows[pos]][j] = 0;
            }
            Ok(())
        }
        if rows.is_empty() {
            // d = 1: no cross counts; target must be zero.
            if targets[j] == 0 {
                rec(mu, x, n, targets, k, j + 1, total)?;
            }
            return Ok(());
        }
        split(mu, x, n, targets, k, j, &rows, 0, targets[j], total)
    }
    rec(mu, x, n, &targets, &mut k, 0, &mut total)?;
    Ok(total)
}
