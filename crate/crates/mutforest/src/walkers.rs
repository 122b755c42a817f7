//! Walk-based sampling of mutation censuses and direction asymptotics.
//!
//! The coding chains of a branching forest issued from `x` are `d`
//! independent lattice walks; the type populations `(N_1,...,N_d)` form the
//! smallest solution of the termination system
//! `x_j + sum_i X^{i,j}(N_i) = 0`. Sampling the walks and solving that
//! system yields a mutation census without materializing the forest. Walks
//! are consumed in a streaming fashion: only current prefix sums are kept,
//! so memory is `O(d^2)` regardless of forest size.

use rand::Rng;

use crate::forest::MutationCensus;
use crate::means::{self, Criticality};
use crate::seeds::{replicate_rng, StreamKind};
use crate::{Error, ProgenyLaw, Result};

/// One walk per type, extended lazily step by step.
struct StreamingWalks<'a, R: Rng> {
    tables: Vec<crate::progeny::LitterTable>,
    law: &'a ProgenyLaw,
    /// `sums[i][j] = X^{i,j}(steps[i])`.
    sums: Vec<Vec<i64>>,
    steps: Vec<u64>,
    total_steps: u64,
    rng: R,
}

impl<'a, R: Rng> StreamingWalks<'a, R> {
    fn new(law: &'a ProgenyLaw, rng: R) -> Self {
        let d = law.d();
        Self {
            tables: law.tables(),
            law,
            sums: vec![vec![0i64; d]; d],
            steps: vec![0u64; d],
            total_steps: 0,
            rng,
        }
    }

    /// Advances walk `i` by one step.
    fn step(&mut self, i: usize) {
        let litter = self.tables[i].sample(&mut self.rng);
        for (j, &k) in litter.iter().enumerate() {
            self.sums[i][j] += i64::from(k);
        }
        self.sums[i][i] -= 1;
        self.steps[i] += 1;
        self.total_steps += 1;
        let _ = self.law;
    }
}

/// Solves the termination system by monotone relaxation and returns the
/// census. Every sweep advances each walk `j` to the first passage of its
/// own coordinate at the current target `-(x_j + sum_{i!=j} X^{i,j}(N_i))`;
/// targets only move down as other walks extend, so each walk only ever
/// advances, and the fixed point is the componentwise-smallest solution.
/// Stops early (censored) once the walks consumed `budget` steps in total.
/// A censored census counts every recorded vertex (seeds plus all children
/// born to processed parents), matching the forest engine's censored
/// snapshot; a completed census has no backlog, so there the count equals
/// the steps taken.
pub fn sample_census_walk<R: Rng>(
    law: &ProgenyLaw,
    x: &[u64],
    budget: u64,
    rng: R,
) -> Result<MutationCensus> {
    let d = law.d();
    if x.len() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: x.len(),
        });
    }
    let mut walks = StreamingWalks::new(law, rng);
    let mut censored = false;
    'relax: loop {
        let mut moved = false;
        for j in 0..d {
            let cross: i64 = (0..d)
                .filter(|&i| i != j)
                .map(|i| walks.sums[i][j])
                .sum();
            let target = -(x[j] as i64 + cross);
            while walks.sums[j][j] > target {
                if walks.total_steps >= budget {
                    censored = true;
                    break 'relax;
                }
                walks.step(j);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    let n: Vec<u64> = if censored {
        // Recorded vertices: seeds, own children (the own coordinate moves
        // by children minus one per step) and cross children. Keeping the
        // unprocessed backlog in the count puts mutants and vertices on the
        // same footing, so ratio statistics stay untilted.
        (0..d)
            .map(|j| {
                let own = walks.sums[j][j] + walks.steps[j] as i64;
                let cross: i64 = (0..d).filter(|&i| i != j).map(|i| walks.sums[i][j]).sum();
                (x[j] as i64 + own + cross) as u64
            })
            .collect()
    } else {
        walks.steps.clone()
    };
    let mut m = vec![vec![0u64; d]; d];
    for i in 0..d {
        for j in 0..d {
            if i != j {
                // Cross sums are nondecreasing, hence nonnegative.
                m[i][j] = walks.sums[i][j] as u64;
            }
        }
    }
    Ok(MutationCensus {
        x: x.to_vec(),
        n,
        m,
        censored,
    })
}

pub use crate::stats::Estimate;

/// Per-scale outcome of the direction experiment.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DirectionScale {
    pub scale: u64,
    /// Subcritical: per-type estimates of `N_i(nw)/n`; empty for critical.
    pub n_over_n: Vec<Estimate>,
    /// Subcritical: per-type estimates of `M_i(nw)/n`; empty for critical.
    pub m_over_n: Vec<Estimate>,
    /// Critical: per-type estimates of `M_i(nw)/N_i(nw)` over the replicates
    /// that reach the step budget; empty otherwise.
    pub m_over_pop: Vec<Estimate>,
    pub replicates: u64,
    pub censored: u64,
}

/// Monte Carlo verification data for the direction-asymptotics limits.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DirectionExperiment {
    pub w: Vec<u64>,
    pub critical: bool,
    /// Predicted visit constants `c_i(w)` (subcritical only).
    pub c_pred: Vec<f64>,
    /// Predicted mutation constants `(1 - m_ii) c_i(w) - w_i` (subcritical)
    /// or ratio limits `1 - m_ii` (critical).
    pub m_pred: Vec<f64>,
    pub scales: Vec<DirectionScale>,
}

/// Largest acceptable censored fraction for subcritical experiments; beyond
/// it the means are biased and the experiment errors out instead of
/// reporting them.
pub const MAX_CENSORED_FRACTION: f64 = 1e-3;

/// Runs the direction experiment: `R` replicates of the walk census at each
/// scale `n` along direction `w`, with replicate-indexed rng streams drawn
/// from `seed`. Critical models report the mutation-to-population ratio
/// whose limit is `1 - m_ii`, taken over the replicates that reach the step
/// budget: their litter draws are not conditioned on anything, while a
/// forest observed at extinction has litter counts tilted low by order
/// `n / N`, which would sit many standard errors below the limit at any
/// replicate count. Subcritical models report `N_i/n` and `M_i/n` against
/// `c_i(w)` and `(1 - m_ii) c_i(w) - w_i` over completed replicates only.
/// Supercritical models are rejected, as the counts are infinite with
/// positive probability.
pub fn direction_asymptotics(
    law: &ProgenyLaw,
    w: &[u64],
    scales: &[u64],
    replicates: u64,
    budget: u64,
    seed: u64,
) -> Result<DirectionExperiment> {
    let d = law.d();
    if w.len() != d || w.iter().all(|&x| x == 0) {
        return Err(Error::Domain("direction must be a nonzero vector".into()));
    }
    if scales.windows(2).any(|s| s[0] >= s[1]) || scales.is_empty() || scales[0] == 0 {
        return Err(Error::Domain("scales must be positive and increasing".into()));
    }
    let report = means::mean_report(law)?;
    let critical = match report.criticality {
        Criticality::Supercritical => {
            return Err(Error::Domain(format!(
                "direction asymptotics needs rho <= 1, got rho = {}",
                report.rho
            )))
        }
        Criticality::Critical => true,
        Criticality::Subcritical => false,
    };
    let wf: Vec<f64> = w.iter().map(|&x| x as f64).collect();
    let (c_pred, m_pred) = if critical {
        let m = (0..d).map(|i| 1.0 - report.m[i][i]).collect();
        (Vec::new(), m)
    } else {
        means::direction_constants(&report.m, &wf)?
    };
    let mut out_scales = Vec::with_capacity(scales.len());
    for &scale in scales {
        let x: Vec<u64> = w.iter().map(|&wi| wi * scale).collect();
        let mut censored = 0u64;
        let mut per_type_n: Vec<Vec<f64>> = vec![Vec::new(); d];
        let mut per_type_m: Vec<Vec<f64>> = vec![Vec::new(); d];
        let mut per_type_ratio: Vec<Vec<f64>> = vec![Vec::new(); d];
        for rep in 0..replicates {
            let rng = replicate_rng(seed, rep, StreamKind::WalkCensus);
            let census = sample_census_walk(law, &x, budget, rng)?;
            if census.censored {
                censored += 1;
                if !critical {
                    // Means would be biased; skip the censored replicate and
                    // enforce the censoring cap below.
                    continue;
                }
            } else if critical {
                // Extinct forests carry the death tilt; the ratio stratum is
                // the budget-reaching replicates only.
                continue;
            }
            for i in 0..d {
                if critical {
                    if census.n[i] > 0 {
                        per_type_ratio[i].push(census.m_tot(i) as f64 / census.n[i] as f64);
                    }
                } else {
                    per_type_n[i].push(census.n[i] as f64 / scale as f64);
                    per_type_m[i].push(census.m_tot(i) as f64 / scale as f64);
                }
            }
        }
        if !critical && censored as f64 > MAX_CENSORED_FRACTION * replicates as f64 {
            return Err(Error::Numeric(format!(
                "scale {scale}: {censored}/{replicates} replicates censored; raise the budget"
            )));
        }
        if critical && censored < 2 {
            return Err(Error::Numeric(format!(
                "scale {scale}: only {censored}/{replicates} replicates reach the budget; the \
                 critical ratio needs at least 2, so raise replicates or lower the budget"
            )));
        }
        out_scales.push(DirectionScale {
            scale,
            n_over_n: per_type_n.iter().map(|s| Estimate::from_samples(s)).collect(),
            m_over_n: per_type_m.iter().map(|s| Estimate::from_samples(s)).collect(),
            m_over_pop: per_type_ratio
                .iter()
                .map(|s| Estimate::from_samples(s))
                .collect(),
            replicates,
            censored,
        });
    }
    Ok(DirectionExperiment {
        w: w.to_vec(),
        critical,
        c_pred,
        m_pred,
        scales: out_scales,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::TypedForest;
    use crate::SparsePmf;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn law_diamond() -> ProgenyLaw {
        let l1 = SparsePmf::from_entries(
            2,
            vec![(vec![0, 0], 0.5), (vec![2, 0], 0.3), (vec![1, 1], 0.2)],
        )
        .unwrap();
        let l2 = SparsePmf::from_entries(
            2,
            vec![(vec![0, 0], 0.6), (vec![0, 2], 0.3), (vec![1, 0], 0.1)],
        )
        .unwrap();
        ProgenyLaw::new(vec![l1, l2], None).unwrap()
    }

    #[test]
    fn single_type_walk_is_first_passage() {
        // d = 1: N_1 is the first passage to -x_1; the census must match the
        // forest sampler in distribution of total size. Here: mean check.
        let l = SparsePmf::from_entries(1, vec![(vec![0], 0.6), (vec![2], 0.4)]).unwrap();
        let law = ProgenyLaw::new(vec![l], None).unwrap();
        let mut sum = 0u64;
        let reps = 20_000;
        for rep in 0..reps {
            let rng = replicate_rng(3, rep, StreamKind::WalkCensus);
            let c = sample_census_walk(&law, &[1], 1_000_000, rng).unwrap();
            assert!(!c.censored);
            sum += c.n[0];
        }
        // E N = 1/(1 - m) = 5.
        let mean = sum as f64 / reps as f64;
        assert!((mean - 5.0).abs() < 0.15, "mean {mean}");
    }

    #[test]
    fn zero_seed_gives_empty_census() {
        let law = law_diamond();
        let rng = ChaCha8Rng::seed_from_u64(0);
        let c = sample_census_walk(&law, &[0, 0], 1000, rng).unwrap();
        assert_eq!(c.n, vec![0, 0]);
        assert_eq!(c.m_tot(0), 0);
        assert!(!c.censored);
    }

    #[test]
    fn walk_and_forest_censuses_agree_on_means() {
        let law = law_diamond();
        let reps = 20_000u64;
        let mut walk: Vec<Vec<f64>> = vec![Vec::new(); 4];
        let mut forest: Vec<Vec<f64>> = vec![Vec::new(); 4];
        for rep in 0..reps {
            let rng = replicate_rng(17, rep, StreamKind::WalkCensus);
            let cw = sample_census_walk(&law, &[1, 0], 1_000_000, rng).unwrap();
            let mut rng = replicate_rng(17, rep, StreamKind::ForestSample);
            let cf = TypedForest::sample(&law, &[1, 0], 1_000_000, &mut rng)
                .unwrap()
                .census();
            for i in 0..2 {
                walk[i].push(cw.n[i] as f64);
                walk[2 + i].push(cw.m_tot(i) as f64);
                forest[i].push(cf.n[i] as f64);
                forest[2 + i].push(cf.m_tot(i) as f64);
            }
        }
        // E N = (20/3, 10/3) and E M = (1/3, 4/3), exact by Wald's identity;
        // bands are 4 empirical standard errors.
        let want = [20.0 / 3.0, 10.0 / 3.0, 1.0 / 3.0, 4.0 / 3.0];
        for k in 0..4 {
            let w = Estimate::from_samples(&walk[k]);
            let f = Estimate::from_samples(&forest[k]);
            assert!((w.mean - want[k]).abs() < 4.0 * w.se, "walk {k}: {w:?}");
            assert!((f.mean - want[k]).abs() < 4.0 * f.se, "forest {k}: {f:?}");
            let combined = w.se.hypot(f.se);
            assert!((w.mean - f.mean).abs() < 4.0 * combined, "{k}: {w:?} vs {f:?}");
        }
    }

    #[test]
    fn rejects_supercritical_direction_experiment() {
        let l1 = SparsePmf::from_entries(2, vec![(vec![2, 0], 0.6), (vec![1, 1], 0.4)]).unwrap();
        let l2 = SparsePmf::from_entries(2, vec![(vec![0, 2], 0.6), (vec![1, 0], 0.4)]).unwrap();
        let law = ProgenyLaw::new(vec![l1, l2], None).unwrap();
        assert!(direction_asymptotics(&law, &[1, 0], &[10], 10, 10_000, 1).is_err());
    }

    #[test]
    fn direction_experiment_critical_ratio_stratum() {
        // Coupled litters (1,1) and (0,0) at probability one half each:
        // rho = 1 and m_ii = 1/2, so both ratio limits are 1/2. The ratio is
        // estimated on the budget-reaching replicates only.
        let l = SparsePmf::from_entries(2, vec![(vec![0, 0], 0.5), (vec![1, 1], 0.5)]).unwrap();
        let law = ProgenyLaw::new(vec![l.clone(), l], None).unwrap();
        let exp = direction_asymptotics(&law, &[1, 0], &[20], 400, 100_000, 11).unwrap();
        assert!(exp.critical);
        assert!((exp.m_pred[0] - 0.5).abs() < 1e-12);
        let sc = &exp.scales[0];
        assert!(sc.censored >= 2, "{} replicates reach the budget", sc.censored);
        assert_eq!(sc.censored, sc.m_over_pop[0].n);
        assert!(sc.n_over_n.iter().all(|e| e.n == 0));
        for i in 0..2 {
            let est = &sc.m_over_pop[i];
            assert!((est.mean - 0.5).abs() < 4.0 * est.se, "type {i}: {est:?}");
        }
    }

    #[test]
    fn direction_experiment_subcritical_smoke() {
        let law = law_diamond();
        let exp = direction_asymptotics(&law, &[1, 0], &[20, 50], 200, 4_000_000, 9).unwrap();
        assert!(!exp.critical);
        assert!((exp.c_pred[0] - 20.0 / 3.0).abs() < 1e-10);
        assert!((exp.m_pred[0] - 1.0 / 3.0).abs() < 1e-10);
        let last = exp.scales.last().unwrap();
        assert_eq!(last.censored, 0);
        let est = &last.n_over_n[0];
        assert!((est.mean - exp.c_pred[0]).abs() < 4.0 * est.se, "{est:?}");
        let est = &last.m_over_n[0];
        assert!((est.mean - exp.m_pred[0]).abs() < 4.0 * est.se, "{est:?}");
    }
}
