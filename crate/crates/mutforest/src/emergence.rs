//! Emergence times in non-reversible mutation chains.
//!
//! A chain model restricts progeny so that a type-`i` parent only bears
//! children of types `i` and `i+1`, always keeps at least one own-type child,
//! and mutates with positive probability. Types are indexed `0..d`. The
//! population starts from a single type-0 seed and the emergence time of
//! type `j` is the first instant a type-`j` individual exists.
//!
//! Three routes to the emergence time are implemented. The direct route runs
//! the event-driven engine. The representation route races one compound
//! Poisson litter walk per type through piecewise-linear clocks, so each
//! real-time increment is an exact inter-jump integral. The surrogate route
//! replaces the immigration count in the representation's denominator by its
//! floor value 1, giving per-step integrals `theta` that are independent
//! across steps, stochastically dominate the true increments path by path,
//! and match them asymptotically as successive mutation rates grow.
//!
//! For binary fission, where every litter is either two own children or one
//! own child plus one mutant, the surrogate's Laplace transform is an
//! explicit series and its mean has a closed logarithmic form; both ship
//! here together with a quadrature fallback that adjudicates between
//! competing prefactors.

use crate::ct::{self, CtState, UntilOutcome, DEFAULT_POP_CAP};
use crate::progeny::{LitterTable, ProgenyLaw};
use crate::seeds::{run_replicates, StreamKind};
use crate::stats::{survival_curve, Estimate};
use crate::{Error, Pmf, Result};
use rand::Rng;

/// Default censoring horizon for direct emergence sampling, in units of the
/// mean first mutation waiting time `1/lambda_next[0]`.
pub const DEFAULT_HORIZON_FACTOR: f64 = 50.0;

/// A progeny law restricted to one-directional nearest-neighbor mutations.
#[derive(Debug, Clone)]
pub struct ChainModel {
    law: ProgenyLaw,
    tables: Vec<LitterTable>,
    /// Reproduction rate per type.
    pub lambda: Vec<f64>,
    /// Rate of events that change the own-type count, per type.
    pub lambda_own: Vec<f64>,
    /// Rate of events that bear at least one mutant, per type `0..d-1`.
    pub lambda_next: Vec<f64>,
    /// Every non-terminal litter is two own children or one own plus one mutant.
    pub binary_fission: bool,
    /// No litter carries two or more mutants.
    pub single_mutants: bool,
    /// No litter both grows the own count and mutates, so
    /// `lambda = lambda_own + lambda_next` holds exactly per type.
    pub rate_split_exact: bool,
}

impl ChainModel {
    /// Validates the chain conditions and computes the per-edge rates.
    pub fn new(law: ProgenyLaw) -> Result<Self> {
        let d = law.d();
        if d < 2 {
            return Err(Error::Domain(
                "a mutation chain needs at least two types".into(),
            ));
        }
        law.ct_ready()?;
        let mut binary_fission = true;
        let mut single_mutants = true;
        let mut rate_split_exact = true;
        for i in 0..d {
            for (k, _) in law.law(i).iter() {
                for (j, &kj) in k.iter().enumerate() {
                    if kj != 0 && j != i && j != i + 1 {
                        return Err(Error::BadModel(format!(
                            "type {i} litter {k:?} has a child of type {j}: \
                             chain litters stay within types {i} and {}",
                            i + 1
                        )));
                    }
                }
                if k[i] < 1 {
                    return Err(Error::BadModel(format!(
                        "type {i} litter {k:?} has no own-type child: \
                         chain types never die out"
                    )));
                }
                if i + 1 < d {
                    if k[i + 1] > 1 {
                        single_mutants = false;
                    }
                    if k[i] >= 2 && k[i + 1] >= 1 {
                        rate_split_exact = false;
                    }
                    let binary = (k[i] == 2 && k[i + 1] == 0) || (k[i] == 1 && k[i + 1] == 1);
                    if !binary {
                        binary_fission = false;
                    }
                }
            }
        }
        for i in 0..d - 1 {
            if !law.law(i).iter().any(|(k, _)| k[i + 1] >= 1) {
                return Err(Error::BadModel(format!(
                    "type {i} never bears a type {} child: \
                     the mutation rate up the chain must be positive",
                    i + 1
                )));
            }
        }
        let lambda: Vec<f64> = (0..d).map(|i| law.rate(i)).collect::<Result<_>>()?;
        let lambda_own: Vec<f64> = (0..d).map(|i| edge_rate(&law, &lambda, i, i)).collect();
        let lambda_next: Vec<f64> = (0..d - 1)
            .map(|i| edge_rate(&law, &lambda, i, i + 1))
            .collect();
        let tables = law.tables();
        Ok(Self {
            law,
            tables,
            lambda,
            lambda_own,
            lambda_next,
            binary_fission,
            single_mutants,
            rate_split_exact,
        })
    }

    /// Binary fission chain: type `i < d-1` splits into two own children at
    /// rate `pairs[i].0` and into one own child plus one mutant at rate
    /// `pairs[i].1`; the last type splits into two own children at `last_rate`.
    pub fn binary(pairs: &[(f64, f64)], last_rate: f64) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Domain(
                "a binary chain needs at least one (own, mutation) rate pair".into(),
            ));
        }
        let d = pairs.len() + 1;
        let mut laws = Vec::with_capacity(d);
        let mut rates = Vec::with_capacity(d);
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if !(a >= 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
                return Err(Error::BadModel(
                    "binary chain rates need own >= 0 and mutation > 0".into(),
                ));
            }
            let rate = a + b;
            let mut entries = Vec::new();
            let mut two_own = vec![0i32; d];
            two_own[i] = 2;
            let mut mutant = vec![0i32; d];
            mutant[i] = 1;
            mutant[i + 1] = 1;
            if a > 0.0 {
                entries.push((two_own, a / rate));
            }
            entries.push((mutant, b / rate));
            laws.push(Pmf::from_entries(d, entries)?);
            rates.push(rate);
        }
        if !(last_rate > 0.0 && last_rate.is_finite()) {
            return Err(Error::BadModel(
                "the last type needs a positive splitting rate".into(),
            ));
        }
        let mut two_own = vec![0i32; d];
        two_own[d - 1] = 2;
        laws.push(Pmf::dirac(&two_own));
        rates.push(last_rate);
        Self::new(ProgenyLaw::new(laws, Some(rates))?)
    }

    pub fn law(&self) -> &ProgenyLaw {
        &self.law
    }

    pub fn d(&self) -> usize {
        self.law.d()
    }

    /// Rate at which the coordinate-`j` component of the type-`i` litter
    /// walk jumps; zero off the chain edges `j = i` and `j = i + 1`.
    pub fn edge_rate(&self, i: usize, j: usize) -> f64 {
        edge_rate(&self.law, &self.lambda, i, j)
    }

    /// Default censoring horizon for direct emergence sampling.
    pub fn default_horizon(&self) -> f64 {
        DEFAULT_HORIZON_FACTOR / self.lambda_next[0]
    }

    fn check_target(&self, target: usize) -> Result<()> {
        if target < 1 || target >= self.d() {
            return Err(Error::Domain(format!(
                "emergence target must be a type in 1..{}",
                self.d()
            )));
        }
        Ok(())
    }

    fn check_binary(&self, what: &str) -> Result<()> {
        if !self.binary_fission {
            return Err(Error::Domain(format!(
                "{what} needs a binary fission chain"
            )));
        }
        Ok(())
    }
}

/// Rate of events that move coordinate `j` of the type-`i` litter walk.
/// Own events discount litters with exactly one own child, cross events
/// discount litters with no type-`j` child.
fn edge_rate(law: &ProgenyLaw, lambda: &[f64], i: usize, j: usize) -> f64 {
    let fixed = if j == i { 1 } else { 0 };
    let mut still = 0.0;
    for (k, w) in law.law(i).iter() {
        if k[j] == fixed {
            still += *w;
        }
    }
    lambda[i] * (1.0 - still)
}

/// One sampled emergence ladder.
#[derive(Debug, Clone)]
pub struct EmergenceSample {
    /// `tau[j]` is the first time a type-`j` individual exists, for
    /// `j = 0..=target`; `None` means not emerged before the horizon.
    pub tau: Vec<Option<f64>>,
    /// Population of type `target - 1` at the target's emergence.
    pub z_below: Option<i64>,
    /// The target did not emerge before the horizon.
    pub censored: bool,
    pub horizon: f64,
}

/// Samples the emergence ladder up to `target` with the event-driven engine,
/// started from a single type-0 seed.
pub fn sample_tau_direct<R: Rng>(
    model: &ChainModel,
    target: usize,
    horizon: f64,
    rng: &mut R,
) -> Result<EmergenceSample> {
    model.check_target(target)?;
    if !(horizon >= 0.0) {
        return Err(Error::Domain("horizon must be nonnegative".into()));
    }
    let mut x = vec![0u64; model.d()];
    x[0] = 1;
    let mut tau: Vec<Option<f64>> = vec![None; target + 1];
    let (state, outcome) = ct::direct_until(
        model.law(),
        &x,
        horizon,
        DEFAULT_POP_CAP,
        &mut *rng,
        |s: &CtState| {
            for (j, slot) in tau.iter_mut().enumerate() {
                if slot.is_none() && s.z[j] >= 1 {
                    *slot = Some(s.t);
                }
            }
            tau[target].is_some()
        },
    )?;
    match outcome {
        UntilOutcome::Met | UntilOutcome::Horizon => {}
        UntilOutcome::Capped => {
            return Err(Error::Numeric(format!(
                "population cap hit before type {target} emerged; lower the horizon"
            )));
        }
        UntilOutcome::Extinct => {
            return Err(Error::Numeric(
                "chain population died out, which chain litters forbid".into(),
            ));
        }
    }
    let censored = tau[target].is_none();
    let z_below = if censored {
        None
    } else {
        Some(state.z[target - 1])
    };
    Ok(EmergenceSample {
        tau,
        z_below,
        censored,
        horizon,
    })
}

/// One coupled draw of the emergence ladder and its surrogate integrals,
/// built from a single set of litter-walk paths.
#[derive(Debug, Clone)]
pub struct CoupledSample {
    pub sample: EmergenceSample,
    /// `thetas[j - 1]` is the surrogate integral for the emergence of type `j`.
    pub thetas: Vec<f64>,
    /// `single_birth[j - 2]` says whether type `j` emerged while the level
    /// below it had received exactly one mutant, for `j = 2..=target`.
    pub single_birth: Vec<bool>,
}

struct Level {
    rate: f64,
    /// Internal walk time consumed so far.
    s: f64,
    /// Internal time of the pending jump.
    next_jump: f64,
    /// Internal time of the previous jump.
    last_jump: f64,
    /// Own-walk value: net own-type births since the level started.
    own: i64,
    /// Mutants received from the level below; the seed counts for level 0.
    immigrants: i64,
    theta: f64,
    theta_done: bool,
}

impl Level {
    fn z(&self) -> i64 {
        self.own + self.immigrants
    }
}

/// Samples the emergence ladder and the per-step surrogates from one shared
/// family of litter walks. The walk of each level is consumed through the
/// clock that integrates its population, so every real-time increment is an
/// exact inter-jump term; the surrogate accumulates the same internal gaps
/// over `own + 1` until the level's first mutation. The coupling makes
/// `tau <= sum of thetas` hold path by path.
pub fn tau_and_theta<R: Rng>(
    model: &ChainModel,
    target: usize,
    rng: &mut R,
) -> Result<CoupledSample> {
    model.check_target(target)?;
    let mut levels: Vec<Level> = (0..target)
        .map(|k| Level {
            rate: model.lambda[k],
            s: 0.0,
            next_jump: ct::exp_draw(rng, model.lambda[k]),
            last_jump: 0.0,
            own: 0,
            immigrants: if k == 0 { 1 } else { 0 },
            theta: 0.0,
            theta_done: false,
        })
        .collect();
    let mut t = 0.0;
    let mut tau: Vec<Option<f64>> = vec![None; target + 1];
    tau[0] = Some(0.0);
    let mut single_birth = vec![false; target.saturating_sub(1)];
    let (tau_target, z_below) = loop {
        let mut winner = usize::MAX;
        let mut dt = f64::INFINITY;
        for (k, lv) in levels.iter().enumerate() {
            let z = lv.z();
            if z > 0 {
                let cand = (lv.next_jump - lv.s).max(0.0) / z as f64;
                if cand < dt {
                    dt = cand;
                    winner = k;
                }
            }
        }
        t += dt;
        for lv in levels.iter_mut() {
            let z = lv.z();
            if z > 0 {
                lv.s += z as f64 * dt;
            }
        }
        let (cross, below, own_z);
        {
            // The winning clock hits its jump exactly, not through the float
            // increments above, so consumed internal time never drifts.
            let lv = &mut levels[winner];
            lv.s = lv.next_jump;
            let gap = lv.next_jump - lv.last_jump;
            if !lv.theta_done {
                lv.theta += gap / (lv.own + 1) as f64;
            }
            lv.last_jump = lv.next_jump;
            lv.next_jump += ct::exp_draw(rng, lv.rate);
            let litter = model.tables[winner].sample(rng);
            lv.own += i64::from(litter[winner]) - 1;
            cross = i64::from(litter[winner + 1]);
            if cross >= 1 {
                lv.theta_done = true;
            }
            below = lv.immigrants;
            own_z = lv.z();
        }
        if cross >= 1 {
            if winner + 1 == target {
                if winner >= 1 {
                    single_birth[winner - 1] = below == 1;
                }
                break (t, own_z);
            }
            if levels[winner + 1].immigrants == 0 {
                tau[winner + 1] = Some(t);
                if winner >= 1 {
                    single_birth[winner - 1] = below == 1;
                }
            }
            levels[winner + 1].immigrants += cross;
        }
    };
    tau[target] = Some(tau_target);
    debug_assert!(levels.iter().all(|lv| lv.theta_done));
    Ok(CoupledSample {
        sample: EmergenceSample {
            tau,
            z_below: Some(z_below),
            censored: false,
            horizon: f64::INFINITY,
        },
        thetas: levels.iter().map(|lv| lv.theta).collect(),
        single_birth,
    })
}

/// Samples the emergence ladder through the time-change representation.
pub fn sample_tau_representation<R: Rng>(
    model: &ChainModel,
    target: usize,
    rng: &mut R,
) -> Result<EmergenceSample> {
    Ok(tau_and_theta(model, target, rng)?.sample)
}

/// Independent draw of the surrogate integral for the emergence of type
/// `target` from a fresh type-`target - 1` seed.
pub fn sample_theta<R: Rng>(model: &ChainModel, target: usize, rng: &mut R) -> Result<f64> {
    model.check_target(target)?;
    let level = target - 1;
    let mut own: i64 = 0;
    let mut theta = 0.0;
    loop {
        theta += ct::exp_draw(rng, model.lambda[level]) / (own + 1) as f64;
        let litter = model.tables[level].sample(rng);
        if litter[level + 1] >= 1 {
            return Ok(theta);
        }
        own += i64::from(litter[level]) - 1;
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct BoundPoint {
    pub t: f64,
    pub tau_surv: f64,
    pub tau_se: f64,
    pub theta_surv: f64,
    pub theta_se: f64,
    /// Dominance within three joint standard errors at this point.
    pub ok: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct BoundReport {
    pub target: usize,
    pub replicates: u64,
    pub horizon: f64,
    pub censored: u64,
    pub points: Vec<BoundPoint>,
    pub all_ok: bool,
}

/// Compares the empirical survival function of the direct-engine emergence
/// time against that of the independent surrogate sum on a time grid. The
/// surrogate sum dominates stochastically; each grid point is checked within
/// three joint standard errors.
pub fn bound_check(
    model: &ChainModel,
    target: usize,
    t_grid: &[f64],
    replicates: u64,
    seed: u64,
    workers: usize,
) -> Result<BoundReport> {
    model.check_target(target)?;
    if t_grid.is_empty() {
        return Err(Error::Domain("bound check needs a time grid".into()));
    }
    if t_grid[0] < 0.0 || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "time grid must be nonnegative and increasing".into(),
        ));
    }
    if replicates == 0 {
        return Err(Error::Domain("bound check needs replicates".into()));
    }
    let horizon = model.default_horizon().max(*t_grid.last().unwrap());
    let draws = run_replicates(
        seed,
        replicates,
        StreamKind::Emergence,
        workers,
        |_rep, mut rng| -> Result<(Option<f64>, f64)> {
            let s = sample_tau_direct(model, target, horizon, &mut rng)?;
            let mut theta = 0.0;
            for j in 1..=target {
                theta += sample_theta(model, j, &mut rng)?;
            }
            Ok((s.tau[target], theta))
        },
    );
    let draws: Vec<(Option<f64>, f64)> = draws.into_iter().collect::<Result<_>>()?;
    let taus: Vec<Option<f64>> = draws.iter().map(|(t, _)| *t).collect();
    let thetas: Vec<Option<f64>> = draws.iter().map(|(_, th)| Some(*th)).collect();
    let censored = taus.iter().filter(|t| t.is_none()).count() as u64;
    let tau_curve = survival_curve(&taus, t_grid)?;
    let theta_curve = survival_curve(&thetas, t_grid)?;
    let points: Vec<BoundPoint> = tau_curve
        .iter()
        .zip(&theta_curve)
        .map(|(a, b)| {
            let joint_se = (a.se * a.se + b.se * b.se).sqrt();
            BoundPoint {
                t: a.t,
                tau_surv: a.prob,
                tau_se: a.se,
                theta_surv: b.prob,
                theta_se: b.se,
                ok: a.prob <= b.prob + 3.0 * joint_se,
            }
        })
        .collect();
    let all_ok = points.iter().all(|p| p.ok);
    Ok(BoundReport {
        target,
        replicates,
        horizon,
        censored,
        points,
        all_ok,
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct LadderRung {
    /// Mutation rate per chain edge for this rung's model.
    pub mutation_rates: Vec<f64>,
    /// Largest ratio of consecutive mutation rates; the asymptotic regime
    /// sends it to zero.
    pub scale: f64,
    /// `P(|tau / theta_sum - 1| > delta)` per requested delta.
    pub dev_prob: Vec<f64>,
    pub dev_se: Vec<f64>,
    /// Frequency of the single-birth event per type `j = 2..=target`: the
    /// level below type `j` had received exactly one mutant at emergence.
    pub single_birth: Vec<f64>,
    pub single_birth_se: Vec<f64>,
    pub tau_mean: Estimate,
    pub theta_sum_mean: Estimate,
    /// Sum over chain steps of the logarithmic closed-form surrogate mean;
    /// only available for binary fission.
    pub sum_log_forms: Option<f64>,
    /// Sum over chain steps of the inverse squared mutation rates.
    pub sum_inverse_squares: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct LadderReport {
    pub target: usize,
    pub deltas: Vec<f64>,
    pub replicates: u64,
    pub rungs: Vec<LadderRung>,
    /// Per delta: deviation probabilities do not increase along the ladder,
    /// within three joint standard errors.
    pub dev_monotone: Vec<bool>,
    /// Per type: single-birth frequencies do not decrease along the ladder,
    /// within three joint standard errors.
    pub single_birth_monotone: Vec<bool>,
}

fn ladder_scale(model: &ChainModel, target: usize) -> f64 {
    let mut s = 0.0f64;
    for m in 0..target.saturating_sub(1) {
        s = s.max(model.lambda_next[m] / model.lambda_next[m + 1]);
    }
    s
}

/// Runs the coupled ratio experiment along a ladder of models whose
/// consecutive mutation-rate ratios decrease while the first mutation rate
/// stays fixed. Each replicate draws `tau` and the surrogate sum from the
/// same litter walks, so the ratio concentrates without extra variance.
pub fn ratio_convergence(
    models: &[ChainModel],
    target: usize,
    deltas: &[f64],
    replicates: u64,
    seed: u64,
    workers: usize,
) -> Result<LadderReport> {
    if models.is_empty() {
        return Err(Error::Domain("the ladder needs at least one model".into()));
    }
    if deltas.is_empty() || deltas.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::Domain("deltas must be positive".into()));
    }
    if replicates == 0 {
        return Err(Error::Domain("the ladder needs replicates".into()));
    }
    for m in models {
        m.check_target(target)?;
    }
    let base = models[0].lambda_next[0];
    if models.iter().any(|m| m.lambda_next[0] != base) {
        return Err(Error::Domain(
            "the first mutation rate must stay fixed along the ladder".into(),
        ));
    }
    if target >= 2 {
        let scales: Vec<f64> = models.iter().map(|m| ladder_scale(m, target)).collect();
        if scales.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Domain(
                "each ladder rung must decrease the mutation-rate ratio scale".into(),
            ));
        }
    }
    let mut rungs = Vec::with_capacity(models.len());
    for model in models {
        let draws = run_replicates(
            seed,
            replicates,
            StreamKind::Emergence,
            workers,
            |_rep, mut rng| -> Result<(f64, f64, Vec<bool>)> {
                let c = tau_and_theta(model, target, &mut rng)?;
                let tau = c.sample.tau[target].expect("representation never censors");
                let theta_sum: f64 = c.thetas.iter().sum();
                Ok((tau, theta_sum, c.single_birth))
            },
        );
        let draws: Vec<(f64, f64, Vec<bool>)> = draws.into_iter().collect::<Result<_>>()?;
        let taus: Vec<f64> = draws.iter().map(|d| d.0).collect();
        let theta_sums: Vec<f64> = draws.iter().map(|d| d.1).collect();
        let mut dev_prob = Vec::with_capacity(deltas.len());
        let mut dev_se = Vec::with_capacity(deltas.len());
        for &delta in deltas {
            let flags: Vec<f64> = draws
                .iter()
                .map(|d| if (d.0 / d.1 - 1.0).abs() > delta { 1.0 } else { 0.0 })
                .collect();
            let e = Estimate::from_samples(&flags);
            dev_prob.push(e.mean);
            dev_se.push(e.se);
        }
        let mut single_birth = Vec::new();
        let mut single_birth_se = Vec::new();
        for j in 0..target.saturating_sub(1) {
            let flags: Vec<f64> = draws
                .iter()
                .map(|d| if d.2[j] { 1.0 } else { 0.0 })
                .collect();
            let e = Estimate::from_samples(&flags);
            single_birth.push(e.mean);
            single_birth_se.push(e.se);
        }
        let sum_log_forms = if model.binary_fission {
            Some(
                (0..target)
                    .map(|m| theta_mean_log_form(model.lambda_own[m], model.lambda_next[m]))
                    .sum(),
            )
        } else {
            None
        };
        let sum_inverse_squares = (0..target)
            .map(|m| model.lambda_next[m].powi(-2))
            .sum();
        rungs.push(LadderRung {
            mutation_rates: model.lambda_next.clone(),
            scale: ladder_scale(model, target),
            dev_prob,
            dev_se,
            single_birth,
            single_birth_se,
            tau_mean: Estimate::from_samples(&taus),
            theta_sum_mean: Estimate::from_samples(&theta_sums),
            sum_log_forms,
            sum_inverse_squares,
        });
    }
    let mut dev_monotone = vec![true; deltas.len()];
    for (di, flag) in dev_monotone.iter_mut().enumerate() {
        for w in rungs.windows(2) {
            let slack =
                3.0 * (w[0].dev_se[di].powi(2) + w[1].dev_se[di].powi(2)).sqrt() + 1e-12;
            if w[1].dev_prob[di] > w[0].dev_prob[di] + slack {
                *flag = false;
            }
        }
    }
    let mut single_birth_monotone = vec![true; target.saturating_sub(1)];
    for (j, flag) in single_birth_monotone.iter_mut().enumerate() {
        for w in rungs.windows(2) {
            let slack = 3.0
                * (w[0].single_birth_se[j].powi(2) + w[1].single_birth_se[j].powi(2)).sqrt()
                + 1e-12;
            if w[1].single_birth[j] < w[0].single_birth[j] - slack {
                *flag = false;
            }
        }
    }
    Ok(LadderReport {
        target,
        deltas: deltas.to_vec(),
        replicates,
        rungs,
        dev_monotone,
        single_birth_monotone,
    })
}

/// Closed-form surrogate mean for one binary fission step: the Frullani
/// value `ln((a + b) / b) / a`, extended by continuity to `a = 0`.
fn theta_mean_log_form(a: f64, b: f64) -> f64 {
    if a > 0.0 {
        ((a + b) / b).ln() / a
    } else {
        1.0 / b
    }
}

/// Partial sum of the surrogate Laplace transform with its tail bound.
#[derive(Debug, Clone, serde::Serialize)]
pub struct LaplaceValue {
    pub value: f64,
    pub terms: u32,
    /// Geometric bound on the dropped tail; terms shrink by at least
    /// `lambda_own / lambda` per step.
    pub tail_bound: f64,
}

/// Laplace transform at `alpha` of the emergence increment for type `target`
/// from a fresh seed of the level below, for binary fission chains. The
/// `n`-th term integrates over `n` own splits before the first mutation; the
/// ordered-jump simplex integral telescopes to the product
/// `prod_{k=1}^{n+1} (lambda + alpha / k)` in the denominator.
pub fn laplace_tau(
    model: &ChainModel,
    target: usize,
    alpha: f64,
    n_max: u32,
) -> Result<LaplaceValue> {
    model.check_target(target)?;
    model.check_binary("the Laplace transform")?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Domain("alpha must be nonnegative and finite".into()));
    }
    let level = target - 1;
    let a = model.lambda_own[level];
    let b = model.lambda_next[level];
    let lam = a + b;
    let mut term = b / (lam + alpha);
    let mut sum = term;
    let mut n = 0u32;
    while n < n_max && term > 1e-300 {
        n += 1;
        term *= a / (lam + alpha / f64::from(n + 1));
        sum += term;
    }
    let tail_bound = if a > 0.0 { term * a / b } else { 0.0 };
    Ok(LaplaceValue {
        value: sum,
        terms: n + 1,
        tail_bound,
    })
}

/// The two closed-form candidates for the surrogate mean next to the
/// quadrature value of the integral they both claim to equal.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EmergenceMean {
    /// `ln(lambda / b) / (a b)`.
    pub over_both_rates: f64,
    /// `ln(lambda / b) / a`, the Frullani value of the integral.
    pub over_own_rate: f64,
    /// Adaptive Simpson value of `int_0^inf e^{-b s} (1 - e^{-a s})/(a s) ds`.
    pub quadrature: f64,
    /// Error budget: integration tolerance plus the truncated tail.
    pub quadrature_tol: f64,
    /// Which closed form the quadrature supports:
    /// over_own_rate, over_both_rates, both, or neither.
    pub supported: String,
}

/// Mean emergence increment for type `target` from a fresh seed of the level
/// below, for binary fission chains, adjudicated by quadrature.
pub fn expected_tau(model: &ChainModel, target: usize) -> Result<EmergenceMean> {
    model.check_target(target)?;
    model.check_binary("the mean emergence report")?;
    let level = target - 1;
    let a = model.lambda_own[level];
    let b = model.lambda_next[level];
    let lam = a + b;
    let (over_both_rates, over_own_rate) = if a > 0.0 {
        let log = (lam / b).ln();
        (log / (a * b), log / a)
    } else {
        // Continuity limits as the own-split rate vanishes.
        (1.0 / (b * b), 1.0 / b)
    };
    let f = |s: f64| -> f64 {
        let x = a * s;
        let frac = if x < 1e-12 { 1.0 } else { -(-x).exp_m1() / x };
        (-b * s).exp() * frac
    };
    // The integrand is at most e^{-b s}, so cutting at s_max leaves less
    // than e^{-b s_max} / b.
    let s_max = -(1e-13 * b).ln() / b;
    let tol = 1e-12;
    let quadrature = simpson(&f, 0.0, s_max, tol);
    let quadrature_tol = tol + (-b * s_max).exp() / b;
    let within = (10.0 * quadrature_tol).max(1e-9);
    let own_hit = (quadrature - over_own_rate).abs() <= within;
    let both_hit = (quadrature - over_both_rates).abs() <= within;
    let supported = match (own_hit, both_hit) {
        (true, true) => "both",
        (true, false) => "over_own_rate",
        (false, true) => "over_both_rates",
        (false, false) => "neither",
    }
    .to_string();
    Ok(EmergenceMean {
        over_both_rates,
        over_own_rate,
        quadrature,
        quadrature_tol,
        supported,
    })
}

/// Adaptive Simpson integration with Richardson correction.
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn segment<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = segment(f, a, fa, m, fm);
        let (right, rm, frm) = segment(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = segment(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::replicate_rng;
    use crate::stats::{chi_square_two_sample, ks_two_sample};

    const LN2: f64 = core::f64::consts::LN_2;

    fn law2(entries0: &[([i32; 2], f64)], entries1: &[([i32; 2], f64)]) -> Result<ChainModel> {
        let l0 = Pmf::from_entries(2, entries0.iter().map(|(k, p)| (k.to_vec(), *p)))?;
        let l1 = Pmf::from_entries(2, entries1.iter().map(|(k, p)| (k.to_vec(), *p)))?;
        ChainModel::new(ProgenyLaw::new(vec![l0, l1], Some(vec![1.0, 1.0]))?)
    }

    #[test]
    fn binary_chain_accepted_with_exact_rate_split() {
        let m = ChainModel::binary(&[(1.0, 1.0), (1.0, 5.0)], 1.0).unwrap();
        assert_eq!(m.d(), 3);
        assert!(m.binary_fission && m.single_mutants && m.rate_split_exact);
        assert_eq!(m.lambda, vec![2.0, 6.0, 1.0]);
        for (i, want) in [(0, 1.0), (1, 1.0), (2, 1.0)] {
            assert!((m.lambda_own[i] - want).abs() < 1e-12);
        }
        assert!((m.lambda_next[0] - 1.0).abs() < 1e-12);
        assert!((m.lambda_next[1] - 5.0).abs() < 1e-12);
        for i in 0..2 {
            let split = m.lambda_own[i] + m.lambda_next[i];
            assert!((m.lambda[i] - split).abs() < 1e-12);
        }
        assert_eq!(m.edge_rate(0, 2), 0.0);
        assert!((m.default_horizon() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn validation_names_the_violated_clause() {
        let c3 = |entries: &[([i32; 3], f64)]| -> Result<ChainModel> {
            let l0 = Pmf::from_entries(3, entries.iter().map(|(k, p)| (k.to_vec(), *p)))?;
            let l1 = Pmf::from_entries(3, vec![(vec![0, 1, 1], 1.0)])?;
            let l2 = Pmf::from_entries(3, vec![(vec![0, 0, 2], 1.0)])?;
            ChainModel::new(ProgenyLaw::new(
                vec![l0, l1, l2],
                Some(vec![1.0, 1.0, 1.0]),
            )?)
        };
        let err = c3(&[([1, 0, 1], 0.5), ([2, 0, 0], 0.5)]).unwrap_err();
        assert!(err.to_string().contains("child of type 2"), "{err}");
        let err = c3(&[([0, 1, 0], 0.5), ([2, 0, 0], 0.5)]).unwrap_err();
        assert!(err.to_string().contains("no own-type child"), "{err}");
        let err = c3(&[([2, 0, 0], 1.0)]).unwrap_err();
        assert!(err.to_string().contains("mutation rate"), "{err}");
        let err = c3(&[([1, 0, 0], 0.3), ([1, 1, 0], 0.7)]).unwrap_err();
        assert!(err.to_string().contains("single same-type child"), "{err}");

        let solo = Pmf::from_entries(1, vec![(vec![2], 1.0)]).unwrap();
        let err =
            ChainModel::new(ProgenyLaw::new(vec![solo], Some(vec![1.0])).unwrap()).unwrap_err();
        assert!(err.to_string().contains("two types"), "{err}");

        let l0 = Pmf::from_entries(2, vec![(vec![1, 1], 1.0)]).unwrap();
        let l1 = Pmf::from_entries(2, vec![(vec![0, 2], 1.0)]).unwrap();
        let err = ChainModel::new(ProgenyLaw::new(vec![l0, l1], None).unwrap()).unwrap_err();
        assert!(err.to_string().contains("rates"), "{err}");
    }

    #[test]
    fn general_litters_set_the_flags() {
        // A double mutant is allowed but drops the single-mutant flag.
        let m = law2(&[([1, 2], 0.5), ([2, 0], 0.5)], &[([0, 2], 1.0)]).unwrap();
        assert!(!m.single_mutants && !m.binary_fission && m.rate_split_exact);
        let split = m.lambda_own[0] + m.lambda_next[0];
        assert!((m.lambda[0] - split).abs() < 1e-12);

        // A litter that both grows the own count and mutates breaks the
        // exact rate split: both edge rates count that event.
        let m = law2(&[([2, 1], 0.5), ([1, 1], 0.5)], &[([0, 2], 1.0)]).unwrap();
        assert!(m.single_mutants && !m.binary_fission && !m.rate_split_exact);
        let split = m.lambda_own[0] + m.lambda_next[0];
        assert!(split > m.lambda[0] + 0.4);

        assert!(expected_tau(&m, 1).is_err());
        assert!(laplace_tau(&m, 1, 0.0, 32).is_err());
    }

    #[test]
    fn surrogate_mean_matches_log_closed_form() {
        let mut rng = replicate_rng(41, 0, StreamKind::Emergence);
        let m = ChainModel::binary(&[(1.0, 1.0)], 1.0).unwrap();
        let draws: Vec<f64> = (0..30_000)
            .map(|_| sample_theta(&m, 1, &mut rng).unwrap())
            .collect();
        let e = Estimate::from_samples(&draws);
        assert!(e.se < 0.006, "se = {}", e.se);
        assert!((e.mean - LN2).abs() <= 3.0 * e.se, "mean = {}", e.mean);

        let m = ChainModel::binary(&[(1.0, 2.0)], 1.0).unwrap();
        let draws: Vec<f64> = (0..30_000)
            .map(|_| sample_theta(&m, 1, &mut rng).unwrap())
            .collect();
        let e = Estimate::from_samples(&draws);
        let log_form = 1.5f64.ln();
        let halved = 1.5f64.ln() / 2.0;
        assert!((e.mean - log_form).abs() <= 3.0 * e.se, "mean = {}", e.mean);
        assert!(
            (e.mean - halved).abs() > 10.0 * e.se,
            "the halved prefactor should be far outside the error bars"
        );
    }

    #[test]
    fn surrogate_is_exponential_when_own_splits_vanish() {
        let m = ChainModel::binary(&[(0.0, 2.0)], 1.0).unwrap();
        assert_eq!(m.lambda_own[0], 0.0);
        let mut rng = replicate_rng(42, 0, StreamKind::Emergence);
        let draws: Vec<f64> = (0..20_000)
            .map(|_| sample_theta(&m, 1, &mut rng).unwrap())
            .collect();
        let e = Estimate::from_samples(&draws);
        assert!((e.mean - 0.5).abs() <= 3.0 * e.se);
        let above: Vec<f64> = draws
            .iter()
            .map(|&t| if t > 0.5 { 1.0 } else { 0.0 })
            .collect();
        let p = Estimate::from_samples(&above);
        assert!((p.mean - (-1.0f64).exp()).abs() <= 3.0 * p.se);

        let r = expected_tau(&m, 1).unwrap();
        assert!((r.over_own_rate - 0.5).abs() < 1e-12);
        assert!((r.over_both_rates - 0.25).abs() < 1e-12);
        assert!((r.quadrature - 0.5).abs() < 1e-9);
        assert_eq!(r.supported, "over_own_rate");
    }

    #[test]
    fn representation_collapses_to_the_surrogate_for_the_first_step() {
        let m = ChainModel::binary(&[(1.0, 1.0)], 1.0).unwrap();
        let mut rng = replicate_rng(43, 0, StreamKind::Emergence);
        for _ in 0..200 {
            let c = tau_and_theta(&m, 1, &mut rng).unwrap();
            let tau = c.sample.tau[1].unwrap();
            assert!((tau - c.thetas[0]).abs() < 1e-12);
            assert!(c.sample.z_below.unwrap() >= 1);
            assert!(c.single_birth.is_empty());
            assert!(!c.sample.censored);
        }
    }

    #[test]
    fn coupled_paths_keep_tau_below_the_surrogate_sum() {
        let m = ChainModel::binary(&[(1.0, 1.0), (1.0, 5.0)], 1.0).unwrap();
        let mut rng = replicate_rng(44, 0, StreamKind::Emergence);
        let mut strict = 0u32;
        for _ in 0..500 {
            let c = tau_and_theta(&m, 2, &mut rng).unwrap();
            let tau = c.sample.tau[2].unwrap();
            let sum: f64 = c.thetas.iter().sum();
            assert!(tau <= sum + 1e-12, "tau = {tau}, surrogate sum = {sum}");
            if tau < sum - 1e-9 {
                strict += 1;
            }
            assert_eq!(c.thetas.len(), 2);
            let t1 = c.sample.tau[1].unwrap();
            assert!(t1 <= tau);
        }
        assert!(strict > 0, "the bound should be strict on some paths");
    }

    #[test]
    fn direct_and_representation_agree_in_law() {
        let m = ChainModel::binary(&[(1.0, 1.0)], 1.0).unwrap();
        let reps = 4000;
        let mut rng_d = replicate_rng(45, 0, StreamKind::CtDirect);
        let mut rng_r = replicate_rng(45, 0, StreamKind::Emergence);
        let mut tau_d = Vec::with_capacity(reps);
        let mut tau_r = Vec::with_capacity(reps);
        let mut z_d = Vec::with_capacity(reps);
        let mut z_r = Vec::with_capacity(reps);
        for _ in 0..reps {
            let s = sample_tau_direct(&m, 1, 25.0, &mut rng_d).unwrap();
            assert!(!s.censored, "horizon 25 should not censor this chain");
            tau_d.push(s.tau[1].unwrap());
            z_d.push(vec![s.z_below.unwrap() as i32]);
            let s = sample_tau_representation(&m, 1, &mut rng_r).unwrap();
            tau_r.push(s.tau[1].unwrap());
            z_r.push(vec![s.z_below.unwrap() as i32]);
        }
        let ks = ks_two_sample(&tau_d, &tau_r, 1e-3).unwrap();
        assert!(ks.pass, "KS {} >= {}", ks.statistic, ks.threshold);
        let chi = chi_square_two_sample(&z_d, &z_r, 5.0).unwrap();
        assert!(chi.p_value > 1e-3, "chi-square p = {}", chi.p_value);
    }

    #[test]
    fn three_type_routes_agree_in_law() {
        let m = ChainModel::binary(&[(1.0, 1.0), (1.0, 5.0)], 1.0).unwrap();
        let reps = 2500;
        let mut rng_d = replicate_rng(46, 0, StreamKind::CtDirect);
        let mut rng_r = replicate_rng(46, 0, StreamKind::Emergence);
        let mut tau_d = Vec::with_capacity(reps);
        let mut tau_r = Vec::with_capacity(reps);
        for _ in 0..reps {
            let s = sample_tau_direct(&m, 2, 25.0, &mut rng_d).unwrap();
            assert!(!s.censored);
            tau_d.push(s.tau[2].unwrap());
            tau_r.push(
                sample_tau_representation(&m, 2, &mut rng_r).unwrap().tau[2].unwrap(),
            );
        }
        let ks = ks_two_sample(&tau_d, &tau_r, 1e-3).unwrap();
        assert!(ks.pass, "KS {} >= {}", ks.statistic, ks.threshold);
    }

    #[test]
    fn dominance_bound_holds_on_the_grid() {
        let m = ChainModel::binary(&[(1.0, 1.0), (1.0, 2.0)], 1.0).unwrap();
        let grid: Vec<f64> = (0..21).map(|i| 0.25 * i as f64).collect();
        let report = bound_check(&m, 2, &grid, 6000, 11, 1).unwrap();
        assert!(report.all_ok);
        assert_eq!(report.censored, 0);
        assert_eq!(report.points[0].tau_surv, 1.0);
        assert_eq!(report.points[0].theta_surv, 1.0);

        // Strictness, checked on the low-variance coupled difference.
        let mut rng = replicate_rng(11, 1, StreamKind::Emergence);
        let gaps: Vec<f64> = (0..2000)
            .map(|_| {
                let c = tau_and_theta(&m, 2, &mut rng).unwrap();
                c.thetas.iter().sum::<f64>() - c.sample.tau[2].unwrap()
            })
            .collect();
        let e = Estimate::from_samples(&gaps);
        assert!(e.mean > 3.0 * e.se, "mean gap = {} se = {}", e.mean, e.se);
    }

    #[test]
    fn ratio_ladder_tightens_and_single_births_dominate() {
        let models: Vec<ChainModel> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&r| ChainModel::binary(&[(1.0, 1.0), (1.0, r)], 1.0).unwrap())
            .collect();
        let report =
            ratio_convergence(&models, 2, &[0.1, 0.05], 4000, 5, 1).unwrap();
        assert!(report.dev_monotone.iter().all(|&b| b));
        assert!(report.single_birth_monotone.iter().all(|&b| b));
        let last = report.rungs.last().unwrap();
        assert!(
            last.dev_prob[0] < 0.05,
            "deviation probability at the last rung = {}",
            last.dev_prob[0]
        );
        let first = &report.rungs[0];
        assert!(
            first.single_birth[0] > 0.8,
            "single-birth frequency = {}",
            first.single_birth[0]
        );
        let sum_log = first.sum_log_forms.unwrap();
        assert!((sum_log - (LN2 + 1.1f64.ln())).abs() < 1e-12);
        assert!((first.sum_inverse_squares - 1.01).abs() < 1e-12);
        assert!(
            (first.tau_mean.mean - sum_log).abs() < 0.03,
            "tau mean = {} vs log-form sum = {}",
            first.tau_mean.mean,
            sum_log
        );
        assert!((first.tau_mean.mean - first.sum_inverse_squares).abs() > 0.15);
        assert!(
            (first.theta_sum_mean.mean - sum_log).abs() <= 4.0 * first.theta_sum_mean.se
        );
    }

    #[test]
    fn first_step_ladder_has_unit_ratio() {
        let models = vec![ChainModel::binary(&[(1.0, 1.0)], 1.0).unwrap()];
        let report = ratio_convergence(&models, 1, &[0.1, 0.05], 500, 6, 1).unwrap();
        assert_eq!(report.rungs[0].dev_prob, vec![0.0, 0.0]);
        assert!(report.rungs[0].single_birth.is_empty());
    }

    #[test]
    fn ladder_validation_rejects_bad_rungs() {
        let mk = |r: f64| ChainModel::binary(&[(1.0, 1.0), (1.0, r)], 1.0).unwrap();
        let err = ratio_convergence(&[mk(10.0), mk(10.0)], 2, &[0.1], 100, 0, 1).unwrap_err();
        assert!(err.to_string().contains("decrease"), "{err}");
        let err = ratio_convergence(&[mk(100.0), mk(10.0)], 2, &[0.1], 100, 0, 1).unwrap_err();
        assert!(err.to_string().contains("decrease"), "{err}");
        let other = ChainModel::binary(&[(1.0, 2.0), (1.0, 100.0)], 1.0).unwrap();
        let err = ratio_convergence(&[mk(10.0), other], 2, &[0.1], 100, 0, 1).unwrap_err();
        assert!(err.to_string().contains("fixed"), "{err}");
    }

    #[test]
    fn transform_normalizes_and_matches_monte_carlo() {
        let m = ChainModel::binary(&[(1.0, 1.0)], 1.0).unwrap();
        let at_zero = laplace_tau(&m, 1, 0.0, 64).unwrap();
        assert!(at_zero.tail_bound < 1e-12);
        assert!((at_zero.value - 1.0).abs() <= 1e-12, "{}", at_zero.value);

        let at_one = laplace_tau(&m, 1, 1.0, 80).unwrap();
        assert!(at_one.tail_bound < 1e-10);
        assert!(at_one.value > 0.55 && at_one.value < 0.59);
        let mut rng = replicate_rng(47, 0, StreamKind::Emergence);
        let draws: Vec<f64> = (0..30_000)
            .map(|_| (-sample_theta(&m, 1, &mut rng).unwrap()).exp())
            .collect();
        let e = Estimate::from_samples(&draws);
        assert!((e.mean - at_one.value).abs() <= 3.0 * e.se);

        // A variant product that repeats the leading factor and omits the
        // last one lands far outside the Monte Carlo error bars.
        let (a, b, lam, alpha) = (1.0f64, 1.0f64, 2.0f64, 1.0f64);
        let mut term = b / (lam + alpha);
        let mut variant = term;
        for n in 1..80u32 {
            term *= a / (lam + alpha / f64::from(n));
            variant += term;
        }
        assert!((e.mean - variant).abs() > 10.0 * e.se, "variant = {variant}");
    }

    #[test]
    fn transform_is_completely_monotone_and_slopes_to_the_mean() {
        let m = ChainModel::binary(&[(1.0, 2.0)], 1.0).unwrap();
        let values: Vec<f64> = (0..16)
            .map(|i| laplace_tau(&m, 1, 0.2 * i as f64, 256).unwrap().value)
            .collect();
        for w in values.windows(2) {
            assert!(w[1] <= w[0] + 1e-14);
        }
        for w in values.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-10);
        }

        let alpha = 1e-5;
        let slope = (1.0 - laplace_tau(&m, 1, alpha, 256).unwrap().value) / alpha;
        let mean = expected_tau(&m, 1).unwrap().quadrature;
        assert!((slope - mean).abs() < 1e-3, "slope = {slope}, mean = {mean}");
    }

    #[test]
    fn expectation_report_adjudicates_the_prefactor() {
        let m = ChainModel::binary(&[(1.0, 2.0)], 1.0).unwrap();
        let r = expected_tau(&m, 1).unwrap();
        assert!((r.over_own_rate - 1.5f64.ln()).abs() < 1e-15);
        assert!((r.over_both_rates - 1.5f64.ln() / 2.0).abs() < 1e-15);
        assert!((r.quadrature - 1.5f64.ln()).abs() < 1e-9);
        assert_eq!(r.supported, "over_own_rate");

        let m = ChainModel::binary(&[(1.0, 1.0)], 1.0).unwrap();
        let r = expected_tau(&m, 1).unwrap();
        assert!((r.quadrature - LN2).abs() < 1e-9);
        assert_eq!(r.supported, "both");
    }

    #[test]
    fn direct_sampler_censors_at_the_horizon() {
        let m = ChainModel::binary(&[(1.0, 1.0)], 1.0).unwrap();
        let mut rng = replicate_rng(48, 0, StreamKind::CtDirect);
        let s = sample_tau_direct(&m, 1, 0.0, &mut rng).unwrap();
        assert!(s.censored);
        assert_eq!(s.tau[0], Some(0.0));
        assert_eq!(s.tau[1], None);
        assert_eq!(s.z_below, None);
        assert_eq!(s.horizon, 0.0);
    }

    #[test]
    fn direct_ladder_is_monotone_with_censored_suffix() {
        let m = ChainModel::binary(&[(1.0, 1.0), (1.0, 3.0), (1.0, 9.0)], 1.0).unwrap();
        let mut rng = replicate_rng(49, 0, StreamKind::CtDirect);
        for _ in 0..100 {
            let s = sample_tau_direct(&m, 3, 40.0, &mut rng).unwrap();
            let mut seen_none = false;
            let mut prev = 0.0;
            for slot in &s.tau {
                match slot {
                    Some(t) => {
                        assert!(!seen_none, "emergence times after a censored rung");
                        assert!(*t >= prev);
                        prev = *t;
                    }
                    None => seen_none = true,
                }
            }
            if !s.censored {
                assert!(s.z_below.unwrap() >= 1);
            }
        }
    }
}
