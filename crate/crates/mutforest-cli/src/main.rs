//! Experiment runner for the mutation-forest library.
//!
//! Every subcommand reads a JSON model, runs with replicate-indexed rng
//! streams derived from the seed, and writes CSV or JSON results plus a
//! manifest into the output directory. The worker count changes wall time
//! only; outputs are byte-identical for a fixed configuration and seed.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use mutforest::ct;
use mutforest::emergence::{self, ChainModel};
use mutforest::modelfile::{self, Manifest};
use mutforest::mutation::{self, SeriesMode};
use mutforest::seeds::{replicate_rng, run_replicates, StreamKind};
use mutforest::stats::Estimate;
use mutforest::walkers;
use mutforest::ProgenyLaw;

#[derive(Parser)]
#[command(name = "mutforest", version, about = "Mutation laws of multitype branching forests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON model file.
    #[arg(long)]
    model: PathBuf,
    /// Root seed for all rng streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replicates.
    #[arg(long, default_value_t = 1000)]
    reps: u64,
    /// Worker threads; affects wall time only.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Mutation progeny laws and the mutation mean matrix.
    MutationLaw {
        #[command(flatten)]
        common: CommonArgs,
        /// Series truncation target for the accumulated first-passage mass.
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
    },
    /// Monte Carlo mutation censuses from a fixed root vector.
    SimulateDiscrete {
        #[command(flatten)]
        common: CommonArgs,
        /// Root vector, comma separated; default is one type-0 seed.
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<u64>>,
        /// Total walk-step budget per replicate.
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// Scaling limits of censuses along a direction.
    DirectionAsymptotics {
        #[command(flatten)]
        common: CommonArgs,
        /// Direction vector, comma separated; default is type 0.
        #[arg(long, value_delimiter = ',')]
        direction: Option<Vec<u64>>,
        /// Root scales, comma separated, increasing.
        #[arg(long, value_delimiter = ',', default_values_t = [50, 100, 200])]
        scales: Vec<u64>,
        /// Total walk-step budget per replicate.
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// Continuous-time trajectories.
    SimulateCt {
        #[command(flatten)]
        common: CommonArgs,
        /// Event engine.
        #[arg(long, value_parser = ["direct", "lamperti"], default_value = "direct")]
        engine: String,
        /// Root vector, comma separated; default is one type-0 seed.
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<u64>>,
        /// Simulation horizon.
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        /// Population cap.
        #[arg(long, default_value_t = ct::DEFAULT_POP_CAP)]
        cap: u64,
    },
    /// Supercritical growth diagnostics and the mutant-ratio adjudication.
    Growth {
        #[command(flatten)]
        common: CommonArgs,
        /// Root vector, comma separated; default is one type-0 seed.
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<u64>>,
        /// Observation times, comma separated, increasing.
        #[arg(long, value_delimiter = ',', default_values_t = [5.0, 10.0, 15.0])]
        t_grid: Vec<f64>,
        /// Population cap; replicates stop there and report their stop state.
        #[arg(long, default_value_t = ct::DEFAULT_POP_CAP)]
        cap: u64,
    },
    /// Emergence times in mutation chains.
    Emergence {
        #[command(subcommand)]
        command: EmergenceCommand,
    },
}

#[derive(Subcommand)]
enum EmergenceCommand {
    /// Direct-engine emergence ladders.
    Tau {
        #[command(flatten)]
        common: CommonArgs,
        /// Emergence target type (1-based along the chain from type 0).
        #[arg(long)]
        target: usize,
        /// Censoring horizon; default scales with the first mutation rate.
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Independent surrogate integrals.
    Theta {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        target: usize,
    },
    /// Survival-curve dominance check of the surrogate sum.
    Bound {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        target: usize,
        /// Survival grid, comma separated, increasing.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0])]
        t_grid: Vec<f64>,
    },
    /// Ratio convergence along a ladder of chains (model file is a ladder).
    Ladder {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        target: usize,
        /// Deviation thresholds, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05])]
        deltas: Vec<f64>,
    },
    /// Laplace transform of the surrogate (binary fission chains).
    Laplace {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        target: usize,
        /// Transform arguments, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0, 1.5, 2.0])]
        alphas: Vec<f64>,
        /// Series terms.
        #[arg(long, default_value_t = 256)]
        terms: u32,
    },
    /// Mean emergence increments with the competing closed forms.
    Expectation {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::MutationLaw { common, eps } => mutation_law(&common, eps),
        Command::SimulateDiscrete { common, x, budget } => simulate_discrete(&common, x, budget),
        Command::DirectionAsymptotics {
            common,
            direction,
            scales,
            budget,
        } => direction_asymptotics(&common, direction, &scales, budget),
        Command::SimulateCt {
            common,
            engine,
            x,
            horizon,
            cap,
        } => simulate_ct(&common, &engine, x, horizon, cap),
        Command::Growth {
            common,
            x,
            t_grid,
            cap,
        } => growth(&common, x, &t_grid, cap),
        Command::Emergence { command } => match command {
            EmergenceCommand::Tau {
                common,
                target,
                horizon,
            } => emergence_tau(&common, target, horizon),
            EmergenceCommand::Theta { common, target } => emergence_theta(&common, target),
            EmergenceCommand::Bound {
                common,
                target,
                t_grid,
            } => emergence_bound(&common, target, &t_grid),
            EmergenceCommand::Ladder {
                common,
                target,
                deltas,
            } => emergence_ladder(&common, target, &deltas),
            EmergenceCommand::Laplace {
                common,
                target,
                alphas,
                terms,
            } => emergence_laplace(&common, target, &alphas, terms),
            EmergenceCommand::Expectation { common } => emergence_expectation(&common),
        },
    }
}

/// Loads and validates the progeny-law model.
fn load_law(common: &CommonArgs) -> Result<ProgenyLaw> {
    modelfile::load_progeny(&common.model)
        .with_context(|| format!("model validation failed: {}", common.model.display()))
}

/// Loads the model and wraps it as a mutation chain.
fn load_chain(common: &CommonArgs) -> Result<ChainModel> {
    modelfile::load_chain(&common.model)
        .with_context(|| format!("model validation failed: {}", common.model.display()))
}

/// Canonical configuration for hashing: semantic parameters plus the model
/// file digest, excluding workers and the output directory.
fn config_text(command: &str, common: &CommonArgs, extra: serde_json::Value) -> Result<String> {
    let model_digest = modelfile::file_sha256(&common.model)
        .with_context(|| format!("invalid configuration: cannot read {}", common.model.display()))?;
    Ok(serde_json::to_string(&json!({
        "command": command,
        "model_sha256": model_digest,
        "seed": common.seed,
        "reps": common.reps,
        "params": extra,
    }))?)
}

fn start_manifest(command: &str, common: &CommonArgs, extra: serde_json::Value) -> Result<Manifest> {
    fs::create_dir_all(&common.out)
        .with_context(|| format!("invalid configuration: cannot create {}", common.out.display()))?;
    Ok(Manifest::start(
        command,
        &config_text(command, common, extra)?,
        common.seed,
    ))
}

fn finish(
    manifest: &mut Manifest,
    common: &CommonArgs,
    outputs: &[PathBuf],
) -> Result<()> {
    for path in outputs {
        manifest.record_output(path)?;
    }
    manifest.write(&common.out)?;
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Parses an optional root vector, defaulting to a single type-0 seed.
fn seed_vector(x: Option<Vec<u64>>, d: usize) -> Result<Vec<u64>> {
    match x {
        Some(v) => {
            if v.len() != d {
                anyhow::bail!("invalid configuration: root vector has {} entries, model has {d} types", v.len());
            }
            Ok(v)
        }
        None => {
            let mut v = vec![0; d];
            v[0] = 1;
            Ok(v)
        }
    }
}

fn fmt_estimate_row(
    scale: &str,
    ty: usize,
    statistic: &str,
    e: &Estimate,
    replicates: u64,
    censored: u64,
) -> Vec<String> {
    vec![
        scale.to_string(),
        ty.to_string(),
        statistic.to_string(),
        format!("{}", e.mean),
        format!("{}", e.se),
        replicates.to_string(),
        censored.to_string(),
    ]
}

const ESTIMATE_HEADER: [&str; 7] = [
    "scale",
    "type",
    "statistic",
    "estimate",
    "se",
    "replicates",
    "censored",
];

fn mutation_law(common: &CommonArgs, eps: f64) -> Result<()> {
    let mut manifest = start_manifest("mutation-law", common, json!({ "eps": eps }))?;
    let law = load_law(common)?;
    let mu = mutation::MutationLaw::compute(&law, eps)?;
    let mean = mutforest::means::mean_report(&law)?;
    let mbar = mutation::mutation_mean_report(&mean)?;

    let series: Vec<serde_json::Value> = mu
        .series
        .iter()
        .map(|s| {
            json!({
                "type": s.type_index,
                "mode": match s.mode {
                    SeriesMode::Series => "series",
                    SeriesMode::Dirac => "dirac",
                },
                "terms_used": s.terms_used,
                "truncation_error": s.truncation_error,
                "capped_loss": s.capped_loss,
                "support": s.pmf.iter().map(|(k, _)| json!(k)).collect::<Vec<_>>(),
                "probabilities": s.pmf.iter().map(|(_, p)| json!(p)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mu_path = common.out.join("mu.json");
    write_json(&mu_path, &json!({ "d": mu.d, "eps": eps, "laws": series }))?;

    let mut rows = Vec::new();
    for i in 0..mean.d {
        for j in 0..mean.d {
            rows.push(vec![
                i.to_string(),
                j.to_string(),
                format!("{}", mean.m[i][j]),
                format!("{}", mbar.mbar[i][j]),
            ]);
        }
    }
    let mbar_path = common.out.join("mbar.csv");
    modelfile::write_csv(&mbar_path, &["i", "j", "m", "mbar"], &rows)?;

    finish(&mut manifest, common, &[mu_path, mbar_path])
}

fn simulate_discrete(common: &CommonArgs, x: Option<Vec<u64>>, budget: u64) -> Result<()> {
    let mut manifest = start_manifest(
        "simulate-discrete",
        common,
        json!({ "x": x, "budget": budget }),
    )?;
    let law = load_law(common)?;
    let d = law.d();
    let x = seed_vector(x, d)?;
    let censuses = run_replicates(
        common.seed,
        common.reps,
        StreamKind::WalkCensus,
        common.workers,
        |_rep, rng| walkers::sample_census_walk(&law, &x, budget, rng),
    )
    .into_iter()
    .collect::<mutforest::Result<Vec<_>>>()?;
    let censored = censuses.iter().filter(|c| c.censored).count() as u64;
    let mut rows = Vec::new();
    for ty in 0..d {
        let n: Vec<f64> = censuses
            .iter()
            .filter(|c| !c.censored)
            .map(|c| c.n[ty] as f64)
            .collect();
        let m: Vec<f64> = censuses
            .iter()
            .filter(|c| !c.censored)
            .map(|c| c.m_tot(ty) as f64)
            .collect();
        let n_est = Estimate::from_samples(&n);
        let m_est = Estimate::from_samples(&m);
        rows.push(fmt_estimate_row("1", ty, "population_mean", &n_est, common.reps, censored));
        rows.push(fmt_estimate_row("1", ty, "mutation_mean", &m_est, common.reps, censored));
    }
    let path = common.out.join("census_means.csv");
    modelfile::write_csv(&path, &ESTIMATE_HEADER, &rows)?;
    finish(&mut manifest, common, &[path])
}

fn direction_asymptotics(
    common: &CommonArgs,
    direction: Option<Vec<u64>>,
    scales: &[u64],
    budget: u64,
) -> Result<()> {
    let mut manifest = start_manifest(
        "direction-asymptotics",
        common,
        json!({ "direction": direction, "scales": scales, "budget": budget }),
    )?;
    let law = load_law(common)?;
    let w = seed_vector(direction, law.d())?;
    let report =
        walkers::direction_asymptotics(&law, &w, scales, common.reps, budget, common.seed)?;
    let mut rows = Vec::new();
    for sc in &report.scales {
        let scale = sc.scale.to_string();
        for ty in 0..law.d() {
            if report.critical {
                rows.push(fmt_estimate_row(
                    &scale,
                    ty,
                    "mutation_over_population",
                    &sc.m_over_pop[ty],
                    sc.replicates,
                    sc.censored,
                ));
            } else {
                rows.push(fmt_estimate_row(
                    &scale,
                    ty,
                    "population_over_scale",
                    &sc.n_over_n[ty],
                    sc.replicates,
                    sc.censored,
                ));
                rows.push(fmt_estimate_row(
                    &scale,
                    ty,
                    "mutation_over_scale",
                    &sc.m_over_n[ty],
                    sc.replicates,
                    sc.censored,
                ));
            }
        }
    }
    let csv_path = common.out.join("direction.csv");
    modelfile::write_csv(&csv_path, &ESTIMATE_HEADER, &rows)?;
    let json_path = common.out.join("direction.json");
    write_json(&json_path, &serde_json::to_value(&report)?)?;
    finish(&mut manifest, common, &[csv_path, json_path])
}

fn simulate_ct(
    common: &CommonArgs,
    engine: &str,
    x: Option<Vec<u64>>,
    horizon: f64,
    cap: u64,
) -> Result<()> {
    let mut manifest = start_manifest(
        "simulate-ct",
        common,
        json!({ "engine": engine, "x": x, "horizon": horizon, "cap": cap }),
    )?;
    let law = load_law(common)?;
    let d = law.d();
    let x = seed_vector(x, d)?;
    let mut header: Vec<String> = ["rep", "t", "parent", "litter"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for ty in 0..d {
        header.push(format!("z_{ty}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let kind = if engine == "direct" {
        StreamKind::CtDirect
    } else {
        StreamKind::CtLamperti
    };
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for rep in 0..common.reps {
        let rng = replicate_rng(common.seed, rep, kind);
        let trajectory = if engine == "direct" {
            ct::simulate_direct(&law, &x, horizon, cap, rng)?
        } else {
            ct::simulate_lamperti(&law, &x, horizon, cap, rng)?
        };
        let mut state = ct::CtState::new(&x);
        for ev in &trajectory.events {
            state.apply(ev.t, ev.parent as usize, &ev.litter);
            let litter: Vec<String> = ev.litter.iter().map(|k| k.to_string()).collect();
            let mut row = vec![
                rep.to_string(),
                format!("{}", ev.t),
                ev.parent.to_string(),
                litter.join(" "),
            ];
            for ty in 0..d {
                row.push(state.z[ty].to_string());
            }
            rows.push(row);
        }
        summaries.push(json!({
            "rep": rep,
            "events": trajectory.events.len(),
            "capped": trajectory.capped,
            "extinct_at": trajectory.extinct_at,
            "final_z": state.z,
        }));
    }
    let csv_path = common.out.join("trajectory.csv");
    modelfile::write_csv(&csv_path, &header_refs, &rows)?;
    let json_path = common.out.join("ct.json");
    write_json(
        &json_path,
        &json!({ "engine": engine, "horizon": horizon, "replicates": summaries }),
    )?;
    finish(&mut manifest, common, &[csv_path, json_path])
}

fn growth(common: &CommonArgs, x: Option<Vec<u64>>, t_grid: &[f64], cap: u64) -> Result<()> {
    let mut manifest = start_manifest(
        "growth",
        common,
        json!({ "x": x, "t_grid": t_grid, "cap": cap }),
    )?;
    let law = load_law(common)?;
    let x = seed_vector(x, law.d())?;
    let report = ct::supercritical_growth(
        &law,
        &x,
        t_grid,
        common.reps,
        cap,
        common.seed,
        common.workers,
    )?;
    let path = common.out.join("growth.json");
    write_json(&path, &serde_json::to_value(&report)?)?;
    finish(&mut manifest, common, &[path])
}

fn emergence_tau(common: &CommonArgs, target: usize, horizon: Option<f64>) -> Result<()> {
    let mut manifest = start_manifest(
        "emergence tau",
        common,
        json!({ "target": target, "horizon": horizon }),
    )?;
    let chain = load_chain(common)?;
    let horizon = horizon.unwrap_or_else(|| chain.default_horizon());
    let samples = run_replicates(
        common.seed,
        common.reps,
        StreamKind::Emergence,
        common.workers,
        |_rep, mut rng| emergence::sample_tau_direct(&chain, target, horizon, &mut rng),
    )
    .into_iter()
    .collect::<mutforest::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (rep, s) in samples.iter().enumerate() {
        for (ty, slot) in s.tau.iter().enumerate() {
            rows.push(vec![
                rep.to_string(),
                ty.to_string(),
                slot.map(|t| format!("{t}")).unwrap_or_default(),
                (slot.is_some()).to_string(),
            ]);
        }
    }
    let path = common.out.join("tau.csv");
    modelfile::write_csv(&path, &["rep", "type", "tau", "reached"], &rows)?;
    finish(&mut manifest, common, &[path])
}

fn emergence_theta(common: &CommonArgs, target: usize) -> Result<()> {
    let mut manifest =
        start_manifest("emergence theta", common, json!({ "target": target }))?;
    let chain = load_chain(common)?;
    let thetas = run_replicates(
        common.seed,
        common.reps,
        StreamKind::Emergence,
        common.workers,
        |_rep, mut rng| emergence::sample_theta(&chain, target, &mut rng),
    )
    .into_iter()
    .collect::<mutforest::Result<Vec<_>>>()?;
    let rows: Vec<Vec<String>> = thetas
        .iter()
        .enumerate()
        .map(|(rep, th)| vec![rep.to_string(), format!("{th}")])
        .collect();
    let path = common.out.join("theta.csv");
    modelfile::write_csv(&path, &["rep", "theta"], &rows)?;
    finish(&mut manifest, common, &[path])
}

fn emergence_bound(common: &CommonArgs, target: usize, t_grid: &[f64]) -> Result<()> {
    let mut manifest = start_manifest(
        "emergence bound",
        common,
        json!({ "target": target, "t_grid": t_grid }),
    )?;
    let chain = load_chain(common)?;
    let report = emergence::bound_check(
        &chain,
        target,
        t_grid,
        common.reps,
        common.seed,
        common.workers,
    )?;
    let rows: Vec<Vec<String>> = report
        .points
        .iter()
        .map(|p| {
            vec![
                format!("{}", p.t),
                format!("{}", p.tau_surv),
                format!("{}", p.tau_se),
                format!("{}", p.theta_surv),
                format!("{}", p.theta_se),
                p.ok.to_string(),
            ]
        })
        .collect();
    let csv_path = common.out.join("bound.csv");
    modelfile::write_csv(
        &csv_path,
        &["t", "tau_survival", "tau_se", "theta_survival", "theta_se", "ok"],
        &rows,
    )?;
    let json_path = common.out.join("bound.json");
    write_json(&json_path, &serde_json::to_value(&report)?)?;
    finish(&mut manifest, common, &[csv_path, json_path])
}

fn emergence_ladder(common: &CommonArgs, target: usize, deltas: &[f64]) -> Result<()> {
    let mut manifest = start_manifest(
        "emergence ladder",
        common,
        json!({ "target": target, "deltas": deltas }),
    )?;
    let models = modelfile::load_ladder(&common.model)
        .with_context(|| format!("model validation failed: {}", common.model.display()))?;
    let report = emergence::ratio_convergence(
        &models,
        target,
        deltas,
        common.reps,
        common.seed,
        common.workers,
    )?;
    let mut rows = Vec::new();
    for (r, rung) in report.rungs.iter().enumerate() {
        let base = |stat: &str, qual: String, value: f64, se: f64| {
            vec![
                r.to_string(),
                format!("{}", rung.scale),
                stat.to_string(),
                qual,
                format!("{value}"),
                format!("{se}"),
            ]
        };
        for (di, &delta) in report.deltas.iter().enumerate() {
            rows.push(base(
                "deviation_probability",
                format!("{delta}"),
                rung.dev_prob[di],
                rung.dev_se[di],
            ));
        }
        for (j, (&p, &se)) in rung
            .single_birth
            .iter()
            .zip(&rung.single_birth_se)
            .enumerate()
        {
            rows.push(base("single_birth", (j + 2).to_string(), p, se));
        }
        rows.push(base("tau_mean", String::new(), rung.tau_mean.mean, rung.tau_mean.se));
        rows.push(base(
            "theta_sum_mean",
            String::new(),
            rung.theta_sum_mean.mean,
            rung.theta_sum_mean.se,
        ));
    }
    let csv_path = common.out.join("ladder.csv");
    modelfile::write_csv(
        &csv_path,
        &["rung", "scale", "statistic", "qualifier", "estimate", "se"],
        &rows,
    )?;
    let json_path = common.out.join("ladder.json");
    write_json(&json_path, &serde_json::to_value(&report)?)?;
    finish(&mut manifest, common, &[csv_path, json_path])
}

fn emergence_laplace(
    common: &CommonArgs,
    target: usize,
    alphas: &[f64],
    terms: u32,
) -> Result<()> {
    let mut manifest = start_manifest(
        "emergence laplace",
        common,
        json!({ "target": target, "alphas": alphas, "terms": terms }),
    )?;
    let chain = load_chain(common)?;
    let mut rows = Vec::new();
    for &alpha in alphas {
        let v = emergence::laplace_tau(&chain, target, alpha, terms)?;
        rows.push(vec![
            format!("{alpha}"),
            format!("{}", v.value),
            v.terms.to_string(),
            format!("{}", v.tail_bound),
        ]);
    }
    let path = common.out.join("laplace.csv");
    modelfile::write_csv(&path, &["alpha", "value", "terms", "tail_bound"], &rows)?;
    finish(&mut manifest, common, &[path])
}

fn emergence_expectation(common: &CommonArgs) -> Result<()> {
    let mut manifest = start_manifest("emergence expectation", common, json!({}))?;
    let chain = load_chain(common)?;
    let mut targets = Vec::new();
    let mut sums = (0.0, 0.0, 0.0);
    for target in 1..chain.d() {
        let r = emergence::expected_tau(&chain, target)?;
        sums.0 += r.over_own_rate;
        sums.1 += r.over_both_rates;
        sums.2 += r.quadrature;
        let mut value = serde_json::to_value(&r)?;
        value["target"] = json!(target);
        targets.push(value);
    }
    let path = common.out.join("expectation.json");
    write_json(
        &path,
        &json!({
            "targets": targets,
            "ladder_sum_over_own_rate": sums.0,
            "ladder_sum_over_both_rates": sums.1,
            "ladder_sum_quadrature": sums.2,
        }),
    )?;
    finish(&mut manifest, common, &[path])
}
