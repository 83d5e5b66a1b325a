//! The three subcommands, each writing to a caller-supplied writer so
//! output is testable byte for byte.
//!
//! Seed discipline: probability estimation for variant index `v` uses
//! `derive_seed(seed, 1000 + v)`; simulation row `i` (in `variants ×
//! q_values` order) uses `derive_seed(seed, i)`. The offset keeps the two
//! families disjoint for any realistic sweep size, and makes every row
//! independently reproducible from the base seed.

use std::io::Write;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use secrelay::markov::ModeProbabilities;
use secrelay::montecarlo::count_events;
use secrelay::optimize::{brute_force_policy, optimize_policy, LpDiagnostics, SolveMethod};
use secrelay::policy::QueuePolicy;
use secrelay::rng::derive_seed;
use secrelay::sim::{analytic_mu, run_slots, SchemeVariant};

use crate::config::{OutputFormat, RunConfig};

/// Seed-tag offset separating estimation streams from simulation rows.
const EST_TAG_BASE: u64 = 1000;

fn estimate_probs(cfg: &RunConfig, vidx: usize, variant: SchemeVariant) -> ModeProbabilities {
    let counts = count_events(
        &cfg.params,
        cfg.n_mc,
        derive_seed(cfg.seed, EST_TAG_BASE + vidx as u64),
        cfg.strict_region,
        cfg.n_workers,
    );
    counts.mode_probs(variant.mask())
}

/// Tie-break policy a run uses for `variant` at capacity `q`: the optimized
/// one where the policy matters, a placeholder for the bufferless scheme
/// (which never consults it).
fn policy_for(
    probs: &ModeProbabilities,
    variant: SchemeVariant,
    q: usize,
) -> Result<(QueuePolicy, SolveMethod)> {
    if variant == SchemeVariant::BufferlessFd {
        let policy = QueuePolicy::constant(q, 0.5).expect("q ≥ 1 checked by validate");
        return Ok((policy, SolveMethod::Degenerate));
    }
    let sol = optimize_policy(probs, q)
        .with_context(|| format!("optimizing policy for {variant}, q = {q}"))?;
    Ok((sol.policy, sol.method))
}

#[derive(Debug, Serialize)]
struct AnalyzeRow {
    variant: &'static str,
    q: usize,
    mu_analytic: f64,
    alphas: Vec<f64>,
    method: String,
}

/// Chain-analysis throughput with optimized tie-breaks for every
/// (variant, capacity) pair.
pub fn cmd_analyze(cfg: &RunConfig, w: &mut dyn Write) -> Result<()> {
    cfg.validate()?;
    let mut rows: Vec<AnalyzeRow> = Vec::new();
    for (vidx, &variant) in cfg.variants.iter().enumerate() {
        let probs = estimate_probs(cfg, vidx, variant);
        for &q in &cfg.q_values {
            let row = if variant == SchemeVariant::BufferlessFd {
                AnalyzeRow {
                    variant: variant.name(),
                    q,
                    mu_analytic: probs.p_df_total,
                    alphas: Vec::new(),
                    method: "closed-form".to_string(),
                }
            } else {
                let sol = optimize_policy(&probs, q)
                    .with_context(|| format!("optimizing policy for {variant}, q = {q}"))?;
                AnalyzeRow {
                    variant: variant.name(),
                    q,
                    mu_analytic: sol.mu,
                    alphas: sol.policy.alphas().to_vec(),
                    method: sol.method.to_string(),
                }
            };
            rows.push(row);
        }
    }
    match cfg.format {
        OutputFormat::Csv => {
            writeln!(w, "variant,q,mu_analytic,alphas")?;
            for r in &rows {
                let alphas = r
                    .alphas
                    .iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(";");
                writeln!(w, "{},{},{},{}", r.variant, r.q, r.mu_analytic, alphas)?;
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *w, &rows)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SimRow {
    variant: &'static str,
    q: usize,
    mu_analytic: f64,
    mu_empirical: f64,
    gap: f64,
    seed: u64,
}

/// Slot-level simulation of every (variant, capacity) pair, reported
/// against the chain prediction at estimated probabilities.
pub fn cmd_simulate(cfg: &RunConfig, w: &mut dyn Write) -> Result<()> {
    cfg.validate()?;
    let probs_by_variant: Vec<ModeProbabilities> = cfg
        .variants
        .iter()
        .enumerate()
        .map(|(vidx, &variant)| estimate_probs(cfg, vidx, variant))
        .collect();

    let specs: Vec<(usize, SchemeVariant, usize)> = cfg
        .variants
        .iter()
        .enumerate()
        .flat_map(|(vidx, &variant)| cfg.q_values.iter().map(move |&q| (vidx, variant, q)))
        .collect();

    let rows: Vec<SimRow> = specs
        .par_iter()
        .enumerate()
        .map(|(row_idx, &(vidx, variant, q))| -> Result<SimRow> {
            let probs = &probs_by_variant[vidx];
            let (policy, _) = policy_for(probs, variant, q)?;
            let mu_analytic = analytic_mu(probs, &policy, variant)
                .with_context(|| format!("chain analysis for {variant}, q = {q}"))?;
            let mut params = cfg.params.clone();
            params.buffer_cap_q = q;
            let row_seed = derive_seed(cfg.seed, row_idx as u64);
            let rep = run_slots(
                &params,
                &policy,
                variant,
                cfg.strict_region,
                cfg.n_slots,
                row_seed,
            );
            Ok(SimRow {
                variant: variant.name(),
                q,
                mu_analytic,
                mu_empirical: rep.empirical_mu,
                gap: rep.empirical_mu - mu_analytic,
                seed: row_seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    match cfg.format {
        OutputFormat::Csv => {
            writeln!(w, "variant,q,mu_analytic,mu_empirical,gap,seed")?;
            for r in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    r.variant, r.q, r.mu_analytic, r.mu_empirical, r.gap, r.seed
                )?;
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *w, &rows)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct GridCheck {
    grid_step: f64,
    grid_mu: f64,
    gap: f64,
}

#[derive(Debug, Serialize)]
struct OptimizeReport {
    variant: &'static str,
    q: usize,
    mu: f64,
    alphas: Vec<f64>,
    method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    lp: Option<LpDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<GridCheck>,
    probs: ModeProbabilities,
    n_mc: u64,
    seed: u64,
}

/// Dumps the optimized tie-break policy for a single (variant, capacity)
/// configuration as JSON, optionally cross-checked against a grid search.
pub fn cmd_optimize(cfg: &RunConfig, w: &mut dyn Write) -> Result<()> {
    cfg.validate()?;
    if cfg.q_values.len() != 1 {
        bail!(
            "optimize needs exactly one capacity in q_values (got {})",
            cfg.q_values.len()
        );
    }
    let q = cfg.q_values[0];
    let variant = cfg.variants[0];
    if variant == SchemeVariant::BufferlessFd {
        bail!("the bufferless scheme has no tie-break policy to optimize");
    }
    let probs = estimate_probs(cfg, 0, variant);
    let sol = optimize_policy(&probs, q)
        .with_context(|| format!("optimizing policy for {variant}, q = {q}"))?;

    let grid = if cfg.grid_check {
        let grid_sol = brute_force_policy(&probs, q, cfg.grid_step)
            .with_context(|| format!("grid search for {variant}, q = {q}"))?;
        let gap = sol.mu - grid_sol.mu;
        if !(-1e-6..=1e-3).contains(&gap) {
            bail!(
                "grid cross-check failed: optimizer {} vs grid {} (gap {gap:e})",
                sol.mu,
                grid_sol.mu
            );
        }
        Some(GridCheck {
            grid_step: cfg.grid_step,
            grid_mu: grid_sol.mu,
            gap,
        })
    } else {
        None
    };

    let report = OptimizeReport {
        variant: variant.name(),
        q,
        mu: sol.mu,
        alphas: sol.policy.alphas().to_vec(),
        method: sol.method.to_string(),
        lp: sol.lp,
        grid,
        probs,
        n_mc: cfg.n_mc,
        seed: cfg.seed,
    };
    serde_json::to_writer_pretty(&mut *w, &report)?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> RunConfig {
        RunConfig {
            n_mc: 20_000,
            n_slots: 50_000,
            q_values: vec![1, 3],
            variants: vec![SchemeVariant::Proposed, SchemeVariant::BufferlessFd],
            ..Default::default()
        }
    }

    fn run(f: impl Fn(&RunConfig, &mut dyn Write) -> Result<()>, cfg: &RunConfig) -> String {
        let mut buf = Vec::new();
        f(cfg, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn analyze_csv_shape_and_determinism() {
        let cfg = small_cfg();
        let out = run(cmd_analyze, &cfg);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "variant,q,mu_analytic,alphas");
        assert_eq!(lines.len(), 1 + 4);
        assert!(lines[1].starts_with("proposed,1,"));
        assert!(lines[3].starts_with("bufferless-fd,1,"));
        // Bufferless rows have an empty alphas column.
        assert!(lines[3].ends_with(','));
        assert_eq!(out, run(cmd_analyze, &cfg));
    }

    #[test]
    fn analyze_json_parses_and_carries_method() {
        let mut cfg = small_cfg();
        cfg.format = OutputFormat::Json;
        let out = run(cmd_analyze, &cfg);
        let rows: serde_json::Value = serde_json::from_str(&out).unwrap();
        let rows = rows.as_array().unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0]["variant"], "proposed");
        assert_eq!(rows[0]["method"], "lfp");
        assert_eq!(rows[0]["alphas"].as_array().unwrap().len(), 2);
        assert_eq!(rows[2]["method"], "closed-form");
    }

    #[test]
    fn simulate_rows_are_byte_deterministic() {
        let mut cfg = small_cfg();
        cfg.n_slots = 20_000;
        let a = run(cmd_simulate, &cfg);
        let b = run(cmd_simulate, &cfg);
        assert_eq!(a, b);
        let lines: Vec<&str> = a.lines().collect();
        assert_eq!(lines[0], "variant,q,mu_analytic,mu_empirical,gap,seed");
        assert_eq!(lines.len(), 1 + 4);
        for line in &lines[1..] {
            assert_eq!(line.split(',').count(), 6);
        }
    }

    #[test]
    fn simulate_gap_is_small_at_moderate_sizes() {
        let mut cfg = small_cfg();
        cfg.q_values = vec![2];
        cfg.variants = vec![SchemeVariant::Proposed];
        cfg.n_mc = 50_000;
        cfg.n_slots = 200_000;
        let out = run(cmd_simulate, &cfg);
        let line = out.lines().nth(1).unwrap();
        let gap: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
        assert!(gap.abs() < 0.02, "gap {gap} in {line}");
    }

    #[test]
    fn optimize_reports_policy_and_grid_check() {
        let mut cfg = small_cfg();
        cfg.q_values = vec![2];
        cfg.variants = vec![SchemeVariant::Proposed];
        cfg.grid_check = true;
        cfg.grid_step = 0.05;
        let out = run(cmd_optimize, &cfg);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["variant"], "proposed");
        assert_eq!(v["q"], 2);
        assert_eq!(v["method"], "lfp");
        let alphas = v["alphas"].as_array().unwrap();
        assert_eq!(alphas.len(), 3);
        assert_eq!(alphas[0], 1.0);
        assert_eq!(alphas[2], 0.0);
        assert!(v["grid"]["grid_mu"].is_f64());
        assert!(v["lp"]["iterations"].is_u64());
    }

    #[test]
    fn optimize_rejects_sweeps_and_bufferless() {
        let mut cfg = small_cfg();
        let mut sink = Vec::new();
        assert!(cmd_optimize(&cfg, &mut sink).is_err());
        cfg.q_values = vec![2];
        cfg.variants = vec![SchemeVariant::BufferlessFd];
        assert!(cmd_optimize(&cfg, &mut sink).is_err());
    }
}
