//! Optimization of the tie-break policy.
//!
//! The throughput is a ratio of two affine functions of the transformed
//! variables `φₙ = ζₙ/ζ₀`, with each tie-break probability recoverable as
//! `αₙ = tₙ/φₙ` where `tₙ` is itself affine in φ. Maximizing it is therefore
//! a linear-fractional program: normalize the denominator with an auxiliary
//! scale variable and solve the resulting linear program with the dense
//! simplex in [`lp`]. A brute-force grid evaluator provides an independent
//! oracle for small buffers.

pub mod lp;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::markov::{policy_throughput, transition_probs, MarkovError, ModeProbabilities};
use crate::policy::QueuePolicy;
use lp::{Comparison, Constraint, LinearProgram, LpError};

/// Smallest allowed value of any `φₙ` in the linear program. The recovery
/// `αₙ = tₙ/φₙ` needs `φₙ > 0`; since `ζₙ ∝ φₙ`, this floor corresponds to
/// negligible state mass and does not bind at real optima.
pub const PHI_FLOOR: f64 = 1e-9;

/// Recovered tie-break values may stray outside `[0,1]` by at most this much
/// before the solve is rejected instead of clamped.
pub const ALPHA_CLAMP_TOL: f64 = 1e-7;

/// Second-tier clamp gate for states with negligible stationary mass.
///
/// At saturation optima the queue-empty probability (the Charnes–Cooper
/// scale) underflows toward zero and the low-occupancy `yₙ` are dominated by
/// solver noise, so the recovered ratio for those states is meaningless —
/// but a wrong tie-break on a state of mass `yₙ` perturbs the throughput by
/// at most `|violation|·yₙ`. A violation is therefore an error only when
/// that certified impact exceeds this bound; otherwise the value is clamped
/// and the exact chain re-evaluation of the returned policy settles the
/// actual throughput.
pub const ALPHA_MASS_TOL: f64 = 1e-7;

/// The policy program in transformed variables.
///
/// Rows satisfy `tₙ = φₙαₙ = c_rows[n−1]·φ + g[n−1]` for chain-consistent φ,
/// and the objective is `μ = (c·φ + f)/(Σφ + 1)`.
#[derive(Debug, Clone)]
pub struct LfpInstance {
    /// Buffer capacity Q.
    pub cap_q: usize,
    /// `k3/k1`.
    pub d: f64,
    /// `(k1+k2)/k1`.
    pub e: f64,
    /// `(k1+k3)/k1`.
    pub beta: f64,
    /// Objective numerator coefficients (length Q).
    pub c: Vec<f64>,
    /// Objective numerator constant.
    pub f: f64,
    /// Row coefficients of `tₙ`, for n = 1…Q (length Q, each of length Q).
    pub c_rows: Vec<Vec<f64>>,
    /// Row constants `gₙ`, for n = 1…Q.
    pub g: Vec<f64>,
    /// The probabilities the instance was built from.
    pub probs: ModeProbabilities,
}

/// How a [`PolicySolution`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SolveMethod {
    /// Linear-fractional program via the simplex.
    Lfp,
    /// Exhaustive grid search.
    Grid,
    /// Tie event has probability zero; every policy is optimal.
    Degenerate,
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMethod::Lfp => "lfp",
            SolveMethod::Grid => "grid",
            SolveMethod::Degenerate => "degenerate",
        })
    }
}

/// Solver-level diagnostics of an LFP solve.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LpDiagnostics {
    /// Objective value reported by the linear program (equals the achieved
    /// throughput up to solver tolerance).
    pub lp_objective: f64,
    /// Simplex pivot count.
    pub iterations: usize,
    /// Value of the Charnes–Cooper scale variable at the optimum.
    pub scale: f64,
}

/// An optimized tie-break policy and its achieved throughput.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PolicySolution {
    /// The tie-break vector `α₀…α_Q`.
    pub policy: QueuePolicy,
    /// Achieved throughput, re-evaluated through the exact chain analysis.
    pub mu: f64,
    /// The chain-consistent transformed variables `φ₁…φ_Q` at the solution.
    pub phi: Vec<f64>,
    /// How the solution was produced.
    pub method: SolveMethod,
    /// Present when `method` is `lfp`.
    pub lp: Option<LpDiagnostics>,
}

/// Optimization failure.
#[derive(Debug, Clone, PartialEq)]
pub enum OptimizeError {
    /// `k1 = 0`: the tie event never occurs and the program is undefined
    /// (the throughput does not depend on the policy).
    DegenerateTieProbability,
    /// Buffer capacity must be at least 1.
    ZeroCapacity,
    /// The input probabilities violate their invariants.
    InvalidProbs(MarkovError),
    /// The linear program failed (infeasible, unbounded, or iteration cap).
    Lp(LpError),
    /// A recovered tie-break value was outside `[0,1]` beyond tolerance on
    /// a state with non-negligible mass.
    AlphaOutOfRange {
        /// Occupancy index of the offending entry.
        index: usize,
        /// The recovered value.
        value: f64,
    },
    /// The requested grid would exceed the evaluation budget.
    GridTooLarge,
    /// Chain analysis of a candidate policy failed.
    Markov(MarkovError),
}

impl fmt::Display for OptimizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptimizeError::DegenerateTieProbability => {
                write!(f, "k1 = 0: tie-break policy has no effect")
            }
            OptimizeError::ZeroCapacity => write!(f, "buffer capacity must be ≥ 1"),
            OptimizeError::InvalidProbs(e) => write!(f, "invalid probabilities: {e}"),
            OptimizeError::Lp(e) => write!(f, "linear program failed: {e}"),
            OptimizeError::AlphaOutOfRange { index, value } => {
                write!(f, "recovered alpha_{index} = {value} outside [0,1]")
            }
            OptimizeError::GridTooLarge => write!(f, "grid search exceeds evaluation budget"),
            OptimizeError::Markov(e) => write!(f, "chain analysis failed: {e}"),
        }
    }
}

impl core::error::Error for OptimizeError {}

impl From<LpError> for OptimizeError {
    fn from(e: LpError) -> Self {
        OptimizeError::Lp(e)
    }
}

/// Builds the transformed program for `probs` and capacity `cap_q`.
///
/// The `tₙ` rows are generated by unrolling their defining recurrence
/// `t₁ = e·φ₁ − β`, `tₙ = e·φₙ − d·φₙ₋₁ − tₙ₋₁`, rather than transcribing
/// any closed-form coefficient pattern; the closed form is checked against
/// this construction in the tests. The objective numerator follows from
/// substituting `bₙ = (k1+k2) − k1·αₙ` and `Σₙ tₙ = Σₙ<Q tₙ` (using
/// `t_Q = 0`) into the throughput formula.
pub fn build_lfp(probs: &ModeProbabilities, cap_q: usize) -> Result<LfpInstance, OptimizeError> {
    probs.validate().map_err(OptimizeError::InvalidProbs)?;
    if cap_q < 1 {
        return Err(OptimizeError::ZeroCapacity);
    }
    if probs.k1 == 0.0 {
        return Err(OptimizeError::DegenerateTieProbability);
    }
    let d = probs.k3 / probs.k1;
    let e = (probs.k1 + probs.k2) / probs.k1;
    let beta = (probs.k1 + probs.k3) / probs.k1;

    let mut c_rows: Vec<Vec<f64>> = Vec::with_capacity(cap_q);
    let mut g: Vec<f64> = Vec::with_capacity(cap_q);
    for n in 1..=cap_q {
        if n == 1 {
            let mut row = vec![0.0; cap_q];
            row[0] = e;
            c_rows.push(row);
            g.push(-beta);
        } else {
            let prev = &c_rows[n - 2];
            let mut row: Vec<f64> = prev.iter().map(|v| -v).collect();
            row[n - 2] -= d;
            row[n - 1] += e;
            c_rows.push(row);
            g.push(-g[n - 2]);
        }
    }

    let per_phi = probs.k1 + probs.k2 + probs.p_rf + probs.p_df_only;
    let mut c = vec![per_phi; cap_q];
    let mut f = probs.p_df_total;
    for n in 1..cap_q {
        for (cj, rj) in c.iter_mut().zip(c_rows[n - 1].iter()) {
            *cj -= probs.k1 * rj;
        }
        f -= probs.k1 * g[n - 1];
    }

    Ok(LfpInstance {
        cap_q,
        d,
        e,
        beta,
        c,
        f,
        c_rows,
        g,
        probs: *probs,
    })
}

/// Solves the instance by the Charnes–Cooper transformation.
///
/// Variables are `(y₁…y_Q, s)` with `yₙ = s·φₙ` and `s` the reciprocal of
/// the denominator; `Σy + s = 1` normalizes it. The tie-break bounds
/// `0 ≤ tₙ ≤ φₙ` become linear rows, `α_Q = 0` an equality, and each
/// `φₙ ≥ ε` a floor.
///
/// In the normalized variables `(y, s)` is exactly the stationary
/// distribution `(ζ₁…ζ_Q, ζ₀)`, so at saturation optima `s` and the
/// low-occupancy `yₙ` legitimately underflow toward zero. Recovery
/// therefore never divides by `s`: each tie-break is `αₙ = (cₙ·y + gₙs)/yₙ`
/// directly in scaled space, with the two-tier clamp gate described at
/// [`ALPHA_MASS_TOL`]. The returned throughput is re-evaluated through the
/// exact chain pipeline at the recovered policy, so it is achieved, not
/// just claimed by the solver.
pub fn solve_lfp(inst: &LfpInstance) -> Result<PolicySolution, OptimizeError> {
    let q = inst.cap_q;
    let n_vars = q + 1; // y₁…y_Q, then s
    let mut constraints: Vec<Constraint> = Vec::with_capacity(2 * q + 1);

    let mut normalize = vec![1.0; n_vars];
    normalize[q] = 1.0;
    constraints.push(Constraint {
        coeffs: normalize,
        cmp: Comparison::Eq,
        rhs: 1.0,
    });

    let scaled_t = |n: usize| -> Vec<f64> {
        let mut coeffs = vec![0.0; n_vars];
        coeffs[..q].copy_from_slice(&inst.c_rows[n - 1]);
        coeffs[q] = inst.g[n - 1];
        coeffs
    };
    for n in 1..q {
        constraints.push(Constraint {
            coeffs: scaled_t(n),
            cmp: Comparison::Ge,
            rhs: 0.0,
        });
        let mut upper = scaled_t(n);
        upper[n - 1] -= 1.0;
        constraints.push(Constraint {
            coeffs: upper,
            cmp: Comparison::Le,
            rhs: 0.0,
        });
    }
    constraints.push(Constraint {
        coeffs: scaled_t(q),
        cmp: Comparison::Eq,
        rhs: 0.0,
    });
    for n in 0..q {
        let mut floor = vec![0.0; n_vars];
        floor[n] = 1.0;
        floor[q] = -PHI_FLOOR;
        constraints.push(Constraint {
            coeffs: floor,
            cmp: Comparison::Ge,
            rhs: 0.0,
        });
    }

    let mut objective = vec![0.0; n_vars];
    objective[..q].copy_from_slice(&inst.c);
    objective[q] = inst.f;

    let solution = lp::solve(&LinearProgram {
        objective,
        constraints,
    })?;

    let scale = solution.x[q];
    let y = &solution.x[..q];

    let mut alphas = vec![0.0; q + 1];
    alphas[0] = 1.0;
    for n in 1..q {
        let t: f64 = inst.c_rows[n - 1]
            .iter()
            .zip(y.iter())
            .map(|(c, v)| c * v)
            .sum::<f64>()
            + inst.g[n - 1] * scale;
        let raw = t / y[n - 1];
        // Non-finite only when yₙ is exactly zero (mass below solver
        // resolution); any value is then throughput-neutral.
        let alpha = if raw.is_finite() { raw } else { 0.5 };
        let violation = (alpha - alpha.clamp(0.0, 1.0)).abs();
        if violation > ALPHA_CLAMP_TOL && violation * y[n - 1] > ALPHA_MASS_TOL {
            return Err(OptimizeError::AlphaOutOfRange {
                index: n,
                value: alpha,
            });
        }
        alphas[n] = alpha.clamp(0.0, 1.0);
    }
    let policy = QueuePolicy::new(alphas).expect("clamped alphas are valid");
    let mu = policy_throughput(&inst.probs, &policy).map_err(OptimizeError::Markov)?;
    let phi = phi_for_policy(&inst.probs, &policy);
    Ok(PolicySolution {
        policy,
        mu,
        phi,
        method: SolveMethod::Lfp,
        lp: Some(LpDiagnostics {
            lp_objective: solution.objective,
            iterations: solution.iterations,
            scale,
        }),
    })
}

/// Chain-consistent `φ₁…φ_Q` for a given policy (`φₙ = ζₙ/ζ₀` as ratio
/// products, without normalization).
fn phi_for_policy(probs: &ModeProbabilities, policy: &QueuePolicy) -> Vec<f64> {
    let (up, down) = transition_probs(probs, policy);
    let mut phi = vec![0.0; policy.cap_q()];
    let mut w = 1.0;
    for n in 0..policy.cap_q() {
        w *= up[n] / down[n];
        phi[n] = w;
    }
    phi
}

/// Maximizes the throughput over the tie-break policy.
///
/// Uses the linear-fractional program when the tie event has positive
/// probability; otherwise every policy yields the same throughput and a
/// fixed interior policy is returned with `method = degenerate`.
pub fn optimize_policy(
    probs: &ModeProbabilities,
    cap_q: usize,
) -> Result<PolicySolution, OptimizeError> {
    match build_lfp(probs, cap_q) {
        Ok(inst) => solve_lfp(&inst),
        Err(OptimizeError::DegenerateTieProbability) => {
            let policy =
                QueuePolicy::constant(cap_q, 0.5).map_err(|_| OptimizeError::ZeroCapacity)?;
            let mu = policy_throughput(probs, &policy).map_err(OptimizeError::Markov)?;
            let phi = phi_for_policy(probs, &policy);
            Ok(PolicySolution {
                policy,
                mu,
                phi,
                method: SolveMethod::Degenerate,
                lp: None,
            })
        }
        Err(e) => Err(e),
    }
}

/// Exhaustive grid search over the free tie-break entries `α₁…α_{Q−1}`.
///
/// Each entry ranges over `{0, 1/g, …, 1}` with `g = round(1/grid_step)`.
/// Refuses grids beyond 10⁸ evaluations. Intended as a validation oracle for
/// small Q, not a production path.
pub fn brute_force_policy(
    probs: &ModeProbabilities,
    cap_q: usize,
    grid_step: f64,
) -> Result<PolicySolution, OptimizeError> {
    probs.validate().map_err(OptimizeError::InvalidProbs)?;
    if cap_q < 1 {
        return Err(OptimizeError::ZeroCapacity);
    }
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(OptimizeError::GridTooLarge);
    }
    let g = libm::round(1.0 / grid_step) as u64;
    let free = cap_q - 1;
    let mut total: u64 = 1;
    for _ in 0..free {
        total = match total.checked_mul(g + 1) {
            Some(t) if t <= 100_000_000 => t,
            _ => return Err(OptimizeError::GridTooLarge),
        };
    }

    let mut best_mu = f64::NEG_INFINITY;
    let mut best_alphas: Vec<f64> = Vec::new();
    let mut index = vec![0u64; free];
    let mut alphas = vec![0.0; cap_q + 1];
    alphas[0] = 1.0;
    loop {
        for (i, &ix) in index.iter().enumerate() {
            alphas[i + 1] = ix as f64 / g as f64;
        }
        let policy = QueuePolicy::new(alphas.clone()).expect("grid point in range");
        let mu = policy_throughput(probs, &policy).map_err(OptimizeError::Markov)?;
        if mu > best_mu {
            best_mu = mu;
            best_alphas = alphas.clone();
        }
        // Odometer increment over the free entries.
        let mut pos = 0;
        loop {
            if pos == free {
                let policy = QueuePolicy::new(best_alphas).expect("best grid point in range");
                let phi = phi_for_policy(probs, &policy);
                return Ok(PolicySolution {
                    policy,
                    mu: best_mu,
                    phi,
                    method: SolveMethod::Grid,
                    lp: None,
                });
            }
            if index[pos] < g {
                index[pos] += 1;
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, unit_uniform};
    use rand_core::RngCore;

    fn sample_probs(rng: &mut impl RngCore) -> ModeProbabilities {
        // Random joint event pmf keeps all invariants satisfied by
        // construction.
        let mut cells = [0.0f64; 16];
        let mut total = 0.0;
        for c in cells.iter_mut() {
            *c = 0.02 + unit_uniform(rng);
            total += *c;
        }
        for c in cells.iter_mut() {
            *c /= total;
        }
        crate::montecarlo::mode_probs_from_pmf(&cells)
    }

    fn fixed_probs() -> ModeProbabilities {
        ModeProbabilities {
            k1: 0.2,
            k2: 0.1,
            k3: 0.1,
            p_rf: 0.2,
            p_df_total: 0.2,
            p_df_only: 0.1,
        }
    }

    #[test]
    fn ratio_constants_hand_value() {
        let probs = ModeProbabilities {
            k1: 0.1,
            k2: 0.1,
            k3: 0.1,
            p_rf: 0.0,
            p_df_total: 0.0,
            p_df_only: 0.0,
        };
        let inst = build_lfp(&probs, 3).unwrap();
        assert!((inst.d - 1.0).abs() < 1e-15);
        assert!((inst.e - 2.0).abs() < 1e-15);
        assert!((inst.beta - 2.0).abs() < 1e-15);
    }

    #[test]
    fn generated_rows_match_closed_form() {
        // Closed form: tₙ = e·φₙ + Σ_{ℓ<n} (−1)^{n−ℓ}(e+d)·φ_ℓ + (−1)ⁿ·β.
        let mut rng = stream_rng(47, 0);
        for cap_q in 2..=4usize {
            let probs = sample_probs(&mut rng);
            if probs.k1 == 0.0 {
                continue;
            }
            let inst = build_lfp(&probs, cap_q).unwrap();
            for n in 1..=cap_q {
                for l in 1..=cap_q {
                    let expected = if l == n {
                        inst.e
                    } else if l < n {
                        let sign = if (n - l) % 2 == 1 { -1.0 } else { 1.0 };
                        sign * (inst.e + inst.d)
                    } else {
                        0.0
                    };
                    assert_eq!(inst.c_rows[n - 1][l - 1], expected, "row {n}, column {l}");
                }
                let expected_g = if n % 2 == 1 { -inst.beta } else { inst.beta };
                assert_eq!(inst.g[n - 1], expected_g, "g_{n}");
            }
        }
    }

    #[test]
    fn objective_round_trip_matches_chain_throughput() {
        // For chain-consistent φ the fractional objective must equal the
        // exact throughput of the generating policy.
        let mut rng = stream_rng(53, 0);
        let cap_q = 3;
        for _ in 0..100 {
            let probs = sample_probs(&mut rng);
            if probs.k1 == 0.0 {
                continue;
            }
            let inst = build_lfp(&probs, cap_q).unwrap();
            let mut alphas = vec![0.0; cap_q + 1];
            alphas[0] = 1.0;
            for a in alphas[1..cap_q].iter_mut() {
                *a = unit_uniform(&mut rng);
            }
            let policy = QueuePolicy::new(alphas).unwrap();
            let phi = phi_for_policy(&probs, &policy);
            let numerator: f64 = inst
                .c
                .iter()
                .zip(phi.iter())
                .map(|(c, p)| c * p)
                .sum::<f64>()
                + inst.f;
            let denominator: f64 = phi.iter().sum::<f64>() + 1.0;
            let mu_markov = policy_throughput(&probs, &policy).unwrap();
            assert!(
                (numerator / denominator - mu_markov).abs() < 1e-9,
                "objective {} vs chain {}",
                numerator / denominator,
                mu_markov
            );
        }
    }

    #[test]
    fn round_trip_phi_alpha_phi() {
        let mut rng = stream_rng(59, 0);
        for _ in 0..200 {
            let probs = sample_probs(&mut rng);
            if probs.k1 == 0.0 {
                continue;
            }
            let cap_q = 2 + (rng.next_u64() % 4) as usize;
            let inst = build_lfp(&probs, cap_q).unwrap();
            let mut alphas = vec![0.0; cap_q + 1];
            alphas[0] = 1.0;
            for a in alphas[1..cap_q].iter_mut() {
                *a = unit_uniform(&mut rng);
            }
            let policy = QueuePolicy::new(alphas.clone()).unwrap();
            let phi = phi_for_policy(&probs, &policy);
            for n in 1..cap_q {
                let t: f64 = inst.c_rows[n - 1]
                    .iter()
                    .zip(phi.iter())
                    .map(|(c, p)| c * p)
                    .sum::<f64>()
                    + inst.g[n - 1];
                let recovered = t / phi[n - 1];
                assert!(
                    (recovered - alphas[n]).abs() < 1e-8 * alphas[n].abs().max(1.0),
                    "alpha_{n}: {recovered} vs {}",
                    alphas[n]
                );
            }
        }
    }

    #[test]
    fn capacity_one_has_no_free_choice() {
        let probs = fixed_probs();
        let sol = optimize_policy(&probs, 1).unwrap();
        assert_eq!(sol.method, SolveMethod::Lfp);
        assert_eq!(sol.policy.alphas(), &[1.0, 0.0]);
        let direct = policy_throughput(&probs, &QueuePolicy::new(vec![1.0, 0.0]).unwrap()).unwrap();
        assert!((sol.mu - direct).abs() < 1e-12);
    }

    #[test]
    fn lfp_beats_fine_grid_at_capacity_two() {
        let probs = fixed_probs();
        let sol = solve_lfp(&build_lfp(&probs, 2).unwrap()).unwrap();
        let grid = brute_force_policy(&probs, 2, 0.001).unwrap();
        assert!(sol.mu >= grid.mu - 1e-6, "lfp {} grid {}", sol.mu, grid.mu);
        assert!(
            (sol.mu - grid.mu).abs() <= 1e-6,
            "lfp {} grid {}",
            sol.mu,
            grid.mu
        );
    }

    #[test]
    fn lfp_dominates_grid_on_random_instances() {
        let mut rng = stream_rng(61, 0);
        for trial in 0..25 {
            let probs = sample_probs(&mut rng);
            if probs.k1 == 0.0 {
                continue;
            }
            let cap_q = 2 + (trial % 2) as usize;
            let sol = optimize_policy(&probs, cap_q).unwrap();
            let step = if cap_q == 2 { 0.01 } else { 0.05 };
            let grid = brute_force_policy(&probs, cap_q, step).unwrap();
            assert!(
                sol.mu >= grid.mu - 1e-6,
                "cap {cap_q}: lfp {} < grid {}",
                sol.mu,
                grid.mu
            );
        }
    }

    #[test]
    fn degenerate_tie_probability_path() {
        let probs = ModeProbabilities {
            k1: 0.0,
            k2: 0.2,
            k3: 0.15,
            p_rf: 0.1,
            p_df_total: 0.1,
            p_df_only: 0.05,
        };
        let sol = optimize_policy(&probs, 4).unwrap();
        assert_eq!(sol.method, SolveMethod::Degenerate);
        assert!(sol.lp.is_none());
        for &a in &sol.policy.alphas()[1..4] {
            assert_eq!(a, 0.5);
        }
        // α is irrelevant: any policy gives the same throughput.
        let other = QueuePolicy::new(vec![1.0, 0.9, 0.1, 0.4, 0.0]).unwrap();
        let mu_other = policy_throughput(&probs, &other).unwrap();
        assert!((sol.mu - mu_other).abs() < 1e-12);
    }

    #[test]
    fn optimum_is_monotone_in_capacity() {
        let mut rng = stream_rng(67, 0);
        for _ in 0..10 {
            let probs = sample_probs(&mut rng);
            if probs.k1 == 0.0 {
                continue;
            }
            let mut prev = f64::NEG_INFINITY;
            for cap_q in 1..=6 {
                let sol = optimize_policy(&probs, cap_q).unwrap();
                assert!(
                    sol.mu >= prev - 1e-9,
                    "cap {cap_q}: {} < previous {prev}",
                    sol.mu
                );
                prev = sol.mu;
            }
        }
    }

    #[test]
    fn lp_objective_agrees_with_achieved_mu() {
        let mut rng = stream_rng(71, 0);
        for _ in 0..20 {
            let probs = sample_probs(&mut rng);
            if probs.k1 == 0.0 {
                continue;
            }
            let sol = solve_lfp(&build_lfp(&probs, 4).unwrap()).unwrap();
            let diag = sol.lp.unwrap();
            assert!(
                (diag.lp_objective - sol.mu).abs() < 1e-6,
                "lp {} vs chain {}",
                diag.lp_objective,
                sol.mu
            );
        }
    }

    #[test]
    fn grid_budget_is_enforced() {
        let probs = fixed_probs();
        assert_eq!(
            brute_force_policy(&probs, 12, 0.01),
            Err(OptimizeError::GridTooLarge)
        );
        // Q = 1 grid is a single evaluation regardless of step.
        let sol = brute_force_policy(&probs, 1, 0.001).unwrap();
        assert_eq!(sol.policy.alphas(), &[1.0, 0.0]);
    }

    #[test]
    fn rejects_invalid_probabilities() {
        let probs = ModeProbabilities {
            k1: 0.5,
            k2: 0.5,
            k3: 0.5,
            p_rf: 0.0,
            p_df_total: 0.0,
            p_df_only: 0.0,
        };
        assert!(matches!(
            build_lfp(&probs, 3),
            Err(OptimizeError::InvalidProbs(_))
        ));
    }
}
