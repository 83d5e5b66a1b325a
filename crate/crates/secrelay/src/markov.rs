//! Stationary analysis of the relay buffer occupancy chain.
//!
//! Under i.i.d. block fading the buffer occupancy is a birth-death Markov
//! chain on `0…Q`: it moves up when the slot stores a packet, down when the
//! slot forwards one, and holds otherwise. The chain's rates depend on the
//! channel statistics only through six event probabilities, and its
//! stationary distribution has a closed product form, giving the average
//! secure end-to-end throughput exactly.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::policy::QueuePolicy;

/// The six indicator-event probabilities driving the occupancy chain.
///
/// `k1`, `k2`, `k3` condition on neither full-duplex mode being feasible
/// (`S★ = 0`, `S₃ = 0`) and split by which half-duplex links clear the
/// target: both (`k1`, the tie case), forward-only (`k2`), store-only
/// (`k3`). `p_rf = Pr{S★=1}`, `p_df_total = Pr{S₃=1}`, and
/// `p_df_only = Pr{S★=0, S₃=1}` — the slots where DF-FD is feasible but
/// RF-FD is not.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ModeProbabilities {
    /// Pr{S★=0, S₃=0, S₄=1, S₅=1}.
    pub k1: f64,
    /// Pr{S★=0, S₃=0, S₄=0, S₅=1}.
    pub k2: f64,
    /// Pr{S★=0, S₃=0, S₄=1, S₅=0}.
    pub k3: f64,
    /// Pr{S★=1}.
    pub p_rf: f64,
    /// Pr{S₃=1}.
    pub p_df_total: f64,
    /// Pr{S★=0, S₃=1}.
    pub p_df_only: f64,
}

/// Invalid or non-ergodic chain input.
#[derive(Debug, Clone, PartialEq)]
pub enum MarkovError {
    /// A probability field violates its bounds or a joint constraint.
    InvalidProbabilities(&'static str),
    /// `up` and `down` have different lengths.
    DimensionMismatch,
    /// States above `state` can be entered but never left downward.
    Absorbing {
        /// Lowest state of the absorbing set.
        state: usize,
    },
    /// No flow in either direction across the cut below `state`.
    Reducible {
        /// Lowest unreachable state.
        state: usize,
    },
}

impl fmt::Display for MarkovError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarkovError::InvalidProbabilities(what) => {
                write!(f, "invalid mode probabilities: {what}")
            }
            MarkovError::DimensionMismatch => {
                write!(f, "up/down transition vectors differ in length")
            }
            MarkovError::Absorbing { state } => {
                write!(f, "states ≥ {state} are absorbing (no downward flow)")
            }
            MarkovError::Reducible { state } => {
                write!(
                    f,
                    "chain is reducible at state {state} (no flow across cut)"
                )
            }
        }
    }
}

impl core::error::Error for MarkovError {}

impl ModeProbabilities {
    /// Checks range and joint-consistency invariants.
    ///
    /// The slack absorbs rounding in probabilities assembled from floats;
    /// count-derived estimates satisfy the constraints exactly.
    pub fn validate(&self) -> Result<(), MarkovError> {
        const EPS: f64 = 1e-9;
        let fields = [
            (self.k1, "k1"),
            (self.k2, "k2"),
            (self.k3, "k3"),
            (self.p_rf, "p_rf"),
            (self.p_df_total, "p_df_total"),
            (self.p_df_only, "p_df_only"),
        ];
        for (v, name) in fields {
            if !(v.is_finite() && (-EPS..=1.0 + EPS).contains(&v)) {
                return Err(MarkovError::InvalidProbabilities(name));
            }
        }
        if self.k1 + self.k2 + self.k3 > 1.0 + EPS {
            return Err(MarkovError::InvalidProbabilities("k1 + k2 + k3 > 1"));
        }
        if self.p_df_only > self.p_df_total + EPS {
            return Err(MarkovError::InvalidProbabilities("p_df_only > p_df_total"));
        }
        // p_df_total − p_rf − p_df_only = −Pr{S★=1, S₃=0} ∈ [−p_rf, 0].
        let diff = self.p_df_total - self.p_rf - self.p_df_only;
        if diff > EPS || diff < -self.p_rf - EPS {
            return Err(MarkovError::InvalidProbabilities(
                "p_df_total − p_rf − p_df_only outside [−p_rf, 0]",
            ));
        }
        Ok(())
    }
}

/// Birth-death rates of the occupancy chain under a tie-break policy.
///
/// Returns `(up, down)`, both of length Q: `up[n]` is the probability of
/// `n → n+1` (defined for `0 ≤ n < Q`), and `down[n]` the probability of
/// `n+1 → n` (so `down[n]` holds what the analysis calls `b_{n+1}`).
pub fn transition_probs(probs: &ModeProbabilities, policy: &QueuePolicy) -> (Vec<f64>, Vec<f64>) {
    let q = policy.cap_q();
    let mut up = vec![0.0; q];
    let mut down = vec![0.0; q];
    for n in 0..q {
        up[n] = probs.k1 * policy.alpha(n) + probs.k3;
        down[n] = probs.k1 * (1.0 - policy.alpha(n + 1)) + probs.k2;
    }
    (up, down)
}

/// Stationary occupancy distribution `ζ₀…ζ_Q`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct StationaryDistribution {
    /// Probability of each occupancy state, summing to 1.
    pub zeta: Vec<f64>,
}

/// Solves the chain's balance equations in product form:
/// `ζₙ = ζ₀·Π_{m<n} up[m]/down[m]`, normalized.
///
/// Rejects non-ergodic inputs: a cut with downward probability zero makes
/// the states above it absorbing (if anything flows up) or unreachable
/// (if nothing flows either way); the analysis assumes neither.
pub fn stationary(up: &[f64], down: &[f64]) -> Result<StationaryDistribution, MarkovError> {
    if up.len() != down.len() {
        return Err(MarkovError::DimensionMismatch);
    }
    let q = up.len();
    for n in 0..q {
        if down[n] == 0.0 {
            return if up[n] > 0.0 {
                Err(MarkovError::Absorbing { state: n + 1 })
            } else {
                Err(MarkovError::Reducible { state: n + 1 })
            };
        }
    }
    // Direct ratio products are exact and cheap for short chains; long chains
    // (or extreme ratios that overflow the direct form) go through log space.
    let zeta = if q <= 64 {
        direct_product(up, down).unwrap_or_else(|| log_space_product(up, down))
    } else {
        log_space_product(up, down)
    };
    Ok(StationaryDistribution { zeta })
}

fn direct_product(up: &[f64], down: &[f64]) -> Option<Vec<f64>> {
    let states = up.len() + 1;
    let mut w = vec![0.0; states];
    w[0] = 1.0;
    for n in 1..states {
        w[n] = w[n - 1] * up[n - 1] / down[n - 1];
    }
    let total: f64 = w.iter().sum();
    if !total.is_finite() {
        return None;
    }
    for x in w.iter_mut() {
        *x /= total;
    }
    Some(w)
}

fn log_space_product(up: &[f64], down: &[f64]) -> Vec<f64> {
    let states = up.len() + 1;
    let mut logw = vec![f64::NEG_INFINITY; states];
    logw[0] = 0.0;
    let mut acc = 0.0;
    for n in 1..states {
        if up[n - 1] == 0.0 {
            break; // everything above stays at weight zero
        }
        acc += libm::log(up[n - 1]) - libm::log(down[n - 1]);
        logw[n] = acc;
    }
    let peak = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut w = vec![0.0; states];
    let mut total = 0.0;
    for n in 0..states {
        if logw[n] > f64::NEG_INFINITY {
            w[n] = libm::exp(logw[n] - peak);
            total += w[n];
        }
    }
    for x in w.iter_mut() {
        *x /= total;
    }
    w
}

/// Average secure end-to-end throughput in packets per slot.
///
/// Every slot in RF-FD or DF-FD delivers a packet, as does every downward
/// queue transition; at an empty queue only DF-FD can deliver, which the
/// `ζ₀` correction accounts for:
/// `μ = Σₙ down[n−1]·ζₙ + p_rf + p_df_only + (p_df_total − p_rf − p_df_only)·ζ₀`.
pub fn throughput(zeta: &StationaryDistribution, down: &[f64], probs: &ModeProbabilities) -> f64 {
    let z = &zeta.zeta;
    debug_assert_eq!(z.len(), down.len() + 1);
    let mut mu = probs.p_rf + probs.p_df_only;
    mu += (probs.p_df_total - probs.p_rf - probs.p_df_only) * z[0];
    for n in 1..z.len() {
        mu += down[n - 1] * z[n];
    }
    mu
}

/// Full analysis pipeline for one policy: transition rates → stationary
/// distribution → throughput.
pub fn policy_throughput(
    probs: &ModeProbabilities,
    policy: &QueuePolicy,
) -> Result<f64, MarkovError> {
    let (up, down) = transition_probs(probs, policy);
    let zeta = stationary(&up, &down)?;
    Ok(throughput(&zeta, &down, probs))
}
