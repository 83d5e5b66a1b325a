//! Monte Carlo estimation of the indicator-event probabilities.
//!
//! The occupancy-chain analysis needs six event probabilities; no closed
//! form exists for them (the DF-FD indicator involves the distribution of a
//! codeword-length log-determinant), so they are estimated by sampling
//! channel draws. The estimator keeps the full 16-cell joint histogram over
//! `(S★, S₃, S₄, S₅)` rather than the six aggregates: that lets one sampling
//! pass serve every scheme variant, since forbidding a full-duplex mode is a
//! re-binning of the joint cells, not a new experiment.

use core::fmt;

use crate::channel::{sample_channel_draw, SystemParams};
use crate::markov::ModeProbabilities;
use crate::policy::{indicators, IndicatorMask, Indicators};
use crate::rates::secrecy_snapshot;
use crate::rng::stream_rng;

/// Flat index of a joint indicator event.
#[inline]
pub fn event_cell_index(s_star: bool, s3: bool, s4: bool, s5: bool) -> usize {
    ((s_star as usize) << 3) | ((s3 as usize) << 2) | ((s4 as usize) << 1) | (s5 as usize)
}

/// Joint histogram of per-slot indicator events over a sampling run.
///
/// Cells are indexed by [`event_cell_index`]; they are disjoint and
/// exhaustive, so they always sum to `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventCounts {
    /// Occurrence count per joint indicator event.
    pub cells: [u64; 16],
    /// Total number of samples recorded.
    pub n: u64,
}

impl EventCounts {
    /// A histogram with nothing recorded.
    pub const fn empty() -> EventCounts {
        EventCounts {
            cells: [0; 16],
            n: 0,
        }
    }

    /// Records one slot's indicators.
    pub fn record(&mut self, ind: &Indicators) {
        self.cells[event_cell_index(ind.s_star, ind.s3, ind.s4, ind.s5)] += 1;
        self.n += 1;
    }

    /// Adds another histogram cell-wise. Order-independent, so parallel
    /// workers can be reduced in any order.
    pub fn merge(&mut self, other: &EventCounts) {
        for (c, o) in self.cells.iter_mut().zip(other.cells.iter()) {
            *c += o;
        }
        self.n += other.n;
    }

    /// Empirical joint probability mass function.
    pub fn pmf(&self) -> [f64; 16] {
        let n = self.n as f64;
        let mut out = [0.0; 16];
        for (o, &c) in out.iter_mut().zip(self.cells.iter()) {
            *o = c as f64 / n;
        }
        out
    }

    /// Aggregates the six chain-driving probabilities under a variant mask.
    ///
    /// Masking clears `S★` and/or `S₃` cell-wise before aggregating, which
    /// is exactly what running the restricted scheme on the same draws would
    /// have produced.
    pub fn mode_probs(&self, mask: IndicatorMask) -> ModeProbabilities {
        let mut masked = [0.0f64; 16];
        let n = self.n as f64;
        for (idx, &c) in self.cells.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let s_star = (idx & 8 != 0) && mask.allow_rf_fd;
            let s3 = (idx & 4 != 0) && mask.allow_df_fd;
            masked[event_cell_index(s_star, s3, idx & 2 != 0, idx & 1 != 0)] += c as f64 / n;
        }
        mode_probs_from_pmf(&masked)
    }
}

/// Aggregates a joint pmf over `(S★, S₃, S₄, S₅)` into the six
/// chain-driving probabilities.
pub fn mode_probs_from_pmf(cells: &[f64; 16]) -> ModeProbabilities {
    let mut probs = ModeProbabilities {
        k1: 0.0,
        k2: 0.0,
        k3: 0.0,
        p_rf: 0.0,
        p_df_total: 0.0,
        p_df_only: 0.0,
    };
    for (idx, &mass) in cells.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let s_star = idx & 8 != 0;
        let s3 = idx & 4 != 0;
        let s4 = idx & 2 != 0;
        let s5 = idx & 1 != 0;
        if s_star {
            probs.p_rf += mass;
        }
        if s3 {
            probs.p_df_total += mass;
            if !s_star {
                probs.p_df_only += mass;
            }
        }
        if !s_star && !s3 {
            match (s4, s5) {
                (true, true) => probs.k1 += mass,
                (false, true) => probs.k2 += mass,
                (true, false) => probs.k3 += mass,
                (false, false) => {}
            }
        }
    }
    probs
}

/// Samples `n_samples` independent slots and histograms their indicator
/// events.
///
/// The work is split over `n_workers` logical streams of the seed: worker
/// `w` owns `stream_rng(seed, w)` and an equal share of the samples (the
/// first `n_samples mod n_workers` workers take one extra). The result is
/// identical whether the streams run sequentially or in parallel, but it
/// does depend on `n_workers`; callers wanting bitwise-stable output across
/// machines should fix the worker count (the default everywhere is 1).
pub fn count_events(
    params: &SystemParams,
    n_samples: u64,
    seed: u64,
    strict_region: bool,
    n_workers: u32,
) -> EventCounts {
    let workers = n_workers.max(1) as u64;
    let mut total = EventCounts::empty();
    for w in 0..workers {
        let share = n_samples / workers + u64::from(w < n_samples % workers);
        let part = count_events_stream(params, share, seed, w, strict_region);
        total.merge(&part);
    }
    total
}

/// One worker's share of [`count_events`]: `n_samples` draws from stream
/// `stream` of `seed`.
pub fn count_events_stream(
    params: &SystemParams,
    n_samples: u64,
    seed: u64,
    stream: u64,
    strict_region: bool,
) -> EventCounts {
    let mut rng = stream_rng(seed, stream);
    let mut counts = EventCounts::empty();
    for _ in 0..n_samples {
        let draw = sample_channel_draw(&mut rng, params);
        let snap = secrecy_snapshot(&draw, params);
        let ind = indicators(&snap, params.rate_s, strict_region);
        counts.record(&ind);
    }
    counts
}

/// Per-field binomial standard errors of a [`ModeProbabilities`] estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ProbStderr {
    /// Standard error of `k1`.
    pub k1: f64,
    /// Standard error of `k2`.
    pub k2: f64,
    /// Standard error of `k3`.
    pub k3: f64,
    /// Standard error of `p_rf`.
    pub p_rf: f64,
    /// Standard error of `p_df_total`.
    pub p_df_total: f64,
    /// Standard error of `p_df_only`.
    pub p_df_only: f64,
}

/// An estimated [`ModeProbabilities`] with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ProbEstimate {
    /// The estimated event probabilities.
    pub probs: ModeProbabilities,
    /// Binomial standard error `√(p(1−p)/n)` per field.
    pub stderr: ProbStderr,
    /// Number of Monte Carlo samples behind the estimate.
    pub n_samples: u64,
}

impl fmt::Display for ProbEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k1={:.5}±{:.5} k2={:.5}±{:.5} k3={:.5}±{:.5} p_rf={:.5}±{:.5} \
             p_df_total={:.5}±{:.5} p_df_only={:.5}±{:.5} (n={})",
            self.probs.k1,
            self.stderr.k1,
            self.probs.k2,
            self.stderr.k2,
            self.probs.k3,
            self.stderr.k3,
            self.probs.p_rf,
            self.stderr.p_rf,
            self.probs.p_df_total,
            self.stderr.p_df_total,
            self.probs.p_df_only,
            self.stderr.p_df_only,
            self.n_samples,
        )
    }
}

impl ProbEstimate {
    /// Aggregates a histogram under a variant mask and attaches standard
    /// errors.
    pub fn from_counts(counts: &EventCounts, mask: IndicatorMask) -> ProbEstimate {
        let probs = counts.mode_probs(mask);
        let n = counts.n as f64;
        let se = |p: f64| libm::sqrt(p * (1.0 - p) / n);
        ProbEstimate {
            probs,
            stderr: ProbStderr {
                k1: se(probs.k1),
                k2: se(probs.k2),
                k3: se(probs.k3),
                p_rf: se(probs.p_rf),
                p_df_total: se(probs.p_df_total),
                p_df_only: se(probs.p_df_only),
            },
            n_samples: counts.n,
        }
    }
}

/// Estimates the six event probabilities of the unrestricted scheme with the
/// default (non-strict) RF-FD feasibility rule and a single sampling stream.
pub fn estimate_mode_probs(params: &SystemParams, n_samples: u64, seed: u64) -> ProbEstimate {
    let counts = count_events(params, n_samples, seed, false, 1);
    ProbEstimate::from_counts(&counts, IndicatorMask::ALL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_partition_the_sample() {
        let params = SystemParams::default();
        let counts = count_events(&params, 5_000, 8, false, 1);
        assert_eq!(counts.cells.iter().sum::<u64>(), counts.n);
        assert_eq!(counts.n, 5_000);

        // The six aggregate events plus the all-infeasible cell cover
        // everything exactly once.
        let probs = counts.mode_probs(IndicatorMask::ALL);
        let idle_mass = counts.pmf()[event_cell_index(false, false, false, false)];
        let total = probs.k1 + probs.k2 + probs.k3 + probs.p_rf + probs.p_df_only + idle_mass;
        assert!((total - 1.0).abs() < 1e-12);
        assert!(probs.p_df_total - probs.p_df_only <= probs.p_rf + 1e-12);
        probs.validate().unwrap();
    }

    #[test]
    fn estimates_are_deterministic_per_seed() {
        let params = SystemParams::default();
        let a = estimate_mode_probs(&params, 3_000, 123);
        let b = estimate_mode_probs(&params, 3_000, 123);
        assert_eq!(a, b);
        let c = estimate_mode_probs(&params, 3_000, 124);
        assert_ne!(a.probs, c.probs);
    }

    #[test]
    fn worker_split_merges_to_the_same_histogram() {
        let params = SystemParams::default();
        let combined = count_events(&params, 5_001, 99, false, 2);
        let mut manual = count_events_stream(&params, 2_501, 99, 0, false);
        manual.merge(&count_events_stream(&params, 2_500, 99, 1, false));
        assert_eq!(combined, manual);
    }

    #[test]
    fn no_eavesdropper_makes_df_almost_sure() {
        let params = SystemParams {
            var_ae: 0.0,
            var_re: 0.0,
            rate_s: 1e-9,
            ..Default::default()
        };
        let est = estimate_mode_probs(&params, 2_000, 5);
        assert!(est.probs.p_df_total > 0.99);
    }

    #[test]
    fn silent_source_kills_source_side_events() {
        let params = SystemParams {
            p_a: 0.0,
            ..Default::default()
        };
        let est = estimate_mode_probs(&params, 2_000, 6);
        assert_eq!(est.probs.k1, 0.0);
        assert_eq!(est.probs.k3, 0.0);
        assert_eq!(est.probs.p_rf, 0.0);
        assert_eq!(est.probs.p_df_total, 0.0);
        // The relay→destination link still clears on its own.
        assert!(est.probs.k2 > 0.0);
    }

    #[test]
    fn two_seeds_agree_within_joint_standard_errors() {
        let params = SystemParams::default();
        let n = 100_000;
        let a = estimate_mode_probs(&params, n, 1);
        let b = estimate_mode_probs(&params, n, 2);
        let checks = [
            (a.probs.k1, a.stderr.k1, b.probs.k1, b.stderr.k1, "k1"),
            (a.probs.k2, a.stderr.k2, b.probs.k2, b.stderr.k2, "k2"),
            (a.probs.k3, a.stderr.k3, b.probs.k3, b.stderr.k3, "k3"),
            (
                a.probs.p_rf,
                a.stderr.p_rf,
                b.probs.p_rf,
                b.stderr.p_rf,
                "p_rf",
            ),
            (
                a.probs.p_df_total,
                a.stderr.p_df_total,
                b.probs.p_df_total,
                b.stderr.p_df_total,
                "p_df_total",
            ),
            (
                a.probs.p_df_only,
                a.stderr.p_df_only,
                b.probs.p_df_only,
                b.stderr.p_df_only,
                "p_df_only",
            ),
        ];
        for (pa, sa, pb, sb, name) in checks {
            let joint = libm::sqrt(sa * sa + sb * sb);
            assert!(
                (pa - pb).abs() <= 4.0 * joint,
                "{name}: {pa} vs {pb}, joint SE {joint}"
            );
        }
    }

    #[test]
    fn masking_rebins_instead_of_discarding() {
        let params = SystemParams::default();
        let counts = count_events(&params, 20_000, 77, false, 1);
        let open = counts.mode_probs(IndicatorMask::ALL);
        let no_df = counts.mode_probs(IndicatorMask {
            allow_rf_fd: true,
            allow_df_fd: false,
        });
        let hd_only = counts.mode_probs(IndicatorMask {
            allow_rf_fd: false,
            allow_df_fd: false,
        });
        assert_eq!(no_df.p_df_total, 0.0);
        assert_eq!(no_df.p_df_only, 0.0);
        assert_eq!(no_df.p_rf, open.p_rf);
        assert_eq!(hd_only.p_rf, 0.0);
        assert_eq!(hd_only.p_df_total, 0.0);
        // Forbidding modes can only grow the half-duplex event masses.
        assert!(no_df.k1 >= open.k1);
        assert!(hd_only.k1 >= no_df.k1);
        assert!(hd_only.k2 >= open.k2);
        assert!(hd_only.k3 >= open.k3);
        for p in [&no_df, &hd_only] {
            p.validate().unwrap();
        }
    }

    #[test]
    fn strict_region_only_shrinks_rf_mass() {
        let params = SystemParams::default();
        let loose = count_events(&params, 20_000, 55, false, 1).mode_probs(IndicatorMask::ALL);
        let strict = count_events(&params, 20_000, 55, true, 1).mode_probs(IndicatorMask::ALL);
        assert!(strict.p_rf <= loose.p_rf);
        assert_eq!(strict.p_df_total, loose.p_df_total);
        assert!(strict.p_df_only >= loose.p_df_only);
    }
}
