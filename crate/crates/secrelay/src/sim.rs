//! Slot-level Monte Carlo simulation of the relaying schemes.
//!
//! The simulator runs the actual per-slot decision loop — sample a channel
//! draw, evaluate the indicators, pick a mode, move the buffer — and reports
//! the empirical delivery rate alongside occupancy and mode histograms. Its
//! whole purpose is cross-validation: the same dynamics are predicted
//! analytically by [`crate::markov`], and the two must agree within Monte
//! Carlo error.

use alloc::vec;
use alloc::vec::Vec;

use crate::channel::{sample_channel_draw, SystemParams};
use crate::markov::{policy_throughput, MarkovError, ModeProbabilities};
use crate::montecarlo::count_events;
use crate::policy::{apply_mode, indicators, select_mode, IndicatorMask, Mode, QueuePolicy};
use crate::rates::secrecy_snapshot;
use crate::rng::{derive_seed, stream_rng, unit_uniform};

/// Which relaying scheme a run simulates.
///
/// Variants differ only in which full-duplex opportunities they are allowed
/// to use; the secrecy conditions themselves are evaluated identically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SchemeVariant {
    /// The full hybrid scheme: both FD modes plus buffered HD modes.
    Proposed,
    /// Conventional unbuffered FD relaying: transmit only when same-slot
    /// decode-and-forward is secure, never store.
    BufferlessFd,
    /// Buffer-aided hybrid without the DF-FD mode.
    NoDfFd,
    /// Buffer-aided half-duplex only: no FD modes at all.
    HdOnly,
}

impl SchemeVariant {
    /// All variants, in reporting order.
    pub const ALL: [SchemeVariant; 4] = [
        SchemeVariant::Proposed,
        SchemeVariant::BufferlessFd,
        SchemeVariant::NoDfFd,
        SchemeVariant::HdOnly,
    ];

    /// The indicator mask implementing this variant's mode restrictions.
    pub fn mask(&self) -> IndicatorMask {
        match self {
            SchemeVariant::Proposed => IndicatorMask {
                allow_rf_fd: true,
                allow_df_fd: true,
            },
            SchemeVariant::BufferlessFd => IndicatorMask {
                allow_rf_fd: false,
                allow_df_fd: true,
            },
            SchemeVariant::NoDfFd => IndicatorMask {
                allow_rf_fd: true,
                allow_df_fd: false,
            },
            SchemeVariant::HdOnly => IndicatorMask {
                allow_rf_fd: false,
                allow_df_fd: false,
            },
        }
    }

    /// Stable kebab-case name used in reports and config files.
    pub fn name(&self) -> &'static str {
        match self {
            SchemeVariant::Proposed => "proposed",
            SchemeVariant::BufferlessFd => "bufferless-fd",
            SchemeVariant::NoDfFd => "no-df-fd",
            SchemeVariant::HdOnly => "hd-only",
        }
    }
}

impl core::fmt::Display for SchemeVariant {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-mode slot counts of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ModeCounts {
    /// Slots spent in RF-FD.
    pub rf_fd: u64,
    /// Slots spent in DF-FD.
    pub df_fd: u64,
    /// Slots spent receiving into the buffer.
    pub hd_a_to_r: u64,
    /// Slots spent forwarding from the buffer.
    pub hd_r_to_b: u64,
    /// Idle slots.
    pub idle: u64,
}

impl ModeCounts {
    fn record(&mut self, mode: Mode) {
        match mode {
            Mode::RfFd => self.rf_fd += 1,
            Mode::DfFd => self.df_fd += 1,
            Mode::HdAToR => self.hd_a_to_r += 1,
            Mode::HdRToB => self.hd_r_to_b += 1,
            Mode::Idle => self.idle += 1,
        }
    }

    /// Total slots accounted for.
    pub fn total(&self) -> u64 {
        self.rf_fd + self.df_fd + self.hd_a_to_r + self.hd_r_to_b + self.idle
    }
}

/// Outcome of a slot-level simulation run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SimReport {
    /// Delivered packets per slot.
    pub empirical_mu: f64,
    /// Slots observed at each occupancy 0…Q, recorded at slot start.
    pub queue_hist: Vec<u64>,
    /// Slots spent in each mode.
    pub mode_counts: ModeCounts,
    /// Number of simulated slots.
    pub n_slots: u64,
    /// Seed the run was started from.
    pub seed: u64,
}

/// Simulates `n_slots` slots of `variant` under `policy`.
///
/// Consumes exactly 11 uniforms per slot (ten for the channel draw, one for
/// the tie-break) regardless of variant or selected mode, so runs with the
/// same seed see identical channel realizations across variants. The
/// bufferless variant never touches the queue: it delivers exactly in the
/// slots where its masked DF-FD condition holds and idles otherwise.
pub fn run_slots(
    params: &SystemParams,
    policy: &QueuePolicy,
    variant: SchemeVariant,
    strict_region: bool,
    n_slots: u64,
    seed: u64,
) -> SimReport {
    let mask = variant.mask();
    let mut rng = stream_rng(seed, 0);
    let mut queue: usize = 0;
    let mut queue_hist = vec![0u64; policy.cap_q() + 1];
    let mut mode_counts = ModeCounts::default();
    let mut delivered: u64 = 0;

    for _ in 0..n_slots {
        let draw = sample_channel_draw(&mut rng, params);
        let u = unit_uniform(&mut rng);
        let snap = secrecy_snapshot(&draw, params);
        let ind = mask.apply(indicators(&snap, params.rate_s, strict_region));

        queue_hist[queue] += 1;
        let mode = if variant == SchemeVariant::BufferlessFd {
            if ind.s3 {
                Mode::DfFd
            } else {
                Mode::Idle
            }
        } else {
            select_mode(&ind, queue, policy, u)
        };
        mode_counts.record(mode);
        let (next, out) = apply_mode(queue, mode);
        queue = next;
        if out {
            delivered += 1;
        }
    }

    SimReport {
        empirical_mu: delivered as f64 / n_slots as f64,
        queue_hist,
        mode_counts,
        n_slots,
        seed,
    }
}

/// Analytic throughput of `variant` from mode probabilities already masked
/// for it.
///
/// The bufferless scheme has no chain: it delivers exactly when its DF-FD
/// condition holds, so its throughput is `p_df_total` under the variant
/// mask. All buffered variants go through the exact chain analysis.
pub fn analytic_mu(
    probs: &ModeProbabilities,
    policy: &QueuePolicy,
    variant: SchemeVariant,
) -> Result<f64, MarkovError> {
    if variant == SchemeVariant::BufferlessFd {
        probs.validate()?;
        return Ok(probs.p_df_total);
    }
    policy_throughput(probs, policy)
}

/// Side-by-side analytic and simulated throughput for one configuration.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ValidationReport {
    /// Chain-analysis throughput at probabilities estimated from `n_mc`
    /// independent draws.
    pub mu_analytic: f64,
    /// Empirical throughput of the slot simulation.
    pub mu_empirical: f64,
    /// `mu_empirical − mu_analytic`.
    pub gap: f64,
    /// Draws used for the probability estimate.
    pub n_mc: u64,
    /// The underlying simulation run.
    pub sim: SimReport,
}

/// Estimates mode probabilities, computes the chain throughput, runs the
/// slot simulator, and reports both numbers side by side.
///
/// The estimation and simulation phases use seeds derived from `seed` with
/// distinct tags, so their sample sets are independent.
pub fn validate_against_markov(
    params: &SystemParams,
    policy: &QueuePolicy,
    variant: SchemeVariant,
    strict_region: bool,
    n_mc: u64,
    n_slots: u64,
    seed: u64,
) -> Result<ValidationReport, MarkovError> {
    let counts = count_events(params, n_mc, derive_seed(seed, 0), strict_region, 1);
    let probs = counts.mode_probs(variant.mask());
    let mu_analytic = analytic_mu(&probs, policy, variant)?;
    let sim = run_slots(
        params,
        policy,
        variant,
        strict_region,
        n_slots,
        derive_seed(seed, 1),
    );
    Ok(ValidationReport {
        mu_analytic,
        mu_empirical: sim.empirical_mu,
        gap: sim.empirical_mu - mu_analytic,
        n_mc,
        sim,
    })
}
