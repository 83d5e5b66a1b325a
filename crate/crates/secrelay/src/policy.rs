//! Per-slot indicators, mode selection, and queue transitions.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::rates::SecrecySnapshot;

/// The five feasibility indicators plus the combined RF-FD indicator.
///
/// Each flag is true iff the corresponding secrecy rate meets the target
/// `rate_s` (inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Indicators {
    /// RF-FD source-message bound meets the target.
    pub s1: bool,
    /// RF-FD relay-message bound meets the target.
    pub s2: bool,
    /// DF-FD end-to-end secrecy rate meets the target.
    pub s3: bool,
    /// HD source→relay secrecy rate meets the target.
    pub s4: bool,
    /// HD relay→destination secrecy rate meets the target.
    pub s5: bool,
    /// RF-FD feasible: `s1 && s2` (plus the sum condition when strict).
    pub s_star: bool,
}

/// Evaluates all indicators against the target secrecy rate.
///
/// With `strict_region` set, RF-FD feasibility additionally requires the
/// sum-rate bound to support both messages (`sec_sum_fd_bound ≥ 2·rate_s`);
/// by default only the two per-message bounds gate it.
pub fn indicators(snapshot: &SecrecySnapshot, rate_s: f64, strict_region: bool) -> Indicators {
    let s1 = snapshot.sec_ar_fd_bound >= rate_s;
    let s2 = snapshot.sec_rb_fd_bound >= rate_s;
    let mut s_star = s1 && s2;
    if strict_region {
        s_star = s_star && snapshot.sec_sum_fd_bound >= 2.0 * rate_s;
    }
    Indicators {
        s1,
        s2,
        s3: snapshot.sec_ab_df >= rate_s,
        s4: snapshot.sec_ar_hd >= rate_s,
        s5: snapshot.sec_rb_hd >= rate_s,
        s_star,
    }
}

/// Which full-duplex modes a scheme variant is allowed to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndicatorMask {
    /// RF-FD permitted (cleared forces `s_star` to 0).
    pub allow_rf_fd: bool,
    /// DF-FD permitted (cleared forces `s3` to 0).
    pub allow_df_fd: bool,
}

impl IndicatorMask {
    /// No restriction.
    pub const ALL: IndicatorMask = IndicatorMask {
        allow_rf_fd: true,
        allow_df_fd: true,
    };

    /// Clears the indicators of forbidden modes; `s1`, `s2` are left intact
    /// (nothing downstream reads them once `s_star` is fixed).
    pub fn apply(&self, ind: Indicators) -> Indicators {
        Indicators {
            s_star: ind.s_star && self.allow_rf_fd,
            s3: ind.s3 && self.allow_df_fd,
            ..ind
        }
    }
}

/// What the relay does with the slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Mode {
    /// Relay forwards a buffered packet while decoding a fresh one.
    RfFd,
    /// Relay decodes and forwards the same packet within the slot.
    DfFd,
    /// Source transmits; relay stores.
    HdAToR,
    /// Relay forwards a buffered packet; source silent.
    HdRToB,
    /// Nobody transmits.
    Idle,
}

impl Mode {
    /// All modes, in reporting order.
    pub const ALL: [Mode; 5] = [
        Mode::RfFd,
        Mode::DfFd,
        Mode::HdAToR,
        Mode::HdRToB,
        Mode::Idle,
    ];

    /// Stable uppercase name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            Mode::RfFd => "RF_FD",
            Mode::DfFd => "DF_FD",
            Mode::HdAToR => "HD_A_TO_R",
            Mode::HdRToB => "HD_R_TO_B",
            Mode::Idle => "IDLE",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Invalid tie-break vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicyError {
    /// Fewer than two entries (the capacity would be zero).
    TooShort,
    /// `alphas[0]` must be exactly 1.
    FirstNotOne,
    /// `alphas[Q]` must be exactly 0.
    LastNotZero,
    /// An interior entry is outside `[0, 1]` (or NaN).
    OutOfRange(usize),
}

impl fmt::Display for PolicyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyError::TooShort => write!(f, "policy needs at least two tie-break entries"),
            PolicyError::FirstNotOne => write!(f, "alpha_0 must equal 1"),
            PolicyError::LastNotZero => write!(f, "alpha_Q must equal 0"),
            PolicyError::OutOfRange(n) => write!(f, "alpha_{n} outside [0, 1]"),
        }
    }
}

impl core::error::Error for PolicyError {}

/// The tie-break policy: when both HD modes are feasible and the buffer holds
/// `n` packets, the source transmits (store) with probability `alphas[n]`,
/// otherwise the relay forwards.
///
/// The boundary entries are forced: an empty buffer can only store
/// (`alpha_0 = 1`) and a full one can only forward (`alpha_Q = 0`).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct QueuePolicy {
    alphas: Vec<f64>,
}

impl QueuePolicy {
    /// Validates and wraps a tie-break vector `α₀…α_Q` (length Q+1).
    pub fn new(alphas: Vec<f64>) -> Result<QueuePolicy, PolicyError> {
        if alphas.len() < 2 {
            return Err(PolicyError::TooShort);
        }
        if alphas[0] != 1.0 {
            return Err(PolicyError::FirstNotOne);
        }
        if *alphas.last().unwrap() != 0.0 {
            return Err(PolicyError::LastNotZero);
        }
        for (n, &a) in alphas.iter().enumerate() {
            if !(0.0..=1.0).contains(&a) {
                return Err(PolicyError::OutOfRange(n));
            }
        }
        Ok(QueuePolicy { alphas })
    }

    /// Policy with every interior tie-break probability equal to `alpha`.
    pub fn constant(cap_q: usize, alpha: f64) -> Result<QueuePolicy, PolicyError> {
        if cap_q < 1 {
            return Err(PolicyError::TooShort);
        }
        let mut alphas = vec![alpha; cap_q + 1];
        alphas[0] = 1.0;
        alphas[cap_q] = 0.0;
        QueuePolicy::new(alphas)
    }

    /// Buffer capacity Q.
    pub fn cap_q(&self) -> usize {
        self.alphas.len() - 1
    }

    /// Tie-break probability at occupancy `n`.
    pub fn alpha(&self, n: usize) -> f64 {
        self.alphas[n]
    }

    /// The full vector `α₀…α_Q`.
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }
}

/// Picks the slot's transmission mode from the masked indicators, the current
/// buffer occupancy, and the tie-break sample `u ∈ [0, 1)`.
///
/// Priority with a non-empty buffer: RF-FD, then DF-FD, then the HD modes
/// resolved by feasibility and the tie-break policy. With an empty buffer
/// only DF-FD or storing are possible; storing happens on `s4` in exactly the
/// slots where a non-empty buffer would also have moved upward (`s_star` and
/// `s3` both clear) — see the note below.
///
/// Boundary handling beyond the priority list: a full buffer cannot store, so
/// the (`s4`, not `s5`) case idles at `queue = Q`, and the tie case there
/// always forwards because `alpha_Q = 0`.
pub fn select_mode(ind: &Indicators, queue: usize, policy: &QueuePolicy, u: f64) -> Mode {
    let cap = policy.cap_q();
    debug_assert!(queue <= cap, "queue {queue} exceeds capacity {cap}");
    if queue > 0 {
        if ind.s_star {
            Mode::RfFd
        } else if ind.s3 {
            Mode::DfFd
        } else {
            match (ind.s4, ind.s5) {
                (true, false) => {
                    if queue < cap {
                        Mode::HdAToR
                    } else {
                        Mode::Idle
                    }
                }
                (false, true) => Mode::HdRToB,
                (true, true) => {
                    if u < policy.alpha(queue) {
                        Mode::HdAToR
                    } else {
                        Mode::HdRToB
                    }
                }
                (false, false) => Mode::Idle,
            }
        }
    } else {
        // Empty buffer. The up-transition probability of the occupancy chain
        // is k1·α₀ + k3 at state 0 like everywhere else, i.e. it excludes
        // slots where a full-duplex mode is feasible; gating the store on
        // `!s_star` keeps the simulated dynamics identical to that chain.
        // (An RF-FD-feasible slot with an empty buffer has nothing to
        // forward, so it idles unless DF-FD or storing applies.)
        if ind.s3 {
            Mode::DfFd
        } else if !ind.s_star && ind.s4 {
            Mode::HdAToR
        } else {
            Mode::Idle
        }
    }
}

/// Applies the queue/delivery effect of a mode.
///
/// Returns the new occupancy and whether a packet reached the destination
/// this slot. Both full-duplex modes deliver exactly one packet and leave the
/// occupancy unchanged; storing raises it, forwarding lowers it.
pub fn apply_mode(queue: usize, mode: Mode) -> (usize, bool) {
    match mode {
        Mode::RfFd => {
            debug_assert!(queue > 0, "RF-FD forwards from an empty buffer");
            (queue, true)
        }
        Mode::DfFd => (queue, true),
        Mode::HdAToR => (queue + 1, false),
        Mode::HdRToB => {
            debug_assert!(queue > 0, "forwarding from an empty buffer");
            (queue - 1, true)
        }
        Mode::Idle => (queue, false),
    }
}
