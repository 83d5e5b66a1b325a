//! Per-slot achievable and secrecy rates for all transmission modes.
//!
//! Three modes exist. In randomize-and-forward full-duplex (RF-FD) the relay
//! forwards a previously buffered packet while decoding a fresh one, and the
//! eavesdropper must decode the two superimposed signals separately. In
//! decode-and-forward full-duplex (DF-FD) the relay forwards the packet it is
//! currently decoding, so the eavesdropper observes a two-tap intersymbol
//! channel across the codeword. The half-duplex (HD) modes use one link per
//! slot. All rates are in bits/sec/Hz.

use crate::channel::{compute_sinrs, ChannelDraw, SinrSet, SystemParams};

/// Every per-slot rate the mode-selection rule consults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecySnapshot {
    /// Relay decode rate under full-duplex self-interference.
    pub r_ar_fd: f64,
    /// Relay decode rate with the relay silent.
    pub r_ar_hd: f64,
    /// Destination decode rate.
    pub r_rb: f64,
    /// Eavesdropper rate on the source signal, relay signal as noise.
    pub r_ae_fd: f64,
    /// Eavesdropper rate on the relay signal, source signal as noise.
    pub r_re_fd: f64,
    /// Eavesdropper sum rate when jointly decoding both signals.
    pub r_e_sum: f64,
    /// RF-FD secrecy bound for the source→relay message.
    pub sec_ar_fd_bound: f64,
    /// RF-FD secrecy bound for the relay→destination message.
    pub sec_rb_fd_bound: f64,
    /// RF-FD secrecy bound on the message-pair sum rate.
    pub sec_sum_fd_bound: f64,
    /// DF-FD end-to-end achievable rate (weaker hop binds).
    pub r_ab_df: f64,
    /// Eavesdropper rate on the DF-FD intersymbol channel.
    pub r_e_df: f64,
    /// DF-FD secrecy rate.
    pub sec_ab_df: f64,
    /// HD source→relay secrecy rate.
    pub sec_ar_hd: f64,
    /// HD relay→destination secrecy rate.
    pub sec_rb_hd: f64,
}

#[inline]
fn pos(x: f64) -> f64 {
    x.max(0.0)
}

#[inline]
fn rate(gamma: f64) -> f64 {
    libm::log2(1.0 + gamma)
}

/// The three RF-FD secrecy-region bounds: source message, relay message, and
/// the sum over both, each hinged at zero.
///
/// The sum bound charges the eavesdropper its joint decoding rate
/// `log₂(1 + γ_ae_hd + γ_re_hd)`, which is what she achieves when treating
/// neither signal as noise.
pub fn rf_fd_region(sinrs: &SinrSet) -> (f64, f64, f64) {
    let r_ar_fd = rate(sinrs.gamma_r_fd);
    let r_rb = rate(sinrs.gamma_rb);
    let r_ae_fd = rate(sinrs.gamma_ae_fd);
    let r_re_fd = rate(sinrs.gamma_re_fd);
    let r_e_sum = rate(sinrs.gamma_ae_hd + sinrs.gamma_re_hd);
    (
        pos(r_ar_fd - r_ae_fd),
        pos(r_rb - r_re_fd),
        pos(r_ar_fd + r_rb - r_e_sum),
    )
}

/// Eavesdropper rate over the DF-FD intersymbol channel:
/// `(1/B)·log₂ det(I_B + HᴴH/(κ_E·W))` for the (B+1)×B two-tap banded matrix
/// `H` with power-scaled taps `√p_a·h_ae` and `√p_r·h_re`.
///
/// `HᴴH` is tridiagonal with constant diagonal `1 + a + b` (after noise
/// normalization and adding the identity) and constant off-diagonal of
/// squared magnitude `a·b`, where `a = p_a|h_ae|²/(κ_E·W)` and
/// `b = p_r|h_re|²/(κ_E·W)`. The determinant follows the continuant
/// recurrence `D_k = d·D_{k−1} − ab·D_{k−2}`, evaluated through the pivot
/// ratios `r_k = D_k/D_{k−1} = d − ab/r_{k−1}`, which stay in
/// `[1 + max(a,b), d]` — so the recurrence is stable — while the running
/// product is flushed into a log₂ accumulator before it can overflow.
pub fn df_fd_eve_rate(draw: &ChannelDraw, params: &SystemParams) -> f64 {
    let noise = params.noise_e();
    let a = params.p_a * draw.h_ae.norm_sqr() / noise;
    let b = params.p_r * draw.h_re.norm_sqr() / noise;
    let d = 1.0 + a + b;
    let ab = a * b;
    let mut log2_det = 0.0;
    let mut partial = 1.0;
    let mut ratio = d;
    for _ in 0..params.codeword_len_b {
        partial *= ratio;
        if partial > 1e290 {
            log2_det += libm::log2(partial);
            partial = 1.0;
        }
        ratio = d - ab / ratio;
    }
    log2_det += libm::log2(partial);
    log2_det / params.codeword_len_b as f64
}

/// Computes the full per-slot rate snapshot for one channel realization.
pub fn secrecy_snapshot(draw: &ChannelDraw, params: &SystemParams) -> SecrecySnapshot {
    let sinrs = compute_sinrs(draw, params);
    let r_ar_fd = rate(sinrs.gamma_r_fd);
    let r_ar_hd = rate(sinrs.gamma_ar_hd);
    let r_rb = rate(sinrs.gamma_rb);
    let r_ae_fd = rate(sinrs.gamma_ae_fd);
    let r_re_fd = rate(sinrs.gamma_re_fd);
    let r_e_sum = rate(sinrs.gamma_ae_hd + sinrs.gamma_re_hd);
    let (sec_ar_fd_bound, sec_rb_fd_bound, sec_sum_fd_bound) = rf_fd_region(&sinrs);
    let r_ab_df = r_ar_fd.min(r_rb);
    let r_e_df = df_fd_eve_rate(draw, params);
    SecrecySnapshot {
        r_ar_fd,
        r_ar_hd,
        r_rb,
        r_ae_fd,
        r_re_fd,
        r_e_sum,
        sec_ar_fd_bound,
        sec_rb_fd_bound,
        sec_sum_fd_bound,
        r_ab_df,
        r_e_df,
        sec_ab_df: pos(r_ab_df - r_e_df),
        sec_ar_hd: pos(r_ar_hd - rate(sinrs.gamma_ae_hd)),
        sec_rb_hd: pos(r_rb - rate(sinrs.gamma_re_hd)),
    }
}
