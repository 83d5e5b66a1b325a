//! System parameters, block-fading channel sampling, and per-slot SINRs.

use core::fmt;

use num_complex::Complex64;
use rand_core::RngCore;

use crate::rng::unit_uniform;

/// All physical constants of the network.
///
/// Powers are in Watts, noise densities in Watts/Hz, bandwidth in Hz, the
/// slot length in seconds. Fading variances are dimensionless per-link
/// second moments of the complex coefficients; `var_rr` is the variance of
/// the residual self-interference channel left after cancellation at the
/// relay. `rate_s` is the target secrecy rate in bits/sec/Hz against which
/// the per-slot indicators are evaluated.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SystemParams {
    /// Source transmit power.
    pub p_a: f64,
    /// Relay transmit power.
    pub p_r: f64,
    /// Noise power spectral density at the relay.
    pub kappa_r: f64,
    /// Noise power spectral density at the destination.
    pub kappa_b: f64,
    /// Noise power spectral density at the eavesdropper.
    pub kappa_e: f64,
    /// Channel bandwidth.
    pub bandwidth_w: f64,
    /// Slot duration.
    pub slot_t: f64,
    /// Source→relay fading variance.
    pub var_ar: f64,
    /// Relay→destination fading variance.
    pub var_rb: f64,
    /// Source→eavesdropper fading variance.
    pub var_ae: f64,
    /// Relay→eavesdropper fading variance.
    pub var_re: f64,
    /// Residual self-interference variance at the relay.
    pub var_rr: f64,
    /// Maximum number of packets the relay buffer holds.
    pub buffer_cap_q: usize,
    /// Target secrecy rate, bits/sec/Hz.
    pub rate_s: f64,
    /// Codeword length in symbols; defaults to ⌊bandwidth_w · slot_t⌋.
    pub codeword_len_b: usize,
}

/// Parameter validation failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamError {
    /// A field that must be ≥ 0 (or > 0) violates its bound.
    OutOfRange(&'static str),
    /// A field is NaN or infinite.
    NonFinite(&'static str),
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::OutOfRange(name) => write!(f, "parameter `{name}` out of range"),
            ParamError::NonFinite(name) => write!(f, "parameter `{name}` is not finite"),
        }
    }
}

impl core::error::Error for ParamError {}

impl SystemParams {
    /// Codeword length implied by the bandwidth and slot duration.
    pub fn derived_codeword_len(bandwidth_w: f64, slot_t: f64) -> usize {
        libm::floor(bandwidth_w * slot_t) as usize
    }

    /// Noise power seen by the relay over the full bandwidth.
    pub fn noise_r(&self) -> f64 {
        self.kappa_r * self.bandwidth_w
    }

    /// Noise power seen by the destination over the full bandwidth.
    pub fn noise_b(&self) -> f64 {
        self.kappa_b * self.bandwidth_w
    }

    /// Noise power seen by the eavesdropper over the full bandwidth.
    pub fn noise_e(&self) -> f64 {
        self.kappa_e * self.bandwidth_w
    }

    /// Checks every invariant, naming the first offending field.
    pub fn validate(&self) -> Result<(), ParamError> {
        let finite = [
            (self.p_a, "p_a"),
            (self.p_r, "p_r"),
            (self.kappa_r, "kappa_r"),
            (self.kappa_b, "kappa_b"),
            (self.kappa_e, "kappa_e"),
            (self.bandwidth_w, "bandwidth_w"),
            (self.slot_t, "slot_t"),
            (self.var_ar, "var_ar"),
            (self.var_rb, "var_rb"),
            (self.var_ae, "var_ae"),
            (self.var_re, "var_re"),
            (self.var_rr, "var_rr"),
            (self.rate_s, "rate_s"),
        ];
        for (v, name) in finite {
            if !v.is_finite() {
                return Err(ParamError::NonFinite(name));
            }
        }
        let nonneg = [
            (self.p_a, "p_a"),
            (self.p_r, "p_r"),
            (self.kappa_r, "kappa_r"),
            (self.kappa_b, "kappa_b"),
            (self.kappa_e, "kappa_e"),
            (self.var_ar, "var_ar"),
            (self.var_rb, "var_rb"),
            (self.var_ae, "var_ae"),
            (self.var_re, "var_re"),
            (self.var_rr, "var_rr"),
        ];
        for (v, name) in nonneg {
            if v < 0.0 {
                return Err(ParamError::OutOfRange(name));
            }
        }
        if self.bandwidth_w <= 0.0 {
            return Err(ParamError::OutOfRange("bandwidth_w"));
        }
        if self.slot_t <= 0.0 {
            return Err(ParamError::OutOfRange("slot_t"));
        }
        if self.rate_s <= 0.0 {
            return Err(ParamError::OutOfRange("rate_s"));
        }
        if self.buffer_cap_q < 1 {
            return Err(ParamError::OutOfRange("buffer_cap_q"));
        }
        if self.codeword_len_b < 1 {
            return Err(ParamError::OutOfRange("codeword_len_b"));
        }
        Ok(())
    }
}

impl Default for SystemParams {
    /// The reference evaluation setup: transmit SNR P/(κW) = 10 dB on every
    /// link, unit fading variances, self-interference variance 0.1, a
    /// five-packet buffer, target secrecy rate 1 bit/sec/Hz, and a
    /// 1000-symbol codeword (1 MHz × 1 ms).
    fn default() -> Self {
        SystemParams {
            p_a: 10.0,
            p_r: 10.0,
            kappa_r: 1e-6,
            kappa_b: 1e-6,
            kappa_e: 1e-6,
            bandwidth_w: 1e6,
            slot_t: 1e-3,
            var_ar: 1.0,
            var_rb: 1.0,
            var_ae: 1.0,
            var_re: 1.0,
            var_rr: 0.1,
            buffer_cap_q: 5,
            rate_s: 1.0,
            codeword_len_b: 1000,
        }
    }
}

/// One slot's channel realization: the five complex coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    /// Source→relay.
    pub h_ar: Complex64,
    /// Relay→destination.
    pub h_rb: Complex64,
    /// Source→eavesdropper.
    pub h_ae: Complex64,
    /// Relay→eavesdropper.
    pub h_re: Complex64,
    /// Residual self-interference at the relay.
    pub h_rr: Complex64,
}

/// Every SINR the per-slot rates need, in both duplexing configurations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrSet {
    /// Relay receive SINR while it simultaneously transmits (full-duplex).
    pub gamma_r_fd: f64,
    /// Destination receive SNR.
    pub gamma_rb: f64,
    /// Relay receive SNR when the relay is silent (half-duplex).
    pub gamma_ar_hd: f64,
    /// Eavesdropper SNR on the source signal when only the source transmits.
    pub gamma_ae_hd: f64,
    /// Destination receive SNR in half-duplex; equals `gamma_rb`.
    pub gamma_rb_hd: f64,
    /// Eavesdropper SNR on the relay signal when only the relay transmits.
    pub gamma_re_hd: f64,
    /// Eavesdropper SINR on the source signal under simultaneous
    /// transmission, treating the relay signal as noise.
    pub gamma_ae_fd: f64,
    /// Eavesdropper SINR on the relay signal under simultaneous
    /// transmission, treating the source signal as noise.
    pub gamma_re_fd: f64,
}

/// One coefficient of a circularly-symmetric complex Gaussian with the given
/// variance, via the polar (Box–Muller) transform.
///
/// Consumes exactly two uniforms. `ln(1-u)` is safe: `u < 1` by construction
/// of [`unit_uniform`], and `var = 0` yields an exact zero.
fn sample_coeff<R: RngCore>(rng: &mut R, var: f64) -> Complex64 {
    let u1 = unit_uniform(rng);
    let u2 = unit_uniform(rng);
    let mag = libm::sqrt(-var * libm::log1p(-u1));
    let phase = core::f64::consts::TAU * u2;
    Complex64::new(mag * libm::cos(phase), mag * libm::sin(phase))
}

/// Draws one slot's fading realization.
///
/// Reproducibility contract: consumes exactly ten uniforms (two per
/// coefficient) in the fixed order `h_ar, h_rb, h_ae, h_re, h_rr`.
pub fn sample_channel_draw<R: RngCore>(rng: &mut R, params: &SystemParams) -> ChannelDraw {
    ChannelDraw {
        h_ar: sample_coeff(rng, params.var_ar),
        h_rb: sample_coeff(rng, params.var_rb),
        h_ae: sample_coeff(rng, params.var_ae),
        h_re: sample_coeff(rng, params.var_re),
        h_rr: sample_coeff(rng, params.var_rr),
    }
}

/// Computes all eight SINRs for one channel realization.
pub fn compute_sinrs(draw: &ChannelDraw, params: &SystemParams) -> SinrSet {
    let noise_r = params.noise_r();
    let noise_b = params.noise_b();
    let noise_e = params.noise_e();
    let g_ar = draw.h_ar.norm_sqr() * params.p_a;
    let g_rb = draw.h_rb.norm_sqr() * params.p_r;
    let g_ae = draw.h_ae.norm_sqr() * params.p_a;
    let g_re = draw.h_re.norm_sqr() * params.p_r;
    let g_rr = draw.h_rr.norm_sqr() * params.p_r;
    let gamma_rb = g_rb / noise_b;
    SinrSet {
        gamma_r_fd: g_ar / (g_rr + noise_r),
        gamma_rb,
        gamma_ar_hd: g_ar / noise_r,
        gamma_ae_hd: g_ae / noise_e,
        gamma_rb_hd: gamma_rb,
        gamma_re_hd: g_re / noise_e,
        gamma_ae_fd: g_ae / (g_re + noise_e),
        gamma_re_fd: g_re / (g_ae + noise_e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn default_params_validate_and_derive_codeword_len() {
        let p = SystemParams::default();
        p.validate().unwrap();
        assert_eq!(
            SystemParams::derived_codeword_len(p.bandwidth_w, p.slot_t),
            p.codeword_len_b
        );
    }

    #[test]
    fn validate_rejects_bad_fields() {
        let p = SystemParams {
            p_a: -1.0,
            ..Default::default()
        };
        assert_eq!(p.validate(), Err(ParamError::OutOfRange("p_a")));

        let p = SystemParams {
            rate_s: 0.0,
            ..Default::default()
        };
        assert_eq!(p.validate(), Err(ParamError::OutOfRange("rate_s")));

        let p = SystemParams {
            var_rr: f64::NAN,
            ..Default::default()
        };
        assert_eq!(p.validate(), Err(ParamError::NonFinite("var_rr")));

        let p = SystemParams {
            buffer_cap_q: 0,
            ..Default::default()
        };
        assert_eq!(p.validate(), Err(ParamError::OutOfRange("buffer_cap_q")));
    }

    #[test]
    fn zero_variance_gives_exact_zero_coefficient() {
        let params = SystemParams {
            var_ae: 0.0,
            ..Default::default()
        };
        let mut rng = stream_rng(1, 0);
        for _ in 0..100 {
            let d = sample_channel_draw(&mut rng, &params);
            assert_eq!(d.h_ae.norm_sqr(), 0.0);
        }
    }

    #[test]
    fn same_seed_fresh_streams_replay_identically() {
        let params = SystemParams::default();
        let mut a = stream_rng(99, 3);
        let mut b = stream_rng(99, 3);
        for _ in 0..50 {
            assert_eq!(
                sample_channel_draw(&mut a, &params),
                sample_channel_draw(&mut b, &params)
            );
        }
    }

    #[test]
    fn sample_moments_match_variances() {
        let params = SystemParams {
            var_rr: 0.1,
            ..Default::default()
        };
        let mut rng = stream_rng(2024, 0);
        let n = 1_000_000;
        let (mut m_ar, mut m_rr, mut mean_re, mut mean_im) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let d = sample_channel_draw(&mut rng, &params);
            m_ar += d.h_ar.norm_sqr();
            m_rr += d.h_rr.norm_sqr();
            mean_re += d.h_ar.re;
            mean_im += d.h_ar.im;
        }
        let n = n as f64;
        assert!((m_ar / n - 1.0).abs() < 0.01, "E|h_ar|^2 = {}", m_ar / n);
        assert!((m_rr / n - 0.1).abs() < 0.005, "E|h_rr|^2 = {}", m_rr / n);
        assert!((mean_re / n).abs() < 0.005);
        assert!((mean_im / n).abs() < 0.005);
    }

    #[test]
    fn sinr_hand_values() {
        // |h_ar|² = 1, p_a = 10, κ_R·W = 1, no self-interference → γ = 10.
        let params = SystemParams {
            p_a: 10.0,
            p_r: 10.0,
            kappa_r: 1.0,
            kappa_b: 1.0,
            kappa_e: 1.0,
            bandwidth_w: 1.0,
            slot_t: 1.0,
            codeword_len_b: 1,
            ..Default::default()
        };
        let draw = ChannelDraw {
            h_ar: Complex64::new(1.0, 0.0),
            h_rb: Complex64::new(1.0, 0.0),
            h_ae: Complex64::new(0.0, 0.0),
            h_re: Complex64::new(0.0, 0.0),
            h_rr: Complex64::new(0.0, 0.0),
        };
        let s = compute_sinrs(&draw, &params);
        assert_eq!(s.gamma_r_fd, 10.0);
        assert_eq!(s.gamma_ar_hd, 10.0);
        assert_eq!(s.gamma_rb, 10.0);
        assert_eq!(s.gamma_ae_hd, 0.0);

        // |h_rr|²·p_r = 1 doubles the effective noise at the relay.
        let draw2 = ChannelDraw {
            h_rr: Complex64::new(libm::sqrt(0.1), 0.0),
            ..draw
        };
        let s2 = compute_sinrs(&draw2, &params);
        assert!((s2.gamma_r_fd - 5.0).abs() < 1e-12);
    }

    #[test]
    fn silent_source_zeroes_its_sinrs() {
        let params = SystemParams {
            p_a: 0.0,
            ..Default::default()
        };
        let mut rng = stream_rng(5, 0);
        for _ in 0..200 {
            let d = sample_channel_draw(&mut rng, &params);
            let s = compute_sinrs(&d, &params);
            assert_eq!(s.gamma_r_fd, 0.0);
            assert_eq!(s.gamma_ar_hd, 0.0);
            assert_eq!(s.gamma_ae_hd, 0.0);
            assert_eq!(s.gamma_ae_fd, 0.0);
        }
    }

    #[test]
    fn sinr_orderings_hold_on_random_draws() {
        let params = SystemParams::default();
        let mut rng = stream_rng(7, 0);
        for _ in 0..10_000 {
            let d = sample_channel_draw(&mut rng, &params);
            let s = compute_sinrs(&d, &params);
            assert!(s.gamma_r_fd <= s.gamma_ar_hd);
            assert!(s.gamma_ae_fd <= s.gamma_ae_hd);
            assert!(s.gamma_re_fd <= s.gamma_re_hd);
            assert_eq!(s.gamma_rb_hd, s.gamma_rb);
            for g in [
                s.gamma_r_fd,
                s.gamma_rb,
                s.gamma_ar_hd,
                s.gamma_ae_hd,
                s.gamma_rb_hd,
                s.gamma_re_hd,
                s.gamma_ae_fd,
                s.gamma_re_fd,
            ] {
                assert!(g.is_finite() && g >= 0.0);
            }
        }
    }
}
