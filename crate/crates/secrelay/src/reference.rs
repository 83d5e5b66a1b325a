//! Slow, independent reference implementations.
//!
//! Each function here recomputes a quantity the fast path derives through
//! algebraic shortcuts (determinant recurrences, product-form stationary
//! distributions, aggregated throughput formulas), using nothing but the
//! defining construction. The test suites compare the two. Keep these naive:
//! their value is that they share no code with what they check.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::channel::{ChannelDraw, SystemParams};
use crate::policy::{apply_mode, select_mode, Indicators, QueuePolicy};

/// Eavesdropper rate under simultaneous source/relay transmission, computed
/// from the explicitly assembled channel matrix.
///
/// Builds the (B+1)×B banded matrix `H` whose column `j` carries
/// `√p_a·h_ae` at row `j` and `√p_r·h_re` at row `j+1`, forms
/// `M = I + HᴴH/(κ_E·W)` densely, and takes `log₂ det M / B` via a complex
/// Cholesky factorization. O(B³) time and O(B²) memory — use small B.
pub fn dense_df_fd_eve_rate(draw: &ChannelDraw, params: &SystemParams) -> f64 {
    let b_len = params.codeword_len_b;
    let noise = params.noise_e();
    let t0 = draw.h_ae * libm::sqrt(params.p_a);
    let t1 = draw.h_re * libm::sqrt(params.p_r);
    let entry = |r: usize, c: usize| -> Complex64 {
        if r == c {
            t0
        } else if r == c + 1 {
            t1
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let mut m = vec![Complex64::new(0.0, 0.0); b_len * b_len];
    for i in 0..b_len {
        for j in 0..b_len {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..=b_len {
                acc += entry(r, i).conj() * entry(r, j);
            }
            m[i * b_len + j] = acc / noise;
        }
    }
    for i in 0..b_len {
        m[i * b_len + i] += Complex64::new(1.0, 0.0);
    }
    log2_det_hermitian_pd(&mut m, b_len) / b_len as f64
}

/// `log₂ det` of a Hermitian positive-definite matrix (row-major, boxed as a
/// flat slice), by in-place Cholesky. Panics if the matrix is not positive
/// definite — callers only pass `I + (PSD)`.
fn log2_det_hermitian_pd(m: &mut [Complex64], n: usize) -> f64 {
    let mut log2_det = 0.0;
    for j in 0..n {
        let mut d = m[j * n + j].re;
        for k in 0..j {
            d -= m[j * n + k].norm_sqr();
        }
        assert!(d > 0.0, "matrix not positive definite at pivot {j}");
        let l = libm::sqrt(d);
        log2_det += 2.0 * libm::log2(l);
        m[j * n + j] = Complex64::new(l, 0.0);
        for i in (j + 1)..n {
            let mut v = m[i * n + j];
            for k in 0..j {
                v -= m[i * n + k] * m[j * n + k].conj();
            }
            m[i * n + j] = v / l;
        }
    }
    log2_det
}

/// Stationary distribution of a birth-death chain on states `0…Q`, by damped
/// power iteration on the explicit transition matrix.
///
/// `up[n]` is the probability of moving `n → n+1` (length Q); `down[n]` the
/// probability of `n+1 → n` (length Q). The damping `(P+I)/2` makes the
/// iteration converge even for periodic chains. Iterates until the L1 change
/// per sweep falls below `tol` or `max_iters` sweeps elapse.
pub fn power_iteration_stationary(
    up: &[f64],
    down: &[f64],
    tol: f64,
    max_iters: usize,
) -> Vec<f64> {
    assert_eq!(up.len(), down.len());
    let q = up.len();
    let states = q + 1;
    let mut v = vec![1.0 / states as f64; states];
    let mut w = vec![0.0; states];
    for _ in 0..max_iters {
        for x in w.iter_mut() {
            *x = 0.0;
        }
        for n in 0..states {
            let a = if n < q { up[n] } else { 0.0 };
            let b = if n > 0 { down[n - 1] } else { 0.0 };
            w[n] += v[n] * (1.0 - a - b);
            if n < q {
                w[n + 1] += v[n] * a;
            }
            if n > 0 {
                w[n - 1] += v[n] * b;
            }
        }
        let mut delta = 0.0;
        for n in 0..states {
            let next = 0.5 * (v[n] + w[n]);
            delta += (next - v[n]).abs();
            v[n] = next;
        }
        let total: f64 = v.iter().sum();
        for x in v.iter_mut() {
            *x /= total;
        }
        if delta < tol {
            break;
        }
    }
    v
}

/// Average delivery rate of the occupancy process, derived by enumerating
/// the joint indicator events per state instead of using the aggregated
/// throughput formula.
///
/// `cells` is a joint pmf over `(S★, S₃, S₄, S₅)` indexed as in
/// [`crate::montecarlo::event_cell_index`]. For every state the per-event
/// mode is taken from the selection rule itself (`select_mode`/`apply_mode`),
/// with the tie event split analytically by the policy; the resulting
/// explicit chain is solved by power iteration and the delivery expectation
/// averaged under it. Shares no arithmetic with the product-form stationary
/// distribution or the closed-form throughput.
pub fn enumerated_throughput(cells: &[f64; 16], policy: &QueuePolicy) -> f64 {
    let cap = policy.cap_q();
    let mut up = vec![0.0; cap];
    let mut down = vec![0.0; cap];
    let mut deliver = vec![0.0; cap + 1];
    for state in 0..=cap {
        let mut contribute = |mode, mass: f64| {
            let (next, delivered) = apply_mode(state, mode);
            if next > state {
                up[state] += mass;
            } else if next < state {
                down[state - 1] += mass;
            }
            if delivered {
                deliver[state] += mass;
            }
        };
        for (idx, &mass) in cells.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let s_star = idx & 8 != 0;
            let ind = Indicators {
                s1: s_star,
                s2: s_star,
                s3: idx & 4 != 0,
                s4: idx & 2 != 0,
                s5: idx & 1 != 0,
                s_star,
            };
            let tie = !ind.s_star && !ind.s3 && ind.s4 && ind.s5 && state > 0;
            if tie {
                let alpha = policy.alpha(state);
                contribute(select_mode(&ind, state, policy, 0.0), mass * alpha);
                contribute(select_mode(&ind, state, policy, 1.0), mass * (1.0 - alpha));
            } else {
                contribute(select_mode(&ind, state, policy, 0.0), mass);
            }
        }
    }
    let zeta = power_iteration_stationary(&up, &down, 1e-15, 2_000_000);
    zeta.iter().zip(deliver.iter()).map(|(z, d)| z * d).sum()
}
