//! Porter-Thomas population model and threshold analytics.
//!
//! Sorted by rank, the output probabilities of a random circuit follow
//! `p(i) = -ln(1 - i/2^n) / 2^n`. Cutting them at `p_th = t * 2^-n` gives
//! the cut-peak distribution; the continuum limits used below are
//! n-independent, with rank sums provided as finite-n cross-checks.

use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Threshold `p_th = t * 2^-n` for `n` qubits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdConfig {
    pub t: f64,
    pub n: u32,
}

impl ThresholdConfig {
    pub fn new(t: f64, n: u32) -> Result<Self> {
        check_t(t)?;
        if n == 0 || n > 62 {
            return invalid(format!("qubit count {n} outside 1..=62"));
        }
        Ok(Self { t, n })
    }

    pub fn dim(&self) -> u64 {
        1 << self.n
    }

    pub fn p_th(&self) -> f64 {
        self.t / self.dim() as f64
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return invalid(format!("threshold t must be positive and finite, got {t}"));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityEstimate {
    pub f_ce: f64,
    pub efficiency: f64,
    pub amplitudes_per_sample: f64,
}

pub fn fidelity_estimate(t: f64) -> Result<FidelityEstimate> {
    let efficiency = sampling_efficiency(t)?;
    Ok(FidelityEstimate {
        f_ce: cross_entropy_fidelity(t)?,
        efficiency,
        amplitudes_per_sample: 1.0 / efficiency,
    })
}

/// Probability of the rank-`i` outcome among `2^n`, sorted ascending.
pub fn sorted_population(i: u64, n: u32) -> Result<f64> {
    if n == 0 || n > 62 {
        return invalid(format!("qubit count {n} outside 1..=62"));
    }
    let dim = 1u64 << n;
    if i >= dim {
        return invalid(format!("rank {i} out of range for {n} qubits"));
    }
    let d = dim as f64;
    Ok(-(-(i as f64) / d).ln_1p() / d)
}

/// Number of ranks strictly below the threshold.
pub fn cut_rank(cfg: &ThresholdConfig) -> u64 {
    let dim = cfg.dim();
    let p_th = cfg.p_th();
    let below = |i: u64| i < dim && sorted_population(i, cfg.n).unwrap() < p_th;
    let mut c = ((dim as f64) * -(-cfg.t).exp_m1()).ceil().min(dim as f64) as u64;
    while c > 0 && !below(c - 1) {
        c -= 1;
    }
    while below(c) {
        c += 1;
    }
    c
}

/// `sum_i min(p(i), p_th)` over all ranks, in closed form:
/// `sum_{i<c} -ln(1 - i/N) = c ln N - ln(N! / (N - c)!)`.
pub fn cut_peak_normalizer(cfg: &ThresholdConfig) -> f64 {
    let d = cfg.dim() as f64;
    let c = cut_rank(cfg) as f64;
    let below = c * d.ln() - (ln_gamma(d + 1.0) - ln_gamma(d - c + 1.0));
    (below + (d - c) * cfg.t) / d
}

/// Cut-peak probability of rank `i`: `p(i)` below the cut, `p_th` above,
/// normalized over the `2^n` ranks. As `n` grows the normalizer tends to
/// `1 - e^-t`.
pub fn cut_peak_distribution(i: u64, cfg: &ThresholdConfig) -> Result<f64> {
    let p = sorted_population(i, cfg.n)?;
    Ok(p.min(cfg.p_th()) / cut_peak_normalizer(cfg))
}

/// Continuum cut-peak curve at rank fraction `x`, in units of `2^-n`.
pub fn cut_peak_continuum(x: f64, t: f64) -> f64 {
    let u = -(-x).ln_1p();
    u.min(t) / -(-t).exp_m1()
}

/// Expected acceptance probability `(1 - e^-t) / t`.
pub fn sampling_efficiency(t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(-(-t).exp_m1() / t)
}

/// Midpoint rank of `i`: `-ln(1 - (i + 1/2)/N)`, in units of `1/N`.
fn midpoint_population(i: u64, dim: u64) -> f64 {
    -(-(i as f64 + 0.5) / dim as f64).ln_1p()
}

/// `sum_i min(p(i), p_th) / (N p_th)` over ranks taken at bin midpoints.
pub fn sampling_efficiency_summed(cfg: &ThresholdConfig) -> f64 {
    let dim = cfg.dim();
    let s: f64 = (0..dim).map(|i| midpoint_population(i, dim).min(cfg.t)).sum();
    s / (dim as f64 * cfg.t)
}

/// `(ln 2^n + gamma) - sum_i p~(i) ln(1/p(i))` in the continuum limit:
///
/// `gamma + [int_0^t u ln u e^-u du + t int_t^inf ln u e^-u du] / (1 - e^-t)`.
///
/// The first integral is evaluated by adaptive Simpson quadrature; the
/// second is `e^-t ln t + E1(t)`.
pub fn cross_entropy_fidelity(t: f64) -> Result<f64> {
    check_t(t)?;
    let f = |u: f64| if u <= 0.0 { 0.0 } else { u * u.ln() * (-u).exp() };
    let head = adaptive_simpson(&f, 0.0, t, 1e-14);
    let tail = (-t).exp() * t.ln() + exp_integral_e1(t);
    Ok(EULER_GAMMA + (head + t * tail) / -(-t).exp_m1())
}

/// Finite-`n` version of [`cross_entropy_fidelity`] with midpoint ranks
/// and the cut-peak weights normalized by their own sum.
pub fn cross_entropy_fidelity_summed(cfg: &ThresholdConfig) -> f64 {
    let dim = cfg.dim();
    let (mut z, mut s) = (0.0, 0.0);
    for i in 0..dim {
        let u = midpoint_population(i, dim);
        let w = u.min(cfg.t);
        z += w;
        s += w * u.ln();
    }
    EULER_GAMMA + s / z
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    rec(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 48)
}

/// Exponential integral `E1(x) = int_x^inf e^-u / u du` for `x > 0`:
/// power series below 1, continued fraction above.
pub fn exp_integral_e1(x: f64) -> f64 {
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        // Modified Lentz evaluation of the continued fraction.
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1000 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// `2^n p` and Exp(1).
pub fn porter_thomas_check(probabilities: &[f64], n: u32) -> f64 {
    let scale = 2f64.powi(n as i32);
    let mut x: Vec<f64> = probabilities.iter().map(|p| p * scale).collect();
    x.sort_unstable_by(f64::total_cmp);
    let len = x.len() as f64;
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            let cdf = -(-v.max(0.0)).exp_m1();
            (cdf - i as f64 / len).max((i + 1) as f64 / len - cdf)
        })
        .fold(0.0, f64::max)
}
