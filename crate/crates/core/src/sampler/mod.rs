//! Porter-Thomas analytics and threshold-rejection sampling.

mod analytics;
mod rejection;

pub use analytics::*;
pub use rejection::*;

/// CSV rows `t,eta,f_ce` for each threshold.
pub fn curves_csv(ts: &[f64]) -> crate::Result<String> {
    let mut out = String::from("t,eta,f_ce\n");
    for &t in ts {
        let e = fidelity_estimate(t)?;
        out.push_str(&format!("{t},{},{}\n", e.efficiency, e.f_ce));
    }
    Ok(out)
}

/// CSV rows `rank_fraction,p_times_2n,ptilde_times_2n` of the continuum
/// population and cut-peak curves at `points` evenly spaced rank fractions
/// in `[0, 1)`.
pub fn distribution_csv(t: f64, points: usize) -> crate::Result<String> {
    sampling_efficiency(t)?;
    let mut out = String::from("rank_fraction,p_times_2n,ptilde_times_2n\n");
    for j in 0..points {
        let x = j as f64 / points as f64;
        let p = -(-x).ln_1p();
        out.push_str(&format!("{x},{p},{}\n", cut_peak_continuum(x, t)));
    }
    Ok(out)
}
