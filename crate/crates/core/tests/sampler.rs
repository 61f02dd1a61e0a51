use transim::circuit::generate_chain_circuit;
use transim::sampler::{
    cross_entropy_fidelity, cross_entropy_fidelity_summed, cross_entropy_of_probabilities,
    curves_csv, cut_peak_continuum, cut_peak_distribution, distribution_csv, empirical_cross_entropy,
    fidelity_estimate, porter_thomas_check, sampling_efficiency, sampling_efficiency_summed,
    sorted_population, threshold_reject_run, threshold_reject_sample, PointMassSource,
    ProbabilitySource, SamplerOptions, StopRule, TableSource, ThresholdConfig, UniformSource,
    EULER_GAMMA,
};
use transim::statevector::MemoryCap;
use transim::Error;

/// f_CE reference values from 30-digit quadrature of the continuum formula.
const F_CE_REFERENCE: [(f64, f64); 6] = [
    (0.1, 0.165_084_191_031_457_1),
    (0.5, 0.467_377_106_024_982_8),
    (1.0, 0.664_073_928_187_217_3),
    (2.4, 0.898_856_256_130_145_7),
    (5.0, 0.989_790_837_660_907_3),
    (10.0, 0.999_906_665_730_859_5),
];

#[test]
fn efficiency_values() {
    let eta = sampling_efficiency(2.4).unwrap();
    assert!((eta - 0.378_867_519_462_744_8).abs() < 1e-15);
    assert!((0.375..=0.385).contains(&eta));
    assert!((sampling_efficiency(0.1).unwrap() - 0.9516).abs() < 1e-4);
    assert!((sampling_efficiency(1e-9).unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn efficiency_matches_rank_summation() {
    for t in [0.1, 1.0, 2.4, 5.0] {
        let cfg = ThresholdConfig::new(t, 16).unwrap();
        let summed = sampling_efficiency_summed(&cfg);
        assert!((summed - sampling_efficiency(t).unwrap()).abs() < 1e-6, "t = {t}");
    }
}

#[test]
fn fidelity_values() {
    for (t, f) in F_CE_REFERENCE {
        let got = cross_entropy_fidelity(t).unwrap();
        assert!((got - f).abs() < 1e-10, "t = {t}: {got} vs {f}");
    }
    let f = cross_entropy_fidelity(2.4).unwrap();
    assert!((0.89..=0.91).contains(&f));
    assert!((cross_entropy_fidelity(40.0).unwrap() - 1.0).abs() < 1e-12);
    let half = cross_entropy_fidelity(0.5).unwrap();
    assert!(half > 0.0 && half < 0.9);
}

#[test]
fn fidelity_matches_rank_summation() {
    let cfg = ThresholdConfig::new(2.4, 20).unwrap();
    let summed = cross_entropy_fidelity_summed(&cfg);
    assert!((summed - cross_entropy_fidelity(2.4).unwrap()).abs() < 1e-6);
    let cfg = ThresholdConfig::new(0.5, 16).unwrap();
    let summed = cross_entropy_fidelity_summed(&cfg);
    assert!((summed - cross_entropy_fidelity(0.5).unwrap()).abs() < 1e-5);
}

#[test]
fn monotone_in_threshold() {
    let ts: Vec<f64> = (1..=100).map(|i| 0.1 * i as f64).collect();
    for w in ts.windows(2) {
        let (a, b) = (w[0], w[1]);
        assert!(sampling_efficiency(b).unwrap() < sampling_efficiency(a).unwrap());
        assert!(cross_entropy_fidelity(b).unwrap() > cross_entropy_fidelity(a).unwrap(), "{a}");
    }
}

#[test]
fn amplitudes_per_sample_at_sweet_spot() {
    let e = fidelity_estimate(2.4).unwrap();
    assert!((2.5..=3.0).contains(&e.amplitudes_per_sample));
    assert!((e.amplitudes_per_sample * e.efficiency - 1.0).abs() < 1e-15);
}

#[test]
fn population_inverse_ranks() {
    let n = 30;
    let d = (1u64 << n) as f64;
    for t in [1.0f64, 2.4] {
        let i = (d * (1.0 - (-t).exp())) as u64;
        let p = sorted_population(i, n).unwrap() * d;
        assert!((p - t).abs() < 1e-7, "t = {t}: {p}");
    }
}

#[test]
fn cut_peak_sums_to_one() {
    for &(t, n) in &[(2.4, 10), (2.4, 16), (0.7, 20), (6.0, 12)] {
        let cfg = ThresholdConfig::new(t, n).unwrap();
        let s: f64 = (0..cfg.dim())
            .map(|i| cut_peak_distribution(i, &cfg).unwrap())
            .sum();
        assert!((s - 1.0).abs() < 1e-9, "t = {t}, n = {n}: {s}");
    }
    let cfg = ThresholdConfig::new(2.4, 8).unwrap();
    assert_eq!(cut_peak_distribution(0, &cfg).unwrap(), 0.0);
}

#[test]
fn cut_peak_is_continuous_at_the_cut() {
    let t = 2.4f64;
    let xc = 1.0 - (-t).exp();
    let left = cut_peak_continuum(xc - 1e-12, t);
    let right = cut_peak_continuum(xc + 1e-12, t);
    let expect = t / (1.0 - (-t).exp());
    assert!((left - expect).abs() < 1e-9 && (right - expect).abs() < 1e-12);
}

#[test]
fn csv_layouts() {
    let c = curves_csv(&[1.0, 2.4]).unwrap();
    let lines: Vec<&str> = c.lines().collect();
    assert_eq!(lines[0], "t,eta,f_ce");
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("2.4,0.3788"));
    let d = distribution_csv(2.4, 10).unwrap();
    assert_eq!(d.lines().next(), Some("rank_fraction,p_times_2n,ptilde_times_2n"));
    assert_eq!(d.lines().count(), 11);
    assert_eq!(d, distribution_csv(2.4, 10).unwrap());
}

#[test]
fn uniform_source_accepts_everything_at_unit_threshold() {
    let cfg = ThresholdConfig::new(1.0, 6).unwrap();
    let run = threshold_reject_sample(&UniformSource { n: 6 }, &cfg, &SamplerOptions::default(), 500)
        .unwrap();
    assert_eq!(run.proposals, 500);
    assert_eq!(run.acceptance_ratio(), 1.0);
}

#[test]
fn point_mass_only_yields_its_outcome() {
    let cfg = ThresholdConfig::new(2.4, 5).unwrap();
    let src = PointMassSource { n: 5, outcome: 0 };
    let run = threshold_reject_sample(&src, &cfg, &SamplerOptions::default(), 20).unwrap();
    assert!(run.samples.iter().all(|&i| i == 0));
}

#[test]
fn porter_thomas_acceptance_ratio() {
    let src = TableSource::porter_thomas(12, 41).unwrap();
    let cfg = ThresholdConfig::new(2.4, 12).unwrap();
    let run = threshold_reject_run(&src, &cfg, &SamplerOptions::default(), StopRule::Proposals(100_000))
        .unwrap();
    assert_eq!(run.proposals, 100_000);
    assert!((run.acceptance_ratio() - 0.379).abs() < 0.02, "{}", run.acceptance_ratio());
}

#[test]
fn runs_are_independent_of_batch_size() {
    let src = TableSource::porter_thomas(8, 5).unwrap();
    let cfg = ThresholdConfig::new(2.4, 8).unwrap();
    let base = SamplerOptions::default();
    let a = threshold_reject_sample(&src, &cfg, &base, 300).unwrap();
    for batch in [1, 7, 1000] {
        let opts = SamplerOptions {
            batch_size: batch,
            ..base
        };
        assert_eq!(threshold_reject_sample(&src, &cfg, &opts, 300).unwrap(), a);
    }
}

#[test]
fn budget_is_enforced() {
    let src = PointMassSource { n: 10, outcome: 3 };
    let cfg = ThresholdConfig::new(2.4, 10).unwrap();
    let opts = SamplerOptions {
        max_proposals: 100,
        ..SamplerOptions::default()
    };
    match threshold_reject_sample(&src, &cfg, &opts, 5) {
        Err(Error::BudgetExceeded { proposals, .. }) => assert_eq!(proposals, 100),
        other => panic!("expected budget error, got {other:?}"),
    }
}

/// `ln 2^n + gamma - E[ln 1/p]` for samples drawn with weights `w`.
fn expected_xeb(src: &TableSource, weights: &[f64], n: usize) -> (f64, f64) {
    let total: f64 = weights.iter().sum();
    let logs: Vec<f64> = src.probabilities().iter().map(|p| -p.ln()).collect();
    let mean: f64 = weights.iter().zip(&logs).map(|(w, l)| w * l).sum::<f64>() / total;
    let var: f64 = weights
        .iter()
        .zip(&logs)
        .map(|(w, l)| w * (l - mean).powi(2))
        .sum::<f64>()
        / total;
    (n as f64 * std::f64::consts::LN_2 + EULER_GAMMA - mean, var.sqrt())
}

#[test]
fn xeb_of_exact_samples_is_one() {
    let n = 12;
    let src = TableSource::porter_thomas(n, 99).unwrap();
    let t_max = src.probabilities().iter().cloned().fold(0.0, f64::max) * 4096.0;
    let cfg = ThresholdConfig::new(t_max * 1.0001, n as u32).unwrap();
    let run = threshold_reject_sample(&src, &cfg, &SamplerOptions::default(), 100_000).unwrap();
    let f = empirical_cross_entropy(&run.samples, &src, n).unwrap();
    let (expect, sd) = expected_xeb(&src, src.probabilities(), n);
    let sigma = sd / (run.samples.len() as f64).sqrt();
    assert!((f - expect).abs() < 3.0 * sigma, "{f} vs {expect} (sigma {sigma})");
    assert!((f - 1.0).abs() < 0.05);
}

#[test]
fn xeb_of_uniform_samples_is_zero() {
    let n = 12;
    let src = TableSource::porter_thomas(n, 98).unwrap();
    let cfg = ThresholdConfig::new(1.0, n as u32).unwrap();
    let samples = threshold_reject_sample(&UniformSource { n }, &cfg, &SamplerOptions::default(), 100_000)
        .unwrap()
        .samples;
    let f = empirical_cross_entropy(&samples, &src, n).unwrap();
    let (expect, sd) = expected_xeb(&src, &vec![1.0; 1 << n], n);
    let sigma = sd / (samples.len() as f64).sqrt();
    assert!((f - expect).abs() < 3.0 * sigma, "{f} vs {expect}");
    assert!(f.abs() < 0.05);
}

#[test]
fn xeb_single_sample_cancels() {
    let n = 10;
    // ln(2^n p) - gamma vanishes at p = e^gamma 2^-n.
    let p = EULER_GAMMA.exp() / 1024.0;
    let f = cross_entropy_of_probabilities(&[3], &[p], n).unwrap();
    assert!((f - 2.0 * EULER_GAMMA).abs() < 1e-12);
    let p = (-EULER_GAMMA).exp() / 1024.0;
    let f = cross_entropy_of_probabilities(&[3], &[p], n).unwrap();
    assert!(f.abs() < 1e-12);
    assert!(matches!(
        cross_entropy_of_probabilities(&[7], &[0.0], n),
        Err(Error::UndefinedLogarithm { outcome: 7 })
    ));
}

#[test]
fn ks_calibration() {
    let mut ks: Vec<f64> = (0..9)
        .map(|seed| porter_thomas_check(TableSource::porter_thomas(12, seed).unwrap().probabilities(), 12))
        .collect();
    ks.sort_unstable_by(f64::total_cmp);
    assert!(ks[4] < 0.02, "median {}", ks[4]);
    assert!(ks[8] < 0.03);
    let flat = vec![1.0 / 4096.0; 4096];
    assert!(porter_thomas_check(&flat, 12) > 0.5);
}

#[test]
fn chain_circuit_is_porter_thomas() {
    let c = generate_chain_circuit(12, 24, 2024).unwrap();
    let src = TableSource::from_circuit(&c, MemoryCap::qubits(20)).unwrap();
    assert_eq!(src.num_qubits(), 12);
    let ks = porter_thomas_check(src.probabilities(), 12);
    assert!(ks < 0.03, "{ks}");
}
