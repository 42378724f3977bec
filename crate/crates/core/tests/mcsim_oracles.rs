use ompath::levy::StableJumpMeasure;
use ompath::mcsim::{estimate_probability, rank_paths, simulate_path, spearman, tube_probability, wald_halfwidth, SdeSpec};
use ompath::om::{DriftModel, PathGrid};
use statrs::distribution::{ContinuousCDF, Normal};

fn brownian(x0: f64) -> SdeSpec {
    SdeSpec::new(DriftModel::parse("0").unwrap(), 1.0, None, x0, 0.0, 1.0)
}

#[test]
fn brownian_endpoint_has_unit_variance() {
    let spec = brownian(0.0);
    let n = 100_000;
    let ends: Vec<f64> = (0..n).map(|seed| *simulate_path(&spec, seed).unwrap().values().last().unwrap()).collect();
    let mean = ends.iter().sum::<f64>() / n as f64;
    let var = ends.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "mean {mean}");
    assert!((var - 1.0).abs() < 4.0 * (2.0 / n as f64).sqrt(), "variance {var}");
}

#[test]
fn confidence_intervals_cover_the_true_probability() {
    // with a one-interval grid only the endpoint is tested: P(|W_1| ≤ 1)
    let truth = {
        let phi = Normal::standard();
        phi.cdf(1.0) - phi.cdf(-1.0)
    };
    let spec = brownian(0.0);
    let reps = 200;
    let covered = (0..reps)
        .filter(|&r| {
            let n = 2000;
            let (hits, _) = estimate_probability(&spec, 1, n, 1000 + r, |x| x[1].abs() <= 1.0).unwrap();
            let p = hits as f64 / n as f64;
            let (lo, hi) = (p - wald_halfwidth(p, n), p + wald_halfwidth(p, n));
            lo <= truth && truth <= hi
        })
        .count();
    let rate = covered as f64 / reps as f64;
    assert!((0.90..=0.99).contains(&rate), "coverage {rate}");
}

#[test]
fn euler_maruyama_has_weak_order_one() {
    // for dX = -X dt + dW the scheme's mean is exactly x0 (1 - h)^(1/h); a large
    // x0 lifts the bias well above the sampling noise
    let x0 = 100.0;
    let n = 20_000;
    let mean = |h: f64| {
        let spec = SdeSpec { em_step: h, ..SdeSpec::new(DriftModel::parse("-z").unwrap(), 1.0, None, x0, 0.0, 1.0) };
        (0..n).map(|seed| *simulate_path(&spec, seed).unwrap().values().last().unwrap()).sum::<f64>() / n as f64
    };
    let exact = x0 * (-1.0f64).exp();
    let (m1, m2) = (mean(0.01), mean(0.005));
    let noise = 4.0 * 0.66 / (n as f64).sqrt();
    assert!((m1 - x0 * 0.99f64.powi(100)).abs() < noise);
    assert!((m2 - x0 * 0.995f64.powi(200)).abs() < noise);
    let ratio = (exact - m1) / (exact - m2);
    assert!((1.5..2.7).contains(&ratio), "bias ratio {ratio}");
}

fn linear_spec() -> SdeSpec {
    let m = StableJumpMeasure::new(0.5, 0.5).unwrap();
    SdeSpec::new(DriftModel::parse("-z").unwrap(), 1.0, Some(m), 1.0, 0.0, 1.0)
}

fn family(amplitudes: &[f64]) -> Vec<PathGrid> {
    amplitudes
        .iter()
        .map(|a| PathGrid::from_fn(0.0, 1.0, 100, |t| 1.0 - 0.5 * t + a * (std::f64::consts::PI * t).sin()).unwrap())
        .collect()
}

#[test]
fn common_random_numbers_are_reproducible() {
    let spec = linear_spec();
    let paths = family(&[0.0, 0.2]);
    let a = rank_paths(&spec, &paths, 0.5, 5000, 9).unwrap();
    let b = rank_paths(&spec, &paths, 0.5, 5000, 9).unwrap();
    assert_eq!(a, b);
    // the ranking shares paths with single-path estimates
    let single = tube_probability(&spec, &paths[1], 0.5, 5000, 9).unwrap();
    let entry = a.entries.iter().find(|e| e.index == 1).unwrap();
    assert_eq!(entry.estimate.hits, single.hits);
    let (hits, _) = estimate_probability(&spec, 100, 5000, 9, |x| (x[100] - 0.5).abs() <= 0.5).unwrap();
    assert!(hits >= single.hits);
}

#[test]
fn tube_probability_decreases_with_action() {
    let report = rank_paths(&linear_spec(), &family(&[0.0, 0.2, 0.4, 0.6]), 0.5, 50_000, 4).unwrap();
    assert_eq!(report.spearman, 1.0);
    let order: Vec<usize> = report.entries.iter().map(|e| e.index).collect();
    assert_eq!(order, vec![0, 1, 2, 3]);
}

#[test]
fn spearman_handles_ties_and_reversal() {
    assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), 1.0);
    assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), -1.0);
    let r = spearman(&[1.0, 2.0, 2.0, 4.0], &[1.0, 3.0, 2.0, 4.0]);
    assert!(r > 0.9 && r < 1.0);
    assert!(spearman(&[1.0, 1.0], &[1.0, 2.0]).is_nan());
}
