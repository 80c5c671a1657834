//! Maximum-likelihood power-law fits with a Kolmogorov–Smirnov scan over
//! the lower cutoff, plus a log-binned histogram regression for comparison.

use crate::error::{Error, Result};
use crate::model::{Estimator, FitResult, Quantity};

use super::binning::{ols_loglog_points, octave, MIN_BIN_COUNT};

/// Tail sizes below this are never fitted.
pub const MIN_TAIL: usize = 10;

const MAX_CANDIDATES: usize = 256;
const ALPHA_LO: f64 = 1.0 + 1e-6;
const ALPHA_HI: f64 = 100.0;

// B_2j / (2j)! for j = 1..=8
const EM_COEFFS: [f64; 8] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
];

/// `ln ζ(s, q)` for `s > 1`, `q > 0`, via Euler–Maclaurin summation.
///
/// Terms are scaled by `q^s` so large `s` or `q` cannot underflow.
pub fn ln_hurwitz_zeta(s: f64, q: f64) -> f64 {
    debug_assert!(s > 1.0 && q > 0.0);
    let lnq = q.ln();
    let rel = |a: f64| (-s * (a.ln() - lnq)).exp();
    let threshold = (s + 16.0).max(10.0);
    let mut sum = 0.0;
    let mut a = q;
    if a < threshold {
        let k = (threshold - a).ceil();
        for i in 0..k as usize {
            sum += rel(a + i as f64);
        }
        a += k;
    }
    let r = rel(a);
    sum += r * a / (s - 1.0) + 0.5 * r;
    let mut rising = s;
    let mut apow = 1.0 / a;
    for (j, c) in EM_COEFFS.iter().enumerate() {
        let term = c * rising * r * apow;
        sum += term;
        let m = 2.0 * (j as f64 + 1.0);
        rising *= (s + m - 1.0) * (s + m);
        apow /= a * a;
    }
    -s * lnq + sum.ln()
}

pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    ln_hurwitz_zeta(s, q).exp()
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo < 1e-12 * (1.0 + lo.abs()) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

fn check_samples(samples: &[f64], discrete: bool) -> Result<Vec<f64>> {
    let mut xs = samples.to_vec();
    if let Some(bad) = xs.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidInput(format!(
            "power-law samples must be positive, got {bad}"
        )));
    }
    if discrete {
        if let Some(bad) = xs.iter().find(|x| x.fract() != 0.0) {
            return Err(Error::InvalidInput(format!(
                "discrete power-law samples must be integers, got {bad}"
            )));
        }
    }
    xs.sort_by(f64::total_cmp);
    if xs.len() < MIN_TAIL {
        return Err(Error::InsufficientData(format!(
            "need at least {MIN_TAIL} samples, got {}",
            xs.len()
        )));
    }
    if xs[0] == xs[xs.len() - 1] {
        return Err(Error::Degenerate(format!("all {} samples equal {}", xs.len(), xs[0])));
    }
    Ok(xs)
}

/// Exponent estimate for a sorted tail with known cutoff.
fn alpha_for_tail(tail: &[f64], xmin: f64, discrete: bool) -> f64 {
    let n = tail.len() as f64;
    if discrete {
        let sum_ln: f64 = tail.iter().map(|x| x.ln()).sum();
        golden_max(
            |a| -n * ln_hurwitz_zeta(a, xmin) - a * sum_ln,
            ALPHA_LO,
            ALPHA_HI,
        )
    } else {
        let sum: f64 = tail.iter().map(|x| (x / xmin).ln()).sum();
        (1.0 + n / sum).min(ALPHA_HI)
    }
}

/// Largest CDF gap between a sorted tail and the fitted model.
fn ks_distance(tail: &[f64], xmin: f64, alpha: f64, discrete: bool) -> f64 {
    let n = tail.len() as f64;
    let mut d: f64 = 0.0;
    if discrete {
        let ln_norm = ln_hurwitz_zeta(alpha, xmin);
        let cdf = |v: f64| 1.0 - (ln_hurwitz_zeta(alpha, v + 1.0) - ln_norm).exp();
        let mut i = 0;
        while i < tail.len() {
            let v = tail[i];
            let mut j = i;
            while j < tail.len() && tail[j] == v {
                j += 1;
            }
            let emp = j as f64 / n;
            d = d.max((emp - cdf(v)).abs());
            if j < tail.len() && tail[j] - 1.0 > v {
                // model keeps rising across the gap while the data is flat
                d = d.max((emp - cdf(tail[j] - 1.0)).abs());
            }
            i = j;
        }
    } else {
        for (i, &x) in tail.iter().enumerate() {
            let f = 1.0 - (x / xmin).powf(1.0 - alpha);
            d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
        }
    }
    d.min(1.0)
}

fn mle_fit(tail: &[f64], xmin: f64, discrete: bool) -> FitResult {
    let alpha = alpha_for_tail(tail, xmin, discrete);
    let ks = ks_distance(tail, xmin, alpha, discrete);
    FitResult {
        quantity: Quantity::Generic,
        estimator: Estimator::Mle,
        exponent: alpha,
        stderr: (alpha - 1.0) / (tail.len() as f64).sqrt(),
        xmin,
        ks_stat: Some(ks),
        r_squared: None,
        n_samples: tail.len(),
    }
}

/// MLE at a fixed lower cutoff.
pub fn fit_powerlaw_fixed_xmin(samples: &[f64], xmin: f64, discrete: bool) -> Result<FitResult> {
    let xs = check_samples(samples, discrete)?;
    let start = xs.partition_point(|&x| x < xmin);
    let tail = &xs[start..];
    if tail.len() < MIN_TAIL {
        return Err(Error::InsufficientData(format!(
            "only {} samples at or above xmin = {xmin}",
            tail.len()
        )));
    }
    if tail[0] == tail[tail.len() - 1] {
        return Err(Error::Degenerate(format!("tail above {xmin} is constant")));
    }
    Ok(mle_fit(tail, xmin, discrete))
}

/// Power-law MLE with the cutoff chosen by minimum KS distance.
///
/// Continuous data use the closed-form estimator; discrete data maximise the
/// Hurwitz-zeta likelihood numerically. Candidate cutoffs are the distinct
/// sample values that leave at least [`MIN_TAIL`] samples and a non-constant
/// tail; when there are many, the smallest 64 and 192 evenly spaced others
/// are scanned.
pub fn fit_powerlaw_mle(samples: &[f64], discrete: bool) -> Result<FitResult> {
    let xs = check_samples(samples, discrete)?;
    let n = xs.len();
    let last = xs[n - 1];
    let mut candidates: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < n {
        if n - i < MIN_TAIL || xs[i] == last {
            break;
        }
        candidates.push(i);
        let v = xs[i];
        while i < n && xs[i] == v {
            i += 1;
        }
    }
    if candidates.is_empty() {
        return Err(Error::InsufficientData(
            "no cutoff leaves a non-constant tail of 10 samples".into(),
        ));
    }
    if candidates.len() > MAX_CANDIDATES {
        let head = 64;
        let rest = &candidates[head..];
        let picks = MAX_CANDIDATES - head;
        let mut thinned: Vec<usize> = candidates[..head].to_vec();
        for k in 0..picks {
            thinned.push(rest[k * (rest.len() - 1) / (picks - 1)]);
        }
        thinned.dedup();
        candidates = thinned;
    }
    let mut best: Option<FitResult> = None;
    for start in candidates {
        let fit = mle_fit(&xs[start..], xs[start], discrete);
        let better = match &best {
            None => true,
            Some(b) => fit.ks_stat < b.ks_stat,
        };
        if better {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// Slope of a log-binned density histogram, reported as a positive exponent.
pub fn fit_powerlaw_loghist(samples: &[f64], discrete: bool) -> Result<FitResult> {
    let xs = check_samples(samples, discrete)?;
    let n = xs.len() as f64;
    let mut pts_all = Vec::new();
    let mut i = 0;
    while i < xs.len() {
        let k = octave(xs[i]);
        let mut j = i;
        while j < xs.len() && octave(xs[j]) == k {
            j += 1;
        }
        let lo = 2f64.powi(k);
        let (width, center) = if discrete && lo >= 1.0 {
            (lo, (lo * (2.0 * lo - 1.0)).sqrt())
        } else {
            (lo, lo * 2f64.sqrt())
        };
        pts_all.push((center, (j - i) as f64 / (n * width), j - i));
        i = j;
    }
    let strict: Vec<(f64, f64)> = pts_all
        .iter()
        .filter(|p| p.2 >= MIN_BIN_COUNT)
        .map(|p| (p.0, p.1))
        .collect();
    let pts: Vec<(f64, f64)> = if strict.len() >= 3 {
        strict
    } else {
        pts_all.iter().map(|p| (p.0, p.1)).collect()
    };
    let line = ols_loglog_points(&pts)?;
    Ok(line.into_fit(xs[0], xs.len()).negated())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zeta_known_values() {
        let pi = std::f64::consts::PI;
        assert!((hurwitz_zeta(2.0, 1.0) - pi * pi / 6.0).abs() < 1e-13);
        assert!((hurwitz_zeta(4.0, 1.0) - pi.powi(4) / 90.0).abs() < 1e-13);
        // zeta(2, 3) = pi^2/6 - 1 - 1/4
        assert!((hurwitz_zeta(2.0, 3.0) - (pi * pi / 6.0 - 1.25)).abs() < 1e-13);
    }

    #[test]
    fn zeta_matches_direct_summation() {
        for &(s, q) in &[(1.5, 1.0), (2.5, 4.0), (3.1, 17.0), (60.0, 2.0), (1.2, 250.0)] {
            // brute force partial sum plus integral tail
            let big: f64 = 2e6;
            let mut sum = 0.0;
            let mut k = 0.0;
            while q + k < big {
                sum += (q + k).powf(-s);
                k += 1.0;
            }
            sum += big.powf(1.0 - s) / (s - 1.0) + 0.5 * big.powf(-s);
            let z = hurwitz_zeta(s, q);
            assert!(((z - sum) / sum).abs() < 1e-9, "s={s} q={q}: {z} vs {sum}");
        }
    }

    #[test]
    fn ln_zeta_survives_underflow() {
        let v = ln_hurwitz_zeta(90.0, 5000.0);
        assert!(v.is_finite());
        let approx = -90.0 * 5000f64.ln() + (5000.0 / 89.0 + 0.5f64).ln();
        assert!((v - approx).abs() < 1e-3, "{v} vs {approx}");
    }

    #[test]
    fn all_equal_is_degenerate() {
        let xs = vec![3.0; 50];
        assert!(matches!(fit_powerlaw_mle(&xs, true), Err(Error::Degenerate(_))));
    }

    #[test]
    fn rejects_bad_samples() {
        let mut xs: Vec<f64> = (1..30).map(f64::from).collect();
        xs.push(0.0);
        assert!(matches!(fit_powerlaw_mle(&xs, true), Err(Error::InvalidInput(_))));
        xs.pop();
        xs.push(2.5);
        assert!(matches!(fit_powerlaw_mle(&xs, true), Err(Error::InvalidInput(_))));
        assert!(fit_powerlaw_mle(&[1.0, 2.0, 3.0], false).is_err());
    }

    #[test]
    fn continuous_closed_form_at_fixed_cutoff() {
        // alpha = 1 + n / sum ln(x / xmin)
        let xs: Vec<f64> = (0..20).map(|i| 1.0 + i as f64 * 0.5).collect();
        let fit = fit_powerlaw_fixed_xmin(&xs, 1.0, false).unwrap();
        let expect = 1.0 + 20.0 / xs.iter().map(|x| x.ln()).sum::<f64>();
        assert!((fit.exponent - expect).abs() < 1e-12);
        assert!((fit.stderr - (expect - 1.0) / 20f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn continuous_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let xs: Vec<f64> = (0..20_000)
            .map(|_| (1.0 - rng.random::<f64>()).powf(-1.0 / 1.5))
            .collect();
        let fit = fit_powerlaw_mle(&xs, false).unwrap();
        assert!((fit.exponent - 2.5).abs() < 3.0 * fit.stderr + 0.01, "{fit:?}");
        let ks = fit.ks_stat.unwrap();
        assert!((0.0..=1.0).contains(&ks));
    }

    #[test]
    fn loghist_slope_on_continuous_pareto() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..200_000)
            .map(|_| (1.0 - rng.random::<f64>()).powf(-1.0))
            .collect();
        let fit = fit_powerlaw_loghist(&xs, false).unwrap();
        assert!((fit.exponent - 2.0).abs() < 0.1, "{fit:?}");
        assert_eq!(fit.estimator, Estimator::Ols);
    }
}
