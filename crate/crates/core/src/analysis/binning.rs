//! Geometric (base 2) binning and ordinary least squares on log-log data.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Estimator, FitResult, Quantity};

/// Bins with fewer samples are left out of fits.
pub const MIN_BIN_COUNT: usize = 5;

/// How samples inside a bin are averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinMean {
    /// Arithmetic mean of `x` and of `y`.
    Arithmetic,
    /// Geometric mean of `x` and of `y` (all values must be positive).
    Geometric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bin {
    /// Inclusive lower edge, a power of two.
    #[serde(serialize_with = "crate::io::fmt::ser_real")]
    pub lo: f64,
    /// Exclusive upper edge, `2 * lo`.
    #[serde(serialize_with = "crate::io::fmt::ser_real")]
    pub hi: f64,
    #[serde(serialize_with = "crate::io::fmt::ser_real")]
    pub center: f64,
    #[serde(serialize_with = "crate::io::fmt::ser_real")]
    pub value: f64,
    pub count: usize,
}

/// A curve averaged over logarithmic bins.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct BinnedCurve {
    pub bins: Vec<Bin>,
}

/// `floor(log2(x))` with exact handling at powers of two.
pub fn octave(x: f64) -> i32 {
    debug_assert!(x > 0.0);
    let mut k = x.log2().floor() as i32;
    if 2f64.powi(k) > x {
        k -= 1;
    }
    if 2f64.powi(k + 1) <= x {
        k += 1;
    }
    k
}

impl BinnedCurve {
    /// Average `(x, y)` samples per base-2 octave of `x`. Samples with
    /// `x <= 0` are ignored; in geometric mode so are samples with `y <= 0`.
    pub fn from_points(points: &[(f64, f64)], mean: BinMean) -> Self {
        let mut keyed: Vec<(i32, f64, f64)> = points
            .iter()
            .filter(|(x, y)| *x > 0.0 && (mean == BinMean::Arithmetic || *y > 0.0))
            .map(|&(x, y)| (octave(x), x, y))
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut bins = Vec::new();
        let mut i = 0;
        while i < keyed.len() {
            let k = keyed[i].0;
            let mut j = i;
            let (mut sx, mut sy) = (0.0, 0.0);
            while j < keyed.len() && keyed[j].0 == k {
                let (_, x, y) = keyed[j];
                match mean {
                    BinMean::Arithmetic => {
                        sx += x;
                        sy += y;
                    }
                    BinMean::Geometric => {
                        sx += x.ln();
                        sy += y.ln();
                    }
                }
                j += 1;
            }
            let n = (j - i) as f64;
            let (center, value) = match mean {
                BinMean::Arithmetic => (sx / n, sy / n),
                BinMean::Geometric => ((sx / n).exp(), (sy / n).exp()),
            };
            let lo = 2f64.powi(k);
            bins.push(Bin {
                lo,
                hi: 2.0 * lo,
                center,
                value,
                count: j - i,
            });
            i = j;
        }
        BinnedCurve { bins }
    }

    pub fn total_count(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }

    /// Points usable in a log-log fit: positive value and at least
    /// `min_count` samples. If that leaves fewer than three points, the count
    /// threshold is dropped.
    pub fn fit_points(&self, min_count: usize) -> Vec<(f64, f64)> {
        let usable = |b: &&Bin| b.value > 0.0 && b.center > 0.0;
        let strict: Vec<(f64, f64)> = self
            .bins
            .iter()
            .filter(usable)
            .filter(|b| b.count >= min_count)
            .map(|b| (b.center, b.value))
            .collect();
        if strict.len() >= 3 {
            return strict;
        }
        self.bins
            .iter()
            .filter(usable)
            .map(|b| (b.center, b.value))
            .collect()
    }

    /// Log-log OLS over [`Self::fit_points`].
    pub fn fit(&self, n_samples: usize) -> Result<FitResult> {
        let pts = self.fit_points(MIN_BIN_COUNT);
        let line = ols_loglog_points(&pts)?;
        Ok(line.into_fit(pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min), n_samples))
    }
}

/// A straight-line fit `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub points: usize,
}

impl LineFit {
    pub(crate) fn into_fit(self, xmin: f64, n_samples: usize) -> FitResult {
        FitResult {
            quantity: Quantity::Generic,
            estimator: Estimator::Ols,
            exponent: self.slope,
            stderr: self.slope_stderr,
            xmin,
            ks_stat: None,
            r_squared: Some(self.r_squared),
            n_samples,
        }
    }
}

/// Ordinary least squares on raw points.
pub fn ols(points: &[(f64, f64)]) -> Result<LineFit> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "line fit needs at least 2 points, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 || ss_res == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).max(0.0)
    };
    let slope_stderr = if n > 2 {
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit {
        slope,
        intercept,
        slope_stderr,
        r_squared,
        points: n,
    })
}

/// OLS on `(ln x, ln y)` for already-positive points.
pub fn ols_loglog_points(points: &[(f64, f64)]) -> Result<LineFit> {
    let logged: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    ols(&logged)
}

/// Log-log slope of `y` against `x` after geometric binning.
///
/// Pairs are averaged (geometric mean) per base-2 octave of `x`; bins with
/// fewer than five pairs are dropped when at least three bins remain. When
/// binning leaves fewer than three bins the raw pairs are fitted instead.
pub fn fit_loglog_ols(pairs: &[(f64, f64)]) -> Result<FitResult> {
    if let Some(&(x, y)) = pairs.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "log-log fit needs positive values, got ({x}, {y})"
        )));
    }
    let mut xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "log-log fit needs at least 3 distinct x values, got {}",
            xs.len()
        )));
    }
    let curve = BinnedCurve::from_points(pairs, BinMean::Geometric);
    let pts = curve.fit_points(MIN_BIN_COUNT);
    let line = if pts.len() >= 3 {
        ols_loglog_points(&pts)?
    } else {
        ols_loglog_points(pairs)?
    };
    Ok(line.into_fit(xs[0], pairs.len()))
}
