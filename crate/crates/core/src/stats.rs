//! Tail fits, Gaussian moment estimates and the two-sample Kolmogorov–Smirnov
//! test.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::sampling::SeededStream;

/// Exceedance level at which the fitted tail region starts.
pub const TAIL_START_EXCEEDANCE: f64 = 0.1;
/// Number of `λ` levels in the fitted region.
pub const TAIL_LEVELS: usize = 24;
/// Fewest admissible levels for a conclusive fit.
pub const MIN_TAIL_LEVELS: usize = 4;
/// Fewest exceedances any fitted level may have, whatever `min_count` says.
pub const MIN_LEVEL_COUNT: usize = 30;

/// Least-squares fit of `log P(X > λ) ≈ intercept + slope·λ²`.
///
/// A sub-Gaussian tail `P(X > λ) ≤ C e^{−cλ²}` shows up as a negative slope
/// (`c ≈ −slope`, `C ≈ e^{intercept}`).
#[derive(Debug, Clone, PartialEq)]
pub struct TailFit {
    pub lambdas: Vec<f64>,
    pub log_exceedance: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_samples: usize,
    /// False when fewer than [`MIN_TAIL_LEVELS`] levels had enough counts.
    pub conclusive: bool,
}

impl TailFit {
    pub fn decay_rate(&self) -> f64 {
        -self.slope
    }

    pub fn prefactor(&self) -> f64 {
        self.intercept.exp()
    }
}

/// Fits the upper tail of `samples`.
///
/// The fitted levels are spaced uniformly in `λ²` from the upper-decile
/// quantile to the largest `λ` still exceeded by `min_count` samples (at
/// least [`MIN_LEVEL_COUNT`]); the bulk of the distribution is left out
/// because only the tail is expected to be Gaussian.
pub fn tail_fit(samples: &[f64], min_count: usize) -> Result<TailFit> {
    let min_count = min_count.max(MIN_LEVEL_COUNT);
    if samples.len() < 1000 {
        return Err(Error::invalid(
            "samples",
            "tail fits need at least 1000 samples",
        ));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let n = sorted.len();
    let exceed = |lambda: f64| n - sorted.partition_point(|&x| x <= lambda);

    let lo = sorted[((1.0 - TAIL_START_EXCEEDANCE) * n as f64) as usize];
    let hi = if min_count <= n {
        sorted[n - min_count]
    } else {
        f64::NEG_INFINITY
    };
    let mut lambdas = Vec::new();
    let mut log_exceedance = Vec::new();
    if hi > lo {
        let (lo2, hi2) = (lo * lo, hi * hi);
        for k in 0..TAIL_LEVELS {
            let lambda = (lo2 + (hi2 - lo2) * k as f64 / (TAIL_LEVELS - 1) as f64).sqrt();
            let count = exceed(lambda);
            if count >= min_count {
                lambdas.push(lambda);
                log_exceedance.push((count as f64 / n as f64).ln());
            }
        }
    }
    let mut fit = TailFit {
        lambdas,
        log_exceedance,
        slope: f64::NAN,
        intercept: f64::NAN,
        r_squared: f64::NAN,
        n_samples: n,
        conclusive: false,
    };
    if fit.lambdas.len() < MIN_TAIL_LEVELS {
        return Ok(fit);
    }
    let xs: Vec<f64> = fit.lambdas.iter().map(|l| l * l).collect();
    let (slope, intercept, r2) = linear_regression(&xs, &fit.log_exceedance);
    fit.slope = slope;
    fit.intercept = intercept;
    fit.r_squared = r2;
    fit.conclusive = slope.is_finite();
    Ok(fit)
}

/// Ordinary least squares `y ≈ a + b x`; returns `(b, a, R²)`.
pub fn linear_regression(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, intercept, r2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub q: u32,
    /// `(E|Σ c_n g_n|^q)^{1/q}`.
    pub moment_root: f64,
    /// `moment_root / √q`.
    pub normalized: f64,
}

/// Monte Carlo moments of `X = Σ c_n g_n`, `g_n` independent standard complex
/// Gaussians (`E|g_n|² = 2`), for a unit `ℓ²` coefficient vector.
pub fn moment_growth(
    coeffs: &[f64],
    q_list: &[u32],
    n_samples: usize,
    stream: SeededStream,
) -> Result<Vec<MomentEstimate>> {
    let norm: f64 = coeffs.iter().map(|c| c * c).sum();
    if coeffs.is_empty() || (norm - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(
            "coeffs",
            "coefficient vector must have unit l2 norm",
        ));
    }
    if let Some(q) = q_list.iter().find(|&&q| q == 0 || q > 16) {
        return Err(Error::invalid(
            "q_list",
            alloc::format!("q = {q} is not an integer in 1..=16"),
        ));
    }
    if n_samples == 0 {
        return Err(Error::invalid("n_samples", "must be positive"));
    }
    let mut rng = stream.rng();
    let mut sums = alloc::vec![0.0f64; q_list.len()];
    for _ in 0..n_samples {
        let (mut re, mut im) = (0.0, 0.0);
        for c in coeffs {
            let h: f64 = rng.sample(StandardNormal);
            let l: f64 = rng.sample(StandardNormal);
            re += c * h;
            im += c * l;
        }
        let modulus_sq: f64 = re * re + im * im;
        for (s, &q) in sums.iter_mut().zip(q_list) {
            *s += crate::norms::pow_half(modulus_sq, q as f64);
        }
    }
    Ok(q_list
        .iter()
        .zip(&sums)
        .map(|(&q, s)| {
            let moment_root = (s / n_samples as f64).powf(1.0 / q as f64);
            MomentEstimate {
                q,
                moment_root,
                normalized: moment_root / (q as f64).sqrt(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// `sup_x |F_a(x) − F_b(x)|`.
    pub statistic: f64,
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value, using
/// Stephens' small-sample correction of the argument.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    assert!(
        !a.is_empty() && !b.is_empty(),
        "KS test needs two nonempty samples"
    );
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(|p, q| p.total_cmp(q));
    y.sort_by(|p, q| p.total_cmp(q));
    let (n1, n2) = (x.len(), y.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n1 && j < n2 {
        let v = if x[i].total_cmp(&y[j]) == Ordering::Greater {
            y[j]
        } else {
            x[i]
        };
        while i < n1 && x[i].total_cmp(&v) != Ordering::Greater {
            i += 1;
        }
        while j < n2 && y[j].total_cmp(&v) != Ordering::Greater {
            j += 1;
        }
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    let en = ((n1 * n2) as f64 / (n1 + n2) as f64).sqrt();
    let p_value = kolmogorov_survival((en + 0.12 + 0.11 / en) * d);
    KsResult {
        statistic: d,
        p_value,
        n1,
        n2,
    }
}

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        // Theta-function form, rapidly convergent for small λ.
        let mut cdf = 0.0;
        for k in 1..=20 {
            let odd = (2 * k - 1) as f64;
            cdf += (-(odd * odd) * PI * PI / (8.0 * lambda * lambda)).exp();
        }
        cdf *= (2.0 * PI).sqrt() / lambda;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-300 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Bonferroni-adjusted p-value for a family of `m` tests.
pub fn bonferroni(p: f64, m: usize) -> f64 {
    (p * m as f64).min(1.0)
}

/// Median of a nonempty sample.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty sample");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}
