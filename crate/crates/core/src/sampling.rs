//! Gaussian measure `μ_N`, Gibbs weight `f_N` and Gibbs measure `ρ_N`.
//!
//! Random draws come from ChaCha8 keystreams: the experiment seed is the key
//! and the ensemble member index selects the stream, so member `k` sees the
//! same numbers however members are scheduled. Standard normals use the
//! ziggurat sampler of `rand_distr::StandardNormal`, drawn in the order
//! `h_1, l_1, h_2, l_2, ...`; a state in `E_N` therefore shares its first `M`
//! modes with the state drawn from the same stream in `E_M`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::basis::RadialQuadrature;
use crate::error::{Error, Result};
use crate::galerkin::synthesize;
use crate::smoothing::SmoothingProfile;
use crate::state::SpectralState;

/// Consecutive rejections after which [`sample_gibbs`] gives up.
pub const MAX_CONSECUTIVE_REJECTIONS: u64 = 1_000_000;

/// Independent random stream for one ensemble member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeededStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Nonlinearity exponent, truncation and quadrature defining `f_N` and `ρ_N`.
#[derive(Debug, Clone)]
pub struct GibbsSpec {
    alpha: f64,
    n_modes: usize,
    smoothing: SmoothingProfile,
    quad: Arc<RadialQuadrature>,
}

impl GibbsSpec {
    /// `α ∈ (0, 3)`, truncation `N`, smoothing `S_N` with cutoff `N`.
    pub fn new(alpha: f64, n_modes: usize, quad: Arc<RadialQuadrature>) -> Result<Self> {
        let smoothing = SmoothingProfile::new(n_modes.max(1), n_modes);
        Self::with_smoothing(alpha, n_modes, smoothing, quad)
    }

    pub fn with_smoothing(
        alpha: f64,
        n_modes: usize,
        smoothing: SmoothingProfile,
        quad: Arc<RadialQuadrature>,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 3.0) {
            return Err(Error::invalid(
                "alpha",
                alloc::format!("{alpha} is outside (0, 3)"),
            ));
        }
        if n_modes == 0 {
            return Err(Error::invalid("n_modes", "must be positive"));
        }
        if quad.n_max() < n_modes {
            return Err(Error::invalid(
                "quad",
                alloc::format!("quadrature resolves {} modes, need {n_modes}", quad.n_max()),
            ));
        }
        if smoothing.len() < n_modes {
            return Err(Error::invalid("smoothing", "profile shorter than n_modes"));
        }
        Ok(Self {
            alpha,
            n_modes,
            smoothing,
            quad,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn smoothing(&self) -> &SmoothingProfile {
        &self.smoothing
    }

    pub fn quad(&self) -> &RadialQuadrature {
        &self.quad
    }

    pub fn quad_arc(&self) -> &Arc<RadialQuadrature> {
        &self.quad
    }

    /// `(1/(α+2)) ‖S_N Re u‖^{α+2}_{L^{α+2}}`, or without `S_N` when
    /// `smoothed` is false.
    pub fn potential(&self, u: &SpectralState, smoothed: bool) -> f64 {
        let mut field = alloc::vec![0.0; self.quad.n_quad()];
        self.real_field(u, smoothed, &mut field);
        let e = self.alpha + 2.0;
        let sum: f64 = self
            .quad
            .weights()
            .iter()
            .zip(&field)
            .map(|(w, x)| w * crate::norms::pow_half(x * x, e))
            .sum();
        sum / e
    }

    /// `‖S_N Re u‖_{L^{α+2}}`.
    pub fn smoothed_lp_norm(&self, u: &SpectralState) -> f64 {
        let e = self.alpha + 2.0;
        (self.potential(u, true) * e).powf(1.0 / e)
    }

    /// Nodal values of `S_N Re u` (or `Re u`).
    pub(crate) fn real_field(&self, u: &SpectralState, smoothed: bool, out: &mut [f64]) {
        assert!(
            u.n_modes() <= self.n_modes,
            "state has more modes than the spec"
        );
        let a: Vec<f64> = u
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if smoothed {
                    c.re * self.smoothing.multiplier(i + 1)
                } else {
                    c.re
                }
            })
            .collect();
        synthesize(&self.quad, &a, out);
    }
}

/// One draw of `Σ_{n≤N} (h_n + i l_n)/(πn) e_n` from `rng`.
pub fn gaussian_draw<R: Rng + ?Sized>(rng: &mut R, n_modes: usize) -> SpectralState {
    let coeffs = (1..=n_modes)
        .map(|n| {
            let h: f64 = rng.sample(StandardNormal);
            let l: f64 = rng.sample(StandardNormal);
            Complex64::new(h, l) / (PI * n as f64)
        })
        .collect();
    SpectralState::from_vec_unchecked(coeffs)
}

/// A state distributed according to `μ_N`.
pub fn sample_gaussian(spec: &GibbsSpec, stream: SeededStream) -> SpectralState {
    gaussian_draw(&mut stream.rng(), spec.n_modes())
}

/// `f_N(u) = exp(−(1/(α+2)) ‖S_N Re u‖^{α+2}_{L^{α+2}})`.
pub fn gibbs_weight(u: &SpectralState, spec: &GibbsSpec) -> f64 {
    (-spec.potential(u, true)).exp()
}

/// Rejection sampler for `ρ_N` from `μ_N` proposals; exact because `f_N ≤ 1`.
pub fn gibbs_draw<R: Rng + ?Sized>(rng: &mut R, spec: &GibbsSpec) -> Result<(SpectralState, u64)> {
    let mut attempts = 0u64;
    loop {
        attempts += 1;
        let u = gaussian_draw(rng, spec.n_modes());
        let accept: f64 = rng.random();
        if accept < gibbs_weight(&u, spec) {
            return Ok((u, attempts));
        }
        if attempts >= MAX_CONSECUTIVE_REJECTIONS {
            return Err(Error::RejectionLimit { attempts });
        }
    }
}

/// A state distributed according to the normalized `ρ_N`, with the number
/// of proposals it took.
pub fn sample_gibbs(spec: &GibbsSpec, stream: SeededStream) -> Result<(SpectralState, u64)> {
    gibbs_draw(&mut stream.rng(), spec)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n_samples: usize,
}

/// Monte Carlo estimate of `E_{μ_N}[f_N] = ρ_N(E_N)`.
pub fn partition_estimate(
    spec: &GibbsSpec,
    n_samples: usize,
    stream: SeededStream,
) -> Result<PartitionEstimate> {
    if n_samples < 100 {
        return Err(Error::invalid(
            "n_samples",
            "at least 100 samples are required",
        ));
    }
    let mut rng = stream.rng();
    let weights: Vec<f64> = (0..n_samples)
        .map(|_| gibbs_weight(&gaussian_draw(&mut rng, spec.n_modes()), spec))
        .collect();
    let n = n_samples as f64;
    let mean = weights.iter().sum::<f64>() / n;
    let var = weights.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(PartitionEstimate {
        mean,
        std_err: (var / n).sqrt(),
        n_samples,
    })
}
