//! Ensemble experiments built from the samplers, the flow and the statistics.
//!
//! Every member draws from its own [`SeededStream`] with `stream_id` equal to
//! its index, and reductions run over results in stream order, so the output
//! depends only on the seed and the configuration.

use alloc::sync::Arc;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::basis::RadialQuadrature;
use crate::dynamics::{evolve, Observable, SimParams};
use crate::ensemble::EnsembleRunner;
use crate::error::{Error, Result};
use crate::norms::{default_time_samples, lp_norm_ball, sobolev_norm, spacetime_lp_norm};
use crate::sampling::{
    gaussian_draw, gibbs_draw, partition_estimate, GibbsSpec, PartitionEstimate, SeededStream,
};
use crate::smoothing::SmoothingProfile;
use crate::state::SpectralState;
use crate::stats::{ks_two_sample, median, KsResult};
use crate::strichartz_sigma;

/// Law of the initial ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialMeasure {
    /// `ρ_N`, by rejection from `μ_N`.
    #[default]
    Gibbs,
    /// `μ_N`.
    Gaussian,
}

impl InitialMeasure {
    pub fn draw(self, spec: &GibbsSpec, stream: SeededStream) -> Result<SpectralState> {
        let mut rng = stream.rng();
        match self {
            InitialMeasure::Gibbs => gibbs_draw(&mut rng, spec).map(|(u, _)| u),
            InitialMeasure::Gaussian => Ok(gaussian_draw(&mut rng, spec.n_modes())),
        }
    }
}

/// Smallest ensemble accepted by [`invariance_test`].
pub const MIN_INVARIANCE_ENSEMBLE: usize = 500;

/// Family-wise significance level of the invariance test.
pub const INVARIANCE_LEVEL: f64 = 0.01;

/// The four scalar pushforwards compared by the invariance test.
pub fn invariance_observables(s: f64) -> Vec<Observable> {
    alloc::vec![
        Observable::SobolevNorm(s),
        Observable::Hamiltonian { truncated: true },
        Observable::ModeModulus(1),
        Observable::SmoothedLpNorm,
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub observables: Vec<Observable>,
    pub results: Vec<KsResult>,
    /// `initial[k][m]`: observable `k` of member `m` at `t = 0`.
    pub initial: Vec<Vec<f64>>,
    /// Same at `t = t_final`.
    pub evolved: Vec<Vec<f64>>,
}

impl InvarianceReport {
    /// Bonferroni-adjusted p-values, one per observable.
    pub fn adjusted_p_values(&self) -> Vec<f64> {
        let m = self.results.len();
        self.results
            .iter()
            .map(|r| crate::stats::bonferroni(r.p_value, m))
            .collect()
    }

    /// True when no observable rejects at the family-wise level.
    pub fn consistent(&self, level: f64) -> bool {
        self.adjusted_p_values().iter().all(|&p| p > level)
    }
}

/// Draws `n_ensemble` initial states, evolves each to `sim.t_final` and
/// compares the `t = 0` and `t = t_final` populations of each observable with
/// a two-sample KS test.
pub fn invariance_test<R: EnsembleRunner>(
    sim: &SimParams,
    n_ensemble: usize,
    observables: &[Observable],
    measure: InitialMeasure,
    seed: u64,
    runner: &R,
) -> Result<InvarianceReport> {
    if n_ensemble < MIN_INVARIANCE_ENSEMBLE {
        return Err(Error::invalid(
            "n_ensemble",
            alloc::format!("invariance tests need at least {MIN_INVARIANCE_ENSEMBLE} members"),
        ));
    }
    sim.validate()?;
    let steps = sim.n_steps().max(1);
    let sim = sim
        .clone()
        .with_record_every(usize::try_from(steps).unwrap_or(usize::MAX));
    let members = runner.run(n_ensemble, |id| -> Result<(Vec<f64>, Vec<f64>)> {
        let u0 = measure
            .draw(&sim.spec, SeededStream::new(seed, id))
            .map_err(|e| e.with_stream(id))?;
        let traj = evolve(&u0, &sim, observables).map_err(|e| e.with_stream(id))?;
        let first = traj.series.iter().map(|s| s[0]).collect();
        let last = traj.series.iter().map(|s| s[s.len() - 1]).collect();
        Ok((first, last))
    });
    let k = observables.len();
    let mut initial = alloc::vec![Vec::with_capacity(n_ensemble); k];
    let mut evolved = alloc::vec![Vec::with_capacity(n_ensemble); k];
    for m in members {
        let (a, b) = m?;
        for j in 0..k {
            initial[j].push(a[j]);
            evolved[j].push(b[j]);
        }
    }
    let results = initial
        .iter()
        .zip(&evolved)
        .map(|(a, b)| ks_two_sample(a, b))
        .collect();
    Ok(InvarianceReport {
        observables: observables.to_vec(),
        results,
        initial,
        evolved,
    })
}

/// `(1 + log(1 + t))^{1/2}`.
pub fn growth_envelope(t: f64) -> f64 {
    (1.0 + (1.0 + t.abs()).ln()).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthSeries {
    pub stream_id: u64,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub ratios: Vec<f64>,
    pub sup_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub s: f64,
    pub members: Vec<GrowthSeries>,
    pub max_sup_ratio: f64,
    pub median_sup_ratio: f64,
}

impl GrowthReport {
    /// `max / median` of the per-member sup ratios.
    pub fn spread(&self) -> f64 {
        self.max_sup_ratio / self.median_sup_ratio
    }
}

/// Long-horizon runs from `ρ_N` samples recording `‖u(t)‖_{H^s}` against the
/// envelope `(1 + log(1 + t))^{1/2}`.
pub fn growth_tracker<R: EnsembleRunner>(
    sim: &SimParams,
    n_ensemble: usize,
    s: f64,
    seed: u64,
    runner: &R,
) -> Result<GrowthReport> {
    if n_ensemble == 0 {
        return Err(Error::invalid("n_ensemble", "must be positive"));
    }
    sim.validate()?;
    let members = runner.run(n_ensemble, |id| -> Result<GrowthSeries> {
        let u0 = InitialMeasure::Gibbs
            .draw(&sim.spec, SeededStream::new(seed, id))
            .map_err(|e| e.with_stream(id))?;
        let traj =
            evolve(&u0, sim, &[Observable::SobolevNorm(s)]).map_err(|e| e.with_stream(id))?;
        let norms = traj.series.into_iter().next().unwrap_or_default();
        let ratios: Vec<f64> = traj
            .times
            .iter()
            .zip(&norms)
            .map(|(&t, &n)| n / growth_envelope(t))
            .collect();
        let sup_ratio = ratios.iter().copied().fold(0.0, f64::max);
        Ok(GrowthSeries {
            stream_id: id,
            times: traj.times,
            norms,
            ratios,
            sup_ratio,
        })
    });
    let members: Vec<GrowthSeries> = members.into_iter().collect::<Result<_>>()?;
    let sups: Vec<f64> = members.iter().map(|m| m.sup_ratio).collect();
    let max_sup_ratio = sups.iter().copied().fold(0.0, f64::max);
    let median_sup_ratio = median(&sups);
    Ok(GrowthReport {
        s,
        members,
        max_sup_ratio,
        median_sup_ratio,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrichartzReport {
    pub p: f64,
    pub sigma: f64,
    pub n_modes: usize,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
}

/// `‖S(t)f‖_{L^p([−1,1]×ball)} / ‖f‖_{H^σ}` with `σ = 3/2 − 4/p`.
///
/// The free evolution is 2-periodic, so the window `[−1, 1]` is computed as
/// `(0, 2)`.
pub fn strichartz_quotient(f: &SpectralState, quad: &RadialQuadrature, p: f64) -> f64 {
    let sigma = strichartz_sigma(p);
    spacetime_lp_norm(f, quad, p, default_time_samples(f.n_modes())) / sobolev_norm(f, sigma)
}

/// Largest Strichartz quotient over `n_trials` random states in `E_N`.
///
/// Trial states have independent complex Gaussian coefficients scaled by
/// `(πn)^{−σ}` and are normalized to unit `H^σ` norm, so the `H^σ` mass is
/// spread evenly over the modes.
pub fn strichartz_ratio<R: EnsembleRunner>(
    quad: &RadialQuadrature,
    n_modes: usize,
    p: f64,
    n_trials: usize,
    seed: u64,
    runner: &R,
) -> Result<StrichartzReport> {
    if !(p > 4.0 && p < 6.0) {
        return Err(Error::invalid("p", alloc::format!("{p} is outside (4, 6)")));
    }
    if quad.n_max() < n_modes || n_modes == 0 {
        return Err(Error::invalid(
            "n_modes",
            "must be positive and resolved by the quadrature",
        ));
    }
    let sigma = strichartz_sigma(p);
    let ratios = runner.run(n_trials, |id| {
        let mut rng = SeededStream::new(seed, id).rng();
        let coeffs: Vec<Complex64> = (1..=n_modes)
            .map(|n| {
                let h: f64 = rng.sample(StandardNormal);
                let l: f64 = rng.sample(StandardNormal);
                Complex64::new(h, l) * (core::f64::consts::PI * n as f64).powf(-sigma)
            })
            .collect();
        let f = SpectralState::from_vec_unchecked(coeffs);
        let f = f.scaled(1.0 / sobolev_norm(&f, sigma));
        strichartz_quotient(&f, quad, p)
    });
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(StrichartzReport {
        p,
        sigma,
        n_modes,
        ratios,
        max_ratio,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub reference_modes: usize,
    pub t_final: f64,
    /// `(N, ‖Φ_N(T)u_N − Φ_{N*}(T)u‖_{H^s})`.
    pub errors: Vec<(usize, f64)>,
}

impl ConvergenceReport {
    pub fn monotone(&self) -> bool {
        self.errors.windows(2).all(|w| w[1].1 < w[0].1)
    }
}

/// Galerkin convergence against a reference truncation.
///
/// The data are one `ρ_{N*}` sample; level `N` starts from its first `N`
/// modes and uses `S_N`. All levels share the reference quadrature and `dt`.
pub fn galerkin_convergence(
    alpha: f64,
    reference_modes: usize,
    levels: &[usize],
    t_final: f64,
    dt: f64,
    s: f64,
    seed: u64,
) -> Result<ConvergenceReport> {
    let quad = Arc::new(RadialQuadrature::with_default_order(reference_modes)?);
    let reference_spec = GibbsSpec::new(alpha, reference_modes, quad.clone())?;
    let u0 = InitialMeasure::Gibbs.draw(&reference_spec, SeededStream::new(seed, 0))?;
    let reference = evolve(
        &u0,
        &SimParams::new(reference_spec, dt, t_final)?.with_record_every(usize::MAX),
        &[],
    )?
    .final_state;
    let mut errors = Vec::with_capacity(levels.len());
    for &n in levels {
        if n > reference_modes {
            return Err(Error::invalid(
                "levels",
                "levels may not exceed the reference truncation",
            ));
        }
        let spec = GibbsSpec::new(alpha, n, quad.clone())?;
        let data = u0.resized(n);
        let out = evolve(
            &data,
            &SimParams::new(spec, dt, t_final)?.with_record_every(usize::MAX),
            &[],
        )?;
        errors.push((n, sobolev_norm(&out.final_state.difference(&reference), s)));
    }
    Ok(ConvergenceReport {
        reference_modes,
        t_final,
        errors,
    })
}

/// Acceptance-rate estimates `ρ_N(E_N)` for several truncations. All levels
/// read the same stream, so their Gaussian draws are nested.
pub fn partition_sequence(
    alpha: f64,
    levels: &[usize],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<(usize, PartitionEstimate)>> {
    levels
        .iter()
        .map(|&n| {
            let quad = Arc::new(RadialQuadrature::with_default_order(n)?);
            let spec = GibbsSpec::new(alpha, n, quad)?;
            Ok((
                n,
                partition_estimate(&spec, n_samples, SeededStream::new(seed, 0))?,
            ))
        })
        .collect()
}

/// Largest `‖S_N u‖_{L^p} / ‖u‖_{L^p}` over `n_states` draws of `μ_{2N}`,
/// per truncation `N`.
pub fn smoothing_lp_ratio(
    levels: &[usize],
    n_states: usize,
    p: f64,
    seed: u64,
) -> Result<Vec<(usize, f64)>> {
    levels
        .iter()
        .map(|&n| {
            let quad = RadialQuadrature::with_default_order(2 * n)?;
            let profile = SmoothingProfile::new(n, 2 * n);
            let mut rng = SeededStream::new(seed, n as u64).rng();
            let worst = (0..n_states)
                .map(|_| {
                    let u = gaussian_draw(&mut rng, 2 * n);
                    lp_norm_ball(&profile.apply(&u), &quad, p) / lp_norm_ball(&u, &quad, p)
                })
                .fold(0.0, f64::max);
            Ok((n, worst))
        })
        .collect()
}

/// `‖u‖_{H^s}` and `‖S(t)u‖_{L^p((0,2)×ball)}` for `n_samples` draws of `μ_N`.
pub fn gaussian_norm_samples<R: EnsembleRunner>(
    spec: &GibbsSpec,
    n_samples: usize,
    s: f64,
    p: f64,
    seed: u64,
    runner: &R,
) -> (Vec<f64>, Vec<f64>) {
    let m = default_time_samples(spec.n_modes());
    let pairs = runner.run(n_samples, |id| {
        let u = gaussian_draw(&mut SeededStream::new(seed, id).rng(), spec.n_modes());
        (
            sobolev_norm(&u, s),
            spacetime_lp_norm(&u, spec.quad(), p, m),
        )
    });
    pairs.into_iter().unzip()
}
