//! Picard iteration of the Duhamel formula
//!
//! ```text
//!     u(t) = S(t)u_0 − i ∫_0^t S(t−τ) K(u(τ)) dτ,
//! ```
//!
//! where `K(u)` is the forcing of [`Forcing`]. The iteration runs on
//! `v(t) = S(−t)u(t)`, so the stiff phase rotation is handled exactly and
//! only the slowly varying interaction term is integrated numerically, with
//! Gauss–Legendre collocation on each time panel. Panels are doubled until
//! the endpoint stops changing.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dynamics::{ForceKernel, Forcing};
use crate::error::{Error, Result};
use crate::norms::{free_evolve, half_turn_phase};
use crate::quadrature::{gauss_legendre_on, integration_matrix};
use crate::sampling::GibbsSpec;
use crate::state::SpectralState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    /// Fixed-point tolerance, and endpoint agreement required between panel
    /// refinements (`ℓ²` norm of coefficients).
    pub tol: f64,
    pub max_iter: usize,
    /// Gauss nodes per panel.
    pub nodes_per_panel: usize,
    /// Starting panel count; `None` picks `⌈πNT⌉`.
    pub initial_panels: Option<usize>,
    pub max_refinements: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
            nodes_per_panel: 8,
            initial_panels: None,
            max_refinements: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardSolution {
    /// `u(T)`.
    pub state: SpectralState,
    /// Panels used at the accepted refinement level.
    pub panels: usize,
    /// Fixed-point residuals at the accepted level, one per iteration.
    pub residuals: Vec<f64>,
    /// Endpoint change between the last two refinement levels.
    pub refinement_gap: f64,
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Solves the Duhamel equation on `[0, t_end]` by fixed-point iteration.
///
/// Fails with [`Error::PicardDiverged`] when the map does not contract within
/// `max_iter` iterations, which happens once `t_end` is long compared to the
/// size of the data.
pub fn picard_duhamel(
    u0: &SpectralState,
    spec: &GibbsSpec,
    t_end: f64,
    forcing: Forcing,
    opts: &PicardOptions,
) -> Result<PicardSolution> {
    if u0.n_modes() != spec.n_modes() {
        return Err(Error::invalid("u0", "initial state is not in E_N"));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::invalid("t_end", "must be nonnegative and finite"));
    }
    if t_end == 0.0 {
        return Ok(PicardSolution {
            state: u0.clone(),
            panels: 0,
            residuals: Vec::new(),
            refinement_gap: 0.0,
        });
    }
    let n = spec.n_modes();
    let mut panels = opts
        .initial_panels
        .unwrap_or_else(|| (PI * n as f64 * t_end).ceil() as usize)
        .max(1);
    let mut kernel = ForceKernel::new(spec, forcing);
    let (mut best, mut residuals) = solve_level(u0, &mut kernel, t_end, panels, opts)?;
    let mut gap = f64::INFINITY;
    for _ in 0..opts.max_refinements {
        let (finer, res) = solve_level(u0, &mut kernel, t_end, 2 * panels, opts)?;
        gap = l2(finer.difference(&best).coeffs());
        panels *= 2;
        best = finer;
        residuals = res;
        if gap <= opts.tol {
            break;
        }
    }
    Ok(PicardSolution {
        state: best,
        panels,
        residuals,
        refinement_gap: gap,
    })
}

fn solve_level(
    u0: &SpectralState,
    kernel: &mut ForceKernel<'_>,
    t_end: f64,
    panels: usize,
    opts: &PicardOptions,
) -> Result<(SpectralState, Vec<f64>)> {
    let n = u0.n_modes();
    let m = opts.nodes_per_panel;
    let h = t_end / panels as f64;
    let (x, w) = gauss_legendre_on(m, 0.0, 1.0);
    let q = integration_matrix(&x);
    let times: Vec<f64> = (0..panels)
        .flat_map(|p| x.iter().map(move |&xk| (p as f64 + xk) * h))
        .collect();
    // phases[node][mode] = e^{−iπnτ}
    let phases: Vec<Vec<Complex64>> = times
        .iter()
        .map(|&t| (1..=n).map(|k| half_turn_phase(k as f64 * t)).collect())
        .collect();

    let mut v: Vec<Vec<Complex64>> = alloc::vec![u0.coeffs().to_vec(); times.len()];
    let mut g = alloc::vec![alloc::vec![Complex64::new(0.0, 0.0); n]; times.len()];
    let mut u_buf = alloc::vec![Complex64::new(0.0, 0.0); n];
    let mut force = alloc::vec![0.0; n];
    let mut residuals = Vec::new();

    for _ in 0..opts.max_iter {
        for ((vi, ph), gi) in v.iter().zip(&phases).zip(g.iter_mut()) {
            for ((ub, c), p) in u_buf.iter_mut().zip(vi).zip(ph) {
                *ub = c * p;
            }
            kernel.eval(&u_buf, &mut force);
            // −i S(−τ) K
            for ((gk, f), p) in gi.iter_mut().zip(&force).zip(ph) {
                *gk = Complex64::new(0.0, -f) * p.conj();
            }
        }
        let mut start = u0.coeffs().to_vec();
        let mut residual: f64 = 0.0;
        for p in 0..panels {
            let base = p * m;
            for (k, qk) in q.iter().enumerate() {
                let node = base + k;
                let mut diff_sq = 0.0;
                for mode in 0..n {
                    let integral: Complex64 = (0..m).map(|j| g[base + j][mode] * qk[j]).sum();
                    let new = start[mode] + integral * h;
                    diff_sq += (new - v[node][mode]).norm_sqr();
                    v[node][mode] = new;
                }
                residual = residual.max(diff_sq.sqrt());
            }
            for (mode, s) in start.iter_mut().enumerate() {
                let integral: Complex64 = (0..m).map(|j| g[base + j][mode] * w[j]).sum();
                *s += integral * h;
            }
        }
        residuals.push(residual);
        if !residual.is_finite() || residual > 1e8 * (1.0 + l2(u0.coeffs())) {
            return Err(Error::PicardDiverged {
                iterations: residuals.len(),
                residual,
            });
        }
        if residual <= opts.tol {
            let state = SpectralState::from_vec_unchecked(start);
            return Ok((free_evolve(&state, t_end), residuals));
        }
    }
    let residual = residuals.last().copied().unwrap_or(f64::NAN);
    Err(Error::PicardDiverged {
        iterations: opts.max_iter,
        residual,
    })
}
