//! The truncated Hamiltonian flow `Φ_N(t)` on `E_N`.
//!
//! In coefficients the truncated equation reads
//!
//! ```text
//!     ċ_n = −iπn c_n − i m_n G_n / (πn),    G_n = ⟨F(S_N Re u), e_n⟩,
//! ```
//!
//! with `F(x) = |x|^α x` and `m_n` the smoothing multipliers. The linear part
//! is a phase rotation. The forcing is real, so the nonlinear part leaves
//! `Re u` fixed and shifts `Im u` at a constant rate: both flows are exact and
//! preserve Lebesgue measure on `(Re c_n, Im c_n)`. [`Stepper`] composes them
//! in Strang order (half kick, rotation, half kick).

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::galerkin::{project_masked, synthesize};
use crate::norms::{free_evolve, half_turn_phase, sobolev_norm, spacetime_lp_norm};
use crate::sampling::GibbsSpec;
use crate::state::SpectralState;

/// `F(x) = |x|^α x`.
#[inline]
pub fn nonlinearity(x: f64, alpha: f64) -> f64 {
    if alpha == 2.0 {
        x * x * x
    } else if alpha == 1.0 {
        x.abs() * x
    } else {
        x.abs().powf(alpha) * x
    }
}

/// Which nonlinear term drives the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Forcing {
    /// `S_N √(−Δ)^{-1} F(S_N Re u)`, the truncated system.
    #[default]
    Smoothed,
    /// Galerkin projection of `√(−Δ)^{-1} F(Re u)` without smoothing.
    Projected,
    /// No nonlinearity: the free evolution.
    Free,
}

impl Forcing {
    /// Whether the conserved energy carries `S_N` inside the potential.
    pub fn smoothed_potential(self) -> bool {
        !matches!(self, Forcing::Projected)
    }
}

/// `½ Σ (πn)² |c_n|² + (1/(α+2)) ‖S_N Re u‖^{α+2}_{L^{α+2}}`; with
/// `truncated = false` the potential uses `Re u` directly.
pub fn hamiltonian(u: &SpectralState, spec: &GibbsSpec, truncated: bool) -> f64 {
    kinetic_energy(u) + spec.potential(u, truncated)
}

pub fn kinetic_energy(u: &SpectralState) -> f64 {
    0.5 * u
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = PI * (i + 1) as f64;
            k * k * c.norm_sqr()
        })
        .sum::<f64>()
}

/// Time step, horizon and model for [`evolve`].
#[derive(Debug, Clone)]
pub struct SimParams {
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    pub forcing: Forcing,
    pub spec: GibbsSpec,
}

impl SimParams {
    pub fn new(spec: GibbsSpec, dt: f64, t_final: f64) -> Result<Self> {
        let p = Self {
            dt,
            t_final,
            record_every: 1,
            forcing: Forcing::Smoothed,
            spec,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every.max(1);
        self
    }

    pub fn with_forcing(mut self, forcing: Forcing) -> Self {
        self.forcing = forcing;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt", "must be positive and finite"));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::invalid("t_final", "must be nonnegative and finite"));
        }
        if self.record_every == 0 {
            return Err(Error::invalid("record_every", "must be positive"));
        }
        Ok(())
    }

    /// Number of steps taken: `t_final / dt` rounded to the nearest integer.
    pub fn n_steps(&self) -> u64 {
        (self.t_final / self.dt).round() as u64
    }
}

/// Default step: `10⁻³` up to 64 modes, shrinking like `1/N` beyond.
pub fn default_dt(n_modes: usize) -> f64 {
    if n_modes <= 64 {
        1e-3
    } else {
        1e-3 * 64.0 / n_modes as f64
    }
}

/// Evaluates the real forcing vector `m_n G_n / (πn)`.
#[derive(Debug, Clone)]
pub(crate) struct ForceKernel<'a> {
    spec: &'a GibbsSpec,
    forcing: Forcing,
    mask: Vec<f64>,
    field: Vec<f64>,
    re: Vec<f64>,
}

impl<'a> ForceKernel<'a> {
    pub(crate) fn new(spec: &'a GibbsSpec, forcing: Forcing) -> Self {
        let n = spec.n_modes();
        let mask = match forcing {
            Forcing::Smoothed => spec.smoothing().multipliers()[..n].to_vec(),
            Forcing::Projected => alloc::vec![1.0; n],
            Forcing::Free => alloc::vec![0.0; n],
        };
        Self {
            spec,
            forcing,
            mask,
            field: alloc::vec![0.0; spec.quad().n_quad()],
            re: alloc::vec![0.0; n],
        }
    }

    pub(crate) fn n_modes(&self) -> usize {
        self.mask.len()
    }

    /// Writes the forcing for state `u` into `out`.
    pub(crate) fn eval(&mut self, u: &[Complex64], out: &mut [f64]) {
        if self.forcing == Forcing::Free {
            out.iter_mut().for_each(|o| *o = 0.0);
            return;
        }
        for ((r, c), m) in self.re.iter_mut().zip(u).zip(&self.mask) {
            *r = c.re * m;
        }
        let quad = self.spec.quad();
        synthesize(quad, &self.re, &mut self.field);
        let alpha = self.spec.alpha();
        for v in self.field.iter_mut() {
            *v = nonlinearity(*v, alpha);
        }
        project_masked(quad, &self.field, &self.mask, out);
        for (i, (o, m)) in out.iter_mut().zip(&self.mask).enumerate() {
            *o *= m / (PI * (i + 1) as f64);
        }
    }
}

/// Strang splitting integrator for a fixed step.
///
/// `dt` may be negative, which runs the flow backwards; a step with `−dt`
/// undoes a step with `dt`.
#[derive(Debug, Clone)]
pub struct Stepper<'a> {
    kernel: ForceKernel<'a>,
    dt: f64,
    rotation: Vec<Complex64>,
    force: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(spec: &'a GibbsSpec, forcing: Forcing, dt: f64) -> Self {
        let n = spec.n_modes();
        let rotation = (1..=n).map(|k| half_turn_phase(k as f64 * dt)).collect();
        Self {
            kernel: ForceKernel::new(spec, forcing),
            dt,
            rotation,
            force: alloc::vec![0.0; n],
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn kick(&mut self, c: &mut [Complex64], tau: f64) {
        for (ci, f) in c.iter_mut().zip(&self.force) {
            ci.im -= tau * f;
        }
    }

    fn rotate(&self, c: &mut [Complex64]) {
        for (ci, r) in c.iter_mut().zip(&self.rotation) {
            *ci *= r;
        }
    }

    /// Advances `u` by `steps` steps.
    ///
    /// The closing half kick of one step and the opening half kick of the
    /// next see the same `Re u`, so one force evaluation per step suffices.
    pub fn advance(&mut self, u: &mut SpectralState, steps: u64) {
        assert_eq!(u.n_modes(), self.kernel.n_modes(), "state is not in E_N");
        if steps == 0 {
            return;
        }
        let half = 0.5 * self.dt;
        let c = u.coeffs_mut();
        self.kernel.eval(c, &mut self.force);
        for _ in 0..steps {
            self.kick(c, half);
            self.rotate(c);
            self.kernel.eval(c, &mut self.force);
            self.kick(c, half);
        }
    }
}

/// One Strang step of size `p.dt`.
pub fn flow_step(u: &SpectralState, p: &SimParams) -> SpectralState {
    let mut out = u.clone();
    Stepper::new(&p.spec, p.forcing, p.dt).advance(&mut out, 1);
    out
}

/// Scalar quantities recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    /// `‖u‖_{H^s}`.
    SobolevNorm(f64),
    /// Energy; `truncated` puts `S_N` inside the potential.
    Hamiltonian { truncated: bool },
    /// `|c_n|`.
    ModeModulus(usize),
    /// `‖S_N Re u‖_{L^{α+2}}`.
    SmoothedLpNorm,
    /// `‖S(τ)u‖_{L^p((0,2)×ball)}` of the current state.
    SpacetimeLp(f64),
    /// `‖u(t) − S(t)u_0‖_{H^s}`, the nonlinear part of the solution.
    FreeDeviation(f64),
}

impl Observable {
    pub fn name(&self) -> alloc::string::String {
        match self {
            Observable::SobolevNorm(s) => alloc::format!("sobolev_norm_s{s}"),
            Observable::Hamiltonian { truncated: true } => "hamiltonian".into(),
            Observable::Hamiltonian { truncated: false } => "hamiltonian_untruncated".into(),
            Observable::ModeModulus(n) => alloc::format!("mode_modulus_{n}"),
            Observable::SmoothedLpNorm => "smoothed_lp_norm".into(),
            Observable::SpacetimeLp(p) => alloc::format!("spacetime_l{p}_norm"),
            Observable::FreeDeviation(s) => alloc::format!("free_deviation_s{s}"),
        }
    }

    /// Value at time `t`, given the initial state for [`Observable::FreeDeviation`].
    pub fn evaluate(&self, u: &SpectralState, spec: &GibbsSpec, t: f64, u0: &SpectralState) -> f64 {
        match *self {
            Observable::SobolevNorm(s) => sobolev_norm(u, s),
            Observable::Hamiltonian { truncated } => hamiltonian(u, spec, truncated),
            Observable::ModeModulus(n) => u.coeff(n).norm(),
            Observable::SmoothedLpNorm => spec.smoothed_lp_norm(u),
            Observable::SpacetimeLp(p) => {
                let m = crate::norms::default_time_samples(u.n_modes());
                spacetime_lp_norm(u, spec.quad(), p, m)
            }
            Observable::FreeDeviation(s) => sobolev_norm(&u.difference(&free_evolve(u0, t)), s),
        }
    }
}

/// Recorded observables and the final state of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `series[k][i]` is observable `k` at `times[i]`.
    pub series: Vec<Vec<f64>>,
    pub final_state: SpectralState,
}

/// Runs `Φ_N` from `u0` to `p.t_final`, recording `observers` at `t = 0`,
/// every `p.record_every` steps, and at the final time.
pub fn evolve(u0: &SpectralState, p: &SimParams, observers: &[Observable]) -> Result<Trajectory> {
    p.validate()?;
    if u0.n_modes() != p.spec.n_modes() {
        return Err(Error::invalid("u0", "initial state is not in E_N"));
    }
    if !u0.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    let total = p.n_steps();
    let mut stepper = Stepper::new(&p.spec, p.forcing, p.dt);
    let mut u = u0.clone();
    let mut times = Vec::new();
    let mut series = alloc::vec![Vec::new(); observers.len()];
    let record = |t: f64, u: &SpectralState, times: &mut Vec<f64>, series: &mut Vec<Vec<f64>>| {
        times.push(t);
        for (obs, col) in observers.iter().zip(series.iter_mut()) {
            col.push(obs.evaluate(u, &p.spec, t, u0));
        }
    };
    record(0.0, &u, &mut times, &mut series);
    let mut done = 0u64;
    while done < total {
        let chunk = (p.record_every as u64).min(total - done);
        stepper.advance(&mut u, chunk);
        done += chunk;
        let t = done as f64 * p.dt;
        if !u.is_finite() {
            return Err(Error::NonFinite {
                time: t,
                stream_id: None,
            });
        }
        record(t, &u, &mut times, &mut series);
    }
    Ok(Trajectory {
        times,
        series,
        final_state: u,
    })
}

/// Largest relative deviation `|H(t) − H(0)| / |H(0)|` of the conserved
/// energy sampled every `sample_every` steps.
pub fn energy_drift(u0: &SpectralState, p: &SimParams, sample_every: usize) -> Result<f64> {
    let obs = [Observable::Hamiltonian {
        truncated: p.forcing.smoothed_potential(),
    }];
    let traj = evolve(u0, &p.clone().with_record_every(sample_every), &obs)?;
    let h = &traj.series[0];
    let h0 = h[0];
    Ok(h.iter().map(|v| (v - h0).abs()).fold(0.0, f64::max) / h0.abs())
}
