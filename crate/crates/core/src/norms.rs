//! Sobolev and Lebesgue norms, and the free half-wave group `S(t) = e^{−it√(−Δ)}`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::basis::RadialQuadrature;
use crate::fft::fft_in_place;
use crate::galerkin::synthesize;
use crate::state::SpectralState;

/// `(Σ_n (πn)^{2s} |c_n|²)^{1/2}`.
pub fn sobolev_norm(u: &SpectralState, s: f64) -> f64 {
    u.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let weight = if s == 0.0 {
                1.0
            } else {
                (PI * (i + 1) as f64).powf(2.0 * s)
            };
            weight * c.norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

/// `r2^{p/2}`; small integer `p` avoids `powf`.
pub(crate) fn pow_half(r2: f64, p: f64) -> f64 {
    if p == p.round() && (1.0..=32.0).contains(&p) {
        let k = p as i32;
        if k % 2 == 0 {
            r2.powi(k / 2)
        } else {
            r2.powi(k / 2) * r2.sqrt()
        }
    } else {
        r2.powf(0.5 * p)
    }
}

fn check_coverage(u: &SpectralState, quad: &RadialQuadrature) {
    assert!(
        u.n_modes() <= quad.n_max(),
        "quadrature resolves {} modes, state has {}",
        quad.n_max(),
        u.n_modes()
    );
}

/// Nodal values of `Re u` and `Im u` on the radial grid.
pub fn nodal_values(u: &SpectralState, quad: &RadialQuadrature) -> (Vec<f64>, Vec<f64>) {
    check_coverage(u, quad);
    let q = quad.n_quad();
    let (mut re, mut im) = (alloc::vec![0.0; q], alloc::vec![0.0; q]);
    let a: Vec<f64> = u.coeffs().iter().map(|c| c.re).collect();
    let b: Vec<f64> = u.coeffs().iter().map(|c| c.im).collect();
    synthesize(quad, &a, &mut re);
    synthesize(quad, &b, &mut im);
    (re, im)
}

/// `(Σ_j ω_j |u(r_j)|^p)^{1/p}`, the `L^p` norm of the complex field on the ball.
pub fn lp_norm_ball(u: &SpectralState, quad: &RadialQuadrature, p: f64) -> f64 {
    assert!(p >= 1.0, "L^p norm needs p >= 1, got {p}");
    let (re, im) = nodal_values(u, quad);
    let sum: f64 = quad
        .weights()
        .iter()
        .zip(re.iter().zip(&im))
        .map(|(w, (x, y))| w * pow_half(x * x + y * y, p))
        .sum();
    sum.powf(1.0 / p)
}

/// `L^p` norm of `Re u` only; this is the norm that enters the Hamiltonian.
pub fn lp_norm_ball_real(u: &SpectralState, quad: &RadialQuadrature, p: f64) -> f64 {
    assert!(p >= 1.0, "L^p norm needs p >= 1, got {p}");
    check_coverage(u, quad);
    let mut re = alloc::vec![0.0; quad.n_quad()];
    let a: Vec<f64> = u.coeffs().iter().map(|c| c.re).collect();
    synthesize(quad, &a, &mut re);
    let sum: f64 = quad
        .weights()
        .iter()
        .zip(&re)
        .map(|(w, x)| w * pow_half(x * x, p))
        .sum();
    sum.powf(1.0 / p)
}

/// `e^{−iπx}` with the quarter turns of `x mod 2` returned exactly.
pub(crate) fn half_turn_phase(x: f64) -> Complex64 {
    let r = num_traits::Euclid::rem_euclid(&x, &2.0);
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if r == 0.5 {
        Complex64::new(0.0, -1.0)
    } else if r == 1.0 {
        Complex64::new(-1.0, 0.0)
    } else if r == 1.5 {
        Complex64::new(0.0, 1.0)
    } else {
        let (s, c) = (PI * r).sin_cos();
        Complex64::new(c, -s)
    }
}

/// `S(t)u`: `c_n ↦ e^{−iπnt} c_n`. Two-periodic in `t`.
pub fn free_evolve(u: &SpectralState, t: f64) -> SpectralState {
    let coeffs = u
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * half_turn_phase((i + 1) as f64 * t))
        .collect();
    SpectralState::from_vec_unchecked(coeffs)
}

/// Smallest admissible number of time samples for a state with `n_modes` modes.
pub fn min_time_samples(n_modes: usize) -> usize {
    (2 * n_modes).next_power_of_two().max(8)
}

/// Default number of time samples: `4N` rounded up to a power of two, at least 64.
pub fn default_time_samples(n_modes: usize) -> usize {
    (4 * n_modes).next_power_of_two().max(64)
}

/// `(∫_0^2 ‖S(t)u0‖^p_{L^p(ball)} dt)^{1/p}`.
///
/// `t ↦ |S(t)u0|^p` is 2-periodic, so the time integral uses the trapezoidal
/// rule on `t_samples` equispaced points, which is spectrally accurate for
/// smooth periodic integrands. The samples `u(t_k, r_j)` for all `k` come from
/// one FFT per radial node. `t_samples` must be a power of two no smaller than
/// [`min_time_samples`].
pub fn spacetime_lp_norm(
    u0: &SpectralState,
    quad: &RadialQuadrature,
    p: f64,
    t_samples: usize,
) -> f64 {
    spacetime_lp_integral(u0, quad, p, t_samples).powf(1.0 / p)
}

fn spacetime_lp_integral(
    u0: &SpectralState,
    quad: &RadialQuadrature,
    p: f64,
    t_samples: usize,
) -> f64 {
    assert!(p >= 1.0, "L^p norm needs p >= 1, got {p}");
    check_coverage(u0, quad);
    let n = u0.n_modes();
    assert!(
        t_samples.is_power_of_two() && t_samples >= min_time_samples(n),
        "t_samples = {t_samples} must be a power of two >= {}",
        min_time_samples(n)
    );
    let dt = 2.0 / t_samples as f64;
    let mut buf = alloc::vec![Complex64::new(0.0, 0.0); t_samples];
    let mut total = 0.0;
    for (j, &w) in quad.weights().iter().enumerate() {
        buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        // t_k = 2k/M, so e^{−iπn t_k} = e^{−2πi nk/M}.
        for (i, c) in u0.coeffs().iter().enumerate() {
            let mode = i + 1;
            buf[mode % t_samples] += c * quad.samples(mode)[j];
        }
        fft_in_place(&mut buf);
        let time_integral: f64 = buf.iter().map(|z| pow_half(z.norm_sqr(), p)).sum::<f64>() * dt;
        total += w * time_integral;
    }
    total
}

/// [`spacetime_lp_norm`] with the number of time samples doubled from the
/// default until the relative change drops below `rel_tol`.
///
/// Returns the norm and the number of time samples used.
pub fn spacetime_lp_norm_converged(
    u0: &SpectralState,
    quad: &RadialQuadrature,
    p: f64,
    rel_tol: f64,
) -> (f64, usize) {
    let mut m = default_time_samples(u0.n_modes());
    let mut prev = spacetime_lp_norm(u0, quad, p, m);
    while m < (1 << 20) {
        m *= 2;
        let next = spacetime_lp_norm(u0, quad, p, m);
        if (next - prev).abs() <= rel_tol * next.abs() {
            return (next, m);
        }
        prev = next;
    }
    (prev, m)
}
