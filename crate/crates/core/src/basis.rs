//! Radial Dirichlet eigenbasis of the unit ball and the radial quadrature it
//! is sampled on.
//!
//! The radial eigenfunctions are `e_n(r) = sin(nπr) / (r √(2π))` with
//! eigenvalue `(πn)²`; the constant makes `4π ∫_0^1 e_n(r)² r² dr = 1`.
//! [`build_basis`] re-checks orthonormality on the quadrature instead of
//! trusting the closed form.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_on;

/// Below this radius `sin(nπr)/r` is evaluated from its Taylor series.
pub const SERIES_RADIUS: f64 = 1e-3;

/// Orthonormality tolerance enforced by [`build_basis`].
pub const GRAM_TOLERANCE: f64 = 1e-8;

/// `(πn)²`.
pub fn eigenvalue(n: usize) -> f64 {
    let k = PI * n as f64;
    k * k
}

/// `e_n(r)`, the `L²(ball)`-normalized radial eigenfunction.
pub fn eigenfunction(n: usize, r: f64) -> f64 {
    let k = PI * n as f64;
    let inv_norm = 1.0 / (2.0 * PI).sqrt();
    if r.abs() < SERIES_RADIUS {
        k * sinc_series(k * r) * inv_norm
    } else {
        (k * r).sin() / r * inv_norm
    }
}

/// `sin(x)/x` summed term by term.
fn sinc_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term: f64 = 1.0;
    let mut sum: f64 = 1.0;
    let mut k = 1.0;
    while term.abs() > 1e-18 * sum.abs() {
        term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
        sum += term;
        k += 1.0;
    }
    sum
}

/// Smallest quadrature order accepted for `n_max` modes.
pub fn minimum_quadrature_order(n_max: usize) -> usize {
    2 * n_max
}

/// Default order: four nodes per mode, at least 128.
pub fn default_quadrature_order(n_max: usize) -> usize {
    (4 * n_max).max(128)
}

/// Gauss–Legendre nodes on (0, 1) with the ball measure `4πr² dr` folded into
/// the weights, and the eigenfunctions sampled on them.
#[derive(Debug, Clone)]
pub struct RadialQuadrature {
    n_max: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Row `n-1` holds `e_n(r_j)`.
    samples: Vec<f64>,
    /// Row `n-1` holds `ω_j e_n(r_j)`.
    weighted: Vec<f64>,
    gram_deviation: f64,
}

/// Builds the quadrature for modes `1..=n_max` with `n_quad` nodes.
///
/// Fails with [`Error::GramCheck`] when the rule cannot resolve the products
/// `e_m e_n` to [`GRAM_TOLERANCE`].
pub fn build_basis(n_max: usize, n_quad: usize) -> Result<RadialQuadrature> {
    if n_max == 0 {
        return Err(Error::invalid("n_max", "at least one mode is required"));
    }
    let floor = minimum_quadrature_order(n_max);
    if n_quad < floor {
        return Err(Error::invalid(
            "n_quad",
            alloc::format!("{n_quad} nodes is below the floor 2*n_max = {floor}"),
        ));
    }
    let (nodes, raw) = gauss_legendre_on(n_quad, 0.0, 1.0);
    let weights: Vec<f64> = nodes
        .iter()
        .zip(&raw)
        .map(|(&r, &w)| 4.0 * PI * r * r * w)
        .collect();
    let mut samples = Vec::with_capacity(n_max * n_quad);
    for n in 1..=n_max {
        samples.extend(nodes.iter().map(|&r| eigenfunction(n, r)));
    }
    let weighted: Vec<f64> = samples
        .chunks(n_quad)
        .flat_map(|row| row.iter().zip(&weights).map(|(e, w)| e * w))
        .collect();

    let mut quad = RadialQuadrature {
        n_max,
        nodes,
        weights,
        samples,
        weighted,
        gram_deviation: 0.0,
    };
    let deviation = quad.max_gram_deviation();
    if deviation.is_nan() || deviation > GRAM_TOLERANCE {
        return Err(Error::GramCheck {
            max_deviation: deviation,
            n_quad,
        });
    }
    quad.gram_deviation = deviation;
    Ok(quad)
}

impl RadialQuadrature {
    /// Quadrature at the default order for `n_max` modes.
    pub fn with_default_order(n_max: usize) -> Result<Self> {
        build_basis(n_max, default_quadrature_order(n_max))
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn n_quad(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `e_n` on the nodes, `1 ≤ n ≤ n_max`.
    pub fn samples(&self, n: usize) -> &[f64] {
        let q = self.nodes.len();
        &self.samples[(n - 1) * q..n * q]
    }

    /// `ω_j e_n(r_j)`, the rows used for projections.
    pub fn weighted_samples(&self, n: usize) -> &[f64] {
        let q = self.nodes.len();
        &self.weighted[(n - 1) * q..n * q]
    }

    /// Largest `|⟨e_m, e_n⟩_quad − δ_mn|` seen at construction.
    pub fn gram_deviation(&self) -> f64 {
        self.gram_deviation
    }

    /// `Σ_j ω_j e_m(r_j) e_n(r_j)`.
    pub fn inner(&self, m: usize, n: usize) -> f64 {
        self.weighted_samples(m)
            .iter()
            .zip(self.samples(n))
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `Σ_j ω_j g(r_j)`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Projection coefficients `⟨g, e_n⟩` of nodal values, `n = 1..=modes`.
    pub fn project(&self, values: &[f64], modes: usize) -> Vec<f64> {
        (1..=modes)
            .map(|n| {
                self.weighted_samples(n)
                    .iter()
                    .zip(values)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn max_gram_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for m in 1..=self.n_max {
            for n in m..=self.n_max {
                let target = if m == n { 1.0 } else { 0.0 };
                let d = (self.inner(m, n) - target).abs();
                if d.is_nan() {
                    return f64::NAN;
                }
                worst = worst.max(d);
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_eigenvalue() {
        assert!((eigenvalue(3) - 88.826_440_3).abs() < 1e-6);
    }

    #[test]
    fn origin_limit_of_first_mode() {
        let limit = (PI / 2.0).sqrt();
        assert!((eigenfunction(1, 0.0) - limit).abs() < 1e-15);
        assert!((eigenfunction(1, 1e-9) - limit).abs() < 1e-12);
    }

    #[test]
    fn series_and_closed_form_agree_at_switch() {
        for n in [1usize, 7, 64, 256] {
            let below = eigenfunction(n, SERIES_RADIUS * (1.0 - 1e-12));
            let above = eigenfunction(n, SERIES_RADIUS * (1.0 + 1e-12));
            assert!(
                (below - above).abs() <= 1e-9 * below.abs().max(1.0),
                "n={n}"
            );
        }
    }

    #[test]
    fn vanishes_on_boundary() {
        for n in 1..20 {
            assert!(eigenfunction(n, 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn gram_identity_at_default_order() {
        let quad = RadialQuadrature::with_default_order(64).unwrap();
        assert!(quad.gram_deviation() <= GRAM_TOLERANCE);
        assert!(quad.weights().iter().all(|&w| w > 0.0));
        assert!((quad.inner(1, 1) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn under_resolved_rule_is_rejected() {
        // At the 2-nodes-per-mode floor a small basis misses the Gram tolerance.
        assert!(matches!(build_basis(16, 32), Err(Error::GramCheck { .. })));
        assert!(build_basis(64, 128).is_ok());
        assert!(matches!(
            build_basis(64, 100),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            build_basis(0, 128),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn ball_volume_from_weights() {
        let quad = build_basis(4, 128).unwrap();
        let ones = alloc::vec![1.0; quad.n_quad()];
        assert!((quad.integrate(&ones) - 4.0 * PI / 3.0).abs() < 1e-13);
    }
}
