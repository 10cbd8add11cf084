//! Gauss–Legendre rules.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// Nodes (ascending) and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|&xi| mid + half * xi).collect(),
        w.iter().map(|&wi| half * wi).collect(),
    )
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Spectral integration matrix on the Gauss nodes of `[0, 1]`.
///
/// Entry `(j, k)` is `∫_0^{x_j} ℓ_k(t) dt`, where `ℓ_k` is the Lagrange
/// polynomial through the nodes. Multiplying nodal values of an integrand by
/// row `j` gives its running integral up to node `j`.
pub fn integration_matrix(nodes: &[f64]) -> Vec<Vec<f64>> {
    let m = nodes.len();
    let (gx, gw) = gauss_legendre_on(m, 0.0, 1.0);
    let mut out = alloc::vec![alloc::vec![0.0; m]; m];
    for (j, &xj) in nodes.iter().enumerate() {
        for (k, row_k) in out[j].iter_mut().enumerate() {
            // ℓ_k has degree m-1, so the m-point rule on [0, x_j] is exact.
            *row_k = gx
                .iter()
                .zip(&gw)
                .map(|(&t, &w)| xj * w * lagrange(nodes, k, xj * t))
                .sum();
        }
    }
    out
}

fn lagrange(nodes: &[f64], k: usize, x: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, &xi)| (x - xi) / (nodes[k] - xi))
        .product()
}
