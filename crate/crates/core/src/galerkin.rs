//! Transforms between coefficients and nodal values on the radial grid.

use crate::basis::RadialQuadrature;

/// `out_j = Σ_n values[n-1] e_n(r_j)`. Zero coefficients are skipped.
pub(crate) fn synthesize(quad: &RadialQuadrature, values: &[f64], out: &mut [f64]) {
    debug_assert!(values.len() <= quad.n_max());
    out.iter_mut().for_each(|v| *v = 0.0);
    for (i, &a) in values.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (o, e) in out.iter_mut().zip(quad.samples(i + 1)) {
            *o += a * e;
        }
    }
}

/// `out[n-1] = Σ_j ω_j e_n(r_j) nodal_j`, only for modes with a nonzero mask.
pub(crate) fn project_masked(
    quad: &RadialQuadrature,
    nodal: &[f64],
    mask: &[f64],
    out: &mut [f64],
) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = if mask[i] == 0.0 {
            0.0
        } else {
            quad.weighted_samples(i + 1)
                .iter()
                .zip(nodal)
                .map(|(a, b)| a * b)
                .sum()
        };
    }
}
