use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::state::SpectralState;

fn bump(y: f64) -> f64 {
    if y > 0.0 {
        (-1.0 / y).exp()
    } else {
        0.0
    }
}

/// Smooth cutoff: 1 on `|x| ≤ 1/2`, 0 on `|x| ≥ 1`, C^∞ and monotone in
/// between.
pub fn chi(x: f64) -> f64 {
    let a = x.abs();
    let inside = bump(2.0 * (1.0 - a));
    let outside = bump(2.0 * a - 1.0);
    if inside == 0.0 {
        0.0
    } else {
        inside / (inside + outside)
    }
}

/// Multipliers `m_n = χ(n²/N²)` of the smoothing operator `S_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingProfile {
    n_cut: usize,
    multipliers: Vec<f64>,
}

impl SmoothingProfile {
    /// Profile with cutoff `n_cut`, tabulated for modes `1..=len`.
    pub fn new(n_cut: usize, len: usize) -> Self {
        assert!(n_cut >= 1, "smoothing cutoff must be positive");
        let nc = n_cut as f64;
        let multipliers = (1..=len)
            .map(|n| {
                let x = (n * n) as f64 / (nc * nc);
                chi(x)
            })
            .collect();
        Self { n_cut, multipliers }
    }

    /// Multiplier 1 on every tabulated mode; stands in for "no smoothing".
    pub fn identity(len: usize) -> Self {
        Self {
            n_cut: usize::MAX,
            multipliers: alloc::vec![1.0; len],
        }
    }

    pub fn n_cut(&self) -> usize {
        self.n_cut
    }

    pub fn len(&self) -> usize {
        self.multipliers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multipliers.is_empty()
    }

    /// `m_n`, for `1 ≤ n ≤ len`.
    pub fn multiplier(&self, n: usize) -> f64 {
        self.multipliers[n - 1]
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }

    /// Largest mode with a nonzero multiplier.
    pub fn support(&self) -> usize {
        self.multipliers
            .iter()
            .rposition(|&m| m > 0.0)
            .map_or(0, |i| i + 1)
    }

    /// `S_N u`.
    pub fn apply(&self, u: &SpectralState) -> SpectralState {
        assert!(
            u.n_modes() <= self.len(),
            "profile covers {} modes, state has {}",
            self.len(),
            u.n_modes()
        );
        let coeffs = u
            .coeffs()
            .iter()
            .zip(&self.multipliers)
            .map(|(c, m)| c * m)
            .collect();
        SpectralState::from_vec_unchecked(coeffs)
    }
}
