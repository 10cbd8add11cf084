//! Coefficient representation of states in `E_N`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `u = Σ_{n=1}^N c_n e_n`, stored as `c_1..c_N`.
///
/// Writing `c_n = a_n + i b_n`, the real parts are the coefficients of the
/// displacement `w` and `πn b_n` those of the velocity `∂_t w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    coeffs: Vec<Complex64>,
}

impl SpectralState {
    pub fn zeros(n_modes: usize) -> Self {
        Self {
            coeffs: alloc::vec![Complex64::new(0.0, 0.0); n_modes],
        }
    }

    /// The eigenfunction `e_mode` inside `E_{n_modes}`.
    pub fn basis_vector(n_modes: usize, mode: usize) -> Self {
        assert!(
            (1..=n_modes).contains(&mode),
            "mode {mode} outside 1..={n_modes}"
        );
        let mut u = Self::zeros(n_modes);
        u.coeffs[mode - 1] = Complex64::new(1.0, 0.0);
        u
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Ok(Self { coeffs })
        } else {
            Err(Error::NonFiniteInput)
        }
    }

    pub(crate) fn from_vec_unchecked(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn n_modes(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// `c_n` for `1 ≤ n ≤ N`.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs[n - 1]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// The state with `Im c_n` set to zero.
    pub fn real_part(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Complex64::new(c.re, 0.0))
                .collect(),
        }
    }

    /// Keeps the first `n` modes, padding with zeros if `n` exceeds `N`.
    pub fn resized(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n, Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Coefficientwise difference; the shorter state is zero-padded.
    pub fn difference(&self, other: &Self) -> Self {
        let n = self.n_modes().max(other.n_modes());
        let a = self.resized(n);
        let b = other.resized(n);
        Self {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        }
    }
}

/// Real displacement/velocity coefficients `(w_n, ∂_t w_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPair {
    pub w: Vec<f64>,
    pub wt: Vec<f64>,
}

/// `c_n = w_n + i wt_n / (πn)`.
pub fn pair_to_complex(pair: &FieldPair) -> SpectralState {
    assert_eq!(
        pair.w.len(),
        pair.wt.len(),
        "displacement and velocity lengths differ"
    );
    let coeffs = pair
        .w
        .iter()
        .zip(&pair.wt)
        .enumerate()
        .map(|(i, (&w, &wt))| Complex64::new(w, wt / (PI * (i + 1) as f64)))
        .collect();
    SpectralState { coeffs }
}

/// Inverse of [`pair_to_complex`]: `(Re c_n, πn Im c_n)`.
pub fn complex_to_pair(u: &SpectralState) -> FieldPair {
    let w = u.coeffs.iter().map(|c| c.re).collect();
    let wt = u
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| PI * (i + 1) as f64 * c.im)
        .collect();
    FieldPair { w, wt }
}
