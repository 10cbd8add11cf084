//! Spectral-Galerkin simulation of the radial defocusing wave equation
//!
//! ```text
//!     (∂²_t − Δ) w + |w|^α w = 0   on the unit ball of R³, Dirichlet boundary
//! ```
//!
//! written as the first-order complex equation for `u = w + i (−Δ)^{-1/2} ∂_t w`,
//! truncated to the span `E_N` of the first `N` radial Dirichlet eigenfunctions,
//! together with the Gaussian and Gibbs measures attached to it and the Monte
//! Carlo machinery used to probe invariance, tails and long-time growth.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel execution, files and
//! the command line live in the `gibbswave` crate; ensemble drivers here are
//! generic over [`ensemble::EnsembleRunner`] so they run unchanged on either
//! side.
//!
//! Float math goes through `num_traits::Float` (backed by `libm`); when std is
//! linked its inherent methods take precedence, hence the `allow` on those
//! imports.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod basis;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod fft;
mod galerkin;
pub mod norms;
pub mod picard;
pub mod quadrature;
pub mod sampling;
pub mod smoothing;
pub mod state;
pub mod stats;

pub use basis::{
    build_basis, default_quadrature_order, eigenfunction, eigenvalue, RadialQuadrature,
};
pub use dynamics::{
    evolve, flow_step, hamiltonian, nonlinearity, Forcing, Observable, SimParams, Stepper,
    Trajectory,
};
pub use ensemble::{EnsembleRunner, Sequential};
pub use error::{Error, Result};
pub use norms::{
    free_evolve, lp_norm_ball, lp_norm_ball_real, sobolev_norm, spacetime_lp_norm,
    spacetime_lp_norm_converged,
};
pub use picard::{picard_duhamel, PicardOptions, PicardSolution};
pub use sampling::{
    gibbs_weight, partition_estimate, sample_gaussian, sample_gibbs, GibbsSpec, PartitionEstimate,
    SeededStream,
};
pub use smoothing::{chi, SmoothingProfile};
pub use state::{complex_to_pair, pair_to_complex, FieldPair, SpectralState};
pub use stats::{ks_two_sample, moment_growth, tail_fit, KsResult, MomentEstimate, TailFit};

/// Strichartz regularity `σ = 3/2 − 4/p` paired with the space-time exponent `p`.
pub fn strichartz_sigma(p: f64) -> f64 {
    1.5 - 4.0 / p
}
