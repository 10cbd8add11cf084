//! Run configuration: a flat TOML key-value file, every key optional.

use std::path::Path;

use gibbswave_core::dynamics::default_dt;
use gibbswave_core::experiments::InitialMeasure;
use gibbswave_core::{strichartz_sigma, Forcing};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Law of the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Gibbs,
    Gaussian,
}

impl From<Measure> for InitialMeasure {
    fn from(m: Measure) -> Self {
        match m {
            Measure::Gibbs => InitialMeasure::Gibbs,
            Measure::Gaussian => InitialMeasure::Gaussian,
        }
    }
}

/// Nonlinear term driving the truncated flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForcingKind {
    /// `S_N` applied inside and outside the nonlinearity.
    Smoothed,
    /// Plain Galerkin projection, no smoothing.
    Projected,
    /// Linear evolution.
    Free,
}

impl From<ForcingKind> for Forcing {
    fn from(f: ForcingKind) -> Self {
        match f {
            ForcingKind::Smoothed => Forcing::Smoothed,
            ForcingKind::Projected => Forcing::Projected,
            ForcingKind::Free => Forcing::Free,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Nonlinearity exponent, `F(w) = |w|^α w`.
    pub alpha: f64,
    /// Space-time Lebesgue exponent.
    pub p: f64,
    /// Sobolev index of the recorded norms.
    pub s: f64,
    /// Truncation `N`.
    pub n_modes: usize,
    /// Time step; defaults to `10⁻³` up to 64 modes and shrinks like `1/N` beyond.
    pub dt: Option<f64>,
    pub t_final: f64,
    /// Ensemble size (members for sample/invariance/growth, draws for tails).
    pub ensemble: usize,
    pub measure: Measure,
    pub forcing: ForcingKind,
    /// Steps between recorded samples.
    pub record_every: usize,
    /// Radial Gauss–Legendre order; defaults to `max(4N, 128)`.
    pub quad_order: Option<usize>,
    /// Worker threads; defaults to the available cores.
    pub workers: Option<usize>,
    pub histogram_bins: usize,
    /// Fewest exceedances a tail level must keep to enter the fit.
    pub tail_min_count: usize,
    pub reference_modes: usize,
    pub levels: Vec<usize>,
    pub crosscheck_modes: usize,
    pub crosscheck_t_final: f64,
    pub crosscheck_dt: f64,
    /// Repeat the invariance test at `dt/2`.
    pub half_dt_check: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            p: 5.0,
            s: 0.4,
            n_modes: 64,
            dt: None,
            t_final: 1.0,
            ensemble: 1000,
            measure: Measure::Gibbs,
            forcing: ForcingKind::Smoothed,
            record_every: 100,
            quad_order: None,
            workers: None,
            histogram_bins: 40,
            tail_min_count: 50,
            reference_modes: 256,
            levels: vec![32, 64, 128],
            crosscheck_modes: 16,
            crosscheck_t_final: 0.1,
            crosscheck_dt: 1e-4,
            half_dt_check: false,
        }
    }
}

impl Config {
    /// Parses TOML text, or the `config` object of a run manifest when the
    /// text is JSON, and validates the result.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Config = if text.trim_start().starts_with('{') {
            let mut manifest: serde_json::Value = serde_json::from_str(text)
                .map_err(|e| CliError::Config(format!("manifest: {e}")))?;
            let snapshot = manifest
                .get_mut("config")
                .map(serde_json::Value::take)
                .ok_or_else(|| CliError::Config("manifest has no `config` object".into()))?;
            serde_json::from_value(snapshot)
                .map_err(|e| CliError::Config(format!("manifest config: {e}")))?
        } else {
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Time step for a run at truncation `n_modes`.
    pub fn dt_for(&self, n_modes: usize) -> f64 {
        self.dt.unwrap_or_else(|| default_dt(n_modes))
    }

    /// `σ = 3/2 − 4/p`.
    pub fn sigma(&self) -> f64 {
        strichartz_sigma(self.p)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if !(self.alpha > 0.0 && self.alpha < 3.0) {
            return bad(format!(
                "alpha = {} is outside (0, 3); admissible parameters satisfy max(4,2α) < p < 6",
                self.alpha
            ));
        }
        let lower = f64::max(4.0, 2.0 * self.alpha);
        if !(self.p > lower && self.p < 6.0) {
            return bad(format!(
                "p = {} with alpha = {} violates max(4,2α) < p < 6, i.e. {lower} < p < 6",
                self.p, self.alpha
            ));
        }
        if !self.s.is_finite() {
            return bad("s must be finite".into());
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("dt = {dt} must be positive"));
            }
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return bad(format!("t_final = {} must be nonnegative", self.t_final));
        }
        if !(self.crosscheck_dt > 0.0
            && self.crosscheck_t_final >= 0.0
            && self.crosscheck_t_final.is_finite())
        {
            return bad("crosscheck_dt must be positive and crosscheck_t_final nonnegative".into());
        }
        let positive = [
            ("n_modes", self.n_modes),
            ("ensemble", self.ensemble),
            ("record_every", self.record_every),
            ("histogram_bins", self.histogram_bins),
            ("tail_min_count", self.tail_min_count),
            ("reference_modes", self.reference_modes),
            ("crosscheck_modes", self.crosscheck_modes),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return bad(format!("{name} must be positive"));
        }
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        if self.levels.is_empty()
            || self
                .levels
                .iter()
                .any(|&n| n == 0 || n > self.reference_modes)
        {
            return bad(format!(
                "levels must be nonempty and lie in 1..={}",
                self.reference_modes
            ));
        }
        if let Some(q) = self.quad_order {
            let needed = 2 * self.n_modes.max(self.crosscheck_modes);
            if q < needed {
                return bad(format!(
                    "quad_order = {q} is below the floor of 2 nodes per mode ({needed})"
                ));
            }
        }
        Ok(())
    }
}
