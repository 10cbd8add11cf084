//! One function per subcommand. Each writes its CSV files into the output
//! directory and its summary scalars into the manifest.

use std::sync::Arc;

use gibbswave_core::experiments::{
    galerkin_convergence, gaussian_norm_samples, growth_tracker, invariance_observables,
    invariance_test, InvarianceReport, INVARIANCE_LEVEL,
};
use gibbswave_core::sampling::SeededStream;
use gibbswave_core::stats::{median, TailFit};
use gibbswave_core::{
    build_basis, default_quadrature_order, evolve, hamiltonian, picard_duhamel, sample_gaussian,
    sample_gibbs, sobolev_norm, tail_fit, EnsembleRunner, Forcing, GibbsSpec, Observable,
    PicardOptions, RadialQuadrature, SimParams, SpectralState,
};

use crate::config::{Config, Measure};
use crate::error::CliError;
use crate::output::{fmt_f64, Manifest, OutputDir};

/// The experiment subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Draw μ_N or ρ_N ensembles.
    Sample,
    /// Evolve a single trajectory.
    Evolve,
    /// KS comparison of ensembles at t = 0 and t = t_final.
    Invariance,
    /// Gaussian tail fits of Sobolev and space-time norms.
    Tails,
    /// Galerkin convergence table and splitting/Picard cross-check.
    Converge,
    /// Long-horizon growth against the logarithmic envelope.
    Growth,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Evolve => "evolve",
            Command::Invariance => "invariance",
            Command::Tails => "tails",
            Command::Converge => "converge",
            Command::Growth => "growth",
        }
    }
}

/// Shared inputs of every subcommand.
pub struct Context<'a, R> {
    pub config: &'a Config,
    pub seed: u64,
    pub runner: &'a R,
}

impl<R: EnsembleRunner> Context<'_, R> {
    fn spec(&self, n_modes: usize) -> Result<GibbsSpec, CliError> {
        let quad = Arc::new(quadrature(self.config, n_modes)?);
        Ok(GibbsSpec::new(self.config.alpha, n_modes, quad)?)
    }

    fn sim(&self, spec: GibbsSpec, dt: f64) -> Result<SimParams, CliError> {
        Ok(SimParams::new(spec, dt, self.config.t_final)?
            .with_record_every(self.config.record_every)
            .with_forcing(self.config.forcing.into()))
    }

    fn draw(
        &self,
        spec: &GibbsSpec,
        id: u64,
    ) -> Result<(SpectralState, u64), gibbswave_core::Error> {
        draw(self.config.measure, self.seed, spec, id)
    }
}

/// Member `id` of the initial ensemble and the proposals it took.
fn draw(
    measure: Measure,
    seed: u64,
    spec: &GibbsSpec,
    id: u64,
) -> Result<(SpectralState, u64), gibbswave_core::Error> {
    let stream = SeededStream::new(seed, id);
    match measure {
        Measure::Gibbs => sample_gibbs(spec, stream),
        Measure::Gaussian => Ok((sample_gaussian(spec, stream), 1)),
    }
    .map_err(|e| e.with_stream(id))
}

pub fn run<R: EnsembleRunner>(
    command: Command,
    ctx: &Context<'_, R>,
    out: &mut OutputDir,
    manifest: &mut Manifest,
) -> Result<(), CliError> {
    match command {
        Command::Sample => sample(ctx, out, manifest),
        Command::Evolve => evolve_one(ctx, out, manifest),
        Command::Invariance => invariance(ctx, out, manifest),
        Command::Tails => tails(ctx, out, manifest),
        Command::Converge => converge(ctx, out, manifest),
        Command::Growth => growth(ctx, out, manifest),
    }
}

fn state_rows(stream_id: u64, u: &SpectralState) -> impl Iterator<Item = Vec<String>> + '_ {
    u.coeffs().iter().enumerate().map(move |(i, c)| {
        vec![
            stream_id.to_string(),
            (i + 1).to_string(),
            fmt_f64(c.re),
            fmt_f64(c.im),
        ]
    })
}

fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo {
        (hi - lo) / bins as f64
    } else {
        1.0
    };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, c)| (lo + k as f64 * width, lo + (k + 1) as f64 * width, c))
        .collect()
}

fn sample<R: EnsembleRunner>(
    ctx: &Context<'_, R>,
    out: &mut OutputDir,
    m: &mut Manifest,
) -> Result<(), CliError> {
    let c = ctx.config;
    let spec = ctx.spec(c.n_modes)?;
    let seed = ctx.seed;
    let draws = ctx
        .runner
        .run(c.ensemble, |id| draw(c.measure, seed, &spec, id));
    let draws: Vec<(SpectralState, u64)> = draws.into_iter().collect::<Result<_, _>>()?;

    out.write_csv(
        "coefficients.csv",
        &["stream_id", "mode", "re", "im"],
        draws
            .iter()
            .enumerate()
            .flat_map(|(id, (u, _))| state_rows(id as u64, u)),
    )?;
    let norms: Vec<f64> = draws.iter().map(|(u, _)| sobolev_norm(u, c.s)).collect();
    out.write_csv(
        "norms.csv",
        &[
            "stream_id",
            "proposals",
            "sobolev_norm",
            "smoothed_lp_norm",
            "hamiltonian",
        ],
        draws
            .iter()
            .zip(&norms)
            .enumerate()
            .map(|(id, ((u, a), n))| {
                vec![
                    id.to_string(),
                    a.to_string(),
                    fmt_f64(*n),
                    fmt_f64(spec.smoothed_lp_norm(u)),
                    fmt_f64(hamiltonian(u, &spec, true)),
                ]
            }),
    )?;
    out.write_csv(
        "histogram.csv",
        &["bin_lower", "bin_upper", "count"],
        histogram(&norms, c.histogram_bins)
            .into_iter()
            .map(|(a, b, k)| vec![fmt_f64(a), fmt_f64(b), k.to_string()]),
    )?;
    let proposals: u64 = draws.iter().map(|(_, a)| a).sum();
    m.record("members", draws.len());
    m.record("acceptance_rate", draws.len() as f64 / proposals as f64);
    m.record(
        "mean_sobolev_norm",
        norms.iter().sum::<f64>() / norms.len() as f64,
    );
    Ok(())
}

fn evolve_one<R: EnsembleRunner>(
    ctx: &Context<'_, R>,
    out: &mut OutputDir,
    m: &mut Manifest,
) -> Result<(), CliError> {
    let c = ctx.config;
    let spec = ctx.spec(c.n_modes)?;
    let (u0, _) = ctx.draw(&spec, 0)?;
    let sim = ctx.sim(spec, c.dt_for(c.n_modes))?;
    let observables = [
        Observable::SobolevNorm(c.s),
        Observable::Hamiltonian {
            truncated: sim.forcing.smoothed_potential(),
        },
        Observable::ModeModulus(1),
        Observable::SmoothedLpNorm,
        Observable::FreeDeviation(c.s),
    ];
    let traj = evolve(&u0, &sim, &observables).map_err(|e| e.with_stream(0))?;
    out.write_csv(
        "initial_state.csv",
        &["stream_id", "mode", "re", "im"],
        state_rows(0, &u0),
    )?;
    out.write_csv(
        "final_state.csv",
        &["stream_id", "mode", "re", "im"],
        state_rows(0, &traj.final_state),
    )?;
    out.write_csv(
        "series.csv",
        &["stream_id", "observable", "time", "value"],
        observables.iter().zip(&traj.series).flat_map(|(obs, col)| {
            let name = obs.name();
            traj.times
                .iter()
                .zip(col)
                .map(move |(t, v)| vec!["0".to_string(), name.clone(), fmt_f64(*t), fmt_f64(*v)])
        }),
    )?;
    let h = &traj.series[1];
    let drift = h.iter().map(|v| (v - h[0]).abs()).fold(0.0, f64::max) / h[0].abs();
    m.record("steps", sim.n_steps());
    m.record("energy_drift", drift);
    m.record(
        "final_sobolev_norm",
        *traj.series[0].last().unwrap_or(&f64::NAN),
    );
    Ok(())
}

fn ks_rows(report: &InvarianceReport) -> Vec<Vec<String>> {
    report
        .observables
        .iter()
        .zip(&report.results)
        .zip(report.adjusted_p_values())
        .map(|((obs, r), adj)| {
            vec![
                obs.name(),
                fmt_f64(r.statistic),
                fmt_f64(r.p_value),
                fmt_f64(adj),
                r.n1.to_string(),
                r.n2.to_string(),
            ]
        })
        .collect()
}

const KS_HEADER: [&str; 6] = [
    "observable",
    "statistic",
    "p_value",
    "adjusted_p_value",
    "n1",
    "n2",
];

fn invariance<R: EnsembleRunner>(
    ctx: &Context<'_, R>,
    out: &mut OutputDir,
    m: &mut Manifest,
) -> Result<(), CliError> {
    let c = ctx.config;
    let spec = ctx.spec(c.n_modes)?;
    let observables = invariance_observables(c.s);
    let run = |dt: f64| -> Result<InvarianceReport, CliError> {
        let sim = ctx.sim(spec.clone(), dt)?;
        Ok(invariance_test(
            &sim,
            c.ensemble,
            &observables,
            c.measure.into(),
            ctx.seed,
            ctx.runner,
        )?)
    };
    let dt = c.dt_for(c.n_modes);
    let report = run(dt)?;
    out.write_csv("ks.csv", &KS_HEADER, ks_rows(&report))?;
    out.write_csv(
        "samples.csv",
        &["stream_id", "observable", "initial", "evolved"],
        report.observables.iter().enumerate().flat_map(|(k, obs)| {
            let name = obs.name();
            let (a, b) = (&report.initial[k], &report.evolved[k]);
            a.iter().zip(b).enumerate().map(move |(id, (x, y))| {
                vec![id.to_string(), name.clone(), fmt_f64(*x), fmt_f64(*y)]
            })
        }),
    )?;
    let consistent = report.consistent(INVARIANCE_LEVEL);
    let min_p = report.adjusted_p_values().into_iter().fold(1.0, f64::min);
    m.record("consistent", consistent);
    m.record("min_adjusted_p_value", min_p);
    m.record("level", INVARIANCE_LEVEL);
    if c.half_dt_check {
        let half = run(0.5 * dt)?;
        out.write_csv("ks_half_dt.csv", &KS_HEADER, ks_rows(&half))?;
        let consistent_half = half.consistent(INVARIANCE_LEVEL);
        m.record("consistent_half_dt", consistent_half);
        m.record("conclusions_stable", consistent == consistent_half);
    }
    Ok(())
}

fn tails<R: EnsembleRunner>(
    ctx: &Context<'_, R>,
    out: &mut OutputDir,
    m: &mut Manifest,
) -> Result<(), CliError> {
    let c = ctx.config;
    let spec = ctx.spec(c.n_modes)?;
    let (sob, st) = gaussian_norm_samples(&spec, c.ensemble, c.s, c.p, ctx.seed, ctx.runner);
    out.write_csv(
        "norm_samples.csv",
        &["stream_id", "sobolev_norm", "spacetime_norm"],
        sob.iter()
            .zip(&st)
            .enumerate()
            .map(|(id, (a, b))| vec![id.to_string(), fmt_f64(*a), fmt_f64(*b)]),
    )?;
    let fits: Vec<(&str, TailFit)> = vec![
        ("sobolev_norm", tail_fit(&sob, c.tail_min_count)?),
        ("spacetime_norm", tail_fit(&st, c.tail_min_count)?),
    ];
    out.write_csv(
        "tail_points.csv",
        &["observable", "lambda", "log_exceedance"],
        fits.iter().flat_map(|(name, f)| {
            f.lambdas
                .iter()
                .zip(&f.log_exceedance)
                .map(move |(l, y)| vec![name.to_string(), fmt_f64(*l), fmt_f64(*y)])
        }),
    )?;
    out.write_csv(
        "tail_fits.csv",
        &[
            "observable",
            "slope",
            "intercept",
            "r_squared",
            "levels",
            "conclusive",
        ],
        fits.iter().map(|(name, f)| {
            vec![
                name.to_string(),
                fmt_f64(f.slope),
                fmt_f64(f.intercept),
                fmt_f64(f.r_squared),
                f.lambdas.len().to_string(),
                f.conclusive.to_string(),
            ]
        }),
    )?;
    for (name, f) in &fits {
        m.record(&format!("{name}_slope"), f.slope);
        m.record(&format!("{name}_r_squared"), f.r_squared);
        m.record(&format!("{name}_conclusive"), f.conclusive);
    }
    let inconclusive: Vec<&str> = fits
        .iter()
        .filter(|(_, f)| !f.conclusive)
        .map(|(n, _)| *n)
        .collect();
    if inconclusive.is_empty() {
        Ok(())
    } else {
        Err(CliError::Inconclusive(format!(
            "too few tail levels for {}",
            inconclusive.join(", ")
        )))
    }
}

fn converge<R: EnsembleRunner>(
    ctx: &Context<'_, R>,
    out: &mut OutputDir,
    m: &mut Manifest,
) -> Result<(), CliError> {
    let c = ctx.config;
    let report = galerkin_convergence(
        c.alpha,
        c.reference_modes,
        &c.levels,
        c.t_final,
        c.dt_for(c.reference_modes),
        c.s,
        ctx.seed,
    )?;
    out.write_csv(
        "convergence.csv",
        &["n_modes", "reference_modes", "t_final", "error"],
        report.errors.iter().map(|(n, e)| {
            vec![
                n.to_string(),
                c.reference_modes.to_string(),
                fmt_f64(c.t_final),
                fmt_f64(*e),
            ]
        }),
    )?;

    let spec = ctx.spec(c.crosscheck_modes)?;
    let (u0, _) = ctx.draw(&spec, 0)?;
    let forcing: Forcing = c.forcing.into();
    let sim = SimParams::new(spec.clone(), c.crosscheck_dt, c.crosscheck_t_final)?
        .with_forcing(forcing)
        .with_record_every(usize::MAX);
    let split = evolve(&u0, &sim, &[])?.final_state;
    let picard = picard_duhamel(
        &u0,
        &spec,
        c.crosscheck_t_final,
        forcing,
        &PicardOptions::default(),
    )?;
    let gap = sobolev_norm(&split.difference(&picard.state), c.s);
    out.write_csv(
        "crosscheck.csv",
        &["n_modes", "t_final", "dt", "picard_panels", "gap"],
        [vec![
            c.crosscheck_modes.to_string(),
            fmt_f64(c.crosscheck_t_final),
            fmt_f64(c.crosscheck_dt),
            picard.panels.to_string(),
            fmt_f64(gap),
        ]],
    )?;
    m.record("monotone", report.monotone());
    m.record(
        "finest_error",
        report.errors.last().map_or(f64::NAN, |e| e.1),
    );
    m.record("crosscheck_gap", gap);
    Ok(())
}

fn growth<R: EnsembleRunner>(
    ctx: &Context<'_, R>,
    out: &mut OutputDir,
    m: &mut Manifest,
) -> Result<(), CliError> {
    let c = ctx.config;
    let sim = ctx.sim(ctx.spec(c.n_modes)?, c.dt_for(c.n_modes))?;
    let report = growth_tracker(&sim, c.ensemble, c.s, ctx.seed, ctx.runner)?;
    out.write_csv(
        "growth_series.csv",
        &["stream_id", "time", "sobolev_norm", "ratio"],
        report.members.iter().flat_map(|g| {
            g.times
                .iter()
                .zip(&g.norms)
                .zip(&g.ratios)
                .map(move |((t, n), r)| {
                    vec![
                        g.stream_id.to_string(),
                        fmt_f64(*t),
                        fmt_f64(*n),
                        fmt_f64(*r),
                    ]
                })
        }),
    )?;
    out.write_csv(
        "growth_summary.csv",
        &["stream_id", "sup_ratio"],
        report
            .members
            .iter()
            .map(|g| vec![g.stream_id.to_string(), fmt_f64(g.sup_ratio)]),
    )?;
    let sups: Vec<f64> = report.members.iter().map(|g| g.sup_ratio).collect();
    m.record("max_sup_ratio", report.max_sup_ratio);
    m.record("median_sup_ratio", median(&sups));
    m.record("spread", report.spread());
    Ok(())
}

fn quadrature(config: &Config, n_modes: usize) -> Result<RadialQuadrature, CliError> {
    let order = config
        .quad_order
        .unwrap_or_else(|| default_quadrature_order(n_modes));
    Ok(build_basis(n_modes, order)?)
}
