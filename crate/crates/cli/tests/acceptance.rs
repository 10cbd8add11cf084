//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run a subset with `cargo test --test acceptance -- 3 7`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use gibbswave::runner::{default_workers, ParallelRunner};
use gibbswave_core::dynamics::energy_drift;
use gibbswave_core::experiments::{
    galerkin_convergence, gaussian_norm_samples, growth_tracker, invariance_observables,
    invariance_test, partition_sequence, strichartz_ratio, InitialMeasure, INVARIANCE_LEVEL,
};
use gibbswave_core::quadrature::gauss_legendre_on;
use gibbswave_core::sampling::gaussian_draw;
use gibbswave_core::stats::linear_regression;
use gibbswave_core::{
    build_basis, eigenfunction, eigenvalue, flow_step, free_evolve, lp_norm_ball, moment_growth,
    picard_duhamel, sample_gibbs, sobolev_norm, tail_fit, Forcing, GibbsSpec, PicardOptions,
    RadialQuadrature, SeededStream, SimParams, SpectralState,
};
use num_complex::Complex64;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn spec(n: usize) -> GibbsSpec {
    let quad = Arc::new(RadialQuadrature::with_default_order(n).unwrap());
    GibbsSpec::new(2.0, n, quad).unwrap()
}

fn runner() -> ParallelRunner {
    ParallelRunner::new(default_workers()).unwrap()
}

fn basis_validity() -> Outcome {
    const GRAM_TOL: f64 = 1e-8;
    const EIGEN_TOL: f64 = 1e-4;
    let n_max = 32;
    let quad = RadialQuadrature::with_default_order(n_max).unwrap();
    let gram = quad.gram_deviation();
    // −Δ e = −(e'' + 2e'/r) by central differences on interior points.
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for n in 1..=n_max {
        let lambda = eigenvalue(n);
        let mut res: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for k in 1..200 {
            let r = 0.02 + 0.96 * k as f64 / 200.0;
            let (em, e0, ep) = (
                eigenfunction(n, r - h),
                eigenfunction(n, r),
                eigenfunction(n, r + h),
            );
            let lap = (ep - 2.0 * e0 + em) / (h * h) + (ep - em) / (h * r);
            res = res.max((-lap - lambda * e0).abs());
            scale = scale.max((lambda * e0).abs());
        }
        worst = worst.max(res / scale);
    }
    outcome(
        gram <= GRAM_TOL && worst <= EIGEN_TOL,
        format!("Gram deviation {gram:.2e} (tol {GRAM_TOL:.0e}), eigen-relation residual {worst:.2e} (tol {EIGEN_TOL:.0e})"),
    )
}

fn free_flow() -> Outcome {
    const PERIOD_TOL: f64 = 1e-12;
    const ISOMETRY_TOL: f64 = 1e-14;
    let n = 64;
    let mut period: f64 = 0.0;
    let mut iso: f64 = 0.0;
    for id in 0..20 {
        let u = gaussian_draw(&mut SeededStream::new(SEED, id).rng(), n);
        for s in [0.0, 0.4, 1.0] {
            let norm = sobolev_norm(&u, s);
            period = period.max(sobolev_norm(&free_evolve(&u, 2.0).difference(&u), s));
            for t in [0.1, 0.5, 1.0, 1.37, 2.0, -3.3, 117.25] {
                iso = iso.max((sobolev_norm(&free_evolve(&u, t), s) - norm).abs() / norm);
            }
        }
    }
    outcome(
        period <= PERIOD_TOL && iso <= ISOMETRY_TOL,
        format!("max ‖S(2)u − u‖ = {period:.2e} (tol {PERIOD_TOL:.0e}), max relative norm change {iso:.2e}"),
    )
}

#[allow(clippy::needless_range_loop)]
fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    det
}

fn volume_preservation() -> Outcome {
    const TOL: f64 = 1e-6;
    let n = 4;
    let s = spec(n);
    let (u, _) = sample_gibbs(&s, SeededStream::new(SEED, 0)).unwrap();
    let u = u.scaled(3.0);
    let to_vec =
        |u: &SpectralState| -> Vec<f64> { u.coeffs().iter().flat_map(|c| [c.re, c.im]).collect() };
    let from_vec = |x: &[f64]| {
        SpectralState::from_coeffs(x.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect())
            .unwrap()
    };
    let mut dets = Vec::new();
    for dt in [1e-3, 5e-2] {
        let sim = SimParams::new(s.clone(), dt, dt).unwrap();
        let x0 = to_vec(&u);
        let h = 1e-5;
        let mut jac = vec![vec![0.0; 2 * n]; 2 * n];
        for j in 0..2 * n {
            let mut xp = x0.clone();
            let mut xm = x0.clone();
            xp[j] += h;
            xm[j] -= h;
            let fp = to_vec(&flow_step(&from_vec(&xp), &sim));
            let fm = to_vec(&flow_step(&from_vec(&xm), &sim));
            for i in 0..2 * n {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        dets.push((dt, determinant(jac)));
    }
    let worst = dets
        .iter()
        .map(|(_, d)| (d - 1.0).abs())
        .fold(0.0, f64::max);
    let detail = dets
        .iter()
        .map(|(dt, d)| format!("det = {d:.12} at dt = {dt}"))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(worst <= TOL, format!("{detail} (tol {TOL:.0e})"))
}

fn energy_order() -> Outcome {
    let s = spec(64);
    let (u, _) = sample_gibbs(&s, SeededStream::new(SEED, 0)).unwrap();
    let coarse = energy_drift(&u, &SimParams::new(s.clone(), 1e-3, 100.0).unwrap(), 100).unwrap();
    let fine = energy_drift(&u, &SimParams::new(s, 5e-4, 100.0).unwrap(), 200).unwrap();
    let ratio = coarse / fine;
    outcome(
        (3.0..=5.0).contains(&ratio),
        format!("drift {coarse:.3e} at dt = 1e-3, {fine:.3e} at dt = 5e-4, ratio {ratio:.3} (want [3, 5])"),
    )
}

fn solver_agreement() -> Outcome {
    const TOL: f64 = 1e-6;
    let s = spec(16);
    let mut worst: f64 = 0.0;
    for id in 0..4 {
        let (u, _) = sample_gibbs(&s, SeededStream::new(SEED, id)).unwrap();
        let sim = SimParams::new(s.clone(), 1e-4, 0.1)
            .unwrap()
            .with_record_every(usize::MAX);
        let split = gibbswave_core::evolve(&u, &sim, &[]).unwrap().final_state;
        let pic =
            picard_duhamel(&u, &s, 0.1, Forcing::Smoothed, &PicardOptions::default()).unwrap();
        worst = worst.max(sobolev_norm(&split.difference(&pic.state), 0.4));
    }
    outcome(
        worst <= TOL,
        format!("max H^0.4 gap {worst:.2e} over 4 samples (tol {TOL:.0e})"),
    )
}

fn invariance() -> Outcome {
    let s = spec(16);
    let obs = invariance_observables(0.4);
    let run = runner();
    let mut lines = Vec::new();
    let mut verdicts = Vec::new();
    for dt in [1e-3, 5e-4] {
        let sim = SimParams::new(s.clone(), dt, 50.0).unwrap();
        let r = invariance_test(&sim, 2000, &obs, InitialMeasure::Gibbs, SEED, &run).unwrap();
        let adj = r.adjusted_p_values();
        verdicts.push(r.consistent(INVARIANCE_LEVEL));
        let raw: Vec<String> = r
            .results
            .iter()
            .map(|k| format!("D {:.4} p {:.3}", k.statistic, k.p_value))
            .collect();
        lines.push(format!(
            "dt = {dt}: [{}], adjusted p = [{}]",
            raw.join(", "),
            adj.iter()
                .map(|p| format!("{p:.3}"))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    outcome(
        verdicts.iter().all(|&v| v),
        format!("{} (level {INVARIANCE_LEVEL})", lines.join("; ")),
    )
}

fn tails() -> Outcome {
    const R2_MIN: f64 = 0.97;
    let s = spec(64);
    let (sob, st) = gaussian_norm_samples(&s, 100_000, 0.4, 5.0, SEED, &runner());
    let fa = tail_fit(&sob, 50).unwrap();
    let fb = tail_fit(&st, 50).unwrap();
    let ok = |f: &gibbswave_core::TailFit| f.conclusive && f.slope < 0.0 && f.r_squared >= R2_MIN;
    outcome(
        ok(&fa) && ok(&fb),
        format!(
            "H^0.4 slope {:.3}, R² {:.4}; L^5 space-time slope {:.3}, R² {:.4} (want slope < 0, R² ≥ {R2_MIN})",
            fa.slope, fa.r_squared, fb.slope, fb.r_squared
        ),
    )
}

fn moments() -> Outcome {
    let qs: Vec<u32> = (2..=16).collect();
    let n = 64;
    let single = vec![1.0];
    let flat = vec![1.0 / (n as f64).sqrt(); n];
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, c, stream) in [("single-mode", &single, 0), ("equidistributed", &flat, 1)] {
        let est = moment_growth(c, &qs, 200_000, SeededStream::new(SEED, stream)).unwrap();
        let hi = est.iter().map(|e| e.normalized).fold(0.0, f64::max);
        let lo = est
            .iter()
            .map(|e| e.normalized)
            .fold(f64::INFINITY, f64::min);
        pass &= hi / lo <= 2.0;
        parts.push(format!("{name} max/min {:.3}", hi / lo));
    }
    outcome(
        pass,
        format!("{} over q = 2..16 (want ≤ 2)", parts.join(", ")),
    )
}

/// `‖e_n‖_{L^5}` with Gauss panels between the zeros of `sin(nπr)`.
fn l5_oracle(n: usize) -> f64 {
    let mut sum = 0.0;
    for k in 0..n {
        let (x, w) = gauss_legendre_on(24, k as f64 / n as f64, (k + 1) as f64 / n as f64);
        sum += x
            .iter()
            .zip(&w)
            .map(|(&r, &w)| w * 4.0 * PI * r * r * eigenfunction(n, r).abs().powi(5))
            .sum::<f64>();
    }
    sum.powf(0.2)
}

fn eigenfunction_growth() -> Outcome {
    let n_max = 256;
    let quad = build_basis(n_max, 4096).unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for n in 1..=n_max {
        xs.push((n as f64).ln());
        ys.push(lp_norm_ball(&SpectralState::basis_vector(n_max, n), &quad, 5.0).ln());
    }
    let check = [1usize, 17, 256]
        .iter()
        .map(|&n| (ys[n - 1].exp() - l5_oracle(n)).abs() / l5_oracle(n))
        .fold(0.0, f64::max);
    let (slope, _, _) = linear_regression(&xs, &ys);
    outcome(
        (slope - 0.40).abs() <= 0.05 && check < 1e-6,
        format!("exponent {slope:.4} (want 0.40 ± 0.05); quadrature vs panel oracle {check:.1e}"),
    )
}

fn partition() -> Outcome {
    let r = partition_sequence(2.0, &[8, 16, 32, 64], 10_000, SEED).unwrap();
    let m: BTreeMap<usize, _> = r.into_iter().collect();
    let d_lo = (m[&16].mean - m[&8].mean).abs();
    let d_hi = (m[&64].mean - m[&32].mean).abs();
    let se = m
        .values()
        .map(|e| e.std_err * e.std_err)
        .sum::<f64>()
        .sqrt();
    let verdict = if d_lo - d_hi > 3.0 * se {
        "decrease beyond 3 SE"
    } else if (d_hi - d_lo).abs() <= 3.0 * se {
        "within noise"
    } else {
        "increase beyond 3 SE"
    };
    let rates = m
        .iter()
        .map(|(n, e)| format!("r({n}) = {:.5}", e.mean))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(
        verdict != "increase beyond 3 SE",
        format!(
            "{rates}; |r64 − r32| = {d_hi:.2e}, |r16 − r8| = {d_lo:.2e}, 3 SE = {:.2e}: {verdict}",
            3.0 * se
        ),
    )
}

fn galerkin() -> Outcome {
    let r = galerkin_convergence(2.0, 256, &[32, 64, 128], 1.0, 1e-3, 0.4, SEED).unwrap();
    let table = r
        .errors
        .iter()
        .map(|(n, e)| format!("N = {n}: {e:.4e}"))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(r.monotone(), format!("{table} against N* = 256"))
}

fn growth() -> Outcome {
    let sim = SimParams::new(spec(32), 1e-3, 1000.0)
        .unwrap()
        .with_record_every(1000);
    match growth_tracker(&sim, 16, 0.4, SEED, &runner()) {
        Ok(r) => outcome(
            r.max_sup_ratio.is_finite() && r.spread() < 5.0,
            format!(
                "max {:.4}, median {:.4}, max/median {:.3} (want finite, < 5)",
                r.max_sup_ratio,
                r.median_sup_ratio,
                r.spread()
            ),
        ),
        Err(e) => outcome(false, format!("run aborted: {e}")),
    }
}

fn strichartz() -> Outcome {
    let run = runner();
    let sup = |n: usize| {
        let quad = RadialQuadrature::with_default_order(n).unwrap();
        strichartz_ratio(&quad, n, 5.0, 500, SEED, &run)
            .unwrap()
            .max_ratio
    };
    let (a, b) = (sup(32), sup(64));
    outcome(
        b / a < 1.2,
        format!(
            "sup ratio {a:.4} at N = 32, {b:.4} at N = 64, growth {:+.1}% (want < 20%)",
            100.0 * (b / a - 1.0)
        ),
    )
}

fn run_cli(cmd: &str, config: &Path, out: &Path, workers: usize) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_gibbswave"))
        .args([cmd, "--config"])
        .arg(config)
        .args(["--seed", "7", "--out"])
        .arg(out)
        .args(["--workers", &workers.to_string()])
        .output()
        .unwrap()
        .status
        .code()
        .unwrap_or(-1)
}

/// Output files by name, with the run-dependent manifest fields removed.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let mut bytes = fs::read(&path).unwrap();
        if name == "manifest.json" {
            let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
            let obj = v.as_object_mut().unwrap();
            obj.remove("timestamps");
            obj.remove("workers");
            bytes = serde_json::to_vec(&v).unwrap();
        }
        files.insert(name, bytes);
    }
    files
}

fn reproducibility() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("small.toml");
    fs::write(
        &config,
        "n_modes = 8\nensemble = 500\nt_final = 0.2\nrecord_every = 20\nreference_modes = 32\n\
         levels = [8, 16]\ncrosscheck_modes = 8\ntail_min_count = 20\n",
    )
    .unwrap();
    let tails_config = tmp.path().join("tails.toml");
    fs::write(
        &tails_config,
        "n_modes = 8\nensemble = 2000\ntail_min_count = 20\n",
    )
    .unwrap();
    let mut mismatched = Vec::new();
    let mut compared = 0;
    for cmd in [
        "sample",
        "evolve",
        "invariance",
        "tails",
        "converge",
        "growth",
    ] {
        let cfg = if cmd == "tails" {
            &tails_config
        } else {
            &config
        };
        let dirs: Vec<_> = [1usize, 4]
            .iter()
            .map(|w| tmp.path().join(format!("{cmd}_w{w}")))
            .collect();
        let codes: Vec<i32> = [1usize, 4]
            .iter()
            .zip(&dirs)
            .map(|(&w, d)| run_cli(cmd, cfg, d, w))
            .collect();
        // Replay from the manifest of the first run.
        let replay = tmp.path().join(format!("{cmd}_replay"));
        let replay_code = run_cli(cmd, &dirs[0].join("manifest.json"), &replay, 2);
        let base = snapshot(&dirs[0]);
        compared += base.len();
        if codes.iter().any(|&c| c != 0) || replay_code != 0 {
            mismatched.push(format!("{cmd} exit codes {codes:?}/{replay_code}"));
        }
        if snapshot(&dirs[1]) != base || snapshot(&replay) != base {
            mismatched.push(cmd.to_string());
        }
    }
    outcome(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!("{compared} files byte-identical across workers 1/4 and manifest replay")
        } else {
            format!("differences in {}", mismatched.join(", "))
        },
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 14] = [
        (1, "basis validity", basis_validity),
        (2, "free-flow periodicity and isometry", free_flow),
        (3, "volume preservation", volume_preservation),
        (4, "energy conservation order", energy_order),
        (5, "splitting vs Picard-Duhamel", solver_agreement),
        (6, "Gibbs invariance", invariance),
        (7, "sub-Gaussian tails", tails),
        (8, "moment growth", moments),
        (9, "eigenfunction L^5 growth", eigenfunction_growth),
        (10, "partition convergence", partition),
        (11, "Galerkin convergence", galerkin),
        (12, "growth envelope", growth),
        (13, "Strichartz ratio", strichartz),
        (14, "reproducibility", reproducibility),
    ];
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let r = check();
        println!(
            "criterion {id:>2} {name}: {} ({:.1}s) {}",
            if r.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            r.detail
        );
        if !r.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
