//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so each criterion reports its own
//! runtime next to its verdict.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use chebext::chebyshev::{cheb_coeffs, eval_t, gauss_chebyshev_nodes};
use chebext::experiments::{
    run_cheb_truncation, run_delta_sweep, run_instability_sweep, run_lemma51_grid,
    ExperimentRecord, InstabilitySweep, Lemma51Grid, NoiseKind, SweepOptions, TruncationPlan,
};
use chebext::extrapolation::{alpha_of_tau, schedule, tau_of_alpha, StabilityParams};
use chebext::fourier::{quadrature_ft, QuadratureSpec, TestFunction};
use chebext_cli::DEFAULT_CONFIG;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

/// Name, check and runtime limit.
type Criterion = (&'static str, fn() -> Verdict, Duration);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn failed_comparisons(records: &[ExperimentRecord]) -> Vec<String> {
    records
        .iter()
        .flat_map(|r| {
            r.passed
                .iter()
                .filter(|(_, &ok)| !ok)
                .map(move |(k, _)| format!("{}: {k} {}", r.experiment_id, r.notes.join("; ")))
        })
        .collect()
}

fn all_compared_pass(records: &[ExperimentRecord]) -> Result<usize, String> {
    let bad = failed_comparisons(records);
    let total: usize = records.iter().map(ExperimentRecord::comparison_count).sum();
    if bad.is_empty() {
        Ok(total)
    } else {
        Err(format!(
            "{} of {total} comparisons failed, first: {}",
            bad.len(),
            bad[0]
        ))
    }
}

fn closed_form_t(k: usize, t: f64) -> f64 {
    if t.abs() <= 1.0 {
        (k as f64 * t.acos()).cos()
    } else {
        let sign = if t < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        sign * (k as f64 * t.abs().acosh()).cosh()
    }
}

fn criterion_1() -> Verdict {
    let mut worst_orth: f64 = 0.0;
    for n in 1..=24 {
        let m = (4 * n).max(64);
        let nodes = gauss_chebyshev_nodes(m);
        for j in 0..n {
            let samples: Vec<f64> = nodes.iter().map(|&t| closed_form_t(j, t)).collect();
            let series = cheb_coeffs(&samples, n).map_err(|e| e.to_string())?;
            for (i, &b) in series.coeffs().iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst_orth = worst_orth.max((b - target).abs());
            }
        }
    }
    ensure(worst_orth <= 1e-12, || {
        format!("orthogonality error {worst_orth:e}")
    })?;

    let grid: Vec<f64> = (0..=600).map(|i| -3.0 + 0.01 * i as f64).collect();
    let mut worst_rel: f64 = 0.0;
    for k in 0..=60 {
        for &t in &grid {
            let v = eval_t(k, t).map_err(|e| e.to_string())?;
            let exact = closed_form_t(k, t);
            worst_rel = worst_rel.max((v - exact).abs() / exact.abs().max(1.0));
            let cap = if t.abs() <= 1.0 {
                1.0
            } else {
                (2.0 * t.abs()).powi(k as i32)
            };
            ensure(v.abs() <= cap * (1.0 + 1e-12), || {
                format!("growth bound broken at k={k}, t={t}")
            })?;
        }
    }
    ensure(worst_rel <= 1e-10, || {
        format!("closed-form error {worst_rel:e}")
    })?;
    Ok(format!(
        "orthogonality {worst_orth:.1e}, closed form {worst_rel:.1e}"
    ))
}

fn criterion_2() -> Verdict {
    let records = run_cheb_truncation(&TruncationPlan::default(), &SweepOptions::default());
    let n = all_compared_pass(&records)?;
    Ok(format!("{n} comparisons at zero slack"))
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for dim in [1, 2] {
        let mut k = vec![0.0; dim];
        k[0] = 5.0;
        let functions = [
            TestFunction::gaussian(dim),
            TestFunction::unit_mass_bump(dim, 1.0),
            TestFunction::instability(dim, &k, 2, 1.0),
        ];
        let spec = QuadratureSpec::default_for(dim).map_err(|e| e.to_string())?;
        for tf in functions {
            let tf = tf.map_err(|e| e.to_string())?;
            for _ in 0..20 {
                let xi: Vec<f64> = (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let exact = tf.eval_fv(&xi);
                let quad = quadrature_ft(&tf, &xi, &spec).map_err(|e| e.to_string())?;
                let rel = (quad - exact).norm() / exact.norm();
                ensure(rel <= 1e-8, || {
                    format!("{} d={dim} at {xi:?}: relative error {rel:e}", tf.name())
                })?;
                worst = worst.max(rel);
                count += 1;
            }
        }
    }
    Ok(format!("{count} points, worst relative error {worst:.1e}"))
}

fn criterion_4() -> Verdict {
    let tf = TestFunction::gaussian(1).map_err(|e| e.to_string())?;
    let grid = Lemma51Grid {
        r: 1.0,
        big_rs: vec![1.5, 2.0],
        lambdas: vec![4.0, 8.0],
        ns: (2..=16).collect(),
        deltas: vec![1e-3, 1e-6],
    };
    let spec = QuadratureSpec::default_for(1).map_err(|e| e.to_string())?;
    let records = run_lemma51_grid(
        &tf,
        &grid,
        &NoiseKind::default(),
        &spec,
        &SweepOptions::default(),
    );
    let n = all_compared_pass(&records)?;
    ensure(n == 2 * 2 * 15 * 2, || {
        format!("expected 120 comparisons, got {n}")
    })?;
    Ok(format!("{n} comparisons within slack 1.02"))
}

fn decade_deltas() -> Vec<f64> {
    (2..=10).map(|e| 10f64.powi(-e)).collect()
}

fn criterion_5() -> Verdict {
    let tf = TestFunction::gaussian(1).map_err(|e| e.to_string())?;
    let dec = tf.decay();
    ensure(dec.nu == 2.0, || {
        format!("gaussian certified with nu = {}", dec.nu)
    })?;
    let template =
        StabilityParams::new(dec.n, dec.sigma, dec.nu, 0.05, 1e-2).map_err(|e| e.to_string())?;
    let spec = QuadratureSpec::default_for(1).map_err(|e| e.to_string())?;
    let taus = [0.1, 0.2];
    let records = run_delta_sweep(
        &tf,
        &template,
        &taus,
        &decade_deltas(),
        &NoiseKind::default(),
        &spec,
        &SweepOptions::default(),
    );
    let n = all_compared_pass(&records)?;
    let mut slopes = Vec::new();
    for &tau in &taus {
        let fit = records
            .iter()
            .find(|r| {
                r.experiment_id.starts_with("delta-sweep fit") && r.inputs.get("tau") == Some(&tau)
            })
            .ok_or_else(|| format!("no fit record for tau = {tau}"))?;
        let slope = *fit
            .measured
            .get("holder_slope")
            .ok_or("fit record without a slope")?;
        let alpha = alpha_of_tau(tau, dec.nu);
        ensure(slope >= alpha - 0.05, || {
            format!("tau={tau}: slope {slope} < alpha - 0.05 = {}", alpha - 0.05)
        })?;
        slopes.push(format!("tau={tau}: {slope:.3} >= {:.3}", alpha - 0.05));
    }
    Ok(format!("{n} comparisons; slopes {}", slopes.join(", ")))
}

fn criterion_6() -> Verdict {
    let tf = TestFunction::unit_mass_bump(1, 1.0).map_err(|e| e.to_string())?;
    let dec = tf.decay();
    ensure(dec.nu == 1.0, || {
        format!("bump certified with nu = {}", dec.nu)
    })?;
    ensure(tf.wm_norm().is_some() && tf.hm_norm().is_some(), || {
        "bump lacks smoothness certificates".into()
    })?;
    let template =
        StabilityParams::new(dec.n, dec.sigma, dec.nu, 1.0, 1e-2).map_err(|e| e.to_string())?;
    let spec = QuadratureSpec::new(1, 256, 64, 4001, 2.0).map_err(|e| e.to_string())?;
    let taus: Vec<f64> = [0.25, 0.5].iter().map(|&a| tau_of_alpha(a, 1.0)).collect();
    let records = run_delta_sweep(
        &tf,
        &template,
        &taus,
        &decade_deltas(),
        &NoiseKind::default(),
        &spec,
        &SweepOptions::default(),
    );
    let points: Vec<&ExperimentRecord> = records
        .iter()
        .filter(|r| !r.experiment_id.contains("fit"))
        .collect();
    let mut checked = 0;
    for r in &points {
        for key in ["sup_reconstruction_vs_thm31", "hs_reconstruction_vs_thm32"] {
            match r.passed.get(key) {
                Some(true) => checked += 1,
                Some(false) => {
                    return Err(format!(
                        "{}: {key} failed {}",
                        r.experiment_id,
                        r.notes.join("; ")
                    ))
                }
                None => {
                    return Err(format!(
                        "{}: {key} missing {}",
                        r.experiment_id,
                        r.notes.join("; ")
                    ))
                }
            }
        }
    }
    ensure(checked == 2 * taus.len() * decade_deltas().len(), || {
        format!("only {checked} comparisons")
    })?;
    Ok(format!(
        "{checked} reconstruction comparisons within slack 1.02"
    ))
}

fn criterion_7() -> Verdict {
    let plan = InstabilitySweep {
        dim: 1,
        m: 2,
        eps: 1.0,
        ks: vec![4.0, 6.0, 8.0, 10.0, 12.0, 14.0],
        r: 1.0,
    };
    let spec = QuadratureSpec::default_for(1).map_err(|e| e.to_string())?;
    let records = run_instability_sweep(&plan, &spec, &SweepOptions::default());
    for r in records
        .iter()
        .filter(|r| r.experiment_id != "instability fit")
    {
        let k = r.inputs["k"];
        let v_inf = *r
            .measured
            .get("v_inf")
            .ok_or_else(|| format!("{}: no v_inf", r.experiment_id))?;
        ensure(v_inf == k.powi(-2), || {
            format!("k={k}: v_inf {v_inf:e} != {:e}", k.powi(-2))
        })?;
    }
    let last = records
        .iter()
        .find(|r| r.inputs.get("k") == Some(&14.0))
        .ok_or("no k = 14 record")?;
    ensure(
        last.passed.get("v_inf_vs_log_stability_floor") == Some(&true),
        || format!("stability floor inequality at k = 14: {:?}", last.passed),
    )?;
    let fit = records
        .iter()
        .find(|r| r.experiment_id == "instability fit")
        .ok_or("no fit record")?;
    let slope = fit.measured["slope"];
    ensure((slope - 1.0).abs() <= 0.02, || {
        format!(
            "fit slope {slope:.4} outside 1 +/- 0.02 (without the |k|^-m factor: {:.4})",
            fit.measured["slope_without_prefactor"]
        )
    })?;
    Ok(format!(
        "v_inf exact, floor holds at k = 14, slope {slope:.4}"
    ))
}

fn criterion_8() -> Verdict {
    let mut worst: f64 = 0.0;
    for nu in [1.0, 1.5, 2.0, 3.0, 4.0] {
        for i in 0..=20 {
            let alpha = i as f64 / 20.0;
            worst = worst.max((alpha_of_tau(tau_of_alpha(alpha, nu), nu) - alpha).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("round trip error {worst:e}"))?;
    let sp = StabilityParams::new(1.0, 1.0, 1.0, 1.0, (-16f64).exp()).map_err(|e| e.to_string())?;
    let s = schedule(&sp, 0.5).map_err(|e| e.to_string())?;
    let sqrt2 = 2f64.sqrt();
    ensure(
        (s.l - sqrt2).abs() <= 1e-12 && (s.big_r - sqrt2).abs() <= 1e-12 && s.n == 9,
        || format!("schedule gave L = {}, R = {}, n = {}", s.l, s.big_r, s.n),
    )?;
    let s0 = schedule(&sp, 0.0).map_err(|e| e.to_string())?;
    ensure(s0.l == 1.0 && s0.big_r == 1.0 && s0.n == 0, || {
        format!("tau = 0 gave {s0:?}")
    })?;
    let sp2 =
        StabilityParams::new(1.0, 1.0, 2.0, 1.0, (-16f64).exp()).map_err(|e| e.to_string())?;
    let s2 = schedule(&sp2, 0.25).map_err(|e| e.to_string())?;
    ensure(s2.l == 1.0 && s2.n == 14, || {
        format!("nu = 2, tau = 0.25 gave {s2:?}")
    })?;
    Ok(format!(
        "round trip {worst:.1e}; L = sqrt 2, n = 9 reproduced"
    ))
}

fn criterion_9() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_chebext"))
            .arg("--output")
            .arg(&out)
            .arg("--quiet")
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.code() == Some(0), || format!("exit status {status}"))?;
        std::fs::read(out.join("records.csv")).map_err(|e| e.to_string())
    };
    let a = run("first")?;
    let b = run("second")?;
    ensure(a == b, || "records.csv differs between runs".into())?;
    ensure(DEFAULT_CONFIG.contains("campaign = delta-sweep"), || {
        "default config is not the delta sweep".into()
    })?;
    Ok(format!("{} identical bytes, exit 0", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            "1 chebyshev correctness",
            criterion_1,
            Duration::from_secs(1),
        ),
        ("2 truncation bound", criterion_2, Duration::from_secs(5)),
        ("3 transform oracle", criterion_3, Duration::from_secs(10)),
        ("4 fixed-lambda grid", criterion_4, Duration::from_secs(30)),
        ("5 holder rate", criterion_5, Duration::from_secs(60)),
        (
            "6 end-to-end reconstruction",
            criterion_6,
            Duration::from_secs(120),
        ),
        ("7 instability", criterion_7, Duration::from_secs(10)),
        ("8 schedule algebra", criterion_8, Duration::from_secs(1)),
        ("9 cli determinism", criterion_9, Duration::from_secs(120)),
    ];
    let mut failures = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let verdict = check();
        let elapsed = start.elapsed();
        let verdict = match verdict {
            Ok(msg) if elapsed > limit => {
                Err(format!("{msg}; took {elapsed:.2?}, limit {limit:?}"))
            }
            v => v,
        };
        match verdict {
            Ok(msg) => println!("PASS criterion {name} ({elapsed:.2?}): {msg}"),
            Err(msg) => {
                failures += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {msg}");
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} of 9 criteria failed");
        ExitCode::FAILURE
    }
}
