//! Noise injection, parameter sweeps and bound-verification campaigns.
//!
//! Every campaign returns plain [`ExperimentRecord`]s in input order. Sweep
//! points run in parallel but results are collected by index, so identical
//! inputs give identical records. Pipeline errors never abort a sweep; they
//! land in the record as a note plus a failed `pipeline` flag.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{cor54_rhs, lemma51_rhs, thm31_rhs, thm32_rhs, BoundInputs, Smoothness};
use crate::chebyshev::{
    cheb_coeffs, default_node_count, gauss_chebyshev_nodes, lemma71_bound, EllipseParams,
};
use crate::error::{Error, Result};
use crate::extrapolation::{
    default_directions, extrapolate, schedule, BallField, RaySampling, SourceFn, StabilityParams,
};
use crate::fourier::{
    error_norm, InverseTransform, NormKind, NormSpec, QuadratureSpec, SpectralField, TestFunction,
    ZeroField,
};
use crate::quad::norm;

/// Multiplicative slack on every `measured ≤ bound` comparison.
pub const SLACK: f64 = 1.02;

/// Fraction of the ray Nyquist frequency `πM/(2r)` used by cosine noise.
pub const NYQUIST_FRACTION: f64 = 0.9;

/// Phase of the default cosine noise.
pub const DEFAULT_PHASE: f64 = PI / 4.0;

/// `β = 0.6 m` in the instability inequality.
pub const BETA_FACTOR: f64 = 0.6;

/// Allowed distance of the Hölder fit slope below `α`.
pub const SLOPE_MARGIN: f64 = 0.05;

/// Decades of `δ` a Hölder fit must span before its slope is compared.
pub const FIT_MIN_DECADES: f64 = 6.0;

/// Largest node-doubling drift of a truncated Chebyshev sum, as a fraction
/// of the bound it is compared with.
pub const DRIFT_FRACTION: f64 = 0.1;

/// Terms of the random cosine noise.
const RANDOM_TERMS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseKind {
    None,
    /// `e(ξ) = δ e^{iφ} cos(q·ξ)`; `q = None` means `0.9 πM/(2r) e₁`.
    CosinePhase {
        q: Option<Vec<f64>>,
        phase: f64,
    },
    /// `δ e^{iφ₀} Σ c_j cos(q_j·ξ) / Σ c_j` with random `c_j > 0`, `q_j`, `φ₀`.
    /// Every cosine equals 1 at the origin, so the sup over `B_r` is exactly `δ`.
    UniformRandom {
        seed: u64,
    },
}

impl Default for NoiseKind {
    fn default() -> Self {
        Self::CosinePhase {
            q: None,
            phase: DEFAULT_PHASE,
        }
    }
}

/// A perturbation `e` with `sup_{B_r} |e| = level`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub level: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, level: f64) -> Result<Self> {
        if !(level >= 0.0 && level.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise level {level} must be finite and nonnegative"
            )));
        }
        Ok(Self { kind, level })
    }

    /// Frequency just under the Nyquist limit of `M` nodes on a diameter of `B_r`.
    pub fn nyquist_frequency(r: f64, nodes_per_ray: usize) -> f64 {
        NYQUIST_FRACTION * PI * nodes_per_ray as f64 / (2.0 * r)
    }

    /// The realised `e(ξ)` for rays of `nodes_per_ray` nodes on `B_r`, with
    /// the numbers that identify it (recorded as inputs).
    pub fn realize(
        &self,
        dim: usize,
        r: f64,
        nodes_per_ray: usize,
    ) -> Result<(SourceFn, Vec<(String, f64)>)> {
        let delta = self.level;
        let q_max = Self::nyquist_frequency(r, nodes_per_ray);
        match &self.kind {
            NoiseKind::None => Ok((Arc::new(|_: &[f64]| Complex64::new(0.0, 0.0)), Vec::new())),
            NoiseKind::CosinePhase { q, phase } => {
                let q = match q {
                    Some(q) if q.len() == dim => q.clone(),
                    Some(q) => {
                        return Err(Error::InvalidParameter(format!(
                            "noise wave vector has {} components, expected {dim}",
                            q.len()
                        )))
                    }
                    None => {
                        let mut q = vec![0.0; dim];
                        q[0] = q_max;
                        q
                    }
                };
                let desc = vec![
                    ("noise_q".to_string(), norm(&q)),
                    ("noise_phase".to_string(), *phase),
                ];
                let amp = Complex64::from_polar(delta, *phase);
                let e = move |xi: &[f64]| amp * crate::quad::dot(&q, xi).cos();
                Ok((Arc::new(e), desc))
            }
            NoiseKind::UniformRandom { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let phase = rng.gen_range(0.0..2.0 * PI);
                let mut terms = Vec::with_capacity(RANDOM_TERMS);
                for _ in 0..RANDOM_TERMS {
                    let weight: f64 = rng.gen_range(0.1..1.0);
                    let mut dir: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let len = norm(&dir).max(1e-3);
                    let mag = rng.gen_range(0.0..q_max);
                    dir.iter_mut().for_each(|c| *c *= mag / len);
                    terms.push((weight, dir));
                }
                let total: f64 = terms.iter().map(|t| t.0).sum();
                let amp = Complex64::from_polar(delta / total, phase);
                let desc = vec![("noise_seed".to_string(), *seed as f64)];
                let e = move |xi: &[f64]| {
                    amp * terms
                        .iter()
                        .map(|(c, q)| c * crate::quad::dot(q, xi).cos())
                        .sum::<f64>()
                };
                Ok((Arc::new(e), desc))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareKind {
    /// `measured ≤ bound · SLACK`.
    Upper,
    /// `measured > bound`.
    Lower,
    /// `|measured − bound| ≤ tol`.
    Equal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub name: String,
    pub kind: CompareKind,
    pub measured: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Comparison {
    /// `measured / bound` for upper-bound comparisons.
    pub fn ratio(&self) -> Option<f64> {
        match self.kind {
            CompareKind::Upper if self.bound > 0.0 => Some(self.measured / self.bound),
            _ => None,
        }
    }
}

/// One row of a campaign.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentRecord {
    pub experiment_id: String,
    pub inputs: BTreeMap<String, f64>,
    pub measured: BTreeMap<String, f64>,
    pub bounds: BTreeMap<String, f64>,
    pub passed: BTreeMap<String, bool>,
    pub comparisons: Vec<Comparison>,
    pub notes: Vec<String>,
    pub runtime_ms: u64,
}

impl ExperimentRecord {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            experiment_id: id.into(),
            ..Self::default()
        }
    }

    pub fn input(&mut self, key: &str, value: f64) {
        self.inputs.insert(key.to_string(), value);
    }

    pub fn measure(&mut self, key: &str, value: f64) {
        self.measured.insert(key.to_string(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    fn compare(
        &mut self,
        measured_key: &str,
        measured: f64,
        bound_key: &str,
        bound: f64,
        kind: CompareKind,
        passed: bool,
    ) {
        self.measure(measured_key, measured);
        self.bounds.insert(bound_key.to_string(), bound);
        let name = format!("{measured_key}_vs_{bound_key}");
        self.passed.insert(name.clone(), passed);
        self.comparisons.push(Comparison {
            name,
            kind,
            measured,
            bound,
            passed,
        });
    }

    /// Records `measured ≤ bound · SLACK`.
    pub fn check_upper(
        &mut self,
        measured_key: &str,
        measured: f64,
        bound_key: &str,
        bound: f64,
    ) -> bool {
        let ok = measured <= bound * SLACK;
        self.compare(
            measured_key,
            measured,
            bound_key,
            bound,
            CompareKind::Upper,
            ok,
        );
        ok
    }

    /// Records `measured > bound`.
    pub fn check_lower(
        &mut self,
        measured_key: &str,
        measured: f64,
        bound_key: &str,
        bound: f64,
    ) -> bool {
        let ok = measured > bound;
        self.compare(
            measured_key,
            measured,
            bound_key,
            bound,
            CompareKind::Lower,
            ok,
        );
        ok
    }

    /// Records `|measured − reference| ≤ tol`.
    pub fn check_equal(
        &mut self,
        measured_key: &str,
        measured: f64,
        ref_key: &str,
        reference: f64,
        tol: f64,
    ) -> bool {
        let ok = (measured - reference).abs() <= tol;
        self.compare(
            measured_key,
            measured,
            ref_key,
            reference,
            CompareKind::Equal,
            ok,
        );
        ok
    }

    /// Marks the record as failed by a pipeline error.
    pub fn fail(&mut self, err: &Error) {
        self.notes.push(format!("pipeline error: {err}"));
        self.passed.insert("pipeline".into(), false);
    }

    pub fn all_passed(&self) -> bool {
        self.passed.values().all(|&p| p)
    }

    /// Number of pass/fail flags (bound comparisons plus a failed pipeline flag).
    pub fn comparison_count(&self) -> usize {
        self.passed.len()
    }
}

/// Settings shared by all campaigns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Record wall-clock time; off by default so output is reproducible.
    pub timing: bool,
    /// Sobolev index `s` of the `H^s` error.
    pub sobolev_index: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            timing: false,
            sobolev_index: 0.0,
        }
    }
}

fn timed<F>(opts: &SweepOptions, id: String, body: F) -> ExperimentRecord
where
    F: FnOnce(&mut ExperimentRecord) -> Result<()>,
{
    let start = Instant::now();
    let mut rec = ExperimentRecord::new(id);
    if let Err(e) = body(&mut rec) {
        rec.fail(&e);
    }
    if opts.timing {
        rec.runtime_ms = start.elapsed().as_millis() as u64;
    }
    rec
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "slope fit needs two or more paired points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidParameter(
            "slope fit needs distinct abscissae".into(),
        ));
    }
    Ok(sxy / sxx)
}

/// Points `tθ` on every data diameter, `t` on an open uniform grid of
/// `(−radius, radius)`. The operator acts ray by ray, so off-ray points
/// would only measure the angular interpolation.
pub fn ball_grid(directions: &[Vec<f64>], radius: f64, per_diameter: usize) -> Vec<Vec<f64>> {
    let g = per_diameter as f64;
    directions
        .iter()
        .flat_map(|theta| {
            (0..per_diameter).map(move |i| {
                let t = radius * (-1.0 + (2 * i + 1) as f64 / g);
                theta.iter().map(|c| c * t).collect()
            })
        })
        .collect()
}

/// `(sup_{B_R} |𝓕v − F|, sup over r ≤ |ξ| < R)` on [`ball_grid`].
fn field_gaps(
    tf: &TestFunction,
    field: &BallField,
    directions: &[Vec<f64>],
    grid: usize,
) -> Result<(f64, f64)> {
    let r = field.r();
    let gaps = ball_grid(directions, field.big_r(), grid)
        .par_iter()
        .map(|xi| {
            field
                .eval(xi)
                .map(|f| ((tf.eval_fv(xi) - f).norm(), norm(xi) >= r))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(gaps
        .into_iter()
        .fold((0.0_f64, 0.0_f64), |(all, ann), (g, outer)| {
            (all.max(g), if outer { ann.max(g) } else { ann })
        }))
}

/// Rays of `w = 𝓕v + e` on `B_r` along the default directions.
fn noisy_sampling(
    tf: &TestFunction,
    noise: &NoiseModel,
    r: f64,
    nodes_per_ray: usize,
    rec: &mut ExperimentRecord,
) -> Result<RaySampling> {
    let d = tf.dim();
    let (e, desc) = noise.realize(d, r, nodes_per_ray)?;
    for (k, v) in desc {
        rec.input(&k, v);
    }
    let v = tf.clone();
    let w: SourceFn = Arc::new(move |xi: &[f64]| v.eval_fv(xi) + e(xi));
    let (dirs, hint) = default_directions(d)?;
    RaySampling::sample_along(d, r, nodes_per_ray, dirs, hint, w)
}

/// One scheduled extrapolation and reconstruction, compared against every
/// bound the function's certificates allow.
fn scheduled_point(
    rec: &mut ExperimentRecord,
    tf: &TestFunction,
    sp: &StabilityParams,
    tau: f64,
    noise: &NoiseKind,
    spec: &QuadratureSpec,
    opts: &SweepOptions,
) -> Result<()> {
    let d = tf.dim();
    for (k, v) in [
        ("d", d as f64),
        ("big_n", sp.big_n()),
        ("sigma", sp.sigma()),
        ("nu", sp.nu()),
        ("r", sp.r()),
        ("delta", sp.delta()),
        ("tau", tau),
    ] {
        rec.input(k, v);
    }
    let sched = schedule(sp, tau)?;
    rec.input("alpha", sched.alpha);
    rec.input("l", sched.l);
    rec.input("big_r", sched.big_r);
    rec.input("n", sched.n as f64);
    let nodes = default_node_count(sched.n);
    rec.input("nodes_per_ray", nodes as f64);

    let noise = NoiseModel::new(noise.clone(), sp.delta())?;
    let rs = noisy_sampling(tf, &noise, sp.r(), nodes, rec)?;
    let field = extrapolate(&rs, sched.big_r, sched.n)?;
    let (sup_ball, sup_annulus) = field_gaps(tf, &field, rs.directions(), spec.sup_grid)?;
    rec.measure("sup_annulus", sup_annulus);

    let mut bi = BoundInputs::from_schedule(sp, &sched, d);
    if tau <= 1.0 / sp.nu() {
        rec.check_upper("sup_ball_R", sup_ball, "cor54", cor54_rhs(&bi)?);
    } else {
        rec.measure("sup_ball_R", sup_ball);
        rec.note("tau above 1/nu: no Hölder bound for the extrapolated data");
    }

    let s = opts.sobolev_index;
    let wm = tf.wm_norm().filter(|b| b.m > d as f64);
    let hm = tf.hm_norm().filter(|b| s < b.m);
    if wm.is_none() && hm.is_none() {
        return Ok(());
    }
    bi = bi.with_smoothness(Smoothness {
        m: wm.or(hm).map(|b| b.m).unwrap_or_default(),
        gamma1: wm.map(|b| b.gamma),
        gamma2: hm.map(|b| b.gamma),
        s: Some(s),
    });
    rec.input("m", bi.smooth.m);
    rec.input("s", s);
    if let Some(g) = bi.smooth.gamma1 {
        rec.input("gamma1", g);
    }
    if let Some(g) = bi.smooth.gamma2 {
        rec.input("gamma2", g);
    }
    if wm.is_some() {
        let inverse = InverseTransform::new(&field, spec)?;
        let vhat = |x: &[f64]| inverse.at(x);
        rec.measure("vhat_at_origin", vhat(&vec![0.0; d])?.re);
        let sup = error_norm(&vhat, tf, NormSpec::new(NormKind::SupNorm, d), spec, &field)?;
        rec.check_upper("sup_reconstruction", sup, "thm31", thm31_rhs(&bi)?);
    }
    if hm.is_some() {
        let zero = |_: &[f64]| Ok(Complex64::new(0.0, 0.0));
        let hs = error_norm(
            &zero,
            tf,
            NormSpec::new(NormKind::SobolevHs(s), d),
            spec,
            &field,
        )?;
        rec.check_upper("hs_reconstruction", hs, "thm32", thm32_rhs(&bi)?);
    }
    Ok(())
}

/// For each `(τ, δ)`: data `𝓕v + e` with `sup|e| = δ`, extrapolation by the
/// `τ`-schedule, then every applicable bound comparison. One fit record per
/// `τ` follows its points: the log–log slope of the annulus error against
/// `δ` must exceed `α(τ) − 0.05` when the usable points span 6 decades.
pub fn run_delta_sweep(
    tf: &TestFunction,
    template: &StabilityParams,
    taus: &[f64],
    deltas: &[f64],
    noise: &NoiseKind,
    spec: &QuadratureSpec,
    opts: &SweepOptions,
) -> Vec<ExperimentRecord> {
    let cases: Vec<(f64, f64)> = taus
        .iter()
        .flat_map(|&t| deltas.iter().map(move |&d| (t, d)))
        .collect();
    let points: Vec<ExperimentRecord> = cases
        .par_iter()
        .map(|&(tau, delta)| {
            timed(
                opts,
                format!("delta-sweep tau={tau} delta={delta:e}"),
                |rec| {
                    let sp = template.with_delta(delta)?;
                    scheduled_point(rec, tf, &sp, tau, noise, spec, opts)
                },
            )
        })
        .collect();

    let mut out = Vec::with_capacity(points.len() + taus.len());
    for (chunk, &tau) in points.chunks(deltas.len().max(1)).zip(taus) {
        out.extend_from_slice(chunk);
        if deltas.len() >= 2 {
            out.push(holder_fit(chunk, tau, template.nu(), opts));
        }
    }
    out
}

fn holder_fit(
    points: &[ExperimentRecord],
    tau: f64,
    nu: f64,
    opts: &SweepOptions,
) -> ExperimentRecord {
    timed(opts, format!("delta-sweep fit tau={tau}"), |rec| {
        rec.input("tau", tau);
        rec.input("nu", nu);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for p in points {
            match (p.inputs.get("delta"), p.measured.get("sup_annulus")) {
                (Some(&d), Some(&e)) if e > 0.0 => {
                    x.push(d.ln());
                    y.push(e.ln());
                }
                _ => rec.note(format!("{} left out of the fit", p.experiment_id)),
            }
        }
        rec.input("points", x.len() as f64);
        let alpha = crate::extrapolation::alpha_of_tau(tau, nu);
        rec.input("alpha", alpha);
        let span = x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - x.iter().copied().fold(f64::INFINITY, f64::min);
        let slope = fit_slope(&x, &y)?;
        if span / std::f64::consts::LN_10 >= FIT_MIN_DECADES - 1e-9 {
            rec.check_lower(
                "holder_slope",
                slope,
                "alpha_minus_margin",
                alpha - SLOPE_MARGIN,
            );
        } else {
            rec.measure("holder_slope", slope);
            rec.note(format!(
                "fit spans fewer than {FIT_MIN_DECADES} decades of delta; slope not compared"
            ));
        }
        Ok(())
    })
}

/// The bounded-noise demo: one scheduled reconstruction, errors measured on
/// `|x_i| ≤ spec.space_box`.
pub fn run_demo_reconstruct(
    tf: &TestFunction,
    sp: &StabilityParams,
    tau: f64,
    noise: &NoiseKind,
    spec: &QuadratureSpec,
    opts: &SweepOptions,
) -> ExperimentRecord {
    timed(
        opts,
        format!("demo-reconstruct tau={tau} delta={:e}", sp.delta()),
        |rec| {
            rec.input("space_box", spec.space_box);
            scheduled_point(rec, tf, sp, tau, noise, spec, opts)
        },
    )
}

/// Grid of the fixed-`λ` campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma51Grid {
    pub r: f64,
    pub big_rs: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub ns: Vec<usize>,
    pub deltas: Vec<f64>,
}

/// For each `(R, λ, n, δ)`: `sup_{B_R}|𝓕v − C_{R,n} w|` against
/// `2(2R/r)^n δ + 4Q_v(λ)(R/λ)^n`. Tuples outside `r ≤ R ≤ λ/2` are kept
/// as records with a note and no comparison.
pub fn run_lemma51_grid(
    tf: &TestFunction,
    grid: &Lemma51Grid,
    noise: &NoiseKind,
    spec: &QuadratureSpec,
    opts: &SweepOptions,
) -> Vec<ExperimentRecord> {
    let nodes = default_node_count(grid.ns.iter().copied().max().unwrap_or(0));
    let d = tf.dim();
    let samplings: Vec<Result<(RaySampling, ExperimentRecord)>> = grid
        .deltas
        .par_iter()
        .map(|&delta| {
            let mut proto = ExperimentRecord::default();
            let noise = NoiseModel::new(noise.clone(), delta)?;
            let rs = noisy_sampling(tf, &noise, grid.r, nodes, &mut proto)?;
            Ok((rs, proto))
        })
        .collect();

    let mut cases = Vec::new();
    for &big_r in &grid.big_rs {
        for &lam in &grid.lambdas {
            for &n in &grid.ns {
                for j in 0..grid.deltas.len() {
                    cases.push((big_r, lam, n, j));
                }
            }
        }
    }
    cases
        .par_iter()
        .map(|&(big_r, lam, n, j)| {
            let delta = grid.deltas[j];
            let id = format!("lemma51 R={big_r} lambda={lam} n={n} delta={delta:e}");
            timed(opts, id, |rec| {
                for (k, v) in [
                    ("d", d as f64),
                    ("r", grid.r),
                    ("big_r", big_r),
                    ("lambda", lam),
                    ("n", n as f64),
                    ("delta", delta),
                    ("nodes_per_ray", nodes as f64),
                ] {
                    rec.input(k, v);
                }
                if big_r < grid.r || big_r > 0.5 * lam {
                    rec.note("skipped: requires r <= R <= lambda/2");
                    return Ok(());
                }
                let (rs, proto) = samplings[j].as_ref().map_err(Clone::clone)?;
                rec.inputs
                    .extend(proto.inputs.iter().map(|(k, v)| (k.clone(), *v)));
                let q_lam = tf.q_v(lam);
                rec.input("q_lambda", q_lam);
                let field = extrapolate(rs, big_r, n)?;
                let (sup_ball, sup_annulus) =
                    field_gaps(tf, &field, rs.directions(), spec.sup_grid)?;
                rec.measure("sup_annulus", sup_annulus);
                let mut bi = BoundInputs::at_lambda(grid.r, big_r, delta, lam, q_lam);
                bi.dim = d;
                rec.check_upper("sup_ball_R", sup_ball, "lemma51", lemma51_rhs(&bi, n)?);
                Ok(())
            })
        })
        .collect()
}

/// The modulated-Gaussian family `v_k` with `k = |k| e₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct InstabilitySweep {
    pub dim: usize,
    pub m: u32,
    pub eps: f64,
    pub ks: Vec<f64>,
    pub r: f64,
}

/// `sup_{B_r} |𝓕v_k| = ½(2π)^{−d/2} ε|k|^{−m}(e^{−(|k|−r)²/2} + e^{−(|k|+r)²/2})` for `|k| > r`.
pub fn instability_sup_on_ball(dim: usize, m: u32, eps: f64, k: f64, r: f64) -> f64 {
    let g = |t: f64| (-0.5 * t * t).exp();
    0.5 * (2.0 * PI).powf(-0.5 * dim as f64) * eps * k.powi(-(m as i32)) * (g(k - r) + g(k + r))
}

/// Per `|k|`: the closed-form sup of `𝓕v_k` on `B_r` (cross-checked on a
/// grid), `‖v_k‖_∞ = ε|k|^{−m}` and `‖v_k‖_{L²}`; at the largest `|k|` the
/// inequality `‖v‖_∞ > (ln(3 + 1/‖𝓕v‖_{L∞(B_r)}))^{−0.6m}`. A final record
/// fits `ln sup_{B_r}|𝓕v_k|` against `−(|k|−r)²/2` and requires slope `1 ± 0.02`.
pub fn run_instability_sweep(
    plan: &InstabilitySweep,
    spec: &QuadratureSpec,
    opts: &SweepOptions,
) -> Vec<ExperimentRecord> {
    let d = plan.dim;
    let k_max = plan.ks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let beta = BETA_FACTOR * plan.m as f64;
    let mut out: Vec<ExperimentRecord> = plan
        .ks
        .par_iter()
        .map(|&k| {
            timed(opts, format!("instability k={k}"), |rec| {
                for (key, v) in [
                    ("d", d as f64),
                    ("m", plan.m as f64),
                    ("eps", plan.eps),
                    ("k", k),
                    ("r", plan.r),
                ] {
                    rec.input(key, v);
                }
                if !(k > plan.r) {
                    return Err(Error::InvalidParameter(format!(
                        "|k| = {k} must exceed r = {}",
                        plan.r
                    )));
                }
                let mut kv = vec![0.0; d];
                kv[0] = k;
                let tf = TestFunction::instability(d, &kv, plan.m, plan.eps)?;

                let closed = instability_sup_on_ball(d, plan.m, plan.eps, k, plan.r);
                // Closed grid on the e₁ diameter: the sup sits at ξ = r e₁.
                let g = spec.sup_grid;
                let on_grid = (0..g)
                    .map(|i| {
                        let mut xi = vec![0.0; d];
                        xi[0] = plan.r * (-1.0 + 2.0 * i as f64 / (g - 1) as f64);
                        tf.eval_fv(&xi).norm()
                    })
                    .fold(0.0, f64::max);
                rec.check_equal(
                    "sup_fv_ball_r_grid",
                    on_grid,
                    "sup_fv_ball_r",
                    closed,
                    1e-12 * closed,
                );

                let amplitude = plan.eps * k.powi(-(plan.m as i32));
                let zero_field = ZeroField {
                    dim: d,
                    radius: plan.r,
                };
                let zero = |_: &[f64]| Ok(Complex64::new(0.0, 0.0));
                let v_inf = error_norm(
                    &zero,
                    &tf,
                    NormSpec::new(NormKind::SupNorm, d),
                    spec,
                    &zero_field,
                )?;
                rec.check_equal("v_inf", v_inf, "eps_k_pow_minus_m", amplitude, 0.0);
                let v_l2 = error_norm(
                    &zero,
                    &tf,
                    NormSpec::new(NormKind::L2, d),
                    spec,
                    &zero_field,
                )?;
                let l2_closed =
                    amplitude * (0.5 * PI.powf(0.5 * d as f64) * (1.0 + (-k * k).exp())).sqrt();
                rec.check_equal(
                    "v_l2",
                    v_l2,
                    "v_l2_closed_form",
                    l2_closed,
                    1e-8 * l2_closed,
                );

                if k == k_max {
                    rec.input("beta", beta);
                    let floor = (3.0 + 1.0 / closed).ln().powf(-beta);
                    rec.check_lower("v_inf", v_inf, "log_stability_floor", floor);
                }
                Ok(())
            })
        })
        .collect();

    out.push(timed(opts, "instability fit".into(), |rec| {
        rec.input("d", d as f64);
        rec.input("m", plan.m as f64);
        rec.input("eps", plan.eps);
        rec.input("r", plan.r);
        rec.input("points", plan.ks.len() as f64);
        let x: Vec<f64> = plan
            .ks
            .iter()
            .map(|k| -0.5 * (k - plan.r).powi(2))
            .collect();
        let sup = |k: f64| instability_sup_on_ball(d, plan.m, plan.eps, k, plan.r);
        let y: Vec<f64> = plan.ks.iter().map(|&k| sup(k).ln()).collect();
        // Same fit with the algebraic factor |k|^{-m} divided out.
        let y_bare: Vec<f64> = plan
            .ks
            .iter()
            .map(|&k| (sup(k) * k.powi(plan.m as i32)).ln())
            .collect();
        rec.measure("slope_without_prefactor", fit_slope(&x, &y_bare)?);
        rec.check_equal("slope", fit_slope(&x, &y)?, "unit_slope", 1.0, 0.02);
        Ok(())
    }));
    out
}

/// Grid of the Chebyshev truncation campaign for `f(t) = e^{ict}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationPlan {
    pub cs: Vec<f64>,
    pub rhos: Vec<f64>,
    /// `ρ′` runs over `{1, ρ/2 − edge_gap}`.
    pub edge_gap: f64,
    pub n_max: usize,
    /// Gauss–Chebyshev nodes for the coefficients; the self-check doubles it.
    pub nodes: usize,
    pub grid: usize,
}

impl Default for TruncationPlan {
    fn default() -> Self {
        Self {
            cs: vec![1.0, 3.0, 10.0],
            rhos: vec![3.0, 5.0],
            edge_gap: 0.1,
            n_max: 30,
            // Coefficient roundoff averages down like 1/√M and is then
            // amplified by T_n(ρ′) ~ (2ρ′)^n/2; 2^16 nodes keep it far below
            // the bound at ρ′ = 2.4, n = 30.
            nodes: 1 << 16,
            grid: 2001,
        }
    }
}

/// Measured `sup_{[−ρ′,ρ′]} |f − Σ_{k<n} b_k T_k|` against
/// `2M_ρ(1 − 2ρ′/ρ)^{−1}(2ρ′/ρ)^n` with zero slack, `M_ρ = e^{c(ρ − 1/ρ)/2}`.
/// The coefficients are recomputed with twice the nodes; if the two
/// partial sums differ by more than [`DRIFT_FRACTION`] of the bound the
/// record fails.
pub fn run_cheb_truncation(plan: &TruncationPlan, opts: &SweepOptions) -> Vec<ExperimentRecord> {
    let mut cases = Vec::new();
    for &c in &plan.cs {
        for &rho in &plan.rhos {
            let mut primes = vec![1.0, 0.5 * rho - plan.edge_gap];
            primes.dedup();
            for rp in primes {
                cases.push((c, rho, rp));
            }
        }
    }
    cases
        .par_iter()
        .flat_map_iter(|&(c, rho, rp)| truncation_case(plan, c, rho, rp, opts))
        .collect()
}

fn truncation_case(
    plan: &TruncationPlan,
    c: f64,
    rho: f64,
    rp: f64,
    opts: &SweepOptions,
) -> Vec<ExperimentRecord> {
    let start = Instant::now();
    let f = |t: f64| Complex64::from_polar(1.0, c * t);
    let coeffs = |nodes: usize| {
        let samples: Vec<Complex64> = gauss_chebyshev_nodes(nodes).into_iter().map(f).collect();
        cheb_coeffs(&samples, plan.n_max)
    };
    let m_rho = (0.5 * c * (rho - 1.0 / rho)).exp();
    let setup = EllipseParams::new(rho, rp, m_rho)
        .and_then(|ep| Ok((ep, coeffs(plan.nodes)?, coeffs(2 * plan.nodes)?)));
    let grid: Vec<f64> = (0..plan.grid)
        .map(|i| -rp + 2.0 * rp * i as f64 / (plan.grid - 1).max(1) as f64)
        .collect();
    let mut records: Vec<ExperimentRecord> = (0..=plan.n_max)
        .map(|n| {
            let id = format!("cheb-truncation c={c} rho={rho} rho_prime={rp} n={n}");
            timed(opts, id, |rec| {
                for (k, v) in [
                    ("c", c),
                    ("rho", rho),
                    ("rho_prime", rp),
                    ("m_rho", m_rho),
                    ("n", n as f64),
                    ("nodes", plan.nodes as f64),
                ] {
                    rec.input(k, v);
                }
                let (ep, base, refined) = setup.as_ref().map_err(Clone::clone)?;
                let (base, refined) = (base.truncated(n), refined.truncated(n));
                let bound = lemma71_bound(ep, n);
                let mut err: f64 = 0.0;
                let mut drift: f64 = 0.0;
                for &t in &grid {
                    let s = base.eval(t)?;
                    err = err.max((f(t) - s).norm());
                    drift = drift.max((s - refined.eval(t)?).norm());
                }
                rec.measure("node_doubling_drift", drift);
                if drift > DRIFT_FRACTION * bound {
                    return Err(Error::NonConvergent {
                        what: format!(
                            "Chebyshev coefficients of e^(i{c}t), n = {n}, node doubling"
                        ),
                        base: drift,
                        refined: DRIFT_FRACTION * bound,
                    });
                }
                let ok = err <= bound;
                rec.measure("sup_truncation", err);
                rec.bounds.insert("lemma71".into(), bound);
                let name = "sup_truncation_vs_lemma71".to_string();
                rec.passed.insert(name.clone(), ok);
                rec.comparisons.push(Comparison {
                    name,
                    kind: CompareKind::Upper,
                    measured: err,
                    bound,
                    passed: ok,
                });
                Ok(())
            })
        })
        .collect();
    if opts.timing {
        // The shared coefficient work is charged to the first record.
        if let Some(first) = records.first_mut() {
            first.runtime_ms = first.runtime_ms.max(start.elapsed().as_millis() as u64);
        }
    }
    records
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_noise_has_sup_delta() {
        let noise = NoiseModel::new(NoiseKind::default(), 1e-3).unwrap();
        let (e, desc) = noise.realize(1, 1.0, 64).unwrap();
        assert_eq!(e(&[0.0]).norm(), 1e-3);
        assert!((desc[0].1 - 0.9 * PI * 32.0).abs() < 1e-12);
        let worst = (0..10001)
            .map(|i| e(&[-1.0 + 2e-4 * i as f64]).norm())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-3 * (1.0 + 1e-15));
    }

    #[test]
    fn random_noise_is_seeded_and_normalised() {
        let noise = NoiseModel::new(NoiseKind::UniformRandom { seed: 7 }, 0.5).unwrap();
        let (e1, _) = noise.realize(2, 1.0, 64).unwrap();
        let (e2, _) = noise.realize(2, 1.0, 64).unwrap();
        assert_eq!(e1(&[0.3, -0.2]), e2(&[0.3, -0.2]));
        assert!((e1(&[0.0, 0.0]).norm() - 0.5).abs() < 1e-15);
        assert!(e1(&[0.7, 0.1]).norm() <= 0.5 * (1.0 + 1e-12));
    }

    #[test]
    fn record_comparisons() {
        let mut rec = ExperimentRecord::new("x");
        assert!(rec.check_upper("a", 1.01, "b", 1.0));
        assert!(!rec.check_upper("c", 1.03, "d", 1.0));
        assert!(rec.check_lower("e", 2.0, "f", 1.0));
        assert!(rec.check_equal("g", 1.0, "h", 1.0, 0.0));
        assert!(!rec.all_passed());
        assert_eq!(rec.comparison_count(), 4);
        assert!((rec.comparisons[1].ratio().unwrap() - 1.03).abs() < 1e-15);
    }

    #[test]
    fn slope_of_a_line() {
        let x = [1.0, 2.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        assert!((fit_slope(&x, &y).unwrap() - 3.0).abs() < 1e-14);
        assert!(fit_slope(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn ball_grid_is_open_and_symmetric() {
        let pts = ball_grid(&[vec![1.0]], 2.0, 5);
        let t: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        for (a, b) in t.iter().zip([-1.6, -0.8, 0.0, 0.8, 1.6]) {
            assert!((a - b).abs() < 1e-15, "{t:?}");
        }
    }

    #[test]
    fn instability_closed_form_example() {
        let s = instability_sup_on_ball(1, 2, 1.0, 10.0, 1.0);
        let expected = 0.5 / (2.0 * PI).sqrt() * 0.01 * ((-40.5f64).exp() + (-60.5f64).exp());
        assert!((s - expected).abs() <= 1e-15 * expected);
    }
}
