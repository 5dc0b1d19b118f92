//! Campaign configuration: a sectioned `key = value` document.
//!
//! ```text
//! campaign = delta-sweep
//!
//! [function]
//! name = gaussian
//! dim = 1
//!
//! [stability]
//! r = 0.05
//!
//! [sweep]
//! taus = 0.1, 0.2
//! deltas = 1e-2, 1e-3, 1e-4
//! ```
//!
//! `#` starts a comment. Lists are comma-separated. Keys not listed in
//! [`KNOWN_KEYS`] are rejected with their line number. Keys that exist but
//! do not apply to the chosen campaign are ignored.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use chebext::experiments::{
    InstabilitySweep, Lemma51Grid, NoiseKind, SweepOptions, TruncationPlan, DEFAULT_PHASE,
};
use chebext::extrapolation::{tau_of_alpha, StabilityParams};
use chebext::fourier::{QuadratureSpec, TestFunction};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: `{key}`: {reason}")]
    Parse {
        line: usize,
        key: String,
        reason: String,
    },
    #[error("invalid configuration: {0}")]
    Validation(String),
}

type Result<T> = std::result::Result<T, ConfigError>;

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Validation(msg.into())
}

/// Accepted keys per section; the empty section is the part before any header.
pub const KNOWN_KEYS: &[(&str, &[&str])] = &[
    ("", &["campaign"]),
    (
        "function",
        &[
            "name",
            "dim",
            "radius",
            "height",
            "k",
            "m",
            "eps",
            "smoothness",
        ],
    ),
    ("stability", &["N", "sigma", "nu", "r", "delta", "tau"]),
    (
        "sweep",
        &[
            "taus", "alphas", "deltas", "ks", "radii", "lambdas", "ns", "cs", "rhos", "edge_gap",
            "n_max", "nodes", "grid", "s",
        ],
    ),
    (
        "quadrature",
        &["radial_nodes", "angular_nodes", "sup_grid", "space_box"],
    ),
    ("noise", &["kind", "q", "phase", "seed"]),
    ("output", &["path", "timing"]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Campaign {
    DeltaSweep,
    Instability,
    Lemma51Grid,
    ChebTruncation,
    DemoReconstruct,
}

impl Campaign {
    pub fn name(self) -> &'static str {
        match self {
            Self::DeltaSweep => "delta-sweep",
            Self::Instability => "instability",
            Self::Lemma51Grid => "lemma51-grid",
            Self::ChebTruncation => "cheb-truncation",
            Self::DemoReconstruct => "demo-reconstruct",
        }
    }
}

impl fmt::Display for Campaign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Campaign {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [
            Self::DeltaSweep,
            Self::Instability,
            Self::Lemma51Grid,
            Self::ChebTruncation,
            Self::DemoReconstruct,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| format!("unknown campaign `{s}`"))
    }
}

/// What to run, with every parameter resolved.
#[derive(Debug, Clone)]
pub enum Plan {
    DeltaSweep {
        function: TestFunction,
        template: StabilityParams,
        taus: Vec<f64>,
        deltas: Vec<f64>,
    },
    Instability(InstabilitySweep),
    Lemma51Grid {
        function: TestFunction,
        grid: Lemma51Grid,
    },
    ChebTruncation(TruncationPlan),
    DemoReconstruct {
        function: TestFunction,
        params: StabilityParams,
        tau: f64,
    },
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub campaign: Campaign,
    pub plan: Plan,
    pub quadrature: QuadratureSpec,
    pub noise: NoiseKind,
    pub output: PathBuf,
    pub options: SweepOptions,
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

/// Raw `section.key → value` map with line numbers.
#[derive(Debug, Default)]
struct Document {
    entries: BTreeMap<(String, String), Entry>,
}

impl Document {
    fn parse(text: &str) -> Result<Self> {
        let mut doc = Self::default();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Parse {
                    line,
                    key: content.into(),
                    reason: "section header must end with `]`".into(),
                })?;
                let name = name.trim();
                if !KNOWN_KEYS.iter().any(|(s, _)| *s == name) || name.is_empty() {
                    return Err(ConfigError::Parse {
                        line,
                        key: name.into(),
                        reason: "unknown section".into(),
                    });
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
                line,
                key: content.into(),
                reason: "expected `key = value`".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let known = KNOWN_KEYS
                .iter()
                .find(|(s, _)| *s == section)
                .is_some_and(|(_, keys)| keys.contains(&key));
            if !known {
                let place = if section.is_empty() {
                    "top level".to_string()
                } else {
                    format!("[{section}]")
                };
                return Err(ConfigError::Parse {
                    line,
                    key: key.into(),
                    reason: format!("unknown key in {place}"),
                });
            }
            if value.is_empty() {
                return Err(ConfigError::Parse {
                    line,
                    key: key.into(),
                    reason: "missing value".into(),
                });
            }
            let slot = (section.clone(), key.to_string());
            if let Some(prev) = doc.entries.get(&slot) {
                return Err(ConfigError::Parse {
                    line,
                    key: key.into(),
                    reason: format!("duplicate key (first set on line {})", prev.line),
                });
            }
            doc.entries.insert(
                slot,
                Entry {
                    line,
                    value: value.to_string(),
                },
            );
        }
        Ok(doc)
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn parsed<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(e) => e.value.parse().map(Some).map_err(|_| ConfigError::Parse {
                line: e.line,
                key: key.into(),
                reason: format!(
                    "cannot parse `{}` as {}",
                    e.value,
                    std::any::type_name::<T>()
                ),
            }),
        }
    }

    fn list<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<Vec<T>>> {
        let Some(e) = self.get(section, key) else {
            return Ok(None);
        };
        if e.value == "[]" || e.value == "none" {
            return Ok(Some(Vec::new()));
        }
        e.value
            .split(',')
            .map(|item| {
                let item = item.trim();
                item.parse().map_err(|_| ConfigError::Parse {
                    line: e.line,
                    key: key.into(),
                    reason: format!(
                        "cannot parse list item `{item}` as {}",
                        std::any::type_name::<T>()
                    ),
                })
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }
}

fn decades(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|e| 10f64.powi(-e)).collect()
}

/// Builds the test function of the `[function]` section, or `default` when
/// the section does not name one.
fn build_function(doc: &Document, default: &str) -> Result<(TestFunction, String)> {
    let name: String = doc
        .parsed("function", "name")?
        .unwrap_or_else(|| default.to_string());
    let dim: usize = doc.parsed("function", "dim")?.unwrap_or(1);
    if !(1..=3).contains(&dim) {
        return Err(invalid("dim in {1, 2, 3} required"));
    }
    let err = |e: chebext::Error| invalid(format!("function `{name}`: {e}"));
    let tf = match name.as_str() {
        "gaussian" => TestFunction::gaussian(dim).map_err(err)?,
        "bump" => {
            let radius: f64 = doc.parsed("function", "radius")?.unwrap_or(1.0);
            if !(radius > 0.0) {
                return Err(invalid("radius > 0 required"));
            }
            match doc.parsed::<f64>("function", "height")? {
                Some(h) => TestFunction::bump(dim, radius, h).map_err(err)?,
                None => TestFunction::unit_mass_bump(dim, radius).map_err(err)?,
            }
        }
        "instability" => {
            let k: f64 = doc.parsed("function", "k")?.unwrap_or(5.0);
            let m: u32 = doc.parsed("function", "m")?.unwrap_or(2);
            let eps: f64 = doc.parsed("function", "eps")?.unwrap_or(1.0);
            let mut kv = vec![0.0; dim];
            kv[0] = k;
            TestFunction::instability(dim, &kv, m, eps).map_err(err)?
        }
        other => {
            return Err(invalid(format!(
                "unknown function `{other}` (gaussian, bump, instability)"
            )))
        }
    };
    let tf = match doc.parsed::<f64>("function", "smoothness")? {
        Some(m) => tf.with_smoothness(m).map_err(err)?,
        None => tf,
    };
    Ok((tf, name))
}

/// `(N, σ, ν, r, δ)` from `[stability]`, defaulting to the function's own
/// certificate. Explicit values must still certify the function's decay.
fn build_stability(
    doc: &Document,
    tf: &TestFunction,
    r_default: f64,
    delta_default: f64,
) -> Result<StabilityParams> {
    let dec = tf.decay();
    let big_n: f64 = doc.parsed("stability", "N")?.unwrap_or(dec.n);
    let sigma: f64 = doc.parsed("stability", "sigma")?.unwrap_or(dec.sigma);
    let nu: f64 = doc.parsed("stability", "nu")?.unwrap_or(dec.nu);
    let r: f64 = doc.parsed("stability", "r")?.unwrap_or(r_default);
    let delta: f64 = doc.parsed("stability", "delta")?.unwrap_or(delta_default);
    if !(nu >= 1.0) {
        return Err(invalid(format!("nu >= 1 (got nu = {nu})")));
    }
    if !(big_n > 0.0 && sigma > 0.0 && r > 0.0) {
        return Err(invalid("N > 0, sigma > 0 and r > 0 required"));
    }
    check_delta(delta, big_n)?;
    // Q_v(λ) ≤ N exp(σ λ^ν) on the certification grid λ = 0, 0.25, …, 20.
    for i in 0..=80 {
        let lambda = 0.25 * i as f64;
        let q = tf.q_v(lambda);
        if q > big_n * (sigma * lambda.powf(nu)).exp() {
            return Err(invalid(format!(
                "(N, sigma, nu) = ({big_n}, {sigma}, {nu}) does not bound Q_v at lambda = {lambda}"
            )));
        }
    }
    StabilityParams::new(big_n, sigma, nu, r, delta).map_err(|e| invalid(e.to_string()))
}

fn check_delta(delta: f64, big_n: f64) -> Result<()> {
    if !(delta < big_n) {
        return Err(invalid(format!(
            "delta < N required (delta = {delta}, N = {big_n})"
        )));
    }
    if !(delta > 0.0) {
        return Err(invalid(format!("delta > 0 required (got {delta})")));
    }
    Ok(())
}

fn check_taus(taus: &[f64]) -> Result<()> {
    match taus.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        Some(t) => Err(invalid(format!("tau in [0, 1] required (got {t})"))),
        None => Ok(()),
    }
}

/// `taus`, or `alphas` mapped through `τ(α)`.
fn taus_from(doc: &Document, nu: f64, default: &[f64]) -> Result<Vec<f64>> {
    let taus: Option<Vec<f64>> = doc.list("sweep", "taus")?;
    let alphas: Option<Vec<f64>> = doc.list("sweep", "alphas")?;
    let taus = match (taus, alphas) {
        (Some(_), Some(_)) => return Err(invalid("give either taus or alphas, not both")),
        (Some(t), None) => t,
        (None, Some(a)) => {
            if let Some(x) = a.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                return Err(invalid(format!("alpha in [0, 1] required (got {x})")));
            }
            a.iter().map(|&x| tau_of_alpha(x, nu)).collect()
        }
        (None, None) => default.to_vec(),
    };
    check_taus(&taus)?;
    Ok(taus)
}

fn build_noise(doc: &Document, dim: usize) -> Result<NoiseKind> {
    let kind: String = doc
        .parsed("noise", "kind")?
        .unwrap_or_else(|| "cosine".into());
    match kind.as_str() {
        "none" => Ok(NoiseKind::None),
        "cosine" => {
            let q: Option<Vec<f64>> = doc.list("noise", "q")?;
            if let Some(q) = &q {
                if q.len() != dim {
                    return Err(invalid(format!("noise q needs {dim} components")));
                }
            }
            let phase = doc.parsed("noise", "phase")?.unwrap_or(DEFAULT_PHASE);
            Ok(NoiseKind::CosinePhase { q, phase })
        }
        "random" => Ok(NoiseKind::UniformRandom {
            seed: doc.parsed("noise", "seed")?.unwrap_or(1),
        }),
        other => Err(invalid(format!(
            "unknown noise kind `{other}` (none, cosine, random)"
        ))),
    }
}

fn build_quadrature(
    doc: &Document,
    dim: usize,
    box_default: Option<f64>,
) -> Result<QuadratureSpec> {
    let base = QuadratureSpec::default_for(dim).map_err(|e| invalid(e.to_string()))?;
    QuadratureSpec::new(
        dim,
        doc.parsed("quadrature", "radial_nodes")?
            .unwrap_or(base.radial_nodes),
        doc.parsed("quadrature", "angular_nodes")?
            .unwrap_or(base.angular_nodes),
        doc.parsed("quadrature", "sup_grid")?
            .unwrap_or(base.sup_grid),
        doc.parsed("quadrature", "space_box")?
            .unwrap_or(box_default.unwrap_or(base.space_box)),
    )
    .map_err(|e| invalid(e.to_string()))
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<CampaignConfig> {
    let doc = Document::parse(text)?;
    let campaign: Campaign = match doc.get("", "campaign") {
        None => return Err(invalid("`campaign` is required")),
        Some(e) => e.value.parse().map_err(|reason| ConfigError::Parse {
            line: e.line,
            key: "campaign".into(),
            reason,
        })?,
    };
    let timing = doc.parsed("output", "timing")?.unwrap_or(false);
    let sobolev_index = doc.parsed("sweep", "s")?.unwrap_or(0.0);
    let options = SweepOptions {
        timing,
        sobolev_index,
    };
    let output = PathBuf::from(
        doc.parsed::<String>("output", "path")?
            .unwrap_or_else(|| "out".into()),
    );

    let (plan, dim, space_box) = match campaign {
        Campaign::DeltaSweep => {
            let (tf, _) = build_function(&doc, "gaussian")?;
            let deltas: Vec<f64> = doc
                .list("sweep", "deltas")?
                .unwrap_or_else(|| decades(2, 10));
            let template =
                build_stability(&doc, &tf, 0.05, deltas.first().copied().unwrap_or(1e-3))?;
            for &d in &deltas {
                check_delta(d, template.big_n())?;
            }
            let taus = taus_from(&doc, template.nu(), &[0.1, 0.2])?;
            let dim = tf.dim();
            (
                Plan::DeltaSweep {
                    function: tf,
                    template,
                    taus,
                    deltas,
                },
                dim,
                None,
            )
        }
        Campaign::DemoReconstruct => {
            let (tf, _) = build_function(&doc, "bump")?;
            let params = build_stability(&doc, &tf, 1.0, (-16f64).exp())?;
            let tau: f64 = doc.parsed("stability", "tau")?.unwrap_or(0.5);
            check_taus(&[tau])?;
            let dim = tf.dim();
            (
                Plan::DemoReconstruct {
                    function: tf,
                    params,
                    tau,
                },
                dim,
                Some(2.0),
            )
        }
        Campaign::Lemma51Grid => {
            let (tf, _) = build_function(&doc, "gaussian")?;
            let r: f64 = doc.parsed("stability", "r")?.unwrap_or(1.0);
            if !(r > 0.0) {
                return Err(invalid("r > 0 required"));
            }
            let grid = Lemma51Grid {
                r,
                big_rs: doc
                    .list("sweep", "radii")?
                    .unwrap_or_else(|| vec![1.5, 2.0]),
                lambdas: doc
                    .list("sweep", "lambdas")?
                    .unwrap_or_else(|| vec![4.0, 8.0]),
                ns: doc
                    .list("sweep", "ns")?
                    .unwrap_or_else(|| (2..=16).collect()),
                deltas: doc
                    .list("sweep", "deltas")?
                    .unwrap_or_else(|| vec![1e-3, 1e-6]),
            };
            if let Some(d) = grid.deltas.iter().find(|d| !(**d >= 0.0 && d.is_finite())) {
                return Err(invalid(format!("delta >= 0 required (got {d})")));
            }
            if let Some(l) = grid.lambdas.iter().find(|l| !(**l > 0.0)) {
                return Err(invalid(format!("lambda > 0 required (got {l})")));
            }
            let dim = tf.dim();
            (Plan::Lemma51Grid { function: tf, grid }, dim, None)
        }
        Campaign::Instability => {
            let dim: usize = doc.parsed("function", "dim")?.unwrap_or(1);
            if !(1..=3).contains(&dim) {
                return Err(invalid("dim in {1, 2, 3} required"));
            }
            if let Some(name) = doc.parsed::<String>("function", "name")? {
                if name != "instability" {
                    return Err(invalid(
                        "the instability campaign uses the instability family",
                    ));
                }
            }
            let plan = InstabilitySweep {
                dim,
                m: doc.parsed("function", "m")?.unwrap_or(2),
                eps: doc.parsed("function", "eps")?.unwrap_or(1.0),
                ks: doc
                    .list("sweep", "ks")?
                    .unwrap_or_else(|| vec![4.0, 6.0, 8.0, 10.0, 12.0, 14.0]),
                r: doc.parsed("stability", "r")?.unwrap_or(1.0),
            };
            if plan.m == 0 || !(plan.eps > 0.0) || !(plan.r > 0.0) {
                return Err(invalid("m >= 1, eps > 0 and r > 0 required"));
            }
            if let Some(k) = plan.ks.iter().find(|k| !(**k > plan.r.max(1.0))) {
                return Err(invalid(format!("|k| > max(1, r) required (got {k})")));
            }
            (Plan::Instability(plan), dim, None)
        }
        Campaign::ChebTruncation => {
            let base = TruncationPlan::default();
            let plan = TruncationPlan {
                cs: doc.list("sweep", "cs")?.unwrap_or(base.cs),
                rhos: doc.list("sweep", "rhos")?.unwrap_or(base.rhos),
                edge_gap: doc.parsed("sweep", "edge_gap")?.unwrap_or(base.edge_gap),
                n_max: doc.parsed("sweep", "n_max")?.unwrap_or(base.n_max),
                nodes: doc.parsed("sweep", "nodes")?.unwrap_or(base.nodes),
                grid: doc.parsed("sweep", "grid")?.unwrap_or(base.grid),
            };
            if let Some(rho) = plan.rhos.iter().find(|r| !(**r > 2.0)) {
                return Err(invalid(format!("rho > 2 required (got {rho})")));
            }
            if plan.nodes < plan.n_max || plan.grid < 2 {
                return Err(invalid("nodes >= n_max and grid >= 2 required"));
            }
            (Plan::ChebTruncation(plan), 1, None)
        }
    };
    Ok(CampaignConfig {
        campaign,
        plan,
        quadrature: build_quadrature(&doc, dim, space_box)?,
        noise: build_noise(&doc, dim)?,
        output,
        options,
    })
}
