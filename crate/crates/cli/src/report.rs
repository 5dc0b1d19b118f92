//! Running a configured campaign and writing `records.csv` / `summary.txt`.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chebext::experiments::{
    run_cheb_truncation, run_delta_sweep, run_demo_reconstruct, run_instability_sweep,
    run_lemma51_grid, ExperimentRecord,
};
use thiserror::Error;

use crate::config::{Campaign, CampaignConfig, Plan};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

/// Records of one campaign run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub campaign: Campaign,
    pub records: Vec<ExperimentRecord>,
}

impl Outcome {
    pub fn comparisons(&self) -> usize {
        self.records
            .iter()
            .map(ExperimentRecord::comparison_count)
            .sum()
    }

    pub fn failures(&self) -> Vec<&ExperimentRecord> {
        self.records.iter().filter(|r| !r.all_passed()).collect()
    }

    pub fn all_passed(&self) -> bool {
        self.records.iter().all(ExperimentRecord::all_passed)
    }

    /// Largest `measured / bound` over the upper-bound comparisons.
    pub fn worst_ratio(&self) -> Option<(String, String, f64)> {
        self.records
            .iter()
            .flat_map(|r| {
                r.comparisons
                    .iter()
                    .filter_map(move |c| c.ratio().map(|q| (r, c, q)))
            })
            .max_by(|a, b| a.2.total_cmp(&b.2))
            .map(|(r, c, q)| (r.experiment_id.clone(), c.name.clone(), q))
    }
}

pub fn run(config: &CampaignConfig) -> Outcome {
    let (spec, noise, opts) = (&config.quadrature, &config.noise, &config.options);
    let records = match &config.plan {
        Plan::DeltaSweep {
            function,
            template,
            taus,
            deltas,
        } => run_delta_sweep(function, template, taus, deltas, noise, spec, opts),
        Plan::Instability(plan) => run_instability_sweep(plan, spec, opts),
        Plan::Lemma51Grid { function, grid } => run_lemma51_grid(function, grid, noise, spec, opts),
        Plan::ChebTruncation(plan) => run_cheb_truncation(plan, opts),
        Plan::DemoReconstruct {
            function,
            params,
            tau,
        } => {
            vec![run_demo_reconstruct(
                function, params, *tau, noise, spec, opts,
            )]
        }
    };
    Outcome {
        campaign: config.campaign,
        records,
    }
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn keys<'a, F, I>(records: &'a [ExperimentRecord], pick: F) -> Vec<String>
where
    F: Fn(&'a ExperimentRecord) -> I,
    I: Iterator<Item = &'a String>,
{
    records
        .iter()
        .flat_map(pick)
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// One row per record: `experiment_id`, then `input.*`, `measured.*`,
/// `bound.*` and `passed.*` columns in key order, `runtime_ms`, `notes`.
/// Cells a record does not set are left empty.
pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: W) -> csv::Result<()> {
    let inputs = keys(records, |r| r.inputs.keys());
    let measured = keys(records, |r| r.measured.keys());
    let bounds = keys(records, |r| r.bounds.keys());
    let passed = keys(records, |r| r.passed.keys());

    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["experiment_id".to_string()];
    header.extend(inputs.iter().map(|k| format!("input.{k}")));
    header.extend(measured.iter().map(|k| format!("measured.{k}")));
    header.extend(bounds.iter().map(|k| format!("bound.{k}")));
    header.extend(passed.iter().map(|k| format!("passed.{k}")));
    header.push("runtime_ms".into());
    header.push("notes".into());
    w.write_record(&header)?;

    for r in records {
        let mut row = vec![r.experiment_id.clone()];
        let cell = |v: Option<&f64>| v.map_or_else(String::new, |&x| float(x));
        row.extend(inputs.iter().map(|k| cell(r.inputs.get(k))));
        row.extend(measured.iter().map(|k| cell(r.measured.get(k))));
        row.extend(bounds.iter().map(|k| cell(r.bounds.get(k))));
        row.extend(
            passed
                .iter()
                .map(|k| r.passed.get(k).map_or_else(String::new, |b| b.to_string())),
        );
        row.push(r.runtime_ms.to_string());
        row.push(r.notes.join("; "));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn summary(outcome: &Outcome) -> String {
    let mut s = format!("campaign: {}\n", outcome.campaign);
    let failures = outcome.failures();
    s += &format!(
        "{} records, {} comparisons, {} failed records\n",
        outcome.records.len(),
        outcome.comparisons(),
        failures.len()
    );
    match outcome.worst_ratio() {
        Some((id, name, q)) => s += &format!("worst measured/bound: {q:.6e} ({name} in {id})\n"),
        None => s += "worst measured/bound: n/a\n",
    }
    for r in failures {
        let failed: Vec<&str> = r
            .passed
            .iter()
            .filter(|(_, &ok)| !ok)
            .map(|(k, _)| k.as_str())
            .collect();
        s += &format!("FAILED {}: {}\n", r.experiment_id, failed.join(", "));
        for n in &r.notes {
            s += &format!("  note: {n}\n");
        }
    }
    s
}

/// Writes `records.csv` and `summary.txt` into `dir`, creating it if needed.
pub fn write_outputs(outcome: &Outcome, dir: &Path) -> Result<(), ReportError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ReportError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let csv_path = dir.join("records.csv");
    let file = fs::File::create(&csv_path).map_err(io(&csv_path))?;
    write_csv(&outcome.records, std::io::BufWriter::new(file)).map_err(|source| {
        ReportError::Csv {
            path: csv_path.clone(),
            source,
        }
    })?;
    let summary_path = dir.join("summary.txt");
    fs::write(&summary_path, summary(outcome)).map_err(io(&summary_path))?;
    Ok(())
}
