use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use chebext::experiments::NoiseKind;
use chebext_cli::{
    parse_config, run, summary, write_csv, Campaign, ConfigError, Plan, DEFAULT_CONFIG,
};

fn chebext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chebext"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("campaign.conf");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn validation_message(text: &str) -> String {
    match parse_config(text) {
        Err(ConfigError::Validation(msg)) => msg,
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn minimal_delta_sweep_fills_defaults() {
    let cfg = parse_config("campaign = delta-sweep\n").unwrap();
    assert_eq!(cfg.campaign, Campaign::DeltaSweep);
    assert!(!cfg.options.timing);
    assert!(matches!(cfg.noise, NoiseKind::CosinePhase { q: None, .. }));
    match cfg.plan {
        Plan::DeltaSweep {
            function,
            template,
            taus,
            deltas,
        } => {
            assert_eq!(function.name(), "gaussian");
            assert_eq!(template.r(), 0.05);
            assert_eq!(taus, vec![0.1, 0.2]);
            assert_eq!(deltas.len(), 9);
            assert_eq!(deltas[0], 1e-2);
        }
        other => panic!("wrong plan {other:?}"),
    }
}

#[test]
fn delta_must_stay_below_n() {
    let msg = validation_message("campaign = delta-sweep\n[stability]\nN = 1\ndelta = 2.0\n");
    assert!(msg.contains("delta < N required"), "{msg}");
    let msg = validation_message(
        "campaign = delta-sweep\n[stability]\nN = 1\n[sweep]\ndeltas = 1e-3, 2\n",
    );
    assert!(msg.contains("delta < N required"), "{msg}");
}

#[test]
fn nu_below_one_is_rejected() {
    let msg = validation_message("campaign = delta-sweep\n[stability]\nnu = 0.5\n");
    assert!(msg.contains("nu >= 1"), "{msg}");
}

#[test]
fn uncertified_decay_is_rejected() {
    let msg = validation_message("campaign = delta-sweep\n[stability]\nN = 0.3\ndelta = 1e-3\n");
    assert!(msg.contains("does not bound Q_v"), "{msg}");
}

#[test]
fn unknown_and_duplicate_keys_name_their_line() {
    let err = parse_config("campaign = delta-sweep\n\n[sweep]\ntaus = 0.1\ntau_list = 0.2\n")
        .unwrap_err();
    assert_eq!(
        err,
        ConfigError::Parse {
            line: 5,
            key: "tau_list".into(),
            reason: "unknown key in [sweep]".into()
        }
    );
    let err =
        parse_config("campaign = delta-sweep\n[sweep]\ntaus = 0.1\ntaus = 0.2\n").unwrap_err();
    assert!(matches!(err, ConfigError::Parse { line: 4, .. }), "{err}");
    let err = parse_config("campaign = delta-sweep\n[sweep]\ntaus = 0.1, x\n").unwrap_err();
    assert!(
        matches!(err, ConfigError::Parse { line: 3, ref key, .. } if key == "taus"),
        "{err}"
    );
    let err = parse_config("campaign = sweep-everything\n").unwrap_err();
    assert!(matches!(err, ConfigError::Parse { line: 1, .. }), "{err}");
}

#[test]
fn alphas_map_to_taus() {
    let cfg = parse_config("campaign = delta-sweep\n[function]\nname = bump\n[stability]\nr = 1\n[sweep]\nalphas = 0.25\n").unwrap();
    match cfg.plan {
        Plan::DeltaSweep { taus, .. } => assert!((taus[0] - 0.5).abs() < 1e-15),
        other => panic!("wrong plan {other:?}"),
    }
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let cfg = parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(path.to_str().unwrap().contains(cfg.campaign.name()));
        seen += 1;
    }
    assert_eq!(seen, 5);
    assert!(parse_config(DEFAULT_CONFIG).is_ok());
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "campaign = delta-sweep\n[sweep]\ndeltas = []\n");
    let out = dir.path().join("out");
    let res = chebext(&["--config", &config, "--output", out.to_str().unwrap()]);
    assert_eq!(
        res.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let csv = fs::read_to_string(out.join("records.csv")).unwrap();
    assert_eq!(csv, "experiment_id,runtime_ms,notes\n");
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("0 comparisons"), "{summary}");
    assert!(String::from_utf8_lossy(&res.stdout).contains("campaign: delta-sweep"));
}

#[test]
fn unwritable_output_reports_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "campaign = delta-sweep\n[sweep]\ndeltas = []\n");
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    let out = blocker.join("out");
    let res = chebext(&[
        "--config",
        &config,
        "--output",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains(out.to_str().unwrap()));
}

#[test]
fn bad_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "campaign = delta-sweep\n[stability]\nnu = 0.5\n",
    );
    let res = chebext(&[
        "--config",
        &config,
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("nu >= 1"));
    let missing = dir.path().join("missing.conf");
    let res = chebext(&["--config", missing.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("missing.conf"));
}

#[test]
fn lemma51_campaign_passes_and_csv_is_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "campaign = lemma51-grid\n[sweep]\nradii = 1.5, 3\nlambdas = 4\nns = 4, 8\ndeltas = 1e-3\n",
    );
    let out = dir.path().join("out");
    let res = chebext(&[
        "--config",
        &config,
        "--output",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(
        res.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    assert!(res.stdout.is_empty());

    let mut reader = csv::Reader::from_path(out.join("records.csv")).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header.first().map(String::as_str), Some("experiment_id"));
    assert_eq!(&header[header.len() - 2..], ["runtime_ms", "notes"]);
    let group = |h: &str| {
        ["input.", "measured.", "bound.", "passed."]
            .iter()
            .position(|p| h.starts_with(p))
    };
    let groups: Vec<usize> = header[1..header.len() - 2]
        .iter()
        .map(|h| group(h).unwrap())
        .collect();
    assert!(groups.windows(2).all(|w| w[0] <= w[1]), "{header:?}");
    let inputs: Vec<&String> = header.iter().filter(|h| h.starts_with("input.")).collect();
    assert!(inputs.windows(2).all(|w| w[0] < w[1]));

    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    // R = 3 exceeds lambda / 2: kept with a note, no comparison.
    let notes = header.iter().position(|h| h == "notes").unwrap();
    let skipped = rows.iter().filter(|r| r[notes].contains("skipped")).count();
    assert_eq!(skipped, 2);
    // Floats round-trip exactly.
    let r_col = header.iter().position(|h| h == "input.r").unwrap();
    assert_eq!(rows[0][r_col].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn failing_comparison_exits_with_one() {
    // The instability fit misses its tolerance; everything else passes.
    let cfg = parse_config("campaign = instability\n[sweep]\nks = 4, 14\n").unwrap();
    let outcome = run(&cfg);
    assert!(!outcome.all_passed());
    let text = summary(&outcome);
    assert!(text.contains("FAILED instability fit"), "{text}");

    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "campaign = instability\n[sweep]\nks = 4, 14\n");
    let res = chebext(&[
        "--config",
        &config,
        "--output",
        dir.path().to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn csv_has_one_row_per_record() {
    let cfg = parse_config(
        "campaign = cheb-truncation\n[sweep]\ncs = 1\nrhos = 3\nn_max = 2\nnodes = 64\ngrid = 11\n",
    )
    .unwrap();
    let outcome = run(&cfg);
    // n = 0, 1, 2 at two values of rho'.
    assert_eq!(outcome.comparisons(), 6);
    let mut buf = Vec::new();
    write_csv(&outcome.records, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().nth(1).unwrap().contains("e0"), "{text}");
}
