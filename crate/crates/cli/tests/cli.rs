use std::path::Path;
use std::process::{Command, Output};

fn lnnd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lnnd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn minimal_config(dir: &Path) -> std::path::PathBuf {
    let text = format!(
        r#"{{"schema":1,"d":2,"alpha":2.0,"lambda":1.0,"n_values":[1000],"trials":2,
            "betas":[-1.0,0.0],"mode":"binomial","master_seed":1,"containment_c":4.0,
            "out_dir":{:?}}}"#,
        dir.join("out").to_str().unwrap()
    );
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn constants_print_shortest_round_trip_values() {
    let o = lnnd(&["constants", "--d", "2", "--alpha", "2", "--lambda", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("\"A_d\": 0.3183098861837907"), "{text}");
    assert!(text.contains("\"C_d\": 0.7978845608028654"), "{text}");
    let v = json(&o);
    assert_eq!(v["theta_d_minus_1"].as_f64(), Some(2.0));
    assert_eq!(v["theta_d"].as_f64(), Some(std::f64::consts::PI));

    let o = lnnd(&["constants", "--d", "3", "--alpha", "2", "--lambda", "1"]);
    assert!(stdout(&o).contains("\"C_d\": 2.0"));
}

#[test]
fn usage_errors_exit_with_two() {
    let o = lnnd(&["constants", "--d", "2", "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
    let o = lnnd(&["constants", "--d", "1", "--alpha", "2", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("d must be >= 2"));
    let o = lnnd(&["expected-isolated", "--d", "2", "--alpha", "2", "--lambda", "1", "--n", "100"]);
    assert_eq!(o.status.code(), Some(2));
    let o = lnnd(&["sample", "--d", "2", "--alpha", "2", "--lambda", "1", "--n", "5", "--mode", "grid"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sample_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cloud.csv");
    let args = ["sample", "--d", "3", "--alpha", "1.5", "--lambda", "1", "--n", "50", "--seed", "4"];
    let o = lnnd(&[&args[..], &["--out", out.to_str().unwrap()]].concat());
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x0,x1,x2");
    assert_eq!(lines.len(), 51);
    assert_eq!(stdout(&lnnd(&args)), text);
}

#[test]
fn oracles_report_json() {
    let o = lnnd(&["verify-integral", "--d", "2", "--alpha", "2", "--lambda", "1", "--rho", "0", "--r", "1"]);
    assert!(o.status.success());
    let v = json(&o);
    let m = v["ball_measure"].as_f64().unwrap();
    assert!((m - (1.0 - (-1f64).exp())).abs() < 1e-12);
    assert!(v["bounds"].is_null());

    let o = lnnd(&["verify-integral", "--d", "2", "--alpha", "2", "--lambda", "1", "--rho", "4", "--r", "0.3"]);
    let v = json(&o);
    assert_eq!(v["bounds"]["contains_value"].as_bool(), Some(true));

    let o = lnnd(&[
        "expected-isolated", "--d", "2", "--alpha", "2", "--lambda", "1", "--n", "100000", "--beta", "-1",
        "--mode", "binomial",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    assert!(v["expected_isolated"].as_f64().unwrap() > v["limit"].as_f64().unwrap());
}

#[test]
fn simulate_then_analyze_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = minimal_config(dir.path());
    let o = lnnd(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = dir.path().join("out");
    let records = std::fs::read_to_string(out.join("records.csv")).unwrap();
    assert_eq!(records.lines().count(), 3);
    assert!(records.starts_with(
        "n,trial,realized_n,dn,gumbel_T,strong_ratio,W_beta=-1.0,W_beta=0.0,contained,shell_hit\n"
    ));
    let summary = std::fs::read(out.join("summary.json")).unwrap();

    let again = dir.path().join("again");
    let o = lnnd(&["simulate", "--config", cfg.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(again.join("records.csv")).unwrap(), records);
    assert_eq!(std::fs::read(again.join("summary.json")).unwrap(), summary);

    let rec = out.join("records.csv");
    let o = lnnd(&["analyze", "--records", rec.to_str().unwrap(), "--d", "2", "--alpha", "2", "--lambda", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(o.stdout, summary);

    let plots = dir.path().join("plots");
    let o = lnnd(&[
        "analyze", "--records", rec.to_str().unwrap(), "--d", "2", "--alpha", "2", "--lambda", "1", "--plot",
        "--out", plots.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(plots.join("summary.json")).unwrap(), summary);
    let band = std::fs::read_to_string(plots.join("strong_band.txt")).unwrap();
    let ys: Vec<f64> = band
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ys, vec![0.5, 0.5, 1.0, 1.0]);
    for name in ["gumbel_ecdf.txt", "gumbel_cdf.txt", "strong_ratio.txt"] {
        let text = std::fs::read_to_string(plots.join(name)).unwrap();
        assert!(text.lines().filter(|l| !l.starts_with('#')).all(|l| l.is_empty() || l.split(' ').count() == 2));
    }
}

#[test]
fn bad_records_and_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    let o = lnnd(&["analyze", "--records", empty.to_str().unwrap(), "--d", "2", "--alpha", "2", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(2));

    let partial = dir.path().join("partial.csv");
    std::fs::write(&partial, "n,trial,dn,W_beta=0.0\n100,0,0.3,1\n").unwrap();
    let o = lnnd(&["analyze", "--records", partial.to_str().unwrap(), "--d", "2", "--alpha", "2", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for col in ["realized_n", "gumbel_T", "strong_ratio", "contained"] {
        assert!(err.contains(col), "{err}");
    }

    let cfg = minimal_config(dir.path());
    let text = std::fs::read_to_string(&cfg).unwrap().replace("\"trials\"", "\"trails\"");
    std::fs::write(&cfg, text).unwrap();
    let o = lnnd(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = lnnd(&["simulate", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn strong_law_prints_trajectory() {
    let o = lnnd(&["strong-law", "--d", "2", "--alpha", "2", "--lambda", "1", "--n-max", "4096", "--seed", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,strong_ratio");
    assert_eq!(lines.len(), 1 + 9);
    assert!(lines.last().unwrap().starts_with("4096,"));
    let o = lnnd(&["strong-law", "--d", "2", "--alpha", "2", "--lambda", "1", "--n-max", "100"]);
    assert_eq!(o.status.code(), Some(2));
}
