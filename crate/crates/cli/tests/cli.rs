use std::process::{Command, Output};

use serde_json::Value;
use zerofull::laws::Verdict;
use zerofull::regime::RegimeReport;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zerofull"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, Output) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    (serde_json::from_slice(&out.stdout).expect("valid json"), out)
}

#[test]
fn regime_examples() {
    let (doc, out) = json(&["regime", "12", "18"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(doc["result"]["regime"], "same_primes_independent");
    assert_eq!(doc["result"]["alpha1"], "1/2");
    assert_eq!(doc["result"]["alpha2"], "2");
    let (doc, _) = json(&["regime", "-b", "4", "-t", "8"]);
    assert_eq!(doc["result"]["regime"], "multiplicatively_dependent");
    assert_eq!(doc["result"]["alpha1"], "3/2");
    let (doc, _) = json(&["regime", "3", "2"]);
    assert_eq!(doc["result"]["regime"], "different_primes");
}

#[test]
fn verdict_exit_codes() {
    let cases: [(&[&str], &str, i32); 4] = [
        (&["-b", "5", "-D", "1,2", "-t", "5", "--psi", "pow:c=1/4,theta=1", "--f", "s=0.43"], "zero", 0),
        (&["-b", "3", "-D", "0,2", "-t", "9", "--psi", "pow:theta=2", "--f", "s=0.3"], "full", 0),
        (&["-b", "12", "-D", "0,6", "-t", "18", "--psi", "pow:theta=2,base=12", "--f", "s=gamma/2"], "inconclusive", 3),
        (&["-b", "3", "-D", "0,2", "--psi", "table:1/9,1/81,1/729", "--f", "s=2/5"], "undecided", 4),
    ];
    for (args, outcome, code) in cases {
        let mut all = vec!["verdict"];
        all.extend(args);
        let (doc, out) = json(&all);
        assert_eq!(doc["result"]["outcome"], outcome, "{args:?}");
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        assert!(out.stderr.is_empty());
    }
}

#[test]
fn classify_census_predict_examples() {
    let (doc, _) = json(&["classify", "-b", "5", "-D", "1,2", "-p", "1", "-n", "1", "-r", "1/20"]);
    assert_eq!(doc["result"]["form"]["form"], "empty");
    let (doc, _) = json(&["census", "-b", "3", "-D", "0,2", "-t", "3", "-n", "2", "-r", "1/100", "--method", "both"]);
    let rows = doc["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["count"] == 8));
    let (doc, _) = json(&["predict", "-b", "3", "-D", "0,2", "-t", "2", "--lambda", "3"]);
    let entry = &doc["result"]["prediction"]["entries"][0];
    assert_eq!(entry["grade"], "conjecture");
    assert_eq!(entry["value"]["value"], 0.0);
}

#[test]
fn json_output_round_trips() {
    let args = ["verdict", "-b", "3", "-D", "0,2", "-t", "9", "--psi", "pow:theta=2", "--f", "s=gamma/3", "--format", "json"];
    let first = run(&args);
    let doc: Value = serde_json::from_slice(&first.stdout).unwrap();
    let verdict: Verdict = serde_json::from_value(doc["result"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&verdict).unwrap(), doc["result"]);

    let (doc, _) = json(&["regime", "12", "18"]);
    let report: RegimeReport = serde_json::from_value(doc["result"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&report).unwrap(), doc["result"]);

    // the echoed config, fed back as a file, reproduces the run byte for byte
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    let config = doc_config(&first);
    std::fs::write(&path, config).unwrap();
    let again = run(&["verdict", "--config", path.to_str().unwrap()]);
    assert_eq!(again.stdout, first.stdout);
}

fn doc_config(out: &Output) -> String {
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    doc["config"]
        .as_object()
        .unwrap()
        .iter()
        .filter(|(k, _)| *k != "command")
        .map(|(k, v)| match v {
            Value::String(s) => format!("{k} = {s}\n"),
            other => format!("{k} = {other}\n"),
        })
        .collect()
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("census.conf");
    std::fs::write(&path, "# census run\nb = 3\nD = 0,2\nt = 3\nn = 2\nr = 1/100\nformat = csv\n").unwrap();
    let out = run(&["census", "--config", path.to_str().unwrap(), "-r", "1/10"]);
    let text = stdout(&out);
    assert!(text.contains("# r = 1/10\n"), "{text}");
    assert!(text.lines().any(|l| l == "n,t,radius,count,method"));
    std::fs::write(&path, "b = 3\npsi = pow:theta=1\n").unwrap();
    let out = run(&["census", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn machine_output_is_reproducible() {
    let args = ["census", "-b", "3", "-D", "0,2", "-t", "2", "-n", "8..12", "--theta", "6/5", "--format", "jsonl"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let mut threaded = args.to_vec();
    threaded.extend(["--workers", "3"]);
    let c = run(&threaded);
    let rows = |o: &Output| stdout(o).lines().skip(1).map(String::from).collect::<Vec<_>>();
    assert_eq!(rows(&a), rows(&c));
    assert_eq!(rows(&a).len(), 5);
}

#[test]
fn plot_and_csv_formats() {
    let base = ["census", "-b", "3", "-D", "0,2", "-t", "3", "-n", "1..4", "--theta", "2"];
    let mut plot = base.to_vec();
    plot.extend(["--format", "plot"]);
    let text = stdout(&run(&plot));
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 4);
    assert!(data.iter().all(|l| l.split_whitespace().count() == 2));
    let out = run(&["regime", "3", "2", "--format", "plot"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn errors_go_to_stderr_with_codes() {
    let cases: [(&[&str], i32); 5] = [
        (&["classify", "-b", "3", "-D", "0,1,2", "-p", "1", "-n", "1", "-r", "1/20"], 2),
        (&["classify", "-b", "3", "-D", "0,2", "-p", "1", "-n", "1", "-r", "0.05"], 2),
        (&["classify", "-b", "3", "-D", "0,2", "-p", "1", "-n", "1", "-r", "1/2"], 1),
        (&["census", "-b", "3", "-D", "0,2", "-t", "3", "-n", "30", "-r", "1/100", "--method", "brute"], 1),
        (&["verdict", "-b", "3", "-D", "0,2", "-t", "2", "--psi", "pow:theta=2", "--f", "s=1/2", "--A", "affine:u=2"], 1),
    ];
    for (args, code) in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
    }
    let out = run(&["classify", "-b", "3", "-D", "0,1,2", "-p", "1", "-n", "1", "-r", "1/20"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("|D|"));
}

#[test]
fn checks_pass() {
    let out = run(&["check", "example31"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).matches("PASS").count(), 7);
    let out = run(&["check", "oracles", "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}
