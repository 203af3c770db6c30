use std::process::{Command, Output};

fn sumdisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumdisc"))
        .args(args)
        .env_remove("SUMDISC_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn certify_zero_is_case_one() {
    let o = sumdisc(&["certify", "--n", "1200", "--alpha", "0/1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["case"], "1");
    assert_eq!(v["measured"].as_f64().unwrap(), 200.0);
    assert_eq!(v["edge"]["l1"], 200);
}

#[test]
fn decimal_alpha_is_a_usage_error() {
    let o = sumdisc(&["certify", "--n", "1200", "--alpha", "0.25"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn small_n_is_a_usage_error_with_a_record() {
    let o = sumdisc(&["certify", "--n", "100", "--alpha", "1/3"]);
    assert_eq!(o.status.code(), Some(2));
    let rec: serde_json::Value =
        serde_json::from_str(String::from_utf8(o.stderr).unwrap().trim()).unwrap();
    assert_eq!(rec["status"], "error");
    assert!(rec["module"].is_string() && rec["invariant"].is_string());
}

#[test]
fn family_csv_for_small_n() {
    let o = sumdisc(&["family", "--n", "100", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "subfamily,d1,l1,d2,l2,k,b");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.iter().filter(|r| r.starts_with("E1,")).count(), 24);
    assert_eq!(rows.iter().filter(|r| r.starts_with("E2,")).count(), 0);
}

#[test]
fn family_export_honours_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_sumdisc"))
        .args(["family", "--n", "1024", "--out", "edges.jsonl", "--family-out", "fam/e0.jsonl"])
        .env("SUMDISC_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let fam = std::fs::read_to_string(dir.path().join("fam/e0.jsonl")).unwrap();
    let main = std::fs::read_to_string(dir.path().join("edges.jsonl")).unwrap();
    assert_eq!(fam, main);
    let e3: serde_json::Value = fam
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .find(|v| v["subfamily"] == "E3")
        .unwrap();
    assert!(e3["k"].is_u64() && e3["b"].is_u64());
}

#[test]
fn sweep_is_reproducible() {
    let args = ["sweep", "--n", "1024", "--grid", "200", "--random", "20", "--seed", "5"];
    let a = sumdisc(&args);
    let b = sumdisc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().next().unwrap(), "alpha,case,delta1,delta2,k,measured,bound,ok");
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn thread_count_does_not_change_output() {
    let one = sumdisc(&["--threads", "1", "twonorm", "--n", "576", "--colorings", "random:3,ones"]);
    let many = sumdisc(&["--threads", "4", "twonorm", "--n", "576", "--colorings", "random:3,ones"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
    assert!(stdout(&one).starts_with("coloring_id,S,bound,max_abs,ok\n"));
}

#[test]
fn exact_disc_of_two() {
    let o = sumdisc(&["disc", "--n", "2", "--method", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["disc_value"], 1);
    assert_eq!(v["witness_coloring"]["n"], 2);
}

#[test]
fn local_search_beyond_cap_is_refused() {
    let o = sumdisc(&["disc", "--n", "100", "--method", "local"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn spectrum_single_edge() {
    let o = sumdisc(&["spectrum", "--n", "64", "--grid", "4", "--edge", "1,3,5,2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha_num,alpha_den,magnitude");
    assert_eq!(lines[1], "0,1,6");
    assert_eq!(lines.len(), 5);
}

#[test]
fn verify_lemmas_passes_at_1024() {
    let o = sumdisc(&["verify-lemmas", "--n", "1024", "--grid", "2000"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let checks: Vec<serde_json::Value> =
        text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(checks.len(), 5);
    assert!(checks.iter().all(|c| c["ok"] == true));
}
