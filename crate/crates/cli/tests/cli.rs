use std::path::Path;
use std::process::{Command, Output};

fn eisrank(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_eisrank"));
    cmd.args(args).env_remove("EISRANK_CACHE");
    if let Some(dir) = cache {
        cmd.arg("--cache-dir").arg(dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_json_reports_regime() {
    let o = eisrank(&["analyze", "--N", "11", "--p", "5"], None);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("\"regime\":\"merel\""), "{out}");
    assert!(!out.contains("timings"));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["N"], 11);
    assert_eq!(v["r"], 2);
    assert_eq!(v["ord"], 1);
    assert_eq!(v["counts"]["rank_T"], 6);
}

#[test]
fn analyze_181_is_equal_three() {
    let o = eisrank(&["analyze", "--N", "181", "--p", "5", "--timings"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["regime"], "equal-three");
    assert_eq!(v["r"], 4);
    assert!(v["timings"]["ord_ms"].is_u64());
}

#[test]
fn ord_only_leaves_rank_null() {
    let o = eisrank(&["analyze", "--N", "4229", "--p", "7", "--ord-only"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["r"].is_null());
    assert_eq!(v["ord"], 4);
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        &["analyze", "--N", "13", "--p", "5"][..],
        &["analyze", "--N", "15", "--p", "7"],
        &["analyze", "--N", "11", "--p", "4"],
        &["analyze", "--N", "11"],
    ] {
        let o = eisrank(args, None);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn dimension_cap_exits_4_with_error_in_rank() {
    let o = eisrank(
        &["--dim-cap", "10", "analyze", "--N", "181", "--p", "5"],
        None,
    );
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["r"]["error"]["kind"], "dimension-cap");
}

#[test]
fn scan_csv_header_and_order() {
    let header = "N,p,s,ord,val_chi_theta_s,r,regime,merel_ok,lecouturier_ok,prop51_ok,rank_T,new_eisenstein";
    let one = eisrank(
        &[
            "scan", "--p", "5", "--n-min", "1", "--n-max", "200", "--jobs", "1",
        ],
        None,
    );
    let four = eisrank(
        &[
            "scan", "--p", "5", "--n-min", "1", "--n-max", "200", "--jobs", "4",
        ],
        None,
    );
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(stdout(&one), stdout(&four));
    let out = stdout(&one);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], header);
    let levels: Vec<u64> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(levels, [11, 31, 41, 61, 71, 101, 131, 151, 181, 191]);
    assert_eq!(lines[1], "11,5,1,1,1,2,merel,true,true,true,6,0");
}

#[test]
fn cached_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["analyze", "--N", "61", "--p", "5"];
    let first = eisrank(&args, Some(dir.path()));
    let files = std::fs::read_dir(dir.path()).unwrap().count();
    assert!(files > 0);
    let second = eisrank(&args, Some(dir.path()));
    let plain = eisrank(&args, None);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, plain.stdout);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), files);
}

#[test]
fn level_square_for_11() {
    let o = eisrank(&["level-square", "--N", "11", "--p", "5"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dim_e"], 2);
    assert_eq!(v["old_part"], 2);
    assert_eq!(v["new_count"], 0);
    assert_eq!(v["matches_prediction"], true);
}

#[test]
fn selfcheck_passes() {
    let o = eisrank(&["selfcheck"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("ok")));
}
