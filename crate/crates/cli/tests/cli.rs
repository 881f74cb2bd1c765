use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_indexcoding"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn catalog_listing() {
    assert_eq!(
        stdout(&["catalog", "--no", "140"]).trim(),
        "(1|-),(2|1,4),(3|1,2),(4|1,2,3)  sum_rate=21"
    );
    assert_eq!(stdout(&["catalog", "--count"]).trim(), "218");
    let stars: Vec<String> = stdout(&["catalog", "--class", "open_star"])
        .lines()
        .map(|l| l.split_whitespace().next().unwrap().to_string())
        .collect();
    assert_eq!(stars, ["81", "112", "115", "119", "148"]);
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&["catalog", "--no", "47", "--format", "json"])).unwrap();
    assert_eq!(json[0]["sum_rate"], "56/3");
    assert!(!run(&["catalog", "--no", "999"]).status.success());
    assert!(!run(&["catalog", "--class", "purple"]).status.success());
}

#[test]
fn inner_schemes() {
    let v = stdout(&["inner", "--no", "155", "--scheme", "dist"]);
    assert!(v.contains("value: 24.000000 (24)"), "{v}");
    let v = stdout(&["inner", "--no", "155", "--scheme", "dist-nonenhanced"]);
    assert!(v.contains("value: 23.000000 (23)"), "{v}");
    let v = stdout(&[
        "inner",
        "--problem",
        "(1|-)",
        "--scheme",
        "cc",
        "--cap",
        "1",
    ]);
    assert!(v.contains("value: 1.000000 (1)"), "{v}");
    let v = stdout(&[
        "inner",
        "--problem",
        "(1|-),(2|-)",
        "--scheme",
        "cc-enhanced",
        "--objective",
        "sym",
    ]);
    assert!(v.contains("value: 0.500000 (1/2)"), "{v}");
    let v = stdout(&["inner", "--no", "47", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&v).unwrap();
    assert_eq!(json["rational"], "56/3");
    assert_eq!(json["delta_size"], 256);
}

#[test]
fn inner_errors_exit_nonzero() {
    assert!(!run(&["inner", "--problem", "(1|1)"]).status.success());
    assert!(!run(&["inner", "--problem", "garbage"]).status.success());
    assert!(!run(&["inner"]).status.success());
    assert!(!run(&["inner", "--no", "1", "--scheme", "bogus"])
        .status
        .success());
    assert!(!run(&["inner", "--no", "1", "--delta", "file"])
        .status
        .success());
}

#[test]
fn inner_with_files() {
    let dir = tempfile::tempdir().unwrap();
    let caps = dir.path().join("caps.txt");
    // only the broadcast server {1,2}, capacity 2
    fs::write(&caps, "# two messages\n3=2\n").unwrap();
    let v = stdout(&[
        "inner",
        "--problem",
        "(1|2),(2|1)",
        "--caps-file",
        caps.to_str().unwrap(),
    ]);
    assert!(v.contains("value: 4.000000 (4)"), "{v}");

    let delta = dir.path().join("delta.txt");
    fs::write(&delta, "{1}; {2}\n").unwrap();
    let v = stdout(&[
        "inner",
        "--problem",
        "(1|-),(2|-)",
        "--delta",
        "file",
        "--delta-file",
        delta.to_str().unwrap(),
    ]);
    assert!(v.contains("custom (1 tuples)"), "{v}");

    let groups = dir.path().join("groups.txt");
    fs::write(&groups, "3\n6\n").unwrap();
    let v = stdout(&[
        "inner",
        "--no",
        "155",
        "--scheme",
        "fractional",
        "--groups-file",
        groups.to_str().unwrap(),
    ]);
    assert!(v.contains("value: 3.000000 (3)"), "{v}");

    let lp = dir.path().join("m.lp");
    stdout(&[
        "inner",
        "--no",
        "140",
        "--delta",
        "minmax",
        "--dump-lp",
        lp.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(&lp).unwrap();
    assert!(text.contains("Maximize") && text.contains("Subject To"));
}

#[test]
fn outer_bounds() {
    assert_eq!(
        stdout(&["outer", "--no", "140"]).trim(),
        "thm1=22.000000 (22) thm2=21 best=21.000000 (21) U={1} V={2}"
    );
    assert_eq!(
        stdout(&["outer", "--no", "218"]).trim(),
        "thm1=32.000000 (32) thm2=inapplicable best=32.000000 (32)"
    );
    let v = stdout(&["outer", "--no", "1"]);
    assert!(
        v.starts_with("thm1=15.000000 (15)") && v.contains("best=15.000000 (15)"),
        "{v}"
    );
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&["outer", "--no", "218", "--format", "json"])).unwrap();
    assert!(json["thm2"].is_null());
    assert_eq!(json["v_candidates"].as_array().unwrap().len(), 4);
}

#[test]
fn table_subset() {
    let out = stdout(&[
        "table",
        "--no",
        "140",
        "--no",
        "81",
        "--check-table",
        "--jobs",
        "1",
    ]);
    assert!(out.contains("table matches: 2"), "{out}");
    assert!(out.contains("open: 1 [81]"), "{out}");

    let json: serde_json::Value = serde_json::from_str(&stdout(&[
        "table",
        "--no",
        "155",
        "--nonenhanced",
        "--format",
        "json",
    ]))
    .unwrap();
    assert_eq!(json["reports"][0]["problem_no"], 155);
    assert_eq!(json["summary"]["enhancement_separations"][0], 155);
    assert_eq!(json["failures"].as_array().unwrap().len(), 0);

    let csv = stdout(&["table", "--no", "47", "--format", "csv"]);
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("47,"));
}

#[test]
fn enumerate_small() {
    assert_eq!(stdout(&["enumerate", "-n", "3", "--count"]).trim(), "16");
    assert_eq!(stdout(&["enumerate", "-n", "2"]).lines().count(), 3);
    assert!(!run(&["enumerate", "-n", "9"]).status.success());
}
