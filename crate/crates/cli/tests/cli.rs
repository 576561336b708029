use std::path::PathBuf;
use std::process::{Command, Output};

fn pring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pring")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn golden_tables() {
    for (cmd, a, file) in [
        ("atable", "2", "atable_p7_a2.txt"),
        ("atable", "3", "atable_p7_a3.txt"),
        ("jtable", "2", "jtable_p7_a2.txt"),
        ("jtable", "3", "jtable_p7_a3.txt"),
    ] {
        let out = pring(&[cmd, "--p", "7", "--a", a, "--i", "0"]);
        assert!(out.status.success());
        assert_eq!(stdout(&out), golden(file), "{cmd} a={a}");
    }
}

#[test]
fn lambda_json_schema() {
    let out = pring(&["lambda", "--p", "7", "--a", "2", "--i", "3", "--format", "json"]);
    assert_eq!(stdout(&out), "{\"p\":7,\"i\":3,\"rho\":0,\"v\":0,\"lambda\":14,\"y\":6,\"witness\":[3,4,5]}\n");
}

#[test]
fn survey_csv() {
    let out = pring(&["survey", "--p", "13", "--a", "4", "--i-range", "2..11", "--format", "csv", "--jobs", "2"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,a,i,rho,v,lambda,y,wj,wk,wl,ms"));
    let twos: Vec<i64> = lines
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|f| f[6] == "2")
        .map(|f| f[2].parse().unwrap())
        .collect();
    assert_eq!(twos, [2, 5, 8, 11]);
}

#[test]
fn survey_is_independent_of_jobs() {
    let run = |jobs: &str| {
        let out = pring(&[
            "survey",
            "--p",
            "7",
            "--trials",
            "3",
            "--seed",
            "5",
            "--i-range",
            "0..2",
            "--format",
            "csv",
            "--jobs",
            jobs,
        ]);
        // Drop the wall-clock column.
        stdout(&out).lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect::<Vec<_>>()
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn gamma_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("pring-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("gamma.json");
    std::fs::write(&path, r#"{"p":7,"precision":6,"i":0,"coeffs":{"2":{"shift":0,"coeffs":[1,0,0,0,0,0]}}}"#).unwrap();
    let out = pring(&["atable", "--gamma", path.to_str().unwrap()]);
    assert_eq!(stdout(&out), golden("atable_p7_a2.txt"));
    let json = dir.join("l.json");
    let out =
        pring(&["liering", "--gamma", path.to_str().unwrap(), "--format", "json", "--out", json.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["m"], 3);
    assert_eq!(v["orders"], serde_json::json!([1, 1, 1, 0, 0, 0]));
    // At level 0, ad g_0 scales g_1 by a unit, so the series never reaches zero.
    let out = pring(&["liering", "--gamma", path.to_str().unwrap()]);
    assert!(
        stdout(&out).ends_with("jacobi: pass\nlower central series: [3, 2]\nclass: not nilpotent\n"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| pring(args).status.code();
    assert_eq!(code(&["verify", "fgidentities"]), Some(0));
    assert_eq!(code(&["verify", "unknown"]), Some(4));
    assert_eq!(code(&["lambda", "--p", "7", "--a", "4"]), Some(3));
    assert_eq!(code(&["lambda", "--p", "8", "--a", "2"]), Some(4));
    assert_eq!(code(&["survey", "--p", "7", "--i-range", "3"]), Some(4));
    assert_eq!(code(&["lambda", "--p", "7", "--a", "2", "--format", "yaml"]), Some(4));
    assert_eq!(code(&["lambda", "--p", "7", "--a", "2", "--i", "3", "--precision", "2"]), Some(0));
    let dir = std::env::temp_dir().join(format!("pring-exit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    // κ·ϑ_2 maps onto 𝔭^{2i+2}, not 𝔭^{2i+1}.
    let path = dir.join("not_onto.json");
    std::fs::write(&path, r#"{"p":7,"precision":6,"i":0,"coeffs":{"2":{"shift":1,"coeffs":[1,0,0,0,0,0]}}}"#).unwrap();
    assert_eq!(code(&["lambda", "--gamma", path.to_str().unwrap()]), Some(3));
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&["lambda", "--gamma", bad.to_str().unwrap()]), Some(4));
}
