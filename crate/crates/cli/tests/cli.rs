use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/sets")
        .join(name)
        .display()
        .to_string()
}

fn brlab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brlab"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn ostrowski_digits_of_ten() {
    let tmp = tempfile::tempdir().unwrap();
    let o = brlab(
        tmp.path(),
        &["cf", "ostrowski", "--alpha", "golden", "--n", "10"],
    );
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0,0,1,0,0,1");
    let m = manifest(&tmp.path().join("cf-ostrowski"));
    assert_eq!(m["status"], "ok");
    assert_eq!(m["parameters"]["n"], "10");
}

#[test]
fn expands_one_over_pi() {
    let tmp = tempfile::tempdir().unwrap();
    let digits = "0.31830988618379067153776752674502872406891929638";
    let o = brlab(
        tmp.path(),
        &["cf", "expand", "--decimal", digits, "--depth", "5"],
    );
    assert_eq!(stdout(&o), "3,7,15,1,292");
    assert!(tmp.path().join("cf-expand/cf.json").exists());
}

#[test]
fn full_square_has_zero_discrepancy() {
    let tmp = tempfile::tempdir().unwrap();
    let sq = data("square.json");
    let o = brlab(
        tmp.path(),
        &[
            "flow", "delta", "--set", &sq, "--alpha", "sqrt2m1", "--x", "0,0", "--t", "100",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "0");
    let m = manifest(&tmp.path().join("flow-delta"));
    assert_eq!(m["mode"], "quadratic");
    assert_eq!(m["parameters"]["T"], "100");
    assert!(m["parameters"]["set"]["polygon"].is_array());
}

#[test]
fn discs_fall_back_to_decimal() {
    let tmp = tempfile::tempdir().unwrap();
    let disc = data("centred_disc.json");
    let o = brlab(
        tmp.path(),
        &[
            "flow", "delta", "--set", &disc, "--alpha", "golden", "--t", "50.5",
        ],
    );
    assert!(o.status.success());
    let v: f64 = stdout(&o).parse().unwrap();
    assert!(v.abs() < 2.0);
    assert_eq!(manifest(&tmp.path().join("flow-delta"))["mode"], "decimal");
}

#[test]
fn exact_remainder_of_quarter_hat() {
    let tmp = tempfile::tempdir().unwrap();
    let o = brlab(
        tmp.path(),
        &[
            "brf",
            "sum",
            "--hat",
            "1/4,1/2,1",
            "--alpha",
            "golden",
            "--n",
            "1",
        ],
    );
    assert_eq!(stdout(&o), "-1/4");
}

#[test]
fn grid_sum_closed_form_equals_brute_force() {
    let tmp = tempfile::tempdir().unwrap();
    let closed = brlab(
        tmp.path(),
        &["brf", "gridsum", "--hat", "2/7,5/6,3", "--q", "997"],
    );
    let brute = brlab(
        tmp.path(),
        &[
            "brf",
            "gridsum",
            "--hat",
            "2/7,5/6,3",
            "--q",
            "997",
            "--brute",
        ],
    );
    assert_eq!(stdout(&closed), stdout(&brute));
}

#[test]
fn quadratic_traces_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let pent = data("pentagon.json");
    let run = |dir: &str| {
        let out = tmp.path().join(dir);
        let o = brlab(
            &out,
            &[
                "flow", "trace", "--set", &pent, "--alpha", "golden", "--tmax", "2000",
            ],
        );
        assert!(o.status.success());
        (
            std::fs::read(out.join("flow-trace/trace.csv")).unwrap(),
            manifest(&out.join("flow-trace")),
        )
    };
    let (a, ma) = run("a");
    let (b, mb) = run("b");
    assert_eq!(a, b);
    assert_eq!(ma["parameters"], mb["parameters"]);
    assert_eq!(ma["mode"], "quadratic");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("T,delta,running_sup\n"));
}

#[test]
fn special_triangle_recipe_writes_a_passing_report() {
    let tmp = tempfile::tempdir().unwrap();
    let o = brlab(
        tmp.path(),
        &[
            "exp",
            "special-triangle",
            "--alpha",
            "sqrt2m1",
            "--tmax",
            "1e4",
            "--starts",
            "3",
        ],
    );
    assert!(o.status.success(), "{}", stdout(&o));
    let dir: PathBuf = tmp.path().join("exp-special-triangle");
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["name"], "special-triangle");
    assert!(report["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true));
    let m = manifest(&dir);
    assert_eq!(m["seed"], brlab::experiments::DEFAULT_SEED);
    assert!(m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .any(|p| p.as_str().unwrap().ends_with("special_triangle_trace.csv")));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let bad_flag = brlab(tmp.path(), &["cf", "expand", "--nope"]);
    assert_eq!(bad_flag.status.code(), Some(2));
    let bad_value = brlab(
        tmp.path(),
        &[
            "cf",
            "ostrowski",
            "--alpha",
            "golden",
            "--n",
            "10",
            "--depth",
            "3",
        ],
    );
    assert_eq!(bad_value.status.code(), Some(2));
    let short = brlab(
        tmp.path(),
        &["cf", "expand", "--decimal", "0.318", "--depth", "20"],
    );
    assert_eq!(short.status.code(), Some(3));
    let m = manifest(&tmp.path().join("cf-expand"));
    assert_eq!(m["status"], "error");
    assert!(m["error"].as_str().unwrap().contains("precision"));
}
