use std::path::PathBuf;
use std::process::{Command, Output};

fn gfc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gfc"))
        .args(args)
        .env_remove("GFC_SEED")
        .output()
        .expect("gfc runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn model_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gfc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(format!("{name}.toml"));
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn validate_reference_and_files() {
    let o = gfc(&["validate", "derham-line"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("valid: derham-line"));

    let ok = model_file("plane", "[context]\nbase = [\"x\", \"y\"]\n");
    assert!(gfc(&["validate", ok.to_str().unwrap()]).status.success());

    let torsion = model_file(
        "torsion",
        "[context]\nbase = [\"x1\", \"x2\"]\n[connection]\n\"Gamma.1.2.1\" = \"1\"\n\"Gamma.2.1.1\" = \"-1\"\n",
    );
    let o = gfc(&["validate", torsion.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["valid"], false);
    assert!(v["error"].as_str().unwrap().contains("torsion"));

    let not_q = model_file(
        "notq",
        "[context]\nbase = [\"x\"]\ngraded = [{ name = \"a\", degree = 1 }, { name = \"u\", degree = 2 }]\n[q]\n\"x\" = \"a\"\n\"a\" = \"u\"\n",
    );
    let o = gfc(&["validate", not_q.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[Q,Q]"));
}

#[test]
fn missing_model_is_an_error() {
    let o = gfc(&["validate", "no-such-model"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("invalid: no-such-model"));
    let o = gfc(&["fedosov", "no-such-model"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn fedosov_on_flat_plane() {
    let o = gfc(&["fedosov", "flat-r2", "--oracle", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["A"]["y_x1"], "0");
    assert_eq!(v["A"]["y_x2"], "0");
    assert_eq!(v["D"]["y_x1"], "-xi_x1");
    assert_eq!(v["D_squared"], "0");
    assert_eq!(v["oracle"], "agree");
}

#[test]
fn verify_json_is_reproducible() {
    let args = ["verify", "odd-line", "--suite", "koszul", "--samples", "5", "--json"];
    let a = gfc(&args);
    let b = gfc(&[&args[..], &["--jobs", "3"]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"][0]["schema"], 1);
    assert!(v["reports"][0]["checked"].as_u64().unwrap() > 0);
}

#[test]
fn seed_from_environment() {
    let run = |seed: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_gfc"));
        c.args(["verify", "flat-r2", "--suite", "koszul", "--samples", "2", "--json"]).args(extra);
        match seed {
            Some(s) => c.env("GFC_SEED", s),
            None => c.env_remove("GFC_SEED"),
        };
        let o = c.output().unwrap();
        serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()
    };
    assert_eq!(run(None, &[])["seed"], 0);
    assert_eq!(run(Some("17"), &[])["seed"], 17);
    assert_eq!(run(Some("17"), &["--seed", "5"])["seed"], 5);
    assert_eq!(run(Some("17"), &[])["reports"], run(None, &["--seed", "17"])["reports"]);
}

#[test]
fn dg_suite_skips_without_q() {
    let o = gfc(&["verify", "flat-r2", "--suite", "dg-tpoly"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("skip dg-tpoly"));
}

#[test]
fn unknown_suite_fails() {
    let o = gfc(&["verify", "flat-r2", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn contract_checks_relations() {
    let o = gfc(&["contract", "derham-line", "--level", "tpoly", "--dg", "x*px_x + th*px_th", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["tau"], "x*py_x + th*py_th + y_x*py_x + y_th*py_th");
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
    assert_eq!(v["provenance"].as_array().unwrap().len(), 3);

    let o = gfc(&["contract", "odd-line", "--level", "tpoly", "--dg", "px_x"]);
    assert_eq!(o.status.code(), Some(1));
}
