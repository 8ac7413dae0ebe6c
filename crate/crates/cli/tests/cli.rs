use std::process::{Command, Output};

use serde_json::Value;

fn hpl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpl"))
        .args(args)
        .env_remove("HPL_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn validate_prints_verdict_and_violation() {
    let o = hpl(&["validate", "p=3;profile=[1,2,3,1,1]"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "true"));

    let o = hpl(&["validate", "p=3;profile=[1,2,3]"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("false\nviolated: k=4, i=1"));

    let o = hpl(&["--json", "validate", "--profile", "[2,1]"]);
    let v = json(&o);
    assert_eq!(v["valid"], true);
    assert_eq!(v["profile"], "p=3;profile=[2,1]");
}

#[test]
fn even_prime_is_a_usage_error() {
    assert_eq!(hpl(&["validate", "p=2;profile=[1]"]).status.code(), Some(2));
    let o = hpl(&["--json", "validate", "p=2;profile=[1]"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["error"], "USAGE");
    assert_eq!(
        hpl(&["validate", "--prime", "4", "--profile", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(hpl(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(json(&hpl(&["--json", "frobnicate"]))["error"], "USAGE");
}

#[test]
fn classify_outputs_json() {
    let o = hpl(&["classify", "p=3;profile=[0,2,0,4,0,2]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["verdict"], "UNKNOWN");

    let v = json(&hpl(&["classify", "p=3;profile=[2,1]"]));
    assert_eq!(v["verdict"], "NOT_QUASI_ELEMENTARY");
    assert_eq!(v["relation"], "1*b[1,1]^4");
    assert!(v["witness_trace"]["steps"].as_array().unwrap().len() >= 2);
    assert!(v["serre_pair"].is_object());

    let v = json(&hpl(&["classify", "--profile", "0,1,2"]));
    assert_eq!(
        (v["verdict"].as_str(), v["rule"].as_str(), v["k"].as_u64()),
        (Some("QUASI_ELEMENTARY"), Some("FAMILY_A"), Some(2))
    );
    assert_eq!(v["matched_families"][1]["rule"], "FAMILY_B");
}

#[test]
fn invalid_profile_is_a_domain_error() {
    let o = hpl(&["--json", "classify", "p=3;profile=[1,2,3]"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["error"], "INVALID_PROFILE");
    assert!(v["detail"].as_str().unwrap().contains("k=4"));
    assert_eq!(hpl(&["classify", "p=3;profile=[1,2,3]"]).status.code(), Some(1));
}

#[test]
fn derive_subcommands() {
    let o = hpl(&["derive", "theorem", "p=3;profile=[2,1]"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("final: 1*b[1,1]^4 = 0"));

    let v = json(&hpl(&[
        "--json",
        "derive",
        "prop",
        "p=3;profile=[0,1,4,0,1,1]",
        "--t",
        "2",
        "--s",
        "0",
        "--n",
        "3",
        "--k",
        "3",
    ]));
    assert_eq!(v["final"], "2*b[2,0]^3*b[3,3]");
    assert_eq!(v["steps"][0]["op"], "bP^0");

    let o = hpl(&["--json", "derive", "theorem", "p=3;profile=[1,1]"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["error"], "NOT_APPLICABLE");
}

#[test]
fn cobar_subcommands() {
    let o = hpl(&["cobar", "verify", "p=3;profile=[2,1]", "h[1,1]*h[1,0]"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "ZERO (2,16)"));

    let o = hpl(&["cobar", "verify", "--profile", "[1]", "b[1,0]^3"]);
    assert_eq!(stdout(&o).trim(), "NONZERO (6,36)");

    let v = json(&hpl(&[
        "--json",
        "cobar",
        "verify",
        "p=3;profile=[2,1]",
        "b[1,1]*h[1,1]",
    ]));
    assert_eq!(
        (v["verdict"].as_str(), v["s"].as_u64(), v["t"].as_u64()),
        (Some("ZERO"), Some(3), Some(48))
    );

    for (s, t, d) in [("0", "0", "1"), ("2", "12", "1"), ("3", "16", "1"), ("2", "16", "0")] {
        let o = hpl(&["cobar", "dim", "p=3;profile=[1]", s, t]);
        assert_eq!(stdout(&o).trim(), d, "({s},{t})");
    }

    let o = hpl(&[
        "--json",
        "cobar",
        "verify",
        "p=3;profile=[2,1]",
        "b[1,1]^4",
        "--cobar-max-s",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&o)["error"], "BOUND_EXCEEDED");

    let o = hpl(&["cobar", "verify", "p=3;profile=[2,1]", "h[2,0]"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(
        hpl(&["cobar", "verify", "p=3;profile=[2,1]", "q[1,0]"]).status.code(),
        Some(2)
    );
}

#[test]
fn enumerate_modes_agree() {
    let text = stdout(&hpl(&["enumerate", "--max-len", "2", "--max-entry", "2"]));
    let lines: Vec<&str> = text.lines().collect();
    let profiles: Vec<&str> = lines.iter().map(|l| l.split(' ').next().unwrap()).collect();
    assert_eq!(
        profiles,
        ["[0,0]", "[0,1]", "[0,2]", "[1,0]", "[1,1]", "[2,1]"].map(|e| format!("p=3;profile={e}"))
    );
    let json_lines = stdout(&hpl(&["--json", "enumerate", "--max-len", "2", "--max-entry", "2"]));
    for (human, js) in lines.iter().zip(json_lines.lines()) {
        let v: Value = serde_json::from_str(js).unwrap();
        assert_eq!(human.split(' ').nth(1), v["verdict"].as_str());
    }
    assert!(lines[5].contains("NOT_QUASI_ELEMENTARY"));
}

#[test]
fn output_is_deterministic() {
    let args = ["--json", "classify", "p=3;profile=[0,2,3,0,1]"];
    assert_eq!(hpl(&args).stdout, hpl(&args).stdout);
    let args = ["render", "p=3;profile=[2,0,1]"];
    let o = hpl(&args);
    assert_eq!(o.stdout, hpl(&args).stdout);
    assert!(stdout(&o).contains("##"));
}

#[test]
fn cache_directory_is_a_pure_memo() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_hpl"))
            .args(["cobar", "dim", "p=3;profile=[2,1]", "2", "16"])
            .env("HPL_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let plain = hpl(&["cobar", "dim", "p=3;profile=[2,1]", "2", "16"]);
    let first = run();
    let second = run();
    assert_eq!(plain.stdout, first.stdout);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}
