use std::fs;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use uvb_cli::{dispatch, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};
use uvb_core::registry::tabulated_cases;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("uvb").chain(args.iter().copied());
    let code = dispatch(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// JSON with the `stats` key removed, re-rendered canonically.
fn stable(json: &str) -> String {
    let mut v: Value = serde_json::from_str(json).unwrap();
    if let Value::Object(m) = &mut v {
        m.remove("stats");
    }
    serde_json::to_string_pretty(&v).unwrap() + "\n"
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares against the stored file; `UVB_BLESS=1` rewrites it instead.
fn check_golden(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("UVB_BLESS").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}; run with UVB_BLESS=1", path.display()));
    assert_eq!(actual, want, "golden {name} differs");
}

fn slug(ty: &str) -> String {
    ty.split(';').nth(1).unwrap().replace(',', "-")
}

#[test]
fn solve_goldens_for_tabulated_cases() {
    for st in tabulated_cases() {
        let ty = st.to_string();
        let (code, out, err) = run(&["solve", "--type", &ty, "--format", "json"]);
        assert_eq!(code, EXIT_OK, "{ty}: {err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v["stats"].is_object(), "{ty}");
        check_golden(&format!("solve-{}.json", slug(&ty)), &stable(&out));
    }
}

#[test]
fn rendered_goldens() {
    let cases: &[(&str, &[&str])] = &[
        ("solve-3-3.md", &["solve", "--type", "2;3,3;1,0", "--format", "md"]),
        ("solve-1-2-3.txt", &["solve", "--type", "3;1,2,3;2,1,0"]),
        ("chern-wedge.json", &["chern", "--bundle", "wedge(2,T(-1)) + O(0)", "--format", "json"]),
        ("chern-tangent.md", &["chern", "--bundle", "T", "--format", "md"]),
        ("reduce-v4.json", &["reduce", "--poly", "V^4", "--format", "json"]),
        ("cases-6.md", &["cases", "--rank", "6", "--format", "md"]),
        ("cases-7.json", &["cases", "--rank", "7", "--format", "json"]),
        ("classify-6.md", &["classify", "--rank", "6", "--format", "md"]),
    ];
    for (name, args) in cases {
        let (code, out, err) = run(args);
        assert_eq!(code, EXIT_OK, "{name}: {err}");
        let body = if name.ends_with(".json") { stable(&out) } else { out };
        check_golden(name, &body);
    }
}

#[test]
fn classify_rank_six_json() {
    let (code, out, _) = run(&["classify", "--rank", "6", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["unidentified_count"], 0);
    assert_eq!(v["cases"].as_array().unwrap().len(), 19);
    for key in ["type", "unknowns", "solutions", "verdicts", "completeness", "shortcuts"] {
        assert!(v["cases"][0].get(key).is_some(), "{key}");
    }
    check_golden("classify-6.json", &stable(&out));
}

#[test]
fn documented_examples() {
    let (code, out, _) = run(&["solve", "--n", "4", "--type", "2;3,3;1,0", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["solutions"].as_array().unwrap().len(), 4);

    let (code, out, _) = run(&["reduce", "--n", "4", "--poly", "V^4"]);
    assert_eq!((code, out.as_str()), (EXIT_OK, "-U^4-U^3V-U^2V^2-UV^3\n"));

    let verify = ["verify", "--n", "4", "--bundle", "T(-1)+O(1)^2", "--type", "2;3,3;1,0", "--tuple"];
    let (code, _, _) = run(&[&verify[..], &["-1,0,0,0,0,1,1,1,1,1"]].concat());
    assert_eq!(code, EXIT_OK);
    let (code, out, _) = run(&[&verify[..], &["-1,0,0,0,0,1,1,1,1,2", "--format", "json"]].concat());
    assert_eq!(code, EXIT_DOMAIN);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["verified"], false);

    let (_, out, _) = run(&["chern", "--bundle", "wedge(2,T(-1))", "--format", "json"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!((v["rank"].as_u64(), v["chern"][1].as_i64()), (Some(6), Some(3)));
    assert_eq!(v["line_type"], "2;3,3;1,0");
}

#[test]
fn usage_errors() {
    let bad: &[&[&str]] = &[
        &[],
        &["frobnicate"],
        &["solve"],
        &["solve", "--type", "2;3,3"],
        &["solve", "--type", "2;3,3;1,0", "--strategy", "bfs"],
        &["solve", "--type", "2;3,3;1,0", "--bound", "0"],
        &["solve", "--type", "2;3,3;1,0", "--format", "xml"],
        &["solve", "--type", "2;3,3;1,0", "--rank", "6"],
        &["classify", "--n", "4"],
        &["cases", "--rank", "6", "--bundle", "T"],
        &["verify", "--type", "2;3,3;1,0", "--bundle", "T(-1)+O(1)^2", "--tuple", "1,x"],
        &["chern", "--bundle", "Q(1)"],
        &["reduce", "--poly", "T^"],
        &["reduce", "--poly", "T", "--n", "0"],
    ];
    for args in bad {
        let (code, out, err) = run(args);
        assert_eq!(code, EXIT_USAGE, "{args:?}: {err}");
        assert!(out.is_empty() && !err.is_empty(), "{args:?}");
    }
}

#[test]
fn domain_errors() {
    let (code, _, err) = run(&["verify", "--type", "2;3,3;1,0", "--bundle", "T", "--tuple", "0,0,0,0,0,0,0,0,0,0"]);
    assert_eq!(code, EXIT_DOMAIN);
    assert!(err.contains("restricts to"), "{err}");
    let (code, _, err) = run(&["verify", "--type", "2;3,3;1,0", "--bundle", "T(-1)+O(1)^2", "--tuple", "1,2"]);
    assert_eq!(code, EXIT_DOMAIN);
    assert!(err.contains("needs 10"), "{err}");
    let (code, _, err) = run(&["solve", "--type", "2;3,3;1,0", "--max-solutions", "2"]);
    assert_eq!(code, EXIT_DOMAIN, "{err}");
}

#[test]
fn every_subcommand_has_help() {
    for sub in ["solve", "classify", "chern", "verify", "reduce", "cases"] {
        let (code, out, _) = run(&[sub, "--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("Usage: uvb"), "{sub}");
    }
}

#[test]
fn json_is_reproducible() {
    let args = ["solve", "--type", "3;1,3,2;2,1,0", "--format", "json"];
    let (_, a, _) = run(&args);
    let (_, b, _) = run(&[&args[..], &["--sequential"]].concat());
    assert_eq!(stable(&a), stable(&b));
    let pos = a.find("\"stats\"").unwrap();
    let (_, c, _) = run(&args);
    assert_eq!(a[..pos], c[..pos]);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("uvb.toml");
    fs::write(&cfg, "bound = 1\nstrategy = \"dfs\"\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let (_, out, _) = run(&["solve", "--type", "2;3,3;1,0", "--config", cfg, "--format", "json"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["completeness"]["bound"], 1);
    assert_eq!(v["stats"]["strategy"], "dfs");
    assert_eq!(v["solutions"].as_array().unwrap().len(), 3);
    let (_, out, _) = run(&["solve", "--type", "2;3,3;1,0", "--config", cfg, "--bound", "5", "--format", "json"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["completeness"]["bound"], 5);
    assert_eq!(v["solutions"].as_array().unwrap().len(), 4);

    fs::write(dir.path().join("bad.toml"), "bonud = 3\n").unwrap();
    let bad = dir.path().join("bad.toml");
    let (code, _, err) = run(&["solve", "--type", "2;3,3;1,0", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE, "{err}");
}

#[test]
fn output_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nf.txt");
    let (code, out, _) = run(&["reduce", "--poly", "U^5", "--output", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    assert_eq!(fs::read_to_string(path).unwrap(), "0\n");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_uvb");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["reduce", "--poly", "R"]), Some(EXIT_USAGE));
    assert_eq!(status(&["cases", "--rank", "4"]), Some(EXIT_OK));
    assert_eq!(status(&["verify", "--type", "2;3,3;1,0", "--bundle", "O(1)^3 + O(0)^3", "--tuple", "0,0,0,0,0,0,0,0,0,1"]), Some(EXIT_DOMAIN));
}
