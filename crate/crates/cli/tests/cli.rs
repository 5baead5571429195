use std::collections::BTreeMap;
use std::process::{Command, Output};

use serde_json::Value;

use fqhyper_cli::{parse_kv, run, RunConfig, Status};

fn fqhyper(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqhyper"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn of_kind<'a>(recs: &'a [Value], kind: &str) -> Vec<&'a Value> {
    recs.iter().filter(|r| r["kind"] == kind).collect()
}

fn config(pairs: &[(&str, &str)]) -> RunConfig {
    let map: BTreeMap<String, String> =
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    RunConfig::resolve(&map).unwrap()
}

#[test]
fn verify_exhaustive_gauss_reflection() {
    let out = fqhyper(&["verify", "--id", "GAUSS_REFL", "--q", "7", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert_eq!(of_kind(&recs, "verdict").len(), 6);
    let summary = of_kind(&recs, "summary")[0];
    assert_eq!(summary["failures"], 0);
    assert_eq!(summary["hypotheses_met"], 6);
}

#[test]
fn count_routes_agree() {
    let out = fqhyper(&[
        "count", "--family", "CD", "--q", "5", "--d", "2", "--exponents", "1,1,1", "--lambda",
        "2", "--route", "all", "--r", "1,2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert_eq!(of_kind(&recs, "count").len(), 2 * 2 * 3);
    for a in of_kind(&recs, "agreement") {
        assert_eq!(a["routes_agree"], true);
    }
    for t in of_kind(&recs, "total") {
        assert_eq!(t["equal"], true);
        assert_eq!(t["sum"].as_str().unwrap(), t["brute"].to_string());
    }
}

#[test]
fn lpoly_of_smooth_curve_has_degree_three() {
    let out = fqhyper(&[
        "lpoly", "--family", "XD", "--q", "7", "--d", "3", "--exponents", "1,1,1,1", "--lambda",
        "2,3", "--m", "1", "--R", "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    let l = of_kind(&recs, "lpoly")[0];
    assert_eq!(l["polynomial"]["degree"], 3);
    assert_eq!(l["polynomial"]["coeffs"].as_array().unwrap().len(), 4);
    assert_eq!(l["polynomial"]["m"], 1);
    assert_eq!(l["weil"]["pass"], true);
    assert_eq!(l["weil"]["roots"].as_array().unwrap().len(), 3);
}

#[test]
fn wrong_weight_fails_with_status_one() {
    let out = fqhyper(&[
        "lpoly", "--family", "XD", "--q", "7", "--d", "2", "--exponents", "1,1,1", "--lambda",
        "3", "--R", "5", "--weight", "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let recs = records(&out);
    let l = of_kind(&recs, "lpoly")[0];
    assert_eq!(l["polynomial"]["degree"], 2);
    assert_eq!(l["weil"]["pass"], false);
}

#[test]
fn invalid_input_exits_with_two() {
    for args in [
        vec!["gauss", "--q", "12"],
        vec!["gauss", "--q", "7", "--format", "csv"],
        vec!["verify", "--id", "FA_EULER", "--q", "5", "--exhaustive", "--cap", "10"],
        vec!["verify", "--id", "NO_SUCH", "--q", "5"],
        vec!["count", "--family", "CD", "--q", "7", "--d", "4", "--exponents", "1,1,1", "--lambda", "2"],
        vec!["jacobi", "--q", "7", "--chars", "1"],
        vec!["hgf", "--q", "7", "--kind", "nFn", "--a", "1", "--b", "1", "--lambda", "2"],
    ] {
        let out = fqhyper(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn csv_columns() {
    let out = fqhyper(&[
        "count", "--family", "CD", "--q", "5", "--d", "2", "--exponents", "1,1,1", "--lambda",
        "2", "--route", "charsum", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,m,route,value_coeffs,complex_approx"));
    assert_eq!(lines.next(), Some("1,0,char_sum,5/1,5.000000000000+0.000000000000i"));
    assert_eq!(lines.next(), Some("1,1,char_sum,2/1,2.000000000000+0.000000000000i"));
    assert_eq!(lines.next(), None);
}

#[test]
fn character_sugar_is_normalized() {
    let out = fqhyper(&["jacobi", "--q", "13", "--chars", "phi_4^1,phi_3^2,-1"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert_eq!(recs[0]["config"]["chars"], serde_json::json!([3, 8, 11]));
    assert_eq!(of_kind(&recs, "jacobi")[0]["equal"], true);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = std::env::temp_dir().join(format!("fqhyper-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    std::fs::write(
        &path,
        "# a gauss run\ncommand = gauss\nq = 5\nchars = 1, 2\nfield_bound = 1000\n",
    )
    .unwrap();
    let path = path.to_str().unwrap();
    let out = fqhyper(&["--config", path, "--chars", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert_eq!(recs[0]["config"]["field_bound"], 1000);
    let gs = of_kind(&recs, "gauss");
    assert_eq!(gs.len(), 1);
    assert_eq!(gs[0]["char"], 3);
    let out = fqhyper(&["--config", path, "--q", "7", "--dump-config"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("p = 7\n") && text.contains("chars = 1,2\n"), "{text}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn configs_round_trip() {
    let cfgs = [
        config(&[("command", "gauss"), ("q", "9"), ("chars", "phi_4^3, 2")]),
        config(&[
            ("command", "lpoly"),
            ("q", "7"),
            ("family", "xd"),
            ("d", "3"),
            ("exponents", "1,1,1,1"),
            ("lambda", "2,3"),
            ("m", "1,2"),
            ("R", "8"),
            ("route", "fixed"),
        ]),
        config(&[
            ("command", "verify"),
            ("p", "5"),
            ("id", "fa_euler"),
            ("sample", "40"),
            ("hypotheses-only", "true"),
            ("seed", "9"),
        ]),
        config(&[("command", "sweep"), ("q", "5"), ("id", "all"), ("workers", "2")]),
        config(&[
            ("command", "hgf"),
            ("q", "7"),
            ("kind", "f4"),
            ("a", "1"),
            ("b", "2"),
            ("c", "3,4"),
            ("lambda", "2,5"),
            ("twist", "3"),
        ]),
    ];
    for c in cfgs {
        let back = RunConfig::resolve(&parse_kv(&c.to_kv()).unwrap()).unwrap();
        assert_eq!(back, c);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&json).unwrap(), c);
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let c = config(&[
        ("command", "verify"),
        ("q", "7"),
        ("id", "PFAFF"),
        ("sample", "30"),
        ("seed", "4"),
    ]);
    let a = run(&c);
    let b = run(&c);
    assert_eq!(a.status, Status::Pass);
    assert_eq!(a.stdout, b.stdout);
    let args = ["verify", "--id", "PFAFF", "--q", "7", "--sample", "30", "--seed", "4"];
    let x = fqhyper(&args);
    let y = fqhyper(&args);
    assert_eq!(x.stdout, y.stdout);
    assert_eq!(String::from_utf8(x.stdout).unwrap(), a.stdout);
    let other = run(&config(&[
        ("command", "verify"),
        ("q", "7"),
        ("id", "PFAFF"),
        ("sample", "30"),
        ("seed", "5"),
    ]));
    assert_ne!(other.stdout, a.stdout);
}

#[test]
fn hgf_kinds_evaluate() {
    for args in [
        vec!["hgf", "--q", "7", "--kind", "nFn", "--a", "1,2", "--b", "3", "--lambda", "2"],
        vec!["hgf", "--q", "7", "--kind", "D", "--a", "1", "--b", "2,3", "--c", "4", "--lambda", "2,3"],
        vec!["hgf", "--q", "7", "--kind", "F4", "--a", "1", "--b", "2", "--c", "3,4", "--lambda", "2,5"],
        vec!["hgf", "--q", "7", "--kind", "F2", "--a", "1", "--b", "2,3", "--c", "4,5", "--lambda", "2,5"],
    ] {
        let out = fqhyper(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let recs = records(&out);
        let v = &of_kind(&recs, "hgf")[0]["value"]["exact"];
        assert_eq!(v["order"], 6, "{args:?}");
    }
}

#[test]
fn value_is_independent_of_twist() {
    let base = ["hgf", "--q", "7", "--kind", "A", "--a", "1", "--b", "2,3", "--c", "4,5", "--lambda", "2,3"];
    let plain = records(&fqhyper(&base));
    let mut twisted_args = base.to_vec();
    twisted_args.extend(["--twist", "3"]);
    let twisted = records(&fqhyper(&twisted_args));
    assert_eq!(
        of_kind(&plain, "hgf")[0]["value"],
        of_kind(&twisted, "hgf")[0]["value"]
    );
}

#[test]
fn sweep_reports_every_identity() {
    let out = fqhyper(&["sweep", "--q", "5", "--id", "GAUSS_REFL,PFAFF,KARLSSON"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    let s = of_kind(&recs, "identity_summary");
    assert_eq!(s.len(), 3);
    assert!(s.iter().all(|r| r["failures"] == 0 && r["mode"] == "exhaustive"));
}
