use std::process::Command;

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_twistcalc");

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn twistcalc(args: &[&str]) -> Run {
    twistcalc_env(args, &[])
}

fn twistcalc_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("TWISTCALC_MAX_DIM");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(r: &Run) -> Value {
    serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {}", r.stdout))
}

fn assert_valid(v: &Value) {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/schema/report.schema.json"
    ))
    .unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let schema = jsonschema::JSONSchema::options()
        .with_draft(jsonschema::Draft::Draft202012)
        .compile(&schema)
        .expect("schema compiles");
    if let Err(errors) = schema.validate(v) {
        let msgs: Vec<String> = errors
            .map(|e| format!("{} at {}", e, e.instance_path))
            .collect();
        panic!("schema violations {msgs:?} in {v}");
    };
}

#[test]
fn first_cohomology_of_jackson_pair() {
    let r = twistcalc(&[
        "cohom",
        "h1",
        "--algebra",
        "poly",
        "--field",
        "Q(q)",
        "--sigma",
        "q*x",
        "--tau",
        "x",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r);
    assert_eq!(v["schemaVersion"], 1);
    assert_eq!(v["dim"], 1);
    assert_eq!(v["representatives"], serde_json::json!(["1"]));
    assert_eq!(v["modulus"], "x");
    assert_valid(&v);
}

#[test]
fn translation_derivation_is_inner() {
    let r = twistcalc(&[
        "deriv",
        "decompose",
        "--sigma",
        "x-1",
        "--tau",
        "x",
        "--fx",
        "1",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r);
    assert_eq!(v["inner"], true);
    assert_eq!(v["m0"], "1");
    assert_valid(&v);
}

#[test]
fn matrix_example_curvature_matches_closed_form() {
    let r = twistcalc(&[
        "geom",
        "curvature",
        "--preset",
        "matrix-example",
        "--N",
        "2",
        "--seed",
        "7",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r);
    assert_eq!(v["closedFormMatchesComposition"], true);
    assert_eq!(v["twistedLinearity"]["holds"], true);
    assert_valid(&v);
}

#[test]
fn same_seed_gives_identical_bytes() {
    for args in [
        &[
            "geom",
            "curvature",
            "--preset",
            "matrix-example",
            "--N",
            "3",
            "--seed",
            "11",
        ][..],
        &[
            "geom",
            "unique-connection",
            "--seed",
            "5",
            "--perturbations",
            "4",
        ][..],
        &["geom", "connection-check", "--perturb", "--seed", "3"][..],
    ] {
        let a = twistcalc(args);
        let b = twistcalc(args);
        assert_eq!(a.code, b.code);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let a = twistcalc(&[
        "geom",
        "curvature",
        "--preset",
        "matrix-example",
        "--seed",
        "1",
    ]);
    let b = twistcalc(&[
        "geom",
        "curvature",
        "--preset",
        "matrix-example",
        "--seed",
        "2",
    ]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn negatives_exit_with_two() {
    let cases: &[&[&str]] = &[
        &["deriv", "decompose", "--preset", "jackson"],
        &["hls", "--sigma", "x", "--tau", "x"],
        &[
            "geom",
            "connection-check",
            "--preset",
            "translation",
            "--untwisted",
        ],
        &[
            "geom",
            "unique-connection",
            "--N",
            "2",
            "--sigma",
            "id",
            "--tau",
            "id",
        ],
        &[
            "deriv",
            "check",
            "--N",
            "2",
            "--sigma",
            "[[2,0],[0,1]]",
            "--table",
            "[[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]",
        ],
        &["geom", "bracket", "--sigma", "x^2", "--tau", "x"],
    ];
    for args in cases {
        let r = twistcalc(args);
        assert_eq!(r.code, 2, "{args:?}: {}{}", r.stdout, r.stderr);
        let v = json(&r);
        assert_eq!(v["status"], "negative");
        assert_valid(&v);
    }
}

#[test]
fn usage_and_parse_errors_exit_with_one() {
    let r = twistcalc(&["deriv", "apply", "--f", "x^^2"]);
    assert_eq!(r.code, 1);
    let v = json(&r);
    assert_eq!(v["status"], "error");
    assert_eq!(
        (v["error"]["line"].as_u64(), v["error"]["column"].as_u64()),
        (Some(1), Some(3))
    );
    assert!(r.stderr.contains("line 1, column 3"), "{}", r.stderr);
    assert_valid(&v);

    let r = twistcalc(&["deriv", "apply", "--fx", "1 +\n  x*", "--f", "x"]);
    assert_eq!(r.code, 1);
    assert_eq!(json(&r)["error"]["line"], 2);

    for args in [
        &["nonsense"][..],
        &["deriv", "apply"][..],
        &["cohom", "h1", "--field", "R"][..],
        &["cohom", "h1", "--sigma", "q*x"][..],
        &["deriv", "apply", "--preset", "nope", "--f", "x"][..],
        &[
            "deriv", "apply", "--preset", "jackson", "--sigma", "x", "--f", "x",
        ][..],
        &["cohom", "h0", "--N", "2", "--sigma", "[[0,0],[0,0]]"][..],
    ] {
        let r = twistcalc(args);
        assert_eq!(r.code, 1, "{args:?}: {}", r.stdout);
        assert!(!r.stderr.is_empty());
    }
    assert_eq!(twistcalc(&["--help"]).code, 0);
}

#[test]
fn dimension_budget_comes_from_environment() {
    let args = ["cohom", "matrix", "--preset", "matrix-pair"];
    let r = twistcalc_env(&args, &[("TWISTCALC_MAX_DIM", "10")]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("budget 10"), "{}", r.stderr);
    let r = twistcalc(&args);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r);
    let dims: Vec<u64> = v["degrees"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["dim"].as_u64().unwrap())
        .collect();
    assert_eq!(dims, [1, 0, 0]);
    assert_valid(&v);
}

#[test]
fn every_subcommand_output_matches_schema() {
    let cases: &[&[&str]] = &[
        &["deriv", "apply", "--preset", "jackson", "--f", "x^3"],
        &["deriv", "check", "--preset", "jackson"],
        &["deriv", "classify", "--preset", "matrix-pair"],
        &["deriv", "classify", "--sigma", "x^2", "--tau", "x"],
        &[
            "deriv",
            "decompose",
            "--N",
            "2",
            "--sigma",
            "[[2,0],[0,1]]",
            "--m0",
            "[[1,0],[0,0]]",
        ],
        &["hls", "--preset", "jackson", "--fx", "x^2"],
        &["cohom", "h0", "--preset", "jackson"],
        &["cohom", "h0", "--preset", "matrix-pair"],
        &[
            "cohom", "h1", "--field", "Q(q)", "--sigma", "q*x+1", "--tau", "q*x+1",
        ],
        &["cohom", "h1", "--N", "2", "--sigma", "[[1,1],[0,1]]"],
        &[
            "geom",
            "connection-check",
            "--preset",
            "translation",
            "--rank",
            "2",
        ],
        &[
            "geom",
            "unique-connection",
            "--preset",
            "translation",
            "--fx",
            "1+3*x",
            "--rank",
            "2",
        ],
        &["geom", "curvature", "--preset", "commutative-canonical"],
        &["geom", "curvature", "--preset", "unique-search"],
        &["geom", "bracket", "--f", "x", "--g", "x^2"],
    ];
    for args in cases {
        let r = twistcalc(args);
        assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
        assert_valid(&json(&r));
    }
}

#[test]
fn text_format_is_readable() {
    let r = twistcalc(&[
        "deriv", "apply", "--preset", "jackson", "--f", "x^3", "--format", "text",
    ]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("result: (q^2+q+1)*x^2"), "{}", r.stdout);
}

#[test]
fn selftest_passes() {
    let r = twistcalc(&["selftest"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let v = json(&r);
    assert_eq!(v["passed"], 10);
    assert_eq!(v["total"], 10);
    assert_valid(&v);
}
