//! End-to-end checks of the binary: file round trips between producer and
//! consumer subcommands, scalar formatting, and the exit-code taxonomy.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sicrep"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn path_str(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn assert_exit(out: &Output, code: i32, context: &str) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "{context}: stdout={} stderr={}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn fiducial_to_prob_round_trip_preserves_values() {
    let dir = TempDir::new().unwrap();
    let fid = path_str(&dir, "fid.json");
    let rho = path_str(&dir, "rho.json");
    let p = path_str(&dir, "p.json");
    let rho2 = path_str(&dir, "rho2.json");

    let out = run(&[
        "sic",
        "find",
        "-d",
        "2",
        "--seed",
        "1",
        "--restarts",
        "8",
        "-o",
        fid.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "sic find");

    // A valid density operator written by hand.
    write(
        &rho,
        r#"{"rows":2,"cols":2,"re":[[0.7,0.1],[0.1,0.3]],"im":[[0.0,-0.2],[0.2,0.0]]}"#,
    );
    let out = run(&[
        "repr",
        "to-prob",
        "--rho",
        rho.to_str().unwrap(),
        "--fiducial",
        fid.to_str().unwrap(),
        "-o",
        p.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "repr to-prob");

    let out = run(&[
        "repr",
        "from-prob",
        "-p",
        p.to_str().unwrap(),
        "--fiducial",
        fid.to_str().unwrap(),
        "-o",
        rho2.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "repr from-prob");

    // Parse both operators and compare entrywise.
    let a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&rho).unwrap()).unwrap();
    let b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&rho2).unwrap()).unwrap();
    for part in ["re", "im"] {
        for i in 0..2 {
            for j in 0..2 {
                let x = a[part][i][j].as_f64().unwrap();
                let y = b[part][i][j].as_f64().unwrap();
                assert!((x - y).abs() < 1e-10, "{part}[{i}][{j}]: {x} vs {y}");
            }
        }
    }
}

#[test]
fn written_prob_files_reparse_to_identical_values() {
    let dir = TempDir::new().unwrap();
    let p = path_str(&dir, "p.json");
    let r = path_str(&dir, "R.json");
    let q = path_str(&dir, "q.json");
    write(&p, r#"{"p":[0.37,0.21,0.29,0.13]}"#);
    write(
        &r,
        r#"{"J":2,"N":4,"R":[[0.9,0.4,0.25,0.6],[0.1,0.6,0.75,0.4]]}"#,
    );
    let out = run(&[
        "ltp",
        "-p",
        p.to_str().unwrap(),
        "-R",
        r.to_str().unwrap(),
        "-o",
        q.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "ltp");

    // The produced file must feed the comparing consumer unchanged.
    let table = path_str(&dir, "table.json");
    let out = run(&[
        "sim",
        "one",
        "-q",
        q.to_str().unwrap(),
        "--shots",
        "2000",
        "--seed",
        "5",
        "-o",
        table.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "sim one");
    let out = run(&[
        "sim",
        "compare",
        "--table",
        table.to_str().unwrap(),
        "--predicted",
        q.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "sim compare");
    let dev: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!(dev < 0.1, "empirical deviation {dev}");

    // Scalar outputs carry 17 significant digits.
    let text = String::from_utf8_lossy(&out.stdout);
    let mantissa = text.trim().split('e').next().unwrap();
    let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
    assert_eq!(digits, 17, "scalar output was {text}");
}

#[test]
fn sim_runs_are_reproducible_and_joint_tables_marginalize() {
    let dir = TempDir::new().unwrap();
    let p = path_str(&dir, "p.json");
    let r = path_str(&dir, "R.json");
    write(&p, r#"{"p":[0.5,0.25,0.125,0.125]}"#);
    write(
        &r,
        r#"{"J":2,"N":4,"R":[[1.0,0.5,0.0,0.25],[0.0,0.5,1.0,0.75]]}"#,
    );
    let t1 = path_str(&dir, "t1.json");
    let t2 = path_str(&dir, "t2.json");
    for t in [&t1, &t2] {
        let out = run(&[
            "sim",
            "two",
            "-p",
            p.to_str().unwrap(),
            "-R",
            r.to_str().unwrap(),
            "--shots",
            "5000",
            "--seed",
            "11",
            "-o",
            t.to_str().unwrap(),
        ]);
        assert_exit(&out, 0, "sim two");
    }
    assert_eq!(
        std::fs::read(&t1).unwrap(),
        std::fs::read(&t2).unwrap(),
        "same seed must give byte-identical tables"
    );

    let s = path_str(&dir, "s.json");
    let out = run(&[
        "ltp",
        "-p",
        p.to_str().unwrap(),
        "-R",
        r.to_str().unwrap(),
        "-o",
        s.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "ltp");
    let out = run(&[
        "sim",
        "compare",
        "--table",
        t1.to_str().unwrap(),
        "--predicted",
        s.to_str().unwrap(),
        "--marginal-j",
    ]);
    assert_exit(&out, 0, "sim compare --marginal-j");
}

#[test]
fn exit_codes_follow_the_taxonomy() {
    let dir = TempDir::new().unwrap();

    // 3: malformed JSON file, message names the problem.
    let bad = path_str(&dir, "bad.json");
    write(&bad, r#"{"p": [0.5, "#);
    let out = run(&["ltp", "-p", bad.to_str().unwrap(), "-R", bad.to_str().unwrap()]);
    assert_exit(&out, 3, "malformed JSON");

    // 3: well-formed JSON, wrong shape, message names the field.
    let wrong = path_str(&dir, "wrong.json");
    write(
        &wrong,
        r#"{"rows":2,"cols":2,"re":[[1.0,0.0]],"im":[[0.0,0.0],[0.0,0.0]]}"#,
    );
    let fid = path_str(&dir, "fid.json");
    run(&[
        "sic", "find", "-d", "2", "--seed", "1", "--restarts", "4", "-o",
        fid.to_str().unwrap(),
    ]);
    let out = run(&[
        "repr",
        "to-prob",
        "--rho",
        wrong.to_str().unwrap(),
        "--fiducial",
        fid.to_str().unwrap(),
    ]);
    assert_exit(&out, 3, "wrong shape");
    assert!(String::from_utf8_lossy(&out.stderr).contains("'re'"));

    // 1: valid file, semantically invalid values.
    let unnormalized = path_str(&dir, "unnorm.json");
    write(&unnormalized, r#"{"p":[0.5,0.6]}"#);
    let out = run(&[
        "ltp",
        "-p",
        unnormalized.to_str().unwrap(),
        "-R",
        unnormalized.to_str().unwrap(),
    ]);
    assert_exit(&out, 1, "invalid values");

    // 1: a checked validation that fails (simplex vertex is not a state).
    let vertex = path_str(&dir, "vertex.json");
    write(&vertex, r#"{"p":[1.0,0.0,0.0,0.0]}"#);
    let out = run(&[
        "valid-state",
        "-p",
        vertex.to_str().unwrap(),
        "--fiducial",
        fid.to_str().unwrap(),
    ]);
    assert_exit(&out, 1, "vertex fails validity");

    // 0: the same check passing.
    let uniform = path_str(&dir, "uniform.json");
    write(&uniform, r#"{"p":[0.25,0.25,0.25,0.25]}"#);
    let out = run(&[
        "valid-state",
        "-p",
        uniform.to_str().unwrap(),
        "--fiducial",
        fid.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "uniform passes validity");

    // 2: incoherence witnessed.
    let out = run(&[
        "coherence",
        "additivity",
        "--p-e",
        "0.2",
        "--p-f",
        "0.3",
        "--p-or",
        "0.6",
    ]);
    assert_exit(&out, 2, "incoherent additivity");
    // 0: coherent declaration.
    let out = run(&[
        "coherence",
        "additivity",
        "--p-e",
        "0.2",
        "--p-f",
        "0.3",
        "--p-or",
        "0.5",
    ]);
    assert_exit(&out, 0, "coherent additivity");
}

#[test]
fn coherence_born_pipeline() {
    let dir = TempDir::new().unwrap();
    let p = path_str(&dir, "p.json");
    let r = path_str(&dir, "R.json");
    let q = path_str(&dir, "q.json");
    let witness = path_str(&dir, "witness.json");

    // First reference state and the double-pass matrix at d = 2, written
    // in closed form.
    let e1 = [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
    write(&p, &serde_json::json!({ "p": e1 }).to_string());
    let states: Vec<[f64; 4]> = (0..4)
        .map(|k| {
            let mut e = [1.0 / 6.0; 4];
            e[k] = 0.5;
            e
        })
        .collect();
    let rows: Vec<Vec<f64>> = (0..4)
        .map(|j| (0..4).map(|i| states[i][j]).collect())
        .collect();
    write(
        &r,
        &serde_json::json!({ "J": 4, "N": 4, "R": rows }).to_string(),
    );

    // Declaring the classical marginal violates the rule: exit 2 plus a
    // witness carrying the coherent repair.
    let out = bin()
        .args(["ltp", "-p", p.to_str().unwrap(), "-R", r.to_str().unwrap()])
        .output()
        .unwrap();
    assert_exit(&out, 0, "ltp to stdout");
    let parsed: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("ltp prints the distribution");
    write(&q, &parsed.to_string());

    let out = run(&[
        "coherence",
        "born",
        "-p",
        p.to_str().unwrap(),
        "-R",
        r.to_str().unwrap(),
        "-q",
        q.to_str().unwrap(),
        "-d",
        "2",
        "-o",
        witness.to_str().unwrap(),
    ]);
    assert_exit(&out, 2, "classical marginal is incoherent");
    let w: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&witness).unwrap()).unwrap();
    assert!(w["guaranteed_loss"].as_f64().unwrap() > 0.0);
    let coherent_q = w["repair"]["coherent_q"].as_array().unwrap();
    assert_eq!(coherent_q.len(), 4);

    // Declaring the repair instead is coherent: exit 0.
    write(
        &q,
        &serde_json::json!({ "p": coherent_q }).to_string(),
    );
    let out = run(&[
        "coherence",
        "born",
        "-p",
        p.to_str().unwrap(),
        "-R",
        r.to_str().unwrap(),
        "-q",
        q.to_str().unwrap(),
        "-d",
        "2",
    ]);
    assert_exit(&out, 0, "repaired declaration is coherent");
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "coherent");
}

#[test]
fn mmd_and_linear_extend_and_effect() {
    let dir = TempDir::new().unwrap();
    let fid = path_str(&dir, "fid.json");
    run(&[
        "sic", "find", "-d", "2", "--seed", "1", "--restarts", "4", "-o",
        fid.to_str().unwrap(),
    ]);

    // The four reference states form no MMD pair: best subset has size 1.
    let mut state_paths = Vec::new();
    for k in 0..4 {
        let path = path_str(&dir, &format!("e{k}.json"));
        let mut e = [1.0 / 6.0; 4];
        e[k] = 0.5;
        write(&path, &serde_json::json!({ "p": e }).to_string());
        state_paths.push(path);
    }
    let mut args = vec!["mmd", "-d", "2"];
    let strs: Vec<String> = state_paths
        .iter()
        .map(|p| p.to_str().unwrap().to_string())
        .collect();
    args.extend(strs.iter().map(|s| s.as_str()));
    let out = run(&args);
    assert_exit(&out, 0, "mmd");
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["size"], 1);
    assert_eq!(parsed["certified"], true);

    // valid-effect: the all-ones row reconstructs the identity.
    let eff = path_str(&dir, "eff.json");
    write(&eff, r#"{"r":[1.0,1.0,1.0,1.0]}"#);
    let out = run(&[
        "valid-effect",
        "-r",
        eff.to_str().unwrap(),
        "--fiducial",
        fid.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "identity row is a valid effect");

    // linear-extend on coordinate-sum samples over the reference states.
    let samples = path_str(&dir, "samples.json");
    let entries: Vec<serde_json::Value> = (0..4)
        .map(|k| {
            let mut e = [1.0 / 6.0; 4];
            e[k] = 0.5;
            serde_json::json!({ "v": e, "value": 1.0 })
        })
        .collect();
    write(&samples, &serde_json::Value::Array(entries).to_string());
    let out = run(&["linear-extend", "--samples", samples.to_str().unwrap()]);
    assert_exit(&out, 0, "linear-extend");
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for w in parsed["w"].as_array().unwrap() {
        assert!((w.as_f64().unwrap() - 1.0).abs() < 1e-10);
    }

    // An inconsistent sample set is a semantic failure: exit 1.
    let bad = path_str(&dir, "bad-samples.json");
    let mut entries: Vec<serde_json::Value> = (0..4)
        .map(|k| {
            let mut e = [1.0 / 6.0; 4];
            e[k] = 0.5;
            serde_json::json!({ "v": e, "value": 1.0 })
        })
        .collect();
    entries.push(serde_json::json!({ "v": [0.25, 0.25, 0.25, 0.25], "value": 1.001 }));
    write(&bad, &serde_json::Value::Array(entries).to_string());
    let out = run(&["linear-extend", "--samples", bad.to_str().unwrap()]);
    assert_exit(&out, 1, "inconsistent samples");
}

#[test]
fn sic_verify_accepts_system_files_and_find_reports_nonconvergence() {
    let dir = TempDir::new().unwrap();
    let fid = path_str(&dir, "fid.json");
    let sys = path_str(&dir, "sys.json");
    let out = run(&[
        "sic", "find", "-d", "2", "--seed", "3", "--restarts", "4", "-o",
        fid.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "sic find");
    let out = run(&[
        "sic",
        "verify",
        "--fiducial",
        fid.to_str().unwrap(),
        "-o",
        sys.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "sic verify --fiducial");
    // The exported system file is itself a valid verify input.
    let out = run(&["sic", "verify", "--sic", sys.to_str().unwrap()]);
    assert_exit(&out, 0, "sic verify --sic");

    // An unreachable tolerance is a checked failure, exit 1, and the
    // message reports the best error found.
    let out = run(&[
        "sic", "find", "-d", "2", "--seed", "3", "--restarts", "2", "--tol", "1e-40",
    ]);
    assert_exit(&out, 1, "unreachable tolerance");
    assert!(String::from_utf8_lossy(&out.stderr).contains("best frame-potential error"));
}

#[test]
fn prices_subcommand() {
    let dir = TempDir::new().unwrap();
    let good = path_str(&dir, "good.json");
    write(&good, r#"{"E": 0.3, "!E": 0.7}"#);
    assert_exit(
        &run(&["coherence", "prices", "--prices", good.to_str().unwrap()]),
        0,
        "coherent prices",
    );
    let bad = path_str(&dir, "bad.json");
    write(&bad, r#"{"E": 0.6, "!E": 0.6}"#);
    assert_exit(
        &run(&["coherence", "prices", "--prices", bad.to_str().unwrap()]),
        1,
        "incoherent prices",
    );
}
