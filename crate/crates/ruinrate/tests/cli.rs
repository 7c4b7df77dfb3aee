use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ruinrate::ModelDoc;
use ruinrate_core::{solve_rate, JumpModel, PremiumRule, RiskModel, VolatilityRule};
use tempfile::TempDir;

const TABLE1_MODEL: &str = r#"{"premium":{"type":"constant","p":2.2},"sigma":0,
  "jump":{"type":"compound_poisson","intensity":1,"claims":{"type":"gamma","shape":2,"rate":1}}}"#;

const GAMMA_PROCESS_MODEL: &str = r#"{"premium":{"type":"constant","p":1.1},"sigma":1,
  "jump":{"type":"gamma_process","alpha":0.5,"beta":0.5}}"#;

const IG_MODEL: &str = r#"{"premium":{"type":"affine","p":1.2,"i":0.05},"sigma":0.5,
  "jump":{"type":"inverse_gaussian","gamma":1}}"#;

fn ruinrate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ruinrate")).args(args).output().expect("binary runs")
}

fn write_model(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn files_in(dir: &Path) -> Vec<PathBuf> {
    let mut out = vec![];
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(files_in(&path));
        } else {
            out.push(path);
        }
    }
    out.sort();
    out
}

fn assert_same_tree(a: &Path, b: &Path) {
    let (fa, fb) = (files_in(a), files_in(b));
    assert_eq!(fa.len(), fb.len());
    assert!(!fa.is_empty());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.strip_prefix(a).unwrap(), y.strip_prefix(b).unwrap());
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{} differs", x.display());
    }
}

#[test]
fn rate_prints_table_one_value() {
    let dir = TempDir::new().unwrap();
    let model = write_model(dir.path(), "m.json", TABLE1_MODEL);
    let o = ruinrate(&["rate", "--model", &model]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let k = json["k"].as_f64().unwrap();
    assert!((k - 0.00319).abs() <= 1e-5, "k = {k}");
    for field in ["lambda_star", "residual", "lambda_max"] {
        assert!(json[field].is_number(), "{field}");
    }
    assert_eq!(json["concavity_ok"], true);
    assert_eq!(json["boundary_max"], false);
}

#[test]
fn rate_is_the_library_value_bit_for_bit() {
    let dir = TempDir::new().unwrap();
    let model = write_model(dir.path(), "m.json", GAMMA_PROCESS_MODEL);
    let o = ruinrate(&["rate", "--model", &model]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();

    let lib = solve_rate(&RiskModel::new(
        PremiumRule::constant(1.1).unwrap(),
        VolatilityRule::constant(1.0).unwrap(),
        JumpModel::gamma_process(0.5, 0.5).unwrap(),
    ))
    .unwrap();
    assert_eq!(json["k"].as_f64().unwrap().to_bits(), lib.k.to_bits());
    assert_eq!(json["lambda_star"].as_f64().unwrap().to_bits(), lib.lambda_star.to_bits());
}

#[test]
fn net_profit_violation_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let model = write_model(
        dir.path(),
        "m.json",
        r#"{"premium":{"type":"constant","p":2.0},"jump":{"type":"compound_poisson","intensity":1,
            "claims":{"type":"exponential","rate":0.5}}}"#,
    );
    for cmd in ["rate", "verify"] {
        let o = ruinrate(&[cmd, "--model", &model, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        assert!(stderr(&o).contains("net benefit condition fails: p(0) ≤ m(mu)"), "{}", stderr(&o));
    }
}

#[test]
fn malformed_input_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("syntax.json", "{not json"),
        ("missing.json", r#"{"premium":{"type":"constant","p":1}}"#),
        ("unknown.json", r#"{"premium":{"type":"constant","p":3},"jump":{"type":"inverse_gaussian","gamma":1},"extra":1}"#),
        ("variant.json", r#"{"premium":{"type":"constant","p":3},"jump":{"type":"stable","alpha":1}}"#),
        ("negative.json", r#"{"premium":{"type":"constant","p":3},"sigma":-1,"jump":{"type":"inverse_gaussian","gamma":1}}"#),
        ("rate.json", r#"{"premium":{"type":"constant","p":3},"jump":{"type":"gamma_process","alpha":1,"beta":0}}"#),
    ];
    for (name, text) in cases {
        let model = write_model(dir.path(), name, text);
        let o = ruinrate(&["rate", "--model", &model]);
        assert_eq!(o.status.code(), Some(1), "{name}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
    assert_eq!(ruinrate(&["rate"]).status.code(), Some(1));
    assert_eq!(ruinrate(&["rate", "--model", "/nonexistent/model.json"]).status.code(), Some(1));
    assert_eq!(ruinrate(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ruinrate(&["simulate", "--model", "x.json", "--paths", "many"]).status.code(), Some(1));
    assert_eq!(ruinrate(&["--help"]).status.code(), Some(0));
}

#[test]
fn tables_match_golden_files() {
    let dir = TempDir::new().unwrap();
    let o = ruinrate(&["tables", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for name in ["table1.csv", "table2.csv"] {
        let (gh, grows) = read_csv(&golden.join(name));
        let (h, rows) = read_csv(&dir.path().join(name));
        assert_eq!(h, gh, "{name} header");
        assert_eq!(rows.len(), grows.len(), "{name} rows");
        for (row, grow) in rows.iter().zip(&grows) {
            for (j, (cell, gcell)) in row.iter().zip(grow).enumerate() {
                match (cell.parse::<f64>(), gcell.parse::<f64>()) {
                    (Ok(x), Ok(_)) if gh[j] == "residual" => assert!(x <= 1e-10, "{name} residual {x}"),
                    (Ok(x), Ok(g)) => assert!(
                        (x - g).abs() <= 1e-12 * g.abs().max(1e-3),
                        "{name} {} {}: {x} vs golden {g}",
                        gh[j],
                        row[0]
                    ),
                    _ => assert_eq!(cell, gcell, "{name} column {}", gh[j]),
                }
            }
        }
        let matches = column(&h, "matches_print");
        assert!(rows.iter().all(|r| r[matches] == "true"), "{name}");
    }
}

fn lookup(rows: &[Vec<String>], header: &[String], series: &str, sigma: f64, eta: f64) -> Vec<String> {
    let (s, sg, e) = (column(header, "series"), column(header, "sigma"), column(header, "eta"));
    rows.iter()
        .find(|r| {
            r[s] == series
                && (r[sg].parse::<f64>().unwrap() - sigma).abs() < 1e-12
                && (r[e].parse::<f64>().unwrap() - eta).abs() < 1e-12
        })
        .unwrap_or_else(|| panic!("no row {series} {sigma} {eta}"))
        .clone()
}

#[test]
fn tables_spot_values() {
    let dir = TempDir::new().unwrap();
    assert_eq!(ruinrate(&["tables", "--out", dir.path().to_str().unwrap()]).status.code(), Some(0));
    let k = |file: &str, series: &str, sigma: f64, eta: f64| {
        let (h, rows) = read_csv(&dir.path().join(file));
        let row = lookup(&rows, &h, series, sigma, eta);
        (row[column(&h, "k")].parse::<f64>().unwrap(), row[column(&h, "paper_value")].clone(), row[h.len() - 1].clone())
    };
    let (k1, _, _) = k("table1.csv", "gamma", 0.0, 0.05);
    assert!((k1 - 0.00082).abs() <= 1e-5);
    let (k2, _, _) = k("table2.csv", "exponential", 1.0, 0.3);
    assert!((k2 - 0.01791).abs() <= 1e-5);
    let (k3, printed, flag) = k("table3.csv", "inverse_gaussian", 0.0, 0.1);
    assert!((k3 - 0.1 * 0.1 / 2.2).abs() <= 1e-10);
    assert_eq!(printed.parse::<f64>().unwrap(), 0.05);
    assert_eq!(flag, "true");

    for (name, n) in [("figure1.csv", 303), ("figure2a.csv", 90), ("figure2b.csv", 303), ("figure3a.csv", 60), ("figure3b.csv", 202)] {
        let (h, rows) = read_csv(&dir.path().join(name));
        assert_eq!(h, ["series", "sigma", "eta", "k"]);
        assert_eq!(rows.len(), n, "{name}");
        assert!(rows.iter().all(|r| r[3].parse::<f64>().unwrap() > 0.0), "{name}");
    }
}

fn simulate_into(dir: &Path, model: &str, extra: &[&str]) -> Output {
    let mut args = vec![
        "simulate",
        "--model",
        model,
        "--out",
        dir.to_str().unwrap(),
        "--paths",
        "500",
        "--horizon",
        "300",
        "--burn-in",
        "50",
        "--ultimate",
        "--dump-paths",
        "2",
        "--step-table",
    ];
    args.extend_from_slice(extra);
    ruinrate(&args)
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let model = write_model(dir.path(), "m.json", IG_MODEL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(simulate_into(&a, &model, &[]).status.code(), Some(0));
    assert_eq!(simulate_into(&b, &model, &[]).status.code(), Some(0));
    assert_same_tree(&a, &b);

    let c = dir.path().join("c");
    assert_eq!(simulate_into(&c, &model, &["--seed", "7"]).status.code(), Some(0));
    assert_ne!(fs::read(a.join("estimates.csv")).unwrap(), fs::read(c.join("estimates.csv")).unwrap());
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let model = write_model(dir.path(), "m.json", TABLE1_MODEL);
    let (a, b) = (dir.path().join("one"), dir.path().join("four"));
    assert_eq!(simulate_into(&a, &model, &["--threads", "1"]).status.code(), Some(0));
    assert_eq!(simulate_into(&b, &model, &["--threads", "4"]).status.code(), Some(0));
    assert_same_tree(&a, &b);

    let verify = |out: &Path, threads: &str| {
        ruinrate(&[
            "verify", "--out", out.to_str().unwrap(), "--paths", "400", "--horizon", "2000", "--burn-in", "200",
            "--threads", threads,
        ])
    };
    let (va, vb) = (dir.path().join("v1"), dir.path().join("v3"));
    let (oa, ob) = (verify(&va, "1"), verify(&vb, "3"));
    assert_eq!(oa.status.code(), ob.status.code());
    assert_eq!(stdout(&oa), stdout(&ob));
    assert_same_tree(&va, &vb);
}

#[test]
fn outputs_round_trip() {
    let dir = TempDir::new().unwrap();
    let model = write_model(dir.path(), "m.json", IG_MODEL);
    let out = dir.path().join("out");
    let o = simulate_into(&out, &model, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    for path in files_in(&out) {
        if path.extension().is_some_and(|e| e == "csv") {
            let (h, rows) = read_csv(&path);
            assert!(!rows.is_empty(), "{}", path.display());
            for row in &rows {
                assert_eq!(row.len(), h.len());
                for cell in row {
                    let numeric = cell.parse::<f64>().is_ok();
                    let known = ["true", "false", "psi_T", "dual_tail", "psi"].contains(&cell.as_str());
                    assert!(numeric || known, "{}: {cell}", path.display());
                    if let (Ok(x), Err(_)) = (cell.parse::<f64>(), cell.parse::<u64>()) {
                        if x.is_finite() {
                            assert_eq!(&format!("{x:.16e}"), cell);
                        }
                    }
                }
            }
        }
    }

    let (h, rows) = read_csv(&out.join("estimates.csv"));
    assert_eq!(h, ["quantity", "u", "T", "mean", "stderr", "n_paths", "ci_low", "ci_high"]);
    assert_eq!(rows.iter().filter(|r| r[0] == "psi_T").count(), 9);
    assert_eq!(rows.iter().filter(|r| r[0] == "dual_tail").count(), 9);
    assert!(rows.iter().filter(|r| r[0] == "psi").all(|r| r[2] == "inf"));

    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let doc: ModelDoc = serde_json::from_value(summary["model"].clone()).unwrap();
    assert_eq!(doc, ModelDoc::parse(IG_MODEL).unwrap());
    let reparsed = ModelDoc::parse(&serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(reparsed, doc);
    assert_eq!(summary["seed"], 42);
    assert!(summary["rate"]["k"].as_f64().unwrap() > 0.0);
}

#[test]
fn zero_level_gives_zero_gap() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("v");
    let o = ruinrate(&[
        "verify", "--u", "0", "--out", out.to_str().unwrap(), "--paths", "300", "--horizon", "1000", "--burn-in", "100",
        "--duality-u-grid", "0",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let (h, rows) = read_csv(&out.join("bound_report.csv"));
    assert_eq!(h, ["u", "T", "psi_hat", "psi_T_hat", "gap", "bound", "stderr", "pass"]);
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert_eq!(r[4].parse::<f64>().unwrap(), 0.0);
        assert_eq!(r[7], "true");
    }
    let (_, rows) = read_csv(&out.join("duality.csv"));
    assert!(rows.iter().all(|r| r[6].parse::<f64>().unwrap() == 0.0 && r[8] == "true"));
}

#[test]
fn failed_check_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("v");
    let o = ruinrate(&[
        "verify", "--out", out.to_str().unwrap(), "--paths", "1", "--horizon", "1000", "--burn-in", "100",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("verify: FAIL"));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], false);
}
