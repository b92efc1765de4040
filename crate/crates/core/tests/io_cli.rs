mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::*;
use sgev::io::{
    fingerprint_sym, load_matrix, load_result, parse_matrix, pitprops, save_result, DatasetSpec,
    Format, ResultRecord,
};
use sgev::matcore::full_eigen;
use sgev::{Error, SymMatrix};

fn sgev_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sgev"))
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/pitprops.csv")
}

fn run(args: &[&str]) -> Output {
    sgev_bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_matrix(path: &Path, m: &SymMatrix) {
    let text: String = m
        .to_rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| format!("{v:?}"))
                .collect::<Vec<_>>()
                .join(",")
                + "\n"
        })
        .collect();
    fs::write(path, text).unwrap();
}

#[test]
fn matrix_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(51);
    let m = random_spd(&mut r, 7, 0.1);
    let p = dir.path().join("m.csv");
    write_matrix(&p, &m);
    let back = load_matrix(&DatasetSpec::new(&p, Format::MatrixCsv)).unwrap();
    assert_eq!(back, m);
    assert_eq!(fingerprint_sym(&back), fingerprint_sym(&m));
}

#[test]
fn truncated_file_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.csv");
    fs::write(&p, "1,0,0\n0,1,0\n0,1\n").unwrap();
    match load_matrix(&DatasetSpec::new(&p, Format::MatrixCsv)) {
        Err(Error::Parse { row, .. }) => assert_eq!(row, 3),
        other => panic!("{other:?}"),
    }
    assert!(parse_matrix("", b',', false).is_err());
}

#[test]
fn fingerprint_tracks_content() {
    let a = pitprops();
    let mut rows = a.to_rows();
    rows[0][1] += 1e-12;
    rows[1][0] += 1e-12;
    let b = SymMatrix::from_rows(&rows).unwrap();
    assert_ne!(fingerprint_sym(&a), fingerprint_sym(&b));
    assert_eq!(fingerprint_sym(&a), fingerprint_sym(&pitprops()));
}

#[test]
fn result_record_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut rec = ResultRecord::new("pca", fingerprint_sym(&pitprops()));
    rec.x = vec![vec![0.1, -0.0, 1.0 / 3.0]];
    rec.objective = vec![std::f64::consts::PI];
    rec.cardinality = vec![2];
    rec.iterations = vec![7];
    rec.converged = vec![true];
    let p = dir.path().join("r.json");
    save_result(&rec, &p).unwrap();
    assert_eq!(load_result(&p).unwrap(), rec);
}

#[test]
fn data_csv_covariance_is_centered_gram() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("d.csv");
    fs::write(&p, "1,2\n3,2\n5,8\n").unwrap();
    let c = load_matrix(&DatasetSpec::new(&p, Format::DataCsv)).unwrap();
    // centered columns (-2, 0, 2) and (-2, -2, 4)
    assert_eq!(c.to_rows(), vec![vec![8.0, 12.0], vec![12.0, 24.0]]);
}

#[test]
fn cli_zero_penalty_prints_lambda_max() {
    let f = fixture();
    let o = run(&[
        "pca",
        "--input",
        f.to_str().unwrap(),
        "--rho",
        "0",
        "--components",
        "1",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lmax = full_eigen(&pitprops()).unwrap().values[0];
    assert!(text.contains(&format!("variance = {lmax:.6}")), "{text}");
    assert!(text.contains("cardinality = 13"));
}

#[test]
fn cli_target_cardinality() {
    let f = fixture();
    let o = run(&[
        "pca",
        "--input",
        f.to_str().unwrap(),
        "--target-cardinality",
        "6",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("cardinality = 6"));
}

#[test]
fn cli_unknown_flag_is_usage_error() {
    let o = run(&["pca", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn cli_missing_file_is_input_error() {
    let o = run(&["eig", "--input", "/nonexistent/a.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cli_runs_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture();
    let f = f.to_str().unwrap();
    let mut outputs = Vec::new();
    for (i, args) in [
        vec![
            "pca",
            "--input",
            f,
            "--target-cardinality",
            "6,2,2",
            "--components",
            "3",
        ],
        vec![
            "pca", "--input", f, "--rho", "0.5", "--init", "random", "--seed", "9",
        ],
        vec!["eig", "--input", f],
    ]
    .iter()
    .enumerate()
    {
        let mut bytes = Vec::new();
        for run_id in 0..2 {
            let out = dir.path().join(format!("r{i}_{run_id}.json"));
            let mut a = args.clone();
            let o = out.to_str().unwrap().to_string();
            a.extend(["--output", &o]);
            assert!(run(&a).status.success(), "{a:?}");
            bytes.push(fs::read(&out).unwrap());
        }
        assert_eq!(bytes[0], bytes[1]);
        outputs.push(bytes.swap_remove(0));
    }
    assert_ne!(outputs[0], outputs[1]);
}

#[test]
fn cli_sweep_curve_is_increasing() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture();
    let curve = dir.path().join("curve.csv");
    let o = run(&[
        "sweep",
        "--input",
        f.to_str().unwrap(),
        "--grid-points",
        "15",
        "--curve",
        curve.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&curve).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rho,cardinality,pev"));
    let rhos: Vec<f64> = lines
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(rhos.len(), 15);
    assert!(rhos.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn cli_cca_and_fda_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut r = rng(52);
    let sxx = random_spd(&mut r, 3, 0.5);
    let syy = random_spd(&mut r, 2, 0.5);
    write_matrix(&d.join("sxx.csv"), &sxx);
    write_matrix(&d.join("syy.csv"), &syy);
    fs::write(d.join("sxy.csv"), "0.1,0.0\n0.0,0.2\n0.05,0.0\n").unwrap();
    let p = |n: &str| d.join(n).to_str().unwrap().to_string();
    let o = run(&[
        "cca",
        "--sxx",
        &p("sxx.csv"),
        "--syy",
        &p("syy.csv"),
        "--sxy",
        &p("sxy.csv"),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("pair 1: correlation"));

    fs::write(d.join("m1.csv"), "1,0.5,0\n").unwrap();
    fs::write(d.join("m2.csv"), "0,0,0\n").unwrap();
    write_matrix(&d.join("c.csv"), &SymMatrix::identity(3));
    let o = run(&[
        "fda",
        "--mean1",
        &p("m1.csv"),
        "--mean2",
        &p("m2.csv"),
        "--cov1",
        &p("c.csv"),
        "--cov2",
        &p("c.csv"),
        "--nu",
        "0.5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn cli_retrieve_eval_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(53);
    let docs = 40;
    let mut x = String::new();
    let mut y = String::new();
    for _ in 0..docs {
        let t: Vec<bool> = (0..3).map(|_| rand::Rng::gen_bool(&mut r, 0.5)).collect();
        let row = |r: &mut rand_chacha::ChaCha8Rng| -> String {
            (0..8)
                .map(|w| {
                    let on = if w < 6 {
                        t[w / 2] && rand::Rng::gen_bool(r, 0.8)
                    } else {
                        rand::Rng::gen_bool(r, 0.2)
                    };
                    if on {
                        "1"
                    } else {
                        "0"
                    }
                })
                .collect::<Vec<_>>()
                .join(",")
        };
        x += &(row(&mut r) + "\n");
        y += &(row(&mut r) + "\n");
    }
    let (px, py) = (dir.path().join("x.csv"), dir.path().join("y.csv"));
    fs::write(&px, x).unwrap();
    fs::write(&py, y).unwrap();
    let o = run(&[
        "retrieve-eval",
        "--bow-x",
        px.to_str().unwrap(),
        "--bow-y",
        py.to_str().unwrap(),
        "--components",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("average aroc"));
}
