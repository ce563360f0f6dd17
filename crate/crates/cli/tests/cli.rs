use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_singular-yamabe");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn report(path: &Path) -> toml::Table {
    fs::read_to_string(path).unwrap().parse().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn spectrum_roots_follow_the_ladder() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["--out", "s", "spectrum", p(&fixture("sphere4.toml"))]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(tmp.path().join("s/spectrum.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("mode_index,eigenvalue,multiplicity,nu_minus,nu_plus"));
    for (j, line) in lines.take(6).enumerate() {
        let nu_plus: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
        assert!((nu_plus - (1.0 + j as f64)).abs() < 1e-12);
    }
    assert!(tmp.path().join("s/manifest.toml").exists());
}

#[test]
fn malformed_file_reports_location() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["spectrum", p(&fixture("malformed.toml"))]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 5") && err.contains("expected f64"), "{err}");
}

#[test]
fn family_index_below_three_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["spectrum", "--m", "2", p(&fixture("sphere4.toml"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn missing_out_defaults_to_out_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["solve", p(&fixture("sphere4.toml"))]);
    assert_eq!(code(&o), 0);
    for f in ["solution.csv", "continuation.csv", "solve_report.toml", "manifest.toml", "stages/solution_00.csv"] {
        assert!(tmp.path().join("out").join(f).exists(), "{f}");
    }
    let entries: Vec<_> = fs::read_dir(tmp.path()).unwrap().collect();
    assert_eq!(entries.len(), 1, "nothing is written outside the output directory");
}

#[test]
fn sphere_solve_recovers_yamabe_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["--out", "o", "solve", p(&fixture("sphere4.toml"))]);
    assert_eq!(code(&o), 0);
    let r = report(&tmp.path().join("o/solve_report.toml"));
    let y = r["y_extrapolated"].as_float().unwrap();
    // c(4)·12·Vol(S^4)^{1/2} = 2·sqrt(8π²/3)
    let exact = 2.0 * (8.0 * std::f64::consts::PI.powi(2) / 3.0).sqrt();
    assert!((y - exact).abs() < 0.01 * exact, "{y} vs {exact}");
    assert_eq!(r["label"].as_str(), Some("radial upper bound"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let space = fixture("spindle05.toml");
    for dir in ["a", "b"] {
        assert_eq!(code(&run(tmp.path(), &["--out", dir, "--seed", "7", "solve", "--grid", "400", p(&space)])), 0);
    }
    for f in ["solution.csv", "continuation.csv", "solve_report.toml", "stages/solution_03.csv"] {
        let a = fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    // rerunning into the same directory replaces files with identical content
    let before = fs::read(tmp.path().join("a/solution.csv")).unwrap();
    assert_eq!(code(&run(tmp.path(), &["--out", "a", "--seed", "7", "solve", "--grid", "400", p(&space)])), 0);
    assert_eq!(before, fs::read(tmp.path().join("a/solution.csv")).unwrap());
}

#[test]
fn failed_stage_flushes_partial_results() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.toml"), "[solver]\nmax_iterations = 2\n").unwrap();
    let o = run(tmp.path(), &["--out", "o", "--config", "c.toml", "solve", p(&fixture("spindle05.toml"))]);
    assert_eq!(code(&o), 3);
    let r = report(&tmp.path().join("o/solve_report.toml"));
    assert_eq!(r["complete"].as_bool(), Some(false));
    assert!(r["failure"].as_str().unwrap().contains("no convergence"));
    assert!(tmp.path().join("o/continuation.csv").exists());
}

#[test]
fn unknown_config_key_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.toml"), "[solver]\nmax_iters = 2\n").unwrap();
    let o = run(tmp.path(), &["--config", "c.toml", "solve", p(&fixture("sphere4.toml"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn analyze_constant_solution_and_refuse_unnormalized() {
    let tmp = tempfile::tempdir().unwrap();
    let space = fixture("sphere4.toml");
    assert_eq!(code(&run(tmp.path(), &["--out", "s", "solve", "--grid", "300", p(&space)])), 0);
    let sol = tmp.path().join("s/solution.csv");
    let o = run(tmp.path(), &["--out", "a", "analyze", p(&sol), p(&space)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let fits = fs::read_to_string(tmp.path().join("a/fits.csv")).unwrap();
    for line in fits.lines().skip(1) {
        let gamma: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(gamma.abs() < 1e-6, "{line}");
    }
    let r = report(&tmp.path().join("a/analyze_report.toml"));
    assert_eq!(r["moser"]["validated"].as_bool(), Some(true));

    // doubling u breaks the normalization
    let text = fs::read_to_string(&sol).unwrap();
    let mut lines = text.lines();
    let mut doubled = format!("{}\n", lines.next().unwrap());
    for line in lines {
        let mut cols: Vec<String> = line.split(',').map(String::from).collect();
        let u: f64 = cols[1].parse().unwrap();
        cols[1] = format!("{:.16e}", 2.0 * u);
        doubled.push_str(&cols.join(","));
        doubled.push('\n');
    }
    fs::write(tmp.path().join("bad.csv"), doubled).unwrap();
    let o = run(tmp.path(), &["--out", "b", "analyze", "bad.csv", p(&space)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not normalized"));
}

#[test]
fn spindle_pipeline_matches_prediction() {
    let tmp = tempfile::tempdir().unwrap();
    let space = fixture("spindle05.toml");
    assert_eq!(code(&run(tmp.path(), &["--out", "s", "solve", "--grid", "2000", p(&space)])), 0);
    let o = run(tmp.path(), &["--out", "a", "analyze", "s/solution.csv", p(&space)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&tmp.path().join("a/analyze_report.toml"));
    for tip in r["tips"].as_array().unwrap() {
        assert_eq!(tip["comparison"]["match"].as_bool(), Some(true));
        assert!((tip["comparison"]["predicted"].as_float().unwrap() - 1.0).abs() < 1e-12);
    }
}

fn strata_file(cases: &[&toml::Value]) -> String {
    let mut s = String::new();
    for c in cases {
        s.push_str(&format!(
            "[[stratum]]\nn = {}\nf = {}\nA0 = {:?}\nA1 = {:?}\n",
            c["n"].as_integer().unwrap(),
            c["f"].as_integer().unwrap(),
            c["A0"].as_float().unwrap(),
            c["A1"].as_float().unwrap()
        ));
    }
    s
}

#[test]
fn admissibility_truth_table_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/admissibility_cases.toml");
    let table = report(&path);
    let cases = table["case"].as_array().unwrap();
    assert_eq!(cases.len(), 12);
    for (k, c) in cases.iter().enumerate() {
        let file = tmp.path().join(format!("case{k}.toml"));
        fs::write(&file, strata_file(&[c])).unwrap();
        let out = format!("o{k}");
        assert_eq!(code(&run(tmp.path(), &["--out", &out, "admissibility", p(&file)])), 0);
        let r = report(&tmp.path().join(&out).join("admissibility_report.toml"));
        for key in ["iv_a", "iv_b", "iv_c"] {
            assert_eq!(r[key].as_bool(), c[key].as_bool(), "case {k} {key}");
        }
    }
}

#[test]
fn empty_strata_are_smooth() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["admissibility", p(&fixture("empty_strata.toml"))]);
    assert_eq!(code(&o), 0);
    let r = report(&tmp.path().join("out/admissibility_report.toml"));
    for key in ["smooth", "iv_a", "iv_b", "iv_c", "positivity_guaranteed"] {
        assert_eq!(r[key].as_bool(), Some(true), "{key}");
    }
}

#[test]
fn inequalities_flag_alpha_two_outside_hypothesis() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = "[probes]\nprobes = 60\naudit_probes = 100\ndescent_iterations = 300\n\n\
               [inequalities]\nhardy_cells = 1000\nhardy_ratio = 1.05\nhardy_depth = 1e6\nhardy_probes = 100\ntruncation_draws = 1000\n";
    fs::write(tmp.path().join("c.toml"), cfg).unwrap();
    let o = run(tmp.path(), &["--config", "c.toml", "inequalities", p(&fixture("cone3.toml"))]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&tmp.path().join("out/inequalities_report.toml"));
    let verdicts: Vec<(f64, String)> = r["morrey"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| (m["alpha"].as_float().unwrap(), m["verdict"].as_str().unwrap().to_string()))
        .collect();
    assert!(verdicts.contains(&(2.0, "outside_hypothesis".to_string())), "{verdicts:?}");
    assert_eq!(r["truncation"]["failures"].as_integer(), Some(0));
    assert_eq!(r["hardy"]["within_slack"].as_bool(), Some(true));
    assert_eq!(r["sobolev"]["audit_violations"].as_integer(), Some(0));
    let csv = fs::read_to_string(tmp.path().join("out/morrey.csv")).unwrap();
    assert!(csv.starts_with("alpha,center,radius,value\n"));
}
