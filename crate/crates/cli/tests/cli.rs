use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_papangelou");

struct Run {
    dir: TempDir,
    config: PathBuf,
}

impl Run {
    fn new(toml: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let config = dir.path().join("experiment.toml");
        fs::write(&config, toml).unwrap();
        Self { dir, config }
    }

    fn out(&self) -> PathBuf {
        self.dir.path().join("out")
    }

    fn exec(&self, sub: &str, extra: &[&str]) -> Output {
        Command::new(BIN)
            .arg(sub)
            .arg(&self.config)
            .arg("--out")
            .arg(self.out())
            .args(extra)
            .env_remove("PAPANGELOU_OUT")
            .output()
            .unwrap()
    }

    fn read(&self, name: &str) -> String {
        fs::read_to_string(self.out().join(name)).unwrap()
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const POISSON_TWO: &str = r#"
version = 1

[model]
family = "poisson"
sites = 2
activity = 1.0

[[checks]]
kind = "gnz"
u = "cardinality"

[[checks]]
kind = "moment-product"
us = ["position", "indicator"]
f = "one"
"#;

#[test]
fn poisson_checks_pass_with_two_rows() {
    let run = Run::new(POISSON_TWO);
    let o = run.exec("verify", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = run.read("summary.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "identity,mode,lhs,rhs,stderr,tolerance,pass");
    assert_eq!(lines.len(), 3);
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")), "{csv}");
    let detail = json(&run.out().join("detail.json"));
    assert_eq!(detail["mode"], "exact");
    assert_eq!(detail["reports"].as_array().unwrap().len(), 2);
}

#[test]
fn empty_check_list_writes_a_header_only() {
    let run = Run::new("version = 1\n[model]\nfamily = \"poisson\"\nsites = 3\n");
    let o = run.exec("verify", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(run.read("summary.csv"), "identity,mode,lhs,rhs,stderr,tolerance,pass\n");
}

#[test]
fn kernel_outside_the_unit_spectrum_is_rejected() {
    // eigenvalues 1.2 and 0.2
    let run =
        Run::new("version = 1\n[model]\nfamily = \"determinantal\"\nsites = 2\nkernel = [[0.7, 0.5], [0.5, 0.7]]\n");
    let o = run.exec("verify", &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("spectrum"), "{}", stderr(&o));
}

#[test]
fn malformed_config_reports_the_line() {
    let run = Run::new("version = 1\n[model]\nfamily = \"poisson\"\nsites = = 2\n");
    let o = run.exec("verify", &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn unknown_fixture_names_are_usage_errors() {
    let run =
        Run::new("version = 1\n[model]\nfamily = \"poisson\"\nsites = 2\n[[checks]]\nkind = \"gnz\"\nu = \"nope\"\n");
    let o = run.exec("verify", &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("nope"), "{}", stderr(&o));
}

#[test]
fn exact_mode_needs_a_small_discrete_space() {
    let run = Run::new("version = 1\n[model]\nfamily = \"poisson\"\nsites = 16\n");
    assert_eq!(code(&run.exec("verify", &[])), 2);
    let run = Run::new("version = 1\n[model]\nfamily = \"poisson\"\nwindow = [[0.0, 1.0]]\n");
    assert_eq!(code(&run.exec("verify", &[])), 2);
}

#[test]
fn a_failing_check_is_a_structured_row() {
    let run = Run::new(&format!(
        "{POISSON_TWO}\n[[checks]]\nkind = \"divergence-moment\"\nn = 6\nu = \"position\"\nf = \"one\"\n"
    ));
    let o = run.exec("verify", &[]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let csv = run.read("summary.csv");
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().last().unwrap().ends_with(",false"));
    let detail = json(&run.out().join("detail.json"));
    let notes = detail["reports"][2]["notes"].to_string();
    assert!(notes.contains("error:"), "{notes}");
}

#[test]
fn monte_carlo_checks_on_a_window() {
    let run = Run::new(
        r#"
version = 1
[model]
family = "poisson"
window = [[0.0, 1.0]]
activity = 2.0
[estimator]
mode = "mc"
samples = 4000
seed = 3
[[checks]]
kind = "gnz"
u = "const:1"
"#,
    );
    let o = run.exec("verify", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let detail = json(&run.out().join("detail.json"));
    assert_eq!(detail["mode"], "mc");
    assert_eq!(detail["samples"], 4000);
}

const MANY_CHECKS: &str = r#"
version = 1
[model]
family = "gibbs"
sites = 3
activity = [0.5, 1.0, 1.5]
potential = [[0.0, 0.4, inf], [0.4, 0.0, 0.2], [inf, 0.2, 0.0]]
[[checks]]
kind = "gnz"
u = "affine"
[[checks]]
kind = "moment-power"
n = 3
u = "position"
f = "cardinality"
[[checks]]
kind = "compensated-moment"
n = 2
u = "indicator"
f = "one"
[[checks]]
kind = "duality"
u = "position"
f = "cardinality"
[[checks]]
kind = "skorohod"
u = "exvisible"
[[checks]]
kind = "correlation-moment"
vs = ["indicator", "const"]
[[checks]]
kind = "partition-recursion"
n = 4
function = "size-product"
[[checks]]
kind = "gnz-compound"
u = "size"
"#;

#[test]
fn reports_are_byte_identical_and_parallel_matches() {
    let run = Run::new(MANY_CHECKS);
    let o = run.exec("verify", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (csv, detail) = (run.read("summary.csv"), run.read("detail.json"));
    assert_eq!(csv.lines().count(), 9);
    assert_eq!(code(&run.exec("verify", &[])), 0);
    assert_eq!(run.read("summary.csv"), csv);
    assert_eq!(code(&run.exec("verify", &["--parallel", "4"])), 0);
    assert_eq!(run.read("summary.csv"), csv);
    assert_eq!(run.read("detail.json"), detail);
}

#[test]
fn output_directory_comes_from_the_environment() {
    let run = Run::new(POISSON_TWO);
    let target = run.dir.path().join("from-env");
    let o = Command::new(BIN)
        .arg("verify")
        .arg(&run.config)
        .env("PAPANGELOU_OUT", &target)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(target.join("summary.csv").is_file());
    assert!(target.join("detail.json").is_file());
}

const WINDOW_POISSON: &str = r#"
version = 1
[model]
family = "poisson"
window = [[0.0, 1.0], [0.0, 1.0]]
activity = 2.0
[estimator]
mode = "mc"
samples = 10
seed = 42
"#;

fn body(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn sampling_is_reproducible() {
    let run = Run::new(WINDOW_POISSON);
    let o = run.exec("sample", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let first = run.read("samples.txt");
    assert!(
        first.starts_with("# papangelou samples version=1 count=10 seed=42"),
        "{first}"
    );
    assert_eq!(body(&first).len(), 10);
    assert_eq!(code(&run.exec("sample", &[])), 0);
    assert_eq!(run.read("samples.txt"), first);
    let meta = json(&run.out().join("samples.txt.meta.json"));
    assert_eq!(meta["seed"], 42);
    assert_eq!(meta["count"], 10);
}

#[test]
fn zero_samples_leave_only_the_header() {
    let run = Run::new(&WINDOW_POISSON.replace("samples = 10", "samples = 0"));
    let o = run.exec("sample", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = run.read("samples.txt");
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("# papangelou samples"));
}

fn parse_point(token: &str) -> Vec<f64> {
    token
        .trim_matches(|c| c == '(' || c == ')')
        .split(' ')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().unwrap())
        .collect()
}

#[test]
fn hard_core_samples_respect_the_radius() {
    let r = 0.15;
    let run = Run::new(&format!(
        r#"
version = 1
[model]
family = "gibbs"
window = [[0.0, 1.0], [0.0, 1.0]]
activity = 40.0
hard_core = {r}
[estimator]
mode = "mc"
samples = 60
seed = 5
burn_in = 200
steps = 20
"#
    ));
    let o = run.exec("sample", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = run.read("samples.txt");
    let mut points_seen = 0;
    for line in body(&text) {
        let pts: Vec<Vec<f64>> = split_points(line).iter().map(|t| parse_point(t)).collect();
        points_seen += pts.len();
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(p.len(), 2, "{line}");
            for q in &pts[..i] {
                let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
                assert!(d >= r, "pair at distance {d} in {line}");
            }
        }
    }
    assert!(points_seen > 60, "the chain should not stay empty");
}

/// Splits a line into point tokens; coordinate tuples may contain commas.
fn split_points(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for ch in line.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => out.push(std::mem::take(&mut cur)),
            ',' => cur.push(' '),
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out
}

fn probabilities(toml: &str) -> Vec<f64> {
    let run = Run::new(toml);
    let o = run.exec("oracle", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&run.out().join("oracle.json"));
    v["probabilities"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["probability"].as_f64().unwrap())
        .collect()
}

fn assert_close(got: &[f64], want: &[f64]) {
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() < 1e-12, "{got:?} vs {want:?}");
    }
}

#[test]
fn oracle_dumps_exact_laws() {
    let dpp = "version = 1\n[model]\nfamily = \"determinantal\"\nsites = 2\nkernel = [[0.5, 0.25], [0.25, 0.5]]\n";
    assert_close(&probabilities(dpp), &[3.0 / 16.0, 5.0 / 16.0, 5.0 / 16.0, 3.0 / 16.0]);
    let poisson = "version = 1\n[model]\nfamily = \"poisson\"\nsites = 2\nactivity = 1.0\n";
    assert_close(&probabilities(poisson), &[0.25; 4]);
    let single = "version = 1\n[model]\nfamily = \"poisson\"\nsites = 1\nactivity = 1.0\n";
    assert_close(&probabilities(single), &[0.5, 0.5]);
}

#[test]
fn oracle_tables_cover_correlations_and_conditionals() {
    let run = Run::new(
        "version = 1\n[model]\nfamily = \"gibbs\"\nsites = 3\nactivity = 1.0\npotential = [[0.0, inf, 0.0], [inf, 0.0, 0.0], [0.0, 0.0, 0.0]]\n",
    );
    assert_eq!(code(&run.exec("oracle", &[])), 0);
    let v = json(&run.out().join("oracle.json"));
    assert_eq!(v["probabilities"].as_array().unwrap().len(), 8);
    // 3 singletons, 3 pairs, 1 triple
    assert_eq!(v["correlations"].as_array().unwrap().len(), 7);
    let cond = v["papangelou"].as_array().unwrap();
    // pairs (x, ξ) with x ∉ ξ: 3 · 2^2
    assert_eq!(cond.len(), 12);
    let blocked = cond
        .iter()
        .find(|c| c["x"] == serde_json::json!([1]) && c["xi"] == serde_json::json!([0]))
        .unwrap();
    assert_eq!(blocked["value"], 0.0);
    let null = cond
        .iter()
        .find(|c| c["x"] == serde_json::json!([2]) && c["xi"] == serde_json::json!([0, 1]))
        .unwrap();
    assert!(null["value"].is_null());
}

#[test]
fn oracle_rejects_window_models() {
    let run = Run::new("version = 1\n[model]\nfamily = \"poisson\"\nwindow = [[0.0, 1.0]]\n");
    let o = run.exec("oracle", &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("unsupported"), "{}", stderr(&o));
}

#[test]
fn transform_law_with_a_shift_table() {
    let run = Run::new(
        r#"
version = 1
[model]
family = "determinantal"
sites = 3
kernel = [[0.5, 0.2, 0.1], [0.2, 0.4, 0.0], [0.1, 0.0, 0.3]]
[shift]
kind = "permutation"
map = [2, 0, 1]
[[checks]]
kind = "transform-law"
"#,
    );
    let o = run.exec("verify", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn shipped_configs_run_and_pass() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut names: Vec<PathBuf> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    assert!(!names.is_empty());
    for path in names {
        let run = Run::new(&fs::read_to_string(&path).unwrap());
        let o = run.exec("verify", &["--parallel", "2"]);
        assert_eq!(code(&o), 0, "{}: {}", path.display(), stderr(&o));
    }
}
