use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nctori_core::curvature::reduced;
use nctori_core::report::{CheckRow, CurvatureRow, Report, TFuncRow};

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nctori-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn nctori(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nctori"))
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const QUICK_VERIFY: &str = "
[verify]
criteria = [1, 2, 4, 5]
[verify.samples]
dd_cases = 40
algebra_instances = 10
special_points = 5
";

#[test]
fn verify_is_reproducible_and_passes() {
    let cfg = scratch("quick.toml", QUICK_VERIFY);
    let a = nctori(&["verify", "--seed", "17", "--format", "csv"], &cfg);
    let b = nctori(&["verify", "--seed", "17", "--format", "csv"], &cfg);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let report = Report::<CheckRow>::from_csv(&stdout(&a)).unwrap();
    assert_eq!(report.seed, 17);
    let ids: Vec<u32> = report.rows.iter().map(|r| r.id).collect();
    assert_eq!(ids, vec![1, 1, 2, 4, 5]);
    assert!(report.rows.iter().all(|r| r.passed));
}

#[test]
fn csv_and_json_reports_carry_the_same_numbers() {
    let cfg = scratch("quick-json.toml", QUICK_VERIFY);
    let csv = Report::<CheckRow>::from_csv(&stdout(&nctori(&["verify", "--seed", "3", "--format", "csv"], &cfg))).unwrap();
    let json = Report::<CheckRow>::from_json(&stdout(&nctori(&["verify", "--seed", "3", "--format", "json"], &cfg))).unwrap();
    assert_eq!(csv, json);
}

#[test]
fn a_sign_flip_in_the_engine_fails_loudly() {
    let cfg = scratch(
        "fault.toml",
        "[verify]\ncriteria = [3]\nfault = \"flip_b21_sign\"\n[verify.samples]\nengine_points = 2\n",
    );
    let out = nctori(&["verify"], &cfg);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAILED criterion 3"));
    let report = Report::<CheckRow>::from_json(&stdout(&out)).unwrap();
    assert!(!report.rows[0].passed);
    assert!(report.rows[0].observed > 1.0);
}

#[test]
fn conformal_four_torus_table_matches_the_reduced_formulas() {
    let cfg = scratch(
        "conformal4.toml",
        "format = \"csv\"
[metric]
family = \"conformal\"
f = \"exp(t)\"
g = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]
[curvature]
engine = true
[curvature.grid]
lo = -0.5
hi = 0.4
n = 4
",
    );
    let out_path = cfg.with_file_name("conformal4.csv");
    let out = nctori(&["curvature", "--out", out_path.to_str().unwrap()], &cfg);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("# nctori-report v1 curvature seed=0\nquantity,t0,t1,t2,i,j,value,branch,method,delta\n"));
    let report = Report::<CurvatureRow>::from_csv(&text).unwrap();
    let mut checked = 0;
    for r in report.rows.iter().filter(|r| r.method == "closed_form") {
        let scale = (-r.t0).exp();
        let s1 = r.t1 - r.t0;
        let want = match (r.quantity.as_str(), r.t2) {
            ("K", None) if s1 != 0.0 => reduced::k4(s1),
            ("H", Some(t2)) if s1 != 0.0 && t2 != r.t1 && t2 != r.t0 => reduced::h4(s1, t2 - r.t1),
            _ => continue,
        };
        assert!((r.value / scale - want).abs() < 1e-10 * want.abs().max(1.0), "{r:?}");
        checked += 1;
    }
    assert!(checked > 20);
    for r in report.rows.iter().filter(|r| r.method == "engine") {
        assert!(r.delta.unwrap().abs() <= 1e-8 * r.value.abs().max(1.0), "{r:?}");
    }
}

#[test]
fn tfunc_reports_every_method() {
    let cfg = scratch(
        "tfunc.toml",
        "[metric]
family = \"conformal\"
f = \"exp(-2*t)\"
g = [[2.0, 0.3], [0.3, 1.0]]
[[tfunc.queries]]
n = []
alpha = [1, 1]
t = [0.1, 0.6]
[[tfunc.queries]]
n = [0, 1, 1, 1]
alpha = [2, 1, 1]
t = [0.1, 0.6, -0.3]
",
    );
    let out = nctori(&["tfunc"], &cfg);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = Report::<TFuncRow>::from_json(&stdout(&out)).unwrap();
    let methods: Vec<&str> = report.rows.iter().map(|r| r.method.as_str()).collect();
    assert_eq!(
        methods,
        vec!["quadrature", "conformal", "dim2_closed", "quadrature", "conformal", "quadrature_reversed_indices"]
    );
    for group in [&report.rows[..3], &report.rows[3..]] {
        for r in &group[1..] {
            assert!((r.value - group[0].value).abs() < 1e-9 * group[0].value.abs(), "{r:?}");
        }
    }
}

#[test]
fn bad_configuration_is_an_error() {
    let cfg = scratch("bad.toml", "[metric]\nfamily = \"conformal\"\nf = \"t\"\ng = [[1.0]]\n");
    let out = nctori(&["curvature"], &cfg);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
