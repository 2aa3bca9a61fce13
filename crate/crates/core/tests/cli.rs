use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_diracbound"));
    cmd.env_remove("DIRACBOUND_CONFIG");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

struct Csv {
    metadata: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn parse(text: &str) -> Csv {
        let metadata = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .map(|l| {
                let (k, v) = l[2..].split_once(": ").unwrap();
                (k.to_string(), v.to_string())
            })
            .collect();
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let header = r.headers().unwrap().iter().map(String::from).collect();
        let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
        Csv { metadata, header, rows }
    }

    fn meta(&self, key: &str) -> &str {
        &self.metadata.iter().find(|(k, _)| k == key).unwrap().1
    }

    fn column(&self, name: &str) -> Vec<f64> {
        let i = self.header.iter().position(|h| h == name).unwrap();
        self.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }
}

fn same_number(csv: &str, json: &Value) -> bool {
    match json {
        Value::Null => csv.is_empty() || csv == "NaN",
        Value::Number(n) => {
            let (a, b) = (csv.parse::<f64>().unwrap(), n.as_f64().unwrap());
            a == b || (a - b).abs() <= 1e-14 * b.abs()
        }
        Value::String(s) => s == csv,
        Value::Bool(b) => b.to_string() == csv,
        _ => false,
    }
}

fn assert_equivalent(args: &[&str]) {
    let mut a = args.to_vec();
    a.extend(["--format", "csv"]);
    let csv = Csv::parse(&stdout(&run(&a)));
    let mut j = args.to_vec();
    j.extend(["--format", "json"]);
    let json: Value = serde_json::from_str(&stdout(&run(&j))).unwrap();
    let cols: Vec<&str> = json["columns"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(cols, csv.header);
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), csv.rows.len());
    for (jr, cr) in rows.iter().zip(&csv.rows) {
        for (jv, cv) in jr.as_array().unwrap().iter().zip(cr) {
            assert!(same_number(cv, jv), "{cv} vs {jv}");
        }
    }
    let meta = json["metadata"].as_object().unwrap();
    assert_eq!(meta.len(), csv.metadata.len());
    for (k, v) in &csv.metadata {
        assert!(same_number(v, &meta[k]), "{k}: {v} vs {}", meta[k]);
    }
}

#[test]
fn spectrum_all_models() {
    let o = run(&["spectrum", "--model", "all", "--z", "1", "--max-n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let t = Csv::parse(&stdout(&o));
    let models: Vec<&str> = t.rows.iter().map(|r| r[0].as_str()).collect();
    for m in ["bohr", "dirac", "exact"] {
        assert!(models.contains(&m));
    }
    assert_eq!(t.rows.len(), 15);
    assert_eq!(t.meta("version"), env!("CARGO_PKG_VERSION"));
    for key in ["alpha", "rest_energy_ev", "hbar_c_ev_nm", "delta", "tolerance_normalization"] {
        assert!(t.metadata.iter().any(|(k, _)| k == key), "{key}");
    }
    let eps = t.column("epsilon_re");
    let ev = t.column("binding_ev_re");
    assert!(eps.iter().all(|e| *e > 0.0 && *e < 1.0));
    assert!((ev[0] - 13.606).abs() < 1e-3);
}

#[test]
fn spectrum_virtual_rows() {
    let o = run(&["spectrum", "--model", "dirac", "--z", "150", "--max-n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let t = Csv::parse(&stdout(&o));
    for r in &t.rows {
        let k: i32 = r[2].parse().unwrap();
        let want = if k.abs() == 1 { "virtual" } else { "real_bound" };
        assert_eq!(r[5], want);
    }
    assert!(t.column("epsilon_im").iter().any(|v| *v != 0.0));
}

#[test]
fn invalid_arguments_exit_2() {
    for args in [
        vec!["spectrum", "--z", "0"],
        vec!["spectrum", "--model", "schrodinger"],
        vec!["spectrum", "--delta", "-1"],
        vec!["wavefunction", "--k", "0"],
        vec!["wavefunction", "--grid", "0:1:1:linear"],
        vec!["wavefunction", "--model", "dirac", "--grid", "0:1:5:linear"],
        vec!["wavefunction", "--model", "exact", "--nr", "0"],
        vec!["verify", "--nr-range", "3:1"],
        vec!["verify", "--suite", "nonsense"],
        vec!["--config", "/nonexistent/diracbound.toml", "spectrum"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn computation_failure_exit_1() {
    // the point-nucleus K < 0, n_r = 0 series does not terminate
    let o = run(&["wavefunction", "--model", "dirac", "--k", "-1", "--nr", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn exact_profile_starts_finite() {
    let o = run(&["wavefunction", "--model", "exact", "--z", "1", "--k", "1", "--nr", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let t = Csv::parse(&stdout(&o));
    assert_eq!(t.header[0], "xi");
    assert_eq!(t.column("xi")[0], 0.0);
    let rho = t.column("density");
    assert!(rho[0].is_finite() && rho[0] > 0.0);
}

#[test]
fn dirac_density_grows_toward_origin() {
    let o = run(&["wavefunction", "--model", "dirac", "--z", "1", "--k", "1", "--nr", "0", "--grid", "1e-8:1e-2:50:log"]);
    assert_eq!(o.status.code(), Some(0));
    let t = Csv::parse(&stdout(&o));
    let rho = t.column("density");
    assert!(rho.windows(2).all(|w| w[0] > w[1]));
}

#[test]
fn normalized_integral_in_metadata() {
    for model in ["dirac", "exact"] {
        let o = run(&["wavefunction", "--model", model, "--normalize"]);
        assert_eq!(o.status.code(), Some(0));
        let t = Csv::parse(&stdout(&o));
        let integral: f64 = t.meta("norm_integral").parse().unwrap();
        assert!((integral - 1.0).abs() <= 1e-10);
        assert_eq!(t.meta("normalized"), "true");
    }
}

#[test]
fn csv_and_json_agree() {
    assert_equivalent(&["spectrum", "--z", "1", "--max-n", "3"]);
    assert_equivalent(&["spectrum", "--model", "dirac", "--z", "150", "--max-n", "2"]);
    assert_equivalent(&["wavefunction", "--model", "exact", "--nr", "2", "--normalize"]);
    assert_equivalent(&["verify", "--suite", "all", "--z", "1"]);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<_> = (0..2).map(|i| dir.path().join(format!("run{i}.json"))).collect();
    for f in &files {
        let o = run(&["wavefunction", "--model", "exact", "--nr", "3", "--normalize", "--format", "json", "--out", f.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
    }
    let a = std::fs::read(&files[0]).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(&files[1]).unwrap());
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "alpha = 0.007\ndelta = 1e-4\nformat = \"json\"\n");
    let o = run(&["--config", &path, "spectrum", "--model", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["metadata"]["alpha"].as_f64(), Some(0.007));
    assert_eq!(v["metadata"]["delta"].as_f64(), Some(1e-4));

    let o = bin().env("DIRACBOUND_CONFIG", &path).args(["spectrum", "--format", "csv", "--delta", "2e-5"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let t = Csv::parse(&stdout(&o));
    assert_eq!(t.meta("alpha").parse::<f64>().unwrap(), 0.007);
    assert_eq!(t.meta("delta").parse::<f64>().unwrap(), 2e-5);

    let bad = write_config(dir.path(), "alpha = \"fine\"\n");
    assert_eq!(run(&["--config", &bad, "spectrum"]).status.code(), Some(2));
}

#[test]
fn verify_quantization_passes() {
    let o = run(&["verify", "--suite", "quantization", "--z", "1", "--nr-range", "1:10"]);
    assert_eq!(o.status.code(), Some(0));
    let t = Csv::parse(&stdout(&o));
    assert_eq!(t.rows.len(), 20);
    assert!(t.rows.iter().all(|r| r[5] == "pass"));
}

#[test]
fn verify_ladder_findings_do_not_fail() {
    let o = run(&["verify", "--suite", "ladder", "--z", "1", "--nr-range", "1:3"]);
    assert_eq!(o.status.code(), Some(0));
    let t = Csv::parse(&stdout(&o));
    assert!(t.rows.iter().any(|r| r[1] == "nullity" && r[5] == "finding"));
    // some of the findings are negative outcomes
    assert!(t.rows.iter().any(|r| r[5] == "finding" && r[8] == "strict minimum: false"));
}

#[test]
fn verify_divergence_reports_threshold() {
    let o = run(&["verify", "--suite", "divergence", "--z", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let t = Csv::parse(&stdout(&o));
    let onset = t.rows.iter().find(|r| r[1] == "virtual_onset").unwrap();
    assert_eq!(onset[6].parse::<f64>().unwrap(), 137.0);
    let exponent = t.rows.iter().find(|r| r[1] == "density_exponent" && r[3] == "1").unwrap();
    let alpha = diracbound::PhysicalConstants::default().alpha;
    let expected = 2.0 * ((1.0 - alpha * alpha).sqrt() - 1.0);
    assert!((exponent[6].parse::<f64>().unwrap() - expected).abs() <= 1e-15);
}

#[test]
fn verify_failure_exit_3() {
    // the expansion fit is a small-coupling statement and fails at Z = 150
    let o = run(&["verify", "--suite", "expansion", "--z", "150"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains(",fail,"));
}
