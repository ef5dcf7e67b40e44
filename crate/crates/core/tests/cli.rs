use std::process::{Command, Output};

use riskcal::report::RunReport;

fn riskcal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riskcal"))
        .args(args)
        .env_remove("RISKCAL_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> RunReport {
    let mut full = args.to_vec();
    full.push("--json");
    let o = riskcal(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    RunReport::from_json(&stdout(&o)).unwrap()
}

#[test]
fn table1_text_is_byte_stable() {
    let first = riskcal(&["table1"]);
    let second = riskcal(&["table1"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].contains(" 0.91 ") && rows[1].contains("0.9998") && rows[1].contains("2.3e-2"));
    assert!(rows[1].trim_end().ends_with("1.1e2"));
    assert!(rows[2].contains(" 0.99 ") && rows[2].contains("0.9956") && rows[2].contains("6.2e-3"));
    assert!(rows[2].trim_end().ends_with("2.2e4"));
}

#[test]
fn table1_json_uses_fixed_keys() {
    let report = json(&["table1"]);
    assert_eq!(report.rows.len(), 2);
    let keys: Vec<&str> = report.rows[0].keys().map(String::as_str).collect();
    let mut expected = vec![
        "a", "r", "p0", "q0", "sigma_p", "sigma_q", "K_A", "K_B", "P_box", "P_B_r", "P_CA", "P_CB",
        "ratio",
    ];
    expected.sort_unstable();
    assert_eq!(keys, expected);
    let pca = report.rows[0]["P_CA"].as_f64().unwrap();
    assert!((pca - 0.0227691718).abs() < 1e-8);
}

#[test]
fn margins_for_the_first_row() {
    let report = json(&[
        "margins", "--a", "10", "--r", "17", "--p0", "-10", "--q0", "20", "--sp", "10", "--sq",
        "5", "--ka", "30", "--kb", "2",
    ]);
    assert_eq!(report.results["rho_A"].as_f64(), Some(17.5));
    assert!((report.results["rho_B"].as_f64().unwrap() - 50.0 / 3.0).abs() < 1e-12);
    assert_eq!(report.results["rho_B_star"].as_f64(), Some(50.0));
}

#[test]
fn samplesize_reports_459() {
    let o = riskcal(&["samplesize", "--eps", "0.01", "--delta", "0.01"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("n_required = 459\n"));
}

#[test]
fn every_case_flag_is_echoed() {
    let report = json(&[
        "pbox", "--a", "12", "--r", "3", "--p0", "-4", "--q0", "6", "--sp", "2", "--sq", "1.5",
        "--ka", "60", "--kb", "3",
    ]);
    let expect = [
        ("a", 12.0),
        ("r", 3.0),
        ("p0", -4.0),
        ("q0", 6.0),
        ("sigma_p", 2.0),
        ("sigma_q", 1.5),
        ("K_A", 60.0),
        ("K_B", 3.0),
    ];
    for (k, v) in expect {
        assert_eq!(report.parameters[k].as_f64(), Some(v), "{k}");
    }
    assert_eq!(report.provenance.len(), 1);
}

#[test]
fn monte_carlo_replays_from_echoed_parameters() {
    let first = json(&[
        "mc",
        "--controller",
        "B",
        "--samples",
        "50000",
        "--seed",
        "42",
    ]);
    assert_eq!(first.seed, Some(42));
    assert_eq!(first.samples, Some(50000));
    let p = |k: &str| first.parameters[k].as_f64().unwrap().to_string();
    let seed = first.seed.unwrap().to_string();
    let samples = first.samples.unwrap().to_string();
    let partitions = first.partitions.unwrap().to_string();
    let (a, r, p0, q0, sp, sq, ka, kb) = (
        p("a"),
        p("r"),
        p("p0"),
        p("q0"),
        p("sigma_p"),
        p("sigma_q"),
        p("K_A"),
        p("K_B"),
    );
    let again = json(&[
        "mc",
        "--controller",
        "B",
        "--samples",
        &samples,
        "--seed",
        &seed,
        "--partitions",
        &partitions,
        "--a",
        &a,
        "--r",
        &r,
        "--p0",
        &p0,
        "--q0",
        &q0,
        "--sp",
        &sp,
        "--sq",
        &sq,
        "--ka",
        &ka,
        "--kb",
        &kb,
    ]);
    assert_eq!(first.results, again.results);
}

#[test]
fn seed_defaults_to_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_riskcal"))
        .args(["mc", "--controller", "a", "--samples", "1000", "--json"])
        .env("RISKCAL_SEED", "31337")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(RunReport::from_json(&stdout(&o)).unwrap().seed, Some(31337));
}

#[test]
fn invalid_parameters_exit_2_naming_the_inequality() {
    let o = riskcal(&["pcb", "--kb", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1 < K_B"));
    let o = riskcal(&["pcb", "--kb", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("K_B < K_A/a"));
    let o = riskcal(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let o = riskcal(&["margins", "--nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn quadrature_failure_exits_3() {
    let o = riskcal(&["pca", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn boundary_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let svg = dir.path().join("b.svg");
    let o = riskcal(&[
        "boundary",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
        "--points",
        "50",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let body = std::fs::read_to_string(&csv).unwrap();
    assert!(body.starts_with("series,q,p\n"));
    assert!(body
        .lines()
        .any(|l| l.starts_with("a_line,") && l.ends_with(",10")));
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn destabilize_reports_a_verified_value() {
    let report = json(&[
        "destabilize",
        "--num",
        "1",
        "--den",
        "1,3,2",
        "--cnum",
        "2,1",
        "--cden",
        "1,4",
        "--coeff",
        "den:2",
    ]);
    assert_eq!(report.results["destabilized"], true.into());
}

#[test]
fn riskratio_with_certificate() {
    let report = json(&[
        "riskratio",
        "--pm",
        "0.9",
        "--pe",
        "0.05",
        "--vpm",
        "0.001",
        "--vpe",
        "0.5",
        "--vwe",
        "1",
        "--lambda",
        "0.5",
    ]);
    assert!((report.results["ratio"].as_f64().unwrap() - 0.518).abs() < 1e-12);
    assert_eq!(report.results["certificate"], true.into());
    let report = json(&[
        "riskratio",
        "--pm",
        "0.9",
        "--pe",
        "0.05",
        "--vpm",
        "0.01",
        "--vpe",
        "0",
        "--vwe",
        "0",
    ]);
    assert_eq!(report.results["ratio"].as_f64(), Some(f64::INFINITY));
}

#[test]
fn help_goes_to_stdout() {
    let o = riskcal(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("table1"));
}
