use std::ffi::CStr;
use std::ptr;

use riskcal_ffi::*;

fn last_error() -> String {
    let p = riskcal_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn row(n: u32) -> *mut RiskcalCase {
    let mut case = ptr::null_mut();
    assert_eq!(
        unsafe { riskcal_case_table_row(n, &mut case) },
        RiskcalStatus::Ok
    );
    case
}

#[test]
fn table_rows_through_the_handle() {
    let case = row(1);
    let (mut pbox, mut pb, mut pca, mut pcb) = (0.0, 0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(
            riskcal_coverage_probability(case, &mut pbox),
            RiskcalStatus::Ok
        );
        assert_eq!(riskcal_stable_fraction(case, &mut pb), RiskcalStatus::Ok);
        assert_eq!(
            riskcal_prob_instability_a(case, 1e-9, &mut pca),
            RiskcalStatus::Ok
        );
        assert_eq!(
            riskcal_prob_instability_b(case, &mut pcb),
            RiskcalStatus::Ok
        );
        riskcal_case_free(case);
    }
    assert!((pbox - 0.9102552775861273).abs() < 1e-12);
    assert!((pb - 0.9997837370242214).abs() < 1e-12);
    assert!((pca - 0.0227691718408657).abs() < 1e-9);
    assert!((pcb - 2.0347600872e-4).abs() < 1e-12);
    assert!(riskcal_last_error_message().is_null());
}

#[test]
fn margins_and_sufficient_condition() {
    let mut case = ptr::null_mut();
    let mut m = RiskcalMargins::default();
    let mut s = RiskcalSufficientCondition::default();
    unsafe {
        assert_eq!(
            riskcal_case_new(10.0, 17.0, -10.0, 20.0, 10.0, 5.0, 30.0, 2.0, &mut case),
            RiskcalStatus::Ok
        );
        assert_eq!(riskcal_margins(case, &mut m), RiskcalStatus::Ok);
        assert_eq!(
            riskcal_sufficient_condition(case, &mut s),
            RiskcalStatus::Ok
        );
        riskcal_case_free(case);
    }
    assert_eq!(m.rho_a, 17.5);
    assert!((m.rho_b - 50.0 / 3.0).abs() < 1e-12);
    assert_eq!(m.rho_b_star, 50.0);
    assert!(m.b_may_fail_while_a_robust);
    assert!(s.holds && s.lhs == 2.0 && s.rhs == 6.25);
}

#[test]
fn invalid_case_is_rejected_with_message() {
    let mut case = ptr::null_mut();
    let status =
        unsafe { riskcal_case_new(10.0, 17.0, -10.0, 20.0, 10.0, 5.0, 30.0, 1.0, &mut case) };
    assert_eq!(status, RiskcalStatus::InvalidArgument);
    assert!(case.is_null());
    assert!(last_error().contains("1 < K_B"));
}

#[test]
fn null_pointers_are_reported() {
    let mut x = 0.0;
    unsafe {
        assert_eq!(
            riskcal_prob_instability_b(ptr::null(), &mut x),
            RiskcalStatus::NullPointer
        );
        assert_eq!(
            riskcal_erf(0.5, ptr::null_mut()),
            RiskcalStatus::NullPointer
        );
        assert_eq!(
            riskcal_case_table_row(1, ptr::null_mut()),
            RiskcalStatus::NullPointer
        );
        riskcal_case_free(ptr::null_mut());
    }
    assert!(last_error().contains("out"));
}

#[test]
fn quadrature_failure_maps_to_numerical_status() {
    let case = row(1);
    let mut x = f64::NAN;
    let status = unsafe { riskcal_prob_instability_a(case, 1e-300, &mut x) };
    unsafe { riskcal_case_free(case) };
    assert_eq!(status, RiskcalStatus::NumericalFailure);
    assert!(x.is_nan(), "output untouched on failure");
}

#[test]
fn monte_carlo_is_reproducible() {
    let case = row(1);
    let mut a = RiskcalEstimate::default();
    let mut b = RiskcalEstimate::default();
    unsafe {
        assert_eq!(
            riskcal_mc_estimate(case, 0, false, 100_000, 5, 0.999, 0, &mut a),
            RiskcalStatus::Ok
        );
        assert_eq!(
            riskcal_mc_estimate(case, 0, false, 100_000, 5, 0.999, 0, &mut b),
            RiskcalStatus::Ok
        );
        assert_eq!(
            riskcal_mc_estimate(case, 7, false, 10, 5, 0.999, 0, &mut b),
            RiskcalStatus::InvalidArgument
        );
        riskcal_case_free(case);
    }
    assert_eq!(a.successes, b.successes);
    assert!(a.ci_low <= 0.0227691718 && 0.0227691718 <= a.ci_high);
    assert_eq!((a.samples, a.seed), (100_000, 5));
}

#[test]
fn sample_size_and_risk_algebra() {
    let mut n = 0u64;
    let mut risk = RiskcalRisk::default();
    let mut cert = false;
    unsafe {
        assert_eq!(
            riskcal_required_samples(0.01, 0.01, &mut n),
            RiskcalStatus::Ok
        );
        assert_eq!(
            riskcal_risk(0.9, 0.05, 0.001, 0.5, 1.0, &mut risk),
            RiskcalStatus::Ok
        );
        assert_eq!(
            riskcal_ratio_certificate(0.9, 0.05, 0.001, 0.5, 1.0, 0.5, &mut cert),
            RiskcalStatus::Ok
        );
        assert_eq!(
            riskcal_risk(0.9, 0.5, 0.0, 0.0, 0.0, &mut risk),
            RiskcalStatus::InvalidArgument
        );
    }
    assert_eq!(n, 459);
    assert!(cert);
}

#[test]
fn polynomial_entry_points() {
    let stable = [1.0, 3.0, 3.0, 1.0];
    let unstable = [1.0, 0.0, 1.0];
    let (mut s, mut u) = (false, true);
    unsafe {
        assert_eq!(
            riskcal_is_hurwitz(stable.as_ptr(), stable.len(), &mut s),
            RiskcalStatus::Ok
        );
        assert_eq!(
            riskcal_is_hurwitz(unstable.as_ptr(), unstable.len(), &mut u),
            RiskcalStatus::Ok
        );
        assert_eq!(
            riskcal_is_hurwitz(ptr::null(), 3, &mut u),
            RiskcalStatus::NullPointer
        );
    }
    assert!(s && !u);

    // C = 30/(s + 10), G = 20/(s + 10): the numerator coefficient offset is 100.
    let (pn, pd, cn, cd) = ([20.0], [1.0, 10.0], [30.0], [1.0, 10.0]);
    let mut d = RiskcalDestabilization::default();
    let status = unsafe {
        riskcal_destabilize(
            pn.as_ptr(),
            1,
            pd.as_ptr(),
            2,
            cn.as_ptr(),
            1,
            cd.as_ptr(),
            2,
            1,
            0,
            0.1,
            &mut d,
        )
    };
    assert_eq!(status, RiskcalStatus::Ok);
    assert_eq!(d.offset, 100.0);
    assert!(d.verified);
    assert!((d.value - (-100.0 / 30.0 - 0.1)).abs() < 1e-12);

    let status = unsafe {
        riskcal_destabilize(
            pn.as_ptr(),
            1,
            pd.as_ptr(),
            2,
            cn.as_ptr(),
            1,
            cd.as_ptr(),
            2,
            0,
            5,
            0.0,
            &mut d,
        )
    };
    assert_eq!(status, RiskcalStatus::InvalidArgument);
}

#[test]
fn erf_and_version() {
    let mut y = 0.0;
    assert_eq!(unsafe { riskcal_erf(1.0, &mut y) }, RiskcalStatus::Ok);
    assert!((y - 0.8427007929497149).abs() < 1e-15);
    assert_eq!(
        unsafe { riskcal_erf(f64::NAN, &mut y) },
        RiskcalStatus::InvalidArgument
    );
    let v = unsafe { CStr::from_ptr(riskcal_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn generated_header_declares_the_api() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/riskcal.h")).unwrap();
    for needle in [
        "typedef struct RiskcalCase RiskcalCase;",
        "RISKCAL_STATUS_OK = 0",
        "RISKCAL_STATUS_NUMERICAL_FAILURE = 3",
        "RiskcalStatus riskcal_case_new(",
        "void riskcal_case_free(RiskcalCase *case_)",
        "RiskcalStatus riskcal_destabilize(",
        "const char *riskcal_last_error_message(void);",
    ] {
        assert!(header.contains(needle), "header lacks `{needle}`");
    }
}

// Compiles a C program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    use std::path::PathBuf;
    use std::process::Command;

    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let staticlib = profile_dir.join("libriskcal_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler on PATH");
        return;
    }
    // `cargo test` only builds the rlib; produce the static library too.
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let mut build = Command::new(cargo);
    build.args(["build", "--quiet", "--lib", "-p", "riskcal-ffi"]);
    if profile_dir.file_name().is_some_and(|n| n == "release") {
        build.arg("--release");
    }
    assert!(build.status().unwrap().success(), "cargo build failed");
    assert!(staticlib.exists(), "missing {}", staticlib.display());
    let out_dir = tempfile_dir();
    let exe = out_dir.join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&staticlib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "cc failed");
    let run = Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(
        run.status.success(),
        "smoke exited with {:?}: {stdout}",
        run.status.code()
    );
    assert!(stdout.contains("ratio 111.90"));
    assert!(stdout.contains("1 < K_B"));
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("riskcal-ffi-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
