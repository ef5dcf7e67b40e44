//! Command-line front end.
//!
//! Exit status: 0 on success, 2 on usage errors or parameters that violate
//! the model's assumptions, 3 on numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::case_study::{
    boundary_dataset, coverage_probability, instability_fraction, margins,
    prob_instability_a_detailed, prob_instability_b, stable_a, stable_b, stable_fraction,
    sufficient_condition, FirstOrderCase,
};
use crate::error::{Error, Result};
use crate::gaussian_quad::DEFAULT_TOL;
use crate::mc_engine::{
    estimate_probability, required_samples, uniform_box_fraction, McConfig, DEFAULT_CONFIDENCE,
    DEFAULT_PARTITIONS, DEFAULT_SEED,
};
use crate::poly_stability::{
    closed_loop_charpoly, destabilizing_value, with_plant_coefficient, CoefficientIndex,
    Polynomial, RationalTF,
};
use crate::report::{format_sig, Provenance, ReportValue, RunReport, ValueMap};
use crate::risk_model::{
    flat_degradation_ratio, ratio_below_one_certificate, risk_probabilistic, risk_ratio,
    risk_ratio_terms, risk_worstcase, RiskScenario,
};

pub const SEED_ENV: &str = "RISKCAL_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "riskcal",
    version,
    about = "Failure risk of worst-case vs. probabilistic robust controllers"
)]
pub struct Cli {
    /// Emit a single JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

/// Scenario parameters; defaults are the first table row.
#[derive(Debug, Clone, Args)]
pub struct CaseArgs {
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = 17.0, allow_negative_numbers = true)]
    pub r: f64,
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    pub p0: f64,
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    pub q0: f64,
    /// Standard deviation of p.
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub sp: f64,
    /// Standard deviation of q.
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub sq: f64,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    pub ka: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub kb: f64,
}

impl CaseArgs {
    fn case(&self) -> Result<FirstOrderCase> {
        let case = FirstOrderCase {
            a: self.a,
            k_a: self.ka,
            k_b: self.kb,
            p0: self.p0,
            q0: self.q0,
            sigma_p: self.sp,
            sigma_q: self.sq,
            r: self.r,
        };
        case.validate()?;
        Ok(case)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Controller {
    A,
    B,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reproduce both rows of the risk comparison table.
    Table1 {
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Deterministic stability margins rho_A, rho_B, rho_B*.
    Margins(CaseArgs),
    /// Gaussian coverage probability of the box B(r).
    Pbox(CaseArgs),
    /// Area fraction of B(r) stabilized by C_B.
    Pb(CaseArgs),
    /// Probability that C_A fails (polar quadrature).
    Pca {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Probability that C_B fails (closed form).
    Pcb(CaseArgs),
    /// Risk ratio P_CA / P_CB.
    Ratio {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Sufficient condition for P_CA > P_CB.
    Suffcond(CaseArgs),
    /// Monte Carlo estimate of a controller's failure probability.
    Mc {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, value_enum, ignore_case = true)]
        controller: Controller,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// Defaults to $RISKCAL_SEED, then to a fixed seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Sample uniformly over B(r) instead of the Gaussian law.
        #[arg(long)]
        uniform_box: bool,
        #[arg(long, default_value_t = DEFAULT_CONFIDENCE)]
        confidence: f64,
        #[arg(long, default_value_t = DEFAULT_PARTITIONS)]
        partitions: u32,
    },
    /// Write stability-boundary polylines as CSV (and optionally SVG).
    Boundary {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Include 1- and 2-sigma ellipses of the parameter law.
        #[arg(long)]
        ellipses: bool,
    },
    /// Find a plant coefficient value that destabilizes a robust loop.
    Destabilize {
        /// Plant numerator, descending powers, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        num: String,
        /// Plant denominator (monic).
        #[arg(long, allow_hyphen_values = true)]
        den: String,
        /// Controller numerator.
        #[arg(long, allow_hyphen_values = true)]
        cnum: String,
        /// Controller denominator (monic).
        #[arg(long, allow_hyphen_values = true)]
        cden: String,
        /// `den:τ` (1 ≤ τ ≤ κ) or `num:ι` (0 ≤ ι ≤ ℓ).
        #[arg(long)]
        coeff: String,
        #[arg(long)]
        slack: Option<f64>,
    },
    /// Samples needed to detect an eps-non-robust system with confidence 1 - delta.
    Samplesize {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Risk of probabilistic vs. worst-case design with unmodeled uncertainty.
    Riskratio {
        /// Pr{q in M}
        #[arg(long)]
        pm: f64,
        /// Pr{q in E}
        #[arg(long)]
        pe: f64,
        /// Pr{C_p fails | M}
        #[arg(long)]
        vpm: f64,
        /// Pr{C_p fails | E}
        #[arg(long)]
        vpe: f64,
        /// Pr{C_w fails | E}
        #[arg(long)]
        vwe: f64,
        #[arg(long)]
        lambda: Option<f64>,
    },
}

/// Runs the CLI with the process environment.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env_seed = std::env::var(SEED_ENV).ok();
    run_with_env(args, env_seed.as_deref(), out, err)
}

/// Runs the CLI with an explicit value for `$RISKCAL_SEED`.
pub fn run_with_env<I, T>(
    args: I,
    env_seed: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };

    let json = cli.json;
    match execute(cli.command, env_seed) {
        Ok(Output::Report(report, text)) => {
            let rendered = if json {
                report.to_json()
            } else {
                text.unwrap_or_else(|| report.to_text())
            };
            let _ = out.write_all(rendered.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            }
        }
    }
}

enum Output {
    /// Report plus an optional custom text rendering.
    Report(RunReport, Option<String>),
}

fn echo_case(report: &mut RunReport, case: &FirstOrderCase) {
    report
        .param("a", case.a)
        .param("r", case.r)
        .param("p0", case.p0)
        .param("q0", case.q0)
        .param("sigma_p", case.sigma_p)
        .param("sigma_q", case.sigma_q)
        .param("K_A", case.k_a)
        .param("K_B", case.k_b);
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("violated tol > 0 (tol = {tol})")))
    }
}

fn resolve_seed(flag: Option<u64>, env_seed: Option<&str>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match env_seed {
        Some(s) => s.trim().parse().map_err(|_| {
            Error::invalid(format!(
                "{SEED_ENV}=`{s}` is not an unsigned 64-bit integer"
            ))
        }),
        None => Ok(DEFAULT_SEED),
    }
}

fn parse_coeffs(flag: &str, s: &str) -> Result<Polynomial> {
    let coeffs: std::result::Result<Vec<f64>, _> =
        s.split(',').map(|c| c.trim().parse::<f64>()).collect();
    let coeffs = coeffs.map_err(|_| {
        Error::invalid(format!(
            "--{flag}: `{s}` is not a comma-separated list of numbers"
        ))
    })?;
    Polynomial::new(coeffs)
}

/// One row of the comparison table with full-precision values.
pub fn table_row(case: &FirstOrderCase, tol: f64) -> Result<ValueMap> {
    let p_ca = prob_instability_a_detailed(case, tol)?.value;
    let p_cb = prob_instability_b(case);
    let mut row = ValueMap::new();
    let mut put = |k: &str, v: f64| {
        row.insert(k.to_owned(), ReportValue::from(v));
    };
    put("a", case.a);
    put("r", case.r);
    put("p0", case.p0);
    put("q0", case.q0);
    put("sigma_p", case.sigma_p);
    put("sigma_q", case.sigma_q);
    put("K_A", case.k_a);
    put("K_B", case.k_b);
    put("P_box", coverage_probability(case));
    put("P_B_r", stable_fraction(case));
    put("P_CA", p_ca);
    put("P_CB", p_cb);
    put("ratio", p_ca / p_cb);
    Ok(row)
}

fn table_text(rows: &[ValueMap]) -> String {
    let f = |row: &ValueMap, k: &str| row[k].as_f64().unwrap_or(f64::NAN);
    let mut out = String::new();
    out.push_str(&format!(
        "{:>6} {:>6} {:>6} {:>6} {:>8} {:>8} {:>6} {:>5} {:>6} {:>7} {:>7} {:>7} {:>7}\n",
        "a",
        "r",
        "p0",
        "q0",
        "sigma_p",
        "sigma_q",
        "K_A",
        "K_B",
        "P_box",
        "P_B(r)",
        "P_CA",
        "P_CB",
        "ratio"
    ));
    for row in rows {
        out.push_str(&format!(
            "{:>6} {:>6} {:>6} {:>6} {:>8} {:>8} {:>6} {:>5} {:>6.2} {:>7.4} {:>7.1e} {:>7.1e} {:>7.1e}\n",
            format_sig(f(row, "a"), 6),
            format_sig(f(row, "r"), 6),
            format_sig(f(row, "p0"), 6),
            format_sig(f(row, "q0"), 6),
            format_sig(f(row, "sigma_p"), 6),
            format_sig(f(row, "sigma_q"), 6),
            format_sig(f(row, "K_A"), 6),
            format_sig(f(row, "K_B"), 6),
            f(row, "P_box"),
            f(row, "P_B_r"),
            f(row, "P_CA"),
            f(row, "P_CB"),
            f(row, "ratio"),
        ));
    }
    out
}

fn execute(command: Command, env_seed: Option<&str>) -> Result<Output> {
    use Provenance::*;
    let plain = |r: RunReport| Ok(Output::Report(r, None));

    match command {
        Command::Table1 { tol } => {
            check_tol(tol)?;
            let mut report = RunReport::new("table1", &[ClosedForm, Quadrature]);
            report.param("tol", tol);
            report.rows = [FirstOrderCase::ROW1, FirstOrderCase::ROW2]
                .iter()
                .map(|c| table_row(c, tol))
                .collect::<Result<_>>()?;
            let text = table_text(&report.rows);
            Ok(Output::Report(report, Some(text)))
        }
        Command::Margins(args) => {
            let case = args.case()?;
            let m = margins(&case);
            let mut report = RunReport::new("margins", &[ClosedForm]);
            echo_case(&mut report, &case);
            report
                .result("rho_A", m.rho_a)
                .result("rho_B", m.rho_b)
                .result("rho_B_star", m.rho_b_star)
                .result("B_may_fail_while_A_robust", m.b_may_fail_while_a_robust);
            plain(report)
        }
        Command::Pbox(args) => {
            let case = args.case()?;
            let mut report = RunReport::new("pbox", &[ClosedForm]);
            echo_case(&mut report, &case);
            report.result("P_box", coverage_probability(&case));
            plain(report)
        }
        Command::Pb(args) => {
            let case = args.case()?;
            let mut report = RunReport::new("pb", &[ClosedForm]);
            echo_case(&mut report, &case);
            report
                .result("P_B_r", stable_fraction(&case))
                .result("instability_fraction", instability_fraction(&case));
            plain(report)
        }
        Command::Pca { case, tol } => {
            let case = case.case()?;
            check_tol(tol)?;
            let mass = prob_instability_a_detailed(&case, tol)?;
            let mut report = RunReport::new("pca", &[Quadrature]);
            echo_case(&mut report, &case);
            report.param("tol", tol);
            report
                .result("P_CA", mass.value)
                .result("abs_error_estimate", mass.abs_error_estimate)
                .result("evaluations", mass.evaluations)
                .result("u", mass.aux.u)
                .result("v", mass.aux.v)
                .result("k", mass.aux.k)
                .result("w", mass.aux.w)
                .result("theta_star", mass.aux.theta_star);
            plain(report)
        }
        Command::Pcb(args) => {
            let case = args.case()?;
            let mut report = RunReport::new("pcb", &[ClosedForm]);
            echo_case(&mut report, &case);
            report.result("P_CB", prob_instability_b(&case));
            plain(report)
        }
        Command::Ratio { case, tol } => {
            let case = case.case()?;
            check_tol(tol)?;
            let p_ca = prob_instability_a_detailed(&case, tol)?.value;
            let p_cb = prob_instability_b(&case);
            let mut report = RunReport::new("ratio", &[Quadrature, ClosedForm]);
            echo_case(&mut report, &case);
            report.param("tol", tol);
            report
                .result("P_CA", p_ca)
                .result("P_CB", p_cb)
                .result("ratio", p_ca / p_cb);
            plain(report)
        }
        Command::Suffcond(args) => {
            let case = args.case()?;
            let s = sufficient_condition(&case)?;
            let mut report = RunReport::new("suffcond", &[ClosedForm]);
            echo_case(&mut report, &case);
            report
                .result("lhs", s.lhs)
                .result("rhs", s.rhs)
                .result("holds", s.holds);
            plain(report)
        }
        Command::Mc {
            case,
            controller,
            samples,
            seed,
            uniform_box,
            confidence,
            partitions,
        } => {
            let case = case.case()?;
            let seed = resolve_seed(seed, env_seed)?;
            let cfg = McConfig {
                samples,
                confidence,
                seed,
                partitions,
            };
            let est = match (controller, uniform_box) {
                (Controller::A, false) => {
                    estimate_probability(|p, q| !stable_a(p, q, &case), &case, &cfg)?
                }
                (Controller::B, false) => {
                    estimate_probability(|p, q| !stable_b(p, q, &case), &case, &cfg)?
                }
                (Controller::A, true) => {
                    uniform_box_fraction(|p, q| !stable_a(p, q, &case), &case, &cfg)?
                }
                (Controller::B, true) => {
                    uniform_box_fraction(|p, q| !stable_b(p, q, &case), &case, &cfg)?
                }
            };
            let mut report = RunReport::new("mc", &[MonteCarlo]);
            echo_case(&mut report, &case);
            report
                .param(
                    "controller",
                    if controller == Controller::A {
                        "A"
                    } else {
                        "B"
                    },
                )
                .param("samples", samples)
                .param("seed", seed)
                .param("uniform_box", uniform_box)
                .param("confidence", confidence)
                .param("partitions", partitions);
            report.seed = Some(seed);
            report.samples = Some(samples);
            report.partitions = Some(partitions);
            report
                .result("p_hat", est.p_hat)
                .result("ci_low", est.ci_low)
                .result("ci_high", est.ci_high)
                .result("failures", est.successes);
            // Reference value from the closed forms where one exists.
            let reference = match (controller, uniform_box) {
                (Controller::A, false) => {
                    Some(prob_instability_a_detailed(&case, DEFAULT_TOL)?.value)
                }
                (Controller::B, false) => Some(prob_instability_b(&case)),
                (Controller::B, true) => Some(instability_fraction(&case)),
                (Controller::A, true) => (case.r < margins(&case).rho_a).then_some(0.0),
            };
            if let Some(v) = reference {
                report
                    .result("reference", v)
                    .result("reference_in_ci", est.contains(v));
            }
            plain(report)
        }
        Command::Boundary {
            case,
            out,
            svg,
            points,
            ellipses,
        } => {
            let case = case.case()?;
            let data = boundary_dataset(&case, points, ellipses)?;
            let write = |path: &PathBuf, body: String| {
                std::fs::write(path, body)
                    .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
            };
            write(&out, data.to_csv())?;
            if let Some(svg_path) = &svg {
                write(svg_path, data.to_svg(800, 600))?;
            }
            let mut report = RunReport::new("boundary", &[ClosedForm]);
            echo_case(&mut report, &case);
            report
                .param("out", out.display().to_string())
                .param("points", points)
                .param("ellipses", ellipses);
            if let Some(svg_path) = &svg {
                report.param("svg", svg_path.display().to_string());
            }
            report.result("series", data.series.len()).result(
                "rows",
                data.series.iter().map(|s| s.points.len()).sum::<usize>(),
            );
            plain(report)
        }
        Command::Destabilize {
            num,
            den,
            cnum,
            cden,
            coeff,
            slack,
        } => {
            let plant = RationalTF::new(parse_coeffs("num", &num)?, parse_coeffs("den", &den)?)?;
            let controller =
                RationalTF::new(parse_coeffs("cnum", &cnum)?, parse_coeffs("cden", &cden)?)?;
            let which: CoefficientIndex = coeff.parse()?;
            let d = destabilizing_value(&controller, &plant, which, slack)?;
            let nominal_cp = closed_loop_charpoly(&controller, &plant);
            let perturbed = with_plant_coefficient(&plant, which, d.value)?;
            let perturbed_cp = closed_loop_charpoly(&controller, &perturbed);

            let mut report = RunReport::new("destabilize", &[ClosedForm]);
            report
                .param("num", num)
                .param("den", den)
                .param("cnum", cnum)
                .param("cden", cden)
                .param("coeff", which.to_string());
            if let Some(s) = slack {
                report.param("slack", s);
            }
            let offset_name = match which {
                CoefficientIndex::PlantDenominator(_) => "xi",
                CoefficientIndex::PlantNumerator(_) => "zeta",
            };
            report
                .result(offset_name, d.offset)
                .result("nominal", d.nominal)
                .result("value", d.value)
                .result("slack", d.slack)
                .result("distance_from_nominal", d.distance_from_nominal)
                .result("nominal_charpoly", nominal_cp.to_string())
                .result("perturbed_charpoly", perturbed_cp.to_string())
                .result("destabilized", d.verified);
            plain(report)
        }
        Command::Samplesize { eps, delta } => {
            let plan = required_samples(eps, delta)?;
            let mut report = RunReport::new("samplesize", &[ClosedForm]);
            report.param("eps", eps).param("delta", delta);
            report.result("n_required", plan.n_required);
            plain(report)
        }
        Command::Riskratio {
            pm,
            pe,
            vpm,
            vpe,
            vwe,
            lambda,
        } => {
            let s = RiskScenario::new(pm, pe, vpm, vpe, vwe)?;
            let mut report = RunReport::new("riskratio", &[ClosedForm]);
            report
                .param("pm", pm)
                .param("pe", pe)
                .param("vpm", vpm)
                .param("vpe", vpe)
                .param("vwe", vwe);
            report
                .result("P_e_p", risk_probabilistic(&s))
                .result("P_e_w", risk_worstcase(&s))
                .result("ratio", risk_ratio(&s));
            if let Some((outside, inside)) = risk_ratio_terms(&s) {
                report
                    .result("term_outside_model", outside)
                    .result("term_inside_model", inside);
            }
            if let Ok(flat) = flat_degradation_ratio(&s) {
                report.result("flat_degradation_ratio", flat);
            }
            if let Some(lambda) = lambda {
                report.param("lambda", lambda);
                report.result("certificate", ratio_below_one_certificate(&s, lambda)?);
            }
            plain(report)
        }
    }
}
