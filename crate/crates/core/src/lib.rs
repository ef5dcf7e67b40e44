//! Risk quantification for worst-case versus probabilistic robust controllers.
//!
//! The crate is organised bottom-up:
//!
//! * [`poly_stability`]: polynomial algebra, closed-loop characteristic
//!   polynomials, Routh–Hurwitz testing and the construction of a
//!   destabilizing plant coefficient for any robust controller.
//! * [`gaussian_quad`]: the error function and adaptive Gauss–Kronrod
//!   quadrature.
//! * [`case_study`]: closed forms for a first-order plant `q/(s - p)` with
//!   Gaussian parameters, controlled by either a lag compensator
//!   `K_A/(s + a)` or a static gain `K_B`.
//! * [`mc_engine`]: seeded, partitioned Monte Carlo estimators with exact
//!   binomial confidence intervals, plus the randomized-analysis sample bound.
//! * [`risk_model`]: risk of modeled vs. unmodeled uncertainty and the
//!   risk-ratio algebra.
//! * [`cli`]: the `riskcal` command-line front end and its report format.

pub mod case_study;
pub mod cli;
pub mod error;
pub mod gaussian_quad;
pub mod mc_engine;
pub mod poly_stability;
pub mod report;
pub mod risk_model;

pub use error::{Error, Result};
