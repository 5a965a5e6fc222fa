//! The `validate` command: cross-method agreement checks at beta = 1 and a
//! transmit SNR of 10 dB.
//!
//! Every analytic route is compared against an estimator that shares none of
//! its machinery: E1 against direct adaptive Simpson integration of its
//! defining integral, closed forms and endpoint quadratures against seeded
//! Monte Carlo, and the per-pair boundary identities against the closed
//! forms they must reproduce in expectation.

use std::io::Write;

use serde::Serialize;

use fairnoma_core::channel::SystemParams;
use fairnoma_core::ergodic::{
    ergodic_c1_noma_at_a_inf, ergodic_c1_oma, ergodic_c2_noma_at_a_sup, ergodic_c2_oma,
    ergodic_sum_oma, QuadratureConfig,
};
use fairnoma_core::special::exp_integral_e1;
use fairnoma_core::{mc, AllocationPolicy, Quantity};

use crate::error::CliError;
use crate::rows::OutputFormat;

/// One agreement check: an estimate against a reference, with the tolerance
/// that was enforced and the standard error where the estimate is stochastic.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub reference: f64,
    pub estimate: f64,
    pub delta: f64,
    pub tolerance: f64,
    pub std_error: Option<f64>,
    pub pass: bool,
}

pub fn agreement_check(
    name: impl Into<String>,
    reference: f64,
    estimate: f64,
    tolerance: f64,
    std_error: Option<f64>,
) -> Check {
    let delta = (estimate - reference).abs();
    Check {
        name: name.into(),
        reference,
        estimate,
        delta,
        tolerance,
        std_error,
        pass: delta <= tolerance,
    }
}

/// Adaptive Simpson integration, used here as an E1 oracle that shares no
/// code with the library's Gauss-Kronrod path.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, m: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        m: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let left = simpson(f, a, lm, m);
        let right = simpson(f, m, rm, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, lm, m, left, 0.5 * tol, depth - 1)
                + recurse(f, m, rm, b, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    recurse(f, a, m, b, simpson(f, a, m, b), tol, depth)
}

/// Run the full agreement suite. `samples` controls every Monte Carlo leg.
pub fn run_checks(samples: u64, seed: u64) -> Result<Vec<Check>, CliError> {
    let params = SystemParams::from_snr_db(10.0, 1.0)?;
    let config = QuadratureConfig::default();
    let mut checks = Vec::new();

    // E1 against its defining integral; the tail beyond x + 60 is below
    // e^{-60}/60 of the remaining mass and invisible at this tolerance.
    for x in [0.5, 1.0, 2.0, 5.0] {
        let direct = adaptive_simpson(&|u: f64| (-u).exp() / u, x, x + 60.0, 1e-14, 40);
        let e1 = exp_integral_e1(x)?;
        checks.push(agreement_check(
            format!("e1_defining_integral_x{x}"),
            direct,
            e1,
            1e-10 * direct,
            None,
        ));
    }

    // Closed forms against Monte Carlo, at three standard errors.
    let closed = [
        ("c1_oma", ergodic_c1_oma(&params)?.value, Quantity::C1Oma),
        ("c2_oma", ergodic_c2_oma(&params)?.value, Quantity::C2Oma),
        ("sum_oma", ergodic_sum_oma(&params)?.value, Quantity::SumOma),
    ];
    for (name, reference, quantity) in closed {
        let r = mc::estimate(&params, AllocationPolicy::Midpoint, quantity, samples, seed);
        checks.push(agreement_check(
            format!("closed_vs_mc_{name}"),
            reference,
            r.mean,
            3.0 * r.std_error,
            Some(r.std_error),
        ));
    }

    // Endpoint quadratures against Monte Carlo.
    let weak = ergodic_c1_noma_at_a_inf(&params, &config)?;
    let r = mc::estimate(
        &params,
        AllocationPolicy::AtInf,
        Quantity::C1Noma,
        samples,
        seed,
    );
    checks.push(agreement_check(
        "quadrature_vs_mc_c1_noma_at_inf",
        weak.value,
        r.mean,
        (3.0 * r.std_error).max(2e-3),
        Some(r.std_error),
    ));
    let strong = ergodic_c2_noma_at_a_sup(&params, &config)?;
    let r = mc::estimate(
        &params,
        AllocationPolicy::AtSup,
        Quantity::C2Noma,
        samples,
        seed,
    );
    checks.push(agreement_check(
        "quadrature_vs_mc_c2_noma_at_sup",
        strong.value,
        r.mean,
        (3.0 * r.std_error).max(2e-3),
        Some(r.std_error),
    ));

    // Boundary consistency: at a_sup the weak user's NOMA capacity equals
    // its OMA capacity pair by pair, so the Monte Carlo mean must land on
    // the closed form; same for the strong user at a_inf.
    let r = mc::estimate(
        &params,
        AllocationPolicy::AtSup,
        Quantity::C1Noma,
        samples,
        seed,
    );
    checks.push(agreement_check(
        "boundary_mc_c1_noma_at_sup_vs_closed_c1_oma",
        ergodic_c1_oma(&params)?.value,
        r.mean,
        3.0 * r.std_error,
        Some(r.std_error),
    ));
    let r = mc::estimate(
        &params,
        AllocationPolicy::AtInf,
        Quantity::C2Noma,
        samples,
        seed,
    );
    checks.push(agreement_check(
        "boundary_mc_c2_noma_at_inf_vs_closed_c2_oma",
        ergodic_c2_oma(&params)?.value,
        r.mean,
        3.0 * r.std_error,
        Some(r.std_error),
    ));

    // Algebraic identity among the three closed forms.
    let sum = ergodic_sum_oma(&params)?.value;
    let parts = ergodic_c1_oma(&params)?.value + ergodic_c2_oma(&params)?.value;
    checks.push(agreement_check(
        "closed_form_sum_identity",
        sum,
        parts,
        1e-12 * sum,
        None,
    ));

    Ok(checks)
}

/// Render the report; returns whether every check passed.
pub fn write_report(
    out: &mut dyn Write,
    checks: &[Check],
    format: OutputFormat,
) -> Result<bool, CliError> {
    let all_pass = checks.iter().all(|c| c.pass);
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, checks)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            writeln!(
                out,
                "{:<44} {:>14} {:>14} {:>10} {:>10} {:>10}  result",
                "check", "reference", "estimate", "delta", "tol", "std_err"
            )?;
            for c in checks {
                writeln!(
                    out,
                    "{:<44} {:>14.8} {:>14.8} {:>10.2e} {:>10.2e} {:>10}  {}",
                    c.name,
                    c.reference,
                    c.estimate,
                    c.delta,
                    c.tolerance,
                    c.std_error
                        .map_or_else(|| "-".to_string(), |s| format!("{s:.2e}")),
                    if c.pass { "PASS" } else { "FAIL" }
                )?;
            }
            writeln!(
                out,
                "{} of {} checks passed",
                checks.iter().filter(|c| c.pass).count(),
                checks.len()
            )?;
        }
    }
    out.flush()?;
    Ok(all_pass)
}
