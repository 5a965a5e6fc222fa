//! Ergodic (channel-averaged) capacities over the ordered Rayleigh pair.
//!
//! The OMA expectations have closed forms in the scaled exponential integral
//! `F(c) = e^c·E1(c)`:
//!
//! * `E[C1^O] = F(2/(beta·xi)) / ln 4`
//! * `E[S_O]  = F(1/(beta·xi)) / ln 2`
//! * `E[C2^O] = E[S_O] - E[C1^O]`
//!
//! The NOMA expectations at the fair-region endpoints reduce to one
//! semi-infinite integral each. Writing `s = sqrt(1 + xi·x)`, the E1
//! arguments collapse to `u1 = (1 + s)/(beta·xi)` and `u2 = u1 + x/beta`,
//! and folding each `E1` into its scaled form absorbs the exponential
//! prefactor exactly:
//!
//! * weak-user integrand: `(2/(beta·ln 2))·(e^{-x/beta}·F(u1) - e^{-2x/beta}·F(u2))`
//! * strong-user integrand: `(2/(beta·ln 2))·e^{-2x/beta}·F(u2)`
//!
//! so nothing overflows even at extreme SNR. The integrals are truncated at
//! `m·beta` and the discarded tail is bounded by an explicit majorant that is
//! added to the reported error bound.

use std::f64::consts::LN_2;
use std::fmt;

use crate::channel::SystemParams;
use crate::error::{Error, Result};
use crate::quad;
use crate::special::exp_scaled_e1;

const LN_4: f64 = 2.0 * LN_2;
const MAX_SUBDIVISIONS: u32 = 400;

/// How an ergodic value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl fmt::Display for EstimateMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimateMethod::ClosedForm => "closed-form",
            EstimateMethod::Quadrature => "quadrature",
            EstimateMethod::MonteCarlo => "monte-carlo",
        })
    }
}

/// An ergodic capacity in bits/s/Hz with an absolute error bound.
/// Closed-form values carry a zero bound by convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgodicEstimate {
    pub value: f64,
    pub method: EstimateMethod,
    pub error_bound: f64,
}

/// Tolerances and truncation for the semi-infinite quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    abs_tol: f64,
    rel_tol: f64,
    truncation_multiplier: f64,
}

impl QuadratureConfig {
    /// Requires positive tolerances and a truncation point of at least
    /// `30·beta`, where the integrand envelope has decayed below `e^{-30}`.
    pub fn new(abs_tol: f64, rel_tol: f64, truncation_multiplier: f64) -> Result<Self> {
        if !(abs_tol.is_finite() && abs_tol > 0.0) {
            return Err(Error::domain("abs_tol must be positive", abs_tol));
        }
        if !(rel_tol.is_finite() && rel_tol > 0.0) {
            return Err(Error::domain("rel_tol must be positive", rel_tol));
        }
        if !(truncation_multiplier.is_finite() && truncation_multiplier >= 30.0) {
            return Err(Error::domain(
                "truncation_multiplier must be >= 30",
                truncation_multiplier,
            ));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            truncation_multiplier,
        })
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn truncation_multiplier(&self) -> f64 {
        self.truncation_multiplier
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            truncation_multiplier: 60.0,
        }
    }
}

fn closed_form(value: f64) -> ErgodicEstimate {
    ErgodicEstimate {
        value,
        method: EstimateMethod::ClosedForm,
        error_bound: 0.0,
    }
}

/// Weak-user ergodic OMA capacity `F(2/(beta·xi)) / ln 4`.
pub fn ergodic_c1_oma(params: &SystemParams) -> Result<ErgodicEstimate> {
    let c = 2.0 / (params.beta() * params.xi());
    Ok(closed_form(exp_scaled_e1(c)? / LN_4))
}

/// Strong-user ergodic OMA capacity, as the sum formula minus the weak term.
pub fn ergodic_c2_oma(params: &SystemParams) -> Result<ErgodicEstimate> {
    let sum = ergodic_sum_oma(params)?.value;
    let weak = ergodic_c1_oma(params)?.value;
    Ok(closed_form(sum - weak))
}

/// Ergodic OMA sum capacity `F(1/(beta·xi)) / ln 2`.
pub fn ergodic_sum_oma(params: &SystemParams) -> Result<ErgodicEstimate> {
    let c = 1.0 / (params.beta() * params.xi());
    Ok(closed_form(exp_scaled_e1(c)? / LN_2))
}

/// Scaled E1 arguments of the endpoint integrands at abscissa `x`.
fn e1_arguments(params: &SystemParams, x: f64) -> (f64, f64) {
    let s = (1.0 + params.xi() * x).sqrt();
    let u1 = (1.0 + s) / (params.beta() * params.xi());
    (u1, u1 + x / params.beta())
}

/// Integrand of the weak-user correction term. Vanishes linearly at x = 0.
fn weak_correction_integrand(params: &SystemParams, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let beta = params.beta();
    let (u1, u2) = e1_arguments(params, x);
    let f1 = exp_scaled_e1(u1).unwrap_or(f64::NAN);
    let f2 = exp_scaled_e1(u2).unwrap_or(f64::NAN);
    2.0 / (beta * LN_2) * ((-x / beta).exp() * f1 - (-2.0 * x / beta).exp() * f2)
}

/// Integrand of the strong-user gain term. Finite and positive at x = 0.
fn strong_gain_integrand(params: &SystemParams, x: f64) -> f64 {
    let beta = params.beta();
    let (_, u2) = e1_arguments(params, x);
    let f2 = exp_scaled_e1(u2).unwrap_or(f64::NAN);
    2.0 / (beta * LN_2) * (-2.0 * x / beta).exp() * f2
}

/// Breakpoints for the adaptive scheme: the exponent factor in the raw form
/// changes sign at x = 3/xi, and a couple of scale points help early refining.
fn breakpoints(params: &SystemParams, upper: f64) -> Vec<f64> {
    let mut points = vec![
        0.0,
        3.0 / params.xi(),
        params.beta(),
        10.0 * params.beta(),
        upper,
    ];
    points.retain(|&x| x <= upper);
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

/// Weak-user ergodic NOMA capacity at the lower fair bound, by quadrature of
/// the single-integral reduction.
pub fn ergodic_c1_noma_at_a_inf(
    params: &SystemParams,
    config: &QuadratureConfig,
) -> Result<ErgodicEstimate> {
    let beta = params.beta();
    let closed = 3.0 * exp_scaled_e1(2.0 / (beta * params.xi()))? / LN_4;

    let upper = config.truncation_multiplier() * beta;
    let integral = quad::adaptive_gk21(
        &|x| weak_correction_integrand(params, x),
        &breakpoints(params, upper),
        config.abs_tol(),
        config.rel_tol(),
        MAX_SUBDIVISIONS,
        "weak-user endpoint correction",
    )?;

    // Tail majorant: the bracket is at most e^{-x/beta}·F(u1(x)), and F(u1)
    // only decreases with x, so the discarded mass is bounded by
    // (2/ln2)·F(u1(T))·e^{-T/beta}.
    let (u1_t, _) = e1_arguments(params, upper);
    let tail = 2.0 / LN_2 * exp_scaled_e1(u1_t)? * (-upper / beta).exp();

    Ok(ErgodicEstimate {
        value: closed - integral.value,
        method: EstimateMethod::Quadrature,
        error_bound: integral.error + tail,
    })
}

/// Strong-user ergodic NOMA capacity at the upper fair bound, by quadrature
/// of the single-integral reduction.
pub fn ergodic_c2_noma_at_a_sup(
    params: &SystemParams,
    config: &QuadratureConfig,
) -> Result<ErgodicEstimate> {
    let beta = params.beta();
    let closed = exp_scaled_e1(2.0 / (beta * params.xi()))? / LN_4;

    let upper = config.truncation_multiplier() * beta;
    let integral = quad::adaptive_gk21(
        &|x| strong_gain_integrand(params, x),
        &breakpoints(params, upper),
        config.abs_tol(),
        config.rel_tol(),
        MAX_SUBDIVISIONS,
        "strong-user endpoint gain",
    )?;

    // Tail majorant: (2/(beta·ln2))·F(u2(T))·∫_T^∞ e^{-2x/beta} dx.
    let (_, u2_t) = e1_arguments(params, upper);
    let tail = exp_scaled_e1(u2_t)? / LN_2 * (-2.0 * upper / beta).exp();

    Ok(ErgodicEstimate {
        value: closed + integral.value,
        method: EstimateMethod::Quadrature,
        error_bound: integral.error + tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(xi: f64) -> SystemParams {
        SystemParams::new(xi, 1.0).unwrap()
    }

    // 40-digit reference values for beta = 1 (E1 evaluated independently of
    // this crate): see the matching constants in the special-function tests.
    const C1_OMA_UNIT: f64 = 0.2606435018579534;
    const C2_OMA_UNIT: f64 = 0.5997038804129325;
    const SUM_OMA_UNIT: f64 = 0.860347382270886;

    #[test]
    fn closed_forms_at_unit_snr() {
        let p = params(1.0);
        assert_relative_eq!(
            ergodic_c1_oma(&p).unwrap().value,
            C1_OMA_UNIT,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            ergodic_c2_oma(&p).unwrap().value,
            C2_OMA_UNIT,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            ergodic_sum_oma(&p).unwrap().value,
            SUM_OMA_UNIT,
            max_relative = 1e-13
        );
        assert_eq!(
            ergodic_c1_oma(&p).unwrap().method,
            EstimateMethod::ClosedForm
        );
        assert_eq!(ergodic_c1_oma(&p).unwrap().error_bound, 0.0);
    }

    #[test]
    fn weak_user_vanishes_at_low_snr() {
        let v = ergodic_c1_oma(&params(1e-6)).unwrap().value;
        assert!(v > 0.0 && v < 1e-6, "got {v}");
    }

    #[test]
    fn weak_user_small_argument_expansion() {
        // At beta·xi = 1000, E1(2/1000) ≈ -gamma - ln(0.002).
        let v = ergodic_c1_oma(&params(1000.0)).unwrap().value;
        let expansion = (-0.5772156649015329 - 0.002f64.ln()) / LN_4;
        assert!((v - expansion).abs() < 1e-2, "{v} vs {expansion}");
    }

    #[test]
    fn strong_user_dominates() {
        for xi in [0.1, 1.0, 10.0, 1000.0] {
            let p = params(xi);
            assert!(ergodic_c2_oma(&p).unwrap().value > ergodic_c1_oma(&p).unwrap().value);
        }
    }

    #[test]
    fn sum_identity() {
        for xi in [0.3, 1.0, 10.0, 316.0] {
            let p = params(xi);
            let lhs = ergodic_c1_oma(&p).unwrap().value + ergodic_c2_oma(&p).unwrap().value;
            let rhs = ergodic_sum_oma(&p).unwrap().value;
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn endpoint_estimates_beat_oma() {
        let config = QuadratureConfig::default();
        for xi in [1.0, 10.0, 1000.0] {
            let p = params(xi);
            let weak = ergodic_c1_noma_at_a_inf(&p, &config).unwrap();
            let strong = ergodic_c2_noma_at_a_sup(&p, &config).unwrap();
            assert_eq!(weak.method, EstimateMethod::Quadrature);
            assert!(weak.value >= ergodic_c1_oma(&p).unwrap().value);
            assert!(strong.value >= ergodic_c2_oma(&p).unwrap().value);
            assert!(weak.error_bound < 1e-6 && strong.error_bound < 1e-6);
        }
    }

    #[test]
    fn endpoint_reference_values_at_ten_db() {
        // Independently computed with 25-digit quadrature of the reductions.
        let config = QuadratureConfig::default();
        let p = params(10.0);
        assert_relative_eq!(
            ergodic_c1_noma_at_a_inf(&p, &config).unwrap().value,
            1.2775800810393475,
            max_relative = 1e-7
        );
        assert_relative_eq!(
            ergodic_c2_noma_at_a_sup(&p, &config).unwrap().value,
            2.2551429813677144,
            max_relative = 1e-7
        );
    }

    #[test]
    fn endpoint_gaps_converge_at_high_snr() {
        // The two endpoint gains approach each other as xi grows.
        let config = QuadratureConfig::default();
        let p = params(10_000.0); // 40 dB
        let weak_gap = ergodic_c1_noma_at_a_inf(&p, &config).unwrap().value
            - ergodic_c1_oma(&p).unwrap().value;
        let strong_gap = ergodic_c2_noma_at_a_sup(&p, &config).unwrap().value
            - ergodic_c2_oma(&p).unwrap().value;
        assert!((weak_gap - strong_gap).abs() <= 0.10 * strong_gap.abs());
    }

    #[test]
    fn weak_integrand_endpoint_regularity() {
        // The integrand vanishes linearly at the origin: integrand(x)/x tends
        // to xi/(beta·ln 2). Evaluating through the stabilized square-root
        // form must keep that ratio accurate even at x = 1e-12.
        let p = params(10.0);
        let slope = p.xi() / (p.beta() * LN_2);
        for x in [1e-12, 1e-9] {
            let v = weak_correction_integrand(&p, x);
            assert!(v.is_finite());
            assert_relative_eq!(v / x, slope, max_relative = 0.1);
        }
        assert_eq!(weak_correction_integrand(&p, 0.0), 0.0);

        let at_origin = strong_gain_integrand(&p, 0.0);
        let expected = 2.0 / LN_2 * exp_scaled_e1(0.2).unwrap();
        assert_relative_eq!(at_origin, expected, max_relative = 1e-12);
    }

    #[test]
    fn truncation_is_sufficient() {
        // Doubling the truncation point must move results by less than the
        // default abs_tol; tight tolerances isolate the truncation effect
        // from quadrature noise.
        let p = params(10.0);
        let near = QuadratureConfig::new(1e-11, 1e-11, 40.0).unwrap();
        let far = QuadratureConfig::new(1e-11, 1e-11, 80.0).unwrap();
        let budget = QuadratureConfig::default().abs_tol();
        let dv_weak = (ergodic_c1_noma_at_a_inf(&p, &near).unwrap().value
            - ergodic_c1_noma_at_a_inf(&p, &far).unwrap().value)
            .abs();
        let dv_strong = (ergodic_c2_noma_at_a_sup(&p, &near).unwrap().value
            - ergodic_c2_noma_at_a_sup(&p, &far).unwrap().value)
            .abs();
        assert!(dv_weak < budget, "weak endpoint moved by {dv_weak}");
        assert!(dv_strong < budget, "strong endpoint moved by {dv_strong}");
    }

    #[test]
    fn finite_and_positive_across_parameter_box() {
        let config = QuadratureConfig::default();
        for log_xi in [-3.0, -1.0, 0.0, 2.0, 4.0, 6.0] {
            for beta in [0.1, 1.0, 10.0] {
                let p = SystemParams::new(10f64.powf(log_xi), beta).unwrap();
                let values = [
                    ergodic_c1_oma(&p).unwrap().value,
                    ergodic_c2_oma(&p).unwrap().value,
                    ergodic_sum_oma(&p).unwrap().value,
                    ergodic_c1_noma_at_a_inf(&p, &config).unwrap().value,
                    ergodic_c2_noma_at_a_sup(&p, &config).unwrap().value,
                ];
                for v in values {
                    assert!(v.is_finite() && v > 0.0, "xi=1e{log_xi}, beta={beta}: {v}");
                }
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::new(1e-8, 1e-8, 60.0).is_ok());
        assert!(QuadratureConfig::new(0.0, 1e-8, 60.0).is_err());
        assert!(QuadratureConfig::new(1e-8, -1.0, 60.0).is_err());
        assert!(QuadratureConfig::new(1e-8, 1e-8, 29.9).is_err());
    }

    #[test]
    fn impossible_tolerance_reports_budget_failure() {
        let p = params(10.0);
        let config = QuadratureConfig::new(1e-300, 1e-300, 60.0).unwrap();
        assert!(matches!(
            ergodic_c1_noma_at_a_inf(&p, &config),
            Err(Error::QuadratureBudget { .. })
        ));
    }
}
