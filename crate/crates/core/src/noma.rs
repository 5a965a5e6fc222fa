//! Instantaneous capacities and the fair power-allocation region for a
//! two-user downlink with superposition coding and SIC.
//!
//! With ordered gains `g_weak ≤ g_strong`, transmit SNR `xi` and fraction `a`
//! of power given to the strong user:
//!
//! * OMA gives each user half the resource at full power:
//!   `C^O = (1/2)·log2(1 + xi·g)`.
//! * NOMA superposes both signals; the strong user cancels the weak user's
//!   signal first: `C1^N(a) = log2(1 + (1-a)·xi·g_weak/(a·xi·g_weak + 1))`,
//!   `C2^N(a) = log2(1 + a·xi·g_strong)`.
//!
//! Requiring each user to do at least as well as OMA pins `a` to the interval
//! `[a(g_strong), a(g_weak)]` where `a(x) = (sqrt(1 + xi·x) - 1)/(xi·x)`.
//! That quotient cancels catastrophically for small `xi·x`, so it is
//! evaluated everywhere in the rationalized form `1/(1 + sqrt(1 + xi·x))`,
//! which is algebraically identical.

use crate::channel::{ChannelPair, SystemParams};
use crate::error::{Error, Result};

/// Fraction of transmit power allocated to the strong user, in (0, 1).
///
/// Fair allocations live in (0, 1/2); the type deliberately admits the whole
/// open unit interval so unfair allocations can still be evaluated in sweeps.
/// Fair-region membership is a predicate, not a type constraint.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PowerAllocation(f64);

impl PowerAllocation {
    pub fn new(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && a < 1.0) {
            return Err(Error::domain("allocation must lie in (0, 1)", a));
        }
        Ok(Self(a))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// The closed interval of power allocations under which both users meet or
/// beat their OMA capacity. Collapses to a point for equal gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FairRegion {
    a_inf: f64,
    a_sup: f64,
}

impl FairRegion {
    pub fn a_inf(&self) -> f64 {
        self.a_inf
    }

    pub fn a_sup(&self) -> f64 {
        self.a_sup
    }

    pub fn contains(&self, a: f64) -> bool {
        self.a_inf <= a && a <= self.a_sup
    }

    pub fn midpoint(&self) -> PowerAllocation {
        PowerAllocation(0.5 * (self.a_inf + self.a_sup))
    }

    pub fn is_degenerate(&self) -> bool {
        self.a_inf == self.a_sup
    }
}

/// Per-user and sum capacities for both access schemes at one allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityReport {
    pub c1_oma: f64,
    pub c2_oma: f64,
    pub c1_noma: f64,
    pub c2_noma: f64,
    pub sum_oma: f64,
    pub sum_noma: f64,
    pub a_used: PowerAllocation,
}

/// `log2(1 + y)` via the natural log, with sub-1e-300 results clamped to 0.
fn log2_1p(y: f64) -> f64 {
    let c = y.ln_1p() / std::f64::consts::LN_2;
    if c < 1e-300 {
        0.0
    } else {
        c
    }
}

/// The allocation-bound function `a(x) = (sqrt(1 + xi·x) - 1)/(xi·x)`,
/// evaluated as `1/(1 + sqrt(1 + xi·x))`.
///
/// Strictly decreasing in the gain, with range (0, 1/2).
pub fn allocation_bound(xi: f64, gain: f64) -> Result<f64> {
    if !(xi.is_finite() && xi > 0.0) {
        return Err(Error::domain("xi must be positive and finite", xi));
    }
    if !(gain.is_finite() && gain > 0.0) {
        return Err(Error::domain("gain must be positive and finite", gain));
    }
    let product = xi * gain;
    if !product.is_finite() {
        return Err(Error::domain("xi * gain overflows", product));
    }
    Ok(1.0 / (1.0 + (1.0 + product).sqrt()))
}

/// Fair region for one channel pair: the strong user's bound is the lower
/// endpoint, the weak user's the upper.
pub fn fair_region(params: &SystemParams, pair: &ChannelPair) -> Result<FairRegion> {
    let a_inf = allocation_bound(params.xi(), pair.g_strong())?;
    let a_sup = allocation_bound(params.xi(), pair.g_weak())?;
    Ok(FairRegion { a_inf, a_sup })
}

/// Half-resource capacity `(1/2)·log2(1 + xi·g)` of one user under OMA.
pub fn oma_capacity(params: &SystemParams, gain: f64) -> Result<f64> {
    if !gain.is_finite() || gain < 0.0 {
        return Err(Error::domain("gain must be non-negative and finite", gain));
    }
    Ok(0.5 * log2_1p(params.xi() * gain))
}

/// NOMA capacities `(c1, c2)` of the weak and strong user at allocation `a`.
/// The strong user is assumed to cancel the weak user's signal, which the
/// gain ordering always permits.
pub fn noma_capacities(
    params: &SystemParams,
    pair: &ChannelPair,
    a: PowerAllocation,
) -> (f64, f64) {
    let a = a.value();
    let xi = params.xi();
    let weak_signal = (1.0 - a) * xi * pair.g_weak();
    let weak_interference = a * xi * pair.g_weak();
    let c1 = log2_1p(weak_signal / (weak_interference + 1.0));
    let c2 = log2_1p(a * xi * pair.g_strong());
    (c1, c2)
}

/// Slack in the SIC decodability condition: the strong user's SINR for the
/// weak user's signal minus the weak user's own SINR for it. Non-negative,
/// zero only for equal gains or in the no-power limit.
pub fn sic_margin(params: &SystemParams, pair: &ChannelPair, a: PowerAllocation) -> f64 {
    let a = a.value();
    let xi = params.xi();
    let sinr = |g: f64| a * xi * g / ((1.0 - a) * xi * g + 1.0);
    sinr(pair.g_strong()) - sinr(pair.g_weak())
}

/// All six capacities at one allocation.
pub fn capacity_report(
    params: &SystemParams,
    pair: &ChannelPair,
    a: PowerAllocation,
) -> Result<CapacityReport> {
    let c1_oma = oma_capacity(params, pair.g_weak())?;
    let c2_oma = oma_capacity(params, pair.g_strong())?;
    let (c1_noma, c2_noma) = noma_capacities(params, pair, a);
    Ok(CapacityReport {
        c1_oma,
        c2_oma,
        c1_noma,
        c2_noma,
        sum_oma: c1_oma + c2_oma,
        sum_noma: c1_noma + c2_noma,
        a_used: a,
    })
}
