//! Pricing a game against a riskless rate: invert the strictly decreasing
//! map u ↦ G_u(t_u) for the growth-rate price, and compute the
//! expectation-based price E/target for comparison.

use crate::error::{Error, Result};
use crate::growth::{growth_range_sup, optimal_proportion, Regime};
use crate::measure::{Effectiveness, Game};

/// How the riskless rate compounds over a period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Compounding {
    Simple,
    Continuous,
}

/// A solved price with the proportion and growth at that price.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PriceResult {
    pub price: f64,
    pub proportion: f64,
    pub regime: Regime,
    pub growth_at_price: f64,
    pub rate: f64,
    pub compounding: Compounding,
    pub target: f64,
    /// Final root bracket (degenerate for closed-form prices).
    pub bracket: (f64, f64),
}

/// One point of the pricing curve u ↦ (t_u, G_u(t_u)).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct GrowthCurvePoint {
    pub u: f64,
    pub t: f64,
    pub growth: f64,
}

/// Growth target implied by a rate: 1 + r for simple compounding, e^r for
/// continuous, e^{rT} when a horizon is supplied.
pub fn growth_target(rate: f64, compounding: Compounding, horizon: Option<f64>) -> Result<f64> {
    if !(rate > 0.0) {
        return Err(Error::Domain(format!("rate must be positive, got {rate}")));
    }
    match (compounding, horizon) {
        (Compounding::Simple, None) => Ok(1.0 + rate),
        (Compounding::Simple, Some(_)) => Err(Error::Domain(
            "a horizon requires continuous compounding".into(),
        )),
        (Compounding::Continuous, None) => Ok(rate.exp()),
        (Compounding::Continuous, Some(t)) if t > 0.0 => Ok((rate * t).exp()),
        (Compounding::Continuous, Some(t)) => {
            Err(Error::Domain(format!("horizon must be positive, got {t}")))
        }
    }
}

const PRICE_TOL: f64 = 1e-9;

/// Solve G_u(t_u) = target for the unique price u ∈ (0, E).
pub fn price(
    g: &Game,
    rate: f64,
    compounding: Compounding,
    horizon: Option<f64>,
) -> Result<PriceResult> {
    let target = growth_target(rate, compounding, horizon)?;
    if matches!(g.stats().effectiveness, Effectiveness::No) {
        return Err(Error::IneffectiveGame);
    }
    let stats = *g.stats();
    let xi = g.xi();

    if xi < 0.0 {
        let cap = growth_range_sup(g)?;
        if target >= cap {
            return Err(Error::TargetOutOfRange { target, cap });
        }
    }

    // Closed-form branches where the optimum has a known shape.
    if xi >= 0.0 && stats.h.is_finite() {
        let log_a = g.integrate(|a| a.ln())?;
        let boundary_growth = stats.h * log_a.exp();
        if target >= boundary_growth {
            // full-investment regime: G(u) = exp(∫ log a dF)/u
            let u = log_a.exp() / target;
            let r = optimal_proportion(g, u)?;
            return Ok(finish(r, rate, compounding, target, (u, u)));
        }
    }
    if xi < 0.0 && stats.xi_plus_inv_h_xi > 0.0 {
        let log_shift = g.integrate(|a| (a - xi).ln())?;
        let boundary_growth = stats.h_xi * log_shift.exp();
        if target >= boundary_growth {
            // leverage regime: G(u) = exp(∫ log(a-ξ) dF)/(u-ξ)
            let u = xi + log_shift.exp() / target;
            let r = optimal_proportion(g, u)?;
            return Ok(finish(r, rate, compounding, target, (u, u)));
        }
    }

    // Interior bisection on the strictly decreasing u ↦ G_u(t_u).
    let eval = |u: f64| -> Result<f64> { Ok(optimal_proportion(g, u)?.growth) };

    let mut hi;
    if stats.e.is_finite() {
        hi = stats.e;
    } else {
        // double upward from the full-investment edge until growth drops
        // below the target; G -> 1 along the interior regime
        hi = if stats.inv_h > 0.0 { stats.inv_h } else { 1.0 };
        let mut steps = 0;
        loop {
            hi *= 2.0;
            if eval(hi)? < target {
                break;
            }
            steps += 1;
            if steps > 200 {
                return Err(Error::Domain(
                    "could not bracket the price from above".into(),
                ));
            }
        }
    }
    let mut lo = {
        // largest closed-form boundary below the interior regime, if any
        let mut candidate = 0.0f64;
        if xi >= 0.0 && stats.inv_h > 0.0 {
            candidate = stats.inv_h;
        }
        if xi < 0.0 && stats.xi_plus_inv_h_xi > 0.0 {
            candidate = stats.xi_plus_inv_h_xi;
        }
        candidate
    };
    if lo == 0.0 {
        // shrink from above until the growth exceeds the target
        lo = hi / 2.0;
        let mut steps = 0;
        while eval(lo)? <= target {
            lo /= 2.0;
            steps += 1;
            if steps > 300 {
                return Err(Error::Domain(
                    "could not bracket the price from below".into(),
                ));
            }
        }
    }

    while hi - lo > PRICE_TOL * 1.0f64.max(0.5 * (hi + lo)) {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = 0.5 * (lo + hi);
    let r = optimal_proportion(g, u)?;
    Ok(finish(r, rate, compounding, target, (lo, hi)))
}

fn finish(
    r: crate::growth::ProportionResult,
    rate: f64,
    compounding: Compounding,
    target: f64,
    bracket: (f64, f64),
) -> PriceResult {
    PriceResult {
        price: r.u,
        proportion: r.t,
        regime: r.regime,
        growth_at_price: r.growth,
        rate,
        compounding,
        target,
        bracket,
    }
}

/// The expectation-based price E/target, with the optimal proportion and
/// growth at that price for comparison.
pub fn expectation_price(
    g: &Game,
    rate: f64,
    compounding: Compounding,
    horizon: Option<f64>,
) -> Result<PriceResult> {
    let target = growth_target(rate, compounding, horizon)?;
    let e = g.stats().e;
    if !e.is_finite() {
        return Err(Error::InfiniteExpectation);
    }
    let u = e / target;
    let r = optimal_proportion(g, u)?;
    Ok(finish(r, rate, compounding, target, (u, u)))
}

/// Evaluate the pricing curve on a grid of prices.
pub fn pricing_curve(g: &Game, grid: &[f64]) -> Result<Vec<GrowthCurvePoint>> {
    grid.iter()
        .map(|&u| {
            let r = optimal_proportion(g, u)?;
            Ok(GrowthCurvePoint {
                u,
                t: r.t,
                growth: r.growth,
            })
        })
        .collect()
}
