//! Builders for the lognormal stock game and the European put game, the
//! closed-form put expectation, and the Black–Scholes put formula used for
//! comparison against growth-rate prices.

use crate::error::{Error, Result};
use crate::measure::{Game, Measure, Profit};
use crate::quad::QuadratureConfig;

/// Market parameters for the option games.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct MarketParams {
    /// Current stock price.
    pub spot: f64,
    /// Exercise price.
    pub strike: f64,
    /// Exercise period in years.
    pub horizon: f64,
    /// Volatility per sqrt-year.
    pub sigma: f64,
    /// Continuously compounded rate per year.
    pub rate: f64,
}

impl MarketParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.spot > 0.0 && self.strike > 0.0 && self.horizon > 0.0 && self.sigma > 0.0) {
            return Err(Error::Domain(
                "spot, strike, horizon, and sigma must be positive".into(),
            ));
        }
        if !(self.rate > 0.0) {
            return Err(Error::Domain("rate must be positive".into()));
        }
        Ok(())
    }
}

/// Stock held for one period: a(x) = S e^r e^x with x ~ Normal(-σ²/2, σ).
pub fn lognormal_game(spot: f64, sigma: f64, rate: f64, cfg: QuadratureConfig) -> Result<Game> {
    if !(spot > 0.0 && sigma > 0.0 && rate > 0.0) {
        return Err(Error::Domain("spot, sigma, and rate must be positive".into()));
    }
    Game::build(
        Measure::NormalTransform {
            mean: -sigma * sigma / 2.0,
            sd: sigma,
        },
        Profit::ExpScale {
            scale: spot * rate.exp(),
        },
        None,
        cfg,
    )
}

/// European put: a(x) = max(K - S e^{rT} e^x, 0) with x ~ Normal(-σ²T/2, σ√T).
pub fn put_game(mp: &MarketParams, cfg: QuadratureConfig) -> Result<Game> {
    mp.validate()?;
    let t = mp.horizon;
    Game::build(
        Measure::NormalTransform {
            mean: -mp.sigma * mp.sigma * t / 2.0,
            sd: mp.sigma * t.sqrt(),
        },
        Profit::PutPayoff {
            strike: mp.strike,
            scale: mp.spot * (mp.rate * t).exp(),
        },
        None,
        cfg,
    )
}

fn d_args(mp: &MarketParams) -> (f64, f64) {
    let st = mp.sigma * mp.horizon.sqrt();
    let d2 = ((mp.spot / mp.strike).ln() + (mp.rate - mp.sigma * mp.sigma / 2.0) * mp.horizon) / st;
    let d1 = ((mp.spot / mp.strike).ln() + (mp.rate + mp.sigma * mp.sigma / 2.0) * mp.horizon) / st;
    (d1, d2)
}

/// Closed-form expectation of the put payoff at exercise,
/// K N(-d2') - S e^{rT} N(-d1').
pub fn put_expectation(mp: &MarketParams) -> f64 {
    let (d1, d2) = d_args(mp);
    mp.strike * normal_cdf(-d2) - mp.spot * (mp.rate * mp.horizon).exp() * normal_cdf(-d1)
}

/// Black–Scholes value of the European put,
/// K e^{-rT} N(-d2') - S N(-d1'); equals `put_expectation` discounted.
pub fn black_scholes_put(mp: &MarketParams) -> f64 {
    let (d1, d2) = d_args(mp);
    mp.strike * (-mp.rate * mp.horizon).exp() * normal_cdf(-d2) - mp.spot * normal_cdf(-d1)
}

/// Cumulative standard normal distribution, via the complementary error
/// function. Absolute error below 1e-15.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

// W. J. Cody's rational approximations for erf/erfc (as in netlib calerf).
#[allow(clippy::excessive_precision)]
const ERF_A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
#[allow(clippy::excessive_precision)]
const ERF_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];
#[allow(clippy::excessive_precision)]
const ERF_C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
#[allow(clippy::excessive_precision)]
const ERF_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];
#[allow(clippy::excessive_precision)]
const ERF_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
#[allow(clippy::excessive_precision)]
const ERF_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];
#[allow(clippy::excessive_precision)]
const SQRT_PI_INV: f64 = 5.6418958354775628695e-1;

fn erf_small(x: f64) -> f64 {
    // |x| <= 0.46875
    let z = x * x;
    let mut num = ERF_A[4] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + ERF_A[i]) * z;
        den = (den + ERF_B[i]) * z;
    }
    x * (num + ERF_A[3]) / (den + ERF_B[3])
}

fn erfc_mid(y: f64) -> f64 {
    // 0.46875 < y <= 4
    let mut num = ERF_C[8] * y;
    let mut den = y;
    for i in 0..7 {
        num = (num + ERF_C[i]) * y;
        den = (den + ERF_D[i]) * y;
    }
    let r = (num + ERF_C[7]) / (den + ERF_D[7]);
    scaled_exp(y) * r
}

fn erfc_far(y: f64) -> f64 {
    // y > 4
    if y > 26.6 {
        return 0.0;
    }
    let z = 1.0 / (y * y);
    let mut num = ERF_P[5] * z;
    let mut den = z;
    for i in 0..4 {
        num = (num + ERF_P[i]) * z;
        den = (den + ERF_Q[i]) * z;
    }
    let r = z * (num + ERF_P[4]) / (den + ERF_Q[4]);
    scaled_exp(y) * (SQRT_PI_INV - r) / y
}

// exp(-y^2) computed as exp(-ysq^2)exp(-del) with ysq a 1/16 grid point,
// which avoids the cancellation in y*y for large y.
fn scaled_exp(y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        return 1.0 - erf_small(x);
    }
    let result = if y <= 4.0 { erfc_mid(y) } else { erfc_far(y) };
    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}
