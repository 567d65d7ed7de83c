//! The first-order-condition integral w_u(t), the pre-optimal proportion
//! solving w_u(t) = 0, the regime-dispatched optimal proportion, and the
//! limit expectation of growth rate G_u(t).

use crate::error::{Error, Result};
use crate::measure::Game;
use crate::quad::QuadratureConfig;

/// Which branch of the optimal-proportion function produced the result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// u >= E: stake nothing.
    ZeroInvest,
    /// ξ >= 0 and u <= 1/H: stake everything.
    FullInvest,
    /// ξ < 0 and u <= ξ + 1/H_ξ: stake t = u/(u - ξ), the no-ruin boundary.
    BoundaryLeverage,
    /// Interior root of w_u.
    InteriorRoot,
}

/// Optimal proportion at a price, with the regime and achieved growth rate.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ProportionResult {
    pub u: f64,
    pub t: f64,
    pub regime: Regime,
    pub growth: f64,
}

/// Tolerance on |w| at the reported root.
const ROOT_TOL: f64 = 1e-12;
/// Relative slack for regime classification at stat boundaries.
const REGIME_SLACK: f64 = 1e-12;

fn root_cfg(cfg: &QuadratureConfig) -> QuadratureConfig {
    cfg.tightened(1e-13, 1e-13)
}

/// Upper end of the admissible proportion interval, u/(u - ξ);
/// +∞ when ξ >= u (possible only for ξ > 0).
fn proportion_bound(xi: f64, u: f64) -> f64 {
    if xi >= u {
        f64::INFINITY
    } else {
        u / (u - xi)
    }
}

/// w_u(t) = ∫ (a(x) - u) / (a(x)t - ut + u) dF(x).
pub fn w(g: &Game, u: f64, t: f64) -> Result<f64> {
    w_cfg(g, u, t, &root_cfg(g.cfg()))
}

fn w_cfg(g: &Game, u: f64, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let xi = g.xi();
    if !(u > 0.0f64.max(xi)) {
        return Err(Error::Domain(format!(
            "w requires u > max(0, ξ); got u = {u}, ξ = {xi}"
        )));
    }
    let bound = proportion_bound(xi, u);
    if !(t > 0.0 && t < bound) {
        return Err(Error::Domain(format!(
            "w requires 0 < t < u/(u-ξ) = {bound}; got t = {t}"
        )));
    }
    // (a-u)t + u rewritten as a sum of non-negative terms; the direct form
    // cancels catastrophically for t near the boundary, leaving noise the
    // quadrature cannot integrate below.
    if bound.is_finite() {
        let gap = (u - xi) * (bound - t);
        g.integrate_convergent(|a| (a - u) / ((a - xi) * t + gap), cfg)
    } else {
        g.integrate_convergent(|a| (a - u) / ((a - u) * t + u), cfg)
    }
}

/// The pre-optimal proportion: the unique root of the strictly decreasing
/// w_u on (0, u/(u-ξ)).
///
/// Valid for max(0, ξ + 1/H_ξ) < u < E. Brackets start a relative 1e-9
/// inside each endpoint and shrink geometrically toward an endpoint whose
/// sign has not yet been found (heavy-tailed games push the root below any
/// fixed offset as u grows).
pub fn pre_optimal(g: &Game, u: f64) -> Result<f64> {
    let stats = g.stats();
    let xi = g.xi();
    let lo_edge = 0.0f64.max(stats.xi_plus_inv_h_xi);
    if !(u > lo_edge && u < stats.e) {
        return Err(Error::Domain(format!(
            "pre-optimal proportion requires max(0, ξ+1/H_ξ) = {lo_edge} < u < E = {}; got u = {u}",
            stats.e
        )));
    }
    let cfg = root_cfg(g.cfg());
    let bound = proportion_bound(xi, u);
    if !bound.is_finite() {
        return Err(Error::Domain(
            "pre-optimal proportion undefined for u <= ξ".into(),
        ));
    }

    // left bracket: w must be positive (w -> E/u - 1 > 0 as t -> 0+)
    let mut t_lo = 1e-9 * bound;
    let mut w_lo = w_cfg(g, u, t_lo, &cfg)?;
    let mut shrink = 0;
    while w_lo <= 0.0 && shrink < 100 {
        t_lo *= 1e-3;
        if t_lo < 1e-290 {
            break;
        }
        w_lo = w_cfg(g, u, t_lo, &cfg)?;
        shrink += 1;
    }
    // right bracket: w must be negative (its boundary limit is negative
    // everywhere above the leverage threshold)
    let mut gap = 1e-9;
    let mut t_hi = bound * (1.0 - gap);
    let mut w_hi = w_cfg(g, u, t_hi, &cfg)?;
    shrink = 0;
    while w_hi >= 0.0 && shrink < 8 {
        gap *= 1e-2;
        let next = bound * (1.0 - gap);
        if next <= t_hi {
            break;
        }
        t_hi = next;
        w_hi = w_cfg(g, u, t_hi, &cfg)?;
        shrink += 1;
    }
    if !(w_lo > 0.0 && w_hi < 0.0) {
        return Err(Error::Domain(format!(
            "could not bracket the root of w at u = {u} (w({t_lo:.3e}) = {w_lo:.3e}, w({t_hi:.3e}) = {w_hi:.3e})"
        )));
    }

    // bisection with secant acceleration on the strictly decreasing w
    let mut best = (t_lo, w_lo);
    for _ in 0..300 {
        if best.1.abs() <= ROOT_TOL {
            return Ok(best.0);
        }
        let mid = 0.5 * (t_lo + t_hi);
        let secant = t_lo - w_lo * (t_hi - t_lo) / (w_hi - w_lo);
        let frac = (secant - t_lo) / (t_hi - t_lo);
        let t_next = if frac.is_finite() && frac > 1e-3 && frac < 1.0 - 1e-3 {
            secant
        } else {
            mid
        };
        if t_next <= t_lo || t_next >= t_hi {
            break;
        }
        let w_next = w_cfg(g, u, t_next, &cfg)?;
        if w_next.abs() < best.1.abs() {
            best = (t_next, w_next);
        }
        if w_next > 0.0 {
            t_lo = t_next;
            w_lo = w_next;
        } else {
            t_hi = t_next;
            w_hi = w_next;
        }
        if (t_hi - t_lo) <= 4.0 * f64::EPSILON * t_hi.abs() {
            break;
        }
    }
    if best.1.abs() <= ROOT_TOL.max(1e-10) {
        Ok(best.0)
    } else {
        Err(Error::QuadratureFailure(format!(
            "root of w did not converge at u = {u}: |w| = {:.3e}",
            best.1.abs()
        )))
    }
}

/// G_u(t) = exp(∫ log(a(x) t/u - t + 1) dF(x)).
///
/// t = 0 gives 1; t at the boundary u/(u-ξ) evaluates to the one-sided
/// limit exp(∫ log(a - ξ) dF)/(u - ξ).
pub fn growth(g: &Game, u: f64, t: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!("growth requires u > 0, got {u}")));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("growth requires t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let xi = g.xi();
    let bound = proportion_bound(xi, u);
    if bound.is_finite() {
        let rel = (t - bound) / bound;
        if rel > 1e-14 {
            return Err(Error::Domain(format!(
                "growth requires ξt/u - t + 1 > 0 (t <= {bound}); got t = {t}"
            )));
        }
        if rel.abs() <= 1e-14 {
            if g.atom_at_xi() {
                // positive mass on the floor outcome: maximal leverage is ruin
                return Ok(0.0);
            }
            let log_part = g.integrate(|a| (a - xi).ln())?;
            return Ok(log_part.exp() / (u - xi));
        }
        // stable form of a t/u - t + 1 = ((a-ξ)t + (u-ξ)(B-t))/u
        let gap = (u - xi) * (bound - t);
        let v = g.integrate(|a| (((a - xi) * t + gap) / u).ln())?;
        return Ok(v.exp());
    }
    let v = g.integrate(|a| (a * t / u - t + 1.0).ln())?;
    Ok(v.exp())
}

/// The optimal proportion t_u with its regime and growth rate.
pub fn optimal_proportion(g: &Game, u: f64) -> Result<ProportionResult> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!(
            "optimal proportion requires u > 0, got {u}"
        )));
    }
    let stats = g.stats();
    let xi = g.xi();

    if stats.e.is_finite() && u >= stats.e * (1.0 - REGIME_SLACK) {
        return Ok(ProportionResult {
            u,
            t: 0.0,
            regime: Regime::ZeroInvest,
            growth: 1.0,
        });
    }
    if xi >= 0.0 && stats.h.is_finite() {
        let boundary = stats.inv_h;
        if u <= boundary * (1.0 + REGIME_SLACK) {
            let log_a = g.integrate(|a| a.ln())?;
            return Ok(ProportionResult {
                u,
                t: 1.0,
                regime: Regime::FullInvest,
                growth: log_a.exp() / u,
            });
        }
    }
    if xi < 0.0 && stats.xi_plus_inv_h_xi > 0.0 {
        let boundary = stats.xi_plus_inv_h_xi;
        if u <= boundary * (1.0 + REGIME_SLACK) {
            let log_shift = g.integrate(|a| (a - xi).ln())?;
            return Ok(ProportionResult {
                u,
                t: u / (u - xi),
                regime: Regime::BoundaryLeverage,
                growth: log_shift.exp() / (u - xi),
            });
        }
    }
    let t = pre_optimal(g, u)?;
    let value = growth(g, u, t)?;
    Ok(ProportionResult {
        u,
        t,
        regime: Regime::InteriorRoot,
        growth: value,
    })
}

/// Kelly's closed form for a two-outcome game: profit `a` with probability
/// `p`, profit `b` with probability 1-p, priced at `u`.
///
/// Returns (t, G) and agrees with the numeric root on the equivalent
/// two-atom game. Valid on the interior regime 1/H < u < E.
pub fn kelly_binary(a: f64, b: f64, p: f64, u: f64) -> Result<(f64, f64)> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain("probability must lie in (0, 1)".into()));
    }
    if !(b >= 0.0 && a > u && u > b) {
        return Err(Error::Domain(format!(
            "kelly closed form requires a > u > b >= 0; got a = {a}, b = {b}, u = {u}"
        )));
    }
    let q = 1.0 - p;
    let e = p * a + q * b;
    if !(e > u) {
        return Err(Error::Domain(format!(
            "kelly closed form requires u < E = {e}"
        )));
    }
    if b > 0.0 {
        let inv_h = 1.0 / (p / a + q / b);
        if !(u > inv_h) {
            return Err(Error::Domain(format!(
                "kelly closed form requires u > 1/H = {inv_h}"
            )));
        }
    }
    let au = a / u;
    let bu = b / u;
    let t = q / (1.0 - au) + p / (1.0 - bu);
    let g = (au - bu) * (q / (au - 1.0)).powf(q) * (p / (1.0 - bu)).powf(p);
    Ok((t, g))
}

/// η = lim_{u→0+} t̄_u/u for games with ξ < 0: the slope that pins the
/// supremum of attainable growth.
pub fn eta(g: &Game) -> Result<f64> {
    let xi = g.xi();
    if !(xi < 0.0) {
        return Err(Error::Domain(format!("η is defined for ξ < 0, got ξ = {xi}")));
    }
    let stats = g.stats();
    if stats.xi_plus_inv_h_xi >= 0.0 {
        return Ok(-1.0 / xi);
    }
    // root of ∫ 1/(a y + 1) dF = 1 in (0, -1/ξ); the integral is convex in y,
    // equals 1 at y = 0, dips below, and exceeds 1 at -1/ξ.
    let cfg = root_cfg(g.cfg());
    let cap = -1.0 / xi;
    // a y + 1 = (a-ξ)y + (-ξ)(cap - y): non-negative terms, no cancellation
    let phi = |y: f64| -> Result<f64> {
        let tail = -xi * (cap - y);
        g.integrate_convergent(|a| 1.0 / ((a - xi) * y + tail), &cfg)
    };
    let mut y_lo = cap * 1e-6;
    let mut f_lo = phi(y_lo)? - 1.0;
    let mut tries = 0;
    while f_lo >= 0.0 && tries < 60 {
        y_lo *= 0.5;
        f_lo = phi(y_lo)? - 1.0;
        tries += 1;
    }
    let mut y_hi = cap * (1.0 - 1e-12);
    let mut f_hi = phi(y_hi)? - 1.0;
    tries = 0;
    while f_hi <= 0.0 && tries < 40 {
        y_hi = cap - (cap - y_hi) * 0.5;
        f_hi = phi(y_hi)? - 1.0;
        tries += 1;
    }
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::Domain(
            "could not bracket the η equation root".into(),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (y_lo + y_hi);
        let f_mid = phi(mid)? - 1.0;
        if f_mid.abs() <= 1e-13 || (y_hi - y_lo) <= 4.0 * f64::EPSILON * y_hi {
            return Ok(mid);
        }
        if f_mid < 0.0 {
            y_lo = mid;
        } else {
            y_hi = mid;
        }
    }
    Ok(0.5 * (y_lo + y_hi))
}

/// Supremum of attainable growth over all prices: exp(∫ log(a η + 1) dF)
/// for ξ < 0, +∞ for ξ >= 0.
pub fn growth_range_sup(g: &Game) -> Result<f64> {
    if g.xi() >= 0.0 {
        return Ok(f64::INFINITY);
    }
    let slope = eta(g)?;
    let v = g.integrate(|a| (a * slope + 1.0).ln())?;
    Ok(v.exp())
}

/// Price of the maximum of t̄_u over u ∈ (0, E), by golden-section search.
/// Diagnostic for ξ < 0 games, where t̄ rises and then falls.
pub fn u_max(g: &Game) -> Result<f64> {
    if !(g.xi() < 0.0) {
        return Err(Error::Domain("u_max is a ξ < 0 diagnostic".into()));
    }
    let stats = g.stats();
    if !stats.e.is_finite() {
        return Err(Error::Domain("u_max requires finite E".into()));
    }
    let t_bar = |u: f64| -> Result<f64> { Ok(optimal_proportion(g, u)?.t) };
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut lo = stats.e * 1e-6;
    let mut hi = stats.e * (1.0 - 1e-9);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = t_bar(x1)?;
    let mut f2 = t_bar(x2)?;
    for _ in 0..200 {
        if (hi - lo) < 1e-10 * stats.e {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = t_bar(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = t_bar(x1)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Game;
    use crate::quad::QuadratureConfig;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn game1() -> Game {
        Game::discrete(&[(0.0, 0.5), (3.0, 0.5)], cfg()).unwrap()
    }

    fn game2() -> Game {
        Game::discrete(&[(0.625, 0.5), (2.0, 0.5)], cfg()).unwrap()
    }

    fn coin_game() -> Game {
        Game::discrete(&[(0.3, 0.5), (2.7, 0.5)], cfg()).unwrap()
    }

    fn tilted() -> Game {
        Game::tilted(-1.0, 2.0, -1.0, cfg()).unwrap()
    }

    #[test]
    fn w_vanishes_at_known_roots() {
        assert!(w(&game1(), 1.0, 0.25).unwrap().abs() < 1e-14);
        assert!(w(&game2(), 1.0, 5.0 / 6.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn w_limit_toward_zero_proportion() {
        let g = game1();
        let v = w(&g, 1.0, 1e-9).unwrap();
        assert!((v - 0.5).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn w_rejects_out_of_domain() {
        let g = game1();
        assert!(w(&g, 1.0, 0.0).is_err());
        assert!(w(&g, 1.0, 1.0).is_err()); // bound is exactly 1 for ξ = 0
        assert!(w(&g, 0.0, 0.5).is_err());
    }

    #[test]
    fn pre_optimal_reproduces_kelly_roots() {
        assert!((pre_optimal(&game1(), 1.0).unwrap() - 0.25).abs() < 1e-12);
        assert!((pre_optimal(&game2(), 1.0).unwrap() - 5.0 / 6.0).abs() < 1e-12);
        let t = pre_optimal(&coin_game(), 1.0).unwrap();
        assert!((t - 50.0 / 119.0).abs() < 1e-12, "got {t}");
    }

    #[test]
    fn pre_optimal_two_atom_closed_form() {
        // root of 0.5(3-u)/((3-u)t+u) + 0.5(-u)/(-ut+u) = 0 is (3-2u)/(2(3-u))
        let g = game1();
        for u in [1.1, 1.25, 1.4] {
            let truth = (3.0 - 2.0 * u) / (2.0 * (3.0 - u));
            let t = pre_optimal(&g, u).unwrap();
            assert!((t - truth).abs() < 1e-12, "u = {u}: {t} vs {truth}");
        }
    }

    #[test]
    fn pre_optimal_uniform_closed_form() {
        // t = (e^y - y - 1)/(e^y - 1) with y = t/u solves the uniform game
        let g = Game::uniform(0.0, 1.0, cfg()).unwrap();
        let y = 0.9818f64;
        let t_closed = (y.exp() - y - 1.0) / (y.exp() - 1.0);
        let u = t_closed / y;
        let t = pre_optimal(&g, u).unwrap();
        assert!((t - t_closed).abs() < 1e-9, "{t} vs {t_closed}");
    }

    #[test]
    fn pre_optimal_domain_errors() {
        assert!(pre_optimal(&game1(), 1.5).is_err()); // u = E
        assert!(pre_optimal(&game1(), 2.0).is_err());
        assert!(pre_optimal(&game2(), 0.5).is_err()); // u below ξ + 1/H_ξ
        // between ξ + 1/H_ξ and 1/H the root exists and sits at or above 1
        let t = pre_optimal(&game2(), 0.9).unwrap();
        assert!(t >= 1.0, "got {t}");
    }

    #[test]
    fn growth_matches_known_values() {
        let g = game1();
        let v = growth(&g, 1.0, 0.25).unwrap();
        assert!((v - (9.0f64 / 8.0).sqrt()).abs() < 1e-12);
        let v2 = growth(&game2(), 1.0, 5.0 / 6.0).unwrap();
        assert!((v2 - (121.0f64 / 96.0).sqrt()).abs() < 1e-12);
        assert_eq!(growth(&g, 1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn growth_at_boundary_uses_shifted_log() {
        // tilted game at the no-ruin boundary t = u/(u-ξ)
        let g = tilted();
        let u = 0.5;
        let t = u / (u - g.xi());
        let v = growth(&g, u, t).unwrap();
        assert!((v - 2.0 * (-0.5f64).exp()).abs() < 1e-8, "got {v}");
    }

    #[test]
    fn growth_at_boundary_with_floor_atom_is_ruin() {
        let g = game1();
        assert_eq!(growth(&g, 1.0, 1.0).unwrap(), 0.0);
        let stp = Game::st_petersburg(2.0, cfg()).unwrap();
        let u = 5.0;
        assert_eq!(growth(&stp, u, u / (u - 2.0)).unwrap(), 0.0);
    }

    #[test]
    fn optimal_proportion_regimes() {
        // u >= E: stake nothing
        let r = optimal_proportion(&game1(), 2.0).unwrap();
        assert_eq!(r.regime, Regime::ZeroInvest);
        assert_eq!(r.t, 0.0);
        assert_eq!(r.growth, 1.0);

        // St. Petersburg at u = 1/H = 3: full investment, growth 4/3
        let stp = Game::st_petersburg(2.0, cfg()).unwrap();
        let r = optimal_proportion(&stp, 3.0).unwrap();
        assert_eq!(r.regime, Regime::FullInvest);
        assert_eq!(r.t, 1.0);
        assert!((r.growth - 4.0 / 3.0).abs() < 1e-10, "got {}", r.growth);

        // tilted game in the leverage regime
        let r = optimal_proportion(&tilted(), 0.5).unwrap();
        assert_eq!(r.regime, Regime::BoundaryLeverage);
        assert!((r.t - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.growth - 2.0 * (-0.5f64).exp()).abs() < 1e-8);

        // interior
        let r = optimal_proportion(&game1(), 1.0).unwrap();
        assert_eq!(r.regime, Regime::InteriorRoot);
        assert!((r.t - 0.25).abs() < 1e-12);
    }

    #[test]
    fn kelly_closed_form_cases() {
        let (t, g) = kelly_binary(2.7, 0.3, 0.5, 1.0).unwrap();
        assert!((t - 50.0 / 119.0).abs() < 1e-15);
        assert!((g - 1.1000381964338537).abs() < 1e-12);

        let (t, g) = kelly_binary(3.0, 0.0, 0.5, 1.0).unwrap();
        assert!((t - 0.25).abs() < 1e-15);
        assert!((g - (9.0f64 / 8.0).sqrt()).abs() < 1e-15);

        let (t, g) = kelly_binary(2.0, 0.625, 0.5, 1.0).unwrap();
        assert!((t - 5.0 / 6.0).abs() < 1e-14);
        assert!((g - (121.0f64 / 96.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn kelly_agrees_with_numeric_root() {
        for (a, b, p, u) in [(2.7, 0.3, 0.5, 1.0), (2.7, 0.3, 0.5, 1.2), (3.0, 0.0, 0.35, 0.9)] {
            let game = Game::discrete(&[(b, 1.0 - p), (a, p)], cfg()).unwrap();
            let (t, gv) = kelly_binary(a, b, p, u).unwrap();
            let r = optimal_proportion(&game, u).unwrap();
            assert!((t - r.t).abs() < 1e-10, "t: {t} vs {}", r.t);
            assert!((gv - r.growth).abs() < 1e-10, "G: {gv} vs {}", r.growth);
        }
    }

    #[test]
    fn eta_branches() {
        // quadratic case: 0.5/(1-0.5y) + 0.5/(1+2y) = 1 has root y = 0.75
        let g = Game::discrete(&[(-0.5, 0.5), (2.0, 0.5)], cfg()).unwrap();
        let v = eta(&g).unwrap();
        assert!((v - 0.75).abs() < 1e-10, "got {v}");
        let cap = growth_range_sup(&g).unwrap();
        assert!((cap - 1.25).abs() < 1e-10, "got {cap}");

        // rule branch: ξ + 1/H_ξ > 0 gives η = -1/ξ
        assert!((eta(&tilted()).unwrap() - 1.0).abs() < 1e-12);

        assert!(eta(&game1()).is_err());
    }

    #[test]
    fn u_max_is_interior_for_negative_xi() {
        let g = tilted();
        let um = u_max(&g).unwrap();
        assert!(um > 0.0 && um < 1.0);
        // t̄ at u_max at least as large as nearby values
        let t_at = optimal_proportion(&g, um).unwrap().t;
        for du in [-0.05, 0.05] {
            let t_near = optimal_proportion(&g, um + du).unwrap().t;
            assert!(t_at >= t_near - 1e-6, "t({}) = {t_near} > t(u_max) = {t_at}", um + du);
        }
    }
}
