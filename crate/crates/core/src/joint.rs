//! Optimal proportions (t, s) for two independent games at a shared price,
//! and the joint pricing equation over the maximized joint growth rate.

use crate::error::{Error, Result};
use crate::measure::Game;
use std::cell::RefCell;

/// A joint allocation with its growth rate at a price.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct JointResult {
    pub price: f64,
    pub t: f64,
    pub s: f64,
    pub growth: f64,
}

/// ∬ f(a, b) dF dG via nested integration over the two games.
fn nested<F: Fn(f64, f64) -> f64>(ga: &Game, gb: &Game, f: F) -> Result<f64> {
    let inner_err: RefCell<Option<Error>> = RefCell::new(None);
    let outer = ga.integrate(|alpha| {
        if inner_err.borrow().is_some() {
            return 0.0;
        }
        match gb.integrate(|beta| f(alpha, beta)) {
            Ok(v) => v,
            Err(e) => {
                *inner_err.borrow_mut() = Some(e);
                0.0
            }
        }
    });
    if let Some(e) = inner_err.into_inner() {
        return Err(e);
    }
    outer
}

fn worst_factor(ga: &Game, gb: &Game, u: f64, t: f64, s: f64) -> f64 {
    (ga.xi() * t + gb.xi() * s) / u - t - s + 1.0
}

fn check_allocation(ga: &Game, gb: &Game, u: f64, t: f64, s: f64) -> Result<()> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!("price must be positive, got {u}")));
    }
    if !(t >= 0.0 && s >= 0.0 && t + s <= 1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "proportions must satisfy t, s >= 0 and t + s <= 1; got ({t}, {s})"
        )));
    }
    if !(worst_factor(ga, gb, u, t, s) > 0.0) {
        return Err(Error::Domain(
            "allocation can be ruined: (ξ_a t + ξ_b s)/u - t - s + 1 <= 0".into(),
        ));
    }
    Ok(())
}

/// exp(∬ log((a t + b s)/u - t - s + 1) dF dG).
pub fn joint_growth(ga: &Game, gb: &Game, u: f64, t: f64, s: f64) -> Result<f64> {
    check_allocation(ga, gb, u, t, s)?;
    if t == 0.0 && s == 0.0 {
        return Ok(1.0);
    }
    let v = nested(ga, gb, |a, b| ((a * t + b * s) / u - t - s + 1.0).ln())?;
    Ok(v.exp())
}

/// Log of the joint growth with its gradient in (t, s).
pub fn joint_log_growth_grad(
    ga: &Game,
    gb: &Game,
    u: f64,
    t: f64,
    s: f64,
) -> Result<(f64, [f64; 2])> {
    check_allocation(ga, gb, u, t, s)?;
    let z = |a: f64, b: f64| (a * t + b * s) / u - t - s + 1.0;
    let value = nested(ga, gb, |a, b| z(a, b).ln())?;
    let gt = nested(ga, gb, |a, b| ((a - u) / u) / z(a, b))?;
    let gs = nested(ga, gb, |a, b| ((b - u) / u) / z(a, b))?;
    Ok((value, [gt, gs]))
}

fn hessian(ga: &Game, gb: &Game, u: f64, t: f64, s: f64) -> Result<[[f64; 2]; 2]> {
    let z = |a: f64, b: f64| (a * t + b * s) / u - t - s + 1.0;
    let htt = -nested(ga, gb, |a, b| ((a - u) / u).powi(2) / z(a, b).powi(2))?;
    let hts = -nested(ga, gb, |a, b| {
        ((a - u) / u) * ((b - u) / u) / z(a, b).powi(2)
    })?;
    let hss = -nested(ga, gb, |a, b| ((b - u) / u).powi(2) / z(a, b).powi(2))?;
    Ok([[htt, hts], [hts, hss]])
}

fn project_simplex(mut t: f64, mut s: f64) -> (f64, f64) {
    t = t.max(0.0);
    s = s.max(0.0);
    if t + s > 1.0 {
        let shift = (t + s - 1.0) / 2.0;
        t -= shift;
        s -= shift;
        if t < 0.0 {
            s += t;
            t = 0.0;
        }
        if s < 0.0 {
            t += s;
            s = 0.0;
        }
        t = t.clamp(0.0, 1.0);
        s = s.clamp(0.0, 1.0);
    }
    (t, s)
}

fn kkt_residual(t: f64, s: f64, grad: [f64; 2]) -> f64 {
    const ACTIVE: f64 = 1e-9;
    let mut r = grad;
    if t + s >= 1.0 - ACTIVE && t > ACTIVE && s > ACTIVE {
        let lambda = (0.5 * (r[0] + r[1])).max(0.0);
        r[0] -= lambda;
        r[1] -= lambda;
    }
    if t <= ACTIVE {
        r[0] = r[0].max(0.0);
    }
    if s <= ACTIVE {
        r[1] = r[1].max(0.0);
    }
    r[0].abs().max(r[1].abs())
}

const KKT_TOL: f64 = 1e-10;

/// Maximize the joint growth over {t, s >= 0, t + s <= 1} intersected with
/// the no-ruin region. Coarse grid warm start, then projected Newton/ascent
/// on the concave log-objective.
pub fn joint_optimize(ga: &Game, gb: &Game, u: f64) -> Result<JointResult> {
    joint_optimize_from(ga, gb, u, None)
}

/// As `joint_optimize`, but optionally skipping the grid stage by starting
/// from a caller-supplied allocation.
pub fn joint_optimize_from(
    ga: &Game,
    gb: &Game,
    u: f64,
    warm: Option<(f64, f64)>,
) -> Result<JointResult> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!("price must be positive, got {u}")));
    }
    let ea = ga.stats().e;
    let eb = gb.stats().e;
    if ea.is_finite() && eb.is_finite() && u >= ea.max(eb) {
        // negative edge in every coordinate; the concave objective peaks at rest
        return Ok(JointResult {
            price: u,
            t: 0.0,
            s: 0.0,
            growth: 1.0,
        });
    }

    let feasible = |t: f64, s: f64| worst_factor(ga, gb, u, t, s) > 1e-12;
    let log_growth = |t: f64, s: f64| -> Result<f64> {
        if t == 0.0 && s == 0.0 {
            return Ok(0.0);
        }
        nested(ga, gb, |a, b| ((a * t + b * s) / u - t - s + 1.0).ln())
    };

    let (mut t, mut s) = match warm {
        Some((wt, ws)) if feasible(wt, ws) => (wt, ws),
        _ => {
            let mut best = (0.0, 0.0, 0.0f64);
            let n = 50usize;
            for i in 0..=n {
                let ct = i as f64 / n as f64;
                for j in 0..=(n - i) {
                    let cs = j as f64 / n as f64;
                    if !feasible(ct, cs) {
                        continue;
                    }
                    let v = log_growth(ct, cs)?;
                    if v > best.2 {
                        best = (ct, cs, v);
                    }
                }
            }
            (best.0, best.1)
        }
    };

    let mut value = log_growth(t, s)?;
    for _ in 0..300 {
        let (_, grad) = joint_log_growth_grad(ga, gb, u, t, s)?;
        if kkt_residual(t, s, grad) < KKT_TOL {
            break;
        }
        // gradient reduced to the feasible cone: coordinates pinned at an
        // active bound with an outward gradient are frozen
        const ACTIVE: f64 = 1e-9;
        let free_t = !(t <= ACTIVE && grad[0] < 0.0);
        let free_s = !(s <= ACTIVE && grad[1] < 0.0);
        let sum_active = t + s >= 1.0 - ACTIVE;
        let mut red = [
            if free_t { grad[0] } else { 0.0 },
            if free_s { grad[1] } else { 0.0 },
        ];
        if sum_active && red[0] + red[1] > 0.0 {
            let lambda = 0.5 * (red[0] + red[1]);
            red[0] -= lambda;
            red[1] -= lambda;
        }
        if red[0] == 0.0 && red[1] == 0.0 {
            break;
        }
        // Newton on the free subspace, falling back to the reduced gradient
        let mut dir = red;
        if !sum_active {
            if let Ok(h) = hessian(ga, gb, u, t, s) {
                let cand = if free_t && free_s {
                    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
                    if det.abs() > 1e-300 {
                        Some([
                            -(h[1][1] * grad[0] - h[0][1] * grad[1]) / det,
                            -(-h[1][0] * grad[0] + h[0][0] * grad[1]) / det,
                        ])
                    } else {
                        None
                    }
                } else if free_t && h[0][0] < 0.0 {
                    Some([-grad[0] / h[0][0], 0.0])
                } else if free_s && h[1][1] < 0.0 {
                    Some([0.0, -grad[1] / h[1][1]])
                } else {
                    None
                };
                if let Some(c) = cand {
                    if c[0] * red[0] + c[1] * red[1] > 0.0 {
                        dir = c;
                    }
                }
            }
        }
        let mut step = 1.0;
        let mut improved = false;
        for _ in 0..60 {
            let (ct, cs) = project_simplex(t + step * dir[0], s + step * dir[1]);
            if feasible(ct, cs) && (ct, cs) != (t, s) {
                let cv = log_growth(ct, cs)?;
                // sufficient increase against the realized (projected) move
                let predicted = grad[0] * (ct - t) + grad[1] * (cs - s);
                if cv > value && cv >= value + 1e-4 * predicted {
                    t = ct;
                    s = cs;
                    value = cv;
                    improved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }

    Ok(JointResult {
        price: u,
        t,
        s,
        growth: value.exp(),
    })
}

/// Solve max-joint-growth(u) = target for the shared price u.
///
/// Monotone decrease of the maximized growth is verified on every sampled
/// triple rather than assumed.
pub fn joint_price(
    ga: &Game,
    gb: &Game,
    rate: f64,
    compounding: crate::pricer::Compounding,
) -> Result<JointResult> {
    let target = crate::pricer::growth_target(rate, compounding, None)?;

    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut warm: Option<(f64, f64)> = None;
    let mut eval = |u: f64, warm: &mut Option<(f64, f64)>| -> Result<f64> {
        let r = joint_optimize_from(ga, gb, u, *warm)?;
        if r.t > 0.0 || r.s > 0.0 {
            *warm = Some((r.t, r.s));
        }
        samples.push((u, r.growth));
        samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for pair in samples.windows(2) {
            if pair[1].1 > pair[0].1 + 1e-7 * (1.0 + pair[0].1) {
                return Err(Error::Domain(format!(
                    "joint growth is not decreasing between u = {} and u = {}",
                    pair[0].0, pair[1].0
                )));
            }
        }
        Ok(r.growth)
    };

    let ea = ga.stats().e;
    let eb = gb.stats().e;
    let mut hi = if ea.is_finite() && eb.is_finite() {
        ea.max(eb)
    } else {
        let mut hi = 1.0;
        let mut steps = 0;
        while eval(hi, &mut warm)? >= target {
            hi *= 2.0;
            steps += 1;
            if steps > 200 {
                return Err(Error::Domain("could not bracket the joint price".into()));
            }
        }
        hi
    };
    let mut lo = hi / 2.0;
    let mut steps = 0;
    while eval(lo, &mut warm)? <= target {
        lo /= 2.0;
        steps += 1;
        if steps > 300 {
            return Err(Error::TargetOutOfRange {
                target,
                cap: eval(lo, &mut warm)?,
            });
        }
    }
    while hi - lo > 1e-9 * 1.0f64.max(0.5 * (hi + lo)) {
        let mid = 0.5 * (lo + hi);
        if eval(mid, &mut warm)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = 0.5 * (lo + hi);
    joint_optimize_from(ga, gb, u, warm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::optimal_proportion;
    use crate::measure::Game;
    use crate::pricer::Compounding;
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

    #[test]
    fn joint_growth_known_point() {
        let v = joint_growth(&game1(), &game2(), 1.0, 0.2141595, 0.78091204).unwrap();
        assert!((v - 1.1798216631062997).abs() < 1e-7, "got {v}");
        assert_eq!(joint_growth(&game1(), &game2(), 1.0, 0.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn joint_growth_rejects_ruin() {
        let ga = Game::discrete(&[(-0.5, 0.5), (2.0, 0.5)], cfg()).unwrap();
        // t = 1 at u = 0.2 would allow a negative capital factor
        assert!(joint_growth(&ga, &game2(), 0.2, 1.0, 0.0).is_err());
    }

    #[test]
    fn optimum_at_unit_price() {
        let r = joint_optimize(&game1(), &game2(), 1.0).unwrap();
        assert!((r.growth - 1.1798216631062997).abs() < 1e-8, "G = {}", r.growth);
        assert!((r.t - 0.2141595).abs() < 1e-5, "t = {}", r.t);
        assert!((r.s - 0.7809120).abs() < 1e-5, "s = {}", r.s);
    }

    #[test]
    fn optimum_degenerates_above_both_expectations() {
        let r = joint_optimize(&game1(), &game2(), 2.0).unwrap();
        assert_eq!((r.t, r.s), (0.0, 0.0));
        assert_eq!(r.growth, 1.0);
    }

    #[test]
    fn independent_copies_symmetric_optimum() {
        let r = joint_optimize(&game1(), &game1(), 1.0).unwrap();
        assert!((r.t - r.s).abs() < 1e-7, "t = {}, s = {}", r.t, r.s);
    }

    #[test]
    fn pinned_second_game_recovers_single_growth() {
        let g1 = game1();
        let g2 = game2();
        for t in [0.1, 0.25, 0.4] {
            let joint = joint_growth(&g1, &g2, 1.0, t, 0.0).unwrap();
            let single = crate::growth::growth(&g1, 1.0, t).unwrap();
            assert!((joint - single).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let g1 = game1();
        let g2 = game2();
        let (u, t, s) = (1.1, 0.22, 0.31);
        let (_, grad) = joint_log_growth_grad(&g1, &g2, u, t, s).unwrap();
        let h = 1e-6;
        let f = |t: f64, s: f64| {
            nested(&g1, &g2, |a, b| ((a * t + b * s) / u - t - s + 1.0).ln()).unwrap()
        };
        let fd_t = (f(t + h, s) - f(t - h, s)) / (2.0 * h);
        let fd_s = (f(t, s + h) - f(t, s - h)) / (2.0 * h);
        assert!((grad[0] - fd_t).abs() / fd_t.abs().max(1.0) < 1e-6);
        assert!((grad[1] - fd_s).abs() / fd_s.abs().max(1.0) < 1e-6);
    }

    #[test]
    fn log_growth_concave_at_fixed_points() {
        let g1 = game1();
        let g2 = game2();
        let u = 1.0;
        let pts = [
            (0.1, 0.1),
            (0.2, 0.5),
            (0.05, 0.7),
            (0.3, 0.3),
            (0.15, 0.6),
            (0.4, 0.1),
            (0.25, 0.45),
            (0.02, 0.02),
            (0.35, 0.25),
            (0.12, 0.52),
        ];
        let f = |t: f64, s: f64| {
            nested(&g1, &g2, |a, b| ((a * t + b * s) / u - t - s + 1.0).ln()).unwrap()
        };
        let h = 1e-4;
        for (t, s) in pts {
            let htt = (f(t + h, s) - 2.0 * f(t, s) + f(t - h, s)) / (h * h);
            let hss = (f(t, s + h) - 2.0 * f(t, s) + f(t, s - h)) / (h * h);
            let hts = (f(t + h, s + h) - f(t + h, s - h) - f(t - h, s + h) + f(t - h, s - h))
                / (4.0 * h * h);
            // negative semidefinite: non-positive trace terms, non-negative determinant
            assert!(htt <= 1e-6, "htt = {htt} at ({t}, {s})");
            assert!(hss <= 1e-6);
            assert!(htt * hss - hts * hts >= -1e-4, "det at ({t}, {s})");
        }
    }

    #[test]
    fn joint_price_reproduces_corrected_value() {
        let r = joint_price(&game1(), &game2(), 0.04, Compounding::Simple).unwrap();
        assert!((r.price - 1.18529831997585).abs() < 1e-6, "u = {}", r.price);
        assert!((r.t - 0.16831245).abs() < 1e-5);
        assert!((r.s - 0.31754405).abs() < 1e-5);
        assert!((r.growth - 1.04).abs() < 1e-8);
    }

    #[test]
    fn joint_price_with_zero_edge_dummy_matches_single_pricer() {
        // a symmetric two-atom game centered at 0.5 has zero edge at any
        // price above its expectation, so the optimizer drops it
        let dummy = Game::discrete(&[(0.45, 0.5), (0.55, 0.5)], cfg()).unwrap();
        let joint = joint_price(&game1(), &dummy, 0.04, Compounding::Simple).unwrap();
        let single = crate::pricer::price(&game1(), 0.04, Compounding::Simple, None).unwrap();
        assert!(
            (joint.price - single.price).abs() < 1e-6,
            "joint {} vs single {}",
            joint.price,
            single.price
        );
        assert!(joint.s.abs() < 1e-6);
        let single_t = optimal_proportion(&game1(), joint.price).unwrap().t;
        assert!((joint.t - single_t).abs() < 1e-5);
    }
}
