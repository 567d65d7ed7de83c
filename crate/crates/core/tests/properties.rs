//! Property tests: structural invariants on randomly generated games plus
//! the deterministic limit and monotonicity checks that pin the solver to
//! its analytic behavior.

use growthpricer_core::*;
use proptest::prelude::*;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

/// Random small atom games with positive expectation.
fn atom_games() -> impl Strategy<Value = Game> {
    let atoms = prop::collection::vec(((-0.9f64..8.0), (0.05f64..1.0)), 2..5);
    atoms.prop_filter_map("valid game", |raw| {
        let mut values: Vec<f64> = raw.iter().map(|&(v, _)| v).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for pair in values.windows(2) {
            if pair[1] - pair[0] < 1e-3 {
                return None;
            }
        }
        let total: f64 = raw.iter().map(|&(_, p)| p).sum();
        let atoms: Vec<(f64, f64)> = values
            .iter()
            .zip(raw.iter())
            .map(|(&v, &(_, p))| (v, p / total))
            .collect();
        Game::discrete(&atoms, cfg()).ok()
    })
}

/// A price strictly inside the interior (root-finding) regime.
fn interior_price(g: &Game, frac: f64) -> f64 {
    let s = g.stats();
    let lower = if g.xi() >= 0.0 {
        s.inv_h
    } else {
        0.0f64.max(s.xi_plus_inv_h_xi)
    };
    lower + (s.e - lower) * frac.clamp(0.05, 0.95)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stats_invariants(g in atom_games()) {
        let s = g.stats();
        prop_assert!(s.e > 0.0);
        // ξ + 1/H_ξ < E (strict, Cauchy-Schwarz)
        prop_assert!(s.xi_plus_inv_h_xi < s.e);
        if g.xi() > 0.0 {
            prop_assert!(g.xi() < s.inv_h && s.inv_h < s.e);
        }
        if g.xi() == 0.0 {
            prop_assert!(s.inv_h >= 0.0 && s.inv_h < s.e);
        }
        prop_assert!(g.atom_at_xi());
        prop_assert!(s.h_xi.is_infinite());
        // total mass
        prop_assert!((g.integrate(|_| 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn atom_stats_match_direct_summation(g in atom_games()) {
        let atoms = g.profit_atoms().unwrap();
        let e: f64 = atoms.iter().map(|a| a.prob * a.value).sum();
        prop_assert!((g.stats().e - e).abs() <= 1e-12 * e.abs().max(1.0));
        if atoms.iter().all(|a| a.value != 0.0) {
            let h: f64 = atoms.iter().map(|a| a.prob / a.value).sum();
            prop_assert!((g.stats().h - h).abs() <= 1e-12 * h.abs().max(1.0));
        } else {
            prop_assert!(g.stats().h.is_infinite());
        }
    }

    #[test]
    fn w_strictly_decreasing(g in atom_games(), frac in 0.1f64..0.9, a in 0.05f64..0.45, b in 0.55f64..0.95) {
        let u = interior_price(&g, frac);
        let bound = if g.xi() >= u { 2.0 } else { u / (u - g.xi()) };
        let w1 = w(&g, u, a * bound).unwrap();
        let w2 = w(&g, u, b * bound).unwrap();
        prop_assert!(w1 > w2, "w({}) = {w1} <= w({}) = {w2}", a * bound, b * bound);
    }

    #[test]
    fn optimum_dominates_grid(g in atom_games(), frac in 0.1f64..0.9, probe in 0.02f64..0.98) {
        let u = interior_price(&g, frac);
        let t_opt = pre_optimal(&g, u).unwrap();
        let best = growth(&g, u, t_opt).unwrap();
        prop_assert!(best > 1.0); // interior optimum beats doing nothing
        let bound = if g.xi() >= u { 1.0 } else { (u / (u - g.xi())).min(1.0) };
        let t = probe * bound;
        let other = growth(&g, u, t).unwrap();
        prop_assert!(best >= other - 1e-12, "t_opt {t_opt} beaten at t {t}: {best} < {other}");
    }

    #[test]
    fn price_round_trip(g in atom_games(), rate in 0.01f64..0.15) {
        match price(&g, rate, Compounding::Simple, None) {
            Ok(r) => {
                prop_assert!(r.price > 0.0 && r.price < g.stats().e);
                let back = growth(&g, r.price, r.proportion).unwrap();
                prop_assert!((back - r.target).abs() < 1e-8, "round trip off by {:e}", (back - r.target).abs());
            }
            // a negative-ξ game whose attainable growth tops out below the target
            Err(Error::TargetOutOfRange { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {e}"))),
        }
    }

    #[test]
    fn quadrature_error_estimate_honored(coeffs in prop::collection::vec(-3.0f64..3.0, 1..6), hi in 0.5f64..3.0) {
        // closed-form polynomial integral against the adaptive rule
        let truth: f64 = coeffs.iter().enumerate()
            .map(|(k, c)| c * hi.powi(k as i32 + 1) / (k as f64 + 1.0))
            .sum();
        let est = integrate_finite(
            |x| coeffs.iter().enumerate().map(|(k, c)| c * x.powi(k as i32)).sum::<f64>(),
            0.0,
            hi,
            &cfg(),
        ).unwrap();
        prop_assert!((est.value - truth).abs() <= 10.0 * est.error.max(1e-14));
    }
}

#[test]
fn w_limits_at_the_domain_edges() {
    // toward t = 0 the value approaches E/u - 1
    let uni = Game::uniform(0.0, 1.0, cfg()).unwrap();
    let v = w(&uni, 0.4, 1e-8).unwrap();
    assert!((v - (0.5 / 0.4 - 1.0)).abs() < 1e-6, "got {v}");

    // toward the boundary the value approaches (1 - ξ/u) H_ξ (ξ + 1/H_ξ - u)
    let tilt = Game::tilted(-1.0, 2.0, -1.0, cfg()).unwrap();
    for u in [0.7, 0.9] {
        let s = tilt.stats();
        let bound = u / (u - tilt.xi());
        let limit = (1.0 - tilt.xi() / u) * s.h_xi * (s.xi_plus_inv_h_xi - u);
        let v = w(&tilt, u, bound * (1.0 - 1e-8)).unwrap();
        assert!((v - limit).abs() < 1e-6, "u = {u}: {v} vs {limit}");
    }
    let ln = lognormal_game(100.0, 0.3, 0.04, cfg()).unwrap();
    let s = ln.stats();
    let limit = s.h_xi * (s.xi_plus_inv_h_xi - 100.0);
    let v = w(&ln, 100.0, 1.0 - 1e-8).unwrap();
    assert!((v - limit).abs() < 1e-6, "{v} vs {limit}");
}

#[test]
fn pre_optimal_monotonicity_in_price() {
    // ξ >= 0: t̃ strictly decreasing in u
    let g2 = Game::discrete(&[(0.625, 0.5), (2.0, 0.5)], cfg()).unwrap();
    let mut last = f64::INFINITY;
    for k in 0..=20 {
        let u = 0.96 + (1.3 - 0.96) * k as f64 / 20.0;
        let t = pre_optimal(&g2, u).unwrap();
        assert!(t < last, "t̃ not decreasing at u = {u}");
        last = t;
    }

    // t̃/u strictly decreasing on the interior regime, any sign of ξ
    let tilt = Game::tilted(-1.0, 2.0, -1.0, cfg()).unwrap();
    for (g, lo, hi) in [
        (&g2, 0.96, 1.3),
        (&tilt, 0.52, 0.98),
        (&Game::uniform(0.0, 1.0, cfg()).unwrap(), 0.05, 0.49),
    ] {
        let mut last = f64::INFINITY;
        for k in 0..=20 {
            let u = lo + (hi - lo) * k as f64 / 20.0;
            let ratio = pre_optimal(g, u).unwrap() / u;
            assert!(ratio < last, "t̃/u not decreasing at u = {u}");
            last = ratio;
        }
    }
}

#[test]
fn optimal_proportion_unimodal_for_negative_xi() {
    // rises on the leverage branch, then falls past the peak
    let tilt = Game::tilted(-1.0, 2.0, -1.0, cfg()).unwrap();
    let mut diffs = Vec::new();
    let mut last = 0.0;
    for k in 1..=40 {
        let u = k as f64 / 41.0;
        let t = optimal_proportion(&tilt, u).unwrap().t;
        if k > 1 {
            diffs.push(t - last);
        }
        last = t;
    }
    let mut switched = false;
    for pair in diffs.windows(2) {
        if pair[0] > 0.0 && pair[1] < 0.0 {
            assert!(!switched, "more than one sign change in t̄ differences");
            switched = true;
        }
        if switched {
            assert!(pair[1] <= 1e-12, "t̄ increases again past the peak");
        }
    }
    assert!(switched, "t̄ never peaked on the grid");
}

#[test]
fn growth_is_continuous_across_regime_boundaries() {
    // ξ = 0 with finite H: optimal growth matches H exp(∫ log a dF) at 1/H
    let aux = Game::tilted(0.0, 1.0, 0.0, cfg()).unwrap(); // density 2x
    assert!((aux.stats().inv_h - 0.5).abs() < 1e-10);
    let boundary_growth = 2.0 * (-0.5f64).exp();
    for du in [-1e-6, 1e-6] {
        let r = optimal_proportion(&aux, 0.5 * (1.0 + du)).unwrap();
        assert!(
            (r.growth - boundary_growth).abs() < 5e-6,
            "G at 0.5(1 + {du}) = {} vs {boundary_growth}",
            r.growth
        );
    }

    // ξ > 0: same at u = 1/H on the ladder
    let stp = Game::st_petersburg(2.0, cfg()).unwrap();
    for du in [-1e-6, 1e-6] {
        let r = optimal_proportion(&stp, 3.0 * (1.0 + du)).unwrap();
        assert!(
            (r.growth - 4.0 / 3.0).abs() < 5e-6,
            "G at 3(1 + {du}) = {}",
            r.growth
        );
    }
}

#[test]
fn golden_section_confirms_the_root_optimum() {
    let g1 = Game::discrete(&[(0.0, 0.5), (3.0, 0.5)], cfg()).unwrap();
    let uni = Game::uniform(0.0, 1.0, cfg()).unwrap();
    for (g, u) in [(&g1, 1.0), (&g1, 1.2), (&uni, 0.3), (&uni, 0.45)] {
        let t_root = pre_optimal(g, u).unwrap();
        let bound = if g.xi() >= u { 1.0 } else { u / (u - g.xi()) };
        let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
        let (mut lo, mut hi) = (1e-9, bound * (1.0 - 1e-9));
        let mut x1 = hi - inv_phi * (hi - lo);
        let mut x2 = lo + inv_phi * (hi - lo);
        let mut f1 = growth(g, u, x1).unwrap();
        let mut f2 = growth(g, u, x2).unwrap();
        for _ in 0..80 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = growth(g, u, x2).unwrap();
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = growth(g, u, x1).unwrap();
            }
        }
        let t_golden = 0.5 * (lo + hi);
        assert!(
            (t_root - t_golden).abs() < 1e-6,
            "u = {u}: root {t_root} vs golden {t_golden}"
        );
        assert!(growth(g, u, t_root).unwrap() >= growth(g, u, t_golden).unwrap() - 1e-12);
    }
}

#[test]
fn growth_tends_to_one_at_the_expectation() {
    let g1 = Game::discrete(&[(0.0, 0.5), (3.0, 0.5)], cfg()).unwrap();
    let r = optimal_proportion(&g1, 1.5 * (1.0 - 1e-6)).unwrap();
    assert!(r.growth > 1.0 && r.growth < 1.0 + 1e-4, "got {}", r.growth);
}

#[test]
fn expectation_price_exceeds_growth_price_on_corpus() {
    let corpus = [
        Game::discrete(&[(0.0, 0.5), (3.0, 0.5)], cfg()).unwrap(),
        Game::discrete(&[(0.625, 0.5), (2.0, 0.5)], cfg()).unwrap(),
        Game::discrete(&[(0.3, 0.5), (2.7, 0.5)], cfg()).unwrap(),
        Game::uniform(0.0, 1.0, cfg()).unwrap(),
        lognormal_game(100.0, 0.3, 0.04, cfg()).unwrap(),
    ];
    for g in &corpus {
        let growth_price = price(g, 0.04, Compounding::Simple, None).unwrap().price;
        let exp_price = expectation_price(g, 0.04, Compounding::Simple, None)
            .unwrap()
            .price;
        assert!(
            exp_price > growth_price,
            "expectation price {exp_price} <= growth price {growth_price}"
        );
    }
}

#[test]
fn declared_effectiveness_is_surfaced() {
    let spec = GameSpec::parse(r#"{"kind":"stpetersburg","base":2,"effective_nu":0.25}"#).unwrap();
    let g = spec.build(cfg()).unwrap();
    // grid misses the convergent range; the declaration is reported
    assert_eq!(
        g.effectiveness(&[2.0, 3.0]),
        Effectiveness::Declared { nu: 0.25 }
    );
}
