//! Games: a profit function paired with a probability measure from a small
//! closed family, plus the scalar statistics E, H and H_ξ that drive every
//! downstream solver.

use crate::error::{Error, Result};
use crate::options::normal_cdf;
use crate::quad::{
    integrate_finite, integrate_normal, normal_pdf, sum_ladder_adaptive, LadderSum,
    QuadratureConfig,
};

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

/// Density families supported on a finite interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityKind {
    Uniform,
    /// Density proportional to (x - pivot), pivot <= lo.
    LinearTilted { pivot: f64 },
}

/// The closed family of measures.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    /// Finitely many atoms, values strictly increasing, probs summing to 1.
    DiscreteAtoms(Vec<Atom>),
    /// A named density on [lo, hi].
    Density { kind: DensityKind, lo: f64, hi: f64 },
    /// x drawn from Normal(mean, sd); support is the whole real line.
    NormalTransform { mean: f64, sd: f64 },
    /// Atoms value_j = base^j with prob 2^{-j}, j = 1, 2, ...
    GeometricLadder { base: f64 },
}

/// Profit maps applied to the drawn value.
#[derive(Debug, Clone, PartialEq)]
pub enum Profit {
    Identity,
    Affine { slope: f64, intercept: f64 },
    /// Explicit profit per atom; only valid with `DiscreteAtoms`.
    TableOnAtoms(Vec<f64>),
    /// a(x) = scale * e^x; only valid with `NormalTransform`.
    ExpScale { scale: f64 },
    /// a(x) = max(strike - scale * e^x, 0); only valid with `NormalTransform`.
    PutPayoff { strike: f64, scale: f64 },
}

impl Profit {
    fn apply(&self, x: f64) -> f64 {
        match self {
            Profit::Identity => x,
            Profit::Affine { slope, intercept } => slope * x + intercept,
            Profit::ExpScale { scale } => scale * x.exp(),
            Profit::PutPayoff { strike, scale } => put_payoff(*strike, (strike / scale).ln(), x),
            Profit::TableOnAtoms(_) => unreachable!("table profit is resolved per atom"),
        }
    }
}

// max(K - scale e^x, 0) written as -K expm1(x - x0), which keeps full
// relative precision near the kink where the direct subtraction cancels.
fn put_payoff(strike: f64, x0: f64, x: f64) -> f64 {
    (-strike * (x - x0).exp_m1()).max(0.0)
}

/// Effectiveness of a game: whether ∫_{a>1} a^ν dF converges for some ν > 0.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Effectiveness {
    Yes { nu: f64 },
    Declared { nu: f64 },
    No,
}

/// The scalar statistics of a game. `f64::INFINITY` is a first-class value.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct GameStats {
    /// E = ∫ a dF
    pub e: f64,
    /// H = ∫ 1/a dF
    pub h: f64,
    /// H_ξ = ∫ 1/(a - ξ) dF (+∞ when ξ carries an atom)
    pub h_xi: f64,
    /// 1/H, with the convention 1/∞ = 0
    pub inv_h: f64,
    /// ξ + 1/H_ξ, with the convention 1/∞ = 0
    pub xi_plus_inv_h_xi: f64,
    pub effectiveness: Effectiveness,
}

/// A validated game: measure + profit + the derived quantities.
#[derive(Debug, Clone)]
pub struct Game {
    measure: Measure,
    profit: Profit,
    xi: f64,
    atom_at_xi: bool,
    declared_nu: Option<f64>,
    stats: GameStats,
    cfg: QuadratureConfig,
}

const PROB_SUM_TOL: f64 = 1e-9;

fn validate_measure(measure: &Measure) -> Result<()> {
    match measure {
        Measure::DiscreteAtoms(atoms) => {
            if atoms.is_empty() {
                return Err(Error::MalformedSpec("atom list is empty".into()));
            }
            let mut total = 0.0;
            for (i, a) in atoms.iter().enumerate() {
                if !a.value.is_finite() {
                    return Err(Error::MalformedSpec("atom value must be finite".into()));
                }
                if !(a.prob > 0.0 && a.prob <= 1.0) {
                    return Err(Error::MalformedSpec(format!(
                        "atom probability {} outside (0, 1]",
                        a.prob
                    )));
                }
                if i > 0 && a.value <= atoms[i - 1].value {
                    return Err(Error::MalformedSpec(
                        "atom values must be strictly increasing".into(),
                    ));
                }
                total += a.prob;
            }
            if (total - 1.0).abs() > PROB_SUM_TOL {
                return Err(Error::MalformedSpec(format!(
                    "atom probabilities sum to {total}, expected 1"
                )));
            }
            Ok(())
        }
        Measure::Density { kind, lo, hi } => {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::MalformedSpec("density interval must be finite with lo < hi".into()));
            }
            if let DensityKind::LinearTilted { pivot } = kind {
                if !(pivot.is_finite() && pivot <= lo) {
                    return Err(Error::MalformedSpec("tilted density requires pivot <= lo".into()));
                }
            }
            Ok(())
        }
        Measure::NormalTransform { mean, sd } => {
            if !(mean.is_finite() && *sd > 0.0 && sd.is_finite()) {
                return Err(Error::MalformedSpec("normal transform requires finite mean and sd > 0".into()));
            }
            Ok(())
        }
        Measure::GeometricLadder { base } => {
            if !(*base > 1.0 && base.is_finite()) {
                return Err(Error::MalformedSpec("ladder base must exceed 1".into()));
            }
            Ok(())
        }
    }
}

fn validate_pairing(measure: &Measure, profit: &Profit) -> Result<()> {
    let ok = match (measure, profit) {
        (Measure::DiscreteAtoms(_), Profit::Identity | Profit::Affine { .. }) => true,
        (Measure::DiscreteAtoms(atoms), Profit::TableOnAtoms(t)) => t.len() == atoms.len(),
        (Measure::Density { .. }, Profit::Identity | Profit::Affine { .. }) => true,
        (Measure::NormalTransform { .. }, Profit::ExpScale { .. } | Profit::PutPayoff { .. }) => {
            true
        }
        (Measure::GeometricLadder { .. }, Profit::Identity) => true,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::MalformedSpec(
            "unsupported measure/profit combination".into(),
        ))
    }
}

impl Game {
    /// Validate and construct a game, computing ξ, the ξ-atom flag, and the
    /// statistics of the distribution.
    pub fn build(
        measure: Measure,
        profit: Profit,
        declared_nu: Option<f64>,
        cfg: QuadratureConfig,
    ) -> Result<Game> {
        cfg.validate()?;
        validate_measure(&measure)?;
        validate_pairing(&measure, &profit)?;
        if let Profit::ExpScale { scale } | Profit::PutPayoff { scale, .. } = &profit {
            if !(*scale > 0.0) {
                return Err(Error::MalformedSpec("profit scale must be positive".into()));
            }
        }
        if let Profit::TableOnAtoms(table) = &profit {
            if table.iter().any(|v| !v.is_finite()) {
                return Err(Error::MalformedSpec("profit table must be finite".into()));
            }
        }
        if let Profit::Affine { slope, intercept } = &profit {
            if !(slope.is_finite() && intercept.is_finite()) {
                return Err(Error::MalformedSpec("affine profit must be finite".into()));
            }
        }
        if let Profit::PutPayoff { strike, .. } = &profit {
            if !(*strike > 0.0) {
                return Err(Error::MalformedSpec("put strike must be positive".into()));
            }
        }

        let (xi, atom_at_xi) = infimum_of_profit(&measure, &profit);
        let mut game = Game {
            measure,
            profit,
            xi,
            atom_at_xi,
            declared_nu,
            stats: GameStats {
                e: 0.0,
                h: 0.0,
                h_xi: 0.0,
                inv_h: 0.0,
                xi_plus_inv_h_xi: 0.0,
                effectiveness: Effectiveness::No,
            },
            cfg,
        };
        game.stats = game.compute_stats()?;
        if !(game.stats.e > 0.0) {
            return Err(Error::NonPositiveExpectation(game.stats.e));
        }
        if game.profit_is_constant() {
            return Err(Error::ConstantProfit);
        }
        Ok(game)
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }
    pub fn profit(&self) -> &Profit {
        &self.profit
    }
    pub fn xi(&self) -> f64 {
        self.xi
    }
    pub fn atom_at_xi(&self) -> bool {
        self.atom_at_xi
    }
    pub fn stats(&self) -> &GameStats {
        &self.stats
    }
    pub fn cfg(&self) -> &QuadratureConfig {
        &self.cfg
    }

    /// (profit value, probability) pairs when the measure is purely atomic.
    pub fn profit_atoms(&self) -> Option<Vec<Atom>> {
        match (&self.measure, &self.profit) {
            (Measure::DiscreteAtoms(atoms), Profit::TableOnAtoms(table)) => Some(
                atoms
                    .iter()
                    .zip(table)
                    .map(|(a, &v)| Atom {
                        value: v,
                        prob: a.prob,
                    })
                    .collect(),
            ),
            (Measure::DiscreteAtoms(atoms), p) => Some(
                atoms
                    .iter()
                    .map(|a| Atom {
                        value: p.apply(a.value),
                        prob: a.prob,
                    })
                    .collect(),
            ),
            _ => None,
        }
    }

    /// ∫ f(a(x)) dF(x), at the game's own tolerances.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        self.integrate_cfg(f, &self.cfg)
    }

    /// ∫ f(a(x)) dF(x) at caller-supplied tolerances.
    pub fn integrate_cfg<F: Fn(f64) -> f64>(&self, f: F, cfg: &QuadratureConfig) -> Result<f64> {
        self.integrate_impl(f, true, cfg)
    }

    /// As `integrate_cfg`, for integrands known to be summable: ladder
    /// summation runs without the monotone-divergence test, which cannot
    /// tell a long plateau of a convergent solver integrand from genuine
    /// divergence.
    pub(crate) fn integrate_convergent<F: Fn(f64) -> f64>(
        &self,
        f: F,
        cfg: &QuadratureConfig,
    ) -> Result<f64> {
        self.integrate_impl(f, false, cfg)
    }

    fn integrate_impl<F: Fn(f64) -> f64>(
        &self,
        f: F,
        detect_divergence: bool,
        cfg: &QuadratureConfig,
    ) -> Result<f64> {
        match (&self.measure, &self.profit) {
            (Measure::DiscreteAtoms(_), _) => {
                let atoms = self.profit_atoms().expect("atomic measure");
                Ok(atoms.iter().map(|a| a.prob * f(a.value)).sum())
            }
            (Measure::Density { kind, lo, hi }, p) => {
                let est = integrate_finite(
                    |x| f(p.apply(x)) * density_at(kind, *lo, *hi, x),
                    *lo,
                    *hi,
                    cfg,
                )?;
                Ok(est.value)
            }
            (Measure::NormalTransform { mean, sd }, Profit::ExpScale { scale }) => {
                let scale = *scale;
                integrate_normal(|x| f(scale * x.exp()), *mean, *sd, cfg)
            }
            (Measure::NormalTransform { mean, sd }, Profit::PutPayoff { strike, scale }) => {
                // The payoff floor at 0 is an atom with analytic mass; the
                // smooth part integrates over {x < x0}, in the shifted
                // variable δ = x0 - x so the payoff -K expm1(-δ) keeps full
                // relative precision at the kink.
                let x0 = (strike / scale).ln();
                let q0 = 1.0 - normal_cdf((x0 - mean) / sd);
                let mut total = q0 * f(0.0);
                let d_lo = x0 - (mean + cfg.normal_tail_sigmas * sd);
                let d_hi = x0 - (mean - cfg.normal_tail_sigmas * sd);
                if d_hi > d_lo.max(0.0) {
                    let (strike, mean_, sd_) = (*strike, *mean, *sd);
                    let est = integrate_finite(
                        |d| {
                            f(-strike * (-d).exp_m1()) * normal_pdf(x0 - d, mean_, sd_)
                        },
                        d_lo.max(0.0),
                        d_hi,
                        cfg,
                    )?;
                    total += est.value;
                }
                Ok(total)
            }
            (Measure::GeometricLadder { base }, _) => {
                let base = *base;
                let term = |j: u32| {
                    // clamp past the f64 overflow horizon; every admissible
                    // integrand has a finite or polynomial limit in a
                    let a = base.powi(j as i32);
                    let a = if a.is_finite() { a } else { 1e300 };
                    f(a) * 0.5f64.powi(j as i32)
                };
                match sum_ladder_adaptive(term, detect_divergence, cfg)? {
                    LadderSum::Converged(v) => Ok(v),
                    LadderSum::DivergesPositive => Ok(f64::INFINITY),
                    LadderSum::DivergesNegative => Ok(f64::NEG_INFINITY),
                }
            }
            _ => unreachable!("pairing validated at construction"),
        }
    }

    /// P[a(x) < v].
    pub fn mass_below(&self, v: f64) -> f64 {
        match (&self.measure, &self.profit) {
            (Measure::DiscreteAtoms(_), _) => self
                .profit_atoms()
                .expect("atomic measure")
                .iter()
                .filter(|a| a.value < v)
                .map(|a| a.prob)
                .sum(),
            (Measure::Density { kind, lo, hi }, p) => {
                let (slope, intercept) = match p {
                    Profit::Identity => (1.0, 0.0),
                    Profit::Affine { slope, intercept } => (*slope, *intercept),
                    _ => unreachable!(),
                };
                let cut = (v - intercept) / slope;
                if slope > 0.0 {
                    density_cdf(kind, *lo, *hi, cut)
                } else {
                    1.0 - density_cdf(kind, *lo, *hi, cut)
                }
            }
            (Measure::NormalTransform { mean, sd }, Profit::ExpScale { scale }) => {
                if v <= 0.0 {
                    0.0
                } else {
                    normal_cdf(((v / scale).ln() - mean) / sd)
                }
            }
            (Measure::NormalTransform { mean, sd }, Profit::PutPayoff { strike, scale }) => {
                if v <= 0.0 {
                    0.0
                } else if v >= *strike {
                    1.0
                } else {
                    let xv = ((strike - v) / scale).ln();
                    1.0 - normal_cdf((xv - mean) / sd)
                }
            }
            (Measure::GeometricLadder { base }, _) => {
                let mut mass = 0.0;
                let mut val = *base;
                let mut p = 0.5;
                let mut j = 0u32;
                while val < v && j < 6000 {
                    mass += p;
                    val *= base;
                    p *= 0.5;
                    j += 1;
                }
                mass
            }
            _ => unreachable!(),
        }
    }

    fn profit_is_constant(&self) -> bool {
        match (&self.measure, &self.profit) {
            (Measure::DiscreteAtoms(_), _) => {
                let atoms = self.profit_atoms().expect("atomic measure");
                let lo = atoms.iter().map(|a| a.value).fold(f64::INFINITY, f64::min);
                let hi = atoms
                    .iter()
                    .map(|a| a.value)
                    .fold(f64::NEG_INFINITY, f64::max);
                hi - lo <= 1e-12 * hi.abs().max(1.0)
            }
            (Measure::Density { .. }, Profit::Affine { slope, .. }) => *slope == 0.0,
            _ => false,
        }
    }

    fn compute_stats(&self) -> Result<GameStats> {
        let xi = self.xi;
        let (e, h, h_xi) = match (&self.measure, &self.profit) {
            (Measure::DiscreteAtoms(_), _) => {
                let atoms = self.profit_atoms().expect("atomic measure");
                let e = atoms.iter().map(|a| a.prob * a.value).sum();
                let h = if atoms.iter().any(|a| a.value == 0.0) {
                    f64::INFINITY
                } else {
                    atoms.iter().map(|a| a.prob / a.value).sum()
                };
                // the minimum profit value always carries mass
                (e, h, f64::INFINITY)
            }
            (Measure::Density { kind, lo, hi }, p) => {
                let (slope, intercept) = match p {
                    Profit::Identity => (1.0, 0.0),
                    Profit::Affine { slope, intercept } => (*slope, *intercept),
                    _ => unreachable!(),
                };
                if slope == 0.0 {
                    // degenerate; rejected by the constant-profit check
                    return Ok(GameStats {
                        e: intercept,
                        h: f64::INFINITY,
                        h_xi: f64::INFINITY,
                        inv_h: 0.0,
                        xi_plus_inv_h_xi: xi,
                        effectiveness: Effectiveness::No,
                    });
                }
                let a_lo = slope * lo + intercept;
                let a_hi = slope * hi + intercept;
                let (a_min, a_max) = if a_lo <= a_hi { (a_lo, a_hi) } else { (a_hi, a_lo) };
                let x_at_min = if slope > 0.0 { *lo } else { *hi };
                let e = self.integrate(|a| a)?;
                let h = if a_min > 0.0 || a_max < 0.0 {
                    self.integrate(|a| 1.0 / a)?
                } else if a_min == 0.0 && density_at(kind, *lo, *hi, x_at_min) == 0.0 {
                    self.integrate(|a| 1.0 / a)?
                } else {
                    // 1/a has a non-integrable singularity inside the support
                    f64::INFINITY
                };
                let h_xi = if density_at(kind, *lo, *hi, x_at_min) == 0.0 {
                    self.integrate(|a| 1.0 / (a - xi))?
                } else {
                    f64::INFINITY
                };
                (e, h, h_xi)
            }
            (Measure::NormalTransform { .. }, Profit::ExpScale { .. }) => {
                let e = self.integrate(|a| a)?;
                let h = self.integrate(|a| 1.0 / a)?;
                // ξ = 0 with no atom, so H_ξ coincides with H
                (e, h, h)
            }
            (Measure::NormalTransform { .. }, Profit::PutPayoff { .. }) => {
                let e = self.integrate(|a| a)?;
                (e, f64::INFINITY, f64::INFINITY)
            }
            (Measure::GeometricLadder { base }, _) => {
                let b = *base;
                let e = if b >= 2.0 { f64::INFINITY } else { b / (2.0 - b) };
                let h = 1.0 / (2.0 * b - 1.0);
                (e, h, f64::INFINITY)
            }
            _ => unreachable!(),
        };

        let inv_h = if h.is_finite() { 1.0 / h } else { 0.0 };
        let inv_h_xi = if h_xi.is_finite() { 1.0 / h_xi } else { 0.0 };
        Ok(GameStats {
            e,
            h,
            h_xi,
            inv_h,
            xi_plus_inv_h_xi: xi + inv_h_xi,
            effectiveness: self.analytic_effectiveness(),
        })
    }

    fn analytic_effectiveness(&self) -> Effectiveness {
        match &self.measure {
            Measure::GeometricLadder { base } => {
                // Σ (b^j)^ν / 2^j converges iff ν < ln2 / ln b
                let threshold = std::f64::consts::LN_2 / base.ln();
                Effectiveness::Yes {
                    nu: 0.5 * threshold,
                }
            }
            // bounded profit, or a lognormal with every moment finite
            _ => Effectiveness::Yes {
                nu: self.declared_nu.unwrap_or(1.0),
            },
        }
    }

    /// Effectiveness certified against a caller-supplied grid of exponents.
    ///
    /// Returns `Yes` with the smallest grid ν whose tail integral converges;
    /// `Declared` when no grid ν is certifiable but the game description
    /// asserted an exponent; `No` when divergence is analytically certain
    /// for every grid ν.
    pub fn effectiveness(&self, nu_grid: &[f64]) -> Effectiveness {
        let mut grid: Vec<f64> = nu_grid.iter().copied().filter(|v| *v > 0.0).collect();
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        match &self.measure {
            Measure::GeometricLadder { base } => {
                let threshold = std::f64::consts::LN_2 / base.ln();
                if let Some(&nu) = grid.iter().find(|&&nu| nu < threshold) {
                    Effectiveness::Yes { nu }
                } else if let Some(nu) = self.declared_nu {
                    Effectiveness::Declared { nu }
                } else {
                    Effectiveness::No
                }
            }
            _ => Effectiveness::Yes {
                nu: grid.first().copied().unwrap_or(1.0),
            },
        }
    }
}

fn infimum_of_profit(measure: &Measure, profit: &Profit) -> (f64, bool) {
    match (measure, profit) {
        (Measure::DiscreteAtoms(_), Profit::TableOnAtoms(table)) => {
            let xi = table.iter().copied().fold(f64::INFINITY, f64::min);
            (xi, true)
        }
        (Measure::DiscreteAtoms(atoms), p) => {
            let xi = atoms
                .iter()
                .map(|a| p.apply(a.value))
                .fold(f64::INFINITY, f64::min);
            (xi, true)
        }
        (Measure::Density { lo, hi, .. }, p) => {
            let a_lo = p.apply(*lo);
            let a_hi = p.apply(*hi);
            (a_lo.min(a_hi), false)
        }
        (Measure::NormalTransform { .. }, Profit::ExpScale { .. }) => (0.0, false),
        (Measure::NormalTransform { .. }, Profit::PutPayoff { .. }) => (0.0, true),
        (Measure::GeometricLadder { base }, _) => (*base, true),
        _ => unreachable!(),
    }
}

fn density_at(kind: &DensityKind, lo: f64, hi: f64, x: f64) -> f64 {
    match kind {
        DensityKind::Uniform => 1.0 / (hi - lo),
        DensityKind::LinearTilted { pivot } => {
            let z = ((hi - pivot).powi(2) - (lo - pivot).powi(2)) / 2.0;
            (x - pivot) / z
        }
    }
}

fn density_cdf(kind: &DensityKind, lo: f64, hi: f64, x: f64) -> f64 {
    let x = x.clamp(lo, hi);
    match kind {
        DensityKind::Uniform => (x - lo) / (hi - lo),
        DensityKind::LinearTilted { pivot } => {
            let z = (hi - pivot).powi(2) - (lo - pivot).powi(2);
            ((x - pivot).powi(2) - (lo - pivot).powi(2)) / z
        }
    }
}

/// Convenience constructors used across the crate and the CLI.
impl Game {
    pub fn discrete(atoms: &[(f64, f64)], cfg: QuadratureConfig) -> Result<Game> {
        let atoms = atoms
            .iter()
            .map(|&(value, prob)| Atom { value, prob })
            .collect();
        Game::build(Measure::DiscreteAtoms(atoms), Profit::Identity, None, cfg)
    }

    pub fn uniform(lo: f64, hi: f64, cfg: QuadratureConfig) -> Result<Game> {
        Game::build(
            Measure::Density {
                kind: DensityKind::Uniform,
                lo,
                hi,
            },
            Profit::Identity,
            None,
            cfg,
        )
    }

    pub fn tilted(lo: f64, hi: f64, pivot: f64, cfg: QuadratureConfig) -> Result<Game> {
        Game::build(
            Measure::Density {
                kind: DensityKind::LinearTilted { pivot },
                lo,
                hi,
            },
            Profit::Identity,
            None,
            cfg,
        )
    }

    pub fn st_petersburg(base: f64, cfg: QuadratureConfig) -> Result<Game> {
        Game::build(
            Measure::GeometricLadder { base },
            Profit::Identity,
            None,
            cfg,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn game1_construction() {
        let g = game1();
        assert_eq!(g.xi(), 0.0);
        assert!(g.atom_at_xi());
        assert_eq!(g.stats().e, 1.5);
        assert!(g.stats().h.is_infinite());
        assert_eq!(g.stats().inv_h, 0.0);
    }

    #[test]
    fn uniform_construction() {
        let g = Game::uniform(0.0, 1.0, cfg()).unwrap();
        assert_eq!(g.xi(), 0.0);
        assert!(!g.atom_at_xi());
        assert!((g.stats().e - 0.5).abs() < 1e-12);
        assert!(g.stats().h.is_infinite());
        assert!(g.stats().h_xi.is_infinite());
    }

    #[test]
    fn constant_profit_rejected() {
        let err = Game::discrete(&[(1.0, 1.0)], cfg()).unwrap_err();
        assert!(matches!(err, Error::ConstantProfit));
    }

    #[test]
    fn non_positive_expectation_rejected() {
        let err = Game::discrete(&[(-2.0, 0.5), (1.0, 0.5)], cfg()).unwrap_err();
        assert!(matches!(err, Error::NonPositiveExpectation(_)));
    }

    #[test]
    fn malformed_atoms_rejected() {
        assert!(Game::discrete(&[(1.0, 0.5), (0.5, 0.5)], cfg()).is_err());
        assert!(Game::discrete(&[(0.0, 0.3), (1.0, 0.3)], cfg()).is_err());
        assert!(Game::discrete(&[], cfg()).is_err());
    }

    #[test]
    fn st_petersburg_stats() {
        let g = Game::st_petersburg(2.0, cfg()).unwrap();
        assert_eq!(g.xi(), 2.0);
        assert!(g.atom_at_xi());
        assert!(g.stats().e.is_infinite());
        assert!((g.stats().h - 1.0 / 3.0).abs() < 1e-14);
        assert!(g.stats().h_xi.is_infinite());
    }

    #[test]
    fn game2_stats() {
        let g = game2();
        assert!((g.stats().e - 1.3125).abs() < 1e-12);
        assert!((g.stats().h - 1.05).abs() < 1e-12);
        assert!((g.stats().inv_h - 1.0 / 1.05).abs() < 1e-12);
    }

    #[test]
    fn integrate_identity_and_mass() {
        let g = game1();
        assert!((g.integrate(|a| a).unwrap() - 1.5).abs() < 1e-14);
        assert!((g.integrate(|_| 1.0).unwrap() - 1.0).abs() < 1e-14);
        let u = Game::uniform(0.0, 1.0, cfg()).unwrap();
        assert!((u.integrate(|_| 1.0).unwrap() - 1.0).abs() < 1e-10);
        let t = Game::tilted(-1.0, 2.0, -1.0, cfg()).unwrap();
        assert!((t.integrate(|_| 1.0).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ladder_log_integral() {
        let g = Game::st_petersburg(2.0, cfg()).unwrap();
        let v = g.integrate(|a| a.ln()).unwrap();
        assert!((v - 2.0 * std::f64::consts::LN_2).abs() < 1e-11, "got {v}");
    }

    #[test]
    fn ladder_divergent_expectation_detected() {
        let g = Game::st_petersburg(2.0, cfg()).unwrap();
        assert!(g.integrate(|a| a).unwrap().is_infinite());
    }

    #[test]
    fn tilted_uniform_stats() {
        // density (x+1)/4.5 on [-1, 2]
        let g = Game::tilted(-1.0, 2.0, -1.0, cfg()).unwrap();
        assert_eq!(g.xi(), -1.0);
        assert!(!g.atom_at_xi());
        assert!((g.stats().e - 1.0).abs() < 1e-10);
        assert!((g.stats().h_xi - 2.0 / 3.0).abs() < 1e-10);
        assert!((g.stats().xi_plus_inv_h_xi - 0.5).abs() < 1e-10);
    }

    #[test]
    fn effectiveness_certification() {
        let stp = Game::st_petersburg(2.0, cfg()).unwrap();
        assert_eq!(stp.effectiveness(&[0.5]), Effectiveness::Yes { nu: 0.5 });
        assert_eq!(stp.effectiveness(&[1.5, 2.0]), Effectiveness::No);
        let g = game1();
        assert_eq!(g.effectiveness(&[0.25]), Effectiveness::Yes { nu: 0.25 });
    }

    #[test]
    fn stats_invariants_hold_on_corpus() {
        for g in [game1(), game2(), Game::st_petersburg(2.0, cfg()).unwrap()] {
            let s = g.stats();
            if s.e.is_finite() {
                assert!(s.xi_plus_inv_h_xi < s.e);
            }
            if g.xi() > 0.0 {
                assert!(g.xi() < s.inv_h && s.inv_h < s.e);
            }
            if g.atom_at_xi() {
                assert!(s.h_xi.is_infinite());
            }
        }
    }

    #[test]
    fn games_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Game>();
        assert_send_sync::<GameStats>();
    }

    #[test]
    fn mass_below_families() {
        let g = game1();
        assert_eq!(g.mass_below(0.0), 0.0);
        assert_eq!(g.mass_below(1.0), 0.5);
        assert_eq!(g.mass_below(4.0), 1.0);
        let u = Game::uniform(0.0, 1.0, cfg()).unwrap();
        assert!((u.mass_below(0.25) - 0.25).abs() < 1e-14);
        let s = Game::st_petersburg(2.0, cfg()).unwrap();
        assert_eq!(s.mass_below(2.0), 0.0);
        assert_eq!(s.mass_below(4.1), 0.75);
    }
}
