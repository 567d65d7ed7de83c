//! The double sequence of growth-rate random variables: dyadic step
//! approximations of the profit, closed-form mean and variance of the
//! per-attempt growth rate after n plays, and convergence tables toward
//! the limit expectation of growth rate.

use crate::error::{Error, Result};
use crate::growth::growth;
use crate::measure::{Atom, Game};

/// A level-N step approximation of a game's profit from below.
#[derive(Debug, Clone, serde::Serialize)]
pub struct StepApprox {
    pub level: u32,
    /// (step value, probability), values strictly increasing.
    pub atoms: Vec<Atom>,
}

/// Mean and variance of the growth rate per attempt after `attempts` plays
/// of a level-`level` step approximation.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SequenceStats {
    pub level: u32,
    pub attempts: u64,
    pub mean: f64,
    pub variance: f64,
}

/// Convergence study rows plus the limiting growth rate.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<SequenceStats>,
    pub limit: f64,
}

/// Build the level-N approximation: step values ξ + (j-1)/2^N for
/// j = 1..M-1 with M = 2^N N + 1, capped at ξ + N, with slab masses taken
/// from the game's distribution. Empty slabs are dropped.
pub fn step_approx(g: &Game, level: u32) -> Result<StepApprox> {
    if level == 0 {
        return Err(Error::Domain("approximation level must be at least 1".into()));
    }
    let cells = 2f64.powi(level as i32) * level as f64;
    if cells > 1e7 {
        return Err(Error::Domain(format!(
            "approximation level {level} needs {cells:.0} slabs; too large"
        )));
    }
    let m = cells as u64 + 1;
    let xi = g.xi();
    let width = 0.5f64.powi(level as i32);

    let mut atoms = Vec::new();
    let mut below_prev = 0.0; // P[a < ξ] = 0 by definition of ξ
    for j in 1..m {
        let edge_hi = xi + j as f64 * width;
        let below = g.mass_below(edge_hi);
        let p = (below - below_prev).max(0.0);
        if p > 0.0 {
            atoms.push(Atom {
                value: xi + (j - 1) as f64 * width,
                prob: p,
            });
        }
        below_prev = below;
    }
    let cap_mass = (1.0 - below_prev).max(0.0);
    if cap_mass > 0.0 {
        atoms.push(Atom {
            value: xi + level as f64,
            prob: cap_mass,
        });
    }
    Ok(StepApprox { level, atoms })
}

/// Closed-form E[X_{N,n}] and V[X_{N,n}]:
/// mean = (Σ_j (a_j t/u - t + 1)^{1/n} p_j)^n and the matching second
/// moment, evaluated in log space so that n up to 1e9 stays stable.
pub fn sequence_stats(s: &StepApprox, u: f64, t: f64, attempts: u64) -> Result<SequenceStats> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!("u must be positive, got {u}")));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be non-negative, got {t}")));
    }
    if attempts == 0 {
        return Err(Error::Domain("attempt count must be at least 1".into()));
    }
    let n = attempts as f64;
    let mut log_terms = Vec::with_capacity(s.atoms.len());
    for a in &s.atoms {
        let z = a.value * t / u - t + 1.0;
        if !(z > 0.0) {
            return Err(Error::Domain(format!(
                "growth factor non-positive at step value {} (t = {t}, u = {u})",
                a.value
            )));
        }
        log_terms.push((z.ln(), a.prob));
    }
    // Σ p_j z_j^{k/n} = 1 + Σ p_j expm1(k x_j / n) since Σ p_j = 1
    let moment = |k: f64| -> f64 {
        let s: f64 = log_terms
            .iter()
            .map(|&(x, p)| p * (k * x / n).exp_m1())
            .sum();
        (n * s.ln_1p()).exp()
    };
    let mean = moment(1.0);
    let second = moment(2.0);
    let mut variance = second - mean * mean;
    if variance < 0.0 && variance > -1e-12 {
        variance = 0.0;
    }
    Ok(SequenceStats {
        level: s.level,
        attempts,
        mean,
        variance,
    })
}

/// Tabulate E[X_{N,n}] and V[X_{N,n}] over the given levels and attempt
/// counts, with the limiting growth rate G_u(t) as the target.
pub fn convergence_table(
    g: &Game,
    u: f64,
    t: f64,
    levels: &[u32],
    attempts: &[u64],
) -> Result<ConvergenceTable> {
    let mut rows = Vec::with_capacity(levels.len() * attempts.len());
    for &level in levels {
        let approx = step_approx(g, level)?;
        for &n in attempts {
            rows.push(sequence_stats(&approx, u, t, n)?);
        }
    }
    let limit = growth(g, u, t)?;
    Ok(ConvergenceTable { rows, limit })
}
