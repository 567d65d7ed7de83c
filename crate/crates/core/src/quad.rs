//! One integration engine for the whole crate: adaptive Gauss–Kronrod
//! quadrature on finite intervals (with endpoint-singularity softening),
//! truncated integration against a normal density, and geometric series
//! summation with explicit tail bounds.

use crate::error::{Error, Result};
use std::collections::BinaryHeap;

/// Tolerances and budgets shared by every integration routine.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: u32,
    /// Half-width of the truncation window for normal-law integrals,
    /// in standard deviations.
    pub normal_tail_sigmas: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            normal_tail_sigmas: 12.0,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::Domain(
                "quadrature tolerances must be strictly positive".into(),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be positive".into()));
        }
        if !(self.normal_tail_sigmas >= 8.0) {
            return Err(Error::Domain("normal_tail_sigmas must be at least 8".into()));
        }
        Ok(())
    }

    /// Copy with tolerances tightened to at most `abs`/`rel`.
    pub fn tightened(&self, abs: f64, rel: f64) -> Self {
        QuadratureConfig {
            abs_tol: self.abs_tol.min(abs),
            rel_tol: self.rel_tol.min(rel),
            ..*self
        }
    }
}

/// An integral value together with its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights. Standard values, e.g. QUADPACK's qk15.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One G7/K15 evaluation over [a, b]: (kronrod value, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);

    let mut res_gauss = WG[3] * fc;
    let mut res_kronrod = WGK[7] * fc;
    let mut res_abs = WGK[7] * fc.abs();
    let mut fv = [0.0f64; 15];
    fv[7] = fc;

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = 0.0;
    for (j, v) in fv.iter().enumerate() {
        let w = if j < 8 { WGK[j] } else { WGK[14 - j] };
        res_asc += w * (v - mean).abs();
    }

    let value = res_kronrod * half;
    if !value.is_finite() {
        return Err(Error::QuadratureFailure(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut err = ((res_kronrod - res_gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((value, err))
}

#[derive(Debug)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Adaptive bisection with G7/K15 panels; no endpoint transformation.
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: u32,
) -> Result<Estimate> {
    let (v, e) = gk15(f, lo, hi)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        lo,
        hi,
        value: v,
        error: e,
    });
    let mut total_value = v;
    let mut total_error = e;

    for _ in 0..max_subdivisions {
        if total_error <= abs_tol.max(rel_tol * total_value.abs()) {
            break;
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            // not splittable in f64; the final tolerance check decides
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(f, worst.lo, mid)?;
        let (v2, e2) = gk15(f, mid, worst.hi)?;
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Panel {
            lo: worst.lo,
            hi: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            lo: mid,
            hi: worst.hi,
            value: v2,
            error: e2,
        });
    }

    if total_error > abs_tol.max(rel_tol * total_value.abs()) {
        if std::env::var("GP_QUAD_DEBUG").is_ok() {
            let mut panels: Vec<_> = heap.into_vec();
            panels.sort_by(|a, b| b.error.partial_cmp(&a.error).unwrap());
            eprintln!("  stall: value {total_value:.9e} err {total_error:.3e}");
            for p in panels.iter().take(5) {
                eprintln!(
                    "  panel [{:.9e}, {:.9e}] w {:.3e} v {:.6e} err {:.3e}",
                    p.lo,
                    p.hi,
                    p.hi - p.lo,
                    p.value,
                    p.error
                );
            }
        }
        return Err(Error::QuadratureFailure(format!(
            "tolerance not met on [{lo}, {hi}]: error {total_error:.3e} after {max_subdivisions} subdivisions"
        )));
    }
    Ok(Estimate {
        value: total_value,
        error: total_error,
    })
}

/// Integrate `f` over the finite interval `[lo, hi]`.
///
/// The interval is split at its midpoint and each half is mapped through
/// x = endpoint ± w·s², which turns integrable log-type endpoint
/// singularities into bounded integrands before the adaptive rule runs.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Domain("integration bounds must be finite".into()));
    }
    if lo == hi {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    if lo > hi {
        let mut est = integrate_finite(f, hi, lo, cfg)?;
        est.value = -est.value;
        return Ok(est);
    }
    let w = 0.5 * (hi - lo);
    let budget = cfg.max_subdivisions / 2;
    let left = adaptive(
        &|s: f64| f(lo + w * s * s) * 2.0 * w * s,
        0.0,
        1.0,
        0.5 * cfg.abs_tol,
        0.5 * cfg.rel_tol,
        budget,
    )?;
    let right = adaptive(
        &|s: f64| f(hi - w * s * s) * 2.0 * w * s,
        0.0,
        1.0,
        0.5 * cfg.abs_tol,
        0.5 * cfg.rel_tol,
        budget,
    )?;
    Ok(Estimate {
        value: left.value + right.value,
        error: left.error + right.error,
    })
}

/// Standard normal density.
pub fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
}

/// Integrate `f` against the Normal(mean, sd) density.
///
/// The window is `mean ± normal_tail_sigmas·sd`; the discarded tail mass is
/// bounded with the Mills ratio, scaled by `|f|` at the window edges, and
/// folded into the error budget.
pub fn integrate_normal<F: Fn(f64) -> f64>(
    f: F,
    mean: f64,
    sd: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(sd > 0.0) {
        return Err(Error::Domain("normal sd must be positive".into()));
    }
    let k = cfg.normal_tail_sigmas;
    let lo = mean - k * sd;
    let hi = mean + k * sd;
    let est = integrate_finite(|x| f(x) * normal_pdf(x, mean, sd), lo, hi, cfg)?;
    // Mills ratio: P[Z > k] <= phi(k)/k.
    let tail_mass = (-0.5 * k * k).exp() / (k * (2.0 * std::f64::consts::PI).sqrt());
    let tail = tail_mass * (f(lo).abs() + f(hi).abs());
    let error = est.error + tail;
    if error > cfg.abs_tol.max(cfg.rel_tol * est.value.abs()) {
        return Err(Error::QuadratureFailure(format!(
            "normal-tail budget exceeded: error {error:.3e}"
        )));
    }
    Ok(est.value)
}

/// Sum `Σ_{j>=1} term(j)` for a series dominated by a geometric envelope.
///
/// `tail_ratio` is the declared envelope ratio r ∈ (0, 1): eventually
/// |term(j+1)| <= r·|term(j)|. Summation stops once the geometric remainder
/// bound `|term(j)|·r/(1-r)` drops below `abs_tol`. Terms that outgrow the
/// envelope after the burn-in raise `TailBoundViolated`.
pub fn sum_ladder<F: Fn(u32) -> f64>(
    term: F,
    tail_ratio: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(tail_ratio > 0.0 && tail_ratio < 1.0) {
        return Err(Error::Domain("tail ratio must lie in (0, 1)".into()));
    }
    const BURN_IN: u32 = 16;
    let max_terms = 20_000u32;
    let mut sum = 0.0;
    let mut prev_abs = f64::INFINITY;
    for j in 1..=max_terms {
        let t = term(j);
        if !t.is_finite() {
            return Err(Error::QuadratureFailure(format!(
                "non-finite series term at j = {j}"
            )));
        }
        sum += t;
        let abs = t.abs();
        if j > BURN_IN && abs > prev_abs * tail_ratio * (1.0 + 1e-9) && abs > cfg.abs_tol {
            return Err(Error::TailBoundViolated { index: j });
        }
        if j >= BURN_IN {
            let remainder = abs * tail_ratio / (1.0 - tail_ratio);
            if remainder < cfg.abs_tol {
                return Ok(sum);
            }
        }
        prev_abs = abs;
    }
    Err(Error::QuadratureFailure(
        "series did not meet tolerance within the term budget".into(),
    ))
}

/// Outcome of a ladder sum whose envelope is measured rather than declared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LadderSum {
    Converged(f64),
    DivergesPositive,
    DivergesNegative,
}

/// Sum `Σ_{j>=1} term(j)` with the decay ratio estimated on the fly.
///
/// With `detect_divergence` set, terms of a fixed sign that have not decayed
/// between index j/2 and j are reported as ±∞. Integrands known to be
/// summable must pass `false`: they can hold a plateau for arbitrarily many
/// indices (the first-order-condition integrand on a heavy-tail ladder stays
/// near 1/u for log2(u/t) terms), which no finite-window test can tell apart
/// from divergence.
pub fn sum_ladder_adaptive<F: Fn(u32) -> f64>(
    term: F,
    detect_divergence: bool,
    cfg: &QuadratureConfig,
) -> Result<LadderSum> {
    const BURN_IN: u32 = 64;
    let max_terms = 20_000u32;
    let tol = cfg.abs_tol.min(1e-12);
    let mut sum = 0.0;
    let mut history: Vec<f64> = Vec::with_capacity(128);
    let mut last_sign_change = 0u32;
    let mut prev = 0.0f64;
    for j in 1..=max_terms {
        let t = term(j);
        if !t.is_finite() {
            return Err(Error::QuadratureFailure(format!(
                "non-finite series term at j = {j}"
            )));
        }
        sum += t;
        history.push(t);
        if j > 1 && (t > 0.0) != (prev > 0.0) && t != 0.0 {
            last_sign_change = j;
        }
        prev = t;
        if j >= BURN_IN {
            let half = history[(j / 2 - 1) as usize].abs();
            let cur = t.abs();
            if detect_divergence && cur > 0.5 * half && cur > tol && last_sign_change < j / 2 {
                return Ok(if t > 0.0 {
                    LadderSum::DivergesPositive
                } else {
                    LadderSum::DivergesNegative
                });
            }
            // measured decay over the trailing stretch; a remainder claim is
            // made only once the decay is clearly geometric
            let mut ratio: f64 = 0.0;
            for k in (j - 8) as usize..j as usize {
                let a = history[k - 1].abs();
                if a > 0.0 {
                    ratio = ratio.max(history[k].abs() / a);
                }
            }
            if ratio < 0.97 {
                let remainder = cur * ratio / (1.0 - ratio);
                if remainder < tol {
                    return Ok(LadderSum::Converged(sum));
                }
            }
        }
    }
    Err(Error::QuadratureFailure(
        "series did not meet tolerance within the term budget".into(),
    ))
}
