//! Growth-optimal investment and game pricing.
//!
//! A game is a profit function paired with a probability measure. Investing
//! a fixed proportion t of current capital at price u multiplies capital by
//! a(x)t/u - t + 1 per attempt. This crate finds the proportion that
//! maximizes the limit expectation of the growth rate per attempt, and
//! prices games by inverting that maximized growth against a riskless
//! rate — which is not the price implied by discounted expectation, and in
//! particular differs from the Black–Scholes value of a European put.

// validation guards use the negated form deliberately: `!(x > 0.0)` also
// rejects NaN, which `x <= 0.0` would let through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gamespec;
pub mod growth;
pub mod joint;
pub mod measure;
pub mod options;
pub mod pricer;
pub mod quad;
pub mod sequence;

pub use error::{Error, Result};
pub use gamespec::{build_game, GameSpec};
pub use growth::{
    eta, growth, growth_range_sup, kelly_binary, optimal_proportion, pre_optimal, u_max, w,
    ProportionResult, Regime,
};
pub use joint::{joint_growth, joint_optimize, joint_price, JointResult};
pub use measure::{Atom, DensityKind, Effectiveness, Game, GameStats, Measure, Profit};
pub use options::{
    black_scholes_put, lognormal_game, normal_cdf, put_expectation, put_game, MarketParams,
};
pub use pricer::{
    expectation_price, growth_target, price, pricing_curve, Compounding, GrowthCurvePoint,
    PriceResult,
};
pub use quad::{integrate_finite, integrate_normal, sum_ladder, Estimate, QuadratureConfig};
pub use sequence::{
    convergence_table, sequence_stats, step_approx, ConvergenceTable, SequenceStats, StepApprox,
};
