//! The JSON game-description format consumed by the CLI: each file maps to
//! exactly one builder call.

use crate::error::{Error, Result};
use crate::measure::{Atom, DensityKind, Game, Measure, Profit};
use crate::options::{lognormal_game, put_game, MarketParams};
use crate::quad::QuadratureConfig;
use serde::Deserialize;

/// A parsed game description.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GameSpec {
    Discrete {
        /// (value, probability) pairs, values strictly increasing.
        atoms: Vec<(f64, f64)>,
        #[serde(default)]
        effective_nu: Option<f64>,
    },
    Uniform {
        lo: f64,
        hi: f64,
        #[serde(default)]
        effective_nu: Option<f64>,
    },
    Tilted {
        lo: f64,
        hi: f64,
        /// Density is proportional to (x - c); c <= lo.
        c: f64,
        #[serde(default)]
        effective_nu: Option<f64>,
    },
    Lognormal {
        spot: f64,
        sigma: f64,
        rate: f64,
        #[serde(default)]
        effective_nu: Option<f64>,
    },
    Put {
        spot: f64,
        strike: f64,
        horizon: f64,
        sigma: f64,
        rate: f64,
        #[serde(default)]
        effective_nu: Option<f64>,
    },
    #[serde(rename = "stpetersburg")]
    StPetersburg {
        #[serde(default = "default_base")]
        base: f64,
        #[serde(default)]
        effective_nu: Option<f64>,
    },
}

fn default_base() -> f64 {
    2.0
}

impl GameSpec {
    pub fn parse(json: &str) -> Result<GameSpec> {
        serde_json::from_str(json).map_err(|e| Error::MalformedSpec(e.to_string()))
    }

    pub fn declared_nu(&self) -> Option<f64> {
        match self {
            GameSpec::Discrete { effective_nu, .. }
            | GameSpec::Uniform { effective_nu, .. }
            | GameSpec::Tilted { effective_nu, .. }
            | GameSpec::Lognormal { effective_nu, .. }
            | GameSpec::Put { effective_nu, .. }
            | GameSpec::StPetersburg { effective_nu, .. } => *effective_nu,
        }
    }

    /// Build the validated game this description denotes.
    pub fn build(&self, cfg: QuadratureConfig) -> Result<Game> {
        match self {
            GameSpec::Discrete {
                atoms,
                effective_nu,
            } => {
                let atoms = atoms
                    .iter()
                    .map(|&(value, prob)| Atom { value, prob })
                    .collect();
                Game::build(
                    Measure::DiscreteAtoms(atoms),
                    Profit::Identity,
                    *effective_nu,
                    cfg,
                )
            }
            GameSpec::Uniform {
                lo,
                hi,
                effective_nu,
            } => Game::build(
                Measure::Density {
                    kind: DensityKind::Uniform,
                    lo: *lo,
                    hi: *hi,
                },
                Profit::Identity,
                *effective_nu,
                cfg,
            ),
            GameSpec::Tilted {
                lo,
                hi,
                c,
                effective_nu,
            } => Game::build(
                Measure::Density {
                    kind: DensityKind::LinearTilted { pivot: *c },
                    lo: *lo,
                    hi: *hi,
                },
                Profit::Identity,
                *effective_nu,
                cfg,
            ),
            GameSpec::Lognormal {
                spot, sigma, rate, ..
            } => lognormal_game(*spot, *sigma, *rate, cfg),
            GameSpec::Put {
                spot,
                strike,
                horizon,
                sigma,
                rate,
                ..
            } => put_game(
                &MarketParams {
                    spot: *spot,
                    strike: *strike,
                    horizon: *horizon,
                    sigma: *sigma,
                    rate: *rate,
                },
                cfg,
            ),
            GameSpec::StPetersburg {
                base,
                effective_nu,
            } => Game::build(
                Measure::GeometricLadder { base: *base },
                Profit::Identity,
                *effective_nu,
                cfg,
            ),
        }
    }

    /// Market parameters, when the description is an option game.
    pub fn market_params(&self) -> Option<MarketParams> {
        match self {
            GameSpec::Put {
                spot,
                strike,
                horizon,
                sigma,
                rate,
                ..
            } => Some(MarketParams {
                spot: *spot,
                strike: *strike,
                horizon: *horizon,
                sigma: *sigma,
                rate: *rate,
            }),
            _ => None,
        }
    }
}

/// Parse a description and build the game in one step.
pub fn build_game(json: &str, cfg: QuadratureConfig) -> Result<Game> {
    GameSpec::parse(json)?.build(cfg)
}
