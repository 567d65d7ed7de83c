//! growthpricer: growth-optimal proportions and growth-rate prices for
//! stochastic games described by small JSON files.

// `!(hi > lo)` rejects NaN bounds as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod output;

use clap::{Parser, Subcommand, ValueEnum};
use growthpricer_core as core;
use growthpricer_core::{Compounding, Effectiveness, Game, GameSpec, QuadratureConfig};
use output::{BsCompareOut, Format, PriceOut, SimulateOut, StatsOut};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "growthpricer",
    about = "Growth-optimal investment proportions and game prices",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Absolute quadrature tolerance (default 1e-10; env GROWTHPRICER_TOL)
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    /// Relative quadrature tolerance (default 1e-10; env GROWTHPRICER_TOL)
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CompoundingArg {
    Simple,
    Continuous,
}

impl From<CompoundingArg> for Compounding {
    fn from(c: CompoundingArg) -> Compounding {
        match c {
            CompoundingArg::Simple => Compounding::Simple,
            CompoundingArg::Continuous => Compounding::Continuous,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the statistics E, H, H_xi and the effectiveness of a game
    Stats {
        #[arg(long)]
        game: PathBuf,
    },
    /// Optimal proportion of investment at a given price
    Proportion {
        #[arg(long)]
        game: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        price: f64,
    },
    /// Solve the pricing equation against a riskless rate
    Price {
        #[arg(long)]
        game: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        rate: f64,
        #[arg(long, value_enum)]
        compounding: CompoundingArg,
        /// Period in years; requires continuous compounding
        #[arg(long, allow_negative_numbers = true)]
        horizon: Option<f64>,
    },
    /// Pricing curve u -> (t_u, growth) over a grid lo:hi:steps
    Curve {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        grid: String,
    },
    /// Mean and variance of the growth rate per attempt for step
    /// approximations of the game
    Simulate {
        #[arg(long)]
        game: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        u: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        /// Comma-separated approximation levels
        #[arg(long = "N-list")]
        level_list: String,
        /// Comma-separated attempt counts
        #[arg(long = "n-list")]
        attempt_list: String,
    },
    /// Optimal proportions for two independent games at a shared price
    Joint {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        game2: PathBuf,
        #[arg(long, conflicts_with_all = ["rate", "compounding"], allow_negative_numbers = true)]
        price: Option<f64>,
        #[arg(long, requires = "compounding", allow_negative_numbers = true)]
        rate: Option<f64>,
        #[arg(long, value_enum)]
        compounding: Option<CompoundingArg>,
    },
    /// Growth-rate price of a put game against its Black-Scholes value
    BsCompare {
        #[arg(long)]
        game: PathBuf,
    },
}

enum AppError {
    Usage(String),
    Core(core::Error),
}

impl From<core::Error> for AppError {
    fn from(e: core::Error) -> Self {
        AppError::Core(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap renders --help/--version through the error path as well
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(text) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Core(e)) => {
            eprintln!("error: {e}");
            if e.is_numeric() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn quad_config(cli: &Cli) -> Result<QuadratureConfig, AppError> {
    let mut cfg = QuadratureConfig::default();
    if let Ok(v) = std::env::var("GROWTHPRICER_TOL") {
        let tol: f64 = v
            .parse()
            .map_err(|_| AppError::Usage(format!("GROWTHPRICER_TOL is not a number: {v}")))?;
        cfg.abs_tol = tol;
        cfg.rel_tol = tol;
    }
    if let Some(a) = cli.abs_tol {
        cfg.abs_tol = a;
    }
    if let Some(r) = cli.rel_tol {
        cfg.rel_tol = r;
    }
    Ok(cfg)
}

fn load_spec(path: &Path) -> Result<GameSpec, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(GameSpec::parse(&text)?)
}

fn load_game(path: &Path, cfg: QuadratureConfig) -> Result<Game, AppError> {
    let game = load_spec(path)?.build(cfg)?;
    if let Effectiveness::Declared { nu } = game.stats().effectiveness {
        eprintln!(
            "warning: effectiveness of {} is declared (nu = {nu}), not certified",
            path.display()
        );
    }
    Ok(game)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, AppError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(AppError::Usage(format!(
            "grid must be lo:hi:steps, got {spec}"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| AppError::Usage(format!("bad grid bound {}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| AppError::Usage(format!("bad grid bound {}", parts[1])))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| AppError::Usage(format!("bad step count {}", parts[2])))?;
    if steps < 2 || !(hi > lo) {
        return Err(AppError::Usage("grid needs hi > lo and steps >= 2".into()));
    }
    Ok((0..steps)
        .map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64)
        .collect())
}

fn parse_list<T: std::str::FromStr>(spec: &str, what: &str) -> Result<Vec<T>, AppError> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| AppError::Usage(format!("bad {what} entry: {s}")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<String, AppError> {
    let cfg = quad_config(&cli)?;
    let format = cli.format;
    match &cli.cmd {
        Cmd::Stats { game } => {
            let g = load_game(game, cfg)?;
            Ok(StatsOut::new(g.xi(), g.atom_at_xi(), g.stats()).render(format))
        }
        Cmd::Proportion { game, price } => {
            let g = load_game(game, cfg)?;
            let r = core::optimal_proportion(&g, *price)?;
            Ok(output::render_proportion(&r, format))
        }
        Cmd::Price {
            game,
            rate,
            compounding,
            horizon,
        } => {
            let g = load_game(game, cfg)?;
            let growth_price = core::price(&g, *rate, (*compounding).into(), *horizon)?;
            let (expectation_price, expectation_note) =
                match core::expectation_price(&g, *rate, (*compounding).into(), *horizon) {
                    Ok(e) => (Some(e), None),
                    Err(core::Error::InfiniteExpectation) => (
                        None,
                        Some("no solution: the expectation is infinite".to_string()),
                    ),
                    Err(e) => return Err(e.into()),
                };
            Ok(PriceOut {
                growth_price,
                expectation_price,
                expectation_note,
            }
            .render(format))
        }
        Cmd::Curve { game, grid } => {
            let g = load_game(game, cfg)?;
            let points = core::pricing_curve(&g, &parse_grid(grid)?)?;
            Ok(output::render_curve(&points, format))
        }
        Cmd::Simulate {
            game,
            u,
            t,
            level_list,
            attempt_list,
        } => {
            let g = load_game(game, cfg)?;
            let levels: Vec<u32> = parse_list(level_list, "N-list")?;
            let attempts: Vec<u64> = parse_list(attempt_list, "n-list")?;
            let table = core::convergence_table(&g, *u, *t, &levels, &attempts)?;
            Ok(SimulateOut {
                rows: table.rows,
                limit: table.limit,
            }
            .render(format))
        }
        Cmd::Joint {
            game,
            game2,
            price,
            rate,
            compounding,
        } => {
            let ga = load_game(game, cfg)?;
            let gb = load_game(game2, cfg)?;
            let r = match (price, rate) {
                (Some(u), None) => core::joint_optimize(&ga, &gb, *u)?,
                (None, Some(r)) => {
                    let comp = compounding
                        .ok_or_else(|| AppError::Usage("--rate requires --compounding".into()))?;
                    core::joint_price(&ga, &gb, *r, comp.into())?
                }
                _ => {
                    return Err(AppError::Usage(
                        "joint needs exactly one of --price or --rate".into(),
                    ))
                }
            };
            Ok(output::render_joint(&r, format))
        }
        Cmd::BsCompare { game } => {
            let spec = load_spec(game)?;
            let mp = spec.market_params().ok_or_else(|| {
                AppError::Usage("bs-compare requires a game of kind \"put\"".into())
            })?;
            let g = spec.build(cfg)?;
            let growth_price =
                core::price(&g, mp.rate, Compounding::Continuous, Some(mp.horizon))?;
            let bs = core::black_scholes_put(&mp);
            let at_bs = core::optimal_proportion(&g, bs)?;
            Ok(BsCompareOut {
                expectation: core::put_expectation(&mp),
                growth_price,
                black_scholes_price: bs,
                proportion_at_black_scholes: at_bs.t,
                growth_at_black_scholes: at_bs.growth,
            }
            .render(format))
        }
    }
}
