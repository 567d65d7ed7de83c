//! Rendering of command results as human tables, JSON, or CSV.

use growthpricer_core::{
    Effectiveness, GameStats, GrowthCurvePoint, JointResult, PriceResult, ProportionResult,
    Regime, SequenceStats,
};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// Extended real for serialization: infinities become the strings
/// "inf"/"-inf" so that every finite numeric field re-parses exactly.
#[derive(Debug, Clone, Copy)]
pub struct ExtReal(pub f64);

impl Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else if self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

fn fmt_val(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::ZeroInvest => "zero-invest",
        Regime::FullInvest => "full-invest",
        Regime::BoundaryLeverage => "boundary-leverage",
        Regime::InteriorRoot => "interior-root",
    }
}

fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn csv(rows: &[(&str, String)]) -> String {
    let header = rows.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(",");
    let values = rows
        .iter()
        .map(|(_, v)| v.clone())
        .collect::<Vec<_>>()
        .join(",");
    format!("{header}\n{values}")
}

#[derive(Serialize)]
pub struct StatsOut {
    pub xi: f64,
    pub atom_at_xi: bool,
    pub e: ExtReal,
    pub h: ExtReal,
    pub h_xi: ExtReal,
    pub inv_h: f64,
    pub xi_plus_inv_h_xi: f64,
    pub effectiveness: Effectiveness,
}

impl StatsOut {
    pub fn new(xi: f64, atom_at_xi: bool, s: &GameStats) -> Self {
        StatsOut {
            xi,
            atom_at_xi,
            e: ExtReal(s.e),
            h: ExtReal(s.h),
            h_xi: ExtReal(s.h_xi),
            inv_h: s.inv_h,
            xi_plus_inv_h_xi: s.xi_plus_inv_h_xi,
            effectiveness: s.effectiveness,
        }
    }

    pub fn render(&self, format: Format) -> String {
        let eff = match self.effectiveness {
            Effectiveness::Yes { nu } => format!("yes (nu = {nu})"),
            Effectiveness::Declared { nu } => format!("declared (nu = {nu})"),
            Effectiveness::No => "no".into(),
        };
        let rows = [
            ("xi", fmt_val(self.xi)),
            ("atom_at_xi", self.atom_at_xi.to_string()),
            ("E", fmt_val(self.e.0)),
            ("H", fmt_val(self.h.0)),
            ("H_xi", fmt_val(self.h_xi.0)),
            ("1/H", fmt_val(self.inv_h)),
            ("xi+1/H_xi", fmt_val(self.xi_plus_inv_h_xi)),
            ("effective", eff),
        ];
        match format {
            Format::Table => table(&rows),
            Format::Json => serde_json::to_string_pretty(self).unwrap(),
            Format::Csv => csv(&rows),
        }
    }
}

pub fn render_proportion(r: &ProportionResult, format: Format) -> String {
    let rows = [
        ("price", fmt_val(r.u)),
        ("proportion", fmt_val(r.t)),
        ("regime", regime_name(r.regime).into()),
        ("growth", fmt_val(r.growth)),
    ];
    match format {
        Format::Table => table(&rows),
        Format::Json => serde_json::to_string_pretty(r).unwrap(),
        Format::Csv => csv(&rows),
    }
}

#[derive(Serialize)]
pub struct PriceOut {
    pub growth_price: PriceResult,
    /// Expectation-based price E/target, when the expectation is finite.
    pub expectation_price: Option<PriceResult>,
    pub expectation_note: Option<String>,
}

impl PriceOut {
    pub fn render(&self, format: Format) -> String {
        if format == Format::Json {
            return serde_json::to_string_pretty(self).unwrap();
        }
        let g = &self.growth_price;
        let mut rows = vec![
            ("price", fmt_val(g.price)),
            ("proportion", fmt_val(g.proportion)),
            ("regime", regime_name(g.regime).into()),
            ("growth", fmt_val(g.growth_at_price)),
            ("target", fmt_val(g.target)),
        ];
        match (&self.expectation_price, &self.expectation_note) {
            (Some(e), _) => {
                rows.push(("expectation_price", fmt_val(e.price)));
                rows.push(("expectation_proportion", fmt_val(e.proportion)));
                rows.push(("expectation_growth", fmt_val(e.growth_at_price)));
            }
            (None, Some(note)) => rows.push(("expectation_price", note.clone())),
            (None, None) => {}
        }
        match format {
            Format::Table => table(&rows),
            Format::Csv => csv(&rows),
            Format::Json => unreachable!(),
        }
    }
}

pub fn render_curve(points: &[GrowthCurvePoint], format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(points).unwrap(),
        _ => {
            let mut out = String::from("u,t,growth");
            for p in points {
                out.push_str(&format!("\n{},{},{}", p.u, p.t, p.growth));
            }
            out
        }
    }
}

#[derive(Serialize)]
pub struct SimulateOut {
    pub rows: Vec<SequenceStats>,
    pub limit: f64,
}

impl SimulateOut {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).unwrap(),
            _ => {
                let mut out = String::from("N,n,mean,variance");
                for r in &self.rows {
                    out.push_str(&format!(
                        "\n{},{},{},{}",
                        r.level, r.attempts, r.mean, r.variance
                    ));
                }
                out.push_str(&format!("\nlimit,,{},", self.limit));
                out
            }
        }
    }
}

pub fn render_joint(r: &JointResult, format: Format) -> String {
    let rows = [
        ("price", fmt_val(r.price)),
        ("t", fmt_val(r.t)),
        ("s", fmt_val(r.s)),
        ("growth", fmt_val(r.growth)),
    ];
    match format {
        Format::Table => table(&rows),
        Format::Json => serde_json::to_string_pretty(r).unwrap(),
        Format::Csv => csv(&rows),
    }
}

#[derive(Serialize)]
pub struct BsCompareOut {
    pub expectation: f64,
    pub growth_price: PriceResult,
    pub black_scholes_price: f64,
    pub proportion_at_black_scholes: f64,
    pub growth_at_black_scholes: f64,
}

impl BsCompareOut {
    pub fn render(&self, format: Format) -> String {
        if format == Format::Json {
            return serde_json::to_string_pretty(self).unwrap();
        }
        let rows = [
            ("expectation", fmt_val(self.expectation)),
            ("growth_price", fmt_val(self.growth_price.price)),
            ("growth_proportion", fmt_val(self.growth_price.proportion)),
            ("growth_target", fmt_val(self.growth_price.target)),
            ("black_scholes_price", fmt_val(self.black_scholes_price)),
            (
                "proportion_at_black_scholes",
                fmt_val(self.proportion_at_black_scholes),
            ),
            (
                "growth_at_black_scholes",
                fmt_val(self.growth_at_black_scholes),
            ),
        ];
        match format {
            Format::Table => table(&rows),
            Format::Csv => csv(&rows),
            Format::Json => unreachable!(),
        }
    }
}
