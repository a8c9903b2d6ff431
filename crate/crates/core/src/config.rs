//! Flat `key = value` configuration files.
//!
//! Parameter keys are a symbol plus a unit suffix, e.g. `Delta_b_tilde_MHz`,
//! `K_b_nHz`, `T_e_K`. Frequency units mean 2π × unit. Sweep axes are given
//! as `sweep.axisN.{name,min_<unit>,max_<unit>,points}`; comma-separated
//! lists in `name`, `min_*` and `max_*` link several parameters to one axis.
//! `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{bath_occupancies, BareConfig, EffectiveConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    /// Angular frequency, stored in rad/s.
    Frequency,
    /// Kelvin.
    Temperature,
    Dimensionless,
}

/// Every recognised parameter symbol.
pub const PARAMETERS: &[(&str, Dimension)] = &[
    ("omega_a", Dimension::Frequency),
    ("omega_b", Dimension::Frequency),
    ("omega_c", Dimension::Frequency),
    ("omega_d", Dimension::Frequency),
    ("Delta_a", Dimension::Frequency),
    ("Delta_b", Dimension::Frequency),
    ("Delta_c", Dimension::Frequency),
    ("Delta_b_tilde", Dimension::Frequency),
    ("Delta_c_tilde", Dimension::Frequency),
    ("K_b", Dimension::Frequency),
    ("K_c", Dimension::Frequency),
    ("G", Dimension::Frequency),
    ("K_b_tilde", Dimension::Frequency),
    ("K_c_tilde", Dimension::Frequency),
    ("G_tilde", Dimension::Frequency),
    ("g_ab", Dimension::Frequency),
    ("gamma_a", Dimension::Frequency),
    ("gamma_b", Dimension::Frequency),
    ("gamma_c", Dimension::Frequency),
    ("Omega_b", Dimension::Frequency),
    ("Omega_c", Dimension::Frequency),
    ("T_e", Dimension::Temperature),
    ("n_a", Dimension::Dimensionless),
    ("n_b", Dimension::Dimensionless),
    ("n_c", Dimension::Dimensionless),
];

const FREQUENCY_UNITS: &[(&str, f64)] = &[
    ("GHz", 1e9),
    ("MHz", 1e6),
    ("kHz", 1e3),
    ("Hz", 1.0),
    ("nHz", 1e-9),
];

pub fn dimension_of(symbol: &str) -> Option<Dimension> {
    PARAMETERS.iter().find(|(s, _)| *s == symbol).map(|(_, d)| *d)
}

/// Factor converting a value in `unit` to the internal unit of `dim`.
pub fn unit_factor(dim: Dimension, unit: &str) -> Option<f64> {
    match dim {
        Dimension::Frequency => FREQUENCY_UNITS
            .iter()
            .find(|(u, _)| *u == unit)
            .map(|(_, f)| 2.0 * std::f64::consts::PI * f),
        Dimension::Temperature => (unit == "K").then_some(1.0),
        Dimension::Dimensionless => unit.is_empty().then_some(1.0),
    }
}

/// Unit used when writing a parameter back out (CSV columns, reports).
pub fn display_unit(dim: Dimension) -> &'static str {
    match dim {
        Dimension::Frequency => "MHz",
        Dimension::Temperature => "K",
        Dimension::Dimensionless => "",
    }
}

/// `symbol_unit` column label, e.g. `Delta_a_MHz`.
pub fn column_label(symbol: &str) -> String {
    match dimension_of(symbol).map(display_unit) {
        Some("") | None => symbol.to_string(),
        Some(u) => format!("{symbol}_{u}"),
    }
}

/// Converts an internal value to its display unit.
pub fn to_display(symbol: &str, value: f64) -> f64 {
    let dim = dimension_of(symbol).unwrap_or(Dimension::Dimensionless);
    value / unit_factor(dim, display_unit(dim)).unwrap_or(1.0)
}

/// Splits `K_b_tilde_MHz` into (`K_b_tilde`, factor).
fn parse_key(key: &str) -> Option<(&'static str, f64)> {
    for (symbol, dim) in PARAMETERS {
        if key == *symbol {
            if let Some(f) = unit_factor(*dim, "") {
                return Some((symbol, f));
            }
        }
        if let Some(unit) = key.strip_prefix(symbol).and_then(|r| r.strip_prefix('_')) {
            if let Some(f) = unit_factor(*dim, unit) {
                return Some((symbol, f));
            }
        }
    }
    None
}

/// How a grid point is turned into drift coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// `Δ̃`, `K̃`, `G̃` are given directly.
    #[default]
    Effective,
    /// Drive amplitudes and bare nonlinearities; the mean field is solved.
    Microscopic,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "effective" => Ok(Mode::Effective),
            "microscopic" => Ok(Mode::Microscopic),
            _ => Err(Error::Config(format!(
                "unknown mode '{s}' (expected effective or microscopic)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Effective => "effective",
            Mode::Microscopic => "microscopic",
        })
    }
}

/// Parameter values in internal units keyed by symbol.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamSet(BTreeMap<&'static str, f64>);

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, symbol: &str) -> Option<f64> {
        self.0.get(symbol).copied()
    }

    /// Sets a parameter by symbol, in internal units.
    pub fn set(&mut self, symbol: &str, value: f64) -> Result<()> {
        let (key, _) = PARAMETERS
            .iter()
            .find(|(s, _)| *s == symbol)
            .ok_or_else(|| Error::Config(format!("unknown parameter '{symbol}'")))?;
        self.0.insert(key, value);
        Ok(())
    }

    pub fn with(mut self, symbol: &str, value: f64) -> Self {
        self.set(symbol, value).expect("known symbol");
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }

    fn require(&self, symbol: &str) -> Result<f64> {
        self.get(symbol)
            .ok_or_else(|| Error::Config(format!("missing parameter {}", column_label(symbol))))
    }

    fn occupancies(&self) -> Result<[f64; 3]> {
        let t = self.get("T_e").unwrap_or(0.0);
        let explicit = [self.get("n_a"), self.get("n_b"), self.get("n_c")];
        if explicit.iter().any(Option::is_some) {
            if t != 0.0 {
                return Err(Error::Config(
                    "give either T_e_K or n_a/n_b/n_c, not both".into(),
                ));
            }
            return Ok(explicit.map(|n| n.unwrap_or(0.0)));
        }
        if !(t >= 0.0) {
            return Err(Error::Config(format!("T_e must be non-negative, got {t}")));
        }
        bath_occupancies(
            [self.get("omega_a"), self.get("omega_b"), self.get("omega_c")],
            t,
        )
        .map_err(|e| Error::Config(e.to_string()))
    }

    /// Coefficients for effective mode. Self-Kerr rates default to zero;
    /// occupancies come from `n_*` or from `T_e` and the mode frequencies.
    pub fn effective(&self) -> Result<EffectiveConfig> {
        let [n_a, n_b, n_c] = self.occupancies()?;
        Ok(EffectiveConfig {
            delta_a: self.require("Delta_a")?,
            delta_b: self.require("Delta_b_tilde")?,
            delta_c: self.require("Delta_c_tilde")?,
            kerr_b: self.get("K_b_tilde").unwrap_or(0.0),
            kerr_c: self.get("K_c_tilde").unwrap_or(0.0),
            cross_kerr: self.require("G_tilde")?,
            g_ab: self.require("g_ab")?,
            gamma_a: self.require("gamma_a")?,
            gamma_b: self.require("gamma_b")?,
            gamma_c: self.require("gamma_c")?,
            n_a,
            n_b,
            n_c,
        })
    }

    /// Bare model for microscopic mode. Drives and temperature default to zero.
    pub fn bare(&self) -> Result<BareConfig> {
        Ok(BareConfig {
            omega_a: self.get("omega_a"),
            omega_b: self.get("omega_b"),
            omega_c: self.get("omega_c"),
            omega_d: self.get("omega_d"),
            delta_a: self.require("Delta_a")?,
            delta_b: self.require("Delta_b")?,
            delta_c: self.require("Delta_c")?,
            kerr_b: self.require("K_b")?,
            kerr_c: self.require("K_c")?,
            cross_kerr: self.require("G")?,
            g_ab: self.require("g_ab")?,
            gamma_a: self.require("gamma_a")?,
            gamma_b: self.require("gamma_b")?,
            gamma_c: self.require("gamma_c")?,
            drive_b: self.get("Omega_b").unwrap_or(0.0),
            drive_c: self.get("Omega_c").unwrap_or(0.0),
            temperature: self.get("T_e").unwrap_or(0.0),
        })
    }
}

/// One sweep axis; linked parameters move together.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub symbols: Vec<&'static str>,
    /// Internal units, one per symbol.
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub points: usize,
}

impl Axis {
    pub fn new(symbol: &str, min: f64, max: f64, points: usize) -> Result<Self> {
        Self::linked(&[symbol], &[min], &[max], points)
    }

    pub fn linked(symbols: &[&str], min: &[f64], max: &[f64], points: usize) -> Result<Self> {
        if symbols.is_empty() || symbols.len() != min.len() || symbols.len() != max.len() {
            return Err(Error::Config("axis needs one min and max per linked parameter".into()));
        }
        if points < 2 {
            return Err(Error::Config(format!("axis needs at least 2 points, got {points}")));
        }
        let mut out = Vec::with_capacity(symbols.len());
        for s in symbols {
            let (key, _) = PARAMETERS
                .iter()
                .find(|(p, _)| p == s)
                .ok_or_else(|| Error::Config(format!("unknown axis parameter '{s}'")))?;
            out.push(*key);
        }
        if min.iter().chain(max).any(|x| !x.is_finite()) {
            return Err(Error::Config("axis range must be finite".into()));
        }
        Ok(Axis {
            symbols: out,
            min: min.to_vec(),
            max: max.to_vec(),
            points,
        })
    }

    /// Values of every linked parameter at index `i`.
    pub fn values(&self, i: usize) -> Vec<(&'static str, f64)> {
        let t = i as f64 / (self.points - 1) as f64;
        self.symbols
            .iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(s, (lo, hi))| {
                let v = if i + 1 == self.points { *hi } else { lo + (hi - lo) * t };
                (*s, v)
            })
            .collect()
    }

    /// Grid spacing of the first linked parameter, internal units.
    pub fn step(&self) -> f64 {
        (self.max[0] - self.min[0]) / (self.points - 1) as f64
    }
}

/// A parsed configuration file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    pub params: ParamSet,
    pub axes: Vec<Axis>,
}

#[derive(Default)]
struct AxisDraft {
    name: Option<String>,
    min: Option<(String, String)>,
    max: Option<(String, String)>,
    points: Option<usize>,
}

fn parse_number(text: &str, context: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("{context}: '{}' is not a number", text.trim())))
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut params = ParamSet::new();
        let mut drafts: BTreeMap<usize, AxisDraft> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line}: expected key = value")))?;
            let (key, value) = (key.trim(), value.trim());
            if let Some(rest) = key.strip_prefix("sweep.axis") {
                let (num, field) = rest
                    .split_once('.')
                    .ok_or_else(|| Error::Config(format!("line {line}: malformed sweep key '{key}'")))?;
                let n: usize = num
                    .parse()
                    .ok()
                    .filter(|n| (1..=2).contains(n))
                    .ok_or_else(|| Error::Config(format!("line {line}: only sweep.axis1 and sweep.axis2 exist")))?;
                let d = drafts.entry(n).or_default();
                if field == "name" {
                    d.name = Some(value.to_string());
                } else if field == "points" {
                    d.points = Some(value.parse().map_err(|_| {
                        Error::Config(format!("line {line}: points must be a positive integer"))
                    })?);
                } else if let Some(unit) = field.strip_prefix("min") {
                    d.min = Some((unit.trim_start_matches('_').to_string(), value.to_string()));
                } else if let Some(unit) = field.strip_prefix("max") {
                    d.max = Some((unit.trim_start_matches('_').to_string(), value.to_string()));
                } else {
                    return Err(Error::Config(format!("line {line}: unknown sweep field '{field}'")));
                }
                continue;
            }
            let (symbol, factor) = parse_key(key)
                .ok_or_else(|| Error::Config(format!("line {line}: unknown key '{key}'")))?;
            if params.get(symbol).is_some() {
                return Err(Error::Config(format!("line {line}: {symbol} given twice")));
            }
            params.set(symbol, parse_number(value, &format!("line {line}"))? * factor)?;
        }
        let mut axes = Vec::new();
        for (n, d) in drafts {
            let missing = |what: &str| Error::Config(format!("sweep.axis{n}.{what} is missing"));
            let name = d.name.ok_or_else(|| missing("name"))?;
            let (min_unit, min_text) = d.min.ok_or_else(|| missing("min"))?;
            let (max_unit, max_text) = d.max.ok_or_else(|| missing("max"))?;
            let points = d.points.ok_or_else(|| missing("points"))?;
            let symbols: Vec<&str> = name.split(',').map(str::trim).collect();
            let mins: Vec<&str> = min_text.split(',').collect();
            let maxs: Vec<&str> = max_text.split(',').collect();
            let mut lo = Vec::new();
            let mut hi = Vec::new();
            for (k, s) in symbols.iter().enumerate() {
                let dim = dimension_of(s)
                    .ok_or_else(|| Error::Config(format!("sweep.axis{n}: unknown parameter '{s}'")))?;
                let f_lo = unit_factor(dim, &min_unit).ok_or_else(|| {
                    Error::Config(format!("sweep.axis{n}: unit '{min_unit}' does not fit {s}"))
                })?;
                let f_hi = unit_factor(dim, &max_unit).ok_or_else(|| {
                    Error::Config(format!("sweep.axis{n}: unit '{max_unit}' does not fit {s}"))
                })?;
                let (a, b) = match (mins.get(k), maxs.get(k)) {
                    (Some(a), Some(b)) if mins.len() == symbols.len() && maxs.len() == symbols.len() => (a, b),
                    _ => {
                        return Err(Error::Config(format!(
                            "sweep.axis{n}: {} names but {} min and {} max values",
                            symbols.len(),
                            mins.len(),
                            maxs.len()
                        )))
                    }
                };
                lo.push(parse_number(a, &format!("sweep.axis{n}"))? * f_lo);
                hi.push(parse_number(b, &format!("sweep.axis{n}"))? * f_hi);
            }
            axes.push(Axis::linked(&symbols, &lo, &hi, points).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("sweep.axis{n}: {m}")),
                e => e,
            })?);
        }
        Ok(ConfigFile { params, axes })
    }
}
