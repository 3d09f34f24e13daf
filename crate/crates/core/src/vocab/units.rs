//! Measurement units with exact affine conversions to a canonical unit per
//! dimension (joule, watt, kelvin, second).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{int, ratio, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dimension {
    Energy,
    Power,
    Temperature,
    Time,
    Dimensionless,
}

impl Dimension {
    pub fn canonical_symbol(self) -> &'static str {
        match self {
            Dimension::Energy => "J",
            Dimension::Power => "W",
            Dimension::Temperature => "K",
            Dimension::Time => "s",
            Dimension::Dimensionless => "1",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name.to_ascii_lowercase().as_str() {
            "energy" => Dimension::Energy,
            "power" => Dimension::Power,
            "temperature" => Dimension::Temperature,
            "time" => Dimension::Time,
            "dimensionless" => Dimension::Dimensionless,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitEntry {
    pub symbol: &'static str,
    pub dimension: Dimension,
    /// value_canonical = value * factor + offset
    pub factor: Rational,
    pub offset: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitError {
    #[error("cannot convert {symbol} ({from:?}) to {to:?}")]
    DimensionMismatch {
        symbol: String,
        from: Dimension,
        to: Dimension,
    },
    #[error("unknown unit symbol {0:?}")]
    UnknownUnitSymbol(String),
}

#[derive(Debug, Clone)]
pub struct UnitTable {
    entries: Vec<UnitEntry>,
}

impl Default for UnitTable {
    fn default() -> Self {
        Self::builtin()
    }
}

impl UnitTable {
    /// Wh, kWh, MJ, J; W, kW; °C, °F, K; s, min, h.
    pub fn builtin() -> Self {
        let e = |symbol, dimension, factor: Rational, offset: Rational| UnitEntry {
            symbol,
            dimension,
            factor,
            offset,
        };
        let zero = int(0);
        UnitTable {
            entries: vec![
                e("J", Dimension::Energy, int(1), zero.clone()),
                e("Wh", Dimension::Energy, int(3_600), zero.clone()),
                e("kWh", Dimension::Energy, int(3_600_000), zero.clone()),
                e("MJ", Dimension::Energy, int(1_000_000), zero.clone()),
                e("W", Dimension::Power, int(1), zero.clone()),
                e("kW", Dimension::Power, int(1_000), zero.clone()),
                e("K", Dimension::Temperature, int(1), zero.clone()),
                e("°C", Dimension::Temperature, int(1), ratio(27_315, 100)),
                // K = (F - 32) * 5/9 + 273.15
                e("°F", Dimension::Temperature, ratio(5, 9), ratio(45_967, 180)),
                e("s", Dimension::Time, int(1), zero.clone()),
                e("min", Dimension::Time, int(60), zero.clone()),
                e("h", Dimension::Time, int(3_600), zero),
            ],
        }
    }

    pub fn lookup(&self, symbol: &str) -> Option<&UnitEntry> {
        let symbol = match symbol {
            "degC" | "℃" => "°C",
            "degF" | "℉" => "°F",
            other => other,
        };
        self.entries.iter().find(|u| u.symbol == symbol)
    }

    pub fn require(&self, symbol: &str) -> Result<&UnitEntry, UnitError> {
        self.lookup(symbol)
            .ok_or_else(|| UnitError::UnknownUnitSymbol(symbol.to_string()))
    }

    pub fn canonical(&self, dimension: Dimension) -> Option<&UnitEntry> {
        self.lookup(dimension.canonical_symbol())
    }

    pub fn entries(&self) -> &[UnitEntry] {
        &self.entries
    }
}

/// Converts `value` expressed in `from` to the canonical unit of `target`.
pub fn convert_unit(value: &Rational, from: &UnitEntry, target: Dimension) -> Result<Rational, UnitError> {
    if from.dimension != target {
        return Err(UnitError::DimensionMismatch {
            symbol: from.symbol.to_string(),
            from: from.dimension,
            to: target,
        });
    }
    Ok(value * &from.factor + &from.offset)
}

/// Inverse of [`convert_unit`]: canonical value back into `to`.
pub fn from_canonical(value: &Rational, to: &UnitEntry) -> Rational {
    (value - &to.offset) / &to.factor
}
