use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

/// A metric outcome with an explicit status. Non-values are first-class so
/// that "never reached the threshold" is never confused with zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricValue {
    Value(f64),
    /// Not computable from the data (e.g. zero training-loss spread).
    Undefined,
    /// A threshold was never crossed.
    Unreached,
    /// Ratio with an unreached denominator-side quantity in the numerator.
    Infinite,
}

impl MetricValue {
    pub fn value(self) -> Option<f64> {
        match self {
            MetricValue::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn status(self) -> &'static str {
        match self {
            MetricValue::Value(_) => "value",
            MetricValue::Undefined => "undefined",
            MetricValue::Unreached => "unreached",
            MetricValue::Infinite => "inf",
        }
    }

    /// Rounds the payload to six significant digits.
    pub fn rounded(self) -> Self {
        match self {
            MetricValue::Value(v) => MetricValue::Value(round_sig6(v)),
            other => other,
        }
    }
}

impl From<f64> for MetricValue {
    fn from(v: f64) -> Self {
        MetricValue::Value(v)
    }
}

impl From<Option<f64>> for MetricValue {
    fn from(v: Option<f64>) -> Self {
        v.map_or(MetricValue::Undefined, MetricValue::Value)
    }
}

pub fn round_sig6(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { 0.0 } else { v };
    }
    format!("{v:.5e}").parse().expect("formatted float parses")
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricValue::Value(v) => write!(f, "{v}"),
            other => f.write_str(other.status()),
        }
    }
}

impl Serialize for MetricValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            MetricValue::Value(v) if !v.is_finite() => {
                Err(serde::ser::Error::custom("metric value is not finite"))
            }
            MetricValue::Value(v) => {
                let mut m = serializer.serialize_map(Some(2))?;
                m.serialize_entry("status", "value")?;
                m.serialize_entry("value", &round_sig6(*v))?;
                m.end()
            }
            other => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("status", other.status())?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for MetricValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            status: String,
            value: Option<f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        match (raw.status.as_str(), raw.value) {
            ("value", Some(v)) if v.is_finite() => Ok(MetricValue::Value(v)),
            ("value", _) => Err(de::Error::custom("status 'value' needs a finite 'value'")),
            ("undefined", None) => Ok(MetricValue::Undefined),
            ("unreached", None) => Ok(MetricValue::Unreached),
            ("inf", None) => Ok(MetricValue::Infinite),
            (s, _) => Err(de::Error::custom(format!("unexpected metric status '{s}'"))),
        }
    }
}
