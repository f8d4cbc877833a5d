//! The five-point bipolar temporal valence scale and the variety groups.
//!
//! Scale points run from `-1` (the farthest historical period) to `1` (the
//! present-day variety). They are stored as whole halves so equality and
//! ordering are exact.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CoreError;

/// A point on the scale {-1, -0.5, 0, 0.5, 1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TemporalValence(i8);

impl TemporalValence {
    pub const FARTHEST: Self = Self(-2);
    pub const OLDER: Self = Self(-1);
    pub const NEUTRAL: Self = Self(0);
    pub const NEWER: Self = Self(1);
    pub const PRESENT: Self = Self(2);

    /// All scale points in ascending order.
    pub const ALL: [Self; 5] = [
        Self::FARTHEST,
        Self::OLDER,
        Self::NEUTRAL,
        Self::NEWER,
        Self::PRESENT,
    ];

    /// Looks up the scale point equal to `value`.
    ///
    /// Only the five exact scale values are accepted; anything else
    /// (including NaN and infinities) is a `ValenceOutOfScale` error.
    pub fn from_number(value: f64) -> Result<Self, CoreError> {
        let doubled = value * 2.0;
        if doubled.is_finite() && doubled.fract() == 0.0 && (-2.0..=2.0).contains(&doubled) {
            Ok(Self(doubled as i8))
        } else {
            Err(CoreError::ValenceOutOfScale(value))
        }
    }

    /// Builds a scale point from a count of halves in `-2..=2`.
    pub fn from_halves(halves: i8) -> Option<Self> {
        (-2..=2).contains(&halves).then_some(Self(halves))
    }

    pub fn halves(self) -> i8 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// The next scale point towards the present, if any.
    pub fn step_up(self) -> Option<Self> {
        Self::from_halves(self.0 + 1)
    }

    /// The next scale point towards the past, if any.
    pub fn step_down(self) -> Option<Self> {
        Self::from_halves(self.0 - 1)
    }
}

impl Default for TemporalValence {
    fn default() -> Self {
        Self::NEUTRAL
    }
}

impl fmt::Display for TemporalValence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            -2 => f.write_str("-1"),
            -1 => f.write_str("-0.5"),
            0 => f.write_str("0"),
            1 => f.write_str("0.5"),
            _ => f.write_str("1"),
        }
    }
}

impl FromStr for TemporalValence {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        let value: f64 = trimmed
            .parse()
            .map_err(|_| CoreError::ValenceOutOfScale(f64::NAN))?;
        Self::from_number(value)
    }
}

impl TryFrom<f64> for TemporalValence {
    type Error = CoreError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::from_number(value)
    }
}

impl From<TemporalValence> for f64 {
    fn from(v: TemporalValence) -> f64 {
        v.value()
    }
}

impl Serialize for TemporalValence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for TemporalValence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = f64::deserialize(deserializer)?;
        Self::from_number(value).map_err(serde::de::Error::custom)
    }
}

/// Which language variety a test sentence is meant to typify.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VarietyGroup {
    /// Early Modern English.
    #[serde(rename = "EME")]
    Eme,
    #[serde(rename = "Neutral")]
    Neutral,
    /// Modern English.
    #[serde(rename = "ME")]
    Me,
}

impl VarietyGroup {
    pub const ALL: [Self; 3] = [Self::Eme, Self::Neutral, Self::Me];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Eme => "EME",
            Self::Neutral => "Neutral",
            Self::Me => "ME",
        }
    }
}

impl fmt::Display for VarietyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error for labels that are not one of `EME`, `Neutral`, `ME`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown variety group {0:?} (expected EME, Neutral or ME)")]
pub struct UnknownGroup(pub String);

impl FromStr for VarietyGroup {
    type Err = UnknownGroup;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "eme" => Ok(Self::Eme),
            "neutral" => Ok(Self::Neutral),
            "me" => Ok(Self::Me),
            _ => Err(UnknownGroup(s.to_owned())),
        }
    }
}
