use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::model::{same_language, ExpectationSet, Granularity, LanguageDistribution, LanguageTag};

/// Probability assigned to an expected language that never shows up, under
/// [`ZeroConvention::Clamp`].
pub const CLAMP_EPSILON: f64 = 1e-10;

const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Natural,
    Base2,
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Natural => "natural",
            LogBase::Base2 => "base2",
        })
    }
}

impl FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "natural" | "e" | "ln" | "nats" => Ok(LogBase::Natural),
            "base2" | "2" | "bits" => Ok(LogBase::Base2),
            _ => Err(format!("unknown log base {s:?} (natural, base2)")),
        }
    }
}

/// What an expected language with zero probability contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroConvention {
    /// Sum over the detected support only; missing expected languages add 0.
    #[default]
    Support,
    /// Missing expected languages are scored as if present with
    /// probability [`CLAMP_EPSILON`].
    Clamp,
}

impl fmt::Display for ZeroConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZeroConvention::Support => "support",
            ZeroConvention::Clamp => "clamp",
        })
    }
}

impl FromStr for ZeroConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "support" => Ok(ZeroConvention::Support),
            "clamp" => Ok(ZeroConvention::Clamp),
            _ => Err(format!("unknown zero convention {s:?} (support, clamp)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EntropyOptions {
    #[serde(default)]
    pub log_base: LogBase,
    #[serde(default)]
    pub zero_convention: ZeroConvention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyResult {
    pub value: f64,
    /// One term per language; sums to `value`.
    pub contributions: BTreeMap<LanguageTag, f64>,
    pub support_missing_expected: BTreeSet<LanguageTag>,
    pub granularity: Granularity,
    /// Unidentified fraction of the raw distribution, for reporting.
    pub unidentified_mass: f64,
}

/// Language confusion entropy of a normalized distribution.
///
/// Expected languages contribute `-(1 - p) ln p`, unexpected ones `-p ln p`.
pub fn confusion_entropy(
    d: &LanguageDistribution,
    x1: &ExpectationSet,
    options: EntropyOptions,
) -> Result<EntropyResult, MetricsError> {
    let total = d.identified_mass();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(MetricsError::UnnormalizedDistribution(total));
    }
    let scale = match options.log_base {
        LogBase::Natural => 1.0,
        LogBase::Base2 => std::f64::consts::LN_2,
    };

    let mut contributions = BTreeMap::new();
    for (&lang, &p) in d.mass() {
        let term = if x1.contains(&lang) {
            expected_term(p)
        } else {
            -p * p.ln()
        };
        // Adding 0.0 turns a -0.0 from p = 1 into +0.0.
        contributions.insert(lang, term / scale + 0.0);
    }

    let support_missing_expected: BTreeSet<LanguageTag> = x1
        .languages()
        .iter()
        .filter(|e| !d.mass().keys().any(|s| same_language(e, s)))
        .copied()
        .collect();
    if options.zero_convention == ZeroConvention::Clamp {
        for lang in &support_missing_expected {
            contributions.insert(*lang, expected_term(CLAMP_EPSILON) / scale);
        }
    }

    Ok(EntropyResult {
        value: contributions.values().sum(),
        contributions,
        support_missing_expected,
        granularity: d.granularity(),
        unidentified_mass: d.unidentified_mass(),
    })
}

fn expected_term(p: f64) -> f64 {
    -(1.0 - p) * p.ln()
}
