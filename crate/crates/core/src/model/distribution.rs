use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{LanguageTag, ModelError};

const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Line,
    Word,
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Line => "line",
            Granularity::Word => "word",
        })
    }
}

impl std::str::FromStr for Granularity {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "line" => Ok(Granularity::Line),
            "word" => Ok(Granularity::Word),
            other => Err(ModelError::InvalidField {
                field: "granularity",
                value: other.to_string(),
            }),
        }
    }
}

/// Probability mass over detected languages for one response.
///
/// Raw distributions satisfy `sum(mass) + unidentified_mass = 1`. After
/// [`normalize`](Self::normalize) the identified mass alone sums to one and
/// `unidentified_mass` is kept only as a record of what was dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageDistribution {
    granularity: Granularity,
    mass: BTreeMap<LanguageTag, f64>,
    unidentified_mass: f64,
    unit_count: usize,
    #[serde(default)]
    normalized: bool,
}

impl LanguageDistribution {
    /// Raw distribution. Zero entries are dropped.
    pub fn new(
        granularity: Granularity,
        mass: BTreeMap<LanguageTag, f64>,
        unidentified_mass: f64,
        unit_count: usize,
    ) -> Result<Self, ModelError> {
        let d = Self {
            granularity,
            mass: drop_zeros(mass)?,
            unidentified_mass: check_probability(unidentified_mass)?,
            unit_count,
            normalized: false,
        };
        let total = d.identified_mass() + d.unidentified_mass;
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(ModelError::MassDoesNotSumToOne(total));
        }
        Ok(d)
    }

    /// Distribution whose identified mass already sums to one; the
    /// unidentified fraction is carried as metadata.
    pub fn new_normalized(
        granularity: Granularity,
        mass: BTreeMap<LanguageTag, f64>,
        unidentified_mass: f64,
        unit_count: usize,
    ) -> Result<Self, ModelError> {
        let d = Self {
            granularity,
            mass: drop_zeros(mass)?,
            unidentified_mass: check_probability(unidentified_mass)?,
            unit_count,
            normalized: true,
        };
        let total = d.identified_mass();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(ModelError::MassDoesNotSumToOne(total));
        }
        Ok(d)
    }

    /// Distribution of units counted per language. With no units at all the
    /// result is empty with `unidentified_mass = 1`.
    pub fn from_counts(
        granularity: Granularity,
        counts: &BTreeMap<LanguageTag, usize>,
        unidentified: usize,
    ) -> Self {
        let total = counts.values().sum::<usize>() + unidentified;
        if total == 0 {
            return Self::empty(granularity);
        }
        let denom = total as f64;
        let mass = counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(&lang, &c)| (lang, c as f64 / denom))
            .collect();
        Self {
            granularity,
            mass,
            unidentified_mass: unidentified as f64 / denom,
            unit_count: total,
            normalized: false,
        }
    }

    /// No observed units.
    pub fn empty(granularity: Granularity) -> Self {
        Self {
            granularity,
            mass: BTreeMap::new(),
            unidentified_mass: 1.0,
            unit_count: 0,
            normalized: false,
        }
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn mass(&self) -> &BTreeMap<LanguageTag, f64> {
        &self.mass
    }

    pub fn probability(&self, lang: &LanguageTag) -> f64 {
        self.mass.get(lang).copied().unwrap_or(0.0)
    }

    pub fn unidentified_mass(&self) -> f64 {
        self.unidentified_mass
    }

    pub fn unit_count(&self) -> usize {
        self.unit_count
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn identified_mass(&self) -> f64 {
        self.mass.values().sum()
    }

    /// Detected languages, in tag order.
    pub fn support(&self) -> impl Iterator<Item = &LanguageTag> {
        self.mass.keys()
    }

    /// Rescales the identified mass to sum to one.
    ///
    /// Relative proportions are preserved; granularity, unit count and the
    /// unidentified fraction are carried through unchanged.
    pub fn normalize(&self) -> Result<Self, ModelError> {
        let total = self.identified_mass();
        if total <= 0.0 {
            return Err(ModelError::AllUnidentified);
        }
        if !self.normalized && total + self.unidentified_mass > 1.0 + SUM_TOLERANCE {
            return Err(ModelError::MassDoesNotSumToOne(
                total + self.unidentified_mass,
            ));
        }
        Ok(Self {
            granularity: self.granularity,
            mass: self.mass.iter().map(|(&l, &p)| (l, p / total)).collect(),
            unidentified_mass: self.unidentified_mass,
            unit_count: self.unit_count,
            normalized: true,
        })
    }
}

fn check_probability(p: f64) -> Result<f64, ModelError> {
    if !p.is_finite() || !(0.0..=1.0 + SUM_TOLERANCE).contains(&p) {
        return Err(ModelError::InvalidProbability(p));
    }
    Ok(p)
}

fn drop_zeros(mass: BTreeMap<LanguageTag, f64>) -> Result<BTreeMap<LanguageTag, f64>, ModelError> {
    let mut out = BTreeMap::new();
    for (lang, p) in mass {
        if check_probability(p)? > 0.0 {
            out.insert(lang, p);
        }
    }
    Ok(out)
}

/// Convex combination of distributions under normalized `weights`.
///
/// Unit counts add up; the result is normalized only if every input is.
pub fn merge_distributions(
    ds: &[LanguageDistribution],
    weights: &[f64],
) -> Result<LanguageDistribution, ModelError> {
    let first = ds.first().ok_or(ModelError::EmptyInput)?;
    if ds.len() != weights.len() {
        return Err(ModelError::WeightCountMismatch {
            distributions: ds.len(),
            weights: weights.len(),
        });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(ModelError::InvalidWeights);
    }
    let weight_sum: f64 = weights.iter().sum();
    if weight_sum <= 0.0 {
        return Err(ModelError::InvalidWeights);
    }
    if ds.iter().any(|d| d.granularity != first.granularity) {
        return Err(ModelError::MixedGranularity);
    }

    let mut mass: BTreeMap<LanguageTag, f64> = BTreeMap::new();
    let mut unidentified = 0.0;
    for (d, w) in ds.iter().zip(weights) {
        let w = w / weight_sum;
        for (&lang, &p) in &d.mass {
            *mass.entry(lang).or_insert(0.0) += w * p;
        }
        unidentified += w * d.unidentified_mass;
    }
    mass.retain(|_, p| *p > 0.0);
    Ok(LanguageDistribution {
        granularity: first.granularity,
        mass,
        unidentified_mass: unidentified,
        unit_count: ds.iter().map(|d| d.unit_count).sum(),
        normalized: ds.iter().all(|d| d.normalized),
    })
}
