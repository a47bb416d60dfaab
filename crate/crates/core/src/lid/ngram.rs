//! Naive-Bayes style scoring of character n-grams against language profiles.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::chain::{DetectionResult, Detector};
use super::profile::DetectorProfile;
use super::text::{for_each_ngram, normalized_words};
use super::{LidError, MAX_NGRAM};
use crate::model::{same_language, LanguageTag};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyOptions {
    /// Minimum log-likelihood lead of the best language over the runner-up.
    /// Zero always identifies.
    pub margin: f64,
    /// Minimum share of the unit's characters the winning profile has seen.
    /// Lets a detector abstain on scripts it was never trained on.
    pub min_coverage: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            margin: 0.0,
            min_coverage: 0.0,
        }
    }
}

/// Scoring tables compiled from a set of profiles.
///
/// For every n-gram seen by any profile it stores `ln(count + 1)` per
/// profile; per profile and order it stores the add-one denominator
/// `ln(total_n + vocab_n)`.
#[derive(Debug, Clone)]
pub struct NgramClassifier {
    langs: Vec<LanguageTag>,
    log_counts: HashMap<Box<str>, Box<[f32]>>,
    log_denominators: Vec<[f64; MAX_NGRAM]>,
    options: ClassifyOptions,
}

impl NgramClassifier {
    pub fn new(profiles: &[DetectorProfile], options: ClassifyOptions) -> Result<Self, LidError> {
        if profiles.is_empty() {
            return Err(LidError::NoProfiles);
        }
        let mut sorted: Vec<&DetectorProfile> = profiles.iter().collect();
        sorted.sort_by_key(|p| p.lang());
        for pair in sorted.windows(2) {
            if pair[0].lang() == pair[1].lang() {
                return Err(LidError::DuplicateProfile(pair[0].lang()));
            }
        }
        let k = sorted.len();
        let mut log_counts: HashMap<Box<str>, Box<[f32]>> = HashMap::new();
        let mut log_denominators = Vec::with_capacity(k);
        for (idx, profile) in sorted.iter().enumerate() {
            let mut totals = [0u64; MAX_NGRAM];
            let mut vocab = [0u64; MAX_NGRAM];
            for (gram, &count) in profile.ngram_counts() {
                let n = gram.chars().count();
                if n == 0 || n > MAX_NGRAM {
                    return Err(LidError::InvalidProfile(format!(
                        "{}: n-gram {gram:?} has order {n}",
                        profile.lang()
                    )));
                }
                totals[n - 1] += count;
                vocab[n - 1] += 1;
                let slot = log_counts
                    .entry(gram.as_str().into())
                    .or_insert_with(|| vec![0.0; k].into_boxed_slice());
                slot[idx] = ((count + 1) as f64).ln() as f32;
            }
            let mut denoms = [0.0; MAX_NGRAM];
            for n in 0..MAX_NGRAM {
                denoms[n] = ((totals[n] + vocab[n]).max(1) as f64).ln();
            }
            log_denominators.push(denoms);
        }
        Ok(Self {
            langs: sorted.iter().map(|p| p.lang()).collect(),
            log_counts,
            log_denominators,
            options,
        })
    }

    /// Profile languages in tag order.
    pub fn languages(&self) -> &[LanguageTag] {
        &self.langs
    }

    pub fn options(&self) -> ClassifyOptions {
        self.options
    }

    /// Log-likelihood of `unit` under each profile, in [`languages`] order.
    /// `None` when the unit has no letters.
    ///
    /// [`languages`]: Self::languages
    pub fn scores(&self, unit: &str) -> Option<Vec<f64>> {
        self.score_with_coverage(unit).map(|(s, _, _)| s)
    }

    fn score_with_coverage(&self, unit: &str) -> Option<(Vec<f64>, Vec<usize>, usize)> {
        let k = self.langs.len();
        let mut scores = vec![0.0f64; k];
        let mut order_counts = [0usize; MAX_NGRAM];
        let mut seen_chars = vec![0usize; k];
        let mut chars = 0usize;
        for word in normalized_words(unit) {
            for_each_ngram(&word, |n, gram| {
                order_counts[n - 1] += 1;
                if n == 1 {
                    chars += 1;
                }
                if let Some(logs) = self.log_counts.get(gram) {
                    for (i, &l) in logs.iter().enumerate() {
                        scores[i] += l as f64;
                        if n == 1 && l > 0.0 {
                            seen_chars[i] += 1;
                        }
                    }
                }
            });
        }
        if chars == 0 {
            return None;
        }
        for (score, denoms) in scores.iter_mut().zip(&self.log_denominators) {
            for (count, denom) in order_counts.iter().zip(denoms) {
                *score -= *count as f64 * denom;
            }
        }
        Some((scores, seen_chars, chars))
    }

    /// Classifies `unit`, optionally restricted to `candidates`.
    ///
    /// The winner is the highest-scoring language, the smallest tag on ties.
    /// Confidence is the winner's softmax weight over the scored profiles.
    pub fn classify(
        &self,
        unit: &str,
        candidates: Option<&BTreeSet<LanguageTag>>,
    ) -> DetectionResult {
        if !unit.chars().any(char::is_alphabetic) {
            return DetectionResult::unidentified();
        }
        let Some((scores, seen_chars, chars)) = self.score_with_coverage(unit) else {
            return DetectionResult::unidentified();
        };
        let allowed: Vec<usize> = (0..self.langs.len())
            .filter(|&i| {
                candidates.is_none_or(|c| c.iter().any(|t| same_language(t, &self.langs[i])))
            })
            .collect();
        if allowed.is_empty() {
            return DetectionResult::unidentified();
        }

        let mut best = allowed[0];
        for &i in &allowed[1..] {
            if scores[i] > scores[best] {
                best = i;
            }
        }
        let runner_up = allowed
            .iter()
            .filter(|&&i| i != best)
            .map(|&i| scores[i])
            .fold(f64::NEG_INFINITY, f64::max);
        if self.options.margin > 0.0 && scores[best] - runner_up < self.options.margin {
            return DetectionResult::unidentified();
        }
        if (seen_chars[best] as f64) < self.options.min_coverage * chars as f64 {
            return DetectionResult::unidentified();
        }

        let top = scores[best];
        let z: f64 = allowed.iter().map(|&i| (scores[i] - top).exp()).sum();
        DetectionResult::identified(self.langs[best], 1.0 / z)
    }
}

/// One-shot classification of a unit against `profiles` with default
/// options. Builds the scoring tables on every call; hold an
/// [`NgramClassifier`] for repeated use.
pub fn classify_ngram(
    unit: &str,
    profiles: &[DetectorProfile],
) -> Result<DetectionResult, LidError> {
    Ok(NgramClassifier::new(profiles, ClassifyOptions::default())?.classify(unit, None))
}

/// [`NgramClassifier`] as a chain member.
#[derive(Debug, Clone)]
pub struct NgramDetector {
    name: String,
    classifier: NgramClassifier,
    supported: BTreeSet<LanguageTag>,
}

impl NgramDetector {
    pub fn new(
        name: impl Into<String>,
        profiles: &[DetectorProfile],
        options: ClassifyOptions,
    ) -> Result<Self, LidError> {
        let classifier = NgramClassifier::new(profiles, options)?;
        let supported = classifier.languages().iter().copied().collect();
        Ok(Self {
            name: name.into(),
            classifier,
            supported,
        })
    }

    pub fn classifier(&self) -> &NgramClassifier {
        &self.classifier
    }
}

impl Detector for NgramDetector {
    fn name(&self) -> &str {
        &self.name
    }

    fn supported(&self) -> &BTreeSet<LanguageTag> {
        &self.supported
    }

    fn classify(&self, unit: &str, candidates: Option<&BTreeSet<LanguageTag>>) -> DetectionResult {
        self.classifier.classify(unit, candidates)
    }
}
