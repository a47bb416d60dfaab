//! Held-out accuracy of n-gram profiles.

use std::collections::{BTreeMap, BTreeSet};

use langconf_core::lid::seed::SeedCorpus;
use langconf_core::lid::{train_profile, ClassifyOptions, DetectorProfile, NgramClassifier};
use langconf_core::model::codes::default_script;
use langconf_core::LanguageTag;
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct LidEval {
    pub accuracy: f64,
    pub sentences: usize,
    /// Correct and total held-out sentences per language.
    pub per_language: BTreeMap<LanguageTag, (usize, usize)>,
    pub scripts: BTreeSet<String>,
}

/// Trains on each corpus's training split and classifies its held-out
/// sentences. With `profiles`, those are evaluated instead of training.
pub fn holdout_accuracy(
    corpora: &[SeedCorpus],
    profiles: Option<&[DetectorProfile]>,
    options: ClassifyOptions,
) -> Result<LidEval> {
    let trained;
    let profiles = match profiles {
        Some(p) => p,
        None => {
            trained = corpora
                .iter()
                .map(|c| train_profile(&c.split_holdout().0, c.lang))
                .collect::<Result<Vec<_>, _>>()
                .map_err(CliError::data)?;
            &trained
        }
    };
    let classifier = NgramClassifier::new(profiles, options).map_err(CliError::data)?;
    let mut per_language = BTreeMap::new();
    for c in corpora {
        let held = c.split_holdout().1;
        let correct = held
            .iter()
            .filter(|s| classifier.classify(s, None).lang == Some(c.lang))
            .count();
        per_language.insert(c.lang, (correct, held.len()));
    }
    let (correct, total) = per_language
        .values()
        .fold((0, 0), |(a, b), (c, t)| (a + c, b + t));
    if total == 0 {
        return Err(CliError::Data("corpora have no held-out sentences".into()));
    }
    let scripts = corpora
        .iter()
        .filter_map(|c| default_script(c.lang.iso639_3()).map(|s| s.to_string()))
        .collect();
    Ok(LidEval {
        accuracy: correct as f64 / total as f64,
        sentences: total,
        per_language,
        scripts,
    })
}
