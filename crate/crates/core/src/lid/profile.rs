use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::text::{for_each_ngram, normalized_words};
use super::LidError;
use crate::model::LanguageTag;

/// Minimum number of letters a training corpus must contain.
pub const MIN_CORPUS_LETTERS: usize = 1000;

const PROFILE_FORMAT: &str = "langconf-profiles";
const PROFILE_VERSION: u32 = 1;

/// Character 1..4-gram counts of one language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorProfile {
    lang: LanguageTag,
    total: u64,
    ngram_counts: BTreeMap<String, u64>,
}

impl DetectorProfile {
    /// Rebuilds a profile from stored counts, checking that `total` matches.
    pub fn from_counts(
        lang: LanguageTag,
        ngram_counts: BTreeMap<String, u64>,
    ) -> Result<Self, LidError> {
        if ngram_counts.values().any(|&c| c == 0) {
            return Err(LidError::InvalidProfile(format!("{lang}: zero count")));
        }
        let total: u64 = ngram_counts.values().sum();
        if total == 0 {
            return Err(LidError::InvalidProfile(format!("{lang}: empty profile")));
        }
        Ok(Self {
            lang,
            total,
            ngram_counts,
        })
    }

    pub fn lang(&self) -> LanguageTag {
        self.lang
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn ngram_counts(&self) -> &BTreeMap<String, u64> {
        &self.ngram_counts
    }

    pub fn count(&self, ngram: &str) -> u64 {
        self.ngram_counts.get(ngram).copied().unwrap_or(0)
    }

    /// The `k` most frequent n-grams of order `n`, ties broken by n-gram.
    pub fn top_ngrams(&self, n: usize, k: usize) -> Vec<(&str, u64)> {
        let mut grams: Vec<(&str, u64)> = self
            .ngram_counts
            .iter()
            .filter(|(g, _)| g.chars().count() == n)
            .map(|(g, &c)| (g.as_str(), c))
            .collect();
        grams.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        grams.truncate(k);
        grams
    }

    fn validate(&self) -> Result<(), LidError> {
        let sum: u64 = self.ngram_counts.values().sum();
        if sum != self.total || self.ngram_counts.values().any(|&c| c == 0) {
            return Err(LidError::InvalidProfile(format!(
                "{}: counts do not add up to total",
                self.lang
            )));
        }
        Ok(())
    }
}

/// Counts every character 1..4-gram of the lowercased, punctuation-free
/// corpus. Words are padded with a space on each side so word boundaries
/// show up in the higher-order n-grams.
pub fn train_profile(corpus: &str, lang: LanguageTag) -> Result<DetectorProfile, LidError> {
    let letters = corpus.chars().filter(|c| c.is_alphabetic()).count();
    if letters < MIN_CORPUS_LETTERS {
        return Err(LidError::CorpusTooSmall {
            lang,
            letters,
            required: MIN_CORPUS_LETTERS,
        });
    }
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for word in normalized_words(corpus) {
        for_each_ngram(&word, |_, gram| {
            if let Some(c) = counts.get_mut(gram) {
                *c += 1;
            } else {
                counts.insert(gram.to_string(), 1);
            }
        });
    }
    DetectorProfile::from_counts(lang, counts)
}

#[derive(Serialize, Deserialize)]
struct ProfileFile {
    format: String,
    version: u32,
    profiles: Vec<DetectorProfile>,
}

/// Writes profiles as versioned JSON. Output is deterministic: profiles in
/// the given order, n-grams sorted.
pub fn write_profiles<W: Write>(profiles: &[DetectorProfile], writer: W) -> Result<(), LidError> {
    let file = ProfileFile {
        format: PROFILE_FORMAT.to_string(),
        version: PROFILE_VERSION,
        profiles: profiles.to_vec(),
    };
    serde_json::to_writer(writer, &file).map_err(|e| LidError::ProfileFormat(e.to_string()))
}

pub fn profiles_to_json(profiles: &[DetectorProfile]) -> String {
    let mut buf = Vec::new();
    write_profiles(profiles, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("json is utf-8")
}

pub fn read_profiles<R: Read>(reader: R) -> Result<Vec<DetectorProfile>, LidError> {
    let file: ProfileFile =
        serde_json::from_reader(reader).map_err(|e| LidError::ProfileFormat(e.to_string()))?;
    if file.format != PROFILE_FORMAT {
        return Err(LidError::ProfileFormat(format!(
            "unexpected format tag {:?}",
            file.format
        )));
    }
    if file.version != PROFILE_VERSION {
        return Err(LidError::ProfileFormat(format!(
            "unsupported profile version {}",
            file.version
        )));
    }
    for p in &file.profiles {
        p.validate()?;
    }
    Ok(file.profiles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_corpus_is_too_small() {
        let err = train_profile("", LanguageTag::code("deu")).unwrap_err();
        assert!(matches!(err, LidError::CorpusTooSmall { letters: 0, .. }));
    }

    #[test]
    fn degenerate_corpus_has_single_unigram() {
        let corpus = "aaaa ".repeat(250);
        let p = train_profile(&corpus, LanguageTag::code("xxa")).unwrap();
        let unigrams: Vec<&str> = p
            .ngram_counts()
            .keys()
            .filter(|g| g.chars().count() == 1)
            .map(String::as_str)
            .collect();
        assert_eq!(unigrams, ["a"]);
        assert_eq!(p.count("a"), 1000);
        assert_eq!(p.total(), p.ngram_counts().values().sum::<u64>());
    }

    #[test]
    fn counts_add_up() {
        let corpus = "Der schnelle braune Fuchs springt über den faulen Hund. ".repeat(30);
        let p = train_profile(&corpus, LanguageTag::code("deu")).unwrap();
        assert_eq!(p.total(), p.ngram_counts().values().sum::<u64>());
        assert!(p.ngram_counts().values().all(|&c| c > 0));
        assert_eq!(p.count("sch"), 30);
        assert_eq!(p.count("ü"), 30);
        assert_eq!(p.count("D"), 0);
    }

    #[test]
    fn serialization_round_trips_bit_exactly() {
        let corpus = "Le renard brun saute par-dessus le chien paresseux. ".repeat(40);
        let p = train_profile(&corpus, LanguageTag::code("fra")).unwrap();
        let json = profiles_to_json(std::slice::from_ref(&p));
        let back = read_profiles(json.as_bytes()).unwrap();
        assert_eq!(back, vec![p]);
        assert_eq!(profiles_to_json(&back), json);
    }

    #[test]
    fn rejects_tampered_files() {
        let bad = r#"{"format":"langconf-profiles","version":1,"profiles":[{"lang":"deu","total":5,"ngram_counts":{"a":2}}]}"#;
        assert!(read_profiles(bad.as_bytes()).is_err());
        let wrong_version = r#"{"format":"langconf-profiles","version":9,"profiles":[]}"#;
        assert!(read_profiles(wrong_version.as_bytes()).is_err());
        assert!(read_profiles("not json".as_bytes()).is_err());
    }
}
