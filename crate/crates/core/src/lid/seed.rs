//! Seed corpora compiled into the crate: one sentence per line, named
//! `<iso639_3>.txt` under `data/seed/`.

use std::fs;
use std::path::Path;

use super::ngram::{ClassifyOptions, NgramDetector};
use super::profile::{train_profile, DetectorProfile};
use super::LidError;
use crate::model::LanguageTag;
use crate::par::Execution;

macro_rules! seed {
    ($code:literal) => {
        (
            $code,
            include_str!(concat!("../../data/seed/", $code, ".txt")),
        )
    };
}

const BUNDLED: &[(&str, &str)] = &[
    seed!("arb"),
    seed!("cmn"),
    seed!("deu"),
    seed!("ell"),
    seed!("eng"),
    seed!("fra"),
    seed!("heb"),
    seed!("hin"),
    seed!("jpn"),
    seed!("kor"),
    seed!("rus"),
    seed!("spa"),
];

/// Every `HOLDOUT_STRIDE`-th sentence (the last of each group) is held out.
pub const HOLDOUT_STRIDE: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedCorpus {
    pub lang: LanguageTag,
    pub text: String,
}

impl SeedCorpus {
    pub fn sentences(&self) -> impl Iterator<Item = &str> {
        self.text.lines().map(str::trim).filter(|l| !l.is_empty())
    }

    /// Training text and held-out sentences. Sentence `i` is held out when
    /// `i % HOLDOUT_STRIDE == HOLDOUT_STRIDE - 1`.
    pub fn split_holdout(&self) -> (String, Vec<&str>) {
        let mut train = String::new();
        let mut held = Vec::new();
        for (i, s) in self.sentences().enumerate() {
            if i % HOLDOUT_STRIDE == HOLDOUT_STRIDE - 1 {
                held.push(s);
            } else {
                train.push_str(s);
                train.push('\n');
            }
        }
        (train, held)
    }
}

/// The corpora shipped with the crate, in tag order.
pub fn bundled_corpora() -> Vec<SeedCorpus> {
    BUNDLED
        .iter()
        .map(|(code, text)| SeedCorpus {
            lang: LanguageTag::code(code),
            text: (*text).to_string(),
        })
        .collect()
}

/// Reads every `<iso639_3>.txt` in `dir`, sorted by language. Other files
/// are ignored.
pub fn load_corpus_dir(dir: &Path) -> Result<Vec<SeedCorpus>, LidError> {
    let io = |e: std::io::Error| LidError::Io(format!("{}: {e}", dir.display()));
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("txt") {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        let Ok(lang) = LanguageTag::new(stem, None) else {
            log::warn!("skipping {}: not an ISO 639-3 file name", path.display());
            continue;
        };
        let text = fs::read_to_string(&path)
            .map_err(|e| LidError::Io(format!("{}: {e}", path.display())))?;
        out.push(SeedCorpus { lang, text });
    }
    out.sort_by_key(|c| c.lang);
    if out.is_empty() {
        return Err(LidError::Io(format!(
            "{}: no <iso639_3>.txt corpora",
            dir.display()
        )));
    }
    Ok(out)
}

/// Trains one profile per corpus on its full text.
pub fn train_profiles(
    corpora: &[SeedCorpus],
    execution: Execution,
) -> Result<Vec<DetectorProfile>, LidError> {
    execution.try_map(corpora, |c| train_profile(&c.text, c.lang))
}

/// Profiles trained on the bundled corpora.
pub fn bundled_profiles() -> Vec<DetectorProfile> {
    train_profiles(&bundled_corpora(), Execution::default())
        .expect("bundled corpora are large enough")
}

/// Single n-gram detector over the bundled profiles.
pub fn bundled_detector(options: ClassifyOptions) -> NgramDetector {
    NgramDetector::new("bundled-ngram", &bundled_profiles(), options)
        .expect("bundled profiles are valid")
}
