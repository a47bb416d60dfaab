//! Line and word pass rates.
//!
//! `LPR = |R \ E_L| / |R|` and `WPR = |(R \ E_L) \ E_W| / |R \ E_L|`, where
//! `E_L` and `E_W` are the responses with line- and word-level errors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::model::codes::uses_non_latin_script;
use crate::model::{same_language, GenerationRecord, LanguageDistribution, LanguageTag};

/// Which languages a unit may be in without counting as an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PassReference {
    /// Only the target language ("all lines match the desired language").
    #[default]
    Target,
    /// Any language of the record's expectation set.
    Expected,
}

impl fmt::Display for PassReference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PassReference::Target => "target",
            PassReference::Expected => "expected",
        })
    }
}

impl FromStr for PassReference {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "target" => Ok(PassReference::Target),
            "expected" => Ok(PassReference::Expected),
            _ => Err(format!("unknown pass reference {s:?} (target, expected)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WprMode {
    /// Word errors are English tokens in responses whose target language is
    /// written in a non-Latin script. Latin-script targets always pass.
    #[default]
    PaperCompat,
    /// Any token outside the pass reference is an error.
    Strict,
}

impl fmt::Display for WprMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WprMode::PaperCompat => "paper-compat",
            WprMode::Strict => "strict",
        })
    }
}

impl FromStr for WprMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "paper-compat" | "paper" => Ok(WprMode::PaperCompat),
            "strict" => Ok(WprMode::Strict),
            _ => Err(format!("unknown WPR mode {s:?} (paper-compat, strict)")),
        }
    }
}

fn allowed(record: &GenerationRecord, lang: &LanguageTag, reference: PassReference) -> bool {
    match reference {
        PassReference::Target => same_language(&record.target_lang, lang),
        PassReference::Expected => record.expectation().contains(lang),
    }
}

/// True when some identified line is in a language outside the reference.
/// Unidentified lines never count.
pub fn is_line_error(
    record: &GenerationRecord,
    line: &LanguageDistribution,
    reference: PassReference,
) -> bool {
    line.support().any(|l| !allowed(record, l, reference))
}

pub fn is_word_error(
    record: &GenerationRecord,
    word: &LanguageDistribution,
    mode: WprMode,
    reference: PassReference,
) -> bool {
    match mode {
        WprMode::PaperCompat => {
            let english = LanguageTag::code("eng");
            uses_non_latin_script(&record.target_lang)
                && word.support().any(|l| same_language(l, &english))
        }
        WprMode::Strict => word.support().any(|l| !allowed(record, l, reference)),
    }
}

pub fn line_pass_rate(
    records: &[(&GenerationRecord, &LanguageDistribution)],
    reference: PassReference,
) -> Result<f64, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let passed = records
        .iter()
        .filter(|(r, d)| !is_line_error(r, d, reference))
        .count();
    Ok(passed as f64 / records.len() as f64)
}

#[derive(Debug, Clone, Copy)]
pub struct PassRateInput<'a> {
    pub record: &'a GenerationRecord,
    pub line: &'a LanguageDistribution,
    pub word: &'a LanguageDistribution,
}

pub fn word_pass_rate(
    inputs: &[PassRateInput<'_>],
    mode: WprMode,
    reference: PassReference,
) -> Result<f64, MetricsError> {
    let passers: Vec<_> = inputs
        .iter()
        .filter(|i| !is_line_error(i.record, i.line, reference))
        .collect();
    if passers.is_empty() {
        return Err(MetricsError::NoLinePassers);
    }
    let clean = passers
        .iter()
        .filter(|i| !is_word_error(i.record, i.word, mode, reference))
        .count();
    Ok(clean as f64 / passers.len() as f64)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::model::{Granularity, Setting, Task};

    fn tag(s: &str) -> LanguageTag {
        LanguageTag::code(s)
    }

    fn record(target: &str, context: &[&str], setting: Setting) -> GenerationRecord {
        GenerationRecord {
            id: "r".into(),
            model: "m".into(),
            dataset: "d".into(),
            setting,
            task: Task::Prompting,
            target_lang: tag(target),
            context_langs: context.iter().map(|c| tag(c)).collect(),
            response_text: "x".into(),
            eval_step: None,
        }
    }

    fn dist(g: Granularity, counts: &[(&str, usize)], unidentified: usize) -> LanguageDistribution {
        let counts: BTreeMap<_, _> = counts.iter().map(|(l, c)| (tag(l), *c)).collect();
        LanguageDistribution::from_counts(g, &counts, unidentified)
    }

    #[test]
    fn two_line_errors_in_ten() {
        let r = record("deu", &["deu"], Setting::Monolingual);
        let clean = dist(Granularity::Line, &[("deu", 3)], 1);
        let bad = dist(Granularity::Line, &[("deu", 2), ("eng", 1)], 0);
        let mut items = vec![(&r, &clean); 8];
        items.extend([(&r, &bad), (&r, &bad)]);
        assert_eq!(line_pass_rate(&items, PassReference::Target).unwrap(), 0.8);
    }

    #[test]
    fn line_rate_extremes() {
        let r = record("deu", &["deu"], Setting::Monolingual);
        let clean = dist(Granularity::Line, &[("deu", 1)], 0);
        let bad = dist(Granularity::Line, &[("fra", 1)], 0);
        assert_eq!(
            line_pass_rate(&[(&r, &clean)], PassReference::Target).unwrap(),
            1.0
        );
        assert_eq!(
            line_pass_rate(&[(&r, &bad)], PassReference::Target).unwrap(),
            0.0
        );
        assert_eq!(
            line_pass_rate(&[], PassReference::Target),
            Err(MetricsError::EmptyInput)
        );
    }

    #[test]
    fn instruction_language_depends_on_reference() {
        let r = record("jpn", &["eng"], Setting::Crosslingual);
        let d = dist(Granularity::Line, &[("jpn", 2), ("eng", 1)], 0);
        assert!(is_line_error(&r, &d, PassReference::Target));
        assert!(!is_line_error(&r, &d, PassReference::Expected));
    }

    #[test]
    fn english_token_under_japanese_target() {
        let r = record("jpn", &["jpn"], Setting::Monolingual);
        let line = dist(Granularity::Line, &[("jpn", 2)], 0);
        let clean = dist(Granularity::Word, &[("jpn", 5)], 0);
        let english = dist(Granularity::Word, &[("jpn", 4), ("eng", 1)], 0);
        let mut inputs = vec![
            PassRateInput {
                record: &r,
                line: &line,
                word: &clean
            };
            4
        ];
        inputs.push(PassRateInput {
            record: &r,
            line: &line,
            word: &english,
        });
        let wpr = word_pass_rate(&inputs, WprMode::PaperCompat, PassReference::Target).unwrap();
        assert_eq!(wpr, 0.8);
    }

    #[test]
    fn latin_targets_pass_vacuously_in_paper_mode() {
        let r = record("deu", &["deu"], Setting::Monolingual);
        let line = dist(Granularity::Line, &[("deu", 1)], 0);
        let word = dist(Granularity::Word, &[("deu", 3), ("eng", 1)], 0);
        let inputs = [PassRateInput {
            record: &r,
            line: &line,
            word: &word,
        }];
        assert_eq!(
            word_pass_rate(&inputs, WprMode::PaperCompat, PassReference::Target).unwrap(),
            1.0
        );
        assert_eq!(
            word_pass_rate(&inputs, WprMode::Strict, PassReference::Target).unwrap(),
            0.0
        );
    }

    #[test]
    fn paper_mode_ignores_non_english_intruders() {
        let r = record("kor", &["kor"], Setting::Monolingual);
        let line = dist(Granularity::Line, &[("kor", 1)], 0);
        let word = dist(Granularity::Word, &[("kor", 3), ("cmn", 1)], 0);
        assert!(!is_word_error(
            &r,
            &word,
            WprMode::PaperCompat,
            PassReference::Target
        ));
        assert!(is_word_error(
            &r,
            &word,
            WprMode::Strict,
            PassReference::Target
        ));
        let inputs = [PassRateInput {
            record: &r,
            line: &line,
            word: &word,
        }];
        assert_eq!(
            word_pass_rate(&inputs, WprMode::PaperCompat, PassReference::Target).unwrap(),
            1.0
        );
    }

    #[test]
    fn word_rate_needs_line_passers() {
        let r = record("kor", &["kor"], Setting::Monolingual);
        let line = dist(Granularity::Line, &[("eng", 1)], 0);
        let word = dist(Granularity::Word, &[("eng", 1)], 0);
        let inputs = [PassRateInput {
            record: &r,
            line: &line,
            word: &word,
        }];
        assert_eq!(
            word_pass_rate(&inputs, WprMode::PaperCompat, PassReference::Target),
            Err(MetricsError::NoLinePassers)
        );
    }

    #[test]
    fn removing_an_error_never_lowers_lpr() {
        let r = record("deu", &["deu"], Setting::Monolingual);
        let clean = dist(Granularity::Line, &[("deu", 1)], 0);
        let bad = dist(Granularity::Line, &[("eng", 1)], 0);
        let mut items = vec![(&r, &clean), (&r, &bad), (&r, &bad), (&r, &clean)];
        let mut last = line_pass_rate(&items, PassReference::Target).unwrap();
        while let Some(pos) = items.iter().position(|(_, d)| *d == &bad) {
            items.remove(pos);
            let now = line_pass_rate(&items, PassReference::Target).unwrap();
            assert!(now >= last);
            last = now;
        }
        assert_eq!(last, 1.0);
    }
}
