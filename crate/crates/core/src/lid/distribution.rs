use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::chain::{detect_unit, DetectorChain};
use super::text::{split_lines, tokenize};
use crate::model::{GenerationRecord, Granularity, LanguageDistribution, LanguageTag};
use crate::par::Execution;

/// Line- and word-level distributions of one response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordDistributions {
    pub line: LanguageDistribution,
    pub word: LanguageDistribution,
}

#[derive(Default)]
struct Tally {
    counts: BTreeMap<LanguageTag, usize>,
    unidentified: usize,
}

impl Tally {
    fn add(&mut self, lang: Option<LanguageTag>) {
        match lang {
            Some(l) => *self.counts.entry(l).or_insert(0) += 1,
            None => self.unidentified += 1,
        }
    }

    fn into_distribution(self, granularity: Granularity) -> LanguageDistribution {
        LanguageDistribution::from_counts(granularity, &self.counts, self.unidentified)
    }
}

/// Every non-blank line counts once; `mass(l)` is the share of lines
/// detected as `l`.
pub fn build_line_distribution(
    record: &GenerationRecord,
    chain: &DetectorChain,
) -> LanguageDistribution {
    let mut tally = Tally::default();
    for line in split_lines(&record.response_text) {
        tally.add(detect_unit(line, chain, None).lang);
    }
    tally.into_distribution(Granularity::Line)
}

/// Every token of the response counts once. Lines are tokenized with their
/// own detected language as the tokenizer hint.
pub fn build_word_distribution(
    record: &GenerationRecord,
    chain: &DetectorChain,
) -> LanguageDistribution {
    build_distributions(record, chain).word
}

/// Both distributions in one pass, sharing the line detections.
pub fn build_distributions(
    record: &GenerationRecord,
    chain: &DetectorChain,
) -> RecordDistributions {
    let mut lines = Tally::default();
    let mut words = Tally::default();
    for line in split_lines(&record.response_text) {
        let line_lang = detect_unit(line, chain, None).lang;
        lines.add(line_lang);
        for token in tokenize(line, line_lang.as_ref()) {
            words.add(detect_unit(&token, chain, None).lang);
        }
    }
    RecordDistributions {
        line: lines.into_distribution(Granularity::Line),
        word: words.into_distribution(Granularity::Word),
    }
}

/// [`build_distributions`] over a batch, in input order.
pub fn build_all_distributions(
    records: &[GenerationRecord],
    chain: &DetectorChain,
    execution: Execution,
) -> Vec<RecordDistributions> {
    execution.map(records, |r| build_distributions(r, chain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lid::chain::tests::TableDetector;
    use crate::model::{Setting, Task};

    fn record(text: &str) -> GenerationRecord {
        GenerationRecord {
            id: "r".into(),
            model: "m".into(),
            dataset: "d".into(),
            setting: Setting::Monolingual,
            task: Task::Prompting,
            target_lang: LanguageTag::code("deu"),
            context_langs: Default::default(),
            response_text: text.into(),
            eval_step: None,
        }
    }

    fn chain(entries: &[(&str, &str)]) -> DetectorChain {
        DetectorChain::single(TableDetector::new("table", entries))
    }

    fn tag(s: &str) -> LanguageTag {
        LanguageTag::code(s)
    }

    #[test]
    fn lines_weigh_equally() {
        let c = chain(&[
            ("Guten Tag", "deu"),
            ("Wie geht es", "deu"),
            ("Hello there", "eng"),
        ]);
        let d = build_line_distribution(&record("Guten Tag\nWie geht es\nHello there"), &c);
        assert!((d.probability(&tag("deu")) - 2.0 / 3.0).abs() < 1e-12);
        assert!((d.probability(&tag("eng")) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(d.unit_count(), 3);
        assert_eq!(d.granularity(), Granularity::Line);

        let d = build_line_distribution(&record("Guten Tag"), &c);
        assert_eq!(d.probability(&tag("deu")), 1.0);
    }

    #[test]
    fn unidentified_lines_become_unidentified_mass() {
        let c = chain(&[("a", "deu"), ("b", "deu"), ("c", "eng")]);
        let d = build_line_distribution(&record("a\nb\nc\n???"), &c);
        assert!((d.identified_mass() - 0.75).abs() < 1e-12);
        assert!((d.unidentified_mass() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn empty_response_has_no_units() {
        let c = chain(&[("a", "deu")]);
        let d = build_line_distribution(&record(""), &c);
        assert_eq!(d.unit_count(), 0);
        assert_eq!(d.unidentified_mass(), 1.0);
    }

    #[test]
    fn tokens_weigh_equally_across_lines() {
        let c = chain(&[
            ("私は OK", "jpn"),
            ("猫です", "jpn"),
            ("私", "jpn"),
            ("は", "jpn"),
            ("OK", "eng"),
            ("猫", "jpn"),
            ("です", "jpn"),
        ]);
        let d = build_word_distribution(&record("私は OK\n猫です"), &c);
        assert_eq!(d.unit_count(), 5);
        assert!((d.probability(&tag("jpn")) - 0.8).abs() < 1e-12);
        assert!((d.probability(&tag("eng")) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn four_tokens_three_to_one() {
        let c = chain(&[
            ("ab cd", "jpn"),
            ("ef gh", "jpn"),
            ("ab", "jpn"),
            ("cd", "jpn"),
            ("ef", "jpn"),
            ("gh", "eng"),
        ]);
        let d = build_word_distribution(&record("ab cd\nef gh"), &c);
        assert_eq!(d.probability(&tag("jpn")), 0.75);
        assert_eq!(d.probability(&tag("eng")), 0.25);
    }

    #[test]
    fn single_language_words() {
        let c = chain(&[("ab cd", "deu"), ("ab", "deu"), ("cd", "deu")]);
        let d = build_word_distribution(&record("ab cd"), &c);
        assert_eq!(d.probability(&tag("deu")), 1.0);
    }

    #[test]
    fn no_letter_tokens() {
        let c = chain(&[("123 !!", "deu")]);
        let d = build_word_distribution(&record("123 !!"), &c);
        assert_eq!(d.unit_count(), 0);
        assert_eq!(d.unidentified_mass(), 1.0);
    }

    #[test]
    fn batch_matches_single() {
        let c = chain(&[("a", "deu"), ("b", "eng")]);
        let records: Vec<_> = ["a\nb", "b", "a\na\nb", ""]
            .iter()
            .map(|t| record(t))
            .collect();
        let seq = build_all_distributions(&records, &c, Execution::Sequential);
        let par = build_all_distributions(&records, &c, Execution::Parallel);
        assert_eq!(seq, par);
        assert_eq!(seq[2].line, build_line_distribution(&records[2], &c));
    }
}
