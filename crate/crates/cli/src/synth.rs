//! Synthetic prompting corpora with controlled language mixing.
//!
//! Lines are sentences from the bundled seed corpora. Each line is replaced
//! by a sentence in a language outside the record's expectation set with the
//! setting's mixing probability.

use langconf_core::lid::seed::bundled_corpora;
use langconf_core::{GenerationRecord, LanguageTag, Setting, Task};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    pub records: usize,
    pub seed: u64,
    pub lines_per_record: usize,
    pub monolingual_mix: f64,
    pub crosslingual_mix: f64,
    /// Probability that a record is crosslingual.
    pub crosslingual_share: f64,
    pub models: Vec<String>,
    pub instruction_lang: LanguageTag,
    pub dataset: String,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            records: 60,
            seed: 0,
            lines_per_record: 6,
            monolingual_mix: 0.05,
            crosslingual_mix: 0.30,
            crosslingual_share: 0.5,
            models: vec!["model-a".into(), "model-b".into()],
            instruction_lang: LanguageTag::code("eng"),
            dataset: "synth".into(),
        }
    }
}

struct Pool {
    lang: LanguageTag,
    sentences: Vec<String>,
}

fn pools() -> Vec<Pool> {
    bundled_corpora()
        .iter()
        .map(|c| Pool {
            lang: c.lang,
            sentences: c.sentences().map(String::from).collect(),
        })
        .collect()
}

pub fn synthesize(options: &SynthOptions) -> Vec<GenerationRecord> {
    let pools = pools();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let targets: Vec<&Pool> = pools
        .iter()
        .filter(|p| p.lang != options.instruction_lang)
        .collect();
    (0..options.records)
        .map(|i| {
            let crosslingual = rng.random_bool(options.crosslingual_share);
            let target = *targets.choose(&mut rng).expect("several seed languages");
            let (setting, context, mix) = if crosslingual {
                (
                    Setting::Crosslingual,
                    options.instruction_lang,
                    options.crosslingual_mix,
                )
            } else {
                (Setting::Monolingual, target.lang, options.monolingual_mix)
            };
            let foreign: Vec<&Pool> = pools
                .iter()
                .filter(|p| p.lang != target.lang && p.lang != context)
                .collect();
            let lines: Vec<&str> = (0..options.lines_per_record)
                .map(|_| {
                    let pool = if rng.random_bool(mix) {
                        *foreign.choose(&mut rng).expect("foreign languages")
                    } else {
                        target
                    };
                    pool.sentences
                        .choose(&mut rng)
                        .expect("seed sentences")
                        .as_str()
                })
                .collect();
            GenerationRecord {
                id: format!("synth-{i:05}"),
                model: options.models[i % options.models.len()].clone(),
                dataset: options.dataset.clone(),
                setting,
                task: Task::Prompting,
                target_lang: target.lang,
                context_langs: [context].into(),
                response_text: lines.join("\n"),
                eval_step: None,
            }
        })
        .collect()
}

pub fn to_jsonl(records: &[GenerationRecord]) -> String {
    records
        .iter()
        .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
        .collect()
}
