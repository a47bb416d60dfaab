//! JSONL readers for the supported corpus layouts.
//!
//! `generic-jsonl` carries [`GenerationRecord`] fields verbatim. The LCB and
//! MTEI adapters map their own field names; each lives in one function so a
//! schema change touches only that function.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use langconf_core::model::codes::normalize_code;
use langconf_core::{GenerationRecord, LanguageTag, Setting, Task};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

/// Share of malformed lines above which a file is rejected.
pub const MAX_MALFORMED_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    LcbJsonl,
    MteiJsonl,
    GenericJsonl,
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::LcbJsonl => "lcb-jsonl",
            InputFormat::MteiJsonl => "mtei-jsonl",
            InputFormat::GenericJsonl => "generic-jsonl",
        })
    }
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lcb-jsonl" | "lcb" => Ok(InputFormat::LcbJsonl),
            "mtei-jsonl" | "mtei" => Ok(InputFormat::MteiJsonl),
            "generic-jsonl" | "generic" => Ok(InputFormat::GenericJsonl),
            _ => Err(format!("unknown input format {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Malformed {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub records: Vec<GenerationRecord>,
    pub malformed: Vec<Malformed>,
    /// Non-blank lines read.
    pub total_lines: usize,
}

pub fn ingest(path: &Path, format: InputFormat) -> Result<Ingested> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_jsonl(&text, format, &path.display().to_string())
}

pub fn parse_jsonl(text: &str, format: InputFormat, source: &str) -> Result<Ingested> {
    let mut records = Vec::new();
    let mut malformed = Vec::new();
    let mut ids = HashSet::new();
    let mut total_lines = 0;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        total_lines += 1;
        let n = i + 1;
        let parsed = serde_json::from_str::<Value>(line)
            .map_err(|e| e.to_string())
            .and_then(|v| match format {
                InputFormat::GenericJsonl => generic(v),
                InputFormat::LcbJsonl => lcb(v, n),
                InputFormat::MteiJsonl => mtei(v, n),
            })
            .and_then(|r| r.validate().map(|_| r).map_err(|e| e.to_string()))
            .and_then(|r| {
                if ids.insert(r.id.clone()) {
                    Ok(r)
                } else {
                    Err(format!("duplicate id {:?}", r.id))
                }
            });
        match parsed {
            Ok(r) => records.push(r),
            Err(message) => malformed.push(Malformed { line: n, message }),
        }
    }
    if !malformed.is_empty() {
        let share = malformed.len() as f64 / total_lines as f64;
        if share > MAX_MALFORMED_FRACTION {
            return Err(CliError::TooManyMalformed {
                path: source.to_string(),
                malformed: malformed.len(),
                total: total_lines,
                first_line: malformed[0].line,
                first_message: malformed[0].message.clone(),
            });
        }
        for m in &malformed {
            log::warn!("{source}:{}: skipped: {}", m.line, m.message);
        }
    }
    Ok(Ingested {
        records,
        malformed,
        total_lines,
    })
}

fn generic(v: Value) -> Result<GenerationRecord, String> {
    serde_json::from_value(v).map_err(|e| e.to_string())
}

fn lang(raw: &str) -> Result<LanguageTag, String> {
    raw.parse::<LanguageTag>()
        .ok()
        .or_else(|| normalize_code(raw))
        .ok_or_else(|| format!("unrecognised language {raw:?}"))
}

/// Strings pass through, numbers are printed, anything else is absent.
fn scalar(v: Option<&Value>) -> Option<String> {
    match v? {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn first<'a>(v: &'a Value, keys: &[&str]) -> Option<&'a Value> {
    keys.iter().find_map(|k| v.get(*k).filter(|x| !x.is_null()))
}

fn required_str(v: &Value, keys: &[&str]) -> Result<String, String> {
    scalar(first(v, keys)).ok_or_else(|| format!("missing field {:?}", keys[0]))
}

/// Language Confusion Benchmark completions.
///
/// Fields: `language` (target, ISO 639-1 or 639-3), `completion`, `model`,
/// optional `id`, `source` (dataset), `setting` or `type`
/// (monolingual/crosslingual) and `prompt_language` (instruction language of
/// crosslingual prompts, English when absent).
fn lcb(v: Value, line: usize) -> Result<GenerationRecord, String> {
    let target = lang(&required_str(&v, &["language", "target_lang", "lang"])?)?;
    let prompt_lang = scalar(first(
        &v,
        &["prompt_language", "prompt_lang", "instruction_lang"],
    ))
    .map(|s| lang(&s))
    .transpose()?;
    let setting = match scalar(first(&v, &["setting", "type"])) {
        Some(s) => s.parse::<Setting>().map_err(|e| e.to_string())?,
        None => match prompt_lang {
            Some(p) if p.iso639_3() != target.iso639_3() => Setting::Crosslingual,
            _ => Setting::Monolingual,
        },
    };
    let context = match setting {
        Setting::Monolingual => target,
        Setting::Crosslingual => prompt_lang.unwrap_or_else(|| LanguageTag::code("eng")),
    };
    let model = required_str(&v, &["model"])?;
    Ok(GenerationRecord {
        id: scalar(first(&v, &["id"])).unwrap_or_else(|| format!("{model}:{line}")),
        model,
        dataset: scalar(first(&v, &["source", "dataset"])).unwrap_or_else(|| "lcb".into()),
        setting,
        task: Task::Prompting,
        target_lang: target,
        context_langs: [context].into(),
        response_text: required_str(&v, &["completion", "response", "output"])?,
        eval_step: None,
    })
}

/// Embedding inversion outputs.
///
/// Fields: `eval_lang`, `train_langs` (list or comma-separated string),
/// `prediction` (reconstructed text), `model`, optional `id`, `dataset`
/// and `step`. The setting is crosslingual when the evaluation language is
/// not a training language.
fn mtei(v: Value, line: usize) -> Result<GenerationRecord, String> {
    let target = lang(&required_str(
        &v,
        &["eval_lang", "eval_language", "language"],
    )?)?;
    let train: BTreeSet<LanguageTag> = match first(&v, &["train_langs", "train_languages"]) {
        Some(Value::Array(items)) => items
            .iter()
            .map(|x| {
                x.as_str()
                    .ok_or("train_langs must hold strings")
                    .map_err(String::from)
                    .and_then(lang)
            })
            .collect::<Result<_, _>>()?,
        Some(Value::String(s)) => s
            .split(',')
            .map(|x| lang(x.trim()))
            .collect::<Result<_, _>>()?,
        _ => return Err("missing field \"train_langs\"".into()),
    };
    if train.is_empty() {
        return Err("train_langs is empty".into());
    }
    let setting = if train.iter().any(|t| t.iso639_3() == target.iso639_3()) {
        Setting::Monolingual
    } else {
        Setting::Crosslingual
    };
    let model = required_str(&v, &["model", "inverter"])?;
    Ok(GenerationRecord {
        id: scalar(first(&v, &["id"])).unwrap_or_else(|| format!("{model}:{line}")),
        model,
        dataset: scalar(first(&v, &["dataset"])).unwrap_or_else(|| "mtei".into()),
        setting,
        task: Task::Inversion,
        target_lang: target,
        context_langs: train,
        response_text: required_str(&v, &["prediction", "inverted_text", "text", "output"])?,
        eval_step: scalar(first(&v, &["step", "eval_step"])),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic_line(id: usize) -> String {
        format!(
            r#"{{"id":"r{id}","model":"m","dataset":"d","setting":"monolingual","task":"prompting","target_lang":"deu","context_langs":["deu"],"response_text":"Hallo"}}"#
        )
    }

    #[test]
    fn three_generic_lines() {
        let text: Vec<String> = (0..3).map(generic_line).collect();
        let got = parse_jsonl(&text.join("\n"), InputFormat::GenericJsonl, "t").unwrap();
        assert_eq!(got.records.len(), 3);
        assert!(got.malformed.is_empty());
    }

    #[test]
    fn one_malformed_in_a_hundred() {
        let mut lines: Vec<String> = (0..99).map(generic_line).collect();
        lines.insert(40, "{not json".into());
        let got = parse_jsonl(&lines.join("\n"), InputFormat::GenericJsonl, "t").unwrap();
        assert_eq!(got.records.len(), 99);
        assert_eq!(got.malformed.len(), 1);
        assert_eq!(got.malformed[0].line, 41);
    }

    #[test]
    fn half_malformed_rejected() {
        let lines: Vec<String> = (0..100)
            .map(|i| {
                if i % 2 == 0 {
                    generic_line(i)
                } else {
                    "[]".into()
                }
            })
            .collect();
        let err = parse_jsonl(&lines.join("\n"), InputFormat::GenericJsonl, "t").unwrap_err();
        assert!(matches!(
            err,
            CliError::TooManyMalformed {
                malformed: 50,
                total: 100,
                ..
            }
        ));
        assert_eq!(err.exit_code(), crate::error::EXIT_DATA);
    }

    #[test]
    fn duplicate_and_inconsistent_records_are_malformed() {
        let bad_setting = r#"{"id":"x","model":"m","dataset":"d","setting":"crosslingual","task":"prompting","target_lang":"deu","context_langs":["deu"],"response_text":"Hallo"}"#;
        let mut lines: Vec<String> = (0..20).map(generic_line).collect();
        lines.push(generic_line(3));
        lines.push(bad_setting.into());
        let got = parse_jsonl(&lines.join("\n"), InputFormat::GenericJsonl, "t").unwrap();
        assert_eq!(got.records.len(), 20);
        assert_eq!(got.malformed.len(), 2);
    }

    #[test]
    fn lcb_adapter() {
        let text = r#"{"model":"gpt","source":"okapi","language":"fr","completion":"Bonjour"}
{"id":7,"model":"gpt","language":"ja","prompt_language":"en","completion":"こんにちは"}"#;
        let got = parse_jsonl(text, InputFormat::LcbJsonl, "t").unwrap();
        let [a, b] = &got.records[..] else { panic!() };
        assert_eq!((a.id.as_str(), a.dataset.as_str()), ("gpt:1", "okapi"));
        assert_eq!(a.setting, Setting::Monolingual);
        assert_eq!(a.target_lang, LanguageTag::code("fra"));
        assert_eq!(b.id, "7");
        assert_eq!(b.setting, Setting::Crosslingual);
        assert_eq!(b.context_langs, [LanguageTag::code("eng")].into());
    }

    #[test]
    fn mtei_adapter() {
        let text = r#"{"model":"inv","eval_lang":"heb","train_langs":["hin","deu"],"prediction":"x","step":3}
{"model":"inv","eval_lang":"deu","train_langs":"deu,hin","prediction":"y"}"#;
        let got = parse_jsonl(text, InputFormat::MteiJsonl, "t").unwrap();
        assert_eq!(got.records[0].setting, Setting::Crosslingual);
        assert_eq!(got.records[0].task, Task::Inversion);
        assert_eq!(got.records[0].eval_step.as_deref(), Some("3"));
        assert_eq!(got.records[1].setting, Setting::Monolingual);
        assert_eq!(got.records[1].dataset, "mtei");
    }

    #[test]
    fn missing_file() {
        let err = ingest(Path::new("/nonexistent/x.jsonl"), InputFormat::GenericJsonl).unwrap_err();
        assert!(matches!(err, CliError::FileNotFound(_)));
    }
}
