use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{LanguageTag, ModelError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Monolingual,
    Crosslingual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// An instructed model answering a prompt.
    Prompting,
    /// An embedding inversion model reconstructing text.
    Inversion,
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Setting::Monolingual => "monolingual",
            Setting::Crosslingual => "crosslingual",
        })
    }
}

impl FromStr for Setting {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "monolingual" | "mono" => Ok(Setting::Monolingual),
            "crosslingual" | "cross" => Ok(Setting::Crosslingual),
            other => Err(ModelError::InvalidField {
                field: "setting",
                value: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Prompting => "prompting",
            Task::Inversion => "inversion",
        })
    }
}

impl FromStr for Task {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "prompting" | "prompt" => Ok(Task::Prompting),
            "inversion" | "invert" => Ok(Task::Inversion),
            other => Err(ModelError::InvalidField {
                field: "task",
                value: other.to_string(),
            }),
        }
    }
}

/// One model response together with the languages it was expected to use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub id: String,
    pub model: String,
    pub dataset: String,
    pub setting: Setting,
    pub task: Task,
    pub target_lang: LanguageTag,
    /// Instruction language for prompting, training languages for inversion.
    pub context_langs: BTreeSet<LanguageTag>,
    pub response_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_step: Option<String>,
}

impl GenerationRecord {
    /// Checks that the context languages agree with the declared setting.
    ///
    /// Crosslingual prompting needs an instruction language other than the
    /// target. Crosslingual inversion evaluates a language outside the
    /// training set; monolingual inversion one inside it.
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |reason: &str| {
            Err(ModelError::InconsistentSetting {
                id: self.id.clone(),
                reason: reason.to_string(),
            })
        };
        match (self.task, self.setting) {
            (Task::Prompting, Setting::Crosslingual) => {
                if !self
                    .context_langs
                    .iter()
                    .any(|l| !same_language(l, &self.target_lang))
                {
                    return bad(
                        "crosslingual prompt needs an instruction language other than the target",
                    );
                }
            }
            (Task::Inversion, Setting::Crosslingual) => {
                if self
                    .context_langs
                    .iter()
                    .any(|l| same_language(l, &self.target_lang))
                {
                    return bad("crosslingual inversion target must not be a training language");
                }
                if self.context_langs.is_empty() {
                    return bad("inversion record without training languages");
                }
            }
            (Task::Inversion, Setting::Monolingual) => {
                if !self
                    .context_langs
                    .iter()
                    .any(|l| same_language(l, &self.target_lang))
                {
                    return bad("monolingual inversion target must be a training language");
                }
            }
            (Task::Prompting, Setting::Monolingual) => {}
        }
        Ok(())
    }

    pub fn expectation(&self) -> ExpectationSet {
        ExpectationSet::for_record(self)
    }

    pub fn is_empty_response(&self) -> bool {
        self.response_text.trim().is_empty()
    }
}

/// Same language code; a missing script on either side matches any script.
pub(crate) fn same_language(a: &LanguageTag, b: &LanguageTag) -> bool {
    if a.script().is_none() || b.script().is_none() {
        a.iso639_3() == b.iso639_3()
    } else {
        a == b
    }
}

/// The languages a response may legitimately contain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectationSet {
    expected: BTreeSet<LanguageTag>,
}

impl ExpectationSet {
    pub fn new(expected: impl IntoIterator<Item = LanguageTag>) -> Result<Self, ModelError> {
        let expected: BTreeSet<_> = expected.into_iter().collect();
        if expected.is_empty() {
            return Err(ModelError::EmptyExpectationSet);
        }
        Ok(Self { expected })
    }

    /// Target language plus the instruction language (prompting) or the
    /// training languages (inversion).
    pub fn for_record(record: &GenerationRecord) -> Self {
        let mut expected = record.context_langs.clone();
        expected.insert(record.target_lang);
        Self { expected }
    }

    /// Membership by language code; scripts are compared only when both
    /// sides carry one.
    pub fn contains(&self, tag: &LanguageTag) -> bool {
        self.expected.contains(tag) || self.expected.iter().any(|e| same_language(e, tag))
    }

    pub fn languages(&self) -> &BTreeSet<LanguageTag> {
        &self.expected
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(setting: Setting, task: Task, target: &str, ctx: &[&str]) -> GenerationRecord {
        GenerationRecord {
            id: "r1".into(),
            model: "m".into(),
            dataset: "d".into(),
            setting,
            task,
            target_lang: target.parse().unwrap(),
            context_langs: ctx.iter().map(|c| c.parse().unwrap()).collect(),
            response_text: "text".into(),
            eval_step: None,
        }
    }

    #[test]
    fn expectation_includes_target_and_context() {
        let r = record(Setting::Crosslingual, Task::Prompting, "deu", &["eng"]);
        let x1 = r.expectation();
        assert_eq!(x1.languages().len(), 2);
        assert!(x1.contains(&LanguageTag::code("deu")));
        assert!(x1.contains(&LanguageTag::code("eng")));
        assert!(!x1.contains(&LanguageTag::code("fra")));
    }

    #[test]
    fn inversion_expectation_is_train_set_plus_target() {
        let r = record(
            Setting::Monolingual,
            Task::Inversion,
            "deu",
            &["deu", "hin", "heb"],
        );
        r.validate().unwrap();
        assert_eq!(r.expectation().languages().len(), 3);
        let r = record(Setting::Crosslingual, Task::Inversion, "heb", &["hin"]);
        r.validate().unwrap();
        assert_eq!(r.expectation().languages().len(), 2);
    }

    #[test]
    fn script_insensitive_membership() {
        let x1 = ExpectationSet::new(["jpn_Jpan".parse().unwrap()]).unwrap();
        assert!(x1.contains(&LanguageTag::code("jpn")));
        let x1 = ExpectationSet::new([LanguageTag::code("srp")]).unwrap();
        assert!(x1.contains(&"srp_Latn".parse().unwrap()));
        let x1 = ExpectationSet::new(["srp_Cyrl".parse().unwrap()]).unwrap();
        assert!(!x1.contains(&"srp_Latn".parse().unwrap()));
    }

    #[test]
    fn validation_catches_inconsistent_settings() {
        assert!(
            record(Setting::Crosslingual, Task::Prompting, "deu", &["deu"])
                .validate()
                .is_err()
        );
        assert!(record(
            Setting::Crosslingual,
            Task::Inversion,
            "deu",
            &["deu", "hin"]
        )
        .validate()
        .is_err());
        assert!(
            record(Setting::Monolingual, Task::Inversion, "deu", &["hin"])
                .validate()
                .is_err()
        );
        assert!(
            record(Setting::Monolingual, Task::Prompting, "deu", &["deu"])
                .validate()
                .is_ok()
        );
    }

    #[test]
    fn empty_expectation_rejected() {
        assert!(ExpectationSet::new(std::iter::empty()).is_err());
    }
}
