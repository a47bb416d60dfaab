use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ModelError;

/// ISO 639-3 language code with an optional ISO 15924 script subtag.
///
/// Stored inline and case-normalized, so equality and ordering are plain
/// byte comparisons: code first, then script (absent sorts first).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LanguageTag {
    code: [u8; 3],
    script: Option<[u8; 4]>,
}

impl LanguageTag {
    /// Builds a tag from a three-letter code and an optional four-letter
    /// script. Both are case-normalized.
    pub fn new(code: &str, script: Option<&str>) -> Result<Self, ModelError> {
        let code = parse_code(code)?;
        let script = script.map(parse_script).transpose()?;
        Ok(Self { code, script })
    }

    /// Tag without a script subtag. Panics on an invalid code; meant for
    /// literals.
    pub fn code(code: &str) -> Self {
        Self::new(code, None).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn iso639_3(&self) -> &str {
        std::str::from_utf8(&self.code).expect("ascii")
    }

    pub fn script(&self) -> Option<&str> {
        self.script
            .as_ref()
            .map(|s| std::str::from_utf8(s).expect("ascii"))
    }

    /// Same language with the script dropped.
    pub fn without_script(&self) -> Self {
        Self {
            code: self.code,
            script: None,
        }
    }

    /// Explicit script if present, else the language's usual script.
    pub fn effective_script(&self) -> Option<&str> {
        self.script()
            .or_else(|| super::codes::default_script(self.iso639_3()))
    }
}

fn parse_code(s: &str) -> Result<[u8; 3], ModelError> {
    let b = s.as_bytes();
    if b.len() != 3 || !b.iter().all(u8::is_ascii_alphabetic) {
        return Err(ModelError::InvalidLanguageCode(s.to_string()));
    }
    Ok([
        b[0].to_ascii_lowercase(),
        b[1].to_ascii_lowercase(),
        b[2].to_ascii_lowercase(),
    ])
}

fn parse_script(s: &str) -> Result<[u8; 4], ModelError> {
    let b = s.as_bytes();
    if b.len() != 4 || !b.iter().all(u8::is_ascii_alphabetic) {
        return Err(ModelError::InvalidScriptCode(s.to_string()));
    }
    Ok([
        b[0].to_ascii_uppercase(),
        b[1].to_ascii_lowercase(),
        b[2].to_ascii_lowercase(),
        b[3].to_ascii_lowercase(),
    ])
}

impl FromStr for LanguageTag {
    type Err = ModelError;

    /// Accepts `deu`, `deu_Latn` and `deu-Latn`, in any case.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s.split_once(['_', '-']) {
            Some((code, script)) => Self::new(code, Some(script)),
            None => Self::new(s, None),
        }
    }
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.iso639_3())?;
        if let Some(script) = self.script() {
            write!(f, "_{script}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for LanguageTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LanguageTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
