use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::kernel::{angular_similarity, cosine_similarity, jaccard_similarity};
use super::TypologyError;
use crate::model::{same_language, LanguageTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Multivalued,
    Binary,
    Embedding,
}

impl GraphKind {
    pub fn default_kernel(self) -> Kernel {
        match self {
            GraphKind::Multivalued | GraphKind::Binary => Kernel::Jaccard,
            GraphKind::Embedding => Kernel::Cosine,
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphKind::Multivalued => "multivalued",
            GraphKind::Binary => "binary",
            GraphKind::Embedding => "embedding",
        })
    }
}

impl FromStr for GraphKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "multivalued" => Ok(GraphKind::Multivalued),
            "binary" => Ok(GraphKind::Binary),
            "embedding" => Ok(GraphKind::Embedding),
            _ => Err(format!(
                "unknown graph kind {s:?} (multivalued, binary, embedding)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    Jaccard,
    Cosine,
    /// `1 - arccos(cos) / pi`, in [0, 1].
    AngularCosine,
}

impl Kernel {
    pub fn applies_to(self, kind: GraphKind) -> bool {
        match self {
            Kernel::Jaccard => kind != GraphKind::Embedding,
            Kernel::Cosine | Kernel::AngularCosine => kind == GraphKind::Embedding,
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::Jaccard => "jaccard",
            Kernel::Cosine => "cosine",
            Kernel::AngularCosine => "angular-cosine",
        })
    }
}

impl FromStr for Kernel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "jaccard" => Ok(Kernel::Jaccard),
            "cosine" => Ok(Kernel::Cosine),
            "angular-cosine" | "angular" | "arccos" => Ok(Kernel::AngularCosine),
            _ => Err(format!(
                "unknown kernel {s:?} (jaccard, cosine, angular-cosine)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub lang: LanguageTag,
    /// Feature id to categorical value; absent features are missing.
    pub features: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryFeatureSet {
    pub lang: LanguageTag,
    pub present: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub lang: LanguageTag,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Representation {
    Multivalued(FeatureVector),
    Binary(BinaryFeatureSet),
    Embedding(Embedding),
}

impl Representation {
    pub fn kind(&self) -> GraphKind {
        match self {
            Representation::Multivalued(_) => GraphKind::Multivalued,
            Representation::Binary(_) => GraphKind::Binary,
            Representation::Embedding(_) => GraphKind::Embedding,
        }
    }

    pub fn lang(&self) -> LanguageTag {
        match self {
            Representation::Multivalued(v) => v.lang,
            Representation::Binary(b) => b.lang,
            Representation::Embedding(e) => e.lang,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageGraph {
    name: String,
    kind: GraphKind,
    kernel: Kernel,
    entries: BTreeMap<LanguageTag, Representation>,
}

impl LanguageGraph {
    pub fn new(
        name: impl Into<String>,
        kind: GraphKind,
        kernel: Kernel,
        entries: impl IntoIterator<Item = Representation>,
    ) -> Result<Self, TypologyError> {
        if !kernel.applies_to(kind) {
            return Err(TypologyError::KernelMismatch { kernel, kind });
        }
        let mut map = BTreeMap::new();
        for rep in entries {
            if rep.kind() != kind {
                return Err(TypologyError::KindMismatch);
            }
            if let Representation::Embedding(e) = &rep {
                check_embedding(e, map.values().next())?;
            }
            map.insert(rep.lang(), rep);
        }
        Ok(Self {
            name: name.into(),
            kind,
            kernel,
            entries: map,
        })
    }

    pub fn with_kernel(mut self, kernel: Kernel) -> Result<Self, TypologyError> {
        if !kernel.applies_to(self.kind) {
            return Err(TypologyError::KernelMismatch {
                kernel,
                kind: self.kind,
            });
        }
        self.kernel = kernel;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn entries(&self) -> &BTreeMap<LanguageTag, Representation> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn languages(&self) -> impl Iterator<Item = &LanguageTag> {
        self.entries.keys()
    }

    /// Entry for `lang`, matching by code when either side has no script.
    pub fn get(&self, lang: &LanguageTag) -> Option<&Representation> {
        self.entries.get(lang).or_else(|| {
            self.entries
                .iter()
                .find(|(k, _)| same_language(k, lang))
                .map(|(_, v)| v)
        })
    }

    /// Kernel value between two representations of this graph, unclipped.
    pub fn similarity(&self, a: &Representation, b: &Representation) -> Result<f64, TypologyError> {
        match (self.kernel, a, b) {
            (Kernel::Jaccard, _, _) => jaccard_similarity(a, b),
            (Kernel::Cosine, Representation::Embedding(x), Representation::Embedding(y)) => {
                cosine_similarity(x, y)
            }
            (Kernel::AngularCosine, Representation::Embedding(x), Representation::Embedding(y)) => {
                angular_similarity(x, y)
            }
            _ => Err(TypologyError::KindMismatch),
        }
    }
}

fn check_embedding(e: &Embedding, first: Option<&Representation>) -> Result<(), TypologyError> {
    if let Some(Representation::Embedding(f)) = first {
        if f.vector.len() != e.vector.len() {
            return Err(TypologyError::DimensionMismatch {
                lang: e.lang,
                expected: f.vector.len(),
                found: e.vector.len(),
            });
        }
    }
    if e.vector.iter().any(|v| !v.is_finite()) {
        return Err(TypologyError::Model(
            crate::model::ModelError::InvalidField {
                field: "embedding",
                value: e.lang.to_string(),
            },
        ));
    }
    if e.vector.iter().all(|&v| v == 0.0) {
        return Err(TypologyError::ZeroVector(e.lang));
    }
    Ok(())
}
