use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::{
    BinaryFeatureSet, Embedding, FeatureVector, GraphKind, LanguageGraph, Representation,
    TypologyError,
};
use crate::model::codes::normalize_code;
use crate::model::LanguageTag;

/// Source-database language ids (Glottocodes, WALS codes) to ISO 639-3.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CodeMapping(BTreeMap<String, LanguageTag>);

impl CodeMapping {
    pub fn new(map: BTreeMap<String, LanguageTag>) -> Self {
        Self(map)
    }

    pub fn get(&self, id: &str) -> Option<LanguageTag> {
        self.0.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

const HEADER_NAMES: &[&str] = &[
    "lang",
    "lang_id",
    "language",
    "language_id",
    "iso",
    "iso639_3",
    "iso639-3",
    "glottocode",
    "code",
    "id",
];

const MISSING: &[&str] = &["", "?", "NA"];

fn read(path: &Path) -> Result<String, TypologyError> {
    std::fs::read_to_string(path).map_err(|e| TypologyError::Io(format!("{}: {e}", path.display())))
}

fn graph_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Non-blank, non-comment lines with 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn is_header(first_field: &str) -> bool {
    HEADER_NAMES.contains(&first_field.trim().to_ascii_lowercase().as_str())
}

fn parse_error(line: usize, message: impl Into<String>) -> TypologyError {
    TypologyError::Parse {
        line,
        message: message.into(),
    }
}

/// `Ok(None)` means the id is unmapped and the row is dropped.
fn resolve(
    raw: &str,
    line: usize,
    mapping: Option<&CodeMapping>,
) -> Result<Option<LanguageTag>, TypologyError> {
    let raw = raw.trim();
    if let Some(tag) = mapping.and_then(|m| m.get(raw)) {
        return Ok(Some(tag));
    }
    match (normalize_code(raw), mapping) {
        (Some(tag), _) => Ok(Some(tag)),
        (None, Some(_)) => Ok(None),
        (None, None) => Err(parse_error(
            line,
            format!("unrecognised language id {raw:?}"),
        )),
    }
}

pub fn parse_code_mapping(text: &str) -> Result<CodeMapping, TypologyError> {
    let mut map = BTreeMap::new();
    for (n, line) in lines(text) {
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(parse_error(
                n,
                format!("expected 2 fields, found {}", fields.len()),
            ));
        }
        let Some(tag) = normalize_code(fields[1]) else {
            if n == 1 {
                continue;
            }
            return Err(parse_error(
                n,
                format!("unrecognised ISO 639-3 code {:?}", fields[1]),
            ));
        };
        map.insert(fields[0].to_string(), tag);
    }
    Ok(CodeMapping(map))
}

pub fn load_code_mapping(path: &Path) -> Result<CodeMapping, TypologyError> {
    parse_code_mapping(&read(path)?)
}

/// Long-format `lang_id \t feature_id \t value` table.
///
/// Empty, `?` and `NA` values are missing. Binary tables take 0/1 values and
/// keep the 1s; a language attested only with 0s gets an empty set.
pub fn parse_feature_table(
    name: &str,
    text: &str,
    kind: GraphKind,
    mapping: Option<&CodeMapping>,
) -> Result<LanguageGraph, TypologyError> {
    if kind == GraphKind::Embedding {
        return Err(TypologyError::KindMismatch);
    }
    let mut table: BTreeMap<LanguageTag, BTreeMap<String, String>> = BTreeMap::new();
    let mut unmapped = BTreeSet::new();
    for (i, (n, line)) in lines(text).enumerate() {
        let fields: Vec<&str> = line.split('\t').collect();
        if i == 0 && is_header(fields[0]) {
            continue;
        }
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_error(
                n,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let feature = fields[1].trim();
        if feature.is_empty() {
            return Err(parse_error(n, "empty feature id"));
        }
        let value = fields.get(2).map_or("", |v| v.trim());
        if MISSING.contains(&value) {
            continue;
        }
        if kind == GraphKind::Binary && value != "0" && value != "1" {
            return Err(parse_error(
                n,
                format!("binary value must be 0 or 1, found {value:?}"),
            ));
        }
        let Some(lang) = resolve(fields[0], n, mapping)? else {
            unmapped.insert(fields[0].trim().to_string());
            continue;
        };
        match table.entry(lang).or_default().entry(feature.to_string()) {
            Entry::Vacant(e) => {
                e.insert(value.to_string());
            }
            Entry::Occupied(e) if e.get() == value => {}
            Entry::Occupied(_) => {
                return Err(TypologyError::DuplicateFeature {
                    lang,
                    feature: feature.to_string(),
                })
            }
        }
    }
    if !unmapped.is_empty() {
        log::warn!(
            "{name}: dropped {} unmapped language ids: {:?}",
            unmapped.len(),
            unmapped
        );
    }
    let entries = table.into_iter().map(|(lang, features)| match kind {
        GraphKind::Binary => Representation::Binary(BinaryFeatureSet {
            lang,
            present: features
                .into_iter()
                .filter(|(_, v)| v == "1")
                .map(|(f, _)| f)
                .collect(),
        }),
        _ => Representation::Multivalued(FeatureVector { lang, features }),
    });
    LanguageGraph::new(name, kind, kind.default_kernel(), entries)
}

pub fn load_feature_table(
    path: &Path,
    kind: GraphKind,
    mapping: Option<&CodeMapping>,
) -> Result<LanguageGraph, TypologyError> {
    parse_feature_table(&graph_name(path), &read(path)?, kind, mapping)
}

/// Wide-format `lang_id \t v1 \t v2 ...` table.
pub fn parse_embedding_table(
    name: &str,
    text: &str,
    mapping: Option<&CodeMapping>,
) -> Result<LanguageGraph, TypologyError> {
    let mut entries: Vec<Representation> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut dim = None;
    let mut unmapped = BTreeSet::new();
    for (i, (n, line)) in lines(text).enumerate() {
        let fields: Vec<&str> = line.split('\t').collect();
        if i == 0 && is_header(fields[0]) {
            continue;
        }
        if fields.len() < 2 {
            return Err(parse_error(n, "row has no vector components"));
        }
        let vector = fields[1..]
            .iter()
            .map(|f| f.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| parse_error(n, "vector components must be finite numbers"))?;
        let Some(lang) = resolve(fields[0], n, mapping)? else {
            unmapped.insert(fields[0].trim().to_string());
            continue;
        };
        if !seen.insert(lang) {
            return Err(parse_error(n, format!("duplicate language {lang}")));
        }
        let expected = *dim.get_or_insert(vector.len());
        if vector.len() != expected {
            return Err(TypologyError::DimensionMismatch {
                lang,
                expected,
                found: vector.len(),
            });
        }
        entries.push(Representation::Embedding(Embedding { lang, vector }));
    }
    if !unmapped.is_empty() {
        log::warn!(
            "{name}: dropped {} unmapped language ids: {:?}",
            unmapped.len(),
            unmapped
        );
    }
    LanguageGraph::new(
        name,
        GraphKind::Embedding,
        GraphKind::Embedding.default_kernel(),
        entries,
    )
}

pub fn load_embedding_table(
    path: &Path,
    mapping: Option<&CodeMapping>,
) -> Result<LanguageGraph, TypologyError> {
    parse_embedding_table(&graph_name(path), &read(path)?, mapping)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tag(s: &str) -> LanguageTag {
        LanguageTag::code(s)
    }

    fn features<'a>(g: &'a LanguageGraph, lang: &str) -> &'a BTreeMap<String, String> {
        match g.get(&tag(lang)) {
            Some(Representation::Multivalued(v)) => &v.features,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn two_by_three_table() {
        let text = "lang_id\tfeature_id\tvalue\n\
                    deu\tF1\t1\ndeu\tF2\t2\ndeu\tF3\t1\n\
                    fra\tF1\t1\nfra\tF2\t1\nfra\tF3\t3\n";
        let g = parse_feature_table("wals", text, GraphKind::Multivalued, None).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.name(), "wals");
        assert_eq!(features(&g, "fra")["F3"], "3");
    }

    #[test]
    fn missing_values_skipped() {
        let text = "deu\tGB020\t?\ndeu\tGB021\tNA\ndeu\tGB022\t\ndeu\tGB023\t1\n";
        let g = parse_feature_table("gb", text, GraphKind::Multivalued, None).unwrap();
        assert_eq!(features(&g, "deu").keys().collect::<Vec<_>>(), ["GB023"]);
    }

    #[test]
    fn conflicting_duplicate() {
        let text = "deu\tF1\t1\ndeu\tF1\t1\n";
        assert!(parse_feature_table("g", text, GraphKind::Multivalued, None).is_ok());
        let text = "deu\tF1\t1\ndeu\tF1\t2\n";
        assert_eq!(
            parse_feature_table("g", text, GraphKind::Multivalued, None),
            Err(TypologyError::DuplicateFeature {
                lang: tag("deu"),
                feature: "F1".into()
            })
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "deu\tF1\t1\n# note\nnot a row\n";
        assert!(matches!(
            parse_feature_table("g", text, GraphKind::Multivalued, None),
            Err(TypologyError::Parse { line: 3, .. })
        ));
        let text = "deu\tF1\t1\nstan1295\tF1\t1\n";
        assert!(matches!(
            parse_feature_table("g", text, GraphKind::Multivalued, None),
            Err(TypologyError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn binary_keeps_ones() {
        let text = "deu\tHAND-ARM\t1\ndeu\tTREE-WOOD\t0\nfra\tTREE-WOOD\t0\n";
        let g = parse_feature_table("colex", text, GraphKind::Binary, None).unwrap();
        match g.get(&tag("deu")).unwrap() {
            Representation::Binary(b) => {
                assert_eq!(b.present.iter().collect::<Vec<_>>(), ["HAND-ARM"])
            }
            other => panic!("{other:?}"),
        }
        match g.get(&tag("fra")).unwrap() {
            Representation::Binary(b) => assert!(b.present.is_empty()),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_feature_table("colex", "deu\tX\t2\n", GraphKind::Binary, None),
            Err(TypologyError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn mapping_resolves_and_drops() {
        let mapping =
            parse_code_mapping("glottocode\tiso639_3\nstan1295\tdeu\nstan1290\tfra\n").unwrap();
        assert_eq!(mapping.len(), 2);
        let text = "stan1295\tF1\t1\nstan1290\tF1\t2\nnucl1301\tF1\t1\n";
        let g = parse_feature_table("gb", text, GraphKind::Multivalued, Some(&mapping)).unwrap();
        assert_eq!(
            g.languages().copied().collect::<Vec<_>>(),
            [tag("deu"), tag("fra")]
        );
    }

    #[test]
    fn embeddings() {
        let text = "deu\t1\t0\t0\t1\nfra\t0.5\t0.5\t0\t0\nrus\t-1\t2\t3\t4\n";
        let g = parse_embedding_table("e", text, None).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.kind(), GraphKind::Embedding);
        let bad = "deu\t1\t0\t0\t1\nfra\t1\t2\t3\n";
        assert_eq!(
            parse_embedding_table("e", bad, None),
            Err(TypologyError::DimensionMismatch {
                lang: tag("fra"),
                expected: 4,
                found: 3
            })
        );
        let zero = "deu\t1\t0\nfra\t0\t0\n";
        assert_eq!(
            parse_embedding_table("e", zero, None),
            Err(TypologyError::ZeroVector(tag("fra")))
        );
        assert!(matches!(
            parse_embedding_table("e", "deu\t1\tx\n", None),
            Err(TypologyError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn load_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grambank.tsv");
        std::fs::write(&path, "deu\tF1\t1\n").unwrap();
        let g = load_feature_table(&path, GraphKind::Multivalued, None).unwrap();
        assert_eq!(g.name(), "grambank");
        assert!(matches!(
            load_feature_table(&dir.path().join("absent.tsv"), GraphKind::Multivalued, None),
            Err(TypologyError::Io(_))
        ));
    }
}
