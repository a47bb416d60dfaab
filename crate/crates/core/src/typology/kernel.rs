use super::{Embedding, Representation, TypologyError};

/// Jaccard index.
///
/// Multivalued vectors compare `(feature, value)` pairs over the features
/// both languages attest: agreements divided by shared features. Binary sets
/// use `|A & B| / |A | B|`. Either is 0 when there is nothing to compare.
pub fn jaccard_similarity(a: &Representation, b: &Representation) -> Result<f64, TypologyError> {
    match (a, b) {
        (Representation::Multivalued(x), Representation::Multivalued(y)) => {
            let (small, large) = if x.features.len() <= y.features.len() {
                (&x.features, &y.features)
            } else {
                (&y.features, &x.features)
            };
            let mut shared = 0usize;
            let mut agree = 0usize;
            for (f, v) in small {
                if let Some(w) = large.get(f) {
                    shared += 1;
                    agree += usize::from(v == w);
                }
            }
            Ok(ratio(agree, shared))
        }
        (Representation::Binary(x), Representation::Binary(y)) => {
            let inter = x.present.intersection(&y.present).count();
            let union = x.present.len() + y.present.len() - inter;
            Ok(ratio(inter, union))
        }
        _ => Err(TypologyError::KindMismatch),
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn cosine_similarity(a: &Embedding, b: &Embedding) -> Result<f64, TypologyError> {
    if a.vector.len() != b.vector.len() {
        return Err(TypologyError::DimensionMismatch {
            lang: b.lang,
            expected: a.vector.len(),
            found: b.vector.len(),
        });
    }
    let dot = dot(&a.vector, &b.vector);
    let aa = dot_self(a)?;
    let bb = dot_self(b)?;
    // sqrt(aa * bb) rather than sqrt(aa) * sqrt(bb): exact for a == b.
    Ok((dot / (aa * bb).sqrt()).clamp(-1.0, 1.0))
}

/// `1 - arccos(cos) / pi`.
pub fn angular_similarity(a: &Embedding, b: &Embedding) -> Result<f64, TypologyError> {
    Ok(1.0 - cosine_similarity(a, b)?.acos() / std::f64::consts::PI)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot_self(e: &Embedding) -> Result<f64, TypologyError> {
    let n = dot(&e.vector, &e.vector);
    if n == 0.0 {
        return Err(TypologyError::ZeroVector(e.lang));
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeMap, BTreeSet};

    use super::*;
    use crate::model::LanguageTag;
    use crate::typology::{BinaryFeatureSet, FeatureVector};
    use proptest::prelude::*;

    fn mv(lang: &str, pairs: &[(&str, &str)]) -> Representation {
        Representation::Multivalued(FeatureVector {
            lang: LanguageTag::code(lang),
            features: pairs
                .iter()
                .map(|(f, v)| (f.to_string(), v.to_string()))
                .collect(),
        })
    }

    fn bin(lang: &str, set: &[&str]) -> Representation {
        Representation::Binary(BinaryFeatureSet {
            lang: LanguageTag::code(lang),
            present: set.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn emb(v: &[f64]) -> Embedding {
        Embedding {
            lang: LanguageTag::code("xxx"),
            vector: v.to_vec(),
        }
    }

    #[test]
    fn jaccard_identical_and_disjoint() {
        assert_eq!(
            jaccard_similarity(&bin("aaa", &["x", "y"]), &bin("bbb", &["x", "y"])).unwrap(),
            1.0
        );
        assert_eq!(
            jaccard_similarity(&bin("aaa", &["x"]), &bin("bbb", &["y"])).unwrap(),
            0.0
        );
        assert_eq!(
            jaccard_similarity(&bin("aaa", &[]), &bin("bbb", &[])).unwrap(),
            0.0
        );
        assert_eq!(
            jaccard_similarity(&bin("aaa", &["x", "y", "z"]), &bin("bbb", &["y", "z", "w"]))
                .unwrap(),
            0.5
        );
    }

    #[test]
    fn multivalued_uses_shared_features_only() {
        let a = mv(
            "deu",
            &[
                ("F1", "1"),
                ("F2", "1"),
                ("F3", "2"),
                ("F4", "0"),
                ("F5", "3"),
            ],
        );
        let b = mv(
            "fra",
            &[
                ("F1", "1"),
                ("F2", "2"),
                ("F3", "1"),
                ("F4", "1"),
                ("F6", "3"),
            ],
        );
        assert_eq!(jaccard_similarity(&a, &b).unwrap(), 0.25);
    }

    #[test]
    fn mixed_kinds_rejected() {
        assert_eq!(
            jaccard_similarity(&bin("aaa", &["x"]), &mv("bbb", &[])),
            Err(TypologyError::KindMismatch)
        );
    }

    #[test]
    fn cosine_cases() {
        assert_eq!(
            cosine_similarity(&emb(&[0.3, -1.7, 2.9]), &emb(&[0.3, -1.7, 2.9])).unwrap(),
            1.0
        );
        assert_eq!(
            cosine_similarity(&emb(&[1.0, 0.0]), &emb(&[0.0, 1.0])).unwrap(),
            0.0
        );
        assert!(
            (cosine_similarity(&emb(&[1.0, 1.0, 0.0]), &emb(&[1.0, 0.0, 1.0])).unwrap() - 0.5)
                .abs()
                < 1e-15
        );
        assert!(matches!(
            cosine_similarity(&emb(&[1.0]), &emb(&[1.0, 2.0])),
            Err(TypologyError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            cosine_similarity(&emb(&[0.0]), &emb(&[1.0])),
            Err(TypologyError::ZeroVector(_))
        ));
    }

    #[test]
    fn angular_transform() {
        assert_eq!(
            angular_similarity(&emb(&[1.0, 0.0]), &emb(&[0.0, 1.0])).unwrap(),
            0.5
        );
        assert_eq!(
            angular_similarity(&emb(&[1.0, 0.0]), &emb(&[-1.0, 0.0])).unwrap(),
            0.0
        );
        assert_eq!(
            angular_similarity(&emb(&[2.0, 1.0]), &emb(&[2.0, 1.0])).unwrap(),
            1.0
        );
    }

    fn arb_features() -> impl Strategy<Value = BTreeMap<String, String>> {
        proptest::collection::btree_map("[A-F]", "[0-2]", 0..6)
    }

    proptest! {
        #[test]
        fn jaccard_symmetric(a in arb_features(), b in arb_features()) {
            let (x, y) = (
                Representation::Multivalued(FeatureVector { lang: LanguageTag::code("aaa"), features: a.clone() }),
                Representation::Multivalued(FeatureVector { lang: LanguageTag::code("bbb"), features: b.clone() }),
            );
            prop_assert_eq!(jaccard_similarity(&x, &y).unwrap(), jaccard_similarity(&y, &x).unwrap());
            let sa: BTreeSet<String> = a.keys().cloned().collect();
            let sb: BTreeSet<String> = b.keys().cloned().collect();
            let (p, q) = (
                Representation::Binary(BinaryFeatureSet { lang: LanguageTag::code("aaa"), present: sa }),
                Representation::Binary(BinaryFeatureSet { lang: LanguageTag::code("bbb"), present: sb }),
            );
            prop_assert_eq!(jaccard_similarity(&p, &q).unwrap(), jaccard_similarity(&q, &p).unwrap());
        }

        #[test]
        fn jaccard_scale_free(a in arb_features(), b in arb_features()) {
            let dup = |m: &BTreeMap<String, String>| -> BTreeMap<String, String> {
                m.iter().flat_map(|(f, v)| [(f.clone(), v.clone()), (format!("{f}'"), v.clone())]).collect()
            };
            let rep = |m: BTreeMap<String, String>| Representation::Multivalued(FeatureVector { lang: LanguageTag::code("aaa"), features: m });
            let before = jaccard_similarity(&rep(a.clone()), &rep(b.clone())).unwrap();
            let after = jaccard_similarity(&rep(dup(&a)), &rep(dup(&b))).unwrap();
            prop_assert!((before - after).abs() < 1e-15);
        }

        #[test]
        fn cosine_symmetric_and_self_one(
            a in proptest::collection::vec(-10.0f64..10.0, 4),
            b in proptest::collection::vec(-10.0f64..10.0, 4),
        ) {
            prop_assume!(a.iter().any(|&v| v != 0.0) && b.iter().any(|&v| v != 0.0));
            let (x, y) = (emb(&a), emb(&b));
            prop_assert_eq!(cosine_similarity(&x, &y).unwrap(), cosine_similarity(&y, &x).unwrap());
            prop_assert_eq!(cosine_similarity(&x, &x).unwrap(), 1.0);
        }
    }
}
