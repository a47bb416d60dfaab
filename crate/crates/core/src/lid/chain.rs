use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::LidError;
use crate::model::{same_language, LanguageTag};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    /// `None` means unidentified.
    pub lang: Option<LanguageTag>,
    /// Detector-relative; only comparable within one detector.
    pub confidence: f64,
}

impl DetectionResult {
    pub fn identified(lang: LanguageTag, confidence: f64) -> Self {
        Self {
            lang: Some(lang),
            confidence,
        }
    }

    pub fn unidentified() -> Self {
        Self {
            lang: None,
            confidence: 0.0,
        }
    }
}

/// A language identifier that can take part in a [`DetectorChain`].
///
/// Implementations restrict their answer to `candidates` when given and may
/// abstain by returning an unidentified result.
pub trait Detector: Send + Sync {
    fn name(&self) -> &str;

    fn supported(&self) -> &BTreeSet<LanguageTag>;

    fn classify(&self, unit: &str, candidates: Option<&BTreeSet<LanguageTag>>) -> DetectionResult;
}

/// Ordered detectors; later ones are consulted only when earlier ones
/// abstain or answer outside their own supported set.
#[derive(Clone)]
pub struct DetectorChain {
    detectors: Vec<Arc<dyn Detector>>,
}

impl std::fmt::Debug for DetectorChain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list()
            .entries(self.detectors.iter().map(|d| d.name()))
            .finish()
    }
}

impl DetectorChain {
    pub fn new(detectors: Vec<Arc<dyn Detector>>) -> Result<Self, LidError> {
        if detectors.is_empty() {
            return Err(LidError::EmptyChain);
        }
        Ok(Self { detectors })
    }

    pub fn single(detector: impl Detector + 'static) -> Self {
        Self {
            detectors: vec![Arc::new(detector)],
        }
    }

    pub fn detectors(&self) -> &[Arc<dyn Detector>] {
        &self.detectors
    }

    /// Union of every detector's supported languages.
    pub fn supported(&self) -> BTreeSet<LanguageTag> {
        self.detectors
            .iter()
            .flat_map(|d| d.supported().iter().copied())
            .collect()
    }
}

/// Runs `unit` through the chain; the first identified answer inside the
/// answering detector's supported set wins.
///
/// With `candidates`, each detector only sees the candidates it supports
/// and is skipped when there are none.
pub fn detect_unit(
    unit: &str,
    chain: &DetectorChain,
    candidates: Option<&BTreeSet<LanguageTag>>,
) -> DetectionResult {
    for detector in chain.detectors() {
        let supported = detector.supported();
        let restricted: Option<BTreeSet<LanguageTag>> = candidates.map(|c| {
            supported
                .iter()
                .filter(|s| c.iter().any(|t| same_language(t, s)))
                .copied()
                .collect()
        });
        if restricted.as_ref().is_some_and(BTreeSet::is_empty) {
            continue;
        }
        let result = detector.classify(unit, restricted.as_ref());
        if let Some(lang) = result.lang {
            if supported.contains(&lang) {
                return result;
            }
        }
    }
    DetectionResult::unidentified()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use std::collections::HashMap;
    use std::sync::atomic::{AtomicUsize, Ordering};

    /// Answers from a fixed unit → language table and counts its calls.
    pub(crate) struct TableDetector {
        pub name: String,
        pub supported: BTreeSet<LanguageTag>,
        pub table: HashMap<String, LanguageTag>,
        pub calls: AtomicUsize,
    }

    impl TableDetector {
        pub fn new(name: &str, entries: &[(&str, &str)]) -> Self {
            let table: HashMap<String, LanguageTag> = entries
                .iter()
                .map(|(u, l)| (u.to_string(), LanguageTag::code(l)))
                .collect();
            Self {
                name: name.into(),
                supported: table.values().copied().collect(),
                table,
                calls: AtomicUsize::new(0),
            }
        }
    }

    impl Detector for TableDetector {
        fn name(&self) -> &str {
            &self.name
        }

        fn supported(&self) -> &BTreeSet<LanguageTag> {
            &self.supported
        }

        fn classify(
            &self,
            unit: &str,
            candidates: Option<&BTreeSet<LanguageTag>>,
        ) -> DetectionResult {
            self.calls.fetch_add(1, Ordering::SeqCst);
            match self.table.get(unit) {
                Some(l) if candidates.is_none_or(|c| c.contains(l)) => {
                    DetectionResult::identified(*l, 1.0)
                }
                _ => DetectionResult::unidentified(),
            }
        }
    }

    #[test]
    fn empty_chain_rejected() {
        assert_eq!(
            DetectorChain::new(vec![]).unwrap_err(),
            LidError::EmptyChain
        );
    }

    #[test]
    fn first_detector_short_circuits() {
        let first = Arc::new(TableDetector::new("a", &[("hallo", "deu")]));
        let second = Arc::new(TableDetector::new("b", &[("hallo", "nld")]));
        let chain = DetectorChain::new(vec![first.clone(), second.clone()]).unwrap();
        let r = detect_unit("hallo", &chain, None);
        assert_eq!(r.lang, Some(LanguageTag::code("deu")));
        assert_eq!(second.calls.load(Ordering::SeqCst), 0);
    }

    #[test]
    fn falls_back_for_unsupported_language() {
        let first = Arc::new(TableDetector::new("a", &[("hallo", "deu")]));
        let second = Arc::new(TableDetector::new("b", &[("привет", "rus")]));
        let chain = DetectorChain::new(vec![first.clone(), second.clone()]).unwrap();
        let r = detect_unit("привет", &chain, None);
        assert_eq!(r.lang, Some(LanguageTag::code("rus")));
        assert_eq!(first.calls.load(Ordering::SeqCst), 1);
        assert_eq!(second.calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn all_abstain_is_unidentified() {
        let chain = DetectorChain::new(vec![
            Arc::new(TableDetector::new("a", &[("hallo", "deu")])),
            Arc::new(TableDetector::new("b", &[("привет", "rus")])),
        ])
        .unwrap();
        assert_eq!(
            detect_unit("ciao", &chain, None),
            DetectionResult::unidentified()
        );
    }

    #[test]
    fn candidates_skip_detectors_without_overlap() {
        let first = Arc::new(TableDetector::new("a", &[("hallo", "deu")]));
        let second = Arc::new(TableDetector::new("b", &[("hallo", "nld")]));
        let chain = DetectorChain::new(vec![first.clone(), second.clone()]).unwrap();
        let only_nld: BTreeSet<_> = [LanguageTag::code("nld")].into_iter().collect();
        let r = detect_unit("hallo", &chain, Some(&only_nld));
        assert_eq!(r.lang, Some(LanguageTag::code("nld")));
        assert_eq!(first.calls.load(Ordering::SeqCst), 0);
    }

    /// Claims a language outside its supported set; the chain must ignore it.
    struct Overreaching(BTreeSet<LanguageTag>);

    impl Detector for Overreaching {
        fn name(&self) -> &str {
            "overreaching"
        }
        fn supported(&self) -> &BTreeSet<LanguageTag> {
            &self.0
        }
        fn classify(&self, _: &str, _: Option<&BTreeSet<LanguageTag>>) -> DetectionResult {
            DetectionResult::identified(LanguageTag::code("xxx"), 1.0)
        }
    }

    #[test]
    fn answers_outside_supported_set_are_ignored() {
        let chain = DetectorChain::new(vec![
            Arc::new(Overreaching(
                [LanguageTag::code("deu")].into_iter().collect(),
            )),
            Arc::new(TableDetector::new("b", &[("hallo", "deu")])),
        ])
        .unwrap();
        assert_eq!(
            detect_unit("hallo", &chain, None).lang,
            Some(LanguageTag::code("deu"))
        );
    }
}
