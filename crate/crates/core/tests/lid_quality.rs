use std::collections::BTreeSet;

use langconf_core::lid::seed::bundled_corpora;
use langconf_core::lid::{classify_ngram, train_profile, ClassifyOptions, NgramClassifier};
use langconf_core::model::codes::default_script;
use langconf_core::LanguageTag;

#[test]
fn held_out_sentence_accuracy() {
    let corpora = bundled_corpora();
    let mut profiles = Vec::new();
    let mut held = Vec::new();
    for c in &corpora {
        let (train, test) = c.split_holdout();
        profiles.push(train_profile(&train, c.lang).unwrap());
        held.extend(test.into_iter().map(|s| (c.lang, s.to_string())));
    }
    let classifier = NgramClassifier::new(&profiles, ClassifyOptions::default()).unwrap();
    let mut correct = 0;
    for (lang, s) in &held {
        let got = classifier.classify(s, None).lang;
        if got == Some(*lang) {
            correct += 1;
        } else {
            eprintln!("{lang}: {s:?} -> {got:?}");
        }
    }
    let acc = correct as f64 / held.len() as f64;
    eprintln!("accuracy {acc:.4} over {}", held.len());
    assert!(acc >= 0.95, "held-out accuracy {acc}");

    let scripts: BTreeSet<_> = corpora
        .iter()
        .filter_map(|c| default_script(c.lang.iso639_3()))
        .collect();
    assert!(corpora.len() >= 10);
    assert!(scripts.len() >= 5, "{scripts:?}");
}

#[test]
fn french_greeting() {
    let profiles: Vec<_> = bundled_corpora()
        .into_iter()
        .filter(|c| ["fra", "deu", "eng"].contains(&c.lang.iso639_3()))
        .map(|c| train_profile(&c.text, c.lang).unwrap())
        .collect();
    let r = classify_ngram("Bonjour le monde", &profiles).unwrap();
    assert_eq!(r.lang, Some(LanguageTag::code("fra")));
}

// Counted independently over the bundled German corpus: lowercased letter
// runs padded with one space on each side, trigram "sch" occurs 95 times
// and ranks 8th.
#[test]
fn german_profile_has_sch() {
    let deu = bundled_corpora()
        .into_iter()
        .find(|c| c.lang.iso639_3() == "deu")
        .unwrap();
    let p = train_profile(&deu.text, deu.lang).unwrap();
    assert_eq!(p.count("sch"), 95);
    let top: Vec<&str> = p.top_ngrams(3, 50).into_iter().map(|(g, _)| g).collect();
    assert!(top.contains(&"sch"), "{top:?}");
}
