//! Static code tables: ISO 639-1 and ISO 639-2/B to ISO 639-3, and the
//! usual ISO 15924 script of common languages.
//!
//! Two-letter macrolanguage codes map to the individual language that
//! language identifiers actually report (`zh` is `cmn`, `ar` is `arb`).

use super::LanguageTag;

const ISO639_1: &[(&str, &str)] = &[
    ("aa", "aar"),
    ("ab", "abk"),
    ("ae", "ave"),
    ("af", "afr"),
    ("ak", "aka"),
    ("am", "amh"),
    ("an", "arg"),
    ("ar", "arb"),
    ("as", "asm"),
    ("av", "ava"),
    ("ay", "aym"),
    ("az", "azj"),
    ("ba", "bak"),
    ("be", "bel"),
    ("bg", "bul"),
    ("bi", "bis"),
    ("bm", "bam"),
    ("bn", "ben"),
    ("bo", "bod"),
    ("br", "bre"),
    ("bs", "bos"),
    ("ca", "cat"),
    ("ce", "che"),
    ("ch", "cha"),
    ("co", "cos"),
    ("cr", "cre"),
    ("cs", "ces"),
    ("cu", "chu"),
    ("cv", "chv"),
    ("cy", "cym"),
    ("da", "dan"),
    ("de", "deu"),
    ("dv", "div"),
    ("dz", "dzo"),
    ("ee", "ewe"),
    ("el", "ell"),
    ("en", "eng"),
    ("eo", "epo"),
    ("es", "spa"),
    ("et", "ekk"),
    ("eu", "eus"),
    ("fa", "pes"),
    ("ff", "ful"),
    ("fi", "fin"),
    ("fj", "fij"),
    ("fo", "fao"),
    ("fr", "fra"),
    ("fy", "fry"),
    ("ga", "gle"),
    ("gd", "gla"),
    ("gl", "glg"),
    ("gn", "grn"),
    ("gu", "guj"),
    ("gv", "glv"),
    ("ha", "hau"),
    ("he", "heb"),
    ("hi", "hin"),
    ("ho", "hmo"),
    ("hr", "hrv"),
    ("ht", "hat"),
    ("hu", "hun"),
    ("hy", "hye"),
    ("hz", "her"),
    ("ia", "ina"),
    ("id", "ind"),
    ("ie", "ile"),
    ("ig", "ibo"),
    ("ii", "iii"),
    ("ik", "ipk"),
    ("io", "ido"),
    ("is", "isl"),
    ("it", "ita"),
    ("iu", "iku"),
    ("ja", "jpn"),
    ("jv", "jav"),
    ("ka", "kat"),
    ("kg", "kon"),
    ("ki", "kik"),
    ("kj", "kua"),
    ("kk", "kaz"),
    ("kl", "kal"),
    ("km", "khm"),
    ("kn", "kan"),
    ("ko", "kor"),
    ("kr", "kau"),
    ("ks", "kas"),
    ("ku", "kmr"),
    ("kv", "kom"),
    ("kw", "cor"),
    ("ky", "kir"),
    ("la", "lat"),
    ("lb", "ltz"),
    ("lg", "lug"),
    ("li", "lim"),
    ("ln", "lin"),
    ("lo", "lao"),
    ("lt", "lit"),
    ("lu", "lub"),
    ("lv", "lvs"),
    ("mg", "plt"),
    ("mh", "mah"),
    ("mi", "mri"),
    ("mk", "mkd"),
    ("ml", "mal"),
    ("mn", "khk"),
    ("mr", "mar"),
    ("ms", "zsm"),
    ("mt", "mlt"),
    ("my", "mya"),
    ("na", "nau"),
    ("nb", "nob"),
    ("nd", "nde"),
    ("ne", "npi"),
    ("ng", "ndo"),
    ("nl", "nld"),
    ("nn", "nno"),
    ("no", "nob"),
    ("nr", "nbl"),
    ("nv", "nav"),
    ("ny", "nya"),
    ("oc", "oci"),
    ("oj", "oji"),
    ("om", "gaz"),
    ("or", "ory"),
    ("os", "oss"),
    ("pa", "pan"),
    ("pi", "pli"),
    ("pl", "pol"),
    ("ps", "pbt"),
    ("pt", "por"),
    ("qu", "que"),
    ("rm", "roh"),
    ("rn", "run"),
    ("ro", "ron"),
    ("ru", "rus"),
    ("rw", "kin"),
    ("sa", "san"),
    ("sc", "srd"),
    ("sd", "snd"),
    ("se", "sme"),
    ("sg", "sag"),
    ("si", "sin"),
    ("sk", "slk"),
    ("sl", "slv"),
    ("sm", "smo"),
    ("sn", "sna"),
    ("so", "som"),
    ("sq", "als"),
    ("sr", "srp"),
    ("ss", "ssw"),
    ("st", "sot"),
    ("su", "sun"),
    ("sv", "swe"),
    ("sw", "swh"),
    ("ta", "tam"),
    ("te", "tel"),
    ("tg", "tgk"),
    ("th", "tha"),
    ("ti", "tir"),
    ("tk", "tuk"),
    ("tl", "tgl"),
    ("tn", "tsn"),
    ("to", "ton"),
    ("tr", "tur"),
    ("ts", "tso"),
    ("tt", "tat"),
    ("tw", "twi"),
    ("ty", "tah"),
    ("ug", "uig"),
    ("uk", "ukr"),
    ("ur", "urd"),
    ("uz", "uzn"),
    ("ve", "ven"),
    ("vi", "vie"),
    ("vo", "vol"),
    ("wa", "wln"),
    ("wo", "wol"),
    ("xh", "xho"),
    ("yi", "ydd"),
    ("yo", "yor"),
    ("za", "zha"),
    ("zh", "cmn"),
    ("zu", "zul"),
];

/// ISO 639-2/B bibliographic codes and macrolanguage codes that differ from
/// the individual ISO 639-3 code used here.
const ALIASES: &[(&str, &str)] = &[
    ("alb", "als"),
    ("ara", "arb"),
    ("arm", "hye"),
    ("baq", "eus"),
    ("bur", "mya"),
    ("chi", "cmn"),
    ("cze", "ces"),
    ("dut", "nld"),
    ("est", "ekk"),
    ("fas", "pes"),
    ("fre", "fra"),
    ("geo", "kat"),
    ("ger", "deu"),
    ("gre", "ell"),
    ("ice", "isl"),
    ("lav", "lvs"),
    ("mac", "mkd"),
    ("mao", "mri"),
    ("may", "zsm"),
    ("mlg", "plt"),
    ("mon", "khk"),
    ("msa", "zsm"),
    ("nep", "npi"),
    ("nor", "nob"),
    ("ori", "ory"),
    ("per", "pes"),
    ("pus", "pbt"),
    ("rum", "ron"),
    ("slo", "slk"),
    ("sqi", "als"),
    ("swa", "swh"),
    ("tib", "bod"),
    ("uzb", "uzn"),
    ("wel", "cym"),
    ("yid", "ydd"),
    ("zho", "cmn"),
    ("aze", "azj"),
    ("kur", "kmr"),
    ("orm", "gaz"),
];

const DEFAULT_SCRIPTS: &[(&str, &str)] = &[
    ("amh", "Ethi"),
    ("arb", "Arab"),
    ("ary", "Arab"),
    ("arz", "Arab"),
    ("asm", "Beng"),
    ("bak", "Cyrl"),
    ("bel", "Cyrl"),
    ("ben", "Beng"),
    ("bod", "Tibt"),
    ("bul", "Cyrl"),
    ("che", "Cyrl"),
    ("chv", "Cyrl"),
    ("ckb", "Arab"),
    ("cmn", "Hani"),
    ("div", "Thaa"),
    ("dzo", "Tibt"),
    ("ell", "Grek"),
    ("guj", "Gujr"),
    ("heb", "Hebr"),
    ("hin", "Deva"),
    ("hye", "Armn"),
    ("iii", "Yiii"),
    ("jpn", "Jpan"),
    ("kan", "Knda"),
    ("kas", "Arab"),
    ("kat", "Geor"),
    ("kaz", "Cyrl"),
    ("khk", "Cyrl"),
    ("khm", "Khmr"),
    ("kir", "Cyrl"),
    ("kor", "Kore"),
    ("lao", "Laoo"),
    ("mal", "Mlym"),
    ("mar", "Deva"),
    ("mhr", "Cyrl"),
    ("mkd", "Cyrl"),
    ("mya", "Mymr"),
    ("npi", "Deva"),
    ("ory", "Orya"),
    ("oss", "Cyrl"),
    ("pan", "Guru"),
    ("pbt", "Arab"),
    ("pes", "Arab"),
    ("rus", "Cyrl"),
    ("san", "Deva"),
    ("sin", "Sinh"),
    ("snd", "Arab"),
    ("srp", "Cyrl"),
    ("tam", "Taml"),
    ("tat", "Cyrl"),
    ("tel", "Telu"),
    ("tgk", "Cyrl"),
    ("tha", "Thai"),
    ("tir", "Ethi"),
    ("uig", "Arab"),
    ("ukr", "Cyrl"),
    ("urd", "Arab"),
    ("ydd", "Hebr"),
    ("yue", "Hani"),
    ("wuu", "Hani"),
];

/// Scripts written without spaces between words.
const UNSPACED_SCRIPTS: &[&str] = &[
    "Hani", "Hans", "Hant", "Jpan", "Hira", "Kana", "Thai", "Laoo", "Khmr", "Mymr", "Tibt",
];

/// Maps a detector-reported code onto an ISO 639-3 tag.
///
/// Understands ISO 639-1 (`de`), ISO 639-3 (`deu`), ISO 639-2/B (`ger`),
/// fastText labels (`__label__de`), BCP-47-ish region/script suffixes
/// (`zh-Hant`, `pt-BR`, `deu_Latn`). Returns `None` for anything else; callers
/// treat that as unidentified.
pub fn normalize_code(raw: &str) -> Option<LanguageTag> {
    let raw = raw.trim();
    let raw = raw.strip_prefix("__label__").unwrap_or(raw);
    let mut parts = raw.split(['-', '_']);
    let base = parts.next()?.to_ascii_lowercase();
    let script = parts.find(|p| p.len() == 4 && p.chars().all(|c| c.is_ascii_alphabetic()));
    let code = match base.len() {
        2 => ISO639_1
            .iter()
            .find(|(two, _)| *two == base)
            .map(|(_, three)| *three)?,
        3 => ALIASES
            .iter()
            .find(|(alias, _)| *alias == base)
            .map(|(_, three)| *three)
            .unwrap_or(base.as_str()),
        _ => return None,
    };
    LanguageTag::new(code, script).ok()
}

/// Usual ISO 15924 script of a language. Codes from the ISO 639-1 table
/// without a listed script are Latin; anything else is `None`.
pub fn default_script(iso639_3: &str) -> Option<&'static str> {
    if let Some((_, script)) = DEFAULT_SCRIPTS.iter().find(|(c, _)| *c == iso639_3) {
        return Some(script);
    }
    if ISO639_1.iter().any(|(_, c)| *c == iso639_3) {
        return Some("Latn");
    }
    None
}

/// True when the language is normally written in a non-Latin script.
/// Unknown languages are assumed Latin.
pub fn uses_non_latin_script(tag: &LanguageTag) -> bool {
    tag.effective_script().is_some_and(|s| s != "Latn")
}

/// True when the language's writing does not separate words with spaces
/// (Chinese, Japanese, Thai, ...).
pub fn is_unspaced_language(tag: &LanguageTag) -> bool {
    tag.effective_script()
        .is_some_and(|s| UNSPACED_SCRIPTS.contains(&s))
}

/// True for Chinese, Japanese and Korean.
pub fn is_cjk_language(tag: &LanguageTag) -> bool {
    matches!(
        tag.effective_script(),
        Some("Hani" | "Hans" | "Hant" | "Jpan" | "Hira" | "Kana" | "Kore" | "Hang")
    )
}
