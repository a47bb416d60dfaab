//! Line splitting, tokenization and the character classes they share with
//! the n-gram profiles.

use unicode_script::{Script, UnicodeScript};

use crate::model::codes;
use crate::model::LanguageTag;

/// Splits on LF, strips a trailing CR, drops blank lines.
pub fn split_lines(text: &str) -> Vec<&str> {
    text.split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .filter(|l| !l.trim().is_empty())
        .collect()
}

/// Characters that belong to words: letters, combining marks and anything
/// else carrying a real script (e.g. Devanagari vowel signs), but not digits.
pub(crate) fn is_word_char(c: char) -> bool {
    if c.is_alphabetic() {
        return true;
    }
    if c.is_whitespace() || c.is_numeric() {
        return false;
    }
    match c.script() {
        Script::Inherited => true,
        Script::Common | Script::Unknown => false,
        _ => !c.is_ascii(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RunClass {
    Han,
    Kana,
    Hangul,
    Other(Script),
}

fn run_class(c: char) -> Option<RunClass> {
    if !is_word_char(c) && c != '\u{30FC}' {
        return None;
    }
    Some(match c.script() {
        Script::Han => RunClass::Han,
        Script::Hiragana | Script::Katakana => RunClass::Kana,
        // prolonged sound mark is Common but only appears inside kana words
        Script::Common if c == '\u{30FC}' => RunClass::Kana,
        Script::Hangul => RunClass::Hangul,
        s => RunClass::Other(s),
    })
}

fn is_cjk_char(c: char) -> bool {
    matches!(
        c.script(),
        Script::Han | Script::Hiragana | Script::Katakana | Script::Hangul
    )
}

/// True when more than half of the letters are Han, kana or Hangul.
pub fn is_majority_cjk(line: &str) -> bool {
    let (mut cjk, mut letters) = (0usize, 0usize);
    for c in line.chars().filter(|c| c.is_alphabetic()) {
        letters += 1;
        if is_cjk_char(c) {
            cjk += 1;
        }
    }
    letters > 0 && cjk * 2 > letters
}

/// Splits a line into word tokens.
///
/// Space-delimited languages split on whitespace with punctuation trimmed
/// from both ends. CJK hints, or lines that are mostly CJK, are segmented
/// into maximal same-script runs (Han, kana, Hangul, Latin, ...), each run
/// one token. Tokens without a letter are dropped either way.
pub fn tokenize(line: &str, lang_hint: Option<&LanguageTag>) -> Vec<String> {
    let cjk = lang_hint.is_some_and(codes::is_cjk_language) || is_majority_cjk(line);
    if cjk {
        script_runs(line)
    } else {
        whitespace_tokens(line)
    }
}

fn whitespace_tokens(line: &str) -> Vec<String> {
    line.split_whitespace()
        .map(|t| t.trim_matches(|c: char| !(c.is_alphanumeric() || is_word_char(c))))
        .filter(|t| t.chars().any(char::is_alphabetic))
        .map(str::to_string)
        .collect()
}

fn script_runs(line: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut current_class: Option<RunClass> = None;
    let flush = |buf: &mut String, tokens: &mut Vec<String>| {
        if buf.chars().any(char::is_alphabetic) {
            tokens.push(std::mem::take(buf));
        } else {
            buf.clear();
        }
    };
    for c in line.chars() {
        match run_class(c) {
            None => {
                flush(&mut current, &mut tokens);
                current_class = None;
            }
            // combining marks stay with the preceding run
            Some(RunClass::Other(Script::Inherited)) if current_class.is_some() => current.push(c),
            Some(class) => {
                if current_class != Some(class) {
                    flush(&mut current, &mut tokens);
                    current_class = Some(class);
                }
                current.push(c);
            }
        }
    }
    flush(&mut current, &mut tokens);
    tokens
}

/// Lowercased words of `text` with punctuation and digits removed, the form
/// both profile training and classification operate on.
pub(crate) fn normalized_words(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !is_word_char(c))
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
}

/// Calls `f` with every 1..=4-gram of ` word ` (space padded). The lone
/// boundary space is not an n-gram.
pub(crate) fn for_each_ngram(word: &str, mut f: impl FnMut(usize, &str)) {
    let mut padded = String::with_capacity(word.len() + 2);
    padded.push(' ');
    padded.push_str(word);
    padded.push(' ');
    let bounds: Vec<usize> = padded
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(padded.len()))
        .collect();
    let nchars = bounds.len() - 1;
    for n in 1..=super::MAX_NGRAM {
        if n > nchars {
            break;
        }
        for start in 0..=nchars - n {
            let gram = &padded[bounds[start]..bounds[start + n]];
            if n == 1 && gram == " " {
                continue;
            }
            f(n, gram);
        }
    }
}
