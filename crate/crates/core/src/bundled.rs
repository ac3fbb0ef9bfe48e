//! Grammars and the regression corpus shipped with the library.

use crate::driver::{load_corpus, CorpusError, CorpusRow};
use crate::lexicon::{Language, Lexicon, LexiconError};
use std::collections::BTreeMap;

pub const ENGLISH_LEX: &str = include_str!("../data/english.lex");
pub const JAPANESE_LEX: &str = include_str!("../data/japanese.lex");
pub const CORPUS_TSV: &str = include_str!("../data/corpus.tsv");

/// The bundled lexicon for `language`. The data files are compiled in and
/// known-good, so failures are bugs.
pub fn lexicon(language: Language) -> Lexicon {
    let text = match language {
        Language::English => ENGLISH_LEX,
        Language::Japanese => JAPANESE_LEX,
    };
    Lexicon::load(text).expect("bundled lexicon parses")
}

pub fn lexicons() -> BTreeMap<Language, Lexicon> {
    [Language::English, Language::Japanese]
        .into_iter()
        .map(|l| (l, lexicon(l)))
        .collect()
}

pub fn try_lexicon(language: Language) -> Result<Lexicon, LexiconError> {
    let text = match language {
        Language::English => ENGLISH_LEX,
        Language::Japanese => JAPANESE_LEX,
    };
    Lexicon::load(text)
}

pub fn corpus() -> Result<Vec<CorpusRow>, CorpusError> {
    load_corpus(CORPUS_TSV)
}
