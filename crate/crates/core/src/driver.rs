//! Word-by-word parse loop, garden-path classification, and corpus runs.
//!
//! Each word is integrated by the first operation that succeeds, trying the
//! word's lexical entries in order and, per entry: right attachment, left
//! attachment, lowering, relative-clause lowering. A word with no successful
//! integration ends the parse with a `Fail` event — the conscious garden
//! path. A parse that needed an argument-class lowering somewhere was a
//! garden path the parser silently repaired.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::attachment::{left_attach, right_attach, ParserState};
use crate::description::TreeDescription;
use crate::events::{AttemptFailure, LowerKind, ParseEvent};
use crate::lexicon::{Language, Lexicon, LexiconError};
use crate::lowering::{relative_clause_lower, select_and_lower, LowerFailure, SearchStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Classification {
    /// Parsed with no argument-class lowering.
    Fluent,
    /// Parsed, but only by lowering built structure into an argument
    /// position — the reanalysis readers do not notice.
    UnconsciousGardenPath,
    /// No monotone extension existed; a reader would consciously re-read.
    ConsciousGardenPath,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Fluent => "fluent",
            Classification::UnconsciousGardenPath => "unconscious_gp",
            Classification::ConsciousGardenPath => "conscious_gp",
        }
    }

    pub fn from_name(s: &str) -> Option<Classification> {
        match s {
            "fluent" => Some(Classification::Fluent),
            "unconscious_gp" => Some(Classification::UnconsciousGardenPath),
            "conscious_gp" => Some(Classification::ConsciousGardenPath),
            _ => None,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct ParseReport {
    pub sentence: String,
    pub tokens: Vec<String>,
    pub language: Language,
    pub strategy: SearchStrategy,
    pub classification: Classification,
    pub events: Vec<ParseEvent>,
    /// Final description: the completed parse, or the state at failure.
    pub description: TreeDescription,
    /// Word index and surface where the parse failed, if it did.
    pub failed_at: Option<(u32, String)>,
}

/// Lowercase the sentence and strip leading/trailing punctuation per token.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence
        .split_whitespace()
        .map(|t| t.trim_matches(|c: char| c.is_ascii_punctuation()).to_lowercase())
        .filter(|t| !t.is_empty())
        .collect()
}

/// Classification is read off the event log alone: a failure is conscious;
/// otherwise any argument-class (or relative-clause) lowering marks the
/// sentence as an unconsciously repaired garden path. Adjunct lowerings are
/// ordinary modifier attachment and do not count.
pub fn classify(events: &[ParseEvent]) -> Classification {
    if events.iter().any(|e| e.is_fail()) {
        return Classification::ConsciousGardenPath;
    }
    let repaired = events.iter().any(|e| {
        matches!(
            e,
            ParseEvent::Lower { kind: LowerKind::Argument | LowerKind::RelativeClause, .. }
        )
    });
    if repaired {
        Classification::UnconsciousGardenPath
    } else {
        Classification::Fluent
    }
}

/// Integrate one word, trying each lexical entry in order. Returns the new
/// state, or the failure detail of every attempt.
fn parse_word(
    state: &ParserState,
    lexicon: &Lexicon,
    surface: &str,
    peek: Option<&str>,
    strategy: SearchStrategy,
) -> Result<ParserState, Vec<AttemptFailure>> {
    let entries = match lexicon.lookup(surface) {
        Ok(e) => e,
        Err(_) => unreachable!("caller checks the lexicon first"),
    };
    // A reflexive one word ahead constrains who may become a clause subject
    // now; `None` if the next word is not a reflexive or carries no gender.
    let peek_gender = peek.and_then(|w| lexicon.reflexive_gender(w)).flatten();

    let mut attempts: Vec<AttemptFailure> = Vec::new();
    for (i, entry) in entries.iter().enumerate() {
        let template = entry.template.name.clone();
        let fail = |operation: &'static str,
                    attach: Option<crate::attachment::AttachFailure>,
                    rejects: Vec<(crate::description::NodeId, crate::events::RejectReason)>,
                    attempts: &mut Vec<AttemptFailure>| {
            attempts.push(AttemptFailure {
                entry_index: i,
                template: template.clone(),
                operation,
                attach,
                lower_rejects: rejects,
            });
        };

        let mut candidate = state.clone();
        let proj = entry.project(i, &mut candidate.next_id);
        match right_attach(candidate, proj) {
            Ok(next) => return Ok(next),
            Err(e) => fail("right-attach", Some(e), Vec::new(), &mut attempts),
        }

        let mut candidate = state.clone();
        let proj = entry.project(i, &mut candidate.next_id);
        match left_attach(candidate, proj) {
            Ok(next) => return Ok(next),
            Err(e) => fail("left-attach", Some(e), Vec::new(), &mut attempts),
        }

        let mut candidate = state.clone();
        let proj = entry.project(i, &mut candidate.next_id);
        match select_and_lower(candidate, proj, lexicon, strategy, peek_gender.as_deref()) {
            Ok(next) => return Ok(next),
            Err(LowerFailure::Exhausted { rejects }) => {
                fail("lower", None, rejects, &mut attempts)
            }
            Err(LowerFailure::NoLeftSite) => {}
            Err(LowerFailure::NotApplicable) => {}
        }

        let mut candidate = state.clone();
        let proj = entry.project(i, &mut candidate.next_id);
        match relative_clause_lower(candidate, proj, lexicon, strategy) {
            Ok(next) => return Ok(next),
            Err(LowerFailure::Exhausted { rejects }) => {
                fail("relative-clause-lower", None, rejects, &mut attempts)
            }
            Err(_) => {}
        }
    }
    Err(attempts)
}

/// Parse, returning the state after every word (index k = after word k+1)
/// alongside the report. States stop at the failing word when the parse
/// fails.
pub fn parse_states(
    lexicon: &Lexicon,
    sentence: &str,
    strategy: SearchStrategy,
) -> Result<(Vec<ParserState>, ParseReport), LexiconError> {
    let tokens = tokenize(sentence);
    for t in &tokens {
        lexicon.lookup(t)?;
    }

    let mut state = ParserState::new(lexicon.language);
    let mut snapshots: Vec<ParserState> = Vec::new();
    let mut failed_at = None;

    for (k, word) in tokens.iter().enumerate() {
        state.word_index = (k + 1) as u32;
        state
            .events
            .push(ParseEvent::Word { index: state.word_index, surface: word.clone() });
        let peek = tokens.get(k + 1).map(|s| s.as_str());
        match parse_word(&state, lexicon, word, peek, strategy) {
            Ok(next) => {
                state = next;
                snapshots.push(state.clone());
            }
            Err(attempts) => {
                state.events.push(ParseEvent::Fail {
                    index: state.word_index,
                    surface: word.clone(),
                    reason: "no operation can integrate the word".to_string(),
                    attempts,
                });
                failed_at = Some((state.word_index, word.clone()));
                snapshots.push(state.clone());
                break;
            }
        }
    }

    // Completion: every obligation must be met and the parse connected.
    if failed_at.is_none() && !tokens.is_empty() {
        let open = state.unsaturated_site_nodes();
        if !open.is_empty() {
            let detail = open
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(",");
            state.events.push(ParseEvent::Fail {
                index: state.word_index,
                surface: "<end>".to_string(),
                reason: format!("sentence ended with unfilled sites at nodes {detail}"),
                attempts: Vec::new(),
            });
            failed_at = Some((state.word_index, "<end>".to_string()));
        } else if state.description.roots().len() != 1 {
            state.events.push(ParseEvent::Fail {
                index: state.word_index,
                surface: "<end>".to_string(),
                reason: "description is not a single connected tree".to_string(),
                attempts: Vec::new(),
            });
            failed_at = Some((state.word_index, "<end>".to_string()));
        }
    }

    let classification = classify(&state.events);
    let report = ParseReport {
        sentence: sentence.to_string(),
        tokens,
        language: lexicon.language,
        strategy,
        classification,
        events: state.events.clone(),
        description: state.description.clone(),
        failed_at,
    };
    Ok((snapshots, report))
}

pub fn parse_sentence(
    lexicon: &Lexicon,
    sentence: &str,
    strategy: SearchStrategy,
) -> Result<ParseReport, LexiconError> {
    parse_states(lexicon, sentence, strategy).map(|(_, report)| report)
}

#[derive(Debug, Clone, Error)]
pub enum CorpusError {
    #[error("corpus line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("corpus line {line}: no lexicon loaded for {language}")]
    MissingLexicon { line: usize, language: Language },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
}

/// One corpus sentence: the language it belongs to, the classification the
/// parser is expected to produce, and the classification human readers give.
#[derive(Debug, Clone)]
pub struct CorpusRow {
    pub line: usize,
    pub language: Language,
    pub model_expected: Classification,
    pub human_expected: Classification,
    pub sentence: String,
}

impl CorpusRow {
    /// Rows where the model's expected verdict differs from the human one
    /// mark the theory's known over- or under-predictions.
    pub fn divergent(&self) -> bool {
        self.model_expected != self.human_expected
    }
}

/// Tab-separated, one sentence per line:
/// `<language>\t<model_expected>\t<human_expected>\t<sentence>`; `#` starts
/// a comment.
pub fn load_corpus(text: &str) -> Result<Vec<CorpusRow>, CorpusError> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.splitn(4, '\t').collect();
        if fields.len() != 4 {
            return Err(CorpusError::Parse {
                line: line_no,
                msg: format!("expected 4 tab-separated fields, got {}", fields.len()),
            });
        }
        let language = Language::from_name(fields[0]).ok_or_else(|| CorpusError::Parse {
            line: line_no,
            msg: format!("unknown language '{}'", fields[0]),
        })?;
        let model_expected =
            Classification::from_name(fields[1]).ok_or_else(|| CorpusError::Parse {
                line: line_no,
                msg: format!("unknown classification '{}'", fields[1]),
            })?;
        let human_expected =
            Classification::from_name(fields[2]).ok_or_else(|| CorpusError::Parse {
                line: line_no,
                msg: format!("unknown classification '{}'", fields[2]),
            })?;
        rows.push(CorpusRow {
            line: line_no,
            language,
            model_expected,
            human_expected,
            sentence: fields[3].trim().to_string(),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct CorpusOutcome {
    pub row: CorpusRow,
    pub got: Classification,
    pub report: ParseReport,
}

impl CorpusOutcome {
    pub fn matches_model(&self) -> bool {
        self.got == self.row.model_expected
    }
}

#[derive(Debug, Clone)]
pub struct CorpusReport {
    pub outcomes: Vec<CorpusOutcome>,
}

impl CorpusReport {
    pub fn all_match(&self) -> bool {
        self.outcomes.iter().all(CorpusOutcome::matches_model)
    }

    pub fn divergent_rows(&self) -> Vec<&CorpusOutcome> {
        self.outcomes.iter().filter(|o| o.row.divergent()).collect()
    }

    /// Deterministic tab-separated rendering, one line per sentence plus a
    /// trailing summary comment.
    pub fn render_tsv(&self) -> String {
        let mut out = String::from(
            "# language\texpected_model\texpected_human\tgot\tmodel_match\tdivergent\tsentence\n",
        );
        for o in &self.outcomes {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                o.row.language,
                o.row.model_expected,
                o.row.human_expected,
                o.got,
                if o.matches_model() { "yes" } else { "no" },
                if o.row.divergent() { "yes" } else { "no" },
                o.row.sentence
            ));
        }
        let matches = self.outcomes.iter().filter(|o| o.matches_model()).count();
        let divergent = self.outcomes.iter().filter(|o| o.row.divergent()).count();
        out.push_str(&format!(
            "# rows={} model_matches={} mismatches={} divergent={}\n",
            self.outcomes.len(),
            matches,
            self.outcomes.len() - matches,
            divergent
        ));
        out
    }
}

/// Run every corpus row with its language's lexicon and default strategy
/// (or a fixed override).
pub fn run_corpus(
    lexicons: &BTreeMap<Language, Lexicon>,
    rows: &[CorpusRow],
    strategy_override: Option<SearchStrategy>,
) -> Result<CorpusReport, CorpusError> {
    let mut outcomes = Vec::new();
    for row in rows {
        let lexicon = lexicons
            .get(&row.language)
            .ok_or(CorpusError::MissingLexicon { line: row.line, language: row.language })?;
        let strategy =
            strategy_override.unwrap_or_else(|| SearchStrategy::default_for(row.language));
        let report = parse_sentence(lexicon, &row.sentence, strategy)?;
        outcomes.push(CorpusOutcome { row: row.clone(), got: report.classification, report });
    }
    Ok(CorpusReport { outcomes })
}
