//! Incremental parser over monotone tree descriptions.
//!
//! The parser commits to dominance and precedence relations word by word and
//! never retracts one. Structural surprises are absorbed, where possible, by
//! *lowering*: re-attaching an already-built constituent under new material
//! while keeping every earlier assertion true. Sentences that can be rescued
//! this way are classified as unconscious garden paths; sentences where no
//! consistent extension exists are conscious garden paths.

pub mod attachment;
pub mod bundled;
pub mod description;
pub mod driver;
pub mod events;
pub mod export;
pub mod features;
pub mod lexicon;
pub mod lowering;

pub use description::{
    check_conditions, closure_of, Category, ConsistencyError, FormatError, Node, NodeId, Rel,
    RelKind, SecondaryKind, TreeDescription, TERMINAL_CATEGORY,
};
pub use attachment::{left_attach, right_attach, AttachFailure, ParserState, Side, SiteState};
pub use events::{AttemptFailure, LowerKind, ParseEvent, RejectReason};
pub use features::{Feature, FeatureError, FeatureSet};
pub use lexicon::{CaseFrame, Language, Lexicon, LexiconEntry, LexiconError, ProjSite, SubtreeProjection};
pub use lowering::{accessible_nodes, relative_clause_lower, select_and_lower, tree_lower, LowerFailure, SearchStrategy};
pub use driver::{
    classify, load_corpus, parse_sentence, parse_states, run_corpus, tokenize, Classification,
    CorpusError, CorpusOutcome, CorpusReport, CorpusRow, ParseReport,
};
pub use export::{bracket_of, dot_of, DotOptions};
