//! Command-line front end: parse single sentences with event traces, run
//! regression corpora, export descriptions, and compare search strategies.
//!
//! Exit codes: 0 for a successful parse (fluent or silently repaired),
//! 2 when the parser gives up (or corpus rows miss their expected label),
//! 1 for operational errors (unreadable files, unknown words, bad usage).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dparse::{
    bracket_of, bundled, dot_of, load_corpus, parse_sentence, run_corpus, Classification,
    DotOptions, Language, Lexicon, ParseEvent, ParseReport, SearchStrategy,
};

#[derive(Parser)]
#[command(name = "dparse", version, about = "Incremental monotone-description parser")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse one sentence word by word and classify it
    Parse(ParseArgs),
    /// Run a corpus and report per-row classifications as TSV
    Corpus(CorpusArgs),
    /// Render a sentence's description as DOT, brackets, or relations
    Export(ExportArgs),
    /// Parse the same sentence under both search strategies
    CompareStrategies(CompareArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum LangOpt {
    English,
    Japanese,
}

impl From<LangOpt> for Language {
    fn from(l: LangOpt) -> Language {
        match l {
            LangOpt::English => Language::English,
            LangOpt::Japanese => Language::Japanese,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum StrategyOpt {
    BottomUp,
    TopDown,
}

impl From<StrategyOpt> for SearchStrategy {
    fn from(s: StrategyOpt) -> SearchStrategy {
        match s {
            StrategyOpt::BottomUp => SearchStrategy::BottomUp,
            StrategyOpt::TopDown => SearchStrategy::TopDown,
        }
    }
}

#[derive(Args)]
struct GrammarOpts {
    /// Bundled grammar to parse with
    #[arg(long, value_enum, default_value = "english")]
    lang: LangOpt,
    /// Lexicon file replacing the bundled grammar (its own language
    /// declaration wins over --lang)
    #[arg(long, value_name = "FILE")]
    lexicon: Option<PathBuf>,
    /// Reanalysis search order; defaults to the grammar language's preference
    #[arg(long, value_enum)]
    strategy: Option<StrategyOpt>,
}

impl GrammarOpts {
    fn load(&self) -> Result<Lexicon, String> {
        match &self.lexicon {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                Lexicon::load(&text).map_err(|e| format!("{}: {e}", path.display()))
            }
            None => {
                bundled::try_lexicon(self.lang.into()).map_err(|e| format!("bundled lexicon: {e}"))
            }
        }
    }

    fn strategy(&self, lexicon: &Lexicon) -> SearchStrategy {
        self.strategy
            .map(SearchStrategy::from)
            .unwrap_or_else(|| SearchStrategy::default_for(lexicon.language))
    }
}

#[derive(Args)]
struct ParseArgs {
    #[command(flatten)]
    grammar: GrammarOpts,
    /// What to print besides the verdict
    #[arg(long, value_enum, default_value = "events")]
    trace: TraceOpt,
    /// The sentence, one shell word per word
    #[arg(required = true)]
    words: Vec<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TraceOpt {
    /// Verdict only
    Quiet,
    /// One line per parse event
    Events,
    /// Events plus the final relation set
    Relations,
}

#[derive(Args)]
struct CorpusArgs {
    /// Corpus TSV file; the bundled regression set when omitted
    file: Option<PathBuf>,
    /// Lexicon files, each replacing the bundled grammar of its language
    #[arg(long = "lexicon", value_name = "FILE")]
    lexicons: Vec<PathBuf>,
    /// Force one search strategy instead of each language's preference
    #[arg(long, value_enum)]
    strategy: Option<StrategyOpt>,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    grammar: GrammarOpts,
    #[arg(long, value_enum, default_value = "dot")]
    format: FormatOpt,
    /// DOT only: draw every derived relation, not the reduced tree
    #[arg(long)]
    full_closure: bool,
    /// Write here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(required = true)]
    words: Vec<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatOpt {
    /// Graphviz digraph
    Dot,
    /// Major-category constituent brackets
    Brackets,
    /// Node and relation listing, one item per line
    Relations,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    grammar: GrammarOpts,
    #[arg(required = true)]
    words: Vec<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Parse(args) => cmd_parse(args),
        Command::Corpus(args) => cmd_corpus(args),
        Command::Export(args) => cmd_export(args),
        Command::CompareStrategies(args) => cmd_compare(args),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn exit_for(classification: Classification) -> ExitCode {
    match classification {
        Classification::ConsciousGardenPath => ExitCode::from(2),
        _ => ExitCode::SUCCESS,
    }
}

fn print_events(report: &ParseReport) {
    for event in &report.events {
        let line = event.render(&report.description);
        if matches!(event, ParseEvent::Word { .. }) {
            println!("{line}");
        } else {
            println!("  {line}");
        }
    }
}

fn print_verdict(report: &ParseReport) {
    if let Some((index, word)) = &report.failed_at {
        println!("FAILED: word {index} ({word})");
    } else {
        println!("BRACKET: {}", bracket_of(&report.description));
    }
    println!(
        "CLASSIFICATION: {} [{}, {}]",
        report.classification,
        report.language,
        report.strategy.name()
    );
}

fn cmd_parse(args: ParseArgs) -> Result<ExitCode, String> {
    let lexicon = args.grammar.load()?;
    let strategy = args.grammar.strategy(&lexicon);
    let sentence = args.words.join(" ");
    let report = parse_sentence(&lexicon, &sentence, strategy).map_err(|e| e.to_string())?;
    match args.trace {
        TraceOpt::Quiet => {}
        TraceOpt::Events => print_events(&report),
        TraceOpt::Relations => {
            print_events(&report);
            println!("--- description ---");
            print!("{}", report.description.to_text());
            println!("-------------------");
        }
    }
    print_verdict(&report);
    Ok(exit_for(report.classification))
}

fn cmd_corpus(args: CorpusArgs) -> Result<ExitCode, String> {
    let rows = match &args.file {
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            load_corpus(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => bundled::corpus().map_err(|e| format!("bundled corpus: {e}"))?,
    };
    let mut lexicons = bundled::lexicons();
    for path in &args.lexicons {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let lexicon =
            Lexicon::load(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        lexicons.insert(lexicon.language, lexicon);
    }
    let report = run_corpus(&lexicons, &rows, args.strategy.map(SearchStrategy::from))
        .map_err(|e| e.to_string())?;
    print!("{}", report.render_tsv());
    Ok(if report.all_match() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_export(args: ExportArgs) -> Result<ExitCode, String> {
    let lexicon = args.grammar.load()?;
    let strategy = args.grammar.strategy(&lexicon);
    let sentence = args.words.join(" ");
    let report = parse_sentence(&lexicon, &sentence, strategy).map_err(|e| e.to_string())?;
    let rendered = match args.format {
        FormatOpt::Dot => dot_of(
            &report.description,
            DotOptions { full_closure: args.full_closure },
        ),
        FormatOpt::Brackets => format!("{}\n", bracket_of(&report.description)),
        FormatOpt::Relations => report.description.to_text(),
    };
    match &args.out {
        Some(path) => fs::write(path, rendered).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(exit_for(report.classification))
}

fn cmd_compare(args: CompareArgs) -> Result<ExitCode, String> {
    let lexicon = args.grammar.load()?;
    let sentence = args.words.join(" ");
    let mut verdicts = Vec::new();
    for strategy in [SearchStrategy::BottomUp, SearchStrategy::TopDown] {
        let report = parse_sentence(&lexicon, &sentence, strategy).map_err(|e| e.to_string())?;
        println!("== {}: {}", strategy.name(), report.classification);
        for event in &report.events {
            match event {
                ParseEvent::Lower { .. } | ParseEvent::LowerReject { .. }
                | ParseEvent::Fail { .. } => {
                    println!("   {}", event.render(&report.description));
                }
                _ => {}
            }
        }
        if report.failed_at.is_none() {
            println!("   BRACKET: {}", bracket_of(&report.description));
        }
        verdicts.push(report.classification);
    }
    if verdicts[0] == verdicts[1] {
        println!("strategies agree: {}", verdicts[0]);
    } else {
        println!(
            "strategies diverge: bottom-up={} top-down={}",
            verdicts[0], verdicts[1]
        );
    }
    Ok(ExitCode::SUCCESS)
}
