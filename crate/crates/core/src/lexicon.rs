//! Lexicalized grammar: every word carries one or more projection templates,
//! and attachment sites live inside those projections.
//!
//! Lexicons are plain text. A `template` block declares a projection shape
//! (nodes, relations, sites, feature plumbing); a `word` block instantiates
//! one or more templates as entries, optionally extending them with
//! word-specific nodes and sites (subcategorization) and decorating them with
//! features, licensing sets and case frames. See the bundled `data/*.lex`
//! files for the concrete grammars.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::description::{Category, Node, NodeId, Rel, RelKind};
use crate::features::{Feature, FeatureSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Language {
    English,
    Japanese,
}

impl Language {
    pub fn name(self) -> &'static str {
        match self {
            Language::English => "english",
            Language::Japanese => "japanese",
        }
    }

    pub fn from_name(s: &str) -> Option<Language> {
        match s {
            "english" => Some(Language::English),
            "japanese" => Some(Language::Japanese),
            _ => None,
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered case roles a verb requires among its overt clause-mates, e.g.
/// `nom,acc` for a plain transitive. Order encodes gap preference when a
/// relative clause is formed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseFrame {
    pub roles: Vec<String>,
}

impl fmt::Display for CaseFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.roles.join(","))
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("word '{word}' not in lexicon")]
    UnknownWord { word: String },
}

fn perr(line: usize, msg: impl Into<String>) -> LexiconError {
    LexiconError::Parse { line, msg: msg.into() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateNode {
    pub var: String,
    pub category: Category,
    pub features: FeatureSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteSpec {
    pub node: usize,
    pub demands: Vec<(Feature, String)>,
}

/// A projection shape with all variables resolved to indices into `nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedTemplate {
    pub name: String,
    pub nodes: Vec<TemplateNode>,
    pub rels: Vec<(RelKind, usize, usize)>,
    pub root: usize,
    pub lexslot: usize,
    pub left_site: Option<SiteSpec>,
    pub right_sites: Vec<SiteSpec>,
    pub head_edges: Vec<(usize, usize)>,
    pub agree_links: Vec<(usize, usize, Feature)>,
    pub forwards: Vec<(Feature, usize)>,
    pub rcl_host: Option<usize>,
}

/// One reading of a word: a resolved template plus word-level decoration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub surface: String,
    /// Category of the preterminal this word projects (V, N, D, P, C).
    pub category: Category,
    pub template: ResolvedTemplate,
    pub features: FeatureSet,
    /// Complement categories this head licenses as sisters/daughters.
    pub licensing: BTreeSet<Category>,
    pub case_frame: Option<CaseFrame>,
}

/// Attachment site of an instantiated projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjSite {
    pub node: NodeId,
    pub category: Category,
    pub demands: Vec<(Feature, String)>,
}

/// A template instantiated with fresh node ids, ready to be merged into a
/// parser state. Ids are provisional until the owning operation commits.
#[derive(Debug, Clone)]
pub struct SubtreeProjection {
    pub surface: String,
    pub template_name: String,
    pub entry_index: usize,
    pub root: NodeId,
    pub nodes: Vec<(NodeId, Node)>,
    pub rels: Vec<Rel>,
    pub left_site: Option<ProjSite>,
    pub right_sites: Vec<ProjSite>,
    pub head_edges: Vec<(NodeId, NodeId)>,
    pub agree_links: Vec<(NodeId, NodeId, Feature)>,
    pub forwards: Vec<(Feature, NodeId)>,
    pub lexslot: NodeId,
    pub terminal: NodeId,
    pub rcl_host: Option<NodeId>,
    pub licensing: BTreeSet<Category>,
    pub case_frame: Option<CaseFrame>,
}

impl SubtreeProjection {
    pub fn root_category(&self) -> &Category {
        &self
            .nodes
            .iter()
            .find(|(id, _)| *id == self.root)
            .expect("projection root is one of its nodes")
            .1
            .category
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.iter().find(|(n, _)| *n == id).map(|(_, n)| n)
    }

    /// Rename a provisional node id, everywhere it occurs. Used by merges:
    /// the description-side node absorbs the projection-side one.
    pub fn rename(&mut self, from: NodeId, to: NodeId) {
        let fix = |id: &mut NodeId| {
            if *id == from {
                *id = to;
            }
        };
        fix(&mut self.root);
        fix(&mut self.lexslot);
        fix(&mut self.terminal);
        if let Some(h) = &mut self.rcl_host {
            fix(h);
        }
        for (id, _) in &mut self.nodes {
            fix(id);
        }
        for r in &mut self.rels {
            fix(&mut r.a);
            fix(&mut r.b);
        }
        if let Some(site) = &mut self.left_site {
            fix(&mut site.node);
        }
        for site in &mut self.right_sites {
            fix(&mut site.node);
        }
        for (a, b) in &mut self.head_edges {
            fix(a);
            fix(b);
        }
        for (a, b, _) in &mut self.agree_links {
            fix(a);
            fix(b);
        }
        for (_, n) in &mut self.forwards {
            fix(n);
        }
    }
}

impl LexiconEntry {
    /// Instantiate the template with fresh ids. Word features land on the
    /// lexeme's preterminal and are immediately percolated along the
    /// template's internal head edges and agreement links, so the projection
    /// root already shows them when attachment inspects it.
    pub fn project(&self, entry_index: usize, next_id: &mut u32) -> SubtreeProjection {
        let mut alloc = || {
            let id = NodeId(*next_id);
            *next_id += 1;
            id
        };
        let t = &self.template;
        let ids: Vec<NodeId> = t.nodes.iter().map(|_| alloc()).collect();
        let mut nodes: Vec<(NodeId, Node)> = Vec::new();
        for (i, tn) in t.nodes.iter().enumerate() {
            let mut node = Node::phrasal(tn.category.clone());
            node.features = tn.features.clone();
            if i == t.lexslot {
                node.features = node
                    .features
                    .unify(&self.features)
                    .expect("entry features cannot clash with template features");
            }
            nodes.push((ids[i], node));
        }
        let terminal = alloc();
        nodes.push((terminal, Node::terminal(self.surface.clone())));
        let mut rels: Vec<Rel> = t
            .rels
            .iter()
            .map(|&(kind, a, b)| Rel { kind, a: ids[a], b: ids[b] })
            .collect();
        rels.push(Rel::dom(ids[t.lexslot], terminal));

        let mk_site = |s: &SiteSpec| ProjSite {
            node: ids[s.node],
            category: t.nodes[s.node].category.clone(),
            demands: s.demands.clone(),
        };
        let mut proj = SubtreeProjection {
            surface: self.surface.clone(),
            template_name: t.name.clone(),
            entry_index,
            root: ids[t.root],
            nodes,
            rels,
            left_site: t.left_site.as_ref().map(mk_site),
            right_sites: t.right_sites.iter().map(mk_site).collect(),
            head_edges: t.head_edges.iter().map(|&(p, c)| (ids[p], ids[c])).collect(),
            agree_links: t
                .agree_links
                .iter()
                .map(|&(a, b, f)| (ids[a], ids[b], f))
                .collect(),
            forwards: t.forwards.iter().map(|&(f, n)| (f, ids[n])).collect(),
            lexslot: ids[t.lexslot],
            terminal,
            rcl_host: t.rcl_host.map(|n| ids[n]),
            licensing: self.licensing.clone(),
            case_frame: self.case_frame.clone(),
        };
        percolate_projection(&mut proj);
        proj
    }
}

/// Run the head/agreement fixpoint inside a freshly built projection.
/// Template-internal features can never clash (the lexicon is static), so
/// failures here are lexicon bugs and panic.
fn percolate_projection(proj: &mut SubtreeProjection) {
    loop {
        let mut changed = false;
        let edges = proj.head_edges.clone();
        for (parent, child) in edges {
            let child_fs = proj.node(child).expect("head edge child exists").features.clone();
            let (_, p) = proj
                .nodes
                .iter_mut()
                .find(|(id, _)| *id == parent)
                .expect("head edge parent exists");
            changed |= p
                .features
                .absorb(&child_fs)
                .expect("template-internal head percolation cannot clash");
        }
        let links = proj.agree_links.clone();
        for (a, b, f) in links {
            for (x, y) in [(a, b), (b, a)] {
                let val = proj.node(x).and_then(|n| n.features.get(f).map(str::to_string));
                if let Some(v) = val {
                    let (_, ny) = proj
                        .nodes
                        .iter_mut()
                        .find(|(id, _)| *id == y)
                        .expect("agree link endpoint exists");
                    match ny.features.get(f) {
                        None => {
                            ny.features.set(f, v);
                            changed = true;
                        }
                        Some(existing) if existing != v => {
                            panic!("template-internal agreement cannot clash");
                        }
                        _ => {}
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

#[derive(Debug, Clone)]
enum Directive {
    Node(String, String),
    Rel(RelKind, String, String),
    Lex(String),
    Root(String),
    LeftSite(String, Vec<(Feature, String)>),
    RightSite(String, Vec<(Feature, String)>),
    Head(String, String),
    Agree(String, String, Feature),
    Forward(Feature, String),
    SetF(String, Feature, String),
    RclHost(String),
}

fn parse_feature(tok: &str, line: usize) -> Result<Feature, LexiconError> {
    Feature::from_name(tok).ok_or_else(|| perr(line, format!("unknown feature '{tok}'")))
}

fn parse_demands(toks: &[&str], line: usize) -> Result<Vec<(Feature, String)>, LexiconError> {
    toks.iter()
        .map(|t| {
            let (f, v) = t
                .split_once('=')
                .ok_or_else(|| perr(line, format!("expected feature=value, got '{t}'")))?;
            Ok((parse_feature(f, line)?, v.to_string()))
        })
        .collect()
}

/// Parse a structural directive usable inside both templates and entries.
/// Returns `Ok(None)` when the keyword belongs to another context.
fn parse_directive(toks: &[&str], line: usize) -> Result<Option<Directive>, LexiconError> {
    let need = |n: usize, what: &str| {
        if toks.len() == n {
            Ok(())
        } else {
            Err(perr(line, format!("'{}' expects {what}", toks[0])))
        }
    };
    let d = match toks[0] {
        "node" => {
            need(3, "a variable and a category")?;
            Directive::Node(toks[1].into(), toks[2].into())
        }
        "dom" => {
            need(3, "two variables")?;
            Directive::Rel(RelKind::Dom, toks[1].into(), toks[2].into())
        }
        "prec" => {
            need(3, "two variables")?;
            Directive::Rel(RelKind::Prec, toks[1].into(), toks[2].into())
        }
        "lex" => {
            need(2, "a variable")?;
            Directive::Lex(toks[1].into())
        }
        "root" => {
            need(2, "a variable")?;
            Directive::Root(toks[1].into())
        }
        "leftsite" => Directive::LeftSite(toks[1].into(), parse_demands(&toks[2..], line)?),
        "rightsite" => Directive::RightSite(toks[1].into(), parse_demands(&toks[2..], line)?),
        "head" => {
            need(3, "parent and child variables")?;
            Directive::Head(toks[1].into(), toks[2].into())
        }
        "agree" => {
            need(4, "two variables and a feature")?;
            Directive::Agree(toks[1].into(), toks[2].into(), parse_feature(toks[3], line)?)
        }
        "forward" => {
            need(3, "a feature and a site variable")?;
            Directive::Forward(parse_feature(toks[1], line)?, toks[2].into())
        }
        "setf" => {
            need(3, "a variable and feature=value")?;
            let (f, v) = toks[2]
                .split_once('=')
                .ok_or_else(|| perr(line, "setf expects feature=value"))?;
            Directive::SetF(toks[1].into(), parse_feature(f, line)?, v.to_string())
        }
        "rcl" => {
            need(2, "a variable")?;
            Directive::RclHost(toks[1].into())
        }
        _ => return Ok(None),
    };
    Ok(Some(d))
}

#[derive(Debug, Clone, Default)]
struct TemplateBuilder {
    name: String,
    vars: BTreeMap<String, usize>,
    nodes: Vec<TemplateNode>,
    rels: Vec<(RelKind, usize, usize)>,
    root: Option<usize>,
    lexslot: Option<usize>,
    left_site: Option<SiteSpec>,
    right_sites: Vec<SiteSpec>,
    head_edges: Vec<(usize, usize)>,
    agree_links: Vec<(usize, usize, Feature)>,
    forwards: Vec<(Feature, usize)>,
    rcl_host: Option<usize>,
}

impl TemplateBuilder {
    fn new(name: &str) -> Self {
        TemplateBuilder { name: name.to_string(), ..Default::default() }
    }

    fn var(&self, name: &str, line: usize) -> Result<usize, LexiconError> {
        self.vars
            .get(name)
            .copied()
            .ok_or_else(|| perr(line, format!("unknown variable '{name}'")))
    }

    fn apply(&mut self, d: Directive, line: usize) -> Result<(), LexiconError> {
        match d {
            Directive::Node(var, cat) => {
                if self.vars.contains_key(&var) {
                    return Err(perr(line, format!("variable '{var}' declared twice")));
                }
                self.vars.insert(var.clone(), self.nodes.len());
                self.nodes.push(TemplateNode {
                    var,
                    category: Category::new(cat),
                    features: FeatureSet::default(),
                });
            }
            Directive::Rel(kind, a, b) => {
                let (a, b) = (self.var(&a, line)?, self.var(&b, line)?);
                self.rels.push((kind, a, b));
            }
            Directive::Lex(v) => {
                if self.lexslot.is_some() {
                    return Err(perr(line, "lex slot declared twice"));
                }
                self.lexslot = Some(self.var(&v, line)?);
            }
            Directive::Root(v) => {
                if self.root.is_some() {
                    return Err(perr(line, "root declared twice"));
                }
                self.root = Some(self.var(&v, line)?);
            }
            Directive::LeftSite(v, demands) => {
                if self.left_site.is_some() {
                    return Err(perr(line, "left site declared twice"));
                }
                self.left_site = Some(SiteSpec { node: self.var(&v, line)?, demands });
            }
            Directive::RightSite(v, demands) => {
                let node = self.var(&v, line)?;
                self.right_sites.push(SiteSpec { node, demands });
            }
            Directive::Head(p, c) => {
                let (p, c) = (self.var(&p, line)?, self.var(&c, line)?);
                self.head_edges.push((p, c));
            }
            Directive::Agree(a, b, f) => {
                let (a, b) = (self.var(&a, line)?, self.var(&b, line)?);
                self.agree_links.push((a, b, f));
            }
            Directive::Forward(f, v) => {
                let node = self.var(&v, line)?;
                self.forwards.push((f, node));
            }
            Directive::SetF(v, f, val) => {
                let node = self.var(&v, line)?;
                self.nodes[node].features.set(f, val);
            }
            Directive::RclHost(v) => {
                self.rcl_host = Some(self.var(&v, line)?);
            }
        }
        Ok(())
    }

    fn finish(&self, line: usize) -> Result<ResolvedTemplate, LexiconError> {
        let root = self.root.ok_or_else(|| perr(line, "template has no root"))?;
        let lexslot = self.lexslot.ok_or_else(|| perr(line, "template has no lex slot"))?;
        for (f, n) in &self.forwards {
            let is_site = self.left_site.as_ref().is_some_and(|s| s.node == *n)
                || self.right_sites.iter().any(|s| s.node == *n);
            if !is_site {
                return Err(perr(
                    line,
                    format!("forward {f} targets '{}', which is not a site", self.nodes[*n].var),
                ));
            }
        }
        Ok(ResolvedTemplate {
            name: self.name.clone(),
            nodes: self.nodes.clone(),
            rels: self.rels.clone(),
            root,
            lexslot,
            left_site: self.left_site.clone(),
            right_sites: self.right_sites.clone(),
            head_edges: self.head_edges.clone(),
            agree_links: self.agree_links.clone(),
            forwards: self.forwards.clone(),
            rcl_host: self.rcl_host,
        })
    }
}

#[derive(Debug, Clone)]
struct EntryBuilder {
    template: String,
    template_line: usize,
    builder: Option<TemplateBuilder>,
    features: FeatureSet,
    licensing: BTreeSet<Category>,
    case_frame: Option<CaseFrame>,
}

/// A loaded grammar for one language.
#[derive(Debug, Clone)]
pub struct Lexicon {
    pub language: Language,
    pub version: u32,
    words: BTreeMap<String, Vec<LexiconEntry>>,
    adjoin: BTreeSet<(Category, Category)>,
}

impl Lexicon {
    pub fn load(text: &str) -> Result<Lexicon, LexiconError> {
        enum Ctx {
            Top,
            Template(TemplateBuilder),
            Word(String, Vec<EntryBuilder>),
        }

        let mut language: Option<Language> = None;
        let mut version: u32 = 1;
        let mut adjoin: BTreeSet<(Category, Category)> = BTreeSet::new();
        let mut templates: BTreeMap<String, TemplateBuilder> = BTreeMap::new();
        let mut raw_words: Vec<(String, Vec<EntryBuilder>, usize)> = Vec::new();
        let mut ctx = Ctx::Top;

        let close =
            |ctx: &mut Ctx,
             templates: &mut BTreeMap<String, TemplateBuilder>,
             raw_words: &mut Vec<(String, Vec<EntryBuilder>, usize)>,
             line: usize|
             -> Result<(), LexiconError> {
                match std::mem::replace(ctx, Ctx::Top) {
                    Ctx::Top => {}
                    Ctx::Template(tb) => {
                        // Validate eagerly so errors point near the block.
                        tb.finish(line)?;
                        if templates.insert(tb.name.clone(), tb).is_some() {
                            return Err(perr(line, "template name reused"));
                        }
                    }
                    Ctx::Word(w, entries) => {
                        if entries.is_empty() {
                            return Err(perr(line, format!("word '{w}' has no entries")));
                        }
                        raw_words.push((w, entries, line));
                    }
                }
                Ok(())
            };

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "lexversion" => {
                    version = toks
                        .get(1)
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| perr(line_no, "lexversion expects a number"))?;
                }
                "language" => {
                    let name = toks.get(1).ok_or_else(|| perr(line_no, "language expects a name"))?;
                    language = Some(
                        Language::from_name(name)
                            .ok_or_else(|| perr(line_no, format!("unknown language '{name}'")))?,
                    );
                }
                "adjoin" => {
                    if toks.len() != 3 {
                        return Err(perr(line_no, "adjoin expects two categories"));
                    }
                    adjoin.insert((Category::new(toks[1]), Category::new(toks[2])));
                }
                "template" => {
                    close(&mut ctx, &mut templates, &mut raw_words, line_no)?;
                    let name =
                        toks.get(1).ok_or_else(|| perr(line_no, "template expects a name"))?;
                    ctx = Ctx::Template(TemplateBuilder::new(name));
                }
                "word" => {
                    close(&mut ctx, &mut templates, &mut raw_words, line_no)?;
                    let surface =
                        toks.get(1).ok_or_else(|| perr(line_no, "word expects a surface form"))?;
                    ctx = Ctx::Word(surface.to_lowercase(), Vec::new());
                }
                "entry" => match &mut ctx {
                    Ctx::Word(_, entries) => {
                        let name =
                            toks.get(1).ok_or_else(|| perr(line_no, "entry expects a template"))?;
                        entries.push(EntryBuilder {
                            template: name.to_string(),
                            template_line: line_no,
                            builder: None,
                            features: FeatureSet::default(),
                            licensing: BTreeSet::new(),
                            case_frame: None,
                        });
                    }
                    _ => return Err(perr(line_no, "'entry' outside a word block")),
                },
                kw => match &mut ctx {
                    Ctx::Template(tb) => {
                        let d = parse_directive(&toks, line_no)?
                            .ok_or_else(|| perr(line_no, format!("unknown directive '{kw}'")))?;
                        tb.apply(d, line_no)?;
                    }
                    Ctx::Word(w, entries) => {
                        let entry = entries.last_mut().ok_or_else(|| {
                            perr(line_no, format!("directive before any entry of '{w}'"))
                        })?;
                        match kw {
                            "num" | "gender" | "sem" | "case" | "vform" => {
                                let val = toks
                                    .get(1)
                                    .ok_or_else(|| perr(line_no, "feature expects a value"))?;
                                entry.features.set(parse_feature(kw, line_no)?, *val);
                            }
                            "reflexive" => entry.features.reflexive = true,
                            "license" => {
                                for c in &toks[1..] {
                                    entry.licensing.insert(Category::new(*c));
                                }
                            }
                            "caseframe" => {
                                if toks.len() < 2 {
                                    return Err(perr(line_no, "caseframe expects roles"));
                                }
                                entry.case_frame = Some(CaseFrame {
                                    roles: toks[1..].iter().map(|s| s.to_string()).collect(),
                                });
                            }
                            _ => {
                                let d = parse_directive(&toks, line_no)?.ok_or_else(|| {
                                    perr(line_no, format!("unknown directive '{kw}'"))
                                })?;
                                // Extension: materialize a private copy of the
                                // base template on first structural directive.
                                if entry.builder.is_none() {
                                    let base =
                                        templates.get(&entry.template).ok_or_else(|| {
                                            perr(
                                                entry.template_line,
                                                format!("unknown template '{}'", entry.template),
                                            )
                                        })?;
                                    entry.builder = Some(base.clone());
                                }
                                entry.builder.as_mut().unwrap().apply(d, line_no)?;
                            }
                        }
                    }
                    Ctx::Top => return Err(perr(line_no, format!("unknown directive '{kw}'"))),
                },
            }
        }
        let last = text.lines().count();
        close(&mut ctx, &mut templates, &mut raw_words, last)?;

        let language = language.ok_or_else(|| perr(0, "lexicon declares no language"))?;
        let mut words: BTreeMap<String, Vec<LexiconEntry>> = BTreeMap::new();
        for (surface, entries, line) in raw_words {
            let mut resolved = Vec::new();
            for eb in entries {
                let builder = match &eb.builder {
                    Some(b) => b,
                    None => templates.get(&eb.template).ok_or_else(|| {
                        perr(eb.template_line, format!("unknown template '{}'", eb.template))
                    })?,
                };
                let template = builder.finish(eb.template_line)?;
                let category = template.nodes[template.lexslot].category.clone();
                resolved.push(LexiconEntry {
                    surface: surface.clone(),
                    category,
                    template,
                    features: eb.features,
                    licensing: eb.licensing,
                    case_frame: eb.case_frame,
                });
            }
            if words.insert(surface.clone(), resolved).is_some() {
                return Err(perr(line, format!("word '{surface}' defined twice")));
            }
        }
        Ok(Lexicon { language, version, words, adjoin })
    }

    pub fn lookup(&self, surface: &str) -> Result<&[LexiconEntry], LexiconError> {
        self.words
            .get(&surface.to_lowercase())
            .map(|v| v.as_slice())
            .ok_or_else(|| LexiconError::UnknownWord { word: surface.to_lowercase() })
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.words.contains_key(&surface.to_lowercase())
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.keys().map(|s| s.as_str())
    }

    /// Does any reading of `lexeme` license `complement` as its dependent?
    pub fn licenses(&self, lexeme: &str, complement: &Category) -> bool {
        self.words
            .get(&lexeme.to_lowercase())
            .is_some_and(|es| es.iter().any(|e| e.licensing.contains(complement)))
    }

    /// Same-category lowering (X-bar adjunction) permitted at `target`?
    pub fn allows_adjunction(&self, target: &Category, root: &Category) -> bool {
        self.adjoin.contains(&(target.clone(), root.clone()))
    }

    /// If `surface` has a reflexive reading, its gender requirement (if any).
    pub fn reflexive_gender(&self, surface: &str) -> Option<Option<String>> {
        let entries = self.words.get(&surface.to_lowercase())?;
        entries
            .iter()
            .find(|e| e.features.reflexive)
            .map(|e| e.features.gender.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "\
lexversion 1
language english
adjoin N' N'

template proper-np
  node NP NP
  node N N
  dom NP N
  lex N
  root NP
  head NP N

template clause-verb
  node S S
  node SUBJ NP
  node PRED VP
  node V V
  dom S SUBJ
  dom S PRED
  prec SUBJ PRED
  dom PRED V
  lex V
  root S
  leftsite SUBJ
  head PRED V
  agree SUBJ V num

word john
entry proper-np
  num sg
  gender masc

word knows
entry clause-verb
  num sg
  vform fin
  node OBJ NP
  dom PRED OBJ
  prec V OBJ
  rightsite OBJ
  license NP S
";

    #[test]
    fn loads_and_projects() {
        let lex = Lexicon::load(TINY).unwrap();
        assert_eq!(lex.language, Language::English);
        let entries = lex.lookup("John").unwrap();
        assert_eq!(entries.len(), 1);
        let mut next = 0;
        let proj = entries[0].project(0, &mut next);
        assert_eq!(proj.root_category().label(), "NP");
        // NP, N, terminal
        assert_eq!(proj.nodes.len(), 3);
        let term = proj.node(proj.terminal).unwrap();
        assert_eq!(term.lexeme.as_deref(), Some("john"));
        // Features percolate to the root along the head edge at projection.
        let root = proj.node(proj.root).unwrap();
        assert_eq!(root.features.num.as_deref(), Some("sg"));
        assert_eq!(root.features.gender.as_deref(), Some("masc"));
    }

    #[test]
    fn entry_extension_adds_site_without_touching_base_template() {
        let lex = Lexicon::load(TINY).unwrap();
        let knows = &lex.lookup("knows").unwrap()[0];
        let mut next = 0;
        let proj = knows.project(0, &mut next);
        assert_eq!(proj.right_sites.len(), 1);
        assert_eq!(proj.right_sites[0].category.label(), "NP");
        assert!(proj.left_site.is_some());
        assert!(lex.licenses("knows", &Category::new("S")));
        assert!(!lex.licenses("john", &Category::new("S")));

        // Agreement at projection time: subject slot picks up num=sg.
        let subj = proj.left_site.as_ref().unwrap().node;
        assert_eq!(proj.node(subj).unwrap().features.num.as_deref(), Some("sg"));
    }

    #[test]
    fn adjunction_table() {
        let lex = Lexicon::load(TINY).unwrap();
        assert!(lex.allows_adjunction(&Category::new("N'"), &Category::new("N'")));
        assert!(!lex.allows_adjunction(&Category::new("NP"), &Category::new("NP")));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "language english\ntemplate t\n  node A NP\n  dom A B\n";
        match Lexicon::load(bad) {
            Err(LexiconError::Parse { line, msg }) => {
                assert_eq!(line, 4);
                assert!(msg.contains("unknown variable"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_word_is_reported() {
        let lex = Lexicon::load(TINY).unwrap();
        match lex.lookup("zebra") {
            Err(LexiconError::UnknownWord { word }) => assert_eq!(word, "zebra"),
            other => panic!("expected unknown word, got {other:?}"),
        }
    }

    #[test]
    fn words_without_language_rejected() {
        assert!(Lexicon::load("template t\n node A NP\n lex A\n root A\n").is_err());
    }
}
