//! Tree descriptions: monotone sets of dominance and precedence assertions.
//!
//! A description is a partial commitment to a phrase structure tree. Parsing
//! only ever *adds* relations; nothing is retracted or overridden. The closure
//! rules (transitivity of both relations, plus inheritance of precedence
//! through dominance) and the well-formedness conditions (irreflexivity,
//! antisymmetry, exclusivity of dominance and precedence) live here, together
//! with a line-based text format used by the CLI and the golden tests.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Identity of a node within one parse. Allocated sequentially by the parser
/// state; merged nodes keep the older (description-side) id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Syntactic category label. Comparison is exact label equality, bar level
/// included ("N'" and "N" are distinct categories).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Category(String);

/// Category reserved for terminal (surface word) nodes.
pub const TERMINAL_CATEGORY: &str = "Lex";

impl Category {
    pub fn new(label: impl Into<String>) -> Self {
        Category(label.into())
    }

    pub fn label(&self) -> &str {
        &self.0
    }

    pub fn is_terminal(&self) -> bool {
        self.0 == TERMINAL_CATEGORY
    }

    /// Zero-level (lexical head) categories project a single preterminal.
    pub fn is_lexical_head(&self) -> bool {
        matches!(self.0.as_str(), "V" | "N" | "D" | "P" | "C")
    }

    /// Clause categories; used to delimit case-frame locality.
    pub fn is_clause(&self) -> bool {
        matches!(self.0.as_str(), "S" | "S'")
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Category {
    fn from(s: &str) -> Self {
        Category::new(s)
    }
}

use crate::features::FeatureSet;

/// A node of the description. `lexeme` is present exactly on terminal nodes;
/// `empty` marks phonetically null nodes (gaps and dropped arguments), which
/// never carry a lexeme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub category: Category,
    pub lexeme: Option<String>,
    pub empty: bool,
    /// Antecedent of a bound empty node (the head noun a gap relativizes).
    pub antecedent: Option<NodeId>,
    pub features: FeatureSet,
}

impl Node {
    pub fn phrasal(category: impl Into<Category>) -> Self {
        Node {
            category: category.into(),
            lexeme: None,
            empty: false,
            antecedent: None,
            features: FeatureSet::default(),
        }
    }

    pub fn terminal(lexeme: impl Into<String>) -> Self {
        Node {
            category: Category::new(TERMINAL_CATEGORY),
            lexeme: Some(lexeme.into()),
            empty: false,
            antecedent: None,
            features: FeatureSet::default(),
        }
    }

    pub fn empty(category: impl Into<Category>) -> Self {
        Node {
            category: category.into(),
            lexeme: None,
            empty: true,
            antecedent: None,
            features: FeatureSet::default(),
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.lexeme.is_some()
    }
}

/// Relation kind: dominance (proper ancestry) or linear precedence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelKind {
    Dom,
    Prec,
}

impl fmt::Display for RelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelKind::Dom => "dom",
            RelKind::Prec => "prec",
        })
    }
}

/// One directed relation between two nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rel {
    pub kind: RelKind,
    pub a: NodeId,
    pub b: NodeId,
}

impl Rel {
    pub fn dom(a: NodeId, b: NodeId) -> Self {
        Rel { kind: RelKind::Dom, a, b }
    }

    pub fn prec(a: NodeId, b: NodeId) -> Self {
        Rel { kind: RelKind::Prec, a, b }
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.kind, self.a, self.b)
    }
}

/// Annotations that never constrain structure; kept for trace output only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SecondaryKind {
    ThetaAssignment,
    CaseAssignment,
}

impl fmt::Display for SecondaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SecondaryKind::ThetaAssignment => "theta",
            SecondaryKind::CaseAssignment => "case",
        })
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConsistencyError {
    #[error("{kind} relation from node {node} to itself")]
    Reflexive { kind: RelKind, node: NodeId },
    #[error("{kind} holds in both directions between {a} and {b}")]
    Antisymmetry { kind: RelKind, a: NodeId, b: NodeId },
    #[error("nodes {a} and {b} stand in both dominance and precedence")]
    Exclusivity { a: NodeId, b: NodeId },
    #[error("relation references unknown node {node}")]
    UnknownNode { node: NodeId },
    #[error("node {node} declared twice")]
    DuplicateNode { node: NodeId },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct FormatError {
    pub line: usize,
    pub msg: String,
}

/// Least fixpoint of the closure rules over an arbitrary relation set:
///
/// 1. dom(a,b), dom(b,c)  => dom(a,c)
/// 2. prec(a,b), prec(b,c) => prec(a,c)
/// 3. prec(a,b), dom(a,x) => prec(x,b)
/// 4. prec(a,b), dom(b,y) => prec(a,y)
///
/// The closure itself is always defined; well-formedness is checked
/// separately by [`check_conditions`].
pub fn closure_of(rels: &BTreeSet<Rel>) -> BTreeSet<Rel> {
    let mut closure = BTreeSet::new();
    extend_closure(&mut closure, rels.iter().copied());
    closure
}

/// Semi-naive extension: adds `new` to `closure` and derives consequences by
/// pairing each worklist item against the accumulated set. Starting from a
/// closed set this computes exactly the closure of the union.
pub(crate) fn extend_closure(closure: &mut BTreeSet<Rel>, new: impl IntoIterator<Item = Rel>) {
    let mut queue: Vec<Rel> = Vec::new();
    for r in new {
        if closure.insert(r) {
            queue.push(r);
        }
    }
    while let Some(r) = queue.pop() {
        let mut derived: Vec<Rel> = Vec::new();
        for s in closure.iter().copied() {
            match (r.kind, s.kind) {
                (RelKind::Dom, RelKind::Dom) => {
                    if r.b == s.a {
                        derived.push(Rel::dom(r.a, s.b));
                    }
                    if s.b == r.a {
                        derived.push(Rel::dom(s.a, r.b));
                    }
                }
                (RelKind::Prec, RelKind::Prec) => {
                    if r.b == s.a {
                        derived.push(Rel::prec(r.a, s.b));
                    }
                    if s.b == r.a {
                        derived.push(Rel::prec(s.a, r.b));
                    }
                }
                // prec(a,b) with dom(a,x) => prec(x,b); with dom(b,y) => prec(a,y)
                (RelKind::Prec, RelKind::Dom) => {
                    if s.a == r.a {
                        derived.push(Rel::prec(s.b, r.b));
                    }
                    if s.a == r.b {
                        derived.push(Rel::prec(r.a, s.b));
                    }
                }
                (RelKind::Dom, RelKind::Prec) => {
                    if r.a == s.a {
                        derived.push(Rel::prec(r.b, s.b));
                    }
                    if r.a == s.b {
                        derived.push(Rel::prec(s.a, r.b));
                    }
                }
            }
        }
        for d in derived {
            if closure.insert(d) {
                queue.push(d);
            }
        }
    }
}

/// Well-formedness over a closed relation set. Reported violation is the
/// first in relation order, so errors are deterministic.
pub fn check_conditions(closure: &BTreeSet<Rel>) -> Result<(), ConsistencyError> {
    for r in closure {
        if r.a == r.b {
            return Err(ConsistencyError::Reflexive { kind: r.kind, node: r.a });
        }
        let flipped = Rel { kind: r.kind, a: r.b, b: r.a };
        if r.a < r.b && closure.contains(&flipped) {
            return Err(ConsistencyError::Antisymmetry { kind: r.kind, a: r.a, b: r.b });
        }
        let other = match r.kind {
            RelKind::Dom => RelKind::Prec,
            RelKind::Prec => RelKind::Dom,
        };
        if closure.contains(&Rel { kind: other, a: r.a, b: r.b })
            || closure.contains(&Rel { kind: other, a: r.b, b: r.a })
        {
            let (a, b) = if r.a < r.b { (r.a, r.b) } else { (r.b, r.a) };
            return Err(ConsistencyError::Exclusivity { a, b });
        }
    }
    Ok(())
}

/// A monotone description: nodes plus asserted relations plus their closure.
///
/// All updates are persistent (they return a new value and leave the receiver
/// untouched), so rejected operations cannot corrupt parser state and traces
/// can diff successive generations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeDescription {
    nodes: BTreeMap<NodeId, Node>,
    asserted: BTreeSet<Rel>,
    closure: BTreeSet<Rel>,
    secondary: BTreeSet<(SecondaryKind, NodeId, NodeId)>,
    generation: u64,
}

impl TreeDescription {
    pub fn new() -> Self {
        TreeDescription::default()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes.iter().map(|(id, n)| (*id, n))
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn asserted(&self) -> &BTreeSet<Rel> {
        &self.asserted
    }

    pub fn closure(&self) -> &BTreeSet<Rel> {
        &self.closure
    }

    pub fn secondary(&self) -> impl Iterator<Item = (SecondaryKind, NodeId, NodeId)> + '_ {
        self.secondary.iter().copied()
    }

    pub fn contains(&self, rel: Rel) -> bool {
        self.closure.contains(&rel)
    }

    pub fn dominates(&self, a: NodeId, b: NodeId) -> bool {
        self.contains(Rel::dom(a, b))
    }

    pub fn with_node(&self, id: NodeId, node: Node) -> Result<Self, ConsistencyError> {
        if self.nodes.contains_key(&id) {
            return Err(ConsistencyError::DuplicateNode { node: id });
        }
        let mut next = self.clone();
        next.nodes.insert(id, node);
        next.generation += 1;
        Ok(next)
    }

    /// Mutate a node's features/antecedent in place. Structure (category,
    /// lexeme, emptiness) is fixed once a node exists.
    pub(crate) fn update_node_features(&mut self, id: NodeId, f: impl FnOnce(&mut Node)) {
        if let Some(n) = self.nodes.get_mut(&id) {
            let (category, lexeme, empty) = (n.category.clone(), n.lexeme.clone(), n.empty);
            f(n);
            debug_assert_eq!(category, n.category);
            debug_assert_eq!(lexeme, n.lexeme);
            debug_assert_eq!(empty, n.empty);
        }
    }

    /// Monotone update: the given relations are added, the closure is
    /// extended incrementally, and the conditions are re-checked. On error
    /// the original description is left untouched (the candidate is dropped).
    pub fn assert_relations(
        &self,
        rels: impl IntoIterator<Item = Rel>,
    ) -> Result<Self, ConsistencyError> {
        let mut next = self.clone();
        let mut added = Vec::new();
        for r in rels {
            for id in [r.a, r.b] {
                if !next.nodes.contains_key(&id) {
                    return Err(ConsistencyError::UnknownNode { node: id });
                }
            }
            if next.asserted.insert(r) {
                added.push(r);
            }
        }
        extend_closure(&mut next.closure, added);
        check_conditions(&next.closure)?;
        next.generation += 1;
        Ok(next)
    }

    pub fn with_secondary(&self, kind: SecondaryKind, a: NodeId, b: NodeId) -> Self {
        let mut next = self.clone();
        next.secondary.insert((kind, a, b));
        next
    }

    /// The relations tying `n` to its context: incoming dominance plus all
    /// precedence in which `n` takes part, asserted relations only. Outgoing
    /// dominance is excluded — a node's daughters move with it when it is
    /// lowered, so they are not part of its attachment to the surroundings.
    pub fn local_relations(&self, n: NodeId) -> BTreeSet<Rel> {
        self.asserted
            .iter()
            .filter(|r| match r.kind {
                RelKind::Dom => r.b == n,
                RelKind::Prec => r.a == n || r.b == n,
            })
            .copied()
            .collect()
    }

    /// Nodes with no dominator in the closure.
    pub fn roots(&self) -> Vec<NodeId> {
        self.nodes
            .keys()
            .copied()
            .filter(|&n| !self.closure.iter().any(|r| r.kind == RelKind::Dom && r.b == n))
            .collect()
    }

    /// Immediate (Hasse) children of `n` under dominance, sorted by
    /// precedence where the closure orders them, with id as tiebreak.
    pub fn immediate_children(&self, n: NodeId) -> Vec<NodeId> {
        let below: Vec<NodeId> = self
            .closure
            .iter()
            .filter(|r| r.kind == RelKind::Dom && r.a == n)
            .map(|r| r.b)
            .collect();
        let mut children: Vec<NodeId> = below
            .iter()
            .copied()
            .filter(|&c| !below.iter().any(|&m| m != c && self.dominates(m, c)))
            .collect();
        children.sort_by(|&x, &y| {
            if self.contains(Rel::prec(x, y)) {
                std::cmp::Ordering::Less
            } else if self.contains(Rel::prec(y, x)) {
                std::cmp::Ordering::Greater
            } else {
                x.cmp(&y)
            }
        });
        children
    }

    /// Terminal nodes in precedence order (the surface string so far).
    pub fn terminals_in_order(&self) -> Vec<NodeId> {
        let mut terms: Vec<NodeId> = self
            .nodes
            .iter()
            .filter(|(_, n)| n.is_terminal())
            .map(|(id, _)| *id)
            .collect();
        terms.sort_by(|&x, &y| {
            if self.contains(Rel::prec(x, y)) {
                std::cmp::Ordering::Less
            } else if self.contains(Rel::prec(y, x)) {
                std::cmp::Ordering::Greater
            } else {
                x.cmp(&y)
            }
        });
        terms
    }

    /// Surface words dominated by `n`, in precedence order.
    pub fn yield_of(&self, n: NodeId) -> Vec<String> {
        self.terminals_in_order()
            .into_iter()
            .filter(|&t| self.dominates(n, t))
            .filter_map(|t| self.node(t).and_then(|nd| nd.lexeme.clone()))
            .collect()
    }

    /// Line-based structural text form: `node <id> <category> [<lexeme>]`
    /// lines (empty nodes marked `<empty>`, bound ones `ante=<id>`) followed
    /// by the asserted `dom`/`prec` lines, everything in deterministic order.
    /// Features and secondary annotations are runtime-only and not written.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, n) in &self.nodes {
            out.push_str(&format!("node {} {}", id, n.category));
            if let Some(lex) = &n.lexeme {
                out.push(' ');
                out.push_str(lex);
            }
            if n.empty {
                out.push_str(" <empty>");
            }
            if let Some(a) = n.antecedent {
                out.push_str(&format!(" ante={a}"));
            }
            out.push('\n');
        }
        for r in &self.asserted {
            out.push_str(&format!("{} {} {}\n", r.kind, r.a, r.b));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, FormatError> {
        let err = |line: usize, msg: &str| FormatError { line, msg: msg.to_string() };
        let mut desc = TreeDescription::new();
        let mut rels = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "node" => {
                    if toks.len() < 3 {
                        return Err(err(line_no, "node needs an id and a category"));
                    }
                    let id = NodeId(
                        toks[1].parse().map_err(|_| err(line_no, "bad node id"))?,
                    );
                    let mut node = Node::phrasal(toks[2]);
                    for tok in &toks[3..] {
                        if *tok == "<empty>" {
                            node.empty = true;
                        } else if let Some(a) = tok.strip_prefix("ante=") {
                            node.antecedent = Some(NodeId(
                                a.parse().map_err(|_| err(line_no, "bad antecedent id"))?,
                            ));
                        } else {
                            node.lexeme = Some((*tok).to_string());
                        }
                    }
                    desc = desc
                        .with_node(id, node)
                        .map_err(|e| err(line_no, &e.to_string()))?;
                }
                "dom" | "prec" => {
                    if toks.len() != 3 {
                        return Err(err(line_no, "relation needs exactly two node ids"));
                    }
                    let a = NodeId(toks[1].parse().map_err(|_| err(line_no, "bad node id"))?);
                    let b = NodeId(toks[2].parse().map_err(|_| err(line_no, "bad node id"))?);
                    rels.push(match toks[0] {
                        "dom" => Rel::dom(a, b),
                        _ => Rel::prec(a, b),
                    });
                }
                other => {
                    return Err(err(line_no, &format!("unknown directive '{other}'")));
                }
            }
        }
        desc.assert_relations(rels)
            .map_err(|e| FormatError { line: 0, msg: e.to_string() })
    }
}
