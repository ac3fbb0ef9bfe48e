//! Brute-force reference implementations the library is tested against.
//!
//! Everything here is deliberately written the slow, obvious way and shares
//! no code with the library: the closure oracle iterates over all pairs until
//! nothing changes, and the tree oracles answer structural questions by
//! walking an explicit ordered tree rather than consulting relation sets.

use std::collections::BTreeSet;

use dparse::{Node, NodeId, ParserState, Rel, RelKind, TreeDescription};
use rand::prelude::*;

/// All-pairs fixpoint of the four closure rules.
pub fn naive_closure(rels: &BTreeSet<Rel>) -> BTreeSet<Rel> {
    let mut closure = rels.clone();
    loop {
        let mut fresh: BTreeSet<Rel> = BTreeSet::new();
        for r in &closure {
            for s in &closure {
                match (r.kind, s.kind) {
                    (RelKind::Dom, RelKind::Dom) if r.b == s.a => {
                        fresh.insert(Rel::dom(r.a, s.b));
                    }
                    (RelKind::Prec, RelKind::Prec) if r.b == s.a => {
                        fresh.insert(Rel::prec(r.a, s.b));
                    }
                    (RelKind::Prec, RelKind::Dom) => {
                        if s.a == r.a {
                            fresh.insert(Rel::prec(s.b, r.b));
                        }
                        if s.a == r.b {
                            fresh.insert(Rel::prec(r.a, s.b));
                        }
                    }
                    _ => {}
                }
            }
        }
        let before = closure.len();
        closure.extend(fresh);
        if closure.len() == before {
            return closure;
        }
    }
}

/// Plain scan for irreflexivity, antisymmetry and dominance/precedence
/// exclusivity over a closed set.
pub fn naive_wellformed(closure: &BTreeSet<Rel>) -> bool {
    for r in closure {
        if r.a == r.b {
            return false;
        }
        if closure.contains(&Rel { kind: r.kind, a: r.b, b: r.a }) {
            return false;
        }
        let other = match r.kind {
            RelKind::Dom => RelKind::Prec,
            RelKind::Prec => RelKind::Dom,
        };
        if closure.contains(&Rel { kind: other, a: r.a, b: r.b })
            || closure.contains(&Rel { kind: other, a: r.b, b: r.a })
        {
            return false;
        }
    }
    true
}

pub fn random_relations(rng: &mut impl Rng, max_node: u32, count: usize) -> BTreeSet<Rel> {
    let mut rels = BTreeSet::new();
    for _ in 0..count {
        let a = NodeId(rng.gen_range(0..max_node));
        let b = NodeId(rng.gen_range(0..max_node));
        let rel = if rng.gen_bool(0.5) { Rel::dom(a, b) } else { Rel::prec(a, b) };
        rels.insert(rel);
    }
    rels
}

/// An explicit ordered tree. Indices are positions in the vectors; `ids` maps
/// positions to (shuffled) node ids so nothing downstream can depend on id
/// order coinciding with tree order.
pub struct OracleTree {
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub ids: Vec<NodeId>,
}

impl OracleTree {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.children[v].is_empty()).collect()
    }

    pub fn is_strict_ancestor(&self, a: usize, d: usize) -> bool {
        let mut cur = self.parent[d];
        while let Some(p) = cur {
            if p == a {
                return true;
            }
            cur = self.parent[p];
        }
        false
    }

    pub fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &c in &self.children[x] {
                out.push(c);
                stack.push(c);
            }
        }
        out
    }
}

pub fn random_tree(rng: &mut impl Rng, size: usize) -> OracleTree {
    assert!(size >= 1);
    let mut parent = vec![None];
    let mut children: Vec<Vec<usize>> = vec![Vec::new()];
    for v in 1..size {
        let p = rng.gen_range(0..v);
        parent.push(Some(p));
        children.push(Vec::new());
        children[p].push(v);
    }
    let mut ids: Vec<NodeId> = (0..size as u32).map(NodeId).collect();
    ids.shuffle(rng);
    OracleTree { parent, children, ids }
}

/// The asserted relations a fully known tree contributes: parent-child
/// dominance plus adjacent-sister precedence.
pub fn tree_skeleton(tree: &OracleTree) -> BTreeSet<Rel> {
    let mut rels = BTreeSet::new();
    for v in 0..tree.len() {
        for &c in &tree.children[v] {
            rels.insert(Rel::dom(tree.ids[v], tree.ids[c]));
        }
        for pair in tree.children[v].windows(2) {
            rels.insert(Rel::prec(tree.ids[pair[0]], tree.ids[pair[1]]));
        }
    }
    rels
}

/// Ground-truth closed relation set of a tree, read off the structure
/// directly: dominance for every ancestor pair, precedence for every pair of
/// disjoint nodes ordered by their branches at the least common ancestor.
pub fn flatten_tree(tree: &OracleTree) -> BTreeSet<Rel> {
    let mut rels = BTreeSet::new();
    for a in 0..tree.len() {
        for d in 0..tree.len() {
            if tree.is_strict_ancestor(a, d) {
                rels.insert(Rel::dom(tree.ids[a], tree.ids[d]));
            }
        }
    }
    // prec(x,y) whenever some ancestor-or-self of x is an earlier sibling of
    // an ancestor-or-self of y.
    for v in 0..tree.len() {
        let sibs = &tree.children[v];
        for i in 0..sibs.len() {
            for j in (i + 1)..sibs.len() {
                for &x in &tree.subtree(sibs[i]) {
                    for &y in &tree.subtree(sibs[j]) {
                        rels.insert(Rel::prec(tree.ids[x], tree.ids[y]));
                    }
                }
            }
        }
    }
    rels
}

/// Build a description holding the tree's nodes and asserted skeleton.
/// Leaves listed in `placeholders` become empty phrasal nodes, remaining
/// leaves become terminals.
pub fn tree_description(tree: &OracleTree, placeholders: &BTreeSet<usize>) -> TreeDescription {
    let mut desc = TreeDescription::new();
    for v in 0..tree.len() {
        let node = if tree.children[v].is_empty() && !placeholders.contains(&v) {
            Node::terminal(format!("w{}", tree.ids[v]))
        } else {
            Node::phrasal("X")
        };
        desc = desc.with_node(tree.ids[v], node).unwrap();
    }
    desc.assert_relations(tree_skeleton(tree)).unwrap()
}

/// A random mid-parse state: a random tree where some leaves are unsaturated
/// placeholder sites and one non-site leaf is the most recent word. Returns
/// the tree, the assembled state, the site positions and the last-word
/// position.
pub fn random_parser_state(
    rng: &mut impl Rng,
) -> (OracleTree, ParserState, BTreeSet<usize>, usize) {
    let size = rng.gen_range(2..14);
    let tree = random_tree(rng, size);
    let leaves = tree.leaves();
    let mut sites: BTreeSet<usize> = leaves
        .iter()
        .copied()
        .filter(|_| rng.gen_bool(0.3))
        .collect();
    let word_leaves: Vec<usize> =
        leaves.iter().copied().filter(|v| !sites.contains(v)).collect();
    let last = match word_leaves.as_slice() {
        [] => {
            let v = *leaves.choose(rng).unwrap();
            sites.remove(&v);
            v
        }
        ls => *ls.choose(rng).unwrap(),
    };
    let desc = tree_description(&tree, &sites);
    let site_ids: Vec<NodeId> = sites.iter().map(|&v| tree.ids[v]).collect();
    let state = ParserState::from_parts(desc, &site_ids, Some(tree.ids[last]));
    (tree, state, sites, last)
}

/// Accessibility by definition, answered with tree walks: strict ancestors
/// of the last word whose subtree contains no unsaturated site.
pub fn brute_accessible(
    tree: &OracleTree,
    unsat_sites: &BTreeSet<usize>,
    last_word: usize,
) -> BTreeSet<NodeId> {
    (0..tree.len())
        .filter(|&n| tree.is_strict_ancestor(n, last_word))
        .filter(|&n| !unsat_sites.iter().any(|&s| tree.is_strict_ancestor(n, s)))
        .map(|n| tree.ids[n])
        .collect()
}

/// Context relations by definition: the parent edge plus adjacent-sister
/// precedence involving the node.
pub fn brute_local_relations(tree: &OracleTree, v: usize) -> BTreeSet<Rel> {
    let mut out = BTreeSet::new();
    if let Some(p) = tree.parent[v] {
        out.insert(Rel::dom(tree.ids[p], tree.ids[v]));
        let sibs = &tree.children[p];
        let pos = sibs.iter().position(|&c| c == v).unwrap();
        if pos > 0 {
            out.insert(Rel::prec(tree.ids[sibs[pos - 1]], tree.ids[v]));
        }
        if pos + 1 < sibs.len() {
            out.insert(Rel::prec(tree.ids[v], tree.ids[sibs[pos + 1]]));
        }
    }
    out
}
