//! Graphviz and bracket rendering of tree descriptions.

use std::fmt::Write;

use crate::description::{NodeId, RelKind, TreeDescription};

#[derive(Debug, Clone, Copy, Default)]
pub struct DotOptions {
    /// Draw every relation in the transitive closure instead of the reduced
    /// (parent/adjacent-sibling) picture.
    pub full_closure: bool,
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Render the description as a `digraph`. Dominance edges are solid,
/// precedence edges dashed; empty nodes are drawn dotted with their
/// antecedent linked in grey.
pub fn dot_of(desc: &TreeDescription, opts: DotOptions) -> String {
    let mut out = String::from("digraph description {\n");
    out.push_str("  node [fontname=\"Helvetica\"];\n");
    out.push_str("  edge [fontname=\"Helvetica\"];\n");

    for (id, node) in desc.nodes() {
        // Escape the user-controlled parts before the graphviz line break
        // goes in, or its backslash would get doubled.
        let mut label = escape(node.category.label());
        if let Some(lex) = &node.lexeme {
            label.push_str("\\n");
            label.push_str(&escape(lex));
        }
        if node.empty {
            label.push_str("\\ne");
        }
        let shape = if node.is_terminal() { "plaintext" } else { "ellipse" };
        let style = if node.empty { ", style=dotted" } else { "" };
        let _ = writeln!(out, "  n{} [label=\"{}\", shape={}{}];", id.0, label, shape, style);
    }

    if opts.full_closure {
        for rel in desc.closure() {
            let (style, constraint) = match rel.kind {
                RelKind::Dom => ("solid", "true"),
                RelKind::Prec => ("dashed", "false"),
            };
            let _ = writeln!(
                out,
                "  n{} -> n{} [style={}, constraint={}];",
                rel.a.0, rel.b.0, style, constraint
            );
        }
    } else {
        // Reduced view: parent edges only, plus precedence between nodes
        // that are not transitively implied — i.e. the asserted ones whose
        // endpoints share a parent or are both roots.
        let ids: Vec<_> = desc.nodes().map(|(id, _)| id).collect();
        for &id in &ids {
            for child in desc.immediate_children(id) {
                let _ = writeln!(out, "  n{} -> n{} [style=solid];", id.0, child.0);
            }
        }
        let mut drawn = std::collections::BTreeSet::new();
        for &id in &ids {
            let children = desc.immediate_children(id);
            for pair in children.windows(2) {
                if desc.contains(crate::description::Rel::prec(pair[0], pair[1]))
                    && drawn.insert((pair[0], pair[1]))
                {
                    let _ = writeln!(
                        out,
                        "  n{} -> n{} [style=dashed, constraint=false];",
                        pair[0].0, pair[1].0
                    );
                }
            }
        }
    }

    for (id, node) in desc.nodes() {
        if let Some(ante) = node.antecedent {
            let _ = writeln!(
                out,
                "  n{} -> n{} [style=dotted, color=grey, constraint=false];",
                id.0, ante.0
            );
        }
    }

    out.push_str("}\n");
    out
}

const MAJOR: [&str; 4] = ["S", "NP", "VP", "V"];

fn bracket_node(desc: &TreeDescription, n: NodeId, out: &mut Vec<String>) {
    let node = desc.node(n).expect("bracketed node exists");
    if node.is_terminal() {
        if let Some(lex) = &node.lexeme {
            out.push(lex.clone());
        }
        return;
    }
    let children = desc.immediate_children(n);
    let label = node.category.label();
    // A head (V) is shown bracketed only next to phrasal sister material;
    // a whole phrase spelled by plain words collapses to its yield.
    let bracketed = MAJOR.contains(&label)
        && !(label == "V" && {
            let parent_children = parent_children(desc, n);
            parent_children.len() <= 1
        });
    let mut inner: Vec<String> = Vec::new();
    for c in children {
        bracket_node(desc, c, &mut inner);
    }
    if node.empty {
        inner.push("e".to_string());
    }
    if bracketed {
        out.push(format!("[{} {}]", label, inner.join(" ")));
    } else {
        out.extend(inner);
    }
}

fn parent_children(desc: &TreeDescription, n: NodeId) -> Vec<NodeId> {
    let parent = desc
        .nodes()
        .map(|(id, _)| id)
        .find(|&p| desc.immediate_children(p).contains(&n));
    match parent {
        Some(p) => desc.immediate_children(p),
        None => vec![n],
    }
}

/// Constituent bracketing restricted to the major categories S, NP, VP and
/// V; all bar-level and functional structure is flattened into the yield.
/// A phrase containing only words prints as `[NP the truth]`; a lone verb
/// under its phrase collapses into it (`[VP hurts]`).
pub fn bracket_of(desc: &TreeDescription) -> String {
    let mut out = Vec::new();
    for root in desc.roots() {
        bracket_node(desc, root, &mut out);
    }
    out.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::description::{Node, NodeId, Rel};

    /// S(0) -> NP(1 -> john(2)), VP(3 -> V(4 -> sees(5)), NP(6, empty,
    /// antecedent 1)).
    fn sample() -> TreeDescription {
        let mut desc = TreeDescription::new();
        let nodes = [
            (0, Node::phrasal("S")),
            (1, Node::phrasal("NP")),
            (2, Node::terminal("john")),
            (3, Node::phrasal("VP")),
            (4, Node::phrasal("V")),
            (5, Node::terminal("sees")),
            (6, {
                let mut n = Node::empty("NP");
                n.antecedent = Some(NodeId(1));
                n
            }),
        ];
        for (id, n) in nodes {
            desc = desc.with_node(NodeId(id), n).unwrap();
        }
        desc.assert_relations([
            Rel::dom(NodeId(0), NodeId(1)),
            Rel::dom(NodeId(1), NodeId(2)),
            Rel::dom(NodeId(0), NodeId(3)),
            Rel::dom(NodeId(3), NodeId(4)),
            Rel::dom(NodeId(4), NodeId(5)),
            Rel::dom(NodeId(3), NodeId(6)),
            Rel::prec(NodeId(1), NodeId(3)),
            Rel::prec(NodeId(4), NodeId(6)),
        ])
        .unwrap()
    }

    #[test]
    fn brackets_major_categories_only() {
        assert_eq!(bracket_of(&sample()), "[S [NP john] [VP [V sees] [NP e]]]");
    }

    #[test]
    fn lone_verb_collapses_into_its_phrase() {
        let mut desc = TreeDescription::new();
        for (id, n) in [
            (0, Node::phrasal("VP")),
            (1, Node::phrasal("V")),
            (2, Node::terminal("hurts")),
        ] {
            desc = desc.with_node(NodeId(id), n).unwrap();
        }
        let desc = desc
            .assert_relations([Rel::dom(NodeId(0), NodeId(1)), Rel::dom(NodeId(1), NodeId(2))])
            .unwrap();
        assert_eq!(bracket_of(&desc), "[VP hurts]");
    }

    #[test]
    fn dot_reduced_view_draws_tree_edges() {
        let dot = dot_of(&sample(), DotOptions::default());
        assert!(dot.starts_with("digraph description {"));
        assert!(dot.contains("n0 -> n1 [style=solid];"));
        assert!(dot.contains("n1 -> n3 [style=dashed, constraint=false];"));
        // Empty node: dotted, labelled e, antecedent in grey.
        assert!(dot.contains("n6 [label=\"NP\\ne\", shape=ellipse, style=dotted];"));
        assert!(dot.contains("n6 -> n1 [style=dotted, color=grey, constraint=false];"));
        // Terminals are plain text, never boxed.
        assert!(dot.contains("n2 [label=\"Lex\\njohn\", shape=plaintext];"));
        // Transitive edges stay out of the reduced view.
        assert!(!dot.contains("n0 -> n2"));
    }

    #[test]
    fn dot_full_closure_draws_derived_relations() {
        let dot = dot_of(&sample(), DotOptions { full_closure: true });
        assert!(dot.contains("n0 -> n2 [style=solid, constraint=true];"));
        // Inherited precedence: john precedes everything under the VP.
        assert!(dot.contains("n2 -> n6 [style=dashed, constraint=false];"));
    }
}
