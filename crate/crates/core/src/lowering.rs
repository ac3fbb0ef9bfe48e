//! Lowering: monotone re-attachment of already-built structure under a new
//! projection.
//!
//! When a word fits no open site, the parser may take an *accessible* node —
//! one on the right frontier with no unmet obligations below it — and assert
//! that it sits inside the new word's projection, while the projection takes
//! over the node's old attachment relations. Nothing is retracted: the old
//! dominance facts remain true, they just become less direct.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::attachment::{finish_merge, register_projection_sites, ParserState, Side, SiteState};
use crate::description::{Node, NodeId, Rel, RelKind, TreeDescription};
use crate::events::{LowerKind, ParseEvent, RejectReason};
use crate::features::Feature;
use crate::lexicon::{Language, Lexicon, SubtreeProjection};

/// Order in which accessible nodes are tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Deepest accessible node first (right-frontier bottom-up).
    BottomUp,
    /// Shallowest accessible node first.
    TopDown,
}

impl SearchStrategy {
    pub fn default_for(language: Language) -> SearchStrategy {
        match language {
            Language::English => SearchStrategy::BottomUp,
            Language::Japanese => SearchStrategy::TopDown,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SearchStrategy::BottomUp => "bottom-up",
            SearchStrategy::TopDown => "top-down",
        }
    }

    pub fn from_name(s: &str) -> Option<SearchStrategy> {
        match s {
            "bottom-up" | "bottom_up" => Some(SearchStrategy::BottomUp),
            "top-down" | "top_down" => Some(SearchStrategy::TopDown),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum LowerFailure {
    #[error("projection has no left site to host a lowered node")]
    NoLeftSite,
    #[error("projection cannot head a relative clause")]
    NotApplicable,
    #[error("no lowering candidate survived ({} rejected)", rejects.len())]
    Exhausted { rejects: Vec<(NodeId, RejectReason)> },
}

fn dominator_count(desc: &TreeDescription, n: NodeId) -> usize {
    desc.closure()
        .iter()
        .filter(|r| r.kind == RelKind::Dom && r.b == n)
        .count()
}

/// Nodes eligible for lowering: they dominate the last word (right frontier)
/// and dominate no unsaturated site (no pending obligation would be buried).
/// Ordered deepest-first or shallowest-first per the strategy; depth ties are
/// broken by node id, so the order is total and deterministic even on states
/// that are not single trees.
pub fn accessible_nodes(state: &ParserState, strategy: SearchStrategy) -> Vec<NodeId> {
    let last = match state.last_word {
        Some(w) => w,
        None => return Vec::new(),
    };
    let unsat = state.unsaturated_site_nodes();
    let mut nodes: Vec<NodeId> = state
        .description
        .nodes()
        .map(|(id, _)| id)
        .filter(|&n| state.description.dominates(n, last))
        .filter(|&n| !unsat.iter().any(|&s| state.description.dominates(n, s)))
        .collect();
    nodes.sort_by_key(|&n| {
        let depth = dominator_count(&state.description, n);
        let depth_key = match strategy {
            SearchStrategy::BottomUp => usize::MAX - depth,
            SearchStrategy::TopDown => depth,
        };
        (depth_key, n)
    });
    nodes
}

struct LowerCommit {
    state: ParserState,
    root: NodeId,
    substituted: Vec<Rel>,
    kind: LowerKind,
    nodes_added: Vec<(NodeId, Node)>,
    relations_added: Vec<Rel>,
}

/// Substitute `from` with `to` in a relation set.
fn substitute(rels: &BTreeSet<Rel>, from: NodeId, to: NodeId) -> Vec<Rel> {
    rels.iter()
        .map(|r| {
            let mut r = *r;
            if r.a == from {
                r.a = to;
            }
            if r.b == from {
                r.b = to;
            }
            r
        })
        .collect()
}

/// The lexical head governing `target`: the terminal under the zero-level
/// child of `target`'s asserted parent.
fn governor_head(desc: &TreeDescription, governor: NodeId) -> Option<String> {
    for r in desc.asserted() {
        if r.kind != RelKind::Dom || r.a != governor {
            continue;
        }
        let child = r.b;
        let is_head = desc.node(child).is_some_and(|n| n.category.is_lexical_head());
        if !is_head {
            continue;
        }
        for t in desc.asserted() {
            if t.kind == RelKind::Dom && t.a == child {
                if let Some(lex) = desc.node(t.b).and_then(|n| n.lexeme.clone()) {
                    return Some(lex);
                }
            }
        }
    }
    None
}

fn try_lower(
    state: &ParserState,
    proj: &SubtreeProjection,
    target: NodeId,
    lexicon: &Lexicon,
) -> Result<LowerCommit, RejectReason> {
    let site = proj.left_site.clone().expect("caller checked for a left site");
    let target_cat = state
        .description
        .node(target)
        .expect("candidate exists")
        .category
        .clone();
    if site.category != target_cat {
        return Err(RejectReason::CategoryMismatch {
            expected: site.category.label().to_string(),
            found: target_cat.label().to_string(),
        });
    }
    let root_cat = proj.root_category().clone();

    // Licensing. Same-category lowering is X-bar adjunction and must be
    // sanctioned by the grammar's adjunction table; otherwise the governing
    // head above the target must license the projection's root category.
    let kind = if root_cat == target_cat {
        if !lexicon.allows_adjunction(&target_cat, &root_cat) {
            return Err(RejectReason::NotLicensed { governor: None });
        }
        LowerKind::Adjunct
    } else {
        let governor = state
            .description
            .asserted()
            .iter()
            .find(|r| r.kind == RelKind::Dom && r.b == target)
            .map(|r| r.a);
        let g = match governor {
            Some(g) => g,
            None => return Err(RejectReason::NotLicensed { governor: None }),
        };
        let head = governor_head(&state.description, g);
        let licensed = head
            .as_deref()
            .is_some_and(|lex| lexicon.licenses(lex, &root_cat));
        if !licensed {
            return Err(RejectReason::NotLicensed { governor: Some(g) });
        }
        LowerKind::Argument
    };

    for (f, required) in &site.demands {
        if let Err(e) = state
            .description
            .node(target)
            .expect("candidate exists")
            .features
            .satisfies_demand(*f, required)
        {
            return Err(RejectReason::Inconsistent { detail: e.to_string() });
        }
    }

    // The substituted relation set M: the target's context relations,
    // re-targeted at the projection root.
    let local = state.description.local_relations(target);
    let substituted = substitute(&local, target, proj.root);

    let mut proj = proj.clone();
    proj.rename(site.node, target);
    let mut next = state.clone();
    next.description = crate::attachment::merge_projection(&next.description, &proj, target)
        .map_err(|e| RejectReason::Inconsistent { detail: e.to_string() })?;
    next.description = next
        .description
        .assert_relations(substituted.iter().copied())
        .map_err(|e| RejectReason::Inconsistent { detail: e.to_string() })?;
    next.sites.push(SiteState {
        site: proj.left_site.clone().expect("left site survives rename"),
        side: Side::Left,
        saturated: true,
    });
    register_projection_sites(&mut next, &proj, None, false);
    finish_merge(&mut next, &proj, proj.root)
        .map_err(|e| RejectReason::Inconsistent { detail: e.to_string() })?;

    let nodes_added: Vec<_> =
        proj.nodes.iter().filter(|(id, _)| *id != target).cloned().collect();
    let mut relations_added = proj.rels.clone();
    relations_added.extend(substituted.iter().copied());
    Ok(LowerCommit {
        state: next,
        root: proj.root,
        substituted,
        kind,
        nodes_added,
        relations_added,
    })
}

/// Lower `target` under the projection directly (no search). Logs the event
/// with rank 0.
pub fn tree_lower(
    state: ParserState,
    proj: SubtreeProjection,
    target: NodeId,
    lexicon: &Lexicon,
) -> Result<ParserState, LowerFailure> {
    if proj.left_site.is_none() {
        return Err(LowerFailure::NoLeftSite);
    }
    match try_lower(&state, &proj, target, lexicon) {
        Ok(commit) => Ok(commit_lower(commit, Vec::new(), target, 0, None, Vec::new(), Vec::new())),
        Err(reason) => Err(LowerFailure::Exhausted { rejects: vec![(target, reason)] }),
    }
}

#[allow(clippy::too_many_arguments)]
fn commit_lower(
    commit: LowerCommit,
    rejects: Vec<(NodeId, RejectReason)>,
    target: NodeId,
    rank: usize,
    gap: Option<NodeId>,
    empties: Vec<NodeId>,
    expelled: Vec<NodeId>,
) -> ParserState {
    let mut state = commit.state;
    for (node, reason) in rejects {
        state.events.push(ParseEvent::LowerReject { node, reason });
    }
    state.events.push(ParseEvent::Lower {
        node: target,
        root: commit.root,
        substituted: commit.substituted,
        kind: commit.kind,
        rank,
        gap,
        empties,
        expelled,
        nodes_added: commit.nodes_added,
        relations_added: commit.relations_added,
    });
    state
}

/// Walk accessible nodes in strategy order and lower the first that fits,
/// logging a reject for every candidate passed over. `peek_gender` carries
/// the gender requirement of an upcoming reflexive, if the next word is one:
/// the lowered node is about to become the new clause's subject, so a
/// candidate that could never bind the reflexive is rejected here rather
/// than one word too late.
pub fn select_and_lower(
    state: ParserState,
    proj: SubtreeProjection,
    lexicon: &Lexicon,
    strategy: SearchStrategy,
    peek_gender: Option<&str>,
) -> Result<ParserState, LowerFailure> {
    if proj.left_site.is_none() {
        return Err(LowerFailure::NoLeftSite);
    }
    let candidates = accessible_nodes(&state, strategy);
    let mut rejects: Vec<(NodeId, RejectReason)> = Vec::new();
    for (rank, target) in candidates.iter().copied().enumerate() {
        if let Some(g) = peek_gender {
            let target_is_np = state
                .description
                .node(target)
                .is_some_and(|n| n.category.label() == "NP");
            if target_is_np
                && !crate::attachment::subject_gender_compatible(&state.description, target, g)
            {
                rejects.push((
                    target,
                    RejectReason::Binding { required_gender: g.to_string() },
                ));
                continue;
            }
        }
        match try_lower(&state, &proj, target, lexicon) {
            Ok(commit) => {
                return Ok(commit_lower(commit, rejects, target, rank, None, Vec::new(), Vec::new()))
            }
            Err(reason) => rejects.push((target, reason)),
        }
    }
    Err(LowerFailure::Exhausted { rejects })
}

/// All verb (zero-level V) nodes at or below `n`.
fn verbs_below(desc: &TreeDescription, n: NodeId) -> Vec<NodeId> {
    desc.nodes()
        .filter(|(_, nd)| nd.category.label() == "V")
        .map(|(id, _)| id)
        .filter(|&v| v == n || desc.dominates(n, v))
        .collect()
}

/// Relative-clause lowering for head-final languages. The projection is a
/// preverbal noun phrase whose `rcl_host` node will contain the head noun;
/// an accessible stretch of the current clause is reconstructed as a
/// relative clause inside it:
///
/// * the candidate must contain exactly one verb, whose case frame defines
///   the argument roles;
/// * roles already case-marked below the candidate stay inside the clause;
/// * one absent role (highest in frame order, so subjects win) becomes the
///   gap bound to the head noun; remaining absent roles surface as dropped
///   (empty) pronouns;
/// * case-marked material of the old clause *not* below the candidate is
///   expelled: it stays in the matrix clause and is reported in the event.
pub fn relative_clause_lower(
    state: ParserState,
    proj: SubtreeProjection,
    lexicon: &Lexicon,
    strategy: SearchStrategy,
) -> Result<ParserState, LowerFailure> {
    let host = proj.rcl_host.ok_or(LowerFailure::NotApplicable)?;
    let candidates = accessible_nodes(&state, strategy);
    let mut rejects: Vec<(NodeId, RejectReason)> = Vec::new();

    'candidates: for (rank, target) in candidates.iter().copied().enumerate() {
        let desc = &state.description;
        let verbs = verbs_below(desc, target);
        let verb = match verbs.as_slice() {
            [v] => *v,
            [] => {
                rejects.push((
                    target,
                    RejectReason::CaseFrame { detail: "no verb below candidate".to_string() },
                ));
                continue;
            }
            _ => {
                rejects.push((
                    target,
                    RejectReason::CaseFrame { detail: "multiple verbs below candidate".to_string() },
                ));
                continue;
            }
        };
        let verb_lexeme = desc
            .asserted()
            .iter()
            .find(|r| r.kind == RelKind::Dom && r.a == verb)
            .and_then(|r| desc.node(r.b))
            .and_then(|n| n.lexeme.clone());
        let frame = verb_lexeme
            .as_deref()
            .and_then(|lex| lexicon.lookup(lex).ok())
            .and_then(|entries| entries.iter().find_map(|e| e.case_frame.clone()));
        let frame = match frame {
            Some(f) => f,
            None => {
                rejects.push((
                    target,
                    RejectReason::CaseFrame { detail: "verb has no case frame".to_string() },
                ));
                continue;
            }
        };
        let roles_below: BTreeSet<String> = desc
            .nodes()
            .filter(|(id, nd)| {
                nd.features.case.is_some()
                    && nd.category.label() == "NP"
                    && (*id == target || desc.dominates(target, *id))
            })
            .map(|(_, nd)| nd.features.case.clone().unwrap())
            .collect();
        let absent: Vec<&String> =
            frame.roles.iter().filter(|r| !roles_below.contains(*r)).collect();
        if absent.is_empty() {
            rejects.push((
                target,
                RejectReason::CaseFrame {
                    detail: format!("every role of [{frame}] is already filled below"),
                },
            ));
            continue;
        }
        let gap_role = absent[0].clone();

        // Expelled material, measured before any mutation: overt case-marked
        // clause-mates of the old clause that do not travel with the target.
        let expelled: Vec<NodeId> = match crate::attachment::minimal_clause_ancestor(desc, target)
        {
            Some(old_clause) => crate::attachment::overt_case_mates(desc, old_clause)
                .into_iter()
                .map(|(id, _)| id)
                .filter(|&x| x != target && !desc.dominates(target, x))
                .collect(),
            None => Vec::new(),
        };

        let mut next = state.clone();
        let alloc = |next: &mut ParserState| {
            let id = NodeId(next.next_id);
            next.next_id += 1;
            id
        };

        let mut nodes_added: Vec<(NodeId, Node)> = Vec::new();
        let mut rels: Vec<Rel> = Vec::new();

        let target_is_verb = desc.node(target).is_some_and(|n| n.category.label() == "V");
        let s_rel = alloc(&mut next);
        nodes_added.push((s_rel, Node::phrasal("S")));
        let inner_top = if target_is_verb {
            let vp_rel = alloc(&mut next);
            nodes_added.push((vp_rel, Node::phrasal("VP")));
            rels.push(Rel::dom(s_rel, vp_rel));
            rels.push(Rel::dom(vp_rel, target));
            vp_rel
        } else {
            rels.push(Rel::dom(s_rel, target));
            target
        };

        let mut gap = None;
        let mut empties = Vec::new();
        for role in &absent {
            let e = alloc(&mut next);
            let mut node = Node::empty("NP");
            node.features.set(Feature::Case, (*role).clone());
            if **role == gap_role && gap.is_none() {
                node.antecedent = Some(host);
                gap = Some(e);
            } else {
                empties.push(e);
            }
            if **role == frame.roles[0] {
                // Highest role sits at the clause level, above the rest.
                rels.push(Rel::dom(s_rel, e));
                rels.push(Rel::prec(e, inner_top));
            } else {
                rels.push(Rel::dom(inner_top, e));
                rels.push(Rel::prec(e, target));
            }
            nodes_added.push((e, node));
        }

        // Head attachment: the relative clause precedes the head noun inside
        // its phrase, and the projection takes over the target's context.
        rels.push(Rel::dom(host, s_rel));
        rels.push(Rel::prec(s_rel, proj.lexslot));
        let substituted = substitute(&desc.local_relations(target), target, proj.root);

        let mut candidate_desc = next.description.clone();
        for (id, node) in proj.nodes.iter().chain(nodes_added.iter()) {
            candidate_desc = match candidate_desc.with_node(*id, node.clone()) {
                Ok(d) => d,
                Err(e) => {
                    rejects.push((target, RejectReason::Inconsistent { detail: e.to_string() }));
                    continue 'candidates;
                }
            };
        }
        let all_rels: Vec<Rel> = proj
            .rels
            .iter()
            .chain(rels.iter())
            .chain(substituted.iter())
            .copied()
            .collect();
        candidate_desc = match candidate_desc.assert_relations(all_rels.iter().copied()) {
            Ok(d) => d,
            Err(e) => {
                rejects.push((target, RejectReason::Inconsistent { detail: e.to_string() }));
                continue;
            }
        };
        next.description = candidate_desc;
        register_projection_sites(&mut next, &proj, None, true);
        if let Err(e) = finish_merge(&mut next, &proj, proj.root) {
            rejects.push((target, RejectReason::Inconsistent { detail: e.to_string() }));
            continue;
        }

        let mut all_nodes_added = proj.nodes.clone();
        all_nodes_added.extend(nodes_added);
        let commit = LowerCommit {
            state: next,
            root: proj.root,
            substituted,
            kind: LowerKind::RelativeClause,
            nodes_added: all_nodes_added,
            relations_added: all_rels,
        };
        return Ok(commit_lower(commit, rejects, target, rank, gap, empties, expelled));
    }
    Err(LowerFailure::Exhausted { rejects })
}
