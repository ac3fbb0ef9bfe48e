//! Parser state and the two attachment operations.
//!
//! Both operations work the same way: instantiate a projection, identify one
//! of its nodes with one already in the description (keeping the older id),
//! assert the projection's relations, then re-run feature percolation. Every
//! step happens on a candidate state passed in by value; any failure simply
//! drops the candidate, so the caller's state is never half-updated.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::description::{Category, ConsistencyError, NodeId, TreeDescription};
use crate::events::ParseEvent;
use crate::features::{Feature, FeatureError};
use crate::lexicon::{CaseFrame, Language, ProjSite, SubtreeProjection};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A site's whereabouts in the state. The `sites` vector is kept in
/// left-to-right surface order: a projection merged into a site contributes
/// its own sites at that position, a left-attached or lowered projection
/// contributes them at the end.
#[derive(Debug, Clone)]
pub struct SiteState {
    pub site: ProjSite,
    pub side: Side,
    pub saturated: bool,
}

#[derive(Debug, Clone, Error)]
pub enum AttachFailure {
    #[error("no open attachment site")]
    NoOpenSites,
    #[error("first open site (node {site}) wants {expected}, projection is {found}")]
    SiteCategoryMismatch { site: NodeId, expected: Category, found: Category },
    #[error("projection has no left attachment site")]
    NoLeftSite,
    #[error("open site (node {site}) already expects a {category}; left attachment blocked")]
    OpenSiteMatches { site: NodeId, category: Category },
    #[error("left site wants {expected}, current root is {found}")]
    RootCategoryMismatch { expected: Category, found: Category },
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("reflexive at {reflexive} not bindable: {detail}")]
    BindingIncompatible { reflexive: NodeId, detail: String },
    #[error("case frame [{frame}] unsatisfied: missing {missing}")]
    CaseFrameUnsatisfied { frame: String, missing: String },
    #[error(transparent)]
    Inconsistent(#[from] ConsistencyError),
    #[error("description is empty; nothing to attach to")]
    EmptyDescription,
}

#[derive(Debug, Clone)]
pub struct ParserState {
    pub description: TreeDescription,
    pub sites: Vec<SiteState>,
    /// Feature conduits accumulated from all merged projections.
    pub head_edges: Vec<(NodeId, NodeId)>,
    pub agree_links: Vec<(NodeId, NodeId, Feature)>,
    /// Terminal node of the most recently integrated word.
    pub last_word: Option<NodeId>,
    pub next_id: u32,
    pub word_index: u32,
    pub language: Language,
    pub events: Vec<ParseEvent>,
}

impl ParserState {
    pub fn new(language: Language) -> Self {
        ParserState {
            description: TreeDescription::new(),
            sites: Vec::new(),
            head_edges: Vec::new(),
            agree_links: Vec::new(),
            last_word: None,
            next_id: 0,
            word_index: 0,
            language,
            events: Vec::new(),
        }
    }

    /// Assemble a state directly; used by tests and fuzzing to explore
    /// configurations the word-by-word driver would not produce.
    pub fn from_parts(
        description: TreeDescription,
        open_sites: &[NodeId],
        last_word: Option<NodeId>,
    ) -> Self {
        let next_id = description.nodes().map(|(id, _)| id.0 + 1).max().unwrap_or(0);
        let sites = open_sites
            .iter()
            .map(|&node| SiteState {
                site: ProjSite {
                    node,
                    category: description
                        .node(node)
                        .map(|n| n.category.clone())
                        .unwrap_or_else(|| Category::new("X")),
                    demands: Vec::new(),
                },
                side: Side::Right,
                saturated: false,
            })
            .collect();
        ParserState {
            description,
            sites,
            head_edges: Vec::new(),
            agree_links: Vec::new(),
            last_word,
            next_id,
            word_index: 0,
            language: Language::English,
            events: Vec::new(),
        }
    }

    pub fn open_right_site_indices(&self) -> Vec<usize> {
        self.sites
            .iter()
            .enumerate()
            .filter(|(_, s)| s.side == Side::Right && !s.saturated)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn unsaturated_site_nodes(&self) -> Vec<NodeId> {
        self.sites.iter().filter(|s| !s.saturated).map(|s| s.site.node).collect()
    }

    /// The unique undominated node. `None` before the first word.
    pub fn root(&self) -> Option<NodeId> {
        let roots = self.description.roots();
        debug_assert!(roots.len() <= 1, "description must stay rooted, got {roots:?}");
        roots.into_iter().next()
    }

    pub(crate) fn category_of(&self, id: NodeId) -> Category {
        self.description
            .node(id)
            .map(|n| n.category.clone())
            .expect("queried node exists")
    }
}

/// Run the head-percolation / agreement fixpoint over the whole state.
/// Conduits are monotone (features only ever become more specific), so the
/// loop terminates; a clash aborts the owning operation.
pub(crate) fn percolate(state: &mut ParserState) -> Result<(), FeatureError> {
    loop {
        let mut changed = false;
        for &(parent, child) in &state.head_edges {
            let child_fs = match state.description.node(child) {
                Some(n) => n.features.clone(),
                None => continue,
            };
            let parent_fs = match state.description.node(parent) {
                Some(n) => n.features.clone(),
                None => continue,
            };
            let merged = parent_fs.unify(&child_fs)?;
            if merged != parent_fs {
                state.description.update_node_features(parent, |n| n.features = merged);
                changed = true;
            }
        }
        for &(a, b, f) in &state.agree_links {
            let va = state.description.node(a).and_then(|n| n.features.get(f).map(String::from));
            let vb = state.description.node(b).and_then(|n| n.features.get(f).map(String::from));
            match (va, vb) {
                (Some(x), Some(y)) => {
                    if x != y {
                        return Err(FeatureError::Conflict { feature: f, left: x, right: y });
                    }
                }
                (Some(x), None) => {
                    state.description.update_node_features(b, |n| n.features.set(f, x));
                    changed = true;
                }
                (None, Some(y)) => {
                    state.description.update_node_features(a, |n| n.features.set(f, y));
                    changed = true;
                }
                (None, None) => {}
            }
        }
        if !changed {
            return Ok(());
        }
    }
}

/// Deepest clause-category ancestor of `n`, if any.
pub(crate) fn minimal_clause_ancestor(desc: &TreeDescription, n: NodeId) -> Option<NodeId> {
    let clauses: Vec<NodeId> = desc
        .nodes()
        .filter(|(_, nd)| nd.category.is_clause())
        .map(|(id, _)| id)
        .filter(|&c| desc.dominates(c, n))
        .collect();
    clauses
        .iter()
        .copied()
        .find(|&c| !clauses.iter().any(|&other| other != c && desc.dominates(c, other)))
}

/// Case-marked noun phrases local to `clause`: dominated by it but not
/// buried in a deeper clause. Only NP nodes count — a case particle carries
/// the same value as the phrase it marks and must not be double-counted.
pub(crate) fn overt_case_mates(desc: &TreeDescription, clause: NodeId) -> Vec<(NodeId, String)> {
    desc.nodes()
        .filter(|(id, nd)| {
            nd.features.case.is_some()
                && desc.dominates(clause, *id)
                && nd.category.label() == "NP"
        })
        .filter(|(id, _)| {
            !desc.nodes().any(|(s, snd)| {
                snd.category.is_clause()
                    && s != clause
                    && desc.dominates(clause, s)
                    && desc.dominates(s, *id)
            })
        })
        .map(|(id, nd)| (id, nd.features.case.clone().unwrap()))
        .collect()
}

fn check_case_frame(
    state: &ParserState,
    verb: NodeId,
    frame: &CaseFrame,
) -> Result<(), AttachFailure> {
    let clause = minimal_clause_ancestor(&state.description, verb);
    let present: BTreeSet<String> = match clause {
        Some(c) => overt_case_mates(&state.description, c).into_iter().map(|(_, v)| v).collect(),
        None => BTreeSet::new(),
    };
    let missing: Vec<&str> = frame
        .roles
        .iter()
        .filter(|r| !present.contains(*r))
        .map(|r| r.as_str())
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(AttachFailure::CaseFrameUnsatisfied {
            frame: frame.to_string(),
            missing: missing.join(","),
        })
    }
}

/// Gender-compatibility of a clause subject with a reflexive requiring
/// `required`. Unset gender is compatible (nothing yet contradicts it).
pub(crate) fn subject_gender_compatible(
    desc: &TreeDescription,
    subject: NodeId,
    required: &str,
) -> bool {
    match desc.node(subject).and_then(|n| n.features.gender.as_deref()) {
        None => true,
        Some(g) => g == required,
    }
}

/// The subject of `clause`: its first NP child in precedence order.
pub(crate) fn clause_subject(desc: &TreeDescription, clause: NodeId) -> Option<NodeId> {
    desc.immediate_children(clause)
        .into_iter()
        .find(|&c| desc.node(c).is_some_and(|n| n.category.label() == "NP"))
}

fn check_binding(state: &ParserState, reflexive: NodeId) -> Result<(), AttachFailure> {
    let required = match state
        .description
        .node(reflexive)
        .and_then(|n| n.features.gender.clone())
    {
        Some(g) => g,
        None => return Ok(()),
    };
    let clause = minimal_clause_ancestor(&state.description, reflexive).ok_or(
        AttachFailure::BindingIncompatible {
            reflexive,
            detail: "no clause to bind in".to_string(),
        },
    )?;
    let subject =
        clause_subject(&state.description, clause).ok_or(AttachFailure::BindingIncompatible {
            reflexive,
            detail: "clause has no subject".to_string(),
        })?;
    if subject_gender_compatible(&state.description, subject, &required) {
        Ok(())
    } else {
        Err(AttachFailure::BindingIncompatible {
            reflexive,
            detail: format!("subject {subject} is not {required}"),
        })
    }
}

/// Merge `proj` (renamed so `keep` stands for `absorbed_from_proj`) into the
/// description: add the new nodes, unify features on the kept node, assert
/// the projection's relations.
pub(crate) fn merge_projection(
    desc: &TreeDescription,
    proj: &SubtreeProjection,
    keep: NodeId,
) -> Result<TreeDescription, AttachFailure> {
    let mut next = desc.clone();
    let mut kept_features = None;
    for (id, node) in &proj.nodes {
        if *id == keep {
            let existing = next.node(keep).expect("merge target exists in description");
            kept_features = Some(existing.features.unify(&node.features)?);
        } else {
            next = next.with_node(*id, node.clone())?;
        }
    }
    if let Some(fs) = kept_features {
        next.update_node_features(keep, |n| n.features = fs);
    }
    Ok(next.assert_relations(proj.rels.iter().copied())?)
}

/// Route each demand on `site` either onto the projection's declared forward
/// target (the obligation travels down to whoever fills that site) or check
/// it against the projection root right now.
fn route_demands(site: &ProjSite, proj: &mut SubtreeProjection) -> Result<(), AttachFailure> {
    for (f, required) in &site.demands {
        if let Some((_, target)) = proj.forwards.iter().find(|(pf, _)| pf == f) {
            let target = *target;
            if let Some(s) = proj
                .right_sites
                .iter_mut()
                .chain(proj.left_site.iter_mut())
                .find(|s| s.node == target)
            {
                s.demands.push((*f, required.clone()));
                continue;
            }
        }
        let root = proj
            .node(proj.root)
            .expect("projection root is one of its nodes");
        root.features.satisfies_demand(*f, required)?;
    }
    Ok(())
}

pub(crate) fn register_projection_sites(
    state: &mut ParserState,
    proj: &SubtreeProjection,
    at: Option<usize>,
    include_left: bool,
) {
    let mut new_sites: Vec<SiteState> = Vec::new();
    if include_left {
        if let Some(ls) = &proj.left_site {
            new_sites.push(SiteState { site: ls.clone(), side: Side::Left, saturated: false });
        }
    }
    for rs in &proj.right_sites {
        new_sites.push(SiteState { site: rs.clone(), side: Side::Right, saturated: false });
    }
    match at {
        // The projection's material sits where the filled site was.
        Some(idx) => {
            let mut tail = state.sites.split_off(idx + 1);
            state.sites.append(&mut new_sites);
            state.sites.append(&mut tail);
        }
        None => state.sites.append(&mut new_sites),
    }
    state.head_edges.extend(proj.head_edges.iter().copied());
    state.agree_links.extend(proj.agree_links.iter().copied());
}

/// Post-merge checks shared by all operations: feature percolation, then the
/// lexical checks that need the merged structure in place (reflexive binding
/// and case frames).
pub(crate) fn finish_merge(
    state: &mut ParserState,
    proj: &SubtreeProjection,
    merged_root: NodeId,
) -> Result<(), AttachFailure> {
    percolate(state)?;
    let reflexive = state
        .description
        .node(merged_root)
        .is_some_and(|n| n.features.reflexive);
    if reflexive {
        check_binding(state, merged_root)?;
    }
    if let Some(frame) = &proj.case_frame {
        check_case_frame(state, proj.lexslot, frame)?;
    }
    state.last_word = Some(proj.terminal);
    Ok(())
}

/// Attach the projection into the leftmost open right site. Only the first
/// open site is ever tried: skipping a site would leave an obligation to the
/// left of new material, which the monotone order of assertions forbids.
pub fn right_attach(
    mut state: ParserState,
    mut proj: SubtreeProjection,
) -> Result<ParserState, AttachFailure> {
    let idx = *state
        .open_right_site_indices()
        .first()
        .ok_or(AttachFailure::NoOpenSites)?;
    let site = state.sites[idx].site.clone();
    let found = proj.root_category().clone();
    if site.category != found {
        return Err(AttachFailure::SiteCategoryMismatch {
            site: site.node,
            expected: site.category.clone(),
            found,
        });
    }
    route_demands(&site, &mut proj)?;
    let absorbed = proj.root;
    proj.rename(proj.root, site.node);
    state.description = merge_projection(&state.description, &proj, site.node)?;
    state.sites[idx].saturated = true;
    register_projection_sites(&mut state, &proj, Some(idx), true);
    finish_merge(&mut state, &proj, site.node)?;
    let nodes_added: Vec<_> =
        proj.nodes.iter().filter(|(id, _)| *id != site.node).cloned().collect();
    state.events.push(ParseEvent::RightAttach {
        site: site.node,
        absorbed,
        nodes_added,
        relations_added: proj.rels.clone(),
    });
    Ok(state)
}

/// Attach the projection above the current root: the projection's left site
/// merges with the root, everything previously built becomes its subtree. On
/// an empty description this degenerates to adopting the projection as-is.
///
/// When open right sites remain, attaching on the left is only permitted if
/// none of them matches the projection's root category — if one does, the
/// projection belongs in that site's position and wrapping the root instead
/// would steal its filler.
pub fn left_attach(
    mut state: ParserState,
    proj: SubtreeProjection,
) -> Result<ParserState, AttachFailure> {
    if state.description.node_count() == 0 {
        let mut desc = TreeDescription::new();
        for (id, node) in &proj.nodes {
            desc = desc.with_node(*id, node.clone())?;
        }
        state.description = desc.assert_relations(proj.rels.iter().copied())?;
        register_projection_sites(&mut state, &proj, None, true);
        finish_merge(&mut state, &proj, proj.root)?;
        state.events.push(ParseEvent::LeftAttach {
            root: proj.root,
            merged: None,
            fallback: false,
            nodes_added: proj.nodes.clone(),
            relations_added: proj.rels.clone(),
        });
        return Ok(state);
    }

    let mut proj = proj;
    let site = proj.left_site.clone().ok_or(AttachFailure::NoLeftSite)?;
    let root_cat = proj.root_category().clone();
    let open = state.open_right_site_indices();
    if let Some(&i) = open
        .iter()
        .find(|&&i| state.sites[i].site.category == root_cat)
    {
        return Err(AttachFailure::OpenSiteMatches {
            site: state.sites[i].site.node,
            category: root_cat,
        });
    }
    let fallback = !open.is_empty();
    let old_root = state.root().ok_or(AttachFailure::EmptyDescription)?;
    let old_root_cat = state.category_of(old_root);
    if site.category != old_root_cat {
        return Err(AttachFailure::RootCategoryMismatch {
            expected: site.category.clone(),
            found: old_root_cat,
        });
    }
    for (f, required) in &site.demands {
        state
            .description
            .node(old_root)
            .expect("root exists")
            .features
            .satisfies_demand(*f, required)?;
    }
    let absorbed = site.node;
    proj.rename(site.node, old_root);
    state.description = merge_projection(&state.description, &proj, old_root)?;
    state.sites.push(SiteState {
        site: proj.left_site.clone().expect("left site survives rename"),
        side: Side::Left,
        saturated: true,
    });
    register_projection_sites(&mut state, &proj, None, false);
    finish_merge(&mut state, &proj, proj.root)?;
    let nodes_added: Vec<_> =
        proj.nodes.iter().filter(|(id, _)| *id != old_root).cloned().collect();
    state.events.push(ParseEvent::LeftAttach {
        root: proj.root,
        merged: Some((old_root, absorbed)),
        fallback,
        nodes_added,
        relations_added: proj.rels.clone(),
    });
    Ok(state)
}
