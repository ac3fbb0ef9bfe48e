//! The parse event log: one entry per committed operation, rejection, or
//! failure, carrying enough detail to replay the description and to explain
//! why alternatives were discarded.

use std::fmt;

use crate::attachment::AttachFailure;
use crate::description::{Node, NodeId, Rel, TreeDescription};

/// How a lowering re-attached old material.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerKind {
    /// The lowered node fills an argument position of the new projection
    /// (its category differs from the replacement root's).
    Argument,
    /// Same-category X-bar adjunction; structurally invisible to the
    /// classifier.
    Adjunct,
    /// Clausal reconstruction under a relative-clause head.
    RelativeClause,
}

impl fmt::Display for LowerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LowerKind::Argument => "argument",
            LowerKind::Adjunct => "adjunct",
            LowerKind::RelativeClause => "relative-clause",
        })
    }
}

/// Why a lowering candidate was passed over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    CategoryMismatch { expected: String, found: String },
    NotLicensed { governor: Option<NodeId> },
    Inconsistent { detail: String },
    Binding { required_gender: String },
    CaseFrame { detail: String },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::CategoryMismatch { expected, found } => {
                write!(f, "category-mismatch(wants {expected}, candidate is {found})")
            }
            RejectReason::NotLicensed { governor: Some(g) } => {
                write!(f, "not-licensed(by head of node {g})")
            }
            RejectReason::NotLicensed { governor: None } => write!(f, "not-licensed(no governor)"),
            RejectReason::Inconsistent { detail } => write!(f, "inconsistent({detail})"),
            RejectReason::Binding { required_gender } => {
                write!(f, "binding(upcoming reflexive needs {required_gender} subject)")
            }
            RejectReason::CaseFrame { detail } => write!(f, "case-frame({detail})"),
        }
    }
}

/// One failed way of integrating a word, recorded when the whole word fails.
#[derive(Debug, Clone)]
pub struct AttemptFailure {
    pub entry_index: usize,
    pub template: String,
    pub operation: &'static str,
    pub attach: Option<AttachFailure>,
    pub lower_rejects: Vec<(NodeId, RejectReason)>,
}

impl fmt::Display for AttemptFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "entry {} ({}) {}:", self.entry_index, self.template, self.operation)?;
        if let Some(a) = &self.attach {
            write!(f, " {a}")?;
        }
        for (node, reason) in &self.lower_rejects {
            write!(f, " candidate {node}: {reason};")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum ParseEvent {
    /// Marks the start of the numbered word's integration.
    Word { index: u32, surface: String },
    LeftAttach {
        root: NodeId,
        /// `(kept, absorbed)` when the old root merged with the projection's
        /// left site; `None` on the degenerate first word.
        merged: Option<(NodeId, NodeId)>,
        /// True when open right sites existed but none matched the
        /// projection's root category.
        fallback: bool,
        nodes_added: Vec<(NodeId, Node)>,
        relations_added: Vec<Rel>,
    },
    RightAttach {
        site: NodeId,
        absorbed: NodeId,
        nodes_added: Vec<(NodeId, Node)>,
        relations_added: Vec<Rel>,
    },
    Lower {
        /// The accessible node that was lowered.
        node: NodeId,
        /// Root of the projection it now sits under.
        root: NodeId,
        /// The substituted context relations: the lowered node's old local
        /// relations, re-targeted at the replacement.
        substituted: Vec<Rel>,
        kind: LowerKind,
        /// Position of the chosen candidate in strategy order (0 = first).
        rank: usize,
        /// Relativization gap bound to the head noun, if any.
        gap: Option<NodeId>,
        /// Phonetically empty arguments introduced alongside the gap.
        empties: Vec<NodeId>,
        /// Case-marked clause-mates left behind in the higher clause.
        expelled: Vec<NodeId>,
        nodes_added: Vec<(NodeId, Node)>,
        relations_added: Vec<Rel>,
    },
    LowerReject { node: NodeId, reason: RejectReason },
    Fail { index: u32, surface: String, reason: String, attempts: Vec<AttemptFailure> },
}

impl ParseEvent {
    pub fn is_lower(&self) -> bool {
        matches!(self, ParseEvent::Lower { .. })
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, ParseEvent::Fail { .. })
    }

    /// Nodes this event added, for replaying a parse from its log.
    pub fn nodes_added(&self) -> &[(NodeId, Node)] {
        match self {
            ParseEvent::LeftAttach { nodes_added, .. }
            | ParseEvent::RightAttach { nodes_added, .. }
            | ParseEvent::Lower { nodes_added, .. } => nodes_added,
            _ => &[],
        }
    }

    /// Relations this event asserted, for replaying a parse from its log.
    pub fn relations_added(&self) -> &[Rel] {
        match self {
            ParseEvent::LeftAttach { relations_added, .. }
            | ParseEvent::RightAttach { relations_added, .. }
            | ParseEvent::Lower { relations_added, .. } => relations_added,
            _ => &[],
        }
    }

    /// One-line rendering; node ids are shown with their categories when the
    /// description knows them.
    pub fn render(&self, desc: &TreeDescription) -> String {
        let name = |id: NodeId| match desc.node(id) {
            Some(n) => format!("{}#{}", n.category, id),
            None => format!("#{id}"),
        };
        match self {
            ParseEvent::Word { index, surface } => format!("WORD {index} {surface}"),
            ParseEvent::LeftAttach { root, merged, fallback, .. } => {
                let mut s = format!("LEFT-ATTACH root={}", name(*root));
                match merged {
                    None => s.push_str(" initial"),
                    Some((kept, absorbed)) => {
                        s.push_str(&format!(" merged={}<-#{absorbed}", name(*kept)));
                    }
                }
                if *fallback {
                    s.push_str(" fallback");
                }
                s
            }
            ParseEvent::RightAttach { site, absorbed, .. } => {
                format!("RIGHT-ATTACH site={} absorbed=#{absorbed}", name(*site))
            }
            ParseEvent::Lower { node, root, substituted, kind, rank, gap, empties, expelled, .. } => {
                let m = substituted
                    .iter()
                    .map(|r| format!("{}({},{})", r.kind, name(r.a), name(r.b)))
                    .collect::<Vec<_>>()
                    .join(", ");
                let mut s = format!(
                    "LOWER node={} root={} M={{{m}}} kind={kind} rank={rank}",
                    name(*node),
                    name(*root)
                );
                if let Some(g) = gap {
                    s.push_str(&format!(" gap={}", name(*g)));
                }
                if !empties.is_empty() {
                    let e: Vec<String> = empties.iter().map(|&n| name(n)).collect();
                    s.push_str(&format!(" empties=[{}]", e.join(", ")));
                }
                if !expelled.is_empty() {
                    let e: Vec<String> = expelled.iter().map(|&n| name(n)).collect();
                    s.push_str(&format!(" expelled=[{}]", e.join(", ")));
                }
                s
            }
            ParseEvent::LowerReject { node, reason } => {
                format!("LOWER-REJECT node={} reason={reason}", name(*node))
            }
            ParseEvent::Fail { index, surface, reason, attempts } => {
                let mut s = format!("FAIL word={surface} index={index} reason={reason}");
                for a in attempts {
                    s.push_str(&format!("\n  attempt: {a}"));
                }
                s
            }
        }
    }
}
