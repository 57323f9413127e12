use std::collections::VecDeque;

use fixedbitset::FixedBitSet;

use crate::antichain::{Antichain, Poset};
use crate::universe::TypeId;

use super::{flow_symbolic, EdgeId, FlowMemo, LabelId, MatchTable, NodeId, SyntaxGraph, Typing};

/// Order in which waiting edges are taken.
pub enum Schedule<'a> {
    /// First in, first out.
    Fifo,
    /// Called with the queue length, returns the position to take next
    /// (reduced modulo the length).
    Custom(&'a mut dyn FnMut(usize) -> usize),
}

/// One flow application.
#[derive(Clone, Debug)]
pub struct TraceEvent {
    pub edge: EdgeId,
    pub from: NodeId,
    pub to: NodeId,
    pub label: LabelId,
    pub before: (Antichain, Antichain),
    pub after: (Antichain, Antichain),
}

pub struct RunOptions<'a> {
    pub schedule: Schedule<'a>,
    pub trace: Option<&'a mut dyn FnMut(&TraceEvent)>,
}

impl Default for RunOptions<'_> {
    fn default() -> Self {
        RunOptions {
            schedule: Schedule::Fifo,
            trace: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub typing: Typing,
    /// Flow applications performed.
    pub steps: usize,
    /// Upper bound on `steps` for this graph: |E| + Σ |T|·deg(n).
    pub bound: usize,
}

/// Worklist typing seeded with every edge of `g`.
pub fn run_typing(
    g: &SyntaxGraph,
    table: &MatchTable,
    poset: &Poset,
    memo: &FlowMemo,
    initial: Typing,
    opts: RunOptions<'_>,
) -> RunResult {
    let all: Vec<EdgeId> = g.edges().map(|(e, _)| e).collect();
    run_typing_from(g, table, poset, memo, initial, &all, opts)
}

/// Worklist typing seeded with `seeds` only; used to continue a run after
/// some nodes were narrowed from outside.
pub fn run_typing_from(
    g: &SyntaxGraph,
    table: &MatchTable,
    poset: &Poset,
    memo: &FlowMemo,
    initial: Typing,
    seeds: &[EdgeId],
    mut opts: RunOptions<'_>,
) -> RunResult {
    let mut typing = initial;
    let mut queue: VecDeque<EdgeId> = VecDeque::new();
    let mut waiting = FixedBitSet::with_capacity(g.edge_count());
    for &e in seeds {
        if !waiting.put(e.0 as usize) {
            queue.push_back(e);
        }
    }
    let bound = g.edge_count()
        + (0..g.node_count())
            .map(|n| poset.len() * g.degree(NodeId(n as u32)))
            .sum::<usize>();
    let mut steps = 0;

    while !queue.is_empty() {
        let e = match &mut opts.schedule {
            Schedule::Fifo => queue.pop_front().unwrap(),
            Schedule::Custom(pick) => {
                let i = pick(queue.len()) % queue.len();
                queue.remove(i).unwrap()
            }
        };
        waiting.set(e.0 as usize, false);
        steps += 1;
        let edge = g.edge(e);
        let a = typing.get(edge.from).clone();
        let b = typing.get(edge.to).clone();
        let (a2, b2) = flow_symbolic(memo, edge.label, table.get(edge.label), &a, &b, poset);
        if let Some(trace) = opts.trace.as_mut() {
            trace(&TraceEvent {
                edge: e,
                from: edge.from,
                to: edge.to,
                label: edge.label,
                before: (a.clone(), b.clone()),
                after: (a2.clone(), b2.clone()),
            });
        }
        let mut changed = Vec::new();
        if a2 != a {
            typing.set(edge.from, a2);
            changed.push(edge.from);
        }
        if b2 != b {
            typing.set(edge.to, b2);
            changed.push(edge.to);
        }
        for n in changed {
            for &e2 in g.incident(n) {
                if !waiting.put(e2.0 as usize) {
                    queue.push_back(e2);
                }
            }
        }
    }
    debug_assert!(steps <= bound.max(seeds.len()));
    RunResult {
        typing,
        steps,
        bound,
    }
}

/// Outcome of a finished run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// All singletons: the simple typing δ.
    Valid(Vec<TypeId>),
    /// Nodes left with more than one candidate.
    Ambiguous(Vec<NodeId>),
    /// Nodes left with no candidate; reported before ambiguity.
    Inconsistent(Vec<NodeId>),
}

pub fn classify_typing(typing: &Typing) -> Classification {
    let nodes = || (0..typing.assignment.len() as u32).map(NodeId);
    let empty: Vec<NodeId> = nodes().filter(|&n| typing.get(n).is_empty()).collect();
    if !empty.is_empty() {
        return Classification::Inconsistent(empty);
    }
    let wide: Vec<NodeId> = nodes().filter(|&n| typing.get(n).len() > 1).collect();
    if !wide.is_empty() {
        return Classification::Ambiguous(wide);
    }
    Classification::Valid(
        typing
            .assignment
            .iter()
            .map(|a| a.as_singleton().unwrap())
            .collect(),
    )
}
