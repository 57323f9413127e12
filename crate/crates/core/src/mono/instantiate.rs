use std::collections::{HashMap, HashSet};

use crate::antichain::{Antichain, Poset};
use crate::diag::{Diagnostic, Span, Stage};
use crate::frontend::ast::{Decl, FunctionDecl, Program};
use crate::frontend::{build_function_graph, CallRelations, FunctionGraph, GraphOptions, SlotKind};
use crate::typeflow::{
    classify_typing, run_typing, run_typing_from, Classification, EdgeId, FlowMemo, NodeId, RunOptions,
    TraceEvent, Typing,
};
use crate::universe::{FunctionSig, ProgramTypes, TypeId};

use super::mangle;

#[derive(Clone, Debug)]
pub struct MonoOptions {
    pub entry: String,
    pub promote: bool,
    /// Record one line per flow application.
    pub trace: bool,
}

impl Default for MonoOptions {
    fn default() -> Self {
        MonoOptions {
            entry: "main".to_string(),
            promote: false,
            trace: false,
        }
    }
}

/// A function body typed at one concrete signature.
#[derive(Clone, Debug)]
pub struct Instance {
    /// Index into [`ProgramTypes::sigs`].
    pub sig: usize,
    pub name: String,
    pub actuals: Vec<TypeId>,
    pub ret: TypeId,
    pub mangled: String,
    pub graph: FunctionGraph,
    /// Final type of every node.
    pub types: Vec<TypeId>,
    /// Callee instance per call site of `graph`.
    pub callees: Vec<usize>,
}

/// Instances reachable from the entry point, with caller → callee edges.
#[derive(Clone, Debug, Default)]
pub struct InstantiationTree {
    pub instances: Vec<Instance>,
    pub edges: Vec<(usize, usize, Span)>,
    /// Instances in completion order: callees before callers.
    pub post_order: Vec<usize>,
    pub root: usize,
    pub trace: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoError {
    pub span: Span,
    pub message: String,
}

impl MonoError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(Stage::Typing, self.span, self.message.clone())
    }
}

/// Types the entry point and, on demand, every function it reaches.
pub fn instantiate_program(
    program: &Program,
    pt: &ProgramTypes,
    rels: &CallRelations,
    poset: &Poset,
    opts: &MonoOptions,
) -> Result<InstantiationTree, MonoError> {
    let entry = pt
        .sigs
        .iter()
        .position(|s| s.name == opts.entry && s.has_body)
        .ok_or_else(|| MonoError {
            span: Span::synthetic(),
            message: format!("no definition of entry point `{}`", opts.entry),
        })?;
    let s = &pt.sigs[entry];
    let u = &pt.universe;
    let args: Vec<String> = s.params.iter().map(|&t| u.display(t)).collect();
    let frame = format!("{} {}({})", u.display(s.ret), s.name, args.join(", "));
    let mut m = Mono {
        program,
        pt,
        rels,
        poset,
        opts,
        memo: FlowMemo::new(),
        graphs: HashMap::new(),
        cache: HashMap::new(),
        stack: Vec::new(),
        frames: vec![frame],
        used: HashSet::new(),
        tree: InstantiationTree::default(),
    };
    let params = s.params.clone();
    let ret = s.ret;
    let (root, _, _) = m.instantiate(entry, params, ret)?;
    m.tree.root = root;
    Ok(m.tree)
}

type Key = (usize, Vec<TypeId>, TypeId);

struct Mono<'a> {
    program: &'a Program,
    pt: &'a ProgramTypes,
    rels: &'a CallRelations,
    poset: &'a Poset,
    opts: &'a MonoOptions,
    memo: FlowMemo,
    graphs: HashMap<usize, FunctionGraph>,
    cache: HashMap<Key, (usize, Vec<TypeId>, TypeId)>,
    stack: Vec<(Key, usize)>,
    frames: Vec<String>,
    used: HashSet<String>,
    tree: InstantiationTree,
}

impl Mono<'_> {
    fn decl(&self, sig: usize) -> &FunctionDecl {
        match &self.program.decls[self.pt.sigs[sig].decl] {
            Decl::Function(f) => f,
            _ => unreachable!("signature without function declaration"),
        }
    }

    fn error(&self, span: Span, detail: &str) -> MonoError {
        let mut message = String::from("type error after call sequence:\n");
        for (i, f) in self.frames.iter().enumerate() {
            message.push_str(&format!("{}: {}\n", i + 1, f));
        }
        message.push_str(detail);
        MonoError { span, message }
    }

    fn graph(&mut self, sig: usize) -> Result<FunctionGraph, MonoError> {
        if let Some(g) = self.graphs.get(&sig) {
            return Ok(g.clone());
        }
        let opts = GraphOptions {
            promote: self.opts.promote,
        };
        let g = build_function_graph(self.decl(sig), self.pt, self.rels, self.poset, &opts)
            .map_err(|e| self.error(e.span(), &e.to_string()))?;
        self.graphs.insert(sig, g.clone());
        Ok(g)
    }

    fn show(&self, a: &Antichain) -> String {
        let m: Vec<String> = a.members().iter().map(|&t| self.pt.universe.display(t)).collect();
        format!("{{{}}}", m.join(", "))
    }

    fn run(&mut self, g: &FunctionGraph, typing: Typing, seeds: Option<&[EdgeId]>, who: &str) -> Typing {
        let mut lines = Vec::new();
        let out = {
            let table = &self.rels.table;
            let mut cb = |e: &TraceEvent| {
                lines.push((e.edge, e.from, e.to, e.label, e.before.clone(), e.after.clone()));
            };
            let opts = RunOptions {
                schedule: crate::typeflow::Schedule::Fifo,
                trace: if self.opts.trace { Some(&mut cb) } else { None },
            };
            match seeds {
                None => run_typing(&g.graph, table, self.poset, &self.memo, typing, opts),
                Some(s) => run_typing_from(&g.graph, table, self.poset, &self.memo, typing, s, opts),
            }
        };
        for (edge, from, to, label, before, after) in lines {
            let line = format!(
                "{who}: edge {} {} -> {} [{}] {} {} => {} {}",
                edge.0,
                from,
                to,
                self.rels.table.get(label).name,
                self.show(&before.0),
                self.show(&before.1),
                self.show(&after.0),
                self.show(&after.1)
            );
            self.tree.trace.push(line);
        }
        out.typing
    }

    /// Returns the instance index and the (possibly strengthened) parameter
    /// and return types.
    fn instantiate(
        &mut self,
        sig: usize,
        actuals: Vec<TypeId>,
        ret: TypeId,
    ) -> Result<(usize, Vec<TypeId>, TypeId), MonoError> {
        let key: Key = (self.pt.sigs[sig].decl, actuals.clone(), ret);
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.clone());
        }
        // Recursion is collapsed over the actual signature.
        if let Some((_, idx)) = self.stack.iter().find(|(k, _)| *k == key) {
            return Ok((*idx, actuals, ret));
        }

        let s: FunctionSig = self.pt.sigs[sig].clone();
        let g = self.graph(sig)?;
        let mut typing = g.initial.clone();
        for (&n, &t) in g.params.iter().zip(&actuals) {
            typing.set(n, Antichain::singleton(self.poset, t));
        }
        typing.set(g.ret, Antichain::singleton(self.poset, ret));

        let idx = self.tree.instances.len();
        let u = &self.pt.universe;
        let mut mangled = mangle(u, &s.name, &actuals);
        if self.used.contains(&mangled) {
            let mut n = 2;
            while self.used.contains(&format!("{mangled}_v{n}")) {
                n += 1;
            }
            mangled = format!("{mangled}_v{n}");
        }
        self.used.insert(mangled.clone());
        self.tree.instances.push(Instance {
            sig,
            name: s.name.clone(),
            actuals: actuals.clone(),
            ret,
            mangled: mangled.clone(),
            graph: g.clone(),
            types: Vec::new(),
            callees: vec![usize::MAX; g.calls.len()],
        });
        self.stack.push((key.clone(), idx));

        let mut typing = self.run(&g, typing, None, &mangled);
        let mut done = vec![false; g.calls.len()];
        loop {
            let mut progress = false;
            for (ci, call) in g.calls.iter().enumerate() {
                if done[ci] {
                    continue;
                }
                let single = |n: NodeId| typing.get(n).as_singleton();
                let (Some(f), Some(r)) = (single(call.sig), single(call.result)) else { continue };
                let Some(args) = call.args.iter().map(|&n| single(n)).collect::<Option<Vec<_>>>() else {
                    continue;
                };
                let p = self.poset;
                let callee = self
                    .pt
                    .sigs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.name == call.name && c.arity() == args.len() && p.rep(c.ty) == f)
                    .max_by_key(|(i, c)| (c.has_body, std::cmp::Reverse(*i)))
                    .map(|(i, _)| i);
                let callee = match callee {
                    Some(c) if self.pt.sigs[c].has_body => c,
                    _ => {
                        let detail = format!(
                            "no definition of {} matching {}",
                            call.name,
                            self.pt.universe.display(f)
                        );
                        return Err(self.fail(detail, call.span));
                    }
                };
                let shown: Vec<String> = args.iter().map(|&t| self.pt.universe.display(t)).collect();
                self.frames.push(format!(
                    "{} {}( {} )",
                    self.pt.universe.display(r),
                    call.name,
                    shown.join(", ")
                ));
                let (cidx, params, cret) = match self.instantiate(callee, args.clone(), r) {
                    Ok(x) => x,
                    Err(e) => {
                        self.stack.pop();
                        return Err(e);
                    }
                };
                self.frames.pop();
                self.tree.instances[idx].callees[ci] = cidx;
                self.tree.edges.push((idx, cidx, call.span));
                done[ci] = true;
                progress = true;

                // Strengthening found inside the callee flows back.
                let mut seeds = Vec::new();
                for (&n, (&old, &new)) in call.args.iter().zip(args.iter().zip(&params)) {
                    if old != new {
                        typing.set(n, Antichain::singleton(self.poset, new));
                        seeds.extend_from_slice(g.graph.incident(n));
                    }
                }
                if cret != r {
                    typing.set(call.result, Antichain::singleton(self.poset, cret));
                    seeds.extend_from_slice(g.graph.incident(call.result));
                }
                if !seeds.is_empty() {
                    typing = self.run(&g, typing, Some(&seeds), &mangled);
                }
            }
            if !progress {
                break;
            }
        }

        let detail = self.check(&g, &typing, &done);
        if let Some((span, detail)) = detail {
            return Err(self.fail(detail, span));
        }
        let types: Vec<TypeId> = typing
            .assignment
            .iter()
            .map(|a| a.as_singleton().unwrap())
            .collect();
        let params: Vec<TypeId> = g.params.iter().map(|n| types[n.index()]).collect();
        let fret = types[g.ret.index()];
        self.tree.instances[idx].types = types;
        self.stack.pop();
        self.tree.post_order.push(idx);
        self.cache.insert(key, (idx, params.clone(), fret));
        Ok((idx, params, fret))
    }

    fn fail(&mut self, detail: String, span: Span) -> MonoError {
        let e = self.error(span, &detail);
        self.stack.pop();
        e
    }

    /// Classification of the finished typing and the declaration rules.
    fn check(&self, g: &FunctionGraph, typing: &Typing, done: &[bool]) -> Option<(Span, String)> {
        let u = &self.pt.universe;
        let at = |n: NodeId| {
            let info = g.graph.node(n);
            (info.span, format!("{} at {}:{}", info.role, info.span.line, info.span.col))
        };
        match classify_typing(typing) {
            Classification::Inconsistent(nodes) => {
                let lines: Vec<String> = nodes.iter().map(|&n| format!("no consistent type for {}", at(n).1)).collect();
                return Some((at(nodes[0]).0, lines.join("\n")));
            }
            Classification::Ambiguous(nodes) => {
                let lines: Vec<String> = nodes
                    .iter()
                    .map(|&n| format!("ambiguous type {} for {}", self.show(typing.get(n)), at(n).1))
                    .collect();
                return Some((at(nodes[0]).0, lines.join("\n")));
            }
            Classification::Valid(_) => {}
        }
        if let Some(ci) = done.iter().position(|d| !d) {
            let c = &g.calls[ci];
            return Some((c.span, format!("unresolved call to {}", c.name)));
        }
        for d in &g.decls {
            let t = typing.get(d.node).as_singleton().unwrap();
            if d.kind != SlotKind::Ret && !d.plus && t != self.poset.rep(d.declared) {
                return Some((
                    at(d.node).0,
                    format!(
                        "{} is declared {} but needs {}; mark it strengthenable with +",
                        at(d.node).1,
                        u.display(d.declared),
                        u.display(t)
                    ),
                ));
            }
            if u.kind(u.base_of(t)).is_abstract() {
                return Some((at(d.node).0, format!("{} has no concrete type: {}", at(d.node).1, u.display(t))));
            }
        }
        None
    }
}
