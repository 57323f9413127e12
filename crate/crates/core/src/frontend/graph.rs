use std::collections::HashMap;

use thiserror::Error;

use crate::antichain::{Antichain, Poset};
use crate::diag::{Diagnostic, Span, Stage};
use crate::typeflow::{LabelId, NodeId, SyntaxGraph, Typing};
use crate::universe::{ProgramTypes, TypeId};

use super::ast::*;
use super::calls::CallRelations;
use super::pretty_type;

#[derive(Clone, Debug, Default)]
pub struct GraphOptions {
    /// Insert a promotion edge between each call argument and its slot.
    pub promote: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unbound identifier `{name}`")]
    UnboundIdentifier { name: String, span: Span },
    #[error("no struct has a field `{field}`")]
    NoSuchField { field: String, span: Span },
    #[error("no function `{name}` taking {arity} argument(s)")]
    UnknownFunction { name: String, arity: usize, span: Span },
    #[error("unknown type `{name}`")]
    UnresolvedType { name: String, span: Span },
}

impl GraphError {
    pub fn span(&self) -> Span {
        match self {
            GraphError::UnboundIdentifier { span, .. }
            | GraphError::NoSuchField { span, .. }
            | GraphError::UnknownFunction { span, .. }
            | GraphError::UnresolvedType { span, .. } => *span,
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(Stage::Typing, self.span(), self.to_string())
    }
}

/// A call expression: one node per actual argument, the signature slot and
/// the result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CallSite {
    pub name: String,
    /// Span of the callee name, rewritten on emission.
    pub span: Span,
    pub args: Vec<NodeId>,
    pub sig: NodeId,
    pub result: NodeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotKind {
    Param,
    Ret,
    Local,
}

/// A declared type in the function: parameter, return type or local.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeclSlot {
    pub kind: SlotKind,
    pub node: NodeId,
    pub declared: TypeId,
    pub plus: bool,
    pub pointers: u8,
    /// The written base type with its `+`.
    pub span: Span,
}

/// Syntax graph of one function body with its initial typing.
#[derive(Clone, Debug)]
pub struct FunctionGraph {
    pub graph: SyntaxGraph,
    pub initial: Typing,
    pub params: Vec<NodeId>,
    pub ret: NodeId,
    pub calls: Vec<CallSite>,
    pub decls: Vec<DeclSlot>,
}

pub fn build_function_graph(
    f: &FunctionDecl,
    pt: &ProgramTypes,
    rels: &CallRelations,
    poset: &Poset,
    opts: &GraphOptions,
) -> Result<FunctionGraph, GraphError> {
    let any = pt.universe.any();
    let mut b = Builder {
        pt,
        rels,
        poset,
        opts,
        g: SyntaxGraph::new(),
        init: Vec::new(),
        scopes: vec![HashMap::new()],
        calls: Vec::new(),
        decls: Vec::new(),
        ret: NodeId(0),
        any,
    };
    let mut params = Vec::new();
    for p in &f.params {
        let t = b.resolve(&p.ty)?;
        let role = match &p.name {
            Some(n) => format!("param {}", n.name),
            None => "param".to_string(),
        };
        let span = p.name.as_ref().map(|n| n.span).unwrap_or(p.ty.base_span);
        let n = b.node(span, role, t);
        b.decls.push(DeclSlot {
            kind: SlotKind::Param,
            node: n,
            declared: t,
            plus: p.ty.strengthenable,
            pointers: p.ty.pointers,
            span: p.ty.base_span,
        });
        if let Some(name) = &p.name {
            b.bind(&name.name, n);
        }
        params.push(n);
    }
    let rt = b.resolve(&f.ret)?;
    b.ret = b.node(f.ret.base_span, "return", rt);
    b.decls.push(DeclSlot {
        kind: SlotKind::Ret,
        node: b.ret,
        declared: rt,
        plus: f.ret.strengthenable,
        pointers: f.ret.pointers,
        span: f.ret.base_span,
    });
    if let Some(body) = &f.body {
        b.block(body)?;
    }
    let ret = b.ret;
    Ok(FunctionGraph {
        graph: b.g,
        initial: Typing { assignment: b.init },
        params,
        ret,
        calls: b.calls,
        decls: b.decls,
    })
}

struct Builder<'a> {
    pt: &'a ProgramTypes,
    rels: &'a CallRelations,
    poset: &'a Poset,
    opts: &'a GraphOptions,
    g: SyntaxGraph,
    init: Vec<Antichain>,
    scopes: Vec<HashMap<String, NodeId>>,
    calls: Vec<CallSite>,
    decls: Vec<DeclSlot>,
    ret: NodeId,
    any: TypeId,
}

impl Builder<'_> {
    fn node(&mut self, span: Span, role: impl Into<String>, t: TypeId) -> NodeId {
        self.init.push(Antichain::singleton(self.poset, t));
        self.g.add_node(span, role)
    }

    fn open(&mut self, span: Span, role: impl Into<String>) -> NodeId {
        self.node(span, role, self.any)
    }

    fn edge(&mut self, from: NodeId, to: NodeId, label: LabelId) {
        self.g.add_edge(from, to, label);
    }

    fn bind(&mut self, name: &str, n: NodeId) {
        self.scopes.last_mut().unwrap().insert(name.to_string(), n);
    }

    fn lookup(&self, name: &str) -> Option<NodeId> {
        self.scopes.iter().rev().find_map(|s| s.get(name).copied())
    }

    fn resolve(&self, ty: &TypeExpr) -> Result<TypeId, GraphError> {
        self.pt.resolve(ty).ok_or_else(|| GraphError::UnresolvedType {
            name: pretty_type(ty),
            span: ty.base_span,
        })
    }

    fn literal(&mut self, span: Span, spelling: &str) -> NodeId {
        let t = self
            .pt
            .universe
            .find(spelling)
            .expect("literal types are interned for programs with bodies");
        self.node(span, format!("literal {spelling}"), t)
    }

    fn block(&mut self, b: &Block) -> Result<(), GraphError> {
        self.scopes.push(HashMap::new());
        for s in &b.stmts {
            self.stmt(s)?;
        }
        self.scopes.pop();
        Ok(())
    }

    fn local(&mut self, d: &LocalDecl) -> Result<(), GraphError> {
        for dc in &d.declarators {
            let mut ty = d.ty.clone();
            ty.pointers += dc.pointers;
            let t = self.resolve(&ty)?;
            let n = self.node(dc.name.span, format!("decl {}", dc.name.name), t);
            self.decls.push(DeclSlot {
                kind: SlotKind::Local,
                node: n,
                declared: t,
                plus: ty.strengthenable,
                pointers: ty.pointers,
                span: d.ty.base_span,
            });
            if let Some(init) = &dc.init {
                let v = self.expr(init)?;
                let l = self.rels.std.subsume;
                self.edge(v, n, l);
            }
            self.bind(&dc.name.name, n);
        }
        Ok(())
    }

    fn condition(&mut self, e: &Expr) -> Result<(), GraphError> {
        let c = self.expr(e)?;
        let bool_t = self.pt.universe.builtin("bool").expect("bool is interned");
        let n = self.node(e.span, "condition", bool_t);
        let l = self.rels.std.truth;
        self.edge(c, n, l);
        Ok(())
    }

    fn stmt(&mut self, s: &Stmt) -> Result<(), GraphError> {
        match s {
            Stmt::Decl(d) => self.local(d),
            Stmt::Expr(e) => self.expr(e).map(|_| ()),
            Stmt::If {
                cond,
                then,
                otherwise,
                ..
            } => {
                self.condition(cond)?;
                self.scoped(then)?;
                if let Some(o) = otherwise {
                    self.scoped(o)?;
                }
                Ok(())
            }
            Stmt::While { cond, body, .. } => {
                self.condition(cond)?;
                self.scoped(body)
            }
            Stmt::For {
                init,
                cond,
                step,
                body,
                ..
            } => {
                self.scopes.push(HashMap::new());
                match init {
                    Some(ForInit::Decl(d)) => self.local(d)?,
                    Some(ForInit::Expr(e)) => {
                        self.expr(e)?;
                    }
                    None => {}
                }
                if let Some(c) = cond {
                    self.condition(c)?;
                }
                if let Some(st) = step {
                    self.expr(st)?;
                }
                self.scoped(body)?;
                self.scopes.pop();
                Ok(())
            }
            Stmt::Return(Some(e), _) => {
                let v = self.expr(e)?;
                let (r, l) = (self.ret, self.rels.std.subsume);
                self.edge(v, r, l);
                Ok(())
            }
            Stmt::Return(None, _) | Stmt::Empty(_) => Ok(()),
            Stmt::Block(b) => self.block(b),
        }
    }

    fn scoped(&mut self, s: &Stmt) -> Result<(), GraphError> {
        self.scopes.push(HashMap::new());
        let r = self.stmt(s);
        self.scopes.pop();
        r
    }

    /// Fresh result node fed from each operand through `label`.
    fn operator(&mut self, span: Span, role: &str, operands: &[NodeId], label: LabelId) -> NodeId {
        let r = self.open(span, role);
        for &o in operands {
            self.edge(o, r, label);
        }
        r
    }

    fn expr(&mut self, e: &Expr) -> Result<NodeId, GraphError> {
        let std = &self.rels.std;
        let (subsume, truth, arith, numeric, deref) =
            (std.subsume, std.truth, std.arith, std.numeric, std.deref);
        Ok(match &e.kind {
            ExprKind::Var(name) => self
                .lookup(name)
                .ok_or_else(|| GraphError::UnboundIdentifier {
                    name: name.clone(),
                    span: e.span,
                })?,
            ExprKind::IntLit(_) => self.literal(e.span, "int"),
            ExprKind::CharLit(_) => self.literal(e.span, "char"),
            ExprKind::StringLit(_) => self.literal(e.span, "char*"),
            ExprKind::Paren(inner) => self.expr(inner)?,
            ExprKind::Field(inner, f) => {
                let x = self.expr(inner)?;
                let label = self.rels.field(&f.name).ok_or_else(|| GraphError::NoSuchField {
                    field: f.name.clone(),
                    span: f.span,
                })?;
                let r = self.open(e.span, format!(".{}", f.name));
                self.edge(x, r, label);
                r
            }
            ExprKind::Deref(inner) => {
                let x = self.expr(inner)?;
                self.operator(e.span, "deref", &[x], deref)
            }
            ExprKind::AddressOf(inner) => {
                let x = self.expr(inner)?;
                let r = self.open(e.span, "address");
                self.edge(r, x, deref);
                r
            }
            ExprKind::Weaken { bound, expr, .. } => {
                let x = self.expr(expr)?;
                let t = self.resolve(bound)?;
                let w = self.node(e.span, "weaken", t);
                self.edge(x, w, subsume);
                w
            }
            ExprKind::Assign { op, lhs, rhs } => {
                let l = self.expr(lhs)?;
                let r = self.expr(rhs)?;
                let label = if *op == AssignOp::Set { subsume } else { arith };
                self.edge(r, l, label);
                l
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.expr(lhs)?;
                let r = self.expr(rhs)?;
                let label = if op.is_comparison() || op.is_logical() {
                    truth
                } else {
                    arith
                };
                self.operator(e.span, op.symbol(), &[l, r], label)
            }
            ExprKind::Unary { op, expr } => {
                let x = self.expr(expr)?;
                let label = match op {
                    UnOp::Neg => arith,
                    UnOp::Not => truth,
                    UnOp::PreInc | UnOp::PreDec => numeric,
                };
                self.operator(e.span, "unary", &[x], label)
            }
            ExprKind::PostInc(x) | ExprKind::PostDec(x) => {
                let x = self.expr(x)?;
                self.operator(e.span, "step", &[x], numeric)
            }
            ExprKind::Ternary {
                cond,
                then,
                otherwise,
            } => {
                self.condition(cond)?;
                let a = self.expr(then)?;
                let b = self.expr(otherwise)?;
                self.operator(e.span, "?:", &[a, b], subsume)
            }
            ExprKind::Call { name, args } => self.call(e, name, args)?,
        })
    }

    fn call(&mut self, e: &Expr, name: &Ident, args: &[Expr]) -> Result<NodeId, GraphError> {
        if name.name == "printf" {
            for a in args {
                self.expr(a)?;
            }
            return Ok(self.literal(e.span, "int"));
        }
        let labels = self
            .rels
            .call(&name.name, args.len())
            .ok_or_else(|| GraphError::UnknownFunction {
                name: name.name.clone(),
                arity: args.len(),
                span: name.span,
            })?
            .clone();
        let mut actuals = Vec::new();
        let mut slots = Vec::new();
        for a in args {
            let n = self.expr(a)?;
            // The instantiation sees the type under a weakening cast.
            let actual = match &a.kind {
                ExprKind::Weaken { .. } => self
                    .g
                    .incident(n)
                    .iter()
                    .map(|&id| self.g.edge(id))
                    .find(|ed| ed.to == n)
                    .map(|ed| ed.from)
                    .unwrap_or(n),
                _ => n,
            };
            actuals.push(actual);
            slots.push(n);
        }
        let sig = self.open(name.span, format!("sig {}", name.name));
        let result = self.open(e.span, format!("call {}", name.name));
        for (i, &n) in slots.iter().enumerate() {
            let from = if self.opts.promote {
                let m = self.open(args[i].span, "promoted");
                let p = self.rels.std.promote;
                self.edge(n, m, p);
                m
            } else {
                n
            };
            self.edge(from, sig, labels.args[i]);
        }
        self.edge(result, sig, labels.ret);
        self.calls.push(CallSite {
            name: name.name.clone(),
            span: name.span,
            args: actuals,
            sig,
            result,
        });
        Ok(result)
    }
}
