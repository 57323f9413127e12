use std::collections::HashSet;

use crate::diag::Span;
use crate::frontend::ast::*;

use super::{RelationLabel, TypeId, TypeKind, TypeUniverse, UniverseBuilder, UniverseError};

/// A declared or defined function with its resolved signature type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionSig {
    pub name: String,
    /// Index into the program's declarations.
    pub decl: usize,
    /// The function type, carrying the `+` flags of the arguments.
    pub ty: TypeId,
    pub params: Vec<TypeId>,
    pub ret: TypeId,
    /// `+` per parameter.
    pub flags: Vec<bool>,
    pub ret_plus: bool,
    pub has_body: bool,
    /// Same name and arity as a protocol operation.
    pub protocol: bool,
    pub origin: u32,
    pub span: Span,
}

impl FunctionSig {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

/// The universe of a program together with the resolved function
/// signatures and directives.
#[derive(Clone, Debug)]
pub struct ProgramTypes {
    pub universe: TypeUniverse,
    pub sigs: Vec<FunctionSig>,
    /// `(name, arity)` of every protocol operation.
    pub protocol_ops: Vec<(String, usize)>,
    /// `<check strong subsumed by weak>` directives.
    pub checks: Vec<(TypeId, TypeId, Span)>,
    /// Pairs from `<distinct ...>` directives.
    pub distinct: Vec<(TypeId, TypeId)>,
}

impl ProgramTypes {
    /// Resolves a written type, ignoring `+`.
    pub fn resolve(&self, ty: &TypeExpr) -> Option<TypeId> {
        let mut t = match &ty.base {
            BaseType::Named(n) => self.universe.lookup_name(n)?,
            BaseType::Struct(tag) => self.universe.lookup_struct(tag)?,
        };
        for _ in 0..ty.pointers {
            t = self.universe.pointer_to(t)?;
        }
        Some(t)
    }

    pub fn sigs_named<'a>(&'a self, name: &'a str, arity: usize) -> impl Iterator<Item = &'a FunctionSig> + 'a {
        self.sigs
            .iter()
            .filter(move |s| s.name == name && s.arity() == arity)
    }
}

type Res<T> = Result<T, (UniverseError, Span)>;

struct Build {
    b: UniverseBuilder,
    used: Vec<TypeId>,
}

impl Build {
    fn base(&mut self, ty: &TypeExpr) -> Res<TypeId> {
        let err = |n: &str| (UniverseError::UnresolvedName(n.to_string()), ty.base_span);
        match &ty.base {
            BaseType::Named(n) => match self.b.lookup_name(n) {
                Some(t) => Ok(t),
                None if crate::frontend::BUILTIN_TYPES.contains(&n.as_str()) => {
                    Ok(self.b.builtin(n))
                }
                None => Err(err(n)),
            },
            BaseType::Struct(tag) => self.b.lookup_struct(tag).ok_or_else(|| err(tag)),
        }
    }

    /// Interns a written type at full pointer depth and records its base
    /// for pointer saturation.
    fn ty(&mut self, ty: &TypeExpr) -> Res<TypeId> {
        let mut t = self.base(ty)?;
        self.used.push(t);
        for _ in 0..ty.pointers {
            t = self.b.pointer(t);
        }
        Ok(t)
    }
}

fn is_abstract_base(b: &UniverseBuilder, t: TypeId) -> bool {
    matches!(
        b.kind(t),
        TypeKind::Protocol(_) | TypeKind::Parameter { .. }
    )
}

impl TypeUniverse {
    /// Collects the relevant types and relations of an expanded program.
    pub fn from_program(p: &Program) -> Res<ProgramTypes> {
        let mut st = Build {
            b: UniverseBuilder::new(),
            used: Vec::new(),
        };

        // Nominal types and struct tags first, so that later declarations
        // may refer to them in any order.
        for d in &p.decls {
            if let Decl::Protocol(n) = d {
                st.b.protocol(&n.name);
            }
        }
        let mut tags = HashSet::new();
        for d in &p.decls {
            match d {
                Decl::Parameter { name, bounds } => {
                    let mut bs = Vec::new();
                    for bd in bounds {
                        let t = st
                            .b
                            .lookup_name(&bd.name)
                            .ok_or((UniverseError::UnresolvedName(bd.name.clone()), bd.span))?;
                        bs.push(t);
                    }
                    st.b.parameter(&name.name, bs);
                }
                Decl::Struct(s) => {
                    if !tags.insert(s.tag.name.clone()) {
                        return Err((UniverseError::DuplicateStruct(s.tag.name.clone()), s.tag.span));
                    }
                    st.b.declare_struct(&s.tag.name);
                }
                _ => {}
            }
        }

        for d in &p.decls {
            match d {
                Decl::Struct(s) => {
                    let id = st.b.lookup_struct(&s.tag.name).unwrap();
                    let mut fields = Vec::new();
                    for f in &s.fields {
                        fields.push((f.name.name.clone(), st.ty(&f.ty)?));
                    }
                    st.b
                        .define_struct(id, fields)
                        .map_err(|e| (e, s.tag.span))?;
                }
                Decl::Typedef(t) => {
                    let id = st.ty(&t.ty)?;
                    st.b.bind_name(&t.name.name, id);
                }
                Decl::FnTypedef(t) => {
                    let (args, ret) = signature(&mut st, &t.params, &t.ret)?;
                    let f = st.b.function(args, ret);
                    st.b.bind_name(&t.name.name, f);
                }
                _ => {}
            }
        }

        let mut sigs = Vec::new();
        let mut has_bodies = false;
        for (i, d) in p.decls.iter().enumerate() {
            let Decl::Function(f) = d else { continue };
            let (args, ret) = signature(&mut st, &f.params, &f.ret)?;
            let ty = st.b.function(args.clone(), ret);
            if let Some(body) = &f.body {
                has_bodies = true;
                let mut local = Vec::new();
                collect_block(body, &mut local);
                for t in local {
                    st.ty(t)?;
                }
            }
            sigs.push(FunctionSig {
                name: f.name.name.clone(),
                decl: i,
                ty,
                params: args.iter().map(|a| a.0).collect(),
                ret,
                flags: args.iter().map(|a| a.1).collect(),
                ret_plus: f.ret.strengthenable,
                has_body: f.body.is_some(),
                protocol: false,
                origin: f.origin,
                span: f.name.span,
            });
        }
        if has_bodies {
            for n in ["int", "char", "bool"] {
                let t = st.b.builtin(n);
                st.used.push(t);
            }
            let c = st.b.builtin("char");
            st.b.pointer(c);
        }

        let mentions_abstract = |b: &UniverseBuilder, s: &FunctionSig| {
            s.params
                .iter()
                .chain([&s.ret])
                .any(|&t| is_abstract_base(b, base_of(b, t)))
        };
        let mut protocol_ops: Vec<(String, usize)> = Vec::new();
        for s in &sigs {
            let key = (s.name.clone(), s.arity());
            if !s.has_body && mentions_abstract(&st.b, s) && !protocol_ops.contains(&key) {
                protocol_ops.push(key);
            }
        }
        for s in &mut sigs {
            s.protocol = protocol_ops.contains(&(s.name.clone(), s.arity()));
        }

        for s in &sigs {
            let arity = s.arity();
            for (k, (&a, &plus)) in s.params.iter().zip(&s.flags).enumerate() {
                let label = RelationLabel::ArgSignature {
                    op: s.name.clone(),
                    index: k + 1,
                    arity,
                };
                st.b.add_pair(label, a, s.ty, plus, s.protocol);
            }
        }

        // A bounded parameter type gets the protocol operations of its
        // bounds, with the bound replaced by the parameter.
        let params: Vec<(TypeId, Vec<TypeId>)> = (0..st.b.len() as u32)
            .map(TypeId)
            .filter_map(|t| match st.b.kind(t) {
                TypeKind::Parameter { bounds, .. } if !bounds.is_empty() => Some((t, bounds.clone())),
                _ => None,
            })
            .collect();
        for (param, bounds) in params {
            for &bound in &bounds {
                for s in sigs.iter().filter(|s| s.protocol && !s.has_body) {
                    if !s.params.iter().chain([&s.ret]).any(|&t| base_of(&st.b, t) == bound) {
                        continue;
                    }
                    let swap = |b: &mut UniverseBuilder, t: TypeId| replace_base(b, t, bound, param);
                    let args: Vec<(TypeId, bool)> = s
                        .params
                        .iter()
                        .map(|&a| (swap(&mut st.b, a), false))
                        .collect();
                    let ret = swap(&mut st.b, s.ret);
                    let vsig = st.b.function(args.clone(), ret);
                    for (k, &a) in s.params.iter().enumerate() {
                        if base_of(&st.b, a) == bound {
                            let label = RelationLabel::ArgSignature {
                                op: s.name.clone(),
                                index: k + 1,
                                arity: s.arity(),
                            };
                            st.b.add_pair(label, args[k].0, vsig, false, true);
                        }
                    }
                }
            }
        }

        // One level of pointers over every plain type in use.
        let used = std::mem::take(&mut st.used);
        for t in used {
            let skip = match st.b.kind(t) {
                TypeKind::Any | TypeKind::Function { .. } | TypeKind::Pointer(_) => true,
                TypeKind::Builtin(n) => n == "void",
                _ => false,
            };
            if !skip {
                st.b.pointer(t);
            }
        }

        let mut checks = Vec::new();
        let mut distinct = Vec::new();
        let name = |b: &UniverseBuilder, id: &Ident| {
            b.lookup_name(&id.name)
                .ok_or((UniverseError::UnresolvedName(id.name.clone()), id.span))
        };
        for d in &p.decls {
            match d {
                Decl::Check { strong, weak, span } => {
                    checks.push((name(&st.b, strong)?, name(&st.b, weak)?, *span));
                }
                Decl::Distinct { names, .. } => {
                    let ids = names
                        .iter()
                        .map(|n| name(&st.b, n))
                        .collect::<Result<Vec<_>, _>>()?;
                    for (i, &a) in ids.iter().enumerate() {
                        for &b in &ids[i + 1..] {
                            distinct.push((a, b));
                        }
                    }
                }
                _ => {}
            }
        }

        Ok(ProgramTypes {
            universe: st.b.finish(),
            sigs,
            protocol_ops,
            checks,
            distinct,
        })
    }
}

fn signature(st: &mut Build, params: &[Param], ret: &TypeExpr) -> Res<(Vec<(TypeId, bool)>, TypeId)> {
    let mut args = Vec::new();
    for p in params {
        args.push((st.ty(&p.ty)?, p.ty.strengthenable));
    }
    Ok((args, st.ty(ret)?))
}

fn base_of(b: &UniverseBuilder, mut t: TypeId) -> TypeId {
    while let TypeKind::Pointer(p) = b.kind(t) {
        t = *p;
    }
    t
}

fn replace_base(b: &mut UniverseBuilder, t: TypeId, from: TypeId, to: TypeId) -> TypeId {
    if t == from {
        return to;
    }
    match b.kind(t).clone() {
        TypeKind::Pointer(p) => {
            let inner = replace_base(b, p, from, to);
            b.pointer(inner)
        }
        _ => t,
    }
}

fn collect_block<'a>(b: &'a Block, out: &mut Vec<&'a TypeExpr>) {
    for s in &b.stmts {
        collect_stmt(s, out);
    }
}

fn collect_decl<'a>(d: &'a LocalDecl, out: &mut Vec<&'a TypeExpr>) {
    out.push(&d.ty);
    for dc in &d.declarators {
        if let Some(e) = &dc.init {
            collect_expr(e, out);
        }
    }
}

fn collect_stmt<'a>(s: &'a Stmt, out: &mut Vec<&'a TypeExpr>) {
    match s {
        Stmt::Decl(d) => collect_decl(d, out),
        Stmt::Expr(e) => collect_expr(e, out),
        Stmt::If {
            cond,
            then,
            otherwise,
            ..
        } => {
            collect_expr(cond, out);
            collect_stmt(then, out);
            if let Some(o) = otherwise {
                collect_stmt(o, out);
            }
        }
        Stmt::While { cond, body, .. } => {
            collect_expr(cond, out);
            collect_stmt(body, out);
        }
        Stmt::For {
            init,
            cond,
            step,
            body,
            ..
        } => {
            match init {
                Some(ForInit::Decl(d)) => collect_decl(d, out),
                Some(ForInit::Expr(e)) => collect_expr(e, out),
                None => {}
            }
            for e in cond.iter().chain(step.iter()) {
                collect_expr(e, out);
            }
            collect_stmt(body, out);
        }
        Stmt::Return(Some(e), _) => collect_expr(e, out),
        Stmt::Return(None, _) | Stmt::Empty(_) => {}
        Stmt::Block(b) => collect_block(b, out),
    }
}

fn collect_expr<'a>(e: &'a Expr, out: &mut Vec<&'a TypeExpr>) {
    match &e.kind {
        ExprKind::Var(_) | ExprKind::IntLit(_) | ExprKind::CharLit(_) | ExprKind::StringLit(_) => {}
        ExprKind::Field(x, _)
        | ExprKind::Deref(x)
        | ExprKind::AddressOf(x)
        | ExprKind::Unary { expr: x, .. }
        | ExprKind::PostInc(x)
        | ExprKind::PostDec(x)
        | ExprKind::Paren(x) => collect_expr(x, out),
        ExprKind::Call { args, .. } => {
            for a in args {
                collect_expr(a, out);
            }
        }
        ExprKind::Weaken { bound, expr, .. } => {
            out.push(bound);
            collect_expr(expr, out);
        }
        ExprKind::Assign { lhs, rhs, .. } | ExprKind::Binary { lhs, rhs, .. } => {
            collect_expr(lhs, out);
            collect_expr(rhs, out);
        }
        ExprKind::Ternary {
            cond,
            then,
            otherwise,
        } => {
            collect_expr(cond, out);
            collect_expr(then, out);
            collect_expr(otherwise, out);
        }
    }
}
