use crate::diag::Span;
use crate::frontend::ast::*;
use crate::frontend::pretty_decl;
use crate::universe::{ProgramTypes, TypeId, TypeKind, TypeUniverse};

use super::{Instance, InstantiationTree};

#[derive(Clone, Debug, Default)]
pub struct EmitOptions {
    /// Input file name for the header comment.
    pub file: String,
    pub version: String,
}

/// Renders the instantiated program as C (C++ for `bool` and `&`).
pub fn emit_c(
    program: &Program,
    source: &str,
    pt: &ProgramTypes,
    tree: &InstantiationTree,
    opts: &EmitOptions,
) -> String {
    let u = &pt.universe;
    let mut out = format!(
        "/* generated by mootc {} from {} */\n#include <stdio.h>\n\n",
        opts.version, opts.file
    );
    let concrete = |t: &TypeExpr| pt.resolve(t).is_some_and(|id| !u.kind(u.base_of(id)).is_abstract());
    for d in &program.decls {
        let keep = match d {
            Decl::Struct(s) => s.fields.iter().all(|f| concrete(&f.ty)),
            Decl::Typedef(t) => concrete(&t.ty),
            _ => false,
        };
        if keep {
            out.push_str(&pretty_decl(d));
            out.push('\n');
        }
    }
    out.push('\n');

    let decl_of = |inst: &Instance| match &program.decls[pt.sigs[inst.sig].decl] {
        Decl::Function(f) => f,
        _ => unreachable!("instance of a non-function"),
    };
    let root = tree.root;
    for &i in &tree.post_order {
        if i == root {
            continue;
        }
        let inst = &tree.instances[i];
        let f = decl_of(inst);
        let edits = edits(u, tree, inst, f);
        out.push_str(&rewrite(source, f.span.start, f.header_end, &edits));
        out.push_str(";\n");
    }
    for &i in tree.post_order.iter().filter(|&&i| i != root).chain([&root]) {
        let inst = &tree.instances[i];
        let f = decl_of(inst);
        let edits = edits(u, tree, inst, f);
        out.push('\n');
        out.push_str(&rewrite(source, f.span.start, f.span.end, &edits));
        out.push('\n');
    }
    out
}

fn strip_pointers(u: &TypeUniverse, mut t: TypeId, n: u8) -> TypeId {
    for _ in 0..n {
        if let TypeKind::Pointer(p) = u.kind(t) {
            t = *p;
        }
    }
    t
}

fn edits(u: &TypeUniverse, tree: &InstantiationTree, inst: &Instance, f: &FunctionDecl) -> Vec<(Span, String)> {
    let mut out = vec![(f.name.span, inst.mangled.clone())];
    for d in &inst.graph.decls {
        if d.plus || u.kind(u.base_of(d.declared)).is_abstract() {
            let t = strip_pointers(u, inst.types[d.node.index()], d.pointers);
            out.push((d.span, u.display(t)));
        }
    }
    for (call, &callee) in inst.graph.calls.iter().zip(&inst.callees) {
        out.push((call.span, tree.instances[callee].mangled.clone()));
    }
    if let Some(body) = &f.body {
        for s in &body.stmts {
            weaken_prefixes_stmt(s, &mut out);
        }
    }
    out.retain(|(s, _)| !s.is_synthetic());
    out.sort_by_key(|(s, _)| s.start);
    out.dedup_by_key(|(s, _)| s.start);
    out
}

fn rewrite(source: &str, start: usize, end: usize, edits: &[(Span, String)]) -> String {
    let mut out = String::new();
    let mut at = start;
    for (span, text) in edits {
        if span.start < at || span.end > end {
            continue;
        }
        out.push_str(&source[at..span.start]);
        out.push_str(text);
        at = span.end;
    }
    out.push_str(&source[at..end]);
    out
}

fn weaken_prefixes_stmt(s: &Stmt, out: &mut Vec<(Span, String)>) {
    let mut e = |x: &Expr| weaken_prefixes(x, out);
    match s {
        Stmt::Decl(d) => d.declarators.iter().filter_map(|d| d.init.as_ref()).for_each(e),
        Stmt::Expr(x) => e(x),
        Stmt::If { cond, then, otherwise, .. } => {
            e(cond);
            weaken_prefixes_stmt(then, out);
            if let Some(o) = otherwise {
                weaken_prefixes_stmt(o, out);
            }
        }
        Stmt::While { cond, body, .. } => {
            e(cond);
            weaken_prefixes_stmt(body, out);
        }
        Stmt::For { init, cond, step, body, .. } => {
            match init {
                Some(ForInit::Decl(d)) => d.declarators.iter().filter_map(|d| d.init.as_ref()).for_each(&mut e),
                Some(ForInit::Expr(x)) => e(x),
                None => {}
            }
            cond.iter().chain(step.iter()).for_each(&mut e);
            weaken_prefixes_stmt(body, out);
        }
        Stmt::Return(Some(x), _) => e(x),
        Stmt::Block(b) => b.stmts.iter().for_each(|s| weaken_prefixes_stmt(s, out)),
        Stmt::Return(None, _) | Stmt::Empty(_) => {}
    }
}

fn weaken_prefixes(x: &Expr, out: &mut Vec<(Span, String)>) {
    match &x.kind {
        ExprKind::Weaken { expr, prefix, .. } => {
            out.push((*prefix, String::new()));
            weaken_prefixes(expr, out);
        }
        ExprKind::Field(a, _)
        | ExprKind::Deref(a)
        | ExprKind::AddressOf(a)
        | ExprKind::Unary { expr: a, .. }
        | ExprKind::PostInc(a)
        | ExprKind::PostDec(a)
        | ExprKind::Paren(a) => weaken_prefixes(a, out),
        ExprKind::Call { args, .. } => args.iter().for_each(|a| weaken_prefixes(a, out)),
        ExprKind::Assign { lhs, rhs, .. } | ExprKind::Binary { lhs, rhs, .. } => {
            weaken_prefixes(lhs, out);
            weaken_prefixes(rhs, out);
        }
        ExprKind::Ternary { cond, then, otherwise } => {
            for a in [cond, then, otherwise] {
                weaken_prefixes(a, out);
            }
        }
        ExprKind::Var(_) | ExprKind::IntLit(_) | ExprKind::CharLit(_) | ExprKind::StringLit(_) => {}
    }
}
