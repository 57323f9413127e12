use std::fmt::Write;

use super::ast::*;

/// `char+*`, `struct _Ival`.
pub fn pretty_type(ty: &TypeExpr) -> String {
    let mut s = base_str(ty);
    for _ in 0..ty.pointers {
        s.push('*');
    }
    s
}

fn base_str(ty: &TypeExpr) -> String {
    let mut s = match &ty.base {
        BaseType::Named(n) => n.clone(),
        BaseType::Struct(n) => format!("struct {n}"),
    };
    if ty.strengthenable {
        s.push('+');
    }
    s
}

/// `Ival *elems`, `int &e`.
fn declarator(ty: &TypeExpr, by_ref: bool, name: Option<&str>) -> String {
    let mut s = base_str(ty);
    let stars = "*".repeat(ty.pointers as usize);
    let amp = if by_ref { "&" } else { "" };
    match name {
        Some(n) => write!(s, " {stars}{amp}{n}").unwrap(),
        None if ty.pointers > 0 || by_ref => write!(s, " {stars}{amp}").unwrap(),
        None => {}
    }
    s
}

fn params_str(params: &[Param]) -> String {
    params
        .iter()
        .map(|p| declarator(&p.ty, p.by_ref, p.name.as_ref().map(|n| n.name.as_str())))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn pretty_program(p: &Program) -> String {
    let mut out = String::new();
    for d in &p.decls {
        out.push_str(&pretty_decl(d));
        out.push('\n');
    }
    out
}

pub fn pretty_decl(d: &Decl) -> String {
    match d {
        Decl::Protocol(n) => format!("protocoltype {};", n.name),
        Decl::Parameter { name, bounds } => {
            if bounds.is_empty() {
                format!("parametertype {};", name.name)
            } else {
                let b: Vec<&str> = bounds.iter().map(|b| b.name.as_str()).collect();
                format!("parametertype {} : {};", name.name, b.join(", "))
            }
        }
        Decl::Struct(s) => {
            let mut out = format!("struct {} {{\n", s.tag.name);
            for f in &s.fields {
                writeln!(out, "  {};", declarator(&f.ty, false, Some(&f.name.name))).unwrap();
            }
            out.push_str("};");
            out
        }
        Decl::Typedef(t) => format!("typedef {};", declarator(&t.ty, false, Some(&t.name.name))),
        Decl::ParamTypedef(t) => {
            let subs: Vec<String> = t
                .substitutions
                .iter()
                .map(|(ty, p)| format!("{} {}", pretty_type(ty), p.name))
                .collect();
            format!("typedef {}<{}> {};", t.base.name, subs.join(", "), t.name.name)
        }
        Decl::FnTypedef(t) => format!(
            "typedef {} (*{})({});",
            pretty_type(&t.ret),
            t.name.name,
            params_str(&t.params)
        ),
        Decl::Function(f) => {
            let mut out = format!(
                "{} {}({})",
                pretty_type(&f.ret),
                f.name.name,
                params_str(&f.params)
            );
            match &f.body {
                Some(b) => {
                    out.push(' ');
                    block(&mut out, b, 0);
                }
                None => out.push(';'),
            }
            out
        }
        Decl::Check { strong, weak, .. } => {
            format!("<check {} subsumed by {}>", strong.name, weak.name)
        }
        Decl::Distinct { names, .. } => {
            let n: Vec<&str> = names.iter().map(|n| n.name.as_str()).collect();
            format!("<distinct {}>", n.join(", "))
        }
    }
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn block(out: &mut String, b: &Block, level: usize) {
    out.push_str("{\n");
    for s in &b.stmts {
        stmt(out, s, level + 1);
    }
    indent(out, level);
    out.push('}');
}

fn local_decl(d: &LocalDecl) -> String {
    let parts: Vec<String> = d
        .declarators
        .iter()
        .map(|dc| {
            let mut s = format!("{}{}", "*".repeat(dc.pointers as usize), dc.name.name);
            if let Some(init) = &dc.init {
                write!(s, " = {}", expr(init)).unwrap();
            }
            s
        })
        .collect();
    format!("{} {};", base_str(&d.ty), parts.join(", "))
}

/// Body of a compound statement, placed after a header on the same line.
fn nested(out: &mut String, s: &Stmt, level: usize) {
    if let Stmt::Block(b) = s {
        out.push(' ');
        block(out, b, level);
        out.push('\n');
    } else {
        out.push('\n');
        stmt(out, s, level + 1);
    }
}

fn stmt(out: &mut String, s: &Stmt, level: usize) {
    indent(out, level);
    match s {
        Stmt::Decl(d) => {
            out.push_str(&local_decl(d));
            out.push('\n');
        }
        Stmt::Expr(e) => {
            out.push_str(&expr(e));
            out.push_str(";\n");
        }
        Stmt::If {
            cond,
            then,
            otherwise,
            ..
        } => {
            write!(out, "if ({})", expr(cond)).unwrap();
            nested(out, then, level);
            if let Some(o) = otherwise {
                indent(out, level);
                out.push_str("else");
                nested(out, o, level);
            }
        }
        Stmt::While { cond, body, .. } => {
            write!(out, "while ({})", expr(cond)).unwrap();
            nested(out, body, level);
        }
        Stmt::For {
            init,
            cond,
            step,
            body,
            ..
        } => {
            out.push_str("for (");
            match init {
                Some(ForInit::Decl(d)) => out.push_str(&local_decl(d)),
                Some(ForInit::Expr(e)) => write!(out, "{};", expr(e)).unwrap(),
                None => out.push(';'),
            }
            if let Some(c) = cond {
                write!(out, " {}", expr(c)).unwrap();
            }
            out.push(';');
            if let Some(s) = step {
                write!(out, " {}", expr(s)).unwrap();
            }
            out.push(')');
            nested(out, body, level);
        }
        Stmt::Return(v, _) => {
            match v {
                Some(e) => write!(out, "return {};", expr(e)).unwrap(),
                None => out.push_str("return;"),
            }
            out.push('\n');
        }
        Stmt::Block(b) => {
            block(out, b, level);
            out.push('\n');
        }
        Stmt::Empty(_) => out.push_str(";\n"),
    }
}

fn expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Var(n) => n.clone(),
        ExprKind::IntLit(v) => v.to_string(),
        ExprKind::CharLit(raw) | ExprKind::StringLit(raw) => raw.clone(),
        ExprKind::Field(inner, f) => format!("{}.{}", expr(inner), f.name),
        ExprKind::Deref(inner) => format!("*{}", expr(inner)),
        ExprKind::AddressOf(inner) => format!("&{}", expr(inner)),
        ExprKind::Call { name, args } => {
            let a: Vec<String> = args.iter().map(expr).collect();
            format!("{}({})", name.name, a.join(", "))
        }
        ExprKind::Weaken { bound, expr: inner, .. } => {
            format!("[^{}]{}", pretty_type(bound), expr(inner))
        }
        ExprKind::Assign { op, lhs, rhs } => {
            format!("{} {} {}", expr(lhs), op.symbol(), expr(rhs))
        }
        ExprKind::Binary { op, lhs, rhs } => {
            format!("{} {} {}", expr(lhs), op.symbol(), expr(rhs))
        }
        ExprKind::Unary { op, expr: inner } => {
            let sym = match op {
                UnOp::Neg => "-",
                UnOp::Not => "!",
                UnOp::PreInc => "++",
                UnOp::PreDec => "--",
            };
            format!("{sym}{}", expr(inner))
        }
        ExprKind::PostInc(inner) => format!("{}++", expr(inner)),
        ExprKind::PostDec(inner) => format!("{}--", expr(inner)),
        ExprKind::Ternary {
            cond,
            then,
            otherwise,
        } => format!("{} ? {} : {}", expr(cond), expr(then), expr(otherwise)),
        ExprKind::Paren(inner) => format!("({})", expr(inner)),
    }
}
