use std::collections::HashSet;

use crate::diag::Span;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

/// Type names known without a declaration.
pub const BUILTIN_TYPES: &[&str] = &["int", "char", "bool", "void", "any"];

pub fn parse(src: &str) -> Result<Program, ParseError> {
    parse_with_origin(src, 0)
}

/// Parses one source file; `origin` tags its function definitions.
pub fn parse_with_origin(src: &str, origin: u32) -> Result<Program, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        types: BUILTIN_TYPES.iter().map(|s| s.to_string()).collect(),
        origin,
    };
    let mut decls = Vec::new();
    while !p.at_eof() {
        decls.push(p.decl()?);
    }
    Ok(Program { decls })
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    types: HashSet<String>,
    origin: u32,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if !matches!(t.tok, Tok::Eof) {
            self.pos += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::new(self.span(), expected, &self.peek().describe()))
    }

    fn expect_punct(&mut self, p: &str) -> Result<Span, ParseError> {
        if self.is_punct(p) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{p}`"))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<Span, ParseError> {
        if self.is_word(w) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{w}`"))
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok(Ident::new(name, span))
            }
            _ => self.error("an identifier"),
        }
    }

    fn starts_type(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => s == "struct" || self.types.contains(s),
            _ => false,
        }
    }

    // ---- declarations ----

    fn decl(&mut self) -> Result<Decl, ParseError> {
        if self.is_word("protocoltype") {
            self.bump();
            let name = self.ident()?;
            self.expect_punct(";")?;
            self.types.insert(name.name.clone());
            return Ok(Decl::Protocol(name));
        }
        if self.is_word("parametertype") {
            self.bump();
            let name = self.ident()?;
            let mut bounds = Vec::new();
            if self.eat_punct(":") {
                bounds.push(self.ident()?);
                while self.eat_punct(",") {
                    bounds.push(self.ident()?);
                }
            }
            self.expect_punct(";")?;
            self.types.insert(name.name.clone());
            return Ok(Decl::Parameter { name, bounds });
        }
        if self.is_word("struct") && matches!(self.peek_at(2), Tok::Punct("{")) {
            return self.struct_decl().map(Decl::Struct);
        }
        if self.is_word("typedef") {
            return self.typedef();
        }
        if self.is_punct("<") {
            return self.directive();
        }
        self.function().map(Decl::Function)
    }

    fn struct_decl(&mut self) -> Result<StructDecl, ParseError> {
        let start = self.expect_word("struct")?;
        let tag = self.ident()?;
        self.expect_punct("{")?;
        let mut fields = Vec::new();
        while !self.is_punct("}") {
            let base = self.type_base()?;
            loop {
                let mut ty = base.clone();
                while self.eat_punct("*") {
                    ty.pointers += 1;
                }
                let name = self.ident()?;
                fields.push(Field { ty, name });
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct(";")?;
        }
        self.expect_punct("}")?;
        let end = self.expect_punct(";")?;
        Ok(StructDecl {
            tag,
            fields,
            span: start.to(end),
        })
    }

    fn typedef(&mut self) -> Result<Decl, ParseError> {
        let start = self.expect_word("typedef")?;
        // typedef Base<Concrete Param, ...> Name;
        if matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::Punct("<")) {
            let base = self.ident()?;
            self.expect_punct("<")?;
            let mut substitutions = Vec::new();
            while !self.is_punct(">") {
                let ty = self.type_expr()?;
                let param = self.ident()?;
                substitutions.push((ty, param));
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct(">")?;
            let name = self.ident()?;
            let end = self.expect_punct(";")?;
            self.types.insert(name.name.clone());
            return Ok(Decl::ParamTypedef(ParamTypedefDecl {
                base,
                substitutions,
                name,
                span: start.to(end),
            }));
        }
        let ty = self.type_expr()?;
        // typedef R (*Name)(params);
        if self.eat_punct("(") {
            self.expect_punct("*")?;
            let name = self.ident()?;
            self.expect_punct(")")?;
            let params = self.params()?;
            let end = self.expect_punct(";")?;
            self.types.insert(name.name.clone());
            return Ok(Decl::FnTypedef(FnTypedefDecl {
                ret: ty,
                name,
                params,
                span: start.to(end),
            }));
        }
        let name = self.ident()?;
        let end = self.expect_punct(";")?;
        self.types.insert(name.name.clone());
        Ok(Decl::Typedef(TypedefDecl {
            ty,
            name,
            span: start.to(end),
        }))
    }

    fn directive(&mut self) -> Result<Decl, ParseError> {
        let start = self.expect_punct("<")?;
        if self.is_word("check") {
            self.bump();
            let strong = self.ident()?;
            self.expect_word("subsumed")?;
            self.expect_word("by")?;
            let weak = self.ident()?;
            let end = self.expect_punct(">")?;
            return Ok(Decl::Check {
                strong,
                weak,
                span: start.to(end),
            });
        }
        if self.is_word("distinct") {
            self.bump();
            let mut names = vec![self.ident()?];
            while self.eat_punct(",") {
                names.push(self.ident()?);
            }
            let end = self.expect_punct(">")?;
            return Ok(Decl::Distinct {
                names,
                span: start.to(end),
            });
        }
        self.error("`check` or `distinct`")
    }

    fn function(&mut self) -> Result<FunctionDecl, ParseError> {
        if !self.starts_type() {
            return self.error("a declaration");
        }
        let start = self.span();
        let ret = self.type_expr()?;
        let name = self.ident()?;
        let params = self.params()?;
        let header_end = self.prev_span().end;
        let (body, end) = if self.is_punct("{") {
            let b = self.block()?;
            let end = b.span;
            (Some(b), end)
        } else {
            (None, self.expect_punct(";")?)
        };
        Ok(FunctionDecl {
            ret,
            name,
            params,
            body,
            span: start.to(end),
            header_end,
            origin: self.origin,
        })
    }

    fn params(&mut self) -> Result<Vec<Param>, ParseError> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if self.is_word("void") && matches!(self.peek_at(1), Tok::Punct(")")) {
            self.bump();
        }
        if !self.is_punct(")") {
            loop {
                let ty = self.type_expr()?;
                let by_ref = self.eat_punct("&");
                let name = match self.peek() {
                    Tok::Ident(_) => Some(self.ident()?),
                    _ => None,
                };
                params.push(Param { ty, by_ref, name });
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        Ok(params)
    }

    /// Base name and optional `+`, without pointer levels.
    fn type_base(&mut self) -> Result<TypeExpr, ParseError> {
        let start = self.span();
        let base = if self.is_word("struct") {
            self.bump();
            BaseType::Struct(self.ident()?.name)
        } else if self.starts_type() {
            BaseType::Named(self.ident()?.name)
        } else {
            return self.error("a type");
        };
        let strengthenable = self.eat_punct("+");
        Ok(TypeExpr {
            base,
            strengthenable,
            pointers: 0,
            base_span: start.to(self.prev_span()),
        })
    }

    fn type_expr(&mut self) -> Result<TypeExpr, ParseError> {
        let mut ty = self.type_base()?;
        while self.eat_punct("*") {
            ty.pointers += 1;
        }
        Ok(ty)
    }

    // ---- statements ----

    fn block(&mut self) -> Result<Block, ParseError> {
        let start = self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.is_punct("}") {
            if self.at_eof() {
                return self.error("`}`");
            }
            stmts.push(self.stmt()?);
        }
        let end = self.expect_punct("}")?;
        Ok(Block {
            stmts,
            span: start.to(end),
        })
    }

    fn local_decl(&mut self) -> Result<LocalDecl, ParseError> {
        let start = self.span();
        let ty = self.type_base()?;
        let mut declarators = Vec::new();
        loop {
            let mut pointers = 0;
            while self.eat_punct("*") {
                pointers += 1;
            }
            let name = self.ident()?;
            let init = if self.eat_punct("=") {
                Some(self.assignment()?)
            } else {
                None
            };
            declarators.push(Declarator {
                name,
                pointers,
                init,
            });
            if !self.eat_punct(",") {
                break;
            }
        }
        let end = self.expect_punct(";")?;
        Ok(LocalDecl {
            ty,
            declarators,
            span: start.to(end),
        })
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        if self.starts_type() {
            return self.local_decl().map(Stmt::Decl);
        }
        let start = self.span();
        if self.is_punct("{") {
            return self.block().map(Stmt::Block);
        }
        if self.is_punct(";") {
            return Ok(Stmt::Empty(self.bump().span));
        }
        if self.is_word("if") {
            self.bump();
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let then = Box::new(self.stmt()?);
            let otherwise = if self.is_word("else") {
                self.bump();
                Some(Box::new(self.stmt()?))
            } else {
                None
            };
            return Ok(Stmt::If {
                cond,
                then,
                otherwise,
                span: start.to(self.prev_span()),
            });
        }
        if self.is_word("while") {
            self.bump();
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let body = Box::new(self.stmt()?);
            return Ok(Stmt::While {
                cond,
                body,
                span: start.to(self.prev_span()),
            });
        }
        if self.is_word("for") {
            self.bump();
            self.expect_punct("(")?;
            let init = if self.eat_punct(";") {
                None
            } else if self.starts_type() {
                Some(ForInit::Decl(self.local_decl()?))
            } else {
                let e = self.expr()?;
                self.expect_punct(";")?;
                Some(ForInit::Expr(e))
            };
            let cond = if self.is_punct(";") {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect_punct(";")?;
            let step = if self.is_punct(")") {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect_punct(")")?;
            let body = Box::new(self.stmt()?);
            return Ok(Stmt::For {
                init,
                cond,
                step,
                body,
                span: start.to(self.prev_span()),
            });
        }
        if self.is_word("return") {
            self.bump();
            let value = if self.is_punct(";") {
                None
            } else {
                Some(self.expr()?)
            };
            let end = self.expect_punct(";")?;
            return Ok(Stmt::Return(value, start.to(end)));
        }
        let e = self.expr()?;
        self.expect_punct(";")?;
        Ok(Stmt::Expr(e))
    }

    // ---- expressions ----

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.assignment()
    }

    fn assignment(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.ternary()?;
        let op = match self.peek() {
            Tok::Punct("=") => AssignOp::Set,
            Tok::Punct("+=") => AssignOp::Add,
            Tok::Punct("-=") => AssignOp::Sub,
            Tok::Punct("*=") => AssignOp::Mul,
            Tok::Punct("/=") => AssignOp::Div,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.assignment()?;
        let span = lhs.span.to(rhs.span);
        Ok(Expr {
            kind: ExprKind::Assign {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            },
            span,
        })
    }

    fn ternary(&mut self) -> Result<Expr, ParseError> {
        let cond = self.binary(0)?;
        if !self.eat_punct("?") {
            return Ok(cond);
        }
        let then = self.expr()?;
        self.expect_punct(":")?;
        let otherwise = self.ternary()?;
        let span = cond.span.to(otherwise.span);
        Ok(Expr {
            kind: ExprKind::Ternary {
                cond: Box::new(cond),
                then: Box::new(then),
                otherwise: Box::new(otherwise),
            },
            span,
        })
    }

    fn binop(&self) -> Option<(BinOp, u8)> {
        let op = match self.peek() {
            Tok::Punct("||") => (BinOp::Or, 0),
            Tok::Punct("&&") => (BinOp::And, 1),
            Tok::Punct("==") => (BinOp::Eq, 2),
            Tok::Punct("!=") => (BinOp::Ne, 2),
            Tok::Punct("<") => (BinOp::Lt, 3),
            Tok::Punct(">") => (BinOp::Gt, 3),
            Tok::Punct("<=") => (BinOp::Le, 3),
            Tok::Punct(">=") => (BinOp::Ge, 3),
            Tok::Punct("+") => (BinOp::Add, 4),
            Tok::Punct("-") => (BinOp::Sub, 4),
            Tok::Punct("*") => (BinOp::Mul, 5),
            Tok::Punct("/") => (BinOp::Div, 5),
            Tok::Punct("%") => (BinOp::Rem, 5),
            _ => return None,
        };
        Some(op)
    }

    /// Precedence climbing over the left-associative binary operators.
    fn binary(&mut self, min: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some((op, prec)) = self.binop() {
            if prec < min {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr {
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        let wrap = |kind: ExprKind, inner: &Expr| Expr {
            kind,
            span: start.to(inner.span),
        };
        if self.is_punct("[") {
            self.bump();
            self.expect_punct("^")?;
            let bound = self.type_expr()?;
            let close = self.expect_punct("]")?;
            let e = self.unary()?;
            return Ok(wrap(
                ExprKind::Weaken {
                    bound,
                    prefix: start.to(close),
                    expr: Box::new(e.clone()),
                },
                &e,
            ));
        }
        let un = match self.peek() {
            Tok::Punct("!") => Some(UnOp::Not),
            Tok::Punct("-") => Some(UnOp::Neg),
            Tok::Punct("++") => Some(UnOp::PreInc),
            Tok::Punct("--") => Some(UnOp::PreDec),
            _ => None,
        };
        if let Some(op) = un {
            self.bump();
            let e = self.unary()?;
            return Ok(wrap(
                ExprKind::Unary {
                    op,
                    expr: Box::new(e.clone()),
                },
                &e,
            ));
        }
        if self.eat_punct("*") {
            let e = self.unary()?;
            return Ok(wrap(ExprKind::Deref(Box::new(e.clone())), &e));
        }
        if self.eat_punct("&") {
            let e = self.unary()?;
            return Ok(wrap(ExprKind::AddressOf(Box::new(e.clone())), &e));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        loop {
            if self.eat_punct(".") {
                let field = self.ident()?;
                let span = e.span.to(field.span);
                e = Expr {
                    kind: ExprKind::Field(Box::new(e), field),
                    span,
                };
            } else if self.is_punct("++") || self.is_punct("--") {
                let inc = self.is_punct("++");
                let end = self.bump().span;
                let span = e.span.to(end);
                let inner = Box::new(e);
                e = Expr {
                    kind: if inc {
                        ExprKind::PostInc(inner)
                    } else {
                        ExprKind::PostDec(inner)
                    },
                    span,
                };
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::IntLit(v),
                    span: start,
                })
            }
            Tok::Char(raw) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::CharLit(raw),
                    span: start,
                })
            }
            Tok::Str(raw) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::StringLit(raw),
                    span: start,
                })
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                let end = self.expect_punct(")")?;
                Ok(Expr {
                    kind: ExprKind::Paren(Box::new(e)),
                    span: start.to(end),
                })
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                if self.eat_punct("(") {
                    let mut args = Vec::new();
                    if !self.is_punct(")") {
                        loop {
                            args.push(self.assignment()?);
                            if !self.eat_punct(",") {
                                break;
                            }
                        }
                    }
                    let end = self.expect_punct(")")?;
                    Ok(Expr {
                        kind: ExprKind::Call { name, args },
                        span: start.to(end),
                    })
                } else {
                    Ok(Expr {
                        kind: ExprKind::Var(name.name),
                        span: start,
                    })
                }
            }
            _ => self.error("an expression"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocol_needs_a_name() {
        let err = parse("protocoltype;").unwrap_err();
        assert_eq!(err.expected, "an identifier");
        assert_eq!(err.found, "`;`");
    }

    #[test]
    fn param_typedef_with_one_substitution() {
        let p = parse(
            "parametertype ArrayListData;\nstruct _ArrayList { ArrayListData *elems; int size; };\n\
             typedef struct _ArrayList ArrayList;\nstruct _Ival { int min; int max; };\n\
             typedef struct _Ival Ival;\ntypedef ArrayList<Ival ArrayListData> IvalList;",
        )
        .unwrap();
        match &p.decls[5] {
            Decl::ParamTypedef(d) => {
                assert_eq!(d.base.name, "ArrayList");
                assert_eq!(d.substitutions.len(), 1);
                assert_eq!(d.substitutions[0].1.name, "ArrayListData");
                assert_eq!(d.name.name, "IvalList");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn strengthenable_pointer_parameter() {
        let p = parse("void print( char+ *s ) { printf( \"%s\", s ); }").unwrap();
        let Decl::Function(f) = &p.decls[0] else { panic!() };
        assert!(f.params[0].ty.strengthenable);
        assert_eq!(f.params[0].ty.pointers, 1);
        assert_eq!(f.params[0].name.as_ref().unwrap().name, "s");
    }

    #[test]
    fn weaken_cast_and_directive() {
        let p = parse(
            "protocoltype Iterable;\nprotocoltype Iterator;\n<check Iterable subsumed by Iterator>\n\
             int main() { print( [^Iterable]3 ); return 0; }",
        )
        .unwrap();
        assert!(matches!(p.decls[2], Decl::Check { .. }));
        let Decl::Function(f) = &p.decls[3] else { panic!() };
        let Stmt::Expr(e) = &f.body.as_ref().unwrap().stmts[0] else { panic!() };
        let ExprKind::Call { args, .. } = &e.kind else { panic!() };
        assert!(matches!(args[0].kind, ExprKind::Weaken { .. }));
    }

    #[test]
    fn precedence_of_ternary_and_comparison() {
        let p = parse("bool f( int c, int e ) { return (c > 0 ? e > c : e < c); }").unwrap();
        let Decl::Function(f) = &p.decls[0] else { panic!() };
        let Stmt::Return(Some(e), _) = &f.body.as_ref().unwrap().stmts[0] else { panic!() };
        let ExprKind::Paren(inner) = &e.kind else { panic!() };
        assert!(matches!(inner.kind, ExprKind::Ternary { .. }));
    }

    #[test]
    fn header_end_is_after_parameter_list() {
        let src = "int DATA( int c, int e ) { return e; }";
        let p = parse(src).unwrap();
        let Decl::Function(f) = &p.decls[0] else { panic!() };
        assert_eq!(&src[f.span.start..f.header_end], "int DATA( int c, int e )");
        assert_eq!(f.span.end, src.len());
    }
}
