use crate::diag::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: Span) -> Self {
        Ident {
            name: name.into(),
            span,
        }
    }

    pub fn synthetic(name: impl Into<String>) -> Self {
        Ident::new(name, Span::synthetic())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BaseType {
    Named(String),
    /// `struct _Tag`
    Struct(String),
}

impl BaseType {
    pub fn name(&self) -> &str {
        match self {
            BaseType::Named(n) | BaseType::Struct(n) => n,
        }
    }
}

/// A type as written: base name, optional `+` and pointer levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeExpr {
    pub base: BaseType,
    pub strengthenable: bool,
    pub pointers: u8,
    /// Covers the base name and the `+`; rewritten on emission.
    pub base_span: Span,
}

impl TypeExpr {
    pub fn named(name: impl Into<String>) -> Self {
        TypeExpr {
            base: BaseType::Named(name.into()),
            strengthenable: false,
            pointers: 0,
            base_span: Span::synthetic(),
        }
    }

    pub fn with_pointers(mut self, pointers: u8) -> Self {
        self.pointers = pointers;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub decls: Vec<Decl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Protocol(Ident),
    Parameter { name: Ident, bounds: Vec<Ident> },
    Struct(StructDecl),
    Typedef(TypedefDecl),
    ParamTypedef(ParamTypedefDecl),
    FnTypedef(FnTypedefDecl),
    Function(FunctionDecl),
    Check { strong: Ident, weak: Ident, span: Span },
    Distinct { names: Vec<Ident>, span: Span },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    pub ty: TypeExpr,
    pub name: Ident,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructDecl {
    pub tag: Ident,
    pub fields: Vec<Field>,
    pub span: Span,
}

/// `typedef <type> Name;`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedefDecl {
    pub ty: TypeExpr,
    pub name: Ident,
    pub span: Span,
}

/// `typedef Base<Concrete Param, ...> Name;`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamTypedefDecl {
    pub base: Ident,
    pub substitutions: Vec<(TypeExpr, Ident)>,
    pub name: Ident,
    pub span: Span,
}

/// `typedef R (*Name)(params);`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FnTypedefDecl {
    pub ret: TypeExpr,
    pub name: Ident,
    pub params: Vec<Param>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub ty: TypeExpr,
    pub by_ref: bool,
    pub name: Option<Ident>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionDecl {
    pub ret: TypeExpr,
    pub name: Ident,
    pub params: Vec<Param>,
    pub body: Option<Block>,
    /// From the return type to the closing `}` (or `;`).
    pub span: Span,
    /// Byte offset just past the closing `)` of the parameter list.
    pub header_end: usize,
    /// Source file the definition came from.
    pub origin: u32,
}

impl FunctionDecl {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Declarator {
    pub name: Ident,
    pub pointers: u8,
    pub init: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDecl {
    /// Base type; pointer levels live on each declarator.
    pub ty: TypeExpr,
    pub declarators: Vec<Declarator>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ForInit {
    Decl(LocalDecl),
    Expr(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Decl(LocalDecl),
    Expr(Expr),
    If {
        cond: Expr,
        then: Box<Stmt>,
        otherwise: Option<Box<Stmt>>,
        span: Span,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
        span: Span,
    },
    For {
        init: Option<ForInit>,
        cond: Option<Expr>,
        step: Option<Expr>,
        body: Box<Stmt>,
        span: Span,
    },
    Return(Option<Expr>, Span),
    Block(Block),
    Empty(Span),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge | BinOp::Eq | BinOp::Ne
        )
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
    PreInc,
    PreDec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
    Mul,
    Div,
}

impl AssignOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AssignOp::Set => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
            AssignOp::Div => "/=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Var(String),
    IntLit(i64),
    /// Raw spelling including quotes.
    CharLit(String),
    /// Raw spelling including quotes.
    StringLit(String),
    Field(Box<Expr>, Ident),
    Deref(Box<Expr>),
    AddressOf(Box<Expr>),
    Call { name: Ident, args: Vec<Expr> },
    /// `[^T]expr`; `prefix` covers the bracketed part.
    Weaken { bound: TypeExpr, expr: Box<Expr>, prefix: Span },
    Assign { op: AssignOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Unary { op: UnOp, expr: Box<Expr> },
    PostInc(Box<Expr>),
    PostDec(Box<Expr>),
    Ternary { cond: Box<Expr>, then: Box<Expr>, otherwise: Box<Expr> },
    Paren(Box<Expr>),
}
