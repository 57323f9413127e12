//! Lexing, parsing and expansion of moot-lite source, plus the bridges
//! from the AST to the type machinery: bound checks, call matching
//! relations and per-function syntax graphs.

pub mod ast;
mod bounds;
mod calls;
mod expand;
mod graph;
mod lexer;
mod parser;
mod pretty;

use std::fmt;

use crate::diag::{Diagnostic, Span, Stage};

pub use bounds::{check_directives, check_parameter_bounds};
pub use calls::{derive_call_relations, CallLabels, CallRelations, StandardLabels};
pub use expand::{expand_param_typedefs, ExpandError, Expansion, Instantiation};
pub use graph::{build_function_graph, CallSite, DeclSlot, FunctionGraph, GraphError, GraphOptions, SlotKind};
pub use lexer::{tokenize, Tok, Token};
pub use parser::{parse, parse_with_origin, BUILTIN_TYPES};
pub use pretty::{pretty_decl, pretty_program, pretty_type};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub expected: String,
    pub found: String,
}

impl ParseError {
    pub fn new(span: Span, expected: &str, found: &str) -> Self {
        ParseError {
            span,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(Stage::Parse, self.span, self.to_string())
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "expected {}, found {}", self.expected, self.found)
    }
}

impl std::error::Error for ParseError {}
