use std::fmt;

/// A byte range in the source text together with the 1-based line and
/// column of its first byte.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(start: usize, end: usize, line: u32, col: u32) -> Self {
        Span { start, end, line, col }
    }

    /// Span for declarations produced by typedef expansion.
    pub fn synthetic() -> Self {
        Span::default()
    }

    pub fn is_synthetic(&self) -> bool {
        self.line == 0
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(self, other: Span) -> Span {
        if self.is_synthetic() {
            return other;
        }
        if other.is_synthetic() {
            return self;
        }
        let (line, col) = if self.start <= other.start {
            (self.line, self.col)
        } else {
            (other.line, other.col)
        };
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
            line,
            col,
        }
    }
}

/// Compiler stage a diagnostic originates from. Stages run in this order
/// and the driver stops after the first stage that reports an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Parse,
    Expand,
    Universe,
    Hierarchy,
    Check,
    Typing,
    Emit,
    Internal,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Parse => "parse",
            Stage::Expand => "expand",
            Stage::Universe => "universe",
            Stage::Hierarchy => "hierarchy",
            Stage::Check => "check",
            Stage::Typing => "typing",
            Stage::Emit => "emit",
            Stage::Internal => "internal",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Warning,
    Error,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub stage: Stage,
    pub severity: Severity,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn error(stage: Stage, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            stage,
            severity: Severity::Error,
            span,
            message: message.into(),
        }
    }

    pub fn warning(stage: Stage, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            stage,
            severity: Severity::Warning,
            span,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Process exit status implied by this diagnostic alone: warnings 0,
    /// type and check errors 1, parse errors 2, internal failures 3.
    pub fn exit_code(&self) -> i32 {
        match (self.severity, self.stage) {
            (Severity::Warning, _) => 0,
            (Severity::Error, Stage::Internal) => 3,
            (Severity::Error, Stage::Parse) => 2,
            (Severity::Error, _) => 1,
        }
    }

    /// `file:line:col: message`, with multi-line bodies kept verbatim.
    pub fn render(&self, file: &str) -> String {
        if self.span.is_synthetic() {
            format!("{}: {}", file, self.message)
        } else {
            format!("{}:{}:{}: {}", file, self.span.line, self.span.col, self.message)
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.severity.as_str(), self.message)
    }
}

/// Highest exit status over a set of diagnostics.
pub fn exit_code(diags: &[Diagnostic]) -> i32 {
    diags.iter().map(Diagnostic::exit_code).max().unwrap_or(0)
}
