//! Batch driver: parse, expand, infer the hierarchy, check, type and emit.

use std::path::PathBuf;

use moot_core::diag::{exit_code, Diagnostic, Span, Stage};
use moot_core::frontend::{
    check_directives, check_parameter_bounds, derive_call_relations, expand_param_typedefs, parse, CallRelations,
};
use moot_core::hierarchy::{infer, InferOptions, SubsumptionOrder, DEFAULT_DEPTH};
use moot_core::mono::{emit_c, instantiate_program, EmitOptions, InstantiationTree, MonoOptions};
use moot_core::universe::{ProgramTypes, TypeUniverse};
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct DriverConfig {
    /// Shown in the emitted header and in diagnostics.
    pub file_name: String,
    pub entry: String,
    pub depth: u32,
    pub promote: bool,
    pub trace: bool,
}

impl Default for DriverConfig {
    fn default() -> Self {
        DriverConfig {
            file_name: "input.moot".to_string(),
            entry: "main".to_string(),
            depth: DEFAULT_DEPTH,
            promote: false,
            trace: false,
        }
    }
}

/// Everything a compilation produced, up to the stage that failed.
#[derive(Debug, Default)]
pub struct CompileOutput {
    pub exit_code: i32,
    pub diagnostics: Vec<Diagnostic>,
    pub c_code: Option<String>,
    /// Hasse diagram of the inferred order.
    pub dot: Option<String>,
    pub trace: Vec<String>,
    pub types: Option<ProgramTypes>,
    pub order: Option<SubsumptionOrder>,
    pub relations: Option<CallRelations>,
    pub tree: Option<InstantiationTree>,
}

impl CompileOutput {
    fn finish(mut self) -> Self {
        self.exit_code = exit_code(&self.diagnostics);
        self
    }

    fn stop(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }
}

pub fn compile(source: &str, config: &DriverConfig) -> CompileOutput {
    let mut out = CompileOutput::default();
    let program = match parse(source) {
        Ok(p) => p,
        Err(e) => {
            out.diagnostics.push(e.to_diagnostic());
            return out.finish();
        }
    };
    let expansion = match expand_param_typedefs(&program) {
        Ok(x) => x,
        Err((e, span)) => {
            out.diagnostics.push(e.to_diagnostic(span));
            return out.finish();
        }
    };
    let pt = match TypeUniverse::from_program(&expansion.program) {
        Ok(pt) => pt,
        Err((e, span)) => {
            out.diagnostics.push(Diagnostic::error(Stage::Universe, span, e.to_string()));
            return out.finish();
        }
    };
    let order = infer(
        &pt.universe,
        &InferOptions {
            depth: config.depth,
            distinct: pt.distinct.clone(),
        },
    );
    out.dot = Some(order.to_dot(&pt.universe, None));

    out.diagnostics.extend(check_directives(&pt, &order));
    out.diagnostics
        .extend(check_parameter_bounds(&expansion.instantiations, &pt, &order));
    if out.stop() {
        out.types = Some(pt);
        out.order = Some(order);
        return out.finish();
    }

    let rels = match derive_call_relations(&pt, &order) {
        Ok(r) => r,
        Err(d) => {
            out.diagnostics.push(d);
            return out.finish();
        }
    };
    out.diagnostics.extend(rels.warnings.iter().cloned());

    let opts = MonoOptions {
        entry: config.entry.clone(),
        promote: config.promote,
        trace: config.trace,
    };
    match instantiate_program(&expansion.program, &pt, &rels, order.poset(), &opts) {
        Ok(tree) => {
            let emit = EmitOptions {
                file: config.file_name.clone(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            };
            out.c_code = Some(emit_c(&expansion.program, source, &pt, &tree, &emit));
            out.trace = tree.trace.clone();
            out.tree = Some(tree);
        }
        Err(e) => out.diagnostics.push(e.to_diagnostic()),
    }
    out.types = Some(pt);
    out.order = Some(order);
    out.relations = Some(rels);
    out.finish()
}

#[derive(Serialize)]
struct JsonSpan {
    start: usize,
    end: usize,
    line: u32,
    col: u32,
}

#[derive(Serialize)]
struct JsonDiagnostic<'a> {
    stage: &'a str,
    severity: &'a str,
    span: Option<JsonSpan>,
    message: &'a str,
}

/// One JSON object per diagnostic.
pub fn diagnostic_json(d: &Diagnostic) -> String {
    let span = (!d.span.is_synthetic()).then(|| {
        let Span { start, end, line, col } = d.span;
        JsonSpan { start, end, line, col }
    });
    serde_json::to_string(&JsonDiagnostic {
        stage: d.stage.as_str(),
        severity: d.severity.as_str(),
        span,
        message: &d.message,
    })
    .expect("diagnostics serialize")
}

/// Command line arguments, shared with the binary.
#[derive(Clone, Debug, clap::Parser)]
#[command(name = "mootc", version, about = "Compile moot-lite to C")]
pub struct Cli {
    pub input: PathBuf,
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
    /// Write the inferred hierarchy as a DOT Hasse diagram.
    #[arg(long = "dump-hierarchy", value_name = "FILE")]
    pub dump_hierarchy: Option<PathBuf>,
    /// Print every flow application to standard error.
    #[arg(long)]
    pub trace: bool,
    /// Allow char/int promotion at call arguments.
    #[arg(long)]
    pub promote: bool,
    /// Initial approximation depth.
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    pub depth: u32,
    #[arg(long, default_value = "main")]
    pub entry: String,
    #[arg(long = "json-diagnostics")]
    pub json_diagnostics: bool,
}
