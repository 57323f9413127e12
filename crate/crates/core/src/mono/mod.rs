//! Instantiation of function bodies at concrete signatures, starting from
//! the entry point, and emission of the monomorphized program as C.

mod emit;
mod instantiate;

pub use emit::{emit_c, EmitOptions};
pub use instantiate::{instantiate_program, Instance, InstantiationTree, MonoError, MonoOptions};

use crate::universe::{TypeId, TypeKind, TypeUniverse};

/// Name fragment of a type: `Ival`, `int`, `charp` for `char*`.
pub fn mangle_type(u: &TypeUniverse, t: TypeId) -> String {
    match u.kind(t) {
        TypeKind::Pointer(p) => format!("{}p", mangle_type(u, *p)),
        TypeKind::Struct { tag, .. } => match &u.desc(t).name {
            Some(n) => n.clone(),
            None => tag.trim_start_matches('_').to_string(),
        },
        TypeKind::Function { .. } => "fn".to_string(),
        _ => u.display(t),
    }
}

/// `name_arg1_arg2`; `main` and argument-less functions keep their name.
pub fn mangle(u: &TypeUniverse, name: &str, args: &[TypeId]) -> String {
    if name == "main" || args.is_empty() {
        return name.to_string();
    }
    let parts: Vec<String> = args.iter().map(|&t| mangle_type(u, t)).collect();
    format!("{name}_{}", parts.join("_"))
}
