use crate::diag::{Diagnostic, Stage};
use crate::hierarchy::{check_subsumption, SubsumptionOrder};
use crate::universe::{ProgramTypes, TypeKind};

use super::expand::Instantiation;

/// Evaluates the `<check A subsumed by B>` directives.
pub fn check_directives(pt: &ProgramTypes, order: &SubsumptionOrder) -> Vec<Diagnostic> {
    pt.checks
        .iter()
        .filter_map(|&(strong, weak, span)| {
            check_subsumption(order, &pt.universe, strong, weak)
                .err()
                .map(|c| Diagnostic::error(Stage::Check, span, c.rendered))
        })
        .collect()
}

/// Verifies that each type substituted for a bounded parameter type is
/// subsumed by that parameter.
pub fn check_parameter_bounds(
    instantiations: &[Instantiation],
    pt: &ProgramTypes,
    order: &SubsumptionOrder,
) -> Vec<Diagnostic> {
    let u = &pt.universe;
    let mut out = Vec::new();
    for inst in instantiations {
        for (ty, param) in &inst.substitutions {
            let Some(p) = u.lookup_name(&param.name) else { continue };
            let TypeKind::Parameter { bounds, .. } = u.kind(p) else { continue };
            if bounds.is_empty() {
                continue;
            }
            let Some(c) = pt.resolve(ty) else {
                out.push(Diagnostic::error(
                    Stage::Check,
                    ty.base_span,
                    format!("unresolved type `{}`", super::pretty_type(ty)),
                ));
                continue;
            };
            if let Err(cex) = check_subsumption(order, u, c, p) {
                out.push(Diagnostic::error(Stage::Check, inst.span, cex.rendered));
            }
        }
    }
    out
}
