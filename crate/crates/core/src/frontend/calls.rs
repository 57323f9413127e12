use std::collections::HashMap;

use crate::antichain::Poset;
use crate::diag::{Diagnostic, Span, Stage};
use crate::hierarchy::SubsumptionOrder;
use crate::typeflow::{validate_cross_closed, LabelId, MatchRelation, MatchTable};
use crate::universe::{ProgramTypes, RelationLabel, TypeId, TypeKind};

/// Labels of the relations used by statements and operators.
#[derive(Clone, Debug)]
pub struct StandardLabels {
    /// {(t, u) | t ⪯ u}: assignment, initialization, return.
    pub subsume: LabelId,
    /// Operand to the `bool` result of a comparison or logical operator.
    pub truth: LabelId,
    /// Operand to the result of `+ - * / %` and unary minus.
    pub arith: LabelId,
    /// `++` and `--`: each type to itself.
    pub numeric: LabelId,
    /// Pointer to pointee.
    pub deref: LabelId,
    /// C promotion between `char` and `int`.
    pub promote: LabelId,
    pub fields: HashMap<String, LabelId>,
}

/// Argument and return labels of one `name/arity` call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CallLabels {
    pub args: Vec<LabelId>,
    pub ret: LabelId,
}

#[derive(Clone, Debug)]
pub struct CallRelations {
    pub table: MatchTable,
    pub std: StandardLabels,
    calls: HashMap<(String, usize), CallLabels>,
    /// Incomparable definitions from different source files.
    pub warnings: Vec<Diagnostic>,
}

impl CallRelations {
    pub fn call(&self, name: &str, arity: usize) -> Option<&CallLabels> {
        self.calls.get(&(name.to_string(), arity))
    }

    pub fn field(&self, name: &str) -> Option<LabelId> {
        self.std.fields.get(name).copied()
    }

    /// Argument relations `1..=arity` followed by the return relation.
    pub fn relations_for(&self, name: &str, arity: usize) -> Option<Vec<&MatchRelation>> {
        let c = self.call(name, arity)?;
        Some(
            c.args
                .iter()
                .chain([&c.ret])
                .map(|&l| self.table.get(l))
                .collect(),
        )
    }
}

/// Builds every matching relation of the program over class
/// representatives and checks each for cross-closedness.
pub fn derive_call_relations(pt: &ProgramTypes, order: &SubsumptionOrder) -> Result<CallRelations, Diagnostic> {
    let u = &pt.universe;
    let p = order.poset();
    let rep = |t: TypeId| p.rep(t);
    let reps: Vec<TypeId> = u.ids().filter(|&t| p.is_rep(t)).collect();
    let mut table = MatchTable::new();

    let subsume = MatchRelation::new(
        "subsume",
        reps.iter()
            .flat_map(|&a| reps.iter().filter(move |&&b| p.leq(a, b)).map(move |&b| (a, b))),
    );
    let b = |n: &str| u.builtin(n).map(rep);
    let (int, char, bool) = (b("int"), b("char"), b("bool"));
    let pairs = |list: &[(Option<TypeId>, Option<TypeId>)]| -> Vec<(TypeId, TypeId)> {
        list.iter()
            .filter_map(|&(a, b)| Some((a?, b?)))
            .collect()
    };
    let truth = MatchRelation::new("truth", pairs(&[(int, bool), (char, bool), (bool, bool)]));
    let arith = MatchRelation::new("arith", pairs(&[(int, int), (char, int)]));
    let numeric = MatchRelation::new("numeric", pairs(&[(int, int), (char, char)]));
    let promote = MatchRelation::new("promote", pairs(&[(char, int), (char, char), (int, int)]));
    let structural = |label: &RelationLabel, name: String| {
        let r = u.lookup_relation(label);
        MatchRelation::new(name, r.pairs().iter().map(|&(a, b)| (rep(a), rep(b))))
    };
    let deref = structural(&RelationLabel::PointerDeref, "deref".into());

    let mut rels = vec![subsume, truth, arith, numeric, deref, promote];
    let mut field_names = Vec::new();
    for r in u.relations() {
        if let RelationLabel::FieldSelect(f) = &r.label {
            field_names.push(f.clone());
            rels.push(structural(&r.label, format!(".{f}")));
        }
    }

    let mut ops: Vec<(String, usize)> = Vec::new();
    for s in &pt.sigs {
        let key = (s.name.clone(), s.arity());
        if !ops.contains(&key) {
            ops.push(key);
        }
    }
    let mut op_rels = Vec::new();
    for (name, arity) in &ops {
        op_rels.push(call_relations(pt, p, name, *arity));
    }

    for r in rels.iter().chain(op_rels.iter().flatten()) {
        if let Err(missing) = validate_cross_closed(r, p) {
            let shown: Vec<String> = missing
                .iter()
                .map(|&(a, b)| format!("({}, {})", u.display(a), u.display(b)))
                .collect();
            return Err(Diagnostic::error(
                Stage::Internal,
                Span::synthetic(),
                format!("matching relation {} is not cross-closed: missing {}", r.name, shown.join(", ")),
            ));
        }
    }

    let mut it = rels.into_iter();
    let mut next = || table_add(&mut table, it.next().unwrap());
    let std_labels = [next(), next(), next(), next(), next(), next()];
    let fields: HashMap<String, LabelId> = field_names.into_iter().map(|f| (f, next())).collect();
    let std = StandardLabels {
        subsume: std_labels[0],
        truth: std_labels[1],
        arith: std_labels[2],
        numeric: std_labels[3],
        deref: std_labels[4],
        promote: std_labels[5],
        fields,
    };

    let mut calls = HashMap::new();
    for ((name, arity), mut rs) in ops.into_iter().zip(op_rels) {
        let ret = table.add(rs.pop().unwrap());
        let args = rs.into_iter().map(|r| table.add(r)).collect();
        calls.insert((name, arity), CallLabels { args, ret });
    }

    Ok(CallRelations {
        table,
        std,
        calls,
        warnings: incomparable_warnings(pt, order),
    })
}

fn table_add(table: &mut MatchTable, r: MatchRelation) -> LabelId {
    table.add(r)
}

/// M_i = R_i ∪ (⪯ ; R†_i) minus the pairs that lose to a pointwise
/// stronger definition, for each argument, then the return relation.
fn call_relations(pt: &ProgramTypes, p: &Poset, name: &str, arity: usize) -> Vec<MatchRelation> {
    let u = &pt.universe;
    let sigs: Vec<_> = pt.sigs_named(name, arity).collect();
    let all: Vec<TypeId> = u.ids().filter(|&t| p.is_rep(t)).collect();
    let mut out = Vec::new();
    for i in 0..arity {
        let declared: Vec<(TypeId, TypeId, bool)> = sigs
            .iter()
            .map(|s| (p.rep(s.params[i]), p.rep(s.ty), s.flags[i]))
            .collect();
        let mut m: Vec<(TypeId, TypeId)> = Vec::new();
        for &(a, f, plus) in &declared {
            m.push((a, f));
            if plus {
                m.extend(all.iter().filter(|&&t| p.leq(t, a)).map(|&t| (t, f)));
            }
        }
        m.sort_unstable();
        m.dedup();
        let arg_of = |f: TypeId| declared.iter().find(|d| d.1 == f).map(|d| d.0).unwrap();
        let kept: Vec<(TypeId, TypeId)> = m
            .iter()
            .copied()
            .filter(|&(t, f)| {
                !m.iter()
                    .any(|&(t2, f2)| t2 == t && f2 != f && p.lt(arg_of(f2), arg_of(f)))
            })
            .collect();
        out.push(MatchRelation::new(format!("{name}_arg{}/{arity}", i + 1), kept));
    }
    let mut ret = Vec::new();
    for s in &sigs {
        let (r, f) = (p.rep(s.ret), p.rep(s.ty));
        ret.push((r, f));
        if s.ret_plus {
            ret.extend(all.iter().filter(|&&t| p.leq(t, r)).map(|&t| (t, f)));
        }
    }
    out.push(MatchRelation::new(format!("{name}_ret/{arity}"), ret));
    out
}

fn incomparable_warnings(pt: &ProgramTypes, order: &SubsumptionOrder) -> Vec<Diagnostic> {
    let u = &pt.universe;
    let defs: Vec<_> = pt.sigs.iter().filter(|s| s.has_body).collect();
    let mut out = Vec::new();
    for (i, a) in defs.iter().enumerate() {
        for b in &defs[i + 1..] {
            if a.name != b.name || a.arity() != b.arity() || a.origin == b.origin {
                continue;
            }
            debug_assert!(matches!(u.kind(a.ty), TypeKind::Function { .. }));
            if !order.leq(a.ty, b.ty) && !order.leq(b.ty, a.ty) {
                out.push(Diagnostic::warning(
                    Stage::Check,
                    b.span,
                    format!(
                        "incomparable definitions of {} in different source files: {} and {}",
                        a.name,
                        u.display(a.ty),
                        u.display(b.ty)
                    ),
                ));
            }
        }
    }
    out
}
