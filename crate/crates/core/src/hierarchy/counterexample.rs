use std::collections::{HashMap, VecDeque};

use crate::universe::{RelationLabel, TypeId, TypeKind, TypeUniverse};

use super::SubsumptionOrder;

/// Why the last pair of a counterexample path cannot be in ⪯.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Terminal {
    /// The weaker side has an edge for this relation, the stronger none.
    MissingOperation(RelationLabel),
    /// The weaker struct has a field the stronger one lacks.
    MissingField(String),
    /// The two types are of incompatible kinds.
    Mismatch,
}

/// A path through the simulation graph from the requested pair to a
/// contradiction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterexamplePath {
    /// `(stronger, weaker)` pairs, the first being the requested one; each
    /// later pair is reached through the label stored with it.
    pub steps: Vec<((TypeId, TypeId), Option<RelationLabel>)>,
    pub terminal: Terminal,
    pub rendered: String,
}

/// `Ok` if `strong ⪯ weak`, otherwise the shortest counterexample.
pub fn check_subsumption(
    order: &SubsumptionOrder,
    u: &TypeUniverse,
    strong: TypeId,
    weak: TypeId,
) -> Result<(), CounterexamplePath> {
    if order.leq(strong, weak) {
        return Ok(());
    }
    let mut parent: HashMap<(TypeId, TypeId), ((TypeId, TypeId), RelationLabel)> = HashMap::new();
    let mut queue = VecDeque::from([(strong, weak)]);
    let mut seen = vec![(strong, weak)];
    while let Some(pair) = queue.pop_front() {
        let (children, terminal) = expand(order, u, pair);
        if let Some(terminal) = terminal {
            let mut steps = Vec::new();
            let mut cur = pair;
            while let Some((prev, label)) = parent.get(&cur) {
                steps.push((cur, Some(label.clone())));
                cur = *prev;
            }
            steps.push((cur, None));
            steps.reverse();
            let rendered = render(u, strong, weak, &steps, &terminal);
            return Err(CounterexamplePath {
                steps,
                terminal,
                rendered,
            });
        }
        for (child, label) in children {
            if !seen.contains(&child) {
                seen.push(child);
                parent.insert(child, (pair, label));
                queue.push_back(child);
            }
        }
    }
    // Unreachable for a greatest fixed point, kept total for safety.
    let steps = vec![((strong, weak), None)];
    let rendered = render(u, strong, weak, &steps, &Terminal::Mismatch);
    Err(CounterexamplePath {
        steps,
        terminal: Terminal::Mismatch,
        rendered,
    })
}

type Children = Vec<((TypeId, TypeId), RelationLabel)>;

/// Failing obligations of a non-⪯ pair: either a terminal reason or the
/// pairs that would have had to hold.
fn expand(
    order: &SubsumptionOrder,
    u: &TypeUniverse,
    (a, b): (TypeId, TypeId),
) -> (Children, Option<Terminal>) {
    let mut children = Vec::new();
    if !order.initial().contains(a, b) {
        return init_reason(order, u, a, b);
    }
    let r = order.relation();
    for rel in u.simulation_relations() {
        for u2 in rel.image(b) {
            let mut cands: Vec<TypeId> = rel.image(a).collect();
            for v in r.row(a).ones().map(|i| TypeId(i as u32)) {
                cands.extend(rel.strengthenable_image(v));
            }
            cands.sort_unstable();
            cands.dedup();
            if cands.iter().any(|&c| r.contains(c, u2)) {
                continue;
            }
            if cands.is_empty() {
                return (Vec::new(), Some(Terminal::MissingOperation(rel.label.clone())));
            }
            for c in cands {
                children.push(((c, u2), rel.label.clone()));
            }
        }
    }
    (children, None)
}

fn init_reason(
    order: &SubsumptionOrder,
    u: &TypeUniverse,
    a: TypeId,
    b: TypeId,
) -> (Children, Option<Terminal>) {
    let not_le = |x: TypeId, y: TypeId| !order.leq(x, y);
    match (u.kind(a), u.kind(b)) {
        (TypeKind::Struct { fields: fa, .. }, TypeKind::Struct { fields: fb, .. }) => {
            let mut children = Vec::new();
            for (name, tb) in fb {
                match fa.iter().find(|(n, _)| n == name) {
                    None => return (Vec::new(), Some(Terminal::MissingField(name.clone()))),
                    Some(&(_, ta)) if not_le(ta, *tb) => {
                        children.push(((ta, *tb), RelationLabel::FieldSelect(name.clone())))
                    }
                    _ => {}
                }
            }
            terminal_if_empty(children)
        }
        (TypeKind::Pointer(pa), TypeKind::Pointer(pb)) if not_le(*pa, *pb) => {
            (vec![((*pa, *pb), RelationLabel::PointerDeref)], None)
        }
        (TypeKind::Function { args: aa, ret: ra }, TypeKind::Function { args: ab, ret: rb })
            if aa.len() == ab.len() && aa.iter().zip(ab).all(|(x, y)| !y.1 || x.1) =>
        {
            let arity = aa.len();
            let mut children = Vec::new();
            for (i, (x, y)) in aa.iter().zip(ab).enumerate() {
                if not_le(x.0, y.0) {
                    children.push(((x.0, y.0), RelationLabel::Arg { index: i + 1, arity }));
                }
            }
            if not_le(*ra, *rb) {
                children.push(((*ra, *rb), RelationLabel::Ret { arity }));
            }
            terminal_if_empty(children)
        }
        _ => (Vec::new(), Some(Terminal::Mismatch)),
    }
}

fn terminal_if_empty(children: Children) -> (Children, Option<Terminal>) {
    if children.is_empty() {
        (children, Some(Terminal::Mismatch))
    } else {
        (children, None)
    }
}

/// Expression with the subsumed type as the hole, plus whether it needs
/// parentheses before a postfix operator.
struct Term {
    text: String,
    prefix: bool,
}

impl Term {
    fn postfix_base(&self) -> String {
        if self.prefix {
            format!("({})", self.text)
        } else {
            self.text.clone()
        }
    }

    fn apply(self, label: &RelationLabel) -> Term {
        match label {
            RelationLabel::FieldSelect(f) => Term {
                text: format!("{}.{f}", self.postfix_base()),
                prefix: false,
            },
            RelationLabel::PointerDeref => Term {
                text: format!("*{}", self.text),
                prefix: true,
            },
            RelationLabel::ArgSignature { op, index, arity } => Term {
                text: render_call(op, &self.text, *index, *arity),
                prefix: false,
            },
            RelationLabel::Arg { .. } | RelationLabel::Ret { .. } | RelationLabel::Promote => self,
        }
    }
}

fn render_call(op: &str, hole: &str, index: usize, arity: usize) -> String {
    if arity <= 1 {
        format!("{op}( {hole} )")
    } else if index == 1 {
        format!("{op}( {hole}, ... )")
    } else if index == arity {
        format!("{op}( ..., {hole} )")
    } else {
        format!("{op}( ..., {hole}, ... )")
    }
}

fn render(
    u: &TypeUniverse,
    strong: TypeId,
    weak: TypeId,
    steps: &[((TypeId, TypeId), Option<RelationLabel>)],
    terminal: &Terminal,
) -> String {
    let mut term = Term {
        text: format!("({})", u.display(strong)),
        prefix: false,
    };
    for (_, label) in steps.iter().skip(1) {
        if let Some(label) = label {
            term = term.apply(label);
        }
    }
    let head = format!("{} does not subsume {}", u.display(weak), u.display(strong));
    match terminal {
        Terminal::MissingOperation(label) => {
            format!("{head}\nmissing: {};", term.apply(label).text)
        }
        Terminal::MissingField(f) => {
            let field = RelationLabel::FieldSelect(f.clone());
            format!("{head}\nmissing: {};", term.apply(&field).text)
        }
        Terminal::Mismatch => {
            let &((a, b), _) = steps.last().unwrap();
            format!(
                "{head}\nmismatch: {} is {}, not {};",
                term.text,
                u.display(a),
                u.display(b)
            )
        }
    }
}
