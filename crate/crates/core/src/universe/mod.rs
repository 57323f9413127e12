//! The finite set of relevant types and the labelled type relations over it.

mod from_program;

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub use from_program::{FunctionSig, ProgramTypes};

/// Dense index of a type in a [`TypeUniverse`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeId(pub u32);

impl TypeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeKind {
    Any,
    Builtin(String),
    Protocol(String),
    Parameter { name: String, bounds: Vec<TypeId> },
    Struct { tag: String, fields: Vec<(String, TypeId)> },
    Pointer(TypeId),
    /// Argument types with their strengthenable flag, and the return type.
    Function { args: Vec<(TypeId, bool)>, ret: TypeId },
}

impl TypeKind {
    pub fn is_function(&self) -> bool {
        matches!(self, TypeKind::Function { .. })
    }

    pub fn is_pointer(&self) -> bool {
        matches!(self, TypeKind::Pointer(_))
    }

    /// Protocol and parameter types have no representation of their own;
    /// they only stand for the types they subsume.
    pub fn is_abstract(&self) -> bool {
        matches!(
            self,
            TypeKind::Any | TypeKind::Protocol(_) | TypeKind::Parameter { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDesc {
    pub kind: TypeKind,
    /// Surface name (typedef name for structs) used in messages.
    pub name: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum TypeKey {
    Any,
    Builtin(String),
    Protocol(String),
    Parameter(String),
    Struct(String),
    Pointer(TypeId),
    Function(Vec<(TypeId, bool)>, TypeId),
}

/// Index σ of a type relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationLabel {
    /// Struct type to the type of its field.
    FieldSelect(String),
    /// Type of the `index`-th argument (1-based) to the declared signature
    /// of an `arity`-ary operation.
    ArgSignature { op: String, index: usize, arity: usize },
    /// Pointer type to pointee.
    PointerDeref,
    /// Function type to its `index`-th argument type.
    Arg { index: usize, arity: usize },
    /// Function type to its return type.
    Ret { arity: usize },
    /// C integer promotion restricted to `char` and `int`.
    Promote,
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationLabel::FieldSelect(name) => write!(f, ".{name}"),
            RelationLabel::ArgSignature { op, index, arity } => write!(f, "{op}_{index}/{arity}"),
            RelationLabel::PointerDeref => write!(f, "*"),
            RelationLabel::Arg { index, arity } => write!(f, "arg_{index}/{arity}"),
            RelationLabel::Ret { arity } => write!(f, "ret_/{arity}"),
            RelationLabel::Promote => write!(f, "promote"),
        }
    }
}

/// A relation R_σ with its strengthenable subset R†_σ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeRelation {
    pub label: RelationLabel,
    pairs: Vec<(TypeId, TypeId)>,
    reversed: Vec<(TypeId, TypeId)>,
    strengthenable: Vec<(TypeId, TypeId)>,
}

impl TypeRelation {
    pub fn new(label: RelationLabel) -> Self {
        TypeRelation {
            label,
            pairs: Vec::new(),
            reversed: Vec::new(),
            strengthenable: Vec::new(),
        }
    }

    /// Builds a relation from pairs; `strengthenable` must be a subset.
    pub fn from_pairs(
        label: RelationLabel,
        pairs: impl IntoIterator<Item = (TypeId, TypeId)>,
        strengthenable: impl IntoIterator<Item = (TypeId, TypeId)>,
    ) -> Self {
        let mut rel = TypeRelation::new(label);
        rel.pairs.extend(pairs);
        rel.strengthenable.extend(strengthenable);
        rel.normalize();
        debug_assert!(rel.strengthenable.iter().all(|p| rel.contains(p.0, p.1)));
        rel
    }

    fn insert(&mut self, a: TypeId, b: TypeId, strengthenable: bool) {
        self.pairs.push((a, b));
        if strengthenable {
            self.strengthenable.push((a, b));
        }
    }

    fn normalize(&mut self) {
        self.pairs.sort_unstable();
        self.pairs.dedup();
        self.strengthenable.sort_unstable();
        self.strengthenable.dedup();
        self.reversed = self.pairs.iter().map(|&(a, b)| (b, a)).collect();
        self.reversed.sort_unstable();
    }

    pub fn pairs(&self) -> &[(TypeId, TypeId)] {
        &self.pairs
    }

    pub fn strengthenable_pairs(&self) -> &[(TypeId, TypeId)] {
        &self.strengthenable
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn contains(&self, a: TypeId, b: TypeId) -> bool {
        self.pairs.binary_search(&(a, b)).is_ok()
    }

    pub fn is_strengthenable(&self, a: TypeId, b: TypeId) -> bool {
        self.strengthenable.binary_search(&(a, b)).is_ok()
    }

    /// All `u` with `a R u`.
    pub fn image(&self, a: TypeId) -> impl Iterator<Item = TypeId> + '_ {
        range_of(&self.pairs, a).iter().map(|&(_, b)| b)
    }

    /// All `u` with `a R† u`.
    pub fn strengthenable_image(&self, a: TypeId) -> impl Iterator<Item = TypeId> + '_ {
        range_of(&self.strengthenable, a).iter().map(|&(_, b)| b)
    }

    /// All `t` with `t R b`.
    pub fn preimage(&self, b: TypeId) -> impl Iterator<Item = TypeId> + '_ {
        range_of(&self.reversed, b).iter().map(|&(_, a)| a)
    }

    /// True if every first coordinate has at most one image.
    pub fn is_functional(&self) -> bool {
        self.pairs.windows(2).all(|w| w[0].0 != w[1].0)
    }
}

fn range_of(sorted: &[(TypeId, TypeId)], a: TypeId) -> &[(TypeId, TypeId)] {
    let lo = sorted.partition_point(|p| p.0 < a);
    let hi = sorted.partition_point(|p| p.0 <= a);
    &sorted[lo..hi]
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UniverseError {
    #[error("unresolved type name `{0}`")]
    UnresolvedName(String),
    #[error("duplicate field `{field}` in struct `{tag}`")]
    DuplicateStructField { tag: String, field: String },
    #[error("struct `{0}` is defined more than once")]
    DuplicateStruct(String),
}

/// The set T of relevant types plus the indexed relations {R_σ}.
///
/// Immutable once built; construction goes through [`UniverseBuilder`] or
/// [`TypeUniverse::from_program`].
#[derive(Clone, Debug)]
pub struct TypeUniverse {
    types: Vec<TypeDesc>,
    keys: HashMap<TypeKey, TypeId>,
    names: HashMap<String, TypeId>,
    relations: Vec<TypeRelation>,
    in_simulation: Vec<bool>,
    label_index: HashMap<RelationLabel, usize>,
}

impl TypeUniverse {
    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = TypeId> {
        (0..self.types.len() as u32).map(TypeId)
    }

    pub fn any(&self) -> TypeId {
        self.keys[&TypeKey::Any]
    }

    pub fn desc(&self, t: TypeId) -> &TypeDesc {
        &self.types[t.index()]
    }

    pub fn kind(&self, t: TypeId) -> &TypeKind {
        &self.types[t.index()].kind
    }

    /// Resolves a surface type name (builtin, `any`, protocol, parameter or
    /// typedef name).
    pub fn lookup_name(&self, name: &str) -> Option<TypeId> {
        self.names.get(name).copied()
    }

    pub fn lookup_struct(&self, tag: &str) -> Option<TypeId> {
        self.keys.get(&TypeKey::Struct(tag.to_string())).copied()
    }

    pub fn builtin(&self, name: &str) -> Option<TypeId> {
        self.keys.get(&TypeKey::Builtin(name.to_string())).copied()
    }

    pub fn pointer_to(&self, t: TypeId) -> Option<TypeId> {
        self.keys.get(&TypeKey::Pointer(t)).copied()
    }

    pub fn function(&self, args: &[(TypeId, bool)], ret: TypeId) -> Option<TypeId> {
        self.keys
            .get(&TypeKey::Function(args.to_vec(), ret))
            .copied()
    }

    pub fn relations(&self) -> &[TypeRelation] {
        &self.relations
    }

    /// Relations that take part in hierarchy inference (Σ).
    pub fn simulation_relations(&self) -> impl Iterator<Item = &TypeRelation> {
        self.relations
            .iter()
            .zip(&self.in_simulation)
            .filter(|(_, on)| **on)
            .map(|(r, _)| r)
    }

    pub fn is_simulation_relation(&self, label: &RelationLabel) -> bool {
        self.label_index
            .get(label)
            .map(|&i| self.in_simulation[i])
            .unwrap_or(false)
    }

    /// The relation for `label`, or an empty one if nothing was recorded.
    pub fn lookup_relation(&self, label: &RelationLabel) -> Cow<'_, TypeRelation> {
        match self.label_index.get(label) {
            Some(&i) => Cow::Borrowed(&self.relations[i]),
            None => Cow::Owned(TypeRelation::new(label.clone())),
        }
    }

    /// Human readable spelling: `Ival`, `char*`, `int(*)(Ival+, int)`.
    pub fn display(&self, t: TypeId) -> String {
        let desc = self.desc(t);
        match &desc.kind {
            TypeKind::Any => "any".to_string(),
            TypeKind::Builtin(n) | TypeKind::Protocol(n) => n.clone(),
            TypeKind::Parameter { name, .. } => name.clone(),
            TypeKind::Struct { tag, .. } => desc
                .name
                .clone()
                .unwrap_or_else(|| format!("struct {tag}")),
            TypeKind::Pointer(p) => format!("{}*", self.display(*p)),
            TypeKind::Function { args, ret } => {
                let args: Vec<String> = args
                    .iter()
                    .map(|&(a, s)| {
                        if s {
                            format!("{}+", self.display(a))
                        } else {
                            self.display(a)
                        }
                    })
                    .collect();
                format!("{}(*)({})", self.display(*ret), args.join(", "))
            }
        }
    }

    /// Finds a type by its [`display`](Self::display) spelling.
    pub fn find(&self, spelling: &str) -> Option<TypeId> {
        self.ids().find(|&t| self.display(t) == spelling)
    }

    /// Strips pointer levels.
    pub fn base_of(&self, mut t: TypeId) -> TypeId {
        while let TypeKind::Pointer(p) = self.kind(t) {
            t = *p;
        }
        t
    }

    pub fn pointer_depth(&self, mut t: TypeId) -> usize {
        let mut depth = 0;
        while let TypeKind::Pointer(p) = self.kind(t) {
            t = *p;
            depth += 1;
        }
        depth
    }
}

/// Incremental construction of a [`TypeUniverse`].
///
/// Structural relations (field selects, pointer dereference, function
/// argument and return selection) are derived in [`finish`](Self::finish);
/// signature relations are added explicitly.
#[derive(Debug, Default)]
pub struct UniverseBuilder {
    types: Vec<TypeDesc>,
    keys: HashMap<TypeKey, TypeId>,
    names: HashMap<String, TypeId>,
    explicit: Vec<(TypeRelation, bool)>,
    explicit_index: HashMap<RelationLabel, usize>,
}

impl UniverseBuilder {
    pub fn new() -> Self {
        let mut b = UniverseBuilder::default();
        let any = b.intern(TypeKey::Any, TypeKind::Any);
        b.names.insert("any".to_string(), any);
        b
    }

    fn intern(&mut self, key: TypeKey, kind: TypeKind) -> TypeId {
        if let Some(&id) = self.keys.get(&key) {
            return id;
        }
        let id = TypeId(self.types.len() as u32);
        self.types.push(TypeDesc { kind, name: None });
        self.keys.insert(key, id);
        id
    }

    pub fn any(&self) -> TypeId {
        self.keys[&TypeKey::Any]
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn kind(&self, t: TypeId) -> &TypeKind {
        &self.types[t.index()].kind
    }

    pub fn builtin(&mut self, name: &str) -> TypeId {
        let id = self.intern(
            TypeKey::Builtin(name.to_string()),
            TypeKind::Builtin(name.to_string()),
        );
        self.names.entry(name.to_string()).or_insert(id);
        id
    }

    pub fn protocol(&mut self, name: &str) -> TypeId {
        let id = self.intern(
            TypeKey::Protocol(name.to_string()),
            TypeKind::Protocol(name.to_string()),
        );
        self.names.entry(name.to_string()).or_insert(id);
        id
    }

    pub fn parameter(&mut self, name: &str, bounds: Vec<TypeId>) -> TypeId {
        let id = self.intern(
            TypeKey::Parameter(name.to_string()),
            TypeKind::Parameter {
                name: name.to_string(),
                bounds,
            },
        );
        self.names.entry(name.to_string()).or_insert(id);
        id
    }

    /// Declares a struct tag; fields are attached by [`define_struct`].
    ///
    /// [`define_struct`]: Self::define_struct
    pub fn declare_struct(&mut self, tag: &str) -> TypeId {
        self.intern(
            TypeKey::Struct(tag.to_string()),
            TypeKind::Struct {
                tag: tag.to_string(),
                fields: Vec::new(),
            },
        )
    }

    pub fn define_struct(
        &mut self,
        id: TypeId,
        fields: Vec<(String, TypeId)>,
    ) -> Result<(), UniverseError> {
        let TypeKind::Struct { tag, fields: slot } = &mut self.types[id.index()].kind else {
            panic!("define_struct on a non-struct type");
        };
        for (i, (name, _)) in fields.iter().enumerate() {
            if fields[..i].iter().any(|(n, _)| n == name) {
                return Err(UniverseError::DuplicateStructField {
                    tag: tag.clone(),
                    field: name.clone(),
                });
            }
        }
        *slot = fields;
        Ok(())
    }

    pub fn pointer(&mut self, pointee: TypeId) -> TypeId {
        self.intern(TypeKey::Pointer(pointee), TypeKind::Pointer(pointee))
    }

    pub fn function(&mut self, args: Vec<(TypeId, bool)>, ret: TypeId) -> TypeId {
        self.intern(
            TypeKey::Function(args.clone(), ret),
            TypeKind::Function { args, ret },
        )
    }

    /// Binds a surface name (typedef) to a type. The first name bound to a
    /// struct becomes its display name.
    pub fn bind_name(&mut self, name: &str, t: TypeId) {
        self.names.insert(name.to_string(), t);
        let desc = &mut self.types[t.index()];
        if matches!(desc.kind, TypeKind::Struct { .. }) && desc.name.is_none() {
            desc.name = Some(name.to_string());
        }
    }

    pub fn lookup_name(&self, name: &str) -> Option<TypeId> {
        self.names.get(name).copied()
    }

    pub fn lookup_struct(&self, tag: &str) -> Option<TypeId> {
        self.keys.get(&TypeKey::Struct(tag.to_string())).copied()
    }

    /// Adds `(a, b)` to the explicitly built relation `label`; `simulation`
    /// selects whether the relation takes part in hierarchy inference.
    pub fn add_pair(
        &mut self,
        label: RelationLabel,
        a: TypeId,
        b: TypeId,
        strengthenable: bool,
        simulation: bool,
    ) {
        let idx = self.ensure_relation(label, simulation);
        self.explicit[idx].0.insert(a, b, strengthenable);
    }

    /// Registers a (possibly empty) relation.
    pub fn ensure_relation(&mut self, label: RelationLabel, simulation: bool) -> usize {
        match self.explicit_index.get(&label) {
            Some(&i) => {
                self.explicit[i].1 |= simulation;
                i
            }
            None => {
                let i = self.explicit.len();
                self.explicit_index.insert(label.clone(), i);
                self.explicit.push((TypeRelation::new(label), simulation));
                i
            }
        }
    }

    /// Derives the structural relations and freezes the universe.
    ///
    /// Relation order: field selects (declaration order), explicit
    /// relations (insertion order), pointer dereference, then argument and
    /// return selection by arity.
    pub fn finish(self) -> TypeUniverse {
        let mut fields: Vec<TypeRelation> = Vec::new();
        let mut field_index: HashMap<String, usize> = HashMap::new();
        let mut deref = TypeRelation::new(RelationLabel::PointerDeref);
        let mut fun: Vec<TypeRelation> = Vec::new();
        let mut fun_index: HashMap<RelationLabel, usize> = HashMap::new();

        for (i, desc) in self.types.iter().enumerate() {
            let t = TypeId(i as u32);
            match &desc.kind {
                TypeKind::Struct { fields: fs, .. } => {
                    for (name, ft) in fs {
                        let idx = *field_index.entry(name.clone()).or_insert_with(|| {
                            fields.push(TypeRelation::new(RelationLabel::FieldSelect(name.clone())));
                            fields.len() - 1
                        });
                        fields[idx].insert(t, *ft, false);
                    }
                }
                TypeKind::Pointer(p) => deref.insert(t, *p, false),
                TypeKind::Function { args, ret } => {
                    let arity = args.len();
                    for (k, (a, _)) in args.iter().enumerate() {
                        let label = RelationLabel::Arg { index: k + 1, arity };
                        let idx = *fun_index.entry(label.clone()).or_insert_with(|| {
                            fun.push(TypeRelation::new(label));
                            fun.len() - 1
                        });
                        fun[idx].insert(t, *a, false);
                    }
                    let label = RelationLabel::Ret { arity };
                    let idx = *fun_index.entry(label.clone()).or_insert_with(|| {
                        fun.push(TypeRelation::new(label));
                        fun.len() - 1
                    });
                    fun[idx].insert(t, *ret, false);
                }
                _ => {}
            }
        }
        fun.sort_by_key(|r| fun_order(&r.label));

        let mut relations = Vec::new();
        let mut in_simulation = Vec::new();
        for r in fields {
            relations.push(r);
            in_simulation.push(true);
        }
        for (r, sim) in self.explicit {
            relations.push(r);
            in_simulation.push(sim);
        }
        if !deref.pairs.is_empty() {
            relations.push(deref);
            in_simulation.push(true);
        }
        for r in fun {
            relations.push(r);
            in_simulation.push(true);
        }
        for r in &mut relations {
            r.normalize();
        }
        let label_index = relations
            .iter()
            .enumerate()
            .map(|(i, r)| (r.label.clone(), i))
            .collect();
        TypeUniverse {
            types: self.types,
            keys: self.keys,
            names: self.names,
            relations,
            in_simulation,
            label_index,
        }
    }
}

fn fun_order(label: &RelationLabel) -> (usize, usize) {
    match label {
        RelationLabel::Arg { index, arity } => (*arity, *index),
        RelationLabel::Ret { arity } => (*arity, usize::MAX),
        _ => (usize::MAX, usize::MAX),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_structural() {
        let mut b = UniverseBuilder::new();
        let int = b.builtin("int");
        let p1 = b.pointer(int);
        let p2 = b.pointer(int);
        assert_eq!(p1, p2);
        let f1 = b.function(vec![(int, true)], int);
        let f2 = b.function(vec![(int, true)], int);
        let f3 = b.function(vec![(int, false)], int);
        assert_eq!(f1, f2);
        assert_ne!(f1, f3);
    }

    #[test]
    fn structural_relations_are_derived() {
        let mut b = UniverseBuilder::new();
        let int = b.builtin("int");
        let s = b.declare_struct("_S");
        b.bind_name("S", s);
        b.define_struct(s, vec![("x".into(), int)]).unwrap();
        let ps = b.pointer(s);
        let f = b.function(vec![(s, true), (int, false)], int);
        let u = b.finish();
        let x = u.lookup_relation(&RelationLabel::FieldSelect("x".into()));
        assert_eq!(x.pairs(), &[(s, int)]);
        assert!(u.lookup_relation(&RelationLabel::PointerDeref).contains(ps, s));
        let arg1 = u.lookup_relation(&RelationLabel::Arg { index: 1, arity: 2 });
        assert_eq!(arg1.pairs(), &[(f, s)]);
        assert!(arg1.is_functional());
        assert_eq!(u.display(f), "int(*)(S+, int)");
        assert_eq!(u.display(ps), "S*");
    }

    #[test]
    fn duplicate_field_is_rejected() {
        let mut b = UniverseBuilder::new();
        let int = b.builtin("int");
        let s = b.declare_struct("_S");
        let err = b
            .define_struct(s, vec![("x".into(), int), ("x".into(), int)])
            .unwrap_err();
        assert_eq!(
            err,
            UniverseError::DuplicateStructField {
                tag: "_S".into(),
                field: "x".into()
            }
        );
    }

    #[test]
    fn absent_label_gives_empty_relation() {
        let u = UniverseBuilder::new().finish();
        assert_eq!(u.len(), 1);
        let r = u.lookup_relation(&RelationLabel::FieldSelect("nosuch".into()));
        assert!(r.is_empty());
    }
}
