use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::diag::{Diagnostic, Span, Stage};

use super::ast::*;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("cyclic instantiation of `{0}`")]
    CyclicInstantiation(String),
    #[error("`{0}` is not a parameter type of the instantiated definition")]
    UnknownParameter(String),
    #[error("unknown type `{0}`")]
    UnresolvedName(String),
}

impl ExpandError {
    pub fn to_diagnostic(&self, span: Span) -> Diagnostic {
        Diagnostic::error(Stage::Expand, span, self.to_string())
    }
}

/// One expanded `typedef Base<C P, ...> Name;`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instantiation {
    pub name: Ident,
    pub base: Ident,
    pub substitutions: Vec<(TypeExpr, Ident)>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    /// The program with every parameterized typedef replaced by plain
    /// struct and typedef declarations.
    pub program: Program,
    pub instantiations: Vec<Instantiation>,
}

/// Replaces each parameterized typedef by clones of the definitions it
/// depends on, with parameter types substituted and names rewritten.
pub fn expand_param_typedefs(p: &Program) -> Result<Expansion, (ExpandError, Span)> {
    let mut ex = Expander {
        params: HashSet::new(),
        typedefs: HashMap::new(),
        structs: HashMap::new(),
        pending: HashMap::new(),
        visiting: HashSet::new(),
        done: HashSet::new(),
        out: Vec::new(),
        instantiations: Vec::new(),
    };
    for d in &p.decls {
        match d {
            Decl::Parameter { name, .. } => {
                ex.params.insert(name.name.clone());
            }
            Decl::ParamTypedef(t) => {
                ex.pending.insert(t.name.name.clone(), t.clone());
            }
            _ => {}
        }
    }
    for d in &p.decls {
        match d {
            Decl::ParamTypedef(t) => ex.expand(&t.name.name)?,
            other => ex.emit(other.clone()),
        }
    }
    Ok(Expansion {
        program: Program { decls: ex.out },
        instantiations: ex.instantiations,
    })
}

struct Expander {
    params: HashSet<String>,
    typedefs: HashMap<String, TypedefDecl>,
    structs: HashMap<String, StructDecl>,
    pending: HashMap<String, ParamTypedefDecl>,
    visiting: HashSet<String>,
    done: HashSet<String>,
    out: Vec<Decl>,
    instantiations: Vec<Instantiation>,
}

/// A struct or typedef reached from the instantiated definition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Dep {
    Struct(String),
    Typedef(String),
}

impl Expander {
    fn emit(&mut self, d: Decl) {
        match &d {
            Decl::Typedef(t) => {
                self.typedefs.insert(t.name.name.clone(), t.clone());
            }
            Decl::Struct(s) => {
                self.structs.insert(s.tag.name.clone(), s.clone());
            }
            _ => {}
        }
        self.out.push(d);
    }

    fn expand(&mut self, name: &str) -> Result<(), (ExpandError, Span)> {
        if self.done.contains(name) {
            return Ok(());
        }
        let t = self.pending[name].clone();
        if !self.visiting.insert(name.to_string()) {
            return Err((ExpandError::CyclicInstantiation(name.to_string()), t.span));
        }
        let base = t.base.name.clone();
        if self.pending.contains_key(&base) {
            self.expand(&base)?;
        }
        if !self.typedefs.contains_key(&base) {
            return Err((ExpandError::UnresolvedName(base), t.base.span));
        }

        let closure = self.closure(&base);
        let subst: HashMap<String, TypeExpr> = t
            .substitutions
            .iter()
            .map(|(ty, p)| (p.name.clone(), ty.clone()))
            .collect();
        for (_, p) in &t.substitutions {
            let used = closure.iter().any(|d| self.mentions_directly(d, &p.name));
            if !self.params.contains(&p.name) || !used {
                return Err((ExpandError::UnknownParameter(p.name.clone()), p.span));
            }
        }

        // Clone the root and everything that (transitively) mentions a
        // substituted parameter.
        let mut cloned: HashSet<Dep> = HashSet::new();
        cloned.insert(Dep::Typedef(base.clone()));
        // The root typedef's struct is renamed after the new name as well.
        if let Some(Dep::Struct(tag)) = self.deps(&Dep::Typedef(base.clone())).first() {
            cloned.insert(Dep::Struct(tag.clone()));
        }
        loop {
            let before = cloned.len();
            for d in &closure {
                if cloned.contains(d) {
                    continue;
                }
                let hit = subst.keys().any(|p| self.mentions_directly(d, p))
                    || self.deps(d).iter().any(|x| cloned.contains(x));
                if hit {
                    cloned.insert(d.clone());
                }
            }
            if cloned.len() == before {
                break;
            }
        }

        let new = t.name.name.clone();
        let rename = |old: &str| {
            if old == base {
                new.clone()
            } else if old.contains(base.as_str()) {
                old.replace(base.as_str(), &new)
            } else {
                format!("{old}_{new}")
            }
        };
        let mut names: HashMap<Dep, String> = HashMap::new();
        for d in &cloned {
            let old = match d {
                Dep::Struct(s) | Dep::Typedef(s) => s,
            };
            names.insert(d.clone(), rename(old));
        }

        for d in &closure {
            if !cloned.contains(d) {
                continue;
            }
            let decl = match d {
                Dep::Struct(tag) => {
                    let s = &self.structs[tag];
                    Decl::Struct(StructDecl {
                        tag: Ident::synthetic(names[d].clone()),
                        fields: s
                            .fields
                            .iter()
                            .map(|f| Field {
                                ty: substitute(&f.ty, &subst, &names),
                                name: Ident::synthetic(f.name.name.clone()),
                            })
                            .collect(),
                        span: Span::synthetic(),
                    })
                }
                Dep::Typedef(n) => {
                    let td = &self.typedefs[n];
                    Decl::Typedef(TypedefDecl {
                        ty: substitute(&td.ty, &subst, &names),
                        name: Ident::synthetic(names[d].clone()),
                        span: Span::synthetic(),
                    })
                }
            };
            self.emit(decl);
        }

        self.instantiations.push(Instantiation {
            name: t.name.clone(),
            base: t.base.clone(),
            substitutions: t.substitutions.clone(),
            span: t.span,
        });
        self.visiting.remove(name);
        self.done.insert(name.to_string());
        Ok(())
    }

    fn dep_of(&self, ty: &TypeExpr) -> Option<Dep> {
        match &ty.base {
            BaseType::Struct(tag) if self.structs.contains_key(tag) => Some(Dep::Struct(tag.clone())),
            BaseType::Named(n) if self.typedefs.contains_key(n) => Some(Dep::Typedef(n.clone())),
            _ => None,
        }
    }

    fn deps(&self, d: &Dep) -> Vec<Dep> {
        match d {
            Dep::Struct(tag) => self.structs[tag]
                .fields
                .iter()
                .filter_map(|f| self.dep_of(&f.ty))
                .collect(),
            Dep::Typedef(n) => self.dep_of(&self.typedefs[n].ty).into_iter().collect(),
        }
    }

    fn mentions_directly(&self, d: &Dep, param: &str) -> bool {
        let named = |ty: &TypeExpr| matches!(&ty.base, BaseType::Named(n) if n == param);
        match d {
            Dep::Struct(tag) => self.structs[tag].fields.iter().any(|f| named(&f.ty)),
            Dep::Typedef(n) => named(&self.typedefs[n].ty),
        }
    }

    /// Definitions reachable from typedef `root`, dependencies first.
    fn closure(&self, root: &str) -> Vec<Dep> {
        let mut order = Vec::new();
        let mut seen = HashSet::new();
        self.visit(Dep::Typedef(root.to_string()), &mut seen, &mut order);
        order
    }

    fn visit(&self, d: Dep, seen: &mut HashSet<Dep>, order: &mut Vec<Dep>) {
        if !seen.insert(d.clone()) {
            return;
        }
        for x in self.deps(&d) {
            self.visit(x, seen, order);
        }
        order.push(d);
    }
}

fn substitute(ty: &TypeExpr, subst: &HashMap<String, TypeExpr>, names: &HashMap<Dep, String>) -> TypeExpr {
    let mut out = ty.clone();
    out.base_span = Span::synthetic();
    match &ty.base {
        BaseType::Named(n) => {
            if let Some(c) = subst.get(n) {
                out.base = c.base.clone();
                out.strengthenable |= c.strengthenable;
                out.pointers += c.pointers;
            } else if let Some(new) = names.get(&Dep::Typedef(n.clone())) {
                out.base = BaseType::Named(new.clone());
            }
        }
        BaseType::Struct(tag) => {
            if let Some(new) = names.get(&Dep::Struct(tag.clone())) {
                out.base = BaseType::Struct(new.clone());
            }
        }
    }
    out
}
