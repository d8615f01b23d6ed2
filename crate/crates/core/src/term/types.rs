//! Simple types and first-order unification over them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Name of the distinguished function type constructor.
pub const FUN: &str = "fun";
/// Boolean type of the object logic.
pub const BOOL: &str = "HOL.bool";
/// Meta-level proposition type.
pub const PROP: &str = "prop";

/// A simple type: a type variable or an applied type constructor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeExpr {
    Var(String),
    Con(String, Vec<TypeExpr>),
}

impl TypeExpr {
    pub fn var(name: impl Into<String>) -> Self {
        TypeExpr::Var(name.into())
    }

    pub fn con(name: impl Into<String>, args: Vec<TypeExpr>) -> Self {
        TypeExpr::Con(name.into(), args)
    }

    /// Nullary type constructor.
    pub fn base(name: impl Into<String>) -> Self {
        TypeExpr::Con(name.into(), Vec::new())
    }

    pub fn fun(dom: TypeExpr, cod: TypeExpr) -> Self {
        TypeExpr::Con(FUN.to_string(), vec![dom, cod])
    }

    /// Curried function type `args[0] ⇒ ... ⇒ args[n-1] ⇒ result`.
    pub fn curried(args: impl IntoIterator<Item = TypeExpr>, result: TypeExpr) -> Self {
        let args: Vec<_> = args.into_iter().collect();
        args.into_iter()
            .rev()
            .fold(result, |acc, arg| TypeExpr::fun(arg, acc))
    }

    pub fn bool() -> Self {
        TypeExpr::base(BOOL)
    }

    pub fn prop() -> Self {
        TypeExpr::base(PROP)
    }

    /// Splits a function type into its domain and codomain.
    pub fn as_fun(&self) -> Option<(&TypeExpr, &TypeExpr)> {
        match self {
            TypeExpr::Con(name, args) if name == FUN && args.len() == 2 => Some((&args[0], &args[1])),
            _ => None,
        }
    }

    /// Number of arguments before a non-function result.
    pub fn arity(&self) -> usize {
        let mut n = 0;
        let mut t = self;
        while let Some((_, cod)) = t.as_fun() {
            n += 1;
            t = cod;
        }
        n
    }

    pub fn is_fun(&self) -> bool {
        self.as_fun().is_some()
    }

    pub fn size(&self) -> usize {
        match self {
            TypeExpr::Var(_) => 1,
            TypeExpr::Con(_, args) => 1 + args.iter().map(TypeExpr::size).sum::<usize>(),
        }
    }

    pub fn occurs(&self, var: &str) -> bool {
        match self {
            TypeExpr::Var(v) => v == var,
            TypeExpr::Con(_, args) => args.iter().any(|a| a.occurs(var)),
        }
    }

    /// Type variables in first-occurrence (pre-order) order, without duplicates.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            TypeExpr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            TypeExpr::Con(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Renames type variables through `f`; variables mapped to `None` are kept.
    pub fn rename_vars(&self, f: &mut impl FnMut(&str) -> Option<String>) -> TypeExpr {
        match self {
            TypeExpr::Var(v) => TypeExpr::Var(f(v).unwrap_or_else(|| v.clone())),
            TypeExpr::Con(name, args) => {
                TypeExpr::Con(name.clone(), args.iter().map(|a| a.rename_vars(f)).collect())
            }
        }
    }

    /// Collects `name -> arity` for every constructor, reporting the first inconsistency.
    pub fn constructor_arities(
        &self,
        table: &mut BTreeMap<String, usize>,
    ) -> Result<(), (String, usize, usize)> {
        if let TypeExpr::Con(name, args) = self {
            match table.get(name) {
                Some(&n) if n != args.len() => return Err((name.clone(), n, args.len())),
                Some(_) => {}
                None => {
                    table.insert(name.clone(), args.len());
                }
            }
            for a in args {
                a.constructor_arities(table)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for TypeExpr {
    /// Isabelle-flavoured display: `'a`, `nat list`, `'a ⇒ 'b`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn short(name: &str) -> &str {
            name.rsplit('.').next().unwrap_or(name)
        }
        fn go(t: &TypeExpr, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
            match t {
                TypeExpr::Var(v) => write!(f, "'{v}"),
                TypeExpr::Con(_, _) if t.is_fun() => {
                    let (d, c) = t.as_fun().unwrap();
                    if nested {
                        write!(f, "(")?;
                    }
                    go(d, f, true)?;
                    write!(f, " ⇒ ")?;
                    go(c, f, false)?;
                    if nested {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
                TypeExpr::Con(name, args) => match args.len() {
                    0 => write!(f, "{}", short(name)),
                    1 => {
                        go(&args[0], f, true)?;
                        write!(f, " {}", short(name))
                    }
                    _ => {
                        write!(f, "(")?;
                        for (i, a) in args.iter().enumerate() {
                            if i > 0 {
                                write!(f, ", ")?;
                            }
                            go(a, f, false)?;
                        }
                        write!(f, ") {}", short(name))
                    }
                },
            }
        }
        go(self, f, false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("cannot unify type constructors {0} and {1}")]
    Clash(String, String),
    #[error("type variable '{0} occurs in {1}")]
    OccursCheck(String, TypeExpr),
}

/// Finite map from type variables to types, kept fully resolved so that
/// applying it is idempotent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeSubstitution {
    map: BTreeMap<String, TypeExpr>,
}

impl TypeSubstitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<&TypeExpr> {
        self.map.get(var)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &TypeExpr)> {
        self.map.iter()
    }

    pub fn domain(&self) -> BTreeSet<&str> {
        self.map.keys().map(String::as_str).collect()
    }

    pub fn apply(&self, t: &TypeExpr) -> TypeExpr {
        if self.map.is_empty() {
            return t.clone();
        }
        match t {
            TypeExpr::Var(v) => match self.map.get(v) {
                Some(bound) => bound.clone(),
                None => t.clone(),
            },
            TypeExpr::Con(name, args) => {
                TypeExpr::Con(name.clone(), args.iter().map(|a| self.apply(a)).collect())
            }
        }
    }

    /// Binds `var` to `t` (which must already be resolved against `self`),
    /// keeping the substitution resolved.
    fn bind(&mut self, var: &str, t: TypeExpr) -> Result<(), UnifyError> {
        if let TypeExpr::Var(v) = &t {
            if v == var {
                return Ok(());
            }
        }
        if t.occurs(var) {
            return Err(UnifyError::OccursCheck(var.to_string(), t));
        }
        let single = TypeSubstitution {
            map: BTreeMap::from([(var.to_string(), t.clone())]),
        };
        for bound in self.map.values_mut() {
            if bound.occurs(var) {
                *bound = single.apply(bound);
            }
        }
        self.map.insert(var.to_string(), t);
        Ok(())
    }

    /// Extends `self` so that it also unifies `a` and `b`. On failure `self`
    /// may be partially extended; callers that backtrack keep a copy.
    pub fn unify(&mut self, a: &TypeExpr, b: &TypeExpr) -> Result<(), UnifyError> {
        let a = self.apply(a);
        let b = self.apply(b);
        match (&a, &b) {
            (TypeExpr::Var(x), TypeExpr::Var(y)) if x == y => Ok(()),
            (TypeExpr::Var(x), _) => self.bind(x, b.clone()),
            (_, TypeExpr::Var(y)) => self.bind(y, a.clone()),
            (TypeExpr::Con(f, xs), TypeExpr::Con(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return Err(UnifyError::Clash(f.clone(), g.clone()));
                }
                for (x, y) in xs.iter().zip(ys) {
                    self.unify(x, y)?;
                }
                Ok(())
            }
        }
    }

    /// Composition: applying the result equals applying `self` then `other`.
    pub fn compose(&self, other: &TypeSubstitution) -> TypeSubstitution {
        let mut map: BTreeMap<String, TypeExpr> =
            self.map.iter().map(|(k, v)| (k.clone(), other.apply(v))).collect();
        for (k, v) in &other.map {
            map.entry(k.clone()).or_insert_with(|| v.clone());
        }
        map.retain(|k, v| !matches!(v, TypeExpr::Var(x) if x == k));
        TypeSubstitution { map }
    }
}

impl FromIterator<(String, TypeExpr)> for TypeSubstitution {
    /// Builds a substitution from raw bindings; the result is not resolved.
    fn from_iter<I: IntoIterator<Item = (String, TypeExpr)>>(iter: I) -> Self {
        TypeSubstitution {
            map: iter.into_iter().collect(),
        }
    }
}

/// Most general unifier of two types.
pub fn unify_types(a: &TypeExpr, b: &TypeExpr) -> Result<TypeSubstitution, UnifyError> {
    let mut s = TypeSubstitution::new();
    s.unify(a, b)?;
    Ok(s)
}
