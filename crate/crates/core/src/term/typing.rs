//! Principal-type inference for terms.
//!
//! Constant annotations are instance types whose type variables belong to
//! the term; signature schemes are renamed apart for every occurrence. Hole
//! annotations behave like schemes: each occurrence gets a fresh copy.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::signature::Signature;
use super::term::Term;
use super::types::{TypeExpr, TypeSubstitution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStep {
    Fun,
    Arg,
    Body,
}

/// Position of a subterm, as the steps taken from the root.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermPath(pub Vec<PathStep>);

impl fmt::Display for TermPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<&str> = self
            .0
            .iter()
            .map(|s| match s {
                PathStep::Fun => "fun",
                PathStep::Arg => "arg",
                PathStep::Body => "body",
            })
            .collect();
        f.write_str(&parts.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unknown constant {0}")]
    UnknownConstant(String),
    #[error("type mismatch at {path}: expected {expected}, found {found}")]
    TypeMismatch {
        path: TermPath,
        expected: TypeExpr,
        found: TypeExpr,
    },
    #[error("bound index {0} is not under enough binders")]
    UnboundIndex(u32),
}

/// How constants are typed.
#[derive(Clone, Copy)]
pub(crate) enum ConstTyping<'a> {
    /// Every constant must be in the signature.
    Strict(&'a Signature),
    /// Constants are typed by their annotation alone.
    Annotated,
    /// Signature constants are checked; others are typed by annotation.
    Fallback(&'a Signature),
}

pub(crate) struct Inference<'a> {
    consts: ConstTyping<'a>,
    pub(crate) subst: TypeSubstitution,
    fresh: u32,
    frees: HashMap<String, TypeExpr>,
    /// `(hole index, occurrence type)` in pre-order.
    pub(crate) hole_occurrences: Vec<(u32, TypeExpr)>,
}

impl<'a> Inference<'a> {
    pub(crate) fn new(consts: ConstTyping<'a>) -> Self {
        Inference {
            consts,
            subst: TypeSubstitution::new(),
            fresh: 0,
            frees: HashMap::new(),
            hole_occurrences: Vec::new(),
        }
    }

    pub(crate) fn fresh_var(&mut self) -> TypeExpr {
        self.fresh += 1;
        TypeExpr::Var(format!("?{}", self.fresh))
    }

    /// Copy of `scheme` with all of its variables renamed apart.
    pub(crate) fn instantiate_scheme(&mut self, scheme: &TypeExpr) -> TypeExpr {
        let vars = scheme.vars();
        if vars.is_empty() {
            return scheme.clone();
        }
        let renamed: Vec<(String, String)> = vars
            .into_iter()
            .map(|v| {
                self.fresh += 1;
                (v, format!("?{}", self.fresh))
            })
            .collect();
        scheme.rename_vars(&mut |v| {
            renamed
                .iter()
                .find(|(old, _)| old == v)
                .map(|(_, new)| new.clone())
        })
    }

    fn mismatch(&self, path: &[PathStep], expected: &TypeExpr, found: &TypeExpr) -> TypeError {
        TypeError::TypeMismatch {
            path: TermPath(path.to_vec()),
            expected: self.subst.apply(expected),
            found: self.subst.apply(found),
        }
    }

    pub(crate) fn infer(&mut self, t: &Term) -> Result<TypeExpr, TypeError> {
        let mut ctx = Vec::new();
        let mut path = Vec::new();
        let ty = self.go(t, &mut ctx, &mut path)?;
        Ok(self.subst.apply(&ty))
    }

    fn go(
        &mut self,
        t: &Term,
        ctx: &mut Vec<TypeExpr>,
        path: &mut Vec<PathStep>,
    ) -> Result<TypeExpr, TypeError> {
        match t {
            Term::Const { name, ty } => {
                let entry = match self.consts {
                    ConstTyping::Strict(sig) => {
                        Some(sig.get(name).ok_or_else(|| TypeError::UnknownConstant(name.clone()))?)
                    }
                    ConstTyping::Fallback(sig) => sig.get(name),
                    ConstTyping::Annotated => None,
                };
                if let Some(entry) = entry {
                    let inst = self.instantiate_scheme(&entry.ty);
                    if self.subst.unify(&inst, ty).is_err() {
                        return Err(self.mismatch(path, &inst, ty));
                    }
                }
                Ok(ty.clone())
            }
            Term::Free { name, ty } => {
                if let Some(prev) = self.frees.get(name).cloned() {
                    if self.subst.unify(&prev, ty).is_err() {
                        return Err(self.mismatch(path, &prev, ty));
                    }
                } else {
                    self.frees.insert(name.clone(), ty.clone());
                }
                Ok(ty.clone())
            }
            Term::Bound(i) => {
                let i_us = *i as usize;
                if i_us >= ctx.len() {
                    return Err(TypeError::UnboundIndex(*i));
                }
                Ok(ctx[ctx.len() - 1 - i_us].clone())
            }
            Term::Abs { ty, body, .. } => {
                ctx.push(ty.clone());
                path.push(PathStep::Body);
                let body_ty = self.go(body, ctx, path);
                path.pop();
                ctx.pop();
                Ok(TypeExpr::fun(ty.clone(), body_ty?))
            }
            Term::App(f, x) => {
                path.push(PathStep::Fun);
                let f_ty = self.go(f, ctx, path)?;
                path.pop();
                path.push(PathStep::Arg);
                let x_ty = self.go(x, ctx, path)?;
                let f_ty = self.subst.apply(&f_ty);
                let result = match f_ty.as_fun() {
                    Some((dom, cod)) => {
                        if self.subst.unify(dom, &x_ty).is_err() {
                            return Err(self.mismatch(path, dom, &x_ty));
                        }
                        cod.clone()
                    }
                    None => {
                        path.pop();
                        let r = self.fresh_var();
                        let want = TypeExpr::fun(x_ty, r.clone());
                        if self.subst.unify(&f_ty, &want).is_err() {
                            path.push(PathStep::Fun);
                            let e = self.mismatch(path, &want, &f_ty);
                            path.pop();
                            return Err(e);
                        }
                        path.push(PathStep::Arg);
                        r
                    }
                };
                path.pop();
                Ok(result)
            }
            Term::Hole { index, ty } => {
                let occ = self.instantiate_scheme(ty);
                self.hole_occurrences.push((*index, occ.clone()));
                Ok(occ)
            }
        }
    }
}

/// Principal type of `t`; every constant must be declared in `sig`.
pub fn typecheck(t: &Term, sig: &Signature) -> Result<TypeExpr, TypeError> {
    Inference::new(ConstTyping::Strict(sig)).infer(t)
}

/// Principal type of `t`, typing every constant by its annotation.
pub fn typecheck_annotated(t: &Term) -> Result<TypeExpr, TypeError> {
    Inference::new(ConstTyping::Annotated).infer(t)
}

/// Principal type of `t`, checking constants found in `sig` against their
/// schemes and typing the rest by annotation.
pub fn typecheck_lenient(t: &Term, sig: &Signature) -> Result<TypeExpr, TypeError> {
    Inference::new(ConstTyping::Fallback(sig)).infer(t)
}
