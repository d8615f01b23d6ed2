//! Alpha equivalence: equality up to binder names and consistent bijective
//! renaming of free variables and type variables.

use std::collections::HashMap;

use super::sexp::render_term;
use super::term::Term;
use super::types::TypeExpr;

/// Partial bijection grown while walking two terms in parallel.
#[derive(Default)]
struct Bijection<'a> {
    fwd: HashMap<&'a str, &'a str>,
    bwd: HashMap<&'a str, &'a str>,
}

impl<'a> Bijection<'a> {
    fn relate(&mut self, x: &'a str, y: &'a str) -> bool {
        match (self.fwd.get(x), self.bwd.get(y)) {
            (Some(&fy), Some(&bx)) => fy == y && bx == x,
            (None, None) => {
                self.fwd.insert(x, y);
                self.bwd.insert(y, x);
                true
            }
            _ => false,
        }
    }
}

#[derive(Default)]
struct AlphaState<'a> {
    frees: Bijection<'a>,
    tvars: Bijection<'a>,
}

impl<'a> AlphaState<'a> {
    fn types(&mut self, a: &'a TypeExpr, b: &'a TypeExpr) -> bool {
        match (a, b) {
            (TypeExpr::Var(x), TypeExpr::Var(y)) => self.tvars.relate(x, y),
            (TypeExpr::Con(f, xs), TypeExpr::Con(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.types(x, y))
            }
            _ => false,
        }
    }

    fn terms(&mut self, a: &'a Term, b: &'a Term) -> bool {
        match (a, b) {
            (Term::Const { name: n, ty: s }, Term::Const { name: m, ty: t }) => n == m && self.types(s, t),
            (Term::Free { name: n, ty: s }, Term::Free { name: m, ty: t }) => {
                self.frees.relate(n, m) && self.types(s, t)
            }
            (Term::Bound(i), Term::Bound(j)) => i == j,
            (Term::Abs { ty: s, body: p, .. }, Term::Abs { ty: t, body: q, .. }) => {
                self.types(s, t) && self.terms(p, q)
            }
            (Term::App(f, x), Term::App(g, y)) => self.terms(f, g) && self.terms(x, y),
            (Term::Hole { index: i, ty: s }, Term::Hole { index: j, ty: t }) => i == j && self.types(s, t),
            _ => false,
        }
    }
}

/// True iff `a` and `b` differ only in binder names and by bijective
/// renamings of free variables and of type variables.
pub fn alpha_equal(a: &Term, b: &Term) -> bool {
    AlphaState::default().terms(a, b)
}

/// A string that is equal for two terms exactly when they are alpha equal.
pub fn alpha_key(t: &Term) -> String {
    let frees = t.free_names();
    let renamed = t.map_bottom_up(&mut |node| match node {
        Term::Free { name, ty } => {
            let i = frees.iter().position(|f| *f == name).unwrap_or(0);
            Term::Free { name: format!("v{i}"), ty }
        }
        Term::Abs { ty, body, .. } => Term::Abs {
            binder: String::new(),
            ty,
            body,
        },
        other => other,
    });
    render_term(&renamed.canonicalize_type_vars())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real() -> TypeExpr {
        TypeExpr::base("Real.real")
    }

    fn plus(x: Term, y: Term) -> Term {
        let r = real();
        Term::apps(
            Term::constant("Groups.plus", TypeExpr::curried([r.clone(), r.clone()], r)),
            [x, y],
        )
    }

    fn eq(x: Term, y: Term) -> Term {
        let r = real();
        Term::apps(
            Term::constant("HOL.eq", TypeExpr::curried([r.clone(), r], TypeExpr::bool())),
            [x, y],
        )
    }

    fn v(n: &str) -> Term {
        Term::free(n, real())
    }

    #[test]
    fn associativity_under_renaming() {
        let abc = eq(plus(v("a"), plus(v("b"), v("c"))), plus(plus(v("a"), v("b")), v("c")));
        let xyz = eq(plus(v("x"), plus(v("y"), v("z"))), plus(plus(v("x"), v("y")), v("z")));
        assert!(alpha_equal(&abc, &xyz));
        assert_eq!(alpha_key(&abc), alpha_key(&xyz));
    }

    #[test]
    fn swapped_arguments_are_distinct() {
        // On their own, a + b and b + a are related by the swap a<->b.
        assert!(alpha_equal(&plus(v("a"), v("b")), &plus(v("b"), v("a"))));
        // Pinning a elsewhere makes the swap conflict with a -> a.
        assert!(!alpha_equal(
            &eq(plus(v("a"), v("b")), v("a")),
            &eq(plus(v("b"), v("a")), v("a"))
        ));
        let lhs = eq(plus(v("a"), v("b")), plus(v("a"), v("b")));
        let rhs = eq(plus(v("a"), v("b")), plus(v("b"), v("a")));
        assert!(!alpha_equal(&lhs, &rhs));
    }

    #[test]
    fn binder_names_ignored_types_are_not() {
        let a = Term::abs("x", TypeExpr::var("a"), Term::Bound(0));
        let b = Term::abs("y", TypeExpr::var("b"), Term::Bound(0));
        let c = Term::abs("y", real(), Term::Bound(0));
        assert!(alpha_equal(&a, &b));
        assert!(!alpha_equal(&a, &c));
    }

    #[test]
    fn type_variable_renaming_must_be_bijective() {
        let two = TypeExpr::fun(TypeExpr::var("a"), TypeExpr::var("b"));
        let one = TypeExpr::fun(TypeExpr::var("c"), TypeExpr::var("c"));
        assert!(!alpha_equal(&Term::free("f", two.clone()), &Term::free("f", one.clone())));
        assert!(!alpha_equal(&Term::free("f", one), &Term::free("f", two)));
    }
}
