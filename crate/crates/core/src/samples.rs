//! The running octonion example and a small reals/lists signature, used by
//! the bundled examples and tests.

use crate::term::{Signature, SignatureEntry, Term, TypeExpr};

pub const OCTO: &str = "Octonions.octo";
pub const TIMES_OCTO: &str = "Octonions.times_octo";
pub const PLUS_OCTO: &str = "Octonions.plus_octo";

pub fn octo() -> TypeExpr {
    TypeExpr::base(OCTO)
}

fn binop_type(t: TypeExpr) -> TypeExpr {
    TypeExpr::curried([t.clone(), t.clone()], t)
}

fn eq_at(t: TypeExpr) -> Term {
    Term::constant("HOL.eq", TypeExpr::curried([t.clone(), t], TypeExpr::bool()))
}

fn times(x: Term, y: Term) -> Term {
    Term::apps(Term::constant(TIMES_OCTO, binop_type(octo())), [x, y])
}

fn plus(x: Term, y: Term) -> Term {
    Term::apps(Term::constant(PLUS_OCTO, binop_type(octo())), [x, y])
}

fn var(name: &str) -> Term {
    Term::free(name, octo())
}

/// `¬(∀x y :: octo. x * y = y * x)`
pub fn octo_product_noncommutative() -> Term {
    let quant = TypeExpr::fun(TypeExpr::fun(octo(), TypeExpr::bool()), TypeExpr::bool());
    let all = |binder: &str, body| {
        Term::app(
            Term::constant("HOL.All", quant.clone()),
            Term::abs(binder, octo(), body),
        )
    };
    let (x, y) = (Term::Bound(1), Term::Bound(0));
    let body = Term::apps(eq_at(octo()), [times(x.clone(), y.clone()), times(y, x)]);
    Term::app(
        Term::constant("HOL.Not", TypeExpr::fun(TypeExpr::bool(), TypeExpr::bool())),
        all("x", all("y", body)),
    )
}

/// `a * (b + c) = a * b + a * c`
pub fn octo_distrib_left() -> Term {
    let (a, b, c) = (var("a"), var("b"), var("c"));
    Term::apps(
        eq_at(octo()),
        [
            times(a.clone(), plus(b.clone(), c.clone())),
            plus(times(a.clone(), b), times(a, c)),
        ],
    )
}

/// `a + (b + c) = (a + b) + c`
pub fn octo_assoc_plus() -> Term {
    let (a, b, c) = (var("a"), var("b"), var("c"));
    Term::apps(
        eq_at(octo()),
        [
            plus(a.clone(), plus(b.clone(), c.clone())),
            plus(plus(a, b), c),
        ],
    )
}

/// Octonion multiplication and addition with short definitions.
pub fn octonion_signature() -> Signature {
    Signature::new(vec![
        SignatureEntry::new(TIMES_OCTO, binop_type(octo()))
            .with_def("x * y = Octo (Re x * Re y - Im1 x * Im1 y - ...)\n  (Re x * Im1 y + Im1 x * Re y + ...) ..."),
        SignatureEntry::new(PLUS_OCTO, binop_type(octo()))
            .with_def("x + y = Octo (Re x + Re y) (Im1 x + Im1 y) ..."),
    ])
    .expect("distinct names")
}

pub fn real() -> TypeExpr {
    TypeExpr::base("Real.real")
}

pub fn nat() -> TypeExpr {
    TypeExpr::base("Nat.nat")
}

pub fn list(t: TypeExpr) -> TypeExpr {
    TypeExpr::con("List.list", vec![t])
}

/// `+`, `-`, `sin`, `cos` and `^` on reals followed by `len`, `rev` and
/// `@` on lists, in that order.
pub fn reals_and_lists() -> Vec<SignatureEntry> {
    let la = || list(TypeExpr::var("a"));
    vec![
        SignatureEntry::new("Real.plus_real", binop_type(real())),
        SignatureEntry::new("Real.minus_real", binop_type(real())),
        SignatureEntry::new("Transcendental.sin", TypeExpr::fun(real(), real())),
        SignatureEntry::new("Transcendental.cos", TypeExpr::fun(real(), real())),
        SignatureEntry::new("Transcendental.powr", binop_type(real())),
        SignatureEntry::new("List.length", TypeExpr::fun(la(), nat())),
        SignatureEntry::new("List.rev", TypeExpr::fun(la(), la())),
        SignatureEntry::new("List.append", binop_type(la())),
    ]
}
