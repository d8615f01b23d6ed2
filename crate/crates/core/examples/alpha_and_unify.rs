//! Type unification and alpha equivalence on small examples.

use lemmanaid::samples;
use lemmanaid::term::{alpha_equal, alpha_key, unify_types, Term, TypeExpr};

fn main() {
    let a = TypeExpr::var("a");
    let list_a = samples::list(a.clone());
    let left = TypeExpr::curried([list_a.clone(), TypeExpr::var("b")], list_a);
    let right = TypeExpr::curried([samples::list(samples::nat()), samples::nat()], TypeExpr::var("c"));
    match unify_types(&left, &right) {
        Ok(s) => {
            println!("{left}  ~  {right}");
            for (v, t) in s.iter() {
                println!("  {v} := {t}");
            }
            println!("  both become {}", s.apply(&left));
        }
        Err(e) => println!("no unifier: {e}"),
    }
    println!("a ~ a list: {:?}", unify_types(&a, &samples::list(a.clone())).err());

    let f = |x: &str, y: &str, t: TypeExpr| {
        Term::apps(
            Term::constant("f", TypeExpr::curried([t.clone(), t.clone()], t.clone())),
            [Term::free(x, t.clone()), Term::free(y, t)],
        )
    };
    let t1 = f("x", "y", TypeExpr::var("a"));
    let t2 = f("u", "v", TypeExpr::var("b"));
    let t3 = f("x", "x", TypeExpr::var("a"));
    println!("f x y ~ f u v: {}", alpha_equal(&t1, &t2));
    println!("f x y ~ f x x: {}", alpha_equal(&t1, &t3));
    println!("key: {}", alpha_key(&t1));
}
