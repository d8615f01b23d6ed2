//! Instantiates associativity with integer operations, then tests each
//! conjecture over integers mod 101. The totient function on 1..50 is
//! shown not to be monotone.

use lemmanaid::evaluation::categorize;
use lemmanaid::instantiation::{instantiate, Budget};
use lemmanaid::quickspec::{find_counterexample, InterpretedSignature, Testable, Valuation, Value};
use lemmanaid::samples;
use lemmanaid::templates::{abstract_lemma, default_whitelist};
use lemmanaid::term::{pretty, SignatureEntry, Term, TypeExpr};

fn main() {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let ints = InterpretedSignature::from_file(format!("{data}/int_mod101.json")).unwrap();
    let int = TypeExpr::base("Int.int");
    let binop = TypeExpr::curried([int.clone(), int.clone()], int.clone());
    let symbols: Vec<SignatureEntry> = ["plus", "minus", "times", "power"]
        .iter()
        .map(|n| SignatureEntry::new(format!("Groups.{n}"), binop.clone()))
        .collect();
    let tpl = abstract_lemma(&samples::octo_assoc_plus(), &default_whitelist()).unwrap();
    let terms: Vec<Term> = instantiate(&tpl, &symbols, Budget::default())
        .unwrap()
        .conjectures
        .into_iter()
        .map(|c| c.term)
        .collect();
    let gold = terms[0].clone();
    let (_, labels) = categorize(&terms, &gold, Some(&ints), 400, 0);
    for (t, label) in terms.iter().zip(&labels) {
        println!("{label:?}: {}", pretty(t));
    }

    let totient = InterpretedSignature::from_file(format!("{data}/totient.json")).unwrap();
    let nat = TypeExpr::base("nat");
    let phi = |x: Term| Term::app(Term::constant("totient", TypeExpr::fun(nat.clone(), nat.clone())), x);
    let le = Term::constant(
        "Orderings.ord_class.less_eq",
        TypeExpr::curried([nat.clone(), nat.clone()], TypeExpr::bool()),
    );
    let imp = Term::constant(
        "HOL.implies",
        TypeExpr::curried([TypeExpr::bool(), TypeExpr::bool()], TypeExpr::bool()),
    );
    let (x1, x2) = (Term::free("x1", nat.clone()), Term::free("x2", nat.clone()));
    let eq = Term::apps(
        imp,
        [
            Term::apps(le.clone(), [x1.clone(), x2.clone()]),
            Term::apps(le, [phi(x1), phi(x2)]),
        ],
    );
    println!("claim: {}", pretty(&eq));
    let testable = Testable::prepare(&eq, &totient).unwrap();
    if let Some(cex) = find_counterexample(&eq, &totient, 400, 0).unwrap() {
        println!("counterexample: {}", testable.describe(&cex));
    }
    let mut v = Valuation::default();
    v.insert("nat", 0, Value::Int(21));
    v.insert("nat", 1, Value::Int(22));
    println!("{}: holds = {}", testable.describe(&v), testable.holds(&v).unwrap());
}
