mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::instance_of;
use lemmanaid::quickspec::{
    baseline_precision, emit_laws, enumerate_terms, explore, find_counterexample, modular_arithmetic,
    test_partition, InterpretedSignature, Law, Testable, Valuation, Value,
};
use lemmanaid::term::{pretty, Term, TypeExpr};
use proptest::prelude::*;

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn lists() -> InterpretedSignature {
    InterpretedSignature::from_file(data("lists.json")).unwrap()
}

/// Terms by (size, sort), built by choosing a symbol and splitting the
/// remaining size among its arguments in every possible way.
fn oracle_terms(sig: &InterpretedSignature, max_size: usize) -> Vec<Term> {
    let mut table: BTreeMap<(usize, usize), Vec<Term>> = BTreeMap::new();
    let vars: Vec<(usize, Term)> = sig.variables().into_iter().map(|(s, _, t)| (s, t)).collect();
    for size in 1..=max_size {
        for sort in 0..sig.sorts.len() {
            let mut here = Vec::new();
            if size == 1 {
                here.extend(vars.iter().filter(|(s, _)| *s == sort).map(|(_, t)| t.clone()));
            }
            for sym in sig.symbols.iter().filter(|s| s.result == sort) {
                let mut partial: Vec<(usize, Term)> = vec![(1, sym.constant())];
                for arg in &sym.args {
                    let mut next = Vec::new();
                    for (used, f) in &partial {
                        for k in 1..=max_size {
                            if used + k > size {
                                break;
                            }
                            for a in table.get(&(k, *arg)).into_iter().flatten() {
                                next.push((used + k, Term::app(f.clone(), a.clone())));
                            }
                        }
                    }
                    partial = next;
                }
                here.extend(partial.into_iter().filter(|(n, _)| *n == size).map(|(_, t)| t));
            }
            table.insert((size, sort), here);
        }
    }
    table.into_values().flatten().collect()
}

#[test]
fn enumeration_matches_oracle_up_to_size_four() {
    for sig in [lists(), modular_arithmetic(7, 2)] {
        for max in 1..=4 {
            let got = enumerate_terms(&sig, max);
            let distinct: BTreeSet<String> = got.iter().map(|t| format!("{t}")).collect();
            assert_eq!(distinct.len(), got.len(), "duplicates at size {max}");
            let want: BTreeSet<String> = oracle_terms(&sig, max).iter().map(|t| format!("{t}")).collect();
            assert_eq!(distinct, want, "max size {max}");
        }
    }
}

fn class_index(classes: &[lemmanaid::quickspec::EquivalenceClass]) -> BTreeMap<String, usize> {
    classes
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.members.iter().map(move |t| (format!("{t}"), i)))
        .collect()
}

#[test]
fn more_tests_refine_the_partition() {
    let sig = lists();
    let terms = enumerate_terms(&sig, 4);
    let coarse = class_index(&test_partition(&terms, &sig, 10, 3));
    let fine_classes = test_partition(&terms, &sig, 400, 3);
    for c in &fine_classes {
        let owners: BTreeSet<usize> = c.members.iter().map(|t| coarse[&format!("{t}")]).collect();
        assert_eq!(owners.len(), 1, "class {:?} split by fewer tests", c.members.iter().map(pretty).collect::<Vec<_>>());
    }
}

#[test]
fn emitted_laws_survive_retesting_and_are_not_instances() {
    let sig = lists();
    let laws = explore(&sig, 5, 400, 0);
    assert!(!laws.is_empty());
    for law in &laws {
        assert_eq!(find_counterexample(&law.equation(), &sig, 400, 0).unwrap(), None, "{law}");
    }
    for (j, later) in laws.iter().enumerate() {
        for earlier in &laws[..j] {
            assert!(!instance_of(earlier, later), "{later} is an instance of {earlier}");
        }
    }
    let sizes: Vec<usize> = laws.iter().map(|l| l.size).collect();
    assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn laws_are_reproducible_from_the_seed() {
    let sig = lists();
    let a: Vec<String> = explore(&sig, 4, 100, 9).iter().map(|l| l.to_string()).collect();
    let b: Vec<String> = explore(&sig, 4, 100, 9).iter().map(|l| l.to_string()).collect();
    assert_eq!(a, b);
    assert!(emit_laws(&[]).is_empty());
}

/// `(x1 op x2) op x3 = x1 op (x2 op x3)` over integers mod 101.
fn mod101_assoc(op: usize) -> Term {
    let sig = modular_arithmetic(101, 3);
    let int = sig.sorts[0].ty();
    let f = |a: Term, b: Term| Term::apps(sig.symbols[op].constant(), [a, b]);
    let x = |i: usize| Term::free(format!("x{i}"), int.clone());
    Law::new(f(f(x(1), x(2)), x(3)), f(x(1), f(x(2), x(3)))).equation()
}

#[test]
fn associativity_over_integers_mod_101() {
    let sig = modular_arithmetic(101, 3);
    assert_eq!(find_counterexample(&mod101_assoc(0), &sig, 400, 0).unwrap(), None);
    assert_eq!(find_counterexample(&mod101_assoc(2), &sig, 400, 0).unwrap(), None);
    for op in [1, 3] {
        let eq = mod101_assoc(op);
        let cex = find_counterexample(&eq, &sig, 400, 0).unwrap().expect("false law");
        assert!(!Testable::prepare(&eq, &sig).unwrap().holds(&cex).unwrap());
    }
}

fn totient_monotone() -> (InterpretedSignature, Term) {
    let sig = InterpretedSignature::from_file(data("totient.json")).unwrap();
    let nat = TypeExpr::base("nat");
    let phi = |x: Term| Term::app(Term::constant("totient", TypeExpr::fun(nat.clone(), nat.clone())), x);
    let le = || Term::constant("Orderings.ord_class.less_eq", TypeExpr::curried([nat.clone(), nat.clone()], TypeExpr::bool()));
    let imp = Term::constant("HOL.implies", TypeExpr::curried([TypeExpr::bool(), TypeExpr::bool()], TypeExpr::bool()));
    let (x1, x2) = (Term::free("x1", nat.clone()), Term::free("x2", nat.clone()));
    let t = Term::apps(imp, [Term::apps(le(), [x1.clone(), x2.clone()]), Term::apps(le(), [phi(x1), phi(x2)])]);
    (sig, t)
}

#[test]
fn totient_is_not_monotone() {
    let (sig, t) = totient_monotone();
    let testable = Testable::prepare(&t, &sig).unwrap();
    let cex = find_counterexample(&t, &sig, 400, 0).unwrap().expect("counterexample");
    assert!(!testable.holds(&cex).unwrap());
    let mut v = Valuation::default();
    v.insert("nat", 0, Value::Int(21));
    v.insert("nat", 1, Value::Int(22));
    assert!(!testable.holds(&v).unwrap());
    assert_eq!(testable.describe(&v), "x1 = 21, x2 = 22");
}

#[test]
fn precision_nine_of_eighteen() {
    let sig = modular_arithmetic(5, 3);
    let laws: Vec<Law> = explore(&sig, 5, 100, 0).into_iter().take(18).collect();
    assert_eq!(laws.len(), 18);
    let gold: Vec<Law> = laws.iter().step_by(2).map(Law::flipped).collect();
    let p = baseline_precision(&laws, &gold);
    assert_eq!((p.emitted, p.matched_gold), (18, 9));
    assert_eq!(p.precision, 0.5);
    assert_eq!(baseline_precision(&[], &gold).emitted, 0);
    assert_eq!(baseline_precision(&[], &gold).precision, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counterexamples_really_falsify(i in 0usize..400, j in 0usize..400, seed in 0u64..1000) {
        let sig = modular_arithmetic(11, 3);
        let terms = enumerate_terms(&sig, 4);
        let (a, b) = (&terms[i % terms.len()], &terms[j % terms.len()]);
        let eq = Law::new(a.clone(), b.clone()).equation();
        let testable = Testable::prepare(&eq, &sig).unwrap();
        if let Some(v) = find_counterexample(&eq, &sig, 50, seed).unwrap() {
            prop_assert!(!testable.holds(&v).unwrap());
        }
    }
}
