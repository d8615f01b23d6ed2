//! Small-scale theory exploration: enumerate terms over executable symbols,
//! group them by their values on random tests, and read off equations.
//! The same tester falsifies conjectures.

mod explore;
mod interp;
mod testing;

pub use explore::{
    baseline_precision, emit_laws, enumerate_terms, is_instance, term_size, test_partition, EquivalenceClass, Law,
    LawRecord, Precision,
};
pub use interp::{Builtin, Domain, InterpError, InterpSymbol, InterpretedSignature, Sort, Value};
pub use testing::{find_counterexample, sample_slot, NotTestable, Testable, Valuation};

pub const DEFAULT_TESTS: usize = 400;

/// Enumerates, partitions and emits laws in one go.
pub fn explore(sig: &InterpretedSignature, max_size: usize, num_tests: usize, seed: u64) -> Vec<Law> {
    let terms = enumerate_terms(sig, max_size);
    emit_laws(&test_partition(&terms, sig, num_tests, seed))
}

/// Integers mod `modulus` with `+`, `-`, `*`, `^` and `0`.
pub fn modular_arithmetic(modulus: i64, vars_per_sort: usize) -> InterpretedSignature {
    let mut sig = InterpretedSignature::new(
        vec![Sort {
            name: "int".into(),
            domain: Domain::IntMod { modulus },
        }],
        vars_per_sort,
    );
    let int = sig.sorts[0].ty();
    let binop = crate::term::TypeExpr::curried([int.clone(), int.clone()], int.clone());
    for (name, b) in [
        ("plus", Builtin::IntAdd),
        ("minus", Builtin::IntSub),
        ("times", Builtin::IntMul),
        ("power", Builtin::IntPow),
    ] {
        sig.add_symbol(name, binop.clone(), b).expect("fits");
    }
    sig.add_symbol("zero", int, Builtin::IntZero).expect("fits");
    sig
}
