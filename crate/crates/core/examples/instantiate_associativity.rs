//! Fills the associativity template with a mixed set of real and list
//! operations. Only binary operators fit the hole.

use std::time::Instant;

use lemmanaid::instantiation::{instantiate, Budget};
use lemmanaid::samples;
use lemmanaid::templates::{abstract_lemma, default_whitelist};
use lemmanaid::term::pretty;

fn main() {
    let tpl = abstract_lemma(&samples::octo_assoc_plus(), &default_whitelist()).unwrap();
    let candidates = samples::reals_and_lists();
    println!("template: {}", tpl.pretty());
    println!("symbols:  {}", candidates.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join(", "));

    let start = Instant::now();
    let inst = instantiate(&tpl, &candidates, Budget::default()).unwrap();
    println!("{} conjecture(s) in {:?}", inst.conjectures.len(), start.elapsed());
    for c in &inst.conjectures {
        println!("  {}", pretty(&c.term));
    }

    // A tiny budget: the engine stops at the deadline and flags it.
    let many: Vec<_> = (0..40)
        .map(|i| lemmanaid::term::SignatureEntry::new(format!("op{i}"), candidates[0].ty.clone()))
        .collect();
    let distrib = abstract_lemma(&samples::octo_distrib_left(), &default_whitelist()).unwrap();
    let capped = instantiate(&distrib, &many, Budget::default().with_max_results(10)).unwrap();
    println!("capped at 10: {} result(s), truncated = {}", capped.conjectures.len(), capped.truncated);
}
