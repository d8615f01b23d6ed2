//! Abstracts three octonion lemmas into templates and prints both the
//! display form and the canonical S-expression.

use lemmanaid::samples;
use lemmanaid::templates::{abstract_lemma, default_whitelist};
use lemmanaid::term::pretty;

fn main() {
    let w = default_whitelist();
    for lemma in [
        samples::octo_product_noncommutative(),
        samples::octo_distrib_left(),
        samples::octo_assoc_plus(),
    ] {
        let tpl = abstract_lemma(&lemma, &w).expect("lemma typechecks");
        println!("lemma:     {}", pretty(&lemma));
        println!("template:  {}", tpl.pretty());
        println!("holes:     {:?}", tpl.hole_types().iter().map(|t| t.to_string()).collect::<Vec<_>>());
        println!("canonical: {}\n", tpl.canonical());
    }
}
