mod common;

use std::collections::BTreeSet;

use common::*;
use lemmanaid::corpus::{format_prompt, make_datapoint, make_record, split_filewise, CorpusRecord, PromptMode, TargetKind};
use lemmanaid::instantiation::{instantiate, Budget};
use lemmanaid::templates::{abstract_lemma, default_whitelist, parse_template, Template};
use lemmanaid::term::{
    alpha_equal, alpha_key, parse_term, parse_type, render_term, render_type, typecheck, typecheck_lenient,
    unify_types, Signature, SignatureEntry, Term, TypeExpr,
};
use proptest::prelude::*;
use rand::Rng;

fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn types_round_trip_through_sexp(seed in seeds()) {
        let t = random_type(&mut rng(seed), &["a", "b", "c"], 9);
        prop_assert_eq!(parse_type(&render_type(&t)).unwrap(), t);
    }

    #[test]
    fn terms_round_trip_through_sexp_and_json(seed in seeds(), size in 1usize..20) {
        let t = random_raw_term(&mut rng(seed), size);
        prop_assert_eq!(parse_term(&render_term(&t)).unwrap(), t.clone());
        let json = serde_json::to_string(&t).unwrap();
        prop_assert_eq!(serde_json::from_str::<Term>(&json).unwrap(), t);
    }

    #[test]
    fn unifiers_unify_and_are_idempotent(seed in seeds()) {
        let mut r = rng(seed);
        let a = random_type(&mut r, &["a", "b", "c"], 8);
        let b = random_type(&mut r, &["a", "b", "c"], 8);
        if let Ok(s) = unify_types(&a, &b) {
            prop_assert_eq!(s.apply(&a), s.apply(&b));
            for (_, t) in s.iter() {
                prop_assert_eq!(s.apply(t), t.clone());
            }
        }
    }

    #[test]
    fn unifiability_matches_oracle(seed in seeds()) {
        let mut r = rng(seed);
        let a = random_type(&mut r, &["a", "b"], 8);
        let b = random_type(&mut r, &["a", "b"], 8);
        prop_assert_eq!(unify_types(&a, &b).is_ok(), unifiable_oracle(&a, &b), "{} ~ {}", a, b);
    }

    #[test]
    fn alpha_matches_oracle(seed in seeds(), size in 1usize..14, mode in 0u8..4) {
        let mut r = rng(seed);
        let a = random_raw_term(&mut r, size);
        let b = match mode {
            0 => random_raw_term(&mut r, size),
            1 => random_rename(&mut r, &a, true),
            2 => random_rename(&mut r, &a, false),
            _ => {
                let renamed = random_rename(&mut r, &a, true);
                mutate_leaf(&mut r, &renamed)
            }
        };
        let expected = alpha_oracle(&a, &b);
        prop_assert_eq!(alpha_equal(&a, &b), expected);
        prop_assert_eq!(alpha_key(&a) == alpha_key(&b), expected);
    }

    #[test]
    fn abstraction_is_stable_and_parses_back(seed in seeds()) {
        let w = default_whitelist();
        let t = random_lemma(&mut rng(seed), &w, 5);
        let tpl = abstract_lemma(&t, &w).unwrap();
        prop_assert_eq!(parse_template(tpl.canonical(), &w).unwrap(), tpl.clone());
        prop_assert!(!tpl.body().const_names().iter().any(|n| !w.contains(n)));
        // renaming variables does not change the template
        let renamed = random_rename(&mut rng(seed ^ 1), &t, true);
        let again = abstract_lemma(&renamed, &w).unwrap();
        prop_assert_eq!(again.canonical(), tpl.canonical());
    }

    #[test]
    fn instantiation_matches_brute_force(seed in seeds()) {
        let w = default_whitelist();
        let mut r = rng(seed);
        let t = random_lemma(&mut r, &w, 4);
        let tpl = abstract_lemma(&t, &w).unwrap();
        let pool = symbol_pool();
        let mut cands: Vec<SignatureEntry> = theory_symbols(&t, &w);
        for s in pool.iter().filter(|_| r.gen_bool(0.3)) {
            if !cands.iter().any(|c| c.name == s.name) {
                cands.push(s.clone());
            }
        }
        cands.truncate(6);
        let got = instantiate(&tpl, &cands, Budget::default()).unwrap();
        prop_assert!(!got.timed_out && !got.truncated);
        let expected = brute_force(&tpl, &cands);
        let found: Vec<Vec<String>> = got
            .conjectures
            .iter()
            .map(|c| c.assignment.symbols.values().cloned().collect())
            .collect();
        prop_assert_eq!(&found, &expected);
        let sig = Signature::new(cands.clone()).unwrap().with_logic();
        for c in &got.conjectures {
            prop_assert!(!c.term.has_holes());
            prop_assert!(typecheck(&c.term, &sig).is_ok(), "{}", c.term);
        }
    }

    #[test]
    fn datapoints_and_split_are_deterministic_and_theory_closed(seed in seeds(), n in 3usize..30) {
        let w = default_whitelist();
        let mut r = rng(seed);
        let records: Vec<CorpusRecord> = (0..n)
            .map(|i| {
                let t = random_lemma(&mut r, &w, 3);
                let theory = format!("Th{}", r.gen_range(0..6));
                let sig = Signature::new(theory_symbols(&t, &w)).unwrap();
                make_record(&format!("{theory}/{i}"), &theory, "l", &t, &sig, &w).unwrap()
            })
            .collect();
        for rec in &records {
            prop_assert!(rec.check_symbols(&w));
            let p = format_prompt(rec, PromptMode::TypesDefs);
            prop_assert!(!p.contains('\n'));
            let d = make_datapoint(rec, PromptMode::Types, TargetKind::Lemma, &w).unwrap();
            prop_assert_eq!(parse_term(&d.target).unwrap(), rec.term.clone());
        }
        let theories: BTreeSet<&str> = records.iter().map(|r| r.theory.as_str()).collect();
        let ratios = [0.6, 0.2, 0.2];
        match split_filewise(&records, ratios, seed) {
            Ok(split) => {
                prop_assert!(theories.len() >= 3);
                let again = split_filewise(&records, ratios, seed).unwrap();
                prop_assert_eq!(&split.train, &again.train);
                prop_assert_eq!(&split.test, &again.test);
                let parts = [&split.train, &split.val, &split.test];
                let total: usize = parts.iter().map(|p| p.len()).sum();
                prop_assert_eq!(total, records.len());
                let sets: Vec<BTreeSet<&str>> =
                    parts.iter().map(|p| p.iter().map(|r| r.theory.as_str()).collect()).collect();
                for (i, a) in sets.iter().enumerate() {
                    prop_assert!(!a.is_empty());
                    for b in &sets[i + 1..] {
                        prop_assert!(a.is_disjoint(b));
                    }
                }
            }
            Err(_) => prop_assert!(theories.len() < 3),
        }
    }
}

/// Every assignment in lexicographic candidate order, kept when the filled
/// term typechecks, each occurrence given a fresh copy of its hole annotation.
fn brute_force(tpl: &Template, cands: &[SignatureEntry]) -> Vec<Vec<String>> {
    let sig = Signature::new(cands.to_vec()).unwrap().with_logic();
    let h = tpl.hole_count();
    let mut out = Vec::new();
    let mut choice = vec![0usize; h];
    loop {
        let mut fresh = 0;
        let filled = tpl.body().map_bottom_up(&mut |node| match node {
            Term::Hole { index, ty } => {
                fresh += 1;
                let mut vs = BTreeSet::new();
                type_vars(&ty, &mut vs);
                let renaming = vs.into_iter().map(|v| (v.clone(), TypeExpr::var(format!("o{fresh}_{v}")))).collect();
                Term::constant(cands[choice[index as usize - 1]].name.clone(), subst_type(&ty, &renaming))
            }
            other => other,
        });
        if h == 0 || typecheck_lenient(&filled, &sig).is_ok() {
            out.push(choice.iter().map(|&c| cands[c].name.clone()).collect());
        }
        // next tuple, last hole fastest
        let mut i = h;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < cands.len() {
                break;
            }
            choice[i] = 0;
        }
    }
}
