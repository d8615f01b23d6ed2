//! A generated corpus of analogous theories: families of three theories
//! that state the same kinds of lemmas about differently named symbols.
//! One theory per family is held out for evaluation.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{make_record, CorpusRecord};
use crate::templates::Whitelist;
use crate::term::{Signature, SignatureEntry, Term, TypeExpr};

pub const THEORIES_PER_FAMILY: usize = 3;

/// Symbols and variables of one generated theory.
struct Theory {
    name: String,
    t: TypeExpr,
    n: TypeExpr,
}

impl Theory {
    fn role_type(&self, role: &str) -> TypeExpr {
        let (t, n, b) = (self.t.clone(), self.n.clone(), TypeExpr::bool());
        match role {
            "op" | "op2" => TypeExpr::curried([t.clone(), t.clone()], t),
            "neg" => TypeExpr::fun(t.clone(), t),
            "e" => t,
            "le" => TypeExpr::curried([t.clone(), t], b),
            "pos" => TypeExpr::fun(t, b),
            "size" => TypeExpr::fun(t, n),
            "nplus" => TypeExpr::curried([n.clone(), n.clone()], n),
            "nzero" => n,
            "act" => TypeExpr::curried([n, t.clone()], t),
            "iter" => TypeExpr::curried([TypeExpr::fun(t.clone(), t.clone()), t.clone()], t),
            "tern" => TypeExpr::curried([t.clone(), t.clone(), t.clone()], t),
            other => panic!("unknown role {other}"),
        }
    }

    fn c(&self, role: &str) -> Term {
        Term::constant(format!("{}.{}", self.name, role), self.role_type(role))
    }

    fn ap(&self, role: &str, args: impl IntoIterator<Item = Term>) -> Term {
        Term::apps(self.c(role), args)
    }

    fn x(&self) -> Term {
        Term::free("x", self.t.clone())
    }
    fn y(&self) -> Term {
        Term::free("y", self.t.clone())
    }
    fn z(&self) -> Term {
        Term::free("z", self.t.clone())
    }
    fn m(&self) -> Term {
        Term::free("m", self.n.clone())
    }
    fn k(&self) -> Term {
        Term::free("n", self.n.clone())
    }
}

fn eq(a: Term, b: Term, ty: TypeExpr) -> Term {
    Term::apps(Term::constant("HOL.eq", TypeExpr::curried([ty.clone(), ty], TypeExpr::bool())), [a, b])
}

fn connective(name: &str, a: Term, b: Term) -> Term {
    let bool_ = TypeExpr::bool();
    Term::apps(Term::constant(name, TypeExpr::curried([bool_.clone(), bool_.clone()], bool_)), [a, b])
}

fn implies(a: Term, b: Term) -> Term {
    connective("HOL.implies", a, b)
}

fn not(a: Term) -> Term {
    Term::app(Term::constant("HOL.Not", TypeExpr::fun(TypeExpr::bool(), TypeExpr::bool())), a)
}

fn trueprop(a: Term) -> Term {
    Term::app(Term::constant("HOL.Trueprop", TypeExpr::fun(TypeExpr::bool(), TypeExpr::prop())), a)
}

/// Names of the lemma shapes the generator knows, in a fixed order.
pub const SHAPES: [&str; 30] = [
    "assoc", "comm", "idem", "runit", "lunit", "rzero", "invol", "uidem", "ufix", "antidistrib", "uhom", "rinv",
    "distrib", "refl", "trans", "antisym", "total", "asym", "mono", "closure", "pneg", "punit", "shom", "sneg",
    "sunit", "aadd", "aunit", "ifix", "tsym", "tdiag",
];

fn lemma(th: &Theory, shape: &str) -> Term {
    let t = th.t.clone();
    let (x, y, z) = (th.x(), th.y(), th.z());
    let op = |a: Term, b: Term| th.ap("op", [a, b]);
    let op2 = |a: Term, b: Term| th.ap("op2", [a, b]);
    let neg = |a: Term| th.ap("neg", [a]);
    let le = |a: Term, b: Term| th.ap("le", [a, b]);
    let pos = |a: Term| th.ap("pos", [a]);
    let size = |a: Term| th.ap("size", [a]);
    let nplus = |a: Term, b: Term| th.ap("nplus", [a, b]);
    let act = |a: Term, b: Term| th.ap("act", [a, b]);
    let tern = |a: Term, b: Term, c: Term| th.ap("tern", [a, b, c]);
    let e = || th.c("e");
    match shape {
        "assoc" => eq(op(op(x.clone(), y.clone()), z.clone()), op(x, op(y, z)), t),
        "comm" => eq(op(x.clone(), y.clone()), op(y, x), t),
        "idem" => eq(op(x.clone(), x.clone()), x, t),
        "runit" => eq(op(x.clone(), e()), x, t),
        "lunit" => eq(op(e(), x.clone()), x, t),
        "rzero" => eq(op(x, e()), e(), t),
        "invol" => eq(neg(neg(x.clone())), x, t),
        "uidem" => eq(neg(neg(x.clone())), neg(x), t),
        "ufix" => eq(neg(e()), e(), t),
        "antidistrib" => eq(neg(op(x.clone(), y.clone())), op(neg(y), neg(x)), t),
        "uhom" => eq(neg(op(x.clone(), y.clone())), op(neg(x), neg(y)), t),
        "rinv" => eq(op(x.clone(), neg(x)), e(), t),
        "distrib" => eq(
            op(x.clone(), op2(y.clone(), z.clone())),
            op2(op(x.clone(), y), op(x, z)),
            t,
        ),
        "refl" => trueprop(le(x.clone(), x)),
        "trans" => implies(le(x.clone(), y.clone()), implies(le(y, z.clone()), le(x, z))),
        "antisym" => implies(le(x.clone(), y.clone()), implies(le(y.clone(), x.clone()), eq(x, y, t))),
        "total" => connective("HOL.disj", le(x.clone(), y.clone()), le(y, x)),
        "asym" => implies(le(x.clone(), y.clone()), not(le(y, x))),
        "mono" => implies(le(x.clone(), y.clone()), le(op(x, z.clone()), op(y, z))),
        "closure" => implies(pos(x.clone()), implies(pos(y.clone()), pos(op(x, y)))),
        "pneg" => implies(pos(x.clone()), not(pos(neg(x)))),
        "punit" => trueprop(pos(e())),
        "shom" => eq(size(op(x.clone(), y.clone())), nplus(size(x), size(y)), th.n.clone()),
        "sneg" => eq(size(neg(x.clone())), size(x), th.n.clone()),
        "sunit" => eq(size(e()), th.c("nzero"), th.n.clone()),
        "aadd" => eq(
            act(nplus(th.m(), th.k()), x.clone()),
            op(act(th.m(), x.clone()), act(th.k(), x)),
            t,
        ),
        "aunit" => eq(act(th.m(), e()), e(), t),
        "ifix" => eq(
            th.ap("iter", [th.c("neg"), neg(x.clone())]),
            neg(th.ap("iter", [th.c("neg"), x])),
            t,
        ),
        "tsym" => eq(tern(x.clone(), y.clone(), z.clone()), tern(y, x, z), t),
        "tdiag" => eq(tern(x.clone(), x, y.clone()), y, t),
        other => panic!("unknown shape {other}"),
    }
}

/// Lemma shapes stated by each family's theories.
pub const FAMILIES: [&[&str]; 20] = [
    &["assoc", "runit", "rinv"],
    &["comm", "lunit", "rinv"],
    &["idem", "rzero", "rinv", "distrib"],
    &["refl", "trans", "mono"],
    &["antisym", "total", "mono"],
    &["asym", "closure", "punit"],
    &["closure", "pneg", "shom"],
    &["shom", "sunit", "sneg"],
    &["aadd", "aunit", "runit"],
    &["invol", "uidem", "ifix"],
    &["tsym", "tdiag", "aadd"],
    &["rzero", "lunit", "shom"],
    &["antidistrib", "ufix", "sunit"],
    &["uhom", "ufix", "sunit"],
    &["antidistrib", "uhom", "aadd"],
    &["pneg", "sneg", "ifix"],
    &["rinv", "shom"],
    &["sunit", "aadd"],
    &["rinv", "aadd"],
    &["shom", "sunit"],
];

#[derive(Clone, Debug)]
pub struct SyntheticCorpus {
    pub records: Vec<CorpusRecord>,
    pub signatures: BTreeMap<String, Signature>,
    /// Theories reserved for evaluation, one per family.
    pub held_out: BTreeSet<String>,
}

impl SyntheticCorpus {
    pub fn train(&self) -> Vec<CorpusRecord> {
        self.records.iter().filter(|r| !self.held_out.contains(&r.theory)).cloned().collect()
    }

    pub fn test(&self) -> Vec<CorpusRecord> {
        self.records.iter().filter(|r| self.held_out.contains(&r.theory)).cloned().collect()
    }
}

/// Builds every family; `seed` picks the held-out theory of each family.
pub fn generate(seed: u64, w: &Whitelist) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = SyntheticCorpus {
        records: Vec::new(),
        signatures: BTreeMap::new(),
        held_out: BTreeSet::new(),
    };
    for (f, shapes) in FAMILIES.iter().enumerate() {
        let held = rng.gen_range(0..THEORIES_PER_FAMILY);
        for j in 0..THEORIES_PER_FAMILY {
            let name = format!("Fam{:02}{}", f, (b'A' + j as u8) as char);
            let th = Theory {
                t: TypeExpr::base(format!("{name}.t")),
                n: TypeExpr::base("Nat.nat"),
                name: name.clone(),
            };
            let lemmas: Vec<(&str, Term)> = shapes.iter().map(|s| (*s, lemma(&th, s))).collect();
            let mut roles: Vec<String> = Vec::new();
            for (_, l) in &lemmas {
                for c in l.const_names() {
                    if !w.contains(c) && !roles.iter().any(|r| r == c) {
                        roles.push(c.to_string());
                    }
                }
            }
            let sig = Signature::new(
                roles
                    .iter()
                    .map(|r| {
                        let role = r.rsplit('.').next().unwrap();
                        SignatureEntry::new(r.clone(), th.role_type(role))
                    })
                    .collect(),
            )
            .expect("role names are unique");
            for (i, (shape, l)) in lemmas.iter().enumerate() {
                let id = format!("{name}/{i:02}_{shape}");
                let rec = make_record(&id, &name, shape, l, &sig, w).expect("generated lemmas typecheck");
                corpus.records.push(rec);
            }
            if j == held {
                corpus.held_out.insert(name.clone());
            }
            corpus.signatures.insert(name, sig);
        }
    }
    corpus
}
