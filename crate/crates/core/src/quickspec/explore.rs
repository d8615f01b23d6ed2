use std::collections::hash_map::{DefaultHasher, Entry};
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::interp::{InterpretedSignature, Value};
use super::testing::sample_slot;
use crate::term::{alpha_equal, pretty, Term, TypeExpr};

/// Number of symbol and variable occurrences.
pub fn term_size(t: &Term) -> usize {
    match t {
        Term::App(f, x) => term_size(f) + term_size(x),
        Term::Abs { body, .. } => term_size(body),
        _ => 1,
    }
}

/// Type of a first-order term built from typed heads.
fn result_type(t: &Term) -> Option<TypeExpr> {
    let (head, args) = t.strip_comb();
    let mut ty = match head {
        Term::Const { ty, .. } | Term::Free { ty, .. } => ty,
        _ => return None,
    };
    for _ in args {
        ty = ty.as_fun()?.1;
    }
    Some(ty.clone())
}

/// Every well-typed term of size at most `max_size` made of fully applied
/// symbols and the signature's variables, ordered by size and then by
/// pretty-printed text.
pub fn enumerate_terms(sig: &InterpretedSignature, max_size: usize) -> Vec<Term> {
    let nsorts = sig.sorts.len();
    let mut by_size: Vec<Vec<Vec<Term>>> = vec![vec![Vec::new(); nsorts]; max_size + 1];
    if max_size >= 1 {
        for (s, _, v) in sig.variables() {
            by_size[1][s].push(v);
        }
        for sym in sig.symbols.iter().filter(|s| s.args.is_empty()) {
            by_size[1][sym.result].push(sym.constant());
        }
    }
    for n in 2..=max_size {
        for sym in sig.symbols.iter().filter(|s| !s.args.is_empty()) {
            let mut built = Vec::new();
            for parts in compositions(n - 1, sym.args.len()) {
                let mut partial = vec![sym.constant()];
                for (size, sort) in parts.iter().zip(&sym.args) {
                    let options = &by_size[*size][*sort];
                    partial = partial
                        .iter()
                        .flat_map(|f| options.iter().map(move |a| Term::app(f.clone(), a.clone())))
                        .collect();
                    if partial.is_empty() {
                        break;
                    }
                }
                built.extend(partial);
            }
            by_size[n][sym.result].extend(built);
        }
    }
    let mut all: Vec<(usize, String, Term)> = Vec::new();
    for (n, sorts) in by_size.into_iter().enumerate() {
        for t in sorts.into_iter().flatten() {
            all.push((n, pretty(&t), t));
        }
    }
    all.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    all.into_iter().map(|(_, _, t)| t).collect()
}

/// Ways to write `total` as an ordered sum of `parts` positive integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Terms that agreed on every test. `members[0]` is the representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceClass {
    pub sort: String,
    pub members: Vec<Term>,
}

impl EquivalenceClass {
    pub fn representative(&self) -> &Term {
        &self.members[0]
    }
}

/// Interned value vectors, one per distinct observed behaviour.
struct ValueTable<'a> {
    sig: &'a InterpretedSignature,
    num_tests: usize,
    seed: u64,
    vectors: Vec<(usize, Vec<Value>)>,
    by_hash: HashMap<u64, Vec<usize>>,
    memo: HashMap<Term, usize>,
    var_slots: HashMap<String, (usize, usize)>,
}

impl<'a> ValueTable<'a> {
    fn new(sig: &'a InterpretedSignature, num_tests: usize, seed: u64) -> Self {
        let var_slots = sig
            .variables()
            .into_iter()
            .map(|(s, i, t)| match t {
                Term::Free { name, .. } => (name, (s, i)),
                _ => unreachable!(),
            })
            .collect();
        ValueTable {
            sig,
            num_tests,
            seed,
            vectors: Vec::new(),
            by_hash: HashMap::new(),
            memo: HashMap::new(),
            var_slots,
        }
    }

    fn intern(&mut self, sort: usize, values: Vec<Value>) -> usize {
        let mut h = DefaultHasher::new();
        (sort, &values).hash(&mut h);
        let bucket = self.by_hash.entry(h.finish()).or_default();
        if let Some(&id) = bucket.iter().find(|&&id| self.vectors[id].0 == sort && self.vectors[id].1 == values) {
            return id;
        }
        bucket.push(self.vectors.len());
        self.vectors.push((sort, values));
        self.vectors.len() - 1
    }

    /// Behaviour id of `t`, or `None` for terms outside the signature.
    fn eval(&mut self, t: &Term) -> Option<usize> {
        if let Some(&id) = self.memo.get(t) {
            return Some(id);
        }
        let (head, args) = t.strip_comb();
        let id = match head {
            Term::Free { name, .. } if args.is_empty() => {
                let (s, i) = *self.var_slots.get(name)?;
                let values = (0..self.num_tests)
                    .map(|test| sample_slot(self.sig, self.seed, test, s, i))
                    .collect();
                self.intern(s, values)
            }
            Term::Const { name, .. } => {
                let sym = self.sig.symbols.iter().position(|s| &s.name == name)?;
                if args.len() != self.sig.symbols[sym].args.len() {
                    return None;
                }
                let ids: Vec<usize> = args.iter().map(|a| self.eval(a)).collect::<Option<_>>()?;
                let sym = &self.sig.symbols[sym];
                let result = &self.sig.sorts[sym.result];
                let values = (0..self.num_tests)
                    .map(|test| {
                        let vals: Vec<&Value> = ids.iter().map(|id| &self.vectors[*id].1[test]).collect();
                        sym.builtin.apply(&vals, result)
                    })
                    .collect();
                self.intern(sym.result, values)
            }
            _ => return None,
        };
        self.memo.insert(t.clone(), id);
        Some(id)
    }
}

/// Groups terms by their values on `num_tests` seeded valuations. Terms the
/// signature cannot evaluate are skipped. Classes are ordered by their
/// representatives; members by size, then pretty text.
pub fn test_partition(terms: &[Term], sig: &InterpretedSignature, num_tests: usize, seed: u64) -> Vec<EquivalenceClass> {
    let mut table = ValueTable::new(sig, num_tests, seed);
    let mut groups: Vec<(usize, Vec<(usize, String, Term)>)> = Vec::new();
    let mut index: HashMap<usize, usize> = HashMap::new();
    for t in terms {
        let Some(id) = table.eval(t) else { continue };
        let g = match index.entry(id) {
            Entry::Occupied(e) => *e.get(),
            Entry::Vacant(e) => {
                groups.push((table.vectors[id].0, Vec::new()));
                *e.insert(groups.len() - 1)
            }
        };
        groups[g].1.push((term_size(t), pretty(t), t.clone()));
    }
    let mut classes: Vec<(usize, String, EquivalenceClass)> = groups
        .into_iter()
        .map(|(sort, mut members)| {
            members.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
            let key = (members[0].0, members[0].1.clone());
            let class = EquivalenceClass {
                sort: sig.sorts[sort].name.clone(),
                members: members.into_iter().map(|m| m.2).collect(),
            };
            (key.0, key.1, class)
        })
        .collect();
    classes.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    classes.into_iter().map(|c| c.2).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Law {
    pub lhs: Term,
    pub rhs: Term,
    pub size: usize,
}

impl Law {
    pub fn new(lhs: Term, rhs: Term) -> Law {
        let size = term_size(&lhs) + term_size(&rhs);
        Law { lhs, rhs, size }
    }

    /// `lhs = rhs` as a term, typed by the left side.
    pub fn equation(&self) -> Term {
        let ty = result_type(&self.lhs).unwrap_or_else(|| TypeExpr::var("a"));
        Term::apps(
            Term::constant("HOL.eq", TypeExpr::curried([ty.clone(), ty], TypeExpr::bool())),
            [self.lhs.clone(), self.rhs.clone()],
        )
    }

    pub fn flipped(&self) -> Law {
        Law::new(self.rhs.clone(), self.lhs.clone())
    }

    pub fn to_record(&self) -> LawRecord {
        LawRecord {
            lhs: self.lhs.clone(),
            rhs: self.rhs.clone(),
            size: Some(self.size),
            text: Some(self.to_string()),
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", pretty(&self.lhs), pretty(&self.rhs))
    }
}

/// JSONL form of a law. Gold files need only `lhs` and `rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawRecord {
    pub lhs: Term,
    pub rhs: Term,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

impl From<LawRecord> for Law {
    fn from(r: LawRecord) -> Law {
        Law::new(r.lhs, r.rhs)
    }
}

fn match_term(pat: &Term, t: &Term, binding: &mut HashMap<String, Term>) -> bool {
    match (pat, t) {
        (Term::Free { name, ty }, _) => {
            if result_type(t).as_ref() != Some(ty) {
                return false;
            }
            match binding.get(name) {
                Some(bound) => bound == t,
                None => {
                    binding.insert(name.clone(), t.clone());
                    true
                }
            }
        }
        (Term::App(pf, px), Term::App(tf, tx)) => match_term(pf, tf, binding) && match_term(px, tx, binding),
        _ => pat == t,
    }
}

/// True iff some substitution for the variables of `general` turns it into
/// `specific`, in either orientation of `specific`.
pub fn is_instance(general: &Law, specific: &Law) -> bool {
    let try_pair = |l: &Term, r: &Term| {
        let mut b = HashMap::new();
        match_term(&general.lhs, l, &mut b) && match_term(&general.rhs, r, &mut b)
    };
    try_pair(&specific.lhs, &specific.rhs) || try_pair(&specific.rhs, &specific.lhs)
}

fn head_key(t: &Term) -> Option<&str> {
    match t.strip_comb().0 {
        Term::Const { name, .. } => Some(name),
        _ => None,
    }
}

/// Equates each non-representative with its representative, smallest laws
/// first, dropping laws that are instances of one already emitted.
pub fn emit_laws(classes: &[EquivalenceClass]) -> Vec<Law> {
    let mut candidates: Vec<(usize, String, Law)> = classes
        .iter()
        .flat_map(|c| {
            let rep = c.representative();
            c.members[1..].iter().map(move |m| Law::new(m.clone(), rep.clone()))
        })
        .map(|l| (l.size, l.to_string(), l))
        .collect();
    candidates.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));

    // A general law can only match a specific side whose head symbol is the
    // same, unless the general side is a bare variable.
    let mut emitted: Vec<Law> = Vec::new();
    let mut by_head: HashMap<Option<String>, Vec<usize>> = HashMap::new();
    for (_, _, law) in candidates {
        let heads = [head_key(&law.lhs), head_key(&law.rhs)];
        let mut pool: Vec<usize> = by_head.get(&None).cloned().unwrap_or_default();
        for h in heads.into_iter().flatten() {
            if let Some(ids) = by_head.get(&Some(h.to_string())) {
                pool.extend(ids);
            }
        }
        if pool.iter().any(|&i| is_instance(&emitted[i], &law)) {
            continue;
        }
        let key = match (head_key(&law.lhs), head_key(&law.rhs)) {
            (Some(a), Some(_)) => Some(a.to_string()),
            _ => None,
        };
        by_head.entry(key).or_default().push(emitted.len());
        emitted.push(law);
    }
    emitted
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Precision {
    pub emitted: usize,
    pub matched_gold: usize,
    pub precision: f64,
}

/// Share of emitted laws that equal some gold law up to renaming or
/// swapping sides.
pub fn baseline_precision(laws: &[Law], gold: &[Law]) -> Precision {
    let gold_eqs: Vec<(Term, Term)> = gold.iter().map(|g| (g.equation(), g.flipped().equation())).collect();
    let matched = laws
        .iter()
        .filter(|l| {
            let eq = l.equation();
            gold_eqs.iter().any(|(g, gf)| alpha_equal(&eq, g) || alpha_equal(&eq, gf))
        })
        .count();
    Precision {
        emitted: laws.len(),
        matched_gold: matched,
        precision: if laws.is_empty() { 0.0 } else { matched as f64 / laws.len() as f64 },
    }
}
