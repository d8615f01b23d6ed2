//! Random generators and brute-force oracles shared by the integration
//! tests. The oracles deliberately avoid the library's own algorithms.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use lemmanaid::templates::Whitelist;
use lemmanaid::term::{typecheck, unify_types, Signature, SignatureEntry, Term, TypeExpr};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn nat() -> TypeExpr {
    TypeExpr::base("Nat.nat")
}
pub fn real() -> TypeExpr {
    TypeExpr::base("Real.real")
}
pub fn list(t: TypeExpr) -> TypeExpr {
    TypeExpr::con("List.list", vec![t])
}

// ---------------------------------------------------------------- types

pub fn type_nodes(t: &TypeExpr) -> usize {
    match t {
        TypeExpr::Var(_) => 1,
        TypeExpr::Con(_, xs) => 1 + xs.iter().map(type_nodes).sum::<usize>(),
    }
}

pub fn type_vars(t: &TypeExpr, out: &mut BTreeSet<String>) {
    match t {
        TypeExpr::Var(v) => {
            out.insert(v.clone());
        }
        TypeExpr::Con(_, xs) => xs.iter().for_each(|x| type_vars(x, out)),
    }
}

/// A random type with at most `max_nodes` nodes over the given variables.
pub fn random_type(r: &mut impl Rng, vars: &[&str], max_nodes: usize) -> TypeExpr {
    let mut budget = max_nodes.max(1);
    gen_type(r, vars, &mut budget)
}

fn gen_type(r: &mut impl Rng, vars: &[&str], budget: &mut usize) -> TypeExpr {
    *budget -= 1;
    let leaf = *budget < 2 || r.gen_bool(0.35);
    if leaf {
        if !vars.is_empty() && r.gen_bool(0.5) {
            return TypeExpr::var(*vars.choose(r).unwrap());
        }
        return [nat(), real(), TypeExpr::bool()].choose(r).unwrap().clone();
    }
    match r.gen_range(0..3) {
        0 => TypeExpr::con("List.list", vec![gen_type(r, vars, budget)]),
        k => {
            let name = if k == 1 { "fun" } else { "Product_Type.prod" };
            let a = gen_type(r, vars, budget);
            if *budget == 0 {
                return TypeExpr::con("List.list", vec![a]);
            }
            let b = gen_type(r, vars, budget);
            TypeExpr::con(name, vec![a, b])
        }
    }
}

pub fn subst_type(t: &TypeExpr, s: &BTreeMap<String, TypeExpr>) -> TypeExpr {
    match t {
        TypeExpr::Var(v) => s.get(v).cloned().unwrap_or_else(|| t.clone()),
        TypeExpr::Con(f, xs) => TypeExpr::Con(f.clone(), xs.iter().map(|x| subst_type(x, s)).collect()),
    }
}

fn subterms(t: &TypeExpr, out: &mut Vec<TypeExpr>) {
    out.push(t.clone());
    if let TypeExpr::Con(_, xs) = t {
        xs.iter().for_each(|x| subterms(x, out));
    }
}

fn mentions(t: &TypeExpr, v: &str) -> bool {
    let mut vs = BTreeSet::new();
    type_vars(t, &mut vs);
    vs.contains(v)
}

/// Decides unifiability of two types with at most two variables by trying
/// ground substitutions built from their subterms: every most general
/// unifier binds one variable to a subterm and the other to a subterm with
/// the first binding plugged in.
pub fn unifiable_oracle(a: &TypeExpr, b: &TypeExpr) -> bool {
    let mut vars = BTreeSet::new();
    type_vars(a, &mut vars);
    type_vars(b, &mut vars);
    let vars: Vec<String> = vars.into_iter().collect();
    assert!(vars.len() <= 2, "oracle handles at most two variables");
    let k = TypeExpr::base("Oracle.K");
    let mut pool = Vec::new();
    subterms(a, &mut pool);
    subterms(b, &mut pool);
    let ground = |t: &TypeExpr| {
        let s: BTreeMap<String, TypeExpr> = vars.iter().map(|v| (v.clone(), k.clone())).collect();
        subst_type(t, &s)
    };
    let works = |s: &BTreeMap<String, TypeExpr>| {
        let full: BTreeMap<String, TypeExpr> = vars
            .iter()
            .map(|v| (v.clone(), s.get(v).cloned().unwrap_or_else(|| k.clone())))
            .collect();
        subst_type(a, &full) == subst_type(b, &full)
    };
    if works(&BTreeMap::new()) {
        return true;
    }
    for (i, v1) in vars.iter().enumerate() {
        let other = vars.get(1 - i).filter(|_| vars.len() == 2);
        for t1 in &pool {
            if mentions(t1, v1) {
                continue;
            }
            let only: BTreeMap<String, TypeExpr> = [(v1.clone(), ground(t1))].into();
            if works(&only) {
                return true;
            }
            let Some(v2) = other else { continue };
            for s in &pool {
                let bound: BTreeMap<String, TypeExpr> = [(v1.clone(), t1.clone())].into();
                let t2 = subst_type(s, &bound);
                if mentions(&t2, v2) {
                    continue;
                }
                let g2 = ground(&t2);
                let img1 = subst_type(t1, &[(v2.clone(), g2.clone())].into());
                let both: BTreeMap<String, TypeExpr> = [(v1.clone(), ground(&img1)), (v2.clone(), g2)].into();
                if works(&both) {
                    return true;
                }
            }
        }
    }
    false
}

// ---------------------------------------------------------------- alpha

fn term_tvars(t: &Term, out: &mut Vec<String>) {
    let mut push = |ty: &TypeExpr| {
        let mut vs = BTreeSet::new();
        type_vars(ty, &mut vs);
        for v in vs {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    };
    match t {
        Term::Const { ty, .. } | Term::Free { ty, .. } | Term::Hole { ty, .. } => push(ty),
        Term::Bound(_) => {}
        Term::Abs { ty, body, .. } => {
            push(ty);
            term_tvars(body, out);
        }
        Term::App(f, x) => {
            term_tvars(f, out);
            term_tvars(x, out);
        }
    }
}

fn term_frees(t: &Term, out: &mut Vec<String>) {
    match t {
        Term::Free { name, .. } => {
            if !out.contains(name) {
                out.push(name.clone());
            }
        }
        Term::Abs { body, .. } => term_frees(body, out),
        Term::App(f, x) => {
            term_frees(f, out);
            term_frees(x, out);
        }
        _ => {}
    }
}

fn rename_term(t: &Term, frees: &BTreeMap<String, String>, tvars: &BTreeMap<String, TypeExpr>) -> Term {
    let ty = |x: &TypeExpr| subst_type(x, tvars);
    match t {
        Term::Const { name, ty: a } => Term::constant(name.clone(), ty(a)),
        Term::Free { name, ty: a } => Term::free(frees.get(name).cloned().unwrap_or_else(|| name.clone()), ty(a)),
        Term::Bound(i) => Term::Bound(*i),
        Term::Abs { ty: a, body, .. } => Term::abs("_", ty(a), rename_term(body, frees, tvars)),
        Term::App(f, x) => Term::app(rename_term(f, frees, tvars), rename_term(x, frees, tvars)),
        Term::Hole { index, ty: a } => Term::hole(*index, ty(a)),
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Tries every bijection between the free variables and between the type
/// variables of the two terms.
pub fn alpha_oracle(a: &Term, b: &Term) -> bool {
    let (mut fa, mut fb, mut ta, mut tb) = (vec![], vec![], vec![], vec![]);
    term_frees(a, &mut fa);
    term_frees(b, &mut fb);
    term_tvars(a, &mut ta);
    term_tvars(b, &mut tb);
    if fa.len() != fb.len() || ta.len() != tb.len() {
        return false;
    }
    let target = rename_term(b, &BTreeMap::new(), &BTreeMap::new());
    for pf in permutations(fa.len()) {
        let frees: BTreeMap<String, String> = pf.iter().enumerate().map(|(i, &j)| (fa[i].clone(), fb[j].clone())).collect();
        for pt in permutations(ta.len()) {
            let tvars: BTreeMap<String, TypeExpr> =
                pt.iter().enumerate().map(|(i, &j)| (ta[i].clone(), TypeExpr::var(tb[j].clone()))).collect();
            if rename_term(a, &frees, &tvars) == target {
                return true;
            }
        }
    }
    false
}

const FREE_NAMES: [&str; 4] = ["x", "y", "z", "w"];
const TVARS: [&str; 3] = ["a", "b", "c"];

/// A structurally random term (not necessarily well typed) with at most
/// four free variables, each used at one type.
pub fn random_raw_term(r: &mut impl Rng, size: usize) -> Term {
    let nfree = r.gen_range(1..=4);
    let types: Vec<TypeExpr> = (0..nfree).map(|_| random_type(r, &TVARS, 3)).collect();
    gen_raw(r, size, 0, &types)
}

fn gen_raw(r: &mut impl Rng, size: usize, depth: u32, frees: &[TypeExpr]) -> Term {
    if size <= 1 {
        return match r.gen_range(0..4) {
            0 if depth > 0 => Term::Bound(r.gen_range(0..depth)),
            1 => Term::constant(["f", "g", "c"][r.gen_range(0..3)], random_type(r, &TVARS, 3)),
            2 => Term::hole(r.gen_range(1..=2), random_type(r, &TVARS, 3)),
            _ => {
                let i = r.gen_range(0..frees.len());
                Term::free(FREE_NAMES[i], frees[i].clone())
            }
        };
    }
    if r.gen_bool(0.25) {
        let binder = ["u", "v"][r.gen_range(0..2)];
        return Term::abs(binder, random_type(r, &TVARS, 2), gen_raw(r, size - 1, depth + 1, frees));
    }
    let left = r.gen_range(1..size);
    Term::app(gen_raw(r, left, depth, frees), gen_raw(r, size - left, depth, frees))
}

/// Renames free variables and type variables through random maps, which
/// are bijective when `bijective` is set, and scrambles binder names.
pub fn random_rename(r: &mut impl Rng, t: &Term, bijective: bool) -> Term {
    let (mut fs, mut ts) = (vec![], vec![]);
    term_frees(t, &mut fs);
    term_tvars(t, &mut ts);
    let mut fnames: Vec<String> = (0..fs.len().max(1)).map(|i| format!("v{i}")).collect();
    fnames.shuffle(r);
    let mut tnames: Vec<String> = (0..ts.len().max(1)).map(|i| format!("t{i}")).collect();
    tnames.shuffle(r);
    let pick = |r: &mut dyn rand::RngCore, names: &[String], i: usize| {
        if bijective {
            names[i].clone()
        } else {
            names[r.gen_range(0..names.len().min(2))].clone()
        }
    };
    let frees: BTreeMap<String, String> = fs.iter().enumerate().map(|(i, f)| (f.clone(), pick(r, &fnames, i))).collect();
    let tvars: BTreeMap<String, TypeExpr> =
        ts.iter().enumerate().map(|(i, v)| (v.clone(), TypeExpr::var(pick(r, &tnames, i)))).collect();
    let renamed = rename_term(t, &frees, &tvars);
    scramble_binders(r, &renamed)
}

fn scramble_binders(r: &mut impl Rng, t: &Term) -> Term {
    match t {
        Term::Abs { ty, body, .. } => Term::abs(["p", "q", "s"][r.gen_range(0..3)], ty.clone(), scramble_binders(r, body)),
        Term::App(f, x) => Term::app(scramble_binders(r, f), scramble_binders(r, x)),
        other => other.clone(),
    }
}

/// Changes one leaf.
pub fn mutate_leaf(r: &mut impl Rng, t: &Term) -> Term {
    match t {
        Term::App(f, x) => {
            if r.gen_bool(0.5) {
                Term::app(mutate_leaf(r, f), (**x).clone())
            } else {
                Term::app((**f).clone(), mutate_leaf(r, x))
            }
        }
        Term::Abs { binder, ty, body } => Term::abs(binder.clone(), ty.clone(), mutate_leaf(r, body)),
        Term::Const { name, ty } => Term::constant(format!("{name}'"), ty.clone()),
        Term::Free { name, .. } => Term::free(name.clone(), TypeExpr::base("Mutated.t")),
        Term::Bound(i) => Term::Bound(i + 1),
        Term::Hole { index, ty } => Term::hole(index + 1, ty.clone()),
    }
}

// ---------------------------------------------------------------- lemmas

/// Theory symbols available to generated lemmas.
pub fn symbol_pool() -> Vec<SignatureEntry> {
    let a = || TypeExpr::var("a");
    let b = || TypeExpr::var("b");
    let f = TypeExpr::fun;
    let c = |xs: Vec<TypeExpr>, r: TypeExpr| TypeExpr::curried(xs, r);
    vec![
        SignatureEntry::new("Gen.add", c(vec![nat(), nat()], nat())),
        SignatureEntry::new("Gen.mul", c(vec![nat(), nat()], nat())),
        SignatureEntry::new("Gen.suc", f(nat(), nat())),
        SignatureEntry::new("Gen.zero", nat()),
        SignatureEntry::new("Gen.even", f(nat(), TypeExpr::bool())),
        SignatureEntry::new("Gen.radd", c(vec![real(), real()], real())),
        SignatureEntry::new("Gen.half", f(real(), real())),
        SignatureEntry::new("Gen.of_nat", f(nat(), real())),
        SignatureEntry::new("Gen.len", f(list(a()), nat())),
        SignatureEntry::new("Gen.rev", f(list(a()), list(a()))),
        SignatureEntry::new("Gen.app", c(vec![list(a()), list(a())], list(a()))),
        SignatureEntry::new("Gen.cons", c(vec![a(), list(a())], list(a()))),
        SignatureEntry::new("Gen.nil", list(a())),
        SignatureEntry::new("Gen.map", c(vec![f(a(), b()), list(a())], list(b()))),
        SignatureEntry::new("Gen.sum", f(list(nat()), nat())),
        SignatureEntry::new("Gen.twice", c(vec![f(nat(), nat()), nat()], nat())),
    ]
}

pub fn pool_signature() -> Signature {
    Signature::new(symbol_pool()).unwrap()
}

fn logic_const(name: &str, ty: TypeExpr) -> Term {
    Term::constant(name, ty)
}

fn eq_at(t: &TypeExpr) -> Term {
    logic_const("HOL.eq", TypeExpr::curried([t.clone(), t.clone()], TypeExpr::bool()))
}

fn bool_op(name: &str) -> Term {
    logic_const(name, TypeExpr::curried([TypeExpr::bool(), TypeExpr::bool()], TypeExpr::bool()))
}

struct LemmaGen<'a> {
    symbols: Vec<&'a SignatureEntry>,
    ctx: Vec<TypeExpr>,
}

fn data_types() -> [TypeExpr; 4] {
    [nat(), real(), list(nat()), list(real())]
}

impl LemmaGen<'_> {
    fn variable(&self, r: &mut impl Rng, ty: &TypeExpr) -> Term {
        let bound: Vec<u32> = (0..self.ctx.len())
            .filter(|&i| &self.ctx[self.ctx.len() - 1 - i] == ty)
            .map(|i| i as u32)
            .collect();
        if !bound.is_empty() && r.gen_bool(0.5) {
            return Term::Bound(*bound.choose(r).unwrap());
        }
        let names: &[&str] = match ty {
            t if *t == nat() => &["m", "n", "k"],
            t if *t == real() => &["r", "s"],
            t if *t == TypeExpr::bool() => &["P", "Q"],
            TypeExpr::Con(c, _) if c == "fun" => &["f", "g"],
            _ => &["xs", "ys"],
        };
        // Distinct types get distinct names so each variable has one type.
        let suffix = match ty {
            t if *t == list(real()) => "r",
            TypeExpr::Con(c, args) if c == "fun" && args[0] == real() => "r",
            _ => "",
        };
        Term::free(format!("{}{suffix}", names.choose(r).unwrap()), ty.clone())
    }

    /// Symbols whose result type can be `ty` after `n` arguments.
    fn producers(&self, ty: &TypeExpr) -> Vec<(&SignatureEntry, Vec<TypeExpr>, TypeExpr)> {
        let mut out = Vec::new();
        for s in &self.symbols {
            let mut args = Vec::new();
            let mut cur = s.ty.clone();
            loop {
                if let Ok(sub) = unify_types(&cur, ty) {
                    let fix = |t: &TypeExpr| ground_with(&sub.apply(t), &nat());
                    let inst_args: Vec<TypeExpr> = args.iter().map(fix).collect();
                    let full = TypeExpr::curried(inst_args.clone(), ty.clone());
                    out.push((*s, inst_args, full));
                }
                match cur.as_fun() {
                    Some((d, c)) => {
                        args.push(d.clone());
                        let c = c.clone();
                        cur = c;
                    }
                    None => break,
                }
            }
        }
        out
    }

    fn term(&mut self, r: &mut impl Rng, ty: &TypeExpr, depth: usize) -> Term {
        let producers = if depth == 0 { vec![] } else { self.producers(ty) };
        if let (Some((dom, cod)), true) = (ty.as_fun(), r.gen_bool(0.3)) {
            if depth > 0 {
                let (dom, cod) = (dom.clone(), cod.clone());
                self.ctx.push(dom.clone());
                let body = self.term(r, &cod, depth - 1);
                self.ctx.pop();
                return Term::abs("u", dom, body);
            }
        }
        if producers.is_empty() || r.gen_bool(0.25) {
            return self.variable(r, ty);
        }
        let (s, args, full) = producers.choose(r).unwrap().clone();
        let head = Term::constant(s.name.clone(), full);
        let args: Vec<Term> = args.iter().map(|a| self.term(r, a, depth - 1)).collect();
        Term::apps(head, args)
    }

    fn formula(&mut self, r: &mut impl Rng, depth: usize) -> Term {
        let roll = if depth <= 1 { 0 } else { r.gen_range(0..10) };
        match roll {
            0..=4 => {
                let candidates: Vec<TypeExpr> = data_types()
                    .into_iter()
                    .filter(|t| !self.producers(t).is_empty())
                    .collect();
                let ty = candidates.choose(r).cloned().unwrap_or_else(nat);
                let lhs = self.term(r, &ty, depth.saturating_sub(1).max(1));
                let rhs = self.term(r, &ty, depth.saturating_sub(1));
                if r.gen_bool(0.2) {
                    let le = logic_const(
                        "Orderings.ord_class.less_eq",
                        TypeExpr::curried([ty.clone(), ty.clone()], TypeExpr::bool()),
                    );
                    return Term::apps(le, [lhs, rhs]);
                }
                Term::apps(eq_at(&ty), [lhs, rhs])
            }
            5 | 6 => {
                let op = ["HOL.implies", "HOL.conj", "HOL.disj"][r.gen_range(0..3)];
                let a = self.formula(r, depth - 1);
                let b = self.formula(r, depth - 1);
                Term::apps(bool_op(op), [a, b])
            }
            7 => {
                let f = self.formula(r, depth - 1);
                Term::app(logic_const("HOL.Not", TypeExpr::fun(TypeExpr::bool(), TypeExpr::bool())), f)
            }
            8 if !self.producers(&TypeExpr::bool()).is_empty() => self.term(r, &TypeExpr::bool(), depth),
            _ => {
                let ty = [nat(), real(), list(nat())].choose(r).unwrap().clone();
                self.ctx.push(ty.clone());
                let body = self.formula(r, depth - 1);
                self.ctx.pop();
                let q = TypeExpr::fun(TypeExpr::fun(ty.clone(), TypeExpr::bool()), TypeExpr::bool());
                Term::app(logic_const("HOL.All", q), Term::abs("y", ty, body))
            }
        }
    }
}

fn ground_with(t: &TypeExpr, g: &TypeExpr) -> TypeExpr {
    let mut vs = BTreeSet::new();
    type_vars(t, &mut vs);
    subst_type(t, &vs.into_iter().map(|v| (v, g.clone())).collect())
}

/// The constants of `t` outside the whitelist, in first-occurrence order.
pub fn theory_symbols(t: &Term, w: &Whitelist) -> Vec<SignatureEntry> {
    let pool = pool_signature();
    t.const_names()
        .into_iter()
        .filter(|n| !w.contains(n))
        .map(|n| pool.get(n).expect("pool symbol").clone())
        .collect()
}

/// A well-typed formula mentioning between one and four pool symbols, with
/// nesting depth at most `max_depth`, whose types are all pinned down by its
/// symbols: no variable or polymorphic constant could take another type.
pub fn random_lemma(r: &mut impl Rng, w: &Whitelist, max_depth: usize) -> Term {
    let pool = symbol_pool();
    let sig = pool_signature().with_logic();
    loop {
        let n = r.gen_range(1..=4);
        let wanted = r.gen_range(1..=n);
        let symbols: Vec<&SignatureEntry> = pool.choose_multiple(r, n).collect();
        let mut g = LemmaGen { symbols, ctx: vec![] };
        let depth = r.gen_range(2..=max_depth);
        let t = g.formula(r, depth);
        let used = theory_symbols(&t, w).len();
        if used < wanted || term_depth(&t) > max_depth {
            continue;
        }
        if typecheck(&t, &sig).is_err() {
            continue;
        }
        if types_pinned(&t, &sig) {
            return t;
        }
    }
}

/// Depth counting only applications of constants.
pub fn term_depth(t: &Term) -> usize {
    let (head, args) = t.strip_comb();
    let below = args.iter().map(|a| term_depth(a)).max().unwrap_or(0);
    match head {
        Term::Abs { body, .. } => 1 + below.max(term_depth(body)),
        Term::Const { .. } if !args.is_empty() => 1 + below,
        _ => below,
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Probe {
    None,
    Free(usize),
    Abs(usize),
    ConstVar(usize, usize),
}

struct Eraser<'a> {
    sig: &'a Signature,
    probe: Probe,
    frees: Vec<String>,
    abs: usize,
    consts: usize,
    fresh: usize,
}

impl Eraser<'_> {
    fn fresh(&mut self) -> TypeExpr {
        self.fresh += 1;
        TypeExpr::var(format!("e{}", self.fresh))
    }

    fn go(&mut self, t: &Term) -> Term {
        let probe_ty = TypeExpr::base("Probe.t");
        match t {
            Term::Free { name, .. } => {
                let i = match self.frees.iter().position(|f| f == name) {
                    Some(i) => i,
                    None => {
                        self.frees.push(name.clone());
                        self.frees.len() - 1
                    }
                };
                let ty = if self.probe == Probe::Free(i) {
                    probe_ty
                } else {
                    TypeExpr::var(format!("free_{name}"))
                };
                Term::free(name.clone(), ty)
            }
            Term::Abs { binder, body, .. } => {
                let k = self.abs;
                self.abs += 1;
                let ty = if self.probe == Probe::Abs(k) { probe_ty } else { self.fresh() };
                Term::abs(binder.clone(), ty, self.go(body))
            }
            Term::Const { name, .. } => {
                let k = self.consts;
                self.consts += 1;
                let scheme = self.sig.get(name).expect("known constant").ty.clone();
                let mut vs = BTreeSet::new();
                type_vars(&scheme, &mut vs);
                let map: BTreeMap<String, TypeExpr> = vs
                    .into_iter()
                    .enumerate()
                    .map(|(j, v)| {
                        let ty = if self.probe == Probe::ConstVar(k, j) { probe_ty.clone() } else { self.fresh() };
                        (v, ty)
                    })
                    .collect();
                Term::constant(name.clone(), subst_type(&scheme, &map))
            }
            Term::App(f, x) => {
                let f = self.go(f);
                Term::app(f, self.go(x))
            }
            other => other.clone(),
        }
    }
}

/// No variable, binder or constant type variable of `t` can be forced to an
/// unrelated type: each probe makes the erased term ill typed.
pub fn types_pinned(t: &Term, sig: &Signature) -> bool {
    let erase = |probe| {
        Eraser {
            sig,
            probe,
            frees: vec![],
            abs: 0,
            consts: 0,
            fresh: 0,
        }
        .go(t)
    };
    let base = erase(Probe::None);
    if typecheck(&base, sig).is_err() {
        return false;
    }
    let mut probes = Vec::new();
    let (mut fs, mut nabs, mut consts) = (Vec::new(), 0, Vec::new());
    term_frees(t, &mut fs);
    t.visit(&mut |n| match n {
        Term::Abs { .. } => nabs += 1,
        Term::Const { name, .. } => {
            let mut vs = BTreeSet::new();
            type_vars(&sig.get(name).unwrap().ty, &mut vs);
            consts.push(vs.len());
        }
        _ => {}
    });
    probes.extend((0..fs.len()).map(Probe::Free));
    probes.extend((0..nabs).map(Probe::Abs));
    for (k, &n) in consts.iter().enumerate() {
        probes.extend((0..n).map(|j| Probe::ConstVar(k, j)));
    }
    probes.into_iter().all(|p| typecheck(&erase(p), sig).is_err())
}

// ---------------------------------------------------------------- http stub

/// A captured request: lower-cased header lines and the body.
#[derive(Debug, Clone)]
pub struct StubRequest {
    pub headers: Vec<String>,
    pub body: String,
}

/// Serves one canned `(status, body)` reply per connection, in order, on a
/// local port. The handle yields the requests seen.
pub fn stub_server(replies: Vec<(u16, String)>) -> (String, std::thread::JoinHandle<Vec<StubRequest>>) {
    use std::io::{BufRead, BufReader, Read, Write};
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/complete", listener.local_addr().unwrap());
    let handle = std::thread::spawn(move || {
        let mut seen = Vec::new();
        for (status, body) in replies {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream);
            let mut headers = Vec::new();
            let mut len = 0;
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap() == 0 || line == "\r\n" {
                    break;
                }
                let lower = line.trim_end().to_ascii_lowercase();
                if let Some(v) = lower.strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                headers.push(lower);
            }
            let mut buf = vec![0; len];
            reader.read_exact(&mut buf).unwrap();
            seen.push(StubRequest {
                headers,
                body: String::from_utf8(buf).unwrap(),
            });
            let mut stream = reader.into_inner();
            let _ = write!(
                stream,
                "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\nconnection: close\r\ncontent-length: {}\r\n\r\n{body}",
                body.len()
            );
        }
        seen
    });
    (url, handle)
}

pub fn completions(items: &[&str]) -> String {
    serde_json::json!({ "completions": items }).to_string()
}

// ---------------------------------------------------------------- cli

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the binary with `args` and extra environment variables.
pub fn cli(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = std::process::Command::new(env!("CARGO_BIN_EXE_lemmanaid"));
    cmd.args(args).env_remove("LEMMANAID_LLM_URL").env_remove("LEMMANAID_LLM_TOKEN");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn data_file(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn write_jsonl<T: serde::Serialize>(path: &std::path::Path, items: &[T]) {
    let f = std::fs::File::create(path).unwrap();
    lemmanaid::jsonl::write_all(std::io::BufWriter::new(f), items.iter()).unwrap();
}

/// Writes the generated family corpus as train.jsonl and test.jsonl under
/// `dir`, held-out theories going to the test file.
pub fn write_synthetic(dir: &std::path::Path, seed: u64) -> (String, String) {
    let c = lemmanaid::synthetic::generate(seed, &lemmanaid::templates::default_whitelist());
    let train = dir.join("train_corpus.jsonl");
    let test = dir.join("test_corpus.jsonl");
    write_jsonl(&train, &c.train());
    write_jsonl(&test, &c.test());
    (train.display().to_string(), test.display().to_string())
}

// ---------------------------------------------------------------- laws

pub fn result_type(t: &Term) -> Option<TypeExpr> {
    match t {
        Term::Free { ty, .. } | Term::Const { ty, .. } => Some(ty.clone()),
        Term::App(f, _) => result_type(f)?.as_fun().map(|(_, c)| c.clone()),
        _ => None,
    }
}

/// One-sided matching: variables of `pat` may stand for any term of their type.
pub fn matches(pat: &Term, t: &Term, bind: &mut BTreeMap<String, Term>) -> bool {
    match pat {
        Term::Free { name, ty } => {
            if result_type(t).as_ref() != Some(ty) {
                return false;
            }
            match bind.get(name) {
                Some(prev) => prev == t,
                None => {
                    bind.insert(name.clone(), t.clone());
                    true
                }
            }
        }
        Term::App(f, x) => match t {
            Term::App(g, y) => matches(f, g, bind) && matches(x, y, bind),
            _ => false,
        },
        other => other == t,
    }
}

pub fn instance_of(general: &lemmanaid::quickspec::Law, specific: &lemmanaid::quickspec::Law) -> bool {
    [(&specific.lhs, &specific.rhs), (&specific.rhs, &specific.lhs)]
        .into_iter()
        .any(|(l, r)| {
            let mut b = BTreeMap::new();
            matches(&general.lhs, l, &mut b) && matches(&general.rhs, r, &mut b)
        })
}
