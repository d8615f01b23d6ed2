use std::collections::{BTreeMap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::interp::{InterpretedSignature, Value};
use crate::term::{ConstTyping, Inference, Signature, SignatureEntry, Term, TypeExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not testable: {0}")]
pub struct NotTestable(pub String);

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Value of variable slot `(sort, index)` in test number `test`. Each slot
/// has its own stream, so a test's values do not depend on how many tests
/// or variables are drawn.
pub fn sample_slot(sig: &InterpretedSignature, seed: u64, test: usize, sort: usize, index: usize) -> Value {
    let key = splitmix(splitmix(splitmix(seed) ^ test as u64) ^ ((sort as u64) << 32 | index as u64));
    sig.sorts[sort].sample(&mut ChaCha8Rng::seed_from_u64(key))
}

/// Values of variable slots keyed by `(sort name, index within sort)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    pub values: BTreeMap<(String, usize), Value>,
}

impl Valuation {
    pub fn get(&self, sort: &str, index: usize) -> Option<&Value> {
        self.values.get(&(sort.to_string(), index))
    }

    pub fn insert(&mut self, sort: &str, index: usize, v: Value) {
        self.values.insert((sort.to_string(), index), v);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Symbol(usize),
    Eq,
    Not,
    And,
    Or,
    Implies,
    Less,
    LessEq,
    Const(bool),
}

#[derive(Clone, Debug)]
enum Expr {
    Var(usize),
    Call(Op, Vec<Expr>),
}

fn logic_op(name: &str) -> Option<(Op, usize)> {
    Some(match name {
        "HOL.eq" | "Pure.eq" => (Op::Eq, 2),
        "HOL.Not" => (Op::Not, 1),
        "HOL.conj" => (Op::And, 2),
        "HOL.disj" => (Op::Or, 2),
        "HOL.implies" | "Pure.imp" => (Op::Implies, 2),
        "Orderings.ord_class.less" => (Op::Less, 2),
        "Orderings.ord_class.less_eq" => (Op::LessEq, 2),
        "HOL.True" => (Op::Const(true), 0),
        "HOL.False" => (Op::Const(false), 0),
        _ => return None,
    })
}

/// Instantiates the outermost bound variable of `body` with `value`.
fn instantiate_bound(body: &Term, value: &Term, depth: u32) -> Term {
    match body {
        Term::Bound(i) if *i == depth => value.clone(),
        Term::Abs { binder, ty, body } => Term::abs(binder.clone(), ty.clone(), instantiate_bound(body, value, depth + 1)),
        Term::App(f, x) => Term::app(instantiate_bound(f, value, depth), instantiate_bound(x, value, depth)),
        other => other.clone(),
    }
}

/// Drops `Trueprop` wrappers and turns outermost universal quantifiers into
/// free variables.
fn strip_outer(t: &Term, fresh: &mut usize) -> Term {
    let (head, args) = t.strip_comb();
    if let (Term::Const { name, .. }, [arg]) = (head, args.as_slice()) {
        match (name.as_str(), arg) {
            ("HOL.Trueprop", _) => return strip_outer(arg, fresh),
            ("HOL.All" | "Pure.all", Term::Abs { binder, ty, body }) => {
                *fresh += 1;
                let v = Term::free(format!("{binder}'{fresh}"), ty.clone());
                return strip_outer(&instantiate_bound(body, &v, 0), fresh);
            }
            _ => {}
        }
    }
    t.clone()
}

/// A boolean formula over an interpreted signature, ready for evaluation.
#[derive(Clone, Debug)]
pub struct Testable<'a> {
    sig: &'a InterpretedSignature,
    expr: Expr,
    /// `(name, sort, index within sort)` in first-occurrence order.
    vars: Vec<(String, usize, usize)>,
}

impl<'a> Testable<'a> {
    /// Checks that every constant is interpreted or a supported connective
    /// and infers a sort for every free variable from the symbol types.
    pub fn prepare(formula: &Term, sig: &'a InterpretedSignature) -> Result<Testable<'a>, NotTestable> {
        let t = strip_outer(formula, &mut 0);
        let mut sorts_sig = Signature::default();
        for s in &sig.symbols {
            sorts_sig
                .insert(SignatureEntry::new(s.name.clone(), s.ty.clone()))
                .map_err(|e| NotTestable(e.to_string()))?;
        }
        sorts_sig.extend_missing(&Signature::logic());

        // Retype: constants by their interpretation, variables by inference.
        let mut n = 0;
        let mut untyped = |t: &Term| -> Result<Term, NotTestable> {
            let mut err = None;
            let out = t.map_bottom_up(&mut |node| match node {
                Term::Const { name, .. } => {
                    n += 1;
                    let fresh = TypeExpr::var(format!("'c{n}"));
                    if logic_op(&name).is_some() {
                        Term::constant(name, fresh)
                    } else if let Some(s) = sig.symbol(&name) {
                        Term::constant(s.name.clone(), fresh)
                    } else {
                        err.get_or_insert(NotTestable(format!("uninterpreted constant {name}")));
                        Term::constant(name, fresh)
                    }
                }
                Term::Free { name, .. } => {
                    let v = TypeExpr::var(format!("'f{name}"));
                    Term::free(name, v)
                }
                Term::Abs { .. } | Term::Hole { .. } => {
                    err.get_or_insert(NotTestable("binder or hole below the top level".into()));
                    node
                }
                other => other,
            });
            err.map_or(Ok(out), Err)
        };
        let t = untyped(&t)?;
        let mut inference = Inference::new(ConstTyping::Strict(&sorts_sig));
        let ty = inference.infer(&t).map_err(|e| NotTestable(format!("ill-sorted: {e}")))?;
        if ty != TypeExpr::bool() && ty != TypeExpr::prop() {
            return Err(NotTestable("not a formula".into()));
        }

        let mut vars: Vec<(String, usize, usize)> = Vec::new();
        for name in t.free_names() {
            let ty = inference.subst.apply(&TypeExpr::var(format!("'f{name}")));
            let sort = sig
                .sort_of_type(&ty)
                .ok_or_else(|| NotTestable(format!("variable {name} has no testable sort")))?;
            let index = vars.iter().filter(|v| v.1 == sort).count();
            vars.push((name.to_string(), sort, index));
        }
        let positions: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.0.as_str(), i)).collect();
        let expr = compile(&t, sig, &positions)?;
        Ok(Testable { sig, expr, vars })
    }

    /// Variables as `(name, sort name, index within sort)`.
    pub fn variables(&self) -> impl Iterator<Item = (&str, &str, usize)> {
        self.vars
            .iter()
            .map(|(n, s, i)| (n.as_str(), self.sig.sorts[*s].name.as_str(), *i))
    }

    /// Truth value under `val`; missing slots are an error.
    pub fn holds(&self, val: &Valuation) -> Result<bool, NotTestable> {
        let env: Vec<Value> = self
            .variables()
            .map(|(n, s, i)| {
                val.get(s, i)
                    .cloned()
                    .ok_or_else(|| NotTestable(format!("no value for {n}")))
            })
            .collect::<Result<_, _>>()?;
        Ok(matches!(eval(&self.expr, self.sig, &env), Value::Bool(true)))
    }

    fn valuation(&self, seed: u64, test: usize) -> Valuation {
        let mut v = Valuation::default();
        for (_, s, i) in &self.vars {
            v.insert(&self.sig.sorts[*s].name, *i, sample_slot(self.sig, seed, test, *s, *i));
        }
        v
    }

    /// `x1 = 21, x2 = 22`
    pub fn describe(&self, val: &Valuation) -> String {
        self.variables()
            .map(|(n, s, i)| match val.get(s, i) {
                Some(v) => format!("{n} = {v}"),
                None => format!("{n} = ?"),
            })
            .collect::<Vec<_>>()
            .join(", ")
    }
}

fn compile(t: &Term, sig: &InterpretedSignature, vars: &HashMap<&str, usize>) -> Result<Expr, NotTestable> {
    let (head, args) = t.strip_comb();
    match head {
        Term::Free { name, .. } if args.is_empty() => Ok(Expr::Var(vars[name.as_str()])),
        Term::Free { name, .. } => Err(NotTestable(format!("variable {name} used as a function"))),
        Term::Const { name, .. } => {
            let (op, arity) = match logic_op(name) {
                Some(found) => found,
                None => {
                    let i = sig.symbols.iter().position(|s| &s.name == name).expect("renamed above");
                    (Op::Symbol(i), sig.symbols[i].args.len())
                }
            };
            if args.len() != arity {
                return Err(NotTestable(format!("{name} is not fully applied")));
            }
            let args = args.into_iter().map(|a| compile(a, sig, vars)).collect::<Result<_, _>>()?;
            Ok(Expr::Call(op, args))
        }
        _ => Err(NotTestable("unsupported term shape".into())),
    }
}

fn eval(e: &Expr, sig: &InterpretedSignature, env: &[Value]) -> Value {
    match e {
        Expr::Var(i) => env[*i].clone(),
        Expr::Call(op, args) => {
            let vals: Vec<Value> = args.iter().map(|a| eval(a, sig, env)).collect();
            let b = |i: usize| matches!(vals[i], Value::Bool(true));
            match op {
                Op::Symbol(i) => {
                    let s = &sig.symbols[*i];
                    let refs: Vec<&Value> = vals.iter().collect();
                    s.builtin.apply(&refs, &sig.sorts[s.result])
                }
                Op::Eq => Value::Bool(vals[0] == vals[1]),
                Op::Not => Value::Bool(!b(0)),
                Op::And => Value::Bool(b(0) && b(1)),
                Op::Or => Value::Bool(b(0) || b(1)),
                Op::Implies => Value::Bool(!b(0) || b(1)),
                Op::Less => Value::Bool(vals[0] < vals[1]),
                Op::LessEq => Value::Bool(vals[0] <= vals[1]),
                Op::Const(c) => Value::Bool(*c),
            }
        }
    }
}

/// First of `num_tests` seeded valuations that falsifies `formula`.
pub fn find_counterexample(
    formula: &Term,
    sig: &InterpretedSignature,
    num_tests: usize,
    seed: u64,
) -> Result<Option<Valuation>, NotTestable> {
    let testable = Testable::prepare(formula, sig)?;
    for test in 0..num_tests {
        let v = testable.valuation(seed, test);
        if !testable.holds(&v)? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}
