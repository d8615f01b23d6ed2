use std::collections::HashMap;

use thiserror::Error;

use super::whitelist::Whitelist;
use crate::term::{
    parse_term, pretty, render_term, typecheck_annotated, ParseError, Term, TypeError, TypeExpr, FUN,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("not a canonical template: {0}")]
    NonCanonical(String),
    #[error("ill-typed: {0}")]
    IllTyped(#[from] TypeError),
    #[error("lemma term already contains holes")]
    HasHoles,
}

/// A hole-bearing term in canonical form: holes numbered by first
/// occurrence, free variables `x1..`, binders `y<depth>`, type variables
/// `a0..`, and only function types and type variables in annotations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    body: Term,
    hole_types: Vec<TypeExpr>,
    canonical: String,
}

impl Template {
    pub fn body(&self) -> &Term {
        &self.body
    }

    pub fn hole_count(&self) -> usize {
        self.hole_types.len()
    }

    /// Annotation of hole `index` (1-based).
    pub fn hole_type(&self, index: u32) -> Option<&TypeExpr> {
        (index as usize).checked_sub(1).and_then(|i| self.hole_types.get(i))
    }

    pub fn hole_types(&self) -> &[TypeExpr] {
        &self.hole_types
    }

    /// The canonical S-expression; two templates are the same iff these are
    /// byte-equal.
    pub fn canonical(&self) -> &str {
        &self.canonical
    }

    /// Display form such as `?H1 x1 (?H1 x2 x3) = ?H1 (?H1 x1 x2) x3`.
    pub fn pretty(&self) -> String {
        pretty(&self.body)
    }

    /// Assumes `body` already passed [`validate`].
    fn from_valid_body(body: Term) -> Template {
        let mut hole_types: Vec<Option<TypeExpr>> = Vec::new();
        body.visit(&mut |t| {
            if let Term::Hole { index, ty } = t {
                let i = *index as usize - 1;
                if hole_types.len() <= i {
                    hole_types.resize(i + 1, None);
                }
                hole_types[i].get_or_insert_with(|| ty.clone());
            }
        });
        let canonical = render_term(&body);
        Template {
            body,
            hole_types: hole_types.into_iter().map(Option::unwrap).collect(),
            canonical,
        }
    }
}

pub fn canonical_string(tpl: &Template) -> &str {
    tpl.canonical()
}

/// Replaces every maximal non-function subtree of a type by a variable,
/// sharing one variable between syntactically identical subtrees.
#[derive(Default)]
struct Generalizer {
    table: HashMap<TypeExpr, usize>,
}

impl Generalizer {
    fn apply(&mut self, t: &TypeExpr) -> TypeExpr {
        if let Some((dom, cod)) = t.as_fun() {
            let dom = self.apply(dom);
            return TypeExpr::fun(dom, self.apply(cod));
        }
        let next = self.table.len();
        let id = *self.table.entry(t.clone()).or_insert(next);
        TypeExpr::Var(format!("#{id}"))
    }
}

/// Least general generalization of two types; disagreeing pairs map to
/// shared fresh variables.
fn lgg(a: &TypeExpr, b: &TypeExpr, table: &mut HashMap<(TypeExpr, TypeExpr), String>) -> TypeExpr {
    if a == b {
        return a.clone();
    }
    match (a, b) {
        (TypeExpr::Con(f, xs), TypeExpr::Con(g, ys)) if f == g && xs.len() == ys.len() => TypeExpr::Con(
            f.clone(),
            xs.iter().zip(ys).map(|(x, y)| lgg(x, y, table)).collect(),
        ),
        _ => {
            let n = table.len();
            let v = table
                .entry((a.clone(), b.clone()))
                .or_insert_with(|| format!("#lgg{n}"));
            TypeExpr::Var(v.clone())
        }
    }
}

struct Abstractor {
    holes: Vec<String>,
    hole_types: Vec<TypeExpr>,
    frees: Vec<String>,
    gen: Generalizer,
}

impl Abstractor {
    fn hole_index(&self, name: &str) -> Option<u32> {
        self.holes.iter().position(|h| h == name).map(|i| i as u32 + 1)
    }

    fn build(&mut self, t: &Term, depth: usize) -> Term {
        match t {
            Term::Const { name, ty } => match self.hole_index(name) {
                Some(k) => Term::Hole {
                    index: k,
                    ty: self.hole_types[k as usize - 1].clone(),
                },
                None => Term::Const {
                    name: name.clone(),
                    ty: self.gen.apply(ty),
                },
            },
            Term::Free { name, ty } => {
                let i = self.frees.iter().position(|f| f == name).unwrap_or_else(|| {
                    self.frees.push(name.clone());
                    self.frees.len() - 1
                });
                Term::Free {
                    name: format!("x{}", i + 1),
                    ty: self.gen.apply(ty),
                }
            }
            Term::Bound(i) => Term::Bound(*i),
            Term::Abs { ty, body, .. } => {
                let ty = self.gen.apply(ty);
                Term::Abs {
                    binder: format!("y{depth}"),
                    ty,
                    body: Box::new(self.build(body, depth + 1)),
                }
            }
            Term::App(f, x) => {
                let f = self.build(f, depth);
                Term::App(Box::new(f), Box::new(self.build(x, depth)))
            }
            Term::Hole { .. } => unreachable!("inputs are checked to be hole free"),
        }
    }
}

/// Abstracts a lemma term into its template: constants outside the
/// whitelist become holes (one index per distinct name, by first
/// occurrence), types are generalized and names canonicalized.
pub fn abstract_lemma(t: &Term, w: &Whitelist) -> Result<Template, TemplateError> {
    if t.has_holes() {
        return Err(TemplateError::HasHoles);
    }
    typecheck_annotated(t)?;

    let holes: Vec<String> = t
        .const_names()
        .into_iter()
        .filter(|n| !w.contains(n))
        .map(String::from)
        .collect();

    let mut gen = Generalizer::default();
    let mut occurrences: Vec<Vec<TypeExpr>> = vec![Vec::new(); holes.len()];
    // Assign generalization variables in rendering order of the source.
    t.visit(&mut |node| match node {
        Term::Const { name, ty } => {
            let g = gen.apply(ty);
            if let Some(i) = holes.iter().position(|h| h == name) {
                if !occurrences[i].contains(&g) {
                    occurrences[i].push(g);
                }
            }
        }
        Term::Free { ty, .. } | Term::Abs { ty, .. } => {
            gen.apply(ty);
        }
        _ => {}
    });

    let mut lgg_table = HashMap::new();
    let hole_types: Vec<TypeExpr> = occurrences
        .iter()
        .map(|occ| {
            let (first, rest) = occ.split_first().expect("every hole occurs");
            rest.iter().fold(first.clone(), |acc, t| lgg(&acc, t, &mut lgg_table))
        })
        .collect();

    let mut abstractor = Abstractor {
        holes,
        hole_types,
        frees: Vec::new(),
        gen,
    };
    let body = abstractor.build(t, 0).canonicalize_type_vars();
    debug_assert!(validate(&body, w).is_ok(), "abstraction produced a non-canonical template");
    Ok(Template::from_valid_body(body))
}

fn non_canonical<T>(reason: impl Into<String>) -> Result<T, TemplateError> {
    Err(TemplateError::NonCanonical(reason.into()))
}

fn only_fun_types(t: &TypeExpr) -> bool {
    match t {
        TypeExpr::Var(_) => true,
        TypeExpr::Con(name, args) => name == FUN && args.len() == 2 && args.iter().all(only_fun_types),
    }
}

fn check_binders(t: &Term, depth: usize) -> Result<(), TemplateError> {
    match t {
        Term::Abs { binder, body, .. } => {
            if *binder != format!("y{depth}") {
                return non_canonical(format!("binder {binder:?} at depth {depth} should be y{depth}"));
            }
            check_binders(body, depth + 1)
        }
        Term::App(f, x) => {
            check_binders(f, depth)?;
            check_binders(x, depth)
        }
        _ => Ok(()),
    }
}

/// Checks every template invariant on a parsed body.
fn validate(body: &Term, w: &Whitelist) -> Result<(), TemplateError> {
    let mut first_seen: Vec<u32> = Vec::new();
    let mut annotations: HashMap<u32, &TypeExpr> = HashMap::new();
    let mut problem: Option<String> = None;
    body.visit(&mut |t| {
        if problem.is_some() {
            return;
        }
        match t {
            Term::Hole { index, ty } => {
                if !first_seen.contains(index) {
                    first_seen.push(*index);
                }
                match annotations.get(index) {
                    Some(prev) if *prev != ty => {
                        problem = Some(format!("hole {index} has differing type annotations"))
                    }
                    _ => {
                        annotations.insert(*index, ty);
                    }
                }
            }
            Term::Const { name, .. } if !w.contains(name) => {
                problem = Some(format!("constant {name} is not a logical symbol and must be a hole"))
            }
            _ => {}
        }
        if let Term::Const { ty, .. } | Term::Free { ty, .. } | Term::Abs { ty, .. } | Term::Hole { ty, .. } = t {
            if problem.is_none() && !only_fun_types(ty) {
                problem = Some(format!("annotation {ty} contains a concrete type constructor"));
            }
        }
    });
    if let Some(p) = problem {
        return non_canonical(p);
    }
    for (i, k) in first_seen.iter().enumerate() {
        if *k as usize != i + 1 {
            let mut sorted = first_seen.clone();
            sorted.sort_unstable();
            return non_canonical(format!(
                "holes must be numbered 1..n by first occurrence, found {sorted:?} in order {first_seen:?}"
            ));
        }
    }
    for (i, name) in body.free_names().iter().enumerate() {
        if *name != format!("x{}", i + 1) {
            return non_canonical(format!("free variable {name:?} should be x{}", i + 1));
        }
    }
    check_binders(body, 0)?;
    for (i, v) in body.type_vars().iter().enumerate() {
        if *v != format!("a{i}") {
            return non_canonical(format!("type variable {v:?} should be a{i}"));
        }
    }
    typecheck_annotated(body)?;
    Ok(())
}

/// Parses and validates a template; the gate applied to proposer output.
pub fn parse_template(text: &str, w: &Whitelist) -> Result<Template, TemplateError> {
    let body = parse_term(text.trim())?;
    template_from_body(body, w)
}

/// Validates an already-built body.
pub fn template_from_body(body: Term, w: &Whitelist) -> Result<Template, TemplateError> {
    validate(&body, w)?;
    Ok(Template::from_valid_body(body))
}
