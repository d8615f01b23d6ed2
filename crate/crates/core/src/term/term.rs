use std::fmt;

use super::types::TypeExpr;

/// Lambda terms with de Bruijn bound variables and typed holes.
///
/// Binder names on [`Term::Abs`] are kept for display only.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Const { name: String, ty: TypeExpr },
    Free { name: String, ty: TypeExpr },
    Bound(u32),
    Abs { binder: String, ty: TypeExpr, body: Box<Term> },
    App(Box<Term>, Box<Term>),
    Hole { index: u32, ty: TypeExpr },
}

impl Term {
    pub fn constant(name: impl Into<String>, ty: TypeExpr) -> Self {
        Term::Const { name: name.into(), ty }
    }

    pub fn free(name: impl Into<String>, ty: TypeExpr) -> Self {
        Term::Free { name: name.into(), ty }
    }

    pub fn abs(binder: impl Into<String>, ty: TypeExpr, body: Term) -> Self {
        Term::Abs {
            binder: binder.into(),
            ty,
            body: Box::new(body),
        }
    }

    pub fn app(f: Term, x: Term) -> Self {
        Term::App(Box::new(f), Box::new(x))
    }

    /// Left-nested application `f a1 ... an`.
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Self {
        args.into_iter().fold(f, Term::app)
    }

    pub fn hole(index: u32, ty: TypeExpr) -> Self {
        Term::Hole { index, ty }
    }

    /// Splits `f a1 ... an` into the head and its arguments.
    pub fn strip_comb(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Term::App(f, x) = t {
            args.push(x.as_ref());
            t = f;
        }
        args.reverse();
        (t, args)
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Abs { body, .. } => 1 + body.size(),
            Term::App(f, x) => 1 + f.size() + x.size(),
            _ => 1,
        }
    }

    pub fn has_holes(&self) -> bool {
        let mut found = false;
        self.visit(&mut |t| found |= matches!(t, Term::Hole { .. }));
        found
    }

    /// Pre-order traversal: a node, then its function part, then its argument.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        match self {
            Term::Abs { body, .. } => body.visit(f),
            Term::App(g, x) => {
                g.visit(f);
                x.visit(f);
            }
            _ => {}
        }
    }

    /// Distinct constant names in first-occurrence order.
    pub fn const_names(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        self.visit(&mut |t| {
            if let Term::Const { name, .. } = t {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
        });
        out
    }

    /// Distinct free variable names in first-occurrence order.
    pub fn free_names(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        self.visit(&mut |t| {
            if let Term::Free { name, .. } = t {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
        });
        out
    }

    /// Type variables of all annotations in rendering order.
    pub fn type_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |t| match t {
            Term::Const { ty, .. } | Term::Free { ty, .. } | Term::Abs { ty, .. } | Term::Hole { ty, .. } => {
                ty.collect_vars(&mut out)
            }
            _ => {}
        });
        out
    }

    /// Rebuilds the term bottom-up through `f`, which sees each node after its
    /// children have been rebuilt.
    pub fn map_bottom_up(&self, f: &mut impl FnMut(Term) -> Term) -> Term {
        let rebuilt = match self {
            Term::Abs { binder, ty, body } => Term::Abs {
                binder: binder.clone(),
                ty: ty.clone(),
                body: Box::new(body.map_bottom_up(f)),
            },
            Term::App(g, x) => Term::App(Box::new(g.map_bottom_up(f)), Box::new(x.map_bottom_up(f))),
            other => other.clone(),
        };
        f(rebuilt)
    }

    /// Applies `f` to every type annotation.
    pub fn map_types(&self, f: &mut impl FnMut(&TypeExpr) -> TypeExpr) -> Term {
        match self {
            Term::Const { name, ty } => Term::Const { name: name.clone(), ty: f(ty) },
            Term::Free { name, ty } => Term::Free { name: name.clone(), ty: f(ty) },
            Term::Bound(i) => Term::Bound(*i),
            Term::Abs { binder, ty, body } => {
                let ty = f(ty);
                Term::Abs {
                    binder: binder.clone(),
                    ty,
                    body: Box::new(body.map_types(f)),
                }
            }
            Term::App(g, x) => {
                let g = g.map_types(f);
                Term::App(Box::new(g), Box::new(x.map_types(f)))
            }
            Term::Hole { index, ty } => Term::Hole { index: *index, ty: f(ty) },
        }
    }

    /// Renames type variables to `a0, a1, ...` in rendering order.
    pub fn canonicalize_type_vars(&self) -> Term {
        let order = self.type_vars();
        let mut rename = |v: &str| {
            order
                .iter()
                .position(|o| o == v)
                .map(|i| format!("a{i}"))
        };
        self.map_types(&mut |t| t.rename_vars(&mut rename))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::sexp::render_term(self))
    }
}
