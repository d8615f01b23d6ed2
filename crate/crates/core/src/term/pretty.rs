//! Human-readable rendering (`?H1 x1 (?H1 x2 x3) = ...`). Display only; the
//! S-expression form is the one with an equality contract.

use super::term::Term;

const APP_PREC: u8 = 100;
const BINDER_PREC: u8 = 10;

fn infix(name: &str) -> Option<(&'static str, u8)> {
    Some(match name {
        "HOL.eq" => ("=", 50),
        "Pure.eq" => ("≡", 50),
        "HOL.conj" => ("∧", 35),
        "HOL.disj" => ("∨", 30),
        "HOL.implies" => ("⟶", 25),
        "Pure.imp" => ("⟹", 20),
        "Orderings.ord_class.less" => ("<", 50),
        "Orderings.ord_class.less_eq" => ("≤", 50),
        "Set.member" => ("∈", 50),
        _ => return None,
    })
}

fn binder(name: &str) -> Option<&'static str> {
    Some(match name {
        "HOL.All" | "Pure.all" => "∀",
        "HOL.Ex" => "∃",
        _ => return None,
    })
}

fn short(name: &str) -> &str {
    if name.chars().all(|c| !c.is_alphanumeric()) {
        return name;
    }
    name.rsplit('.').next().unwrap_or(name)
}

/// Symbolic names such as `+` or `@` are shown infix when fully applied.
fn symbolic(name: &str) -> bool {
    let s = short(name);
    !s.is_empty() && s.chars().all(|c| !c.is_alphanumeric() && c != '_' && c != '\'')
}

struct Printer {
    binders: Vec<String>,
}

impl Printer {
    fn atom(&self, t: &Term) -> Option<String> {
        Some(match t {
            Term::Const { name, .. } => match name.as_str() {
                "HOL.Not" => "Not".into(),
                "HOL.True" => "True".into(),
                "HOL.False" => "False".into(),
                _ => short(name).to_string(),
            },
            Term::Free { name, .. } => name.clone(),
            Term::Bound(i) => {
                let i = *i as usize;
                match self.binders.len().checked_sub(i + 1) {
                    Some(pos) => self.binders[pos].clone(),
                    None => format!("#{i}"),
                }
            }
            Term::Hole { index, .. } => format!("?H{index}"),
            _ => return None,
        })
    }

    /// Rendering of `t` and the precedence of its outermost construct.
    fn show(&mut self, t: &Term) -> (String, u8) {
        if let Some(a) = self.atom(t) {
            return (a, u8::MAX);
        }
        if let Term::Abs { binder, body, .. } = t {
            self.binders.push(binder.clone());
            let (b, _) = self.show(body);
            self.binders.pop();
            return (format!("λ{binder}. {b}"), BINDER_PREC);
        }
        let (head, args) = t.strip_comb();
        if let Term::Const { name, .. } = head {
            if args.len() == 2 {
                let op = infix(name)
                    .map(|(s, p)| (s.to_string(), p))
                    .or_else(|| symbolic(name).then(|| (short(name).to_string(), 65)));
                if let Some((op, prec)) = op {
                    let l = self.operand(args[0], prec);
                    let r = self.operand(args[1], prec);
                    return (format!("{l} {op} {r}"), prec);
                }
            }
            if name == "HOL.Not" && args.len() == 1 {
                let (s, p) = self.show(args[0]);
                let s = if p < APP_PREC { format!("({s})") } else { format!(" {s}") };
                return (format!("¬{s}"), 40);
            }
            if let Some(q) = binder(name) {
                if args.len() == 1 {
                    if let Term::Abs { .. } = args[0] {
                        return self.quantifier(name, q, args[0]);
                    }
                }
            }
        }
        let mut parts = vec![self.operand(head, APP_PREC)];
        for a in args {
            parts.push(self.operand(a, APP_PREC));
        }
        (parts.join(" "), APP_PREC)
    }

    fn quantifier(&mut self, name: &str, symbol: &str, mut abs: &Term) -> (String, u8) {
        let mut names = Vec::new();
        loop {
            let Term::Abs { binder, body, .. } = abs else { break };
            names.push(binder.clone());
            self.binders.push(binder.clone());
            let (head, args) = body.strip_comb();
            match (head, args.as_slice()) {
                (Term::Const { name: n, .. }, [inner @ Term::Abs { .. }]) if n == name => abs = inner,
                _ => {
                    abs = body;
                    break;
                }
            }
        }
        let (b, _) = self.show(abs);
        for _ in &names {
            self.binders.pop();
        }
        (format!("{symbol}{}. {b}", names.join(" ")), BINDER_PREC)
    }

    fn operand(&mut self, t: &Term, prec: u8) -> String {
        let (s, p) = self.show(t);
        if p <= prec && p != u8::MAX {
            format!("({s})")
        } else {
            s
        }
    }
}

pub fn pretty(t: &Term) -> String {
    Printer { binders: Vec::new() }.show(t).0
}
