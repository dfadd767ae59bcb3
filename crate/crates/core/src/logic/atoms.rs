//! Atom payloads for the four signatures.

use std::fmt;

use super::formula::{Atom, Formula, Signature};
use super::parse::{expect_arity, sexp_nat, sexp_str, sexp_var, ParseError, Sexp};
use super::strings::{DigitString, FgString};
use super::var::Var;

fn quoted(out: &mut String, s: &dyn fmt::Display) {
    out.push('"');
    out.push_str(&s.to_string());
    out.push('"');
}

fn mismatch(head: &str, pos: usize, sig: Signature) -> ParseError {
    ParseError::Signature {
        pos,
        head: head.to_string(),
        sig,
    }
}

/// Atoms of the tree-of-bijections signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeAtom {
    U(DigitString, Var),
    B(DigitString, DigitString, Var, Var),
    Eq(Var, Var),
}

impl TreeAtom {
    pub fn u(s: &str, v: Var) -> Self {
        TreeAtom::U(DigitString::from(s), v)
    }

    pub fn b(s: &str, t: &str, v: Var, w: Var) -> Self {
        TreeAtom::B(DigitString::from(s), DigitString::from(t), v, w)
    }
}

impl Atom for TreeAtom {
    const SIGNATURE: Signature = Signature::Tree;

    fn vars(&self) -> Vec<Var> {
        match self {
            TreeAtom::U(_, v) => vec![*v],
            TreeAtom::B(_, _, v, w) | TreeAtom::Eq(v, w) => vec![*v, *w],
        }
    }

    fn map_vars(&self, f: &mut dyn FnMut(Var) -> Var) -> Self {
        match self {
            TreeAtom::U(s, v) => TreeAtom::U(s.clone(), f(*v)),
            TreeAtom::B(s, t, v, w) => TreeAtom::B(s.clone(), t.clone(), f(*v), f(*w)),
            TreeAtom::Eq(v, w) => TreeAtom::Eq(f(*v), f(*w)),
        }
    }

    fn write_sexp(&self, out: &mut String) {
        match self {
            TreeAtom::U(s, v) => {
                out.push_str("(U ");
                quoted(out, s);
                out.push_str(&format!(" {v})"));
            }
            TreeAtom::B(s, t, v, w) => {
                out.push_str("(B ");
                quoted(out, s);
                out.push(' ');
                quoted(out, t);
                out.push_str(&format!(" {v} {w})"));
            }
            TreeAtom::Eq(v, w) => out.push_str(&format!("(= {v} {w})")),
        }
    }

    fn from_sexp(head: &str, args: &[Sexp], pos: usize) -> Result<Self, ParseError> {
        let digits = |e: &Sexp| DigitString::parse(sexp_str(e)?).map_err(|m| ParseError::syntax(e.pos(), m));
        match head {
            "U" => {
                expect_arity(head, args, 2, pos)?;
                Ok(TreeAtom::U(digits(&args[0])?, sexp_var(&args[1])?))
            }
            "B" => {
                expect_arity(head, args, 4, pos)?;
                let s = digits(&args[0])?;
                let t = digits(&args[1])?;
                if s.len() != t.len() {
                    return Err(ParseError::syntax(pos, "B strings must have equal length"));
                }
                Ok(TreeAtom::B(s, t, sexp_var(&args[2])?, sexp_var(&args[3])?))
            }
            "=" => {
                expect_arity(head, args, 2, pos)?;
                Ok(TreeAtom::Eq(sexp_var(&args[0])?, sexp_var(&args[1])?))
            }
            _ => Err(mismatch(head, pos, Signature::Tree)),
        }
    }

    fn truth(&self) -> Option<bool> {
        match self {
            TreeAtom::U(s, _) if s.is_empty() => Some(true),
            TreeAtom::Eq(v, w) if v == w => Some(true),
            TreeAtom::B(s, t, v, w) if v == w && s != t => Some(false),
            _ => None,
        }
    }

    fn canonical(&self) -> Self {
        match self {
            TreeAtom::Eq(v, w) if w < v => TreeAtom::Eq(*w, *v),
            TreeAtom::B(s, t, v, w) if w < v || (v == w && t < s) => TreeAtom::B(t.clone(), s.clone(), *w, *v),
            _ => self.clone(),
        }
    }
}

/// A pairing-signature term: an {f,g} word applied to a variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairTerm {
    pub s: FgString,
    pub var: Var,
}

impl PairTerm {
    pub fn var(v: Var) -> Self {
        PairTerm { s: FgString::empty(), var: v }
    }

    pub fn app(s: &str, v: Var) -> Self {
        PairTerm { s: FgString::from(s), var: v }
    }

    pub fn new(s: FgString, var: Var) -> Self {
        PairTerm { s, var }
    }

    /// `u` applied on the outside of this term.
    pub fn wrap(&self, u: &FgString) -> Self {
        PairTerm {
            s: u.concat(&self.s),
            var: self.var,
        }
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    fn write(&self, out: &mut String) {
        if self.s.is_empty() {
            out.push_str(&self.var.name());
        } else {
            out.push_str("(app ");
            quoted(out, &self.s);
            out.push_str(&format!(" {})", self.var));
        }
    }

    fn parse(e: &Sexp) -> Result<PairTerm, ParseError> {
        match e {
            Sexp::Sym(..) => Ok(PairTerm::var(sexp_var(e)?)),
            Sexp::List(items, p) => match items.first() {
                Some(Sexp::Sym(h, _)) if h == "app" => {
                    expect_arity("app", &items[1..], 2, *p)?;
                    let s = FgString::parse(sexp_str(&items[1])?).map_err(|m| ParseError::syntax(items[1].pos(), m))?;
                    Ok(PairTerm { s, var: sexp_var(&items[2])? })
                }
                _ => Err(ParseError::syntax(*p, "expected a term")),
            },
            Sexp::Str(_, p) => Err(ParseError::syntax(*p, "expected a term")),
        }
    }
}

impl fmt::Display for PairTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s);
        f.write_str(&s)
    }
}

/// Atoms of the pairing signature expanded by the class predicates.
/// `Cinit(k, t)` says t lies in the k-th class after the initial one and
/// `Cfin(k, t)` that it lies k steps before the final class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairAtom {
    E(PairTerm, PairTerm),
    Eq(PairTerm, PairTerm),
    Cinit(u32, PairTerm),
    Cfin(u32, PairTerm),
}

impl PairAtom {
    pub fn is_equality(&self) -> bool {
        matches!(self, PairAtom::Eq(..))
    }

    pub fn terms(&self) -> Vec<&PairTerm> {
        match self {
            PairAtom::E(a, b) | PairAtom::Eq(a, b) => vec![a, b],
            PairAtom::Cinit(_, t) | PairAtom::Cfin(_, t) => vec![t],
        }
    }

    pub fn max_len(&self) -> usize {
        self.terms().iter().map(|t| t.len()).max().unwrap_or(0)
    }

    pub fn map_terms(&self, f: &mut dyn FnMut(&PairTerm) -> PairTerm) -> PairAtom {
        match self {
            PairAtom::E(a, b) => PairAtom::E(f(a), f(b)),
            PairAtom::Eq(a, b) => PairAtom::Eq(f(a), f(b)),
            PairAtom::Cinit(k, t) => PairAtom::Cinit(*k, f(t)),
            PairAtom::Cfin(k, t) => PairAtom::Cfin(*k, f(t)),
        }
    }
}

impl Atom for PairAtom {
    const SIGNATURE: Signature = Signature::Pair;

    fn vars(&self) -> Vec<Var> {
        self.terms().iter().map(|t| t.var).collect()
    }

    fn map_vars(&self, f: &mut dyn FnMut(Var) -> Var) -> Self {
        self.map_terms(&mut |t| PairTerm { s: t.s.clone(), var: f(t.var) })
    }

    fn write_sexp(&self, out: &mut String) {
        match self {
            PairAtom::E(a, b) | PairAtom::Eq(a, b) => {
                out.push_str(if matches!(self, PairAtom::E(..)) { "(E " } else { "(= " });
                a.write(out);
                out.push(' ');
                b.write(out);
                out.push(')');
            }
            PairAtom::Cinit(k, t) | PairAtom::Cfin(k, t) => {
                out.push_str(if matches!(self, PairAtom::Cinit(..)) { "(Cinit " } else { "(Cfin " });
                out.push_str(&format!("{k} "));
                t.write(out);
                out.push(')');
            }
        }
    }

    fn from_sexp(head: &str, args: &[Sexp], pos: usize) -> Result<Self, ParseError> {
        match head {
            "E" | "=" => {
                expect_arity(head, args, 2, pos)?;
                let a = PairTerm::parse(&args[0])?;
                let b = PairTerm::parse(&args[1])?;
                Ok(if head == "E" { PairAtom::E(a, b) } else { PairAtom::Eq(a, b) })
            }
            "Cinit" | "Cfin" => {
                expect_arity(head, args, 2, pos)?;
                let k = sexp_nat(&args[0])?;
                let t = PairTerm::parse(&args[1])?;
                Ok(if head == "Cinit" { PairAtom::Cinit(k, t) } else { PairAtom::Cfin(k, t) })
            }
            _ => Err(mismatch(head, pos, Signature::Pair)),
        }
    }

    fn truth(&self) -> Option<bool> {
        match self {
            PairAtom::Eq(a, b) if a == b => Some(true),
            PairAtom::E(a, b) if a.var == b.var && a.len() == b.len() => Some(true),
            _ => None,
        }
    }

    fn canonical(&self) -> Self {
        match self {
            PairAtom::E(a, b) if b < a => PairAtom::E(b.clone(), a.clone()),
            PairAtom::Eq(a, b) if b < a => PairAtom::Eq(b.clone(), a.clone()),
            _ => self.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StarBase {
    Var(Var),
    Init,
    Fin,
}

/// `S^k(base)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StarTerm {
    pub base: StarBase,
    pub k: u32,
}

impl StarTerm {
    pub fn var(v: Var, k: u32) -> Self {
        StarTerm { base: StarBase::Var(v), k }
    }

    pub fn init(k: u32) -> Self {
        StarTerm { base: StarBase::Init, k }
    }

    pub fn fin() -> Self {
        StarTerm { base: StarBase::Fin, k: 0 }
    }

    pub fn var_of(&self) -> Option<Var> {
        match self.base {
            StarBase::Var(v) => Some(v),
            _ => None,
        }
    }

    fn write(&self, out: &mut String) {
        let b = match self.base {
            StarBase::Var(v) => v.name(),
            StarBase::Init => "cinit".to_string(),
            StarBase::Fin => "cfin".to_string(),
        };
        if self.k == 0 {
            out.push_str(&b);
        } else {
            out.push_str(&format!("(S {} {b})", self.k));
        }
    }

    fn parse(e: &Sexp) -> Result<StarTerm, ParseError> {
        match e {
            Sexp::Sym(s, _) if s == "cinit" => Ok(StarTerm::init(0)),
            Sexp::Sym(s, _) if s == "cfin" => Ok(StarTerm::fin()),
            Sexp::Sym(..) => Ok(StarTerm::var(sexp_var(e)?, 0)),
            Sexp::List(items, p) => match items.first() {
                Some(Sexp::Sym(h, _)) if h == "S" => {
                    expect_arity("S", &items[1..], 2, *p)?;
                    let k = sexp_nat(&items[1])?;
                    let inner = StarTerm::parse(&items[2])?;
                    if inner.k != 0 {
                        return Err(ParseError::syntax(items[2].pos(), "nested S terms are not allowed"));
                    }
                    Ok(StarTerm { base: inner.base, k })
                }
                _ => Err(ParseError::syntax(*p, "expected a term")),
            },
            Sexp::Str(_, p) => Err(ParseError::syntax(*p, "expected a term")),
        }
    }
}

impl fmt::Display for StarTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s);
        f.write_str(&s)
    }
}

/// `S^k(u) = S^l(u')` over the successor signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StarAtom(pub StarTerm, pub StarTerm);

impl StarAtom {
    pub fn new(a: StarTerm, b: StarTerm) -> Self {
        StarAtom(a, b)
    }
}

impl Atom for StarAtom {
    const SIGNATURE: Signature = Signature::Star;

    fn vars(&self) -> Vec<Var> {
        [self.0.var_of(), self.1.var_of()].into_iter().flatten().collect()
    }

    fn map_vars(&self, f: &mut dyn FnMut(Var) -> Var) -> Self {
        let m = |t: &StarTerm, f: &mut dyn FnMut(Var) -> Var| match t.base {
            StarBase::Var(v) => StarTerm::var(f(v), t.k),
            _ => *t,
        };
        StarAtom(m(&self.0, f), m(&self.1, f))
    }

    fn write_sexp(&self, out: &mut String) {
        out.push_str("(= ");
        self.0.write(out);
        out.push(' ');
        self.1.write(out);
        out.push(')');
    }

    fn from_sexp(head: &str, args: &[Sexp], pos: usize) -> Result<Self, ParseError> {
        match head {
            "=" => {
                expect_arity(head, args, 2, pos)?;
                Ok(StarAtom(StarTerm::parse(&args[0])?, StarTerm::parse(&args[1])?))
            }
            _ => Err(mismatch(head, pos, Signature::Star)),
        }
    }

    fn truth(&self) -> Option<bool> {
        let a = self.canonical();
        if a.0 == a.1 {
            Some(true)
        } else {
            None
        }
    }

    fn canonical(&self) -> Self {
        let fix = |t: StarTerm| if t.base == StarBase::Fin { StarTerm::fin() } else { t };
        let (a, b) = (fix(self.0), fix(self.1));
        if b < a {
            StarAtom(b, a)
        } else {
            StarAtom(a, b)
        }
    }
}

/// Atoms of the plain equivalence-relation signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EqAtom {
    E(Var, Var),
    Eq(Var, Var),
}

impl Atom for EqAtom {
    const SIGNATURE: Signature = Signature::Eq;

    fn vars(&self) -> Vec<Var> {
        match self {
            EqAtom::E(v, w) | EqAtom::Eq(v, w) => vec![*v, *w],
        }
    }

    fn map_vars(&self, f: &mut dyn FnMut(Var) -> Var) -> Self {
        match self {
            EqAtom::E(v, w) => EqAtom::E(f(*v), f(*w)),
            EqAtom::Eq(v, w) => EqAtom::Eq(f(*v), f(*w)),
        }
    }

    fn write_sexp(&self, out: &mut String) {
        match self {
            EqAtom::E(v, w) => out.push_str(&format!("(E {v} {w})")),
            EqAtom::Eq(v, w) => out.push_str(&format!("(= {v} {w})")),
        }
    }

    fn from_sexp(head: &str, args: &[Sexp], pos: usize) -> Result<Self, ParseError> {
        match head {
            "E" | "=" => {
                expect_arity(head, args, 2, pos)?;
                let v = sexp_var(&args[0])?;
                let w = sexp_var(&args[1])?;
                Ok(if head == "E" { EqAtom::E(v, w) } else { EqAtom::Eq(v, w) })
            }
            _ => Err(mismatch(head, pos, Signature::Eq)),
        }
    }

    fn truth(&self) -> Option<bool> {
        match self {
            EqAtom::E(v, w) | EqAtom::Eq(v, w) if v == w => Some(true),
            _ => None,
        }
    }

    fn canonical(&self) -> Self {
        match self {
            EqAtom::E(v, w) if w < v => EqAtom::E(*w, *v),
            EqAtom::Eq(v, w) if w < v => EqAtom::Eq(*w, *v),
            _ => self.clone(),
        }
    }
}

pub type TreeFormula = Formula<TreeAtom>;
pub type PairFormula = Formula<PairAtom>;
pub type StarFormula = Formula<StarAtom>;
pub type EqFormula = Formula<EqAtom>;

/// A formula over any of the four signatures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyFormula {
    Tree(TreeFormula),
    Pair(PairFormula),
    Star(StarFormula),
    Eq(EqFormula),
}

impl AnyFormula {
    pub fn parse(text: &str, sig: Signature) -> Result<AnyFormula, ParseError> {
        use super::parse::parse_formula;
        Ok(match sig {
            Signature::Tree => AnyFormula::Tree(parse_formula(text)?),
            Signature::Pair => AnyFormula::Pair(parse_formula(text)?),
            Signature::Star => AnyFormula::Star(parse_formula(text)?),
            Signature::Eq => AnyFormula::Eq(parse_formula(text)?),
        })
    }

    pub fn signature(&self) -> Signature {
        match self {
            AnyFormula::Tree(_) => Signature::Tree,
            AnyFormula::Pair(_) => Signature::Pair,
            AnyFormula::Star(_) => Signature::Star,
            AnyFormula::Eq(_) => Signature::Eq,
        }
    }

    pub fn free_vars(&self) -> Vec<Var> {
        match self {
            AnyFormula::Tree(f) => f.free_vars(),
            AnyFormula::Pair(f) => f.free_vars(),
            AnyFormula::Star(f) => f.free_vars(),
            AnyFormula::Eq(f) => f.free_vars(),
        }
    }
}

impl fmt::Display for AnyFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyFormula::Tree(g) => g.fmt(f),
            AnyFormula::Pair(g) => g.fmt(f),
            AnyFormula::Star(g) => g.fmt(f),
            AnyFormula::Eq(g) => g.fmt(f),
        }
    }
}
