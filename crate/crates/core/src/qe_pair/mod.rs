//! Quantifier elimination for the pairing theory with class predicates.
//!
//! A conjunction with a positive literal linking x to a parameter has a fiber
//! whose size is a polynomial in one class size; ∃x is then the disjunction of
//! the guards where that polynomial does not vanish. Without such a literal
//! only the class of x matters, up to finitely many excluded points, and the
//! problem passes to the successor theory of the quotient.

pub mod intermediate;
pub mod polycard;
pub mod star;
pub mod trace;

use std::fmt;

use num_traits::ToPrimitive;

use crate::logic::normal::DEFAULT_DNF_CAP;
use crate::logic::qe::{eliminate_all, Eliminator, QeError};
use crate::logic::{Atom, Formula, LiteralConjunction, PairAtom, PairFormula, Var};

pub use intermediate::{coordinate_solve, rewrite_intermediate, IntermediateForm};
pub use polycard::{
    cauchy_bound, exists_from_polycard, pair_implied, polycard_basic, polycard_literals, BoundedFormula, Firing, PolyCardDef,
    PolyCardError, PolyCase,
};
pub use star::{eliminate_equiv_exists, pull_back, qe_star, resolve_ground, translate_to_star, EquivElimination, StarEliminator};
pub use trace::{class_trace, ClassTrace};

/// The pair models on which an elimination is exact: at least `min_n` classes
/// and every class with at least `min_class` elements.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Adequacy {
    pub min_n: u32,
    pub min_class: u64,
}

impl Adequacy {
    pub fn join(self, o: Adequacy) -> Adequacy {
        Adequacy {
            min_n: self.min_n.max(o.min_n),
            min_class: self.min_class.max(o.min_class),
        }
    }

    /// C_fin, with m elements, is the smallest class.
    pub fn admits(&self, n: u32, m: u32) -> bool {
        n >= self.min_n && m as u64 >= self.min_class
    }
}

impl fmt::Display for Adequacy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n >= {}, class sizes >= {}", self.min_n, self.min_class)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Route {
    Link(PolyCardDef),
    Trace { trace: Option<ClassTrace>, discarded: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairElimination {
    pub formula: PairFormula,
    pub adequacy: Adequacy,
    pub route: Route,
}

fn has_link(lc: &LiteralConjunction<PairAtom>, x: Var) -> bool {
    lc.positives.iter().any(|a| match a {
        PairAtom::E(s, t) | PairAtom::Eq(s, t) => (s.var == x) != (t.var == x),
        _ => false,
    })
}

/// ∃x over a conjunction of literals, each mentioning x.
pub fn eliminate_exists_pair(lc: &LiteralConjunction<PairAtom>) -> Result<PairElimination, QeError> {
    let x = lc
        .distinguished
        .ok_or_else(|| QeError::Unsupported("no distinguished variable".into()))?;
    if has_link(lc, x) {
        let def = polycard_literals(lc)?;
        let b = exists_from_polycard(&def)?;
        return Ok(PairElimination {
            formula: b.formula,
            adequacy: Adequacy {
                min_n: b.min_n,
                min_class: b.cauchy_bound.to_u64().unwrap_or(u64::MAX),
            },
            route: Route::Link(def),
        });
    }
    let mut own = Vec::new();
    let mut classes = Vec::new();
    let mut discarded = 0;
    for l in lc.literals() {
        let only_x = l.atom.vars().iter().all(|v| *v == x);
        match (&l.atom, only_x) {
            (_, true) => own.push(l.to_formula()),
            (PairAtom::Eq(..), false) => discarded += 1,
            (_, false) => classes.push(l.to_formula()),
        }
    }
    let trace = if own.is_empty() {
        None
    } else {
        Some(class_trace(&Formula::and(own))?)
    };
    let theta = trace.as_ref().map_or(Formula::top(), |t| t.theta.clone());
    classes.push(theta);
    let r = eliminate_equiv_exists(&Formula::and(classes), x)?;
    let negated = trace.as_ref().map_or(0, |t| t.negated_selves);
    let adequacy = Adequacy {
        min_n: r.min_n.max(trace.as_ref().map_or(0, |t| t.min_n)),
        min_class: (negated + discarded + 1) as u64,
    };
    Ok(PairElimination {
        formula: r.formula,
        adequacy,
        route: Route::Trace { trace, discarded },
    })
}

/// Eliminator for nested quantifiers; collects the adequacy of every step.
#[derive(Debug, Default, Clone)]
pub struct PairEliminator {
    pub adequacy: Adequacy,
}

impl Eliminator for PairEliminator {
    type Atom = PairAtom;

    fn eliminate_conjunction(&mut self, lc: &LiteralConjunction<PairAtom>) -> Result<PairFormula, QeError> {
        let r = eliminate_exists_pair(lc)?;
        self.adequacy = self.adequacy.join(r.adequacy);
        Ok(r.formula)
    }
}

/// Quantifier-free equivalent of a pairing formula, with the models on which
/// it is exact.
pub fn qe_pair(f: &PairFormula) -> Result<(PairFormula, Adequacy), QeError> {
    let mut e = PairEliminator::default();
    let out = eliminate_all(&mut e, f, DEFAULT_DNF_CAP)?;
    Ok((out, e.adequacy))
}
