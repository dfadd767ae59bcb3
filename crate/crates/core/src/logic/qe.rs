//! Generic innermost-first quantifier elimination driver.

use thiserror::Error;

use super::formula::{Atom, Formula, LiteralConjunction};
use super::normal::{dnf, simplify, NormalError};
use super::var::Var;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QeError {
    #[error(transparent)]
    Normal(#[from] NormalError),
    #[error("{0}")]
    Unsupported(String),
}

/// Eliminates one existential quantifier from a conjunction of literals, each
/// of which mentions the distinguished variable.
pub trait Eliminator {
    type Atom: Atom;

    fn eliminate_conjunction(&mut self, lc: &LiteralConjunction<Self::Atom>) -> Result<Formula<Self::Atom>, QeError>;
}

/// Splits a clause into the literals mentioning `x` and the rest.
pub fn split_on<A: Atom>(x: Var, lits: &[super::formula::Literal<A>]) -> (LiteralConjunction<A>, Vec<Formula<A>>) {
    let mut with = Vec::new();
    let mut rest = Vec::new();
    for l in lits {
        if l.atom.mentions(x) {
            with.push(l.clone());
        } else {
            rest.push(l.to_formula());
        }
    }
    (LiteralConjunction::from_literals(&with).with_distinguished(x), rest)
}

/// Removes every quantifier from `f`, innermost first. ∀ is handled as ¬∃¬ and
/// each ∃ body is put in DNF and eliminated clause by clause.
pub fn eliminate_all<E: Eliminator>(elim: &mut E, f: &Formula<E::Atom>, cap: usize) -> Result<Formula<E::Atom>, QeError> {
    Ok(simplify(&go(elim, f, cap)?))
}

fn go<E: Eliminator>(elim: &mut E, f: &Formula<E::Atom>, cap: usize) -> Result<Formula<E::Atom>, QeError> {
    Ok(match f {
        Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(go(elim, g, cap)?),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| go(elim, g, cap)).collect::<Result<_, _>>()?),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| go(elim, g, cap)).collect::<Result<_, _>>()?),
        Formula::Exists(x, g) => {
            let body = go(elim, g, cap)?;
            exists_qf(elim, *x, &body, cap)?
        }
        Formula::Forall(x, g) => {
            let body = go(elim, g, cap)?;
            Formula::not(exists_qf(elim, *x, &Formula::not(body), cap)?)
        }
    })
}

/// ∃x body for quantifier-free `body`.
pub fn exists_qf<E: Eliminator>(
    elim: &mut E,
    x: Var,
    body: &Formula<E::Atom>,
    cap: usize,
) -> Result<Formula<E::Atom>, QeError> {
    let body = simplify(body);
    if !body.free_vars().contains(&x) {
        return Ok(body);
    }
    let mut out = Vec::new();
    for clause in dnf(&body, cap)? {
        let (lc, mut rest) = split_on(x, &clause);
        let r = if lc.is_empty() {
            Formula::top()
        } else {
            elim.eliminate_conjunction(&lc)?
        };
        rest.push(r);
        out.push(simplify(&Formula::and(rest)));
    }
    Ok(simplify(&Formula::or(out)))
}
