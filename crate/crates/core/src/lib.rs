//! Finite structure families, exact counting of definable sets, dimension
//! comparison and quantifier elimination for two pseudofinite theories.

pub mod corpus;
pub mod counting;
pub mod gms;
pub mod logic;
pub mod models;
pub mod qe_pair;
pub mod qe_str;

use std::fmt;
use std::str::FromStr;

use logic::normal::DEFAULT_DNF_CAP;
use logic::qe::{eliminate_all, QeError};
use logic::AnyFormula;

/// Exact cardinality of a definable set as a polynomial in named anchors.
pub type CardExpr = counting::Poly<num_bigint::BigInt>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theory {
    Tree,
    Pair,
    Star,
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theory::Tree => "tree",
            Theory::Pair => "pair",
            Theory::Star => "star",
        })
    }
}

impl FromStr for Theory {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "tree" => Ok(Theory::Tree),
            "pair" => Ok(Theory::Pair),
            "star" => Ok(Theory::Star),
            _ => Err(format!("unknown theory {s:?}; expected tree, pair or star")),
        }
    }
}

/// Removes all quantifiers, innermost first. For the pairing theory the
/// result is exact on the models described by [`qe_pair::qe_pair`].
pub fn eliminate_quantifiers(f: &AnyFormula, theory: Theory) -> Result<AnyFormula, QeError> {
    match (f, theory) {
        (AnyFormula::Tree(g), Theory::Tree) => Ok(AnyFormula::Tree(eliminate_all(&mut qe_str::StrEliminator, g, DEFAULT_DNF_CAP)?)),
        (AnyFormula::Pair(g), Theory::Pair) => Ok(AnyFormula::Pair(qe_pair::qe_pair(g)?.0)),
        (AnyFormula::Star(g), Theory::Star) => Ok(AnyFormula::Star(qe_pair::qe_star(g)?)),
        _ => Err(QeError::Unsupported(format!("a {} formula is not in the language of the {theory} theory", f.signature()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Signature;

    #[test]
    fn dispatch() {
        let f = AnyFormula::parse(r#"(U "0" x)"#, Signature::Tree).unwrap();
        assert_eq!(eliminate_quantifiers(&f, Theory::Tree).unwrap(), f);
        assert!(eliminate_quantifiers(&f, Theory::Pair).is_err());
        let g = AnyFormula::parse(r#"(exists x (= (app "f" x) y))"#, Signature::Pair).unwrap();
        let AnyFormula::Pair(q) = eliminate_quantifiers(&g, Theory::Pair).unwrap() else { panic!() };
        assert!(q.is_quantifier_free());
        assert_eq!("STAR".parse::<Theory>(), Ok(Theory::Star));
    }
}
