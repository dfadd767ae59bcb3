//! Formulas, parsing, normal forms and the generic elimination driver.

pub mod atoms;
pub mod formula;
pub mod normal;
pub mod parse;
pub mod qe;
pub mod shannon;
pub mod strings;
pub mod var;

pub use atoms::{AnyFormula, EqAtom, EqFormula, PairAtom, PairFormula, PairTerm, StarAtom, StarBase, StarFormula, StarTerm, TreeAtom, TreeFormula};
pub use formula::{Atom, Formula, Literal, LiteralConjunction, Signature};
pub use normal::{dnf, nnf, normalize, simplify, NormalError, NormalMode, Normalized, DEFAULT_DNF_CAP};
pub use parse::{parse_formula, ParseError};
pub use qe::{Eliminator, QeError};
pub use strings::{Alphabet, DigitString, FgString, Letter, SymbolString};
pub use var::Var;
