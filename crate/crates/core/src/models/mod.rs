//! The finite structure families and brute-force evaluation over them.

pub mod audit;
pub mod eqclass;
pub mod interval;
pub mod pair;
pub mod string;
pub mod table;

use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{AnyFormula, Atom, Formula, Signature, Var};

pub use eqclass::EqClassModel;
pub use interval::IntervalModel;
pub use pair::PairModel;
pub use string::StringModel;

pub type Elem = usize;
pub type Row = BitVec<u64, Lsb0>;

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("model {spec} has {size} elements, over the budget of {budget}")]
    Budget { spec: FamilySpec, size: u128, budget: usize },
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("free variable {0} is not assigned")]
    Unassigned(String),
    #[error("formula over the {found} signature cannot be evaluated in a {expected} model")]
    SignatureMismatch { expected: Signature, found: Signature },
    #[error("element {0} is out of range")]
    OutOfRange(Elem),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilySpec {
    String(u32),
    Pair(u32, u32),
    EqClass(u32),
    Interval(u32),
}

impl FamilySpec {
    pub fn signature(&self) -> Signature {
        match self {
            FamilySpec::String(_) => Signature::Tree,
            FamilySpec::Pair(..) => Signature::Pair,
            FamilySpec::EqClass(_) => Signature::Eq,
            FamilySpec::Interval(_) => Signature::Star,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |s: &str| Err(ModelError::Invalid(s.to_string()));
        match *self {
            FamilySpec::String(n) | FamilySpec::EqClass(n) if n < 2 => bad("n must be at least 2"),
            FamilySpec::Pair(n, _) if n < 2 => bad("n must be at least 2"),
            FamilySpec::Pair(_, m) if m < 2 => bad("m must be at least 2"),
            FamilySpec::Interval(0) => bad("len must be at least 1"),
            _ => Ok(()),
        }
    }

    /// Exact domain size.
    pub fn domain_size(&self) -> BigUint {
        match *self {
            FamilySpec::String(n) => BigUint::from(n).pow(n),
            FamilySpec::Pair(n, m) => (0..n).map(|i| BigUint::from(m).pow(1u32 << i)).sum(),
            FamilySpec::EqClass(n) => (1..=n).map(|i| BigUint::from(n).pow(i)).sum(),
            FamilySpec::Interval(len) => BigUint::from(len) + 1u32,
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::String(n) => write!(f, "string:{n}"),
            FamilySpec::Pair(n, m) => write!(f, "pair:{n},{m}"),
            FamilySpec::EqClass(n) => write!(f, "eqclass:{n}"),
            FamilySpec::Interval(l) => write!(f, "interval:{l}"),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        let bad = || ModelError::Invalid(format!("cannot read model spec {s:?}"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let nums: Vec<u32> = rest
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let spec = match (kind.trim(), nums.as_slice()) {
            ("string", [n]) => FamilySpec::String(*n),
            ("pair", [n, m]) => FamilySpec::Pair(*n, *m),
            ("eqclass", [n]) => FamilySpec::EqClass(*n),
            ("interval", [l]) => FamilySpec::Interval(*l),
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// An assignment of elements to variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Env(Vec<(Var, Elem)>);

impl Env {
    pub fn new() -> Self {
        Env(Vec::new())
    }

    pub fn of(pairs: &[(Var, Elem)]) -> Self {
        Env(pairs.to_vec())
    }

    pub fn get(&self, v: Var) -> Option<Elem> {
        self.0.iter().rev().find(|(w, _)| *w == v).map(|p| p.1)
    }

    /// Value of an assigned variable. Callers check assignment up front.
    pub fn val(&self, v: Var) -> Elem {
        self.get(v).unwrap_or_else(|| panic!("variable {v} is unassigned"))
    }

    pub fn set(&mut self, v: Var, e: Elem) {
        if let Some(p) = self.0.iter_mut().find(|(w, _)| *w == v) {
            p.1 = e;
        } else {
            self.0.push((v, e));
        }
    }

    pub fn remove(&mut self, v: Var) {
        self.0.retain(|(w, _)| *w != v);
    }

    pub fn vars(&self) -> Vec<Var> {
        self.0.iter().map(|p| p.0).collect()
    }
}

/// A finite structure for one signature.
pub trait Structure: Sync {
    type Atom: Atom;

    fn spec(&self) -> FamilySpec;

    fn size(&self) -> usize;

    fn holds(&self, atom: &Self::Atom, env: &Env) -> bool;

    /// Sets `row[e]` to the truth of `atom` with `v := e`, for every element e.
    /// The other variables of the atom are read from `env`.
    fn fill_row(&self, atom: &Self::Atom, env: &Env, v: Var, row: &mut BitSlice<u64, Lsb0>) {
        let mut env = env.clone();
        for e in 0..self.size() {
            env.set(v, e);
            row.set(e, self.holds(atom, &env));
        }
    }

    fn elem_name(&self, e: Elem) -> String {
        e.to_string()
    }

    /// Equivalence class index, for the families that have one.
    fn class_of(&self, _e: Elem) -> Option<usize> {
        None
    }
}

fn check_assigned<A: Atom>(f: &Formula<A>, env: &Env) -> Result<(), ModelError> {
    for v in f.free_vars() {
        if env.get(v).is_none() {
            return Err(ModelError::Unassigned(v.name()));
        }
    }
    Ok(())
}

/// Tarskian satisfaction. Quantifiers range over the whole domain.
pub fn eval<S: Structure>(m: &S, f: &Formula<S::Atom>, env: &Env) -> Result<bool, ModelError> {
    check_assigned(f, env)?;
    let mut env = env.clone();
    Ok(sat(m, f, &mut env))
}

pub(crate) fn sat<S: Structure>(m: &S, f: &Formula<S::Atom>, env: &mut Env) -> bool {
    match f {
        Formula::Atom(a) => m.holds(a, env),
        Formula::Not(g) => !sat(m, g, env),
        Formula::And(gs) => gs.iter().all(|g| sat(m, g, env)),
        Formula::Or(gs) => gs.iter().any(|g| sat(m, g, env)),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let saved = env.get(*v);
            let want = matches!(f, Formula::Exists(..));
            let mut result = !want;
            for e in 0..m.size() {
                env.set(*v, e);
                if sat(m, g, env) == want {
                    result = want;
                    break;
                }
            }
            match saved {
                Some(e) => env.set(*v, e),
                None => env.remove(*v),
            }
            result
        }
    }
}

/// Calls `visit` on every tuple of elements for `vars`, in lexicographic order.
pub fn for_each_tuple(n: usize, arity: usize, mut visit: impl FnMut(&[Elem])) {
    let mut t = vec![0; arity];
    if arity > 0 && n == 0 {
        return;
    }
    loop {
        visit(&t);
        let mut i = arity;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < n {
                break;
            }
            t[i] = 0;
        }
    }
}

/// Number of tuples for `target` satisfying `f` under the parameters.
pub fn count<S: Structure>(m: &S, f: &Formula<S::Atom>, params: &Env, target: &[Var]) -> Result<BigUint, ModelError> {
    Ok(BigUint::from(definable_set(m, f, params, target)?.len()))
}

/// The defined set as a sorted list of tuples.
pub fn definable_set<S: Structure>(
    m: &S,
    f: &Formula<S::Atom>,
    params: &Env,
    target: &[Var],
) -> Result<Vec<Vec<Elem>>, ModelError> {
    if target.is_empty() {
        return Err(ModelError::Invalid("the target tuple is empty".into()));
    }
    let mut env = params.clone();
    for v in target {
        env.set(*v, 0);
    }
    check_assigned(f, &env)?;
    let mut out = Vec::new();
    for_each_tuple(m.size(), target.len(), |t| {
        for (v, e) in target.iter().zip(t) {
            env.set(*v, *e);
        }
        if sat(m, f, &mut env) {
            out.push(t.to_vec());
        }
    });
    Ok(out)
}

/// A built structure of any family.
pub enum AnyModel {
    String(StringModel),
    Pair(PairModel),
    EqClass(EqClassModel),
    Interval(IntervalModel),
}

pub fn build_model(spec: FamilySpec) -> Result<AnyModel, ModelError> {
    build_model_with_budget(spec, DEFAULT_BUDGET)
}

pub fn build_model_with_budget(spec: FamilySpec, budget: usize) -> Result<AnyModel, ModelError> {
    spec.validate()?;
    let size = spec.domain_size();
    if size > BigUint::from(budget) {
        let size = u128::try_from(&size).unwrap_or(u128::MAX);
        return Err(ModelError::Budget { spec, size, budget });
    }
    Ok(match spec {
        FamilySpec::String(n) => AnyModel::String(StringModel::new(n)),
        FamilySpec::Pair(n, m) => AnyModel::Pair(PairModel::new(n, m)),
        FamilySpec::EqClass(n) => AnyModel::EqClass(EqClassModel::new(n)),
        FamilySpec::Interval(l) => AnyModel::Interval(IntervalModel::new(l)),
    })
}

macro_rules! dispatch {
    ($self:expr, $f:expr, |$m:ident, $g:ident| $body:expr) => {
        match ($self, $f) {
            (AnyModel::String($m), AnyFormula::Tree($g)) => $body,
            (AnyModel::Pair($m), AnyFormula::Pair($g)) => $body,
            (AnyModel::EqClass($m), AnyFormula::Eq($g)) => $body,
            (AnyModel::Interval($m), AnyFormula::Star($g)) => $body,
            (m, g) => {
                return Err(ModelError::SignatureMismatch {
                    expected: m.spec().signature(),
                    found: g.signature(),
                })
            }
        }
    };
}

impl AnyModel {
    pub fn spec(&self) -> FamilySpec {
        match self {
            AnyModel::String(m) => m.spec(),
            AnyModel::Pair(m) => m.spec(),
            AnyModel::EqClass(m) => m.spec(),
            AnyModel::Interval(m) => m.spec(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            AnyModel::String(m) => m.size(),
            AnyModel::Pair(m) => m.size(),
            AnyModel::EqClass(m) => m.size(),
            AnyModel::Interval(m) => m.size(),
        }
    }

    pub fn elem_name(&self, e: Elem) -> String {
        match self {
            AnyModel::String(m) => m.elem_name(e),
            AnyModel::Pair(m) => m.elem_name(e),
            AnyModel::EqClass(m) => m.elem_name(e),
            AnyModel::Interval(m) => m.elem_name(e),
        }
    }

    pub fn eval(&self, f: &AnyFormula, env: &Env) -> Result<bool, ModelError> {
        dispatch!(self, f, |m, g| eval(m, g, env))
    }

    pub fn count(&self, f: &AnyFormula, params: &Env, target: &[Var]) -> Result<BigUint, ModelError> {
        dispatch!(self, f, |m, g| count(m, g, params, target))
    }

    pub fn definable_set(&self, f: &AnyFormula, params: &Env, target: &[Var]) -> Result<Vec<Vec<Elem>>, ModelError> {
        dispatch!(self, f, |m, g| definable_set(m, g, params, target))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_text_round_trips() {
        for s in ["string:3", "pair:3,2", "eqclass:4", "interval:6"] {
            assert_eq!(s.parse::<FamilySpec>().unwrap().to_string(), s);
        }
        assert!("pair:3".parse::<FamilySpec>().is_err());
        assert!("string:1".parse::<FamilySpec>().is_err());
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(build_model(FamilySpec::String(8)), Err(ModelError::Budget { .. })));
        assert!(matches!(build_model(FamilySpec::Pair(6, 2)), Err(ModelError::Budget { .. })));
    }

    #[test]
    fn tuples_in_order() {
        let mut seen = Vec::new();
        for_each_tuple(2, 2, |t| seen.push(t.to_vec()));
        assert_eq!(seen, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let mut k = 0;
        for_each_tuple(5, 0, |_| k += 1);
        assert_eq!(k, 1);
    }
}
