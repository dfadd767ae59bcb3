//! Germs of cardinality sequences along a family sweep and the δ comparator.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::poly::{CardError, Monomial};
use crate::CardExpr;

/// The direction a family is swept in. `Pair` fixes the number of classes and
/// lets the size of the final class grow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    String,
    Pair { n: u32 },
    EqClass,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::String => f.write_str("string"),
            Family::Pair { n } => write!(f, "pair(n={n})"),
            Family::EqClass => f.write_str("eqclass"),
        }
    }
}

/// Name of the anchor for U_σ with |σ| = depth. Depth 0 is the whole model.
pub fn tree_anchor(depth: usize) -> String {
    if depth == 0 {
        "|M|".to_string()
    } else {
        format!("|U_{}|", "0".repeat(depth))
    }
}

pub fn pair_init_anchor(j: u32) -> String {
    format!("|C_init+{j}|")
}

pub fn pair_fin_anchor(j: u32) -> String {
    if j == 0 {
        "|C_fin|".to_string()
    } else {
        format!("|C_fin-{j}|")
    }
}

/// The i-th largest class of the intro family, counted from 1.
pub fn eq_class_anchor(i: u32) -> String {
    format!("|C^{i}|")
}

/// Basis sequences. Each is a function of the sweep parameter p.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Basis {
    /// Π_i p^(p - d_i), a product of anchors |U_σ| with |σ| = d_i.
    StringPow { depths: Vec<u32> },
    /// p^exp.
    PairPow { exp: u64 },
    /// p^(p - offset).
    EqPow { offset: u32 },
    /// Σ_{j=offset}^{p-1} p^(p-j).
    EqTail { offset: u32 },
}

/// Leading-term key; larger grades dominate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Grade(pub i64, pub i64);

impl Basis {
    fn family_matches(&self, fam: Family) -> bool {
        matches!(
            (self, fam),
            (Basis::StringPow { .. }, Family::String)
                | (Basis::PairPow { .. }, Family::Pair { .. })
                | (Basis::EqPow { .. } | Basis::EqTail { .. }, Family::EqClass)
        )
    }

    pub fn grade(&self) -> Grade {
        match self {
            Basis::StringPow { depths } => Grade(depths.len() as i64, -(depths.iter().sum::<u32>() as i64)),
            Basis::PairPow { exp } => Grade(*exp as i64, 0),
            Basis::EqPow { offset } | Basis::EqTail { offset } => Grade(-(*offset as i64), 0),
        }
    }

    pub fn eval(&self, p: u32) -> BigInt {
        let pb = BigInt::from(p);
        match self {
            Basis::StringPow { depths } => {
                let mut acc = BigInt::one();
                for &d in depths {
                    if d > p {
                        return BigInt::zero();
                    }
                    acc *= num_traits::pow(pb.clone(), (p - d) as usize);
                }
                acc
            }
            Basis::PairPow { exp } => num_traits::pow(pb, *exp as usize),
            Basis::EqPow { offset } => {
                if *offset >= p {
                    BigInt::zero()
                } else {
                    num_traits::pow(pb, (p - offset) as usize)
                }
            }
            Basis::EqTail { offset } => (*offset..p).map(|j| num_traits::pow(pb.clone(), (p - j) as usize)).sum(),
        }
    }
}

/// A cardinality germ: an integer combination of basis sequences of one family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyCard {
    pub family: Family,
    pub label: String,
    terms: Vec<(Basis, BigInt)>,
}

impl FamilyCard {
    pub fn new(family: Family, label: impl Into<String>, terms: Vec<(Basis, BigInt)>) -> Result<Self, CardError> {
        if let Some((b, _)) = terms.iter().find(|(b, _)| !b.family_matches(family)) {
            return Err(CardError::Invalid(format!("basis {b:?} does not belong to family {family}")));
        }
        let mut merged: Vec<(Basis, BigInt)> = Vec::new();
        for (b, c) in terms {
            match merged.iter_mut().find(|(x, _)| *x == b) {
                Some(e) => e.1 += c,
                None => merged.push((b, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        merged.sort();
        Ok(FamilyCard {
            family,
            label: label.into(),
            terms: merged,
        })
    }

    pub fn single(family: Family, label: impl Into<String>, b: Basis) -> Result<Self, CardError> {
        FamilyCard::new(family, label, vec![(b, BigInt::one())])
    }

    /// Reads a cardinality expression over the family's named anchors.
    pub fn from_expr(family: Family, label: impl Into<String>, e: &CardExpr) -> Result<Self, CardError> {
        let mut terms = Vec::new();
        for (m, c) in e.terms() {
            terms.push((monomial_basis(family, m)?, c.clone()));
        }
        FamilyCard::new(family, label, terms)
    }

    pub fn terms(&self) -> &[(Basis, BigInt)] {
        &self.terms
    }

    pub fn eval(&self, p: u32) -> BigInt {
        self.terms.iter().map(|(b, c)| c * b.eval(p)).sum()
    }

    /// Leading grade and the coefficient it carries, or `None` for the zero card.
    pub fn leading(&self) -> Option<(Grade, BigInt)> {
        let g = self.terms.iter().map(|(b, _)| b.grade()).max()?;
        let c = self.terms.iter().filter(|(b, _)| b.grade() == g).map(|(_, c)| c.clone()).sum();
        Some((g, c))
    }
}

fn monomial_basis(family: Family, m: &Monomial) -> Result<Basis, CardError> {
    let bad = |v: &str| CardError::Invalid(format!("anchor {v} is not an anchor of family {family}"));
    match family {
        Family::String => {
            let mut depths = Vec::new();
            for (v, e) in &m.0 {
                let d = if v == "|M|" {
                    0
                } else {
                    let inner = v.strip_prefix("|U_").and_then(|s| s.strip_suffix('|')).ok_or_else(|| bad(v))?;
                    crate::logic::DigitString::parse(inner).map_err(|_| bad(v))?.len() as u32
                };
                depths.extend(std::iter::repeat(d).take(*e as usize));
            }
            depths.sort();
            Ok(Basis::StringPow { depths })
        }
        Family::Pair { n } => {
            let mut exp: u64 = 0;
            for (v, e) in &m.0 {
                let class_exp = if let Some(j) = v.strip_prefix("|C_init+").and_then(|s| s.strip_suffix('|')) {
                    let j: u32 = j.parse().map_err(|_| bad(v))?;
                    1u64 << (n - 1 - j.min(n - 1))
                } else if v == "|C_fin|" {
                    1
                } else if let Some(j) = v.strip_prefix("|C_fin-").and_then(|s| s.strip_suffix('|')) {
                    let j: u32 = j.parse().map_err(|_| bad(v))?;
                    if j >= n {
                        return Err(bad(v));
                    }
                    1u64 << j
                } else {
                    return Err(bad(v));
                };
                exp += class_exp * *e as u64;
            }
            Ok(Basis::PairPow { exp })
        }
        Family::EqClass => match m.0.as_slice() {
            [] => Err(CardError::Invalid("constants have no basis in the eqclass family".into())),
            [(v, 1)] => {
                let i: u32 = v
                    .strip_prefix("|C^")
                    .and_then(|s| s.strip_suffix('|'))
                    .and_then(|s| s.parse().ok())
                    .filter(|&i| i >= 1)
                    .ok_or_else(|| bad(v))?;
                Ok(Basis::EqPow { offset: i - 1 })
            }
            _ => Err(CardError::Invalid("products of class sizes are not supported in the eqclass family".into())),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DeltaVerdict {
    SameOrder,
    FirstSmaller,
    FirstLarger,
    Unknown,
}

impl DeltaVerdict {
    pub fn flip(self) -> Self {
        match self {
            DeltaVerdict::FirstSmaller => DeltaVerdict::FirstLarger,
            DeltaVerdict::FirstLarger => DeltaVerdict::FirstSmaller,
            v => v,
        }
    }
}

impl fmt::Display for DeltaVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeltaVerdict::SameOrder => "SAME_ORDER",
            DeltaVerdict::FirstSmaller => "FIRST_SMALLER",
            DeltaVerdict::FirstLarger => "FIRST_LARGER",
            DeltaVerdict::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeltaMode {
    Symbolic,
    Empirical { sweep: Vec<u32>, nmax: u32 },
}

/// Outcome of a comparison. Empirical outcomes are evidence along a finite
/// sweep: `proved` is false and the label reads "consistent-with".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaOutcome {
    pub verdict: DeltaVerdict,
    pub proved: bool,
    pub counterexample: Option<String>,
}

impl DeltaOutcome {
    pub fn label(&self) -> String {
        if self.proved {
            self.verdict.to_string()
        } else {
            format!("consistent-with {}", self.verdict)
        }
    }
}

pub fn delta_compare(a: &FamilyCard, b: &FamilyCard, mode: &DeltaMode) -> Result<DeltaOutcome, CardError> {
    if a.family != b.family {
        return Err(CardError::MixedFamilies);
    }
    match mode {
        DeltaMode::Symbolic => Ok(DeltaOutcome {
            verdict: symbolic(a, b),
            proved: true,
            counterexample: None,
        }),
        DeltaMode::Empirical { sweep, nmax } => {
            if sweep.is_empty() {
                return Err(CardError::EmptySweep);
            }
            let pts: Vec<(u32, BigInt, BigInt)> = sweep.iter().map(|&p| (p, a.eval(p), b.eval(p))).collect();
            Ok(delta_from_counts(&pts, *nmax))
        }
    }
}

fn symbolic(a: &FamilyCard, b: &FamilyCard) -> DeltaVerdict {
    match (a.leading(), b.leading()) {
        (None, None) => DeltaVerdict::Unknown,
        (None, Some((_, cb))) => {
            if cb.is_positive() {
                DeltaVerdict::FirstSmaller
            } else {
                DeltaVerdict::Unknown
            }
        }
        (Some((_, ca)), None) => {
            if ca.is_positive() {
                DeltaVerdict::FirstLarger
            } else {
                DeltaVerdict::Unknown
            }
        }
        (Some((ga, ca)), Some((gb, cb))) => {
            if !ca.is_positive() || !cb.is_positive() {
                return DeltaVerdict::Unknown;
            }
            match ga.cmp(&gb) {
                Ordering::Less => DeltaVerdict::FirstSmaller,
                Ordering::Greater => DeltaVerdict::FirstLarger,
                Ordering::Equal => DeltaVerdict::SameOrder,
            }
        }
    }
}

/// `N·a < b` for every N up to min(nmax, p-1) at every sweep point p; the cap
/// at p-1 lets a ratio of exactly 1/p pass at the point p.
fn dominated(pts: &[(u32, BigInt, BigInt)], nmax: u32, swap: bool) -> Result<(), String> {
    for (p, a, b) in pts {
        let (a, b) = if swap { (b, a) } else { (a, b) };
        let top = nmax.min(p.saturating_sub(1)).max(1);
        for n in 1..=top {
            if BigInt::from(n) * a >= *b {
                return Err(format!("p={p}: {n}*{a} >= {b}"));
            }
        }
    }
    Ok(())
}

/// Empirical verdict from measured pairs (p, |A_p|, |B_p|).
pub fn delta_from_counts(pts: &[(u32, BigInt, BigInt)], nmax: u32) -> DeltaOutcome {
    let out = |verdict, counterexample| DeltaOutcome {
        verdict,
        proved: false,
        counterexample,
    };
    let smaller = dominated(pts, nmax, false);
    if smaller.is_ok() {
        return out(DeltaVerdict::FirstSmaller, None);
    }
    if dominated(pts, nmax, true).is_ok() {
        return out(DeltaVerdict::FirstLarger, None);
    }
    let nm = BigInt::from(nmax);
    for (p, a, b) in pts {
        let bounded = a.is_positive() && b.is_positive() && a <= &(&nm * b) && b <= &(&nm * a);
        if !bounded {
            return out(DeltaVerdict::Unknown, Some(format!("p={p}: {a} vs {b} is neither dominated nor within a factor {nmax}")));
        }
    }
    out(DeltaVerdict::SameOrder, None)
}

/// Cardinality germs of the shipped chains with a few sums and products,
/// grouped so that every pair within a family can be compared.
pub fn shipped_cards() -> Vec<FamilyCard> {
    let v = |name: &str| CardExpr::var(name);
    let mut exprs: Vec<(Family, &str, CardExpr)> = vec![
        (Family::String, "|M|", v("|M|")),
        (Family::String, "|U_0|", v("|U_0|")),
        (Family::String, "|U_00|", v("|U_00|")),
        (Family::String, "|U_000|", v("|U_000|")),
        (Family::String, "|U_0|*|U_1|", &v("|U_0|") * &v("|U_1|")),
        (Family::String, "|M|+|U_0|", &v("|M|") + &v("|U_0|")),
        (Family::String, "|U_00|+|U_1|", &v("|U_00|") + &v("|U_1|")),
    ];
    let fam = Family::Pair { n: 4 };
    let mut d = CardExpr::zero();
    for j in 0..3 {
        exprs.push((fam, "", v(&pair_fin_anchor(j))));
        d = &d + &v(&pair_fin_anchor(j));
        exprs.push((fam, "D", d.clone()));
    }
    exprs.push((fam, "|C_init+0|", v(&pair_init_anchor(0))));
    let mut out: Vec<FamilyCard> = exprs
        .into_iter()
        .map(|(f, l, e)| FamilyCard::from_expr(f, if l.is_empty() { e.to_string() } else { l.to_string() }, &e).expect("shipped anchors"))
        .collect();
    for b in [
        Basis::EqPow { offset: 0 },
        Basis::EqPow { offset: 1 },
        Basis::EqPow { offset: 2 },
        Basis::EqTail { offset: 0 },
        Basis::EqTail { offset: 1 },
        Basis::EqTail { offset: 2 },
    ] {
        out.push(FamilyCard::single(Family::EqClass, format!("{b:?}"), b).expect("eqclass basis"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::Poly;

    fn card(fam: Family, e: CardExpr) -> FamilyCard {
        FamilyCard::from_expr(fam, "", &e).unwrap()
    }

    #[test]
    fn string_examples() {
        let u0 = card(Family::String, Poly::var("|U_0|"));
        let u1 = card(Family::String, Poly::var("|U_1|"));
        let u00 = card(Family::String, Poly::var("|U_00|"));
        assert_eq!(u0, u1);
        assert_eq!(card(Family::String, Poly::var("|U_10,2|")), u00);
        assert!(FamilyCard::from_expr(Family::String, "", &Poly::var("|U_x|")).is_err());
        let sweep = DeltaMode::Empirical { sweep: vec![3, 4, 5, 6, 7, 8], nmax: 8 };
        for mode in [DeltaMode::Symbolic, sweep] {
            assert_eq!(delta_compare(&u0, &u1, &mode).unwrap().verdict, DeltaVerdict::SameOrder);
            assert_eq!(delta_compare(&u00, &u0, &mode).unwrap().verdict, DeltaVerdict::FirstSmaller);
            assert_eq!(delta_compare(&u0, &u00, &mode).unwrap().verdict, DeltaVerdict::FirstLarger);
        }
    }

    #[test]
    fn pair_chain_levels() {
        // D_{1,m} = m + m^2 against D_{2,m} = m + m^2 + m^4 with n = 4
        let fam = Family::Pair { n: 4 };
        let phi1 = card(fam, Poly::var("|C_fin|") + Poly::var("|C_fin-1|"));
        let phi0 = card(fam, Poly::var("|C_fin|") + Poly::var("|C_fin-1|") + Poly::var("|C_fin-2|"));
        assert_eq!(phi1.eval(2), BigInt::from(6));
        let emp = DeltaMode::Empirical { sweep: vec![2, 3, 4], nmax: 8 };
        assert_eq!(delta_compare(&phi1, &phi0, &DeltaMode::Symbolic).unwrap().verdict, DeltaVerdict::FirstSmaller);
        let e = delta_compare(&phi1, &phi0, &emp).unwrap();
        assert_eq!(e.verdict, DeltaVerdict::FirstSmaller);
        assert!(e.label().starts_with("consistent-with"));
    }

    #[test]
    fn errors() {
        let a = card(Family::String, Poly::var("|M|"));
        let b = card(Family::EqClass, Poly::var("|C^1|"));
        assert_eq!(delta_compare(&a, &b, &DeltaMode::Symbolic), Err(CardError::MixedFamilies));
        let mode = DeltaMode::Empirical { sweep: vec![], nmax: 8 };
        assert_eq!(delta_compare(&a, &a, &mode), Err(CardError::EmptySweep));
    }

    #[test]
    fn shipped_comparisons_agree() {
        let cards = shipped_cards();
        let mut pairs = 0;
        for a in &cards {
            for b in cards.iter().filter(|b| b.family == a.family) {
                let sweep = DeltaMode::Empirical { sweep: (3..=8).collect(), nmax: 8 };
                let s = delta_compare(a, b, &DeltaMode::Symbolic).unwrap();
                let e = delta_compare(a, b, &sweep).unwrap();
                assert_eq!(s.verdict, e.verdict, "{} vs {}", a.label, b.label);
                pairs += 1;
            }
        }
        assert!(pairs > 100);
    }

    #[test]
    fn eq_tail_evaluates_partial_sums() {
        let c = FamilyCard::single(Family::EqClass, "", Basis::EqTail { offset: 1 }).unwrap();
        assert_eq!(c.eval(4), BigInt::from(64 + 16 + 4));
    }
}
