//! Seeded random corpora for the eliminators, and the brute-force checks run
//! over them.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::logic::{
    DigitString, FgString, Formula, Letter, LiteralConjunction, PairAtom, PairFormula, PairTerm, StarAtom, StarFormula,
    StarTerm, TreeAtom, Var,
};
use crate::qe_str::str_adequate;

pub mod check;

pub use check::{
    check_pair_elimination, check_polycard, check_star, check_translation, check_tree_elimination, CheckError,
    CheckOutcome,
};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn x() -> Var {
    Var::new("x")
}

fn params(k: usize) -> Vec<Var> {
    ["y", "z", "w"][..k].iter().map(|s| Var::new(s)).collect()
}

fn digits(r: &mut ChaCha8Rng, len: usize) -> DigitString {
    DigitString((0..len).map(|_| r.gen_range(0..3)).collect())
}

fn fg_word(r: &mut ChaCha8Rng, len: usize) -> FgString {
    FgString((0..len).map(|_| if r.gen_bool(0.5) { Letter::F } else { Letter::G }).collect())
}

fn tree_link(r: &mut ChaCha8Rng, ps: &[Var]) -> TreeAtom {
    let l = r.gen_range(0..=2);
    let (s, t) = (digits(r, l), digits(r, l));
    let y = *ps.choose(r).expect("parameters");
    if r.gen_bool(0.5) {
        TreeAtom::B(s, t, x(), y)
    } else {
        TreeAtom::B(t, s, y, x())
    }
}

/// Conjunctions in x over strings in {0,1,2}^≤2 with at most three parameters
/// and two negative links, each exact on StringModel(4) and StringModel(5).
pub fn tree_conjunctions(seed: u64, count: usize) -> Vec<LiteralConjunction<TreeAtom>> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let ps = params(r.gen_range(1..=3));
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        if r.gen_bool(0.6) {
            let l = r.gen_range(0..=2);
            pos.push(TreeAtom::U(digits(&mut r, l), x()));
        }
        for _ in 0..r.gen_range(0..=2) {
            pos.push(tree_link(&mut r, &ps));
        }
        for _ in 0..r.gen_range(0..=2) {
            neg.push(tree_link(&mut r, &ps));
        }
        if r.gen_bool(0.3) {
            let l = r.gen_range(1..=2);
            neg.push(TreeAtom::U(digits(&mut r, l), x()));
        }
        if r.gen_bool(0.1) {
            let y = *ps.choose(&mut r).unwrap();
            if r.gen_bool(0.5) { &mut pos } else { &mut neg }.push(TreeAtom::Eq(x(), y));
        }
        let lc = LiteralConjunction::new(pos, neg).with_distinguished(x());
        if !lc.is_empty() && str_adequate(&lc, 4) && str_adequate(&lc, 5) {
            out.push(lc);
        }
    }
    out
}

fn pair_term(r: &mut ChaCha8Rng, v: Var) -> PairTerm {
    let l = r.gen_range(0..=2);
    PairTerm::new(fg_word(r, l), v)
}

fn pair_link(r: &mut ChaCha8Rng, ps: &[Var]) -> PairAtom {
    let y = *ps.choose(r).unwrap();
    let (a, b) = (pair_term(r, x()), pair_term(r, y));
    if r.gen_bool(0.5) {
        PairAtom::Eq(a, b)
    } else {
        PairAtom::E(a, b)
    }
}

fn pair_literal(r: &mut ChaCha8Rng, ps: &[Var]) -> PairAtom {
    match r.gen_range(0..4) {
        0 | 1 => pair_link(r, ps),
        2 => {
            let (a, b) = (pair_term(r, x()), pair_term(r, x()));
            if r.gen_bool(0.5) {
                PairAtom::Eq(a, b)
            } else {
                PairAtom::E(a, b)
            }
        }
        _ => {
            let k = r.gen_range(0..=1);
            let t = pair_term(r, x());
            if r.gen_bool(0.5) {
                PairAtom::Cinit(k, t)
            } else {
                PairAtom::Cfin(k, t)
            }
        }
    }
}

fn pair_conj(r: &mut ChaCha8Rng, link: bool) -> LiteralConjunction<PairAtom> {
    let ps = params(r.gen_range(1..=2));
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    if link {
        pos.push(pair_link(r, &ps));
    }
    let negations = r.gen_range(0..=2);
    for _ in 0..negations {
        neg.push(pair_literal(r, &ps));
    }
    for _ in 0..r.gen_range(usize::from(pos.is_empty() && neg.is_empty())..=2) {
        pos.push(pair_literal(r, &ps));
    }
    LiteralConjunction::new(pos, neg).with_distinguished(x())
}

/// Conjunctions in x with words of length ≤ 2, at most two parameters and at
/// most two negations.
pub fn pair_conjunctions(seed: u64, count: usize) -> Vec<LiteralConjunction<PairAtom>> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let link = r.gen_bool(0.5);
            pair_conj(&mut r, link)
        })
        .collect()
}

/// As [`pair_conjunctions`], each with a positive literal linking x to a parameter.
pub fn link_conjunctions(seed: u64, count: usize) -> Vec<LiteralConjunction<PairAtom>> {
    let mut r = rng(seed);
    (0..count).map(|_| pair_conj(&mut r, true)).collect()
}

fn star_term(r: &mut ChaCha8Rng, vars: &[Var]) -> StarTerm {
    match r.gen_range(0..8) {
        0 => StarTerm::init(r.gen_range(0..=2)),
        1 => StarTerm::fin(),
        _ => StarTerm::var(*vars.choose(r).unwrap(), r.gen_range(0..=2)),
    }
}

fn star_literal(r: &mut ChaCha8Rng, bound: &[Var], all: &[Var]) -> StarFormula {
    // the innermost bound variable occurs on the left
    let v = *bound.last().unwrap();
    let a = Formula::atom(StarAtom::new(StarTerm::var(v, r.gen_range(0..=2)), star_term(r, all)));
    if r.gen_bool(0.4) {
        Formula::not(a)
    } else {
        a
    }
}

fn star_body(r: &mut ChaCha8Rng, bound: &[Var], all: &[Var], depth: usize) -> StarFormula {
    let mut parts: Vec<StarFormula> = (0..r.gen_range(1..=3)).map(|_| star_literal(r, bound, all)).collect();
    if depth > 0 && r.gen_bool(0.4) {
        let w = Var::new("w");
        let mut b = bound.to_vec();
        b.push(w);
        let mut a = all.to_vec();
        a.push(w);
        let inner = star_body(r, &b, &a, depth - 1);
        parts.push(if r.gen_bool(0.5) {
            Formula::exists(w, inner)
        } else {
            Formula::forall(w, inner)
        });
    }
    if r.gen_bool(0.3) {
        Formula::or(parts)
    } else {
        Formula::and(parts)
    }
}

/// Successor formulas with one or two quantifiers, powers ≤ 2, and free
/// variables among y, z.
pub fn star_formulas(seed: u64, count: usize) -> Vec<StarFormula> {
    let mut r = rng(seed);
    let free = params(2);
    (0..count)
        .map(|_| {
            let mut all = free.clone();
            all.push(x());
            let body = star_body(&mut r, &[x()], &all, 1);
            if r.gen_bool(0.7) {
                Formula::exists(x(), body)
            } else {
                Formula::forall(x(), body)
            }
        })
        .collect()
}

fn equiv_literal(r: &mut ChaCha8Rng, vars: &[Var]) -> PairFormula {
    let t = |r: &mut ChaCha8Rng| {
        let v = *vars.choose(r).unwrap();
        pair_term(r, v)
    };
    let a = match r.gen_range(0..4) {
        0 | 1 => PairAtom::E(t(r), t(r)),
        2 => PairAtom::Cinit(r.gen_range(0..=2), t(r)),
        _ => PairAtom::Cfin(r.gen_range(0..=2), t(r)),
    };
    if r.gen_bool(0.4) {
        Formula::not(Formula::atom(a))
    } else {
        Formula::atom(a)
    }
}

/// Equality-free pairing formulas in x, y, some with ∃x in front.
pub fn equivalence_formulas(seed: u64, count: usize) -> Vec<PairFormula> {
    let mut r = rng(seed);
    let vars = [x(), Var::new("y")];
    (0..count)
        .map(|_| {
            let parts: Vec<PairFormula> = (0..r.gen_range(1..=3)).map(|_| equiv_literal(&mut r, &vars)).collect();
            let body = if r.gen_bool(0.3) { Formula::or(parts) } else { Formula::and(parts) };
            if r.gen_bool(0.5) {
                Formula::exists(x(), body)
            } else {
                body
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let show = |v: Vec<LiteralConjunction<PairAtom>>| v.iter().map(|l| l.to_formula().to_string()).collect::<Vec<_>>();
        assert_eq!(show(pair_conjunctions(7, 20)), show(pair_conjunctions(7, 20)));
        assert_ne!(show(pair_conjunctions(7, 20)), show(pair_conjunctions(8, 20)));
    }

    #[test]
    fn tree_shape() {
        for lc in tree_conjunctions(DEFAULT_SEED, 300) {
            assert!(lc.well_formed());
            let f = lc.to_formula();
            assert!(f.free_vars().len() <= 4);
            let neg_links = lc.negatives.iter().filter(|a| matches!(a, TreeAtom::B(..))).count();
            assert!(neg_links <= 2);
            for a in lc.positives.iter().chain(&lc.negatives) {
                if let TreeAtom::U(s, _) | TreeAtom::B(s, _, _, _) = a {
                    assert!(s.len() <= 2 && s.0.iter().all(|&d| d < 3));
                }
            }
        }
    }

    #[test]
    fn pair_shape() {
        for lc in link_conjunctions(DEFAULT_SEED, 200) {
            assert!(lc.well_formed());
            assert!(lc.negatives.len() <= 2);
            assert!(lc.positives.iter().chain(&lc.negatives).all(|a| a.max_len() <= 2));
            assert!(matches!(lc.positives[0], PairAtom::E(..) | PairAtom::Eq(..)));
        }
    }

    #[test]
    fn star_and_equiv_shapes() {
        for f in star_formulas(DEFAULT_SEED, 100) {
            assert!(!f.is_quantifier_free());
            assert!(f.free_vars().iter().all(|v| *v != x()));
        }
        for f in equivalence_formulas(DEFAULT_SEED, 100) {
            assert!(f.atoms().iter().all(|a| !a.is_equality()));
        }
    }
}
