//! Rewriting conjunctions of atoms on x into equalities between length-k
//! coordinates of x, plus an equality-free remainder.

use std::fmt;

use crate::logic::{FgString, Formula, PairAtom, PairFormula, PairTerm, Var};
use crate::models::{Elem, PairModel, Structure};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntermediateForm {
    pub x: Var,
    pub k: usize,
    /// u(x) = t(y) with |u| = k.
    pub basic: Vec<(FgString, PairTerm)>,
    /// Generators of the identification u(x) = v(x), |u| = |v| = k.
    pub self_pairs: Vec<(FgString, FgString)>,
    /// Equality-free remainder.
    pub residue: PairFormula,
}

impl IntermediateForm {
    pub fn to_formula(&self) -> PairFormula {
        let x = self.x;
        let mut parts: Vec<PairFormula> = self
            .basic
            .iter()
            .map(|(u, t)| Formula::atom(PairAtom::Eq(PairTerm::new(u.clone(), x), t.clone())))
            .collect();
        parts.extend(
            self.self_pairs
                .iter()
                .map(|(u, v)| Formula::atom(PairAtom::Eq(PairTerm::new(u.clone(), x), PairTerm::new(v.clone(), x)))),
        );
        parts.push(self.residue.clone());
        Formula::and(parts)
    }
}

impl fmt::Display for IntermediateForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} basic=[", self.k)?;
        for (i, (u, t)) in self.basic.iter().enumerate() {
            write!(f, "{}{u}->{t}", if i > 0 { ", " } else { "" })?;
        }
        write!(f, "] self=[")?;
        for (i, (u, v)) in self.self_pairs.iter().enumerate() {
            write!(f, "{}{u}~{v}", if i > 0 { ", " } else { "" })?;
        }
        write!(f, "] residue={}", self.residue)
    }
}

fn x_first(a: &PairTerm, b: &PairTerm, x: Var) -> (PairTerm, PairTerm) {
    if a.var == x {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// `atoms` is a conjunction of atoms, each mentioning x. The smallest valid k
/// is used: one more than the longest word in the conjunction.
pub fn rewrite_intermediate(atoms: &[PairAtom], x: Var) -> IntermediateForm {
    let k = 1 + atoms.iter().map(|a| a.max_len()).max().unwrap_or(0);
    let mut basic = Vec::new();
    let mut self_pairs = Vec::new();
    let mut residue = Vec::new();
    for a in atoms {
        match a {
            PairAtom::Eq(l, r) => {
                let (s, t) = x_first(l, r, x);
                if t.var != x {
                    for u in FgString::all(k - s.len()) {
                        basic.push((u.concat(&s.s), t.wrap(&u)));
                    }
                    residue.push(Formula::atom(PairAtom::E(s, t)));
                } else if s.len() == t.len() {
                    for u in FgString::all(k - s.len()) {
                        self_pairs.push((u.concat(&s.s), u.concat(&t.s)));
                    }
                } else {
                    // the shorter side lies in C_fin, where f and g fix everything
                    let (short, long) = if s.len() < t.len() { (s, t) } else { (t, s) };
                    self_pairs.push((
                        FgString::f_power(k - short.len()).concat(&short.s),
                        FgString::f_power(k - long.len()).concat(&long.s),
                    ));
                    residue.push(Formula::atom(PairAtom::Cfin(0, short)));
                }
            }
            _ => residue.push(Formula::atom(a.clone())),
        }
    }
    self_pairs.retain(|(u, v)| u != v);
    IntermediateForm {
        x,
        k,
        basic,
        self_pairs,
        residue: Formula::and(residue),
    }
}

/// Every z with s(z) = b for all constraints (s, b).
pub fn coordinate_solve(m: &PairModel, constraints: &[(FgString, Elem)]) -> Vec<Elem> {
    (0..m.size())
        .filter(|&z| constraints.iter().all(|(s, b)| m.apply(&s.0, z) == *b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::models::table::qf_table;

    fn fg(s: &str) -> FgString {
        FgString::from(s)
    }

    fn atoms(s: &str) -> Vec<PairAtom> {
        parse_formula::<PairAtom>(s).unwrap().atoms()
    }

    #[test]
    fn rewrite_examples() {
        let x = Var::new("x");
        let y = Var::new("y");
        let r = rewrite_intermediate(&atoms(r#"(= (app "f" x) y)"#), x);
        assert_eq!(r.k, 2);
        assert_eq!(r.basic, vec![(fg("ff"), PairTerm::app("f", y)), (fg("gf"), PairTerm::app("g", y))]);
        assert_eq!(r.residue, parse_formula(r#"(E (app "f" x) y)"#).unwrap());

        let r = rewrite_intermediate(&atoms(r#"(= (app "f" x) (app "g" x))"#), x);
        assert_eq!(r.self_pairs, vec![(fg("ff"), fg("fg")), (fg("gf"), fg("gg"))]);

        let r = rewrite_intermediate(&atoms(r#"(= (app "ff" x) (app "f" x))"#), x);
        assert_eq!(r.k, 3);
        assert!(r.self_pairs.is_empty());
        assert_eq!(r.residue, parse_formula(r#"(Cfin 0 (app "f" x))"#).unwrap());
    }

    #[test]
    fn rewrite_is_equivalent() {
        let x = Var::new("x");
        for s in [
            r#"(and (= (app "f" x) y) (= (app "g" x) (app "f" z)))"#,
            r#"(and (= (app "gf" x) (app "f" x)) (E x y))"#,
            r#"(and (= (app "f" x) (app "g" x)) (Cinit 1 x))"#,
            r#"(= (app "fg" x) (app "gf" y))"#,
            r#"(= x (app "g" x))"#,
        ] {
            let f = parse_formula::<PairAtom>(s).unwrap();
            let r = rewrite_intermediate(&f.atoms(), x);
            let mut vars = f.free_vars();
            vars.sort();
            for (n, m) in [(4, 2), (3, 3)] {
                if n as usize <= r.k {
                    continue;
                }
                let model = PairModel::new(n, m);
                assert_eq!(qf_table(&model, &f, &vars).unwrap(), qf_table(&model, &r.to_formula(), &vars).unwrap(), "{s}");
            }
        }
    }

    #[test]
    fn coordinate_solutions() {
        let m = PairModel::new(3, 2);
        let c1: Vec<Elem> = m.class_range(1).collect();
        let fin: Vec<Elem> = m.class_range(2).collect();
        for &b1 in &c1 {
            for &b2 in &c1 {
                let sols = coordinate_solve(&m, &[(fg("f"), b1), (fg("g"), b2)]);
                assert_eq!(sols.len(), 1);
                assert_eq!(m.class(sols[0]), 0);
            }
        }
        for &b in &fin {
            let sols = coordinate_solve(&m, &[(fg("f"), b), (fg("g"), b)]);
            assert_eq!(sols.len(), 2);
            assert!(sols.contains(&b));
            assert!(sols.iter().any(|&z| m.class(z) == 1));
        }
        let sols = coordinate_solve(&m, &[(fg("f"), fin[0]), (fg("g"), fin[1])]);
        assert_eq!(sols.len(), 1);
        assert_eq!(m.class(sols[0]), 1);
        // b's in different classes
        assert!(coordinate_solve(&m, &[(fg("f"), c1[0]), (fg("g"), fin[0])]).is_empty());
    }

    #[test]
    fn coordinate_counts_by_depth() {
        // with words of length d, a target class C_fin-l with l < d allows
        // one solution per admissible level
        let m = PairModel::new(3, 2);
        for d in 1..=2usize {
            let words = FgString::all(d);
            for &b in &m.class_range(2).collect::<Vec<_>>() {
                let cons: Vec<(FgString, Elem)> = words.iter().map(|w| (w.clone(), b)).collect();
                // all coordinates equal to one final element: one solution per class from C_fin-d to C_fin
                assert_eq!(coordinate_solve(&m, &cons).len(), d + 1);
            }
        }
    }
}
