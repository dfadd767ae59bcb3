use std::collections::HashMap;

use num_bigint::BigInt;
use proptest::prelude::*;

use pseudofinite::corpus::{self, check};
use pseudofinite::counting::{delta_compare, Basis, DeltaMode, DeltaVerdict, Family, FamilyCard, Poly};
use pseudofinite::gms::{build_chain_on_branch, verify_chain, ChainKind};
use pseudofinite::logic::normal::dnf_formula;
use pseudofinite::logic::{nnf, parse_formula, simplify, DigitString, PairFormula, Var};
use pseudofinite::models::table::eval_table;
use pseudofinite::models::{FamilySpec, PairModel, Structure};
use pseudofinite::CardExpr;

const NAMES: [&str; 3] = ["a", "b", "c"];

fn poly() -> impl Strategy<Value = CardExpr> {
    prop::collection::vec((-5i64..=5, prop::collection::vec(0u32..=2, 3)), 0..4).prop_map(|terms| {
        let mut p = CardExpr::zero();
        for (c, exps) in terms {
            let mut t = Poly::constant(BigInt::from(c));
            for (name, e) in NAMES.iter().zip(exps) {
                t = &t * &Poly::var(name).pow(e);
            }
            p = &p + &t;
        }
        p
    })
}

fn binding() -> impl Strategy<Value = HashMap<String, BigInt>> {
    prop::collection::vec(-6i64..=6, 3)
        .prop_map(|v| NAMES.iter().zip(v).map(|(n, x)| (n.to_string(), BigInt::from(x))).collect())
}

fn string_card() -> impl Strategy<Value = FamilyCard> {
    let basis = prop::collection::vec(0u32..=3, 1..=2).prop_map(|depths| Basis::StringPow { depths });
    prop::collection::vec((basis, 1i64..=3), 1..=3).prop_map(|terms| {
        FamilyCard::new(Family::String, "t", terms.into_iter().map(|(b, c)| (b, BigInt::from(c))).collect()).unwrap()
    })
}

fn pair_formula() -> impl Strategy<Value = String> {
    let atom = prop_oneof![
        Just("(Cfin 0 x)".to_string()),
        Just("(Cinit 0 y)".to_string()),
        Just("(Cinit 1 x)".to_string()),
        Just(r#"(= (app "f" x) y)"#.to_string()),
        Just(r#"(= (app "g" y) x)"#.to_string()),
        Just("(E x y)".to_string()),
        Just("(= x y)".to_string()),
    ];
    atom.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| format!("(not {a})")),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(|v| format!("(and {})", v.join(" "))),
            prop::collection::vec(inner, 2..=3).prop_map(|v| format!("(or {})", v.join(" "))),
        ]
    })
}

proptest! {
    #[test]
    fn poly_eval_is_a_ring_map(p in poly(), q in poly(), b in binding()) {
        let (pv, qv) = (p.eval(&b).unwrap(), q.eval(&b).unwrap());
        prop_assert_eq!((&p + &q).eval(&b).unwrap(), &pv + &qv);
        prop_assert_eq!((&p - &q).eval(&b).unwrap(), &pv - &qv);
        prop_assert_eq!((&p * &q).eval(&b).unwrap(), &pv * &qv);
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn substitution_commutes_with_eval(p in poly(), q in poly(), b in binding()) {
        let mut inner = b.clone();
        inner.insert("a".into(), q.eval(&b).unwrap());
        prop_assert_eq!(p.substitute("a", &q).eval(&b).unwrap(), p.eval(&inner).unwrap());
    }

    #[test]
    fn delta_order_is_antisymmetric_and_sound(a in string_card(), b in string_card()) {
        let ab = delta_compare(&a, &b, &DeltaMode::Symbolic).unwrap().verdict;
        let ba = delta_compare(&b, &a, &DeltaMode::Symbolic).unwrap().verdict;
        prop_assert_eq!(ab, ba.flip());
        prop_assert_eq!(delta_compare(&a, &a, &DeltaMode::Symbolic).unwrap().verdict, DeltaVerdict::SameOrder);
        let (av, bv) = (a.eval(40), b.eval(40));
        match ab {
            DeltaVerdict::FirstSmaller => prop_assert!(av < bv),
            DeltaVerdict::FirstLarger => prop_assert!(av > bv),
            DeltaVerdict::SameOrder => prop_assert!(av <= &bv * 10 && bv <= &av * 10),
            DeltaVerdict::Unknown => prop_assert!(false, "symbolic comparison of positive germs is total"),
        }
    }

    #[test]
    fn normal_forms_preserve_truth(text in pair_formula()) {
        let f: PairFormula = parse_formula(&text).unwrap();
        let m = PairModel::new(3, 2);
        let vars = [Var::new("x"), Var::new("y")];
        let want = eval_table(&m, &f, &vars).unwrap();
        prop_assert_eq!(&eval_table(&m, &nnf(&f), &vars).unwrap(), &want);
        prop_assert_eq!(&eval_table(&m, &simplify(&f), &vars).unwrap(), &want);
        prop_assert_eq!(&eval_table(&m, &dnf_formula(&f, 4096).unwrap(), &vars).unwrap(), &want);
    }

    #[test]
    fn pairing_is_a_bijection(n in 2u32..=4, m in 2u32..=3) {
        let pm = PairModel::new(n, m);
        for i in 0..pm.fin_class() {
            let next = pm.class_range(i + 1);
            let mut seen = std::collections::HashSet::new();
            for e in pm.class_range(i) {
                let (f, g) = (pm.f(e), pm.g(e));
                prop_assert!(next.contains(&f) && next.contains(&g));
                prop_assert!(seen.insert((f, g)));
            }
            prop_assert_eq!(seen.len(), next.len() * next.len());
        }
        prop_assert_eq!(pm.class_size(pm.fin_class()), m as usize);
        prop_assert_eq!((0..pm.n() as usize).map(|i| pm.class_size(i)).sum::<usize>(), pm.size());
    }

    #[test]
    fn tree_chains_on_any_branch(branch in prop::collection::vec(0u32..3, 1..=3)) {
        let depth = branch.len();
        let sweep = [FamilySpec::String(3), FamilySpec::String(4)];
        let c = build_chain_on_branch(ChainKind::SaTree, depth, &sweep, &DigitString(branch)).unwrap();
        let r = verify_chain(&c, 8).unwrap();
        prop_assert!(r.passed, "{:?}", r.counterexamples);
        for row in &r.rows {
            prop_assert_eq!(row.ratio.is_some(), row.level > 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tree_elimination_is_sound(seed in any::<u64>()) {
        for lc in corpus::tree_conjunctions(seed, 2) {
            let o = check::check_tree_elimination(&lc, 3).unwrap();
            prop_assert!(o.passed(), "{}: {:?}", lc.to_formula(), o.failures);
        }
    }

    #[test]
    fn pair_elimination_is_sound(seed in any::<u64>()) {
        for lc in corpus::pair_conjunctions(seed, 2) {
            let o = check::check_pair_elimination(&lc, 3, 3).unwrap();
            prop_assert!(o.passed(), "{}: {:?}", lc.to_formula(), o.failures);
        }
    }

    #[test]
    fn polycard_matches_counts(seed in any::<u64>()) {
        for lc in corpus::link_conjunctions(seed, 2) {
            let o = check::check_polycard(&lc, 3, 3).unwrap();
            prop_assert!(o.passed(), "{}: {:?}", lc.to_formula(), o.failures);
        }
    }

    #[test]
    fn star_elimination_is_sound(seed in any::<u64>()) {
        for f in corpus::star_formulas(seed, 2) {
            let o = check::check_star(&f, 1..=9).unwrap();
            prop_assert!(o.passed(), "{f}: {:?}", o.failures);
        }
    }
}
