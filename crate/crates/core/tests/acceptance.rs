//! Runs every acceptance criterion and prints one PASS/FAIL line for each.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pseudofinite::corpus::{
    self, check_pair_elimination, check_polycard, check_star, check_tree_elimination, CheckOutcome, DEFAULT_SEED,
};
use pseudofinite::counting::delta::shipped_cards;
use pseudofinite::counting::{boolean_card, delta_compare, fiber_count, DeltaMode, Poly};
use pseudofinite::gms::{build_chain, ratios_are_reciprocal, verify_chain, ChainKind, DEFAULT_NMAX};
use pseudofinite::logic::{DigitString, EqAtom, Formula, TreeAtom, Var};
use pseudofinite::models::audit::{audit_pair, audit_tree, AuditMode};
use pseudofinite::models::{count, Env, EqClassModel, FamilySpec, PairModel, StringModel, Structure};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Σ_{i=0}^{k} m^(2^i); zero for k < 0.
fn d(k: i64, m: u64) -> u64 {
    (0..=k).map(|i| m.pow(1 << i)).sum()
}

fn sizes() -> Outcome {
    for (n, m, want) in [(3u32, 2u32, 22usize), (3, 3, 93), (4, 2, 278)] {
        let model = PairModel::new(n, m);
        let enumerated = (0..n as usize).map(|c| (0..model.size()).filter(|&e| model.class(e) == c).count()).sum::<usize>();
        let formula = d(n as i64 - 1, m as u64) as usize;
        ensure(enumerated == want && formula == want && model.size() == want, || {
            format!("pair:{n},{m}: enumerated {enumerated}, sum {formula}, expected {want}")
        })?;
    }
    Ok("sizes 22, 93, 278".into())
}

fn pair_chain_counts() -> Outcome {
    let mut rows = 0;
    for (n, m) in [(3u32, 2u32), (3, 3), (4, 2), (4, 3)] {
        let c = build_chain(ChainKind::APair, n as usize - 2, &[FamilySpec::Pair(n, m)]).map_err(|e| e.to_string())?;
        let r = verify_chain(&c, DEFAULT_NMAX).map_err(|e| e.to_string())?;
        for row in &r.rows {
            let want = d(n as i64 - row.level as i64 - 2, m as u64);
            ensure(row.count == BigUint::from(want), || format!("pair:{n},{m} level {}: {} != {want}", row.level, row.count))?;
            rows += 1;
        }
    }
    Ok(format!("{rows} level counts equal D"))
}

fn strings_up_to(n: u32, len: usize) -> Vec<DigitString> {
    let mut all = vec![DigitString::empty()];
    let mut layer = all.clone();
    for _ in 0..len {
        layer = layer
            .iter()
            .flat_map(|s| (0..n).map(move |a| s.concat(&DigitString(vec![a]))))
            .collect();
        all.extend(layer.clone());
    }
    all
}

fn string_family() -> Outcome {
    let x = Var::new("x");
    let mut checked = 0;
    for n in 2..=5u32 {
        let m = StringModel::new(n);
        // U_σ is empty once σ is longer than n
        for s in strings_up_to(n, 3.min(n as usize)) {
            let f = Formula::atom(TreeAtom::U(s.clone(), x));
            let c = count(&m, &f, &Env::new(), &[x]).map_err(|e| e.to_string())?;
            let want = BigUint::from(n).pow(n - s.len() as u32);
            ensure(c == want, || format!("|U_{s}| on string:{n} is {c}, expected {want}"))?;
            checked += 1;
        }
    }
    let c = build_chain(ChainKind::SaTree, 3, &[3, 4, 5].map(FamilySpec::String)).map_err(|e| e.to_string())?;
    let r = verify_chain(&c, DEFAULT_NMAX).map_err(|e| e.to_string())?;
    ensure(r.passed, || format!("SA_TREE chain failed: {:?}", r.counterexamples))?;
    ensure(ratios_are_reciprocal(&r), || "a ratio differs from 1/n".into())?;
    Ok(format!("{checked} sets; SA_TREE chain PASS with ratios 1/n"))
}

fn intro_family() -> Outcome {
    let x = Var::new("x");
    let mut checked = 0;
    for n in 3..=6u32 {
        let m = EqClassModel::new(n);
        for k in 0..n as usize {
            let ps: Vec<Var> = (1..=k).map(|i| Var::new(&format!("c{i}"))).collect();
            let f = Formula::and(ps.iter().map(|c| Formula::not(Formula::atom(EqAtom::E(x, *c)))).collect());
            let env = Env::of(&ps.iter().enumerate().map(|(i, c)| (*c, m.rep_of_ith_largest(i + 1))).collect::<Vec<_>>());
            let got = count(&m, &f, &env, &[x]).map_err(|e| e.to_string())?;
            let want: u64 = (1..=n - k as u32).map(|i| (n as u64).pow(i)).sum();
            ensure(got == BigUint::from(want), || format!("eqclass:{n} k={k}: {got} != {want}"))?;
            checked += 1;
        }
    }
    let c = build_chain(ChainKind::AEqclass, 2, &[4, 5, 6].map(FamilySpec::EqClass)).map_err(|e| e.to_string())?;
    let r = verify_chain(&c, DEFAULT_NMAX).map_err(|e| e.to_string())?;
    ensure(r.passed, || format!("A_EQCLASS chain failed: {:?}", r.counterexamples))?;
    Ok(format!("{checked} counts; A_EQCLASS chain PASS"))
}

fn summarize(what: &str, items: usize, o: CheckOutcome) -> Outcome {
    ensure(o.passed(), || format!("{what}: {:?}", o.failures))?;
    ensure(o.checked > 0, || format!("{what}: nothing checked"))?;
    Ok(format!("{items} formulas, {} tuples agree, {} below bounds", o.checked, o.skipped))
}

fn tree_qe() -> Outcome {
    let corpus = corpus::tree_conjunctions(DEFAULT_SEED, 200);
    let mut all = CheckOutcome::default();
    for lc in &corpus {
        for n in [4, 5] {
            all.merge(check_tree_elimination(lc, n).map_err(|e| e.to_string())?);
        }
    }
    ensure(all.skipped == 0, || "corpus left the adequacy range".into())?;
    summarize("tree", corpus.len(), all)
}

fn pair_qe() -> Outcome {
    let corpus = corpus::pair_conjunctions(DEFAULT_SEED, 200);
    let mut all = CheckOutcome::default();
    for lc in &corpus {
        for (n, m) in [(3, 3), (4, 2)] {
            all.merge(check_pair_elimination(lc, n, m).map_err(|e| e.to_string())?);
        }
    }
    summarize("pair", corpus.len(), all)
}

fn polycard() -> Outcome {
    let corpus = corpus::link_conjunctions(DEFAULT_SEED, 100);
    let mut all = CheckOutcome::default();
    for lc in &corpus {
        for (n, m) in [(3, 2), (3, 3), (4, 2)] {
            all.merge(check_polycard(lc, n, m).map_err(|e| e.to_string())?);
        }
    }
    summarize("polycard", corpus.len(), all)
}

fn star_qe() -> Outcome {
    let corpus = corpus::star_formulas(DEFAULT_SEED, 100);
    let mut all = CheckOutcome::default();
    for f in &corpus {
        all.merge(check_star(f, corpus::check::star_min_len(f)..=12).map_err(|e| e.to_string())?);
    }
    summarize("star", corpus.len(), all)
}

fn algebra() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for _ in 0..1000 {
        let base = r.gen_range(0..12usize);
        let c = r.gen_range(1..6usize);
        // a relation with c points over each base point, on a shuffled grid
        let rel: BTreeSet<(usize, usize)> = (0..base).flat_map(|b| (0..c).map(move |j| (b, j * 7 + b))).collect();
        let fibers: BTreeSet<usize> = rel.iter().map(|p| p.0).collect();
        let want = Poly::constant(BigInt::from(rel.len()));
        let got = fiber_count(&Poly::constant(BigInt::from(c)), &Poly::constant(BigInt::from(fibers.len())));
        ensure(got == want, || format!("fiber_count {c}x{base}: {got}"))?;
    }
    for _ in 0..1000 {
        let k = r.gen_range(1..=4usize);
        let sets: Vec<BTreeSet<u32>> = (0..k).map(|_| (0..30).filter(|_| r.gen_bool(0.4)).collect()).collect();
        let mut cards = BTreeMap::new();
        for mask in 1u32..(1 << k) {
            let idx: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
            let inter = (0..30).filter(|e| idx.iter().all(|&i| sets[i].contains(e))).count();
            cards.insert(idx, Poly::constant(BigInt::from(inter)));
        }
        let union = (0..30).filter(|e| sets.iter().any(|s| s.contains(e))).count();
        let got = boolean_card(&cards, k).map_err(|e| e.to_string())?;
        ensure(got == Poly::constant(BigInt::from(union)), || format!("boolean_card gave {got}, union {union}"))?;
    }
    let cards = shipped_cards();
    let mut pairs = 0;
    let sweep = DeltaMode::Empirical { sweep: (3..=8).collect(), nmax: DEFAULT_NMAX };
    for a in &cards {
        for b in cards.iter().filter(|b| b.family == a.family) {
            let s = delta_compare(a, b, &DeltaMode::Symbolic).map_err(|e| e.to_string())?;
            let e = delta_compare(a, b, &sweep).map_err(|e| e.to_string())?;
            ensure(s.verdict == e.verdict, || format!("{} vs {}: {} / {}", a.label, b.label, s.verdict, e.verdict))?;
            pairs += 1;
        }
    }
    Ok(format!("1000 fibers, 1000 set systems, {pairs} comparisons agree"))
}

fn audits() -> Outcome {
    let mut instances = 0;
    for n in [2, 3] {
        let a = audit_tree(&StringModel::new(n), AuditMode::Exhaustive);
        ensure(a.passed(), || format!("string:{n}: {:?}", a.failures))?;
        instances += a.instances;
    }
    for n in [4, 5] {
        let a = audit_tree(&StringModel::new(n), AuditMode::Sampled { instances: 20_000, seed: DEFAULT_SEED });
        ensure(a.passed(), || format!("string:{n}: {:?}", a.failures))?;
        instances += a.instances;
    }
    for (n, m) in [(3, 2), (3, 3), (4, 2)] {
        let a = audit_pair(&PairModel::new(n, m));
        ensure(a.passed(), || format!("pair:{n},{m}: {:?}", a.failures))?;
        instances += a.instances;
    }
    Ok(format!("{instances} axiom instances hold"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exact pair model sizes", sizes),
        ("pair chain counts", pair_chain_counts),
        ("string family and SA_TREE chain", string_family),
        ("intro family and A_EQCLASS chain", intro_family),
        ("tree elimination soundness", tree_qe),
        ("pair elimination soundness", pair_qe),
        ("polynomial cardinality exactness", polycard),
        ("successor elimination", star_qe),
        ("counting algebra and δ agreement", algebra),
        ("axiom audits", audits),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = run();
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
