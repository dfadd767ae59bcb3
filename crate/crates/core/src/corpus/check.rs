//! Brute-force comparisons of eliminator output with direct evaluation.

use num_bigint::BigInt;
use thiserror::Error;

use crate::logic::qe::QeError;
use crate::logic::{Formula, LiteralConjunction, PairAtom, PairFormula, StarFormula, TreeAtom, TreeFormula, Var};
use crate::models::table::{eval_table, qf_table, tuple_of, Factored};
use crate::models::{eval, Elem, Env, IntervalModel, ModelError, PairModel, StringModel, Structure};
use crate::qe_pair::{eliminate_exists_pair, qe_star, translate_to_star, PolyCardError, Route};
use crate::qe_str::{eliminate_exists_str, str_adequate};

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Qe(#[from] QeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    PolyCard(#[from] PolyCardError),
}

/// Tuples compared, tuples left out by an adequacy bound, and mismatches.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckOutcome {
    pub checked: u64,
    pub skipped: u64,
    pub failures: Vec<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, o: CheckOutcome) {
        self.checked += o.checked;
        self.skipped += o.skipped;
        self.failures.extend(o.failures);
    }

    fn fail(&mut self, msg: String) {
        // a few are enough to diagnose
        if self.failures.len() < 5 {
            self.failures.push(msg);
        }
    }
}

fn params_of<A: crate::logic::Atom>(lc: &LiteralConjunction<A>, x: Var) -> Vec<Var> {
    let mut ps: Vec<Var> = lc.to_formula().free_vars().into_iter().filter(|v| *v != x).collect();
    ps.sort();
    ps
}

fn show(vars: &[Var], t: &[Elem]) -> String {
    vars.iter().zip(t).map(|(v, e)| format!("{v}={e}")).collect::<Vec<_>>().join(" ")
}

fn tree_max_len(f: &TreeFormula) -> usize {
    f.atoms()
        .iter()
        .map(|a| match a {
            TreeAtom::U(s, _) => s.len(),
            TreeAtom::B(s, t, _, _) => s.len().max(t.len()),
            TreeAtom::Eq(..) => 0,
        })
        .max()
        .unwrap_or(0)
}

/// Restricted growth strings of length k with at most `blocks` blocks.
fn tail_patterns(k: usize, blocks: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for p in out {
            let top = p.iter().map(|b| b + 1).max().unwrap_or(0);
            for b in 0..=top.min(blocks - 1) {
                let mut q = p.clone();
                q.push(b);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// ∃x lc against the eliminator output on every parameter tuple of
/// StringModel(n). Atoms only read the first L letters and whether the
/// remaining tails agree, so any permutation of tails is an automorphism for
/// both formulas; one tuple per orbit is compared.
pub fn check_tree_elimination(lc: &LiteralConjunction<TreeAtom>, n: u32) -> Result<CheckOutcome, CheckError> {
    let x = lc.distinguished.unwrap_or_else(super::x);
    let mut out = CheckOutcome::default();
    let m = StringModel::new(n);
    let ps = params_of(lc, x);
    if !str_adequate(lc, n) {
        out.skipped = (m.size() as u64).pow(ps.len() as u32);
        return Ok(out);
    }
    let q = eliminate_exists_str(lc)?;
    let body = lc.to_formula();
    let l = tree_max_len(&body).max(tree_max_len(&q)).min(n as usize);
    let tails = (n as usize).pow(n - l as u32);
    let prefixes = (n as usize).pow(l as u32);
    let k = ps.len();
    let mut env = Env::new();
    for pat in tail_patterns(k, tails) {
        let used = pat.iter().map(|b| b + 1).max().unwrap_or(0);
        // tails for x: those in use and one fresh tail when there is one
        let x_tails = used + usize::from(used < tails);
        crate::models::for_each_tuple(prefixes, k, |pre| {
            for (i, v) in ps.iter().enumerate() {
                env.set(*v, pre[i] * tails + pat[i]);
            }
            let want = (0..prefixes).any(|p| {
                (0..x_tails).any(|t| {
                    env.set(x, p * tails + t);
                    eval(&m, &body, &env).unwrap_or(false)
                })
            });
            env.remove(x);
            let got = eval(&m, &q, &env).unwrap_or(!want);
            out.checked += 1;
            if want != got {
                let t: Vec<Elem> = ps.iter().map(|v| env.val(*v)).collect();
                out.fail(format!("{} at {} on string:{n}: expected {want}, output {q} gave {got}", lc.to_formula(), show(&ps, &t)));
            }
        });
    }
    Ok(out)
}

/// ∃x lc against the pairing eliminator on PairModel(n, m). Tuples below the
/// attached bounds are skipped.
pub fn check_pair_elimination(lc: &LiteralConjunction<PairAtom>, n: u32, m: u32) -> Result<CheckOutcome, CheckError> {
    let x = lc.distinguished.unwrap_or_else(super::x);
    let r = eliminate_exists_pair(lc)?;
    let model = PairModel::new(n, m);
    let ps = params_of(lc, x);
    let total = (model.size() as u64).pow(ps.len() as u32);
    let mut out = CheckOutcome::default();
    let def = match &r.route {
        Route::Link(d) if n < d.min_n => None,
        // C_fin is the smallest class; when it meets the bound every tuple does
        Route::Link(d) if d.cauchy_bound() <= BigInt::from(m) => {
            out.checked = total;
            None
        }
        Route::Link(d) => Some(d),
        Route::Trace { .. } if !r.adequacy.admits(n, m) => None,
        Route::Trace { .. } => {
            out.checked = total;
            None
        }
    };
    if def.is_none() && out.checked == 0 {
        out.skipped = total;
        return Ok(out);
    }
    let truth = Factored::new(&model, x, lc, &ps)?.exists_table()?;
    let got = qf_table(&model, &r.formula, &ps)?;
    out.checked = 0;
    for idx in 0..truth.len() {
        let t = tuple_of(model.size(), ps.len(), idx);
        if let Some(d) = def {
            let env = Env::of(&ps.iter().copied().zip(t.iter().copied()).collect::<Vec<_>>());
            if d.fire(&model, &env)?.is_some_and(|h| !h.above_bound) {
                out.skipped += 1;
                continue;
            }
        }
        out.checked += 1;
        if truth[idx] != got[idx] {
            out.fail(format!(
                "{} at {} on pair:{n},{m}: expected {}, output {} gave {}",
                lc.to_formula(),
                show(&ps, &t),
                truth[idx],
                r.formula,
                got[idx]
            ));
        }
    }
    Ok(out)
}

/// Guards and values of the cardinality definition against brute-force
/// fiber counts on every parameter tuple of PairModel(n, m).
pub fn check_polycard(lc: &LiteralConjunction<PairAtom>, n: u32, m: u32) -> Result<CheckOutcome, CheckError> {
    let x = lc.distinguished.unwrap_or_else(super::x);
    let d = crate::qe_pair::polycard_literals(lc)?;
    let model = PairModel::new(n, m);
    let ps = params_of(lc, x);
    let mut out = CheckOutcome::default();
    if n < d.min_n {
        out.skipped = (model.size() as u64).pow(ps.len() as u32);
        return Ok(out);
    }
    let counts = Factored::new(&model, x, lc, &ps)?.count_table()?;
    for (idx, c) in counts.iter().enumerate() {
        let t = tuple_of(model.size(), ps.len(), idx);
        let env = Env::of(&ps.iter().copied().zip(t.iter().copied()).collect::<Vec<_>>());
        out.checked += 1;
        let value = match d.fire(&model, &env) {
            Ok(h) => h.map(|h| h.value),
            Err(e) => {
                out.fail(format!("{} at {}: {e}", lc.to_formula(), show(&ps, &t)));
                continue;
            }
        };
        let ok = match &value {
            None => *c == 0,
            Some(v) => *v == BigInt::from(*c),
        };
        if !ok {
            out.fail(format!(
                "{} at {} on pair:{n},{m}: {c} solutions, definition gives {value:?}",
                lc.to_formula(),
                show(&ps, &t)
            ));
        }
    }
    Ok(out)
}

fn star_max_power(f: &StarFormula) -> u32 {
    f.atoms().iter().map(|a| a.0.k.max(a.1.k)).max().unwrap_or(0)
}

/// Smallest length from which quantifier elimination in the successor
/// language is checked: twice the largest power plus two.
pub fn star_min_len(f: &StarFormula) -> u32 {
    2 * star_max_power(f) + 2
}

/// A successor formula against its eliminated form on every interval model
/// with length in `lens`.
pub fn check_star(f: &StarFormula, lens: std::ops::RangeInclusive<u32>) -> Result<CheckOutcome, CheckError> {
    let q = qe_star(f)?;
    let mut vars = f.free_vars();
    vars.sort();
    let mut out = CheckOutcome::default();
    for len in lens {
        let m = IntervalModel::new(len);
        let want = eval_table(&m, f, &vars)?;
        let got = qf_table(&m, &q, &vars)?;
        for idx in 0..want.len() {
            out.checked += 1;
            if want[idx] != got[idx] {
                let t = tuple_of(m.size(), vars.len(), idx);
                out.fail(format!("{f} at {} on interval:{len}: expected {}, output {q} gave {}", show(&vars, &t), want[idx], got[idx]));
            }
        }
    }
    Ok(out)
}

/// An equivalence formula on PairModel(n, m) against its successor image on
/// the quotient, the interval of classes.
pub fn check_translation(f: &PairFormula, n: u32, m: u32) -> Result<CheckOutcome, CheckError> {
    let s = translate_to_star(f)?;
    let model = PairModel::new(n, m);
    let quotient = IntervalModel::new(n - 1);
    let mut vars = f.free_vars();
    vars.sort();
    let want = eval_table(&model, f, &vars)?;
    let mut out = CheckOutcome::default();
    for idx in 0..want.len() {
        let t = tuple_of(model.size(), vars.len(), idx);
        let env = Env::of(&vars.iter().zip(&t).map(|(v, e)| (*v, model.class(*e))).collect::<Vec<_>>());
        let got = eval(&quotient, &s, &env)?;
        out.checked += 1;
        if want[idx] != got {
            out.fail(format!("{f} at {}: pair model {} but quotient {s} gives {got}", show(&vars, &t), want[idx]));
        }
    }
    Ok(out)
}

/// Full truth tables of ∃x lc and its elimination; only for small models.
pub fn tree_truth_tables(lc: &LiteralConjunction<TreeAtom>, n: u32) -> Result<(Vec<Var>, bool), CheckError> {
    let x = lc.distinguished.unwrap_or_else(super::x);
    let m = StringModel::new(n);
    let ps = params_of(lc, x);
    let q = eliminate_exists_str(lc)?;
    let truth = eval_table(&m, &Formula::exists(x, lc.to_formula()), &ps)?;
    Ok((ps.clone(), truth == qf_table(&m, &q, &ps)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::*;

    #[test]
    fn patterns() {
        assert_eq!(tail_patterns(3, 5).len(), 5);
        assert_eq!(tail_patterns(3, 2).len(), 4);
        assert_eq!(tail_patterns(0, 1), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn orbit_check_matches_full_tables() {
        // the reduced comparison finds exactly what the full tables find
        for lc in tree_conjunctions(3, 40) {
            if params_of(&lc, x()).len() > 2 {
                continue;
            }
            let (_, same) = tree_truth_tables(&lc, 3).unwrap();
            assert_eq!(same, check_tree_elimination(&lc, 3).unwrap().passed());
        }
    }

    #[test]
    fn small_corpora_pass() {
        for lc in tree_conjunctions(11, 30) {
            let o = check_tree_elimination(&lc, 4).unwrap();
            assert!(o.passed(), "{:?}", o.failures);
        }
        for lc in pair_conjunctions(11, 30) {
            let o = check_pair_elimination(&lc, 3, 3).unwrap();
            assert!(o.passed(), "{:?}", o.failures);
        }
        for lc in link_conjunctions(11, 20) {
            let o = check_polycard(&lc, 3, 2).unwrap();
            assert!(o.passed(), "{:?}", o.failures);
        }
        for f in star_formulas(11, 20) {
            let o = check_star(&f, star_min_len(&f)..=8).unwrap();
            assert!(o.passed(), "{:?}", o.failures);
        }
        for f in equivalence_formulas(11, 20) {
            let o = check_translation(&f, 3, 2).unwrap();
            assert!(o.passed(), "{:?}", o.failures);
        }
    }
}
