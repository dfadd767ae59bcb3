//! Descending witness chains for the dimension comparison.
//!
//! Each chain is a sequence of one-variable formulas with parameters whose
//! defined sets shrink strictly, and each step down is by a factor that grows
//! with the family parameter.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::counting::delta::{pair_fin_anchor, tree_anchor};
use crate::counting::{
    delta_compare, delta_from_counts, Basis, CardError, DeltaMode, DeltaOutcome, DeltaVerdict, Family, FamilyCard,
};
use crate::logic::{AnyFormula, DigitString, EqAtom, Formula, PairAtom, PairTerm, TreeAtom, Var};
use crate::models::{build_model_with_budget, AnyModel, Elem, Env, FamilySpec, ModelError, DEFAULT_BUDGET};
use crate::CardExpr;

pub const DEFAULT_NMAX: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ChainKind {
    SaTree,
    APair,
    AEqclass,
}

impl ChainKind {
    pub const ALL: [ChainKind; 3] = [ChainKind::SaTree, ChainKind::APair, ChainKind::AEqclass];

    /// Largest shipped sweep of each kind within the default budget.
    pub fn default_sweep(self) -> Vec<FamilySpec> {
        match self {
            ChainKind::SaTree => (3..=6).map(FamilySpec::String).collect(),
            ChainKind::APair => (2..=4).map(|m| FamilySpec::Pair(4, m)).collect(),
            ChainKind::AEqclass => (4..=6).map(FamilySpec::EqClass).collect(),
        }
    }
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainKind::SaTree => "SA_TREE",
            ChainKind::APair => "A_PAIR",
            ChainKind::AEqclass => "A_EQCLASS",
        })
    }
}

impl FromStr for ChainKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "sa_tree" => Ok(ChainKind::SaTree),
            "a_pair" => Ok(ChainKind::APair),
            "a_eqclass" => Ok(ChainKind::AEqclass),
            _ => Err(format!("unknown chain kind {s:?}; expected sa_tree, a_pair or a_eqclass")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("the sweep is empty")]
    EmptySweep,
    #[error("chain depth must be positive")]
    ZeroDepth,
    #[error("{kind} chains do not run on {spec}")]
    WrongFamily { kind: ChainKind, spec: FamilySpec },
    #[error("depth {depth} is too large for {spec}")]
    DepthTooLarge { depth: usize, spec: FamilySpec },
    #[error("branch letter {letter} does not exist in {spec}")]
    BranchLetter { letter: u32, spec: FamilySpec },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Card(#[from] CardError),
}

#[derive(Debug, Clone)]
pub struct Chain {
    pub kind: ChainKind,
    pub depth: usize,
    pub sweep: Vec<FamilySpec>,
    /// Branch followed by SA_TREE chains; only its first `depth` letters matter.
    pub branch: DigitString,
    /// Formula of each level 0..=depth in the free variable [`Chain::var`].
    pub levels: Vec<AnyFormula>,
}

fn param(i: usize) -> Var {
    Var::new(&format!("a{i}"))
}

impl Chain {
    pub fn var() -> Var {
        Var::new("x")
    }

    /// Parameters of a level, in order.
    pub fn param_vars(&self, level: usize) -> Vec<Var> {
        match self.kind {
            ChainKind::SaTree => Vec::new(),
            ChainKind::APair => (0..=level).map(param).collect(),
            ChainKind::AEqclass => (1..=level).map(param).collect(),
        }
    }

    /// Least element of the class each parameter must lie in.
    pub fn params(&self, level: usize, model: &AnyModel) -> Env {
        let vals: Vec<(Var, Elem)> = match (self.kind, model) {
            (ChainKind::APair, AnyModel::Pair(m)) => (0..=level).map(|i| (param(i), m.class_range(i).start)).collect(),
            (ChainKind::AEqclass, AnyModel::EqClass(m)) => (1..=level).map(|i| (param(i), m.rep_of_ith_largest(i))).collect(),
            _ => Vec::new(),
        };
        Env::of(&vals)
    }

    /// Exact size of a level as a germ of the family containing `spec`.
    pub fn card(&self, level: usize, spec: FamilySpec) -> Result<FamilyCard, ChainError> {
        let label = format!("{} level {level}", self.kind);
        Ok(match (self.kind, spec) {
            (ChainKind::SaTree, _) => {
                let e = CardExpr::var(&tree_anchor(level));
                FamilyCard::from_expr(Family::String, label, &e)?
            }
            (ChainKind::APair, FamilySpec::Pair(n, _)) => {
                let mut e = CardExpr::zero();
                for i in 0..(n as usize).saturating_sub(level + 1) {
                    e = &e + &CardExpr::var(&pair_fin_anchor(i as u32));
                }
                FamilyCard::from_expr(Family::Pair { n }, label, &e)?
            }
            (ChainKind::AEqclass, _) => FamilyCard::single(Family::EqClass, label, Basis::EqTail { offset: level as u32 })?,
            (kind, spec) => return Err(ChainError::WrongFamily { kind, spec }),
        })
    }
}

fn tree_level(branch: &DigitString, j: usize) -> AnyFormula {
    AnyFormula::Tree(Formula::atom(TreeAtom::U(DigitString(branch.0[..j].to_vec()), Chain::var())))
}

fn pair_level(j: usize) -> AnyFormula {
    let x = PairTerm::var(Chain::var());
    AnyFormula::Pair(Formula::and(
        (0..=j).map(|i| Formula::not(Formula::atom(PairAtom::E(x.clone(), PairTerm::var(param(i)))))).collect(),
    ))
}

fn eq_level(k: usize) -> AnyFormula {
    let x = Chain::var();
    AnyFormula::Eq(Formula::and((1..=k).map(|i| Formula::not(Formula::atom(EqAtom::E(x, param(i))))).collect()))
}

/// The chain along the constant-0 branch for SA_TREE.
pub fn build_chain(kind: ChainKind, depth: usize, sweep: &[FamilySpec]) -> Result<Chain, ChainError> {
    build_chain_on_branch(kind, depth, sweep, &DigitString(vec![0; depth]))
}

pub fn build_chain_on_branch(
    kind: ChainKind,
    depth: usize,
    sweep: &[FamilySpec],
    branch: &DigitString,
) -> Result<Chain, ChainError> {
    if sweep.is_empty() {
        return Err(ChainError::EmptySweep);
    }
    if depth == 0 {
        return Err(ChainError::ZeroDepth);
    }
    for &spec in sweep {
        spec.validate()?;
        let limit = match (kind, spec) {
            (ChainKind::SaTree, FamilySpec::String(n)) => {
                if let Some(&letter) = branch.0.iter().take(depth).find(|&&l| l >= n) {
                    return Err(ChainError::BranchLetter { letter, spec });
                }
                // U_σ with |σ| = n is still a singleton
                n as usize
            }
            // φ_{n-1} excludes every class
            (ChainKind::APair, FamilySpec::Pair(n, _)) => (n as usize).saturating_sub(2),
            (ChainKind::AEqclass, FamilySpec::EqClass(n)) => n as usize - 1,
            _ => return Err(ChainError::WrongFamily { kind, spec }),
        };
        if depth > limit {
            return Err(ChainError::DepthTooLarge { depth, spec });
        }
    }
    let branch = if kind == ChainKind::SaTree {
        if branch.len() < depth {
            return Err(ChainError::DepthTooLarge { depth, spec: sweep[0] });
        }
        DigitString(branch.0[..depth].to_vec())
    } else {
        DigitString::empty()
    };
    let levels = (0..=depth)
        .map(|j| match kind {
            ChainKind::SaTree => tree_level(&branch, j),
            ChainKind::APair => pair_level(j),
            ChainKind::AEqclass => eq_level(j),
        })
        .collect();
    Ok(Chain {
        kind,
        depth,
        sweep: sweep.to_vec(),
        branch,
        levels,
    })
}

/// One level at one sweep point.
#[derive(Debug, Clone, Serialize)]
pub struct ChainRow {
    pub level: usize,
    pub model: String,
    pub params: Vec<(String, Elem)>,
    pub count: BigUint,
    pub expected: BigInt,
    /// count / previous level's count, reduced.
    pub ratio: Option<(BigUint, BigUint)>,
}

impl ChainRow {
    pub fn param_tuple(&self) -> String {
        let mut s = self.model.clone();
        for (v, e) in &self.params {
            s.push_str(&format!(" {v}={e}"));
        }
        s
    }

    pub fn ratio_text(&self) -> String {
        match &self.ratio {
            Some((a, b)) => format!("{a}/{b}"),
            None => "-".to_string(),
        }
    }
}

/// Verdict for level `level` against level `level - 1` within one family.
#[derive(Debug, Clone, Serialize)]
pub struct StepVerdict {
    pub family: Family,
    pub level: usize,
    pub symbolic: DeltaOutcome,
    pub empirical: DeltaOutcome,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub kind: ChainKind,
    pub depth: usize,
    pub nmax: u32,
    pub rows: Vec<ChainRow>,
    pub steps: Vec<StepVerdict>,
    pub counterexamples: Vec<String>,
    pub passed: bool,
}

impl ChainReport {
    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }

    fn step(&self, family: Family, level: usize) -> Option<&StepVerdict> {
        self.steps.iter().find(|s| s.family == family && s.level == level)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["kind", "level", "param_tuple", "count", "ratio_to_previous", "symbolic_verdict", "empirical_verdict"])?;
        for r in &self.rows {
            let spec: FamilySpec = r.model.parse().expect("rows hold valid model specs");
            let step = family_of(spec).and_then(|f| self.step(f, r.level));
            let (sym, emp) = match step {
                Some(s) => (s.symbolic.label(), s.empirical.label()),
                None => ("-".to_string(), "-".to_string()),
            };
            out.write_record([
                self.kind.to_string(),
                r.level.to_string(),
                r.param_tuple(),
                r.count.to_string(),
                r.ratio_text(),
                sym,
                emp,
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["schema"] = 1.into();
        v["verdict"] = self.verdict().into();
        v
    }
}

fn family_of(spec: FamilySpec) -> Option<Family> {
    match spec {
        FamilySpec::String(_) => Some(Family::String),
        FamilySpec::Pair(n, _) => Some(Family::Pair { n }),
        FamilySpec::EqClass(_) => Some(Family::EqClass),
        FamilySpec::Interval(_) => None,
    }
}

fn sweep_param(spec: FamilySpec) -> u32 {
    match spec {
        FamilySpec::String(n) | FamilySpec::EqClass(n) | FamilySpec::Interval(n) => n,
        FamilySpec::Pair(_, m) => m,
    }
}

pub fn verify_chain(c: &Chain, nmax: u32) -> Result<ChainReport, ChainError> {
    verify_chain_with_budget(c, nmax, DEFAULT_BUDGET)
}

pub fn verify_chain_with_budget(c: &Chain, nmax: u32, budget: usize) -> Result<ChainReport, ChainError> {
    let x = Chain::var();
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    // per family: (p, counts by level)
    let mut measured: Vec<(Family, Vec<(u32, Vec<BigInt>)>)> = Vec::new();
    for &spec in &c.sweep {
        let model = build_model_with_budget(spec, budget)?;
        let mut prev: Option<Vec<Vec<Elem>>> = None;
        let mut counts = Vec::new();
        for (level, f) in c.levels.iter().enumerate() {
            let env = c.params(level, &model);
            let set = model.definable_set(f, &env, &[x])?;
            let count = BigUint::from(set.len());
            let expected = c.card(level, spec)?.eval(sweep_param(spec));
            if BigInt::from(count.clone()) != expected {
                bad.push(format!("{spec} level {level}: counted {count}, expected {expected}"));
            }
            let ratio = prev.as_ref().map(|p| {
                let den = BigUint::from(p.len());
                let g = count.gcd(&den);
                if g.is_zero() {
                    (count.clone(), den)
                } else {
                    (&count / &g, &den / &g)
                }
            });
            if let Some(p) = &prev {
                // both sets are sorted
                let strict = set.len() < p.len() && set.iter().all(|t| p.binary_search(t).is_ok());
                if !strict {
                    bad.push(format!("{spec} level {level}: not a strict subset of level {}", level - 1));
                }
            }
            counts.push(BigInt::from(count.clone()));
            rows.push(ChainRow {
                level,
                model: spec.to_string(),
                params: env.vars().into_iter().map(|v| (v.name(), env.val(v))).collect(),
                count,
                expected,
                ratio,
            });
            prev = Some(set);
        }
        let fam = family_of(spec).ok_or(ChainError::WrongFamily { kind: c.kind, spec })?;
        match measured.iter_mut().find(|(f, _)| *f == fam) {
            Some((_, pts)) => pts.push((sweep_param(spec), counts)),
            None => measured.push((fam, vec![(sweep_param(spec), counts)])),
        }
    }
    let mut steps = Vec::new();
    for (fam, pts) in &measured {
        let spec = c.sweep.iter().copied().find(|s| family_of(*s) == Some(*fam)).expect("family came from the sweep");
        for level in 1..=c.depth {
            let symbolic = delta_compare(&c.card(level, spec)?, &c.card(level - 1, spec)?, &DeltaMode::Symbolic)?;
            let data: Vec<(u32, BigInt, BigInt)> =
                pts.iter().map(|(p, cs)| (*p, cs[level].clone(), cs[level - 1].clone())).collect();
            let empirical = delta_from_counts(&data, nmax);
            for (mode, o) in [("symbolic", &symbolic), ("empirical", &empirical)] {
                if o.verdict != DeltaVerdict::FirstSmaller {
                    let why = o.counterexample.as_deref().unwrap_or("");
                    bad.push(format!("{fam} level {level} vs {}: {mode} verdict {} {why}", level - 1, o.verdict));
                }
            }
            steps.push(StepVerdict {
                family: *fam,
                level,
                symbolic,
                empirical,
            });
        }
    }
    Ok(ChainReport {
        kind: c.kind,
        depth: c.depth,
        nmax,
        passed: bad.is_empty(),
        rows,
        steps,
        counterexamples: bad,
    })
}

/// Whether every ratio in the report is exactly 1/p at its sweep point.
pub fn ratios_are_reciprocal(r: &ChainReport) -> bool {
    r.rows.iter().filter(|row| row.level > 0).all(|row| {
        let p = sweep_param(row.model.parse().expect("valid spec"));
        row.ratio == Some((BigUint::one(), BigUint::from(p)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: u32, m: u32, k: u32) -> u64 {
        // D_{n-k-2,m} = Σ_{i=0}^{n-k-2} m^(2^i)
        (0..n - k - 1).map(|i| (m as u64).pow(1 << i)).sum()
    }

    #[test]
    fn sa_tree_example() {
        let c = build_chain(ChainKind::SaTree, 3, &[3, 4, 5].map(FamilySpec::String)).unwrap();
        let shown: Vec<String> = c.levels.iter().map(|f| f.to_string()).collect();
        assert_eq!(shown, [r#"(U "" x)"#, r#"(U "0" x)"#, r#"(U "00" x)"#, r#"(U "000" x)"#]);
        let r = verify_chain(&c, DEFAULT_NMAX).unwrap();
        assert!(r.passed, "{:?}", r.counterexamples);
        assert!(ratios_are_reciprocal(&r));
        for row in &r.rows {
            let n: u64 = row.model[7..].parse().unwrap();
            assert_eq!(row.count, BigUint::from(n.pow(n as u32 - row.level as u32)));
        }
    }

    #[test]
    fn other_branch() {
        let c = build_chain_on_branch(ChainKind::SaTree, 2, &[3, 4].map(FamilySpec::String), &"21".into()).unwrap();
        assert!(verify_chain(&c, DEFAULT_NMAX).unwrap().passed);
        assert!(build_chain_on_branch(ChainKind::SaTree, 2, &[2].map(FamilySpec::String), &"21".into()).is_err());
    }

    #[test]
    fn pair_example() {
        let sweep = [(4, 2), (4, 3), (4, 4)].map(|(n, m)| FamilySpec::Pair(n, m));
        let c = build_chain(ChainKind::APair, 2, &sweep).unwrap();
        assert_eq!(c.levels.len(), 3);
        let r = verify_chain(&c, DEFAULT_NMAX).unwrap();
        assert!(r.passed, "{:?}", r.counterexamples);
        for row in &r.rows {
            let m: u32 = row.model[7..].parse().unwrap();
            assert_eq!(row.count, BigUint::from(d(4, m, row.level as u32)));
        }
        // a_i is the least element of C_init+i
        assert_eq!(r.rows[2].params, vec![("a0".into(), 0), ("a1".into(), 256), ("a2".into(), 272)]);
    }

    #[test]
    fn pair_mixed_class_counts() {
        let sweep = [(3, 2), (3, 3), (4, 2), (4, 3)].map(|(n, m)| FamilySpec::Pair(n, m));
        let r = verify_chain(&build_chain(ChainKind::APair, 1, &sweep).unwrap(), DEFAULT_NMAX).unwrap();
        assert!(r.passed, "{:?}", r.counterexamples);
        assert_eq!(r.steps.len(), 2);
    }

    #[test]
    fn eqclass_example() {
        let c = build_chain(ChainKind::AEqclass, 2, &[4, 5, 6].map(FamilySpec::EqClass)).unwrap();
        assert_eq!(c.levels[2].to_string(), "(and (not (E x a1)) (not (E x a2)))");
        let r = verify_chain(&c, DEFAULT_NMAX).unwrap();
        assert!(r.passed, "{:?}", r.counterexamples);
        for row in &r.rows {
            let n: u64 = row.model[8..].parse().unwrap();
            let want: u64 = (1..=n - row.level as u64).map(|i| n.pow(i as u32)).sum();
            assert_eq!(row.count, BigUint::from(want));
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(
            build_chain(ChainKind::SaTree, 4, &[FamilySpec::String(3)]),
            Err(ChainError::DepthTooLarge { .. })
        ));
        assert!(matches!(
            build_chain(ChainKind::APair, 2, &[FamilySpec::Pair(3, 2)]),
            Err(ChainError::DepthTooLarge { .. })
        ));
        assert!(matches!(
            build_chain(ChainKind::AEqclass, 1, &[FamilySpec::String(3)]),
            Err(ChainError::WrongFamily { .. })
        ));
        assert!(matches!(build_chain(ChainKind::AEqclass, 1, &[]), Err(ChainError::EmptySweep)));
        let c = build_chain(ChainKind::SaTree, 1, &[FamilySpec::String(5)]).unwrap();
        assert!(matches!(verify_chain_with_budget(&c, 8, 100), Err(ChainError::Model(ModelError::Budget { .. }))));
    }

    #[test]
    fn csv_and_json() {
        let c = build_chain(ChainKind::SaTree, 1, &[FamilySpec::String(3)]).unwrap();
        let r = verify_chain(&c, DEFAULT_NMAX).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "kind,level,param_tuple,count,ratio_to_previous,symbolic_verdict,empirical_verdict");
        assert_eq!(lines[1], "SA_TREE,0,string:3,27,-,-,-");
        assert_eq!(lines[2], "SA_TREE,1,string:3,9,1/3,FIRST_SMALLER,consistent-with FIRST_SMALLER");
        let j = r.to_json();
        assert_eq!(j["schema"], 1);
        assert_eq!(j["verdict"], "PASS");
    }
}
