use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use pseudofinite::corpus::{self, check, CheckOutcome, DEFAULT_SEED};
use pseudofinite::gms::{build_chain, verify_chain_with_budget, ChainKind, DEFAULT_NMAX};
use pseudofinite::logic::{
    dnf, parse_formula, AnyFormula, Formula, LiteralConjunction, PairAtom, PairFormula, Signature, StarFormula, Var,
    DEFAULT_DNF_CAP,
};
use pseudofinite::models::audit::{audit_pair, audit_tree, AuditMode};
use pseudofinite::models::table::{eval_table, qf_table, tuple_of};
use pseudofinite::models::{
    build_model_with_budget, AnyModel, Env, FamilySpec, IntervalModel, ModelError, Structure,
    DEFAULT_BUDGET,
};
use pseudofinite::qe_pair::{polycard_literals, qe_pair, qe_star, resolve_ground};
use pseudofinite::{eliminate_quantifiers, Theory};

use crate::config::{pick, ExperimentConfig};
use crate::{Cli, Command};

struct Ctx {
    cfg: ExperimentConfig,
    out: Option<std::path::PathBuf>,
    budget: usize,
    json: bool,
}

impl Ctx {
    fn need<T: Clone>(&self, flag: &Option<T>, cfg: &Option<T>, name: &str) -> Result<T, String> {
        pick(flag, cfg).ok_or_else(|| format!("--{name} is required"))
    }

    /// Prints the summary or the JSON report and writes the report file.
    fn emit(&self, report: Value, summary: &str) -> Result<(), String> {
        if self.json {
            println!("{}", serde_json::to_string_pretty(&report).expect("json"));
        } else {
            println!("{summary}");
        }
        if let Some(p) = &self.out {
            write_file(p, |f| writeln!(f, "{}", serde_json::to_string_pretty(&report).expect("json")).map_err(|e| e.to_string()))?;
        }
        Ok(())
    }
}

fn write_file(p: &Path, body: impl FnOnce(&mut File) -> Result<(), String>) -> Result<(), String> {
    let mut f = File::create(p).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    body(&mut f)
}

pub fn run(cli: &Cli) -> Result<bool, String> {
    let cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let ctx = Ctx {
        out: pick(&cli.out, &cfg.out),
        budget: pick(&cli.budget, &cfg.budget).unwrap_or(DEFAULT_BUDGET),
        json: cli.json || cfg.json.unwrap_or(false),
        cfg,
    };
    match &cli.cmd {
        Command::Build { model } => build(&ctx, &ctx.need(model, &ctx.cfg.model, "model")?),
        Command::Count { model, formula, params } => count(
            &ctx,
            &ctx.need(model, &ctx.cfg.model, "model")?,
            &ctx.need(formula, &ctx.cfg.formula, "formula")?,
            pick(params, &ctx.cfg.params),
        ),
        Command::Qe { theory, formula, check_models } => qe(
            &ctx,
            &ctx.need(theory, &ctx.cfg.theory, "theory")?,
            &ctx.need(formula, &ctx.cfg.formula, "formula")?,
            models_or(check_models, &ctx.cfg.check_models),
        ),
        Command::Polycard { formula, var, check_models } => polycard(
            &ctx,
            &ctx.need(formula, &ctx.cfg.formula, "formula")?,
            pick(var, &ctx.cfg.var),
            models_or(check_models, &ctx.cfg.check_models),
        ),
        Command::Chain { kind, depth, sweep, nmax } => chain(
            &ctx,
            &ctx.need(kind, &ctx.cfg.kind, "kind")?,
            pick(depth, &ctx.cfg.depth).unwrap_or(3),
            pick(sweep, &ctx.cfg.sweep),
            pick(nmax, &ctx.cfg.nmax).unwrap_or(DEFAULT_NMAX),
        ),
        Command::Star { formula, max_len } => star(&ctx, &ctx.need(formula, &ctx.cfg.formula, "formula")?, max_len.unwrap_or(12)),
        Command::Corpus { kind, seed, size } => corpus_cmd(
            &ctx,
            &ctx.need(kind, &ctx.cfg.kind, "kind")?,
            pick(seed, &ctx.cfg.seed).unwrap_or(DEFAULT_SEED),
            pick(size, &ctx.cfg.size).unwrap_or(100),
        ),
    }
}

fn models_or(flags: &[String], cfg: &Option<Vec<String>>) -> Vec<String> {
    if flags.is_empty() {
        cfg.clone().unwrap_or_default()
    } else {
        flags.to_vec()
    }
}

fn spec(s: &str) -> Result<FamilySpec, String> {
    s.parse::<FamilySpec>().map_err(|e| e.to_string())
}

fn model(ctx: &Ctx, s: &str) -> Result<AnyModel, String> {
    build_model_with_budget(spec(s)?, ctx.budget).map_err(|e| e.to_string())
}

fn build(ctx: &Ctx, s: &str) -> Result<bool, String> {
    let m = model(ctx, s)?;
    let audit = match &m {
        AnyModel::String(sm) if sm.n() <= 3 => Some(audit_tree(sm, AuditMode::Exhaustive)),
        AnyModel::String(sm) => Some(audit_tree(sm, AuditMode::Sampled { instances: 20_000, seed: DEFAULT_SEED })),
        AnyModel::Pair(pm) => Some(audit_pair(pm)),
        _ => None,
    };
    let passed = audit.as_ref().is_none_or(|a| a.passed());
    let mut summary = format!("{}: {} elements", m.spec(), m.size());
    if let Some(a) = &audit {
        summary.push_str(&format!(", {} axiom instances, {}", a.instances, if a.passed() { "all hold" } else { "FAILED" }));
        for f in &a.failures {
            summary.push_str(&format!("\n  {f}"));
        }
    }
    let report = json!({
        "schema": 1,
        "command": "build",
        "model": m.spec().to_string(),
        "size": m.size(),
        "audit": audit.as_ref().map(|a| json!({"instances": a.instances, "failures": a.failures, "passed": a.passed()})),
    });
    ctx.emit(report, &summary)?;
    Ok(passed)
}

fn parse_params(text: Option<String>) -> Result<Vec<(Var, usize)>, String> {
    let Some(text) = text else { return Ok(Vec::new()) };
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (v, e) = p.split_once('=').ok_or_else(|| format!("bad parameter {p:?}; expected name=element"))?;
            let e = e.trim().parse().map_err(|_| format!("bad element in {p:?}"))?;
            Ok((Var::new(v.trim()), e))
        })
        .collect()
}

fn count(ctx: &Ctx, s: &str, text: &str, params: Option<String>) -> Result<bool, String> {
    let m = model(ctx, s)?;
    let f = AnyFormula::parse(text, m.spec().signature()).map_err(|e| e.to_string())?;
    let params = parse_params(params)?;
    let env = Env::of(&params);
    let mut target: Vec<Var> = f.free_vars().into_iter().filter(|v| env.get(*v).is_none()).collect();
    target.sort();
    if target.is_empty() {
        return Err("every free variable is a parameter; nothing to count".into());
    }
    let c = m.count(&f, &env, &target).map_err(|e| e.to_string())?;
    let report = json!({
        "schema": 1,
        "command": "count",
        "model": m.spec().to_string(),
        "formula": f.to_string(),
        "target": target.iter().map(|v| v.name()).collect::<Vec<_>>(),
        "count": c.to_string(),
    });
    ctx.emit(report, &c.to_string())?;
    Ok(true)
}

/// Truth tables of f and q over vars: tuples compared and the first mismatch.
fn agree<S: Structure>(m: &S, f: &Formula<S::Atom>, q: &Formula<S::Atom>, vars: &[Var]) -> Result<(u64, Option<String>), ModelError> {
    let want = eval_table(m, f, vars)?;
    let got = qf_table(m, q, vars)?;
    let bad = (0..want.len()).find(|&i| want[i] != got[i]).map(|i| {
        let t = tuple_of(m.size(), vars.len(), i);
        let at: Vec<String> = vars.iter().zip(&t).map(|(v, e)| format!("{v}={e}")).collect();
        format!("{} on {}: input {}, output {}", at.join(" "), m.spec(), want[i], got[i])
    });
    Ok((want.len() as u64, bad))
}

struct Checks {
    rows: Vec<Value>,
    lines: Vec<String>,
    ok: bool,
}

impl Checks {
    fn new() -> Self {
        Checks { rows: Vec::new(), lines: Vec::new(), ok: true }
    }

    fn skip(&mut self, model: &str, why: &str) {
        self.lines.push(format!("  {model}: skipped ({why})"));
        self.rows.push(json!({"model": model, "skipped": why}));
    }

    fn record(&mut self, model: &str, r: Result<(u64, Option<String>), ModelError>) {
        match r {
            Ok((n, bad)) => {
                self.ok &= bad.is_none();
                self.lines.push(match &bad {
                    None => format!("  {model}: {n} tuples agree"),
                    Some(b) => format!("  {model}: MISMATCH {b}"),
                });
                self.rows.push(json!({"model": model, "tuples": n, "mismatch": bad}));
            }
            Err(e) => self.skip(model, &e.to_string()),
        }
    }
}

fn qe(ctx: &Ctx, theory: &str, text: &str, check_models: Vec<String>) -> Result<bool, String> {
    let theory: Theory = theory.parse()?;
    let sig = match theory {
        Theory::Tree => Signature::Tree,
        Theory::Pair => Signature::Pair,
        Theory::Star => Signature::Star,
    };
    let f = AnyFormula::parse(text, sig).map_err(|e| e.to_string())?;
    let mut vars = f.free_vars();
    vars.sort();
    let mut checks = Checks::new();
    let mut adequacy = None;
    let q = match &f {
        AnyFormula::Pair(g) => {
            let (q, ad) = qe_pair(g).map_err(|e| e.to_string())?;
            adequacy = Some(ad);
            AnyFormula::Pair(q)
        }
        _ => eliminate_quantifiers(&f, theory).map_err(|e| e.to_string())?,
    };
    let defaults: Vec<&str> = match theory {
        Theory::Tree => vec!["string:3", "string:4"],
        Theory::Pair => vec!["pair:3,2", "pair:3,3", "pair:4,2"],
        Theory::Star => vec!["interval:1", "interval:2", "interval:4", "interval:6", "interval:8", "interval:10"],
    };
    let models = if check_models.is_empty() { defaults.iter().map(|s| s.to_string()).collect() } else { check_models };
    for ms in &models {
        let sp = spec(ms)?;
        if let (Some(ad), FamilySpec::Pair(n, m)) = (adequacy, sp) {
            if !ad.admits(n, m) {
                checks.skip(ms, &format!("output exact only for {ad}"));
                continue;
            }
        }
        let m = match build_model_with_budget(sp, ctx.budget) {
            Ok(m) => m,
            Err(e) => return Err(e.to_string()),
        };
        let r = match (&m, &f, &q) {
            (AnyModel::String(m), AnyFormula::Tree(f), AnyFormula::Tree(q)) => agree(m, f, q, &vars),
            (AnyModel::Pair(m), AnyFormula::Pair(f), AnyFormula::Pair(q)) => agree(m, f, q, &vars),
            (AnyModel::Interval(m), AnyFormula::Star(f), AnyFormula::Star(q)) => agree(m, f, q, &vars),
            _ => return Err(format!("{ms} is not a model of the {theory} theory")),
        };
        checks.record(ms, r);
    }
    let mut summary = format!("{q}\nbrute-force check:");
    for l in &checks.lines {
        summary.push('\n');
        summary.push_str(l);
    }
    summary.push_str(if checks.ok { "\nPASS" } else { "\nFAIL" });
    let report = json!({
        "schema": 1,
        "command": "qe",
        "theory": theory.to_string(),
        "input": f.to_string(),
        "output": q.to_string(),
        "adequacy": adequacy.map(|a| json!({"min_n": a.min_n, "min_class": a.min_class})),
        "checks": checks.rows,
        "verdict": if checks.ok { "PASS" } else { "FAIL" },
    });
    ctx.emit(report, &summary)?;
    Ok(checks.ok)
}

fn conjunction(text: &str, var: Option<String>) -> Result<LiteralConjunction<PairAtom>, String> {
    let f: PairFormula = parse_formula(text).map_err(|e| e.to_string())?;
    let (x, body) = match (&f, var) {
        (Formula::Exists(v, b), None) => (*v, (**b).clone()),
        (_, Some(v)) => (Var::new(&v), f.clone()),
        (_, None) => (Var::new("x"), f.clone()),
    };
    let mut clauses = dnf(&body, DEFAULT_DNF_CAP).map_err(|e| e.to_string())?;
    if clauses.len() != 1 {
        return Err(format!("expected a conjunction of literals, found {} disjuncts", clauses.len()));
    }
    Ok(LiteralConjunction::from_literals(&clauses.remove(0)).with_distinguished(x))
}

fn outcome_json(model: &str, o: &CheckOutcome) -> Value {
    json!({"model": model, "tuples": o.checked, "skipped": o.skipped, "failures": o.failures})
}

fn polycard(ctx: &Ctx, text: &str, var: Option<String>, check_models: Vec<String>) -> Result<bool, String> {
    let lc = conjunction(text, var)?;
    let def = polycard_literals(&lc).map_err(|e| e.to_string())?;
    let models = if check_models.is_empty() {
        vec!["pair:3,2".to_string(), "pair:3,3".into(), "pair:4,2".into()]
    } else {
        check_models
    };
    let mut ok = true;
    let mut rows = Vec::new();
    let mut summary = format!("{def}\nbrute-force check:");
    for ms in &models {
        let FamilySpec::Pair(n, m) = spec(ms)? else {
            return Err(format!("{ms} is not a pairing model"));
        };
        build_model_with_budget(FamilySpec::Pair(n, m), ctx.budget).map_err(|e| e.to_string())?;
        let o = check::check_polycard(&lc, n, m).map_err(|e| e.to_string())?;
        ok &= o.passed();
        summary.push_str(&format!("\n  {ms}: {} tuples agree, {} skipped", o.checked - o.failures.len() as u64, o.skipped));
        for f in &o.failures {
            summary.push_str(&format!("\n  MISMATCH {f}"));
        }
        rows.push(outcome_json(ms, &o));
    }
    summary.push_str(if ok { "\nPASS" } else { "\nFAIL" });
    let mut report = def.to_json();
    report["schema"] = 1.into();
    report["command"] = "polycard".into();
    report["input"] = lc.to_formula().to_string().into();
    report["checks"] = rows.into();
    report["verdict"] = (if ok { "PASS" } else { "FAIL" }).into();
    ctx.emit(report, &summary)?;
    Ok(ok)
}

fn parse_sweep(kind: ChainKind, text: Option<String>) -> Result<Vec<FamilySpec>, String> {
    let Some(text) = text else { return Ok(kind.default_sweep()) };
    text.split(',')
        .map(|p| {
            let p = p.trim();
            let num = |s: &str| s.trim().parse::<u32>().map_err(|_| format!("bad sweep point {p:?}"));
            match kind {
                ChainKind::SaTree => Ok(FamilySpec::String(num(p)?)),
                ChainKind::AEqclass => Ok(FamilySpec::EqClass(num(p)?)),
                ChainKind::APair => {
                    let (n, m) = p.split_once(':').ok_or_else(|| format!("a_pair sweep points are n:m, got {p:?}"))?;
                    Ok(FamilySpec::Pair(num(n)?, num(m)?))
                }
            }
        })
        .collect()
}

fn chain(ctx: &Ctx, kind: &str, depth: usize, sweep: Option<String>, nmax: u32) -> Result<bool, String> {
    let kind: ChainKind = kind.parse()?;
    let sweep = parse_sweep(kind, sweep)?;
    let c = build_chain(kind, depth, &sweep).map_err(|e| e.to_string())?;
    let r = verify_chain_with_budget(&c, nmax, ctx.budget).map_err(|e| e.to_string())?;
    if ctx.json {
        println!("{}", serde_json::to_string_pretty(&r.to_json()).expect("json"));
    } else {
        r.write_csv(std::io::stdout()).map_err(|e| e.to_string())?;
        for bad in &r.counterexamples {
            println!("counterexample: {bad}");
        }
        println!("{}", r.verdict());
    }
    if let Some(p) = &ctx.out {
        if p.extension().is_some_and(|e| e == "json") {
            write_file(p, |f| writeln!(f, "{}", serde_json::to_string_pretty(&r.to_json()).expect("json")).map_err(|e| e.to_string()))?;
        } else {
            write_file(p, |f| r.write_csv(f).map_err(|e| e.to_string()))?;
        }
    }
    Ok(r.passed)
}

fn star(ctx: &Ctx, text: &str, max_len: u32) -> Result<bool, String> {
    let f: StarFormula = parse_formula(text).map_err(|e| e.to_string())?;
    let q = qe_star(&f).map_err(|e| e.to_string())?;
    let (resolved, min_len) = resolve_ground(&q);
    let mut vars = f.free_vars();
    vars.sort();
    let mut checks = Checks::new();
    for len in 0..=max_len {
        let m = IntervalModel::new(len);
        let name = format!("interval:{len}");
        checks.record(&name, agree(&m, &f, &q, &vars));
        if len >= min_len {
            checks.record(&format!("{name} (resolved)"), agree(&m, &f, &resolved, &vars));
        }
    }
    let mut summary = format!("{q}\nfrom length {min_len}: {resolved}\nbrute-force check:");
    for l in &checks.lines {
        summary.push('\n');
        summary.push_str(l);
    }
    summary.push_str(if checks.ok { "\nPASS" } else { "\nFAIL" });
    let report = json!({
        "schema": 1,
        "command": "star",
        "input": f.to_string(),
        "output": q.to_string(),
        "resolved": resolved.to_string(),
        "resolved_min_len": min_len,
        "checks": checks.rows,
        "verdict": if checks.ok { "PASS" } else { "FAIL" },
    });
    ctx.emit(report, &summary)?;
    Ok(checks.ok)
}

struct CorpusRow {
    formula: String,
    outcome: CheckOutcome,
}

fn corpus_cmd(ctx: &Ctx, kind: &str, seed: u64, size: usize) -> Result<bool, String> {
    let run = |f: String, checks: Vec<Result<CheckOutcome, corpus::CheckError>>| -> Result<CorpusRow, String> {
        let mut outcome = CheckOutcome::default();
        for c in checks {
            outcome.merge(c.map_err(|e| format!("{f}: {e}"))?);
        }
        Ok(CorpusRow { formula: f, outcome })
    };
    let rows: Vec<CorpusRow> = match kind {
        "tree" => corpus::tree_conjunctions(seed, size)
            .iter()
            .map(|lc| run(lc.to_formula().to_string(), vec![check::check_tree_elimination(lc, 4), check::check_tree_elimination(lc, 5)]))
            .collect::<Result<_, _>>()?,
        "pair" => corpus::pair_conjunctions(seed, size)
            .iter()
            .map(|lc| run(lc.to_formula().to_string(), vec![check::check_pair_elimination(lc, 3, 3), check::check_pair_elimination(lc, 4, 2)]))
            .collect::<Result<_, _>>()?,
        "polycard" => corpus::link_conjunctions(seed, size)
            .iter()
            .map(|lc| {
                let checks = [(3, 2), (3, 3), (4, 2)].iter().map(|&(n, m)| check::check_polycard(lc, n, m)).collect();
                run(lc.to_formula().to_string(), checks)
            })
            .collect::<Result<_, _>>()?,
        "star" => corpus::star_formulas(seed, size)
            .iter()
            .map(|f| run(f.to_string(), vec![check::check_star(f, check::star_min_len(f)..=12)]))
            .collect::<Result<_, _>>()?,
        "equiv" => corpus::equivalence_formulas(seed, size)
            .iter()
            .map(|f| run(f.to_string(), vec![check::check_translation(f, 3, 2)]))
            .collect::<Result<_, _>>()?,
        _ => return Err(format!("unknown corpus kind {kind:?}; expected tree, pair, polycard, star or equiv")),
    };
    let failed = rows.iter().filter(|r| !r.outcome.passed()).count();
    let tuples: u64 = rows.iter().map(|r| r.outcome.checked).sum();
    let ok = failed == 0;
    let summary = format!(
        "{kind} corpus, seed {seed}: {} formulas, {tuples} tuples checked, {failed} failing\n{}",
        rows.len(),
        if ok { "PASS" } else { "FAIL" }
    );
    if ctx.json {
        let report = json!({
            "schema": 1,
            "command": "corpus",
            "kind": kind,
            "seed": seed,
            "items": rows.iter().map(|r| json!({
                "formula": r.formula,
                "tuples": r.outcome.checked,
                "skipped": r.outcome.skipped,
                "failures": r.outcome.failures,
            })).collect::<Vec<_>>(),
            "verdict": if ok { "PASS" } else { "FAIL" },
        });
        println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    } else {
        println!("{summary}");
        for r in rows.iter().filter(|r| !r.outcome.passed()) {
            println!("  {}: {:?}", r.formula, r.outcome.failures);
        }
    }
    if let Some(p) = &ctx.out {
        write_file(p, |f| {
            let mut w = csv::Writer::from_writer(f);
            let io = |e: csv::Error| e.to_string();
            w.write_record(["index", "formula", "tuples", "skipped", "failures", "first_failure"]).map_err(io)?;
            for (i, r) in rows.iter().enumerate() {
                w.write_record([
                    i.to_string(),
                    r.formula.clone(),
                    r.outcome.checked.to_string(),
                    r.outcome.skipped.to_string(),
                    r.outcome.failures.len().to_string(),
                    r.outcome.failures.first().cloned().unwrap_or_default(),
                ])
                .map_err(io)?;
            }
            w.flush().map_err(|e| e.to_string())
        })?;
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweeps() {
        assert_eq!(parse_sweep(ChainKind::SaTree, Some("3,4".into())).unwrap(), vec![FamilySpec::String(3), FamilySpec::String(4)]);
        assert_eq!(parse_sweep(ChainKind::APair, Some("4:2, 4:3".into())).unwrap(), vec![FamilySpec::Pair(4, 2), FamilySpec::Pair(4, 3)]);
        assert!(parse_sweep(ChainKind::APair, Some("4".into())).is_err());
        assert_eq!(parse_sweep(ChainKind::AEqclass, None).unwrap(), ChainKind::AEqclass.default_sweep());
    }

    #[test]
    fn params() {
        assert_eq!(parse_params(Some("y=3, z=0".into())).unwrap(), vec![(Var::new("y"), 3), (Var::new("z"), 0)]);
        assert!(parse_params(Some("y3".into())).is_err());
        assert!(parse_params(None).unwrap().is_empty());
    }

    #[test]
    fn conjunctions() {
        let lc = conjunction(r#"(exists x (and (= (app "f" x) y) (not (Cfin 0 x))))"#, None).unwrap();
        assert_eq!(lc.distinguished, Some(Var::new("x")));
        assert_eq!(lc.len(), 2);
        assert!(conjunction("(or (Cfin 0 x) (Cinit 0 x))", None).is_err());
    }
}
