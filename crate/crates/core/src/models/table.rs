//! Truth tables over parameter tuples, computed one row at a time.
//!
//! A table for variables (y1..yp) is a bit vector of length N^p in
//! lexicographic tuple order. Rows run over the last variable with the
//! earlier ones fixed, so atoms are evaluated through `Structure::fill_row`.

use std::collections::HashMap;

use bitvec::prelude::*;

use super::{for_each_tuple, Elem, Env, ModelError, Row, Structure};
use crate::logic::{Atom, Formula, LiteralConjunction, Var};

/// Largest table this module will allocate, in bits.
pub const TABLE_LIMIT: u128 = 1 << 32;

fn filled(n: usize, b: bool) -> Row {
    bitvec![u64, Lsb0; b as u64; n]
}

/// Row of an atom along `v`.
pub fn atom_row<S: Structure>(m: &S, a: &S::Atom, env: &Env, v: Var) -> Row {
    if !a.mentions(v) {
        return filled(m.size(), m.holds(a, env));
    }
    let mut row = filled(m.size(), false);
    m.fill_row(a, env, v, &mut row);
    row
}

/// Row of a quantifier-free formula along `v`. Rows of atoms that mention
/// only `v` are cached.
pub fn qf_row<S: Structure>(
    m: &S,
    f: &Formula<S::Atom>,
    env: &Env,
    v: Var,
    cache: &mut HashMap<S::Atom, Row>,
) -> Row {
    match f {
        Formula::Atom(a) => {
            if a.mentions(v) && a.vars().iter().all(|w| *w == v) {
                cache.entry(a.clone()).or_insert_with(|| atom_row(m, a, env, v)).clone()
            } else {
                atom_row(m, a, env, v)
            }
        }
        Formula::Not(g) => !qf_row(m, g, env, v, cache),
        Formula::And(gs) => {
            let mut acc = filled(m.size(), true);
            for g in gs {
                if acc.not_any() {
                    break;
                }
                acc &= qf_row(m, g, env, v, cache);
            }
            acc
        }
        Formula::Or(gs) => {
            let mut acc = filled(m.size(), false);
            for g in gs {
                if acc.all() {
                    break;
                }
                acc |= qf_row(m, g, env, v, cache);
            }
            acc
        }
        Formula::Exists(..) | Formula::Forall(..) => panic!("qf_row needs a quantifier-free formula"),
    }
}

fn check_size(n: usize, p: usize) -> Result<(), ModelError> {
    let bits = (n as u128).checked_pow(p as u32).unwrap_or(u128::MAX);
    if bits > TABLE_LIMIT {
        return Err(ModelError::Invalid(format!("table of {n}^{p} entries is too large")));
    }
    Ok(())
}

/// Truth table of a quantifier-free formula over `vars`.
pub fn qf_table<S: Structure>(m: &S, f: &Formula<S::Atom>, vars: &[Var]) -> Result<Row, ModelError> {
    if !f.is_quantifier_free() {
        return Err(ModelError::Invalid("formula has quantifiers".into()));
    }
    for v in f.free_vars() {
        if !vars.contains(&v) {
            return Err(ModelError::Unassigned(v.name()));
        }
    }
    let n = m.size();
    check_size(n, vars.len())?;
    let mut cache = HashMap::new();
    let Some((&last, prefix)) = vars.split_last() else {
        let mut env = Env::new();
        return Ok(bitvec![u64, Lsb0; super::sat(m, f, &mut env) as u64; 1]);
    };
    let mut table = Row::with_capacity(n.pow(vars.len() as u32));
    let mut env = Env::new();
    for_each_tuple(n, prefix.len(), |t| {
        for (v, e) in prefix.iter().zip(t) {
            env.set(*v, *e);
        }
        table.extend_from_bitslice(&qf_row(m, f, &env, last, &mut cache));
    });
    Ok(table)
}

/// Truth table of an arbitrary formula by direct evaluation.
pub fn eval_table<S: Structure>(m: &S, f: &Formula<S::Atom>, vars: &[Var]) -> Result<Row, ModelError> {
    if f.is_quantifier_free() {
        return qf_table(m, f, vars);
    }
    for v in f.free_vars() {
        if !vars.contains(&v) {
            return Err(ModelError::Unassigned(v.name()));
        }
    }
    check_size(m.size(), vars.len())?;
    let mut table = Row::new();
    let mut env = Env::new();
    for_each_tuple(m.size(), vars.len(), |t| {
        for (v, e) in vars.iter().zip(t) {
            env.set(*v, *e);
        }
        table.push(super::sat(m, f, &mut env));
    });
    Ok(table)
}

/// The x-solutions contributed by one parameter value.
struct XSet {
    row: Row,
    /// Set members when there are few of them.
    small: Option<Vec<u32>>,
}

const SMALL: usize = 8;

impl XSet {
    fn new(row: Row) -> Self {
        let c = row.count_ones();
        let small = (c <= SMALL).then(|| row.iter_ones().map(|i| i as u32).collect());
        XSet { row, small }
    }
}

fn words(r: &Row) -> &[u64] {
    r.as_raw_slice()
}

/// Rows built by this module keep their unused tail bits clear, so raw word
/// operations are exact.
fn intersects(p: &Row, s: &XSet) -> bool {
    match &s.small {
        Some(v) => v.iter().any(|&i| p[i as usize]),
        None => words(p).iter().zip(words(&s.row)).any(|(a, b)| a & b != 0),
    }
}

fn inter_count(p: &Row, s: &XSet) -> usize {
    match &s.small {
        Some(v) => v.iter().filter(|&&i| p[i as usize]).count(),
        None => words(p)
            .iter()
            .zip(words(&s.row))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum(),
    }
}

fn and_rows(a: &Row, b: &Row) -> Row {
    let mut out = a.clone();
    for (x, y) in out.as_raw_mut_slice().iter_mut().zip(words(b)) {
        *x &= *y;
    }
    out
}

/// A literal conjunction in x, with each literal mentioning at most one
/// parameter, prepared for exhaustive existence and counting queries.
pub struct Factored<'a, S: Structure> {
    m: &'a S,
    params: Vec<Var>,
    base: Row,
    /// Per parameter: `None` when no literal mentions it, else one set per value.
    sets: Vec<Option<Vec<XSet>>>,
}

impl<'a, S: Structure> Factored<'a, S> {
    pub fn new(m: &'a S, x: Var, lc: &LiteralConjunction<S::Atom>, params: &[Var]) -> Result<Self, ModelError> {
        let n = m.size();
        let mut base = filled(n, true);
        let mut per: Vec<Vec<(S::Atom, bool)>> = vec![Vec::new(); params.len()];
        for l in lc.literals() {
            let others: Vec<Var> = l.atom.vars().into_iter().filter(|v| *v != x).collect();
            match others.first() {
                None => {
                    let r = atom_row(m, &l.atom, &Env::new(), x);
                    if l.positive {
                        base &= r;
                    } else {
                        base &= !r;
                    }
                }
                Some(y) => {
                    if others.iter().any(|w| w != y) {
                        return Err(ModelError::Invalid(format!("literal {:?} mentions two parameters", l.atom)));
                    }
                    let i = params
                        .iter()
                        .position(|p| p == y)
                        .ok_or_else(|| ModelError::Unassigned(y.name()))?;
                    per[i].push((l.atom.clone(), l.positive));
                }
            }
        }
        // keep tail bits clear for the word-level operations
        base = base.iter().by_vals().collect();
        let mut sets = Vec::new();
        for (i, lits) in per.iter().enumerate() {
            if lits.is_empty() {
                sets.push(None);
                continue;
            }
            let mut v = Vec::with_capacity(n);
            let mut env = Env::new();
            for b in 0..n {
                env.set(params[i], b);
                let mut row = filled(n, true);
                for (a, pos) in lits {
                    if row.not_any() {
                        break;
                    }
                    let r = atom_row(m, a, &env, x);
                    if *pos {
                        row &= r;
                    } else {
                        row &= !r;
                    }
                }
                let row: Row = row.iter().by_vals().collect();
                v.push(XSet::new(row));
            }
            sets.push(Some(v));
        }
        Ok(Factored { m, params: params.to_vec(), base, sets })
    }

    fn narrow(&self, p: &Row, i: usize, b: Elem) -> Row {
        match &self.sets[i] {
            None => p.clone(),
            Some(v) => and_rows(p, &v[b].row),
        }
    }

    /// Solutions for x after fixing the given leading parameters.
    pub fn partial(&self, prefix: &[Elem]) -> Row {
        let mut p = self.base.clone();
        for (i, &b) in prefix.iter().enumerate() {
            p = self.narrow(&p, i, b);
        }
        p
    }

    pub fn exists_at(&self, t: &[Elem]) -> bool {
        self.partial(t).any()
    }

    pub fn count_at(&self, t: &[Elem]) -> usize {
        self.partial(t).count_ones()
    }

    /// Existence along the last parameter for a fixed prefix.
    pub fn exists_row(&self, prefix: &[Elem]) -> Row {
        let p = self.partial(prefix);
        self.last_row(&p)
    }

    fn last_row(&self, p: &Row) -> Row {
        let n = self.m.size();
        let i = self.params.len() - 1;
        if p.not_any() {
            return filled(n, false);
        }
        match &self.sets[i] {
            None => filled(n, true),
            Some(v) => v.iter().map(|s| intersects(p, s)).collect(),
        }
    }

    fn last_counts(&self, p: &Row, out: &mut Vec<u32>) {
        let n = self.m.size();
        let i = self.params.len() - 1;
        let c = p.count_ones() as u32;
        match &self.sets[i] {
            _ if c == 0 => out.extend(std::iter::repeat(0).take(n)),
            None => out.extend(std::iter::repeat(c).take(n)),
            Some(v) => out.extend(v.iter().map(|s| inter_count(p, s) as u32)),
        }
    }

    /// Table of ∃x over all parameter tuples.
    pub fn exists_table(&self) -> Result<Row, ModelError> {
        let n = self.m.size();
        check_size(n, self.params.len())?;
        if self.params.is_empty() {
            return Ok(bitvec![u64, Lsb0; self.base.any() as u64; 1]);
        }
        let mut out = Row::with_capacity(n.pow(self.params.len() as u32));
        self.rec_exists(0, &self.base, &mut out);
        Ok(out)
    }

    fn rec_exists(&self, level: usize, p: &Row, out: &mut Row) {
        let n = self.m.size();
        if level + 1 == self.params.len() {
            out.extend_from_bitslice(&self.last_row(p));
            return;
        }
        let block = n.pow((self.params.len() - 1 - level) as u32);
        for b in 0..n {
            let q = self.narrow(p, level, b);
            if q.not_any() {
                out.resize(out.len() + block, false);
            } else {
                self.rec_exists(level + 1, &q, out);
            }
        }
    }

    /// Fiber sizes over all parameter tuples.
    pub fn count_table(&self) -> Result<Vec<u32>, ModelError> {
        let n = self.m.size();
        check_size(n, self.params.len())?;
        if self.params.is_empty() {
            return Ok(vec![self.base.count_ones() as u32]);
        }
        let mut out = Vec::with_capacity(n.pow(self.params.len() as u32));
        self.rec_count(0, &self.base, &mut out);
        Ok(out)
    }

    fn rec_count(&self, level: usize, p: &Row, out: &mut Vec<u32>) {
        let n = self.m.size();
        if level + 1 == self.params.len() {
            self.last_counts(p, out);
            return;
        }
        let block = n.pow((self.params.len() - 1 - level) as u32);
        for b in 0..n {
            let q = self.narrow(p, level, b);
            if q.not_any() {
                out.extend(std::iter::repeat(0).take(block));
            } else {
                self.rec_count(level + 1, &q, out);
            }
        }
    }
}

/// Decodes a table index into a tuple.
pub fn tuple_of(n: usize, arity: usize, mut idx: usize) -> Vec<Elem> {
    let mut t = vec![0; arity];
    for i in (0..arity).rev() {
        t[i] = idx % n;
        idx /= n;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, Formula, Literal, TreeAtom};
    use crate::models::{eval, StringModel};

    #[test]
    fn qf_table_agrees_with_eval() {
        let m = StringModel::new(3);
        let f: Formula<TreeAtom> = parse_formula("(or (B \"0\" \"1\" y z) (and (U \"2\" y) (not (= y z))))").unwrap();
        let (y, z) = (Var::new("y"), Var::new("z"));
        let t = qf_table(&m, &f, &[y, z]).unwrap();
        for i in 0..t.len() {
            let tu = tuple_of(m.size(), 2, i);
            assert_eq!(t[i], eval(&m, &f, &Env::of(&[(y, tu[0]), (z, tu[1])])).unwrap());
        }
    }

    #[test]
    fn factored_counts_agree_with_enumeration() {
        let m = StringModel::new(3);
        let (x, y, z) = (Var::new("x"), Var::new("y"), Var::new("z"));
        let lc = LiteralConjunction::from_literals(&[
            Literal::pos(TreeAtom::u("0", x)),
            Literal::neg(TreeAtom::b("0", "1", x, y)),
            Literal::neg(TreeAtom::b("00", "00", x, z)),
        ]);
        let fac = Factored::new(&m, x, &lc, &[y, z]).unwrap();
        let counts = fac.count_table().unwrap();
        let ex = fac.exists_table().unwrap();
        let body = lc.to_formula();
        for i in 0..counts.len() {
            let tu = tuple_of(m.size(), 2, i);
            let mut c = 0;
            for xv in 0..m.size() {
                if eval(&m, &body, &Env::of(&[(y, tu[0]), (z, tu[1]), (x, xv)])).unwrap() {
                    c += 1;
                }
            }
            assert_eq!(counts[i], c);
            assert_eq!(ex[i], c > 0);
        }
    }
}
