//! Axiom audits: every axiom instance whose strings and indices fit the model
//! parameters is evaluated directly on the structure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{PairModel, Structure, StringModel};
use crate::logic::DigitString;

#[derive(Debug, Clone, Default, Serialize)]
pub struct AuditReport {
    pub instances: usize,
    pub failures: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum AuditMode {
    Exhaustive,
    Sampled { instances: usize, seed: u64 },
}

fn strings_up_to(n: u32, max_len: usize) -> Vec<Vec<DigitString>> {
    let mut by_len = vec![vec![DigitString::empty()]];
    for l in 1..=max_len {
        let mut next = Vec::new();
        for s in &by_len[l - 1] {
            for d in 0..n {
                let mut v = s.0.clone();
                v.push(d);
                next.push(DigitString(v));
            }
        }
        by_len.push(next);
    }
    by_len
}

fn ext(s: &DigitString, i: u32) -> DigitString {
    s.concat(&DigitString(vec![i]))
}

/// Axioms (a)-(h) of the tree theory on a string model.
pub fn audit_tree(m: &StringModel, mode: AuditMode) -> AuditReport {
    match mode {
        AuditMode::Exhaustive => audit_tree_exhaustive(m),
        AuditMode::Sampled { instances, seed } => audit_tree_sampled(m, instances, seed),
    }
}

fn audit_tree_exhaustive(m: &StringModel) -> AuditReport {
    let n = m.n();
    let nn = m.size();
    let by_len = strings_up_to(n, n as usize);
    let all: Vec<&DigitString> = by_len.iter().flatten().collect();
    let mut r = AuditReport::default();
    let eps = DigitString::empty();
    r.check((0..nn).all(|a| m.u(&eps, a)), || "(a)".into());
    for s in &all {
        r.check((0..nn).any(|a| m.u(s, a)), || format!("(b) {s}"));
    }
    for s in &all {
        for t in &all {
            if s.is_prefix_of(t) {
                r.check((0..nn).all(|a| !m.u(t, a) || m.u(s, a)), || format!("(c) {s} {t}"));
            }
        }
    }
    for s in by_len.iter().take(n as usize).flatten() {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let (a, b) = (ext(s, i), ext(s, j));
                    r.check((0..nn).all(|e| !(m.u(&a, e) && m.u(&b, e))), || format!("(d) {s} {i} {j}"));
                }
            }
        }
    }
    for level in &by_len {
        for s in level {
            for t in level {
                let mut ok = true;
                let mut out_deg = vec![0u32; nn];
                let mut in_deg = vec![0u32; nn];
                for a in 0..nn {
                    for b in 0..nn {
                        let h = m.b(s, t, a, b);
                        if h {
                            ok &= m.u(s, a) && m.u(t, b);
                            out_deg[a] += 1;
                            in_deg[b] += 1;
                        }
                        if h != m.b(t, s, b, a) {
                            ok = false;
                        }
                    }
                }
                for e in 0..nn {
                    if m.u(s, e) && out_deg[e] != 1 || m.u(t, e) && in_deg[e] != 1 {
                        ok = false;
                    }
                }
                r.check(ok, || format!("(e)/(f) {s} {t}"));
                for rho in level {
                    let mut ok = true;
                    for x in 0..nn {
                        for y in 0..nn {
                            if m.b(s, t, x, y) {
                                for z in 0..nn {
                                    if m.b(t, rho, y, z) && !m.b(s, rho, x, z) {
                                        ok = false;
                                    }
                                }
                            }
                        }
                    }
                    r.check(ok, || format!("(g) {s} {t} {rho}"));
                }
            }
        }
    }
    for level in by_len.iter().take(n as usize) {
        for s in level {
            for t in level {
                for i in 0..n {
                    let (si, ti) = (ext(s, i), ext(t, i));
                    let mut ok = true;
                    for x in m.u_range(&si) {
                        for y in m.u_range(t) {
                            ok &= m.b(s, t, x, y) == (m.u(&ti, y) && m.b(&si, &ti, x, y));
                        }
                    }
                    r.check(ok, || format!("(h) {s} {t} {i}"));
                }
            }
        }
    }
    r
}

fn random_string(rng: &mut ChaCha8Rng, n: u32, len: usize) -> DigitString {
    DigitString((0..len).map(|_| rng.gen_range(0..n)).collect())
}

fn audit_tree_sampled(m: &StringModel, instances: usize, seed: u64) -> AuditReport {
    let n = m.n();
    let nn = m.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = AuditReport::default();
    let eps = DigitString::empty();
    for _ in 0..instances {
        let len = rng.gen_range(0..=n as usize);
        let s = random_string(&mut rng, n, len);
        let t = random_string(&mut rng, n, len);
        let rho = random_string(&mut rng, n, len);
        let a = rng.gen_range(0..nn);
        r.check(m.u(&eps, a), || "(a)".into());
        r.check(!m.u_range(&s).is_empty(), || format!("(b) {s}"));
        let cut = rng.gen_range(0..=len);
        let pre = DigitString(s.0[..cut].to_vec());
        r.check(!m.u(&s, a) || m.u(&pre, a), || format!("(c) {pre} {s}"));
        if len < n as usize {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i != j {
                r.check(!(m.u(&ext(&s, i), a) && m.u(&ext(&s, j), a)), || format!("(d) {s} {i} {j}"));
            }
        }
        // (e): a random element of U_σ has exactly one partner in U_τ and back
        let x = m.u_range(&s).start + rng.gen_range(0..m.u_range(&s).len());
        let partners = m.u_range(&t).filter(|&y| m.b(&s, &t, x, y)).count();
        r.check(partners == 1, || format!("(e) {s} {t}"));
        let y = m.u_range(&t).start + rng.gen_range(0..m.u_range(&t).len());
        let back = m.u_range(&s).filter(|&x| m.b(&s, &t, x, y)).count();
        r.check(back == 1, || format!("(e) {s} {t}"));
        let b = rng.gen_range(0..nn);
        r.check(!m.b(&s, &t, a, b) || m.u(&s, a) && m.u(&t, b), || format!("(e) {s} {t}"));
        r.check(m.b(&s, &t, a, b) == m.b(&t, &s, b, a), || format!("(f) {s} {t}"));
        if let Some(y) = m.partner(&s, &t, x) {
            if let Some(z) = m.partner(&t, &rho, y) {
                r.check(m.b(&s, &rho, x, z), || format!("(g) {s} {t} {rho}"));
            }
        }
        if len < n as usize {
            let i = rng.gen_range(0..n);
            let (si, ti) = (ext(&s, i), ext(&t, i));
            let x = m.u_range(&si).start + rng.gen_range(0..m.u_range(&si).len());
            let y = if rng.gen_bool(0.5) {
                m.partner(&s, &t, x).unwrap()
            } else {
                m.u_range(&t).start + rng.gen_range(0..m.u_range(&t).len())
            };
            r.check(m.b(&s, &t, x, y) == (m.u(&ti, y) && m.b(&si, &ti, x, y)), || format!("(h) {s} {t} {i}"));
        }
    }
    r
}

/// Axioms (a)-(f) of T_0, plus the instances of (g) for 1 <= k < n, on a
/// pairing model. Axiom (e) is checked as its body states: for x, y outside
/// C_fin, f(x) E f(y) implies x E y. Axiom (g) is read as ¬(f^k(x) E x) for
/// x outside C_fin, since f is the identity on C_fin.
pub fn audit_pair(m: &PairModel) -> AuditReport {
    let nn = m.size();
    let fin = m.fin_class();
    let c = |e: usize| m.class(e);
    let e_rel = |a: usize, b: usize| c(a) == c(b);
    let mut r = AuditReport::default();

    let mut refl = true;
    let mut sym = true;
    let mut trans = true;
    for a in 0..nn {
        refl &= e_rel(a, a);
        for b in 0..nn {
            sym &= e_rel(a, b) == e_rel(b, a);
            if e_rel(a, b) {
                for z in 0..nn {
                    if e_rel(b, z) && !e_rel(a, z) {
                        trans = false;
                    }
                }
            }
        }
    }
    r.check(refl && sym && trans, || "(a) E is an equivalence relation".into());

    let mut ok = true;
    for a in 0..nn {
        for b in 0..nn {
            if e_rel(a, b) {
                ok &= e_rel(m.f(a), m.g(b));
            }
        }
    }
    r.check(ok, || "(b)".into());

    let fixed_f: Vec<usize> = (0..nn).filter(|&a| m.f(a) == a).collect();
    let fixed_g: Vec<usize> = (0..nn).filter(|&a| m.g(a) == a).collect();
    let one_class = |v: &[usize]| !v.is_empty() && v.iter().all(|&a| e_rel(a, v[0])) && (0..nn).filter(|&b| e_rel(b, v[0])).count() == v.len();
    r.check(fixed_f == fixed_g && one_class(&fixed_f), || "(c)".into());

    let mut has_f_pre = vec![false; nn];
    let mut has_g_pre = vec![false; nn];
    for z in 0..nn {
        has_f_pre[m.f(z)] = true;
        has_g_pre[m.g(z)] = true;
    }
    let no_f: Vec<usize> = (0..nn).filter(|&a| !has_f_pre[a]).collect();
    let no_g: Vec<usize> = (0..nn).filter(|&a| !has_g_pre[a]).collect();
    r.check(no_f == no_g && one_class(&no_f), || "(d)".into());

    let mut ok = true;
    for a in 0..nn {
        for b in 0..nn {
            if c(a) != fin && c(b) != fin && e_rel(m.f(a), m.f(b)) {
                ok &= e_rel(a, b);
            }
        }
    }
    r.check(ok, || "(e)".into());

    let mut sols = std::collections::HashMap::<(usize, usize), (usize, usize)>::new();
    for z in 0..nn {
        let entry = sols.entry((m.f(z), m.g(z))).or_default();
        entry.0 += 1;
        if c(z) != fin {
            entry.1 += 1;
        }
    }
    let init_class = c(no_f.first().copied().unwrap_or(0));
    let mut ok = true;
    for a in 0..nn {
        for b in 0..nn {
            if !e_rel(a, b) || c(a) == init_class {
                continue;
            }
            let (all, outside) = sols.get(&(a, b)).copied().unwrap_or((0, 0));
            ok &= if c(a) == fin { outside == 1 } else { all == 1 };
        }
    }
    r.check(ok, || "(f)".into());

    for k in 1..m.n() as usize {
        let ok = (0..nn).all(|a| {
            let mut e = a;
            for _ in 0..k {
                e = m.f(e);
            }
            c(a) == fin || !e_rel(e, a)
        });
        r.check(ok, || format!("(g) k={k}"));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_string_models_pass() {
        let r = audit_tree(&StringModel::new(2), AuditMode::Exhaustive);
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.instances > 10);
    }

    #[test]
    fn small_pair_model_passes() {
        let r = audit_pair(&PairModel::new(3, 2));
        assert!(r.passed(), "{:?}", r.failures);
    }
}
