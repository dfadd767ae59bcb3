use bitvec::prelude::*;

use super::{Elem, Env, FamilySpec, Structure};
use crate::logic::{Letter, PairAtom, PairTerm, Var};

/// The pairing structure with n classes and |C_fin| = m.
///
/// Class i consists of the maps {f,g}^{n-1-i} -> {0..m-1}, stored as digit
/// arrays indexed by words in index order (f before g, leftmost letter most
/// significant) and numbered base m with the first entry most significant.
/// Then f(a)(w) = a(fw) is the first half of the array and g(a) the second.
/// Class 0 is C_init and class n-1 is C_fin, where f and g are the identity.
#[derive(Debug, Clone)]
pub struct PairModel {
    n: u32,
    m: u32,
    offsets: Vec<usize>,
    f_tab: Vec<u32>,
    g_tab: Vec<u32>,
    class_tab: Vec<u8>,
}

impl PairModel {
    pub fn new(n: u32, m: u32) -> Self {
        let sizes: Vec<usize> = (0..n).map(|i| (m as usize).pow(1 << (n - 1 - i))).collect();
        let mut offsets = vec![0];
        for s in &sizes {
            offsets.push(offsets.last().unwrap() + s);
        }
        let total = *offsets.last().unwrap();
        let mut f_tab = vec![0u32; total];
        let mut g_tab = vec![0u32; total];
        let mut class_tab = vec![0u8; total];
        for i in 0..n as usize {
            for local in 0..sizes[i] {
                let e = offsets[i] + local;
                class_tab[e] = i as u8;
                if i + 1 == n as usize {
                    f_tab[e] = e as u32;
                    g_tab[e] = e as u32;
                } else {
                    let half = sizes[i + 1];
                    f_tab[e] = (offsets[i + 1] + local / half) as u32;
                    g_tab[e] = (offsets[i + 1] + local % half) as u32;
                }
            }
        }
        PairModel {
            n,
            m,
            offsets,
            f_tab,
            g_tab,
            class_tab,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn class(&self, e: Elem) -> usize {
        self.class_tab[e] as usize
    }

    pub fn class_size(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn class_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn fin_class(&self) -> usize {
        self.n as usize - 1
    }

    pub fn f(&self, e: Elem) -> Elem {
        self.f_tab[e] as usize
    }

    pub fn g(&self, e: Elem) -> Elem {
        self.g_tab[e] as usize
    }

    pub fn apply_letter(&self, l: Letter, e: Elem) -> Elem {
        match l {
            Letter::F => self.f(e),
            Letter::G => self.g(e),
        }
    }

    /// The value of a term: letters are applied innermost (rightmost) first.
    pub fn term(&self, t: &PairTerm, env: &Env) -> Elem {
        self.apply(&t.s.0, env.val(t.var))
    }

    pub fn apply(&self, word: &[Letter], mut e: Elem) -> Elem {
        for l in word.iter().rev() {
            e = self.apply_letter(*l, e);
        }
        e
    }

    /// Class index of C_{init+k}.
    pub fn init_class(&self, k: u32) -> usize {
        (k as usize).min(self.fin_class())
    }

    /// Class index of C_{fin-k}, if nonempty.
    pub fn fin_minus_class(&self, k: u32) -> Option<usize> {
        self.fin_class().checked_sub(k as usize)
    }

    /// The digit array of an element.
    pub fn digits(&self, e: Elem) -> Vec<u32> {
        let i = self.class(e);
        let len = 1usize << (self.n as usize - 1 - i);
        let mut local = e - self.offsets[i];
        let mut v = vec![0; len];
        for j in (0..len).rev() {
            v[j] = (local % self.m as usize) as u32;
            local /= self.m as usize;
        }
        v
    }
}

impl Structure for PairModel {
    type Atom = PairAtom;

    fn spec(&self) -> FamilySpec {
        FamilySpec::Pair(self.n, self.m)
    }

    fn size(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn holds(&self, atom: &PairAtom, env: &Env) -> bool {
        match atom {
            PairAtom::E(a, b) => self.class(self.term(a, env)) == self.class(self.term(b, env)),
            PairAtom::Eq(a, b) => self.term(a, env) == self.term(b, env),
            PairAtom::Cinit(k, t) => self.class(self.term(t, env)) == self.init_class(*k),
            PairAtom::Cfin(k, t) => Some(self.class(self.term(t, env))) == self.fin_minus_class(*k),
        }
    }

    fn fill_row(&self, atom: &PairAtom, env: &Env, v: Var, row: &mut BitSlice<u64, Lsb0>) {
        // Terms on v are evaluated once per element, the other side once.
        let side = |t: &PairTerm| if t.var == v { None } else { Some(self.term(t, env)) };
        match atom {
            PairAtom::E(a, b) | PairAtom::Eq(a, b) => {
                let eq = matches!(atom, PairAtom::Eq(..));
                let (ca, cb) = (side(a), side(b));
                for e in 0..self.size() {
                    let x = ca.unwrap_or_else(|| self.apply(&a.s.0, e));
                    let y = cb.unwrap_or_else(|| self.apply(&b.s.0, e));
                    row.set(e, if eq { x == y } else { self.class(x) == self.class(y) });
                }
            }
            _ => {
                let mut env = env.clone();
                for e in 0..self.size() {
                    env.set(v, e);
                    row.set(e, self.holds(atom, &env));
                }
            }
        }
    }

    fn elem_name(&self, e: Elem) -> String {
        let d: String = self
            .digits(e)
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(if self.m > 10 { "," } else { "" });
        format!("c{}:{}", self.class(e), d)
    }

    fn class_of(&self, e: Elem) -> Option<usize> {
        Some(self.class(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(PairModel::new(3, 2).size(), 22);
        assert_eq!(PairModel::new(3, 3).size(), 93);
        assert_eq!(PairModel::new(4, 2).size(), 278);
        let m = PairModel::new(4, 2);
        assert_eq!((0..4).map(|i| m.class_size(i)).collect::<Vec<_>>(), vec![256, 16, 4, 2]);
    }

    #[test]
    fn f_is_first_half() {
        let m = PairModel::new(3, 2);
        for e in m.class_range(0) {
            let d = m.digits(e);
            assert_eq!(m.digits(m.f(e)), d[..2].to_vec());
            assert_eq!(m.digits(m.g(e)), d[2..].to_vec());
        }
        for e in m.class_range(2) {
            assert_eq!(m.f(e), e);
            assert_eq!(m.g(e), e);
        }
    }

    #[test]
    fn word_application_order() {
        // "fg" applied to x is f(g(x))
        let m = PairModel::new(3, 2);
        let x = Var::new("x");
        for e in m.class_range(0) {
            let env = Env::of(&[(x, e)]);
            assert_eq!(m.term(&PairTerm::app("fg", x), &env), m.f(m.g(e)));
        }
    }
}
