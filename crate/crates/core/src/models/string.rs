use bitvec::prelude::*;

use super::{Elem, Env, FamilySpec, Structure};
use crate::logic::{DigitString, TreeAtom, Var};

/// All strings in {0..n-1}^n. An element is the base-n number of its string,
/// most significant letter first, so index order is lexicographic order.
#[derive(Debug, Clone)]
pub struct StringModel {
    n: u32,
    pows: Vec<usize>,
}

impl StringModel {
    pub fn new(n: u32) -> Self {
        let pows = (0..=n).map(|k| (n as usize).pow(k)).collect();
        StringModel { n, pows }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// True when σ names a nonempty relation: short enough and all letters < n.
    pub fn in_range(&self, s: &DigitString) -> bool {
        s.len() <= self.n as usize && s.0.iter().all(|&d| d < self.n)
    }

    fn index(&self, s: &DigitString) -> usize {
        s.0.iter().fold(0, |acc, &d| acc * self.n as usize + d as usize)
    }

    /// Size of the tail after a prefix of length `l`.
    fn step(&self, l: usize) -> usize {
        self.pows[self.n as usize - l]
    }

    pub fn u(&self, s: &DigitString, a: Elem) -> bool {
        self.in_range(s) && a / self.step(s.len()) == self.index(s)
    }

    pub fn b(&self, s: &DigitString, t: &DigitString, a: Elem, b: Elem) -> bool {
        if s.len() != t.len() || !self.u(s, a) || !self.u(t, b) {
            return false;
        }
        let st = self.step(s.len());
        a % st == b % st
    }

    /// The unique partner of `a` under B_{σ,τ}, if any.
    pub fn partner(&self, s: &DigitString, t: &DigitString, a: Elem) -> Option<Elem> {
        if s.len() != t.len() || !self.u(s, a) || !self.in_range(t) {
            return None;
        }
        let st = self.step(s.len());
        Some(self.index(t) * st + a % st)
    }

    /// The elements of U_σ as a half-open index range.
    pub fn u_range(&self, s: &DigitString) -> std::ops::Range<usize> {
        if !self.in_range(s) {
            return 0..0;
        }
        let st = self.step(s.len());
        let i = self.index(s);
        i * st..(i + 1) * st
    }

    pub fn string_of(&self, mut a: Elem) -> DigitString {
        let mut v = vec![0; self.n as usize];
        for i in (0..self.n as usize).rev() {
            v[i] = (a % self.n as usize) as u32;
            a /= self.n as usize;
        }
        DigitString(v)
    }
}

impl Structure for StringModel {
    type Atom = TreeAtom;

    fn spec(&self) -> FamilySpec {
        FamilySpec::String(self.n)
    }

    fn size(&self) -> usize {
        self.pows[self.n as usize]
    }

    fn holds(&self, atom: &TreeAtom, env: &Env) -> bool {
        match atom {
            TreeAtom::U(s, v) => self.u(s, env.val(*v)),
            TreeAtom::B(s, t, v, w) => self.b(s, t, env.val(*v), env.val(*w)),
            TreeAtom::Eq(v, w) => env.val(*v) == env.val(*w),
        }
    }

    fn fill_row(&self, atom: &TreeAtom, env: &Env, v: Var, row: &mut BitSlice<u64, Lsb0>) {
        row.fill(false);
        match atom {
            TreeAtom::U(s, _) => row[self.u_range(s)].fill(true),
            TreeAtom::B(s, t, a, b) if *a == v && *b == v => {
                for e in self.u_range(s) {
                    row.set(e, self.b(s, t, e, e));
                }
            }
            TreeAtom::B(s, t, a, b) => {
                let hit = if *a == v {
                    self.partner(t, s, env.val(*b))
                } else {
                    debug_assert_eq!(*b, v);
                    self.partner(s, t, env.val(*a))
                };
                if let Some(e) = hit {
                    row.set(e, true);
                }
            }
            TreeAtom::Eq(a, b) if *a == v && *b == v => row.fill(true),
            TreeAtom::Eq(a, b) => {
                let other = if *a == v { *b } else { *a };
                row.set(env.val(other), true);
            }
        }
    }

    fn elem_name(&self, e: Elem) -> String {
        self.string_of(e).0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(if self.n > 10 { "," } else { "" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_relations() {
        let m = StringModel::new(3);
        assert_eq!(m.size(), 27);
        let a = 5; // "012"
        assert_eq!(m.elem_name(a), "012");
        assert!(m.u(&"0".into(), a));
        assert!(m.u(&"01".into(), a));
        assert!(!m.u(&"1".into(), a));
        assert!(!m.u(&"3".into(), a));
        assert!(!m.u(&"0120".into(), a));
        assert!(m.b(&"0".into(), &"1".into(), a, 9 + 5));
        assert_eq!(m.partner(&"0".into(), &"2".into(), a), Some(18 + 5));
        assert_eq!(m.u_range(&"1".into()), 9..18);
    }

    #[test]
    fn rows_match_holds() {
        let m = StringModel::new(3);
        let (x, y) = (Var::new("x"), Var::new("y"));
        let atoms = [
            TreeAtom::b("0", "1", x, y),
            TreeAtom::b("01", "01", y, x),
            TreeAtom::b("0", "1", x, x),
            TreeAtom::Eq(x, y),
            TreeAtom::u("2", x),
        ];
        for a in &atoms {
            for yv in 0..m.size() {
                let env = Env::of(&[(y, yv)]);
                let mut row = bitvec![u64, Lsb0; 0; m.size()];
                m.fill_row(a, &env, x, &mut row);
                for xv in 0..m.size() {
                    let env = Env::of(&[(y, yv), (x, xv)]);
                    assert_eq!(row[xv], m.holds(a, &env), "{a:?} x={xv} y={yv}");
                }
            }
        }
    }
}
