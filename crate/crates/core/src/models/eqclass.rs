use bitvec::prelude::*;

use super::{Elem, Env, FamilySpec, Structure};
use crate::logic::{EqAtom, Var};

/// n equivalence classes; class j (0-based) has n^(j+1) elements.
#[derive(Debug, Clone)]
pub struct EqClassModel {
    n: u32,
    offsets: Vec<usize>,
}

impl EqClassModel {
    pub fn new(n: u32) -> Self {
        let mut offsets = vec![0];
        for j in 0..n {
            offsets.push(offsets.last().unwrap() + (n as usize).pow(j + 1));
        }
        EqClassModel { n, offsets }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn class(&self, e: Elem) -> usize {
        self.offsets.partition_point(|&o| o <= e) - 1
    }

    pub fn class_range(&self, j: usize) -> std::ops::Range<usize> {
        self.offsets[j]..self.offsets[j + 1]
    }

    /// Least element of the i-th largest class (i counted from 1).
    pub fn rep_of_ith_largest(&self, i: usize) -> Elem {
        self.offsets[self.n as usize - i]
    }
}

impl Structure for EqClassModel {
    type Atom = EqAtom;

    fn spec(&self) -> FamilySpec {
        FamilySpec::EqClass(self.n)
    }

    fn size(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn holds(&self, atom: &EqAtom, env: &Env) -> bool {
        match atom {
            EqAtom::E(v, w) => self.class(env.val(*v)) == self.class(env.val(*w)),
            EqAtom::Eq(v, w) => env.val(*v) == env.val(*w),
        }
    }

    fn fill_row(&self, atom: &EqAtom, env: &Env, v: Var, row: &mut BitSlice<u64, Lsb0>) {
        row.fill(false);
        match atom {
            EqAtom::E(a, b) | EqAtom::Eq(a, b) if a == b => row.fill(true),
            EqAtom::E(a, b) => {
                let other = env.val(if *a == v { *b } else { *a });
                row[self.class_range(self.class(other))].fill(true);
            }
            EqAtom::Eq(a, b) => row.set(env.val(if *a == v { *b } else { *a }), true),
        }
    }

    fn elem_name(&self, e: Elem) -> String {
        format!("c{}:{}", self.class(e), e - self.offsets[self.class(e)])
    }

    fn class_of(&self, e: Elem) -> Option<usize> {
        Some(self.class(e))
    }
}
