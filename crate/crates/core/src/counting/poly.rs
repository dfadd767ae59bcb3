//! Expanded multivariate polynomials over named anchors.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CardError {
    #[error("anchor {0} is not bound")]
    Unbound(String),
    #[error("intersection card for subset {0:?} is missing")]
    MissingSubset(Vec<usize>),
    #[error("cards belong to different families")]
    MixedFamilies,
    #[error("the sweep is empty")]
    EmptySweep,
    #[error("{0}")]
    Invalid(String),
}

/// A product of anchors with positive exponents, sorted by name. The empty
/// monomial is the constant 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(pub Vec<(String, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Monomial(vec![(name.to_string(), 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m: BTreeMap<String, u32> = self.0.iter().cloned().collect();
        for (v, e) in &other.0 {
            *m.entry(v.clone()).or_insert(0) += e;
        }
        Monomial(m.into_iter().collect())
    }

    pub fn exponent_of(&self, v: &str) -> u32 {
        self.0.iter().find(|p| p.0 == v).map_or(0, |p| p.1)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut factors: Vec<&(String, u32)> = self.0.iter().collect();
        factors.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
        let parts: Vec<String> = factors
            .into_iter()
            .map(|(v, e)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// A polynomial with coefficients in `T`, kept expanded with like monomials
/// merged and zero coefficients removed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly<T> {
    terms: BTreeMap<Monomial, T>,
}

impl<T: Clone + Signed> Poly<T> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: T) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn one() -> Self {
        Poly::constant(T::one())
    }

    pub fn var(name: &str) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::var(name), T::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, T)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Univariate polynomial Σ coeffs[i]·v^i.
    pub fn univariate(name: &str, coeffs: &[T]) -> Self {
        Poly::from_terms(coeffs.iter().enumerate().map(|(i, c)| {
            let m = if i == 0 { Monomial::one() } else { Monomial(vec![(name.to_string(), i as u32)]) };
            (m, c.clone())
        }))
    }

    pub fn add_term(&mut self, m: Monomial, c: T) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(T::zero);
        *e = e.clone() + c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn anchors(&self) -> Vec<String> {
        let mut v: Vec<String> = self.terms.keys().flat_map(|m| m.0.iter().map(|p| p.0.clone())).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn constant_value(&self) -> Option<T> {
        match self.terms.len() {
            0 => Some(T::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Poly::from_terms(self.terms.iter().map(|(m, x)| (m.clone(), x.clone() * c.clone())))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn degree_in(&self, v: &str) -> u32 {
        self.terms.keys().map(|m| m.exponent_of(v)).max().unwrap_or(0)
    }

    /// Coefficients of a polynomial in the single anchor `v`, lowest first.
    /// Returns `None` if another anchor occurs.
    pub fn coefficients_in(&self, v: &str) -> Option<Vec<T>> {
        let mut out = vec![T::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            if m.0.iter().any(|p| p.0 != v) {
                return None;
            }
            out[m.exponent_of(v) as usize] = c.clone();
        }
        Some(out)
    }

    /// Substitutes a polynomial for an anchor.
    pub fn substitute(&self, v: &str, q: &Poly<T>) -> Self {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent_of(v);
            let rest = Monomial(m.0.iter().filter(|p| p.0 != v).cloned().collect());
            let mut base = Poly::zero();
            base.add_term(rest, c.clone());
            out = &out + &(&base * &q.pow(e));
        }
        out
    }

    pub fn eval(&self, binding: &HashMap<String, T>) -> Result<T, CardError> {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in &m.0 {
                let x = binding.get(v).ok_or_else(|| CardError::Unbound(v.clone()))?;
                for _ in 0..*e {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }
}

impl<T: Clone + Signed> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, o: &Poly<T>) -> Poly<T> {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }
}

impl<T: Clone + Signed> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, o: &Poly<T>) -> Poly<T> {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), -c.clone());
        }
        p
    }
}

impl<T: Clone + Signed> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, o: &Poly<T>) -> Poly<T> {
        let mut p = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                p.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        p
    }
}

impl<T: Clone + Signed> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())))
    }
}

macro_rules! owned_op {
    ($tr:ident, $f:ident) => {
        impl<T: Clone + Signed> $tr for Poly<T> {
            type Output = Poly<T>;
            fn $f(self, o: Poly<T>) -> Poly<T> {
                (&self).$f(&o)
            }
        }
    };
}
owned_op!(Add, add);
owned_op!(Sub, sub);
owned_op!(Mul, mul);

impl<T: Clone + Signed> Zero for Poly<T> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<T: Clone + Signed> One for Poly<T> {
    fn one() -> Self {
        Poly::one()
    }
}

/// Highest total degree first; within a degree, reverse monomial order.
impl<T: Clone + Signed + fmt::Display> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut ts: Vec<(&Monomial, &T)> = self.terms.iter().collect();
        ts.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then(b.0.cmp(a.0)));
        for (i, (m, c)) in ts.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.0.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl<T: Clone + Signed + fmt::Display> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type P = Poly<BigInt>;

    fn bind(pairs: &[(&str, i64)]) -> HashMap<String, BigInt> {
        pairs.iter().map(|(k, v)| (k.to_string(), BigInt::from(*v))).collect()
    }

    #[test]
    fn printing() {
        let x = P::var("X");
        assert_eq!((&x * &x - x.clone()).to_string(), "X^2 - X");
        assert_eq!((x.clone() + P::one()).to_string(), "X + 1");
        assert_eq!(P::zero().to_string(), "0");
        assert_eq!((&P::var("|U_0|") * &P::var("|U_00|")).to_string(), "|U_0|*|U_00|");
        assert_eq!((P::constant(BigInt::from(-2)) * x).to_string(), "-2*X");
    }

    #[test]
    fn evaluation() {
        let x = P::var("X");
        assert_eq!((&x * &x - x.clone()).eval(&bind(&[("X", 4)])).unwrap(), BigInt::from(12));
        assert_eq!(P::one().eval(&HashMap::new()).unwrap(), BigInt::from(1));
        let xy = &P::var("X") * &P::var("Y");
        assert_eq!(xy.eval(&bind(&[("X", 9), ("Y", 3)])).unwrap(), BigInt::from(27));
        assert_eq!(xy.eval(&bind(&[("X", 9)])), Err(CardError::Unbound("Y".into())));
    }

    #[test]
    fn like_terms_cancel() {
        let x = P::var("X");
        assert!((x.clone() - x).is_zero());
        let q = P::univariate("X", &[BigInt::from(1), BigInt::from(0), BigInt::from(2)]);
        assert_eq!(q.coefficients_in("X").unwrap(), vec![BigInt::from(1), BigInt::from(0), BigInt::from(2)]);
        assert_eq!(q.substitute("X", &P::constant(BigInt::from(3))).constant_value(), Some(BigInt::from(19)));
    }
}
