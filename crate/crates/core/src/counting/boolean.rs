use std::collections::BTreeMap;

use num_traits::Signed;

use super::poly::{CardError, Poly};

/// |X| = c·|π(X)| when every nonempty fiber of X has exactly c elements.
pub fn fiber_count<T: Clone + Signed>(fiber_size: &Poly<T>, base_count: &Poly<T>) -> Poly<T> {
    fiber_size * base_count
}

/// |A_0 ∪ … ∪ A_{n-1}| by inclusion–exclusion. Keys are the sorted index sets
/// of the intersections; every nonempty subset of 0..n must be present.
pub fn boolean_card<T: Clone + Signed>(cards: &BTreeMap<Vec<usize>, Poly<T>>, n: usize) -> Result<Poly<T>, CardError> {
    let mut total = Poly::zero();
    for mask in 1u64..(1u64 << n) {
        let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let c = cards.get(&subset).ok_or_else(|| CardError::MissingSubset(subset.clone()))?;
        if subset.len() % 2 == 1 {
            total = &total + c;
        } else {
            total = &total - c;
        }
    }
    Ok(total)
}

/// Signed inclusion–exclusion weight (-1)^|S|.
pub fn sign<T: Clone + Signed>(size: usize) -> T {
    if size % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn c(v: i64) -> Poly<BigInt> {
        Poly::constant(BigInt::from(v))
    }

    #[test]
    fn two_sets() {
        let mut m = BTreeMap::new();
        m.insert(vec![0], c(5));
        m.insert(vec![1], c(4));
        m.insert(vec![0, 1], c(2));
        assert_eq!(boolean_card(&m, 2).unwrap(), c(7));
        m.remove(&vec![0, 1]);
        assert_eq!(boolean_card(&m, 2), Err(CardError::MissingSubset(vec![0, 1])));
    }

    #[test]
    fn symbolic_fibers() {
        let x: Poly<BigInt> = Poly::var("X");
        assert_eq!(fiber_count(&x, &x).to_string(), "X^2");
        assert_eq!(fiber_count(&c(3), &c(5)), c(15));
        assert_eq!(fiber_count(&Poly::one(), &x), x);
    }
}
