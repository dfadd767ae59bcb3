//! Finite strings over the two alphabets used by the signatures: decimal
//! digits (tree predicates) and the letters `f`, `g` (pairing terms).

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Alphabet {
    Digits,
    Fg,
}

/// A string of nonnegative integer letters. The empty string is ε.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct DigitString(pub Vec<u32>);

impl DigitString {
    pub fn empty() -> Self {
        DigitString(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prefix_of(&self, other: &DigitString) -> bool {
        other.0.starts_with(&self.0)
    }

    /// True when one string is a prefix of the other.
    pub fn compatible(&self, other: &DigitString) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    pub fn concat(&self, other: &DigitString) -> DigitString {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        DigitString(v)
    }

    /// The part of `self` after the prefix `p`. Panics if `p` is not a prefix.
    pub fn strip(&self, p: &DigitString) -> DigitString {
        assert!(p.is_prefix_of(self), "{p} is not a prefix of {self}");
        DigitString(self.0[p.len()..].to_vec())
    }

    /// Parses the body of a quoted digit string. With a comma the letters are
    /// comma separated decimals, otherwise each character is one letter.
    pub fn parse(s: &str) -> Result<DigitString, String> {
        if s.is_empty() {
            return Ok(DigitString::empty());
        }
        if s.contains(',') {
            s.split(',')
                .map(|p| {
                    p.trim()
                        .parse::<u32>()
                        .map_err(|_| format!("bad digit letter {p:?}"))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(DigitString)
        } else {
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| format!("bad digit letter {c:?}")))
                .collect::<Result<Vec<_>, _>>()
                .map(DigitString)
        }
    }
}

impl From<&str> for DigitString {
    fn from(s: &str) -> Self {
        DigitString::parse(s).expect("valid digit string")
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&d| d < 10) {
            for d in &self.0 {
                write!(f, "{d}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl fmt::Debug for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    F,
    G,
}

/// A word over {f, g}. As a term, the leftmost letter is the outermost
/// application: "fg" applied to x is f(g(x)).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct FgString(pub Vec<Letter>);

impl FgString {
    pub fn empty() -> Self {
        FgString(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn f_power(k: usize) -> FgString {
        FgString(vec![Letter::F; k])
    }

    pub fn concat(&self, inner: &FgString) -> FgString {
        let mut v = self.0.clone();
        v.extend_from_slice(&inner.0);
        FgString(v)
    }

    /// The last `l` letters, i.e. the `l` innermost applications.
    pub fn suffix(&self, l: usize) -> FgString {
        FgString(self.0[self.0.len() - l..].to_vec())
    }

    /// Position of this word among all words of its length, reading f as 0
    /// and g as 1 with the leftmost letter most significant.
    pub fn index(&self) -> usize {
        self.0
            .iter()
            .fold(0, |acc, l| 2 * acc + usize::from(*l == Letter::G))
    }

    pub fn from_index(len: usize, mut idx: usize) -> FgString {
        let mut v = vec![Letter::F; len];
        for i in (0..len).rev() {
            if idx & 1 == 1 {
                v[i] = Letter::G;
            }
            idx >>= 1;
        }
        FgString(v)
    }

    /// All words of length `k` in index order.
    pub fn all(k: usize) -> Vec<FgString> {
        (0..1usize << k).map(|i| FgString::from_index(k, i)).collect()
    }

    pub fn parse(s: &str) -> Result<FgString, String> {
        s.chars()
            .map(|c| match c {
                'f' => Ok(Letter::F),
                'g' => Ok(Letter::G),
                _ => Err(format!("bad fg letter {c:?}")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(FgString)
    }
}

impl From<&str> for FgString {
    fn from(s: &str) -> Self {
        FgString::parse(s).expect("valid fg string")
    }
}

impl fmt::Display for FgString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            f.write_str(match l {
                Letter::F => "f",
                Letter::G => "g",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for FgString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// Either kind of string, tagged with its alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymbolString {
    Digits(DigitString),
    Fg(FgString),
}

impl SymbolString {
    pub fn alphabet(&self) -> Alphabet {
        match self {
            SymbolString::Digits(_) => Alphabet::Digits,
            SymbolString::Fg(_) => Alphabet::Fg,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SymbolString::Digits(d) => d.len(),
            SymbolString::Fg(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_forms() {
        assert_eq!(DigitString::parse("012").unwrap().0, vec![0, 1, 2]);
        assert_eq!(DigitString::parse("1,10").unwrap().0, vec![1, 10]);
        assert_eq!(DigitString::parse("").unwrap().0, Vec::<u32>::new());
        assert_eq!(DigitString(vec![1, 10]).to_string(), "1,10");
        assert_eq!(DigitString(vec![0, 1]).to_string(), "01");
        assert!(DigitString::parse("0a").is_err());
    }

    #[test]
    fn prefix_relations() {
        let a = DigitString::from("0");
        let b = DigitString::from("01");
        assert!(a.is_prefix_of(&b));
        assert!(a.compatible(&b));
        assert!(!DigitString::from("1").compatible(&b));
        assert_eq!(b.strip(&a), DigitString::from("1"));
    }

    #[test]
    fn fg_indexing_round_trips() {
        for k in 0..4 {
            for (i, w) in FgString::all(k).iter().enumerate() {
                assert_eq!(w.index(), i);
                assert_eq!(w.len(), k);
            }
        }
        assert_eq!(FgString::from("gf").index(), 2);
        assert_eq!(FgString::from("fgg").suffix(2), FgString::from("gg"));
    }
}
