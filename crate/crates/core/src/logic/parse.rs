//! S-expression reader and the generic formula parser.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::formula::{Atom, Formula, Signature};
use super::var::Var;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("arity error at byte {pos}: {head} takes {expected} argument(s), got {found}")]
    Arity {
        pos: usize,
        head: String,
        expected: usize,
        found: usize,
    },
    #[error("signature mismatch at byte {pos}: {head} is not an atom of the {sig} signature")]
    Signature { pos: usize, head: String, sig: Signature },
}

impl ParseError {
    pub fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        ParseError::Syntax { pos, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Sym(String, usize),
    Str(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    pub fn pos(&self) -> usize {
        match self {
            Sexp::Sym(_, p) | Sexp::Str(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

const RESERVED: &[&str] = &["and", "or", "not", "exists", "forall", "app", "cinit", "cfin", "true", "false"];

pub fn read_sexp(text: &str) -> Result<Sexp, ParseError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let e = read_one(text, bytes, &mut pos)?;
    skip_ws(bytes, &mut pos);
    if pos != bytes.len() {
        return Err(ParseError::syntax(pos, "trailing input"));
    }
    Ok(e)
}

fn skip_ws(b: &[u8], pos: &mut usize) {
    while *pos < b.len() {
        if b[*pos].is_ascii_whitespace() {
            *pos += 1;
        } else if b[*pos] == b';' {
            while *pos < b.len() && b[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
}

fn read_one(text: &str, b: &[u8], pos: &mut usize) -> Result<Sexp, ParseError> {
    skip_ws(b, pos);
    if *pos >= b.len() {
        return Err(ParseError::syntax(*pos, "unexpected end of input"));
    }
    let start = *pos;
    match b[*pos] {
        b'(' => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                skip_ws(b, pos);
                if *pos >= b.len() {
                    return Err(ParseError::syntax(start, "unclosed parenthesis"));
                }
                if b[*pos] == b')' {
                    *pos += 1;
                    return Ok(Sexp::List(items, start));
                }
                items.push(read_one(text, b, pos)?);
            }
        }
        b')' => Err(ParseError::syntax(start, "unexpected ')'")),
        b'"' => {
            *pos += 1;
            let s = *pos;
            while *pos < b.len() && b[*pos] != b'"' {
                *pos += 1;
            }
            if *pos >= b.len() {
                return Err(ParseError::syntax(start, "unterminated string"));
            }
            let body = text[s..*pos].to_string();
            *pos += 1;
            Ok(Sexp::Str(body, start))
        }
        _ => {
            while *pos < b.len() && !b[*pos].is_ascii_whitespace() && !matches!(b[*pos], b'(' | b')' | b'"' | b';') {
                *pos += 1;
            }
            Ok(Sexp::Sym(text[start..*pos].to_string(), start))
        }
    }
}

pub fn expect_arity(head: &str, args: &[Sexp], n: usize, pos: usize) -> Result<(), ParseError> {
    if args.len() != n {
        return Err(ParseError::Arity {
            pos,
            head: head.to_string(),
            expected: n,
            found: args.len(),
        });
    }
    Ok(())
}

fn valid_ident(s: &str) -> bool {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') && !RESERVED.contains(&s)
}

pub fn sexp_var(e: &Sexp) -> Result<Var, ParseError> {
    match e {
        Sexp::Sym(s, p) if valid_ident(s) => {
            let _ = p;
            Ok(Var::new(s))
        }
        _ => Err(ParseError::syntax(e.pos(), "expected a variable")),
    }
}

pub fn sexp_str(e: &Sexp) -> Result<&str, ParseError> {
    match e {
        Sexp::Str(s, _) => Ok(s),
        _ => Err(ParseError::syntax(e.pos(), "expected a quoted string")),
    }
}

pub fn sexp_nat(e: &Sexp) -> Result<u32, ParseError> {
    match e {
        Sexp::Sym(s, p) => s.parse::<u32>().map_err(|_| ParseError::syntax(*p, "expected a natural number")),
        _ => Err(ParseError::syntax(e.pos(), "expected a natural number")),
    }
}

/// Parses formula text over the signature of `A`, renaming bound variables so
/// that binders are distinct from each other and from the free variables.
pub fn parse_formula<A: Atom>(text: &str) -> Result<Formula<A>, ParseError> {
    let e = read_sexp(text)?;
    let raw = build::<A>(&e)?;
    Ok(canonicalize_binders(&raw))
}

fn build<A: Atom>(e: &Sexp) -> Result<Formula<A>, ParseError> {
    match e {
        Sexp::Sym(s, p) => match s.as_str() {
            "true" => Ok(Formula::top()),
            "false" => Ok(Formula::bottom()),
            _ => Err(ParseError::syntax(*p, format!("unexpected symbol {s:?}"))),
        },
        Sexp::Str(_, p) => Err(ParseError::syntax(*p, "unexpected string")),
        Sexp::List(items, p) => {
            let Some(Sexp::Sym(head, _)) = items.first() else {
                return Err(ParseError::syntax(*p, "expected a head symbol"));
            };
            let args = &items[1..];
            match head.as_str() {
                "and" | "or" => {
                    let fs = args.iter().map(build::<A>).collect::<Result<Vec<_>, _>>()?;
                    Ok(if head == "and" { Formula::And(fs) } else { Formula::Or(fs) })
                }
                "not" => {
                    expect_arity(head, args, 1, *p)?;
                    Ok(Formula::not(build::<A>(&args[0])?))
                }
                "exists" | "forall" => {
                    expect_arity(head, args, 2, *p)?;
                    let v = sexp_var(&args[0])?;
                    let body = build::<A>(&args[1])?;
                    Ok(if head == "exists" {
                        Formula::exists(v, body)
                    } else {
                        Formula::forall(v, body)
                    })
                }
                _ => Ok(Formula::Atom(A::from_sexp(head, args, *p)?)),
            }
        }
    }
}

/// Renames binders in pre-order: a binder keeps its name unless it is free in
/// the formula or already used by an earlier binder, in which case it becomes
/// the first unused `name_k`.
pub fn canonicalize_binders<A: Atom>(f: &Formula<A>) -> Formula<A> {
    let mut used: HashSet<String> = f.free_vars().iter().map(|v| v.name()).collect();
    let taken: HashSet<String> = f.all_vars().iter().map(|v| v.name()).collect();
    go(f, &mut used, &taken, &HashMap::new())
}

fn go<A: Atom>(
    f: &Formula<A>,
    used: &mut HashSet<String>,
    taken: &HashSet<String>,
    scope: &HashMap<Var, Var>,
) -> Formula<A> {
    match f {
        Formula::Atom(a) => Formula::Atom(a.map_vars(&mut |v| *scope.get(&v).unwrap_or(&v))),
        Formula::Not(g) => Formula::not(go(g, used, taken, scope)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| go(g, used, taken, scope)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| go(g, used, taken, scope)).collect()),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let name = v.name();
            let nv = if used.contains(&name) {
                let root = name.clone();
                let mut k = 1;
                loop {
                    let cand = format!("{root}_{k}");
                    if !used.contains(&cand) && !taken.contains(&cand) {
                        break Var::new(&cand);
                    }
                    k += 1;
                }
            } else {
                *v
            };
            used.insert(nv.name());
            let mut inner = scope.clone();
            inner.insert(*v, nv);
            let body = go(g, used, taken, &inner);
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(nv, body)
            } else {
                Formula::forall(nv, body)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists() {
        let e = read_sexp("(a (b \"c\") d)").unwrap();
        match e {
            Sexp::List(items, 0) => assert_eq!(items.len(), 3),
            _ => panic!(),
        }
    }

    #[test]
    fn reports_positions() {
        assert_eq!(read_sexp("(a b").unwrap_err(), ParseError::syntax(0, "unclosed parenthesis"));
        assert!(matches!(read_sexp("(a) b"), Err(ParseError::Syntax { pos: 4, .. })));
        assert!(matches!(read_sexp("(a \"b)"), Err(ParseError::Syntax { pos: 3, .. })));
    }

    #[test]
    fn identifiers() {
        assert!(valid_ident("y0"));
        assert!(valid_ident("x_1"));
        assert!(!valid_ident("and"));
        assert!(!valid_ident("1x"));
    }
}
