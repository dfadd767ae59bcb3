use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use once_cell::sync::Lazy;

struct Interner {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

static INTERNER: Lazy<RwLock<Interner>> = Lazy::new(|| {
    RwLock::new(Interner {
        names: Vec::new(),
        ids: HashMap::new(),
    })
});

/// An interned variable name. Cheap to copy and compare.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    pub fn new(name: &str) -> Var {
        if let Some(&id) = INTERNER.read().unwrap().ids.get(name) {
            return Var(id);
        }
        let mut g = INTERNER.write().unwrap();
        if let Some(&id) = g.ids.get(name) {
            return Var(id);
        }
        let id = g.names.len() as u32;
        g.names.push(name.to_string());
        g.ids.insert(name.to_string(), id);
        Var(id)
    }

    /// A variable whose name has never been interned before, derived from `base`.
    pub fn fresh(base: &str) -> Var {
        let root = base.split('_').next().unwrap_or(base);
        let root = if root.is_empty() { "v" } else { root };
        let mut g = INTERNER.write().unwrap();
        let mut k = 1usize;
        loop {
            let name = format!("{root}_{k}");
            if !g.ids.contains_key(&name) {
                let id = g.names.len() as u32;
                g.names.push(name.clone());
                g.ids.insert(name, id);
                return Var(id);
            }
            k += 1;
        }
    }

    pub fn name(&self) -> String {
        INTERNER.read().unwrap().names[self.0 as usize].clone()
    }

    pub fn id(&self) -> u32 {
        self.0
    }
}

impl serde::Serialize for Var {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_stable() {
        assert_eq!(Var::new("y"), Var::new("y"));
        assert_ne!(Var::new("y"), Var::new("z"));
        assert_eq!(Var::new("y").name(), "y");
    }

    #[test]
    fn fresh_never_collides() {
        let a = Var::fresh("x");
        let b = Var::fresh("x");
        assert_ne!(a, b);
        assert!(a.name().starts_with("x_"));
    }
}
