//! Parameter environments: declared symbols plus the shared radical registry.
//!
//! Every radical is the square root of either a prime integer or a primitive,
//! square-free, non-constant polynomial with positive leading coefficient.
//! Polynomial radicands are kept pairwise coprime by factor refinement: when a
//! new radicand shares a factor with an existing entry, that entry is split
//! into its coprime pieces. Products of distinct registered radicals are then
//! never perfect squares, which is what makes the normal form unique.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use parking_lot::RwLock;

use super::gcd::gcd;
use super::poly::Poly;
use super::KernelError;

/// A declared parameter, identified by its position in the environment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub(crate) u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug)]
pub(crate) struct RadicalEntry {
    pub radicand: Poly,
    /// Set once the entry has been refined into coprime pieces.
    pub split: Option<Vec<u32>>,
}

#[derive(Default)]
struct Registry {
    entries: Vec<RadicalEntry>,
    by_radicand: HashMap<Poly, u32>,
}

struct EnvInner {
    symbols: RwLock<Vec<String>>,
    radicals: RwLock<Registry>,
    /// Bumped whenever a radical is split; expressions stamped with an older
    /// epoch are rewritten before use.
    epoch: AtomicU64,
}

/// Symbols and radicals shared by a family of expressions.
///
/// Cloning is cheap; clones refer to the same environment. All parameters
/// are assumed to be strictly positive reals.
#[derive(Clone)]
pub struct ParamEnv {
    inner: Arc<EnvInner>,
}

impl fmt::Debug for ParamEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamEnv")
            .field("symbols", &*self.inner.symbols.read())
            .field("radicals", &self.inner.radicals.read().entries.len())
            .finish()
    }
}

impl Default for ParamEnv {
    fn default() -> Self {
        Self::new()
    }
}

pub(crate) fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "sqrt"
}

impl ParamEnv {
    pub fn new() -> Self {
        ParamEnv {
            inner: Arc::new(EnvInner {
                symbols: RwLock::new(Vec::new()),
                radicals: RwLock::new(Registry::default()),
                epoch: AtomicU64::new(0),
            }),
        }
    }

    /// Environment with the given symbols declared in order.
    pub fn with_symbols<S: AsRef<str>>(names: &[S]) -> Result<Self, KernelError> {
        let env = Self::new();
        for n in names {
            env.declare(n.as_ref())?;
        }
        Ok(env)
    }

    /// Declares `name`, or returns the existing symbol of that name.
    pub fn declare(&self, name: &str) -> Result<Symbol, KernelError> {
        if !valid_identifier(name) {
            return Err(KernelError::InvalidSymbolName(name.to_string()));
        }
        let mut syms = self.inner.symbols.write();
        if let Some(i) = syms.iter().position(|s| s == name) {
            return Ok(Symbol(i as u32));
        }
        syms.push(name.to_string());
        Ok(Symbol(syms.len() as u32 - 1))
    }

    pub fn symbol(&self, name: &str) -> Result<Symbol, KernelError> {
        self.inner
            .symbols
            .read()
            .iter()
            .position(|s| s == name)
            .map(|i| Symbol(i as u32))
            .ok_or_else(|| KernelError::UnknownSymbol(name.to_string()))
    }

    pub fn name(&self, sym: Symbol) -> String {
        self.inner.symbols.read()[sym.index()].clone()
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        (0..self.symbol_count() as u32).map(Symbol).collect()
    }

    pub fn symbol_names(&self) -> Vec<String> {
        self.inner.symbols.read().clone()
    }

    pub fn symbol_count(&self) -> usize {
        self.inner.symbols.read().len()
    }

    pub(crate) fn check_symbol(&self, sym: Symbol) -> Result<(), KernelError> {
        if sym.index() < self.symbol_count() {
            Ok(())
        } else {
            Err(KernelError::UnknownSymbol(format!("#{}", sym.0)))
        }
    }

    pub fn ptr_eq(&self, other: &ParamEnv) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    pub(crate) fn epoch(&self) -> u64 {
        self.inner.epoch.load(Ordering::Acquire)
    }

    pub(crate) fn radicand(&self, idx: u32) -> Poly {
        self.inner.radicals.read().entries[idx as usize].radicand.clone()
    }

    pub(crate) fn radicands(&self, idxs: &[u32]) -> Vec<Poly> {
        let reg = self.inner.radicals.read();
        idxs.iter().map(|&i| reg.entries[i as usize].radicand.clone()).collect()
    }

    pub fn radical_count(&self) -> usize {
        self.inner.radicals.read().entries.len()
    }

    /// Active (unsplit) radical indices that `idx` currently stands for.
    pub(crate) fn resolve(&self, idx: u32) -> Vec<u32> {
        self.inner.radicals.read().resolve(idx)
    }

    pub(crate) fn is_split(&self, idx: u32) -> bool {
        self.inner.radicals.read().entries[idx as usize].split.is_some()
    }

    /// Registers `sqrt(p)` for a prime integer `p`.
    pub(crate) fn register_prime(&self, p: &BigInt) -> u32 {
        let key = Poly::constant(p.clone());
        if let Some(&i) = self.inner.radicals.read().by_radicand.get(&key) {
            return i;
        }
        let mut reg = self.inner.radicals.write();
        if let Some(&i) = reg.by_radicand.get(&key) {
            return i;
        }
        push_entry(&mut reg, key)
    }

    /// Registers a primitive square-free polynomial radicand and returns the
    /// active entries whose product equals it.
    pub(crate) fn register_poly(&self, q: &Poly) -> Vec<u32> {
        debug_assert!(!q.is_constant());
        {
            let reg = self.inner.radicals.read();
            if let Some(&i) = reg.by_radicand.get(q) {
                let mut out = reg.resolve(i);
                out.sort_unstable();
                return out;
            }
        }
        let mut reg = self.inner.radicals.write();
        let mut out = Vec::new();
        let mut pending = vec![q.clone()];
        let mut split_happened = false;
        while let Some(p) = pending.pop() {
            if p.is_constant() {
                continue;
            }
            if let Some(&i) = reg.by_radicand.get(&p) {
                out.extend(reg.resolve(i));
                continue;
            }
            let mut hit = None;
            for (i, e) in reg.entries.iter().enumerate() {
                if e.split.is_some() || e.radicand.is_constant() {
                    continue;
                }
                let g = gcd(&p, &e.radicand);
                if !g.is_constant() {
                    hit = Some((i, g));
                    break;
                }
            }
            match hit {
                None => out.push(push_entry(&mut reg, p)),
                Some((i, g)) => {
                    let existing = reg.entries[i].radicand.clone();
                    if g != existing {
                        let rest = existing.div_exact(&g).expect("gcd divides radicand");
                        let a = push_entry(&mut reg, g.clone());
                        let b = push_entry(&mut reg, rest);
                        reg.entries[i].split = Some(vec![a, b]);
                        split_happened = true;
                    }
                    pending.push(p.div_exact(&g).expect("gcd divides radicand"));
                    pending.push(g);
                }
            }
        }
        if split_happened {
            self.inner.epoch.fetch_add(1, Ordering::AcqRel);
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl Registry {
    fn resolve(&self, idx: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack = vec![idx];
        while let Some(i) = stack.pop() {
            match &self.entries[i as usize].split {
                Some(parts) => stack.extend(parts.iter().copied()),
                None => out.push(i),
            }
        }
        out
    }
}

fn push_entry(reg: &mut Registry, radicand: Poly) -> u32 {
    let i = reg.entries.len() as u32;
    reg.by_radicand.insert(radicand.clone(), i);
    reg.entries.push(RadicalEntry { radicand, split: None });
    i
}
