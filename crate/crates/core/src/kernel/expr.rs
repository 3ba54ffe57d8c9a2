//! Canonical symbolic expressions.
//!
//! An [`Expr`] is `N / D` where `D` is an integer polynomial in the symbols
//! and `N = sum_S c_S * prod_{i in S} r_i` with `c_S` integer polynomials and
//! `r_i` registered radicals, each to degree at most one. The form is
//! canonical when:
//!
//! * `D` carries no radicals (denominators are rationalized),
//! * `gcd(D, c_S...) = 1`, integer content included,
//! * the leading coefficient of `D` is positive,
//! * zero is `0 / 1`.
//!
//! Because registered radicals are multiplicatively independent, equal
//! values have identical forms and equality is structural.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use smallvec::SmallVec;

use super::env::{ParamEnv, Symbol};
use super::gcd::{gcd, squarefree};
use super::intfactor::square_split;
use super::poly::{bigint_to_f64, Poly};
use super::KernelError;

/// Sorted set of radical indices.
pub(crate) type RadSet = SmallVec<[u32; 4]>;

/// Exact parameter values keyed by symbol.
pub type Bindings = BTreeMap<Symbol, BigRational>;

/// Polynomial in the radicals with polynomial coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub(crate) struct RadPoly {
    /// Sorted by radical set; coefficients are never zero.
    parts: Vec<(RadSet, Poly)>,
}

impl RadPoly {
    pub fn zero() -> Self {
        RadPoly { parts: Vec::new() }
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::single(RadSet::new(), p)
    }

    pub fn single(set: RadSet, p: Poly) -> Self {
        if p.is_zero() {
            Self::zero()
        } else {
            RadPoly { parts: vec![(set, p)] }
        }
    }

    fn from_map(map: BTreeMap<RadSet, Poly>) -> Self {
        RadPoly { parts: map.into_iter().filter(|(_, p)| !p.is_zero()).collect() }
    }

    pub fn parts(&self) -> &[(RadSet, Poly)] {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// The polynomial if no radical occurs.
    pub fn as_poly(&self) -> Option<Poly> {
        match self.parts.as_slice() {
            [] => Some(Poly::zero()),
            [(s, p)] if s.is_empty() => Some(p.clone()),
            _ => None,
        }
    }

    pub fn coeffs(&self) -> impl Iterator<Item = &Poly> {
        self.parts.iter().map(|(_, p)| p)
    }

    pub fn term_count(&self) -> usize {
        self.parts.iter().map(|(_, p)| p.len()).sum()
    }

    pub fn radicals(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.parts.iter().flat_map(|(s, _)| s.iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn neg(&self) -> Self {
        RadPoly { parts: self.parts.iter().map(|(s, p)| (s.clone(), p.neg())).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut map: BTreeMap<RadSet, Poly> = self.parts.iter().cloned().collect();
        for (s, p) in &other.parts {
            match map.get_mut(s) {
                Some(q) => *q = q.add(p),
                None => {
                    map.insert(s.clone(), p.clone());
                }
            }
        }
        Self::from_map(map)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        if p.is_zero() {
            return Self::zero();
        }
        RadPoly { parts: self.parts.iter().map(|(s, c)| (s.clone(), c.mul(p))).collect() }
    }

    pub fn mul(&self, other: &Self, env: &ParamEnv) -> Self {
        let mut map: BTreeMap<RadSet, Poly> = BTreeMap::new();
        let mut radicand_cache: HashMap<u32, Poly> = HashMap::new();
        for (sa, pa) in &self.parts {
            for (sb, pb) in &other.parts {
                let (set, shared) = sym_diff(sa, sb);
                let mut c = pa.mul(pb);
                for i in shared {
                    let r = radicand_cache.entry(i).or_insert_with(|| env.radicand(i));
                    c = c.mul(r);
                }
                match map.get_mut(&set) {
                    Some(q) => *q = q.add(&c),
                    None => {
                        map.insert(set, c);
                    }
                }
            }
        }
        Self::from_map(map)
    }

    /// Splits into `(a, b)` with `self = a + b * r_i`, both free of `r_i`.
    pub fn split_on(&self, i: u32) -> (Self, Self) {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (s, p) in &self.parts {
            if let Some(pos) = s.iter().position(|&x| x == i) {
                let mut t = s.clone();
                t.remove(pos);
                b.push((t, p.clone()));
            } else {
                a.push((s.clone(), p.clone()));
            }
        }
        b.sort_by(|x, y| x.0.cmp(&y.0));
        (RadPoly { parts: a }, RadPoly { parts: b })
    }

    pub fn times_radical(&self, i: u32, env: &ParamEnv) -> Self {
        let mut r = RadSet::new();
        r.push(i);
        self.mul(&RadPoly::single(r, Poly::one()), env)
    }

    pub fn div_poly_exact(&self, d: &Poly) -> Option<Self> {
        let mut parts = Vec::with_capacity(self.parts.len());
        for (s, p) in &self.parts {
            parts.push((s.clone(), p.div_exact(d)?));
        }
        Some(RadPoly { parts })
    }

    fn div_poly(&self, d: &Poly) -> Self {
        self.div_poly_exact(d).expect("inexact division by common factor")
    }

    /// `(acc, norm)` with `self * acc = norm` and `norm` radical-free.
    fn rationalizer(&self, env: &ParamEnv) -> (RadPoly, Poly) {
        if let [(s, c)] = self.parts.as_slice() {
            // Single term: multiply by the same radicals.
            let mut norm = c.clone();
            for r in env.radicands(s) {
                norm = norm.mul(&r);
            }
            return (RadPoly::single(s.clone(), Poly::one()), norm);
        }
        let mut acc = RadPoly::from_poly(Poly::one());
        let mut n = self.clone();
        while let Some(&i) = n.radicals().last() {
            let (a, b) = n.split_on(i);
            let conj = a.sub(&b.times_radical(i, env));
            n = n.mul(&conj, env);
            acc = acc.mul(&conj, env);
        }
        (acc, n.as_poly().expect("conjugation removes all radicals"))
    }

    fn rewrite_split(&self, env: &ParamEnv) -> Self {
        let mut map: BTreeMap<RadSet, Poly> = BTreeMap::new();
        for (s, p) in &self.parts {
            let mut set: RadSet = s.iter().flat_map(|&i| env.resolve(i)).collect();
            set.sort_unstable();
            map.insert(set, p.clone());
        }
        Self::from_map(map)
    }
}

/// Symmetric difference and intersection of two sorted sets.
fn sym_diff(a: &RadSet, b: &RadSet) -> (RadSet, RadSet) {
    let mut out = RadSet::new();
    let mut shared = RadSet::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                shared.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    (out, shared)
}

/// Canonical exact expression over a [`ParamEnv`].
#[derive(Clone)]
pub struct Expr {
    env: ParamEnv,
    num: RadPoly,
    den: Poly,
    epoch: u64,
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other).unwrap_or(false)
    }
}

impl Expr {
    pub fn zero(env: &ParamEnv) -> Expr {
        Expr { env: env.clone(), num: RadPoly::zero(), den: Poly::one(), epoch: env.epoch() }
    }

    pub fn one(env: &ParamEnv) -> Expr {
        Self::from_int(env, 1)
    }

    pub fn from_int(env: &ParamEnv, n: i64) -> Expr {
        Self::from_poly(env, Poly::constant(BigInt::from(n)))
    }

    /// Exact rational constant.
    pub fn constant(env: &ParamEnv, q: &BigRational) -> Expr {
        Self::build(
            env,
            RadPoly::from_poly(Poly::constant(q.numer().clone())),
            Poly::constant(q.denom().clone()),
        )
    }

    pub fn symbol(env: &ParamEnv, sym: Symbol) -> Expr {
        Self::from_poly(env, Poly::var(sym.index()))
    }

    /// Looks up `name` in `env`.
    pub fn var(env: &ParamEnv, name: &str) -> Result<Expr, KernelError> {
        Ok(Self::symbol(env, env.symbol(name)?))
    }

    pub(crate) fn from_poly(env: &ParamEnv, p: Poly) -> Expr {
        Expr { env: env.clone(), num: RadPoly::from_poly(p), den: Poly::one(), epoch: env.epoch() }
    }

    /// Canonicalizes `num / den`.
    fn build(env: &ParamEnv, num: RadPoly, den: Poly) -> Expr {
        let epoch = env.epoch();
        Self::build_at(env, num, den, epoch)
    }

    fn build_at(env: &ParamEnv, num: RadPoly, den: Poly, epoch: u64) -> Expr {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Expr { env: env.clone(), num, den: Poly::one(), epoch };
        }
        let mut g = den.clone();
        if !g.is_one() {
            for c in num.coeffs() {
                g = gcd(&g, c);
                if g.is_one() {
                    break;
                }
            }
        }
        Self::finish(env, num, den, g, epoch)
    }

    fn finish(env: &ParamEnv, num: RadPoly, den: Poly, g: Poly, epoch: u64) -> Expr {
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_poly(&g), den.div_exact(&g).expect("gcd divides denominator"))
        };
        if den.is_leading_negative() {
            num = num.neg();
            den = den.neg();
        }
        Expr { env: env.clone(), num, den, epoch }
    }

    pub fn env(&self) -> &ParamEnv {
        &self.env
    }

    pub(crate) fn denominator(&self) -> &Poly {
        &self.den
    }

    /// `(numerator, denominator)` with `self == n / d`; `d` never holds a radical.
    pub fn fraction(&self) -> (Expr, Expr) {
        let me = self.fresh();
        let num = Expr { env: me.env.clone(), num: me.num.clone(), den: Poly::one(), epoch: me.epoch };
        (num, Expr::from_poly(&me.env, me.den.clone()))
    }

    /// Multiplies by a polynomial, used to clear denominators.
    pub(crate) fn mul_poly(&self, p: &Poly) -> Expr {
        self * &Expr::from_poly(&self.env, p.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.as_poly().map(|p| p.is_one()).unwrap_or(false)
    }

    /// True when no radical occurs (a plain rational function).
    pub fn is_radical_free(&self) -> bool {
        self.fresh().num.as_poly().is_some()
    }

    /// Denominator is one: the value lies in the polynomial ring.
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Number of monomials in the numerator, used as a size measure.
    pub fn numerator_terms(&self) -> usize {
        self.num.term_count()
    }

    /// Value as an exact rational if the expression is a rational constant.
    pub fn as_rational(&self) -> Option<BigRational> {
        let n = self.fresh().num.as_poly()?.constant_value()?;
        let d = self.den.constant_value()?;
        Some(BigRational::new(n, d))
    }

    /// Symbols occurring anywhere in the expression, radicands included.
    pub fn free_symbols(&self) -> Vec<Symbol> {
        let this = self.fresh();
        let mut vars: Vec<usize> = this.den.vars();
        for c in this.num.coeffs() {
            vars.extend(c.vars());
        }
        for r in this.env.radicands(&this.num.radicals()) {
            vars.extend(r.vars());
        }
        vars.sort_unstable();
        vars.dedup();
        vars.into_iter().map(|v| Symbol(v as u32)).collect()
    }

    fn same_env(&self, other: &Expr) -> Result<(), KernelError> {
        if self.env.ptr_eq(&other.env) {
            Ok(())
        } else {
            Err(KernelError::EnvMismatch)
        }
    }

    /// Rewrites radicals that were split after this expression was built.
    fn fresh(&self) -> Cow<'_, Expr> {
        let now = self.env.epoch();
        if self.epoch == now || !self.num.radicals().iter().any(|&i| self.env.is_split(i)) {
            return Cow::Borrowed(self);
        }
        Cow::Owned(Expr {
            env: self.env.clone(),
            num: self.num.rewrite_split(&self.env),
            den: self.den.clone(),
            epoch: now,
        })
    }

    /// Structural equality of canonical forms.
    pub fn equals(&self, other: &Expr) -> Result<bool, KernelError> {
        self.same_env(other)?;
        let a = self.fresh();
        let b = other.fresh();
        Ok(a.den == b.den && a.num == b.num)
    }

    pub fn try_add(&self, other: &Expr) -> Result<Expr, KernelError> {
        self.same_env(other)?;
        let epoch = self.env.epoch();
        let a = self.fresh();
        let b = other.fresh();
        if a.is_zero() {
            return Ok(b.into_owned());
        }
        if b.is_zero() {
            return Ok(a.into_owned());
        }
        if a.den == b.den {
            return Ok(Self::build_at(&self.env, a.num.add(&b.num), a.den.clone(), epoch));
        }
        // With both operands reduced, any common factor of the sum divides gcd(den_a, den_b).
        let g = gcd(&a.den, &b.den);
        let da = a.den.div_exact(&g).expect("gcd divides");
        let db = b.den.div_exact(&g).expect("gcd divides");
        let num = a.num.mul_poly(&db).add(&b.num.mul_poly(&da));
        let den = a.den.mul(&db);
        if num.is_zero() {
            return Ok(Self::zero(&self.env));
        }
        let mut h = g;
        if !h.is_one() {
            for c in num.coeffs() {
                h = gcd(&h, c);
                if h.is_one() {
                    break;
                }
            }
        }
        Ok(Self::finish(&self.env, num, den, h, epoch))
    }

    pub fn try_sub(&self, other: &Expr) -> Result<Expr, KernelError> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Expr) -> Result<Expr, KernelError> {
        self.same_env(other)?;
        let epoch = self.env.epoch();
        let a = self.fresh();
        let b = other.fresh();
        if a.is_zero() || b.is_zero() {
            return Ok(Self::zero(&self.env));
        }
        let num = a.num.mul(&b.num, &self.env);
        Ok(Self::build_at(&self.env, num, a.den.mul(&b.den), epoch))
    }

    /// Multiplicative inverse; radicals are moved into the numerator.
    pub fn inv(&self) -> Result<Expr, KernelError> {
        let epoch = self.env.epoch();
        let a = self.fresh();
        if a.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        let (acc, norm) = a.num.rationalizer(&self.env);
        let num = acc.mul_poly(&a.den);
        Ok(Self::build_at(&self.env, num, norm, epoch))
    }

    pub fn checked_div(&self, other: &Expr) -> Result<Expr, KernelError> {
        self.same_env(other)?;
        self.try_mul(&other.inv()?)
    }

    fn neg_ref(&self) -> Expr {
        Expr { env: self.env.clone(), num: self.num.neg(), den: self.den.clone(), epoch: self.epoch }
    }

    pub fn scale_int(&self, k: i64) -> Expr {
        self * &Expr::from_int(&self.env, k)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i32) -> Result<Expr, KernelError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = Expr::one(&self.env);
        let mut b = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.try_mul(&b)?;
            }
            n >>= 1;
            if n > 0 {
                b = b.try_mul(&b)?;
            }
        }
        Ok(acc)
    }

    /// Exact square root under the positivity assumption.
    ///
    /// Square factors leave the radical; the square-free remainder is
    /// registered (or matched) in the environment.
    pub fn sqrt(&self) -> Result<Expr, KernelError> {
        let a = self.fresh();
        let n = a.num.as_poly().ok_or(KernelError::NestedRadical)?;
        if n.is_zero() {
            return Err(KernelError::ZeroRadicand);
        }
        let m = n.mul(&a.den);
        let (unit, factors) = squarefree(&m);
        if unit.is_negative() {
            return Err(KernelError::NegativeRadicand);
        }
        let (s, primes) = square_split(&unit);
        let mut outside = Poly::constant(s);
        let mut set = RadSet::new();
        for p in &primes {
            set.push(self.env.register_prime(p));
        }
        for (f, e) in &factors {
            if e / 2 > 0 {
                outside = outside.mul(&f.pow(e / 2));
            }
            if e % 2 == 1 {
                set.extend(self.env.register_poly(f));
            }
        }
        set.sort_unstable();
        Ok(Self::build(&self.env, RadPoly::single(set, outside), a.den.clone()))
    }

    /// The radical with registry index `i`.
    pub(crate) fn radical(env: &ParamEnv, i: u32) -> Expr {
        let mut s = RadSet::new();
        s.push(i);
        Expr { env: env.clone(), num: RadPoly::single(s, Poly::one()), den: Poly::one(), epoch: env.epoch() }
    }

    /// Exact partial derivative.
    pub fn diff(&self, sym: Symbol) -> Result<Expr, KernelError> {
        self.env.check_symbol(sym)?;
        let v = sym.index();
        let a = self.fresh();
        let env = &self.env;
        let mut dnum = Expr::zero(env);
        let mut half_log_derivs: HashMap<u32, Expr> = HashMap::new();
        for (set, c) in a.num.parts() {
            let dc = c.derivative(v);
            if !dc.is_zero() {
                dnum = dnum.try_add(&Self::build(env, RadPoly::single(set.clone(), dc), Poly::one()))?;
            }
            // d(r)/dv = r * p'/(2p)
            let mut factor = Expr::zero(env);
            for &i in set {
                half_log_derivs.entry(i).or_insert_with(|| {
                    let p = env.radicand(i);
                    let dp = p.derivative(v);
                    if dp.is_zero() {
                        Expr::zero(env)
                    } else {
                        Self::build(env, RadPoly::from_poly(dp), p.scale(&BigInt::from(2)))
                    }
                });
                factor = factor.try_add(&half_log_derivs[&i])?;
            }
            if !factor.is_zero() {
                let base = Self::build(env, RadPoly::single(set.clone(), c.clone()), Poly::one());
                dnum = dnum.try_add(&base.try_mul(&factor)?)?;
            }
        }
        let den = Expr::from_poly(env, a.den.clone());
        let dden = a.den.derivative(v);
        let mut top = dnum;
        if !dden.is_zero() {
            let correction = a.try_mul(&Expr::from_poly(env, dden))?;
            top = top.try_sub(&correction)?;
        }
        top.checked_div(&den)
    }

    /// Substitutes exact positive values; unbound symbols stay symbolic.
    pub fn substitute(&self, bindings: &Bindings) -> Result<Expr, KernelError> {
        for (s, q) in bindings {
            self.env.check_symbol(*s)?;
            if !q.is_positive() {
                return Err(KernelError::NonPositiveBinding {
                    symbol: self.env.name(*s),
                    value: q.to_string(),
                });
            }
        }
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        let vals: Vec<(usize, BigRational)> = bindings.iter().map(|(s, q)| (s.index(), q.clone())).collect();
        let env = &self.env;
        let a = self.fresh();
        let subst_poly = |p: &Poly| -> Expr {
            let (q, d) = p.substitute(&vals);
            Self::build(env, RadPoly::from_poly(q), Poly::constant(d))
        };
        let mut radical_values: HashMap<u32, Expr> = HashMap::new();
        let mut total = Expr::zero(env);
        for (set, c) in a.num.parts() {
            let mut term = subst_poly(c);
            for &i in set {
                if let std::collections::hash_map::Entry::Vacant(e) = radical_values.entry(i) {
                    let p = env.radicand(i);
                    let touched = vals.iter().any(|(v, _)| p.contains_var(*v));
                    let val = if touched { subst_poly(&p).sqrt()? } else { Expr::radical(env, i) };
                    e.insert(val);
                }
                term = term.try_mul(&radical_values[&i])?;
            }
            total = total.try_add(&term)?;
        }
        let den = subst_poly(&a.den);
        if den.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        total.checked_div(&den)
    }

    /// Floating-point value at a complete assignment.
    ///
    /// Polynomial parts are evaluated exactly; radicands are evaluated exactly
    /// and rooted in floating point as the final step.
    pub fn eval_f64(&self, values: &BTreeMap<Symbol, f64>) -> Result<f64, KernelError> {
        let n = self.env.symbol_count();
        let mut point: Vec<Option<BigRational>> = vec![None; n];
        for (s, x) in values {
            self.env.check_symbol(*s)?;
            point[s.index()] = BigRational::from_float(*x);
        }
        let a = self.fresh();
        let unbound = |p: &Poly| -> KernelError {
            let v = p
                .vars()
                .into_iter()
                .find(|v| point.get(*v).map(|x| x.is_none()).unwrap_or(true))
                .unwrap_or(0);
            KernelError::UnboundSymbol(self.env.name(Symbol(v as u32)))
        };
        let eval = |p: &Poly| -> Result<BigRational, KernelError> {
            p.eval_rational(&point).ok_or_else(|| unbound(p))
        };
        let mut roots: HashMap<u32, f64> = HashMap::new();
        let mut total = 0.0;
        for (set, c) in a.num.parts() {
            let mut term = rational_to_f64(&eval(c)?);
            for &i in set {
                if let std::collections::hash_map::Entry::Vacant(e) = roots.entry(i) {
                    let p = self.env.radicand(i);
                    e.insert(rational_to_f64(&eval(&p)?).sqrt());
                }
                term *= roots[&i];
            }
            total += term;
        }
        Ok(total / rational_to_f64(&eval(&a.den)?))
    }

    /// Convenience wrapper over [`Expr::eval_f64`] taking symbol names.
    pub fn eval_named(&self, values: &[(&str, f64)]) -> Result<f64, KernelError> {
        let mut map = BTreeMap::new();
        for (name, x) in values {
            map.insert(self.env.symbol(name)?, *x);
        }
        self.eval_f64(&map)
    }

    /// Exact division inside the polynomial ring extended by radicals.
    ///
    /// Both operands must have denominator one; returns `None` when the
    /// quotient is not integral.
    pub fn div_exact_integral(&self, d: &Expr) -> Option<Expr> {
        if !self.den.is_one() || !d.den.is_one() || d.is_zero() {
            return None;
        }
        let epoch = self.env.epoch();
        let a = self.fresh();
        let b = d.fresh();
        let num = match b.num.as_poly() {
            Some(p) => a.num.div_poly_exact(&p)?,
            None => {
                let (acc, norm) = b.num.rationalizer(&self.env);
                a.num.mul(&acc, &self.env).div_poly_exact(&norm)?
            }
        };
        Some(Expr { env: self.env.clone(), num, den: Poly::one(), epoch })
    }

    /// Parts for rendering: `(radical set, coefficient)` pairs and the denominator.
    pub(crate) fn render_parts(&self) -> (Vec<(Vec<u32>, Poly)>, Poly) {
        let a = self.fresh();
        (a.num.parts().iter().map(|(s, p)| (s.to_vec(), p.clone())).collect(), a.den.clone())
    }

    /// Highest multiplicity of a single radical within one numerator term;
    /// at most one for every canonical value.
    pub fn max_radical_degree(&self) -> u32 {
        self.num
            .parts()
            .iter()
            .map(|(s, _)| {
                let mut counts: HashMap<u32, u32> = HashMap::new();
                for i in s {
                    *counts.entry(*i).or_default() += 1;
                }
                counts.values().copied().max().unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }
}

fn rational_to_f64(q: &BigRational) -> f64 {
    match q.to_f64() {
        Some(x) if x.is_finite() => x,
        _ => bigint_to_f64(q.numer()) / bigint_to_f64(q.denom()),
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $call:ident) => {
        impl $trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                self.$call(rhs).expect("expressions from different environments")
            }
        }
        impl $trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                (&self).$method(rhs)
            }
        }
        impl $trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.neg_ref()
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env() -> ParamEnv {
        ParamEnv::with_symbols(&["EA", "L", "H", "P"]).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn constants_are_normalized() {
        let e = env();
        let z = Expr::constant(&e, &q(0, 5));
        assert!(z.is_zero());
        assert!(z.den.is_one());
        let t = Expr::constant(&e, &q(2, 3));
        assert_eq!(t.num.as_poly().unwrap(), Poly::constant(2.into()));
        assert_eq!(t.den, Poly::constant(3.into()));
        let m = Expr::constant(&e, &q(-1, 1));
        assert_eq!(m.den, Poly::one());
        assert_eq!(m.as_rational(), Some(q(-1, 1)));
        let n = Expr::constant(&e, &q(4, -6));
        assert_eq!(n.as_rational(), Some(q(-2, 3)));
        assert!(n.den.leading_coeff().unwrap().is_positive());
    }

    #[test]
    fn cancellation_and_radical_reduction() {
        let e = env();
        let p = Expr::var(&e, "P").unwrap();
        assert!((&p - &p).is_zero());
        let five = Expr::from_int(&e, 5).sqrt().unwrap();
        let a = (&five * &p).checked_div(&Expr::from_int(&e, 3)).unwrap();
        let prod = &a * &five;
        let expect = (&Expr::from_int(&e, 5) * &p).checked_div(&Expr::from_int(&e, 3)).unwrap();
        assert_eq!(prod, expect);
    }

    #[test]
    fn division_rationalizes() {
        let e = env();
        let h = Expr::var(&e, "H").unwrap();
        let l = Expr::var(&e, "L").unwrap();
        let p = Expr::var(&e, "P").unwrap();
        let rad = (&(&h * &h).scale_int(4) + &(&l * &l)).sqrt().unwrap();
        let x = p.checked_div(&rad).unwrap();
        assert!(x.den.vars().iter().all(|&v| v < e.symbol_count()));
        let radicand = &(&h * &h).scale_int(4) + &(&l * &l);
        let expect = (&p * &rad).checked_div(&radicand).unwrap();
        assert_eq!(x, expect);
    }

    #[test]
    fn sqrt_extracts_squares() {
        let e = env();
        let h = Expr::var(&e, "H").unwrap();
        let l = Expr::var(&e, "L").unwrap();
        assert_eq!((&h * &h).scale_int(4).sqrt().unwrap(), h.scale_int(2));
        let two_l2 = (&l * &l).scale_int(2);
        let r = two_l2.sqrt().unwrap();
        assert_eq!(&r * &r, two_l2);
        let sqrt2 = Expr::from_int(&e, 2).sqrt().unwrap();
        assert_eq!(r, &l * &sqrt2);
        let eight = (&l * &l).scale_int(8).sqrt().unwrap();
        assert_eq!(eight, (&l * &sqrt2).scale_int(2));
        assert_eq!(Expr::zero(&e).sqrt(), Err(KernelError::ZeroRadicand));
        assert_eq!(sqrt2.sqrt(), Err(KernelError::NestedRadical));
        assert_eq!(Expr::from_int(&e, -3).sqrt(), Err(KernelError::NegativeRadicand));
    }

    #[test]
    fn radicals_are_shared_and_independent() {
        let e = env();
        let s2 = Expr::from_int(&e, 2).sqrt().unwrap();
        let s3 = Expr::from_int(&e, 3).sqrt().unwrap();
        let s6 = Expr::from_int(&e, 6).sqrt().unwrap();
        assert_eq!(&s2 * &s3, s6);
        assert_eq!(e.radical_count(), 2);
        let inv = s2.inv().unwrap();
        assert_eq!(&inv * &s2, Expr::one(&e));
    }

    #[test]
    fn mixed_radical_denominator() {
        let e = env();
        let s2 = Expr::from_int(&e, 2).sqrt().unwrap();
        let s5 = Expr::from_int(&e, 5).sqrt().unwrap();
        let l = Expr::var(&e, "L").unwrap();
        let d = &(&s2 * &l) + &s5;
        let inv = d.inv().unwrap();
        assert_eq!(&inv * &d, Expr::one(&e));
        assert!(inv.den.vars().len() <= 1);
    }

    #[test]
    fn split_radicals_stay_consistent() {
        let e = ParamEnv::with_symbols(&["x", "y"]).unwrap();
        let x = Expr::var(&e, "x").unwrap();
        let y = Expr::var(&e, "y").unwrap();
        let one = Expr::one(&e);
        let a = &x + &one;
        let b = &y + &one;
        let rab = (&a * &b).sqrt().unwrap();
        let ra = a.sqrt().unwrap();
        let rb = b.sqrt().unwrap();
        assert_eq!(&ra * &rb, rab);
        assert_eq!((&rab - &(&ra * &rb)), Expr::zero(&e));
    }

    #[test]
    fn derivative_through_radical() {
        let e = env();
        let h = Expr::var(&e, "H").unwrap();
        let l = Expr::var(&e, "L").unwrap();
        let lsym = e.symbol("L").unwrap();
        let radicand = &(&h * &h).scale_int(4) + &(&l * &l);
        let r = radicand.sqrt().unwrap();
        // d/dL sqrt(4H^2 + L^2) = L / sqrt(4H^2 + L^2)
        assert_eq!(r.diff(lsym).unwrap(), l.checked_div(&r).unwrap());
        assert!(Expr::from_int(&e, 7).diff(lsym).unwrap().is_zero());
        assert!(r.diff(Symbol(99)).is_err());
    }

    #[test]
    fn substitution_collapses_radicals() {
        let e = env();
        let h = Expr::var(&e, "H").unwrap();
        let l = Expr::var(&e, "L").unwrap();
        let r = (&(&h * &h).scale_int(4) + &(&l * &l)).sqrt().unwrap();
        let mut b = Bindings::new();
        b.insert(e.symbol("L").unwrap(), q(6, 1));
        b.insert(e.symbol("H").unwrap(), q(4, 1));
        // sqrt(64 + 36) = 10
        assert_eq!(r.substitute(&b).unwrap(), Expr::from_int(&e, 10));
        let mut bad = Bindings::new();
        bad.insert(e.symbol("L").unwrap(), q(-1, 1));
        assert!(matches!(r.substitute(&bad), Err(KernelError::NonPositiveBinding { .. })));
        assert_eq!(r.substitute(&Bindings::new()).unwrap(), r);
    }

    #[test]
    fn float_evaluation() {
        let e = env();
        let p = Expr::var(&e, "P").unwrap();
        let h = Expr::var(&e, "H").unwrap();
        let l = Expr::var(&e, "L").unwrap();
        let r = (&(&h * &h).scale_int(4) + &(&l * &l)).sqrt().unwrap();
        let x = -(&p * &r).checked_div(&l.scale_int(2)).unwrap();
        let v = x.eval_named(&[("L", 8.0), ("H", 6.0), ("P", 100.0)]).unwrap();
        assert!((v + 90.138_781_886_6).abs() < 1e-6, "{v}");
        assert!(matches!(x.eval_named(&[("L", 8.0)]), Err(KernelError::UnboundSymbol(_))));
        assert_eq!(Expr::zero(&e).eval_named(&[]).unwrap(), 0.0);
    }

    #[test]
    fn integral_exact_division() {
        let e = env();
        let s2 = Expr::from_int(&e, 2).sqrt().unwrap();
        let l = Expr::var(&e, "L").unwrap();
        let a = &(&l + &s2) * &(&l - &s2.scale_int(3));
        let b = &l + &s2;
        assert_eq!(a.div_exact_integral(&b).unwrap(), &l - &s2.scale_int(3));
        assert!(l.div_exact_integral(&b).is_none());
    }

    #[test]
    fn never_squares_a_radical() {
        let e = env();
        let s2 = Expr::from_int(&e, 2).sqrt().unwrap();
        let s5 = Expr::from_int(&e, 5).sqrt().unwrap();
        let x = (&s2 + &s5).pow(5).unwrap();
        assert!(x.max_radical_degree() <= 1);
    }

    #[test]
    fn mismatched_environments() {
        let a = Expr::one(&env());
        let b = Expr::one(&env());
        assert_eq!(a.equals(&b), Err(KernelError::EnvMismatch));
        assert!(a.try_add(&b).is_err());
    }
}
