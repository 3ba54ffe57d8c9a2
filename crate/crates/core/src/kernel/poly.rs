//! Sparse multivariate polynomials with integer coefficients.
//!
//! Variables are plain indices; the owning [`ParamEnv`](super::ParamEnv)
//! maps them to symbol names. Terms are kept strictly descending under the
//! graded lexicographic order (total degree first, then variable 0 highest),
//! so the leading term is always `terms[0]`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

/// Exponent vector indexed by variable. Trailing zeros are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[u32; 6]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: usize, e: u32) -> Self {
        if e == 0 {
            return Self::one();
        }
        let mut exps = SmallVec::from_elem(0, v + 1);
        exps[v] = e;
        Monomial(exps)
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        let mut m = Monomial(SmallVec::from_slice(exps));
        m.trim();
        m
    }

    fn trim(&mut self) {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exp(&self, v: usize) -> u32 {
        self.0.get(v).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.0.len() >= other.0.len() { (self, other) } else { (other, self) };
        let mut exps = long.0.clone();
        for (e, s) in exps.iter_mut().zip(short.0.iter()) {
            *e += s;
        }
        Monomial(exps)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut exps = self.0.clone();
        for (e, o) in exps.iter_mut().zip(other.0.iter()) {
            if *e < *o {
                return None;
            }
            *e -= o;
        }
        let mut m = Monomial(exps);
        m.trim();
        Some(m)
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut m = Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.min(b)).collect());
        m.trim();
        m
    }

    /// Drops variable `v` from the exponent vector.
    fn without(&self, v: usize) -> Monomial {
        let mut m = self.clone();
        if v < m.0.len() {
            m.0[v] = 0;
            m.trim();
        }
        m
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for v in 0..n {
                let c = self.exp(v).cmp(&other.exp(v));
                if c != Ordering::Equal {
                    return c;
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, e) in self.0.iter().enumerate() {
            if *e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "x{v}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial over the integers in finitely many variables.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Monomial, BigInt)>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{m:?}")?;
        }
        Ok(())
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(Monomial::one(), c)] }
        }
    }

    pub fn var(v: usize) -> Self {
        Poly { terms: vec![(Monomial::var(v, 1), BigInt::one())] }
    }

    pub fn monomial(m: Monomial, c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_default() += c;
        }
        Self::from_map(acc)
    }

    fn from_map(acc: HashMap<Monomial, BigInt>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, BigInt)] {
        &self.terms
    }

    #[allow(clippy::len_without_is_empty)] // `is_zero` is the emptiness test
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    /// Value of a constant polynomial.
    pub fn constant_value(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.terms.first().map(|t| &t.1)
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|t| t.0.degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|t| t.0.exp(v)).max().unwrap_or(0)
    }

    /// Number of variable slots touched by any term.
    pub fn var_span(&self) -> usize {
        self.terms.iter().map(|t| t.0 .0.len()).max().unwrap_or(0)
    }

    pub fn contains_var(&self, v: usize) -> bool {
        self.terms.iter().any(|t| t.0.exp(v) > 0)
    }

    /// Sorted list of variables that occur.
    pub fn vars(&self) -> Vec<usize> {
        let n = self.var_span();
        (0..n).filter(|&v| self.contains_var(v)).collect()
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        Poly { terms: out }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        if self.terms.len() == 1 {
            return other.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        if other.terms.len() == 1 {
            return self.mul_term(&other.terms[0].0, &other.terms[0].1);
        }
        let mut acc: HashMap<Monomial, BigInt> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let prod = ca * cb;
                match acc.get_mut(&m) {
                    Some(c) => *c += prod,
                    None => {
                        acc.insert(m, prod);
                    }
                }
            }
        }
        Self::from_map(acc)
    }

    /// Multiplication by a single term keeps the term order.
    pub fn mul_term(&self, m: &Monomial, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(tm, tc)| (tm.mul(m), tc * c)).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Poly { terms: self.terms.iter().map(|(m, t)| (m.clone(), t * c)).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact division of every coefficient by an integer.
    pub fn div_int(&self, c: &BigInt) -> Poly {
        if c.is_one() {
            return self.clone();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, t)| {
                    debug_assert!((t % c).is_zero(), "inexact integer division");
                    (m.clone(), t / c)
                })
                .collect(),
        }
    }

    /// `self / other` if the division is exact in Z[x], otherwise `None`.
    pub fn div_exact(&self, other: &Poly) -> Option<Poly> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = other.constant_value() {
            if self.terms.iter().all(|(_, t)| (t % &c).is_zero()) {
                return Some(self.div_int(&c));
            }
            return None;
        }
        let (lm, lc) = (&other.terms[0].0, &other.terms[0].1);
        if other.terms.len() == 1 {
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                let q = m.div(lm)?;
                let (qc, r) = c.div_rem(lc);
                if !r.is_zero() {
                    return None;
                }
                terms.push((q, qc));
            }
            return Some(Poly { terms });
        }
        if self.total_degree() < other.total_degree() {
            return None;
        }
        let mut rem: BTreeMap<Monomial, BigInt> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        while let Some((m, c)) = rem.pop_last() {
            let qm = m.div(lm)?;
            let (qc, r) = c.div_rem(lc);
            if !r.is_zero() {
                return None;
            }
            for (om, oc) in other.terms.iter().skip(1) {
                let key = om.mul(&qm);
                let delta = oc * &qc;
                match rem.get_mut(&key) {
                    Some(v) => {
                        *v -= delta;
                        if v.is_zero() {
                            rem.remove(&key);
                        }
                    }
                    None => {
                        rem.insert(key, -delta);
                    }
                }
            }
            quot.push((qm, qc));
        }
        Some(Poly { terms: quot })
    }

    /// Gcd of the integer coefficients, always non-negative.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.0.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn div_monomial(&self, m: &Monomial) -> Poly {
        if m.is_one() {
            return self.clone();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(tm, c)| (tm.div(m).expect("monomial does not divide"), c.clone()))
                .collect(),
        }
    }

    /// Divides out the integer content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = self.content();
        if self.terms[0].1.is_negative() {
            c = -c;
        }
        self.div_int(&c)
    }

    pub fn is_leading_negative(&self) -> bool {
        self.terms.first().map(|t| t.1.is_negative()).unwrap_or(false)
    }

    /// Coefficients with respect to `v`, indexed by degree.
    pub fn coeffs_in(&self, v: usize) -> Vec<Poly> {
        let d = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, BigInt)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            buckets[m.exp(v) as usize].push((m.without(v), c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut terms| {
                terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                Poly { terms }
            })
            .collect()
    }

    /// Inverse of [`Poly::coeffs_in`].
    pub fn from_coeffs_in(v: usize, coeffs: &[Poly]) -> Poly {
        let mut terms = Vec::new();
        for (d, c) in coeffs.iter().enumerate() {
            let xm = Monomial::var(v, d as u32);
            for (m, t) in &c.terms {
                terms.push((m.mul(&xm), t.clone()));
            }
        }
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn derivative(&self, v: usize) -> Poly {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[v] -= 1;
            let mut nm = Monomial(exps);
            nm.trim();
            terms.push((nm, c * BigInt::from(e)));
        }
        // Lowering one exponent can reorder terms across degrees.
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    /// Substitutes `x_v = num/den` for every bound variable.
    ///
    /// Returns `(p, d)` with `self(values) = p / d`, `p` integral.
    pub fn substitute(&self, values: &[(usize, BigRational)]) -> (Poly, BigInt) {
        let mut p = self.clone();
        let mut den = BigInt::one();
        for (v, q) in values {
            let d = p.degree_in(*v);
            if d == 0 {
                continue;
            }
            let (a, b) = (q.numer(), q.denom());
            let mut a_pows = vec![BigInt::one()];
            let mut b_pows = vec![BigInt::one()];
            for k in 1..=d as usize {
                a_pows.push(&a_pows[k - 1] * a);
                b_pows.push(&b_pows[k - 1] * b);
            }
            let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
            for (m, c) in &p.terms {
                let e = m.exp(*v) as usize;
                let coeff = c * &a_pows[e] * &b_pows[d as usize - e];
                *acc.entry(m.without(*v)).or_default() += coeff;
            }
            p = Self::from_map(acc);
            den *= &b_pows[d as usize];
        }
        (p, den)
    }

    /// Exact value at a fully specified rational point.
    pub fn eval_rational(&self, values: &[Option<BigRational>]) -> Option<BigRational> {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (v, e) in m.0.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                let x = values.get(v)?.as_ref()?;
                t *= num_traits::pow(x.clone(), *e as usize);
            }
            total += t;
        }
        Some(total)
    }

    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = bigint_to_f64(c);
                for (v, e) in m.0.iter().enumerate() {
                    if *e > 0 {
                        t *= values[v].powi(*e as i32);
                    }
                }
                t
            })
            .sum()
    }
}

pub(crate) fn bigint_to_f64(c: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(f64::NAN)
}
