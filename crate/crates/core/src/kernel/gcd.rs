//! Multivariate gcd over Z[x] and square-free decomposition.
//!
//! A heuristic gcd (evaluate at a large integer, recurse, interpolate, verify
//! by division) is tried first. When it gives up, the gcd recurses on one
//! main variable at a time: contents are taken recursively over the remaining
//! variables and the primitive parts are reduced with the subresultant
//! pseudo-remainder sequence.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;

use super::poly::Poly;

/// Greatest common divisor, normalized to a positive leading coefficient.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return normalize(b);
    }
    if b.is_zero() {
        return normalize(a);
    }
    let ca = a.content();
    let cb = b.content();
    let c = ca.gcd(&cb);
    if a.is_constant() || b.is_constant() {
        return Poly::constant(c);
    }
    if a == b {
        return normalize(a);
    }
    let a = a.div_int(&ca);
    let b = b.div_int(&cb);
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let m = ma.gcd(&mb);
    let a = a.div_monomial(&ma);
    let b = b.div_monomial(&mb);
    let g = gcd_primitive(&a, &b);
    normalize(&g.mul_term(&m, &c))
}

/// Gcd of a whole list; stops early once the result is a unit.
pub fn gcd_many<'a>(polys: impl IntoIterator<Item = &'a Poly>) -> Poly {
    let mut g = Poly::zero();
    for p in polys {
        g = gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    g
}

fn normalize(p: &Poly) -> Poly {
    if p.is_leading_negative() {
        p.neg()
    } else {
        p.clone()
    }
}

// Both inputs have unit integer content and no monomial content.
fn gcd_primitive(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return normalize(a);
    }
    let va = a.vars();
    let vb = b.vars();
    if let Some(&v) = va.iter().find(|v| !vb.contains(v)) {
        return gcd_with_coeffs(b, &a.coeffs_in(v));
    }
    if let Some(&v) = vb.iter().find(|v| !va.contains(v)) {
        return gcd_with_coeffs(a, &b.coeffs_in(v));
    }
    // Cheap divisibility shortcut before running a remainder sequence.
    if a.len() <= b.len() {
        if b.div_exact(a).is_some() {
            return normalize(a);
        }
    } else if a.div_exact(b).is_some() {
        return normalize(b);
    }
    if let Some(g) = heuristic_gcd(a, b) {
        return normalize(&g);
    }
    let v = *va
        .iter()
        .min_by_key(|&&v| (a.degree_in(v).max(b.degree_in(v)), std::cmp::Reverse(v)))
        .expect("non-constant polynomial has a variable");
    let ua = a.coeffs_in(v);
    let ub = b.coeffs_in(v);
    let conta = gcd_many(ua.iter());
    let contb = gcd_many(ub.iter());
    let cont = gcd(&conta, &contb);
    let pa: Vec<Poly> = ua.iter().map(|c| exact(c, &conta)).collect();
    let pb: Vec<Poly> = ub.iter().map(|c| exact(c, &contb)).collect();
    let g = subresultant_gcd(pa, pb);
    normalize(&Poly::from_coeffs_in(v, &g).mul(&cont))
}

fn max_norm(p: &Poly) -> BigInt {
    p.terms().iter().map(|(_, c)| c.abs()).max().unwrap_or_default()
}

/// Beyond this many bits in the evaluation point the subresultant route is
/// cheaper than carrying the huge integer images.
const HEU_MAX_BITS: u64 = 1 << 16;

/// Gcd by evaluation at `x_v = xi` and symmetric-residue interpolation.
///
/// A candidate is accepted only if it divides both inputs exactly, which,
/// with `xi > 2 * min(|a|, |b|) + 2`, proves it is the gcd.
fn heuristic_gcd(a: &Poly, b: &Poly) -> Option<Poly> {
    if a.is_constant() || b.is_constant() {
        let c = a.content().gcd(&b.content());
        return Some(Poly::constant(c));
    }
    let (ca, cb) = (a.content(), b.content());
    let c = ca.gcd(&cb);
    let (a, b) = (a.div_int(&ca), b.div_int(&cb));
    let mut vars = a.vars();
    vars.extend(b.vars());
    let v = *vars.iter().max().expect("non-constant input");
    let mut xi = max_norm(&a).min(max_norm(&b)) * 2u32 + 29u32;
    for _ in 0..6 {
        if xi.bits() > HEU_MAX_BITS {
            return None;
        }
        let at = [(v, BigRational::from_integer(xi.clone()))];
        let (ea, eb) = (a.substitute(&at).0, b.substitute(&at).0);
        if !ea.is_zero() && !eb.is_zero() {
            if let Some(image) = heuristic_gcd(&ea, &eb) {
                let h = interpolate(&image, v, &xi).primitive();
                if !h.is_zero() && a.div_exact(&h).is_some() && b.div_exact(&h).is_some() {
                    return Some(h.scale(&c));
                }
            }
        }
        // Irrational-ish growth factor avoids cycling through related points.
        xi = &xi * 73794u32 * xi.sqrt().sqrt() / 27011u32;
    }
    None
}

/// Reads `image` as a polynomial in `x_v` whose integer coefficients are the
/// symmetric base-`xi` digits of the image's coefficients.
fn interpolate(image: &Poly, v: usize, xi: &BigInt) -> Poly {
    let half = xi / 2u32;
    let mut rest = image.clone();
    let mut digits = Vec::new();
    while !rest.is_zero() {
        let digit = Poly::from_terms(rest.terms().iter().map(|(m, c)| {
            let mut r = c.mod_floor(xi);
            if r > half {
                r -= xi;
            }
            (m.clone(), r)
        }));
        rest = rest.sub(&digit).div_int(xi);
        digits.push(digit);
    }
    Poly::from_coeffs_in(v, &digits)
}

fn gcd_with_coeffs(p: &Poly, coeffs: &[Poly]) -> Poly {
    let mut g = p.clone();
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn exact(a: &Poly, b: &Poly) -> Poly {
    a.div_exact(b).expect("exact division failed in gcd")
}

type Upoly = Vec<Poly>;

fn trim(u: &mut Upoly) {
    while u.last().map(|c| c.is_zero()).unwrap_or(false) {
        u.pop();
    }
}

fn udeg(u: &Upoly) -> usize {
    u.len() - 1
}

fn prem(f: &Upoly, g: &Upoly) -> Upoly {
    let dg = udeg(g);
    let lcg = &g[dg];
    let mut r = f.clone();
    let mut e = udeg(f) + 1 - dg;
    while !r.is_empty() && udeg(&r) >= dg {
        let dr = udeg(&r);
        let lcr = r[dr].clone();
        for c in r.iter_mut() {
            *c = c.mul(lcg);
        }
        let shift = dr - dg;
        for (j, gc) in g.iter().enumerate() {
            r[j + shift] = r[j + shift].sub(&lcr.mul(gc));
        }
        debug_assert!(r[dr].is_zero());
        trim(&mut r);
        e -= 1;
    }
    if e > 0 {
        let s = lcg.pow(e as u32);
        for c in r.iter_mut() {
            *c = c.mul(&s);
        }
    }
    r
}

// Inputs are primitive over the coefficient ring; returns a primitive gcd.
fn subresultant_gcd(mut a: Upoly, mut b: Upoly) -> Upoly {
    if udeg(&a) < udeg(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    let mut g = Poly::one();
    let mut h = Poly::one();
    loop {
        let delta = udeg(&a) - udeg(&b);
        let r = prem(&a, &b);
        if r.is_empty() {
            break;
        }
        if udeg(&r) == 0 {
            return vec![Poly::one()];
        }
        a = b;
        let divisor = g.mul(&h.pow(delta as u32));
        b = r.iter().map(|c| exact(c, &divisor)).collect();
        g = a[udeg(&a)].clone();
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => exact(&g.pow(delta as u32), &h.pow(delta as u32 - 1)),
        };
    }
    let cont = gcd_many(b.iter());
    let mut out: Upoly = b.iter().map(|c| exact(c, &cont)).collect();
    if out[udeg(&out)].is_leading_negative() {
        for c in out.iter_mut() {
            *c = c.neg();
        }
    }
    out
}

/// Square-free decomposition `p = unit * prod f_i^e_i`.
///
/// The factors are primitive, have positive leading coefficient, are pairwise
/// coprime, and each is square-free. `unit` is an integer carrying the sign
/// and the integer content of `p`. Factors with the same multiplicity are not
/// merged.
pub fn squarefree(p: &Poly) -> (BigInt, Vec<(Poly, u32)>) {
    assert!(!p.is_zero(), "square-free decomposition of zero");
    let mut unit = p.content();
    if p.is_leading_negative() {
        unit = -unit;
    }
    let mut out = Vec::new();
    sqf_rec(&p.div_int(&unit), &mut out);
    (unit, out)
}

fn sqf_rec(p: &Poly, out: &mut Vec<(Poly, u32)>) {
    if p.is_constant() {
        return;
    }
    let m = p.monomial_content();
    for (v, &e) in m.exponents().iter().enumerate() {
        if e > 0 {
            out.push((Poly::var(v), e));
        }
    }
    let p = p.div_monomial(&m);
    if p.is_constant() {
        return;
    }
    let v = p.vars()[0];
    let cont = gcd_many(p.coeffs_in(v).iter());
    let prim = exact(&p, &cont);
    sqf_rec(&cont, out);
    yun(&prim, v, out);
}

// Musser's algorithm for a polynomial primitive in `v` (characteristic 0).
fn yun(a: &Poly, v: usize, out: &mut Vec<(Poly, u32)>) {
    if a.degree_in(v) == 0 {
        return;
    }
    let da = a.derivative(v);
    let mut c = gcd(a, &da);
    let mut w = exact(a, &c);
    let mut i = 1;
    while !c.is_constant() {
        let y = gcd(&w, &c);
        let z = exact(&w, &y);
        if !z.is_constant() {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = exact(&c, &w);
    }
    if !w.is_constant() {
        out.push((w, i));
    }
}

/// `lcm(a, b)` with positive leading coefficient.
pub fn lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let g = gcd(a, b);
    normalize(&exact(a, &g).mul(b))
}
