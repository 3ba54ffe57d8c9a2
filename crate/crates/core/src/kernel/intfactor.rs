//! Integer factorization for extracting square factors from numeric radicands.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

const TRIAL_LIMIT: u32 = 10_000;

/// Prime factorization of `n > 0` as `(prime, multiplicity)` pairs, ascending.
pub fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    assert!(n.is_positive(), "factor expects a positive integer");
    let mut n = n.clone();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let push = |p: BigInt, out: &mut Vec<(BigInt, u32)>| {
        if let Some(e) = out.iter_mut().find(|(q, _)| *q == p) {
            e.1 += 1;
        } else {
            out.push((p, 1));
        }
    };
    let mut d = 2u32;
    while d <= TRIAL_LIMIT {
        let bd = BigInt::from(d);
        if &bd * &bd > n {
            break;
        }
        while (&n % &bd).is_zero() {
            n /= &bd;
            push(bd.clone(), &mut out);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !n.is_one() {
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if m.is_one() {
                continue;
            }
            if is_probable_prime(&m) {
                push(m, &mut out);
                continue;
            }
            let f = pollard_brent(&m);
            if f == m {
                push(m, &mut out);
                continue;
            }
            stack.push(&m / &f);
            stack.push(f);
        }
    }
    out.sort();
    out
}

/// Splits `n > 0` into `(s, t)` with `n = s^2 * t` and `t` square-free.
pub fn square_split(n: &BigInt) -> (BigInt, Vec<BigInt>) {
    let mut s = BigInt::one();
    let mut t = Vec::new();
    for (p, e) in factor(n) {
        s *= num_traits::pow(p.clone(), (e / 2) as usize);
        if e % 2 == 1 {
            t.push(p);
        }
    }
    (s, t)
}

fn is_probable_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let bp = BigInt::from(p);
        if n == &bp {
            return true;
        }
        if (n % &bp).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut r = 0;
    while d.is_even() {
        d >>= 1;
        r += 1;
    }
    // Deterministic for n < 3.3e24, probabilistic beyond.
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..r {
            x = x.modpow(&BigInt::from(2), n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigInt) -> BigInt {
    if n.is_even() {
        return BigInt::from(2);
    }
    let r = n.sqrt();
    if &r * &r == *n {
        return r;
    }
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut m = 1u64;
        let mut g = BigInt::one();
        let mut q = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..m {
                y = f(&y);
            }
            let mut k = 0u64;
            while k < m && g.is_one() {
                ys = y.clone();
                for _ in 0..(128.min(m - k)) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += 128;
            }
            m *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1;
        if c.to_u32().unwrap_or(u32::MAX) > 64 {
            // Give up splitting; treat as prime. Only reachable for
            // adversarial inputs far beyond model-file magnitudes.
            return n.clone();
        }
    }
}
