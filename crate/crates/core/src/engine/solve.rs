//! Exact solution of the reduced system `K_ff * d_f = f_f`.
//!
//! The default route clears denominators row by row and runs fraction-free
//! (Bareiss) elimination in the ring of integral expressions, where every
//! division is exact. A second route eliminates directly over the field of
//! expressions; the two are interchangeable and are cross-checked in tests.

use crate::kernel::gcd::lcm;
use crate::kernel::poly::Poly;
use crate::kernel::Expr;

use super::par::{for_each_mut, Parallelism};
use super::{EngineError, SymMatrix};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SolveMethod {
    #[default]
    FractionFree,
    Field,
}

/// Solves `a * x = b` exactly.
pub fn solve_linear(
    a: &SymMatrix,
    b: &[Expr],
    method: SolveMethod,
    par: Parallelism,
) -> Result<Vec<Expr>, EngineError> {
    assert_eq!(a.rows(), a.cols(), "square system expected");
    assert_eq!(a.rows(), b.len(), "right-hand side length");
    if b.is_empty() {
        return Ok(Vec::new());
    }
    let rows: Vec<Vec<Expr>> = (0..a.rows())
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    match method {
        SolveMethod::FractionFree => bareiss(rows, par),
        SolveMethod::Field => gauss(rows, par),
    }
}

// Fewest numerator terms among nonzero candidates; ties go to the lowest row.
fn pick_pivot(rows: &[Vec<Expr>], k: usize) -> Option<usize> {
    (k..rows.len()).filter(|&i| !rows[i][k].is_zero()).min_by_key(|&i| (rows[i][k].numerator_terms(), i))
}

fn inexact() -> EngineError {
    EngineError::Invariant("fraction-free elimination hit an inexact division".into())
}

fn clear_denominators(row: &mut [Expr]) {
    let mut l = Poly::one();
    for e in row.iter() {
        if !e.is_zero() && !e.denominator().is_one() {
            l = lcm(&l, e.denominator());
        }
    }
    if !l.is_one() {
        for e in row.iter_mut() {
            *e = e.mul_poly(&l);
        }
    }
}

fn bareiss(mut rows: Vec<Vec<Expr>>, par: Parallelism) -> Result<Vec<Expr>, EngineError> {
    let n = rows.len();
    let env = rows[0][0].env().clone();
    for_each_mut(par, &mut rows, |r| clear_denominators(r));
    let mut prev = Expr::one(&env);
    for k in 0..n {
        let p = pick_pivot(&rows, k).ok_or(EngineError::Unstable)?;
        rows.swap(k, p);
        let (head, tail) = rows.split_at_mut(k + 1);
        let pivot_row = &head[k];
        let pivot = &pivot_row[k];
        let failed = std::sync::atomic::AtomicBool::new(false);
        for_each_mut(par, tail, |row| {
            let factor = row[k].clone();
            for j in k + 1..=n {
                let mut v = pivot * &row[j];
                if !factor.is_zero() && !pivot_row[j].is_zero() {
                    v = &v - &(&factor * &pivot_row[j]);
                }
                row[j] = if prev.is_one() {
                    v
                } else {
                    match v.div_exact_integral(&prev) {
                        Some(q) => q,
                        None => {
                            failed.store(true, std::sync::atomic::Ordering::Relaxed);
                            v
                        }
                    }
                };
            }
            row[k] = Expr::zero(pivot.env());
        });
        if failed.into_inner() {
            return Err(inexact());
        }
        prev = rows[k][k].clone();
    }
    // Fraction-free back substitution: X_i = det * x_i stays integral.
    let det = rows[n - 1][n - 1].clone();
    let mut big_x: Vec<Expr> = vec![Expr::zero(&env); n];
    for i in (0..n).rev() {
        let mut acc = &det * &rows[i][n];
        for j in i + 1..n {
            if !rows[i][j].is_zero() && !big_x[j].is_zero() {
                acc = &acc - &(&rows[i][j] * &big_x[j]);
            }
        }
        big_x[i] = acc.div_exact_integral(&rows[i][i]).ok_or_else(inexact)?;
    }
    big_x.iter().map(|x| x.checked_div(&det).map_err(EngineError::from)).collect()
}

fn gauss(mut rows: Vec<Vec<Expr>>, par: Parallelism) -> Result<Vec<Expr>, EngineError> {
    let n = rows.len();
    for k in 0..n {
        let p = pick_pivot(&rows, k).ok_or(EngineError::Unstable)?;
        rows.swap(k, p);
        let (head, tail) = rows.split_at_mut(k + 1);
        let pivot_row = &head[k];
        let inv = pivot_row[k].inv()?;
        for_each_mut(par, tail, |row| {
            if row[k].is_zero() {
                return;
            }
            let factor = &row[k] * &inv;
            for j in k + 1..=n {
                if !pivot_row[j].is_zero() {
                    row[j] = &row[j] - &(&factor * &pivot_row[j]);
                }
            }
            row[k] = Expr::zero(factor.env());
        });
    }
    let env = rows[0][0].env().clone();
    let mut x: Vec<Expr> = vec![Expr::zero(&env); n];
    for i in (0..n).rev() {
        let mut acc = rows[i][n].clone();
        for j in i + 1..n {
            if !rows[i][j].is_zero() && !x[j].is_zero() {
                acc = &acc - &(&rows[i][j] * &x[j]);
            }
        }
        x[i] = acc.checked_div(&rows[i][i])?;
    }
    Ok(x)
}
