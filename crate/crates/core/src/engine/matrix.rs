use std::fmt;

use crate::kernel::{Expr, KernelError, ParamEnv};

/// Dense matrix of expressions, row-major.
#[derive(Clone)]
pub struct SymMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Expr>,
}

impl SymMatrix {
    pub fn zeros(env: &ParamEnv, rows: usize, cols: usize) -> Self {
        SymMatrix { rows, cols, data: vec![Expr::zero(env); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Expr>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        SymMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Expr) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &Expr) {
        let k = i * self.cols + j;
        self.data[k] = &self.data[k] + v;
    }

    pub fn row(&self, i: usize) -> &[Expr] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> SymMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        SymMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, other: &SymMatrix) -> Result<SymMatrix, KernelError> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Expr::zero(self.get(0, 0).env());
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.try_add(&a.try_mul(b)?)?;
                    }
                }
                data.push(acc);
            }
        }
        Ok(SymMatrix { rows: self.rows, cols: other.cols, data })
    }

    pub fn mul_vec(&self, v: &[Expr]) -> Result<Vec<Expr>, KernelError> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Expr::zero(v[0].env());
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc.try_add(&a.try_mul(x)?)?;
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    pub fn scale(&self, k: &Expr) -> SymMatrix {
        SymMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|e| e * k).collect() }
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Entrywise equality of canonical forms.
    pub fn equals(&self, other: &SymMatrix) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for i in 0..self.rows {
            l.entry(&self.row(i));
        }
        l.finish()
    }
}
