use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{left_kernel, Matrix};

/// A full-rank sublattice of `Z^n` kept in echelon form: row `j` has its pivot in column `j`.
#[derive(Clone, Debug)]
pub struct Lattice {
    rows: Vec<Option<Vec<BigInt>>>,
}

impl Lattice {
    pub fn empty(n: usize) -> Lattice {
        Lattice { rows: vec![None; n] }
    }

    /// `m Z^n`.
    pub fn scalar(n: usize, m: &BigInt) -> Lattice {
        let mut l = Lattice::empty(n);
        for j in 0..n {
            let mut r = vec![BigInt::zero(); n];
            r[j] = m.clone();
            l.rows[j] = Some(r);
        }
        l
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, mut v: Vec<BigInt>) {
        let n = self.dim();
        for j in 0..n {
            if v[j].is_zero() {
                continue;
            }
            match self.rows[j].take() {
                None => {
                    if v[j].is_negative() {
                        v.iter_mut().for_each(|x| *x = -&*x);
                    }
                    self.rows[j] = Some(v);
                    self.reduce_above(j);
                    return;
                }
                Some(r) => {
                    let e = r[j].extended_gcd(&v[j]);
                    let (a, b) = (r[j].div_floor(&e.gcd), v[j].div_floor(&e.gcd));
                    let new_row: Vec<BigInt> = (0..n).map(|t| &e.x * &r[t] + &e.y * &v[t]).collect();
                    v = (0..n).map(|t| &a * &v[t] - &b * &r[t]).collect();
                    let mut new_row = new_row;
                    if new_row[j].is_negative() {
                        new_row.iter_mut().for_each(|x| *x = -&*x);
                    }
                    self.rows[j] = Some(new_row);
                    self.reduce_above(j);
                }
            }
        }
    }

    /// Keeps entries right of each pivot reduced modulo the pivots below.
    fn reduce_above(&mut self, j: usize) {
        let n = self.dim();
        for c in j..n {
            let Some(pivot_row) = self.rows[c].clone() else { continue };
            let piv = pivot_row[c].clone();
            for r in 0..c {
                if let Some(row) = self.rows[r].as_mut() {
                    let q = row[c].div_floor(&piv);
                    if !q.is_zero() {
                        for t in c..n {
                            row[t] -= &q * &pivot_row[t];
                        }
                    }
                }
            }
        }
    }

    pub fn add(&mut self, other: &Lattice) {
        for r in other.rows.iter().flatten() {
            self.insert(r.clone());
        }
    }

    /// Basis rows; panics unless the lattice has full rank.
    pub fn basis(&self) -> Matrix {
        let rows: Vec<Vec<BigInt>> = self
            .rows
            .iter()
            .map(|r| r.clone().expect("lattice must have full rank"))
            .collect();
        Matrix::from_rows(rows, self.dim())
    }

    pub fn generators(&self) -> Matrix {
        let rows: Vec<Vec<BigInt>> = self.rows.iter().flatten().cloned().collect();
        Matrix::from_rows(rows, self.dim())
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coords(v).is_some()
    }

    /// Coefficients of `v` in the echelon basis, if `v` lies in the lattice.
    pub fn coords(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let n = self.dim();
        let mut rest = v.to_vec();
        let mut out = vec![BigInt::zero(); n];
        for j in 0..n {
            if rest[j].is_zero() {
                continue;
            }
            let row = self.rows[j].as_ref()?;
            let (q, r) = rest[j].div_rem(&row[j]);
            if !r.is_zero() {
                return None;
            }
            for t in j..n {
                rest[t] -= &q * &row[t];
            }
            out[j] = q;
        }
        Some(out)
    }
}

/// `{c in Z^n : c m ≡ 0 mod q}` for an `n x k` integer matrix `m`.
pub fn congruence_lattice(m: &Matrix, q: &BigInt) -> Lattice {
    let n = m.rows();
    if m.cols() == 0 || q.is_one() {
        return Lattice::scalar(n, &BigInt::one());
    }
    let stacked = m.vstack(&Matrix::scalar(m.cols(), q));
    let k = left_kernel(&stacked);
    let proj = k.select_cols(&(0..n).collect::<Vec<_>>());
    let mut l = Lattice::scalar(n, q);
    for i in 0..proj.rows() {
        l.insert(proj.row_vec(i));
    }
    l
}
