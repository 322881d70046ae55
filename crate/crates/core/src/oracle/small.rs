use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::algebra::{FinAbPres, Matrix};
use crate::cartier::{check_axioms, CartierModule};
use crate::error::{Error, Result};

type Mat = Vec<Vec<i64>>;

fn mul(a: &Mat, b: &Mat, q: i64) -> Mat {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum::<i64>().rem_euclid(q)).collect())
        .collect()
}

fn all_matrices(n: usize, q: i64) -> Vec<Mat> {
    let cells = n * n;
    let total = (q as usize).pow(cells as u32);
    (0..total)
        .map(|mut code| {
            let mut flat = vec![0i64; cells];
            for c in flat.iter_mut() {
                *c = (code % q as usize) as i64;
                code /= q as usize;
            }
            flat.chunks(n).map(|r| r.to_vec()).collect()
        })
        .collect()
}

/// Pairs `(A, A^{-1})` over `Z/q` for `n x n` matrices.
fn automorphisms(n: usize, q: i64) -> Vec<(Mat, Mat)> {
    let mats = all_matrices(n, q);
    let id: Mat = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let mut out = Vec::new();
    for a in &mats {
        if let Some(b) = mats.iter().find(|b| mul(a, b, q) == id) {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

/// Finite Cartier modules of order `p^k` for `1 <= k <= max_log_order`, one per isomorphism class.
pub fn small_cartier_modules(p: u64, max_log_order: u32) -> Result<Vec<CartierModule>> {
    if max_log_order > 2 {
        return Err(Error::SizeBound(format!("modules of order p^{max_log_order}")));
    }
    let pi = p as i64;
    // (modulus, rank): Z/p, Z/p^2, (Z/p)^2.
    let shapes: Vec<(i64, usize)> = [(pi, 1), (pi * pi, 1), (pi, 2)]
        .into_iter()
        .filter(|&(q, n)| (q.ilog(pi) as usize * n) as u32 <= max_log_order)
        .collect();
    let mut out = Vec::new();
    for (q, n) in shapes {
        let group = FinAbPres::from_diagonal(&vec![BigInt::from(q); n], 0);
        let auts = automorphisms(n, q);
        let mats = all_matrices(n, q);
        let mut seen = BTreeSet::new();
        for v in &mats {
            for f in &mats {
                let pid: Mat = (0..n).map(|i| (0..n).map(|j| if i == j { pi % q } else { 0 }).collect()).collect();
                if mul(v, f, q) != pid {
                    continue;
                }
                let key = auts
                    .iter()
                    .map(|(a, b)| (mul(&mul(a, v, q), b, q), mul(&mul(a, f, q), b, q)))
                    .min()
                    .unwrap();
                if !seen.insert(key) {
                    continue;
                }
                let m = CartierModule::finite(p, group.clone(), Matrix::from_i64(v, n), Matrix::from_i64(f, n))?;
                check_axioms(&m, false)?;
                out.push(m);
            }
        }
    }
    Ok(out)
}
