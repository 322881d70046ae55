use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

use super::module::CartierModule;
use crate::algebra::{left_kernel, solve_left, FinAbPres, Matrix};
use crate::error::Result;

/// Random finite Cartier module of order `p^L`, `1 <= L <= max_log_order`.
///
/// The group is a sum of cyclic `p`-groups; `V` is drawn first, then `F` is a random
/// solution of `FV = p`. Draws without a solution are retried.
pub fn random_finite_module<R: Rng>(p: u64, max_log_order: u32, rng: &mut R) -> Result<CartierModule> {
    loop {
        let total = rng.gen_range(1..=max_log_order.max(1));
        let mut parts = Vec::new();
        let mut left = total;
        while left > 0 {
            let a = rng.gen_range(1..=left);
            parts.push(a);
            left -= a;
        }
        parts.sort_unstable();
        if let Some(m) = try_module(p, &parts, rng)? {
            return Ok(m);
        }
    }
}

/// Smallest exponent `s` with `p^s c_ij` well defined from `Z/p^a_i` to `Z/p^a_j`.
fn shift(parts: &[u32], i: usize, j: usize) -> u32 {
    parts[j].saturating_sub(parts[i])
}

fn try_module<R: Rng>(p: u64, parts: &[u32], rng: &mut R) -> Result<Option<CartierModule>> {
    let g = parts.len();
    let pb = BigInt::from(p);
    let pw = |k: u32| pb.pow(k);
    let mut v = Matrix::zeros(g, g);
    for i in 0..g {
        for j in 0..g {
            let s = shift(parts, i, j);
            let c: u64 = rng.gen_range(0..p.pow(parts[j]));
            v.set(i, j, pw(s) * c);
        }
    }
    // Unknowns y_ij (F_ij = p^s_ij y_ij) then slacks z_kj; one equation per (k, j).
    let ny = g * g;
    let mut m = Matrix::zeros(ny + g * g, g * g);
    let mut b = vec![BigInt::zero(); g * g];
    for k in 0..g {
        for j in 0..g {
            let eq = k * g + j;
            for i in 0..g {
                let c = v.get(k, i) * pw(shift(parts, i, j));
                m.set(i * g + j, eq, c);
            }
            m.set(ny + eq, eq, pw(parts[j]));
            if k == j {
                b[eq] = pb.clone();
            }
        }
    }
    let Some(x) = solve_left(&m, &b) else {
        return Ok(None);
    };
    let ker = left_kernel(&m);
    let mut y = x[..ny].to_vec();
    for r in 0..ker.rows() {
        let c: i64 = rng.gen_range(0..(p as i64).pow(2));
        for (t, yt) in y.iter_mut().enumerate() {
            *yt += ker.get(r, t) * c;
        }
    }
    let mut f = Matrix::zeros(g, g);
    for i in 0..g {
        for j in 0..g {
            let modulus = pw(parts[j]);
            let c = (pw(shift(parts, i, j)) * &y[i * g + j]) % &modulus;
            f.set(i, j, (c + &modulus) % &modulus);
        }
    }
    let factors: Vec<BigInt> = parts.iter().map(|&a| pw(a)).collect();
    let group = FinAbPres::from_diagonal(&factors, 0);
    Ok(Some(CartierModule::finite(p, group, v, f)?))
}
