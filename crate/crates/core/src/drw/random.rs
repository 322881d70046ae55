use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

use super::complex::CartierComplex;
use crate::algebra::{FinAbPres, GroupHom, Matrix};
use crate::cartier::random_finite_module;
use crate::error::Result;

fn inverse_mod(u: &BigInt, m: &BigInt) -> BigInt {
    let e = u.extended_gcd(m);
    e.x.mod_floor(m)
}

fn hom(s: &FinAbPres, t: &FinAbPres, m: Matrix) -> Result<GroupHom> {
    GroupHom::new(s.clone(), t.clone(), m)
}

/// A random two-term Cartier complex `C^0 -> C^1` of finite `p`-groups.
///
/// Each term is a random finite Cartier module, plus with probability 1/2 a pair of cyclic
/// blocks `Z/p^e (V = u, F = p/u) -> Z/p^e' (V = pu, F = 1/u)` carrying `d`. At `p = 2`
/// a block `Z/2 -> Z/2` with `d = η = 1` and `V = F = 0` is sometimes added.
pub fn random_cartier_complex<R: Rng>(p: u64, rng: &mut R) -> Result<CartierComplex> {
    let pb = BigInt::from(p);
    let a0 = random_finite_module(p, 3, rng)?.structure()?;
    let a1 = random_finite_module(p, 3, rng)?.structure()?;
    let with_cyclic = rng.gen_bool(0.5);
    let (e0, e1): (u32, u32) = if with_cyclic { (rng.gen_range(1..=3), rng.gen_range(1..=3)) } else { (0, 0) };
    let top = pb.pow(e0.max(e1));
    let u = loop {
        let u = BigInt::from(rng.gen_range(1..p.pow(e0.max(e1)).max(2)));
        if !u.is_multiple_of(&pb) {
            break u;
        }
    };
    let u_inv = inverse_mod(&u, &top);
    let delta = pb.pow(e1.saturating_sub(e0)) * BigInt::from(rng.gen_range(0..p.pow(e1)));
    let with_eta = p == 2 && rng.gen_bool(0.5);

    let cyc = |e: u32| FinAbPres::cyclic(pb.pow(e));
    let one = |c: BigInt| Matrix::from_rows(vec![vec![c]], 1);
    let eta_block = FinAbPres::cyclic(2u32);
    let sum = |a: &FinAbPres, b: FinAbPres| {
        if with_eta {
            FinAbPres::direct_sum(&[a, &b, &eta_block])
        } else {
            FinAbPres::direct_sum(&[a, &b])
        }
    };
    let c0 = sum(&a0.group, cyc(e0));
    let c1 = sum(&a1.group, cyc(e1));
    let tail = |mut blocks: Vec<Matrix>| {
        if with_eta {
            blocks.push(Matrix::zeros(1, 1));
        }
        let refs: Vec<&Matrix> = blocks.iter().collect();
        Matrix::block_diag(&refs)
    };
    let v0 = tail(vec![a0.v.matrix().clone(), one(u.clone())]);
    let f0 = tail(vec![a0.f.matrix().clone(), one(&pb * &u_inv)]);
    let v1 = tail(vec![a1.v.matrix().clone(), one(&pb * &u)]);
    let f1 = tail(vec![a1.f.matrix().clone(), one(u_inv.clone())]);

    let (g0, g1) = (c0.num_generators(), c1.num_generators());
    let (k0, k1) = (a0.group.num_generators(), a1.group.num_generators());
    let mut d = Matrix::zeros(g0, g1);
    let mut eta = Matrix::zeros(g0, g1);
    d.set(k0, k1, delta);
    if with_eta {
        d.set(g0 - 1, g1 - 1, BigInt::one());
        eta.set(g0 - 1, g1 - 1, BigInt::one());
    }
    debug_assert!(!top.is_zero());
    CartierComplex::new(
        p,
        0,
        vec![c0.clone(), c1.clone()],
        vec![hom(&c0, &c0, v0)?, hom(&c1, &c1, v1)?],
        vec![hom(&c0, &c0, f0)?, hom(&c1, &c1, f1)?],
        vec![hom(&c0, &c1, d)?],
        vec![hom(&c0, &c1, eta)?],
    )
}
