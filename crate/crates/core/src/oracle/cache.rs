use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::witt::{Poly, WittPolyCache};

/// Indices checked by the `a + (-a) = 0` identity, whose inputs grow quickly.
const NEGATION_DEPTH: usize = 3;

fn eval(q: &Poly, x: &[BigInt]) -> BigInt {
    let mut total = BigInt::zero();
    for (exps, c) in q.terms() {
        let mut t = c.clone();
        for (xi, &e) in x.iter().zip(exps) {
            if e > 0 {
                t *= xi.pow(e);
            }
        }
        total += t;
    }
    total
}

fn ghost(p: u64, x: &[BigInt], i: usize) -> BigInt {
    let mut w = BigInt::zero();
    let mut pj = BigInt::one();
    for (j, xj) in x.iter().enumerate().take(i + 1) {
        w += &pj * xj.pow(p.pow((i - j) as u32) as u32);
        pj *= p;
    }
    w
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpotcheckReport {
    pub trials: usize,
    pub identities: usize,
}

/// Evaluates every cached polynomial at random small integer points and checks the
/// ghost identities, plus `a + (-a) = 0` coordinatewise in low indices.
pub fn witt_cache_spotcheck(cache: &WittPolyCache, trials: usize, seed: u64) -> Result<SpotcheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (p, c) = (cache.p, cache.coverage);
    let mut identities = 0;
    let fail = |what: &str, i: usize, x: &[BigInt]| {
        Error::CacheCorrupt(format!(
            "{what} polynomial {i} fails at x = [{}] (p = {p})",
            x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        ))
    };
    for _ in 0..trials {
        let x: Vec<BigInt> = (0..=c).map(|_| BigInt::from(rng.gen_range(-20i64..=20))).collect();
        let y: Vec<BigInt> = (0..c).map(|_| BigInt::from(rng.gen_range(-20i64..=20))).collect();
        let mut xy = x[..c].to_vec();
        xy.extend(y.iter().cloned());
        let s: Vec<BigInt> = cache.sum.iter().map(|q| eval(q, &xy)).collect();
        let m: Vec<BigInt> = cache.prod.iter().map(|q| eval(q, &xy)).collect();
        let ng: Vec<BigInt> = cache.neg.iter().map(|q| eval(q, &x[..c])).collect();
        let f: Vec<BigInt> = cache.frob.iter().map(|q| eval(q, &x)).collect();
        for i in 0..c {
            let (gx, gy) = (ghost(p, &x, i), ghost(p, &y, i));
            if ghost(p, &s, i) != &gx + &gy {
                return Err(fail("sum", i, &xy));
            }
            if ghost(p, &m, i) != &gx * &gy {
                return Err(fail("product", i, &xy));
            }
            if ghost(p, &ng, i) != -&gx {
                return Err(fail("negation", i, &x));
            }
            if ghost(p, &f, i) != ghost(p, &x, i + 1) {
                return Err(fail("Frobenius", i, &x));
            }
            identities += 4;
        }
        let depth = c.min(NEGATION_DEPTH);
        let small: Vec<BigInt> = x.iter().take(depth).map(|v| v % 4).collect();
        let mut pad = small.clone();
        pad.resize(c, BigInt::zero());
        let neg: Vec<BigInt> = cache.neg.iter().take(depth).map(|q| eval(q, &pad)).collect();
        let mut both = small.clone();
        both.resize(c, BigInt::zero());
        both.extend(neg.iter().cloned());
        both.resize(2 * c, BigInt::zero());
        for i in 0..depth {
            if !eval(&cache.sum[i], &both).is_zero() {
                return Err(fail("a + (-a)", i, &small));
            }
            identities += 1;
        }
    }
    Ok(SpotcheckReport { trials, identities })
}
