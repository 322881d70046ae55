use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::ring::{Arith, Elem};
use crate::error::{Error, Result};

/// Integer polynomial in a fixed number of variables, sparse in terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Poly {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c.into());
        p
    }

    pub fn var(nvars: usize, i: usize) -> Poly {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Poly::zero(nvars);
        p.add_term(e, BigInt::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        let mut out = Poly::zero(self.nvars);
        if k.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect();
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut acc: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *acc.entry(e).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly {
            nvars: self.nvars,
            terms: acc,
        }
    }

    pub fn pow(&self, mut k: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::constant(self.nvars, 1);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Divides every coefficient by `d`, panicking if a division is inexact.
    pub fn div_exact(&self, d: &BigInt) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let (q, r) = c.div_rem(d);
                assert!(r.is_zero(), "universal polynomial: coefficient {c} not divisible by {d}");
                (e.clone(), q)
            })
            .collect();
        Poly {
            nvars: self.nvars,
            terms,
        }
    }

    /// Renames variable `i` to `map[i]` in a polynomial ring with `nvars` variables.
    pub fn substitute_vars(&self, nvars: usize, map: &[usize]) -> Poly {
        let mut out = Poly::zero(nvars);
        for (e, c) in &self.terms {
            let mut f = vec![0; nvars];
            for (i, &k) in e.iter().enumerate() {
                f[map[i]] += k;
            }
            out.add_term(f, c.clone());
        }
        out
    }

    pub fn eval_int(&self, x: &[BigInt]) -> BigInt {
        let mut cache: Vec<Vec<BigInt>> = x.iter().map(|v| vec![BigInt::one(), v.clone()]).collect();
        let mut total = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let k = k as usize;
                while cache[i].len() <= k {
                    let next = cache[i].last().unwrap() * &x[i];
                    cache[i].push(next);
                }
                t *= &cache[i][k];
            }
            total += t;
        }
        total
    }

    /// Evaluates at ring elements, reducing coefficients modulo `ar.q`.
    pub fn eval_ring(&self, ar: &Arith, x: &[Elem]) -> Elem {
        let q = BigInt::from(ar.q);
        let mut cache: Vec<Vec<Elem>> = x.iter().map(|v| vec![ar.one(), v.clone()]).collect();
        let mut total = ar.zero();
        for (e, c) in &self.terms {
            let c = c.mod_floor(&q).to_u64().unwrap();
            if c == 0 {
                continue;
            }
            let mut t = ar.constant(c as i64);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let k = k as usize;
                while cache[i].len() <= k {
                    let next = ar.mul(cache[i].last().unwrap(), &x[i]);
                    cache[i].push(next);
                }
                t = ar.mul(&t, &cache[i][k]);
                if ar.is_zero(&t) {
                    break;
                }
            }
            total = ar.add(&total, &t);
        }
        total
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_default()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| json!([c.to_string(), e]))
                .collect(),
        )
    }

    pub fn from_json(v: &Value, nvars: usize) -> Result<Poly> {
        let bad = |what: &str| Error::CacheCorrupt(format!("polynomial term: {what}"));
        let items = v.as_array().ok_or_else(|| bad("not an array"))?;
        let mut p = Poly::zero(nvars);
        for t in items {
            let pair = t.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("expected [coeff, exps]"))?;
            let c: BigInt = pair[0]
                .as_str()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("coefficient"))?;
            let e: Vec<u32> = pair[1]
                .as_array()
                .ok_or_else(|| bad("exponents"))?
                .iter()
                .map(|x| x.as_u64().and_then(|k| u32::try_from(k).ok()))
                .collect::<Option<_>>()
                .ok_or_else(|| bad("exponent"))?;
            if e.len() != nvars || c.is_zero() || p.terms.contains_key(&e) {
                return Err(bad("shape"));
            }
            p.terms.insert(e, c);
        }
        Ok(p)
    }
}
