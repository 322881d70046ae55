use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::hom::GroupHom;
use super::matrix::{int_to_json, Matrix};
use super::snf::{smith, Smith};
use crate::error::{Error, Result};

/// `Z^g / (row span of relations)`.
#[derive(Clone)]
pub struct FinAbPres {
    gens: usize,
    rels: Matrix,
    label: Option<String>,
    normal: OnceLock<Arc<Smith>>,
}

/// Invariant factors (each > 1, each dividing the next) and free rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Invariants {
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl Invariants {
    pub fn trivial() -> Self {
        Invariants {
            torsion: vec![],
            free_rank: 0,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.torsion.iter().fold(BigInt::one(), |a, b| a * b))
    }

    /// Factors as a list with 0 standing for a copy of Z.
    pub fn factor_list(&self) -> Vec<BigInt> {
        let mut v = self.torsion.clone();
        v.extend(std::iter::repeat_n(BigInt::zero(), self.free_rank));
        v
    }

    /// Sorted elementary divisors (prime powers), used to compare multisets.
    pub fn canonical(torsion: Vec<BigInt>, free_rank: usize) -> Self {
        // Re-derive the divisibility chain from arbitrary positive factors.
        let g = FinAbPres::from_diagonal(&torsion, free_rank);
        g.invariants()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "torsion": self.torsion.iter().map(int_to_json).collect::<Vec<_>>(),
            "free_rank": self.free_rank,
        })
    }
}

impl fmt::Display for Invariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl FinAbPres {
    pub fn new(gens: usize, rels: Matrix) -> Self {
        assert_eq!(rels.cols(), gens, "relation width must equal generator count");
        FinAbPres {
            gens,
            rels,
            label: None,
            normal: OnceLock::new(),
        }
    }

    pub fn trivial() -> Self {
        FinAbPres::new(0, Matrix::zeros(0, 0))
    }

    pub fn free(rank: usize) -> Self {
        FinAbPres::new(rank, Matrix::zeros(0, rank))
    }

    pub fn cyclic(order: impl Into<BigInt>) -> Self {
        let mut rels = Matrix::zeros(0, 1);
        rels.push_row(vec![order.into()]);
        FinAbPres::new(1, rels)
    }

    /// `Z/d_1 + ... + Z/d_k + Z^free`.
    pub fn from_diagonal(factors: &[BigInt], free_rank: usize) -> Self {
        let g = factors.len() + free_rank;
        let mut rels = Matrix::zeros(0, g);
        for (i, d) in factors.iter().enumerate() {
            let mut row = vec![BigInt::zero(); g];
            row[i] = d.clone();
            rels.push_row(row);
        }
        FinAbPres::new(g, rels)
    }

    pub fn from_invariants(inv: &Invariants) -> Self {
        FinAbPres::from_diagonal(&inv.torsion, inv.free_rank)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn num_generators(&self) -> usize {
        self.gens
    }

    pub fn relations(&self) -> &Matrix {
        &self.rels
    }

    pub(crate) fn smith(&self) -> &Smith {
        self.normal.get_or_init(|| Arc::new(smith(&self.rels, false, true)))
    }

    /// Diagonal entries for all generators: `d_j` (possibly 1) for `j < rank`, 0 for free ones.
    fn full_diag(&self) -> Vec<BigInt> {
        let s = self.smith();
        (0..self.gens)
            .map(|j| {
                if j < s.rank {
                    s.diag[j].clone()
                } else {
                    BigInt::zero()
                }
            })
            .collect()
    }

    pub fn invariants(&self) -> Invariants {
        let d = self.full_diag();
        let torsion = d
            .iter()
            .filter(|x| **x > BigInt::one())
            .cloned()
            .collect();
        let free_rank = d.iter().filter(|x| x.is_zero()).count();
        Invariants { torsion, free_rank }
    }

    pub fn order(&self) -> Option<BigInt> {
        self.invariants().order()
    }

    pub fn is_finite(&self) -> bool {
        self.invariants().free_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants().is_trivial()
    }

    pub fn is_isomorphic(&self, other: &FinAbPres) -> bool {
        self.invariants() == other.invariants()
    }

    /// Exponent of p in the group order (finite groups only).
    pub fn log_order(&self, p: u64) -> Option<u32> {
        let o = self.order()?;
        let (k, rest) = split_prime_power(&o, p);
        if rest.is_one() {
            Some(k)
        } else {
            None
        }
    }

    /// Coordinates in the Smith basis, reduced: entry `j` lies in `[0, d_j)`, or is free.
    pub fn smith_coords(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.gens, "element length mismatch");
        let s = self.smith();
        let y = s.v.as_ref().unwrap().apply(x);
        let d = self.full_diag();
        y.into_iter()
            .zip(&d)
            .map(|(yj, dj)| if dj.is_zero() { yj } else { yj.mod_floor(dj) })
            .collect()
    }

    pub fn is_zero(&self, x: &[BigInt]) -> bool {
        self.smith_coords(x).iter().all(|c| c.is_zero())
    }

    pub fn elements_equal(&self, x: &[BigInt], y: &[BigInt]) -> bool {
        let diff: Vec<BigInt> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.is_zero(&diff)
    }

    /// Additive order of an element; `None` if it has infinite order.
    pub fn element_order(&self, x: &[BigInt]) -> Option<BigInt> {
        let c = self.smith_coords(x);
        let d = self.full_diag();
        let mut ord = BigInt::one();
        for (cj, dj) in c.iter().zip(&d) {
            if cj.is_zero() {
                continue;
            }
            if dj.is_zero() {
                return None;
            }
            let o = dj / cj.gcd(dj);
            ord = ord.lcm(&o);
        }
        Some(ord)
    }

    /// Simplified diagonal presentation with mutually inverse isomorphisms.
    pub fn normalize(&self) -> (FinAbPres, GroupHom, GroupHom) {
        let s = self.smith();
        let d = self.full_diag();
        let keep: Vec<usize> = (0..self.gens).filter(|&j| !d[j].is_one()).collect();
        let factors: Vec<BigInt> = keep.iter().filter(|&&j| !d[j].is_zero()).map(|&j| d[j].clone()).collect();
        let free = keep.iter().filter(|&&j| d[j].is_zero()).count();
        let mut norm = FinAbPres::from_diagonal(&factors, free);
        norm.label = self.label.clone();
        let v = s.v.as_ref().unwrap();
        let v_inv = s.v_inv.as_ref().unwrap();
        let to = GroupHom::new_unchecked(self.clone(), norm.clone(), v.select_cols(&keep));
        let from = GroupHom::new_unchecked(norm.clone(), self.clone(), v_inv.select_rows(keep.iter().copied()));
        (norm, to, from)
    }

    /// p-localization: drops prime-to-p torsion, keeps free rank.
    pub fn localize(&self, p: u64) -> (FinAbPres, GroupHom) {
        let (norm, to, _) = self.normalize();
        let inv = norm.invariants();
        let mut keep_rows = Vec::new();
        let mut factors = Vec::new();
        for (i, d) in inv.torsion.iter().enumerate() {
            let (k, _) = split_prime_power(d, p);
            if k > 0 {
                keep_rows.push(i);
                factors.push(BigInt::from(p).pow(k));
            }
        }
        let t = inv.torsion.len();
        let free = inv.free_rank;
        let loc = FinAbPres::from_diagonal(&factors, free);
        let mut m = Matrix::zeros(norm.gens, loc.gens);
        for (jj, &i) in keep_rows.iter().enumerate() {
            m.set(i, jj, BigInt::one());
        }
        for f in 0..free {
            m.set(t + f, factors.len() + f, BigInt::one());
        }
        let proj = GroupHom::new_unchecked(norm, loc.clone(), m);
        (loc.clone(), to.compose(&proj))
    }

    /// True when every invariant factor is a power of `p`.
    pub fn is_p_local(&self, p: u64) -> bool {
        self.invariants()
            .torsion
            .iter()
            .all(|d| split_prime_power(d, p).1.is_one())
    }

    pub fn direct_sum(parts: &[&FinAbPres]) -> FinAbPres {
        let gens = parts.iter().map(|g| g.gens).sum();
        let blocks: Vec<&Matrix> = parts.iter().map(|g| &g.rels).collect();
        let rels = Matrix::block_diag(&blocks);
        FinAbPres::new(gens, rels)
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "generators": self.gens,
            "relations": self.rels.to_json(),
        });
        if let Some(l) = &self.label {
            v["label"] = Value::String(l.clone());
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<FinAbPres> {
        let gens = v["generators"]
            .as_u64()
            .ok_or_else(|| Error::Parse("group needs integer `generators`".into()))?
            as usize;
        let rels = match v.get("relations") {
            Some(r) => Matrix::from_json(r, gens)?,
            None => Matrix::zeros(0, gens),
        };
        let mut g = FinAbPres::new(gens, rels);
        if let Some(l) = v.get("label").and_then(|l| l.as_str()) {
            g.label = Some(l.to_string());
        }
        Ok(g)
    }
}

impl PartialEq for FinAbPres {
    fn eq(&self, other: &Self) -> bool {
        self.is_isomorphic(other)
    }
}

impl fmt::Debug for FinAbPres {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinAbPres<{} gens, rels {:?}>", self.gens, self.rels)
    }
}

impl fmt::Display for FinAbPres {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.invariants())
    }
}

/// Abelian-group tensor product from presentations.
pub fn tensor_ab(m: &FinAbPres, n: &FinAbPres) -> FinAbPres {
    let (a, b) = (m.gens, n.gens);
    let g = a * b;
    let mut rels = Matrix::zeros(0, g);
    for r in 0..m.rels.rows() {
        for j in 0..b {
            let mut row = vec![BigInt::zero(); g];
            for i in 0..a {
                row[i * b + j] = m.rels.get(r, i).clone();
            }
            rels.push_row(row);
        }
    }
    for s in 0..n.rels.rows() {
        for i in 0..a {
            let mut row = vec![BigInt::zero(); g];
            for j in 0..b {
                row[i * b + j] = n.rels.get(s, j).clone();
            }
            rels.push_row(row);
        }
    }
    FinAbPres::new(g, rels)
}

/// Writes `x = p^k * rest` with `p` not dividing `rest`.
pub fn split_prime_power(x: &BigInt, p: u64) -> (u32, BigInt) {
    let pb = BigInt::from(p);
    let mut k = 0;
    let mut r = x.abs();
    if r.is_zero() {
        return (0, r);
    }
    loop {
        let (q, rem) = r.div_rem(&pb);
        if !rem.is_zero() {
            break;
        }
        r = q;
        k += 1;
    }
    (k, r)
}

pub fn p_adic_valuation(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        None
    } else {
        Some(split_prime_power(x, p).0)
    }
}

pub fn to_u64(x: &BigInt) -> u64 {
    x.to_u64().expect("value does not fit in u64")
}
