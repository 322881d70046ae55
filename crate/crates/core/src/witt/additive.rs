use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ring::BaseRing;
use super::vector::WittVector;
use crate::algebra::{FinAbPres, Matrix};
use crate::error::{Error, Result};

/// `W_n(T)` as an abelian group on the generators `V^k[m]`, `m` a monomial of `T`.
///
/// Generator `(k, m)` has index `k * slots + m`.
#[derive(Clone, Debug)]
pub struct WittAdditive {
    ring: BaseRing,
    n: usize,
    group: FinAbPres,
}

impl WittAdditive {
    pub fn new(ring: &BaseRing, n: usize) -> Result<WittAdditive> {
        if n == 0 {
            return Err(Error::LengthUnderflow("W_0 has no generators".into()));
        }
        let mut a = WittAdditive {
            ring: ring.clone(),
            n,
            group: FinAbPres::trivial(),
        };
        let rels = if ring.is_char_p() {
            a.char_p_relations()
        } else {
            a.general_relations()
        };
        a.group = FinAbPres::new(a.num_generators(), rels).with_label(format!("W_{n}({ring})"));
        Ok(a)
    }

    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn group(&self) -> &FinAbPres {
        &self.group
    }

    pub fn num_generators(&self) -> usize {
        self.n * self.ring.num_slots()
    }

    pub fn index(&self, k: usize, m: usize) -> usize {
        k * self.ring.num_slots() + m
    }

    pub fn level_and_monomial(&self, i: usize) -> (usize, usize) {
        let s = self.ring.num_slots();
        (i / s, i % s)
    }

    /// `V^k[m]`.
    pub fn generator(&self, i: usize) -> WittVector {
        let (k, m) = self.level_and_monomial(i);
        let mut coords = vec![self.ring.zero(); self.n];
        coords[k] = self.ring.monomial(m);
        WittVector::new(self.ring.clone(), coords).expect("generator coordinates are ring elements")
    }

    /// Relations `p g_{k,m} = g_{k+1,m^p}` (zero past the top level or when `m^p` is cut off).
    fn char_p_relations(&self) -> Matrix {
        let ar = self.ring.arith();
        let p = self.ring.p();
        let g = self.num_generators();
        let mut rels = Matrix::zeros(0, g);
        for i in 0..g {
            let (k, m) = self.level_and_monomial(i);
            let mut row = vec![BigInt::zero(); g];
            row[i] = BigInt::from(p);
            if k + 1 < self.n {
                if let Some(mp) = ar.monomial_pow(m, p as u32) {
                    row[self.index(k + 1, mp)] -= 1;
                }
            }
            rels.push_row(row);
        }
        rels
    }

    /// Relations `p^e g = decompose(p^e g)`, which only involves strictly higher levels.
    fn general_relations(&self) -> Matrix {
        let q = self.ring.modulus() as i64;
        let g = self.num_generators();
        let mut rels = Matrix::zeros(0, g);
        for i in 0..g {
            let (k, _) = self.level_and_monomial(i);
            let c = self.decompose(&self.generator(i).scalar_mul(q));
            for (j, cj) in c.iter().enumerate() {
                assert!(
                    cj.is_zero() || self.level_and_monomial(j).0 > k,
                    "p^e V^k[m] must lie in higher levels"
                );
            }
            let mut row: Vec<BigInt> = c.iter().map(|x| -x).collect();
            row[i] += q;
            rels.push_row(row);
        }
        rels
    }

    /// Integer coordinates `c` with `w = sum c_i g_i`, digits in `[0, p^e)`.
    pub fn decompose(&self, w: &WittVector) -> Vec<BigInt> {
        assert!(w.ring() == &self.ring && w.len() == self.n, "decompose: wrong ring or length");
        let s = self.ring.num_slots();
        let mut out = vec![BigInt::zero(); self.num_generators()];
        let mut rest = w.clone();
        for k in 0..self.n {
            let a = rest.coords()[k].clone();
            if a.iter().all(|&x| x == 0) {
                continue;
            }
            let mut part = WittVector::zero(&self.ring, self.n - k);
            for (m, &c) in a.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                out[k * s + m] = BigInt::from(c);
                let t = WittVector::teichmuller(&self.ring, &self.ring.monomial(m), self.n - k).scalar_mul(c as i64);
                part = part.add(&t).expect("same ring and length");
            }
            let mut shifted = part;
            for _ in 0..k {
                shifted = shifted.verschiebung();
            }
            rest = rest.sub(&shifted).expect("same ring and length");
            debug_assert!(rest.coords()[..=k].iter().all(|c| c.iter().all(|&x| x == 0)));
        }
        out
    }

    /// `sum c_i g_i` as a Witt vector.
    pub fn element(&self, c: &[BigInt]) -> WittVector {
        let exponent = BigInt::from(self.ring.modulus()).pow(self.n as u32);
        let mut w = WittVector::zero(&self.ring, self.n);
        for (i, ci) in c.iter().enumerate() {
            let k = ci.mod_floor(&exponent);
            if k.is_zero() {
                continue;
            }
            let k = k.to_i64().expect("reduced coefficient fits in i64");
            w = w.add(&self.generator(i).scalar_mul(k)).expect("same ring and length");
        }
        w
    }

    /// Length-preserving `V` (top coordinate dropped): `g_{k,m} -> g_{k+1,m}`.
    pub fn v_matrix(&self) -> Matrix {
        let g = self.num_generators();
        let s = self.ring.num_slots();
        let mut m = Matrix::zeros(g, g);
        for i in 0..g {
            if i + s < g {
                m.set(i, i + s, BigInt::from(1));
            }
        }
        m
    }

    /// Coordinatewise `p`-th power, defined in characteristic `p`: `g_{k,m} -> g_{k,m^p}`.
    pub fn f_matrix(&self) -> Result<Matrix> {
        if !self.ring.is_char_p() {
            return Err(Error::UnsupportedBase(format!(
                "length-preserving frobenius on W_n({}) needs characteristic p",
                self.ring
            )));
        }
        let ar = self.ring.arith();
        let p = self.ring.p() as u32;
        let g = self.num_generators();
        let mut mat = Matrix::zeros(g, g);
        for i in 0..g {
            let (k, m) = self.level_and_monomial(i);
            if let Some(mp) = ar.monomial_pow(m, p) {
                mat.set(i, self.index(k, mp), BigInt::from(1));
            }
        }
        Ok(mat)
    }
}

/// Additive model of `W_n(R)` for `R = F_p[x_1..x_v]/(x_i^{degcap+1})`, with `F` and `V`.
#[derive(Clone, Debug)]
pub struct MonoidRingWitt {
    pub additive: WittAdditive,
    pub v: Matrix,
    pub f: Matrix,
    /// Basis elements on which the F/V compatibility was confirmed.
    pub checked: usize,
}

pub fn witt_of_monoid_ring(p: u64, n: usize, vars: usize, degcap: u32) -> Result<MonoidRingWitt> {
    let names: Vec<String> = (0..vars).map(var_name).collect();
    let spec: Vec<(&str, u32)> = names.iter().map(|s| (s.as_str(), degcap + 1)).collect();
    let ring = BaseRing::truncated(p, 1, &spec)?;
    witt_of_monoid_ring_over(&ring, n)
}

pub fn var_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        _ => format!("x{i}"),
    }
}

pub fn witt_of_monoid_ring_over(ring: &BaseRing, n: usize) -> Result<MonoidRingWitt> {
    if !ring.is_char_p() {
        return Err(Error::UnsupportedBase(format!(
            "{ring}: the monoid-ring model needs F_p coefficients"
        )));
    }
    let additive = WittAdditive::new(ring, n)?;
    let v = additive.v_matrix();
    let f = additive.f_matrix()?;
    let g = additive.num_generators();
    for i in 0..g {
        let gi = additive.generator(i);
        let vi = additive.element(v.row(i));
        if vi != gi.verschiebung_trunc() {
            return Err(Error::Mismatch(format!("V disagrees with the Witt verschiebung on generator {i}")));
        }
        let fi = additive.element(f.row(i));
        if fi != gi.frobenius_char_p()? {
            return Err(Error::Mismatch(format!("F disagrees with the Witt frobenius on generator {i}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ring.p() * 7919 + n as u64);
    for _ in 0..8 {
        let w = WittVector::random(ring, n, &mut rng);
        let c = additive.decompose(&w);
        if additive.element(&c) != w {
            return Err(Error::Mismatch("decompose is not inverse to element".into()));
        }
    }
    Ok(MonoidRingWitt {
        additive,
        v,
        f,
        checked: g,
    })
}
