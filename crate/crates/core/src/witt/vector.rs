use rand::Rng;
use serde_json::{json, Value};

use super::ring::{Arith, BaseRing, Elem};
use crate::error::{Error, Result};

/// Truncated p-typical Witt vector `(a_0, ..., a_{n-1})` over a finite base ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector {
    ring: BaseRing,
    coords: Vec<Elem>,
}

/// Ghost components `w_i = sum_{j<=i} p^j a_j^{p^{i-j}}` computed in `ar`.
pub(crate) fn ghost_in(ar: &Arith, p: u64, coords: &[Elem]) -> Vec<Elem> {
    let mut powers: Vec<Elem> = Vec::with_capacity(coords.len());
    let mut out = Vec::with_capacity(coords.len());
    for (i, a) in coords.iter().enumerate() {
        for x in powers.iter_mut() {
            *x = ar.pow(x, p);
        }
        powers.push(ar.reduce(a));
        let mut w = ar.zero();
        let mut pj = 1 % ar.q;
        for x in powers.iter().take(i + 1) {
            w = ar.add(&w, &ar.scale(x, pj as i64));
            pj = pj * p % ar.q;
        }
        out.push(w);
    }
    out
}

/// Inverts the ghost map in the lift `ar = (Z/p^M)[x]/cuts`, returning `len` coordinates.
/// Coordinate `i` is correct modulo `p^(M-i)`.
pub(crate) fn unghost_in(ar: &Arith, p: u64, ghost: &[Elem], len: usize) -> Vec<Elem> {
    let mut coords: Vec<Elem> = Vec::with_capacity(len);
    let mut powers: Vec<Elem> = Vec::with_capacity(len);
    for i in 0..len {
        for x in powers.iter_mut() {
            *x = ar.pow(x, p);
        }
        let mut rest = ghost[i].clone();
        let mut pj = 1 % ar.q;
        for x in &powers {
            rest = ar.sub(&rest, &ar.scale(x, pj as i64));
            pj = pj * p % ar.q;
        }
        let pi = p.pow(i as u32);
        let a: Elem = rest
            .iter()
            .map(|&c| {
                assert!(c % pi == 0, "ghost inversion: {c} is not divisible by {p}^{i}");
                c / pi
            })
            .collect();
        powers.push(a.clone());
        coords.push(a);
    }
    coords
}

fn lift_modulus_exponent(ring: &BaseRing, len: usize) -> u32 {
    ring.e() + len.max(1) as u32 - 1
}

impl WittVector {
    pub fn new(ring: BaseRing, coords: Vec<Elem>) -> Result<WittVector> {
        if coords.is_empty() {
            return Err(Error::LengthUnderflow("Witt vectors have length at least 1".into()));
        }
        for c in &coords {
            ring.check_elem(c)?;
        }
        ring.lift_arith(lift_modulus_exponent(&ring, coords.len()))?;
        Ok(WittVector { ring, coords })
    }

    pub fn zero(ring: &BaseRing, n: usize) -> WittVector {
        WittVector {
            ring: ring.clone(),
            coords: vec![ring.zero(); n],
        }
    }

    pub fn one(ring: &BaseRing, n: usize) -> WittVector {
        WittVector::teichmuller(ring, &ring.one(), n)
    }

    pub fn teichmuller(ring: &BaseRing, a: &[u64], n: usize) -> WittVector {
        let mut w = WittVector::zero(ring, n);
        w.coords[0] = ring.arith().reduce(a);
        w
    }

    /// The integer `k` as a Witt vector.
    pub fn integer(ring: &BaseRing, k: i64, n: usize) -> WittVector {
        WittVector::one(ring, n).scalar_mul(k)
    }

    pub fn random<R: Rng>(ring: &BaseRing, n: usize, rng: &mut R) -> WittVector {
        WittVector {
            ring: ring.clone(),
            coords: (0..n).map(|_| ring.random_elem(rng)).collect(),
        }
    }

    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    pub fn p(&self) -> u64 {
        self.ring.p()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Elem] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Elem> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.iter().all(|&x| x == 0))
    }

    /// Ghost components evaluated in the base ring.
    pub fn ghost(&self) -> Vec<Elem> {
        ghost_in(&self.ring.arith(), self.p(), &self.coords)
    }

    fn compatible(&self, other: &WittVector) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!("{} vs {}", self.ring, other.ring)));
        }
        if self.len() != other.len() {
            return Err(Error::RingMismatch(format!(
                "lengths {} and {} differ",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    fn lifted_ghost(&self, m: u32) -> (Arith, Vec<Elem>) {
        let ar = self
            .ring
            .lift_arith(m)
            .expect("length exceeds the 62-bit lift modulus");
        let g = ghost_in(&ar, self.p(), &self.coords);
        (ar, g)
    }

    fn from_lift(ring: &BaseRing, ar: &Arith, ghost: &[Elem], len: usize) -> WittVector {
        let base = ring.arith();
        let coords = unghost_in(ar, ring.p(), ghost, len)
            .iter()
            .map(|c| base.reduce(c))
            .collect();
        WittVector {
            ring: ring.clone(),
            coords,
        }
    }

    fn ghostwise(&self, other: &WittVector, f: impl Fn(&Arith, &Elem, &Elem) -> Elem) -> Result<WittVector> {
        self.compatible(other)?;
        let m = lift_modulus_exponent(&self.ring, self.len());
        let (ar, ga) = self.lifted_ghost(m);
        let (_, gb) = other.lifted_ghost(m);
        let g: Vec<Elem> = ga.iter().zip(&gb).map(|(x, y)| f(&ar, x, y)).collect();
        Ok(WittVector::from_lift(&self.ring, &ar, &g, self.len()))
    }

    fn map_ghost(&self, f: impl Fn(&Arith, &Elem) -> Elem) -> WittVector {
        let m = lift_modulus_exponent(&self.ring, self.len());
        let (ar, g) = self.lifted_ghost(m);
        let g: Vec<Elem> = g.iter().map(|x| f(&ar, x)).collect();
        WittVector::from_lift(&self.ring, &ar, &g, self.len())
    }

    pub fn add(&self, other: &WittVector) -> Result<WittVector> {
        self.ghostwise(other, |ar, x, y| ar.add(x, y))
    }

    pub fn sub(&self, other: &WittVector) -> Result<WittVector> {
        self.ghostwise(other, |ar, x, y| ar.sub(x, y))
    }

    pub fn mul(&self, other: &WittVector) -> Result<WittVector> {
        self.ghostwise(other, |ar, x, y| ar.mul(x, y))
    }

    pub fn neg(&self) -> WittVector {
        self.map_ghost(|ar, x| ar.neg(x))
    }

    pub fn scalar_mul(&self, k: i64) -> WittVector {
        self.map_ghost(|ar, x| ar.scale(x, k))
    }

    /// `F: W_n -> W_{n-1}`, shifting ghost components down by one.
    pub fn frobenius(&self) -> Result<WittVector> {
        if self.len() < 2 {
            return Err(Error::LengthUnderflow(
                "frobenius W_n -> W_(n-1) needs n >= 2; use the length-preserving variant over a characteristic p ring".into(),
            ));
        }
        let m = lift_modulus_exponent(&self.ring, self.len());
        let (ar, g) = self.lifted_ghost(m);
        Ok(WittVector::from_lift(&self.ring, &ar, &g[1..], self.len() - 1))
    }

    /// Length-preserving Frobenius over a characteristic p ring: `a_i -> a_i^p`.
    pub fn frobenius_char_p(&self) -> Result<WittVector> {
        if !self.ring.is_char_p() {
            return Err(Error::UnsupportedBase(format!(
                "length-preserving frobenius needs characteristic p, got {}",
                self.ring
            )));
        }
        let ar = self.ring.arith();
        Ok(WittVector {
            ring: self.ring.clone(),
            coords: self.coords.iter().map(|a| ar.pow(a, self.p())).collect(),
        })
    }

    /// `V: W_n -> W_{n+1}`.
    pub fn verschiebung(&self) -> WittVector {
        let mut coords = vec![self.ring.zero()];
        coords.extend(self.coords.iter().cloned());
        WittVector {
            ring: self.ring.clone(),
            coords,
        }
    }

    /// `V` followed by restriction, so the length is kept.
    pub fn verschiebung_trunc(&self) -> WittVector {
        let mut coords = vec![self.ring.zero()];
        coords.extend(self.coords[..self.len() - 1].iter().cloned());
        WittVector {
            ring: self.ring.clone(),
            coords,
        }
    }

    pub fn restriction(&self) -> Result<WittVector> {
        self.truncate(self.len().checked_sub(1).filter(|&k| k >= 1).ok_or_else(|| {
            Error::LengthUnderflow("restriction W_1 -> W_0 has no target".into())
        })?)
    }

    pub fn truncate(&self, n: usize) -> Result<WittVector> {
        if n == 0 || n > self.len() {
            return Err(Error::LengthUnderflow(format!("cannot truncate length {} to {n}", self.len())));
        }
        Ok(WittVector {
            ring: self.ring.clone(),
            coords: self.coords[..n].to_vec(),
        })
    }

    /// The pairing `W_n(R) x W_n(S) -> W_n(R ⊗ S)`, multiplicative on ghost components.
    pub fn pairing(&self, other: &WittVector) -> Result<WittVector> {
        let t = BaseRing::tensor(&self.ring, &other.ring)?;
        if self.len() != other.len() {
            return Err(Error::RingMismatch(format!(
                "lengths {} and {} differ",
                self.len(),
                other.len()
            )));
        }
        let n = self.len();
        let m = lift_modulus_exponent(&t, n);
        let art = t.lift_arith(m)?;
        let (_, ga) = self.lifted_ghost(m);
        let (_, gb) = other.lifted_ghost(m);
        let sb = other.ring.num_slots();
        let g: Vec<Elem> = ga
            .iter()
            .zip(&gb)
            .map(|(x, y)| {
                let mut z = art.zero();
                for (i, &xi) in x.iter().enumerate() {
                    if xi == 0 {
                        continue;
                    }
                    for (j, &yj) in y.iter().enumerate() {
                        z[i * sb + j] = ((xi as u128 * yj as u128) % art.q as u128) as u64;
                    }
                }
                z
            })
            .collect();
        Ok(WittVector::from_lift(&t, &art, &g, n))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p(),
            "n": self.len(),
            "ring": self.ring.to_string(),
            "coords": self.coords_json(),
        })
    }

    pub fn coords_json(&self) -> Value {
        Value::Array(self.coords.iter().map(|c| self.ring.elem_to_json(c)).collect())
    }

    pub fn from_json(v: &Value) -> Result<WittVector> {
        let ring = v
            .get("ring")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("Witt vector JSON needs a ring".into()))?;
        let p = v.get("p").and_then(Value::as_u64);
        let ring = BaseRing::parse(ring, p)?;
        let coords = v
            .get("coords")
            .ok_or_else(|| Error::Parse("Witt vector JSON needs coords".into()))?;
        let w = WittVector::from_coords_json(&ring, coords)?;
        if let Some(n) = v.get("n").and_then(Value::as_u64) {
            if n as usize != w.len() {
                return Err(Error::RingMismatch(format!("n = {n} but {} coordinates", w.len())));
            }
        }
        Ok(w)
    }

    pub fn from_coords_json(ring: &BaseRing, coords: &Value) -> Result<WittVector> {
        let items = coords
            .as_array()
            .ok_or_else(|| Error::Parse(format!("coordinates must be a JSON array, got {coords}")))?;
        let coords = items
            .iter()
            .map(|c| ring.elem_from_json(c))
            .collect::<Result<Vec<_>>>()?;
        WittVector::new(ring.clone(), coords)
    }
}
