use std::fmt;

use num_bigint::BigInt;
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Dense coefficient vector of a truncated polynomial; slot order is mixed radix
/// with the first variable outermost.
pub type Elem = Vec<u64>;

/// Coefficient arithmetic in `(Z/q)[x_1..x_v]/(x_i^{cut_i})`.
#[derive(Clone, Debug)]
pub struct Arith {
    pub q: u64,
    cuts: Vec<u32>,
    exps: Vec<Vec<u32>>,
}

impl Arith {
    pub fn new(q: u64, cuts: &[u32]) -> Arith {
        assert!(q >= 1 && q < (1u64 << 62), "modulus out of range");
        let mut exps = vec![vec![]];
        for &c in cuts {
            let mut next = Vec::with_capacity(exps.len() * c as usize);
            for e in &exps {
                for k in 0..c {
                    let mut f = e.clone();
                    f.push(k);
                    next.push(f);
                }
            }
            exps = next;
        }
        Arith {
            q,
            cuts: cuts.to_vec(),
            exps,
        }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self, slot: usize) -> &[u32] {
        &self.exps[slot]
    }

    pub fn zero(&self) -> Elem {
        vec![0; self.len()]
    }

    pub fn constant(&self, c: i64) -> Elem {
        let mut x = self.zero();
        x[0] = c.rem_euclid(self.q as i64) as u64;
        x
    }

    pub fn one(&self) -> Elem {
        self.constant(1)
    }

    pub fn reduce(&self, x: &[u64]) -> Elem {
        x.iter().map(|&c| c % self.q).collect()
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Elem {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.q).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Elem {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x + self.q - y % self.q) % self.q)
            .collect()
    }

    pub fn neg(&self, a: &[u64]) -> Elem {
        a.iter().map(|&x| (self.q - x % self.q) % self.q).collect()
    }

    pub fn scale(&self, a: &[u64], c: i64) -> Elem {
        let c = c.rem_euclid(self.q as i64) as u128;
        a.iter()
            .map(|&x| ((x as u128 * c) % self.q as u128) as u64)
            .collect()
    }

    fn slot_sum(&self, i: usize, j: usize) -> Option<usize> {
        let (a, b) = (&self.exps[i], &self.exps[j]);
        for v in 0..self.cuts.len() {
            if a[v] + b[v] >= self.cuts[v] {
                return None;
            }
        }
        Some(i + j)
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Elem {
        let q = self.q as u128;
        let mut out = vec![0u128; self.len()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                if let Some(k) = self.slot_sum(i, j) {
                    out[k] = (out[k] + x as u128 * y as u128) % q;
                }
            }
        }
        out.into_iter().map(|c| c as u64).collect()
    }

    pub fn pow(&self, a: &[u64], mut k: u64) -> Elem {
        let mut base = a.to_vec();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c % self.q == 0)
    }

    /// Slot of `m^k` for the monomial in slot `m`, or `None` if it is cut off.
    pub fn monomial_pow(&self, m: usize, k: u32) -> Option<usize> {
        let e = &self.exps[m];
        for v in 0..self.cuts.len() {
            if (e[v] as u64) * (k as u64) >= self.cuts[v] as u64 {
                return None;
            }
        }
        Some(m * k as usize)
    }
}

/// Finite base ring `(Z/p^e)[x_1..x_v]/(x_i^{cut_i})`. `Z/p^e` is the case `v = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BaseRing {
    p: u64,
    e: u32,
    vars: Vec<String>,
    cuts: Vec<u32>,
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Writes `q = p^e`, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut r, mut e) = (q, 0);
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

impl BaseRing {
    pub fn zmod(p: u64, e: u32) -> Result<BaseRing> {
        BaseRing::truncated(p, e, &[])
    }

    pub fn fp(p: u64) -> Result<BaseRing> {
        BaseRing::zmod(p, 1)
    }

    /// `vars` lists `(name, cut)` with `name^cut = 0`.
    pub fn truncated(p: u64, e: u32, vars: &[(&str, u32)]) -> Result<BaseRing> {
        if !is_prime(p) {
            return Err(Error::Parse(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(Error::Parse("coefficient ring Z/p^0 is the zero ring".into()));
        }
        if vars.iter().any(|&(_, c)| c == 0) {
            return Err(Error::Parse("truncation x^0 = 0 gives the zero ring".into()));
        }
        let r = BaseRing {
            p,
            e,
            vars: vars.iter().map(|(n, _)| n.to_string()).collect(),
            cuts: vars.iter().map(|&(_, c)| c).collect(),
        };
        if (p as f64).powi(e as i32) >= 2f64.powi(40) {
            return Err(Error::UnsupportedBase(format!("{r}: coefficient modulus too large")));
        }
        Ok(r)
    }

    /// Presentation of `R ⊗ S`; the coefficient exponent is the smaller one and
    /// the variables of `S` follow those of `R`.
    pub fn tensor(r: &BaseRing, s: &BaseRing) -> Result<BaseRing> {
        if r.p != s.p {
            return Err(Error::PrimeMismatch(r.p, s.p));
        }
        let mut vars = r.vars.clone();
        for v in &s.vars {
            let mut name = v.clone();
            let mut k = 2;
            while vars.contains(&name) {
                name = format!("{v}_{k}");
                k += 1;
            }
            vars.push(name);
        }
        let mut cuts = r.cuts.clone();
        cuts.extend_from_slice(&s.cuts);
        Ok(BaseRing {
            p: r.p,
            e: r.e.min(s.e),
            vars,
            cuts,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.e)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn cuts(&self) -> &[u32] {
        &self.cuts
    }

    pub fn is_char_p(&self) -> bool {
        self.e == 1
    }

    pub fn num_slots(&self) -> usize {
        self.cuts.iter().map(|&c| c as usize).product()
    }

    pub fn order(&self) -> BigInt {
        BigInt::from(self.p).pow(self.e * self.num_slots() as u32)
    }

    pub fn arith(&self) -> Arith {
        Arith::new(self.modulus(), &self.cuts)
    }

    /// Arithmetic in the torsion-free lift reduced modulo `p^m`.
    pub fn lift_arith(&self, m: u32) -> Result<Arith> {
        let q = (self.p as u128).checked_pow(m).filter(|&q| q < (1u128 << 62));
        match q {
            Some(q) => Ok(Arith::new(q as u64, &self.cuts)),
            None => Err(Error::EnvelopeExceeded(format!(
                "lift modulus {}^{m} does not fit in 62 bits",
                self.p
            ))),
        }
    }

    pub fn zero(&self) -> Elem {
        vec![0; self.num_slots()]
    }

    pub fn one(&self) -> Elem {
        self.constant(1)
    }

    pub fn constant(&self, c: i64) -> Elem {
        self.arith().constant(c)
    }

    pub fn monomial(&self, slot: usize) -> Elem {
        let mut x = self.zero();
        x[slot] = 1;
        x
    }

    pub fn random_elem<R: Rng>(&self, rng: &mut R) -> Elem {
        let q = self.modulus();
        (0..self.num_slots()).map(|_| rng.gen_range(0..q)).collect()
    }

    pub fn check_elem(&self, x: &[u64]) -> Result<()> {
        if x.len() != self.num_slots() || x.iter().any(|&c| c >= self.modulus()) {
            return Err(Error::RingMismatch(format!("{x:?} is not an element of {self}")));
        }
        Ok(())
    }

    /// Accepts an integer (a constant) or nested arrays of coefficients, first variable outermost.
    pub fn elem_from_json(&self, v: &Value) -> Result<Elem> {
        let mut out = self.zero();
        self.fill(v, 0, 0, &mut out)?;
        Ok(out)
    }

    fn fill(&self, v: &Value, depth: usize, base: usize, out: &mut Elem) -> Result<()> {
        let q = self.modulus() as i128;
        match v {
            Value::Number(_) | Value::String(_) => {
                let c: i128 = match v {
                    Value::Number(n) => n
                        .as_i64()
                        .map(|x| x as i128)
                        .ok_or_else(|| Error::Parse(format!("coefficient {n} is not an integer")))?,
                    Value::String(s) => s
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("coefficient {s:?} is not an integer")))?,
                    _ => unreachable!(),
                };
                out[base] = c.rem_euclid(q) as u64;
                Ok(())
            }
            Value::Array(items) => {
                if depth >= self.cuts.len() {
                    return Err(Error::Parse(format!("element of {self} nests too deeply")));
                }
                if items.len() > self.cuts[depth] as usize {
                    return Err(Error::RingMismatch(format!(
                        "{} coefficients given for {} with {}^{} = 0",
                        items.len(),
                        self,
                        self.vars[depth],
                        self.cuts[depth]
                    )));
                }
                let stride: usize = self.cuts[depth + 1..].iter().map(|&c| c as usize).product();
                for (k, item) in items.iter().enumerate() {
                    self.fill(item, depth + 1, base + k * stride, out)?;
                }
                Ok(())
            }
            _ => Err(Error::Parse(format!("cannot read a ring element from {v}"))),
        }
    }

    /// Inverse of `elem_from_json`; trailing zero coefficients are trimmed and constants print as integers.
    pub fn elem_to_json(&self, x: &[u64]) -> Value {
        self.dump(x, 0, 0)
    }

    fn dump(&self, x: &[u64], depth: usize, base: usize) -> Value {
        if depth == self.cuts.len() {
            return json!(x[base]);
        }
        let stride: usize = self.cuts[depth + 1..].iter().map(|&c| c as usize).product();
        let mut items: Vec<Value> = (0..self.cuts[depth] as usize)
            .map(|k| self.dump(x, depth + 1, base + k * stride))
            .collect();
        while items.len() > 1 && items.last() == Some(&json!(0)) {
            items.pop();
        }
        if items.len() == 1 && items[0].is_u64() {
            return items.pop().unwrap();
        }
        Value::Array(items)
    }

    /// Parses `F3`, `Z/9`, `F2[x]/x^5`, `Z/4[x,y]/(x^3,y^2)`. When `p` is given it must match.
    pub fn parse(s: &str, p: Option<u64>) -> Result<BaseRing> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (coef, rest) = match t.find('[') {
            Some(i) => (&t[..i], &t[i..]),
            None => (t.as_str(), ""),
        };
        let bad = || Error::Parse(format!("cannot parse ring {s:?}"));
        let (rp, e) = if let Some(n) = coef.strip_prefix("F_").or_else(|| coef.strip_prefix('F')) {
            let q: u64 = n.parse().map_err(|_| bad())?;
            if !is_prime(q) {
                return Err(Error::Parse(format!("F{q}: only prime fields are supported")));
            }
            (q, 1)
        } else if let Some(n) = coef.strip_prefix("Z/") {
            let n = n.trim_start_matches('(').trim_end_matches(')');
            let q: u64 = match n.split_once('^') {
                Some((b, x)) => {
                    let b: u64 = b.parse().map_err(|_| bad())?;
                    let x: u32 = x.parse().map_err(|_| bad())?;
                    b.checked_pow(x).ok_or_else(bad)?
                }
                None => n.parse().map_err(|_| bad())?,
            };
            prime_power(q).ok_or_else(|| Error::Parse(format!("Z/{q}: modulus is not a prime power")))?
        } else {
            return Err(bad());
        };
        if let Some(p) = p {
            if p != rp {
                return Err(Error::RingMismatch(format!("ring {s} has characteristic a power of {rp}, not {p}")));
            }
        }
        if rest.is_empty() {
            return BaseRing::zmod(rp, e);
        }
        let close = rest.find(']').ok_or_else(bad)?;
        let names: Vec<&str> = rest[1..close].split(',').collect();
        if names.iter().any(|n| !valid_name(n)) {
            return Err(bad());
        }
        let quot = rest[close + 1..].strip_prefix('/').ok_or_else(bad)?;
        let quot = quot.strip_prefix('(').and_then(|q| q.strip_suffix(')')).unwrap_or(quot);
        let mut cuts = vec![None; names.len()];
        for rel in quot.split(',') {
            let (name, k) = match rel.split_once('^') {
                Some((n, k)) => (n, k.parse::<u32>().map_err(|_| bad())?),
                None => (rel, 1),
            };
            let i = names.iter().position(|n| *n == name).ok_or_else(bad)?;
            if cuts[i].replace(k).is_some() {
                return Err(Error::Parse(format!("variable {name} truncated twice in {s:?}")));
            }
        }
        let vars: Vec<(&str, u32)> = names
            .iter()
            .zip(&cuts)
            .map(|(n, c)| c.map(|c| (*n, c)))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Parse(format!("every variable needs a truncation x^N in {s:?}")))?;
        BaseRing::truncated(rp, e, &vars)
    }

    pub fn to_json(&self) -> Value {
        json!(self.to_string())
    }
}

fn valid_name(n: &str) -> bool {
    let mut cs = n.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic())
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 1 {
            write!(f, "F{}", self.p)?;
        } else {
            write!(f, "Z/{}", self.modulus())?;
        }
        if !self.vars.is_empty() {
            let rels: Vec<String> = self
                .vars
                .iter()
                .zip(&self.cuts)
                .map(|(v, c)| format!("{v}^{c}"))
                .collect();
            write!(f, "[{}]/({})", self.vars.join(","), rels.join(","))?;
        }
        Ok(())
    }
}
