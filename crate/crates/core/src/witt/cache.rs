use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::poly::Poly;
use super::ring::{is_prime, BaseRing, Elem};
use super::vector::WittVector;
use crate::error::{Error, Result};

pub const CACHE_VERSION: u64 = 1;

/// An index is generated only while every polynomial of the previous index has at most this many terms.
pub const TERM_BUDGET: usize = 100;

/// Universal sum, product, negation and Frobenius polynomials for indices `< coverage`.
///
/// `sum`, `prod` live in `x_0..x_{c-1}, y_0..y_{c-1}`, `neg` in `x_0..x_{c-1}` and
/// `frob` in `x_0..x_c`, where `c = coverage`.
#[derive(Clone, Debug, PartialEq)]
pub struct WittPolyCache {
    pub p: u64,
    pub n: usize,
    pub coverage: usize,
    pub sum: Vec<Poly>,
    pub prod: Vec<Poly>,
    pub neg: Vec<Poly>,
    pub frob: Vec<Poly>,
}

fn pow_big(p: u64, k: u32) -> BigInt {
    BigInt::from(p).pow(k)
}

/// `w_i` in the variables `vars[0..=i]`.
fn witt_poly(p: u64, i: usize, nvars: usize, vars: &[usize]) -> Poly {
    let mut w = Poly::zero(nvars);
    for j in 0..=i {
        let term = Poly::var(nvars, vars[j]).pow(p.pow((i - j) as u32));
        w = w.add(&term.scale(&pow_big(p, j as u32)));
    }
    w
}

/// Next universal polynomial from its ghost target and the previously solved ones.
fn solve_next(p: u64, target: Poly, prev: &[Poly]) -> Poly {
    let i = prev.len();
    let mut rest = target;
    for (j, s) in prev.iter().enumerate() {
        rest = rest.sub(&s.pow(p.pow((i - j) as u32)).scale(&pow_big(p, j as u32)));
    }
    rest.div_exact(&pow_big(p, i as u32))
}

pub fn generate_universal_polys(p: u64, n: usize) -> WittPolyCache {
    assert!(is_prime(p) && n >= 1);
    // working layout: x_j at j (0..=n), y_j at n+1+j
    let nv = 2 * n + 2;
    let xs: Vec<usize> = (0..=n).collect();
    let ys: Vec<usize> = (n + 1..2 * n + 2).collect();
    let (mut sum, mut prod, mut neg, mut frob) = (vec![], vec![], vec![], vec![]);
    for i in 0..n {
        let widest = [&sum, &prod, &neg, &frob]
            .iter()
            .filter_map(|t| t.last().map(Poly::num_terms))
            .max()
            .unwrap_or(0);
        if widest > TERM_BUDGET {
            break;
        }
        let wx = witt_poly(p, i, nv, &xs);
        let wy = witt_poly(p, i, nv, &ys);
        let s = solve_next(p, wx.add(&wy), &sum);
        let m = solve_next(p, wx.mul(&wy), &prod);
        let ng = solve_next(p, Poly::zero(nv).sub(&wx), &neg);
        let f = solve_next(p, witt_poly(p, i + 1, nv, &xs), &frob);
        sum.push(s);
        prod.push(m);
        neg.push(ng);
        frob.push(f);
    }
    let c = sum.len();
    // final layouts; variables that cannot occur are sent anywhere
    let xy: Vec<usize> = (0..nv)
        .map(|v| match v {
            v if v < c => v,
            v if v > n && v - n - 1 < c => c + v - n - 1,
            _ => 0,
        })
        .collect();
    let x: Vec<usize> = (0..nv).map(|v| if v <= c { v } else { 0 }).collect();
    let x_neg: Vec<usize> = (0..nv).map(|v| if v < c { v } else { 0 }).collect();
    let remap = |t: &[Poly], k: usize, map: &[usize]| -> Vec<Poly> { t.iter().map(|q| q.substitute_vars(k, map)).collect() };
    WittPolyCache {
        p,
        n,
        coverage: c,
        sum: remap(&sum, 2 * c, &xy),
        prod: remap(&prod, 2 * c, &xy),
        neg: remap(&neg, c, &x_neg),
        frob: remap(&frob, c + 1, &x),
    }
}

impl WittPolyCache {
    pub fn max_terms(&self) -> Vec<usize> {
        (0..self.coverage)
            .map(|i| {
                [&self.sum, &self.prod, &self.neg, &self.frob]
                    .iter()
                    .map(|t| t[i].num_terms())
                    .max()
                    .unwrap()
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let table = |t: &[Poly]| Value::Array(t.iter().map(Poly::to_json).collect());
        json!({
            "version": CACHE_VERSION,
            "p": self.p,
            "n": self.n,
            "coverage": self.coverage,
            "sum": table(&self.sum),
            "prod": table(&self.prod),
            "neg": table(&self.neg),
            "frob": table(&self.frob),
        })
    }

    pub fn from_json(v: &Value) -> Result<WittPolyCache> {
        let field = |k: &str| v.get(k).and_then(Value::as_u64).ok_or_else(|| Error::CacheCorrupt(format!("missing {k}")));
        let version = field("version")?;
        if version != CACHE_VERSION {
            return Err(Error::CacheCorrupt(format!("version {version}, expected {CACHE_VERSION}")));
        }
        let p = field("p")?;
        let n = field("n")? as usize;
        let c = field("coverage")? as usize;
        if !is_prime(p) || c > n || c == 0 {
            return Err(Error::CacheCorrupt(format!("bad header p={p} n={n} coverage={c}")));
        }
        let table = |k: &str, nvars: usize| -> Result<Vec<Poly>> {
            let items = v
                .get(k)
                .and_then(Value::as_array)
                .filter(|a| a.len() == c)
                .ok_or_else(|| Error::CacheCorrupt(format!("table {k} missing or of wrong length")))?;
            items.iter().map(|t| Poly::from_json(t, nvars)).collect()
        };
        Ok(WittPolyCache {
            p,
            n,
            coverage: c,
            sum: table("sum", 2 * c)?,
            prod: table("prod", 2 * c)?,
            neg: table("neg", c)?,
            frob: table("frob", c + 1)?,
        })
    }

    /// Checks every ghost identity at `trials` random integer points in `[-10^6, 10^6]`.
    pub fn spotcheck(&self, trials: usize, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = self.coverage;
        let p = self.p;
        for t in 0..trials {
            let x: Vec<BigInt> = (0..=c).map(|_| BigInt::from(rng.gen_range(-1_000_000i64..=1_000_000))).collect();
            let y: Vec<BigInt> = (0..c).map(|_| BigInt::from(rng.gen_range(-1_000_000i64..=1_000_000))).collect();
            let xy: Vec<BigInt> = x[..c].iter().chain(&y).cloned().collect();
            let ghost = |vals: &[BigInt], i: usize| -> BigInt {
                (0..=i).map(|j| pow_big(p, j as u32) * vals[j].pow(p.pow((i - j) as u32) as u32)).sum()
            };
            let s: Vec<BigInt> = self.sum.iter().map(|q| q.eval_int(&xy)).collect();
            let m: Vec<BigInt> = self.prod.iter().map(|q| q.eval_int(&xy)).collect();
            let ng: Vec<BigInt> = self.neg.iter().map(|q| q.eval_int(&x[..c])).collect();
            let f: Vec<BigInt> = self.frob.iter().map(|q| q.eval_int(&x)).collect();
            for i in 0..c {
                let checks = [
                    ("sum", ghost(&s, i), ghost(&x, i) + ghost(&y, i)),
                    ("prod", ghost(&m, i), ghost(&x, i) * ghost(&y, i)),
                    ("neg", ghost(&ng, i), -ghost(&x, i)),
                    ("frob", ghost(&f, i), ghost(&x, i + 1)),
                ];
                for (name, got, want) in checks {
                    if got != want {
                        return Err(Error::CacheCorrupt(format!(
                            "{name} polynomial {i} fails its ghost identity at trial {t} (p = {p})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn covers(&self, ring: &BaseRing, len: usize) -> Result<()> {
        if ring.p() != self.p {
            return Err(Error::PrimeMismatch(ring.p(), self.p));
        }
        if len > self.coverage {
            return Err(Error::EnvelopeExceeded(format!(
                "polynomial tables for p = {} cover length {}, got {len}",
                self.p, self.coverage
            )));
        }
        Ok(())
    }

    fn padded(&self, ring: &BaseRing, parts: &[&[Elem]], width: usize) -> Vec<Elem> {
        let mut out = Vec::new();
        for part in parts {
            out.extend(part.iter().cloned());
            out.extend(std::iter::repeat(ring.zero()).take(width - part.len()));
        }
        out
    }

    fn binary(&self, table: &[Poly], a: &WittVector, b: &WittVector) -> Result<WittVector> {
        if a.ring() != b.ring() || a.len() != b.len() {
            return Err(Error::RingMismatch(format!("{} of length {} vs {} of length {}", a.ring(), a.len(), b.ring(), b.len())));
        }
        self.covers(a.ring(), a.len())?;
        let ar = a.ring().arith();
        let vals = self.padded(a.ring(), &[a.coords(), b.coords()], self.coverage);
        let coords = table[..a.len()].iter().map(|q| q.eval_ring(&ar, &vals)).collect();
        WittVector::new(a.ring().clone(), coords)
    }

    pub fn add(&self, a: &WittVector, b: &WittVector) -> Result<WittVector> {
        self.binary(&self.sum, a, b)
    }

    pub fn mul(&self, a: &WittVector, b: &WittVector) -> Result<WittVector> {
        self.binary(&self.prod, a, b)
    }

    pub fn neg(&self, a: &WittVector) -> Result<WittVector> {
        self.covers(a.ring(), a.len())?;
        let ar = a.ring().arith();
        let vals = self.padded(a.ring(), &[a.coords()], self.coverage);
        let coords = self.neg[..a.len()].iter().map(|q| q.eval_ring(&ar, &vals)).collect();
        WittVector::new(a.ring().clone(), coords)
    }

    pub fn frobenius(&self, a: &WittVector) -> Result<WittVector> {
        if a.len() < 2 {
            return Err(Error::LengthUnderflow("frobenius W_n -> W_(n-1) needs n >= 2".into()));
        }
        self.covers(a.ring(), a.len() - 1)?;
        let ar = a.ring().arith();
        let vals = self.padded(a.ring(), &[a.coords()], self.coverage + 1);
        let coords = self.frob[..a.len() - 1].iter().map(|q| q.eval_ring(&ar, &vals)).collect();
        WittVector::new(a.ring().clone(), coords)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Loaded,
    Generated,
    Regenerated(String),
}

/// Directory of cache files, one per `(p, n)`.
#[derive(Clone, Debug)]
pub struct CacheStore {
    dir: PathBuf,
}

pub const CACHE_ENV: &str = "CARTIERKIT_CACHE";

/// `$XDG_CACHE_HOME/cartierkit`, else `~/.cache/cartierkit`, else a directory under the system temp dir.
pub fn default_cache_dir() -> PathBuf {
    if let Some(x) = std::env::var_os("XDG_CACHE_HOME").filter(|x| !x.is_empty()) {
        return PathBuf::from(x).join("cartierkit");
    }
    if let Some(h) = std::env::var_os("HOME").filter(|x| !x.is_empty()) {
        return PathBuf::from(h).join(".cache").join("cartierkit");
    }
    std::env::temp_dir().join("cartierkit")
}

/// Flag, then `CARTIERKIT_CACHE`, then the platform default.
pub fn resolve_cache_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(f) = flag {
        return f.to_path_buf();
    }
    if let Some(e) = std::env::var_os(CACHE_ENV).filter(|x| !x.is_empty()) {
        return PathBuf::from(e);
    }
    default_cache_dir()
}

impl CacheStore {
    pub fn new(dir: impl Into<PathBuf>) -> CacheStore {
        CacheStore { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, p: u64, n: usize) -> PathBuf {
        self.dir.join(format!("witt-p{p}-n{n}.json"))
    }

    pub fn load(&self, p: u64, n: usize) -> Result<WittPolyCache> {
        let text = fs::read_to_string(self.path(p, n))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::CacheCorrupt(e.to_string()))?;
        let c = WittPolyCache::from_json(&v)?;
        if c.p != p || c.n != n {
            return Err(Error::CacheCorrupt(format!("file holds p={} n={}, expected p={p} n={n}", c.p, c.n)));
        }
        c.spotcheck(3, p * 1000 + n as u64)?;
        Ok(c)
    }

    pub fn store(&self, c: &WittPolyCache) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(c.p, c.n);
        let tmp = path.with_extension(format!("json.tmp{}", std::process::id()));
        fs::write(&tmp, serde_json::to_string(&c.to_json()).expect("cache serializes"))?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// Loads the table, regenerating it when missing or corrupt. Corrupt files are replaced whole.
    pub fn load_or_generate(&self, p: u64, n: usize) -> Result<(WittPolyCache, CacheStatus)> {
        let path = self.path(p, n);
        let status = if path.exists() {
            match self.load(p, n) {
                Ok(c) => return Ok((c, CacheStatus::Loaded)),
                Err(e) => {
                    log::warn!("regenerating {}: {e}", path.display());
                    CacheStatus::Regenerated(e.to_string())
                }
            }
        } else {
            CacheStatus::Generated
        };
        let c = generate_universal_polys(p, n);
        self.store(&c)?;
        Ok((c, status))
    }
}
