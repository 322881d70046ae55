use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::lattice::{congruence_lattice, Lattice};
use super::weight::{subsets, union_with, wedge_sign, Weight};
use crate::algebra::{FinAbPres, GroupHom, Matrix};
use crate::error::{Error, Result};
use crate::witt::{is_prime, BaseRing, WittAdditive, WittVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DRWConfig {
    pub p: u64,
    /// Witt length `n`.
    pub n: usize,
    /// Number of variables `v`.
    pub vars: usize,
    /// `x_j^(degcap+1) = 0` for every variable.
    pub degcap: u32,
}

impl DRWConfig {
    pub fn new(p: u64, n: usize, vars: usize, degcap: u32) -> DRWConfig {
        DRWConfig { p, n, vars, degcap }
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::Parse(format!("{} is not prime", self.p)));
        }
        if self.n == 0 || self.degcap == 0 {
            return Err(Error::Parse("Witt length and degree cap must be at least 1".into()));
        }
        if self.vars > 2 || self.n > 3 {
            return Err(Error::EnvelopeExceeded(format!(
                "de Rham-Witt is built for at most 2 variables and Witt length 3, got {} and {}",
                self.vars, self.n
            )));
        }
        Ok(())
    }

    /// The base ring `F_p[x_1..x_v]/(x_j^(D+1))`.
    pub fn ring(&self) -> Result<BaseRing> {
        let names: Vec<String> = (0..self.vars).map(crate::witt::var_name).collect();
        let spec: Vec<(&str, u32)> = names.iter().map(|s| (s.as_str(), self.degcap + 1)).collect();
        BaseRing::truncated(self.p, 1, &spec)
    }
}

/// One Witt length of the pro-complex.
#[derive(Clone, Debug)]
pub struct DrwLevel {
    pub m: usize,
    /// `W_mΩ^i` for `i = 0..=v`.
    pub terms: Vec<FinAbPres>,
    /// `d: W_mΩ^i -> W_mΩ^{i+1}` for `i < v`.
    pub d: Vec<GroupHom>,
    /// Multiplication by `[-1] d[-1]`.
    pub eta: Vec<GroupHom>,
}

/// Generators of one weight in each degree.
#[derive(Clone, Debug)]
pub struct WeightBlock {
    pub weight: Weight,
    /// `(offset, count)` per degree.
    pub ranges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct DrwComplex {
    pub cfg: DRWConfig,
    pub levels: Vec<DrwLevel>,
    /// `f[m-1][i]: W_{m+1}Ω^i -> W_mΩ^i`.
    pub f: Vec<Vec<GroupHom>>,
    /// `v[m-1][i]: W_mΩ^i -> W_{m+1}Ω^i`.
    pub v: Vec<Vec<GroupHom>>,
    /// `r[m-1][i]: W_{m+1}Ω^i -> W_mΩ^i`.
    pub r: Vec<Vec<GroupHom>>,
    pub blocks: Vec<WeightBlock>,
    /// `[-1]` in `W_n(F_p) = Z/p^n`.
    pub minus_one: BigInt,
}

impl DrwComplex {
    pub fn top(&self) -> usize {
        self.cfg.n
    }

    pub fn level(&self, m: usize) -> &DrwLevel {
        &self.levels[m - 1]
    }

    /// `W_mΩ^q`, which is zero for `q > v`.
    pub fn term(&self, m: usize, q: usize) -> FinAbPres {
        self.level(m).terms.get(q).cloned().unwrap_or_else(FinAbPres::trivial)
    }

    /// `F: W_{m+1}Ω^i -> W_mΩ^i`.
    pub fn frobenius(&self, m: usize, i: usize) -> &GroupHom {
        &self.f[m - 1][i]
    }

    /// `V: W_mΩ^i -> W_{m+1}Ω^i`.
    pub fn verschiebung(&self, m: usize, i: usize) -> &GroupHom {
        &self.v[m - 1][i]
    }

    /// `R: W_{m+1}Ω^i -> W_mΩ^i`.
    pub fn restriction(&self, m: usize, i: usize) -> &GroupHom {
        &self.r[m - 1][i]
    }

    /// `V ∘ R` on `W_mΩ^i`, the endomorphism induced by `V` on a single Witt length.
    pub fn v_endo(&self, m: usize, i: usize) -> GroupHom {
        let t = &self.level(m).terms[i];
        if m == 1 {
            GroupHom::zero(t, t)
        } else {
            self.restriction(m - 1, i).compose(self.verschiebung(m - 1, i))
        }
    }

    pub fn csv_rows(&self) -> String {
        let mut out = String::from("witt_length,degree,degcap,invariant_factors,d_sha256,f_sha256,v_sha256\n");
        for lvl in &self.levels {
            let m = lvl.m;
            for (i, g) in lvl.terms.iter().enumerate() {
                let d = lvl.d.get(i).map(|h| digest(h.matrix())).unwrap_or_else(|| "-".into());
                let f = if m > 1 { digest(self.frobenius(m - 1, i).matrix()) } else { "-".into() };
                let v = if m < self.top() { digest(self.verschiebung(m, i).matrix()) } else { "-".into() };
                out.push_str(&format!("{m},{i},{},{},{d},{f},{v}\n", self.cfg.degcap, g.invariants()));
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let maps = |hs: &Vec<Vec<GroupHom>>| -> Value {
            hs.iter().map(|row| row.iter().map(|h| h.matrix().to_json()).collect::<Vec<_>>()).collect()
        };
        json!({
            "p": self.cfg.p,
            "witt_length": self.cfg.n,
            "vars": self.cfg.vars,
            "degcap": self.cfg.degcap,
            "levels": self.levels.iter().map(|l| json!({
                "witt_length": l.m,
                "terms": l.terms.iter().map(|g| g.to_json()).collect::<Vec<_>>(),
                "invariants": l.terms.iter().map(|g| g.invariants().to_string()).collect::<Vec<_>>(),
                "d": l.d.iter().map(|h| h.matrix().to_json()).collect::<Vec<_>>(),
                "eta": l.eta.iter().map(|h| h.matrix().to_json()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "F": maps(&self.f),
            "V": maps(&self.v),
            "R": maps(&self.r),
            "weights": self.blocks.iter().map(|b| b.weight.to_string()).collect::<Vec<_>>(),
        })
    }
}

fn digest(m: &Matrix) -> String {
    let h = Sha256::digest(m.to_json().to_string().as_bytes());
    h.iter().map(|b| format!("{b:02x}")).collect()
}

/// Integral forms `T^k dlog T_I` of the polynomial algebra, weight by weight.
struct Forms {
    p: u64,
    v: usize,
    n: usize,
    /// `D + 1`: a monomial lies in the cap ideal when some exponent reaches it.
    cut: u64,
    cache: HashMap<(Weight, usize), Lattice>,
}

impl Forms {
    fn pp(&self, e: u32) -> BigInt {
        BigInt::from(self.p).pow(e)
    }

    fn index(k: &Weight, i: usize) -> Vec<Vec<usize>> {
        subsets(&k.support(), i)
    }

    /// `d` at weight `k` from degree `i`, as numerators over `p^u(k)`.
    fn d_num(&self, k: &Weight, i: usize) -> Matrix {
        let src = Forms::index(k, i);
        let dst = Forms::index(k, i + 1);
        let mut m = Matrix::zeros(src.len(), dst.len());
        for (r, set) in src.iter().enumerate() {
            for j in k.support() {
                if let Some(s) = wedge_sign(j, set) {
                    let c = dst.iter().position(|t| *t == union_with(j, set)).expect("union is a subset of the support");
                    *m.entry_mut(r, c) += BigInt::from(s) * BigInt::from(k.num[j]);
                }
            }
        }
        m
    }

    /// `d` of an integral coordinate vector at weight `k`.
    fn d(&self, k: &Weight, i: usize, c: &[BigInt]) -> Vec<BigInt> {
        let num = self.d_num(k, i).apply(c);
        let q = self.pp(k.u);
        num.into_iter()
            .map(|x| {
                let (a, r) = x.div_rem(&q);
                assert!(r.is_zero(), "d of an integral form must be integral");
                a
            })
            .collect()
    }

    /// `E^i_k`: forms `ω` with `ω` and `dω` integral.
    fn e(&mut self, k: &Weight, i: usize) -> Lattice {
        if let Some(l) = self.cache.get(&(k.clone(), i)) {
            return l.clone();
        }
        let l = congruence_lattice(&self.d_num(k, i), &self.pp(k.u));
        self.cache.insert((k.clone(), i), l.clone());
        l
    }

    /// Exponent `t` with `W(I)_a = p^t T^a Z_p`, or `None` for `a = 0`.
    fn cap_exponent(&self, a: &Weight) -> Option<u32> {
        let top = *a.num.iter().max()?;
        if top == 0 {
            return None;
        }
        let mut t = a.u;
        let mut x = top;
        while x < self.cut {
            x *= self.p;
            t += 1;
        }
        Some(t)
    }

    /// Coordinates of a form at weight `b <= k`, re-indexed by the support of `k`.
    fn embed(&self, b: &Weight, k: &Weight, i: usize, c: &[BigInt]) -> Vec<BigInt> {
        let from = Forms::index(b, i);
        let to = Forms::index(k, i);
        let mut out = vec![BigInt::zero(); to.len()];
        for (s, x) in from.iter().zip(c) {
            let pos = to.iter().position(|t| t == s).expect("support of b lies in the support of k");
            out[pos] = x.clone();
        }
        out
    }

    /// `θ ∧ ω` for a one-form `θ` and an `(i-1)`-form `ω`, both at weight `k`'s support.
    fn wedge(&self, k: &Weight, i: usize, theta: &[BigInt], omega: &[BigInt]) -> Vec<BigInt> {
        let ones = Forms::index(k, 1);
        let src = Forms::index(k, i - 1);
        let dst = Forms::index(k, i);
        let mut out = vec![BigInt::zero(); dst.len()];
        for (a, tj) in ones.iter().zip(theta) {
            if tj.is_zero() {
                continue;
            }
            let j = a[0];
            for (set, w) in src.iter().zip(omega) {
                if w.is_zero() {
                    continue;
                }
                if let Some(s) = wedge_sign(j, set) {
                    let pos = dst.iter().position(|t| *t == union_with(j, set)).expect("subset of the support");
                    out[pos] += BigInt::from(s) * tj * w;
                }
            }
        }
        out
    }

    /// `(W(I) E + dW(I) E)_k + p^n E_k` in degree `i`.
    fn cap_ideal(&mut self, k: &Weight, i: usize) -> Lattice {
        let dim = Forms::index(k, i).len();
        let pn = self.pp(self.n as u32);
        let mut l = Lattice::scalar(dim, &pn);
        if dim == 0 {
            return l;
        }
        // Products with factors of larger denominator only contribute multiples of p^n.
        let big_u = self.n as u32 - 1 + k.u;
        let bound = k.numerators_at(self.p, big_u);
        let mut a_num = vec![0u64; self.v];
        loop {
            if a_num.iter().any(|&x| x > 0) {
                let a = Weight::new(self.p, a_num.clone(), big_u);
                let b_num: Vec<u64> = bound.iter().zip(&a_num).map(|(x, y)| x - y).collect();
                let b = Weight::new(self.p, b_num, big_u);
                if let Some(t) = self.cap_exponent(&a) {
                    let s = self.pp(t);
                    if t < self.n as u32 {
                        let eb = self.e(&b, i);
                        if eb.dim() > 0 {
                            let basis = eb.basis();
                            for r in 0..basis.rows() {
                                let w = self.embed(&b, k, i, basis.row(r));
                                l.insert(w.iter().map(|x| x * &s).collect());
                            }
                        }
                    }
                    if i >= 1 {
                        // d(p^t T^a) = p^t sum_j a_j dlog T_j.
                        let q = self.pp(a.u);
                        let theta_a: Vec<BigInt> = a
                            .support()
                            .iter()
                            .map(|&j| (&s * BigInt::from(a.num[j])).div_floor(&q))
                            .collect();
                        let theta = self.embed(&a, k, 1, &theta_a);
                        let eb = self.e(&b, i - 1);
                        let basis = eb.basis();
                        for r in 0..basis.rows() {
                            let w = self.embed(&b, k, i - 1, basis.row(r));
                            l.insert(self.wedge(k, i, &theta, &w));
                        }
                    }
                }
            }
            // Next point of the grid `0 <= a <= k` in `p^-U Z^v`.
            let mut j = 0;
            while j < self.v {
                if a_num[j] < bound[j] {
                    a_num[j] += 1;
                    break;
                }
                a_num[j] = 0;
                j += 1;
            }
            if j == self.v {
                break;
            }
        }
        l
    }

    /// `V^m E_{p^m k} + dV^m E_{p^m k}` in degree `i`.
    fn filtration(&mut self, k: &Weight, i: usize, m: usize) -> Lattice {
        let dim = Forms::index(k, i).len();
        let pm = self.pp(m as u32);
        let km = k.scaled(self.p, m as u32);
        let mut l = Lattice::empty(dim);
        let e = self.e(&km, i).basis();
        for r in 0..e.rows() {
            l.insert(e.row(r).iter().map(|x| x * &pm).collect());
        }
        if i >= 1 {
            let e = self.e(&km, i - 1).basis();
            for r in 0..e.rows() {
                let x: Vec<BigInt> = e.row(r).iter().map(|x| x * &pm).collect();
                l.insert(self.d(k, i - 1, &x));
            }
        }
        l
    }
}

/// Per-weight data at every level.
struct Piece {
    weight: Weight,
    /// Basis of `E^i_k` per degree.
    basis: Vec<Lattice>,
    /// Relation rows (in basis coordinates) per level and degree.
    relations: Vec<Vec<Matrix>>,
}

fn coords_or_bug(l: &Lattice, w: &[BigInt], what: &str) -> Result<Vec<BigInt>> {
    l.coords(w)
        .ok_or_else(|| Error::NonConvergent(format!("{what} leaves the lattice of integral forms")))
}

pub fn build_drw(cfg: &DRWConfig) -> Result<DrwComplex> {
    cfg.validate()?;
    let (p, n, nv) = (cfg.p, cfg.n, cfg.vars);
    let cut = cfg.degcap as u64 + 1;
    let mut forms = Forms {
        p,
        v: nv,
        n,
        cut,
        cache: HashMap::new(),
    };
    // Weights with denominator at most p^n and coordinates at most D+2; the outer
    // layer (some coordinate above D+1) must vanish.
    let mut weights = Vec::new();
    for u in 0..=n as u32 {
        let top = (cut + 1) * p.pow(u);
        let mut num = vec![0u64; nv];
        loop {
            let w = Weight::new(p, num.clone(), u);
            if w.u == u {
                weights.push(w);
            }
            let mut j = 0;
            while j < nv {
                if num[j] < top {
                    num[j] += 1;
                    break;
                }
                num[j] = 0;
                j += 1;
            }
            if j == nv {
                break;
            }
        }
    }
    Weight::sort(&mut weights, p);
    let mut pieces = Vec::new();
    for k in weights {
        let degrees = k.support().len().min(nv);
        let basis: Vec<Lattice> = (0..=degrees).map(|i| forms.e(&k, i)).collect();
        let filtered_out = (0..=degrees).all(|i| {
            let fil = forms.filtration(&k, i, n);
            let b = basis[i].basis();
            (0..b.rows()).all(|r| fil.contains(b.row(r)))
        });
        if filtered_out {
            continue;
        }
        let cap: Vec<Lattice> = (0..=degrees).map(|i| forms.cap_ideal(&k, i)).collect();
        let mut relations = Vec::new();
        for m in 1..=n {
            let mut per_degree = Vec::new();
            for i in 0..=degrees {
                let mut s = forms.filtration(&k, i, m);
                s.add(&cap[i]);
                let gens = s.generators();
                let mut rows = Matrix::zeros(0, basis[i].dim());
                for r in 0..gens.rows() {
                    rows.push_row(coords_or_bug(&basis[i], gens.row(r), "the relation module")?);
                }
                per_degree.push(rows);
            }
            relations.push(per_degree);
        }
        let trivial = relations[n - 1]
            .iter()
            .all(|rel| FinAbPres::new(rel.cols(), rel.clone()).is_trivial());
        if trivial {
            continue;
        }
        if !k.coords_at_most(p, cut) {
            return Err(Error::NonConvergent(format!(
                "weight {k} beyond the degree cap survives in W_{n}Ω"
            )));
        }
        pieces.push(Piece {
            weight: k,
            basis,
            relations,
        });
    }
    // Generator layout per degree.
    let mut blocks = Vec::new();
    let mut totals = vec![0usize; nv + 1];
    for pc in &pieces {
        let mut ranges = Vec::new();
        for (i, total) in totals.iter_mut().enumerate() {
            let c = pc.basis.get(i).map_or(0, |l| l.dim());
            ranges.push((*total, c));
            *total += c;
        }
        blocks.push(WeightBlock {
            weight: pc.weight.clone(),
            ranges,
        });
    }
    let position: HashMap<Weight, usize> = blocks.iter().enumerate().map(|(i, b)| (b.weight.clone(), i)).collect();

    let mut groups: Vec<Vec<FinAbPres>> = Vec::new();
    for m in 1..=n {
        let mut per_degree = Vec::new();
        for (i, &total) in totals.iter().enumerate() {
            let mut rels = Matrix::zeros(0, total);
            for (pc, b) in pieces.iter().zip(&blocks) {
                let (off, c) = b.ranges[i];
                if c == 0 {
                    continue;
                }
                let r = &pc.relations[m - 1][i];
                for row in 0..r.rows() {
                    let mut full = vec![BigInt::zero(); total];
                    full[off..off + c].clone_from_slice(r.row(row));
                    rels.push_row(full);
                }
            }
            per_degree.push(FinAbPres::new(total, rels));
        }
        groups.push(per_degree);
    }

    // A weight-shifting operator: basis row at weight k goes to `scale * row` at `target(k)`.
    let shift = |i: usize, target: &dyn Fn(&Weight) -> Weight, scale: &BigInt| -> Result<Matrix> {
        let mut mat = Matrix::zeros(totals[i], totals[i]);
        for (pc, b) in pieces.iter().zip(&blocks) {
            let (off, c) = b.ranges[i];
            if c == 0 {
                continue;
            }
            let t = target(&pc.weight);
            let Some(&ti) = position.get(&t) else { continue };
            let (toff, tc) = blocks[ti].ranges[i];
            if tc == 0 {
                continue;
            }
            let basis = pc.basis[i].basis();
            for r in 0..c {
                let w: Vec<BigInt> = basis.row(r).iter().map(|x| x * scale).collect();
                let x = coords_or_bug(&pieces[ti].basis[i], &w, "a Frobenius or Verschiebung image")?;
                for (s, xs) in x.into_iter().enumerate() {
                    mat.set(off + r, toff + s, xs);
                }
            }
        }
        Ok(mat)
    };
    let mut f_mats = Vec::new();
    let mut v_mats = Vec::new();
    for i in 0..=nv {
        f_mats.push(shift(i, &|k: &Weight| k.times_p(p), &BigInt::one())?);
        v_mats.push(shift(i, &|k: &Weight| k.over_p(p), &BigInt::from(p))?);
    }
    let mut d_mats = Vec::new();
    for i in 0..nv {
        let mut mat = Matrix::zeros(totals[i], totals[i + 1]);
        for (pc, b) in pieces.iter().zip(&blocks) {
            let (off, c) = b.ranges[i];
            let (toff, tc) = b.ranges[i + 1];
            if c == 0 || tc == 0 {
                continue;
            }
            let basis = pc.basis[i].basis();
            for r in 0..c {
                let w = forms.d(&pc.weight, i, basis.row(r));
                let x = coords_or_bug(&pc.basis[i + 1], &w, "d")?;
                for (s, xs) in x.into_iter().enumerate() {
                    mat.set(off + r, toff + s, xs);
                }
            }
        }
        d_mats.push(mat);
    }

    // η is multiplication by θ = [-1] d[-1], a one-form of weight 0.
    let fp = BaseRing::fp(p)?;
    let additive = WittAdditive::new(&fp, n)?;
    let coeffs = additive.decompose(&WittVector::teichmuller(&fp, &[p - 1], n));
    let minus_one = coeffs
        .iter()
        .enumerate()
        .fold(BigInt::zero(), |acc, (k, c)| acc + c * BigInt::from(p).pow(k as u32))
        .mod_floor(&BigInt::from(p).pow(n as u32));
    let zero = Weight::zero(nv);
    let theta: Vec<BigInt> = forms
        .d(&zero, 0, &[minus_one.clone()])
        .iter()
        .map(|x| x * &minus_one)
        .collect();
    let mut eta_mats = Vec::new();
    for i in 0..nv {
        let mut mat = Matrix::zeros(totals[i], totals[i + 1]);
        for (pc, b) in pieces.iter().zip(&blocks) {
            let (off, c) = b.ranges[i];
            let (toff, tc) = b.ranges[i + 1];
            if c == 0 || tc == 0 {
                continue;
            }
            let th = forms.embed(&zero, &pc.weight, 1, &theta);
            let basis = pc.basis[i].basis();
            for r in 0..c {
                let w = forms.wedge(&pc.weight, i + 1, &th, basis.row(r));
                let x = coords_or_bug(&pc.basis[i + 1], &w, "η")?;
                for (s, xs) in x.into_iter().enumerate() {
                    mat.set(off + r, toff + s, xs);
                }
            }
        }
        eta_mats.push(mat);
    }

    let mut levels = Vec::new();
    for m in 1..=n {
        let g = &groups[m - 1];
        let d = (0..nv)
            .map(|i| GroupHom::new(g[i].clone(), g[i + 1].clone(), d_mats[i].clone()))
            .collect::<Result<Vec<_>>>()?;
        let eta = (0..nv)
            .map(|i| GroupHom::new(g[i].clone(), g[i + 1].clone(), eta_mats[i].clone()))
            .collect::<Result<Vec<_>>>()?;
        levels.push(DrwLevel {
            m,
            terms: g.clone(),
            d,
            eta,
        });
    }
    let mut f = Vec::new();
    let mut v = Vec::new();
    let mut r = Vec::new();
    for m in 1..n {
        let (lo, hi) = (&groups[m - 1], &groups[m]);
        f.push(
            (0..=nv)
                .map(|i| GroupHom::new(hi[i].clone(), lo[i].clone(), f_mats[i].clone()))
                .collect::<Result<Vec<_>>>()?,
        );
        v.push(
            (0..=nv)
                .map(|i| GroupHom::new(lo[i].clone(), hi[i].clone(), v_mats[i].clone()))
                .collect::<Result<Vec<_>>>()?,
        );
        r.push(
            (0..=nv)
                .map(|i| GroupHom::new(hi[i].clone(), lo[i].clone(), Matrix::identity(totals[i])))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(DrwComplex {
        cfg: *cfg,
        levels,
        f,
        v,
        r,
        blocks,
        minus_one,
    })
}
