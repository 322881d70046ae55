use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::module::{tensor_input, vec_string, CartierModule, TensorInput};
use crate::algebra::{lim_lim1, tensor_ab, DerivedLimitResult, FinAbPres, GroupHom, Matrix, Tower};
use crate::error::{Error, Result};
use crate::witt::{BaseRing, WittAdditive};

/// `(M ⊠ N)/V^K` on generators `(m_i ⊗ n_j) V^d`, `d < K`.
#[derive(Clone, Debug)]
pub struct TruncatedTensor {
    pub k: usize,
    pub m_gens: usize,
    pub n_gens: usize,
    /// The quotient by `V^K` with its induced `V`. `F` only descends when `VF = p` on the inputs.
    pub quotient: FinAbPres,
    pub v: GroupHom,
    /// Quotient by the smallest `V`,`F`-stable subgroup containing `V^K`, a finite Cartier module.
    pub module: CartierModule,
}

impl TruncatedTensor {
    pub fn index(&self, i: usize, j: usize, d: usize) -> usize {
        gen_index(self.m_gens, self.n_gens, i, j, d)
    }

    pub fn num_generators(&self) -> usize {
        self.k * self.m_gens * self.n_gens
    }

    pub fn to_json(&self) -> Value {
        json!({
            "trunc": self.k,
            "quotient": self.quotient.invariants().to_string(),
            "module": self.module.structure().map(|s| s.group.invariants().to_string()).unwrap_or_default(),
            "presentation": self.quotient.to_json(),
            "V": self.v.matrix().to_json(),
        })
    }
}

fn gen_index(gm: usize, gn: usize, i: usize, j: usize, d: usize) -> usize {
    d * gm * gn + i * gn + j
}

/// One `⊠` relation: `low` sits in V-degree `d`, `high` in degree `d + 1`.
struct BoxRelation {
    d: usize,
    low: Vec<(usize, usize, BigInt)>,
    high_degree: usize,
    high: Vec<(usize, usize, BigInt)>,
}

/// `(m ⊗ Vn) V^d - (Fm ⊗ n) V^(d+1)` and `(Vm ⊗ n) V^d - (m ⊗ Fn) V^(d+1)` on generator pairs.
fn box_relations(a: &TensorInput, b: &TensorInput, d: usize) -> Vec<BoxRelation> {
    let mut out = Vec::new();
    let nonzero = |row: &[BigInt]| -> Vec<(usize, BigInt)> {
        row.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(s, c)| (s, c.clone())).collect()
    };
    for i in 0..a.gens() {
        for j in 0..b.gens() {
            out.push(BoxRelation {
                d,
                low: nonzero(b.v.row(j)).into_iter().map(|(t, c)| (i, t, c)).collect(),
                high_degree: d + 1,
                high: nonzero(a.f.row(i)).into_iter().map(|(s, c)| (s, j, c)).collect(),
            });
            out.push(BoxRelation {
                d,
                low: nonzero(a.v.row(i)).into_iter().map(|(s, c)| (s, j, c)).collect(),
                high_degree: d + 1,
                high: nonzero(b.f.row(j)).into_iter().map(|(t, c)| (i, t, c)).collect(),
            });
        }
    }
    out
}

fn tensor_relations(a: &TensorInput, b: &TensorInput, k: usize) -> Matrix {
    let (gm, gn) = (a.gens(), b.gens());
    let total = k * gm * gn;
    let mut rels = Matrix::zeros(0, total);
    for d in 0..k {
        let ra = a.group.relations();
        for r in 0..ra.rows() {
            for j in 0..gn {
                let mut row = vec![BigInt::zero(); total];
                for (s, c) in ra.row(r).iter().enumerate() {
                    row[gen_index(gm, gn, s, j, d)] += c;
                }
                rels.push_row(row);
            }
        }
        let rb = b.group.relations();
        for r in 0..rb.rows() {
            for i in 0..gm {
                let mut row = vec![BigInt::zero(); total];
                for (t, c) in rb.row(r).iter().enumerate() {
                    row[gen_index(gm, gn, i, t, d)] += c;
                }
                rels.push_row(row);
            }
        }
        for rel in box_relations(a, b, d) {
            // Both families raise the V-degree, so terms at degree >= K vanish in the quotient.
            assert!(rel.high_degree > rel.d, "a box relation must raise the V-degree");
            let mut row = vec![BigInt::zero(); total];
            for (i, j, c) in &rel.low {
                row[gen_index(gm, gn, *i, *j, rel.d)] += c;
            }
            if rel.high_degree < k {
                for (i, j, c) in &rel.high {
                    row[gen_index(gm, gn, *i, *j, rel.high_degree)] -= c;
                }
            }
            if row.iter().any(|c| !c.is_zero()) {
                rels.push_row(row);
            }
        }
    }
    rels
}

/// `(M ⊠ N)/V^K` as a cokernel of the relation map, one V-degree at a time.
pub fn tensor_trunc(m: &CartierModule, n: &CartierModule, k: usize) -> Result<TruncatedTensor> {
    if k < 1 {
        return Err(Error::TruncationTooSmall);
    }
    if m.p() != n.p() {
        return Err(Error::PrimeMismatch(m.p(), n.p()));
    }
    let p = m.p();
    let a = tensor_input(m, k)?;
    let b = tensor_input(n, k)?;
    let (gm, gn) = (a.gens(), b.gens());
    let total = k * gm * gn;
    let rels = tensor_relations(&a, &b, k);
    let quotient = FinAbPres::new(total, rels.clone()).with_label(format!("({m} ⊠ {n})/V^{k}"));

    let mut v = Matrix::zeros(total, total);
    let mut f = Matrix::zeros(total, total);
    let mut closure = rels;
    for d in 0..k {
        for i in 0..gm {
            for j in 0..gn {
                let g = gen_index(gm, gn, i, j, d);
                if d + 1 < k {
                    v.set(g, gen_index(gm, gn, i, j, d + 1), BigInt::one());
                }
                if d == 0 {
                    for (s, cs) in a.f.row(i).iter().enumerate() {
                        if cs.is_zero() {
                            continue;
                        }
                        for (t, ct) in b.f.row(j).iter().enumerate() {
                            if !ct.is_zero() {
                                *f.entry_mut(g, gen_index(gm, gn, s, t, 0)) += cs * ct;
                            }
                        }
                    }
                } else {
                    f.set(g, gen_index(gm, gn, i, j, d - 1), BigInt::from(p));
                }
                let mut row = vec![BigInt::zero(); total];
                row[g] = BigInt::from(p).pow((k - d) as u32);
                closure.push_row(row);
            }
        }
    }
    let v_plain = GroupHom::new(quotient.clone(), quotient.clone(), v.clone())?;
    let closed = FinAbPres::new(total, closure);
    let module = CartierModule::finite(p, closed, v, f)
        .map_err(|e| Error::MapIllDefined(format!("induced V or F on the truncated tensor: {e}")))?
        .with_label(format!("{m} ⊠ {n} mod V^{k}"));
    Ok(TruncatedTensor {
        k,
        m_gens: gm,
        n_gens: gn,
        quotient,
        v: v_plain,
        module,
    })
}

/// The tower `{(M ⊠ N)/V^k}_{k <= prec}` and its derived limit.
#[derive(Clone, Debug)]
pub struct CompletedTensor {
    pub levels: Vec<TruncatedTensor>,
    pub tower: Tower,
    pub limit: DerivedLimitResult,
}

impl CompletedTensor {
    pub fn to_json(&self) -> Value {
        json!({
            "levels": self.levels.iter().map(|l| l.quotient.invariants().to_string()).collect::<Vec<_>>(),
            "limit": self.limit.to_json(),
        })
    }
}

pub fn completed_tensor(m: &CartierModule, n: &CartierModule, prec: usize) -> Result<CompletedTensor> {
    if prec < 1 {
        return Err(Error::TruncationTooSmall);
    }
    let levels: Vec<TruncatedTensor> = (1..=prec).map(|k| tensor_trunc(m, n, k)).collect::<Result<_>>()?;
    let mut maps = Vec::new();
    for w in levels.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let mut mat = Matrix::zeros(hi.num_generators(), lo.num_generators());
        // Inputs that depend on the level (W(R), K3) keep the lower level's generators as a prefix.
        for d in 0..lo.k {
            for i in 0..lo.m_gens {
                for j in 0..lo.n_gens {
                    mat.set(hi.index(i, j, d), lo.index(i, j, d), BigInt::one());
                }
            }
        }
        maps.push(GroupHom::new(hi.quotient.clone(), lo.quotient.clone(), mat)?);
    }
    let tower = Tower::new(levels.iter().map(|l| l.quotient.clone()).collect(), maps)?;
    let limit = lim_lim1(&tower)?;
    Ok(CompletedTensor { levels, tower, limit })
}

/// Outcome of comparing `(W(R) ⊠ W(S))/V^N` with `W_N(R ⊗ S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittTensorReport {
    pub p: u64,
    pub level: usize,
    pub left: String,
    pub right: String,
    pub left_order: Option<BigInt>,
    pub right_order: Option<BigInt>,
    pub surjective: bool,
    pub mod_v_matches: bool,
}

impl WittTensorReport {
    pub fn is_bijection(&self) -> bool {
        self.surjective && self.left_order.is_some() && self.left_order == self.right_order
    }
}

/// Builds the map `(W(R) ⊠ W(S))/V^N -> W_N(R ⊗ S)` from the Witt pairing and certifies it.
pub fn witt_tensor_theorem_check(r: &BaseRing, s: &BaseRing, level: usize) -> Result<WittTensorReport> {
    if r.p() != s.p() {
        return Err(Error::PrimeMismatch(r.p(), s.p()));
    }
    if level < 1 {
        return Err(Error::TruncationTooSmall);
    }
    let t = BaseRing::tensor(r, s)?;
    let wr = WittAdditive::new(r, level)?;
    let ws = WittAdditive::new(s, level)?;
    let wt = WittAdditive::new(&t, level)?;
    let lhs = tensor_trunc(
        &CartierModule::witt_module(r, None)?,
        &CartierModule::witt_module(s, None)?,
        level,
    )?;
    let mut rows = Matrix::zeros(0, wt.num_generators());
    for d in 0..level {
        for i in 0..wr.num_generators() {
            let a = wr.generator(i);
            for j in 0..ws.num_generators() {
                let mut w = a.pairing(&ws.generator(j))?;
                for _ in 0..d {
                    w = w.verschiebung_trunc();
                }
                rows.push_row(wt.decompose(&w));
            }
        }
    }
    let map = GroupHom::new_unchecked(lhs.quotient.clone(), wt.group().clone(), rows);
    if let Some(rel) = map.ill_defined_at() {
        return Err(Error::MapIllDefined(format!(
            "relation {} = {} of the truncated tensor",
            rel,
            vec_string(lhs.quotient.relations().row(rel))
        )));
    }
    let surjective = map.is_surjective();
    let mod_v = lhs.v.cokernel().0;
    let rs = FinAbPres::from_diagonal(&vec![BigInt::from(t.modulus()); t.num_slots()], 0);
    Ok(WittTensorReport {
        p: r.p(),
        level,
        left: lhs.quotient.invariants().to_string(),
        right: wt.group().invariants().to_string(),
        left_order: lhs.quotient.order(),
        right_order: wt.group().order(),
        surjective,
        mod_v_matches: mod_v.is_isomorphic(&rs),
    })
}

/// `(M ⊠ N)/V ≅ M/V ⊗ N/V`, compared by invariant factors.
pub fn mod_v_compatibility(m: &CartierModule, n: &CartierModule) -> Result<bool> {
    let lhs = tensor_trunc(m, n, 1)?;
    let mv = m.structure()?.v.cokernel().0;
    let nv = n.structure()?.v.cokernel().0;
    Ok(lhs.quotient.is_isomorphic(&tensor_ab(&mv, &nv)))
}

/// `M/V^K -> (Z[V] ⊠ M)/V^K`, `m -> (1 ⊗ m) V^0`, checked to be a `V`-equivariant isomorphism.
pub fn unit_law_check(m: &CartierModule, k: usize) -> Result<bool> {
    let unit = CartierModule::unit(m.p(), k)?;
    let t = tensor_trunc(&unit, m, k)?;
    let s = m.structure()?;
    let g = s.gens();
    let vk = (1..k).fold(s.v.reduced(), |acc, _| acc.compose(&s.v).reduced());
    // M/V^K on the generators of M.
    let mk_raw = FinAbPres::new(g, s.group.relations().vstack(vk.matrix()));
    let mut mat = Matrix::zeros(g, t.num_generators());
    for i in 0..g {
        mat.set(i, t.index(0, i, 0), BigInt::one());
    }
    let phi = match GroupHom::new(mk_raw.clone(), t.quotient.clone(), mat) {
        Ok(h) => h,
        Err(_) => return Ok(false),
    };
    if !phi.is_iso() {
        return Ok(false);
    }
    let v_mk = GroupHom::new_unchecked(mk_raw, t.quotient.clone(), s.v.matrix().mul(phi.matrix()));
    let v_t = phi.compose(&t.v);
    Ok(v_mk.equals(&v_t))
}
