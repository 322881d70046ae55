use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::module::{CartierModule, CatalogModule, Repr, Structure};
use crate::algebra::{lim_lim1, split_prime_power, FinAbPres, GroupHom, Matrix, Tower};
use crate::error::{Error, Result};

/// `H0` and `H1` of the derived V-completion.
#[derive(Clone, Debug)]
pub struct Completion {
    pub h0: CartierModule,
    pub h1: FinAbPres,
}

impl Completion {
    pub fn to_json(&self) -> Value {
        let h0 = match self.h0.structure() {
            Ok(s) => s.group.invariants().to_string(),
            Err(_) => self.h0.describe(),
        };
        json!({
            "h0": h0,
            "h1": self.h1.invariants().to_string(),
            "h0_module": self.h0.to_json(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletenessVerdict {
    pub complete: bool,
    pub witness: String,
}

fn power(h: &GroupHom, k: usize) -> GroupHom {
    (1..k.max(1)).fold(h.reduced(), |acc, _| acc.compose(h).reduced())
}

/// Bound on the length of any chain of subgroups of a finite `p`-group.
fn chain_bound(g: &FinAbPres, p: u64) -> usize {
    g.log_order(p).unwrap_or(0) as usize + 1
}

/// `M / S` on the generators of `M`, with `S` spanned by `rows` and stable under `V`, `F`.
fn quotient_by(p: u64, s: &Structure, rows: &Matrix, finite: bool) -> Result<CartierModule> {
    let group = FinAbPres::new(s.gens(), s.group.relations().vstack(rows));
    let m = if finite {
        CartierModule::finite(p, group, s.v.matrix().clone(), s.f.matrix().clone())?
    } else {
        CartierModule::fgzp(p, group, s.v.matrix().clone(), s.f.matrix().clone())?
    };
    m.simplified()
}

pub fn derived_v_completion(m: &CartierModule) -> Result<Completion> {
    let p = m.p();
    match m.repr() {
        Repr::Catalog(CatalogModule::Pruefer) => Ok(Completion {
            h0: CartierModule::finite(p, FinAbPres::trivial(), Matrix::zeros(0, 0), Matrix::zeros(0, 0))?,
            h1: FinAbPres::free(1).with_label("Z_p"),
        }),
        Repr::Catalog(CatalogModule::K3 { .. }) => Ok(Completion {
            h0: m.clone(),
            h1: FinAbPres::trivial(),
        }),
        Repr::Catalog(CatalogModule::Witt { ring, n: None }) if !(ring.is_char_p() && ring.num_slots() == 1) => {
            Ok(Completion {
                h0: m.clone(),
                h1: FinAbPres::trivial(),
            })
        }
        Repr::FreeV { base, .. } => Err(Error::UnsupportedRepresentation(format!(
            "the completion of ({base})[V] is the power series module ({base})[[V]]"
        ))),
        _ if m.is_finite() => finite_completion(m),
        _ => fgzp_completion(m),
    }
}

fn finite_completion(m: &CartierModule) -> Result<Completion> {
    let p = m.p();
    let s = m.structure()?;
    let k = chain_bound(&s.group, p);
    let vk = power(&s.v, k);
    let h0 = quotient_by(p, &s, vk.matrix(), true)?;
    // Cross-check against the limit of the tower M/V^j, j <= k + 1, on the generators of M.
    let stages: Vec<FinAbPres> = (1..=k + 1)
        .map(|j| FinAbPres::new(s.gens(), s.group.relations().vstack(power(&s.v, j).matrix())))
        .collect();
    let maps: Vec<GroupHom> = stages
        .windows(2)
        .map(|w| GroupHom::new(w[1].clone(), w[0].clone(), Matrix::identity(s.gens())))
        .collect::<Result<_>>()?;
    let lim = lim_lim1(&Tower::new(stages, maps)?)?;
    let h0_order = h0.order();
    if lim.h0.order() != h0_order || !lim.h1.is_trivial() {
        return Err(Error::Mismatch(format!(
            "eventual-image quotient {:?} disagrees with the tower limit {}",
            h0_order,
            lim.h0.invariants()
        )));
    }
    Ok(Completion {
        h0,
        h1: FinAbPres::trivial(),
    })
}

/// Characteristic polynomial `sum c_i t^i` (Faddeev-LeVerrier; the divisions are exact).
fn char_poly(a: &Matrix) -> Vec<BigInt> {
    let n = a.rows();
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut mk = Matrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a.mul(&mk);
        for i in 0..n {
            *next.entry_mut(i, i) += &c[n - k + 1];
        }
        mk = next;
        let am = a.mul(&mk);
        let tr: BigInt = (0..n).map(|i| am.get(i, i).clone()).sum();
        let (q, r) = (-tr).div_rem(&BigInt::from(k));
        assert!(r.is_zero(), "trace division must be exact");
        c[n - k] = q;
    }
    c
}

fn fgzp_completion(m: &CartierModule) -> Result<Completion> {
    let p = m.p();
    let s = m.structure()?;
    let (norm, to, from) = s.group.normalize();
    let v = from.compose(&s.v).compose(&to).reduced();
    let f = from.compose(&s.f).compose(&to).reduced();
    let inv = norm.invariants();
    let t = inv.torsion.len();
    let r = inv.free_rank;
    let free: Vec<usize> = (t..t + r).collect();
    let vfree = v.matrix().select_rows(free.iter().copied()).select_cols(&free);
    let chi = char_poly(&vfree);
    // Number of eigenvalues of V on the free quotient with positive p-adic valuation.
    let positive = chi
        .iter()
        .position(|c| !c.is_zero() && split_prime_power(c, p).0 == 0)
        .unwrap_or(r);
    let ns = Structure {
        group: norm.clone(),
        v,
        f,
    };
    let torsion = FinAbPres::from_diagonal(&inv.torsion, 0);
    let k = chain_bound(&torsion, p);
    let vk = power(&ns.v, k);
    if positive == r {
        // V is topologically nilpotent on the free part: only the V-invertible torsion is lost.
        let rows = vk.matrix().select_rows(0..t);
        let h0 = quotient_by(p, &ns, &rows, r == 0)?;
        return Ok(Completion {
            h0,
            h1: FinAbPres::trivial(),
        });
    }
    if positive == 0 {
        // V is a unit on the free part, so M/V^j M is finite and stabilizes.
        let q = FinAbPres::new(norm.num_generators(), norm.relations().vstack(vk.matrix()));
        let q_next = FinAbPres::new(
            norm.num_generators(),
            norm.relations().vstack(vk.compose(&ns.v).matrix()),
        );
        if q.localize(p).0.order() != q_next.localize(p).0.order() {
            return Err(Error::NotStabilized { window: k + 1 });
        }
        let exponent = q.invariants().torsion.last().cloned().unwrap_or_else(BigInt::one);
        let (a, _) = split_prime_power(&exponent, p);
        let pa = BigInt::from(p).pow(a);
        let g = norm.num_generators();
        let mut rows = vk.matrix().clone();
        for i in 0..g {
            let mut row = vec![BigInt::zero(); g];
            row[i] = pa.clone();
            rows.push_row(row);
        }
        let h0 = quotient_by(p, &ns, &rows, true)?;
        return Ok(Completion {
            h0,
            h1: FinAbPres::trivial(),
        });
    }
    Err(Error::UnsupportedRepresentation(format!(
        "V has {positive} of {r} slopes positive on the free part; mixed slopes are not supported"
    )))
}

pub fn is_derived_v_complete(m: &CartierModule) -> Result<CompletenessVerdict> {
    match m.repr() {
        Repr::Catalog(CatalogModule::Pruefer) => Ok(CompletenessVerdict {
            complete: false,
            witness: "Q_p/Z_p is V-divisible; its completion is Z_p in degree 1".into(),
        }),
        Repr::Catalog(CatalogModule::K3 { .. }) => Ok(CompletenessVerdict {
            complete: true,
            witness: "F_p[[x]] is x-adically complete and V = x".into(),
        }),
        _ if m.is_finite() => {
            let s = m.structure()?;
            let k = chain_bound(&s.group, m.p());
            let nilpotent = power(&s.v, k).is_zero_map();
            let c = derived_v_completion(m)?;
            let same = c.h0.order() == s.group.order() && c.h1.is_trivial();
            if nilpotent != same {
                return Err(Error::Mismatch(format!(
                    "V nilpotent = {nilpotent} but completion map iso = {same} on {m}"
                )));
            }
            let witness = if nilpotent {
                format!("V^{k} = 0")
            } else {
                format!("V^{k} has image of order {}", power(&s.v, k).image().0.order().unwrap_or_default())
            };
            Ok(CompletenessVerdict {
                complete: nilpotent,
                witness,
            })
        }
        _ => {
            let c = derived_v_completion(m)?;
            if let Repr::Catalog(_) = m.repr() {
                if c.h0.structure().is_err() {
                    return Ok(CompletenessVerdict {
                        complete: true,
                        witness: format!("{m} is V-adically complete"),
                    });
                }
            }
            let g = m.structure()?.group;
            let h0 = c.h0.structure()?.group;
            let complete = h0.is_isomorphic(&g) && c.h1.is_trivial();
            Ok(CompletenessVerdict {
                complete,
                witness: format!("completion ({}, {}) of {}", h0.invariants(), c.h1.invariants(), g.invariants()),
            })
        }
    }
}
