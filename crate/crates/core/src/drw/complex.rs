use num_bigint::BigInt;
use serde_json::{json, Value};

use super::build::DrwComplex;
use crate::algebra::{FinAbPres, GroupHom};
use crate::cartier::CartierModule;
use crate::error::{Error, Result};

/// A bounded Cartier complex `C^{i_min} -> ... -> C^{i_max}` of finite groups.
#[derive(Clone, Debug)]
pub struct CartierComplex {
    pub p: u64,
    pub i_min: i64,
    pub terms: Vec<FinAbPres>,
    pub v: Vec<GroupHom>,
    pub f: Vec<GroupHom>,
    /// `d[j]: terms[j] -> terms[j+1]`.
    pub d: Vec<GroupHom>,
    pub eta: Vec<GroupHom>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplexMode {
    Cartier,
    /// Additionally `VF = p` and `η = 0`.
    Dieudonne,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexReport {
    pub relations: Vec<String>,
    pub checks: usize,
}

impl CartierComplex {
    pub fn new(
        p: u64,
        i_min: i64,
        terms: Vec<FinAbPres>,
        v: Vec<GroupHom>,
        f: Vec<GroupHom>,
        d: Vec<GroupHom>,
        eta: Vec<GroupHom>,
    ) -> Result<CartierComplex> {
        let len = terms.len();
        if len == 0 || v.len() != len || f.len() != len || d.len() + 1 != len || eta.len() + 1 != len {
            return Err(Error::Dimension(format!(
                "a complex with {len} terms needs {len} V and F maps and {} d and η maps",
                len.saturating_sub(1)
            )));
        }
        for (j, t) in terms.iter().enumerate() {
            if !t.is_finite() {
                return Err(Error::Dimension(format!("term {} is infinite", i_min + j as i64)));
            }
            for h in [&v[j], &f[j]] {
                if h.source() != t || h.target() != t {
                    return Err(Error::Dimension(format!("V, F in degree {} must be endomorphisms", i_min + j as i64)));
                }
                h.check()?;
            }
            if j + 1 < len {
                for h in [&d[j], &eta[j]] {
                    if h.source() != t || h.target() != &terms[j + 1] {
                        return Err(Error::Dimension(format!("d, η must run from degree {} to the next", i_min + j as i64)));
                    }
                    h.check()?;
                }
            }
        }
        Ok(CartierComplex {
            p,
            i_min,
            terms,
            v,
            f,
            d,
            eta,
        })
    }

    /// A single Cartier module placed in degree `i`.
    pub fn concentrated(m: &CartierModule, i: i64) -> Result<CartierComplex> {
        let s = m.structure()?;
        CartierComplex::new(m.p(), i, vec![s.group], vec![s.v], vec![s.f], vec![], vec![])
    }

    pub fn i_max(&self) -> i64 {
        self.i_min + self.terms.len() as i64 - 1
    }

    pub fn index(&self, i: i64) -> Result<usize> {
        if i < self.i_min || i > self.i_max() {
            return Err(Error::DegreeOutOfRange(i));
        }
        Ok((i - self.i_min) as usize)
    }

    /// `C^i`, zero outside the range.
    pub fn term(&self, i: i64) -> FinAbPres {
        self.index(i).map(|j| self.terms[j].clone()).unwrap_or_else(|_| FinAbPres::trivial())
    }

    /// `C^i` as a Cartier module.
    pub fn module(&self, i: i64) -> Result<CartierModule> {
        let j = self.index(i)?;
        CartierModule::finite(
            self.p,
            self.terms[j].clone(),
            self.v[j].matrix().clone(),
            self.f[j].matrix().clone(),
        )
    }

    pub fn v_complex(&self) -> VComplex {
        VComplex {
            p: self.p,
            i_min: self.i_min,
            terms: self.terms.clone(),
            v: self.v.clone(),
            d: self.d.clone(),
            f: Some(self.f.clone()),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p,
            "i_min": self.i_min,
            "terms": self.terms.iter().map(|g| g.to_json()).collect::<Vec<_>>(),
            "invariants": self.terms.iter().map(|g| g.invariants().to_string()).collect::<Vec<_>>(),
            "V": self.v.iter().map(|h| h.matrix().to_json()).collect::<Vec<_>>(),
            "F": self.f.iter().map(|h| h.matrix().to_json()).collect::<Vec<_>>(),
            "d": self.d.iter().map(|h| h.matrix().to_json()).collect::<Vec<_>>(),
            "eta": self.eta.iter().map(|h| h.matrix().to_json()).collect::<Vec<_>>(),
        })
    }
}

/// The data the `(V + dV)`-construction uses: terms, a degree-0 endomorphism `V` and `d`.
#[derive(Clone, Debug)]
pub struct VComplex {
    pub p: u64,
    pub i_min: i64,
    pub terms: Vec<FinAbPres>,
    pub v: Vec<GroupHom>,
    pub d: Vec<GroupHom>,
    /// Present when the terms are Cartier modules.
    pub f: Option<Vec<GroupHom>>,
}

impl VComplex {
    pub fn i_max(&self) -> i64 {
        self.i_min + self.terms.len() as i64 - 1
    }
}

impl DrwComplex {
    /// `W_mΩ^*` with the endomorphism `V ∘ R`.
    pub fn v_complex(&self, m: usize) -> VComplex {
        let lvl = self.level(m);
        VComplex {
            p: self.cfg.p,
            i_min: 0,
            terms: lvl.terms.clone(),
            v: (0..lvl.terms.len()).map(|i| self.v_endo(m, i)).collect(),
            d: lvl.d.clone(),
            f: None,
        }
    }
}

pub(crate) struct Checker {
    p: BigInt,
    relations: Vec<String>,
    checks: usize,
}

impl Checker {
    pub(crate) fn new(p: u64) -> Checker {
        Checker {
            p: BigInt::from(p),
            relations: Vec::new(),
            checks: 0,
        }
    }

    pub(crate) fn p(&self) -> &BigInt {
        &self.p
    }

    pub(crate) fn equal(&mut self, relation: &str, degree: i64, lhs: &GroupHom, rhs: &GroupHom) -> Result<()> {
        if !self.relations.iter().any(|r| r == relation) {
            self.relations.push(relation.to_string());
        }
        self.checks += 1;
        if let Some(g) = lhs.differs_at(rhs) {
            return Err(Error::AxiomViolation {
                relation: relation.to_string(),
                degree: Some(degree),
                witness: format!(
                    "generator {g}: {} vs {}",
                    super::vec_string(lhs.matrix().row(g)),
                    super::vec_string(rhs.matrix().row(g))
                ),
            });
        }
        Ok(())
    }

    pub(crate) fn zero(&mut self, relation: &str, degree: i64, h: &GroupHom) -> Result<()> {
        let z = GroupHom::zero(h.source(), h.target());
        self.equal(relation, degree, h, &z)
    }

    pub(crate) fn report(self) -> ComplexReport {
        ComplexReport {
            relations: self.relations,
            checks: self.checks,
        }
    }
}

/// Checks every relation of a Cartier complex on all generators.
pub fn check_complex_axioms(c: &CartierComplex, mode: ComplexMode) -> Result<ComplexReport> {
    let mut ck = Checker::new(c.p);
    let p = ck.p().clone();
    let len = c.terms.len();
    for j in 0..len {
        let i = c.i_min + j as i64;
        let t = &c.terms[j];
        ck.equal("FV = p", i, &c.v[j].compose(&c.f[j]), &GroupHom::scalar(t, p.clone()))?;
        if mode == ComplexMode::Dieudonne {
            ck.equal("VF = p", i, &c.f[j].compose(&c.v[j]), &GroupHom::scalar(t, p.clone()))?;
        }
        if j + 1 == len {
            continue;
        }
        let (d, eta) = (&c.d[j], &c.eta[j]);
        ck.zero("2η = 0", i, &eta.scale(2))?;
        if mode == ComplexMode::Dieudonne {
            ck.zero("η = 0", i, eta)?;
        }
        if j + 4 < len {
            let e4 = (j + 1..j + 4).fold(eta.clone(), |acc, k| acc.compose(&c.eta[k]));
            ck.zero("η⁴ = 0", i, &e4)?;
        }
        if j + 2 < len {
            let dd = d.compose(&c.d[j + 1]);
            ck.equal("d² = ηd", i, &dd, &d.compose(&c.eta[j + 1]))?;
            ck.equal("d² = dη", i, &dd, &eta.compose(&c.d[j + 1]))?;
        }
        ck.equal("Vd = p dV", i, &d.compose(&c.v[j + 1]), &c.v[j].compose(d).scale(p.clone()))?;
        ck.equal("dF = p Fd", i, &c.f[j].compose(d), &d.compose(&c.f[j + 1]).scale(p.clone()))?;
        let fdv = c.v[j].compose(d).compose(&c.f[j + 1]);
        if c.p == 2 {
            ck.equal("FdV = d + η", i, &fdv, &d.add(eta))?;
        } else {
            ck.equal("FdV = d", i, &fdv, d)?;
        }
    }
    Ok(ck.report())
}

/// Checks the Cartier-complex relations across Witt lengths, where `F` lowers and
/// `V` raises the length, together with compatibility of the restrictions `R`.
pub fn check_drw_axioms(c: &DrwComplex, mode: ComplexMode) -> Result<ComplexReport> {
    let mut ck = Checker::new(c.cfg.p);
    let p = ck.p().clone();
    let n = c.top();
    let top_degree = c.cfg.vars;
    for m in 1..=n {
        let lvl = c.level(m);
        for i in 0..=top_degree {
            let deg = i as i64;
            let t = &lvl.terms[i];
            if m < n {
                let (vm, fm) = (c.verschiebung(m, i), c.frobenius(m, i));
                ck.equal("FV = p", deg, &vm.compose(fm), &GroupHom::scalar(t, p.clone()))?;
                let hi = &c.level(m + 1).terms[i];
                if mode == ComplexMode::Dieudonne {
                    ck.equal("VF = p", deg, &fm.compose(vm), &GroupHom::scalar(hi, p.clone()))?;
                }
                let rm = c.restriction(m, i);
                if m + 1 < n {
                    // Both sides W_{m+1} -> W_{m+1}, and W_{m+2} -> W_m.
                    ck.equal("RV = VR", deg, &rm.compose(vm), &c.verschiebung(m + 1, i).compose(c.restriction(m + 1, i)))?;
                    ck.equal("RF = FR", deg, &c.frobenius(m + 1, i).compose(rm), &c.restriction(m + 1, i).compose(fm))?;
                }
                if i < top_degree {
                    ck.equal("Rd = dR", deg, &rm.compose(&lvl.d[i]), &c.level(m + 1).d[i].compose(c.restriction(m, i + 1)))?;
                }
            }
            if i == top_degree {
                continue;
            }
            let (d, eta) = (&lvl.d[i], &lvl.eta[i]);
            ck.zero("2η = 0", deg, &eta.scale(2))?;
            if mode == ComplexMode::Dieudonne {
                ck.zero("η = 0", deg, eta)?;
            }
            if i + 1 < top_degree {
                let dd = d.compose(&lvl.d[i + 1]);
                ck.equal("d² = ηd", deg, &dd, &d.compose(&lvl.eta[i + 1]))?;
                ck.equal("d² = dη", deg, &dd, &eta.compose(&lvl.d[i + 1]))?;
            }
            if m < n {
                let up = c.level(m + 1);
                let (vm, vm1) = (c.verschiebung(m, i), c.verschiebung(m, i + 1));
                let (fm, fm1) = (c.frobenius(m, i), c.frobenius(m, i + 1));
                ck.equal("Vd = p dV", deg, &d.compose(vm1), &vm.compose(&up.d[i]).scale(p.clone()))?;
                ck.equal("dF = p Fd", deg, &fm.compose(d), &up.d[i].compose(fm1).scale(p.clone()))?;
                let fdv = vm.compose(&up.d[i]).compose(fm1);
                if c.cfg.p == 2 {
                    ck.equal("FdV = d + η", deg, &fdv, &d.add(eta))?;
                } else {
                    ck.equal("FdV = d", deg, &fdv, d)?;
                }
            }
        }
    }
    Ok(ck.report())
}
