use num_bigint::BigInt;
use serde_json::{json, Value};

use super::module::{CartierModule, CatalogModule, Repr};
use crate::algebra::{FinAbPres, GroupHom};
use crate::error::{Error, Result};

/// Homotopy groups of `M/V`: `coker V`, `ker V`, then `coker p`, `ker p` repeating.
#[derive(Clone, Debug)]
pub struct HomotopyTable {
    pub p: u64,
    pub entries: Vec<FinAbPres>,
}

impl HomotopyTable {
    fn assemble(p: u64, d_max: usize, g0: FinAbPres, g1: FinAbPres, even: FinAbPres, odd: FinAbPres) -> Self {
        let entries = (0..=d_max)
            .map(|d| match d {
                0 => g0.clone(),
                1 => g1.clone(),
                d if d % 2 == 0 => even.clone(),
                _ => odd.clone(),
            })
            .collect();
        HomotopyTable { p, entries }
    }

    pub fn d_max(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,invariant_factors\n");
        for (d, g) in self.entries.iter().enumerate() {
            out.push_str(&format!("{d},{}\n", g.invariants()));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p,
            "degrees": self.entries.iter().enumerate().map(|(d, g)| json!({
                "degree": d,
                "group": g.invariants().to_string(),
                "invariants": g.invariants().to_json(),
            })).collect::<Vec<_>>(),
        })
    }

    /// Degreewise comparison by invariant factors.
    pub fn same_as(&self, other: &HomotopyTable) -> bool {
        self.entries.len() == other.entries.len()
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.is_isomorphic(b))
    }
}

fn elementary(p: u64, rank: usize) -> FinAbPres {
    FinAbPres::from_diagonal(&vec![BigInt::from(p); rank], 0)
}

pub fn homotopy_mod_v(m: &CartierModule, d_max: usize) -> Result<HomotopyTable> {
    let p = m.p();
    match m.repr() {
        Repr::Catalog(CatalogModule::K3 { precision }) => Ok(HomotopyTable::assemble(
            p,
            d_max,
            elementary(p, 1),
            FinAbPres::trivial(),
            elementary(p, *precision),
            elementary(p, *precision),
        )),
        Repr::Catalog(CatalogModule::Pruefer) => Ok(HomotopyTable::assemble(
            p,
            d_max,
            FinAbPres::trivial(),
            elementary(p, 1),
            FinAbPres::trivial(),
            elementary(p, 1),
        )),
        Repr::FreeV { base, .. } => {
            let pb = GroupHom::scalar(base, p);
            let (even, odd) = (pb.cokernel().0, pb.kernel().0);
            if d_max >= 2 && !(even.is_trivial() && odd.is_trivial()) {
                return Err(Error::UnsupportedRepresentation(format!(
                    "({base})[V] modulo p is not finitely generated; only degrees 0 and 1 are available"
                )));
            }
            let (g0, _, _) = base.normalize();
            Ok(HomotopyTable::assemble(p, d_max, g0, FinAbPres::trivial(), even, odd))
        }
        _ => {
            let s = m.structure()?;
            let pm = GroupHom::scalar(&s.group, p);
            let loc = |g: FinAbPres| g.localize(p).0;
            Ok(HomotopyTable::assemble(
                p,
                d_max,
                loc(s.v.cokernel().0),
                loc(s.v.kernel().0),
                loc(pm.cokernel().0),
                loc(pm.kernel().0),
            ))
        }
    }
}
