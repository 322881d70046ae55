use num_bigint::BigInt;
use num_traits::Zero;

use super::module::{vec_string, CartierModule};
use super::tensor::TruncatedTensor;
use crate::algebra::hom::one_hot;
use crate::error::{Error, Result};

/// A bilinear map `M x N -> Q` given by its values on generator pairs.
#[derive(Clone, Debug)]
pub struct BilinearMapSpec {
    pub m: CartierModule,
    pub n: CartierModule,
    pub q: CartierModule,
    /// `table[i][j]` is the value on `(m_i, n_j)` in the generators of `Q`.
    pub table: Vec<Vec<Vec<BigInt>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearReport {
    pub pairs_checked: usize,
    pub relations_checked: usize,
}

impl BilinearMapSpec {
    pub fn zero(m: &CartierModule, n: &CartierModule, q: &CartierModule) -> Result<BilinearMapSpec> {
        let (gm, gn, gq) = (m.structure()?.gens(), n.structure()?.gens(), q.structure()?.gens());
        Ok(BilinearMapSpec {
            m: m.clone(),
            n: n.clone(),
            q: q.clone(),
            table: vec![vec![vec![BigInt::zero(); gq]; gn]; gm],
        })
    }

    /// The map `(m_i, n_j) -> (m_i ⊗ n_j) V^0` into the truncated tensor.
    pub fn universal(m: &CartierModule, n: &CartierModule, t: &TruncatedTensor) -> BilinearMapSpec {
        let table = (0..t.m_gens)
            .map(|i| (0..t.n_gens).map(|j| one_hot(t.num_generators(), t.index(i, j, 0))).collect())
            .collect();
        BilinearMapSpec {
            m: m.clone(),
            n: n.clone(),
            q: t.module.clone(),
            table,
        }
    }

    /// Value on arbitrary elements, extended bilinearly.
    pub fn eval(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let gq = self.table.first().and_then(|r| r.first()).map_or(0, |v| v.len());
        let mut out = vec![BigInt::zero(); gq];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                for (o, t) in out.iter_mut().zip(&self.table[i][j]) {
                    *o += &c * t;
                }
            }
        }
        out
    }
}

/// Checks bilinearity and `F(x,y) = (Fx,Fy)`, `V(x,Fy) = (Vx,y)`, `V(Fx,y) = (x,Vy)` on all generator pairs.
pub fn validate_bilinear(spec: &BilinearMapSpec) -> Result<BilinearReport> {
    let sm = spec.m.structure()?;
    let sn = spec.n.structure()?;
    let sq = spec.q.structure()?;
    if spec.table.len() != sm.gens() || spec.table.iter().any(|r| r.len() != sn.gens() || r.iter().any(|v| v.len() != sq.gens())) {
        return Err(Error::Dimension("bilinear table does not match the generators".into()));
    }
    let (gm, gn) = (sm.gens(), sn.gens());
    let mut relations = 0;
    let violation = |relation: &str, witness: String| Error::RelationViolation {
        relation: relation.to_string(),
        witness,
    };
    let rm = sm.group.relations();
    for r in 0..rm.rows() {
        for j in 0..gn {
            relations += 1;
            if !sq.group.is_zero(&spec.eval(rm.row(r), &one_hot(gn, j))) {
                return Err(violation("additivity in the first variable", format!("relation {r} of M, n_{j}")));
            }
        }
    }
    let rn = sn.group.relations();
    for r in 0..rn.rows() {
        for i in 0..gm {
            relations += 1;
            if !sq.group.is_zero(&spec.eval(&one_hot(gm, i), rn.row(r))) {
                return Err(violation("additivity in the second variable", format!("m_{i}, relation {r} of N")));
            }
        }
    }
    for i in 0..gm {
        let x = one_hot(gm, i);
        let fx = sm.f.apply(&x);
        let vx = sm.v.apply(&x);
        for j in 0..gn {
            let y = one_hot(gn, j);
            let fy = sn.f.apply(&y);
            let vy = sn.v.apply(&y);
            let pair = format!("(m_{i}, n_{j}) = ({}, {})", vec_string(&x), vec_string(&y));
            let mut failed = Vec::new();
            if !sq.group.elements_equal(&sq.f.apply(&spec.eval(&x, &y)), &spec.eval(&fx, &fy)) {
                failed.push("F(x,y) = (Fx,Fy)");
            }
            if !sq.group.elements_equal(&sq.v.apply(&spec.eval(&x, &fy)), &spec.eval(&vx, &y)) {
                failed.push("V(x,Fy) = (Vx,y)");
            }
            if !sq.group.elements_equal(&sq.v.apply(&spec.eval(&fx, &y)), &spec.eval(&x, &vy)) {
                failed.push("V(Fx,y) = (x,Vy)");
            }
            if !failed.is_empty() {
                return Err(violation(&failed.join("; "), pair));
            }
            relations += 3;
        }
    }
    Ok(BilinearReport {
        pairs_checked: gm * gn,
        relations_checked: relations,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DieudonneReport {
    pub scalars: usize,
    pub generators: usize,
}

/// Checks that the integer action of `W(F_p) = Z_p` (with `F_A = 1`, `V_A = p`)
/// satisfies conditions (i)-(iii), and that `VF = FV = p`.
pub fn dieudonne_check(m: &CartierModule, scalars: &[i64]) -> Result<DieudonneReport> {
    let s = m.structure()?;
    let p = m.p() as i64;
    if !s.group.is_p_local(m.p()) {
        return Err(Error::ConditionViolation {
            condition: "module".into(),
            witness: format!("{} is not a Z_p-module", s.group),
        });
    }
    let g = s.gens();
    let scale = |x: &[BigInt], c: i64| -> Vec<BigInt> { x.iter().map(|a| a * c).collect() };
    let fail = |condition: &str, x: i64, i: usize| Error::ConditionViolation {
        condition: condition.into(),
        witness: format!("x = {x}, y = generator {i}"),
    };
    for i in 0..g {
        let y = one_hot(g, i);
        let fy = s.f.apply(&y);
        let vy = s.v.apply(&y);
        for &x in scalars {
            // (i) V(F_A(x) y) = x V(y)
            if !s.group.elements_equal(&s.v.apply(&scale(&y, x)), &scale(&vy, x)) {
                return Err(fail("i", x, i));
            }
            // (ii) V(x F(y)) = V_A(x) y
            if !s.group.elements_equal(&s.v.apply(&scale(&fy, x)), &scale(&y, p * x)) {
                return Err(fail("ii", x, i));
            }
            // (iii) F(x y) = F_A(x) F(y)
            if !s.group.elements_equal(&s.f.apply(&scale(&y, x)), &scale(&fy, x)) {
                return Err(fail("iii", x, i));
            }
        }
        if !s.group.elements_equal(&s.f.apply(&vy), &scale(&y, p)) {
            return Err(fail("FV = p", 1, i));
        }
        if !s.group.elements_equal(&s.v.apply(&fy), &scale(&y, p)) {
            return Err(fail("VF = p", 1, i));
        }
    }
    Ok(DieudonneReport {
        scalars: scalars.len(),
        generators: g,
    })
}
