use num_bigint::BigInt;
use serde_json::{json, Value};

use super::complex::VComplex;
use crate::algebra::{lim_lim1, FinAbPres, GroupHom, Matrix, Tower};
use crate::cartier::{is_derived_v_complete, CartierModule};
use crate::error::{Error, Result};

/// Homology of the total cofiber of the square `(p^r, d; dV^r, V^r)` in degree `i`.
#[derive(Clone, Debug)]
pub struct VdvQuotient {
    pub h0: FinAbPres,
    pub h1: FinAbPres,
    /// `{x in C^{i-1} : dx = 0, p^r x = 0}`.
    pub h2: FinAbPres,
}

/// The three-term complex `C^{i-1} -> C^i ⊕ C^{i-1} -> C^i` for one `r`.
struct Cofiber {
    a2: FinAbPres,
    a1: FinAbPres,
    a0: FinAbPres,
    d2: GroupHom,
    d1: GroupHom,
}

fn tidy(h: GroupHom) -> GroupHom {
    h.reduced()
}

fn reduce_matrix(target: &FinAbPres, a: Matrix) -> Matrix {
    GroupHom::new_unchecked(FinAbPres::free(a.rows()), target.clone(), a).reduced().matrix().clone()
}

fn power(h: &GroupHom, r: usize) -> GroupHom {
    (0..r).fold(GroupHom::identity(h.source()), |acc, _| tidy(acc.compose(h)))
}

impl VComplex {
    /// The same complex on diagonal presentations with reduced matrices.
    fn normalized(&self) -> VComplex {
        let norms: Vec<(FinAbPres, GroupHom, GroupHom)> = self.terms.iter().map(|t| t.normalize()).collect();
        let conj = |h: &GroupHom, a: usize, b: usize| tidy(norms[a].2.compose(h).compose(&norms[b].1));
        VComplex {
            p: self.p,
            i_min: self.i_min,
            terms: norms.iter().map(|n| n.0.clone()).collect(),
            v: self.v.iter().enumerate().map(|(j, h)| conj(h, j, j)).collect(),
            d: self.d.iter().enumerate().map(|(j, h)| conj(h, j, j + 1)).collect(),
            f: self.f.as_ref().map(|f| f.iter().enumerate().map(|(j, h)| conj(h, j, j)).collect()),
        }
    }

    fn check_degree(&self, i: i64) -> Result<usize> {
        if i < self.i_min || i > self.i_max() {
            return Err(Error::DegreeOutOfRange(i));
        }
        Ok((i - self.i_min) as usize)
    }

    fn previous(&self, j: usize) -> (FinAbPres, GroupHom, GroupHom) {
        if j == 0 {
            let z = FinAbPres::trivial();
            let t = &self.terms[0];
            (z.clone(), GroupHom::zero(&z, &z), GroupHom::zero(&z, t))
        } else {
            (self.terms[j - 1].clone(), self.v[j - 1].clone(), self.d[j - 1].clone())
        }
    }

    fn cofiber(&self, j: usize, r: usize) -> Result<Cofiber> {
        let c = self.terms[j].clone();
        let (prev, v_prev, d_prev) = self.previous(j);
        let a1 = FinAbPres::direct_sum(&[&c, &prev]);
        let pr = BigInt::from(self.p).pow(r as u32);
        let (gc, gp) = (c.num_generators(), prev.num_generators());
        let mut m2 = Matrix::zeros(0, gc + gp);
        for x in 0..gp {
            let mut row = d_prev.matrix().row_vec(x);
            row.extend(std::iter::repeat(BigInt::from(0)).take(gp));
            row[gc + x] = -&pr;
            m2.push_row(row);
        }
        let vr = power(&self.v[j], r);
        let dvr = tidy(power(&v_prev, r).compose(&d_prev));
        let m1 = vr.matrix().vstack(dvr.matrix());
        let m2 = reduce_matrix(&a1, m2);
        Ok(Cofiber {
            d2: GroupHom::new(prev.clone(), a1.clone(), m2)?,
            d1: GroupHom::new(a1.clone(), c.clone(), m1)?,
            a2: prev,
            a1,
            a0: c,
        })
    }
}

/// `ker(out) / im(in)` in normalized form.
struct Homology {
    group: FinAbPres,
    /// Generators of `group` as elements of the middle term.
    reps: Matrix,
    /// Kernel inclusion and the map from the kernel onto `group`.
    incl: GroupHom,
    to: GroupHom,
}

fn homology(incoming: &GroupHom, outgoing: &GroupHom) -> Result<Homology> {
    let (k, incl) = outgoing.kernel();
    let g = incl
        .factor_through(incoming)
        .ok_or_else(|| Error::Mismatch("boundary does not land in the cycles".into()))?;
    let h = FinAbPres::new(k.num_generators(), k.relations().vstack(&reduce_matrix(&k, g.matrix().clone())));
    let (group, to, from) = h.normalize();
    let reps = from.compose(&incl).matrix().clone();
    let reps = reduce_matrix(incl.target(), reps);
    Ok(Homology { group, reps, incl, to })
}


/// Map on homology induced by `phi` on the middle term.
fn induced(src: &Homology, dst: &Homology, phi: &GroupHom) -> Result<GroupHom> {
    let mut m = Matrix::zeros(0, dst.group.num_generators());
    for r in 0..src.group.num_generators() {
        let y = phi.apply(src.reps.row(r));
        let x = dst
            .incl
            .lift(&y)
            .ok_or_else(|| Error::Mismatch("chain map does not preserve cycles".into()))?;
        m.push_row(dst.to.apply(&x));
    }
    GroupHom::new(src.group.clone(), dst.group.clone(), reduce_matrix(&dst.group, m))
}

struct Stage {
    h: [Homology; 3],
}

fn stage(c: &Cofiber) -> Result<Stage> {
    let zero_in = GroupHom::zero(&FinAbPres::trivial(), &c.a2);
    let zero_out = GroupHom::zero(&c.a0, &FinAbPres::trivial());
    Ok(Stage {
        h: [homology(&c.d1, &zero_out)?, homology(&c.d2, &c.d1)?, homology(&zero_in, &c.d2)?],
    })
}

pub fn v_dv_quotient(c: &VComplex, i: i64, r: usize) -> Result<VdvQuotient> {
    let j = c.check_degree(i)?;
    let c = &c.normalized();
    if r == 0 {
        return Err(Error::TruncationTooSmall);
    }
    let s = stage(&c.cofiber(j, r)?)?;
    let [h0, h1, h2] = s.h;
    Ok(VdvQuotient {
        h0: h0.group,
        h1: h1.group,
        h2: h2.group,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeVerdict {
    pub degree: i64,
    /// `C^i -> (C^i)^_{V+dV}` is an equivalence.
    pub vdv_complete: bool,
    /// `C^i` is derived V-complete.
    pub v_complete: bool,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletenessReport {
    pub degrees: Vec<DegreeVerdict>,
    /// Every degree maps isomorphically to its `(V + dV)`-completion.
    pub complete: bool,
    /// Every term is derived V-complete.
    pub degreewise_complete: bool,
    pub agree: bool,
    /// First degree where the two stagewise verdicts differ, when the totals disagree.
    pub counterexample: Option<i64>,
}

impl CompletenessReport {
    pub fn to_json(&self) -> Value {
        json!({
            "complete": self.complete,
            "degreewise_complete": self.degreewise_complete,
            "agree": self.agree,
            "counterexample": self.counterexample,
            "degrees": self.degrees.iter().map(|d| json!({
                "degree": d.degree,
                "vdv_complete": d.vdv_complete,
                "v_complete": d.v_complete,
                "witness": d.witness,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Compares `(V + dV)`-completeness of the complex, read off the tower `r = 1..=cutoff`,
/// with derived V-completeness of every term.
pub fn v_dv_completeness_test(c: &VComplex, cutoff: usize) -> Result<CompletenessReport> {
    if cutoff < 2 {
        return Err(Error::TruncationTooSmall);
    }
    let c = &c.normalized();
    let mut degrees = Vec::new();
    for j in 0..c.terms.len() {
        let i = c.i_min + j as i64;
        let cofibers: Vec<Cofiber> = (1..=cutoff).map(|r| c.cofiber(j, r)).collect::<Result<_>>()?;
        let stages: Vec<Stage> = cofibers.iter().map(stage).collect::<Result<_>>()?;
        let (prev, v_prev, _) = c.previous(j);
        let p = BigInt::from(c.p);
        // Transition r+1 -> r: pV on the top, V ⊕ V in the middle, identity at the bottom.
        let phi = [
            GroupHom::identity(&c.terms[j]),
            GroupHom::new(
                cofibers[0].a1.clone(),
                cofibers[0].a1.clone(),
                Matrix::block_diag(&[c.v[j].matrix(), v_prev.matrix()]),
            )?,
            v_prev.scale(p),
        ];
        let mut limits = Vec::new();
        for (h, map) in phi.iter().enumerate() {
            let groups: Vec<FinAbPres> = stages.iter().map(|s| s.h[h].group.clone()).collect();
            let maps: Vec<GroupHom> = (0..cutoff - 1)
                .map(|r| induced(&stages[r + 1].h[h], &stages[r].h[h], map))
                .collect::<Result<_>>()?;
            let lim = lim_lim1(&Tower::new(groups, maps)?)?.require_stable()?;
            limits.push(lim.h0);
        }
        let _ = prev;
        let order = c.terms[j].order();
        let vdv_complete = limits[0].order() == order && limits[1].is_trivial() && limits[2].is_trivial();
        let f = match &c.f {
            Some(f) => f[j].matrix().clone(),
            // Only V enters derived V-completeness; F is set to zero.
            None => Matrix::zeros(c.terms[j].num_generators(), c.terms[j].num_generators()),
        };
        let m = CartierModule::finite(c.p, c.terms[j].clone(), c.v[j].matrix().clone(), f)?;
        let verdict = is_derived_v_complete(&m)?;
        degrees.push(DegreeVerdict {
            degree: i,
            vdv_complete,
            v_complete: verdict.complete,
            witness: format!(
                "lim H0 = {}, lim H1 = {}, lim H2 = {}; {}",
                limits[0].invariants(),
                limits[1].invariants(),
                limits[2].invariants(),
                verdict.witness
            ),
        });
    }
    let complete = degrees.iter().all(|d| d.vdv_complete);
    let degreewise_complete = degrees.iter().all(|d| d.v_complete);
    let agree = complete == degreewise_complete;
    let counterexample = if agree {
        None
    } else {
        degrees.iter().find(|d| d.vdv_complete != d.v_complete).map(|d| d.degree)
    };
    Ok(CompletenessReport {
        degrees,
        complete,
        degreewise_complete,
        agree,
        counterexample,
    })
}
