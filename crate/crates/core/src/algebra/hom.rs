use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::group::FinAbPres;
use super::matrix::Matrix;
use super::snf::{left_kernel, smith, solve_with};
use crate::error::{Error, Result};

/// Homomorphism given on generators; row `i` of `matrix` is the image of generator `i`.
#[derive(Clone, Debug)]
pub struct GroupHom {
    source: FinAbPres,
    target: FinAbPres,
    matrix: Matrix,
}

impl GroupHom {
    pub fn new(source: FinAbPres, target: FinAbPres, matrix: Matrix) -> Result<Self> {
        let h = GroupHom::new_unchecked(source, target, matrix);
        h.check()?;
        Ok(h)
    }

    pub fn new_unchecked(source: FinAbPres, target: FinAbPres, matrix: Matrix) -> Self {
        assert_eq!(matrix.rows(), source.num_generators(), "hom rows must match source generators");
        assert_eq!(matrix.cols(), target.num_generators(), "hom cols must match target generators");
        GroupHom {
            source,
            target,
            matrix,
        }
    }

    pub fn identity(g: &FinAbPres) -> Self {
        GroupHom::new_unchecked(g.clone(), g.clone(), Matrix::identity(g.num_generators()))
    }

    pub fn scalar(g: &FinAbPres, c: impl Into<BigInt>) -> Self {
        GroupHom::new_unchecked(g.clone(), g.clone(), Matrix::scalar(g.num_generators(), &c.into()))
    }

    pub fn zero(source: &FinAbPres, target: &FinAbPres) -> Self {
        GroupHom::new_unchecked(
            source.clone(),
            target.clone(),
            Matrix::zeros(source.num_generators(), target.num_generators()),
        )
    }

    pub fn source(&self) -> &FinAbPres {
        &self.source
    }

    pub fn target(&self) -> &FinAbPres {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Index of the first source relation not carried into the target relations.
    pub fn ill_defined_at(&self) -> Option<usize> {
        let rels = self.source.relations();
        (0..rels.rows()).find(|&r| !self.target.is_zero(&self.matrix.apply(rels.row(r))))
    }

    pub fn check(&self) -> Result<()> {
        match self.ill_defined_at() {
            Some(relation) => Err(Error::IllFormedHom { relation }),
            None => Ok(()),
        }
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix.apply(x)
    }

    /// First `self`, then `next`.
    pub fn compose(&self, next: &GroupHom) -> GroupHom {
        assert_eq!(
            self.target.num_generators(),
            next.source.num_generators(),
            "composition through groups of different shape"
        );
        GroupHom::new_unchecked(self.source.clone(), next.target.clone(), self.matrix.mul(&next.matrix))
    }

    pub fn add(&self, other: &GroupHom) -> GroupHom {
        GroupHom::new_unchecked(self.source.clone(), self.target.clone(), self.matrix.add(&other.matrix))
    }

    pub fn sub(&self, other: &GroupHom) -> GroupHom {
        GroupHom::new_unchecked(self.source.clone(), self.target.clone(), self.matrix.sub(&other.matrix))
    }

    pub fn scale(&self, c: impl Into<BigInt>) -> GroupHom {
        GroupHom::new_unchecked(self.source.clone(), self.target.clone(), self.matrix.scale(&c.into()))
    }

    pub fn is_zero_map(&self) -> bool {
        (0..self.matrix.rows()).all(|i| self.target.is_zero(self.matrix.row(i)))
    }

    /// Generator on which the two maps differ, if any.
    pub fn differs_at(&self, other: &GroupHom) -> Option<usize> {
        (0..self.matrix.rows()).find(|&i| {
            !self
                .target
                .elements_equal(self.matrix.row(i), other.matrix.row(i))
        })
    }

    pub fn equals(&self, other: &GroupHom) -> bool {
        self.differs_at(other).is_none()
    }

    /// The lattice `{x : x A in rowspan(target relations)}` as rows.
    fn preimage_of_zero(&self) -> Matrix {
        let stacked = self.matrix.vstack(self.target.relations());
        let lk = left_kernel(&stacked);
        let g = self.source.num_generators();
        lk.select_cols(&(0..g).collect::<Vec<_>>())
    }

    pub fn kernel(&self) -> (FinAbPres, GroupHom) {
        let k = self.preimage_of_zero();
        let sub = subgroup_generated(&self.source, &k);
        let incl = GroupHom::new_unchecked(sub.clone(), self.source.clone(), k);
        simplify_source(incl)
    }

    pub fn cokernel(&self) -> (FinAbPres, GroupHom) {
        let rels = self.target.relations().vstack(&self.matrix);
        let c = FinAbPres::new(self.target.num_generators(), rels);
        let proj = GroupHom::new_unchecked(self.target.clone(), c.clone(), Matrix::identity(c.num_generators()));
        simplify_target(proj)
    }

    /// Image as a subgroup of the target, with its inclusion.
    pub fn image(&self) -> (FinAbPres, GroupHom) {
        let k = self.preimage_of_zero();
        let im = FinAbPres::new(self.source.num_generators(), k);
        let incl = GroupHom::new_unchecked(im.clone(), self.target.clone(), self.matrix.clone());
        simplify_source(incl)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().0.is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().0.is_trivial()
    }

    pub fn is_iso(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Solves `x * self = y` modulo target relations.
    pub fn lift(&self, y: &[BigInt]) -> Option<Vec<BigInt>> {
        let stacked = self.matrix.vstack(self.target.relations());
        let s = smith(&stacked, true, true);
        let x = solve_with(&s, stacked.rows(), y)?;
        Some(x[..self.source.num_generators()].to_vec())
    }

    /// Factors `f` through the injective map `self`, returning `g` with `g ∘ self = f`.
    pub fn factor_through(&self, f: &GroupHom) -> Option<GroupHom> {
        let stacked = self.matrix.vstack(self.target.relations());
        let s = smith(&stacked, true, true);
        let g = self.source.num_generators();
        let mut m = Matrix::zeros(0, g);
        for i in 0..f.matrix.rows() {
            let x = solve_with(&s, stacked.rows(), f.matrix.row(i))?;
            m.push_row(x[..g].to_vec());
        }
        Some(GroupHom::new_unchecked(f.source.clone(), self.source.clone(), m).reduced())
    }

    /// Same map with each coordinate reduced modulo its order, for coordinates whose
    /// target relation is a multiple of a unit vector.
    pub fn reduced(&self) -> GroupHom {
        let rel = self.target.relations();
        let mut moduli: Vec<Option<BigInt>> = vec![None; self.target.num_generators()];
        for r in 0..rel.rows() {
            let mut nz = (0..rel.cols()).filter(|&j| !rel.get(r, j).is_zero());
            if let (Some(j), None) = (nz.next(), nz.next()) {
                moduli[j] = Some(rel.get(r, j).abs());
            }
        }
        let mut m = self.matrix.clone();
        for i in 0..m.rows() {
            for (j, d) in moduli.iter().enumerate() {
                if let Some(d) = d {
                    let c = m.get(i, j).mod_floor(d);
                    m.set(i, j, c);
                }
            }
        }
        GroupHom::new_unchecked(self.source.clone(), self.target.clone(), m)
    }

    /// Replaces source and target by the given isomorphic presentations.
    pub fn restrict_corestrict(&self, pre: &GroupHom, post: &GroupHom) -> GroupHom {
        pre.compose(self).compose(post)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "matrix": self.matrix.to_json(),
        })
    }
}

/// Subgroup of `g` generated by the rows of `k`, presented on those rows.
fn subgroup_generated(g: &FinAbPres, k: &Matrix) -> FinAbPres {
    let stacked = k.vstack(g.relations());
    let lk = left_kernel(&stacked);
    let rels = lk.select_cols(&(0..k.rows()).collect::<Vec<_>>());
    FinAbPres::new(k.rows(), rels)
}

/// Rewrites the source of `h` in normalized form.
pub fn simplify_source(h: GroupHom) -> (FinAbPres, GroupHom) {
    let (norm, _, from) = h.source.normalize();
    let h2 = from.compose(&h).reduced();
    (norm, h2)
}

/// Rewrites the target of `h` in normalized form.
pub fn simplify_target(h: GroupHom) -> (FinAbPres, GroupHom) {
    let (norm, to, _) = h.target.normalize();
    let h2 = h.compose(&to).reduced();
    (norm, h2)
}

pub fn zero_vec(n: usize) -> Vec<BigInt> {
    vec![BigInt::zero(); n]
}

pub fn one_hot(n: usize, i: usize) -> Vec<BigInt> {
    let mut v = zero_vec(n);
    v[i] = BigInt::one();
    v
}
