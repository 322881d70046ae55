use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::algebra::Matrix;
use crate::cartier::CartierModule;
use crate::error::{Error, Result};

fn overflow() -> Error {
    Error::SizeBound("i128 overflow in the naive Hermite form".into())
}

fn small(x: &BigInt) -> Result<i128> {
    x.to_i128().ok_or_else(overflow)
}

pub(crate) fn rows_of(m: &Matrix) -> Result<Vec<Vec<i128>>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(small).collect()).collect()
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        return if a < 0 { (-a, -1, 0) } else { (a, 1, 0) };
    }
    let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
    (g, y, x - a.div_euclid(b) * y)
}

fn combine(a: i128, x: &[i128], b: i128, y: &[i128]) -> Result<Vec<i128>> {
    x.iter()
        .zip(y)
        .map(|(u, v)| {
            let l = a.checked_mul(*u).ok_or_else(overflow)?;
            let r = b.checked_mul(*v).ok_or_else(overflow)?;
            l.checked_add(r).ok_or_else(overflow)
        })
        .collect()
}

/// `Z^g` modulo a full-rank relation lattice, kept in upper-triangular Hermite form.
#[derive(Clone, Debug)]
pub(crate) struct NaiveGroup {
    h: Vec<Vec<i128>>,
}

impl NaiveGroup {
    pub(crate) fn new(gens: usize, relations: &[Vec<i128>]) -> Result<NaiveGroup> {
        let mut h: Vec<Option<Vec<i128>>> = vec![None; gens];
        for r in relations {
            let mut v = r.clone();
            for j in 0..gens {
                if v[j] == 0 {
                    continue;
                }
                match h[j].take() {
                    None => {
                        if v[j] < 0 {
                            v.iter_mut().for_each(|x| *x = -*x);
                        }
                        h[j] = Some(v);
                        break;
                    }
                    Some(row) => {
                        let (g, x, y) = ext_gcd(row[j], v[j]);
                        let pivot = combine(x, &row, y, &v)?;
                        v = combine(row[j] / g, &v, -(v[j] / g), &row)?;
                        h[j] = Some(pivot);
                    }
                }
            }
        }
        let mut h: Vec<Vec<i128>> = h
            .into_iter()
            .map(|r| r.ok_or_else(|| Error::UnsupportedRepresentation("the group is infinite".into())))
            .collect::<Result<_>>()?;
        for j in (0..gens).rev() {
            for i in 0..j {
                let q = h[i][j].div_euclid(h[j][j]);
                if q != 0 {
                    let rj = h[j].clone();
                    h[i] = combine(1, &h[i], -q, &rj)?;
                }
            }
        }
        Ok(NaiveGroup { h })
    }

    pub(crate) fn gens(&self) -> usize {
        self.h.len()
    }

    pub(crate) fn relations(&self) -> &[Vec<i128>] {
        &self.h
    }

    pub(crate) fn diagonal(&self) -> Vec<i128> {
        (0..self.gens()).map(|j| self.h[j][j]).collect()
    }

    pub(crate) fn order(&self) -> i128 {
        self.diagonal().iter().product()
    }

    /// The unique representative with `0 <= x_j < h_jj`.
    pub(crate) fn reduce(&self, x: &mut [i128]) {
        for j in 0..self.gens() {
            let q = x[j].div_euclid(self.h[j][j]);
            if q != 0 {
                for k in j..x.len() {
                    x[k] -= q * self.h[j][k];
                }
            }
        }
    }

    /// Position of a reduced element in the mixed-radix enumeration.
    pub(crate) fn index(&self, x: &[i128]) -> usize {
        x.iter().zip(self.diagonal()).fold(0usize, |acc, (c, d)| acc * d as usize + *c as usize)
    }

    pub(crate) fn elements(&self) -> Vec<Vec<i128>> {
        let diag = self.diagonal();
        let mut out = vec![vec![]];
        for d in diag {
            out = out
                .into_iter()
                .flat_map(|v: Vec<i128>| {
                    (0..d).map(move |c| {
                        let mut w = v.clone();
                        w.push(c);
                        w
                    })
                })
                .collect();
        }
        out
    }
}

/// A finite Cartier module with reduced elements and operator rows in `i128`.
#[derive(Clone, Debug)]
pub(crate) struct NaiveModule {
    pub(crate) p: u64,
    pub(crate) group: NaiveGroup,
    pub(crate) v: Vec<Vec<i128>>,
    pub(crate) f: Vec<Vec<i128>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Op {
    Id,
    V,
    F,
}

impl NaiveModule {
    pub(crate) fn from_module(m: &CartierModule) -> Result<NaiveModule> {
        if !m.is_finite() {
            return Err(Error::UnsupportedRepresentation(format!("{} is not finite", m.describe())));
        }
        let s = m.structure()?;
        let g = s.group.num_generators();
        Ok(NaiveModule {
            p: m.p(),
            group: NaiveGroup::new(g, &rows_of(s.group.relations())?)?,
            v: rows_of(s.v.matrix())?,
            f: rows_of(s.f.matrix())?,
        })
    }

    pub(crate) fn gens(&self) -> usize {
        self.group.gens()
    }

    pub(crate) fn apply(&self, op: Op, x: &[i128]) -> Vec<i128> {
        let rows = match op {
            Op::Id => return x.to_vec(),
            Op::V => &self.v,
            Op::F => &self.f,
        };
        let mut out = vec![0; self.gens()];
        for (c, row) in x.iter().zip(rows) {
            for (o, r) in out.iter_mut().zip(row) {
                *o += c * r;
            }
        }
        self.group.reduce(&mut out);
        out
    }
}
