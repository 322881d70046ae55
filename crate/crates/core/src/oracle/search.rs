use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use super::naive::{NaiveModule, Op};
use crate::cartier::{tensor_trunc, BilinearMapSpec, CartierModule, TruncatedTensor};
use crate::error::{Error, Result};

/// Search nodes visited before giving up.
const NODE_BUDGET: usize = 20_000_000;

#[derive(Clone, Copy, Debug)]
struct Term {
    var: usize,
    coeff: i128,
    op: Op,
}

/// Exhaustive search for assignments of target elements to variables satisfying
/// `sum coeff * op(x_var) = 0` for every constraint.
struct Search<'a> {
    target: &'a NaiveModule,
    elems: Vec<Vec<i128>>,
    images: [Vec<Vec<i128>>; 3],
    nvars: usize,
    constraints: Vec<Vec<Term>>,
}

impl<'a> Search<'a> {
    fn new(target: &'a NaiveModule, nvars: usize) -> Search<'a> {
        let elems = target.group.elements();
        let images = [Op::Id, Op::V, Op::F].map(|op| elems.iter().map(|e| target.apply(op, e)).collect());
        Search {
            target,
            elems,
            images,
            nvars,
            constraints: Vec::new(),
        }
    }

    fn push(&mut self, terms: Vec<Term>) {
        let terms: Vec<Term> = terms.into_iter().filter(|t| t.coeff != 0).collect();
        if !terms.is_empty() {
            self.constraints.push(terms);
        }
    }

    /// Greedy variable order that completes constraints as early as possible.
    fn order(&self) -> Vec<usize> {
        let mut chosen = vec![false; self.nvars];
        let mut order = Vec::new();
        for _ in 0..self.nvars {
            let best = (0..self.nvars)
                .filter(|&v| !chosen[v])
                .max_by_key(|&v| {
                    let completes = self
                        .constraints
                        .iter()
                        .filter(|c| c.iter().any(|t| t.var == v) && c.iter().all(|t| t.var == v || chosen[t.var]))
                        .count();
                    (completes, std::cmp::Reverse(v))
                })
                .unwrap();
            chosen[best] = true;
            order.push(best);
        }
        order
    }

    fn holds(&self, c: &[Term], val: &[usize]) -> bool {
        let mut sum = vec![0i128; self.target.gens()];
        for t in c {
            let k = match t.op {
                Op::Id => 0,
                Op::V => 1,
                Op::F => 2,
            };
            for (s, x) in sum.iter_mut().zip(&self.images[k][val[t.var]]) {
                *s += t.coeff * x;
            }
        }
        self.target.group.reduce(&mut sum);
        sum.iter().all(|x| *x == 0)
    }

    fn run(&self) -> Result<Vec<Vec<Vec<i128>>>> {
        let order = self.order();
        let mut pos = vec![0; self.nvars];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut due: Vec<Vec<usize>> = vec![Vec::new(); self.nvars];
        for (ci, c) in self.constraints.iter().enumerate() {
            let last = c.iter().map(|t| pos[t.var]).max().unwrap();
            due[last].push(ci);
        }
        let mut out = Vec::new();
        let mut val = vec![0usize; self.nvars];
        let mut nodes = 0usize;
        self.dfs(0, &order, &due, &mut val, &mut nodes, &mut out)?;
        Ok(out)
    }

    fn dfs(
        &self,
        depth: usize,
        order: &[usize],
        due: &[Vec<usize>],
        val: &mut Vec<usize>,
        nodes: &mut usize,
        out: &mut Vec<Vec<Vec<i128>>>,
    ) -> Result<()> {
        if depth == order.len() {
            out.push(val.iter().map(|&i| self.elems[i].clone()).collect());
            return Ok(());
        }
        for e in 0..self.elems.len() {
            *nodes += 1;
            if *nodes > NODE_BUDGET {
                return Err(Error::SizeBound(format!("exhaustive search exceeded {NODE_BUDGET} nodes")));
            }
            val[order[depth]] = e;
            if due[depth].iter().all(|&c| self.holds(&self.constraints[c], val)) {
                self.dfs(depth + 1, order, due, val, nodes, out)?;
            }
        }
        Ok(())
    }
}

fn term(var: usize, coeff: i128, op: Op) -> Term {
    Term { var, coeff, op }
}

fn check_size(m: &NaiveModule, bound: i128, what: &str) -> Result<()> {
    if m.group.order() > bound {
        return Err(Error::SizeBound(format!("{what} has order {} > {bound}", m.group.order())));
    }
    Ok(())
}

fn homs(m: &NaiveModule, n: &NaiveModule) -> Result<Vec<Vec<Vec<i128>>>> {
    let g = m.gens();
    let mut s = Search::new(n, g);
    for r in m.group.relations() {
        s.push(r.iter().enumerate().map(|(i, c)| term(i, *c, Op::Id)).collect());
    }
    for (op, rows) in [(Op::V, &m.v), (Op::F, &m.f)] {
        for i in 0..g {
            let mut t: Vec<Term> = rows[i].iter().enumerate().map(|(k, c)| term(k, *c, Op::Id)).collect();
            t.push(term(i, -1, op));
            s.push(t);
        }
    }
    s.run()
}

/// All additive maps `M -> N` commuting with `V` and `F`, as images of the generators of `M`.
pub fn enumerate_cartier_homs(m: &CartierModule, n: &CartierModule, max_order: u64) -> Result<Vec<Vec<Vec<i128>>>> {
    let (nm, nn) = (NaiveModule::from_module(m)?, NaiveModule::from_module(n)?);
    check_size(&nm, max_order as i128, "source")?;
    check_size(&nn, max_order as i128, "target")?;
    homs(&nm, &nn)
}

/// `table[i][j]` is the value on the `i`-th generator of `M` and the `j`-th of `N`.
pub type BilinearTable = Vec<Vec<Vec<i128>>>;

/// All `(V, F)`-bilinear maps `M x N -> Q`.
pub fn enumerate_bilinear(m: &CartierModule, n: &CartierModule, q: &CartierModule) -> Result<Vec<BilinearTable>> {
    let (nm, nn, nq) = (
        NaiveModule::from_module(m)?,
        NaiveModule::from_module(n)?,
        NaiveModule::from_module(q)?,
    );
    let (gm, gn) = (nm.gens(), nn.gens());
    let at = |i: usize, j: usize| i * gn + j;
    let mut s = Search::new(&nq, gm * gn);
    for r in nm.group.relations() {
        for j in 0..gn {
            s.push(r.iter().enumerate().map(|(i, c)| term(at(i, j), *c, Op::Id)).collect());
        }
    }
    for r in nn.group.relations() {
        for i in 0..gm {
            s.push(r.iter().enumerate().map(|(j, c)| term(at(i, j), *c, Op::Id)).collect());
        }
    }
    for i in 0..gm {
        for j in 0..gn {
            // F(x, y) = (Fx, Fy)
            let mut t = vec![term(at(i, j), 1, Op::F)];
            for k in 0..gm {
                for l in 0..gn {
                    t.push(term(at(k, l), -nm.f[i][k] * nn.f[j][l], Op::Id));
                }
            }
            s.push(t);
            // V(x, Fy) = (Vx, y)
            let mut t: Vec<Term> = (0..gn).map(|l| term(at(i, l), nn.f[j][l], Op::V)).collect();
            t.extend((0..gm).map(|k| term(at(k, j), -nm.v[i][k], Op::Id)));
            s.push(t);
            // V(Fx, y) = (x, Vy)
            let mut t: Vec<Term> = (0..gm).map(|k| term(at(k, j), nm.f[i][k], Op::V)).collect();
            t.extend((0..gn).map(|l| term(at(i, l), -nn.v[j][l], Op::Id)));
            s.push(t);
        }
    }
    let found = s.run()?;
    Ok(found
        .into_iter()
        .map(|vals| (0..gm).map(|i| vals[i * gn..(i + 1) * gn].to_vec()).collect())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorepVerdict {
    pub bilinear_maps: usize,
    pub homs: usize,
}

impl CorepVerdict {
    pub fn to_json(&self) -> Value {
        json!({"bilinear_maps": self.bilinear_maps, "homs": self.homs})
    }
}

fn fmt_table(t: &[Vec<i128>]) -> String {
    format!("{t:?}")
}

/// Compares bilinear maps `M x N -> Q` with Cartier maps out of the truncated tensor product,
/// matched through the universal bilinear map.
pub fn corepresentability_check(
    m: &CartierModule,
    n: &CartierModule,
    q: &CartierModule,
    v_cap: usize,
) -> Result<CorepVerdict> {
    let t = tensor_trunc(m, n, v_cap)?;
    corepresentability_check_with(m, n, &t, q)
}

/// Same check against an already computed truncated tensor, whose level must kill `V` on `q`.
pub fn corepresentability_check_with(
    m: &CartierModule,
    n: &CartierModule,
    t: &TruncatedTensor,
    q: &CartierModule,
) -> Result<CorepVerdict> {
    let nq = NaiveModule::from_module(q)?;
    for i in 0..nq.gens() {
        let mut x = vec![0; nq.gens()];
        x[i] = 1;
        for _ in 0..t.k {
            x = nq.apply(Op::V, &x);
        }
        if x.iter().any(|c| *c != 0) {
            return Err(Error::UnsupportedRepresentation(format!("V^{} is not zero on the target", t.k)));
        }
    }
    let nt = NaiveModule::from_module(&t.module)?;
    let universal: Vec<Vec<i128>> = BilinearMapSpec::universal(m, n, t)
        .table
        .iter()
        .flatten()
        .map(|v| v.iter().map(|c| c.to_i128().ok_or_else(|| Error::SizeBound("tensor coefficient".into()))).collect())
        .collect::<Result<_>>()?;
    let gq = nq.gens();
    let hom_list = homs(&nt, &nq)?;
    let mut from_homs = BTreeSet::new();
    for phi in &hom_list {
        let table: Vec<Vec<i128>> = universal
            .iter()
            .map(|u| {
                let mut y = vec![0i128; gq];
                for (c, img) in u.iter().zip(phi) {
                    for (o, x) in y.iter_mut().zip(img) {
                        *o += c * x;
                    }
                }
                nq.group.reduce(&mut y);
                y
            })
            .collect();
        if !from_homs.insert(table.clone()) {
            return Err(Error::Mismatch(format!(
                "two maps out of the truncated tensor restrict to the same bilinear map {}",
                fmt_table(&table)
            )));
        }
    }
    let bilinear: BTreeSet<Vec<Vec<i128>>> = enumerate_bilinear(m, n, q)?
        .into_iter()
        .map(|t| t.into_iter().flatten().collect())
        .collect();
    if let Some(b) = bilinear.difference(&from_homs).next() {
        return Err(Error::Mismatch(format!("bilinear map {} does not factor through the tensor", fmt_table(b))));
    }
    if let Some(b) = from_homs.difference(&bilinear).next() {
        return Err(Error::Mismatch(format!("{} is not (V, F)-bilinear", fmt_table(b))));
    }
    Ok(CorepVerdict {
        bilinear_maps: bilinear.len(),
        homs: hom_list.len(),
    })
}
