use std::collections::HashSet;

use num_bigint::BigInt;

use super::naive::{NaiveModule, Op};
use crate::algebra::FinAbPres;
use crate::cartier::{CartierModule, HomotopyTable};
use crate::error::{Error, Result};

const ELEMENT_BOUND: i128 = 1 << 20;

/// Invariant factors of a finite abelian `p`-group from the counts `c_k = #{x : p^k x = 0}`.
fn from_counts(p: u64, counts: &[usize]) -> FinAbPres {
    let at_least: Vec<u32> = counts
        .windows(2)
        .map(|w| {
            let mut ratio = w[1] / w[0];
            let mut e = 0;
            while ratio > 1 {
                ratio /= p as usize;
                e += 1;
            }
            e
        })
        .collect();
    let mut factors = Vec::new();
    for (k, &n) in at_least.iter().enumerate() {
        let next = at_least.get(k + 1).copied().unwrap_or(0);
        for _ in next..n {
            factors.push(BigInt::from(p).pow(k as u32 + 1));
        }
    }
    FinAbPres::from_diagonal(&factors, 0)
}

struct Elements {
    p: u64,
    len: usize,
    /// `times_p[x]` is the index of `p x`.
    times_p: Vec<usize>,
}

impl Elements {
    fn kills(&self, mut x: usize, k: usize, target: &HashSet<usize>) -> bool {
        for _ in 0..k {
            x = self.times_p[x];
        }
        target.contains(&x)
    }

    fn subgroup(&self, s: &HashSet<usize>) -> FinAbPres {
        let zero: HashSet<usize> = [0].into();
        let mut counts = vec![1];
        for k in 1.. {
            let c = s.iter().filter(|&&x| self.kills(x, k, &zero)).count();
            counts.push(c);
            if c == s.len() {
                break;
            }
        }
        from_counts(self.p, &counts)
    }

    fn quotient(&self, s: &HashSet<usize>) -> FinAbPres {
        let mut counts = vec![1];
        for k in 1.. {
            let c = (0..self.len).filter(|&x| self.kills(x, k, s)).count() / s.len();
            counts.push(c);
            if c * s.len() == self.len {
                break;
            }
        }
        from_counts(self.p, &counts)
    }
}

/// The `M/V` table recomputed by enumerating the elements of `M`.
pub fn figure1_oracle(m: &CartierModule, d_max: usize) -> Result<HomotopyTable> {
    let nm = NaiveModule::from_module(m)?;
    if nm.group.order() > ELEMENT_BOUND {
        return Err(Error::SizeBound(format!("{} elements", nm.group.order())));
    }
    let p = nm.p;
    let elems = nm.group.elements();
    let index = |x: &[i128]| nm.group.index(x);
    let v_img: Vec<usize> = elems.iter().map(|x| index(&nm.apply(Op::V, x))).collect();
    let times_p: Vec<usize> = elems
        .iter()
        .map(|x| {
            let mut y: Vec<i128> = x.iter().map(|c| c * p as i128).collect();
            nm.group.reduce(&mut y);
            index(&y)
        })
        .collect();
    let e = Elements {
        p,
        len: elems.len(),
        times_p: times_p.clone(),
    };
    let ker_v: HashSet<usize> = (0..elems.len()).filter(|&x| v_img[x] == 0).collect();
    let im_v: HashSet<usize> = v_img.iter().copied().collect();
    let ker_p: HashSet<usize> = (0..elems.len()).filter(|&x| times_p[x] == 0).collect();
    let im_p: HashSet<usize> = times_p.iter().copied().collect();
    let (g0, g1, even, odd) = (e.quotient(&im_v), e.subgroup(&ker_v), e.quotient(&im_p), e.subgroup(&ker_p));
    let entries = (0..=d_max)
        .map(|d| match d {
            0 => g0.clone(),
            1 => g1.clone(),
            d if d % 2 == 0 => even.clone(),
            _ => odd.clone(),
        })
        .collect();
    Ok(HomotopyTable { p, entries })
}
