use std::cmp::Ordering;
use std::fmt;

/// A weight `num / p^u` in `Z[1/p]^v`, with `u` minimal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weight {
    pub num: Vec<u64>,
    pub u: u32,
}

impl Weight {
    pub fn new(p: u64, num: Vec<u64>, u: u32) -> Weight {
        let mut w = Weight { num, u };
        while w.u > 0 && w.num.iter().all(|&a| a % p == 0) {
            for a in &mut w.num {
                *a /= p;
            }
            w.u -= 1;
        }
        w
    }

    pub fn zero(v: usize) -> Weight {
        Weight { num: vec![0; v], u: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|&a| a == 0)
    }

    pub fn is_integral(&self) -> bool {
        self.u == 0
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.num.len()).filter(|&j| self.num[j] > 0).collect()
    }

    /// `p k`.
    pub fn times_p(&self, p: u64) -> Weight {
        if self.u > 0 {
            Weight {
                num: self.num.clone(),
                u: self.u - 1,
            }
        } else {
            Weight {
                num: self.num.iter().map(|a| a * p).collect(),
                u: 0,
            }
        }
    }

    /// `k / p`.
    pub fn over_p(&self, p: u64) -> Weight {
        Weight::new(p, self.num.clone(), self.u + 1)
    }

    /// `p^r k` for `r >= 0`.
    pub fn scaled(&self, p: u64, r: u32) -> Weight {
        (0..r).fold(self.clone(), |w, _| w.times_p(p))
    }

    /// Numerators over the common denominator `p^u` with `u >= self.u`.
    pub fn numerators_at(&self, p: u64, u: u32) -> Vec<u64> {
        let s = p.pow(u - self.u);
        self.num.iter().map(|a| a * s).collect()
    }

    /// Whether every coordinate is at most `bound`.
    pub fn coords_at_most(&self, p: u64, bound: u64) -> bool {
        let s = p.pow(self.u);
        self.num.iter().all(|&a| a <= bound * s)
    }

    fn cmp_value(&self, other: &Weight, p: u64) -> Ordering {
        let u = self.u.max(other.u);
        let a: u64 = self.numerators_at(p, u).iter().sum();
        let b: u64 = other.numerators_at(p, u).iter().sum();
        a.cmp(&b)
            .then_with(|| self.numerators_at(p, u).cmp(&other.numerators_at(p, u)))
    }

    /// Sort key: total weight, then coordinates.
    pub fn sort(ws: &mut [Weight], p: u64) {
        ws.sort_by(|a, b| a.cmp_value(b, p));
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .num
            .iter()
            .map(|&a| if self.u == 0 { a.to_string() } else { format!("{a}/p^{}", self.u) })
            .collect();
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "({})", parts.join(","))
        }
    }
}

/// Subsets of `support` of size `i`, as sorted index lists in lexicographic order.
pub fn subsets(support: &[usize], i: usize) -> Vec<Vec<usize>> {
    fn go(s: &[usize], i: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == i {
            out.push(cur.clone());
            return;
        }
        for t in start..s.len() {
            cur.push(s[t]);
            go(s, i, t + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(support, i, 0, &mut Vec::new(), &mut out);
    out
}

/// Sign of `dlog T_j ∧ dlog T_I` relative to the sorted `I ∪ {j}`, or `None` if `j ∈ I`.
pub fn wedge_sign(j: usize, set: &[usize]) -> Option<i64> {
    if set.contains(&j) {
        return None;
    }
    let before = set.iter().filter(|&&i| i < j).count();
    Some(if before % 2 == 0 { 1 } else { -1 })
}

pub fn union_with(j: usize, set: &[usize]) -> Vec<usize> {
    let mut s = set.to_vec();
    s.push(j);
    s.sort_unstable();
    s
}
