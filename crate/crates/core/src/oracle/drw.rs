use crate::error::{Error, Result};
use crate::witt::is_prime;

/// Weights `a / p^l` on a fixed grid for `F_p[x]/x^N`, `N = degcap + 1`.
struct Grid {
    p: u64,
    l: u32,
    cut: u64,
}

fn vp(p: u64, mut x: u64) -> u32 {
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

impl Grid {
    fn scale(&self) -> u64 {
        self.p.pow(self.l)
    }

    fn u(&self, a: u64) -> u32 {
        if a == 0 {
            0
        } else {
            self.l - vp(self.p, a).min(self.l)
        }
    }

    fn integral(&self, a: u64) -> bool {
        a % self.scale() == 0
    }

    /// `m` with weight `m / p^u`, `p ∤ m` unless the weight is integral.
    fn numerator(&self, a: u64) -> u64 {
        if self.integral(a) {
            a / self.scale()
        } else {
            a / self.p.pow(vp(self.p, a))
        }
    }

    /// Least `t` with `p^t b(w)` in `W(x^N)`.
    fn ideal_shift(&self, a: u64) -> u32 {
        let mut m = self.numerator(a);
        let mut t = 0;
        while m < self.cut {
            m *= self.p;
            t += 1;
        }
        t
    }

    fn top(&self) -> u64 {
        (self.cut + 1) * self.scale()
    }

    /// Exponents of the ideal in degrees 0 and 1 at weight `a`.
    fn ideal(&self, a: u64) -> (u32, u32) {
        let (mut j0, mut j1) = (u32::MAX, u32::MAX);
        let uw = self.u(a);
        for b in 1..=a {
            let k = a - b;
            let t = self.ideal_shift(b);
            let (ub, uk) = (self.u(b), self.u(k));
            // p^t b(e) b(k)
            j0 = j0.min(t + ub + uk - uw);
            // p^t b(e) c(k)
            if k > 0 {
                j1 = j1.min(t + ub);
            }
            // d(p^t b(e)) b(k)
            let dv = if self.integral(b) { vp(self.p, self.numerator(b)) } else { 0 };
            j1 = j1.min(t + uk + dv);
        }
        (j0, j1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicWittCount {
    pub p: u64,
    pub degcap: u32,
    /// `log_orders[m - 1][i]` is `log_p |W_mΩ^i|`.
    pub log_orders: Vec<[u32; 2]>,
}

fn check(p: u64, n: usize, degcap: u32) -> Result<()> {
    if !is_prime(p) || n == 0 || degcap == 0 {
        return Err(Error::Parse(format!("need a prime p and n, degcap >= 1, got {p}, {n}, {degcap}")));
    }
    Ok(())
}

/// Per weight, the cyclic groups `Z/p^{m-u}` on the basic Witt differentials `V^u[x^k]`
/// and `dV^u[x^k]` (or `[x]^k dlog[x]`), modulo the ideal generated by `W(x^N)` and `dW(x^N)`.
fn level(p: u64, m: usize, degcap: u32) -> Vec<(u64, u32, u32)> {
    let g = Grid {
        p,
        l: m as u32 - 1,
        cut: degcap as u64 + 1,
    };
    (0..=g.top())
        .filter(|&a| g.u(a) < m as u32)
        .map(|a| {
            let full = m as u32 - g.u(a);
            let (j0, j1) = g.ideal(a);
            let e1 = if a == 0 { 0 } else { full.min(j1) };
            (a, full.min(j0), e1)
        })
        .collect()
}

/// Orders of `W_mΩ^i` of `F_p[x]/x^{degcap+1}` for `m <= n`, counted on basic Witt differentials.
pub fn basic_witt_count(p: u64, n: usize, degcap: u32) -> Result<BasicWittCount> {
    check(p, n, degcap)?;
    let log_orders = (1..=n)
        .map(|m| {
            level(p, m, degcap)
                .iter()
                .fold([0, 0], |acc, &(_, e0, e1)| [acc[0] + e0, acc[1] + e1])
        })
        .collect();
    Ok(BasicWittCount { p, degcap, log_orders })
}

/// `log_p` of `W_mΩ^i / (V^r + dV^r)` with `V` acting through the restriction, on basic Witt differentials.
pub fn basic_witt_vdv_h0(p: u64, m: usize, degcap: u32, i: usize, r: u32) -> Result<u32> {
    check(p, m, degcap)?;
    if i > 1 {
        return Ok(0);
    }
    let g = Grid {
        p,
        l: m as u32 - 1,
        cut: degcap as u64 + 1,
    };
    Ok(level(p, m, degcap)
        .iter()
        .map(|&(a, e0, e1)| {
            let uw = g.u(a);
            let shift = if uw >= r { 0 } else { r - uw };
            if i == 0 {
                e0.min(shift)
            } else {
                let dv = if g.integral(a) && a > 0 { vp(p, g.numerator(a)) } else { 0 };
                e1.min(r).min(shift + dv)
            }
        })
        .sum())
}
