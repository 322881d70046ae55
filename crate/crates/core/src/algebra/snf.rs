use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::Matrix;

/// Smith form `u * m * v = diag(d)`, with the transforms that were requested.
#[derive(Clone, Debug)]
pub struct Smith {
    /// Length `min(rows, cols)`; nonnegative, each entry divides the next, zeros last.
    pub diag: Vec<BigInt>,
    pub rank: usize,
    pub u: Option<Matrix>,
    pub v: Option<Matrix>,
    pub v_inv: Option<Matrix>,
}

impl Smith {
    pub fn diag_matrix(&self, rows: usize, cols: usize) -> Matrix {
        let mut d = Matrix::zeros(rows, cols);
        for (i, x) in self.diag.iter().enumerate() {
            d.set(i, i, x.clone());
        }
        d
    }
}

/// Returns `(d, u, v)` with `u * m * v = d`, `u` and `v` unimodular.
pub fn smith_normal_form(m: &Matrix) -> (Matrix, Matrix, Matrix) {
    let s = smith(m, true, true);
    let d = s.diag_matrix(m.rows(), m.cols());
    (d, s.u.unwrap(), s.v.unwrap())
}

pub fn smith(m: &Matrix, want_u: bool, want_v: bool) -> Smith {
    let (r, c) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = want_u.then(|| Matrix::identity(r));
    let mut v = want_v.then(|| Matrix::identity(c));
    let mut v_inv = want_v.then(|| Matrix::identity(c));

    let mut t = 0;
    let n = r.min(c);
    while t < n {
        reduce_by_singletons(&mut a, &mut u, t);
        let Some((pi, pj)) = min_abs_entry(&a, t) else {
            break;
        };
        row_swap(&mut a, &mut u, t, pi);
        col_swap(&mut a, &mut v, &mut v_inv, t, pj);
        loop {
            let mut changed = false;
            for i in t + 1..r {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = a.get(i, t) / a.get(t, t);
                row_add(&mut a, &mut u, i, t, &(-q));
                if !a.get(i, t).is_zero() {
                    row_swap(&mut a, &mut u, t, i);
                    changed = true;
                }
            }
            for j in t + 1..c {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = a.get(t, j) / a.get(t, t);
                col_add(&mut a, &mut v, &mut v_inv, j, t, &(-q));
                if !a.get(t, j).is_zero() {
                    col_swap(&mut a, &mut v, &mut v_inv, t, j);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            let pivot = a.get(t, t).clone();
            let mut bad = None;
            'search: for i in t + 1..r {
                for j in t + 1..c {
                    if !a.get(i, j).is_multiple_of(&pivot) {
                        bad = Some(i);
                        break 'search;
                    }
                }
            }
            match bad {
                Some(i) => row_add(&mut a, &mut u, t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            if let Some(u) = u.as_mut() {
                u.negate_row(t);
            }
        }
        t += 1;
    }
    let diag: Vec<BigInt> = (0..n).map(|i| a.get(i, i).clone()).collect();
    let rank = diag.iter().take_while(|x| !x.is_zero()).count();
    Smith {
        diag,
        rank,
        u,
        v,
        v_inv,
    }
}

/// Reduces every column that holds a row `d e_j` (rows and columns from `t` on) modulo `d`.
fn reduce_by_singletons(a: &mut Matrix, u: &mut Option<Matrix>, t: usize) {
    for i in t..a.rows() {
        let mut nz = (t..a.cols()).filter(|&j| !a.get(i, j).is_zero());
        let (Some(j), None) = (nz.next(), nz.next()) else {
            continue;
        };
        if j == t {
            continue;
        }
        let d = a.get(i, j).clone();
        for k in t..a.rows() {
            if k == i || a.get(k, j).abs() < d.abs() {
                continue;
            }
            let q = a.get(k, j).div_floor(&d);
            row_add(a, u, k, i, &(-q));
        }
    }
}

fn min_abs_entry(a: &Matrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            let better = match &best {
                None => true,
                Some((_, _, b)) => ax < *b,
            };
            if better {
                let one = ax == BigInt::from(1);
                best = Some((i, j, ax));
                if one {
                    let (i, j, _) = best.unwrap();
                    return Some((i, j));
                }
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn row_swap(a: &mut Matrix, u: &mut Option<Matrix>, i: usize, j: usize) {
    a.swap_rows(i, j);
    if let Some(u) = u.as_mut() {
        u.swap_rows(i, j);
    }
}

fn row_add(a: &mut Matrix, u: &mut Option<Matrix>, dst: usize, src: usize, k: &BigInt) {
    a.add_row_multiple(dst, src, k);
    if let Some(u) = u.as_mut() {
        u.add_row_multiple(dst, src, k);
    }
}

fn col_swap(
    a: &mut Matrix,
    v: &mut Option<Matrix>,
    v_inv: &mut Option<Matrix>,
    i: usize,
    j: usize,
) {
    a.swap_cols(i, j);
    if let Some(v) = v.as_mut() {
        v.swap_cols(i, j);
    }
    if let Some(w) = v_inv.as_mut() {
        w.swap_rows(i, j);
    }
}

// col[dst] += k col[src]; the inverse transform gets row[src] -= k row[dst].
fn col_add(
    a: &mut Matrix,
    v: &mut Option<Matrix>,
    v_inv: &mut Option<Matrix>,
    dst: usize,
    src: usize,
    k: &BigInt,
) {
    a.add_col_multiple(dst, src, k);
    if let Some(v) = v.as_mut() {
        v.add_col_multiple(dst, src, k);
    }
    if let Some(w) = v_inv.as_mut() {
        w.add_row_multiple(src, dst, &(-k));
    }
}

/// Basis of the left kernel `{x : x m = 0}` as matrix rows.
pub fn left_kernel(m: &Matrix) -> Matrix {
    let s = smith(m, true, false);
    let u = s.u.unwrap();
    u.select_rows(s.rank..m.rows())
}

/// Integer solution `x` of `x m = b`, if one exists.
pub fn solve_left(m: &Matrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let s = smith(m, true, true);
    solve_with(&s, m.rows(), b)
}

pub fn solve_with(s: &Smith, rows: usize, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let v = s.v.as_ref().expect("solve needs v");
    let u = s.u.as_ref().expect("solve needs u");
    let c = v.apply(b);
    let mut w = vec![BigInt::zero(); rows];
    for (j, cj) in c.iter().enumerate() {
        if j < s.rank {
            let (q, rem) = cj.div_rem(&s.diag[j]);
            if !rem.is_zero() {
                return None;
            }
            w[j] = q;
        } else if !cj.is_zero() {
            return None;
        }
    }
    Some(u.apply(&w))
}
