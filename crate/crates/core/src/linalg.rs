//! Dense exact linear algebra over `Q` and `Z`.
//!
//! Row-vector convention throughout: a matrix is a list of rows and linear
//! maps act on the right.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactnum::{Int, Rat};

pub type Mat = Vec<Vec<Rat>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![Rat::zero(); c]; r]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rat::one();
    }
    m
}

pub fn diagonal(d: &[Rat]) -> Mat {
    let mut m = zeros(d.len(), d.len());
    for (i, x) in d.iter().enumerate() {
        m[i][i] = x.clone();
    }
    m
}

pub fn from_ints(rows: &[&[i64]]) -> Mat {
    rows.iter()
        .map(|r| r.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect())
        .collect()
}

pub fn transpose(a: &Mat) -> Mat {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            debug_assert_eq!(row.len(), inner);
            (0..cols)
                .map(|j| {
                    let mut s = Rat::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn vec_mat(v: &[Rat], a: &Mat) -> Vec<Rat> {
    mul(&vec![v.to_vec()], a).pop().unwrap_or_default()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |s, (x, y)| s + x * y)
}

pub fn scale_mat(a: &Mat, c: &Rat) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

/// `B G B^T`.
pub fn congruence(b: &Mat, g: &Mat) -> Mat {
    mul(&mul(b, g), &transpose(b))
}

pub fn is_symmetric(a: &Mat) -> bool {
    let n = a.len();
    a.iter().all(|r| r.len() == n) && (0..n).all(|i| (0..i).all(|j| a[i][j] == a[j][i]))
}

/// Reduced row echelon form and pivot columns.
pub fn rref(a: &Mat) -> (Mat, Vec<usize>) {
    let mut m = a.clone();
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    if !m[r][j].is_zero() {
                        let t = &f * &m[r][j];
                        m[i][j] -= t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(a: &Mat) -> usize {
    rref(a).1.len()
}

pub fn det(a: &Mat) -> Rat {
    let n = a.len();
    let mut m = a.clone();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        let inv = m[c][c].recip();
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] * &inv;
                for j in c..n {
                    let t = &f * &m[c][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    d
}

pub fn inverse(a: &Mat) -> Option<Mat> {
    let n = a.len();
    let aug: Mat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    let (r, piv) = rref(&aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Basis of `{x : A x = 0}` (column vectors written as rows).
pub fn right_kernel(a: &Mat, cols: usize) -> Mat {
    let (r, piv) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rat::zero(); cols];
            x[f] = Rat::one();
            for (i, &p) in piv.iter().enumerate() {
                x[p] = -r[i][f].clone();
            }
            x
        })
        .collect()
}

/// Basis of `{y : y A = 0}`.
pub fn left_kernel(a: &Mat) -> Mat {
    right_kernel(&transpose(a), a.len())
}

/// Solves `y A = x` for `y`, if a solution exists.
pub fn solve_left(a: &Mat, x: &[Rat]) -> Option<Vec<Rat>> {
    let k = a.len();
    let m = x.len();
    // columns of A^T augmented by x
    let aug: Mat = (0..m)
        .map(|j| {
            let mut row: Vec<Rat> = (0..k).map(|i| a[i][j].clone()).collect();
            row.push(x[j].clone());
            row
        })
        .collect();
    let (r, piv) = rref(&aug);
    if piv.contains(&k) {
        return None;
    }
    let mut y = vec![Rat::zero(); k];
    for (i, &p) in piv.iter().enumerate() {
        y[p] = r[i][k].clone();
    }
    Some(y)
}

/// Least common multiple of all denominators.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> Int {
    xs.into_iter().fold(Int::one(), |d, x| d.lcm(x.denom()))
}

/// Integer matrix `d A` with `d` the common denominator of `A`.
pub fn clear_denominators(a: &Mat) -> (Vec<Vec<Int>>, Int) {
    let d = common_denominator(a.iter().flatten());
    let rows = a
        .iter()
        .map(|r| r.iter().map(|x| (x * Rat::from_integer(d.clone())).to_integer()).collect())
        .collect();
    (rows, d)
}

/// Row Hermite normal form: echelon, positive pivots, entries above each
/// pivot reduced into `[0, pivot)`, zero rows removed. Unimodular row
/// operations only, so the row module is unchanged.
pub fn hnf(mut rows: Vec<Vec<Int>>) -> Vec<Vec<Int>> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        loop {
            let pivot = (r..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&i, &j| rows[i][c].abs().cmp(&rows[j][c].abs()));
            let Some(p) = pivot else { break };
            rows.swap(r, p);
            let mut clean = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                if !q.is_zero() {
                    let (head, tail) = rows.split_at_mut(i);
                    sub_multiple(&mut tail[0], &head[r], &q);
                }
                if !rows[i][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -&*x;
                }
            }
            for i in 0..r {
                let q = rows[i][c].div_floor(&rows[r][c]);
                if !q.is_zero() {
                    let (head, tail) = rows.split_at_mut(r);
                    sub_multiple(&mut head[i], &tail[0], &q);
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    rows
}

fn sub_multiple(target: &mut [Int], src: &[Int], q: &Int) {
    for (t, s) in target.iter_mut().zip(src) {
        if !s.is_zero() {
            *t -= q * s;
        }
    }
}

/// Basis of the integer left kernel `{c in Z^k : c A = 0}` of an integer
/// `k x m` matrix, in Hermite normal form.
pub fn integer_left_kernel(a: &[Vec<Int>], m: usize) -> Vec<Vec<Int>> {
    let k = a.len();
    let aug: Vec<Vec<Int>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v = row.clone();
            v.extend((0..k).map(|j| if i == j { Int::one() } else { Int::zero() }));
            v
        })
        .collect();
    let h = hnf(aug);
    let ker: Vec<Vec<Int>> = h
        .into_iter()
        .filter(|row| row[..m].iter().all(Zero::is_zero))
        .map(|row| row[m..].to_vec())
        .collect();
    hnf(ker)
}
