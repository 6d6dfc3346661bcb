//! Maximal integral lattices: detection and enlargement.
//!
//! An integral lattice `L` admits an integral overlattice of index `p` iff
//! some `v in L \ pL` satisfies `2 phi(v, L) ⊆ pZ` and `phi[v] ∈ p^2 Z`;
//! the overlattice is then `L + Z v/p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{factor, Int, Rat, RatIdeal};
use crate::linalg::{self, Mat};
use crate::qspace::{is_integral, Lattice, QuadSpace};

/// `2 B G B^T` as an integer matrix (requires `L` integral).
fn doubled_gram(l: &Lattice, s: &QuadSpace) -> Vec<Vec<Int>> {
    let g = linalg::congruence(&l.basis(), s.gram());
    g.iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    let y = x * Rat::from_integer(2.into());
                    debug_assert!(y.is_integer());
                    y.to_integer()
                })
                .collect()
        })
        .collect()
}

fn reduce(x: &Int, m: u128) -> i128 {
    x.mod_floor(&BigInt::from(m)).to_i128().expect("reduced residue fits")
}

/// Basis of `{c in F_p^n : c T = 0}`.
fn kernel_mod_p(t: &[Vec<i128>], p: i128) -> Vec<Vec<i128>> {
    let n = t.len();
    // row-reduce the transpose: c T = 0 iff T^T c^T = 0
    let mut a: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| t[j][i].rem_euclid(p)).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(k) = (r..n).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, k);
        let inv = mod_inverse(a[r][c], p);
        for x in a[r].iter_mut() {
            *x = (*x * inv).rem_euclid(p);
        }
        for i in 0..n {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..n {
                    a[i][j] = (a[i][j] - f * a[r][j]).rem_euclid(p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut x = vec![0i128; n];
            x[f] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                x[pc] = (-a[i][f]).rem_euclid(p);
            }
            x
        })
        .collect()
}

fn mod_inverse(a: i128, p: i128) -> i128 {
    let e = a.extended_gcd(&p);
    e.x.rem_euclid(p)
}

/// Searches for an integral overlattice of `L` with index `p`.
pub fn enlarge_at(l: &Lattice, s: &QuadSpace, p: u64) -> Option<Lattice> {
    let t = doubled_gram(l, s);
    let n = t.len();
    let pp = p as i128;
    let modulus = 2 * (p as u128) * (p as u128);
    let tm: Vec<Vec<i128>> = t.iter().map(|r| r.iter().map(|x| reduce(x, modulus)).collect()).collect();
    let ker = kernel_mod_p(&tm, pp);
    let k = ker.len();
    if k == 0 {
        return None;
    }
    let m = modulus as i128;
    let quad = |c: &[i128]| -> bool {
        let mut acc = 0i128;
        for i in 0..n {
            if c[i] == 0 {
                continue;
            }
            let mut row = 0i128;
            for j in 0..n {
                row = (row + tm[i][j] * c[j]) % m;
            }
            acc = (acc + c[i] * row) % m;
        }
        acc.rem_euclid(m) == 0
    };
    // projective points: leading coefficient 1 at position `lead`
    let mut coeffs = vec![0i128; k];
    for lead in 0..k {
        let tail = k - lead - 1;
        let total = (pp as u128).pow(tail as u32);
        for idx in 0..total {
            coeffs.iter_mut().for_each(|x| *x = 0);
            coeffs[lead] = 1;
            let mut rest = idx;
            for slot in coeffs.iter_mut().skip(lead + 1) {
                *slot = (rest % pp as u128) as i128;
                rest /= pp as u128;
            }
            let mut c = vec![0i128; n];
            for (a, kv) in coeffs.iter().zip(&ker) {
                if *a != 0 {
                    for (x, y) in c.iter_mut().zip(kv) {
                        *x = (*x + a * y) % pp;
                    }
                }
            }
            if quad(&c) {
                let basis = l.basis();
                let mut v = vec![Rat::zero(); n];
                for (ci, bi) in c.iter().zip(&basis) {
                    if *ci != 0 {
                        let f = Rat::from_integer(Int::from(*ci));
                        for (x, y) in v.iter_mut().zip(bi) {
                            *x += &f * y;
                        }
                    }
                }
                let pinv = Rat::new(1.into(), Int::from(p));
                let v: Vec<Rat> = v.into_iter().map(|x| x * &pinv).collect();
                return Some(l.add_vector(&v));
            }
        }
    }
    None
}

/// Primes at which an enlargement is possible in principle: `p^2 | [L~/L]`.
pub fn candidate_primes(l: &Lattice, s: &QuadSpace) -> Result<Vec<u64>> {
    let t = doubled_gram(l, s);
    let d = linalg::det(&t.iter().map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect::<Mat>());
    if d.is_zero() {
        return Err(Error::Degenerate);
    }
    Ok(factor(&d)?.into_iter().filter(|&(_, e)| e >= 2).map(|(p, _)| p).collect())
}

pub fn is_maximal(l: &Lattice, s: &QuadSpace) -> Result<bool> {
    if !is_integral(l, s) {
        return Err(Error::NotIntegral);
    }
    Ok(candidate_primes(l, s)?.into_iter().all(|p| enlarge_at(l, s, p).is_none()))
}

pub fn maximalize(l: &Lattice, s: &QuadSpace) -> Result<Lattice> {
    if !is_integral(l, s) {
        return Err(Error::NotIntegral);
    }
    let mut cur = l.clone();
    'outer: loop {
        for p in candidate_primes(&cur, s)? {
            if let Some(next) = enlarge_at(&cur, s, p) {
                cur = next;
                continue 'outer;
            }
        }
        return Ok(cur);
    }
}

/// Minimal integral scaling of `Z^n`, as an ideal `c` with `c Z^n` integral.
pub fn integral_scaling(s: &QuadSpace) -> Result<RatIdeal> {
    let g = s.gram();
    let n = s.dim();
    let two = Rat::from_integer(2.into());
    let mut acc: Option<RatIdeal> = None;
    for i in 0..n {
        for j in i..n {
            let x = if i == j { g[i][i].clone() } else { &g[i][j] * &two };
            if x.is_zero() {
                continue;
            }
            let id = RatIdeal::from_rat(&x)?;
            acc = Some(match acc {
                None => id,
                Some(a) => a.sum(&id),
            });
        }
    }
    let values = acc.ok_or(Error::Degenerate)?;
    Ok(RatIdeal::from_factors(
        values.factors().iter().map(|(&p, &e)| (p, Integer::div_ceil(&-e, &2))).collect(),
    ))
}

pub fn maximal_lattice(s: &QuadSpace) -> Result<Lattice> {
    let c = integral_scaling(s)?;
    let l = Lattice::standard(s.dim()).scale(&c.generator());
    maximalize(&l, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, rint};
    use crate::qspace::{dual, index_ideal};

    fn diag(d: &[Rat]) -> QuadSpace {
        QuadSpace::diagonal(d).unwrap()
    }

    fn ints(d: &[i64]) -> QuadSpace {
        diag(&d.iter().map(|&x| rint(x)).collect::<Vec<_>>())
    }

    fn disc(l: &Lattice, s: &QuadSpace) -> RatIdeal {
        index_ideal(l, &dual(l, s).unwrap()).unwrap().inverse()
    }

    fn d4() -> Lattice {
        Lattice::standard(4).add_vector(&[rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2)])
    }

    #[test]
    fn enlarge_examples() {
        let i4 = ints(&[1, 1, 1, 1]);
        assert_eq!(enlarge_at(&Lattice::standard(4), &i4, 2), Some(d4()));
        assert_eq!(enlarge_at(&Lattice::standard(3), &ints(&[1, 1, 1]), 2), None);
        let s = ints(&[1, 49]);
        let expected = Lattice::from_generators(2, &[vec![rint(1), rint(0)], vec![rint(0), rat(1, 7)]]);
        assert_eq!(enlarge_at(&Lattice::standard(2), &s, 7), Some(expected));
    }

    #[test]
    fn maximality_examples() {
        assert!(is_maximal(&Lattice::standard(3), &ints(&[1, 1, 1])).unwrap());
        assert!(!is_maximal(&Lattice::standard(4), &ints(&[1, 1, 1, 1])).unwrap());
        assert!(is_maximal(&d4(), &ints(&[1, 1, 1, 1])).unwrap());
        let half = diag(&[rat(1, 2), rint(1)]);
        assert_eq!(is_maximal(&Lattice::standard(2), &half), Err(Error::NotIntegral));
    }

    #[test]
    fn maximalize_examples() {
        let i4 = ints(&[1, 1, 1, 1]);
        assert_eq!(disc(&Lattice::standard(4), &i4), RatIdeal::from_int(16));
        let m = maximalize(&Lattice::standard(4), &i4).unwrap();
        assert_eq!(m, d4());
        assert_eq!(disc(&m, &i4), RatIdeal::from_int(4));
        assert_eq!(maximalize(&m, &i4).unwrap(), m);

        let i3 = ints(&[1, 1, 1]);
        let two = Lattice::standard(3).scale(&rint(2));
        let m = maximalize(&two, &i3).unwrap();
        assert!(two.is_sublattice_of(&m));
        assert!(is_maximal(&m, &i3).unwrap());
        assert_eq!(disc(&m, &i3), RatIdeal::from_int(8));
    }

    #[test]
    fn maximal_lattice_examples() {
        assert_eq!(maximal_lattice(&ints(&[1, 1, 1])).unwrap(), Lattice::standard(3));
        assert_eq!(maximal_lattice(&ints(&[1, 1, 1, 1])).unwrap(), d4());
        let s = diag(&[rat(1, 3), rint(1), rint(1)]);
        let m = maximal_lattice(&s).unwrap();
        assert!(Lattice::standard(3).scale(&rint(3)).is_sublattice_of(&m));
        assert!(is_maximal(&m, &s).unwrap());
        assert_eq!(integral_scaling(&s).unwrap(), RatIdeal::from_int(3));
    }

    #[test]
    fn enlargement_drops_discriminant_by_p_squared() {
        let s = ints(&[3, 3, 5, 45]);
        let mut l = Lattice::standard(4).scale(&rint(3));
        while let Some(p) = candidate_primes(&l, &s).unwrap().into_iter().find(|&p| enlarge_at(&l, &s, p).is_some()) {
            let next = enlarge_at(&l, &s, p).unwrap();
            assert!(is_integral(&next, &s));
            assert_eq!(index_ideal(&l, &next).unwrap(), RatIdeal::prime(p).inverse());
            assert_eq!(disc(&next, &s), disc(&l, &s).div(&RatIdeal::prime(p).pow(2)));
            l = next;
        }
        assert!(is_maximal(&l, &s).unwrap());
    }
}
