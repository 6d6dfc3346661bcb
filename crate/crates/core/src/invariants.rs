//! Classification data of quadratic spaces over `Q`: discriminant class,
//! real index, characteristic quaternion algebra with its ramification,
//! core dimensions, and the discriminant-ideal formulas for quaternary spaces
//! and their orthogonal complements.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{
    hilbert_symbol, is_local_norm, is_local_square, relevant_places, rint, Int, squarefree_split, Place, Rat,
    RatIdeal, SquareClass,
};
use crate::linalg::{self, Mat};
use crate::qspace::{complement_basis, QuadSpace, Vector};

/// Split (`M_2`) or division algebra at a place.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalAlgebra {
    Split,
    Division,
}

/// A quaternion algebra `(a, b)` over `Q` with its ramification set.
///
/// Two classes are equal when their ramification sets agree; the
/// presentation pair is not canonical.
#[derive(Debug, Clone)]
pub struct QuatClass {
    pub a: Rat,
    pub b: Rat,
    pub ram: BTreeSet<Place>,
}

impl PartialEq for QuatClass {
    fn eq(&self, other: &Self) -> bool {
        self.ram == other.ram
    }
}

impl Eq for QuatClass {}

impl QuatClass {
    pub fn from_pair(a: Rat, b: Rat) -> Result<QuatClass> {
        let ram = relevant_places(&[&a, &b])?
            .into_iter()
            .filter(|&v| hilbert_symbol(&a, &b, v) == -1)
            .collect();
        Ok(QuatClass { a, b, ram })
    }

    /// Finds a presentation for the algebra with the given ramification set.
    pub fn from_ramification(ram: BTreeSet<Place>) -> Result<QuatClass> {
        assert!(ram.len() % 2 == 0, "ramification set of odd size");
        if ram.is_empty() {
            return Ok(QuatClass { a: rint(1), b: rint(1), ram });
        }
        let d: i64 = ram
            .iter()
            .filter_map(|v| match v {
                Place::Prime(p) => Some(*p as i64),
                Place::Infinity => None,
            })
            .product();
        // a runs over signed squarefree divisors of 2d; b over small integers
        let mut a_cands: Vec<i64> = Vec::new();
        let base: Vec<i64> = {
            let mut ps: Vec<i64> = ram
                .iter()
                .filter_map(|v| match v {
                    Place::Prime(p) => Some(*p as i64),
                    Place::Infinity => None,
                })
                .collect();
            if !ps.contains(&2) {
                ps.push(2);
            }
            ps
        };
        for mask in 0u32..(1 << base.len()) {
            let m: i64 = base.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p).product();
            a_cands.push(-m);
            a_cands.push(m);
        }
        a_cands.sort_by_key(|a| ((a.unsigned_abs() != d as u64) as u8, a.unsigned_abs(), *a > 0));
        let mut bound = 64i64;
        loop {
            for &a in &a_cands {
                for k in 1..=bound {
                    for b in [-k, k] {
                        let q = QuatClass::from_pair(rint(a), rint(b))?;
                        if q.ram == ram {
                            return Ok(q);
                        }
                    }
                }
            }
            bound *= 4;
        }
    }

    pub fn local_invariant(&self, v: Place) -> i32 {
        if self.ram.contains(&v) {
            -1
        } else {
            1
        }
    }

    pub fn local_algebra(&self, v: Place) -> LocalAlgebra {
        if self.ram.contains(&v) {
            LocalAlgebra::Division
        } else {
            LocalAlgebra::Split
        }
    }

    pub fn finite_ram(&self) -> impl Iterator<Item = u64> + '_ {
        self.ram.iter().filter_map(|v| match v {
            Place::Prime(p) => Some(*p),
            Place::Infinity => None,
        })
    }

    /// `D_B`: the product of the finite ramified primes.
    pub fn discriminant(&self) -> RatIdeal {
        RatIdeal::from_factors(self.finite_ram().map(|p| (p, 1)).collect())
    }
}

/// Congruence diagonalisation over `Q`: returns `P` (rows are the new basis,
/// in the old coordinates) and the diagonal of `P G P^T`.
pub fn orthogonalize(gram: &Mat) -> (Mat, Vec<Rat>) {
    let n = gram.len();
    let mut p = linalg::identity(n);
    let mut g = gram.clone();
    for i in 0..n {
        if g[i][i].is_zero() {
            if let Some(j) = (i + 1..n).find(|&j| !g[j][j].is_zero()) {
                p.swap(i, j);
                g = linalg::congruence(&p, gram);
            } else if let Some((j, k)) =
                (i..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).find(|&(j, k)| !g[j][k].is_zero())
            {
                // all remaining diagonal entries vanish: b_j + b_k has value 2 phi(b_j, b_k)
                let bk = p[k].clone();
                for (x, y) in p[j].iter_mut().zip(&bk) {
                    *x += y;
                }
                p.swap(i, j);
                g = linalg::congruence(&p, gram);
            } else {
                continue;
            }
        }
        let piv = g[i][i].clone();
        for k in i + 1..n {
            if !g[k][i].is_zero() {
                let f = &g[k][i] / &piv;
                let bi = p[i].clone();
                for (x, y) in p[k].iter_mut().zip(&bi) {
                    *x -= &f * y;
                }
            }
        }
        g = linalg::congruence(&p, gram);
    }
    let d = (0..n).map(|i| g[i][i].clone()).collect();
    (p, d)
}

/// `delta = (-1)^{n(n-1)/2} det(phi)` modulo squares.
pub fn discriminant_class(s: &QuadSpace) -> Result<SquareClass> {
    let n = s.dim();
    let sign = if (n * (n - 1) / 2) % 2 == 0 { rint(1) } else { rint(-1) };
    SquareClass::of(&(sign * s.det()))
}

/// Index at the real place: #positive minus #negative diagonal entries.
pub fn real_index(s: &QuadSpace) -> i32 {
    let (_, d) = orthogonalize(s.gram());
    d.iter().map(|x| if x.is_positive() { 1 } else { -1 }).sum()
}

/// `Q(psi) = A^+(W)` for a ternary space, presented as `(-c1 c2, -c1 c3)`.
pub fn ternary_class(psi: &QuadSpace) -> Result<QuatClass> {
    if psi.dim() != 3 {
        return Err(Error::UnsupportedDimension(psi.dim()));
    }
    let (_, c) = orthogonalize(psi.gram());
    QuatClass::from_pair(-(&c[0] * &c[1]), -(&c[0] * &c[2]))
}

/// Default anisotropic vector: last vector of the orthogonalised basis.
pub fn default_h(s: &QuadSpace) -> Vector {
    let (p, _) = orthogonalize(s.gram());
    p[s.dim() - 1].clone()
}

/// `Q(phi)` for a quaternary space through `M_2(Q(phi)) ≅ Q(psi) ⊗ {K, q}`.
pub fn quaternary_class(phi: &QuadSpace) -> Result<QuatClass> {
    quaternary_class_with(phi, &default_h(phi))
}

pub fn quaternary_class_with(phi: &QuadSpace, h: &[Rat]) -> Result<QuatClass> {
    if phi.dim() != 4 {
        return Err(Error::UnsupportedDimension(phi.dim()));
    }
    let q = phi.value(h);
    let (_, psi_gram) = complement_basis(phi, h)?;
    let qpsi = ternary_class(&QuadSpace::new(psi_gram)?)?;
    let delta = discriminant_class(phi)?.as_rat();
    let places = relevant_places(&[&qpsi.a, &qpsi.b, &delta, &q])?;
    let ram = places
        .into_iter()
        .filter(|&v| qpsi.local_invariant(v) * hilbert_symbol(&delta, &q, v) == -1)
        .collect();
    QuatClass::from_ramification(ram)
}

/// Characteristic algebra at the real place from the index.
pub fn real_char_class(s: i32) -> LocalAlgebra {
    match s.rem_euclid(8) {
        3 | 4 | 5 | 6 => LocalAlgebra::Division,
        _ => LocalAlgebra::Split,
    }
}

/// Core dimension at a finite prime for `n = 4` or `n = 3`.
pub fn core_dimension(s: &QuadSpace, p: u64) -> Result<u32> {
    let v = Place::prime(p)?;
    match s.dim() {
        4 => {
            let delta = discriminant_class(s)?.as_rat();
            if !is_local_square(&delta, v) {
                Ok(2)
            } else if quaternary_class(s)?.ram.contains(&v) {
                Ok(4)
            } else {
                Ok(0)
            }
        }
        3 => Ok(if ternary_class(s)?.ram.contains(&v) { 3 } else { 1 }),
        n => Err(Error::UnsupportedDimension(n)),
    }
}

/// `D_{K/Q}` for `K = Q(sqrt(delta))`.
pub fn quadratic_field_disc(delta: &SquareClass) -> RatIdeal {
    if delta.is_one() {
        return RatIdeal::unit();
    }
    let d = delta.representative();
    let r = d.mod_floor(&Int::from(4));
    let base = RatIdeal::from_rat(&Rat::from_integer(d.clone())).expect("squarefree representative factors");
    if r.is_one() {
        base
    } else {
        base.mul(&RatIdeal::from_int(4))
    }
}

/// `[L~/L] = D_{K/Q} e^2`, `e` the ramified primes of `Q(phi)` unramified in `K`.
pub fn quaternary_disc_ideal(delta: &SquareClass, q_class: &QuatClass) -> RatIdeal {
    let dk = quadratic_field_disc(delta);
    let e = RatIdeal::from_factors(q_class.finite_ram().filter(|&p| dk.valuation(p) == 0).map(|p| (p, 1)).collect());
    dk.mul(&e.pow(2))
}

/// `[M~/M] = 2 a^{-1} D_psi^2 ∩ 2 a` where `delta q Z = a b^2`.
pub fn ternary_disc_ideal(delta_phi: &SquareClass, q: &Rat, d_psi: &RatIdeal) -> Result<RatIdeal> {
    let (a, _) = squarefree_split(&(delta_phi.as_rat() * q))?;
    let two = RatIdeal::from_int(2);
    Ok(two.mul(&a.inverse()).mul(&d_psi.pow(2)).intersect(&two.mul(&a)))
}

/// The ideal `b(q)` with `2 q [L~/L] = b(q)^2 [M~/M]`.
pub fn b_ideal(q: &Rat, disc_l: &RatIdeal, disc_m: &RatIdeal) -> Result<RatIdeal> {
    let two_q = RatIdeal::from_rat(&(rint(2) * q))?;
    two_q.mul(disc_l).div(disc_m).sqrt()
}

/// Splitting of `Q(psi_v)` read off from `delta`, `q`, `D_B` and `s_v(phi)`.
pub fn cha_case(delta: &SquareClass, q: &Rat, ram_b: &BTreeSet<Place>, v: Place, s_phi: i32) -> LocalAlgebra {
    let split = match v {
        Place::Infinity => {
            (q.is_positive() && (s_phi == 0 || s_phi == 2)) || (q.is_negative() && (s_phi == 0 || s_phi == -2))
        }
        Place::Prime(_) => {
            let d = delta.as_rat();
            let in_db = ram_b.contains(&v);
            if is_local_square(&d, v) {
                !in_db
            } else {
                let norm = is_local_norm(q, &d, v);
                (!in_db && norm) || (in_db && !norm)
            }
        }
    };
    if split {
        LocalAlgebra::Split
    } else {
        LocalAlgebra::Division
    }
}

/// `s_v(psi) = s_v(phi) - sign(q)`.
pub fn complement_index(s_phi: i32, q: &Rat) -> i32 {
    assert!(!q.is_zero());
    if q.is_positive() {
        s_phi - 1
    } else {
        s_phi + 1
    }
}

/// The invariants `{n, delta, Q, s_inf}` together with `D_{K/Q}`.
#[derive(Debug, Clone)]
pub struct SpaceInvariants {
    pub n: usize,
    pub delta: SquareClass,
    pub disc_field_disc: RatIdeal,
    pub q_class: QuatClass,
    pub s_inf: i32,
}

impl SpaceInvariants {
    pub fn of(s: &QuadSpace) -> Result<SpaceInvariants> {
        let delta = discriminant_class(s)?;
        let q_class = match s.dim() {
            4 => quaternary_class(s)?,
            3 => ternary_class(s)?,
            n => return Err(Error::UnsupportedDimension(n)),
        };
        Ok(SpaceInvariants {
            n: s.dim(),
            disc_field_disc: quadratic_field_disc(&delta),
            delta,
            q_class,
            s_inf: real_index(s),
        })
    }

    /// Core dimension at `p`, computed on demand.
    pub fn core_dimension(&self, p: u64) -> Result<u32> {
        let v = Place::prime(p)?;
        let ram = self.q_class.ram.contains(&v);
        match self.n {
            4 => Ok(if !is_local_square(&self.delta.as_rat(), v) {
                2
            } else if ram {
                4
            } else {
                0
            }),
            3 => Ok(if ram { 3 } else { 1 }),
            n => Err(Error::UnsupportedDimension(n)),
        }
    }
}

/// Whether `x` is one (used for `{K, q} = M_2` when `K = Q`).
pub fn is_trivial_class(d: &SquareClass) -> bool {
    d.representative().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_ints;

    fn places(ps: &[u64], inf: bool) -> BTreeSet<Place> {
        let mut s: BTreeSet<Place> = ps.iter().map(|&p| Place::Prime(p)).collect();
        if inf {
            s.insert(Place::Infinity);
        }
        s
    }

    fn diag(d: &[i64]) -> QuadSpace {
        QuadSpace::diagonal(&d.iter().map(|&x| rint(x)).collect::<Vec<_>>()).unwrap()
    }

    fn hyperbolic4() -> QuadSpace {
        let h = rat_half();
        let z = rint(0);
        QuadSpace::new(vec![
            vec![z.clone(), h.clone(), z.clone(), z.clone()],
            vec![h.clone(), z.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone(), h.clone()],
            vec![z.clone(), z.clone(), h, z],
        ])
        .unwrap()
    }

    fn rat_half() -> Rat {
        crate::exactnum::rat(1, 2)
    }

    #[test]
    fn discriminant_class_examples() {
        assert_eq!(discriminant_class(&diag(&[1, 1, 1, 1])).unwrap().representative(), &1.into());
        assert_eq!(discriminant_class(&diag(&[1, 1, 1])).unwrap().representative(), &(-1).into());
        assert_eq!(discriminant_class(&diag(&[1, 1, 2])).unwrap().representative(), &(-2).into());
    }

    #[test]
    fn real_index_examples() {
        assert_eq!(real_index(&diag(&[1, 1, 1, 1])), 4);
        assert_eq!(real_index(&diag(&[1, 1, -1, -1])), 0);
        assert_eq!(real_index(&diag(&[1, 1, 1, -1])), 2);
        assert_eq!(real_index(&hyperbolic4()), 0);
    }

    #[test]
    fn orthogonalize_handles_zero_diagonal() {
        let g = hyperbolic4();
        let (p, d) = orthogonalize(g.gram());
        let pg = linalg::congruence(&p, g.gram());
        assert_eq!(pg, linalg::diagonal(&d));
        assert!(d.iter().all(|x| !x.is_zero()));
        assert_eq!(linalg::det(&p).abs(), rint(1));
    }

    #[test]
    fn ternary_class_examples() {
        assert_eq!(ternary_class(&diag(&[1, 1, 1])).unwrap().ram, places(&[2], true));
        assert_eq!(ternary_class(&diag(&[1, 1, -1])).unwrap().ram, places(&[], false));
        assert_eq!(ternary_class(&diag(&[1, 2, 2])).unwrap().ram, places(&[2], true));
    }

    #[test]
    fn quaternary_class_examples() {
        assert_eq!(quaternary_class(&diag(&[1, 1, 1, 1])).unwrap().ram, places(&[2], true));
        assert_eq!(quaternary_class(&diag(&[1, 1, 1, -1])).unwrap().ram, places(&[], false));
        assert_eq!(quaternary_class(&hyperbolic4()).unwrap().ram, places(&[], false));
    }

    #[test]
    fn presentation_matches_ramification() {
        for ram in [places(&[2, 3], false), places(&[5], true), places(&[3, 7, 11], true), places(&[2, 97], false)] {
            let q = QuatClass::from_ramification(ram.clone()).unwrap();
            assert_eq!(QuatClass::from_pair(q.a.clone(), q.b.clone()).unwrap().ram, ram);
        }
    }

    #[test]
    fn core_dimension_examples() {
        let i4 = diag(&[1, 1, 1, 1]);
        assert_eq!(core_dimension(&i4, 2).unwrap(), 4);
        assert_eq!(core_dimension(&i4, 3).unwrap(), 0);
        let i3 = diag(&[1, 1, 1]);
        assert_eq!(core_dimension(&i3, 2).unwrap(), 3);
        assert_eq!(core_dimension(&i3, 5).unwrap(), 1);
        assert_eq!(core_dimension(&diag(&[1, 1]), 5), Err(Error::UnsupportedDimension(2)));
        assert_eq!(core_dimension(&diag(&[1, 1, 1, -1]), 2).unwrap(), 2);
        let inv = SpaceInvariants::of(&i4).unwrap();
        assert_eq!(inv.core_dimension(2).unwrap(), 4);
        assert_eq!(inv.core_dimension(3).unwrap(), 0);
    }

    #[test]
    fn real_char_examples() {
        assert_eq!(real_char_class(4), LocalAlgebra::Division);
        assert_eq!(real_char_class(0), LocalAlgebra::Split);
        assert_eq!(real_char_class(3), LocalAlgebra::Division);
        assert_eq!(real_char_class(-3), LocalAlgebra::Division);
        assert_eq!(real_char_class(-1), LocalAlgebra::Split);
        assert_eq!(real_char_class(-2), LocalAlgebra::Division);
    }

    #[test]
    fn field_disc_examples() {
        let sc = |n: i64| SquareClass::of(&rint(n)).unwrap();
        assert_eq!(quadratic_field_disc(&sc(1)), RatIdeal::unit());
        assert_eq!(quadratic_field_disc(&sc(-1)), RatIdeal::from_int(4));
        assert_eq!(quadratic_field_disc(&sc(5)), RatIdeal::from_int(5));
        assert_eq!(quadratic_field_disc(&sc(-3)), RatIdeal::from_int(3));
        assert_eq!(quadratic_field_disc(&sc(2)), RatIdeal::from_int(8));
    }

    #[test]
    fn disc_ideal_examples() {
        let i4 = SpaceInvariants::of(&diag(&[1, 1, 1, 1])).unwrap();
        assert_eq!(quaternary_disc_ideal(&i4.delta, &i4.q_class), RatIdeal::from_int(4));
        let m = SpaceInvariants::of(&diag(&[1, 1, 1, -1])).unwrap();
        assert_eq!(quaternary_disc_ideal(&m.delta, &m.q_class), RatIdeal::from_int(4));
        let h = SpaceInvariants::of(&hyperbolic4()).unwrap();
        assert_eq!(quaternary_disc_ideal(&h.delta, &h.q_class), RatIdeal::unit());

        let one = SquareClass::of(&rint(1)).unwrap();
        let two = RatIdeal::from_int(2);
        assert_eq!(ternary_disc_ideal(&one, &rint(1), &two).unwrap(), RatIdeal::from_int(8));
        assert_eq!(ternary_disc_ideal(&one, &rint(2), &two).unwrap(), RatIdeal::from_int(4));
        assert_eq!(ternary_disc_ideal(&one, &rint(1), &RatIdeal::unit()).unwrap(), two);
    }

    #[test]
    fn b_ideal_examples() {
        let i = RatIdeal::from_int;
        assert_eq!(b_ideal(&rint(1), &i(4), &i(8)).unwrap(), i(1));
        assert_eq!(b_ideal(&rint(2), &i(4), &i(4)).unwrap(), i(2));
        assert_eq!(b_ideal(&rint(1), &i(1), &i(2)).unwrap(), i(1));
        assert!(matches!(b_ideal(&rint(1), &i(3), &i(1)), Err(Error::NotASquare(_))));
    }

    #[test]
    fn cha_examples() {
        let sc = |n: i64| SquareClass::of(&rint(n)).unwrap();
        let empty = BTreeSet::new();
        assert_eq!(cha_case(&sc(1), &rint(3), &empty, Place::Prime(5), 4), LocalAlgebra::Split);
        // -1 nonsquare at 2; 1 is a norm; 2 in D_B -> division
        let db = places(&[2], true);
        assert_eq!(cha_case(&sc(-1), &rint(1), &db, Place::Prime(2), 4), LocalAlgebra::Division);
        // 3 is not a norm from Q_2(i) -> split when 2 | D_B
        assert_eq!(cha_case(&sc(-1), &rint(3), &db, Place::Prime(2), 4), LocalAlgebra::Split);
        assert_eq!(cha_case(&sc(1), &rint(1), &empty, Place::Infinity, 2), LocalAlgebra::Split);
        assert_eq!(cha_case(&sc(1), &rint(1), &empty, Place::Infinity, 4), LocalAlgebra::Division);
        assert_eq!(cha_case(&sc(1), &rint(-1), &empty, Place::Infinity, -2), LocalAlgebra::Split);
    }

    #[test]
    fn complement_index_examples() {
        assert_eq!(complement_index(4, &rint(1)), 3);
        assert_eq!(complement_index(0, &rint(-1)), 1);
        assert_eq!(complement_index(2, &rint(5)), 1);
    }

    #[test]
    fn trivial_class_detection() {
        assert!(is_trivial_class(&SquareClass::of(&rint(4)).unwrap()));
        let g = from_ints(&[&[2, 1, 0], &[1, 2, 0], &[0, 0, 1]]);
        let psi = QuadSpace::new(g).unwrap();
        assert_eq!(discriminant_class(&psi).unwrap().representative(), &(-3).into());
    }
}
