//! Quadratic spaces over `Q` and lattices in them.
//!
//! A [`Lattice`] is any finitely generated `Z`-submodule of `Q^m`, kept in a
//! canonical form (minimal common denominator plus integer row HNF), so two
//! lattices are equal exactly when their canonical forms are. Full-rank
//! lattices in a [`QuadSpace`] are the main case; lower-rank modules show up
//! for Clifford orders inside a larger algebra.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{fmt_rat, Int, Rat, RatIdeal};
use crate::linalg::{self, Mat};

pub type Vector = Vec<Rat>;

/// `(V, phi)` with `V = Q^n` and `phi(x, y) = x G y^T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadSpace {
    gram: Mat,
}

impl QuadSpace {
    pub fn new(gram: Mat) -> Result<QuadSpace> {
        let n = gram.len();
        if n == 0 || n > 4 {
            return Err(Error::UnsupportedDimension(n));
        }
        if let Some(bad) = gram.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.len() });
        }
        if !linalg::is_symmetric(&gram) {
            return Err(Error::NotSymmetric);
        }
        if linalg::det(&gram).is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(QuadSpace { gram })
    }

    pub fn diagonal(d: &[Rat]) -> Result<QuadSpace> {
        QuadSpace::new(linalg::diagonal(d))
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn bilinear(&self, x: &[Rat], y: &[Rat]) -> Rat {
        linalg::dot(&linalg::vec_mat(x, &self.gram), y)
    }

    pub fn value(&self, x: &[Rat]) -> Rat {
        self.bilinear(x, x)
    }

    pub fn det(&self) -> Rat {
        linalg::det(&self.gram)
    }

    /// Gram matrix of a family of vectors.
    pub fn gram_of(&self, basis: &Mat) -> Mat {
        linalg::congruence(basis, &self.gram)
    }
}

/// Canonical form of a finitely generated `Z`-module in `Q^m`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    ambient: usize,
    denom: Int,
    rows: Vec<Vec<Int>>,
}

impl Lattice {
    pub fn from_generators(ambient: usize, gens: &[Vector]) -> Lattice {
        let nonzero: Mat = gens.iter().filter(|g| g.iter().any(|x| !x.is_zero())).cloned().collect();
        if nonzero.is_empty() {
            return Lattice { ambient, denom: Int::one(), rows: Vec::new() };
        }
        debug_assert!(nonzero.iter().all(|g| g.len() == ambient));
        let (ints, d) = linalg::clear_denominators(&nonzero);
        Lattice::from_scaled_ints(ambient, linalg::hnf(ints), d)
    }

    fn from_scaled_ints(ambient: usize, rows: Vec<Vec<Int>>, denom: Int) -> Lattice {
        let content = rows.iter().flatten().fold(Int::zero(), |g, x| g.gcd(x));
        let g = content.gcd(&denom);
        let (rows, denom) = if g.is_one() || g.is_zero() {
            (rows, denom)
        } else {
            (rows.into_iter().map(|r| r.into_iter().map(|x| x / &g).collect()).collect(), denom / &g)
        };
        Lattice { ambient, denom, rows }
    }

    /// `Z^n`.
    pub fn standard(n: usize) -> Lattice {
        Lattice::from_generators(n, &linalg::identity(n))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.ambient
    }

    pub fn denominator(&self) -> &Int {
        &self.denom
    }

    pub fn hnf_rows(&self) -> &[Vec<Int>] {
        &self.rows
    }

    /// Canonical basis rows as rationals.
    pub fn basis(&self) -> Mat {
        let d = Rat::from_integer(self.denom.clone());
        self.rows
            .iter()
            .map(|r| r.iter().map(|x| Rat::from_integer(x.clone()) / &d).collect())
            .collect()
    }

    /// Determinant of the basis (full rank only), always positive.
    pub fn det(&self) -> Rat {
        assert!(self.is_full_rank(), "det of a non-full-rank lattice");
        let num: Int = (0..self.ambient).map(|i| self.rows[i][i].clone()).product();
        Rat::new(num, num_traits::pow(self.denom.clone(), self.ambient))
    }

    /// Integer coordinates of `x` in the canonical basis, if `x` is in the lattice.
    pub fn coordinates(&self, x: &[Rat]) -> Option<Vec<Int>> {
        if self.rows.is_empty() {
            return x.iter().all(Zero::is_zero).then(Vec::new);
        }
        let y = linalg::solve_left(&self.basis(), x)?;
        y.iter().all(|c| c.is_integer()).then(|| y.into_iter().map(|c| c.to_integer()).collect())
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.coordinates(x).is_some()
    }

    pub fn is_sublattice_of(&self, other: &Lattice) -> bool {
        self.basis().iter().all(|b| other.contains(b))
    }

    pub fn scale(&self, c: &Rat) -> Lattice {
        let b = linalg::scale_mat(&self.basis(), c);
        Lattice::from_generators(self.ambient, &b)
    }

    pub fn scale_ideal(&self, a: &RatIdeal) -> Lattice {
        self.scale(&a.generator())
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        let mut g = self.basis();
        g.extend(other.basis());
        Lattice::from_generators(self.ambient, &g)
    }

    pub fn add_vector(&self, v: &[Rat]) -> Lattice {
        let mut g = self.basis();
        g.push(v.to_vec());
        Lattice::from_generators(self.ambient, &g)
    }

    /// `L1 ∩ L2` via the integer kernel of `[B1; -B2]`.
    pub fn intersect(&self, other: &Lattice) -> Lattice {
        let b1 = self.basis();
        let b2 = other.basis();
        let mut stacked = b1.clone();
        stacked.extend(b2.iter().map(|r| r.iter().map(|x| -x).collect::<Vector>()));
        if stacked.is_empty() {
            return Lattice::from_generators(self.ambient, &[]);
        }
        let (ints, _) = linalg::clear_denominators(&stacked);
        let ker = linalg::integer_left_kernel(&ints, self.ambient);
        let gens: Mat = ker
            .iter()
            .map(|c| {
                let coeffs: Vector = c[..b1.len()].iter().map(|x| Rat::from_integer(x.clone())).collect();
                linalg::vec_mat(&coeffs, &b1)
            })
            .collect();
        Lattice::from_generators(self.ambient, &gens)
    }

    /// Image under `x -> x A` (A is `ambient x m`).
    pub fn map(&self, a: &Mat) -> Lattice {
        let m = a.first().map_or(0, |r| r.len());
        Lattice::from_generators(m, &linalg::mul(&self.basis(), a))
    }

    /// Rows as rational strings, for reports.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.basis().iter().map(|r| r.iter().map(fmt_rat).collect()).collect()
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(1/{} * {:?})", self.denom, self.rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
    }
}

/// `{x : 2 B(x, y) in Z for all y in L}` for a full-rank `L` and Gram `gram`.
pub fn dual_wrt(l: &Lattice, gram: &Mat) -> Result<Lattice> {
    if !l.is_full_rank() {
        return Err(Error::NotFullRank);
    }
    let b = l.basis();
    let two_g = linalg::scale_mat(&linalg::congruence(&b, gram), &Rat::from_integer(BigInt::from(2)));
    let inv = linalg::inverse(&two_g).ok_or(Error::Degenerate)?;
    Ok(Lattice::from_generators(l.ambient_dim(), &linalg::mul(&inv, &b)))
}

/// The dual lattice `L~`.
pub fn dual(l: &Lattice, s: &QuadSpace) -> Result<Lattice> {
    check_ambient(l, s)?;
    dual_wrt(l, s.gram())
}

fn check_ambient(l: &Lattice, s: &QuadSpace) -> Result<()> {
    if l.ambient_dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), got: l.ambient_dim() });
    }
    Ok(())
}

/// Whether `phi[L] ⊆ Z`, decided on a basis.
pub fn is_integral_wrt(l: &Lattice, gram: &Mat) -> bool {
    let g = linalg::congruence(&l.basis(), gram);
    let two = Rat::from_integer(BigInt::from(2));
    (0..g.len()).all(|i| g[i][i].is_integer() && (0..i).all(|j| (&g[i][j] * &two).is_integer()))
}

pub fn is_integral(l: &Lattice, s: &QuadSpace) -> bool {
    l.ambient_dim() == s.dim() && is_integral_wrt(l, s.gram())
}

/// `[L/M] = |det(M)/det(L)| Z` for full-rank `L`, `M`.
pub fn index_ideal(l: &Lattice, m: &Lattice) -> Result<RatIdeal> {
    if !l.is_full_rank() || !m.is_full_rank() {
        return Err(Error::NotFullRank);
    }
    RatIdeal::from_rat(&(m.det() / l.det()))
}

/// Basis of `W = (Qh)^⊥` (the `Z`-saturated kernel of `x -> phi(x, h)`, in HNF)
/// and the Gram matrix of the restricted form.
pub fn complement_basis(s: &QuadSpace, h: &[Rat]) -> Result<(Mat, Mat)> {
    if h.len() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), got: h.len() });
    }
    if s.value(h).is_zero() {
        return Err(Error::IsotropicVector);
    }
    let col: Mat = linalg::mul(s.gram(), &linalg::transpose(&vec![h.to_vec()]));
    let (ints, _) = linalg::clear_denominators(&col);
    let ker = linalg::integer_left_kernel(&ints, 1);
    let w: Mat = ker.iter().map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect();
    let psi = s.gram_of(&w);
    Ok((w, psi))
}

/// `{x in L : x in span(W)}` in coordinates with respect to the rows of `w_basis`.
pub fn intersect_with_subspace(l: &Lattice, w_basis: &Mat) -> Lattice {
    let r = w_basis.len();
    let b = l.basis();
    if b.is_empty() {
        return Lattice::from_generators(r, &[]);
    }
    let ann = linalg::right_kernel(w_basis, l.ambient_dim());
    let kernel_gens: Vec<Vec<Int>> = if ann.is_empty() {
        (0..b.len())
            .map(|i| (0..b.len()).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
            .collect()
    } else {
        let a = linalg::mul(&b, &linalg::transpose(&ann));
        let (ints, _) = linalg::clear_denominators(&a);
        linalg::integer_left_kernel(&ints, ann.len())
    };
    let gens: Mat = kernel_gens
        .iter()
        .map(|c| {
            let coeffs: Vector = c.iter().map(|x| Rat::from_integer(x.clone())).collect();
            let x = linalg::vec_mat(&coeffs, &b);
            linalg::solve_left(w_basis, &x).expect("kernel vector lies in the subspace")
        })
        .collect();
    Lattice::from_generators(r, &gens)
}

/// The ideal generated by `2 phi(h, b_i)` over a basis of `L`.
pub fn pairing_ideal(h: &[Rat], l: &Lattice, s: &QuadSpace) -> Result<RatIdeal> {
    check_ambient(l, s)?;
    let two = Rat::from_integer(BigInt::from(2));
    let vals: Vec<Rat> = l.basis().iter().map(|b| s.bilinear(h, b) * &two).filter(|v| !v.is_zero()).collect();
    if vals.is_empty() {
        return Err(Error::ZeroPairing);
    }
    let num = vals.iter().fold(Int::zero(), |g, v| g.gcd(v.numer()));
    let den = vals.iter().fold(Int::one(), |d, v| d.lcm(v.denom()));
    RatIdeal::from_rat(&Rat::new(num.abs(), den))
}
