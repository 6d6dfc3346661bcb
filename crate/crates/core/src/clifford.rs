//! Clifford algebras of quadratic spaces of dimension at most 4, their
//! orders, and the quaternion structure of the even part in dimension 3.
//!
//! Basis words are bitmasks: bit `i` set means `e_{i+1}` occurs, and a word
//! denotes the product of its generators in increasing order.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{Int, Rat, RatIdeal};
use crate::invariants::orthogonalize;
use crate::linalg::{self, Mat};
use crate::qspace::{dual_wrt, index_ideal, intersect_with_subspace, is_integral_wrt, Lattice, QuadSpace, Vector};

/// Upper bound on closure rounds in [`generated_order`].
pub const CLOSURE_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CliffordElt {
    pub coeffs: Vec<Rat>,
}

impl CliffordElt {
    pub fn zero(dim: usize) -> CliffordElt {
        CliffordElt { coeffs: vec![Rat::zero(); dim] }
    }

    pub fn basis_word(dim: usize, w: usize) -> CliffordElt {
        let mut x = CliffordElt::zero(dim);
        x.coeffs[w] = Rat::one();
        x
    }

    pub fn add(&self, other: &CliffordElt) -> CliffordElt {
        CliffordElt { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &CliffordElt) -> CliffordElt {
        CliffordElt { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Rat) -> CliffordElt {
        CliffordElt { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scalar(&self) -> &Rat {
        &self.coeffs[0]
    }

    pub fn is_scalar(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(w, c)| c.is_zero() || w.count_ones() % 2 == 0)
    }
}

type Sparse = Vec<(usize, Rat)>;

/// `A(V)` for `V` with the given Gram matrix.
#[derive(Debug, Clone)]
pub struct CliffordAlg {
    n: usize,
    gram: Mat,
    table: Vec<Vec<Sparse>>,
    involution: Vec<Sparse>,
}

fn sparse(x: &[Rat]) -> Sparse {
    x.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(w, c)| (w, c.clone())).collect()
}

impl CliffordAlg {
    pub fn new(gram: &Mat) -> Result<CliffordAlg> {
        let n = gram.len();
        if n == 0 || n > 4 {
            return Err(Error::UnsupportedDimension(n));
        }
        if !linalg::is_symmetric(gram) {
            return Err(Error::NotSymmetric);
        }
        let mut alg = CliffordAlg { n, gram: gram.clone(), table: Vec::new(), involution: Vec::new() };
        let dim = 1 << n;
        alg.table = (0..dim)
            .map(|a| {
                (0..dim)
                    .map(|b| {
                        let mut x = CliffordElt::basis_word(dim, a).coeffs;
                        for j in (0..n).filter(|j| b >> j & 1 == 1) {
                            x = alg.times_gen(&x, j);
                        }
                        sparse(&x)
                    })
                    .collect()
            })
            .collect();
        alg.involution = (0..dim)
            .map(|a| {
                let mut x = CliffordElt::basis_word(dim, 0).coeffs;
                for j in (0..n).rev().filter(|j| a >> j & 1 == 1) {
                    x = alg.times_gen(&x, j);
                }
                sparse(&x)
            })
            .collect();
        Ok(alg)
    }

    pub fn from_space(s: &QuadSpace) -> Result<CliffordAlg> {
        CliffordAlg::new(s.gram())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    /// `w e_j` for a basis word `w`, via `e_t e_j = -e_j e_t + 2 B(e_t, e_j)`.
    fn word_times_gen(&self, w: usize, j: usize) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dim()];
        if w == 0 {
            out[1 << j] = Rat::one();
            return out;
        }
        let top = usize::BITS as usize - 1 - w.leading_zeros() as usize;
        let rest = w ^ (1 << top);
        if j > top {
            out[w | 1 << j] = Rat::one();
        } else if j == top {
            out[rest] = self.gram[j][j].clone();
        } else {
            for (u, c) in self.word_times_gen(rest, j).into_iter().enumerate() {
                if !c.is_zero() {
                    out[u | 1 << top] -= c;
                }
            }
            out[rest] += &self.gram[top][j] * Rat::from_integer(2.into());
        }
        out
    }

    fn times_gen(&self, x: &[Rat], j: usize) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dim()];
        for (w, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (u, d) in self.word_times_gen(w, j).into_iter().enumerate() {
                if !d.is_zero() {
                    out[u] += c * d;
                }
            }
        }
        out
    }

    pub fn one(&self) -> CliffordElt {
        CliffordElt::basis_word(self.dim(), 0)
    }

    pub fn zero(&self) -> CliffordElt {
        CliffordElt::zero(self.dim())
    }

    pub fn scalar(&self, c: &Rat) -> CliffordElt {
        self.one().scale(c)
    }

    pub fn gen(&self, i: usize) -> CliffordElt {
        CliffordElt::basis_word(self.dim(), 1 << i)
    }

    /// `sum v_i e_i`.
    pub fn from_vector(&self, v: &[Rat]) -> CliffordElt {
        assert_eq!(v.len(), self.n);
        let mut x = self.zero();
        for (i, c) in v.iter().enumerate() {
            x.coeffs[1 << i] = c.clone();
        }
        x
    }

    pub fn multiply(&self, x: &CliffordElt, y: &CliffordElt) -> CliffordElt {
        let mut out = self.zero();
        for (a, ca) in x.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in y.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let f = ca * cb;
                for (w, c) in &self.table[a][b] {
                    out.coeffs[*w] += &f * c;
                }
            }
        }
        out
    }

    pub fn involute(&self, x: &CliffordElt) -> CliffordElt {
        let mut out = self.zero();
        for (a, ca) in x.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (w, c) in &self.involution[a] {
                out.coeffs[*w] += ca * c;
            }
        }
        out
    }

    /// `x x*`.
    pub fn norm(&self, x: &CliffordElt) -> CliffordElt {
        self.multiply(x, &self.involute(x))
    }

    /// `x^{-1} = x*/(x x*)` when `x x*` is a nonzero scalar.
    pub fn inverse(&self, x: &CliffordElt) -> Result<CliffordElt> {
        let nx = self.norm(x);
        if !nx.is_scalar() || nx.scalar().is_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(self.involute(x).scale(&nx.scalar().recip()))
    }

    pub fn even_masks(&self) -> Vec<usize> {
        (0..self.dim()).filter(|w| w.count_ones() % 2 == 0).collect()
    }

    /// Rows are the unit vectors of the even basis words, in full coordinates.
    pub fn even_embedding(&self) -> Mat {
        self.even_masks().into_iter().map(|w| CliffordElt::basis_word(self.dim(), w).coeffs).collect()
    }

    pub fn to_even(&self, x: &CliffordElt) -> Vector {
        self.even_masks().into_iter().map(|w| x.coeffs[w].clone()).collect()
    }

    pub fn from_even(&self, v: &[Rat]) -> CliffordElt {
        let mut x = self.zero();
        for (w, c) in self.even_masks().into_iter().zip(v) {
            x.coeffs[w] = c.clone();
        }
        x
    }

    /// Regular-representation trace of right multiplication by `x`.
    pub fn regular_trace(&self, x: &CliffordElt) -> Rat {
        (0..self.dim()).map(|w| self.multiply(&CliffordElt::basis_word(self.dim(), w), x).coeffs[w].clone()).sum()
    }
}

/// A `Z`-module of Clifford elements closed under multiplication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordOrder {
    pub module: Lattice,
    pub contains_one: bool,
}

impl CliffordOrder {
    pub fn rank(&self) -> usize {
        self.module.rank()
    }

    pub fn elements(&self) -> Vec<CliffordElt> {
        self.module.basis().into_iter().map(|coeffs| CliffordElt { coeffs }).collect()
    }

    /// The module in the coordinates of the even basis words.
    pub fn even_lattice(&self, alg: &CliffordAlg) -> Lattice {
        intersect_with_subspace(&self.module, &alg.even_embedding())
    }

    pub fn is_closed(&self, alg: &CliffordAlg) -> bool {
        let els = self.elements();
        els.iter().all(|x| els.iter().all(|y| self.module.contains(&alg.multiply(x, y).coeffs)))
    }

    /// `a^{-1} O a`.
    pub fn conjugate(&self, alg: &CliffordAlg, a: &CliffordElt) -> Result<CliffordOrder> {
        let inv = alg.inverse(a)?;
        let gens: Mat = self.elements().iter().map(|x| alg.multiply(&alg.multiply(&inv, x), a).coeffs).collect();
        Ok(CliffordOrder { module: Lattice::from_generators(alg.dim(), &gens), contains_one: self.contains_one })
    }
}

/// The subring `A(N)` generated by `Z` and `N`.
pub fn generated_order(n_lat: &Lattice, alg: &CliffordAlg) -> Result<CliffordOrder> {
    if n_lat.ambient_dim() != alg.n() {
        return Err(Error::DimensionMismatch { expected: alg.n(), got: n_lat.ambient_dim() });
    }
    if !is_integral_wrt(n_lat, alg.gram()) {
        return Err(Error::NotIntegral);
    }
    let gens: Vec<CliffordElt> = n_lat.basis().iter().map(|v| alg.from_vector(v)).collect();
    let mut start: Mat = vec![alg.one().coeffs];
    start.extend(gens.iter().map(|g| g.coeffs.clone()));
    let mut module = Lattice::from_generators(alg.dim(), &start);
    for _ in 0..CLOSURE_CAP {
        let basis: Vec<CliffordElt> = module.basis().into_iter().map(|coeffs| CliffordElt { coeffs }).collect();
        let mut all: Mat = basis.iter().map(|b| b.coeffs.clone()).collect();
        for b in &basis {
            for g in &gens {
                all.push(alg.multiply(b, g).coeffs);
            }
        }
        let next = Lattice::from_generators(alg.dim(), &all);
        if next == module {
            return Ok(CliffordOrder { module, contains_one: true });
        }
        module = next;
    }
    Err(Error::ClosureDiverged(CLOSURE_CAP))
}

/// `A^+(N) = A^+(V) ∩ A(N)`.
pub fn even_order(n_lat: &Lattice, alg: &CliffordAlg) -> Result<CliffordOrder> {
    let full = generated_order(n_lat, alg)?;
    let emb = alg.even_embedding();
    let even = intersect_with_subspace(&full.module, &emb);
    Ok(CliffordOrder { module: even.map(&emb), contains_one: true })
}

/// Quaternion structure of `A^+(W)` for a ternary space `W`.
#[derive(Debug, Clone)]
pub struct QuatStructure {
    pub host: CliffordAlg,
    pub xi: CliffordElt,
    pub xi_norm: Rat,
    pub even_basis: Vec<CliffordElt>,
    /// Spans `A^+(W)°`; also given in even coordinates by `odd_part_coords`.
    pub odd_part_basis: Vec<CliffordElt>,
    pub odd_part_coords: Mat,
    pub nu_gram: Mat,
}

pub fn quaternionize(psi: &QuadSpace) -> Result<QuatStructure> {
    if psi.dim() != 3 {
        return Err(Error::UnsupportedDimension(psi.dim()));
    }
    let host = CliffordAlg::from_space(psi)?;
    let (p, diag) = orthogonalize(psi.gram());
    let ks: Vec<CliffordElt> = p.iter().map(|r| host.from_vector(r)).collect();
    let xi = host.multiply(&host.multiply(&ks[0], &ks[1]), &ks[2]);
    let xi_norm: Rat = diag.iter().product();
    let even_basis: Vec<CliffordElt> =
        host.even_masks().into_iter().map(|w| CliffordElt::basis_word(host.dim(), w)).collect();
    let trace_rows: Mat = even_basis.iter().map(|b| host.to_even(&b.add(&host.involute(b)))).collect();
    let (ints, _) = linalg::clear_denominators(&trace_rows);
    let odd_part_coords: Mat = linalg::integer_left_kernel(&ints, 4)
        .iter()
        .map(|c| c.iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect();
    let odd_part_basis = odd_part_coords.iter().map(|v| host.from_even(v)).collect();
    let nu_gram = (0..4)
        .map(|i| (0..4).map(|j| nu(&host, &even_basis[i], &even_basis[j])).collect())
        .collect();
    Ok(QuatStructure { host, xi, xi_norm, even_basis, odd_part_basis, odd_part_coords, nu_gram })
}

/// `nu(x, y)` with `2 nu(x, y) = x y* + y x*`.
pub fn nu(alg: &CliffordAlg, x: &CliffordElt, y: &CliffordElt) -> Rat {
    let s = alg.multiply(x, &alg.involute(y)).add(&alg.multiply(y, &alg.involute(x)));
    debug_assert!(s.is_scalar());
    s.scalar() / Rat::from_integer(2.into())
}

impl QuatStructure {
    pub fn nu_value(&self, x: &CliffordElt) -> Rat {
        nu(&self.host, x, x)
    }

    pub fn to_even(&self, x: &CliffordElt) -> Vector {
        self.host.to_even(x)
    }

    /// Coordinates of `x ∈ A^+(W)°` in `odd_part_basis`.
    pub fn odd_coords(&self, x: &CliffordElt) -> Result<Vector> {
        if !x.is_even() || !self.host.involute(x).add(x).is_zero() {
            return Err(Error::NotInOddPart);
        }
        linalg::solve_left(&self.odd_part_coords, &self.to_even(x)).ok_or(Error::NotInOddPart)
    }

    /// `x -> x xi` for `x` in `W` coordinates.
    pub fn xi_map(&self, x: &[Rat]) -> CliffordElt {
        self.host.multiply(&self.host.from_vector(x), &self.xi)
    }

    /// Inverse of [`QuatStructure::xi_map`].
    pub fn xi_unmap(&self, y: &CliffordElt) -> Result<Vector> {
        if !y.is_even() || !self.host.involute(y).add(y).is_zero() {
            return Err(Error::NotInOddPart);
        }
        let xi_inv = self.host.involute(&self.xi).scale(&self.xi_norm.recip());
        let x = self.host.multiply(y, &xi_inv);
        Ok((0..3).map(|i| x.coeffs[1 << i].clone()).collect())
    }

    /// `x^{tau(alpha)} = alpha^{-1} x alpha`.
    pub fn tau_conjugate(&self, alpha: &CliffordElt, x: &CliffordElt) -> Result<CliffordElt> {
        tau_conjugate(&self.host, alpha, x)
    }
}

pub fn tau_conjugate(alg: &CliffordAlg, alpha: &CliffordElt, x: &CliffordElt) -> Result<CliffordElt> {
    let inv = alg.inverse(alpha)?;
    Ok(alg.multiply(&alg.multiply(&inv, x), alpha))
}

/// `õ = {x ∈ A^+(W) : 2 nu(x, o) ⊆ Z}` in even coordinates.
pub fn order_dual(o: &CliffordOrder, q: &QuatStructure) -> Result<Lattice> {
    let lat = o.even_lattice(&q.host);
    if lat.rank() != 4 {
        return Err(Error::NotFullRank);
    }
    dual_wrt(&lat, &q.nu_gram)
}

/// `d(o)` with `[õ/o] = d(o)^2`.
pub fn order_discriminant(o: &CliffordOrder, q: &QuatStructure) -> Result<RatIdeal> {
    let d = order_dual(o, q)?;
    index_ideal(&d, &o.even_lattice(&q.host))?.sqrt()
}

/// Integer coordinates helper for tests and reports.
pub fn int_vector(v: &[i64]) -> Vector {
    v.iter().map(|&x| Rat::from_integer(Int::from(x))).collect()
}
