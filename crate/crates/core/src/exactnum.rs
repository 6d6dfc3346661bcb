//! Rational numbers, factorisation, fractional ideals of `Z`, square classes
//! and the local symbols (Hilbert symbol, local squares, local norms).
//!
//! Every fractional ideal of `Z` is principal, so a [`RatIdeal`] is carried as
//! its signed-exponent factorisation; the positive generator is derived from it.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

/// Trial-division bound used by [`factor`].
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

pub fn fmt_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A place of `Q`: a rational prime or the real place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Prime(u64),
    Infinity,
}

impl Place {
    pub fn prime(p: u64) -> Result<Place> {
        if is_prime(p) {
            Ok(Place::Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Place::Prime(p) => s.serialize_u64(*p),
            Place::Infinity => s.serialize_str("inf"),
        }
    }
}

fn factor_positive_int(n: &BigInt, bound: u64, out: &mut BTreeMap<u64, i64>, sign: i64) -> Result<()> {
    debug_assert!(n.is_positive());
    let mut m = n.clone();
    let mut push = |p: u64, e: i64| {
        *out.entry(p).or_insert(0) += sign * e;
    };
    let mut d = 2u64;
    while d <= bound {
        let dd = BigInt::from(d);
        if &dd * &dd > m {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = m.div_rem(&dd);
            if !r.is_zero() {
                break;
            }
            m = q;
            e += 1;
        }
        if e > 0 {
            push(d, e);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > BigInt::one() {
        let b = BigInt::from(bound);
        // no divisor <= min(bound, sqrt(m)) remains
        if &b * &b < m && d > bound {
            return Err(Error::FactorBoundExceeded(m.to_string()));
        }
        let p = m.to_u64().ok_or_else(|| Error::FactorBoundExceeded(m.to_string()))?;
        push(p, 1);
    }
    Ok(())
}

/// Signed-exponent factorisation of `|x|`.
pub fn factor(x: &Rat) -> Result<BTreeMap<u64, i64>> {
    factor_with_bound(x, DEFAULT_FACTOR_BOUND)
}

pub fn factor_with_bound(x: &Rat, bound: u64) -> Result<BTreeMap<u64, i64>> {
    assert!(!x.is_zero(), "factor of zero");
    let mut out = BTreeMap::new();
    factor_positive_int(&x.numer().abs(), bound, &mut out, 1)?;
    factor_positive_int(&x.denom().abs(), bound, &mut out, -1)?;
    out.retain(|_, e| *e != 0);
    Ok(out)
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(x: &Rat, p: u64) -> i64 {
    assert!(!x.is_zero(), "valuation of zero");
    int_valuation(x.numer(), p) - int_valuation(x.denom(), p)
}

fn int_valuation(n: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut m = n.abs();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return e;
        }
        m = q;
        e += 1;
    }
}

/// Splits `x = p^v * u` and returns `(v, u)` with `u` a p-adic unit.
fn split_unit(x: &Rat, p: u64) -> (i64, Rat) {
    let v = valuation(x, p);
    let pp = Rat::from_integer(BigInt::from(p));
    let u = x / pow_rat(&pp, v);
    (v, u)
}

fn pow_rat(x: &Rat, e: i64) -> Rat {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// Residue of a p-unit rational modulo `m` (with `gcd(m, denominator) = 1`).
fn unit_residue(u: &Rat, m: u64) -> u64 {
    let m_big = BigInt::from(m);
    let n = u.numer().mod_floor(&m_big);
    let d = u.denom().mod_floor(&m_big);
    let dinv = d
        .modpow(&BigInt::from(totient_exponent(m)), &m_big)
        .mod_floor(&m_big);
    ((n * dinv) % &m_big).to_u64().unwrap()
}

// exponent e with d^e = d^{-1} mod m for units d; m is a prime or 8
fn totient_exponent(m: u64) -> u64 {
    if m == 8 {
        1
    } else {
        m - 2
    }
}

/// Legendre symbol of a p-unit modulo an odd prime p, via Euler's criterion.
fn legendre_unit(u: &Rat, p: u64) -> i32 {
    let r = unit_residue(u, p);
    let e = BigInt::from(r).modpow(&BigInt::from((p - 1) / 2), &BigInt::from(p));
    if e.is_one() {
        1
    } else {
        -1
    }
}

/// Hilbert symbol `(a, b)_v`.
pub fn hilbert_symbol(a: &Rat, b: &Rat, v: Place) -> i32 {
    assert!(!a.is_zero() && !b.is_zero(), "hilbert symbol of zero");
    match v {
        Place::Infinity => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (alpha, u) = split_unit(a, 2);
            let (beta, w) = split_unit(b, 2);
            let u = unit_residue(&u, 8);
            let w = unit_residue(&w, 8);
            let eps = |x: u64| ((x - 1) / 2) % 2;
            let omega = |x: u64| ((x * x - 1) / 8) % 2;
            let e = eps(u) * eps(w) + (alpha.rem_euclid(2) as u64) * omega(w) + (beta.rem_euclid(2) as u64) * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let (alpha, u) = split_unit(a, p);
            let (beta, w) = split_unit(b, p);
            let mut s = 1;
            if (alpha * beta).rem_euclid(2) == 1 && ((p - 1) / 2) % 2 == 1 {
                s = -s;
            }
            if beta.rem_euclid(2) == 1 {
                s *= legendre_unit(&u, p);
            }
            if alpha.rem_euclid(2) == 1 {
                s *= legendre_unit(&w, p);
            }
            s
        }
    }
}

/// Whether `a` is a square in `Q_v`.
pub fn is_local_square(a: &Rat, v: Place) -> bool {
    assert!(!a.is_zero());
    match v {
        Place::Infinity => a.is_positive(),
        Place::Prime(p) => {
            let (e, u) = split_unit(a, p);
            if e.rem_euclid(2) != 0 {
                return false;
            }
            if p == 2 {
                unit_residue(&u, 8) == 1
            } else {
                legendre_unit(&u, p) == 1
            }
        }
    }
}

/// Whether `q` is a norm from `Q_v(sqrt(delta))`.
pub fn is_local_norm(q: &Rat, delta: &Rat, v: Place) -> bool {
    is_local_square(delta, v) || hilbert_symbol(q, delta, v) == 1
}

/// Places at which a symbol built from the given rationals can be nontrivial:
/// the real place, 2, and every prime in a numerator or denominator.
pub fn relevant_places(values: &[&Rat]) -> Result<Vec<Place>> {
    let mut primes: std::collections::BTreeSet<u64> = [2u64].into_iter().collect();
    for x in values {
        primes.extend(factor(x)?.into_keys());
    }
    let mut out: Vec<Place> = primes.into_iter().map(Place::Prime).collect();
    out.push(Place::Infinity);
    Ok(out)
}

/// A fractional ideal of `Z`, i.e. `gZ` for a positive rational `g`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RatIdeal {
    factors: BTreeMap<u64, i64>,
}

impl RatIdeal {
    pub fn unit() -> RatIdeal {
        RatIdeal::default()
    }

    pub fn from_rat(x: &Rat) -> Result<RatIdeal> {
        Ok(RatIdeal { factors: factor(x)? })
    }

    pub fn from_int(n: i64) -> RatIdeal {
        RatIdeal::from_rat(&rint(n)).expect("small integers factor")
    }

    pub fn from_factors(factors: BTreeMap<u64, i64>) -> RatIdeal {
        let mut factors = factors;
        factors.retain(|_, e| *e != 0);
        RatIdeal { factors }
    }

    pub fn prime(p: u64) -> RatIdeal {
        RatIdeal::from_factors([(p, 1)].into_iter().collect())
    }

    pub fn factors(&self) -> &BTreeMap<u64, i64> {
        &self.factors
    }

    pub fn generator(&self) -> Rat {
        let mut g = Rat::one();
        for (&p, &e) in &self.factors {
            g *= pow_rat(&Rat::from_integer(BigInt::from(p)), e);
        }
        g
    }

    pub fn valuation(&self, p: u64) -> i64 {
        self.factors.get(&p).copied().unwrap_or(0)
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.factors.values().all(|&e| e >= 0)
    }

    pub fn is_squarefree_integral(&self) -> bool {
        self.factors.values().all(|&e| e == 1)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.keys().copied()
    }

    fn combine(&self, other: &RatIdeal, f: impl Fn(i64, i64) -> i64) -> RatIdeal {
        let mut out = BTreeMap::new();
        for &p in self.factors.keys().chain(other.factors.keys()) {
            out.insert(p, f(self.valuation(p), other.valuation(p)));
        }
        RatIdeal::from_factors(out)
    }

    pub fn mul(&self, other: &RatIdeal) -> RatIdeal {
        self.combine(other, |a, b| a + b)
    }

    pub fn div(&self, other: &RatIdeal) -> RatIdeal {
        self.combine(other, |a, b| a - b)
    }

    /// `a + b`, the gcd.
    pub fn sum(&self, other: &RatIdeal) -> RatIdeal {
        self.combine(other, i64::min)
    }

    /// `a ∩ b`, the lcm.
    pub fn intersect(&self, other: &RatIdeal) -> RatIdeal {
        self.combine(other, i64::max)
    }

    pub fn pow(&self, e: i64) -> RatIdeal {
        RatIdeal::from_factors(self.factors.iter().map(|(&p, &v)| (p, v * e)).collect())
    }

    pub fn inverse(&self) -> RatIdeal {
        self.pow(-1)
    }

    /// The ideal whose square is `self`.
    pub fn sqrt(&self) -> Result<RatIdeal> {
        if self.factors.values().any(|e| e % 2 != 0) {
            return Err(Error::NotASquare(self.to_string()));
        }
        Ok(RatIdeal::from_factors(self.factors.iter().map(|(&p, &e)| (p, e / 2)).collect()))
    }
}

impl fmt::Display for RatIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rat(&self.generator()))
    }
}

/// `xZ = a r^2` with `a` squarefree integral.
pub fn squarefree_split(x: &Rat) -> Result<(RatIdeal, RatIdeal)> {
    let f = factor(x)?;
    let a = f.iter().filter(|(_, e)| *e % 2 != 0).map(|(&p, _)| (p, 1)).collect();
    let r = f.iter().map(|(&p, &e)| (p, e.div_euclid(2))).collect();
    Ok((RatIdeal::from_factors(a), RatIdeal::from_factors(r)))
}

/// Class of a nonzero rational modulo squares, by its squarefree integer representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SquareClass(BigInt);

impl SquareClass {
    pub fn of(x: &Rat) -> Result<SquareClass> {
        let f = factor(x)?;
        let mut r = BigInt::one();
        for (p, e) in f {
            if e % 2 != 0 {
                r *= p;
            }
        }
        if x.is_negative() {
            r = -r;
        }
        Ok(SquareClass(r))
    }

    pub fn representative(&self) -> &BigInt {
        &self.0
    }

    pub fn as_rat(&self) -> Rat {
        Rat::from_integer(self.0.clone())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn sign(&self) -> Sign {
        self.0.sign()
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Whether a rational is the square of a rational.
pub fn is_rational_square(x: &Rat) -> bool {
    if x.is_negative() {
        return false;
    }
    if x.is_zero() {
        return true;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    &n * &n == *x.numer() && &d * &d == *x.denom()
}
