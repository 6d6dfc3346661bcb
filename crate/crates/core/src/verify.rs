//! Complement instances, identity checks, and seeded corpora.

use std::time::Instant;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::{even_order, order_discriminant, order_dual, quaternionize, CliffordAlg, CliffordElt, CliffordOrder, QuatStructure};
use crate::error::{Error, Result};
use crate::exactnum::{factor, fmt_rat, hilbert_symbol, rat, relevant_places, rint, squarefree_split, Place, Rat, RatIdeal, SquareClass};
use crate::invariants::{
    b_ideal, cha_case, complement_index, discriminant_class, quaternary_class, quaternary_disc_ideal, real_char_class,
    real_index, ternary_class, ternary_disc_ideal, LocalAlgebra, QuatClass,
};
use crate::linalg::{self, Mat};
use crate::maximality::{maximal_lattice, maximalize};
use crate::qspace::{
    complement_basis, dual, index_ideal, intersect_with_subspace, is_integral, pairing_ideal, Lattice, QuadSpace, Vector,
};

pub const CHECK_NAMES: [&str; 6] = ["theorem1", "lemma1", "lalw", "disc_formulas", "char_and_invariants", "equivariance"];

/// A quaternary space with an anisotropic `h` and everything derived from it.
#[derive(Debug, Clone)]
pub struct Instance {
    pub phi: QuadSpace,
    pub h: Vector,
    pub q: Rat,
    pub l: Lattice,
    /// Rows span `W = (Qh)^⊥` in `V` coordinates.
    pub w_basis: Mat,
    pub psi: QuadSpace,
    /// `L ∩ W` in `W` coordinates.
    pub lw: Lattice,
    pub m: Lattice,
    pub quat: QuatStructure,
    pub order: CliffordOrder,
    pub delta: SquareClass,
    pub q_phi: QuatClass,
    pub q_psi: QuatClass,
    pub d_psi: RatIdeal,
    pub a: RatIdeal,
    pub r: RatIdeal,
    pub c: RatIdeal,
    pub index_m_lw: RatIdeal,
    pub pairing: RatIdeal,
    pub disc_l: RatIdeal,
    pub disc_m: RatIdeal,
    pub b_q: Option<RatIdeal>,
}

/// Builds an instance. `L` is the maximalization of the supplied lattice,
/// or of the minimal integral scaling of `Z^4` when none is given.
pub fn build_instance(gram: Mat, h: Vector, lattice: Option<Lattice>) -> Result<Instance> {
    let phi = QuadSpace::new(gram)?;
    if phi.dim() != 4 {
        return Err(Error::UnsupportedDimension(phi.dim()));
    }
    if h.len() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: h.len() });
    }
    let q = phi.value(&h);
    if q.is_zero() {
        return Err(Error::IsotropicVector);
    }
    let l = match lattice {
        Some(l) => {
            if l.ambient_dim() != 4 || !l.is_full_rank() {
                return Err(Error::NotFullRank);
            }
            maximalize(&l, &phi)?
        }
        None => maximal_lattice(&phi)?,
    };
    let (w_basis, psi_gram) = complement_basis(&phi, &h)?;
    let psi = QuadSpace::new(psi_gram)?;
    let lw = intersect_with_subspace(&l, &w_basis);
    let m = maximalize(&lw, &psi)?;
    let quat = quaternionize(&psi)?;
    let order = even_order(&lw, &quat.host)?;
    let delta = discriminant_class(&phi)?;
    let q_phi = quaternary_class(&phi)?;
    let q_psi = ternary_class(&psi)?;
    let d_psi = q_psi.discriminant();
    let (a, r) = squarefree_split(&quat.xi_norm)?;
    let c = RatIdeal::from_factors(a.primes().filter(|&p| d_psi.valuation(p) == 0).map(|p| (p, 1)).collect());
    let index_m_lw = index_ideal(&m, &lw)?;
    let pairing = pairing_ideal(&h, &l, &phi)?;
    let disc_l = index_ideal(&dual(&l, &phi)?, &l)?;
    let disc_m = index_ideal(&dual(&m, &psi)?, &m)?;
    let b_q = b_ideal(&q, &disc_l, &disc_m).ok();
    Ok(Instance {
        phi,
        h,
        q,
        l,
        w_basis,
        psi,
        lw,
        m,
        quat,
        order,
        delta,
        q_phi,
        q_psi,
        d_psi,
        a,
        r,
        c,
        index_m_lw,
        pairing,
        disc_l,
        disc_m,
        b_q,
    })
}

/// One entry of a verification report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub lhs: String,
    pub rhs: String,
    pub millis: u64,
}

fn timed(name: &str, f: impl FnOnce() -> Result<(bool, String, String)>) -> CheckResult {
    let start = Instant::now();
    let (pass, lhs, rhs) = f().unwrap_or_else(|e| (false, format!("error: {e}"), String::new()));
    CheckResult { name: name.to_string(), pass, lhs, rhs, millis: start.elapsed().as_millis() as u64 }
}

/// Canonical rendering of a lattice as JSON rows of rational strings.
pub fn render_lattice(l: &Lattice) -> String {
    serde_json::to_string(&l.to_strings()).expect("strings serialize")
}

fn render_pairs(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

/// The two sides of `(L∩W)ξ = r c D_psi [M/L∩W] (õ ∩ A^+(W)°)`, in the
/// coordinates of `odd_part_basis`.
pub fn theorem1_sides(inst: &Instance) -> Result<(Lattice, Lattice)> {
    let gens = inst
        .lw
        .basis()
        .iter()
        .map(|x| inst.quat.odd_coords(&inst.quat.xi_map(x)))
        .collect::<Result<Vec<_>>>()?;
    let lhs = Lattice::from_generators(3, &gens);
    let od = order_dual(&inst.order, &inst.quat)?;
    let od_odd = intersect_with_subspace(&od, &inst.quat.odd_part_coords);
    let factor = inst.r.mul(&inst.c).mul(&inst.d_psi).mul(&inst.index_m_lw);
    Ok((lhs, od_odd.scale(&factor.generator())))
}

pub fn check_theorem1(inst: &Instance) -> CheckResult {
    timed("theorem1", || {
        let (lhs, rhs) = theorem1_sides(inst)?;
        let emb = &inst.quat.odd_part_coords;
        Ok((lhs == rhs, render_lattice(&lhs.map(emb)), render_lattice(&rhs.map(emb))))
    })
}

/// The three identities for `N ⊆ M` with `M` a maximalization of `N`.
pub fn lemma1_values(n: &Lattice, s: &QuadSpace) -> Result<[(RatIdeal, RatIdeal); 3]> {
    let m = maximalize(n, s)?;
    let quat = quaternionize(s)?;
    let on = even_order(n, &quat.host)?;
    let om = even_order(&m, &quat.host)?;
    let on_lat = on.even_lattice(&quat.host);
    let om_lat = om.even_lattice(&quat.host);
    let half = RatIdeal::from_int(2).inverse();
    let half_disc_n = half.mul(&index_ideal(&dual(n, s)?, n)?);
    Ok([
        (index_ideal(&om_lat, &on_lat)?, index_ideal(&m, n)?.pow(2)),
        (index_ideal(&order_dual(&on, &quat)?, &on_lat)?, half_disc_n.pow(2)),
        (order_discriminant(&on, &quat)?, half_disc_n),
    ])
}

pub fn check_lemma1(n: &Lattice, s: &QuadSpace) -> CheckResult {
    timed("lemma1", || {
        let v = lemma1_values(n, s)?;
        let pass = v.iter().all(|(a, b)| a == b);
        let lhs = render_pairs(&[("index", v[0].0.to_string()), ("dual", v[1].0.to_string()), ("disc", v[2].0.to_string())]);
        let rhs = render_pairs(&[("index", v[0].1.to_string()), ("dual", v[1].1.to_string()), ("disc", v[2].1.to_string())]);
        Ok((pass, lhs, rhs))
    })
}

/// Images of the basis words of `A(W)` inside `A(V)`.
fn word_embedding(alg_v: &CliffordAlg, w_basis: &Mat) -> Mat {
    let vs: Vec<CliffordElt> = w_basis.iter().map(|w| alg_v.from_vector(w)).collect();
    (0..1usize << vs.len())
        .map(|u| {
            let mut x = alg_v.one();
            for (i, v) in vs.iter().enumerate() {
                if u >> i & 1 == 1 {
                    x = alg_v.multiply(&x, v);
                }
            }
            x.coeffs
        })
        .collect()
}

/// `(A^+(L) ∩ A^+(W), A^+(L∩W))` inside `A(V)`.
pub fn lalw_sides(inst: &Instance) -> Result<(Lattice, Lattice)> {
    let alg_v = CliffordAlg::from_space(&inst.phi)?;
    let hv = alg_v.from_vector(&inst.h);
    let even = alg_v.even_embedding();
    let commutator: Mat = even
        .iter()
        .map(|b| {
            let b = CliffordElt { coeffs: b.clone() };
            alg_v.multiply(&b, &hv).sub(&alg_v.multiply(&hv, &b)).coeffs
        })
        .collect();
    let centralizer = linalg::mul(&linalg::left_kernel(&commutator), &even);
    let al = even_order(&inst.l, &alg_v)?;
    let lhs = intersect_with_subspace(&al.module, &centralizer).map(&centralizer);
    let rhs = inst.order.module.map(&word_embedding(&alg_v, &inst.w_basis));
    Ok((lhs, rhs))
}

pub fn check_lalw(inst: &Instance) -> CheckResult {
    timed("lalw", || {
        let (lhs, rhs) = lalw_sides(inst)?;
        Ok((lhs == rhs, render_lattice(&lhs), render_lattice(&rhs)))
    })
}

/// Measured and predicted values for (d4), (d3), (bq), (42) and (od).
pub fn disc_formula_values(inst: &Instance) -> Result<Vec<(&'static str, String, String)>> {
    let d4 = quaternary_disc_ideal(&inst.delta, &inst.q_phi);
    let d3 = ternary_disc_ideal(&inst.delta, &inst.q, &inst.d_psi)?;
    let q_ideal = RatIdeal::from_rat(&inst.q)?;
    let (bq_lhs, bq_rhs, f42) = match &inst.b_q {
        Some(b) => {
            let two_q_l = RatIdeal::from_int(2).mul(&q_ideal).mul(&inst.disc_l);
            (two_q_l.to_string(), b.pow(2).mul(&inst.disc_m).to_string(), b.div(&inst.pairing).to_string())
        }
        None => ("not a square".to_string(), String::new(), "undefined".to_string()),
    };
    let od = q_ideal.mul(&inst.disc_l).div(&inst.pairing.pow(2));
    let d_o = order_discriminant(&inst.order, &inst.quat)?;
    Ok(vec![
        ("d4", inst.disc_l.to_string(), d4.to_string()),
        ("d3", inst.disc_m.to_string(), d3.to_string()),
        ("bq", bq_lhs, bq_rhs),
        ("42", inst.index_m_lw.to_string(), f42),
        ("od", d_o.to_string(), od.to_string()),
    ])
}

pub fn check_disc_formulas(inst: &Instance) -> CheckResult {
    timed("disc_formulas", || {
        let v = disc_formula_values(inst)?;
        let pass = v.iter().all(|(_, a, b)| a == b);
        let lhs = render_pairs(&v.iter().map(|(k, a, _)| (*k, a.clone())).collect::<Vec<_>>());
        let rhs = render_pairs(&v.iter().map(|(k, _, b)| (*k, b.clone())).collect::<Vec<_>>());
        Ok((pass, lhs, rhs))
    })
}

fn render_ram(q: &QuatClass) -> String {
    let parts: Vec<String> = q.ram.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Places where (char), (ind), (cha) or the real classification disagree.
pub fn char_failures(inst: &Instance) -> Result<Vec<String>> {
    let delta = inst.delta.as_rat();
    let mut failures = Vec::new();
    let places = relevant_places(&[&inst.q_phi.a, &inst.q_phi.b, &inst.q_psi.a, &inst.q_psi.b, &delta, &inst.q])?;
    let s_phi = real_index(&inst.phi);
    let s_psi = real_index(&inst.psi);
    for &v in &places {
        if inst.q_phi.local_invariant(v) != inst.q_psi.local_invariant(v) * hilbert_symbol(&delta, &inst.q, v) {
            failures.push(format!("char@{v}"));
        }
        let cha_division = cha_case(&inst.delta, &inst.q, &inst.q_phi.ram, v, s_phi) == LocalAlgebra::Division;
        if cha_division != inst.q_psi.ram.contains(&v) {
            failures.push(format!("cha@{v}"));
        }
    }
    if complement_index(s_phi, &inst.q) != s_psi {
        failures.push("ind".to_string());
    }
    if (real_char_class(s_psi) == LocalAlgebra::Division) != inst.q_psi.ram.contains(&Place::Infinity) {
        failures.push("real".to_string());
    }
    Ok(failures)
}

pub fn check_char_and_invariants(inst: &Instance) -> CheckResult {
    timed("char_and_invariants", || {
        let failures = char_failures(inst)?;
        let lhs = render_pairs(&[
            ("ram_phi", render_ram(&inst.q_phi)),
            ("ram_psi", render_ram(&inst.q_psi)),
            ("s_phi", real_index(&inst.phi).to_string()),
            ("s_psi", real_index(&inst.psi).to_string()),
        ]);
        let rhs = if failures.is_empty() { "consistent".to_string() } else { failures.join(",") };
        Ok((failures.is_empty(), lhs, rhs))
    })
}

/// `(A^+((L∩W)τ(α)), α^{-1} A^+(L∩W) α)` and whether the transported lattice is integral.
pub fn equivariance_sides(inst: &Instance, alpha: &CliffordElt) -> Result<(CliffordOrder, CliffordOrder, bool)> {
    let host = &inst.quat.host;
    let moved = inst
        .lw
        .basis()
        .iter()
        .map(|x| {
            let y = inst.quat.tau_conjugate(alpha, &inst.quat.xi_map(x))?;
            inst.quat.xi_unmap(&y)
        })
        .collect::<Result<Vec<_>>>()?;
    let moved = Lattice::from_generators(3, &moved);
    let integral = is_integral(&moved, &inst.psi);
    let lhs = even_order(&moved, host)?;
    let rhs = inst.order.conjugate(host, alpha)?;
    Ok((lhs, rhs, integral))
}

pub fn check_equivariance(inst: &Instance, alpha: &CliffordElt) -> CheckResult {
    timed("equivariance", || {
        let (lhs, rhs, integral) = equivariance_sides(inst, alpha)?;
        Ok((integral && lhs == rhs, render_lattice(&lhs.module), render_lattice(&rhs.module)))
    })
}

/// Random invertible even element of `A^+(W)` with small integer coordinates.
pub fn random_alpha(rng: &mut impl Rng, quat: &QuatStructure) -> CliffordElt {
    loop {
        let v: Vec<Rat> = (0..4).map(|_| rint(rng.gen_range(-3..=3))).collect();
        let a = quat.host.from_even(&v);
        if !quat.nu_value(&a).is_zero() {
            return a;
        }
    }
}

/// Runs all six checks; the equivariance entry combines `alphas` random elements.
pub fn check_instance(inst: &Instance, rng: &mut impl Rng, alphas: usize) -> Vec<CheckResult> {
    let mut out = vec![
        check_theorem1(inst),
        lemma1_on_instance(inst),
        check_lalw(inst),
        check_disc_formulas(inst),
        check_char_and_invariants(inst),
    ];
    let start = Instant::now();
    let mut eq = CheckResult { name: "equivariance".into(), pass: true, lhs: String::new(), rhs: String::new(), millis: 0 };
    for _ in 0..alphas.max(1) {
        let alpha = random_alpha(rng, &inst.quat);
        let r = check_equivariance(inst, &alpha);
        if !r.pass || eq.lhs.is_empty() {
            eq.lhs = r.lhs;
            eq.rhs = r.rhs;
        }
        if !r.pass {
            eq.pass = false;
            break;
        }
    }
    eq.millis = start.elapsed().as_millis() as u64;
    out.push(eq);
    out
}

/// Lemma 1 with `N = L ∩ W` in the complement.
pub fn lemma1_on_instance(inst: &Instance) -> CheckResult {
    check_lemma1(&inst.lw, &inst.psi)
}

/// Corpus generation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusOptions {
    pub max_entry: i64,
    pub max_prime: u64,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions { max_entry: 6, max_prime: 97 }
    }
}

/// A corpus entry: Gram matrix, `h`, and optionally a starting lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub gram: Mat,
    pub h: Vector,
    pub lattice: Option<Mat>,
}

fn is_smooth(x: &Rat, max_prime: u64) -> bool {
    factor(x).map(|f| f.keys().all(|&p| p <= max_prime)).unwrap_or(false)
}

/// Random Gram matrix with integer diagonal and half-integer off-diagonal entries.
pub fn random_gram(rng: &mut impl Rng, n: usize, opts: &CorpusOptions) -> Mat {
    loop {
        let mut g = linalg::zeros(n, n);
        for i in 0..n {
            g[i][i] = rint(rng.gen_range(-opts.max_entry..=opts.max_entry));
            for j in 0..i {
                // sparse off-diagonals keep determinants small
                let k = if rng.gen_bool(0.5) { 0 } else { rng.gen_range(-opts.max_entry..=opts.max_entry) };
                g[i][j] = rat(k, 2);
                g[j][i] = rat(k, 2);
            }
        }
        let d = linalg::det(&linalg::scale_mat(&g, &rint(2)));
        if !d.is_zero() && is_smooth(&d, opts.max_prime) {
            return g;
        }
    }
}

fn random_h(rng: &mut impl Rng, g: &Mat) -> Vector {
    loop {
        let mut h: Vector = (0..g.len()).map(|_| rint(rng.gen_range(-3..=3))).collect();
        match rng.gen_range(0..6) {
            0 => h.iter_mut().for_each(|x| *x *= rint(2)),
            1 => h.iter_mut().for_each(|x| *x /= rint(2)),
            2 => h.iter_mut().for_each(|x| *x /= rint(3)),
            _ => {}
        }
        if !linalg::dot(&linalg::vec_mat(&h, g), &h).is_zero() {
            return h;
        }
    }
}

/// Deterministic quaternary corpus.
pub fn gen_corpus(seed: u64, count: usize, opts: &CorpusOptions) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let gram = random_gram(&mut rng, 4, opts);
            let h = random_h(&mut rng, &gram);
            CorpusEntry { gram, h, lattice: None }
        })
        .collect()
}

/// Deterministic corpus of ternary spaces with random integral lattices.
pub fn gen_ternary_corpus(seed: u64, count: usize, opts: &CorpusOptions) -> Vec<(QuadSpace, Lattice)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let s = QuadSpace::new(random_gram(&mut rng, 3, opts)).expect("nondegenerate by construction");
            let base = maximal_lattice(&s).expect("small corpus entries factor");
            loop {
                let t: Mat = (0..3).map(|_| (0..3).map(|_| rint(rng.gen_range(-2..=2))).collect()).collect();
                if linalg::det(&t).is_zero() {
                    continue;
                }
                let n = Lattice::from_generators(3, &linalg::mul(&t, &base.basis()));
                return (s, n.scale(&rint(rng.gen_range(1..=2))));
            }
        })
        .collect()
}

/// Per-instance outcome.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceResult {
    pub id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checks: Vec<CheckResult>,
}

impl InstanceResult {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportMeta {
    pub seed: Option<u64>,
    pub count: usize,
    pub version: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub meta: ReportMeta,
    pub results: Vec<InstanceResult>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(InstanceResult::pass)
    }
}

/// Builds and checks every entry in parallel; results are ordered by id.
pub fn run_corpus(entries: &[CorpusEntry], seed: u64, alphas: usize) -> Vec<InstanceResult> {
    entries
        .par_iter()
        .enumerate()
        .map(|(id, e)| {
            let lattice = e.lattice.as_ref().map(|b| Lattice::from_generators(4, b));
            match build_instance(e.gram.clone(), e.h.clone(), lattice) {
                Ok(inst) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (id as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
                    InstanceResult { id, error: None, checks: check_instance(&inst, &mut rng, alphas) }
                }
                Err(err) => InstanceResult { id, error: Some(err.to_string()), checks: Vec::new() },
            }
        })
        .collect()
}

/// Ideal rendered as its positive generator.
pub fn render_ideal(a: &RatIdeal) -> String {
    fmt_rat(&a.generator().abs())
}
