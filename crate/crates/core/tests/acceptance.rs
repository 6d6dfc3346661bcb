//! Acceptance suite: one PASS/FAIL line per criterion, exact arithmetic throughout.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use quadlat::clifford::{order_discriminant, CliffordElt};
use quadlat::exactnum::{hilbert_symbol, rat, relevant_places, rint, Place, Rat, RatIdeal};
use quadlat::invariants::{quaternary_class, quaternary_class_with, real_index};
use quadlat::linalg::{self, Mat};
use quadlat::qspace::{Lattice, QuadSpace, Vector};
use quadlat::verify::{
    build_instance, char_failures, check_disc_formulas, check_equivariance, check_lalw, check_lemma1, check_theorem1,
    gen_corpus, gen_ternary_corpus, random_alpha, theorem1_sides, CorpusOptions, Instance,
};

const CORPUS_SEED: u64 = 42;
const CORPUS_SIZE: usize = 200;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(results: &mut Vec<bool>, n: usize, label: &str, o: Outcome) {
    println!("criterion {n} [{label}] {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    results.push(o.pass);
}

fn count_pass<T: Sync>(items: &[T], f: impl Fn(&T) -> bool + Sync) -> usize {
    items.par_iter().filter(|x| f(x)).count()
}

fn criterion1(insts: &[Instance], build_time: Duration) -> Outcome {
    let start = Instant::now();
    let ok = count_pass(insts, |i| check_theorem1(i).pass);
    let elapsed = build_time + start.elapsed();
    let definite = insts.iter().filter(|i| real_index(&i.phi).abs() == 4).count();
    let q_neg = insts.iter().filter(|i| i.q.is_negative()).count();
    let h_out = insts.iter().filter(|i| !i.l.contains(&i.h)).count();
    let n = insts.len();
    let coverage = definite > 0 && definite < n && q_neg > 0 && q_neg < n && h_out > 0 && h_out < n;
    Outcome {
        pass: ok == n && n >= 200 && coverage && elapsed < Duration::from_secs(60),
        detail: format!(
            "{ok}/{n} instances, {:.1}s; definite {definite}, q<0 {q_neg}, h outside L {h_out}",
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion2() -> Outcome {
    let corpus = gen_ternary_corpus(2024, 100, &CorpusOptions::default());
    let ok = count_pass(&corpus, |(s, n)| check_lemma1(n, s).pass);
    Outcome { pass: ok == corpus.len() && ok >= 100, detail: format!("{ok}/{} ternary lattices", corpus.len()) }
}

fn criterion3(insts: &[Instance]) -> Outcome {
    let ok = count_pass(insts, |i| check_lalw(i).pass);
    Outcome { pass: ok == insts.len(), detail: format!("{ok}/{} instances", insts.len()) }
}

fn criterion4(insts: &[Instance]) -> Outcome {
    let failures: Vec<String> = insts
        .par_iter()
        .enumerate()
        .filter_map(|(id, i)| {
            let c = check_disc_formulas(i);
            (!c.pass).then(|| format!("#{id}: {} vs {}", c.lhs, c.rhs))
        })
        .collect();
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{}/{} instances (d4, d3, bq, 42, od) {}", insts.len() - failures.len(), insts.len(), failures.join("; ")),
    }
}

fn v(x: &[i64]) -> Vector {
    x.iter().map(|&a| rint(a)).collect()
}

/// `|det(2 B G B^T)|` as an ideal, computed directly from a basis.
fn det_oracle(basis: &Mat, gram: &Mat) -> RatIdeal {
    let two_g = linalg::scale_mat(&linalg::congruence(basis, gram), &rint(2));
    RatIdeal::from_rat(&linalg::det(&two_g)).unwrap()
}

fn criterion5() -> Outcome {
    let i4 = linalg::identity(4);
    let inst = build_instance(i4.clone(), v(&[0, 0, 0, 1]), None).unwrap();
    let mut failures = Vec::new();
    let mut expect = |ok: bool, what: &str| {
        if !ok {
            failures.push(what.to_string());
        }
    };

    let half = rat(1, 2);
    let l_basis: Mat = vec![
        vec![half.clone(), half.clone(), half.clone(), half.clone()],
        v(&[0, 1, 0, 0]),
        v(&[0, 0, 1, 0]),
        v(&[0, 0, 0, 1]),
    ];
    expect(inst.l == Lattice::from_generators(4, &l_basis), "L = Z^4 + Z(1/2,1/2,1/2,1/2)");
    expect(inst.disc_l == det_oracle(&l_basis, &i4) && inst.disc_l == RatIdeal::from_int(4), "[L~/L] = 4Z");
    let i3 = linalg::identity(3);
    expect(inst.m == Lattice::standard(3) && inst.lw == Lattice::standard(3), "M = L∩W = Z^3");
    expect(inst.disc_m == det_oracle(&i3, &i3) && inst.disc_m == RatIdeal::from_int(8), "[M~/M] = 8Z");
    expect(inst.d_psi == RatIdeal::from_int(2), "D_psi = 2Z");

    // Lipschitz-type order: Z{1, e1e2, e1e3, e2e3}, closed under products
    let host = &inst.quat.host;
    let words: Vec<CliffordElt> = [0usize, 3, 5, 6].iter().map(|&w| CliffordElt::basis_word(8, w)).collect();
    let lip = Lattice::from_generators(8, &words.iter().map(|w| w.coeffs.clone()).collect::<Vec<_>>());
    let closed = words.iter().all(|x| words.iter().all(|y| lip.contains(&host.multiply(x, y).coeffs)));
    expect(closed && inst.order.module == lip, "o = Lipschitz-type order");
    let nu: Mat = words
        .iter()
        .map(|x| {
            words
                .iter()
                .map(|y| {
                    let s = host.multiply(x, &host.involute(y)).add(&host.multiply(y, &host.involute(x)));
                    s.coeffs[0].clone()
                })
                .collect()
        })
        .collect();
    let disc_oracle = RatIdeal::from_rat(&linalg::det(&nu)).unwrap().sqrt().unwrap();
    let d_o = order_discriminant(&inst.order, &inst.quat).unwrap();
    expect(d_o == disc_oracle && d_o == RatIdeal::from_int(4), "d(o) = 4Z");

    let (lhs, rhs) = theorem1_sides(&inst).unwrap();
    let emb = &inst.quat.odd_part_coords;
    let expected = Lattice::from_generators(4, &[v(&[0, 1, 0, 0]), v(&[0, 0, 1, 0]), v(&[0, 0, 0, 1])]);
    expect(lhs.map(emb) == expected && rhs.map(emb) == expected, "both sides = Z{e1e2, e1e3, e2e3}");

    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            "L, [L~/L]=4, M=Z^3, [M~/M]=8, o Lipschitz, d(o)=4, D_psi=2, recovery sides equal".to_string()
        } else {
            format!("mismatch: {}", failures.join(", "))
        },
    }
}

const SMALL_PRIMES: [u64; 9] = [2, 3, 5, 7, 11, 13, 17, 19, 23];

/// Squarefree integer in the square class of `x`, by trial division.
fn squarefree_class(x: &Rat) -> i64 {
    let mut m = (x.numer() * x.denom()).to_i64().expect("small test values");
    let mut f = 2i64;
    while f * f <= m.abs() {
        while m % (f * f) == 0 {
            m /= f * f;
        }
        f += 1;
    }
    m
}

/// Whether `z^2 = a x^2 + b y^2` has a primitive solution modulo `p^k`,
/// searched digit by digit with one unit coordinate normalised to 1.
fn primitive_solution_mod(a: i64, b: i64, p: i64, k: u32) -> bool {
    let p = p as i128;
    let pk = p.pow(k);
    let (a, b) = ((a as i128).rem_euclid(pk), (b as i128).rem_euclid(pk));
    let f = |t: &[i128; 3], m: i128| (t[2] * t[2] % m - a % m * (t[0] * t[0] % m) % m - b % m * (t[1] * t[1] % m) % m).rem_euclid(m) == 0;
    fn dfs(t: [i128; 3], fixed: usize, level: u32, p: i128, k: u32, f: &dyn Fn(&[i128; 3], i128) -> bool) -> bool {
        if !f(&t, p.pow(level)) {
            return false;
        }
        if level == k {
            return true;
        }
        let step = p.pow(level);
        let free: Vec<usize> = (0..3).filter(|&i| i != fixed).collect();
        for d0 in 0..p {
            for d1 in 0..p {
                let mut u = t;
                u[free[0]] += d0 * step;
                u[free[1]] += d1 * step;
                if dfs(u, fixed, level + 1, p, k, f) {
                    return true;
                }
            }
        }
        false
    }
    for fixed in 0..3 {
        // coordinates before `fixed` are divisible by p, the fixed one is 1
        let free: Vec<usize> = (0..3).filter(|&i| i != fixed).collect();
        for d0 in 0..p {
            for d1 in 0..p {
                let mut t = [0i128; 3];
                t[fixed] = 1;
                t[free[0]] = d0;
                t[free[1]] = d1;
                if (0..fixed).any(|i| t[i] != 0) {
                    continue;
                }
                if dfs(t, fixed, 1, p, k, &f) {
                    return true;
                }
            }
        }
    }
    false
}

fn hilbert_oracle(a: &Rat, b: &Rat, v: Place) -> i32 {
    match v {
        Place::Infinity => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(p) => {
            if primitive_solution_mod(squarefree_class(a), squarefree_class(b), p as i64, 8) {
                1
            } else {
                -1
            }
        }
    }
}

fn random_small_rat(rng: &mut ChaCha8Rng) -> Rat {
    let mut num = 1i64;
    let mut den = 1i64;
    for _ in 0..rng.gen_range(0..=3) {
        let p = SMALL_PRIMES[rng.gen_range(0..SMALL_PRIMES.len())] as i64;
        if rng.gen_bool(0.75) {
            num *= p;
        } else {
            den *= p;
        }
    }
    let sign = if rng.gen_bool(0.5) { -1 } else { 1 };
    rat(sign * num * rng.gen_range(1..=6), den)
}

fn criterion6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pairs: Vec<(Rat, Rat)> = (0..1000).map(|_| (random_small_rat(&mut rng), random_small_rat(&mut rng))).collect();
    let mut places: Vec<Place> = SMALL_PRIMES.iter().map(|&p| Place::Prime(p)).collect();
    places.push(Place::Infinity);
    let mismatches: Vec<String> = pairs
        .par_iter()
        .flat_map_iter(|(a, b)| {
            places
                .iter()
                .filter(|&&v| hilbert_symbol(a, b, v) != hilbert_oracle(a, b, v))
                .map(|v| format!("({a},{b})_{v}"))
                .collect::<Vec<_>>()
        })
        .collect();
    let product_ok = pairs.iter().all(|(a, b)| {
        relevant_places(&[a, b]).unwrap().into_iter().map(|v| hilbert_symbol(a, b, v)).product::<i32>() == 1
    });
    let minus = pairs.iter().filter(|(a, b)| places.iter().any(|&v| hilbert_symbol(a, b, v) == -1)).count();
    Outcome {
        pass: mismatches.is_empty() && product_ok,
        detail: format!(
            "{} pairs x {} places, {} mismatches, {minus} pairs with a -1 symbol, product formula {}",
            pairs.len(),
            places.len(),
            mismatches.len(),
            if product_ok { "holds" } else { "violated" }
        ),
    }
}

fn criterion7(insts: &[Instance]) -> Outcome {
    let entries = gen_corpus(7, 50, &CorpusOptions::default());
    let h_failures = entries
        .par_iter()
        .enumerate()
        .filter(|(i, e)| {
            let s = QuadSpace::new(e.gram.clone()).unwrap();
            let base = quaternary_class(&s).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(700 + *i as u64);
            let mut tried = 0;
            while tried < 20 {
                let h: Vector = (0..4).map(|_| rint(rng.gen_range(-5..=5))).collect();
                if s.value(&h).is_zero() {
                    continue;
                }
                tried += 1;
                if quaternary_class_with(&s, &h).unwrap() != base {
                    return true;
                }
            }
            false
        })
        .count();
    let char_bad: Vec<String> = insts
        .par_iter()
        .enumerate()
        .filter_map(|(id, i)| {
            let f = char_failures(i).unwrap_or_else(|e| vec![e.to_string()]);
            (!f.is_empty()).then(|| format!("#{id}: {}", f.join(",")))
        })
        .collect();
    Outcome {
        pass: h_failures == 0 && char_bad.is_empty(),
        detail: format!(
            "h-independence {}/50 spaces x 20 h; char/ind/cha {}/{} instances {}",
            50 - h_failures,
            insts.len() - char_bad.len(),
            insts.len(),
            char_bad.join("; ")
        ),
    }
}

fn criterion8(insts: &[Instance]) -> Outcome {
    let subset = &insts[..50.min(insts.len())];
    let ok = subset
        .par_iter()
        .enumerate()
        .filter(|(id, inst)| {
            let mut rng = ChaCha8Rng::seed_from_u64(800 + *id as u64);
            (0..20).all(|_| check_equivariance(inst, &random_alpha(&mut rng, &inst.quat)).pass)
        })
        .count();
    Outcome { pass: ok == subset.len() && ok >= 50, detail: format!("{ok}/{} instances x 20 alpha", subset.len()) }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let entries = gen_corpus(CORPUS_SEED, CORPUS_SIZE, &CorpusOptions::default());
    let built: Vec<_> = entries.par_iter().map(|e| build_instance(e.gram.clone(), e.h.clone(), None)).collect();
    let build_time = start.elapsed();
    let build_errors = built.iter().filter(|b| b.is_err()).count();
    let insts: Vec<Instance> = built.into_iter().filter_map(Result::ok).collect();
    if build_errors > 0 {
        println!("corpus: {build_errors} of {CORPUS_SIZE} instances failed to build");
    }

    let mut results = Vec::new();
    report(&mut results, 1, "odd part recovers M", criterion1(&insts, build_time));
    report(&mut results, 2, "ternary order identity", criterion2());
    report(&mut results, 3, "centralizer of h", criterion3(&insts));
    report(&mut results, 4, "discriminant formulas", criterion4(&insts));
    report(&mut results, 5, "worked demo I4/e4", criterion5());
    report(&mut results, 6, "hilbert symbol", criterion6());
    report(&mut results, 7, "invariance suite", criterion7(&insts));
    report(&mut results, 8, "equivariance", criterion8(&insts));

    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed in {:.1}s", results.len(), start.elapsed().as_secs_f64());
    if passed == results.len() && build_errors == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
