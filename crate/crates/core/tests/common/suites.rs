//! Seeded identity suites. Each runs `cases` cases per variety on ranks 2
//! and 3 with degrees at most 4, and returns the number of cases checked.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tangentia::envelope::{env_apply, env_mul, left_mul, right_mul};
use tangentia::morphism::{compose, compose_truncated, group_commutator, ia_level, tangent, truncated_inverse};
use tangentia::{
    fox_derivative, Derivation, Element, Endomorphism, FiltrationLevel, JacobianMatrix, Variety, VarietyKind,
};

use super::*;

type Case = Result<(), String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Case {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn run_cases(name: &str, cases: u32, seed: u8, f: impl Fn(&mut ChaCha8Rng, Variety) -> Case) -> Result<usize, String> {
    let mut total = 0;
    for (k, kind) in all_kinds().into_iter().enumerate() {
        let mut runner = runner(cases, seed.wrapping_add(k as u8));
        runner
            .run(&(any::<u64>(), 2usize..=3), |(s, n)| {
                let v = variety(kind, n);
                f(&mut rng(s), v).map_err(TestCaseError::fail)
            })
            .map_err(|e| format!("{name} over {kind:?}: {e}"))?;
        total += cases as usize;
    }
    Ok(total)
}

fn random_endo(v: Variety, r: &mut ChaCha8Rng) -> Endomorphism {
    let images = (0..v.rank()).map(|_| random_element(v, 1, 2, 3, r)).collect();
    Endomorphism::new(v, images).unwrap()
}

/// `J(phi ∘ psi) = phi(J(psi)) · J(phi)`.
pub fn chain_rule(cases: u32) -> Result<usize, String> {
    run_cases("chain rule", cases, 1, |r, v| {
        let phi = random_endo(v, r);
        let psi = random_endo(v, r);
        let lhs = compose(&phi, &psi).unwrap().jacobian().unwrap();
        let rhs = psi
            .jacobian()
            .unwrap()
            .induced(phi.images())
            .unwrap()
            .checked_mul(&phi.jacobian().unwrap())
            .unwrap();
        ensure(lhs == rhs, || format!("phi = {phi}, psi = {psi}"))
    })
}

fn star(d: &Derivation, j: &JacobianMatrix) -> JacobianMatrix {
    j.map(|e| d.star_extend(e)).unwrap()
}

/// `J(D1·D2) = D1*(J(D2)) + J(D2)J(D1)` and
/// `J([D1,D2]) = D1*(J(D2)) - D2*(J(D1)) - [J(D1),J(D2)]`.
pub fn jacobian_of_products(cases: u32) -> Result<usize, String> {
    run_cases("jacobian of products", cases, 2, |r, v| {
        let d1 = random_derivation(v, 1, 2, r);
        let d2 = random_derivation(v, 1, 2, r);
        let (j1, j2) = (d1.jacobian().unwrap(), d2.jacobian().unwrap());
        let lhs = d1.lsym(&d2).unwrap().jacobian().unwrap();
        let rhs = star(&d1, &j2).checked_add(&j2.checked_mul(&j1).unwrap()).unwrap();
        ensure(lhs == rhs, || format!("product: D1 = {d1}, D2 = {d2}"))?;
        let lhs = d1.bracket(&d2).unwrap().jacobian().unwrap();
        let rhs = star(&d1, &j2)
            .checked_sub(&star(&d2, &j1))
            .unwrap()
            .checked_sub(&j1.commutator(&j2).unwrap())
            .unwrap();
        ensure(lhs == rhs, || format!("bracket: D1 = {d1}, D2 = {d2}"))
    })
}

/// `div([D1,D2]) = D1*(div D2) - D2*(div D1)` in the trace quotient.
pub fn divergence_of_bracket(cases: u32) -> Result<usize, String> {
    run_cases("divergence of a bracket", cases, 3, |r, v| {
        let d1 = random_derivation(v, 1, 3, r);
        let d2 = random_derivation(v, 1, 2, r);
        let lhs = d1.bracket(&d2).unwrap().divergence().unwrap();
        let a = d1.star_extend_trace(&d2.divergence().unwrap()).unwrap();
        let b = d2.star_extend_trace(&d1.divergence().unwrap()).unwrap();
        ensure(lhs == a.checked_sub(&b).unwrap(), || format!("D1 = {d1}, D2 = {d2}"))
    })
}

/// `D(ab) = D(a)b + aD(b)`, and `D(a)` agrees with the tree-Leibniz oracle.
pub fn leibniz(cases: u32) -> Result<usize, String> {
    run_cases("Leibniz", cases, 4, |r, v| {
        let d = random_derivation(v, 1, 2, r);
        let a = random_element(v, 1, 2, 3, r);
        let b = random_element(v, 1, 2, 3, r);
        let lhs = d.apply(&a.checked_mul(&b).unwrap()).unwrap();
        let rhs = &d.apply(&a).unwrap().checked_mul(&b).unwrap() + &a.checked_mul(&d.apply(&b).unwrap()).unwrap();
        ensure(lhs == rhs, || format!("D = {d}, a = {a}, b = {b}"))?;
        let c = random_element(v, 1, 4, 3, r);
        ensure(d.apply(&c).unwrap() == leibniz_apply(&d, &c), || {
            format!("oracle: D = {d}, c = {c}")
        })
    })
}

fn associator(a: &Derivation, b: &Derivation, c: &Derivation) -> Derivation {
    a.lsym(b)
        .unwrap()
        .lsym(c)
        .unwrap()
        .checked_sub(&a.lsym(&b.lsym(c).unwrap()).unwrap())
        .unwrap()
}

/// `(D1,D2,D3) = (D2,D1,D3)` for the associator of `D1·D2`.
pub fn left_symmetry(cases: u32) -> Result<usize, String> {
    run_cases("left symmetry", cases, 5, |r, v| {
        let d: Vec<Derivation> = (0..3).map(|_| random_derivation(v, 1, 2, r)).collect();
        ensure(
            associator(&d[0], &d[1], &d[2]) == associator(&d[1], &d[0], &d[2]),
            || format!("D1 = {}, D2 = {}, D3 = {}", d[0], d[1], d[2]),
        )
    })
}

/// Jacobi for brackets of derivations, and for elements of Lie varieties.
pub fn jacobi(cases: u32) -> Result<usize, String> {
    run_cases("Jacobi", cases, 6, |r, v| {
        let d: Vec<Derivation> = (0..3).map(|_| random_derivation(v, 1, 2, r)).collect();
        let br = |a: &Derivation, b: &Derivation| a.bracket(b).unwrap();
        let s = br(&br(&d[0], &d[1]), &d[2])
            .checked_add(&br(&br(&d[1], &d[2]), &d[0]))
            .unwrap()
            .checked_add(&br(&br(&d[2], &d[0]), &d[1]))
            .unwrap();
        ensure(s.is_zero(), || "derivations".into())?;
        if v.kind().is_lie() {
            let e: Vec<Element> = (0..3).map(|_| random_element(v, 1, 2, 2, r)).collect();
            let s = &(&(&(&e[0] * &e[1]) * &e[2]) + &(&(&e[1] * &e[2]) * &e[0])) + &(&(&e[2] * &e[0]) * &e[1]);
            ensure(s.is_zero(), || format!("elements {e:?}"))?;
        }
        Ok(())
    })
}

/// `T(phi psi) = T(phi) + T(psi)`, `T(phi^-1) = -T(phi)`, and
/// `T([phi,psi]) = [T(phi),T(psi)]` with the commutator at least `i + j` deep.
pub fn tangent_homomorphism(cases: u32) -> Result<usize, String> {
    run_cases("tangent homomorphism", cases, 7, |r, v| {
        let i = r.gen_range(1..=2);
        let (phi, psi) = (random_ia(v, i, r), random_ia(v, i, r));
        let (tp, ts) = (tangent(&phi).unwrap(), tangent(&psi).unwrap());
        let sum = tp.checked_add(&ts).unwrap();
        let prod = compose_truncated(&phi, &psi, i + 1).unwrap();
        if sum.is_zero() {
            ensure(ia_level(&prod, i + 1) != FiltrationLevel::Ia(i), || {
                "cancelling sum".into()
            })?;
        } else {
            ensure(tangent(&prod).unwrap() == sum, || {
                format!("sum: phi = {phi}, psi = {psi}")
            })?;
        }
        let inv = truncated_inverse(&phi, i + 1).unwrap();
        ensure(tangent(&inv).unwrap() == tp.scale(&-Rational::one()), || {
            format!("inverse: phi = {phi}")
        })?;

        let j = r.gen_range(1..=2);
        let chi = random_ia(v, j, r);
        let tc = tangent(&chi).unwrap();
        let k = i + j + 1;
        let c = group_commutator(&phi, &chi, k).unwrap();
        let br = tp.bracket(&tc).unwrap();
        if br.is_zero() {
            ensure(!matches!(ia_level(&c, k), FiltrationLevel::Ia(l) if l <= i + j), || {
                "commutator too shallow".into()
            })
        } else {
            ensure(ia_level(&c, k) == FiltrationLevel::Ia(i + j), || {
                "commutator level".into()
            })?;
            ensure(tangent(&c).unwrap() == br, || {
                format!("commutator: phi = {phi}, chi = {chi}")
            })
        }
    })
}

/// `trace_class(uv - vu) = 0`.
pub fn trace_kills_commutators(cases: u32) -> Result<usize, String> {
    run_cases("trace of commutators", cases, 8, |r, v| {
        let (a, b) = (random_env(v, r), random_env(v, r));
        ensure(a.commutator(&b).unwrap().trace_class().is_zero(), || {
            format!("{a:?}, {b:?}")
        })
    })
}

/// `(uv)m = u(vm)`.
pub fn representation(cases: u32) -> Result<usize, String> {
    run_cases("representation", cases, 9, |r, v| {
        let (a, b) = (random_env(v, r), random_env(v, r));
        let lo = if v.kind() == VarietyKind::MetabelianLie { 2 } else { 1 };
        let m = random_element(v, lo, 3, 3, r);
        let lhs = env_apply(&env_mul(&a, &b).unwrap(), &m).unwrap();
        let rhs = env_apply(&a, &env_apply(&b, &m).unwrap()).unwrap();
        ensure(lhs == rhs, || format!("{a:?}, {b:?}, {m}"))
    })
}

/// Fox derivatives: the oracle, the Leibniz rules, and `D(a) = Σ ∂a/∂x_i · D(x_i)`.
pub fn fox_calculus(cases: u32) -> Result<usize, String> {
    run_cases("Fox calculus", cases, 10, |r, v| {
        let a = random_element(v, 1, 3, 3, r);
        let b = random_element(v, 1, 2, 3, r);
        let ab = a.checked_mul(&b).unwrap();
        for i in 0..v.rank() {
            let fa = fox_derivative(&a, i).unwrap();
            ensure(env_terms(&fa) == fox_oracle(&a, i), || {
                format!("oracle: a = {a}, i = {i}")
            })?;
            let fb = fox_derivative(&b, i).unwrap();
            let lhs = fox_derivative(&ab, i).unwrap();
            let rhs = match v.kind() {
                VarietyKind::Polynomial => env_mul(&left_mul(&a), &fb)
                    .unwrap()
                    .checked_add(&env_mul(&left_mul(&b), &fa).unwrap()),
                VarietyKind::FreeAssociative => env_mul(&left_mul(&a), &fb)
                    .unwrap()
                    .checked_add(&env_mul(&right_mul(&b), &fa).unwrap()),
                _ => env_mul(&left_mul(&a), &fb)
                    .unwrap()
                    .checked_sub(&env_mul(&left_mul(&b), &fa).unwrap()),
            }
            .unwrap();
            ensure(lhs == rhs, || format!("Leibniz: a = {a}, b = {b}, i = {i}"))?;
        }
        let lo = if v.kind() == VarietyKind::MetabelianLie { 2 } else { 1 };
        let d = random_derivation(v, lo, 2, r);
        let mut acc = Element::zero(v);
        for i in 0..v.rank() {
            acc = &acc + &env_apply(&fox_derivative(&a, i).unwrap(), d.coord(i)).unwrap();
        }
        ensure(acc == d.apply(&a).unwrap(), || {
            format!("universal property: a = {a}, D = {d}")
        })?;
        ensure(d.divergence().unwrap().terms() == &divergence_oracle(&d), || {
            format!("divergence oracle: D = {d}")
        })
    })
}

fn random_avoiding(v: Variety, i: usize, lo: usize, hi: usize, r: &mut ChaCha8Rng) -> Element {
    let others: Vec<usize> = (0..v.rank()).filter(|&k| k != i).collect();
    let mut acc = Element::zero(v);
    for _ in 0..r.gen_range(1..=2) {
        let d = r.gen_range(lo..=hi);
        let mut t = Element::var(v, others[r.gen_range(0..others.len())]);
        for _ in 1..d {
            let x = Element::var(v, others[r.gen_range(0..others.len())]);
            t = if r.gen_bool(0.5) {
                t.checked_mul(&x)
            } else {
                x.checked_mul(&t)
            }
            .unwrap();
        }
        acc = &acc + &t.scale(&coefficient(r));
    }
    acc
}

/// Returns `(g, g^-1)` for a random linear map, or an affine one in unital varieties.
fn random_affine_pair(v: Variety, r: &mut ChaCha8Rng) -> (Endomorphism, Endomorphism) {
    let g = random_invertible(v.rank(), r);
    let ginv = g.inverse().unwrap();
    if v.unital() && r.gen_bool(0.5) {
        let c: Vec<Rational> = (0..v.rank()).map(|_| q(r.gen_range(-1..=1))).collect();
        // x -> g x + c has inverse x -> g^-1 (x - c)
        let n = v.rank();
        let shift: Vec<Rational> = (0..n)
            .map(|k| -(0..n).fold(Rational::zero(), |acc, j| acc + ginv.get(k, j) * &c[j]))
            .collect();
        (
            Endomorphism::affine(v, &g, &c).unwrap(),
            Endomorphism::affine(v, &ginv, &shift).unwrap(),
        )
    } else {
        (
            Endomorphism::linear(v, &g).unwrap(),
            Endomorphism::linear(v, &ginv).unwrap(),
        )
    }
}

/// `x -> L^-1 (x - c)` for the affine part `Lx + c` of `phi`.
fn affine_inverse(phi: &Endomorphism) -> Endomorphism {
    let v = phi.variety();
    let n = v.rank();
    let linv = phi.linear_part().inverse().unwrap();
    let c = phi.constant_part();
    let shift: Vec<Rational> = (0..n)
        .map(|k| -(0..n).fold(Rational::zero(), |acc, j| acc + linv.get(k, j) * &c[j]))
        .collect();
    if v.unital() {
        Endomorphism::affine(v, &linv, &shift).unwrap()
    } else {
        Endomorphism::linear(v, &linv).unwrap()
    }
}

/// Random tame automorphisms of rank 3: products of elementary maps
/// `x_i -> x_i + f` and their conjugates by linear or affine maps, with the
/// affine part cancelled so the product is IA. Every
/// tangent must have zero divergence. Returns the number of nonzero tangents
/// checked.
pub fn tame_zero_divergence(cases_per_variety: usize, bound: usize) -> Result<usize, String> {
    let mut nonzero = 0;
    for (k, kind) in all_kinds().into_iter().enumerate() {
        let v = variety(kind, 3);
        let lo = 2;
        let mut r = rng(1000 + k as u64);
        for case in 0..cases_per_variety {
            let mut acc = Endomorphism::identity(v);
            for _ in 0..r.gen_range(1..=3) {
                let i = r.gen_range(0..3);
                let f = random_avoiding(v, i, lo, 3, &mut r);
                let mut images: Vec<Element> = (0..3).map(|j| Element::var(v, j)).collect();
                images[i] = &images[i] + &f;
                let e = Endomorphism::new(v, images).unwrap();
                let step = if r.gen_bool(0.5) {
                    let (g, ginv) = random_affine_pair(v, &mut r);
                    compose_truncated(&compose_truncated(&ginv, &e, bound).unwrap(), &g, bound).unwrap()
                } else {
                    e
                };
                acc = compose_truncated(&acc, &step, bound).unwrap();
            }
            let acc = compose_truncated(&acc, &affine_inverse(&acc), bound).unwrap();
            let level = ia_level(&acc, bound);
            let FiltrationLevel::Ia(i) = level else {
                if level == FiltrationLevel::NotIa {
                    return Err(format!("{kind:?} case {case}: normalized product is not IA"));
                }
                continue;
            };
            if i + 1 > bound {
                continue;
            }
            let t = tangent(&acc).unwrap();
            let div = t.divergence().unwrap();
            if !div.is_zero() || !divergence_oracle(&t).is_empty() {
                return Err(format!("{kind:?} case {case}: div(T) = {div} for T = {t}"));
            }
            nonzero += 1;
        }
    }
    Ok(nonzero)
}
