use std::collections::BTreeMap;

use gwt_core::contraction::{contraction_def, contraction_theta, tilde_contraction, transform_tilde, Parity};
use gwt_core::gwt::{derive, derive_grassmann, gamma_apply, DerivativeIndex, Flavor, GammaOperator};
use gwt_core::models;
use gwt_core::operator::{Algebra, OperatorPoly, Reducer, Statistics, SymbolId, Word};
use gwt_core::oracle::{random_algebra, random_ordering, RandomAlgebra};
use gwt_core::ordering::{order_word, BasisChange, Ordering, RankRule, Signature};
use gwt_core::scalar::{GaussianRational, NumericContext, ScalarPoly};
use num_complex::Complex64;
use proptest::prelude::*;

fn scalar_poly() -> impl Strategy<Value = ScalarPoly> {
    prop::collection::vec((-5i64..=5, 1i64..=4, any::<bool>(), 0u32..3, 0u32..3), 0..5).prop_map(|terms| {
        let mut p = ScalarPoly::zero();
        for (n, d, imag, ex, ey) in terms {
            let mut c = GaussianRational::ratio(n, d);
            if imag {
                c = c * GaussianRational::i();
            }
            let term = &ScalarPoly::symbol("x").pow(ex) * &ScalarPoly::symbol("y").pow(ey);
            p.add_assign_ref(&term.scale(&c));
        }
        p
    })
}

fn word_over(symbols: &[SymbolId], picks: &[usize]) -> Word {
    Word::new(picks.iter().map(|&k| symbols[k % symbols.len()]).collect())
}

fn random_poly(symbols: &[SymbolId], words: &[(Vec<usize>, i64)]) -> OperatorPoly {
    let mut p = OperatorPoly::zero();
    for (picks, c) in words {
        p.add_term(word_over(symbols, picks), ScalarPoly::integer(*c));
    }
    p
}

fn fermion_pool() -> (Algebra, Vec<SymbolId>) {
    let m = models::fermion_modes(2).build().unwrap();
    let s = m.syms(&["c0", "c0†", "c1", "c1†"]);
    (m.algebra, s)
}

fn boson_pool() -> (Algebra, Vec<SymbolId>) {
    let m = models::two_modes();
    let s = m.syms(&["a", "a†", "b", "b†"]);
    (m.algebra, s)
}

fn statistics(fermion: bool) -> Statistics {
    if fermion {
        Statistics::Fermion
    } else {
        Statistics::Boson
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_ring_axioms(a in scalar_poly(), b in scalar_poly(), c in scalar_poly()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in scalar_poly(), b in scalar_poly(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let ctx = NumericContext::new().with("x", Complex64::new(x, 0.5)).with("y", Complex64::new(-0.25, y));
        let lhs = (&a * &b).evaluate(&ctx).unwrap();
        let rhs = a.evaluate(&ctx).unwrap() * b.evaluate(&ctx).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
        let sum = (&a + &b).evaluate(&ctx).unwrap();
        prop_assert!((sum - a.evaluate(&ctx).unwrap() - b.evaluate(&ctx).unwrap()).norm() <= 1e-12 * sum.norm().max(1.0));
    }

    /// Rewriting `xy → ±yx + [x, y]±` at random positions never changes the
    /// canonical form.
    #[test]
    fn canonical_reduce_is_confluent(
        seed in 0u64..10_000,
        fermion in any::<bool>(),
        picks in prop::collection::vec(0usize..4, 2..=6),
        moves in prop::collection::vec(0usize..5, 1..4),
    ) {
        let RandomAlgebra { algebra: alg, symbols, .. } = random_algebra(seed, 4, statistics(fermion));
        let w = word_over(&symbols, &picks);
        let mut p = OperatorPoly::word(w.clone());
        for m in moves {
            let mut next = OperatorPoly::zero();
            for (word, c) in p.terms() {
                let f = word.factors();
                if f.len() < 2 {
                    next.add_term(word.clone(), c.clone());
                    continue;
                }
                let i = m % (f.len() - 1);
                let mut swapped = f.to_vec();
                swapped.swap(i, i + 1);
                let sign = if fermion { -c } else { c.clone() };
                next.add_term(Word::new(swapped), sign);
                let br = alg.bracket(f[i], f[i + 1]).unwrap();
                let mut rest = f.to_vec();
                rest.drain(i..i + 2);
                next.add_term(Word::new(rest), c * &br);
            }
            p = next;
        }
        prop_assert_eq!(alg.canonical_reduce(&p).unwrap(), alg.canonical_reduce(&OperatorPoly::word(w)).unwrap());
    }

    /// Reduction terminates, and every emitted word has degree `n − 2k`.
    #[test]
    fn reduction_drops_degree_in_pairs(seed in 0u64..10_000, fermion in any::<bool>(), picks in prop::collection::vec(0usize..4, 1..=6)) {
        let RandomAlgebra { algebra: alg, symbols, .. } = random_algebra(seed, 4, statistics(fermion));
        let w = word_over(&symbols, &picks);
        let mut r = Reducer::new(&alg);
        let out = r.reduce(&OperatorPoly::word(w.clone())).unwrap();
        let n = w.len();
        for (word, _) in out.terms() {
            prop_assert!(word.len() <= n && (n - word.len()).is_multiple_of(2));
        }
        // memoised rewriting: at most one step per inversion per distinct word
        prop_assert!(r.steps() <= 20_000);
        prop_assert_eq!(alg.canonical_reduce(&out).unwrap(), out);
    }

    #[test]
    fn repeated_fermion_reduces_to_half_anticommutator(picks in prop::collection::vec(0usize..4, 0..4), pos in 0usize..4, x in 0usize..4) {
        let (alg, s) = fermion_pool();
        let tail = word_over(&s, &picks);
        let pos = pos.min(tail.len());
        let mut f = tail.factors().to_vec();
        f.insert(pos, s[x]);
        f.insert(pos, s[x]);
        let half = alg.bracket(s[x], s[x]).unwrap().scale(&GaussianRational::ratio(1, 2));
        let lhs = alg.canonical_reduce(&OperatorPoly::word(Word::new(f))).unwrap();
        let rhs = alg.canonical_reduce(&OperatorPoly::term(tail, half)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn ordering_is_idempotent(seed in 0u64..10_000, fermion in any::<bool>(), picks in prop::collection::vec(0usize..4, 0..=5)) {
        let RandomAlgebra { algebra: alg, symbols, .. } = random_algebra(seed, 4, statistics(fermion));
        let reg = alg.registry();
        let o = random_ordering(seed ^ 0x5eed, "O", &symbols);
        let once = order_word(reg, &o, &word_over(&symbols, &picks)).unwrap();
        for (w, _) in once.terms() {
            prop_assert_eq!(order_word(reg, &o, w).unwrap(), OperatorPoly::word(w.clone()));
        }
    }

    #[test]
    fn weyl_coefficients_average_to_one(picks in prop::collection::vec(0usize..4, 0..=6)) {
        let (alg, s) = boson_pool();
        let p = order_word(alg.registry(), &Ordering::weyl(), &word_over(&s, &picks)).unwrap();
        let total = p.terms().fold(ScalarPoly::zero(), |acc, (_, c)| &acc + c);
        prop_assert_eq!(total, ScalarPoly::one());
    }

    #[test]
    fn grassmann_derivatives_anticommute(words in prop::collection::vec((prop::collection::vec(0usize..4, 0..5), -3i64..=3), 0..6), x in 0usize..4, y in 0usize..4) {
        let (alg, s) = fermion_pool();
        let reg = alg.registry();
        let p = random_poly(&s, &words);
        let d = |q: &OperatorPoly, k: usize| derive_grassmann(reg, q, DerivativeIndex { symbol: s[k], flavor: Flavor::Grassmann }).unwrap();
        prop_assert!((&d(&d(&p, x), y) + &d(&d(&p, y), x)).is_zero());
        prop_assert!(d(&d(&p, x), x).is_zero());
        let wrong = DerivativeIndex { symbol: s[x], flavor: Flavor::Bosonic };
        prop_assert!(derive_grassmann(reg, &p, wrong).is_err());
    }

    /// `Γ^m p = 0` once `2m > deg p`.
    #[test]
    fn gamma_drops_degree_by_two(words in prop::collection::vec((prop::collection::vec(0usize..4, 0..6), -3i64..=3), 1..5), fermion in any::<bool>()) {
        let (alg, s) = if fermion { fermion_pool() } else { boson_pool() };
        let c = contraction_def(&alg, &Ordering::antinormal(), &Ordering::normal(), &BasisChange::identity(), &s).unwrap();
        let g = GammaOperator::new(&alg, c).unwrap();
        let mut p = random_poly(&s, &words);
        let deg = p.degree();
        for m in 1..=deg / 2 + 1 {
            p = gamma_apply(&alg, &g, &p);
            for (w, _) in p.terms() {
                prop_assert!(w.len() + 2 * m <= deg);
            }
        }
        prop_assert!(p.is_zero());
    }

    /// `[Γ, φ̂_α]` acts as `C_{αβ}∂_β`, and the next commutator is the
    /// c-number `C_{αβ}`; everything beyond vanishes.
    #[test]
    fn gamma_commutator_with_fields(words in prop::collection::vec((prop::collection::vec(0usize..4, 0..5), -3i64..=3), 1..5), fermion in any::<bool>(), x in 0usize..4, y in 0usize..4) {
        let (alg, s) = if fermion { fermion_pool() } else { boson_pool() };
        let reg = alg.registry();
        let o = if fermion { Ordering::antinormal() } else { Ordering::weyl() };
        let c = contraction_def(&alg, &o, &Ordering::normal(), &BasisChange::identity(), &s).unwrap();
        let g = GammaOperator::new(&alg, c.clone()).unwrap();
        let p = random_poly(&s, &words);
        let field = |k: usize| OperatorPoly::symbol(s[k]);
        let sign = if fermion { -1 } else { 1 };
        let comm = |k: usize, q: &OperatorPoly| &gamma_apply(&alg, &g, &(&field(k) * q)) - &(&field(k) * &gamma_apply(&alg, &g, q));
        let mut want = OperatorPoly::zero();
        for &b in &s {
            want.add_scaled(&derive(reg, &p, b), &c.get(s[x], b));
        }
        prop_assert_eq!(comm(x, &p), want);
        // [[Γ, φ_x], φ_y]± applied to p is C_{xy} p
        let double = &comm(x, &(&field(y) * &p)) - &(&field(y) * &comm(x, &p)).scale(&ScalarPoly::integer(sign));
        prop_assert_eq!(double, p.scale(&c.get(s[x], s[y])));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Both contraction formulas agree. The parity matches the statistics on
    /// every pair that neither ordering leaves tied; a tied pair with a
    /// nonzero bracket has no well-defined ordered product.
    #[test]
    fn contraction_def_equals_theta(seed in any::<u64>(), fermion in any::<bool>()) {
        let RandomAlgebra { algebra: alg, symbols, .. } = random_algebra(seed, 4, statistics(fermion));
        let reg = alg.registry();
        let o = random_ordering(seed.wrapping_mul(3), "O", &symbols);
        let op = random_ordering(seed.wrapping_mul(7).wrapping_add(1), "O'", &symbols);
        let l = BasisChange::identity();
        let def = contraction_def(&alg, &o, &op, &l, &symbols).unwrap();
        let theta = contraction_theta(&alg, &o, &op, &l, &symbols).unwrap();
        let tied = |ord: &Ordering, a, b| !ord.precedes(reg, a, b).unwrap() && !ord.precedes(reg, b, a).unwrap();
        let mut well_posed = true;
        for &a in &symbols {
            for &b in &symbols {
                prop_assert_eq!(def.get(a, b), theta.get(a, b));
                if a != b && (tied(&o, a, b) || tied(&op, a, b)) && !alg.bracket(a, b).unwrap().is_zero() {
                    well_posed = false;
                    continue;
                }
                let flipped = if fermion { -&def.get(b, a) } else { def.get(b, a) };
                prop_assert_eq!(def.get(a, b), flipped);
            }
        }
        prop_assert_eq!(def.parity(), if fermion { Parity::Antisymmetric } else { Parity::Symmetric });
        if well_posed {
            prop_assert!(def.check_parity(&alg));
        }
    }
}

#[test]
fn fermionic_signs_compose_like_permutation_parities() {
    let m = models::fermion_modes(4).build().unwrap();
    let s = m.syms(&["c0", "c1", "c2", "c3"]);
    let reg = m.algebra.registry();
    let perms = gwt_core::oracle::permutations(4);
    let sign_word = |p: &OperatorPoly| -> (Word, ScalarPoly) {
        let (w, c) = p.terms().next().unwrap();
        (w.clone(), c.clone())
    };
    for r1 in &perms {
        let o1 = Ordering::permutation("O1", RankRule::Explicit(r1.iter().map(|&k| s[k]).collect()), Signature::Fermionic);
        for r2 in &perms {
            let o2 = Ordering::permutation("O2", RankRule::Explicit(r2.iter().map(|&k| s[k]).collect()), Signature::Fermionic);
            for w in &perms {
                let w = Word::new(w.iter().map(|&k| s[k]).collect());
                let (w1, s1) = sign_word(&order_word(reg, &o1, &w).unwrap());
                let (w12, s12) = sign_word(&order_word(reg, &o2, &w1).unwrap());
                let (w2, s2) = sign_word(&order_word(reg, &o2, &w).unwrap());
                assert_eq!(w12, w2);
                assert_eq!(&s1 * &s12, s2);
            }
        }
    }
}

#[test]
fn equal_keys_keep_their_order() {
    let (alg, s) = fermion_pool();
    let (c0, c1) = (s[0], s[2]);
    let w = Word::new(vec![c1, c0]);
    assert_eq!(order_word(alg.registry(), &Ordering::normal(), &w).unwrap(), OperatorPoly::word(w));
}

#[test]
fn tilde_contraction_transforms_back() {
    // quadratures: a = s(q + ip), a† = s(q − ip)
    let m = models::quadratures();
    let (a, ad, q, p) = (m.sym("a"), m.sym("a†"), m.sym("q"), m.sym("p"));
    let s = ScalarPoly::symbol("s");
    let is = &ScalarPoly::i() * &s;
    let mut inv = BTreeMap::new();
    inv.insert(a, vec![(q, s.clone()), (p, is.clone())]);
    inv.insert(ad, vec![(q, s.clone()), (p, -&is)]);
    let inv = BasisChange::new(inv).unwrap();
    let l = BasisChange::from_algebra(&m.algebra, &[q, p]);
    let c = contraction_def(&m.algebra, &Ordering::qp(), &Ordering::normal(), &l, &[q, p]).unwrap();
    let tilde = tilde_contraction(&m.algebra, &Ordering::qp(), &Ordering::normal(), &inv, &[a, ad]).unwrap();
    let back = transform_tilde(&m.algebra, &l, &tilde, &[q, p]).unwrap();
    for &x in &[q, p] {
        for &y in &[q, p] {
            assert_eq!(m.algebra.normalize_scalar(&back.get(x, y)), c.get(x, y));
        }
    }

    // timed fermions: L is diagonal, its inverse divides out the phases
    let phase = GaussianRational::ratio(3, 5) + GaussianRational::ratio(4, 5) * GaussianRational::i();
    let b = models::fermion_modes(1);
    let b = models::timed(b, "c0", 2, phase.clone()).unwrap();
    let b = models::timed(b, "c0†", 1, phase.conj()).unwrap();
    let t = b.build().unwrap();
    let (c0, c0d, x, xd) = (t.sym("c0"), t.sym("c0†"), t.sym("c0@2"), t.sym("c0†@1"));
    let mut inv = BTreeMap::new();
    inv.insert(c0, vec![(x, ScalarPoly::constant(phase.inv().unwrap()))]);
    inv.insert(c0d, vec![(xd, ScalarPoly::constant(phase.conj().inv().unwrap()))]);
    let inv = BasisChange::new(inv).unwrap();
    let l = BasisChange::from_algebra(&t.algebra, &[x, xd]);
    let c = contraction_def(&t.algebra, &Ordering::time(), &Ordering::normal(), &l, &[x, xd]).unwrap();
    let tilde = tilde_contraction(&t.algebra, &Ordering::time(), &Ordering::normal(), &inv, &[c0, c0d]).unwrap();
    let back = transform_tilde(&t.algebra, &l, &tilde, &[x, xd]).unwrap();
    for &u in &[x, xd] {
        for &v in &[x, xd] {
            assert_eq!(back.get(u, v), c.get(u, v));
        }
    }
    assert!(!c.is_zero());
}
