use gwt_core::contraction::contraction_def;
use gwt_core::fock::{block_compare, represent};
use gwt_core::gwt::{exp_gamma_apply, gwt_substitution, GammaOperator};
use gwt_core::models;
use gwt_core::operator::{OperatorPoly, Statistics, Word};
use gwt_core::oracle::{definitional_order, random_algebra, random_ordering, sweep, GwtPair, RandomAlgebra};
use gwt_core::ordering::{order_poly_foreign, order_word, BasisChange, Ordering};
use gwt_core::scalar::{NumericContext, ScalarPoly};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Reduction changes nothing numerically below the truncation edge.
    #[test]
    fn represent_commutes_with_reduction(words in prop::collection::vec((prop::collection::vec(0usize..4, 0..=4), -3i64..=3), 1..4)) {
        let m = models::two_modes();
        let s = m.syms(&["a", "a†", "b", "b†"]);
        let modes = m.mode_registry(9).unwrap();
        let mut p = OperatorPoly::zero();
        for (picks, c) in &words {
            p.add_term(Word::new(picks.iter().map(|&k| s[k]).collect()), ScalarPoly::integer(*c));
        }
        let ctx = NumericContext::new();
        let reduced = m.algebra.canonical_reduce(&p).unwrap();
        let x = represent(&m.algebra, &p, &modes, &ctx).unwrap();
        let y = represent(&m.algebra, &reduced, &modes, &ctx).unwrap();
        let block = modes.safe_block(p.degree());
        prop_assert!(block_compare(&x, &y, &modes, block).unwrap() <= 1e-12);
    }
}

#[test]
fn oracle_agrees_with_order_word() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for seed in 0..200u64 {
        let stats = if seed % 2 == 0 { Statistics::Boson } else { Statistics::Fermion };
        let RandomAlgebra { algebra, symbols, .. } = random_algebra(seed, 4, stats);
        let reg = algebra.registry();
        let mut orderings = vec![random_ordering(seed, "O", &symbols)];
        if stats == Statistics::Boson {
            orderings.push(Ordering::weyl());
        }
        for o in &orderings {
            for _ in 0..50 {
                let len = rng.gen_range(0..=5);
                let w = Word::new((0..len).map(|_| symbols[rng.gen_range(0..4)]).collect());
                assert_eq!(order_word(reg, o, &w).unwrap(), definitional_order(reg, o, &w).unwrap());
                checked += 1;
            }
        }
    }
    assert!(checked >= 10_000);
}

#[test]
fn short_word_sweep_on_random_tables() {
    for seed in 0..20u64 {
        let stats = if seed % 2 == 0 { Statistics::Boson } else { Statistics::Fermion };
        let RandomAlgebra { algebra, symbols, .. } = random_algebra(seed, 3, stats);
        // explicit rankings have no ties, so every pair is well posed
        let rank = |k: u64| {
            let mut s = symbols.clone();
            s.rotate_left((seed + k) as usize % 3);
            Ordering::explicit("E", s)
        };
        let pair = GwtPair::new(&algebra, rank(0), rank(1), BasisChange::identity(), symbols.clone()).unwrap();
        let r = sweep(&algebra, &pair, 3, &symbols, |_| {}).unwrap();
        assert!(r.all_passed(), "seed {seed}: {} failures", r.failed());
    }
}

/// GWT output for timed fermions, evaluated on exact 8×8 matrices.
#[test]
fn timed_fermions_match_matrices() {
    let b = models::fermion_modes(3);
    let b = models::timed(b, "c0", 3, 1.into()).unwrap();
    let b = models::timed(b, "c1†", 1, 1.into()).unwrap();
    let b = models::timed(b, "c2", 2, 1.into()).unwrap();
    let m = b.build().unwrap();
    let pool = m.syms(&["c0@3", "c1†@1", "c2@2"]);
    let l = BasisChange::from_algebra(&m.algebra, &pool);
    let c = contraction_def(&m.algebra, &Ordering::time(), &Ordering::normal(), &l, &pool).unwrap();
    let modes = m.mode_registry(2).unwrap();
    let ctx = NumericContext::new();
    let w = OperatorPoly::word(Word::new(vec![pool[2], pool[0], pool[1]]));
    let t = order_word(m.algebra.registry(), &Ordering::time(), &Word::new(vec![pool[2], pool[0], pool[1]])).unwrap();
    let sub = gwt_substitution(&m.algebra, &Ordering::time(), &Ordering::normal(), &l, &c, &w).unwrap();
    let g = GammaOperator::new(&m.algebra, c).unwrap();
    let exp = order_poly_foreign(m.algebra.registry(), &Ordering::normal(), &exp_gamma_apply(&m.algebra, &g, &w), &l).unwrap();
    let want = represent(&m.algebra, &t, &modes, &ctx).unwrap();
    for got in [&sub, &exp] {
        let x = represent(&m.algebra, got, &modes, &ctx).unwrap();
        assert_eq!(x.max_abs_diff(&want).unwrap(), 0.0);
        assert!(m.algebra.canonical_reduce(&(got - &t)).unwrap().is_zero());
    }
}
