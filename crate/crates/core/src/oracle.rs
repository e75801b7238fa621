//! Brute-force verification of the Wick theorem instance by instance.
//!
//! `definitional_order` deliberately does not call into [`crate::ordering`]:
//! it searches all arrangements of a word for the one the ordering's ranks
//! describe and counts inversions pair by pair.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contraction::{contraction_def, tilde_contraction, ContractionMatrix};
use crate::error::{GwtError, Result};
use crate::gwt::{gwt_exponential, gwt_exponential_tilde, gwt_substitution};
use crate::operator::{
    Algebra, CommutationTable, OperatorPoly, OperatorSymbol, Reducer, Registry, Statistics, SymbolId, Unlisted, Word,
};
use crate::ordering::{BasisChange, Ordering, Signature};
use crate::scalar::{GaussianRational, ScalarPoly};

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = alloc::vec![a.clone()];
    let mut c = alloc::vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// The ordering applied literally: find the arrangement with non-increasing
/// rank that keeps equal ranks in input order, sign `(−1)^P` over fermion
/// pairs. Weyl: equal-weight average over every arrangement.
pub fn definitional_order(reg: &Registry, o: &Ordering, w: &Word) -> Result<OperatorPoly> {
    let f = w.factors();
    let n = f.len();
    match o {
        Ordering::Symmetric { .. } => {
            if let Some(x) = f.iter().find(|s| reg.statistics(**s) == Statistics::Fermion) {
                return Err(GwtError::SymmetricOnFermions(reg.name(*x).to_string()));
            }
            let perms = permutations(n);
            let weight = ScalarPoly::constant(
                BigRational::new(BigInt::from(1), BigInt::from(perms.len() as u64)).into(),
            );
            let mut out = OperatorPoly::zero();
            for p in perms {
                out.add_term(Word::new(p.iter().map(|&i| f[i]).collect()), weight.clone());
            }
            Ok(out)
        }
        Ordering::Permutation { signature, .. } => {
            let ranks: Vec<BigRational> = f.iter().map(|s| o.rank(reg, *s)).collect::<Result<_>>()?;
            let target = permutations(n)
                .into_iter()
                .find(|p| {
                    p.windows(2).all(|ij| {
                        let (i, j) = (ij[0], ij[1]);
                        ranks[i] > ranks[j] || (ranks[i] == ranks[j] && i < j)
                    })
                })
                .expect("a stable arrangement always exists");
            let mut inversions = 0;
            for x in 0..n {
                for y in x + 1..n {
                    let (i, j) = (target[x], target[y]);
                    if i > j && reg.statistics(f[i]).is_fermion() && reg.statistics(f[j]).is_fermion() {
                        inversions += 1;
                    }
                }
            }
            let sign = if *signature == Signature::Fermionic && inversions % 2 == 1 { -1 } else { 1 };
            Ok(OperatorPoly::term(
                Word::new(target.iter().map(|&i| f[i]).collect()),
                ScalarPoly::integer(sign),
            ))
        }
    }
}

/// An ordering pair with its contraction, ready for instance checks.
#[derive(Clone, Debug)]
pub struct GwtPair {
    pub o: Ordering,
    pub oprime: Ordering,
    pub basis: BasisChange,
    pub symbols: Vec<SymbolId>,
    pub contraction: ContractionMatrix,
    /// Inverse basis and tilde contraction when `L` can be inverted.
    pub tilde: Option<(BasisChange, ContractionMatrix)>,
}

impl GwtPair {
    pub fn new(alg: &Algebra, o: Ordering, oprime: Ordering, basis: BasisChange, symbols: Vec<SymbolId>) -> Result<Self> {
        let contraction = contraction_def(alg, &o, &oprime, &basis, &symbols)?;
        let tilde = if basis.is_identity() {
            Some((BasisChange::identity(), contraction.clone()))
        } else {
            None
        };
        Ok(Self { o, oprime, basis, symbols, contraction, tilde })
    }

    /// Enables the `e^{Γ̃}` route through an inverse basis over `targets`.
    pub fn with_inverse(mut self, alg: &Algebra, inverse: BasisChange, targets: &[SymbolId]) -> Result<Self> {
        let t = tilde_contraction(alg, &self.o, &self.oprime, &inverse, targets)?;
        self.tilde = Some((inverse, t));
        Ok(self)
    }

    pub fn label(&self) -> String {
        alloc::format!("{}/{}", self.o.name(), self.oprime.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub word: Word,
    pub pair: String,
    pub seed: Option<u64>,
    pub lhs: OperatorPoly,
    pub substitution: OperatorPoly,
    pub exponential: OperatorPoly,
    pub tilde: Option<OperatorPoly>,
    pub pass: bool,
    /// First term of the first nonzero difference, when failing.
    pub first_difference: Option<(Word, ScalarPoly)>,
}

fn first_difference(a: &OperatorPoly, b: &OperatorPoly) -> Option<(Word, ScalarPoly)> {
    let d = a - b;
    let first = d.terms().next().map(|(w, c)| (w.clone(), c.clone()));
    first
}

/// Definitional `O[w]` against the substitution and exponential forms (and
/// the tilde route when configured); exact agreement required.
pub fn verify_gwt_instance(alg: &Algebra, pair: &GwtPair, w: &Word) -> Result<VerificationReport> {
    verify_with(&mut Reducer::new(alg), alg, pair, w)
}

fn verify_with(red: &mut Reducer<'_>, alg: &Algebra, pair: &GwtPair, w: &Word) -> Result<VerificationReport> {
    let reg = alg.registry();
    let f = OperatorPoly::word(w.clone());
    let lhs = red.reduce(&definitional_order(reg, &pair.o, w)?)?;
    let sub = red.reduce(&gwt_substitution(alg, &pair.o, &pair.oprime, &pair.basis, &pair.contraction, &f)?)?;
    let exp = red.reduce(&gwt_exponential(alg, &pair.o, &pair.oprime, &pair.basis, &pair.contraction, &f)?)?;
    let tilde = match &pair.tilde {
        Some((_, t)) => Some(red.reduce(&gwt_exponential_tilde(alg, &pair.oprime, &pair.basis, t, &f)?)?),
        None => None,
    };
    let mut pass = lhs == sub && lhs == exp;
    let mut diff = first_difference(&lhs, &sub).or_else(|| first_difference(&lhs, &exp));
    if let Some(t) = &tilde {
        pass &= *t == lhs;
        diff = diff.or_else(|| first_difference(&lhs, t));
    }
    Ok(VerificationReport {
        word: w.clone(),
        pair: pair.label(),
        seed: None,
        lhs,
        substitution: sub,
        exponential: exp,
        tilde,
        pass,
        first_difference: if pass { None } else { diff },
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub pair: String,
    pub seed: Option<u64>,
    pub instances: usize,
    pub passed: usize,
    pub failures: Vec<VerificationReport>,
}

impl SweepReport {
    pub fn failed(&self) -> usize {
        self.instances - self.passed
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.instances
    }
}

/// Every word of length `1..=max_len` over `pool`, in lexicographic order of
/// pool positions.
pub fn enumerate_words(pool: &[SymbolId], max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<SymbolId>> = alloc::vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * pool.len());
        for w in &layer {
            for s in pool {
                let mut v = w.clone();
                v.push(*s);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned().map(Word::new));
        layer = next;
    }
    out
}

/// Runs [`verify_gwt_instance`] on all words up to `max_len` over `pool`.
/// `on_instance` sees every report in enumeration order.
pub fn sweep(
    alg: &Algebra,
    pair: &GwtPair,
    max_len: usize,
    pool: &[SymbolId],
    mut on_instance: impl FnMut(&VerificationReport),
) -> Result<SweepReport> {
    let mut red = Reducer::new(alg);
    let mut report = SweepReport { pair: pair.label(), ..Default::default() };
    for w in enumerate_words(pool, max_len) {
        let r = verify_with(&mut red, alg, pair, &w)?;
        on_instance(&r);
        report.instances += 1;
        if r.pass {
            report.passed += 1;
        } else {
            report.failures.push(r);
        }
    }
    Ok(report)
}

/// A seeded random algebra with a chosen statistics and c-number brackets.
#[derive(Clone, Debug)]
pub struct RandomAlgebra {
    pub seed: u64,
    pub algebra: Algebra,
    pub symbols: Vec<SymbolId>,
}

fn random_rational(rng: &mut ChaCha8Rng) -> GaussianRational {
    let num: i64 = rng.gen_range(-4..=4);
    let den: i64 = rng.gen_range(1..=3);
    if rng.gen_bool(0.25) {
        GaussianRational::ratio(num, den) * GaussianRational::i()
    } else {
        GaussianRational::ratio(num, den)
    }
}

/// `n` symbols of one statistics with random keys in `0..3`, random dagger
/// flags and random (anti)commutators; roughly a third of the pairs are zero.
pub fn random_algebra(seed: u64, n: usize, statistics: Statistics) -> RandomAlgebra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reg = Registry::new();
    let symbols: Vec<SymbolId> = (0..n)
        .map(|k| {
            let key = BigRational::from_integer(BigInt::from(rng.gen_range(0..3i64)));
            let dagger = rng.gen_bool(0.5);
            let name = alloc::format!("x{k}");
            reg.add(OperatorSymbol::new(&name, statistics, key, dagger)).expect("fresh names")
        })
        .collect();
    let mut table = CommutationTable::new(Unlisted::Zero);
    for i in 0..n {
        let start = if statistics.is_fermion() { i } else { i + 1 };
        for j in start..n {
            if rng.gen_bool(0.33) {
                continue;
            }
            table.set(symbols[i], symbols[j], random_rational(&mut rng).into());
        }
    }
    let algebra = Algebra::new(reg, table).expect("generated tables satisfy the parity axioms");
    RandomAlgebra { seed, algebra, symbols }
}

/// A random permutation ordering over the given symbols.
pub fn random_ordering(seed: u64, name: &str, symbols: &[SymbolId]) -> Ordering {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match rng.gen_range(0..4) {
        0 => Ordering::permutation(name, crate::ordering::RankRule::Normal, Signature::Fermionic),
        1 => Ordering::permutation(name, crate::ordering::RankRule::AntiNormal, Signature::Fermionic),
        2 => Ordering::permutation(name, crate::ordering::RankRule::TimeDescending, Signature::Fermionic),
        _ => {
            let mut list = symbols.to_vec();
            for i in (1..list.len()).rev() {
                list.swap(i, rng.gen_range(0..=i));
            }
            Ordering::permutation(name, crate::ordering::RankRule::Explicit(list), Signature::Fermionic)
        }
    }
}

/// Multiset of instance outcomes keyed by word length, handy for summaries.
pub fn passes_by_length(reports: &[VerificationReport]) -> BTreeMap<usize, (usize, usize)> {
    let mut m = BTreeMap::new();
    for r in reports {
        let e = m.entry(r.word.len()).or_insert((0, 0));
        e.0 += r.pass as usize;
        e.1 += 1;
    }
    m
}
