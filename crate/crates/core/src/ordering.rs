//! Permutation orderings, Weyl symmetrization and indirect (foreign)
//! ordering through a linear change of basis.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{GwtError, Result};
use crate::operator::{LinearCombination, OperatorPoly, Registry, Statistics, SymbolId, Word};
use crate::scalar::{GaussianRational, ScalarPoly};

/// Sign picked up per transposition of two fermions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Signature {
    /// No signs at all.
    Bosonic,
    /// `−1` per fermion–fermion transposition; bosons never contribute.
    Fermionic,
}

/// How a permutation ordering ranks symbols. Higher rank goes further left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankRule {
    /// Daggered left of undaggered.
    Normal,
    /// Undaggered left of daggered.
    AntiNormal,
    /// Larger key (later time) left.
    TimeDescending,
    /// Symbols named `q…` left of symbols named `p…`.
    Qp,
    /// Listed symbols, first entry leftmost. Unlisted symbols are incomparable.
    Explicit(Vec<SymbolId>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ordering {
    Permutation { name: String, rule: RankRule, signature: Signature },
    Symmetric { name: String },
}

impl Ordering {
    pub fn permutation(name: &str, rule: RankRule, signature: Signature) -> Self {
        Ordering::Permutation { name: name.to_string(), rule, signature }
    }

    pub fn normal() -> Self {
        Self::permutation("N", RankRule::Normal, Signature::Fermionic)
    }

    pub fn antinormal() -> Self {
        Self::permutation("A", RankRule::AntiNormal, Signature::Fermionic)
    }

    pub fn time() -> Self {
        Self::permutation("T", RankRule::TimeDescending, Signature::Fermionic)
    }

    pub fn qp() -> Self {
        Self::permutation("qp", RankRule::Qp, Signature::Fermionic)
    }

    pub fn explicit(name: &str, ranking: Vec<SymbolId>) -> Self {
        Self::permutation(name, RankRule::Explicit(ranking), Signature::Fermionic)
    }

    pub fn weyl() -> Self {
        Ordering::Symmetric { name: "W".to_string() }
    }

    pub fn name(&self) -> &str {
        match self {
            Ordering::Permutation { name, .. } | Ordering::Symmetric { name } => name,
        }
    }

    pub fn is_permutation(&self) -> bool {
        matches!(self, Ordering::Permutation { .. })
    }

    pub fn signature(&self) -> Option<Signature> {
        match self {
            Ordering::Permutation { signature, .. } => Some(*signature),
            Ordering::Symmetric { .. } => None,
        }
    }

    /// Rank of `s`; larger ranks are placed further left.
    pub fn rank(&self, reg: &Registry, s: SymbolId) -> Result<BigRational> {
        let rule = match self {
            Ordering::Permutation { rule, .. } => rule,
            Ordering::Symmetric { .. } => return Err(GwtError::NotPermutationOrdering),
        };
        let sym = reg.get(s);
        let int = |n: i64| BigRational::from_integer(BigInt::from(n));
        let incomparable = || GwtError::IncomparableKeys {
            ordering: self.name().to_string(),
            symbol: sym.id.clone(),
        };
        match rule {
            RankRule::Normal => Ok(int(sym.dagger as i64)),
            RankRule::AntiNormal => Ok(int(!sym.dagger as i64)),
            RankRule::TimeDescending => Ok(sym.key.clone()),
            RankRule::Qp => match sym.id.chars().next() {
                Some('q') => Ok(int(1)),
                Some('p') => Ok(int(0)),
                _ => Err(incomparable()),
            },
            RankRule::Explicit(list) => list
                .iter()
                .position(|x| *x == s)
                .map(|pos| int(-(pos as i64)))
                .ok_or_else(incomparable),
        }
    }

    /// `θ_{x≻y}`: whether the ordering strictly places `x` left of `y`.
    pub fn precedes(&self, reg: &Registry, x: SymbolId, y: SymbolId) -> Result<bool> {
        Ok(self.rank(reg, x)? > self.rank(reg, y)?)
    }
}

/// Sorting permutation of a word and the number of fermion–fermion
/// inversions it removes.
fn stable_sort(o: &Ordering, reg: &Registry, w: &[SymbolId]) -> Result<(Vec<SymbolId>, usize)> {
    let ranks: Vec<BigRational> = w.iter().map(|s| o.rank(reg, *s)).collect::<Result<_>>()?;
    let mut idx: Vec<usize> = (0..w.len()).collect();
    idx.sort_by(|&i, &j| ranks[j].cmp(&ranks[i]));
    let mut inversions = 0;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if ranks[i] < ranks[j] && reg.statistics(w[i]).is_fermion() && reg.statistics(w[j]).is_fermion() {
                inversions += 1;
            }
        }
    }
    if matches!(o, Ordering::Permutation { rule: RankRule::TimeDescending, .. }) {
        warn_equal_time(reg, w, &ranks);
    }
    Ok((idx.into_iter().map(|i| w[i]).collect(), inversions))
}

fn warn_equal_time(reg: &Registry, w: &[SymbolId], ranks: &[BigRational]) {
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if w[i] != w[j]
                && ranks[i] == ranks[j]
                && reg.statistics(w[i]).is_fermion()
                && reg.statistics(w[j]).is_fermion()
            {
                log::warn!(
                    "fermions `{}` and `{}` share a time label; kept in input order",
                    reg.name(w[i]),
                    reg.name(w[j])
                );
            }
        }
    }
}

/// Distinct arrangements of a multiset of symbols with their multiplicities
/// as weights `Π mᵢ! / n!`.
fn symmetrize(w: &[SymbolId]) -> Vec<(Vec<SymbolId>, GaussianRational)> {
    let n = w.len();
    let mut sorted = w.to_vec();
    sorted.sort();
    let mut counts: BTreeMap<SymbolId, u64> = BTreeMap::new();
    for s in &sorted {
        *counts.entry(*s).or_default() += 1;
    }
    let fact = |k: u64| (1..=k).fold(BigInt::from(1), |acc, x| acc * BigInt::from(x));
    let num = counts.values().fold(BigInt::from(1), |acc, &m| acc * fact(m));
    let weight = GaussianRational::from(BigRational::new(num, fact(n as u64)));
    let mut out = Vec::new();
    loop {
        out.push((sorted.clone(), weight.clone()));
        if !next_permutation(&mut sorted) {
            break;
        }
    }
    out
}

fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Applies `o` to a single word: a signed sorted word, or the Weyl average.
pub fn order_word(reg: &Registry, o: &Ordering, w: &Word) -> Result<OperatorPoly> {
    match o {
        Ordering::Permutation { signature, .. } => {
            let (sorted, inversions) = stable_sort(o, reg, w.factors())?;
            let negative = *signature == Signature::Fermionic && inversions % 2 == 1;
            let c = if negative { ScalarPoly::integer(-1) } else { ScalarPoly::one() };
            Ok(OperatorPoly::term(Word::new(sorted), c))
        }
        Ordering::Symmetric { .. } => {
            if let Some(f) = w.factors().iter().find(|s| reg.statistics(**s) == Statistics::Fermion) {
                return Err(GwtError::SymmetricOnFermions(reg.name(*f).to_string()));
            }
            let mut out = OperatorPoly::zero();
            for (arr, weight) in symmetrize(w.factors()) {
                out.add_term(Word::new(arr), weight.into());
            }
            Ok(out)
        }
    }
}

/// Linear extension of [`order_word`].
pub fn order_poly(reg: &Registry, o: &Ordering, p: &OperatorPoly) -> Result<OperatorPoly> {
    let mut out = OperatorPoly::zero();
    for (w, c) in p.terms() {
        out.add_scaled(&order_word(reg, o, w)?, c);
    }
    Ok(out)
}

/// The matrix `L` of `φ̂_α = L_{αk} φ̂_k` mapping source symbols to linear
/// combinations of target symbols. `Identity` means `φ̂ = φ̂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisChange {
    Identity,
    Rows(BTreeMap<SymbolId, LinearCombination>),
}

impl BasisChange {
    pub fn identity() -> Self {
        BasisChange::Identity
    }

    pub fn new(rows: BTreeMap<SymbolId, LinearCombination>) -> Result<Self> {
        for (s, row) in &rows {
            if row.iter().all(|(_, c)| c.is_zero()) {
                return Err(GwtError::InvalidTable(format!("basis row of symbol #{} is zero", s.0)));
            }
        }
        Ok(BasisChange::Rows(rows))
    }

    /// Rows read off the definitions of an algebra, identity for base symbols.
    pub fn from_algebra(alg: &crate::operator::Algebra, sources: &[SymbolId]) -> Self {
        if sources.iter().all(|s| !alg.is_defined(*s)) {
            return BasisChange::Identity;
        }
        BasisChange::Rows(sources.iter().map(|s| (*s, alg.expansion(*s))).collect())
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, BasisChange::Identity)
    }

    pub fn row(&self, reg: &Registry, s: SymbolId) -> Result<LinearCombination> {
        match self {
            BasisChange::Identity => Ok(alloc::vec![(s, ScalarPoly::one())]),
            BasisChange::Rows(rows) => rows
                .get(&s)
                .cloned()
                .ok_or_else(|| GwtError::SymbolNotInBasis(reg.name(s).to_string())),
        }
    }

    /// Source symbols, or `None` for the identity.
    pub fn sources(&self) -> Option<Vec<SymbolId>> {
        match self {
            BasisChange::Identity => None,
            BasisChange::Rows(rows) => Some(rows.keys().copied().collect()),
        }
    }

    /// Whether every row has exactly one nonzero entry.
    pub fn is_monomial(&self) -> bool {
        match self {
            BasisChange::Identity => true,
            BasisChange::Rows(rows) => rows.values().all(|r| r.iter().filter(|(_, c)| !c.is_zero()).count() == 1),
        }
    }

    /// Expands every factor of `w` through the rows of `L`.
    pub fn expand_word(&self, reg: &Registry, w: &Word) -> Result<OperatorPoly> {
        let mut acc = OperatorPoly::one();
        for s in w.factors() {
            let mut factor = OperatorPoly::zero();
            for (t, c) in self.row(reg, *s)? {
                factor.add_term(Word::single(t), c);
            }
            acc = &acc * &factor;
        }
        Ok(acc)
    }

    pub fn expand_poly(&self, reg: &Registry, p: &OperatorPoly) -> Result<OperatorPoly> {
        let mut out = OperatorPoly::zero();
        for (w, c) in p.terms() {
            out.add_scaled(&self.expand_word(reg, w)?, c);
        }
        Ok(out)
    }
}

/// `O′`-ordering of a word over `φ̂`, defined through `φ̂ = L·φ̂` by ordering
/// the target-basis words; the result is over the target symbols.
pub fn order_word_foreign(reg: &Registry, oprime: &Ordering, w: &Word, l: &BasisChange) -> Result<OperatorPoly> {
    order_poly(reg, oprime, &l.expand_word(reg, w)?)
}

/// Linear extension of [`order_word_foreign`].
pub fn order_poly_foreign(reg: &Registry, oprime: &Ordering, p: &OperatorPoly, l: &BasisChange) -> Result<OperatorPoly> {
    order_poly(reg, oprime, &l.expand_poly(reg, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{Algebra, CommutationTable, OperatorSymbol, Unlisted};

    fn w(v: &[SymbolId]) -> Word {
        Word::new(v.to_vec())
    }

    fn timed() -> (Registry, SymbolId, SymbolId) {
        let mut reg = Registry::new();
        let c1 = reg.add(OperatorSymbol::fermion("c1", 1, false)).unwrap();
        let cd2 = reg.add(OperatorSymbol::fermion("c†2", 2, true)).unwrap();
        (reg, c1, cd2)
    }

    #[test]
    fn normal_ordering_single_swap() {
        let mut reg = Registry::new();
        let a = reg.add(OperatorSymbol::boson("a", 0, false)).unwrap();
        let ad = reg.add(OperatorSymbol::boson("a†", 0, true)).unwrap();
        let r = order_word(&reg, &Ordering::normal(), &w(&[a, ad])).unwrap();
        assert_eq!(r, OperatorPoly::word(w(&[ad, a])));
        assert_eq!(order_poly(&reg, &Ordering::normal(), &OperatorPoly::one()).unwrap(), OperatorPoly::one());
    }

    #[test]
    fn fermionic_time_ordering_sign() {
        let (reg, c1, cd2) = timed();
        let r = order_word(&reg, &Ordering::time(), &w(&[c1, cd2])).unwrap();
        assert_eq!(r, OperatorPoly::term(w(&[cd2, c1]), ScalarPoly::integer(-1)));
        let p = &OperatorPoly::word(w(&[c1, cd2])) - &OperatorPoly::word(w(&[cd2, c1]));
        let r = order_poly(&reg, &Ordering::time(), &p).unwrap();
        assert_eq!(r, OperatorPoly::term(w(&[cd2, c1]), ScalarPoly::integer(-2)));
    }

    #[test]
    fn weyl_on_two_symbols() {
        let mut reg = Registry::new();
        let x = reg.add(OperatorSymbol::boson("X", 0, false)).unwrap();
        let y = reg.add(OperatorSymbol::boson("Y", 0, false)).unwrap();
        let r = order_word(&reg, &Ordering::weyl(), &w(&[x, y])).unwrap();
        let half = ScalarPoly::ratio(1, 2);
        let expected = &OperatorPoly::term(w(&[x, y]), half.clone()) + &OperatorPoly::term(w(&[y, x]), half);
        assert_eq!(r, expected);
        let r = order_word(&reg, &Ordering::weyl(), &w(&[x, x, y])).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.terms().all(|(_, c)| *c == ScalarPoly::ratio(1, 3)));
    }

    #[test]
    fn weyl_rejects_fermions() {
        let (reg, c1, _) = timed();
        assert!(matches!(
            order_word(&reg, &Ordering::weyl(), &w(&[c1])),
            Err(GwtError::SymmetricOnFermions(_))
        ));
    }

    #[test]
    fn ties_are_stable() {
        let mut reg = Registry::new();
        let c = reg.add(OperatorSymbol::fermion("c", 0, false)).unwrap();
        let d = reg.add(OperatorSymbol::fermion("d", 0, false)).unwrap();
        let r = order_word(&reg, &Ordering::normal(), &w(&[d, c])).unwrap();
        assert_eq!(r, OperatorPoly::word(w(&[d, c])));
    }

    #[test]
    fn explicit_ranking_rejects_unlisted() {
        let (reg, c1, cd2) = timed();
        let o = Ordering::explicit("X", alloc::vec![c1]);
        assert!(matches!(order_word(&reg, &o, &w(&[c1, cd2])), Err(GwtError::IncomparableKeys { .. })));
    }

    #[test]
    fn foreign_normal_ordering_of_quadratures() {
        let mut reg = Registry::new();
        let a = reg.add(OperatorSymbol::boson("a", 0, false)).unwrap();
        let ad = reg.add(OperatorSymbol::boson("a†", 0, true)).unwrap();
        let q = reg.add(OperatorSymbol::boson("q", 0, false)).unwrap();
        let mut t = CommutationTable::new(Unlisted::Error);
        t.set(a, ad, ScalarPoly::one());
        let mut rel = crate::scalar::SquareRelations::new();
        rel.insert("s", GaussianRational::ratio(1, 2));
        let mut alg = Algebra::new(reg.clone(), t).unwrap().with_relations(rel);
        let s = ScalarPoly::symbol("s");
        alg.define(q, alloc::vec![(a, s.clone()), (ad, s.clone())]).unwrap();
        let l = BasisChange::from_algebra(&alg, &[q]);

        let single = order_word_foreign(&reg, &Ordering::normal(), &w(&[q]), &l).unwrap();
        assert_eq!(single, &OperatorPoly::term(w(&[a]), s.clone()) + &OperatorPoly::term(w(&[ad]), s.clone()));

        let r = order_word_foreign(&reg, &Ordering::normal(), &w(&[q, q]), &l).unwrap();
        let r = alg.canonical_reduce(&r).unwrap();
        let half = ScalarPoly::ratio(1, 2);
        let mut expected = OperatorPoly::zero();
        expected.add_term(w(&[a, a]), half.clone());
        expected.add_term(w(&[ad, a]), ScalarPoly::one());
        expected.add_term(w(&[ad, ad]), half.clone());
        assert_eq!(r, expected);
        let diff = alg.canonical_reduce(&(&OperatorPoly::word(w(&[q, q])) - &r)).unwrap();
        assert_eq!(diff, OperatorPoly::scalar(half));

        assert!(matches!(
            order_word_foreign(&reg, &Ordering::normal(), &w(&[a]), &l),
            Err(GwtError::SymbolNotInBasis(_))
        ));
    }

    #[test]
    fn identity_basis_matches_direct_ordering() {
        let (reg, c1, cd2) = timed();
        let word = w(&[c1, cd2, c1]);
        assert_eq!(
            order_word_foreign(&reg, &Ordering::time(), &word, &BasisChange::identity()).unwrap(),
            order_word(&reg, &Ordering::time(), &word).unwrap()
        );
    }
}
