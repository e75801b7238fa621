//! Operator words, operator polynomials and the commutation data that decides
//! operator equality.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{GwtError, Result};
use crate::scalar::{GaussianRational, ScalarPoly, SquareRelations};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    pub fn is_fermion(self) -> bool {
        self == Statistics::Fermion
    }
}

/// A labelled generator `φ̂_α`.
///
/// `key` is the totally ordered label used by time-like orderings; `dagger`
/// is what normal and anti-normal ordering look at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSymbol {
    pub id: String,
    pub statistics: Statistics,
    pub key: BigRational,
    pub dagger: bool,
}

impl OperatorSymbol {
    pub fn new(id: &str, statistics: Statistics, key: BigRational, dagger: bool) -> Self {
        Self { id: id.to_string(), statistics, key, dagger }
    }

    pub fn boson(id: &str, key: i64, dagger: bool) -> Self {
        Self::new(id, Statistics::Boson, BigRational::from_integer(key.into()), dagger)
    }

    pub fn fermion(id: &str, key: i64, dagger: bool) -> Self {
        Self::new(id, Statistics::Fermion, BigRational::from_integer(key.into()), dagger)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Registry {
    symbols: Vec<OperatorSymbol>,
    index: BTreeMap<String, SymbolId>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, symbol: OperatorSymbol) -> Result<SymbolId> {
        if self.index.contains_key(&symbol.id) {
            return Err(GwtError::InvalidTable(format!("duplicate symbol `{}`", symbol.id)));
        }
        let id = SymbolId(self.symbols.len() as u32);
        self.index.insert(symbol.id.clone(), id);
        self.symbols.push(symbol);
        Ok(id)
    }

    pub fn get(&self, id: SymbolId) -> &OperatorSymbol {
        &self.symbols[id.index()]
    }

    pub fn lookup(&self, name: &str) -> Result<SymbolId> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| GwtError::UnknownSymbol(name.to_string()))
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id.index()].id
    }

    pub fn statistics(&self, id: SymbolId) -> Statistics {
        self.symbols[id.index()].statistics
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = SymbolId> {
        (0..self.symbols.len() as u32).map(SymbolId)
    }
}

/// An ordered product of generators; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<SymbolId>);

impl Word {
    pub fn new(factors: Vec<SymbolId>) -> Self {
        Self(factors)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn single(s: SymbolId) -> Self {
        Self(alloc::vec![s])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[SymbolId] {
        &self.0
    }

    pub fn into_factors(self) -> Vec<SymbolId> {
        self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Word with the factor at `pos` removed.
    pub fn without(&self, pos: usize) -> Word {
        let mut v = self.0.clone();
        v.remove(pos);
        Word(v)
    }

    pub fn display<'a>(&'a self, reg: &'a Registry) -> WordDisplay<'a> {
        WordDisplay { word: self, reg }
    }
}

impl From<Vec<SymbolId>> for Word {
    fn from(v: Vec<SymbolId>) -> Self {
        Word(v)
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    reg: &'a Registry,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("1");
        }
        for (k, s) in self.word.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            f.write_str(self.reg.name(*s))?;
        }
        Ok(())
    }
}

/// A finite sum `Σ c_w · w` of words with c-number coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OperatorPoly {
    terms: BTreeMap<Word, ScalarPoly>,
}

impl OperatorPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(ScalarPoly::one())
    }

    pub fn scalar(c: ScalarPoly) -> Self {
        Self::term(Word::empty(), c)
    }

    pub fn symbol(s: SymbolId) -> Self {
        Self::term(Word::single(s), ScalarPoly::one())
    }

    pub fn word(w: Word) -> Self {
        Self::term(w, ScalarPoly::one())
    }

    pub fn term(w: Word, c: ScalarPoly) -> Self {
        let mut p = Self::zero();
        p.add_term(w, c);
        p
    }

    pub fn add_term(&mut self, w: Word, c: ScalarPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &OperatorPoly, c: &ScalarPoly) {
        if c.is_zero() {
            return;
        }
        for (w, v) in &other.terms {
            self.add_term(w.clone(), v * c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &ScalarPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> ScalarPoly {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    /// Longest word length; 0 for scalars and for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    /// The coefficient of the empty word when nothing else is present.
    pub fn as_scalar(&self) -> Option<ScalarPoly> {
        match self.terms.len() {
            0 => Some(ScalarPoly::zero()),
            1 => self.terms.get(&Word::empty()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &ScalarPoly) -> OperatorPoly {
        let mut out = OperatorPoly::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn map_coefficients(&self, f: impl Fn(&ScalarPoly) -> ScalarPoly) -> OperatorPoly {
        let mut out = OperatorPoly::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    pub fn pow(&self, n: u32) -> OperatorPoly {
        let mut acc = OperatorPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn display<'a>(&'a self, reg: &'a Registry) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, reg }
    }

    /// Terms ordered for presentation: highest degree first, then by word.
    pub fn presentation_order(&self) -> Vec<(&Word, &ScalarPoly)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(b.0)));
        v
    }
}

/// Concatenation product, bilinear in the coefficients.
pub fn multiply(a: &OperatorPoly, b: &OperatorPoly) -> OperatorPoly {
    a * b
}

impl<'a> Add<&'a OperatorPoly> for &'a OperatorPoly {
    type Output = OperatorPoly;
    fn add(self, rhs: &OperatorPoly) -> OperatorPoly {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a OperatorPoly> for &'a OperatorPoly {
    type Output = OperatorPoly;
    fn sub(self, rhs: &OperatorPoly) -> OperatorPoly {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a OperatorPoly> for &'a OperatorPoly {
    type Output = OperatorPoly;
    fn mul(self, rhs: &OperatorPoly) -> OperatorPoly {
        let mut out = OperatorPoly::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &rhs.terms {
                out.add_term(wa.concat(wb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &OperatorPoly {
    type Output = OperatorPoly;
    fn neg(self) -> OperatorPoly {
        self.map_coefficients(|c| -c)
    }
}

impl Add for OperatorPoly {
    type Output = OperatorPoly;
    fn add(self, rhs: OperatorPoly) -> OperatorPoly {
        &self + &rhs
    }
}

impl Sub for OperatorPoly {
    type Output = OperatorPoly;
    fn sub(self, rhs: OperatorPoly) -> OperatorPoly {
        &self - &rhs
    }
}

impl Mul for OperatorPoly {
    type Output = OperatorPoly;
    fn mul(self, rhs: OperatorPoly) -> OperatorPoly {
        &self * &rhs
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a OperatorPoly,
    reg: &'a Registry,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.poly.presentation_order().into_iter().enumerate() {
            let word = w.display(self.reg).to_string();
            let (negative, body) = format_coefficient(c, if w.is_empty() { None } else { Some(&word) });
            match (k, negative) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

/// Renders `c·word` as `(negative?, text)` with the sign pulled out when the
/// coefficient is a negative rational.
pub fn format_coefficient(c: &ScalarPoly, word: Option<&str>) -> (bool, String) {
    if let Some(v) = c.constant_value() {
        let negative = v.is_real() && v.re() < &BigRational::zero();
        let shown = if negative { -v } else { v };
        let one = num_traits::One::is_one(&shown);
        let text = match word {
            None => shown.to_string(),
            Some(w) if one => w.to_string(),
            Some(w) if shown.is_real() => format!("{shown}*{w}"),
            Some(w) => format!("({shown})*{w}"),
        };
        return (negative, text);
    }
    let text = match word {
        None => format!("({c})"),
        Some(w) => format!("({c})*{w}"),
    };
    (false, text)
}

/// Behaviour for pairs absent from the table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unlisted {
    Zero,
    Error,
}

/// Rule for boson–fermion pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MixedSector {
    /// `[b, f] = 0`; any nonzero table entry is rejected.
    Commuting,
    /// Commutator values read from the table (experimental).
    Table,
}

/// The c-number brackets `[φ̂_α, φ̂_β]_∓`: commutators between bosons,
/// anticommutators between fermions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutationTable {
    entries: BTreeMap<(SymbolId, SymbolId), ScalarPoly>,
    unlisted: Unlisted,
    mixed: MixedSector,
}

impl CommutationTable {
    pub fn new(unlisted: Unlisted) -> Self {
        Self { entries: BTreeMap::new(), unlisted, mixed: MixedSector::Commuting }
    }

    pub fn with_mixed_sector(mut self, rule: MixedSector) -> Self {
        self.mixed = rule;
        self
    }

    pub fn mixed_sector(&self) -> MixedSector {
        self.mixed
    }

    pub fn unlisted(&self) -> Unlisted {
        self.unlisted
    }

    pub fn set(&mut self, a: SymbolId, b: SymbolId, value: ScalarPoly) {
        self.entries.insert((a, b), value);
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(SymbolId, SymbolId), &ScalarPoly)> {
        self.entries.iter()
    }

    pub fn has_entry(&self, a: SymbolId, b: SymbolId) -> bool {
        self.entries.contains_key(&(a, b)) || self.entries.contains_key(&(b, a))
    }

    /// Checks the parity axioms of every stored entry.
    pub fn validate(&self, reg: &Registry) -> Result<()> {
        for (&(a, b), v) in &self.entries {
            let (sa, sb) = (reg.statistics(a), reg.statistics(b));
            let pair = || format!("({}, {})", reg.name(a), reg.name(b));
            match (sa, sb) {
                (Statistics::Boson, Statistics::Boson) => {
                    if a == b && !v.is_zero() {
                        return Err(GwtError::InvalidTable(format!("[x, x] ≠ 0 for {}", pair())));
                    }
                    if let Some(w) = self.entries.get(&(b, a)) {
                        if !(v + w).is_zero() {
                            return Err(GwtError::InvalidTable(format!(
                                "commutator not antisymmetric for {}",
                                pair()
                            )));
                        }
                    }
                }
                (Statistics::Fermion, Statistics::Fermion) => {
                    if let Some(w) = self.entries.get(&(b, a)) {
                        if v != w {
                            return Err(GwtError::InvalidTable(format!(
                                "anticommutator not symmetric for {}",
                                pair()
                            )));
                        }
                    }
                }
                _ => {
                    if self.mixed == MixedSector::Commuting && !v.is_zero() {
                        return Err(GwtError::InvalidTable(format!(
                            "nonzero boson–fermion bracket {} without a mixed-sector rule",
                            pair()
                        )));
                    }
                    if let Some(w) = self.entries.get(&(b, a)) {
                        if !(v + w).is_zero() {
                            return Err(GwtError::InvalidTable(format!(
                                "mixed commutator not antisymmetric for {}",
                                pair()
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `[α, β]` for bosons, `{α, β}` for fermions, the sector rule otherwise.
    pub fn bracket(&self, reg: &Registry, a: SymbolId, b: SymbolId) -> Result<ScalarPoly> {
        let missing = || match self.unlisted {
            Unlisted::Zero => Ok(ScalarPoly::zero()),
            Unlisted::Error => Err(GwtError::MissingEntry(reg.name(a).to_string(), reg.name(b).to_string())),
        };
        match (reg.statistics(a), reg.statistics(b)) {
            (Statistics::Fermion, Statistics::Fermion) => {
                match self.entries.get(&(a, b)).or_else(|| self.entries.get(&(b, a))) {
                    Some(v) => Ok(v.clone()),
                    None => missing(),
                }
            }
            (Statistics::Boson, Statistics::Boson) | (_, _) => {
                let mixed = reg.statistics(a) != reg.statistics(b);
                if mixed && self.mixed == MixedSector::Commuting {
                    return Ok(ScalarPoly::zero());
                }
                if a == b {
                    return Ok(ScalarPoly::zero());
                }
                if let Some(v) = self.entries.get(&(a, b)) {
                    Ok(v.clone())
                } else if let Some(v) = self.entries.get(&(b, a)) {
                    Ok(-v)
                } else {
                    missing()
                }
            }
        }
    }
}

/// Free function form of [`CommutationTable::bracket`].
pub fn bracket(reg: &Registry, table: &CommutationTable, a: SymbolId, b: SymbolId) -> Result<ScalarPoly> {
    table.bracket(reg, a, b)
}

/// A linear combination `Σ c_k · φ̂_k`.
pub type LinearCombination = Vec<(SymbolId, ScalarPoly)>;

/// Total order used by [`Algebra::canonical_reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReferenceOrder {
    /// Daggered symbols first, then ascending key, then id.
    DaggerFirst,
    /// Listed symbols first in the given order, the rest as `DaggerFirst`.
    Explicit(Vec<SymbolId>),
}

/// Registry, brackets, symbol definitions and scalar relations: everything
/// needed to decide whether two operator polynomials are equal.
///
/// A *defined* symbol such as `q = s·(a + a†)` is a linear combination of
/// base symbols; canonical reduction always expands definitions first, so
/// the reduced form lives entirely over base symbols.
#[derive(Clone, Debug)]
pub struct Algebra {
    registry: Registry,
    table: CommutationTable,
    definitions: BTreeMap<SymbolId, LinearCombination>,
    relations: SquareRelations,
    reference: ReferenceOrder,
    ref_rank: Vec<u32>,
}

impl Algebra {
    pub fn new(registry: Registry, table: CommutationTable) -> Result<Self> {
        table.validate(&registry)?;
        let mut alg = Self {
            registry,
            table,
            definitions: BTreeMap::new(),
            relations: SquareRelations::new(),
            reference: ReferenceOrder::DaggerFirst,
            ref_rank: Vec::new(),
        };
        alg.rebuild_ranks();
        Ok(alg)
    }

    pub fn with_relations(mut self, relations: SquareRelations) -> Self {
        self.relations = relations;
        self
    }

    pub fn with_reference_order(mut self, order: ReferenceOrder) -> Self {
        self.reference = order;
        self.rebuild_ranks();
        self
    }

    fn rebuild_ranks(&mut self) {
        let mut ids: Vec<SymbolId> = self.registry.ids().collect();
        ids.sort_by(|&x, &y| {
            let (sx, sy) = (self.registry.get(x), self.registry.get(y));
            (!sx.dagger, &sx.key, &sx.id).cmp(&(!sy.dagger, &sy.key, &sy.id))
        });
        if let ReferenceOrder::Explicit(list) = &self.reference {
            let mut front: Vec<SymbolId> = Vec::new();
            for s in list {
                if !front.contains(s) {
                    front.push(*s);
                }
            }
            ids.retain(|s| !front.contains(s));
            front.extend(ids);
            ids = front;
        }
        let mut rank = alloc::vec![0u32; ids.len()];
        for (pos, s) in ids.iter().enumerate() {
            rank[s.index()] = pos as u32;
        }
        self.ref_rank = rank;
    }

    /// Declares `symbol = Σ c_k · base_k`. Targets must be base symbols of
    /// matching statistics.
    pub fn define(&mut self, symbol: SymbolId, combination: LinearCombination) -> Result<()> {
        let stats = self.registry.statistics(symbol);
        for (t, _) in &combination {
            if self.definitions.contains_key(t) || *t == symbol {
                return Err(GwtError::InvalidTable(format!(
                    "definition of `{}` refers to non-base symbol `{}`",
                    self.registry.name(symbol),
                    self.registry.name(*t)
                )));
            }
            if self.registry.statistics(*t) != stats {
                return Err(GwtError::InvalidTable(format!(
                    "definition of `{}` mixes statistics",
                    self.registry.name(symbol)
                )));
            }
        }
        if self.definitions.values().any(|c| c.iter().any(|(t, _)| *t == symbol)) {
            return Err(GwtError::InvalidTable(format!(
                "`{}` is already used as a base symbol",
                self.registry.name(symbol)
            )));
        }
        self.definitions.insert(symbol, combination);
        Ok(())
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn table(&self) -> &CommutationTable {
        &self.table
    }

    pub fn relations(&self) -> &SquareRelations {
        &self.relations
    }

    pub fn is_defined(&self, s: SymbolId) -> bool {
        self.definitions.contains_key(&s)
    }

    pub fn definition(&self, s: SymbolId) -> Option<&LinearCombination> {
        self.definitions.get(&s)
    }

    pub fn statistics(&self, s: SymbolId) -> Statistics {
        self.registry.statistics(s)
    }

    pub fn name(&self, s: SymbolId) -> &str {
        self.registry.name(s)
    }

    pub fn lookup(&self, name: &str) -> Result<SymbolId> {
        self.registry.lookup(name)
    }

    /// Position in the canonical reference order.
    pub fn reference_rank(&self, s: SymbolId) -> u32 {
        self.ref_rank[s.index()]
    }

    pub fn normalize_scalar(&self, c: &ScalarPoly) -> ScalarPoly {
        c.reduce(&self.relations)
    }

    /// The expansion of `s` over base symbols (itself when not defined).
    pub fn expansion(&self, s: SymbolId) -> LinearCombination {
        match self.definitions.get(&s) {
            Some(c) => c.clone(),
            None => alloc::vec![(s, ScalarPoly::one())],
        }
    }

    /// Bracket of any two symbols. Explicit table entries win; otherwise
    /// defined symbols are expanded bilinearly.
    pub fn bracket(&self, a: SymbolId, b: SymbolId) -> Result<ScalarPoly> {
        let direct = !(self.is_defined(a) || self.is_defined(b)) || self.table.has_entry(a, b);
        if direct {
            return Ok(self.normalize_scalar(&self.table.bracket(&self.registry, a, b)?));
        }
        let mut acc = ScalarPoly::zero();
        for (x, cx) in self.expansion(a) {
            for (y, cy) in self.expansion(b) {
                let v = self.table.bracket(&self.registry, x, y)?;
                acc.add_assign_ref(&(&(&cx * &cy) * &v));
            }
        }
        Ok(self.normalize_scalar(&acc))
    }

    /// Replaces every defined symbol by its expansion.
    pub fn expand(&self, p: &OperatorPoly) -> OperatorPoly {
        if self.definitions.is_empty() {
            return p.clone();
        }
        let mut out = OperatorPoly::zero();
        for (w, c) in p.terms() {
            let mut partial: Vec<(Vec<SymbolId>, ScalarPoly)> = alloc::vec![(Vec::new(), c.clone())];
            for s in w.factors() {
                match self.definitions.get(s) {
                    None => partial.iter_mut().for_each(|(v, _)| v.push(*s)),
                    Some(comb) => {
                        let mut next = Vec::with_capacity(partial.len() * comb.len());
                        for (v, cv) in &partial {
                            for (t, ct) in comb {
                                let mut nv = v.clone();
                                nv.push(*t);
                                next.push((nv, cv * ct));
                            }
                        }
                        partial = next;
                    }
                }
            }
            for (v, cv) in partial {
                out.add_term(Word::new(v), cv);
            }
        }
        out
    }

    pub fn canonical_reduce(&self, p: &OperatorPoly) -> Result<OperatorPoly> {
        Reducer::new(self).reduce(p)
    }

    pub fn poly_equal(&self, a: &OperatorPoly, b: &OperatorPoly) -> Result<bool> {
        Ok(self.canonical_reduce(&(a - b))?.is_zero())
    }

    /// The scalar value of `p` if it reduces to a c-number.
    pub fn reduce_to_scalar(&self, p: &OperatorPoly) -> Result<Option<ScalarPoly>> {
        Ok(self.canonical_reduce(p)?.as_scalar())
    }
}

/// Canonical rewriting with a per-word memo.
///
/// Every word is sorted into the reference order by adjacent transpositions
/// `xy → ±yx + [x, y]_∓`; repeated adjacent fermions collapse via
/// `xx = ½{x, x}`. Reuse one `Reducer` across many calls to share the memo.
pub struct Reducer<'a> {
    alg: &'a Algebra,
    cache: BTreeMap<Word, OperatorPoly>,
    steps: u64,
}

impl<'a> Reducer<'a> {
    pub fn new(alg: &'a Algebra) -> Self {
        Self { alg, cache: BTreeMap::new(), steps: 0 }
    }

    /// Number of rewriting steps performed so far (memo hits excluded).
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn reduce(&mut self, p: &OperatorPoly) -> Result<OperatorPoly> {
        let expanded = self.alg.expand(p);
        let mut out = OperatorPoly::zero();
        for (w, c) in expanded.terms() {
            let r = self.reduce_word(w)?;
            out.add_scaled(&r, c);
        }
        Ok(out.map_coefficients(|c| self.alg.normalize_scalar(c)))
    }

    fn rewrite_position(&self, w: &[SymbolId]) -> Option<usize> {
        let alg = self.alg;
        w.windows(2).position(|pair| {
            let (x, y) = (pair[0], pair[1]);
            alg.reference_rank(x) > alg.reference_rank(y)
                || (x == y && alg.statistics(x).is_fermion())
        })
    }

    fn reduce_word(&mut self, w: &Word) -> Result<OperatorPoly> {
        if let Some(hit) = self.cache.get(w) {
            return Ok(hit.clone());
        }
        let f = w.factors();
        let result = match self.rewrite_position(f) {
            None => OperatorPoly::word(w.clone()),
            Some(i) => {
                self.steps += 1;
                let (x, y) = (f[i], f[i + 1]);
                let mut shorter = f.to_vec();
                shorter.drain(i..i + 2);
                let shorter = Word::new(shorter);
                let both_fermions = self.alg.statistics(x).is_fermion() && self.alg.statistics(y).is_fermion();
                if x == y {
                    // xx = ½{x, x}
                    let half = self.alg.bracket(x, x)?.scale(&GaussianRational::ratio(1, 2));
                    if half.is_zero() {
                        OperatorPoly::zero()
                    } else {
                        self.reduce_word(&shorter)?.scale(&half)
                    }
                } else {
                    let mut swapped = f.to_vec();
                    swapped.swap(i, i + 1);
                    let swapped = Word::new(swapped);
                    let bracket = self.alg.bracket(x, y)?;
                    let mut acc = self.reduce_word(&swapped)?;
                    if both_fermions {
                        acc = -&acc;
                    }
                    if !bracket.is_zero() {
                        let tail = self.reduce_word(&shorter)?;
                        acc.add_scaled(&tail, &bracket);
                    }
                    acc
                }
            }
        };
        self.cache.insert(w.clone(), result.clone());
        Ok(result)
    }
}

/// Free function form of [`Algebra::canonical_reduce`].
pub fn canonical_reduce(alg: &Algebra, p: &OperatorPoly) -> Result<OperatorPoly> {
    alg.canonical_reduce(p)
}

/// `true` iff `a − b` reduces to zero.
pub fn poly_equal(alg: &Algebra, a: &OperatorPoly, b: &OperatorPoly) -> Result<bool> {
    alg.poly_equal(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_mode() -> (Algebra, SymbolId, SymbolId) {
        let mut reg = Registry::new();
        let a = reg.add(OperatorSymbol::boson("a", 0, false)).unwrap();
        let ad = reg.add(OperatorSymbol::boson("a†", 0, true)).unwrap();
        let mut t = CommutationTable::new(Unlisted::Error);
        t.set(a, ad, ScalarPoly::one());
        (Algebra::new(reg, t).unwrap(), a, ad)
    }

    fn fermion_mode() -> (Algebra, SymbolId, SymbolId) {
        let mut reg = Registry::new();
        let c = reg.add(OperatorSymbol::fermion("c", 0, false)).unwrap();
        let cd = reg.add(OperatorSymbol::fermion("c†", 0, true)).unwrap();
        let mut t = CommutationTable::new(Unlisted::Zero);
        t.set(c, cd, ScalarPoly::one());
        (Algebra::new(reg, t).unwrap(), c, cd)
    }

    fn w(v: &[SymbolId]) -> OperatorPoly {
        OperatorPoly::word(Word::new(v.to_vec()))
    }

    #[test]
    fn multiply_concatenates() {
        let (alg, a, ad) = single_mode();
        let p = multiply(&OperatorPoly::symbol(a), &OperatorPoly::symbol(ad));
        assert_eq!(p, w(&[a, ad]));
        assert!(multiply(&OperatorPoly::zero(), &p).is_zero());
        let _ = alg;
    }

    #[test]
    fn bracket_lookup_and_parity() {
        let (alg, a, ad) = single_mode();
        assert_eq!(alg.bracket(a, ad).unwrap(), ScalarPoly::one());
        assert_eq!(alg.bracket(ad, a).unwrap(), ScalarPoly::integer(-1));
        assert_eq!(alg.bracket(a, a).unwrap(), ScalarPoly::zero());
        let (falg, c, cd) = fermion_mode();
        assert_eq!(falg.bracket(c, cd).unwrap(), ScalarPoly::one());
        assert_eq!(falg.bracket(cd, c).unwrap(), ScalarPoly::one());
    }

    #[test]
    fn missing_entry_is_an_error() {
        let mut reg = Registry::new();
        let x = reg.add(OperatorSymbol::boson("x", 0, false)).unwrap();
        let y = reg.add(OperatorSymbol::boson("y", 1, false)).unwrap();
        let alg = Algebra::new(reg, CommutationTable::new(Unlisted::Error)).unwrap();
        assert!(matches!(alg.bracket(x, y), Err(GwtError::MissingEntry(_, _))));
    }

    #[test]
    fn single_commutator_step() {
        let (alg, a, ad) = single_mode();
        let r = alg.canonical_reduce(&w(&[a, ad])).unwrap();
        assert_eq!(r, &w(&[ad, a]) + &OperatorPoly::one());
    }

    #[test]
    fn single_anticommutator_step() {
        let (alg, c, cd) = fermion_mode();
        let r = alg.canonical_reduce(&w(&[c, cd])).unwrap();
        assert_eq!(r, &(-&w(&[cd, c])) + &OperatorPoly::one());
    }

    #[test]
    fn two_step_reduction() {
        let (alg, a, ad) = single_mode();
        let r = alg.canonical_reduce(&w(&[a, ad, a])).unwrap();
        assert_eq!(r, &w(&[ad, a, a]) + &w(&[a]));
    }

    #[test]
    fn equality_examples() {
        let (alg, a, ad) = single_mode();
        assert!(alg.poly_equal(&w(&[a, ad]), &(&w(&[ad, a]) + &OperatorPoly::one())).unwrap());
        assert!(!alg.poly_equal(&w(&[a, ad]), &w(&[ad, a])).unwrap());
        let (falg, c, _) = fermion_mode();
        assert!(falg.poly_equal(&w(&[c, c]), &OperatorPoly::zero()).unwrap());
    }

    #[test]
    fn repeated_fermion_with_nonzero_square() {
        let mut reg = Registry::new();
        let g = reg.add(OperatorSymbol::fermion("γ", 0, false)).unwrap();
        let mut t = CommutationTable::new(Unlisted::Zero);
        t.set(g, g, ScalarPoly::integer(2));
        let alg = Algebra::new(reg, t).unwrap();
        assert_eq!(alg.canonical_reduce(&w(&[g, g, g])).unwrap(), w(&[g]));
    }

    #[test]
    fn table_validation() {
        let mut reg = Registry::new();
        let a = reg.add(OperatorSymbol::boson("a", 0, false)).unwrap();
        let b = reg.add(OperatorSymbol::boson("b", 0, false)).unwrap();
        let c = reg.add(OperatorSymbol::fermion("c", 0, false)).unwrap();
        let mut t = CommutationTable::new(Unlisted::Zero);
        t.set(a, b, ScalarPoly::one());
        t.set(b, a, ScalarPoly::one());
        assert!(Algebra::new(reg.clone(), t).is_err());
        let mut t = CommutationTable::new(Unlisted::Zero);
        t.set(a, c, ScalarPoly::one());
        assert!(Algebra::new(reg.clone(), t.clone()).is_err());
        assert!(Algebra::new(reg, t.with_mixed_sector(MixedSector::Table)).is_ok());
    }

    #[test]
    fn defined_symbols_expand_before_reduction() {
        let (mut alg, a, ad) = single_mode();
        let mut reg = alg.registry().clone();
        let x = reg.add(OperatorSymbol::boson("x", 0, false)).unwrap();
        let mut rebuilt = Algebra::new(reg, alg.table().clone()).unwrap();
        rebuilt.define(x, alloc::vec![(a, ScalarPoly::one()), (ad, ScalarPoly::one())]).unwrap();
        alg = rebuilt;
        // x·x = a·a + 2 a†·a + a†·a† + 1
        let r = alg.canonical_reduce(&w(&[x, x])).unwrap();
        let mut expected = &w(&[a, a]) + &w(&[ad, ad]);
        expected.add_term(Word::new(alloc::vec![ad, a]), ScalarPoly::integer(2));
        expected.add_term(Word::empty(), ScalarPoly::one());
        assert_eq!(r, expected);
        assert_eq!(alg.bracket(x, a).unwrap(), ScalarPoly::integer(-1));
    }

    #[test]
    fn display_puts_highest_degree_first() {
        let (alg, a, ad) = single_mode();
        let r = alg.canonical_reduce(&w(&[a, ad])).unwrap();
        assert_eq!(r.display(alg.registry()).to_string(), "a†*a + 1");
    }
}
