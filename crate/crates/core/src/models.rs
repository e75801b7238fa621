//! Builder for mode algebras and a few standard ones.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{GwtError, Result};
use crate::fock::ModeRegistry;
use crate::operator::{
    Algebra, CommutationTable, MixedSector, OperatorSymbol, ReferenceOrder, Registry, Statistics, SymbolId, Unlisted,
};
use crate::scalar::{GaussianRational, ScalarPoly, SquareRelations};

/// One ladder mode: an annihilator `name` and a creator `name†`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderMode {
    pub name: String,
    pub statistics: Statistics,
    pub annihilator: SymbolId,
    pub creator: SymbolId,
}

#[derive(Clone, Debug)]
pub struct Model {
    pub algebra: Algebra,
    pub modes: Vec<LadderMode>,
}

impl Model {
    pub fn sym(&self, name: &str) -> SymbolId {
        self.algebra.lookup(name).unwrap_or_else(|_| panic!("no symbol `{name}`"))
    }

    pub fn syms(&self, names: &[&str]) -> Vec<SymbolId> {
        names.iter().map(|n| self.sym(n)).collect()
    }

    /// Fock representation with every bosonic mode truncated at `truncation`.
    pub fn mode_registry(&self, truncation: usize) -> Result<ModeRegistry> {
        let mut reg = ModeRegistry::new();
        for m in &self.modes {
            let idx = match m.statistics {
                Statistics::Boson => reg.add_boson(&m.name, truncation)?,
                Statistics::Fermion => reg.add_fermion(&m.name),
            };
            reg.map_symbol(m.annihilator, idx, false);
            reg.map_symbol(m.creator, idx, true);
        }
        Ok(reg)
    }
}

enum Pending {
    Bracket(String, String, ScalarPoly),
    Define(String, Vec<(String, ScalarPoly)>),
}

#[derive(Default)]
pub struct ModelBuilder {
    registry: Registry,
    modes: Vec<(String, Statistics, String, String)>,
    pending: Vec<Pending>,
    relations: SquareRelations,
    unlisted: Option<Unlisted>,
    mixed: Option<MixedSector>,
    reference: Option<Vec<String>>,
}

fn key(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, sym: OperatorSymbol) -> Result<()> {
        self.registry.add(sym).map(|_| ())
    }

    /// Adds `name`, `name†` with `[name, name†]± = 1`.
    pub fn mode(mut self, name: &str, statistics: Statistics) -> Result<Self> {
        let dag = format!("{name}†");
        self.push(OperatorSymbol::new(name, statistics, key(0), false))?;
        self.push(OperatorSymbol::new(&dag, statistics, key(0), true))?;
        self.pending.push(Pending::Bracket(name.to_string(), dag.clone(), ScalarPoly::one()));
        self.modes.push((name.to_string(), statistics, name.to_string(), dag));
        Ok(self)
    }

    pub fn symbol(mut self, sym: OperatorSymbol) -> Result<Self> {
        self.push(sym)?;
        Ok(self)
    }

    pub fn bracket(mut self, a: &str, b: &str, value: ScalarPoly) -> Self {
        self.pending.push(Pending::Bracket(a.to_string(), b.to_string(), value));
        self
    }

    /// Declares a symbol `name = Σ c·base` with the statistics of its bases.
    pub fn defined(mut self, name: &str, key: BigRational, dagger: bool, combination: &[(&str, ScalarPoly)]) -> Result<Self> {
        let first = combination.first().ok_or_else(|| GwtError::InvalidTable(format!("empty definition of `{name}`")))?;
        let stats = self.registry.statistics(self.registry.lookup(first.0)?);
        self.push(OperatorSymbol::new(name, stats, key, dagger))?;
        self.pending.push(Pending::Define(
            name.to_string(),
            combination.iter().map(|(n, c)| (n.to_string(), c.clone())).collect(),
        ));
        Ok(self)
    }

    pub fn relation(mut self, symbol: &str, square: GaussianRational) -> Self {
        self.relations.insert(symbol, square);
        self
    }

    pub fn unlisted(mut self, u: Unlisted) -> Self {
        self.unlisted = Some(u);
        self
    }

    pub fn mixed_sector(mut self, m: MixedSector) -> Self {
        self.mixed = Some(m);
        self
    }

    pub fn reference_order(mut self, names: Vec<String>) -> Self {
        self.reference = Some(names);
        self
    }

    pub fn build(self) -> Result<Model> {
        let reg = self.registry;
        let mut table = CommutationTable::new(self.unlisted.unwrap_or(Unlisted::Zero));
        if let Some(m) = self.mixed {
            table = table.with_mixed_sector(m);
        }
        let mut defs = Vec::new();
        for p in self.pending {
            match p {
                Pending::Bracket(a, b, v) => table.set(reg.lookup(&a)?, reg.lookup(&b)?, v),
                Pending::Define(n, comb) => {
                    let comb = comb
                        .into_iter()
                        .map(|(s, c)| Ok((reg.lookup(&s)?, c)))
                        .collect::<Result<Vec<_>>>()?;
                    defs.push((reg.lookup(&n)?, comb));
                }
            }
        }
        let modes = self
            .modes
            .iter()
            .map(|(name, st, a, c)| {
                Ok(LadderMode { name: name.clone(), statistics: *st, annihilator: reg.lookup(a)?, creator: reg.lookup(c)? })
            })
            .collect::<Result<Vec<_>>>()?;
        let reference = match self.reference {
            Some(names) => Some(names.iter().map(|n| reg.lookup(n)).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        let mut alg = Algebra::new(reg, table)?.with_relations(self.relations);
        if let Some(r) = reference {
            alg = alg.with_reference_order(ReferenceOrder::Explicit(r));
        }
        for (s, comb) in defs {
            alg.define(s, comb)?;
        }
        Ok(Model { algebra: alg, modes })
    }
}

/// `a`, `a†` with `[a, a†] = 1`.
pub fn single_mode() -> Model {
    ModelBuilder::new().mode("a", Statistics::Boson).and_then(ModelBuilder::build).expect("static model")
}

/// `a`, `a†`, `b`, `b†`.
pub fn two_modes() -> Model {
    ModelBuilder::new()
        .mode("a", Statistics::Boson)
        .and_then(|b| b.mode("b", Statistics::Boson))
        .and_then(ModelBuilder::build)
        .expect("static model")
}

/// One mode with quadratures `q = s(a + a†)`, `p = −is(a − a†)` and `s² = ½`.
pub fn quadratures() -> Model {
    let s = ScalarPoly::symbol("s");
    let is = &ScalarPoly::i() * &s;
    ModelBuilder::new()
        .mode("a", Statistics::Boson)
        .and_then(|b| b.defined("q", key(0), false, &[("a", s.clone()), ("a†", s.clone())]))
        .and_then(|b| b.defined("p", key(0), false, &[("a", -&is), ("a†", is.clone())]))
        .map(|b| b.relation("s", GaussianRational::ratio(1, 2)))
        .and_then(ModelBuilder::build)
        .expect("static model")
}

/// `n` fermionic modes `c0, c1, …` with `{cᵢ, cⱼ†} = δᵢⱼ`.
pub fn fermion_modes(n: usize) -> ModelBuilder {
    let mut b = ModelBuilder::new();
    for k in 0..n {
        b = b.mode(&format!("c{k}"), Statistics::Fermion).expect("fresh names");
    }
    b
}

/// Adds the time-labelled field `base@t = phase · base` with key `t`.
pub fn timed(b: ModelBuilder, base: &str, time: i64, phase: GaussianRational) -> Result<ModelBuilder> {
    let dagger = base.ends_with('†');
    b.defined(&format!("{base}@{time}"), key(time), dagger, &[(base, phase.into())])
}

/// The numeric value `s = 1/√2` used by [`quadratures`].
pub fn quadrature_context() -> crate::scalar::NumericContext {
    crate::scalar::NumericContext::new().with("s", num_complex::Complex64::new(crate::math::sqrt(0.5), 0.0))
}

/// Symbol ids of a model keyed by name.
pub fn symbol_table(m: &Model) -> BTreeMap<String, SymbolId> {
    m.algebra.registry().ids().map(|s| (m.algebra.name(s).to_string(), s)).collect()
}
