//! JSON registry configs: symbols, brackets, definitions, orderings, basis
//! changes and numeric assignments. Exact values are strings (`"1/2"`,
//! `"-1/2 i"`, `"i*s"`) so nothing passes through floating point.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use gwt_core::fock::ModeRegistry;
use gwt_core::operator::{
    Algebra, CommutationTable, LinearCombination, MixedSector, OperatorSymbol, ReferenceOrder, Registry, Statistics,
    SymbolId, Unlisted,
};
use gwt_core::oracle::GwtPair;
use gwt_core::ordering::{BasisChange, Ordering, RankRule, Signature};
use gwt_core::scalar::{NumericContext, SquareRelations};
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::expr::Scope;
use crate::scalar::parse_scalar;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegistryConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub symbols: Vec<SymbolConfig>,
    #[serde(default)]
    pub brackets: Vec<BracketConfig>,
    #[serde(default)]
    pub unlisted: UnlistedConfig,
    #[serde(default)]
    pub mixed_sector: MixedConfig,
    #[serde(default)]
    pub scalars: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, String>,
    #[serde(default)]
    pub definitions: Vec<DefinitionConfig>,
    #[serde(default)]
    pub reference_order: Vec<String>,
    #[serde(default)]
    pub modes: Vec<ModeConfig>,
    #[serde(default)]
    pub numeric: BTreeMap<String, NumericValue>,
    #[serde(default)]
    pub orderings: Vec<OrderingConfig>,
    #[serde(default)]
    pub bases: Vec<BasisConfig>,
    #[serde(default)]
    pub pairs: Vec<PairConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolConfig {
    pub id: String,
    pub statistics: StatisticsConfig,
    #[serde(default = "zero_key")]
    pub key: String,
    #[serde(default)]
    pub dagger: bool,
}

fn zero_key() -> String {
    "0".into()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticsConfig {
    Boson,
    Fermion,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketConfig {
    pub lhs: String,
    pub rhs: String,
    pub value: String,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnlistedConfig {
    #[default]
    Zero,
    Error,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixedConfig {
    #[default]
    Commuting,
    Table,
}

/// `symbol = Σ coeff·base`, as `[base, coeff]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefinitionConfig {
    pub symbol: String,
    pub terms: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub name: String,
    pub annihilator: String,
    pub creator: String,
}

/// A real number or a `[re, im]` pair.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumericValue {
    Real(f64),
    Complex([f64; 2]),
}

impl NumericValue {
    pub fn value(self) -> Complex64 {
        match self {
            NumericValue::Real(x) => Complex64::new(x, 0.0),
            NumericValue::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderingConfig {
    pub name: String,
    /// `normal`, `antinormal`, `time-desc`, `qp`, `weyl` or `explicit`.
    pub rule: String,
    #[serde(default)]
    pub ranking: Vec<String>,
    #[serde(default)]
    pub signature: SignatureConfig,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignatureConfig {
    Bosonic,
    #[default]
    Fermionic,
}

/// A basis change `L`, either spelled out or read off symbol definitions.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    pub name: String,
    #[serde(default)]
    pub from_definitions: Vec<String>,
    #[serde(default)]
    pub rows: Vec<DefinitionConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub from: String,
    pub to: String,
    pub symbols: Vec<String>,
    #[serde(default)]
    pub basis: Option<String>,
    #[serde(default)]
    pub inverse: Option<InverseConfig>,
    /// Word alphabet for sweeps; defaults to `symbols`.
    #[serde(default)]
    pub pool: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InverseConfig {
    pub basis: String,
    pub targets: Vec<String>,
}

/// A config turned into core objects.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub config: RegistryConfig,
    pub algebra: Algebra,
    pub orderings: BTreeMap<String, Ordering>,
    pub bases: BTreeMap<String, BasisChange>,
    pub numeric: NumericContext,
    pub scope: Scope,
}

/// An ordering pair resolved against a config.
#[derive(Clone, Debug)]
pub struct ResolvedPair {
    pub o: Ordering,
    pub oprime: Ordering,
    pub basis: BasisChange,
    pub symbols: Vec<SymbolId>,
    pub pool: Vec<SymbolId>,
    pub inverse: Option<(BasisChange, Vec<SymbolId>)>,
}

impl ResolvedPair {
    pub fn gwt_pair(&self, alg: &Algebra) -> Result<GwtPair> {
        let pair = GwtPair::new(alg, self.o.clone(), self.oprime.clone(), self.basis.clone(), self.symbols.clone())?;
        Ok(match &self.inverse {
            Some((inv, targets)) => pair.with_inverse(alg, inv.clone(), targets)?,
            None => pair,
        })
    }
}

pub fn builtin_ordering(name: &str) -> Option<Ordering> {
    Some(match name {
        "N" | "normal" => Ordering::normal(),
        "A" | "antinormal" => Ordering::antinormal(),
        "W" | "weyl" => Ordering::weyl(),
        "T" | "time" | "time-desc" => Ordering::time(),
        "qp" => Ordering::qp(),
        _ => return None,
    })
}

fn parse_key(s: &str) -> Result<BigRational> {
    let v = parse_scalar(s)?;
    v.constant_value()
        .filter(|c| c.is_real())
        .map(|c| c.re().clone())
        .ok_or_else(|| CliError::Config(format!("key `{s}` is not a real rational")))
}

impl RegistryConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn load(self) -> Result<Loaded> {
        let mut reg = Registry::new();
        for s in &self.symbols {
            let stats = match s.statistics {
                StatisticsConfig::Boson => Statistics::Boson,
                StatisticsConfig::Fermion => Statistics::Fermion,
            };
            reg.add(OperatorSymbol::new(&s.id, stats, parse_key(&s.key)?, s.dagger))?;
        }
        let mut table = CommutationTable::new(match self.unlisted {
            UnlistedConfig::Zero => Unlisted::Zero,
            UnlistedConfig::Error => Unlisted::Error,
        })
        .with_mixed_sector(match self.mixed_sector {
            MixedConfig::Commuting => MixedSector::Commuting,
            MixedConfig::Table => MixedSector::Table,
        });
        for b in &self.brackets {
            table.set(reg.lookup(&b.lhs)?, reg.lookup(&b.rhs)?, parse_scalar(&b.value)?);
        }
        let mut relations = SquareRelations::new();
        for (name, square) in &self.relations {
            let v = parse_scalar(square)?
                .constant_value()
                .ok_or_else(|| CliError::Config(format!("relation for `{name}` is not a constant")))?;
            relations.insert(name, v);
        }
        let lc = |reg: &Registry, terms: &[(String, String)]| -> Result<LinearCombination> {
            terms.iter().map(|(s, c)| Ok((reg.lookup(s)?, parse_scalar(c)?))).collect()
        };
        let definitions = self
            .definitions
            .iter()
            .map(|d| Ok((reg.lookup(&d.symbol)?, lc(&reg, &d.terms)?)))
            .collect::<Result<Vec<_>>>()?;
        let reference = self.reference_order.iter().map(|n| Ok(reg.lookup(n)?)).collect::<Result<Vec<_>>>()?;
        let mut algebra = Algebra::new(reg, table)?.with_relations(relations);
        if !reference.is_empty() {
            algebra = algebra.with_reference_order(ReferenceOrder::Explicit(reference));
        }
        for (s, comb) in definitions {
            algebra.define(s, comb)?;
        }

        let mut orderings: BTreeMap<String, Ordering> = ["N", "A", "W", "T", "qp", "normal", "antinormal", "weyl", "time", "time-desc"]
            .iter()
            .filter_map(|n| builtin_ordering(n).map(|o| (n.to_string(), o)))
            .collect();
        for o in &self.orderings {
            let signature = match o.signature {
                SignatureConfig::Bosonic => Signature::Bosonic,
                SignatureConfig::Fermionic => Signature::Fermionic,
            };
            let rule = match o.rule.as_str() {
                "weyl" => {
                    orderings.insert(o.name.clone(), Ordering::Symmetric { name: o.name.clone() });
                    continue;
                }
                "normal" => RankRule::Normal,
                "antinormal" => RankRule::AntiNormal,
                "time-desc" | "time" => RankRule::TimeDescending,
                "qp" => RankRule::Qp,
                "explicit" => RankRule::Explicit(
                    o.ranking.iter().map(|n| Ok(algebra.lookup(n)?)).collect::<Result<Vec<_>>>()?,
                ),
                other => return Err(CliError::Config(format!("unknown ordering rule `{other}`"))),
            };
            orderings.insert(o.name.clone(), Ordering::permutation(&o.name, rule, signature));
        }

        let mut bases = BTreeMap::new();
        bases.insert("identity".to_string(), BasisChange::identity());
        for b in &self.bases {
            let basis = if !b.from_definitions.is_empty() {
                let src = b.from_definitions.iter().map(|n| Ok(algebra.lookup(n)?)).collect::<Result<Vec<_>>>()?;
                BasisChange::from_algebra(&algebra, &src)
            } else {
                let rows = b
                    .rows
                    .iter()
                    .map(|r| Ok((algebra.lookup(&r.symbol)?, lc(algebra.registry(), &r.terms)?)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                BasisChange::new(rows)?
            };
            bases.insert(b.name.clone(), basis);
        }

        let mut numeric = NumericContext::new();
        for (name, v) in &self.numeric {
            numeric.set(name, v.value());
        }

        let mut scope = Scope::from_algebra(&algebra);
        scope.scalars = self.scalars.iter().cloned().chain(self.relations.keys().cloned()).collect::<BTreeSet<_>>();
        scope.orderings = orderings.keys().cloned().collect();

        let loaded = Loaded { config: self, algebra, orderings, bases, numeric, scope };
        for p in &loaded.config.pairs {
            loaded.resolve_pair_config(p)?;
        }
        Ok(loaded)
    }
}

impl Loaded {
    pub fn ordering(&self, name: &str) -> Result<Ordering> {
        self.orderings.get(name).cloned().ok_or_else(|| CliError::UnknownOrdering(name.to_string()))
    }

    pub fn symbols(&self, names: &[String]) -> Result<Vec<SymbolId>> {
        names.iter().map(|n| Ok(self.algebra.lookup(n)?)).collect()
    }

    fn basis(&self, name: &str) -> Result<BasisChange> {
        self.bases.get(name).cloned().ok_or_else(|| CliError::Config(format!("unknown basis `{name}`")))
    }

    fn resolve_pair_config(&self, p: &PairConfig) -> Result<ResolvedPair> {
        let symbols = self.symbols(&p.symbols)?;
        let pool = if p.pool.is_empty() { symbols.clone() } else { self.symbols(&p.pool)? };
        let inverse = match &p.inverse {
            Some(inv) => Some((self.basis(&inv.basis)?, self.symbols(&inv.targets)?)),
            None => None,
        };
        Ok(ResolvedPair {
            o: self.ordering(&p.from)?,
            oprime: self.ordering(&p.to)?,
            basis: self.basis(p.basis.as_deref().unwrap_or("identity"))?,
            symbols,
            pool,
            inverse,
        })
    }

    /// All configured pairs, in file order.
    pub fn pairs(&self) -> Result<Vec<ResolvedPair>> {
        self.config.pairs.iter().map(|p| self.resolve_pair_config(p)).collect()
    }

    /// The configured pair `from → to`, or an identity-basis pair over all
    /// undefined symbols when none is configured.
    pub fn pair(&self, from: &str, to: &str) -> Result<ResolvedPair> {
        let (o, oprime) = (self.ordering(from)?, self.ordering(to)?);
        let found = self.config.pairs.iter().find(|p| {
            self.ordering(&p.from).map(|x| x == o).unwrap_or(false)
                && self.ordering(&p.to).map(|x| x == oprime).unwrap_or(false)
        });
        if let Some(p) = found {
            return self.resolve_pair_config(p);
        }
        let symbols: Vec<SymbolId> =
            self.algebra.registry().ids().filter(|s| !self.algebra.is_defined(*s)).collect();
        Ok(ResolvedPair { o, oprime, basis: BasisChange::identity(), pool: symbols.clone(), symbols, inverse: None })
    }

    /// Fock layout of the configured modes, bosons truncated at `truncation`.
    pub fn mode_registry(&self, truncation: usize) -> Result<ModeRegistry> {
        if self.config.modes.is_empty() {
            return Err(CliError::Config("config declares no modes".into()));
        }
        let mut modes = ModeRegistry::new();
        for m in &self.config.modes {
            let (a, c) = (self.algebra.lookup(&m.annihilator)?, self.algebra.lookup(&m.creator)?);
            let idx = match self.algebra.statistics(a) {
                Statistics::Boson => modes.add_boson(&m.name, truncation)?,
                Statistics::Fermion => modes.add_fermion(&m.name),
            };
            modes.map_symbol(a, idx, false);
            modes.map_symbol(c, idx, true);
        }
        Ok(modes)
    }
}
