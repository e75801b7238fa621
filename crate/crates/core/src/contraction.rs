//! Contractions `C_{αβ} = (O − O′) φ̂_α φ̂_β` between two orderings.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{GwtError, Result};
use crate::operator::{Algebra, LinearCombination, OperatorPoly, Statistics, SymbolId, Word};
use crate::ordering::{order_poly, order_word, order_word_foreign, BasisChange, Ordering, Signature};
use crate::scalar::ScalarPoly;

/// Exchange symmetry of a contraction matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Symmetric,
    Antisymmetric,
    /// Boson and fermion symbols together; each pair follows its statistics.
    Graded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionMatrix {
    symbols: Vec<SymbolId>,
    entries: BTreeMap<(SymbolId, SymbolId), ScalarPoly>,
    parity: Parity,
    pair: Option<(Ordering, Ordering)>,
}

impl ContractionMatrix {
    /// A matrix with no provenance; `gwt_substitution` will refuse it.
    pub fn from_entries(
        alg: &Algebra,
        symbols: Vec<SymbolId>,
        entries: BTreeMap<(SymbolId, SymbolId), ScalarPoly>,
    ) -> Self {
        let parity = parity_of(alg, &symbols);
        let entries = entries.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Self { symbols, entries, parity, pair: None }
    }

    pub fn symbols(&self) -> &[SymbolId] {
        &self.symbols
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn get(&self, a: SymbolId, b: SymbolId) -> ScalarPoly {
        self.entries.get(&(a, b)).cloned().unwrap_or_default()
    }

    /// Nonzero entries only.
    pub fn entries(&self) -> impl Iterator<Item = (&(SymbolId, SymbolId), &ScalarPoly)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ordering_pair(&self) -> Option<(&Ordering, &Ordering)> {
        self.pair.as_ref().map(|(o, p)| (o, p))
    }

    pub fn generated_by(&self, o: &Ordering, oprime: &Ordering) -> bool {
        matches!(&self.pair, Some((a, b)) if a == o && b == oprime)
    }

    pub fn negate(&self) -> Self {
        Self {
            symbols: self.symbols.clone(),
            entries: self.entries.iter().map(|(k, v)| (*k, -v)).collect(),
            parity: self.parity,
            pair: self.pair.as_ref().map(|(a, b)| (b.clone(), a.clone())),
        }
    }

    /// Checks `C_{βα} = ±C_{αβ}` pair by pair according to statistics.
    pub fn check_parity(&self, alg: &Algebra) -> bool {
        self.symbols.iter().all(|&a| {
            self.symbols.iter().all(|&b| {
                let (x, y) = (self.get(a, b), self.get(b, a));
                let both_fermions = alg.statistics(a).is_fermion() && alg.statistics(b).is_fermion();
                if both_fermions {
                    (&x + &y).is_zero()
                } else {
                    x == y
                }
            })
        })
    }

    /// Dense matrix in `symbols()` order.
    pub fn to_rows(&self) -> Vec<Vec<ScalarPoly>> {
        self.symbols
            .iter()
            .map(|&a| self.symbols.iter().map(|&b| self.get(a, b)).collect())
            .collect()
    }

    /// `Σ_{αβ} C_{αβ} λ_α λ_β`.
    pub fn quadratic_form(&self, lambda: &LinearCombination) -> ScalarPoly {
        let mut acc = ScalarPoly::zero();
        for (a, la) in lambda {
            for (b, lb) in lambda {
                let c = self.get(*a, *b);
                if !c.is_zero() {
                    acc.add_assign_ref(&(&(&c * la) * lb));
                }
            }
        }
        acc
    }

    fn with_pair(mut self, o: &Ordering, oprime: &Ordering) -> Self {
        self.pair = Some((o.clone(), oprime.clone()));
        self
    }
}

fn parity_of(alg: &Algebra, symbols: &[SymbolId]) -> Parity {
    let fermions = symbols.iter().filter(|s| alg.statistics(**s).is_fermion()).count();
    match fermions {
        0 => Parity::Symmetric,
        n if n == symbols.len() => Parity::Antisymmetric,
        _ => Parity::Graded,
    }
}

fn reduce_to_scalar(alg: &Algebra, p: &OperatorPoly, a: SymbolId, b: SymbolId) -> Result<ScalarPoly> {
    alg.reduce_to_scalar(p)?
        .ok_or_else(|| GwtError::NotCNumber(alg.name(a).to_string(), alg.name(b).to_string()))
}

/// `C_{αβ} = canonical(O[φ̂_α φ̂_β] − O′[φ̂_α φ̂_β])`, the O′ side taken
/// through the basis change.
pub fn contraction_def(
    alg: &Algebra,
    o: &Ordering,
    oprime: &Ordering,
    l: &BasisChange,
    symbols: &[SymbolId],
) -> Result<ContractionMatrix> {
    let reg = alg.registry();
    let mut entries = BTreeMap::new();
    for &a in symbols {
        for &b in symbols {
            let w = Word::new(alloc::vec![a, b]);
            let diff = &order_word(reg, o, &w)? - &order_word_foreign(reg, oprime, &w, l)?;
            let c = reduce_to_scalar(alg, &diff, a, b)?;
            if !c.is_zero() {
                entries.insert((a, b), c);
            }
        }
    }
    Ok(ContractionMatrix::from_entries(alg, symbols.to_vec(), entries).with_pair(o, oprime))
}

/// Step-function form `C_{αβ} = (θ′_{l≻k} − θ_{β≻α})·[φ̂_α, φ̂_β]±`, where
/// `k`, `l` are the single target symbols of rows `α`, `β` of `L` and `θ`
/// is strict precedence (ties contribute nothing).
pub fn contraction_theta(
    alg: &Algebra,
    o: &Ordering,
    oprime: &Ordering,
    l: &BasisChange,
    symbols: &[SymbolId],
) -> Result<ContractionMatrix> {
    if !o.is_permutation() || !oprime.is_permutation() {
        return Err(GwtError::NotPermutationOrdering);
    }
    let reg = alg.registry();
    let target = |s: SymbolId| -> Result<SymbolId> {
        let row: Vec<_> = l.row(reg, s)?.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        match row.as_slice() {
            [(t, _)] => Ok(*t),
            _ => Err(GwtError::NotApplicable(format!(
                "`{}` expands over several target symbols",
                alg.name(s)
            ))),
        }
    };
    let mut entries = BTreeMap::new();
    for &a in symbols {
        for &b in symbols {
            let fermions = alg.statistics(a).is_fermion() && alg.statistics(b).is_fermion();
            if fermions && (o.signature() != Some(Signature::Fermionic) || oprime.signature() != Some(Signature::Fermionic)) {
                return Err(GwtError::NotApplicable("fermions under a bosonic signature".to_string()));
            }
            let (k, lt) = (target(a)?, target(b)?);
            let theta_prime = oprime.precedes(reg, lt, k)? as i64;
            let theta = o.precedes(reg, b, a)? as i64;
            let weight = theta_prime - theta;
            if weight == 0 {
                continue;
            }
            let c = alg.bracket(a, b)?.scale(&weight.into());
            if !c.is_zero() {
                entries.insert((a, b), c);
            }
        }
    }
    Ok(ContractionMatrix::from_entries(alg, symbols.to_vec(), entries).with_pair(o, oprime))
}

/// `C̃_{kl} = (O − O′) φ̂_k φ̂_l` over target symbols. `O` orders source
/// symbols, so it acts through `inverse`, which expresses each target
/// symbol over the sources.
pub fn tilde_contraction(
    alg: &Algebra,
    o: &Ordering,
    oprime: &Ordering,
    inverse: &BasisChange,
    targets: &[SymbolId],
) -> Result<ContractionMatrix> {
    let reg = alg.registry();
    let mut entries = BTreeMap::new();
    for &k in targets {
        for &l in targets {
            let w = Word::new(alloc::vec![k, l]);
            let diff = &order_word_foreign(reg, o, &w, inverse)? - &order_word(reg, oprime, &w)?;
            let c = reduce_to_scalar(alg, &diff, k, l)?;
            if !c.is_zero() {
                entries.insert((k, l), c);
            }
        }
    }
    Ok(ContractionMatrix::from_entries(alg, targets.to_vec(), entries).with_pair(o, oprime))
}

/// `Σ_{kl} L_{αk} L_{βl} C̃_{kl}` over the given source symbols.
pub fn transform_tilde(
    alg: &Algebra,
    l: &BasisChange,
    tilde: &ContractionMatrix,
    sources: &[SymbolId],
) -> Result<ContractionMatrix> {
    let reg = alg.registry();
    let mut entries = BTreeMap::new();
    for &a in sources {
        let ra = l.row(reg, a)?;
        for &b in sources {
            let rb = l.row(reg, b)?;
            let mut acc = ScalarPoly::zero();
            for (k, lk) in &ra {
                for (m, lm) in &rb {
                    let c = tilde.get(*k, *m);
                    if !c.is_zero() {
                        acc.add_assign_ref(&(&(lk * lm) * &c));
                    }
                }
            }
            let acc = alg.normalize_scalar(&acc);
            if !acc.is_zero() {
                entries.insert((a, b), acc);
            }
        }
    }
    Ok(ContractionMatrix::from_entries(alg, sources.to_vec(), entries))
}

/// `C = (O − O′) X̂²` for `X̂ = λ_α φ̂_α = λ̃_k φ̂_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarContraction {
    pub value: ScalarPoly,
    pub lambda: LinearCombination,
    pub lambda_tilde: LinearCombination,
}

fn combination_poly(comb: &LinearCombination) -> OperatorPoly {
    let mut p = OperatorPoly::zero();
    for (s, c) in comb {
        p.add_term(Word::single(*s), c.clone());
    }
    p
}

fn check_relation(alg: &Algebra, lambda: &LinearCombination, lambda_tilde: &LinearCombination) -> Result<()> {
    let diff = alg.canonical_reduce(&(&combination_poly(lambda) - &combination_poly(lambda_tilde)))?;
    if diff.is_zero() {
        Ok(())
    } else {
        Err(GwtError::RelationViolated(format!("λ·φ − λ̃·φ̃ = {}", diff.display(alg.registry()))))
    }
}

/// Contraction of a single linear form known in both bases, with no explicit
/// `L`. `O` orders words in the `λ` symbols, `O′` words in the `λ̃` symbols.
pub fn scalar_contraction_implicit(
    alg: &Algebra,
    lambda: &LinearCombination,
    lambda_tilde: &LinearCombination,
    o: &Ordering,
    oprime: &Ordering,
) -> Result<ScalarContraction> {
    let reg = alg.registry();
    check_relation(alg, lambda, lambda_tilde)?;
    let x = combination_poly(lambda);
    let xt = combination_poly(lambda_tilde);
    let diff = &order_poly(reg, o, &(&x * &x))? - &order_poly(reg, oprime, &(&xt * &xt))?;
    let value = alg.reduce_to_scalar(&diff)?.ok_or_else(|| GwtError::NotCNumber("X".into(), "X".into()))?;
    Ok(ScalarContraction { value, lambda: lambda.clone(), lambda_tilde: lambda_tilde.clone() })
}

/// `C^{ij} = (O − O′) X̂^i X̂^j` for several linear forms, each given in both
/// bases.
pub fn implicit_contraction_matrix(
    alg: &Algebra,
    forms: &[(LinearCombination, LinearCombination)],
    o: &Ordering,
    oprime: &Ordering,
) -> Result<Vec<Vec<ScalarPoly>>> {
    let reg = alg.registry();
    for (l, lt) in forms {
        check_relation(alg, l, lt)?;
    }
    let mut out = Vec::with_capacity(forms.len());
    for (li, lti) in forms {
        let mut row = Vec::with_capacity(forms.len());
        for (lj, ltj) in forms {
            let lhs = order_poly(reg, o, &(&combination_poly(li) * &combination_poly(lj)))?;
            let rhs = order_poly(reg, oprime, &(&combination_poly(lti) * &combination_poly(ltj)))?;
            let v = alg
                .reduce_to_scalar(&(&lhs - &rhs))?
                .ok_or_else(|| GwtError::NotCNumber("X^i".into(), "X^j".into()))?;
            row.push(v);
        }
        out.push(row);
    }
    Ok(out)
}

/// Split form for a family of fields `ψ̂_α` and their partners `ψ̂†_β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FermionContraction {
    /// `C̄_{αβ} = C_{ψ_α, ψ†_β}`, indexed by positions in the two families.
    pub cbar: Vec<Vec<ScalarPoly>>,
    /// Contraction over the interleaved set `ψ_1, ψ†_1, ψ_2, ψ†_2, …`.
    pub full: ContractionMatrix,
}

pub fn fermion_field_contraction(
    alg: &Algebra,
    psi: &[SymbolId],
    psi_dag: &[SymbolId],
    o: &Ordering,
    oprime: &Ordering,
    l: &BasisChange,
) -> Result<FermionContraction> {
    for family in [psi, psi_dag] {
        for &a in family {
            if alg.statistics(a) != Statistics::Fermion {
                return Err(GwtError::FlavorMismatch(alg.name(a).to_string()));
            }
            for &b in family {
                if !alg.bracket(a, b)?.is_zero() {
                    return Err(GwtError::FamilyAxiomViolated(alg.name(a).to_string(), alg.name(b).to_string()));
                }
            }
        }
    }
    let mut all = Vec::with_capacity(psi.len() + psi_dag.len());
    for k in 0..psi.len().max(psi_dag.len()) {
        all.extend(psi.get(k));
        all.extend(psi_dag.get(k));
    }
    let full = contraction_def(alg, o, oprime, l, &all)?;
    let cbar = psi
        .iter()
        .map(|&a| psi_dag.iter().map(|&b| full.get(a, b)).collect())
        .collect();
    Ok(FermionContraction { cbar, full })
}
