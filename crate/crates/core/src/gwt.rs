//! Derivatives with respect to ordered symbols and the two forms of the
//! general Wick theorem.
//!
//! Inside an ordered expression the symbols behave like commuting variables
//! (bosons) or Grassmann variables (fermions), so every derivative here acts
//! on φ-words *before* the target ordering is applied. Ordering and
//! differentiation commute, which is what makes this equivalent to acting on
//! the ordered result.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::contraction::{ContractionMatrix, ScalarContraction};
use crate::error::{GwtError, Result};
use crate::operator::{Algebra, LinearCombination, OperatorPoly, Registry, Statistics, SymbolId, Word};
use crate::ordering::{order_poly, order_poly_foreign, BasisChange, Ordering};
use crate::scalar::{GaussianRational, ScalarPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Bosonic,
    Grassmann,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DerivativeIndex {
    pub symbol: SymbolId,
    pub flavor: Flavor,
}

impl DerivativeIndex {
    /// The flavor matching the symbol's statistics.
    pub fn for_symbol(reg: &Registry, symbol: SymbolId) -> Self {
        let flavor = match reg.statistics(symbol) {
            Statistics::Boson => Flavor::Bosonic,
            Statistics::Fermion => Flavor::Grassmann,
        };
        Self { symbol, flavor }
    }
}

fn check_flavor(reg: &Registry, d: DerivativeIndex, want: Flavor) -> Result<()> {
    let natural = DerivativeIndex::for_symbol(reg, d.symbol).flavor;
    if d.flavor != want || natural != want {
        return Err(GwtError::FlavorMismatch(reg.name(d.symbol).to_string()));
    }
    Ok(())
}

/// `∂_α` on commuting variables: each occurrence deleted in place.
pub fn derive_boson(reg: &Registry, p: &OperatorPoly, d: DerivativeIndex) -> Result<OperatorPoly> {
    check_flavor(reg, d, Flavor::Bosonic)?;
    Ok(derive_raw(reg, p, d.symbol))
}

/// Left Grassmann derivative: an occurrence at position `j` is deleted with
/// sign `(−1)^(fermionic factors left of j)`.
pub fn derive_grassmann(reg: &Registry, p: &OperatorPoly, d: DerivativeIndex) -> Result<OperatorPoly> {
    check_flavor(reg, d, Flavor::Grassmann)?;
    Ok(derive_raw(reg, p, d.symbol))
}

/// Derivative with the flavor implied by the symbol's statistics.
pub fn derive(reg: &Registry, p: &OperatorPoly, s: SymbolId) -> OperatorPoly {
    derive_raw(reg, p, s)
}

fn derive_raw(reg: &Registry, p: &OperatorPoly, s: SymbolId) -> OperatorPoly {
    let grassmann = reg.statistics(s).is_fermion();
    let mut out = OperatorPoly::zero();
    for (w, c) in p.terms() {
        let mut fermions_left = 0usize;
        for (j, x) in w.factors().iter().enumerate() {
            if *x == s {
                let negative = grassmann && fermions_left % 2 == 1;
                out.add_term(w.without(j), if negative { -c } else { c.clone() });
            }
            if reg.statistics(*x).is_fermion() {
                fermions_left += 1;
            }
        }
    }
    out
}

/// `Γ = ½ Σ_{αβ} C_{αβ} ∂_β ∂_α`, with `∂_α` applied first.
///
/// For bosons the order is immaterial. For fermions this is the order for
/// which `e^Γ` reproduces the contraction on a single pair:
/// `Γ(φ̂_α φ̂_β) = ½(C_{αβ} − C_{βα}) = C_{αβ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaOperator {
    contraction: ContractionMatrix,
    pairs: Vec<(SymbolId, SymbolId, ScalarPoly)>,
}

impl GammaOperator {
    pub fn new(alg: &Algebra, contraction: ContractionMatrix) -> Result<Self> {
        if !contraction.check_parity(alg) {
            return Err(GwtError::Unsupported(
                "contraction parity does not match the statistics of its symbols".to_string(),
            ));
        }
        let half = GaussianRational::ratio(1, 2);
        let pairs = contraction
            .entries()
            .map(|(&(a, b), c)| (a, b, c.scale(&half)))
            .collect();
        Ok(Self { contraction, pairs })
    }

    pub fn contraction(&self) -> &ContractionMatrix {
        &self.contraction
    }

    pub fn negated(&self) -> Self {
        Self {
            contraction: self.contraction.negate(),
            pairs: self.pairs.iter().map(|(a, b, c)| (*a, *b, -c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn gamma_apply(alg: &Algebra, g: &GammaOperator, p: &OperatorPoly) -> OperatorPoly {
    let reg = alg.registry();
    let mut out = OperatorPoly::zero();
    for (a, b, c) in &g.pairs {
        let first = derive_raw(reg, p, *a);
        if first.is_zero() {
            continue;
        }
        let second = derive_raw(reg, &first, *b);
        out.add_scaled(&second, c);
    }
    out.map_coefficients(|c| alg.normalize_scalar(c))
}

/// `Σ_m Γ^m p / m!`; terminates because each power lowers the degree by two.
pub fn exp_gamma_apply(alg: &Algebra, g: &GammaOperator, p: &OperatorPoly) -> OperatorPoly {
    let mut total = p.clone();
    let mut term = p.clone();
    let mut m = 1i64;
    loop {
        term = gamma_apply(alg, g, &term);
        if term.is_zero() {
            break;
        }
        total.add_scaled(&term, &ScalarPoly::ratio(1, factorial(m)));
        m += 1;
    }
    total
}

fn factorial(n: i64) -> i64 {
    (1..=n).product()
}

fn check_pair(c: &ContractionMatrix, o: &Ordering, oprime: &Ordering) -> Result<()> {
    if c.generated_by(o, oprime) {
        Ok(())
    } else {
        Err(GwtError::ContractionMismatch)
    }
}

/// Nested replacement `φ̂ → φ̂ + C_{φβ} ∂_β` applied right to left, each
/// derivative acting on everything to its right.
fn substitute_word(reg: &Registry, c: &ContractionMatrix, w: &[SymbolId]) -> OperatorPoly {
    let Some((&x, rest)) = w.split_first() else {
        return OperatorPoly::one();
    };
    let tail = substitute_word(reg, c, rest);
    let mut out = &OperatorPoly::symbol(x) * &tail;
    for &b in c.symbols() {
        let cxb = c.get(x, b);
        if cxb.is_zero() {
            continue;
        }
        out.add_scaled(&derive_raw(reg, &tail, b), &cxb);
    }
    out
}

/// Substitution form: `O[F(φ̂)] = O′[F(φ̂′)]` with `φ̂′_α = φ̂_α + C_{αβ}∂_β`.
/// The result lies in the target basis of `l`.
pub fn gwt_substitution(
    alg: &Algebra,
    o: &Ordering,
    oprime: &Ordering,
    l: &BasisChange,
    c: &ContractionMatrix,
    f: &OperatorPoly,
) -> Result<OperatorPoly> {
    check_pair(c, o, oprime)?;
    let reg = alg.registry();
    let mut substituted = OperatorPoly::zero();
    for (w, coeff) in f.terms() {
        substituted.add_scaled(&substitute_word(reg, c, w.factors()), coeff);
    }
    order_poly_foreign(reg, oprime, &substituted, l)
}

/// Exponential form: `O[F] = O′[e^Γ F]`, with `Γ` built from `C = (O − O′)`.
pub fn gwt_exponential(
    alg: &Algebra,
    o: &Ordering,
    oprime: &Ordering,
    l: &BasisChange,
    c: &ContractionMatrix,
    f: &OperatorPoly,
) -> Result<OperatorPoly> {
    check_pair(c, o, oprime)?;
    let g = GammaOperator::new(alg, c.clone())?;
    order_poly_foreign(alg.registry(), oprime, &exp_gamma_apply(alg, &g, f), l)
}

/// Exponential form written over the target basis, `e^{Γ̃} O′[F]`, with `Γ̃`
/// built from the tilde contraction.
pub fn gwt_exponential_tilde(
    alg: &Algebra,
    oprime: &Ordering,
    l: &BasisChange,
    tilde: &ContractionMatrix,
    f: &OperatorPoly,
) -> Result<OperatorPoly> {
    let g = GammaOperator::new(alg, tilde.clone())?;
    let ordered = order_poly_foreign(alg.registry(), oprime, f, l)?;
    // Derivatives commute with O′ on target words, so ordering again is exact.
    order_poly(alg.registry(), oprime, &exp_gamma_apply(alg, &g, &ordered))
}

/// Coefficients `f_n` of `F = Σ f_n X̂^n` read from a polynomial in one
/// symbol standing for `X̂`.
pub fn univariate_coefficients(alg: &Algebra, f: &OperatorPoly, x: SymbolId) -> Result<Vec<ScalarPoly>> {
    let mut out = alloc::vec![ScalarPoly::zero(); f.degree() + 1];
    for (w, c) in f.terms() {
        if let Some(other) = w.factors().iter().find(|s| **s != x) {
            return Err(GwtError::NotUnivariate(alg.name(*other).to_string()));
        }
        out[w.len()].add_assign_ref(c);
    }
    while out.len() > 1 && out.last().is_some_and(ScalarPoly::is_zero) {
        out.pop();
    }
    Ok(out)
}

/// `O[F(X̂)] = e^{½C∂²_X} O′[F(X̂)]` for `F = Σ f_n X̂^n`:
/// `O[X̂^n] = Σ_m n!/((n−2m)! m! 2^m) C^m O′[X̂^{n−2m}]`, with `O′` acting on
/// `X̂ = λ̃_k φ̂_k`.
pub fn gwt_implicit(
    alg: &Algebra,
    coefficients: &[ScalarPoly],
    c: &ScalarContraction,
    oprime: &Ordering,
) -> Result<OperatorPoly> {
    let reg = alg.registry();
    let mut xt = OperatorPoly::zero();
    for (s, l) in &c.lambda_tilde {
        xt.add_term(Word::single(*s), l.clone());
    }
    let mut powers = alloc::vec![OperatorPoly::one()];
    for k in 1..coefficients.len() {
        powers.push(&powers[k - 1] * &xt);
    }
    let ordered: Vec<OperatorPoly> = powers.iter().map(|p| order_poly(reg, oprime, p)).collect::<Result<_>>()?;
    let mut out = OperatorPoly::zero();
    for (n, fnc) in coefficients.iter().enumerate() {
        if fnc.is_zero() {
            continue;
        }
        for m in 0..=n / 2 {
            let weight = BigRational::new(
                factorial_big(n),
                factorial_big(n - 2 * m) * factorial_big(m) * BigInt::from(2).pow(m as u32),
            );
            let coeff = &(&c.value.pow(m as u32) * fnc) * &ScalarPoly::constant(weight.into());
            out.add_scaled(&ordered[n - 2 * m], &coeff);
        }
    }
    Ok(out.map_coefficients(|c| alg.normalize_scalar(c)))
}

fn factorial_big(n: usize) -> BigInt {
    (1..=n as u64).fold(BigInt::from(1), |acc, k| acc * BigInt::from(k))
}

/// Several linear forms `X̂^i`, each represented by a placeholder symbol and
/// its target-basis expansion. `F` is a polynomial in the placeholders and
/// `cij` the scalar contractions `C^{ij}`; computes `O′[e^{½C^{ij}∂_i∂_j} F]`.
pub fn gwt_implicit_multi(
    alg: &Algebra,
    placeholders: &[(SymbolId, LinearCombination)],
    cij: &[Vec<ScalarPoly>],
    oprime: &Ordering,
    f: &OperatorPoly,
) -> Result<OperatorPoly> {
    let reg = alg.registry();
    if let Some((s, _)) = placeholders.iter().find(|(s, _)| reg.statistics(*s) != Statistics::Boson) {
        return Err(GwtError::NotUnivariate(reg.name(*s).to_string()));
    }
    let known: BTreeSet<SymbolId> = placeholders.iter().map(|(s, _)| *s).collect();
    for (w, _) in f.terms() {
        if let Some(s) = w.factors().iter().find(|s| !known.contains(s)) {
            return Err(GwtError::NotUnivariate(reg.name(*s).to_string()));
        }
    }
    let symbols: Vec<SymbolId> = placeholders.iter().map(|(s, _)| *s).collect();
    let mut entries = alloc::collections::BTreeMap::new();
    for (i, &a) in symbols.iter().enumerate() {
        for (j, &b) in symbols.iter().enumerate() {
            entries.insert((a, b), cij[i][j].clone());
        }
    }
    let cm = ContractionMatrix::from_entries(alg, symbols, entries);
    let g = GammaOperator::new(alg, cm)?;
    let l = BasisChange::new(placeholders.iter().cloned().collect())?;
    order_poly_foreign(reg, oprime, &exp_gamma_apply(alg, &g, f), &l)
}

/// Both sides of `O[e^X̂] = e^{½C_{αβ}λ_αλ_β} O′[e^X̂]`, `X̂ = λ_α φ̂_α`,
/// truncated at total degree `max_order` in the `λ` symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentialSeries {
    pub lhs: OperatorPoly,
    pub rhs: OperatorPoly,
    /// Names of the formal expansion symbols.
    pub formal: BTreeSet<String>,
    pub max_order: u32,
}

impl ExponentialSeries {
    /// Exact agreement of the two sides after canonical reduction.
    pub fn agree(&self, alg: &Algebra) -> Result<bool> {
        let diff = alg.canonical_reduce(&(&self.lhs - &self.rhs))?;
        Ok(truncate(&diff, &self.formal, self.max_order).is_zero())
    }
}

fn truncate(p: &OperatorPoly, formal: &BTreeSet<String>, max: u32) -> OperatorPoly {
    p.map_coefficients(|c| c.truncate_degree(formal, max))
}

/// `lambda` pairs each source symbol with its formal coefficient, which
/// should be a single scalar symbol (times constants).
pub fn gwt_exponential_series(
    alg: &Algebra,
    o: &Ordering,
    oprime: &Ordering,
    l: &BasisChange,
    c: &ContractionMatrix,
    lambda: &LinearCombination,
    max_order: u32,
) -> Result<ExponentialSeries> {
    let reg = alg.registry();
    let formal: BTreeSet<String> = lambda.iter().flat_map(|(_, c)| c.free_symbols()).collect();
    let mut x = OperatorPoly::zero();
    for (s, coeff) in lambda {
        x.add_term(Word::single(*s), coeff.clone());
    }
    let mut lhs = OperatorPoly::zero();
    let mut rhs_series = OperatorPoly::zero();
    let mut power = OperatorPoly::one();
    for n in 0..=max_order {
        if n > 0 {
            power = &power * &x;
        }
        let inv_fact = ScalarPoly::constant(BigRational::new(BigInt::from(1), factorial_big(n as usize)).into());
        lhs.add_scaled(&order_poly(reg, o, &power)?, &inv_fact);
        rhs_series.add_scaled(&order_poly_foreign(reg, oprime, &power, l)?, &inv_fact);
    }
    // e^{½Cλλ}, truncated
    let half_q = c.quadratic_form(lambda).scale(&GaussianRational::ratio(1, 2));
    let mut exp_q = ScalarPoly::one();
    let mut term = ScalarPoly::one();
    for m in 1..=(max_order / 2 + 1) {
        term = (&term * &half_q).truncate_degree(&formal, max_order);
        exp_q.add_assign_ref(&term.scale(&GaussianRational::ratio(1, factorial(m as i64))));
    }
    let rhs = rhs_series.map_coefficients(|v| (v * &exp_q).truncate_degree(&formal, max_order));
    let lhs = truncate(&lhs, &formal, max_order);
    Ok(ExponentialSeries {
        lhs: lhs.map_coefficients(|v| alg.normalize_scalar(v)),
        rhs: rhs.map_coefficients(|v| alg.normalize_scalar(v)),
        formal,
        max_order,
    })
}
