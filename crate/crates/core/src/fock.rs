//! Truncated Fock-space representations: ladder matrices for bosons, exact
//! Jordan–Wigner matrices for fermions.
//!
//! Bosonic modes come first in the tensor product, fermionic modes after
//! them; within each group modes keep their insertion order, and the first
//! mode has the largest stride.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{GwtError, Result};
use crate::math;
use crate::matrix::{CMatrix, DENSE_LIMIT};
use crate::operator::{Algebra, OperatorPoly, SymbolId};
use crate::scalar::NumericContext;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Boson { name: String, truncation: usize },
    Fermion { name: String },
}

impl Mode {
    pub fn name(&self) -> &str {
        match self {
            Mode::Boson { name, .. } | Mode::Fermion { name } => name,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Mode::Boson { truncation, .. } => *truncation,
            Mode::Fermion { .. } => 2,
        }
    }

    pub fn is_fermion(&self) -> bool {
        matches!(self, Mode::Fermion { .. })
    }
}

/// A ladder generator: the annihilator (`dagger = false`) or creator of a mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Generator {
    pub mode: usize,
    pub dagger: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModeRegistry {
    modes: Vec<Mode>,
    map: BTreeMap<SymbolId, Generator>,
}

impl ModeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_boson(&mut self, name: &str, truncation: usize) -> Result<usize> {
        if truncation < 2 {
            return Err(GwtError::TruncationTooSmall { got: truncation, min: 2 });
        }
        self.modes.push(Mode::Boson { name: name.to_string(), truncation });
        Ok(self.modes.len() - 1)
    }

    pub fn add_fermion(&mut self, name: &str) -> usize {
        self.modes.push(Mode::Fermion { name: name.to_string() });
        self.modes.len() - 1
    }

    pub fn map_symbol(&mut self, s: SymbolId, mode: usize, dagger: bool) {
        self.map.insert(s, Generator { mode, dagger });
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn generator(&self, s: SymbolId) -> Option<Generator> {
        self.map.get(&s).copied()
    }

    /// Mode indices in tensor order.
    fn tensor_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.modes.len()).collect();
        idx.sort_by_key(|&m| (self.modes[m].is_fermion(), m));
        idx
    }

    fn strides(&self) -> Vec<usize> {
        let order = self.tensor_order();
        let mut strides = alloc::vec![0; self.modes.len()];
        let mut s = 1;
        for &m in order.iter().rev() {
            strides[m] = s;
            s *= self.modes[m].dim();
        }
        strides
    }

    pub fn dimension(&self) -> usize {
        self.modes.iter().map(Mode::dim).product()
    }

    /// Occupation numbers of basis state `index`, by mode index.
    pub fn occupations(&self, index: usize) -> Vec<usize> {
        let strides = self.strides();
        self.modes
            .iter()
            .enumerate()
            .map(|(m, mode)| (index / strides[m]) % mode.dim())
            .collect()
    }

    pub fn index_of(&self, occupations: &[usize]) -> usize {
        let strides = self.strides();
        occupations.iter().zip(strides).map(|(n, s)| n * s).sum()
    }

    pub fn total_occupation(&self, index: usize) -> usize {
        self.occupations(index).iter().sum()
    }

    /// Smallest bosonic truncation (or 2 when only fermions are present).
    pub fn min_truncation(&self) -> usize {
        self.modes
            .iter()
            .filter_map(|m| match m {
                Mode::Boson { truncation, .. } => Some(*truncation),
                Mode::Fermion { .. } => None,
            })
            .min()
            .unwrap_or(2)
    }

    /// Largest block free of truncation artifacts for polynomials of `degree`.
    pub fn safe_block(&self, degree: usize) -> usize {
        (self.min_truncation() - 1).saturating_sub(degree)
    }

    fn check_dimension(&self) -> Result<usize> {
        let d = self.dimension();
        if d > DENSE_LIMIT * DENSE_LIMIT {
            return Err(GwtError::DimensionTooLarge(d));
        }
        Ok(d)
    }

    /// Matrix of a ladder generator, with a Jordan–Wigner parity string over
    /// the fermionic modes preceding it in tensor order.
    pub fn generator_matrix(&self, g: Generator) -> Result<CMatrix> {
        let dim = self.check_dimension()?;
        let strides = self.strides();
        let order = self.tensor_order();
        let before: Vec<usize> = order
            .iter()
            .take_while(|&&m| m != g.mode)
            .copied()
            .filter(|&m| self.modes[m].is_fermion())
            .collect();
        let fermion = self.modes[g.mode].is_fermion();
        let mut lower = CMatrix::zeros(dim, dim);
        for idx in 0..dim {
            let occ = self.occupations(idx);
            let n = occ[g.mode];
            if n == 0 {
                continue;
            }
            let value = if fermion {
                let parity: usize = before.iter().map(|&m| occ[m]).sum();
                if parity % 2 == 1 {
                    -1.0
                } else {
                    1.0
                }
            } else {
                math::sqrt(n as f64)
            };
            lower[(idx - strides[g.mode], idx)] = Complex64::new(value, 0.0);
        }
        Ok(if g.dagger { lower.transpose() } else { lower })
    }
}

/// Numeric matrix of `p` after expanding defined symbols.
pub fn represent(alg: &Algebra, p: &OperatorPoly, modes: &ModeRegistry, ctx: &NumericContext) -> Result<CMatrix> {
    let dim = modes.check_dimension()?;
    let expanded = alg.expand(p);
    let mut cache: BTreeMap<SymbolId, CMatrix> = BTreeMap::new();
    let mut out = CMatrix::zeros(dim, dim);
    for (w, c) in expanded.terms() {
        let coeff = alg.normalize_scalar(c).evaluate(ctx)?;
        for s in w.factors() {
            if !cache.contains_key(s) {
                let g = modes.generator(*s).ok_or_else(|| GwtError::UnmappedSymbol(alg.name(*s).to_string()))?;
                cache.insert(*s, modes.generator_matrix(g)?);
            }
        }
        let mut acc = CMatrix::identity(dim);
        for s in w.factors().iter().rev() {
            acc = cache[s].matmul(&acc)?;
        }
        out = &out + &acc.scale(coeff);
    }
    Ok(out)
}

/// Max elementwise difference over basis states with total occupation at
/// most `max_occupation`.
pub fn block_compare(a: &CMatrix, b: &CMatrix, modes: &ModeRegistry, max_occupation: usize) -> Result<f64> {
    let dim = modes.dimension();
    if a.rows() != dim || b.rows() != dim || a.cols() != dim || b.cols() != dim {
        return Err(GwtError::RegistryMismatch);
    }
    let keep: Vec<usize> = (0..dim).filter(|&i| modes.total_occupation(i) <= max_occupation).collect();
    let mut worst: f64 = 0.0;
    for &i in &keep {
        for &j in &keep {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    Ok(worst)
}

/// `Σ_k Q^k / k!` for nilpotent `Q`, stopping at the first vanishing power.
fn nilpotent_exp(q: &CMatrix, max_terms: usize) -> Result<CMatrix> {
    let mut sum = CMatrix::identity(q.rows());
    let mut term = CMatrix::identity(q.rows());
    for k in 1..=max_terms {
        term = q.matmul(&term)?.scale(Complex64::new(1.0 / k as f64, 0.0));
        if term.is_zero() {
            break;
        }
        sum = &sum + &term;
    }
    Ok(sum)
}

/// `Γ(T)`: the number-conserving map sending `a†_j` to `Σ_i T_ij a†_i`.
/// Components beyond the truncation are dropped, so it is exact on states
/// with total occupation below every truncation.
pub fn second_quantized(modes: &ModeRegistry, t: &CMatrix) -> Result<CMatrix> {
    let r = modes.modes().len();
    if t.rows() != r || t.cols() != r {
        return Err(GwtError::DimensionMismatch(t.rows(), r));
    }
    if let Some(m) = modes.modes().iter().find(|m| m.is_fermion()) {
        return Err(GwtError::Unsupported(alloc::format!("second quantization of fermionic mode `{}`", m.name())));
    }
    let dim = modes.check_dimension()?;
    let trunc: Vec<usize> = modes.modes().iter().map(Mode::dim).collect();
    let ln_fact: Vec<f64> = (0..=trunc.iter().sum::<usize>()).map(math::ln_factorial).collect();
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let occ = modes.occupations(col);
        // monomials Π (a†_i)^{k_i} |0⟩, unnormalised
        let mut poly: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
        poly.insert(alloc::vec![0; r], Complex64::new(1.0, 0.0));
        for (j, &nj) in occ.iter().enumerate() {
            for _ in 0..nj {
                let mut next: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
                for (k, c) in &poly {
                    for i in 0..r {
                        let tij = t[(i, j)];
                        if tij == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        let mut k2 = k.clone();
                        k2[i] += 1;
                        *next.entry(k2).or_default() += c * tij;
                    }
                }
                poly = next;
            }
        }
        let norm_in: f64 = occ.iter().map(|&n| ln_fact[n]).sum::<f64>() * 0.5;
        for (k, c) in poly {
            if k.iter().zip(&trunc).any(|(ki, ti)| ki >= ti) {
                continue;
            }
            let norm_out: f64 = k.iter().map(|&n| ln_fact[n]).sum::<f64>() * 0.5;
            out[(modes.index_of(&k), col)] += c * math::exp(norm_out - norm_in);
        }
    }
    Ok(out)
}

/// `N[exp(½Σ A_ij a†_i a†_j + Σ M_ij a†_i a_j + ½Σ B_ij a_i a_j)]` on a purely
/// bosonic registry, as `e^{Q_c} Γ(1 + M) e^{Q_a}`.
///
/// Each factor is exact on states below every truncation, so the result is
/// free of truncation artifacts on such states.
pub fn normal_ordered_gaussian(modes: &ModeRegistry, a: &CMatrix, m: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let r = modes.modes().len();
    let dim = modes.check_dimension()?;
    let ladder = |k: usize, dagger: bool| modes.generator_matrix(Generator { mode: k, dagger });
    let mut qc = CMatrix::zeros(dim, dim);
    let mut qa = CMatrix::zeros(dim, dim);
    for i in 0..r {
        for j in 0..r {
            let (aij, bij) = (a[(i, j)] * 0.5, b[(i, j)] * 0.5);
            if aij != Complex64::new(0.0, 0.0) {
                qc = &qc + &ladder(i, true)?.matmul(&ladder(j, true)?)?.scale(aij);
            }
            if bij != Complex64::new(0.0, 0.0) {
                qa = &qa + &ladder(i, false)?.matmul(&ladder(j, false)?)?.scale(bij);
            }
        }
    }
    let total: usize = modes.modes().iter().map(Mode::dim).sum();
    let ec = nilpotent_exp(&qc, total)?;
    let ea = nilpotent_exp(&qa, total)?;
    let gamma = second_quantized(modes, &(&CMatrix::identity(r) + m))?;
    ec.matmul(&gamma)?.matmul(&ea)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use crate::operator::Word;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn boson_ladder_matrix() {
        let m = models::single_mode();
        let modes = m.mode_registry(4).unwrap();
        let a = represent(&m.algebra, &OperatorPoly::symbol(m.sym("a")), &modes, &NumericContext::new()).unwrap();
        for n in 1..4 {
            assert_eq!(a[(n - 1, n)], c((n as f64).sqrt()));
        }
        assert_eq!(a.max_abs_diff(&CMatrix::zeros(4, 4)).unwrap(), 3f64.sqrt());
    }

    #[test]
    fn fermion_matrix_and_anticommutators() {
        let m = models::fermion_modes(3).build().unwrap();
        let modes = m.mode_registry(2).unwrap();
        let ctx = NumericContext::new();
        let single = models::fermion_modes(1).build().unwrap();
        let one = single.mode_registry(2).unwrap();
        let c0 = represent(&single.algebra, &OperatorPoly::symbol(single.sym("c0")), &one, &ctx).unwrap();
        assert_eq!(c0.to_rows(), alloc::vec![alloc::vec![c(0.0), c(1.0)], alloc::vec![c(0.0), c(0.0)]]);
        for i in 0..3 {
            for j in 0..3 {
                let ci = represent(&m.algebra, &OperatorPoly::symbol(m.sym(&alloc::format!("c{i}"))), &modes, &ctx).unwrap();
                let cj = represent(&m.algebra, &OperatorPoly::symbol(m.sym(&alloc::format!("c{j}"))), &modes, &ctx).unwrap();
                let cjd = cj.adjoint();
                let anti = &(&ci * &cjd) + &(&cjd * &ci);
                let want = if i == j { CMatrix::identity(8) } else { CMatrix::zeros(8, 8) };
                assert_eq!(anti, want);
                assert!((&(&ci * &cj) + &(&cj * &ci)).is_zero());
            }
        }
    }

    #[test]
    fn commutator_and_truncation_edge() {
        let m = models::single_mode();
        let (a, ad) = (m.sym("a"), m.sym("a†"));
        let modes = m.mode_registry(20).unwrap();
        let ctx = NumericContext::new();
        let lhs = OperatorPoly::word(Word::new(alloc::vec![a, ad]));
        let rhs = &OperatorPoly::word(Word::new(alloc::vec![ad, a])) + &OperatorPoly::one();
        let (x, y) = (
            represent(&m.algebra, &lhs, &modes, &ctx).unwrap(),
            represent(&m.algebra, &rhs, &modes, &ctx).unwrap(),
        );
        assert!(block_compare(&x, &y, &modes, 10).unwrap() <= 1e-14);
        assert!(block_compare(&x, &y, &modes, 20).unwrap() > 0.5);
        let comm = &x - &represent(&m.algebra, &OperatorPoly::word(Word::new(alloc::vec![ad, a])), &modes, &ctx).unwrap();
        let mut want = CMatrix::identity(20);
        want[(19, 19)] = c(-19.0);
        assert!(comm.max_abs_diff(&want).unwrap() < 1e-12);
        assert!(matches!(
            represent(&models::two_modes().algebra, &OperatorPoly::symbol(SymbolId(2)), &modes, &ctx),
            Err(GwtError::UnmappedSymbol(_))
        ));
    }

    #[test]
    fn second_quantized_single_mode_is_power() {
        let m = models::single_mode();
        let modes = m.mode_registry(8).unwrap();
        let t = CMatrix::diagonal(&[c(0.5)]);
        let g = second_quantized(&modes, &t).unwrap();
        for n in 0..8 {
            assert!((g[(n, n)] - c(0.5f64.powi(n as i32))).norm() < 1e-15);
        }
    }

    #[test]
    fn squeezer_is_unitary_on_low_block() {
        let m = models::two_modes();
        let modes = m.mode_registry(20).unwrap();
        let (a, ad, b, bd) = (m.sym("a"), m.sym("a†"), m.sym("b"), m.sym("b†"));
        let gen = &OperatorPoly::word(Word::new(alloc::vec![a, b])) - &OperatorPoly::word(Word::new(alloc::vec![ad, bd]));
        let x = represent(&m.algebra, &gen, &modes, &NumericContext::new()).unwrap().scale(c(0.3));
        let u = crate::matrix::matexp(&x).unwrap();
        let err = block_compare(&(&u.adjoint() * &u), &CMatrix::identity(400), &modes, 8).unwrap();
        assert!(err <= 1e-8, "{err}");
    }
}
