//! Gaussian moments and closed-form reordering of quadratic exponentials.
//!
//! Everything here is floating point. `O[e^{½Dφφ}] = p·O′[e^{½D′φφ}]` with
//! `D′ = (D⁻¹ − C)⁻¹` and `p = det(I − DC)^{-½}`, the square-root branch
//! fixed by continuity from `C = 0`.

use alloc::string::ToString;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::contraction::{contraction_def, ContractionMatrix};
use crate::error::{GwtError, Result};
use crate::fock::{block_compare, normal_ordered_gaussian, represent, ModeRegistry};
use crate::math;
use crate::matrix::{matexp, CMatrix};
use crate::models;
use crate::operator::{Algebra, OperatorPoly, Word};
use crate::ordering::{BasisChange, Ordering};
use crate::scalar::NumericContext;

const SYMMETRY_TOL: f64 = 1e-12;
const BRANCH_STEPS: usize = 256;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// A symmetric covariance matrix; complex entries are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix(CMatrix);

impl CovarianceMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(GwtError::DimensionMismatch(m.rows(), m.cols()));
        }
        let scale = m.max_abs().max(1.0);
        if m.max_abs_diff(&m.transpose())? > SYMMETRY_TOL * scale {
            return Err(GwtError::NotSymmetric);
        }
        Ok(Self(m))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(CMatrix::from_real_rows(rows)?)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }
}

/// All perfect pairings of `0..n` (empty for odd `n`).
pub fn perfect_pairings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(rest: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let Some((&first, tail)) = rest.split_first() else {
            out.push(acc.clone());
            return;
        };
        for k in 0..tail.len() {
            acc.push((first, tail[k]));
            let remaining: Vec<usize> = tail.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &x)| x).collect();
            go(&remaining, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if n.is_multiple_of(2) {
        go(&(0..n).collect::<Vec<_>>(), &mut Vec::new(), &mut out);
    }
    out
}

/// `M[ξ_{i1}…ξ_{in}]` for zero-mean Gaussians with covariance `d`.
pub fn isserlis_moment(indices: &[usize], d: &CovarianceMatrix) -> Result<Complex64> {
    if let Some(&index) = indices.iter().find(|&&i| i >= d.dim()) {
        return Err(GwtError::IndexOutOfRange { index, dim: d.dim() });
    }
    let m = d.matrix();
    Ok(perfect_pairings(indices.len())
        .iter()
        .map(|p| p.iter().map(|&(x, y)| m[(indices[x], indices[y])]).product::<Complex64>())
        .sum())
}

/// `√f(1)`, continued from the principal root of `f(0)` along `t ∈ [0, 1]`.
fn continued_sqrt(f: impl Fn(f64) -> Result<Complex64>) -> Result<Complex64> {
    let mut root = f(0.0)?.sqrt();
    for k in 1..=BRANCH_STEPS {
        let r = f(k as f64 / BRANCH_STEPS as f64)?.sqrt();
        root = if (r - root).norm() <= (r + root).norm() { r } else { -r };
    }
    Ok(root)
}

/// Numeric values of a contraction matrix, in the order of its symbols.
pub fn evaluate_contraction(alg: &Algebra, c: &ContractionMatrix, ctx: &NumericContext) -> Result<CMatrix> {
    let syms = c.symbols();
    let mut out = CMatrix::zeros(syms.len(), syms.len());
    for (i, &a) in syms.iter().enumerate() {
        for (j, &b) in syms.iter().enumerate() {
            out[(i, j)] = alg.normalize_scalar(&c.get(a, b)).evaluate(ctx)?;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticReorder {
    pub d_prime: CMatrix,
    /// `√(|D′|/|D|)`; complex in general once `C` is complex.
    pub prefactor: Complex64,
}

/// `D′ = (D⁻¹ − C)⁻¹` and its prefactor.
///
/// Validity needs the real part of `D⁻¹` to be definite and the real part of
/// `D′⁻¹ = D⁻¹ − C` to be definite with the same sign; for real `D` the first
/// condition is just definiteness of `D`.
pub fn reorder_quadratic_form(c: &CMatrix, d: &CovarianceMatrix) -> Result<QuadraticReorder> {
    let dm = d.matrix();
    if c.rows() != dm.rows() || c.cols() != dm.cols() {
        return Err(GwtError::DimensionMismatch(c.rows(), dm.rows()));
    }
    let dinv = dm.inverse()?;
    let sign = if dinv.is_positive_definite() {
        1.0
    } else if dinv.scale(re(-1.0)).is_positive_definite() {
        -1.0
    } else {
        return Err(GwtError::NotDefinite);
    };
    if c.is_zero() {
        return Ok(QuadraticReorder { d_prime: dm.clone(), prefactor: re(1.0) });
    }
    let kernel = &dinv - c;
    if !kernel.scale(re(sign)).is_positive_definite() {
        return Err(GwtError::ResultNotDefinite);
    }
    let d_prime = kernel.inverse()?;
    let n = dm.rows();
    let dc = dm * c;
    let root = continued_sqrt(|t| (&CMatrix::identity(n) - &dc.scale(re(t))).det())?;
    Ok(QuadraticReorder { d_prime, prefactor: root.inv() })
}

/// qp-ordered `exp(½Σ D_{ij}φ_iφ_j)` with `φ = (q, p)`, `q = (a + a†)/√2`,
/// `p = −i(a − a†)/√2`, as exact Fock matrix elements `⟨m|·|n⟩` for
/// `m, n < dim`.
///
/// Uses `∬ f(q,p)|q⟩⟨q|p⟩⟨p| dq dp` with the coherent-state generating
/// function `Σ s^m t^n ⟨m|X|n⟩/√(m!n!) = K·exp(As² + Bst + Ct²)`.
pub fn qp_ordered_gaussian(d: &CovarianceMatrix, dim: usize) -> Result<CMatrix> {
    if d.dim() != 2 {
        return Err(GwtError::DimensionMismatch(d.dim(), 2));
    }
    let dm = d.matrix();
    let i = Complex64::i();
    let m_of = |t: f64| {
        CMatrix::from_rows(&[
            alloc::vec![re(1.0) - dm[(0, 0)] * t, -(dm[(0, 1)] * t + i)],
            alloc::vec![-(dm[(1, 0)] * t + i), re(1.0) - dm[(1, 1)] * t],
        ])
    };
    let m = m_of(1.0)?;
    let det = m.det()?;
    if det.norm() < 1e-300 {
        return Err(GwtError::Singular);
    }
    let a = m[(1, 1)] / det - 0.5;
    let b = i * 2.0 * m[(0, 1)] / det;
    let c = -m[(0, 0)] / det + 0.5;
    let k = re(math::sqrt(2.0)) / continued_sqrt(|t| m_of(t)?.det())?;
    let lf: Vec<f64> = (0..dim.max(1)).map(math::ln_factorial).collect();
    let mut out = CMatrix::zeros(dim, dim);
    for row in 0..dim {
        for col in 0..dim {
            if (row + col) % 2 == 1 {
                continue;
            }
            let mut sum = Complex64::new(0.0, 0.0);
            for j in (row % 2..=row.min(col)).step_by(2) {
                if (col - j) % 2 == 1 {
                    continue;
                }
                let (ha, hc) = ((row - j) / 2, (col - j) / 2);
                let w = math::exp(0.5 * (lf[row] + lf[col]) - lf[j] - lf[ha] - lf[hc]);
                sum += b.powi(j as i32) * a.powi(ha as i32) * c.powi(hc as i32) * w;
            }
            out[(row, col)] = k * sum;
        }
    }
    Ok(out)
}

/// Outcome of reordering a single-mode quadratic exponential from qp to
/// normal order, checked on truncated Fock matrices.
#[derive(Clone, Debug)]
pub struct QuadraticCheck {
    pub contraction: CMatrix,
    pub reorder: QuadraticReorder,
    pub lhs: CMatrix,
    pub rhs: CMatrix,
    pub block: usize,
    pub error: f64,
}

/// Contraction `(qp − N)` on `(q, p)`, evaluated at `s = 1/√2`.
pub fn qp_normal_contraction() -> Result<CMatrix> {
    let m = models::quadratures();
    let qp = m.syms(&["q", "p"]);
    let l = BasisChange::from_algebra(&m.algebra, &qp);
    let c = contraction_def(&m.algebra, &Ordering::qp(), &Ordering::normal(), &l, &qp)?;
    evaluate_contraction(&m.algebra, &c, &models::quadrature_context())
}

/// `N[exp(½ D′φφ)]` for `φ = (q, p)` times `prefactor`, as a Fock matrix.
fn normal_quadratic_qp(reorder: &QuadraticReorder, modes: &ModeRegistry) -> Result<CMatrix> {
    let d = &reorder.d_prime;
    let half_i = Complex64::new(0.0, 0.5);
    let alpha = d[(0, 0)] * 0.25 - d[(1, 1)] * 0.25 + half_i * d[(0, 1)];
    let beta = (d[(0, 0)] + d[(1, 1)]) * 0.5;
    let gamma = d[(0, 0)] * 0.25 - d[(1, 1)] * 0.25 - half_i * d[(0, 1)];
    let one = |z: Complex64| CMatrix::diagonal(&[z]);
    Ok(normal_ordered_gaussian(modes, &one(alpha * 2.0), &one(beta), &one(gamma * 2.0))?.scale(reorder.prefactor))
}

/// Reorders `qp[e^{½Dφφ}]` into normal order and compares both sides on the
/// occupation `≤ block` corner of a `truncation`-level representation.
pub fn quadratic_check(d: &CovarianceMatrix, truncation: usize, block: usize) -> Result<QuadraticCheck> {
    let contraction = qp_normal_contraction()?;
    let reorder = reorder_quadratic_form(&contraction, d)?;
    let modes = models::single_mode().mode_registry(truncation)?;
    let lhs = qp_ordered_gaussian(d, truncation)?;
    let rhs = normal_quadratic_qp(&reorder, &modes)?;
    let error = block_compare(&lhs, &rhs, &modes, block)?;
    Ok(QuadraticCheck { contraction, reorder, lhs, rhs, block, error })
}

/// Two-mode squeezer `exp(g(ab − a†b†))` in normal order, three ways, next to
/// the matrix exponential of its truncated generator.
#[derive(Clone, Debug)]
pub struct SqueezeReport {
    pub g: f64,
    pub truncation: usize,
    /// `M|ξ|²` that makes the Gaussian average reproduce the squeezer.
    pub sigma: f64,
    /// Overall factor of the Gaussian representation at `sigma`.
    pub weight: f64,
    pub gwt: CMatrix,
    /// The closed form `√(g²+1)·N[exp(g/(g²+1)[ab − b†a† − 2g(a†a + b†b + 1)])]`.
    pub printed: CMatrix,
    /// Gaussian representation with `M|ξ|² = g` and unit weight.
    pub literal: CMatrix,
    pub reference: CMatrix,
    modes: ModeRegistry,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezeErrors {
    pub gwt: f64,
    pub printed: f64,
    pub literal: f64,
}

impl SqueezeReport {
    pub fn modes(&self) -> &ModeRegistry {
        &self.modes
    }

    pub fn block_errors(&self, block: usize) -> Result<SqueezeErrors> {
        Ok(SqueezeErrors {
            gwt: block_compare(&self.gwt, &self.reference, &self.modes, block)?,
            printed: block_compare(&self.printed, &self.reference, &self.modes, block)?,
            literal: block_compare(&self.literal, &self.reference, &self.modes, block)?,
        })
    }
}

/// `w·M W[exp(ξ₁a + ξ₁*b + ξ₂a† − ξ₂*b†)]` for `M|ξ|² = sigma`, `Mξ² = 0`,
/// taken to normal order through the W→N contraction and integrated in
/// closed form.
fn squeeze_pipeline(sigma: f64, weight: f64, modes: &ModeRegistry) -> Result<CMatrix> {
    let m = models::two_modes();
    let phi = m.syms(&["a", "a†", "b", "b†"]);
    let c = contraction_def(&m.algebra, &Ordering::weyl(), &Ordering::normal(), &BasisChange::identity(), &phi)?;
    let c = evaluate_contraction(&m.algebra, &c, &NumericContext::new())?;
    // ξ₁ = x₀ + ix₁, ξ₂ = x₂ + ix₃ with x real, M x x = (σ/2)I
    let i = Complex64::i();
    let (o, z) = (re(1.0), re(0.0));
    let lambda = CMatrix::from_rows(&[
        alloc::vec![o, z, o, z],
        alloc::vec![i, z, -i, z],
        alloc::vec![z, o, z, -o],
        alloc::vec![z, i, z, i],
    ])?;
    let k = &(&lambda * &c) * &lambda.transpose();
    let sig = CMatrix::identity(4).scale(re(sigma / 2.0));
    let sk = &sig * &k;
    let id = CMatrix::identity(4);
    let root = continued_sqrt(|t| (&id - &sk.scale(re(t))).det())?;
    // (Σ⁻¹ − K)⁻¹ = (I − ΣK)⁻¹Σ, finite at σ = 0
    let cov = &(&id - &sk).inverse()? * &sig;
    let g = &(&lambda.transpose() * &cov) * &lambda;
    let (an, cr) = ([0usize, 2], [1usize, 3]);
    let pick = |rows: [usize; 2], cols: [usize; 2]| CMatrix::from_fn(2, 2, |r, s| g[(rows[r], cols[s])]);
    let body = normal_ordered_gaussian(modes, &pick(cr, cr), &pick(cr, an), &pick(an, an))?;
    Ok(body.scale(re(weight) / root))
}

pub fn squeeze_normal_form(g: f64, truncation: usize) -> Result<SqueezeReport> {
    if !(g >= 0.0) {
        return Err(GwtError::NegativeParameter(g.to_string()));
    }
    if truncation < 10 {
        return Err(GwtError::TruncationTooSmall { got: truncation, min: 10 });
    }
    let m = models::two_modes();
    let modes = m.mode_registry(truncation)?;
    let (a, ad, b, bd) = (m.sym("a"), m.sym("a†"), m.sym("b"), m.sym("b†"));
    let word = |x, y| OperatorPoly::word(Word::new(alloc::vec![x, y]));
    let generator = &word(a, b) - &word(ad, bd);
    let reference = matexp(&represent(&m.algebra, &generator, &modes, &NumericContext::new())?.scale(re(g)))?;

    let sigma = 2.0 * math::tanh(g / 2.0);
    let weight = 1.0 / math::powi(math::cosh(g / 2.0), 2);
    let gwt = squeeze_pipeline(sigma, weight, &modes)?;
    let literal = squeeze_pipeline(g, 1.0, &modes)?;

    let kappa = g / (g * g + 1.0);
    let id = CMatrix::identity(2);
    let off = CMatrix::from_real_rows(&[alloc::vec![0.0, 1.0], alloc::vec![1.0, 0.0]])?;
    let printed = normal_ordered_gaussian(
        &modes,
        &off.scale(re(-kappa)),
        &id.scale(re(-2.0 * g * kappa)),
        &off.scale(re(kappa)),
    )?
    .scale(re(math::sqrt(g * g + 1.0) * math::exp(-2.0 * g * kappa)));

    Ok(SqueezeReport { g, truncation, sigma, weight, gwt, printed, literal, reference, modes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cov(rows: &[[f64; 2]]) -> CovarianceMatrix {
        CovarianceMatrix::from_real_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn isserlis_examples() {
        let d = CovarianceMatrix::from_real_rows(&[
            alloc::vec![1.0, 2.0, 3.0, 5.0],
            alloc::vec![2.0, 1.0, 7.0, 11.0],
            alloc::vec![3.0, 7.0, 1.0, 13.0],
            alloc::vec![5.0, 11.0, 13.0, 1.0],
        ])
        .unwrap();
        assert_eq!(isserlis_moment(&[0, 1], &d).unwrap(), re(2.0));
        assert_eq!(isserlis_moment(&[0, 1, 2], &d).unwrap(), re(0.0));
        assert_eq!(isserlis_moment(&[0, 1, 2, 3], &d).unwrap(), re(2.0 * 13.0 + 3.0 * 11.0 + 5.0 * 7.0));
        assert_eq!(isserlis_moment(&[0, 0, 0, 0], &d).unwrap(), re(3.0));
        assert!(matches!(isserlis_moment(&[4], &d), Err(GwtError::IndexOutOfRange { index: 4, dim: 4 })));
        assert_eq!(perfect_pairings(8).len(), 105);
    }

    #[test]
    fn covariance_must_be_symmetric() {
        assert_eq!(
            CovarianceMatrix::from_real_rows(&[alloc::vec![1.0, 2.0], alloc::vec![0.0, 1.0]]),
            Err(GwtError::NotSymmetric)
        );
    }

    #[test]
    fn zero_contraction_is_exact() {
        let d = cov(&[[0.8, 0.1], [0.1, 0.5]]);
        let r = reorder_quadratic_form(&CMatrix::zeros(2, 2), &d).unwrap();
        assert_eq!(r.d_prime, *d.matrix());
        assert_eq!(r.prefactor, re(1.0));
    }

    #[test]
    fn definiteness_checks() {
        let c = CMatrix::identity(2);
        assert_eq!(reorder_quadratic_form(&c, &cov(&[[1.0, 0.0], [0.0, -1.0]])), Err(GwtError::NotDefinite));
        // D⁻¹ − C = diag(0.5, 0.5) - I is negative while D > 0
        assert_eq!(reorder_quadratic_form(&c, &cov(&[[2.0, 0.0], [0.0, 2.0]])), Err(GwtError::ResultNotDefinite));
        let neg = reorder_quadratic_form(&c, &cov(&[[-1.0, 0.0], [0.0, -1.0]])).unwrap();
        assert!(neg.d_prime.max_abs_diff(&CMatrix::identity(2).scale(re(-0.5))).unwrap() < 1e-15);
        assert!((neg.prefactor - re(0.5)).norm() < 1e-15);
    }

    #[test]
    fn qp_contraction_values() {
        let c = qp_normal_contraction().unwrap();
        let want = CMatrix::from_rows(&[
            alloc::vec![re(0.5), Complex64::new(0.0, 0.5)],
            alloc::vec![Complex64::new(0.0, 0.5), re(0.5)],
        ])
        .unwrap();
        assert!(c.max_abs_diff(&want).unwrap() < 1e-15);
    }

    #[test]
    fn qp_ordered_gaussian_at_zero_is_identity() {
        let x = qp_ordered_gaussian(&cov(&[[0.0, 0.0], [0.0, 0.0]]), 12).unwrap();
        assert!(x.max_abs_diff(&CMatrix::identity(12)).unwrap() < 1e-14);
    }

    /// Power series `Σ_k qp[(½Dφφ)^k]/k!` on truncated q, p matrices.
    #[test]
    fn qp_ordered_gaussian_matches_power_series() {
        let d = cov(&[[0.12, 0.05], [0.05, -0.08]]);
        let n = 80;
        let m = models::quadratures();
        let modes = m.mode_registry(n).unwrap();
        let ctx = models::quadrature_context();
        let q = represent(&m.algebra, &OperatorPoly::symbol(m.sym("q")), &modes, &ctx).unwrap();
        let p = represent(&m.algebra, &OperatorPoly::symbol(m.sym("p")), &modes, &ctx).unwrap();
        let dm = d.matrix();
        // q^i p^j with coefficients of exp(½Dqq q² + Dqp qp + ½Dpp p²)
        let mut qpow = alloc::vec![CMatrix::identity(n)];
        let mut ppow = alloc::vec![CMatrix::identity(n)];
        for _ in 0..40 {
            qpow.push(&q * qpow.last().unwrap());
            ppow.push(&p * ppow.last().unwrap());
        }
        let mut series = CMatrix::zeros(n, n);
        let fact = |k: usize| (1..=k).map(|x| x as f64).product::<f64>();
        for a in 0..=10 {
            for b in 0..=10 {
                for c in 0..=10 {
                    let coeff = (dm[(0, 0)] * 0.5).powi(a) * dm[(0, 1)].powi(b) * (dm[(1, 1)] * 0.5).powi(c)
                        / (fact(a as usize) * fact(b as usize) * fact(c as usize));
                    let (i, j) = ((2 * a + b) as usize, (b + 2 * c) as usize);
                    series = &series + &(&qpow[i] * &ppow[j]).scale(coeff);
                }
            }
        }
        let exact = qp_ordered_gaussian(&d, n).unwrap();
        let err = block_compare(&exact, &series, &modes, 6).unwrap();
        assert!(err < 1e-7, "{err}");
    }

    #[test]
    fn quadratic_check_small_truncation() {
        let r = quadratic_check(&cov(&[[0.8, 0.0], [0.0, 0.5]]), 30, 10).unwrap();
        assert!((r.reorder.prefactor - re(1.0 / 0.55f64.sqrt())).norm() < 1e-12);
        assert!(r.error < 1e-10, "{}", r.error);
    }

    #[test]
    fn squeeze_zero_is_identity() {
        let r = squeeze_normal_form(0.0, 10).unwrap();
        assert!(r.gwt.max_abs_diff(&CMatrix::identity(100)).unwrap() < 1e-15);
        assert_eq!(r.weight, 1.0);
    }

    #[test]
    fn squeeze_rejects_bad_input() {
        assert!(matches!(squeeze_normal_form(-0.1, 20), Err(GwtError::NegativeParameter(_))));
        assert!(matches!(squeeze_normal_form(0.1, 9), Err(GwtError::TruncationTooSmall { got: 9, min: 10 })));
    }

    #[test]
    fn squeeze_gwt_matches_exponential() {
        let r = squeeze_normal_form(0.3, 16).unwrap();
        let e = r.block_errors(6).unwrap();
        assert!(e.gwt < 1e-8, "{e:?}");
        assert!(e.literal > 1e-3 && e.printed > 1e-3, "{e:?}");
    }
}
