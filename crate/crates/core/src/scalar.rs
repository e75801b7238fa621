//! Exact c-number arithmetic.
//!
//! Coefficients live in `ℚ(i)[x₁, x₂, …]`: polynomials in named commuting
//! symbols with Gaussian-rational coefficients. Nothing here ever rounds.
//! Floating point only enters through [`ScalarPoly::evaluate`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{GwtError, Result};

/// An element `re + i·im` of `ℚ(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    /// `num/den`; panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(BigRational::new(num.into(), den.into()), BigRational::zero())
    }

    pub fn complex(re: BigRational, im: BigRational) -> Self {
        Self::new(re, im)
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|²`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if r.denom().is_one() {
            write!(f, "{}", r.numer())
        } else {
            write!(f, "{}/{}", r.numer(), r.denom())
        }
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(r: BigRational) -> Self {
        Self::new(r, BigRational::zero())
    }
}

impl From<BigInt> for GaussianRational {
    fn from(n: BigInt) -> Self {
        Self::new(BigRational::from_integer(n), BigRational::zero())
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident :: $m:ident),*) => {$(
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(GaussianRational, Add::add, Sub::sub, Mul::mul);

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_abs = self.im.abs();
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => Self::fmt_rational(&self.re, f),
            (true, false) => {
                if self.im.is_negative() {
                    f.write_str("-")?;
                }
                if im_abs.is_one() {
                    f.write_str("i")
                } else {
                    Self::fmt_rational(&im_abs, f)?;
                    f.write_str(" i")
                }
            }
            (false, false) => {
                Self::fmt_rational(&self.re, f)?;
                f.write_str(if self.im.is_negative() { "-" } else { "+" })?;
                if im_abs.is_one() {
                    f.write_str("i")
                } else {
                    Self::fmt_rational(&im_abs, f)?;
                    f.write_str(" i")
                }
            }
        }
    }
}

/// A product of named commuting symbols with positive exponents, sorted by
/// name. The empty monomial is `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(Arc<str>, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Self(alloc::vec![(Arc::from(name), 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Arc<str>, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, name: &str) -> u32 {
        self.0
            .iter()
            .find(|(n, _)| &**n == name)
            .map_or(0, |(_, e)| *e)
    }

    pub fn degree_in(&self, names: &BTreeSet<String>) -> u32 {
        self.0
            .iter()
            .filter(|(n, _)| names.contains(&**n))
            .map(|(_, e)| e)
            .sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                core::cmp::Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    fn with_exponent(&self, name: &Arc<str>, exp: u32) -> Monomial {
        let mut v: Vec<_> = self.0.iter().filter(|(n, _)| n != name).cloned().collect();
        if exp > 0 {
            let pos = v.partition_point(|(n, _)| n < name);
            v.insert(pos, (name.clone(), exp));
        }
        Monomial(v)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, (name, exp)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *exp == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{exp}")?;
            }
        }
        Ok(())
    }
}

/// Exact multivariate polynomial over `ℚ(i)`, the c-number ring.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScalarPoly {
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl ScalarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(GaussianRational::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::constant(GaussianRational::ratio(num, den))
    }

    pub fn i() -> Self {
        Self::constant(GaussianRational::i())
    }

    pub fn symbol(name: &str) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::var(name), GaussianRational::one());
        p
    }

    pub fn term(mono: Monomial, coeff: GaussianRational) -> Self {
        let mut p = Self::zero();
        p.add_term(mono, coeff);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_value().is_some_and(|c| c.is_one())
    }

    /// The value when the polynomial has no free symbols.
    pub fn constant_value(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: Monomial, coeff: GaussianRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &ScalarPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> ScalarPoly {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> ScalarPoly {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn free_symbols(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(n, _)| n.to_string()))
            .collect()
    }

    /// Largest total degree of any term in the given symbols.
    pub fn degree_in(&self, names: &BTreeSet<String>) -> u32 {
        self.terms.keys().map(|m| m.degree_in(names)).max().unwrap_or(0)
    }

    /// Drops every term whose total degree in `names` exceeds `max`.
    pub fn truncate_degree(&self, names: &BTreeSet<String>, max: u32) -> ScalarPoly {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree_in(names) <= max)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Rewrites every `x^e` with a registered relation `x² = v` into
    /// `v^(e/2) · x^(e mod 2)`.
    pub fn reduce(&self, relations: &SquareRelations) -> ScalarPoly {
        if relations.is_empty() {
            return self.clone();
        }
        let mut out = ScalarPoly::zero();
        for (m, c) in &self.terms {
            let mut mono = m.clone();
            let mut coeff = c.clone();
            for (name, exp) in m.0.iter() {
                if let Some(v) = relations.get(name) {
                    if *exp >= 2 {
                        coeff = &coeff * &v.pow(exp / 2);
                        mono = mono.with_exponent(name, exp % 2);
                    }
                }
            }
            out.add_term(mono, coeff);
        }
        out
    }

    /// Numeric value under a symbol assignment.
    pub fn evaluate(&self, ctx: &NumericContext) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = c.to_complex64();
            for (name, exp) in m.0.iter() {
                let x = ctx
                    .get(name)
                    .ok_or_else(|| GwtError::UnassignedSymbol(name.to_string()))?;
                v *= x.powu(*exp);
            }
            total += v;
        }
        Ok(total)
    }

    /// Complex conjugate of every coefficient; symbols are treated as real.
    pub fn conj(&self) -> ScalarPoly {
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect(),
        }
    }
}

impl From<GaussianRational> for ScalarPoly {
    fn from(c: GaussianRational) -> Self {
        Self::constant(c)
    }
}

impl<'a> Add<&'a ScalarPoly> for &'a ScalarPoly {
    type Output = ScalarPoly;
    fn add(self, rhs: &ScalarPoly) -> ScalarPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<'a> Sub<&'a ScalarPoly> for &'a ScalarPoly {
    type Output = ScalarPoly;
    fn sub(self, rhs: &ScalarPoly) -> ScalarPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a ScalarPoly> for &'a ScalarPoly {
    type Output = ScalarPoly;
    fn mul(self, rhs: &ScalarPoly) -> ScalarPoly {
        let mut out = ScalarPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &ScalarPoly {
    type Output = ScalarPoly;
    fn neg(self) -> ScalarPoly {
        ScalarPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for ScalarPoly {
    type Output = ScalarPoly;
    fn neg(self) -> ScalarPoly {
        -&self
    }
}

impl AddAssign<&ScalarPoly> for ScalarPoly {
    fn add_assign(&mut self, rhs: &ScalarPoly) {
        self.add_assign_ref(rhs);
    }
}

forward_owned!(ScalarPoly, Add::add, Sub::sub, Mul::mul);

impl fmt::Display for ScalarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative_real = c.is_real() && c.re().is_negative();
            let shown = if negative_real && k > 0 { -c } else { c.clone() };
            if k > 0 {
                f.write_str(if negative_real { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{shown}")?;
            } else if shown.is_one() {
                write!(f, "{m}")?;
            } else if shown == -GaussianRational::one() {
                write!(f, "-{m}")?;
            } else if shown.is_real() {
                write!(f, "{shown}*{m}")?;
            } else {
                write!(f, "({shown})*{m}")?;
            }
        }
        Ok(())
    }
}

/// Relations `x² = v` that turn a symbol into an exact square root, e.g.
/// `s² = 1/2` for the `1/√2` in quadrature definitions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SquareRelations(BTreeMap<Arc<str>, GaussianRational>);

impl SquareRelations {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, square: GaussianRational) {
        self.0.insert(Arc::from(name), square);
    }

    pub fn get(&self, name: &str) -> Option<&GaussianRational> {
        self.0.get(name)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &GaussianRational)> {
        self.0.iter().map(|(k, v)| (&**k, v))
    }
}

/// Numeric values for scalar symbols.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NumericContext {
    assignments: BTreeMap<String, Complex64>,
}

impl NumericContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: Complex64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: Complex64) {
        self.assignments.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<Complex64> {
        self.assignments.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Complex64)> {
        self.assignments.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// Evaluate `p` under `ctx`.
pub fn evaluate_scalar(p: &ScalarPoly, ctx: &NumericContext) -> Result<Complex64> {
    p.evaluate(ctx)
}
