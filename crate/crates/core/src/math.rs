//! Float functions that work with and without `std`.

use num_traits::Float;

pub fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}

pub fn exp(x: f64) -> f64 {
    Float::exp(x)
}

pub fn ln(x: f64) -> f64 {
    Float::ln(x)
}

pub fn powi(x: f64, n: i32) -> f64 {
    Float::powi(x, n)
}

pub fn tanh(x: f64) -> f64 {
    Float::tanh(x)
}

pub fn cosh(x: f64) -> f64 {
    Float::cosh(x)
}

/// `ln n!`, summed directly.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| ln(k as f64)).sum()
}
