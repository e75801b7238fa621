//! Text, JSON and LaTeX renderings of polynomials, contractions and matrices.

use clap::ValueEnum;
use gwt_core::contraction::ContractionMatrix;
use gwt_core::matrix::CMatrix;
use gwt_core::operator::{OperatorPoly, Registry, Word};
use gwt_core::ordering::Ordering;
use gwt_core::scalar::{GaussianRational, ScalarPoly};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::scalar::format_scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Latex,
}

pub fn poly_text(p: &OperatorPoly, reg: &Registry) -> String {
    p.display(reg).to_string()
}

pub fn poly_json(p: &OperatorPoly, reg: &Registry) -> Value {
    let terms: Vec<Value> = p
        .presentation_order()
        .into_iter()
        .map(|(w, c)| {
            json!({
                "word": w.factors().iter().map(|s| reg.name(*s)).collect::<Vec<_>>(),
                "coefficient": format_scalar(c),
            })
        })
        .collect();
    json!({ "text": poly_text(p, reg), "terms": terms })
}

/// `c0†@1` → `c_{0}^{\dagger}(1)`.
pub fn symbol_latex(name: &str) -> String {
    let (head, time) = match name.split_once('@') {
        Some((h, t)) => (h, Some(t)),
        None => (name, None),
    };
    let dagger = head.contains('†');
    let base: String = head.chars().filter(|&c| c != '†').collect();
    let split = base.find(|c: char| c.is_ascii_digit()).unwrap_or(base.len());
    let (letters, index) = base.split_at(split);
    let mut out = letters.to_string();
    if !index.is_empty() {
        out.push_str(&format!("_{{{index}}}"));
    }
    if dagger {
        out.push_str("^{\\dagger}");
    }
    if let Some(t) = time {
        out.push_str(&format!("({t})"));
    }
    out
}

pub fn ordering_latex(o: &Ordering) -> String {
    match o.name() {
        n @ ("N" | "A" | "W" | "T") => format!("\\mathcal{{{n}}}"),
        n => format!("\\mathcal{{O}}_{{\\mathrm{{{n}}}}}"),
    }
}

fn rational_latex(r: &BigRational) -> String {
    if r.is_negative() {
        format!("-{}", rational_latex(&-r))
    } else if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

fn gaussian_latex(c: &GaussianRational) -> String {
    let im = |x: &BigRational| if x.is_one() { "i".to_string() } else { format!("{}i", rational_latex(x)) };
    match (c.re().is_zero(), c.im().is_zero()) {
        (_, true) => rational_latex(c.re()),
        (true, false) => {
            let sign = if c.im().is_negative() { "-" } else { "" };
            format!("{sign}{}", im(&c.im().abs()))
        }
        (false, false) => {
            let sign = if c.im().is_negative() { "-" } else { "+" };
            format!("({}{sign}{})", rational_latex(c.re()), im(&c.im().abs()))
        }
    }
}

pub fn scalar_latex(p: &ScalarPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().enumerate() {
        let mono: String = m
            .factors()
            .iter()
            .map(|(n, e)| if *e == 1 { n.to_string() } else { format!("{n}^{{{e}}}") })
            .collect::<Vec<_>>()
            .join(" ");
        let coeff = gaussian_latex(c);
        let body = match (m.is_one(), c.is_one()) {
            (true, _) => coeff,
            (false, true) => mono,
            (false, false) if *c == -GaussianRational::one() => format!("-{mono}"),
            (false, false) => format!("{coeff}\\,{mono}"),
        };
        match (k, body.strip_prefix('-')) {
            (0, _) => out.push_str(&body),
            (_, Some(rest)) => out.push_str(&format!(" - {rest}")),
            (_, None) => out.push_str(&format!(" + {body}")),
        }
    }
    out
}

pub fn word_latex(w: &Word, reg: &Registry) -> String {
    w.factors().iter().map(|s| symbol_latex(reg.name(*s))).collect::<Vec<_>>().join(" ")
}

pub fn poly_latex(p: &OperatorPoly, reg: &Registry) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (w, c)) in p.presentation_order().into_iter().enumerate() {
        let word = word_latex(w, reg);
        let coeff = match c.constant_value() {
            Some(v) if v.is_one() && !w.is_empty() => String::new(),
            Some(v) if v == -GaussianRational::one() && !w.is_empty() => "-".into(),
            Some(v) => gaussian_latex(&v),
            None => format!("\\left({}\\right)", scalar_latex(c)),
        };
        let sep = if coeff.is_empty() || w.is_empty() { "" } else { "\\," };
        let body = format!("{coeff}{sep}{word}");
        if k > 0 {
            if let Some(rest) = body.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
                continue;
            }
            out.push_str(" + ");
        }
        out.push_str(&body);
    }
    out
}

pub fn contraction_text(c: &ContractionMatrix, reg: &Registry) -> String {
    let names: Vec<&str> = c.symbols().iter().map(|s| reg.name(*s)).collect();
    let rows = c.to_rows();
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(format_scalar).collect()).collect();
    let width = cells
        .iter()
        .flatten()
        .map(|s| s.chars().count())
        .chain(names.iter().map(|n| n.chars().count()))
        .max()
        .unwrap_or(1);
    let pad = |s: &str| format!("{s:>width$}");
    let mut out = String::new();
    if let Some((o, op)) = c.ordering_pair() {
        out.push_str(&format!("C = ({} - {})\n", o.name(), op.name()));
    }
    out.push_str(&pad(""));
    for n in &names {
        out.push_str("  ");
        out.push_str(&pad(n));
    }
    out.push('\n');
    for (n, row) in names.iter().zip(&cells) {
        out.push_str(&pad(n));
        for cell in row {
            out.push_str("  ");
            out.push_str(&pad(cell));
        }
        out.push('\n');
    }
    out
}

pub fn contraction_json(c: &ContractionMatrix, reg: &Registry) -> Value {
    let mut v = json!({
        "symbols": c.symbols().iter().map(|s| reg.name(*s)).collect::<Vec<_>>(),
        "entries": c.to_rows().iter().map(|r| r.iter().map(format_scalar).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    if let Some((o, op)) = c.ordering_pair() {
        v["from"] = json!(o.name());
        v["to"] = json!(op.name());
    }
    v
}

pub fn contraction_latex(c: &ContractionMatrix, reg: &Registry) -> String {
    let names: Vec<String> = c.symbols().iter().map(|s| symbol_latex(reg.name(*s))).collect();
    let mut out = String::new();
    if let Some((o, op)) = c.ordering_pair() {
        out.push_str(&format!("\\left({} - {}\\right):\\quad ", ordering_latex(o), ordering_latex(op)));
    }
    out.push_str(&format!("\\begin{{array}}{{c|{}}}\n", "c".repeat(names.len())));
    out.push_str(&format!(" & {} \\\\ \\hline\n", names.join(" & ")));
    for (n, row) in names.iter().zip(c.to_rows()) {
        let cells: Vec<String> = row.iter().map(scalar_latex).collect();
        out.push_str(&format!("{n} & {} \\\\\n", cells.join(" & ")));
    }
    out.push_str("\\end{array}");
    out
}

pub fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_text(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{} i", z.im)
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{} i", z.re, z.im.abs())
    }
}

/// Row-major `[re, im]` pairs.
pub fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(|z| complex_json(*z)).collect())).collect())
}

pub fn matrix_text(m: &CMatrix) -> String {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|z| complex_text(*z)).collect::<Vec<_>>().join("  "))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn matrix_latex(m: &CMatrix) -> String {
    let rows: Vec<String> = m
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|z| complex_text(*z).replace(" i", "i")).collect::<Vec<_>>().join(" & "))
        .collect();
    format!("\\begin{{pmatrix}} {} \\end{{pmatrix}}", rows.join(" \\\\ "))
}
