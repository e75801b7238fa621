//! Subcommand bodies. Each returns the rendered document and whether the
//! run counts as a success (only `verify` can fail without an error).

use gwt_core::contraction::{contraction_def, ContractionMatrix};
use gwt_core::fock::{block_compare, represent};
use gwt_core::gaussian::{evaluate_contraction, quadratic_check, reorder_quadratic_form, squeeze_normal_form, CovarianceMatrix};
use gwt_core::gwt::gwt_substitution;
use gwt_core::operator::OperatorPoly;
use gwt_core::oracle::{sweep, SweepReport, VerificationReport};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{Loaded, ResolvedPair};
use crate::error::{CliError, Result};
use crate::expr::{evaluate, parse_expression, EvalContext};
use crate::render::{self, Format};
use crate::scalar::format_scalar;

pub struct Output {
    pub document: String,
    pub success: bool,
}

impl Output {
    fn ok(document: String) -> Self {
        Self { document, success: true }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialise")
}

pub fn parse_poly(loaded: &Loaded, src: &str) -> Result<OperatorPoly> {
    let e = parse_expression(src, &loaded.scope)?;
    evaluate(&e, &EvalContext { algebra: &loaded.algebra, orderings: &loaded.orderings })
}

pub fn pair_contraction(loaded: &Loaded, pair: &ResolvedPair) -> Result<ContractionMatrix> {
    Ok(contraction_def(&loaded.algebra, &pair.o, &pair.oprime, &pair.basis, &pair.symbols)?)
}

pub fn contract(loaded: &Loaded, from: &str, to: &str, format: Format) -> Result<Output> {
    let pair = loaded.pair(from, to)?;
    let c = pair_contraction(loaded, &pair)?;
    let reg = loaded.algebra.registry();
    Ok(Output::ok(match format {
        Format::Text => render::contraction_text(&c, reg),
        Format::Json => pretty(&render::contraction_json(&c, reg)),
        Format::Latex => render::contraction_latex(&c, reg),
    }))
}

/// `O[F]` rewritten in `O′` form through the substitution GWT.
pub fn reorder(loaded: &Loaded, from: &str, to: &str, expr: &str, format: Format) -> Result<Output> {
    let pair = loaded.pair(from, to)?;
    let c = pair_contraction(loaded, &pair)?;
    let f = parse_poly(loaded, expr)?;
    let alg = &loaded.algebra;
    let out = gwt_substitution(alg, &pair.o, &pair.oprime, &pair.basis, &c, &f)?;
    let out = out.map_coefficients(|v| alg.normalize_scalar(v));
    let reg = alg.registry();
    Ok(Output::ok(match format {
        Format::Text => render::poly_text(&out, reg),
        Format::Json => {
            let mut v = render::poly_json(&out, reg);
            v["from"] = json!(pair.o.name());
            v["to"] = json!(pair.oprime.name());
            pretty(&v)
        }
        Format::Latex => format!(
            "{}\\left[{}\\right] = {}\\left[{}\\right]",
            render::ordering_latex(&pair.o),
            render::poly_latex(&f, reg),
            render::ordering_latex(&pair.oprime),
            render::poly_latex(&out, reg)
        ),
    }))
}

fn instance_json(loaded: &Loaded, r: &VerificationReport) -> Value {
    let reg = loaded.algebra.registry();
    let mut v = json!({
        "pair": r.pair,
        "word": r.word.display(reg).to_string(),
        "pass": r.pass,
        "lhs": render::poly_text(&r.lhs, reg),
    });
    if let Some((w, c)) = &r.first_difference {
        v["first_difference"] = json!({ "word": w.display(reg).to_string(), "coefficient": format_scalar(c) });
    }
    v
}

/// Triple-agreement sweep over every configured pair (or only `only`).
pub fn verify(loaded: &Loaded, max_len: usize, only: Option<&str>, format: Format) -> Result<Output> {
    let pairs = loaded.pairs()?;
    if pairs.is_empty() {
        return Err(CliError::Config("config declares no ordering pairs".into()));
    }
    let mut lines = Vec::new();
    let mut reports: Vec<SweepReport> = Vec::new();
    for p in &pairs {
        let gp = p.gwt_pair(&loaded.algebra)?;
        if only.is_some_and(|l| l != gp.label()) {
            continue;
        }
        let report = sweep(&loaded.algebra, &gp, max_len, &p.pool, |r| {
            if format == Format::Json {
                lines.push(serde_json::to_string(&instance_json(loaded, r)).expect("values serialise"));
            }
        })?;
        reports.push(report);
    }
    if reports.is_empty() {
        return Err(CliError::UnknownOrdering(only.unwrap_or_default().to_string()));
    }
    let success = reports.iter().all(SweepReport::all_passed);
    let reg = loaded.algebra.registry();
    let document = match format {
        Format::Json => {
            for r in &reports {
                lines.push(
                    serde_json::to_string(&json!({
                        "summary": r.pair, "instances": r.instances, "passed": r.passed, "failed": r.failed(),
                    }))
                    .expect("values serialise"),
                );
            }
            lines.join("\n")
        }
        Format::Text | Format::Latex => {
            let mut out = String::new();
            for r in &reports {
                out.push_str(&format!("{}: {}/{} passed\n", r.pair, r.passed, r.instances));
                for f in r.failures.iter().take(5) {
                    out.push_str(&format!("  FAIL {}\n", f.word.display(reg)));
                }
            }
            out
        }
    };
    Ok(Output { document, success })
}

pub fn numeric(loaded: &Loaded, truncation: usize, block: usize, lhs: &str, rhs: &str, format: Format) -> Result<Output> {
    let modes = loaded.mode_registry(truncation)?;
    let (p, q) = (parse_poly(loaded, lhs)?, parse_poly(loaded, rhs)?);
    let x = represent(&loaded.algebra, &p, &modes, &loaded.numeric)?;
    let y = represent(&loaded.algebra, &q, &modes, &loaded.numeric)?;
    let err = block_compare(&x, &y, &modes, block)?;
    let safe = modes.safe_block(p.degree().max(q.degree()));
    Ok(Output::ok(match format {
        Format::Json => pretty(&json!({
            "truncation": truncation, "block": block, "safe_block": safe, "max_abs_error": err,
        })),
        Format::Text | Format::Latex => format!(
            "max |Δ| on occupation ≤ {block}: {err:e} (truncation {truncation}, artifact-free up to {safe})"
        ),
    }))
}

pub fn read_matrix(text: &str) -> Result<CovarianceMatrix> {
    let rows: Vec<Vec<f64>> = serde_json::from_str(text).map_err(|e| CliError::Config(format!("matrix: {e}")))?;
    Ok(CovarianceMatrix::from_real_rows(&rows)?)
}

fn decimal(z: Complex64) -> String {
    render::complex_text(z)
}

/// `D′ = (D⁻¹ − C)⁻¹` and its prefactor; with a truncation, the qp → N
/// identity is also checked on Fock matrices.
pub fn quadratic(
    loaded: &Loaded,
    d: &CovarianceMatrix,
    from: &str,
    to: &str,
    check: Option<(usize, usize)>,
    format: Format,
) -> Result<Output> {
    let pair = loaded.pair(from, to)?;
    let c = evaluate_contraction(&loaded.algebra, &pair_contraction(loaded, &pair)?, &loaded.numeric)?;
    let r = reorder_quadratic_form(&c, d)?;
    let check = match check {
        Some((trunc, block)) => {
            if pair.o.name() != "qp" || pair.oprime.name() != "N" {
                return Err(gwt_core::GwtError::Unsupported("the Fock check covers qp → N only".into()).into());
            }
            Some(quadratic_check(d, trunc, block)?)
        }
        None => None,
    };
    Ok(Output::ok(match format {
        Format::Json => {
            let mut v = json!({
                "contraction": render::matrix_json(&c),
                "d_prime": render::matrix_json(&r.d_prime),
                "prefactor": decimal(r.prefactor),
            });
            if let Some(k) = &check {
                v["fock_check"] = json!({ "block": k.block, "max_abs_error": k.error });
            }
            pretty(&v)
        }
        Format::Text => {
            let mut out = format!(
                "C =\n{}\nD' =\n{}\nprefactor = {}\n",
                render::matrix_text(&c),
                render::matrix_text(&r.d_prime),
                decimal(r.prefactor)
            );
            if let Some(k) = &check {
                out.push_str(&format!("Fock check, occupation ≤ {}: max |Δ| = {:e}\n", k.block, k.error));
            }
            out
        }
        Format::Latex => format!(
            "D' = {},\\quad \\sqrt{{|D'|/|D|}} = {}",
            render::matrix_latex(&r.d_prime),
            decimal(r.prefactor)
        ),
    }))
}

pub fn squeeze(g: f64, truncation: usize, block: usize, format: Format) -> Result<Output> {
    let r = squeeze_normal_form(g, truncation)?;
    let e = r.block_errors(block)?;
    Ok(Output::ok(match format {
        Format::Json => pretty(&json!({
            "g": g, "truncation": truncation, "block": block,
            "sigma": r.sigma, "weight": r.weight,
            "max_abs_error": { "gwt": e.gwt, "printed": e.printed, "literal": e.literal },
        })),
        Format::Text | Format::Latex => format!(
            "g = {g}, truncation {truncation}, occupation ≤ {block}\n\
             GWT pipeline (M|ξ|² = {:.6}, weight {:.6}): max |Δ| = {:e}\n\
             printed closed form: max |Δ| = {:e}\n\
             M|ξ|² = g, unit weight: max |Δ| = {:e}\n",
            r.sigma, r.weight, e.gwt, e.printed, e.literal
        ),
    }))
}
