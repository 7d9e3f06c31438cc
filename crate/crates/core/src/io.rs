//! JSON and CSV surfaces.
//!
//! All JSON numerics are decimal strings so values survive precision
//! round-trips; plain JSON numbers are accepted on input and parsed
//! from their literal text (never through a double). Table CSV uses 6
//! significant digits; evaluation grids print 17 (the double-precision
//! user surface).

use serde_json::{json, Map, Value};

use crate::approximant::{AsymptoticForm, FactorApproximant};
use crate::cases::{ConvergenceTable, RowOutcome};
use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::precision::{Precision, Real};
use crate::series::PowerSeries;
use crate::solver::{Factor, FactorParameters};

const TABLE_SIG_DIGITS: usize = 6;

fn parse_value(v: &Value, what: &str, prec: &Precision) -> Result<Real> {
    match v {
        Value::Number(n) => Real::parse(&n.to_string(), prec),
        Value::String(s) => Real::parse(s, prec),
        other => Err(Error::Parse(format!(
            "{what} must be a number or decimal string, got {other}"
        ))),
    }
}

fn as_object<'v>(v: &'v Value, what: &str) -> Result<&'v Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::Parse(format!("{what} must be a JSON object")))
}

fn reject_unknown(map: &Map<String, Value>, allowed: &[&str], what: &str) -> Result<()> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Parse(format!("unknown key '{key}' in {what}")));
        }
    }
    Ok(())
}

/// Reads a series from its JSON schema:
/// `{"amplitude": 1, "exponent": 0, "substitution_power": 1,
///   "coefficients": [..numbers or decimal strings..]}`
/// with the first three keys optional.
pub fn series_from_json(text: &str, prec: &Precision) -> Result<PowerSeries> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let map = as_object(&value, "series")?;
    reject_unknown(
        map,
        &[
            "amplitude",
            "exponent",
            "substitution_power",
            "coefficients",
        ],
        "series",
    )?;
    let amplitude = match map.get("amplitude") {
        Some(v) => parse_value(v, "amplitude", prec)?,
        None => Real::one(prec),
    };
    let exponent = match map.get("exponent") {
        Some(v) => parse_value(v, "exponent", prec)?,
        None => Real::zero(prec),
    };
    let substitution_power = match map.get("substitution_power") {
        Some(v) => parse_value(v, "substitution_power", prec)?,
        None => Real::one(prec),
    };
    let coefficients = map
        .get("coefficients")
        .ok_or_else(|| Error::Parse("series is missing 'coefficients'".into()))?
        .as_array()
        .ok_or_else(|| Error::Parse("'coefficients' must be an array".into()))?
        .iter()
        .map(|v| parse_value(v, "coefficient", prec))
        .collect::<Result<Vec<_>>>()?;
    PowerSeries::new(amplitude, exponent, substitution_power, coefficients)
}

fn real_json(v: &Real, prec: &Precision) -> Value {
    Value::String(v.to_decimal_string(prec.digits() as usize))
}

fn complex_json(v: &Complex, prec: &Precision) -> Value {
    json!({ "re": real_json(&v.re, prec), "im": real_json(&v.im, prec) })
}

fn factors_json(factors: &[Factor], prec: &Precision) -> Value {
    Value::Array(
        factors
            .iter()
            .map(|f| json!({ "A": complex_json(&f.scale, prec), "n": complex_json(&f.exponent, prec) }))
            .collect(),
    )
}

/// `{"order": k, "factors": [{"A": {"re","im"}, "n": {"re","im"}}, ..]}`
/// with decimal-string numerics; imaginary parts always present.
pub fn parameters_to_json(params: &FactorParameters, prec: &Precision) -> String {
    let v = json!({
        "order": params.order(),
        "factors": factors_json(params.factors(), prec),
    });
    pretty(&v)
}

/// Factor parameters plus the prefactor fields, enough to re-evaluate
/// the approximant.
pub fn approximant_to_json(approx: &FactorApproximant, prec: &Precision) -> String {
    let v = json!({
        "amplitude": real_json(approx.amplitude(), prec),
        "exponent": real_json(approx.exponent(), prec),
        "substitution_power": real_json(approx.substitution_power(), prec),
        "order": approx.order(),
        "factors": factors_json(approx.factors(), prec),
    });
    pretty(&v)
}

fn complex_from_json(v: &Value, what: &str, prec: &Precision) -> Result<Complex> {
    let map = as_object(v, what)?;
    reject_unknown(map, &["re", "im"], what)?;
    let re = match map.get("re") {
        Some(v) => parse_value(v, "re", prec)?,
        None => return Err(Error::Parse(format!("{what} is missing 're'"))),
    };
    let im = match map.get("im") {
        Some(v) => parse_value(v, "im", prec)?,
        None => Real::zero(prec),
    };
    Ok(Complex::new(re, im))
}

pub fn approximant_from_json(text: &str, prec: &Precision) -> Result<FactorApproximant> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let map = as_object(&value, "approximant")?;
    reject_unknown(
        map,
        &[
            "amplitude",
            "exponent",
            "substitution_power",
            "order",
            "factors",
        ],
        "approximant",
    )?;
    let amplitude = match map.get("amplitude") {
        Some(v) => parse_value(v, "amplitude", prec)?,
        None => Real::one(prec),
    };
    let exponent = match map.get("exponent") {
        Some(v) => parse_value(v, "exponent", prec)?,
        None => Real::zero(prec),
    };
    let substitution_power = match map.get("substitution_power") {
        Some(v) => parse_value(v, "substitution_power", prec)?,
        None => Real::one(prec),
    };
    let factors_value = map
        .get("factors")
        .ok_or_else(|| Error::Parse("approximant is missing 'factors'".into()))?
        .as_array()
        .ok_or_else(|| Error::Parse("'factors' must be an array".into()))?;
    let mut factors = Vec::with_capacity(factors_value.len());
    for fv in factors_value {
        let fmap = as_object(fv, "factor")?;
        reject_unknown(fmap, &["A", "n"], "factor")?;
        let scale = complex_from_json(
            fmap.get("A")
                .ok_or_else(|| Error::Parse("factor is missing 'A'".into()))?,
            "A",
            prec,
        )?;
        let weight = complex_from_json(
            fmap.get("n")
                .ok_or_else(|| Error::Parse("factor is missing 'n'".into()))?,
            "n",
            prec,
        )?;
        factors.push(Factor {
            scale,
            exponent: weight,
        });
    }
    let order = match map.get("order") {
        Some(v) => v
            .as_u64()
            .ok_or_else(|| Error::Parse("'order' must be a non-negative integer".into()))?
            as usize,
        None => 2 * factors.len(),
    };
    if !amplitude.is_finite() || !exponent.is_finite() {
        return Err(Error::InvalidInput("prefactor must be finite".into()));
    }
    if !substitution_power.is_finite() || !substitution_power.is_positive() {
        return Err(Error::InvalidInput(
            "substitution power must be positive".into(),
        ));
    }
    Ok(FactorApproximant::new(
        amplitude,
        exponent,
        substitution_power,
        order,
        factors,
    ))
}

/// `{"B": "...", "gamma": "..."}`
pub fn asymptotic_to_json(asym: &AsymptoticForm, prec: &Precision) -> String {
    pretty(&asymptotic_value(asym, prec))
}

/// `{"eps_B_percent": "...", "eps_gamma_percent": "..."}`
pub fn error_report_to_json(report: &crate::approximant::ErrorReport, prec: &Precision) -> String {
    pretty(&json!({
        "eps_B_percent": real_json(&report.amplitude_error_percent, prec),
        "eps_gamma_percent": real_json(&report.exponent_error_percent, prec),
    }))
}

fn asymptotic_value(asym: &AsymptoticForm, prec: &Precision) -> Value {
    json!({
        "B": real_json(&asym.amplitude, prec),
        "gamma": real_json(&asym.exponent, prec),
    })
}

/// Combined solve output: approximant plus its large-variable limit.
pub fn solve_report_json(
    approx: &FactorApproximant,
    asym: &AsymptoticForm,
    prec: &Precision,
) -> String {
    let v = json!({
        "approximant": serde_json::from_str::<Value>(&approximant_to_json(approx, prec)).expect("own output"),
        "asymptotic": asymptotic_value(asym, prec),
    });
    pretty(&v)
}

/// Sectioned CSV for the solve output: one row per factor, then the
/// large-variable limit.
pub fn solve_report_csv(
    approx: &FactorApproximant,
    asym: &AsymptoticForm,
    prec: &Precision,
) -> String {
    let d = prec.digits() as usize;
    let mut out = String::from("field,re,im\n");
    for (i, f) in approx.factors().iter().enumerate() {
        out.push_str(&format!(
            "A_{},{},{}\n",
            i + 1,
            f.scale.re.to_decimal_string(d),
            f.scale.im.to_decimal_string(d)
        ));
        out.push_str(&format!(
            "n_{},{},{}\n",
            i + 1,
            f.exponent.re.to_decimal_string(d),
            f.exponent.im.to_decimal_string(d)
        ));
    }
    out.push_str(&format!("B,{},0\n", asym.amplitude.to_decimal_string(d)));
    out.push_str(&format!("gamma,{},0\n", asym.exponent.to_decimal_string(d)));
    out
}

/// CSV with the exact column set `k,B_k,eps_B_percent,gamma_k,eps_gamma_percent`
/// at 6 significant digits. Failed rows keep their k with empty cells.
pub fn table_to_csv(table: &ConvergenceTable) -> String {
    let mut out = String::from("k,B_k,eps_B_percent,gamma_k,eps_gamma_percent\n");
    for row in &table.rows {
        match &row.outcome {
            RowOutcome::Solved(s) => {
                let opt = |v: &Option<Real>| {
                    v.as_ref()
                        .map(|r| r.to_decimal_string(TABLE_SIG_DIGITS))
                        .unwrap_or_default()
                };
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.order,
                    s.amplitude.to_decimal_string(TABLE_SIG_DIGITS),
                    opt(&s.amplitude_error_percent),
                    s.exponent.to_decimal_string(TABLE_SIG_DIGITS),
                    opt(&s.exponent_error_percent),
                ));
            }
            RowOutcome::Failed { .. } => {
                out.push_str(&format!("{},,,,\n", row.order));
            }
        }
    }
    out
}

/// JSON mirror of the convergence table; failed rows carry the reason.
pub fn table_to_json(table: &ConvergenceTable) -> String {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| match &row.outcome {
            RowOutcome::Solved(s) => {
                let opt = |v: &Option<Real>| match v {
                    Some(r) => Value::String(r.to_decimal_string(TABLE_SIG_DIGITS)),
                    None => Value::Null,
                };
                json!({
                    "k": row.order,
                    "B_k": s.amplitude.to_decimal_string(TABLE_SIG_DIGITS),
                    "eps_B_percent": opt(&s.amplitude_error_percent),
                    "gamma_k": s.exponent.to_decimal_string(TABLE_SIG_DIGITS),
                    "eps_gamma_percent": opt(&s.exponent_error_percent),
                })
            }
            RowOutcome::Failed { reason } => json!({ "k": row.order, "failed": reason }),
        })
        .collect();
    pretty(&json!({ "case": table.case_name, "rows": rows }))
}

/// Two-column evaluation grid; `None` marks a point outside the domain
/// (empty cell). Values print as shortest round-trip doubles: the
/// evaluation surface is double precision.
pub fn grid_to_csv(points: &[(Real, Option<Real>)]) -> String {
    let mut out = String::from("x,f\n");
    for (x, f) in points {
        match f {
            Some(v) => out.push_str(&format!("{},{}\n", x.to_f64(), v.to_f64())),
            None => out.push_str(&format!("{},\n", x.to_f64())),
        }
    }
    out
}

/// Case listing: one line per case with its exact limit.
pub fn case_list_to_csv(cases: &[crate::cases::CaseDefinition], prec: &Precision) -> String {
    let mut out = String::from("name,max_order,B_exact,gamma_exact\n");
    for c in cases {
        let (b, g) = match c.exact_limit(prec) {
            Some(l) => (
                l.amplitude.to_decimal_string(7),
                l.exponent.to_decimal_string(7),
            ),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!("{},{},{},{}\n", c.name(), c.max_order(), b, g));
    }
    out
}

pub fn case_list_to_json(cases: &[crate::cases::CaseDefinition], prec: &Precision) -> String {
    let rows: Vec<Value> = cases
        .iter()
        .map(|c| {
            let limit = c.exact_limit(prec).map(|l| {
                json!({
                    "B": real_json(&l.amplitude, prec),
                    "gamma": real_json(&l.exponent, prec),
                })
            });
            json!({
                "name": c.name(),
                "description": c.description(),
                "max_order": c.max_order(),
                "exact_limit": limit,
            })
        })
        .collect();
    pretty(&Value::Array(rows))
}

/// `n,a_n` rows at full working precision.
pub fn coefficients_to_csv(coeffs: &[Real], prec: &Precision) -> String {
    let d = prec.digits() as usize;
    let mut out = String::from("n,a_n\n");
    for (i, c) in coeffs.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, c.to_decimal_string(d)));
    }
    out
}

pub fn coefficients_to_json(coeffs: &[Real], prec: &Precision) -> String {
    let d = prec.digits() as usize;
    let values: Vec<Value> = coeffs
        .iter()
        .map(|c| Value::String(c.to_decimal_string(d)))
        .collect();
    pretty(&Value::Array(values))
}

/// JSON mirror of the evaluation grid (`f` is null outside the domain).
pub fn grid_to_json(points: &[(Real, Option<Real>)]) -> String {
    let rows: Vec<Value> = points
        .iter()
        .map(|(x, f)| {
            json!({
                "x": x.to_f64(),
                "f": f.as_ref().map(Real::to_f64),
            })
        })
        .collect();
    pretty(&Value::Array(rows))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
