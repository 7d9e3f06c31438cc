//! Factor approximants: assembly, evaluation, re-expansion and the
//! large-variable limit.
//!
//! An approximant is f*(x) = A·x^α · Π_j (1 + A_j x^p)^{n_j}. Complex
//! powers use principal branches; conjugate pairs are multiplied
//! together before real parts are taken, which keeps the product of a
//! conjugate-closed factor set exactly real. For x -> ∞ the approximant
//! goes over into B·x^γ with B = A·Π_j A_j^{n_j} and γ = α + p·Σ_j n_j
//! (the substitution t = x^p folds the factor exponents back into the
//! physical variable).

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::precision::{Precision, Real};
use crate::series::PowerSeries;
use crate::solver::{Factor, FactorParameters};

/// Assembled approximant: prefactor and substitution power copied from
/// the source series, factors from the solver.
#[derive(Clone, Debug)]
pub struct FactorApproximant {
    amplitude: Real,
    exponent: Real,
    substitution_power: Real,
    order: usize,
    factors: Vec<Factor>,
}

impl FactorApproximant {
    pub fn new(
        amplitude: Real,
        exponent: Real,
        substitution_power: Real,
        order: usize,
        factors: Vec<Factor>,
    ) -> Self {
        FactorApproximant {
            amplitude,
            exponent,
            substitution_power,
            order,
            factors,
        }
    }

    pub fn amplitude(&self) -> &Real {
        &self.amplitude
    }

    pub fn exponent(&self) -> &Real {
        &self.exponent
    }

    pub fn substitution_power(&self) -> &Real {
        &self.substitution_power
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }
}

/// Large-variable power law B·x^γ.
#[derive(Clone, Debug)]
pub struct AsymptoticForm {
    pub amplitude: Real,
    pub exponent: Real,
}

/// Percentage deviations of a predicted power law from the exact one.
#[derive(Clone, Debug)]
pub struct ErrorReport {
    pub amplitude_error_percent: Real,
    pub exponent_error_percent: Real,
}

/// Carries prefactor and substitution power over from the series; the
/// factors are taken as solved.
pub fn assemble(series: &PowerSeries, params: &FactorParameters) -> FactorApproximant {
    FactorApproximant {
        amplitude: series.amplitude().clone(),
        exponent: series.exponent().clone(),
        substitution_power: series.substitution_power().clone(),
        order: params.order(),
        factors: params.factors().to_vec(),
    }
}

// Relative imaginary-part tolerance at the evaluation surface (double
// precision is the user-facing output there).
const EVAL_IMAG_TOL: f64 = 1e-10;

/// Evaluates the approximant at x > 0.
///
/// Runs in complex arithmetic and returns the real part after checking
/// that the imaginary remainder is negligible. A real factor base
/// 1 + A_j x^p <= 0 with non-integer exponent puts x outside the
/// physical domain of the approximant, as does a pole.
pub fn evaluate(approx: &FactorApproximant, x: &Real, prec: &Precision) -> Result<Real> {
    if !x.is_positive() || !x.is_finite() {
        return Err(Error::DomainViolation("evaluation requires x > 0".into()));
    }
    let t = power_positive(x, approx.substitution_power());
    let mut product = Complex::one(prec);
    for f in approx.factors() {
        let base = &Complex::from_real(t.clone()) * &f.scale + Complex::one(prec);
        if base.is_real() {
            if base.re.is_zero() {
                if f.exponent.is_real() && f.exponent.re.is_positive() {
                    // a genuine zero of the approximant
                    return Ok(Real::zero(prec));
                }
                return Err(Error::DomainViolation(format!(
                    "pole: 1 + A·x^p vanishes at x = {x}"
                )));
            }
            if base.re.is_negative() && !is_integer(&f.exponent) {
                return Err(Error::DomainViolation(format!(
                    "negative factor base 1 + A·x^p = {} with non-integer exponent",
                    base.re
                )));
            }
        }
        product = &product * &base.pow(&f.exponent);
    }
    let prefactor = &approx.amplitude * &power_positive(x, approx.exponent());
    let value = product.scale(&prefactor);
    let bound = &value.re.abs() * &Real::const_f64(EVAL_IMAG_TOL);
    if value.im.abs() > bound {
        return Err(Error::DomainViolation(format!(
            "imaginary remainder {} exceeds {} of the real part",
            value.im, EVAL_IMAG_TOL
        )));
    }
    Ok(value.re)
}

/// Evaluates the approximant over a grid; failures are per-point.
pub fn evaluate_grid(
    approx: &FactorApproximant,
    xs: &[Real],
    prec: &Precision,
) -> Vec<Result<Real>> {
    crate::par::pmap(xs.to_vec(), |x| evaluate(approx, &x, prec))
}

/// Sequential twin of [`evaluate_grid`] (kept for benchmarking the
/// parallel split).
pub fn evaluate_grid_seq(
    approx: &FactorApproximant,
    xs: &[Real],
    prec: &Precision,
) -> Vec<Result<Real>> {
    xs.iter().map(|x| evaluate(approx, x, prec)).collect()
}

/// Taylor coefficients of Π_j (1 + A_j t)^{n_j} in t up to order k
/// (a₀ = 1 omitted). Verifies the matching condition against the source
/// series.
pub fn reexpand(approx: &FactorApproximant, k: usize, prec: &Precision) -> Result<Vec<Real>> {
    if k == 0 {
        return Err(Error::InvalidInput(
            "re-expansion order must be at least 1".into(),
        ));
    }
    let mut series = vec![Complex::zero(prec); k + 1];
    series[0] = Complex::one(prec);
    for f in approx.factors() {
        // binomial series of (1 + A t)^n: term_m = term_{m-1}·(n-m+1)/m·A
        let mut binom = vec![Complex::one(prec)];
        let mut term = Complex::one(prec);
        for m in 1..=k {
            // 1/m must carry working precision, not the constant's
            let inv_m = Real::from_i64(m as i64, prec).recip();
            let num = &f.exponent - &Complex::from_real(Real::const_f64((m - 1) as f64));
            term = (&term * &num).scale(&inv_m);
            term = &term * &f.scale;
            binom.push(term.clone());
        }
        // truncated product
        let mut next = vec![Complex::zero(prec); k + 1];
        for (i, s) in series.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            for (j, b) in binom.iter().enumerate().take(k + 1 - i) {
                next[i + j] = &next[i + j] + &(s * b);
            }
        }
        series = next;
    }
    let tol = prec.imag_tol();
    let one = Real::const_f64(1.0);
    series
        .into_iter()
        .skip(1)
        .map(|c| {
            if c.im.abs() > &tol * &one.max(&c.re.abs()) {
                Err(Error::NonRealResult(format!(
                    "re-expanded coefficient has imaginary part {}",
                    c.im
                )))
            } else {
                Ok(c.re)
            }
        })
        .collect()
}

/// Large-variable limit B_k x^{γ_k}.
///
/// B_k = A·Π_j A_j^{n_j} with conjugate pairs combined first;
/// γ_k = α + p·Σ_j n_j, reported in the physical variable.
pub fn asymptotic(approx: &FactorApproximant, prec: &Precision) -> Result<AsymptoticForm> {
    let tol = prec.imag_tol();
    let one = Real::const_f64(1.0);

    let mut weight_sum = Complex::zero(prec);
    for f in approx.factors() {
        weight_sum = &weight_sum + &f.exponent;
    }
    if weight_sum.im.abs() > &tol * &one.max(&weight_sum.re.abs()) {
        return Err(Error::NonRealResult(format!(
            "factor exponents sum to a non-real value (imaginary part {})",
            weight_sum.im
        )));
    }
    let gamma = &approx.exponent + &(&approx.substitution_power * &weight_sum.re);

    // Product over factors, conjugate pairs first: A^n·conj(A)^conj(n)
    // = exp(2 Re(n ln A)) is exactly real.
    let n = approx.factors().len();
    let mut used = vec![false; n];
    let mut product = Complex::one(prec);
    for i in 0..n {
        if used[i] {
            continue;
        }
        let fi = &approx.factors()[i];
        if fi.scale.is_zero() {
            used[i] = true;
            continue; // dropped zero root contributes nothing
        }
        if !fi.scale.is_real() {
            if let Some(j) = (i + 1..n).find(|&j| {
                !used[j]
                    && approx.factors()[j].scale == fi.scale.conj()
                    && approx.factors()[j].exponent == fi.exponent.conj()
            }) {
                used[i] = true;
                used[j] = true;
                let re_part = (&fi.exponent * &fi.scale.ln()).re;
                let pair = (&re_part * &Real::const_f64(2.0)).exp();
                product = product.scale(&pair);
                continue;
            }
        }
        used[i] = true;
        product = &product * &fi.scale.pow(&fi.exponent);
    }
    if product.im.abs() > &tol * &one.max(&product.re.abs()) {
        return Err(Error::NonRealResult(format!(
            "large-variable amplitude has imaginary part {}",
            product.im
        )));
    }
    let amplitude = &approx.amplitude * &product.re;
    if !amplitude.is_finite() || !gamma.is_finite() {
        return Err(Error::NonRealResult(
            "large-variable limit is not finite".into(),
        ));
    }
    Ok(AsymptoticForm {
        amplitude,
        exponent: gamma,
    })
}

/// ε(B) = (B_k - B)/B·100 and ε(γ) = (γ_k - γ)/γ·100 against the exact
/// limit.
pub fn percentage_errors(
    predicted: &AsymptoticForm,
    exact: &AsymptoticForm,
) -> Result<ErrorReport> {
    if exact.amplitude.is_zero() || exact.exponent.is_zero() {
        return Err(Error::ZeroReference);
    }
    let hundred = Real::const_f64(100.0);
    Ok(ErrorReport {
        amplitude_error_percent: &(&(&predicted.amplitude - &exact.amplitude) / &exact.amplitude)
            * &hundred,
        exponent_error_percent: &(&(&predicted.exponent - &exact.exponent) / &exact.exponent)
            * &hundred,
    })
}

/// x^e for x > 0 via exp(e ln x); integer exponents take the exact path.
fn power_positive(x: &Real, e: &Real) -> Real {
    let rounded = e.round_int();
    if e == &rounded {
        let n = rounded.to_f64();
        if n.abs() < 1e15 {
            return x.powi(n as i64);
        }
    }
    (&x.ln() * e).exp()
}

fn is_integer(w: &Complex) -> bool {
    if !w.is_real() {
        let scale = Real::const_f64(1.0).max(&w.abs());
        if w.im.abs() > &scale * &Real::const_f64(EVAL_IMAG_TOL) {
            return false;
        }
    }
    let r = w.re.round_int();
    let scale = Real::const_f64(1.0).max(&w.re.abs());
    (&w.re - &r).abs() <= &scale * &Real::const_f64(EVAL_IMAG_TOL)
}
