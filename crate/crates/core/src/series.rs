//! Truncated asymptotic expansions and their logarithmic-derivative
//! moments.
//!
//! A series is stored normalized: f(x) = A·x^α · (1 + a₁ t + ... + a_k t^k)
//! with t = x^p. The moments D_n are the right-hand sides of the
//! parameter equations solved downstream; they are scaled Taylor
//! coefficients of ln(1 + Σ a_m t^m) and are computed by a truncated
//! series logarithm, never by numerical differentiation.

use crate::error::{Error, Result};
use crate::precision::Real;

/// A truncated small-variable expansion with prefactor.
#[derive(Clone, Debug)]
pub struct PowerSeries {
    amplitude: Real,
    exponent: Real,
    substitution_power: Real,
    coefficients: Vec<Real>,
}

impl PowerSeries {
    /// Builds a series, enforcing the structural invariants: at least one
    /// finite coefficient and a positive, finite substitution power.
    pub fn new(
        amplitude: Real,
        exponent: Real,
        substitution_power: Real,
        coefficients: Vec<Real>,
    ) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidInput(
                "series needs at least one coefficient".into(),
            ));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "series coefficients must be finite".into(),
            ));
        }
        if !amplitude.is_finite() || !exponent.is_finite() {
            return Err(Error::InvalidInput("prefactor must be finite".into()));
        }
        if !substitution_power.is_finite() || !substitution_power.is_positive() {
            return Err(Error::InvalidInput(
                "substitution power must be positive".into(),
            ));
        }
        Ok(PowerSeries {
            amplitude,
            exponent,
            substitution_power,
            coefficients,
        })
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

    /// Normalized coefficients a₁..a_k (a₀ = 1 is implied).
    pub fn coefficients(&self) -> &[Real] {
        &self.coefficients
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }
}

/// The moment vector D₁..D_k.
#[derive(Clone, Debug)]
pub struct LogDerivatives {
    values: Vec<Real>,
}

impl LogDerivatives {
    pub fn values(&self) -> &[Real] {
        &self.values
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// Wraps a precomputed moment vector (test generators and the
    /// scaling-covariance suite construct these directly).
    pub fn from_values(values: Vec<Real>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput(
                "moment vector must not be empty".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("moments must be finite".into()));
        }
        Ok(LogDerivatives { values })
    }
}

/// First `k` log-derivative moments of the series.
///
/// c_n are the Taylor coefficients of ln(1 + Σ a_m t^m), obtained from
/// the convolution recursion c_n = a_n - (1/n) Σ_{m=1}^{n-1} m c_m a_{n-m};
/// then D_n = (-1)^{n-1} n c_n. Closed forms for the lowest orders:
/// D₁ = a₁, D₂ = a₁² - 2a₂.
pub fn log_derivatives(series: &PowerSeries, k: usize) -> Result<LogDerivatives> {
    if k == 0 {
        return Err(Error::InvalidInput(
            "moment order must be at least 1".into(),
        ));
    }
    if k > series.order() {
        return Err(Error::OrderTooLarge {
            requested: k,
            available: series.order(),
        });
    }
    let a = series.coefficients();
    let mut c: Vec<Real> = Vec::with_capacity(k);
    for n in 1..=k {
        let mut conv = a[n - 1].zero_like();
        for m in 1..n {
            conv = &conv + &(&(&c[m - 1] * &a[n - m - 1]) * &Real::const_f64(m as f64));
        }
        let cn = &a[n - 1] - &(&conv / &Real::const_f64(n as f64));
        c.push(cn);
    }
    let values = c
        .into_iter()
        .enumerate()
        .map(|(i, cn)| {
            let n = i + 1;
            let d = &cn * &Real::const_f64(n as f64);
            if n % 2 == 0 {
                -d
            } else {
                d
            }
        })
        .collect();
    Ok(LogDerivatives { values })
}

/// Coefficient rescaling a_n -> a_n λ^n; prefactor and substitution
/// power are untouched. Backs the scaling-covariance property checks.
pub fn rescale(series: &PowerSeries, lambda: &Real) -> Result<PowerSeries> {
    if !lambda.is_finite() || !lambda.is_positive() {
        return Err(Error::InvalidInput(
            "rescale factor must be positive and finite".into(),
        ));
    }
    let mut scaled = Vec::with_capacity(series.order());
    let mut pow = lambda.clone();
    for a in series.coefficients() {
        scaled.push(a * &pow);
        pow = &pow * lambda;
    }
    PowerSeries::new(
        series.amplitude().clone(),
        series.exponent().clone(),
        series.substitution_power().clone(),
        scaled,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::Precision;

    fn p() -> Precision {
        Precision::default()
    }

    fn series(coeffs: &[f64]) -> PowerSeries {
        let prec = p();
        PowerSeries::new(
            Real::one(&prec),
            Real::zero(&prec),
            Real::one(&prec),
            coeffs.iter().map(|&c| Real::from_f64(c, &prec)).collect(),
        )
        .unwrap()
    }

    /// Independent oracle: ln(1+u) = Σ_{m≥1} (-1)^{m-1} u^m / m with
    /// truncated polynomial powers, avoiding the production recursion.
    fn series_log_oracle(a: &[Real], k: usize) -> Vec<Real> {
        let prec = p();
        let mut u = vec![Real::zero(&prec); k + 1];
        for (i, ai) in a.iter().enumerate().take(k) {
            u[i + 1] = ai.clone();
        }
        let mut result = vec![Real::zero(&prec); k + 1];
        let mut upow = vec![Real::zero(&prec); k + 1];
        upow[0] = Real::one(&prec);
        for m in 1..=k {
            // upow <- upow * u, truncated
            let mut next = vec![Real::zero(&prec); k + 1];
            for i in 0..=k {
                if upow[i].is_zero() {
                    continue;
                }
                for j in 0..=(k - i) {
                    next[i + j] = &next[i + j] + &(&upow[i] * &u[j]);
                }
            }
            upow = next;
            let sign = if m % 2 == 1 { 1 } else { -1 };
            let w = Real::from_ratio(sign, m as i64, &prec);
            for i in 0..=k {
                result[i] = &result[i] + &(&w * &upow[i]);
            }
        }
        (1..=k)
            .map(|n| {
                let d = &result[n] * &Real::from_i64(n as i64, &prec);
                if n % 2 == 0 {
                    -&d
                } else {
                    d.clone()
                }
            })
            .collect()
    }

    fn assert_matches_oracle(coeffs: &[f64]) {
        let prec = p();
        let s = series(coeffs);
        let k = coeffs.len();
        let got = log_derivatives(&s, k).unwrap();
        let want = series_log_oracle(s.coefficients(), k);
        for (g, w) in got.values().iter().zip(&want) {
            let scale = Real::one(&prec).max(&w.abs());
            assert!(
                (&(g - w) / &scale).abs() < Real::pow10(-70, &prec),
                "got {g:?}, oracle {w:?}"
            );
        }
    }

    #[test]
    fn zero_series_has_zero_moments() {
        let s = series(&[0.0, 0.0]);
        let d = log_derivatives(&s, 2).unwrap();
        assert!(d.values()[0].is_zero());
        assert!(d.values()[1].is_zero());
    }

    #[test]
    fn cusp_moments_match_closed_forms() {
        // a = [-π²/3, 11π⁴/45]: D₁ = a₁, D₂ = a₁² - 2a₂ (frozen from the
        // closed forms; cross-checked against the series-log oracle)
        let prec = p();
        let pi2 = Real::pi(&prec).powi(2);
        let a1 = -&(&pi2 / &Real::from_i64(3, &prec));
        let a2 = &pi2.powi(2) * &Real::from_ratio(11, 45, &prec);
        let s = PowerSeries::new(
            Real::from_i64(4, &prec),
            Real::from_i64(2, &prec),
            Real::from_i64(2, &prec),
            vec![a1.clone(), a2.clone()],
        )
        .unwrap();
        let d = log_derivatives(&s, 2).unwrap();
        assert_eq!(&d.values()[0], &a1);
        let want2 = &a1.powi(2) - &(&a2 * &Real::from_i64(2, &prec));
        let tol = Real::pow10(-75, &prec);
        assert!((&d.values()[1] - &want2).abs() < &tol * &want2.abs());
        // the rounded reference decimals
        assert!((d.values()[0].to_f64() - -3.289868).abs() < 1e-6);
        assert!((d.values()[1].to_f64() - -36.79899).abs() < 1e-5);
        // and the independent oracle
        let oracle = series_log_oracle(s.coefficients(), 2);
        assert!((&d.values()[1] - &oracle[1]).abs() < &tol * &want2.abs());
    }

    #[test]
    fn anharmonic_first_two_moments() {
        let s = series(&[0.75, -2.625]);
        let d = log_derivatives(&s, 2).unwrap();
        assert_eq!(d.values()[0].to_f64(), 0.75);
        assert_eq!(d.values()[1].to_f64(), 5.8125);
        assert_matches_oracle(&[0.75, -2.625]);
    }

    #[test]
    fn deeper_orders_match_the_oracle() {
        assert_matches_oracle(&[2.0, -10.0, 78.66667, -736.2222]);
        assert_matches_oracle(&[
            4.0 / 3.0,
            -2.075385396,
            6.296879676,
            -25.05725072,
            116.134785,
            -594.71663,
        ]);
        assert_matches_oracle(&[0.1, 0.0, -0.3, 0.0, 0.2, 0.0, 0.7]);
    }

    #[test]
    fn binomial_series_moments_are_powers() {
        // a = [b, 0] gives D = [b, b²] for any b
        for b in [3.0, -1.25, 0.004, 17.5] {
            let prec = p();
            let s = series(&[b, 0.0]);
            let d = log_derivatives(&s, 2).unwrap();
            let br = Real::from_f64(b, &prec);
            assert!((&d.values()[0] - &br).abs() < Real::pow10(-70, &prec));
            assert!((&d.values()[1] - &br.powi(2)).abs() < Real::pow10(-70, &prec));
        }
    }

    #[test]
    fn order_above_truncation_is_rejected() {
        let s = series(&[1.0, 2.0]);
        match log_derivatives(&s, 3) {
            Err(Error::OrderTooLarge {
                requested: 3,
                available: 2,
            }) => {}
            other => panic!("expected OrderTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn rescale_examples() {
        let prec = p();
        let s = series(&[1.0, 1.0]);
        let r = rescale(&s, &Real::one(&prec)).unwrap();
        assert_eq!(r.coefficients()[0].to_f64(), 1.0);
        assert_eq!(r.coefficients()[1].to_f64(), 1.0);

        let s = series(&[0.75, -2.625]);
        let r = rescale(&s, &Real::from_i64(2, &prec)).unwrap();
        assert_eq!(r.coefficients()[0].to_f64(), 1.5);
        assert_eq!(r.coefficients()[1].to_f64(), -10.5);

        let s = series(&[4.0 / 3.0, -2.075385396]);
        let r = rescale(&s, &Real::from_f64(0.5, &prec)).unwrap();
        assert!((r.coefficients()[0].to_f64() - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.coefficients()[1].to_f64() - -0.518846349).abs() < 1e-9);
    }

    #[test]
    fn moments_scale_covariantly() {
        // D_n(rescaled by λ) = λ^n D_n
        let prec = p();
        for lambda in [0.5, 2.0, 10.0] {
            let s = series(&[1.9873, 0.1028, -0.77, 3.5]);
            let lam = Real::from_f64(lambda, &prec);
            let d0 = log_derivatives(&s, 4).unwrap();
            let d1 = log_derivatives(&rescale(&s, &lam).unwrap(), 4).unwrap();
            for (n, (a, b)) in d1.values().iter().zip(d0.values()).enumerate() {
                let want = b * &lam.powi(n as i64 + 1);
                let scale = Real::one(&prec).max(&want.abs());
                assert!((&(a - &want) / &scale).abs() < Real::pow10(-20, &prec));
            }
        }
    }

    #[test]
    fn log_derivatives_is_deterministic() {
        let s = series(&[0.75, -2.625, 20.8125, -241.2890625]);
        let d1 = log_derivatives(&s, 4).unwrap();
        let d2 = log_derivatives(&s, 4).unwrap();
        for (a, b) in d1.values().iter().zip(d2.values()) {
            assert_eq!(a, b);
            assert_eq!(a.to_decimal_string(80), b.to_decimal_string(80));
        }
    }
}
