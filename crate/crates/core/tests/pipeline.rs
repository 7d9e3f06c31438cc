//! Cross-module pipeline properties, checked against independent
//! closed-form oracles.

use proptest::prelude::*;

use ssfa_core::{
    assemble, builtin_cases, log_derivatives, reexpand, residuals, solve_even, Complex,
    LogDerivatives, PowerSeries, Precision, Real,
};

fn prec() -> Precision {
    Precision::default()
}

/// Closed-form series of Π_j (1 + b_j x)^{β_j} up to order k.
///
/// Goes through the logarithm: ln Π = Σ_j β_j ln(1 + b_j x) has Taylor
/// coefficients c_n = Σ_j β_j (-1)^{n-1} b_j^n / n, and the series exp
/// recursion n e_n = Σ_{m=1..n} m c_m e_{n-m} rebuilds the product.
/// This route shares no code with the production re-expansion.
fn product_series(pairs: &[(f64, f64)], k: usize) -> (Vec<Real>, Vec<Real>) {
    let p = prec();
    let mut log_coeffs = vec![Real::zero(&p)]; // c_0 unused
    for n in 1..=k {
        let mut c = Real::zero(&p);
        for &(b, beta) in pairs {
            let term = &Real::from_f64(beta, &p) * &Real::from_f64(b, &p).powi(n as i64);
            let term = &term / &Real::from_i64(n as i64, &p);
            c = if n % 2 == 1 { &c + &term } else { &c - &term };
        }
        log_coeffs.push(c);
    }
    let mut exp_coeffs = vec![Real::one(&p)];
    for n in 1..=k {
        let mut s = Real::zero(&p);
        for m in 1..=n {
            s = &s + &(&(&log_coeffs[m] * &exp_coeffs[n - m]) * &Real::from_i64(m as i64, &p));
        }
        exp_coeffs.push(&s / &Real::from_i64(n as i64, &p));
    }
    // moments D_n = Σ_j β_j b_j^n come straight from the log route
    let moments = (1..=k)
        .map(|n| {
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            &(&log_coeffs[n] * &Real::from_i64(n as i64, &p)) * &rconst(sign)
        })
        .collect();
    (exp_coeffs[1..].to_vec(), moments)
}

fn rconst(v: f64) -> Real {
    Real::from_f64(v, &Precision::default())
}

fn unit_series(coeffs: Vec<Real>) -> PowerSeries {
    let p = prec();
    PowerSeries::new(Real::one(&p), Real::zero(&p), Real::one(&p), coeffs).unwrap()
}

#[test]
fn moments_of_generated_products_hit_the_power_sums() {
    let p = prec();
    let pairs = [(0.7, 1.3), (2.4, -0.8)];
    let (coeffs, want_moments) = product_series(&pairs, 6);
    let d = log_derivatives(&unit_series(coeffs), 6).unwrap();
    for (got, want) in d.values().iter().zip(&want_moments) {
        let scale = rconst(1.0).max(&want.abs());
        assert!((&(got - want) / &scale).abs() < Real::pow10(-70, &p));
    }
}

#[test]
fn matching_condition_holds_for_every_builtin_case() {
    // re-expansion of the solved approximant reproduces the input
    // coefficients at every available even order
    let p = prec();
    let tol = Real::pow10(-20, &p);
    for case in builtin_cases() {
        let max_k = case.max_order().min(16);
        for k in (2..=max_k).step_by(2) {
            let series = case.series(k, &p).unwrap();
            let d = log_derivatives(&series, k).unwrap();
            let params = solve_even(&d, &p).unwrap();
            let approx = assemble(&series, &params);
            let back = reexpand(&approx, k, &p).unwrap();
            for (got, want) in back.iter().zip(series.coefficients()) {
                let scale = rconst(1.0).max(&want.abs());
                let rel = (&(got - want) / &scale).abs();
                assert!(
                    rel < tol,
                    "case {} order {k}: re-expansion drift {rel:?} (got {got:?}, want {want:?})",
                    case.name()
                );
            }
        }
    }
}

#[test]
fn residual_contract_holds_for_every_builtin_case() {
    let p = prec();
    let tol = p.residual_tol();
    for case in builtin_cases() {
        let max_k = case.max_order().min(16);
        for k in (2..=max_k).step_by(2) {
            let series = case.series(k, &p).unwrap();
            let d = log_derivatives(&series, k).unwrap();
            let params = solve_even(&d, &p).unwrap();
            for (r, dn) in residuals(&params, &d).unwrap().iter().zip(d.values()) {
                let bound = &tol * &rconst(1.0).max(&dn.abs());
                assert!(
                    *r <= bound,
                    "case {} order {k}: residual {r:?}",
                    case.name()
                );
            }
        }
    }
}

#[test]
fn partition_exponent_errors_decrease_monotonically() {
    // |eps(gamma_k)| strictly shrinks over k = 4..16
    let p = prec();
    let case = builtin_cases()
        .into_iter()
        .find(|c| c.name() == "partition_function")
        .unwrap();
    let orders: Vec<usize> = (2..=8).map(|i| 2 * i).collect();
    let table = ssfa_core::convergence_table(&case, &orders, &p).unwrap();
    let errs: Vec<f64> = table
        .rows
        .iter()
        .map(|row| match &row.outcome {
            ssfa_core::RowOutcome::Solved(s) => {
                s.exponent_error_percent.as_ref().unwrap().to_f64().abs()
            }
            other => panic!("row failed: {other:?}"),
        })
        .collect();
    for w in errs.windows(2) {
        assert!(
            w[1] < w[0],
            "|eps(gamma)| not strictly decreasing: {errs:?}"
        );
    }
}

#[test]
fn every_case_has_finite_errors_at_supported_orders() {
    let p = prec();
    for case in builtin_cases() {
        let exact = case.exact_limit(&p).unwrap();
        let max_k = case.max_order().min(16);
        for k in (2..=max_k).step_by(2) {
            let series = case.series(k, &p).unwrap();
            let (_, asym) = ssfa_core::extrapolate(&series, k, &p)
                .unwrap_or_else(|e| panic!("case {} order {k}: {e}", case.name()));
            let errs = ssfa_core::percentage_errors(&asym, &exact).unwrap();
            assert!(errs.amplitude_error_percent.is_finite());
            assert!(errs.exponent_error_percent.is_finite());
        }
    }
}

#[test]
fn limit_transforms_covariantly_under_rescaling() {
    // a_n -> a_n λ^n leaves gamma fixed and maps B -> B·λ^{Σ n_j}
    let p = prec();
    let pairs = [(0.9, 0.7), (3.1, -1.1)];
    let (coeffs, _) = product_series(&pairs, 4);
    let series = unit_series(coeffs);
    for lambda in [0.5, 2.0, 10.0] {
        let lam = Real::from_f64(lambda, &p);
        let scaled = ssfa_core::rescale(&series, &lam).unwrap();

        let solve = |s: &PowerSeries| {
            let d = log_derivatives(s, 4).unwrap();
            let params = solve_even(&d, &p).unwrap();
            let approx = assemble(s, &params);
            let asym = ssfa_core::asymptotic(&approx, &p).unwrap();
            let mut wsum = Real::zero(&p);
            for f in params.factors() {
                wsum = &wsum + &f.exponent.re;
            }
            (asym, wsum)
        };
        let (a0, wsum) = solve(&series);
        let (a1, _) = solve(&scaled);

        let gdiff = (&a1.exponent - &a0.exponent).abs();
        assert!(gdiff <= &Real::pow10(-20, &p) * &rconst(1.0).max(&a0.exponent.abs()));
        let want_b = &a0.amplitude * &lam.pow(&wsum);
        let bdiff = (&a1.amplitude - &want_b).abs();
        assert!(
            bdiff <= &Real::pow10(-20, &p) * &want_b.abs(),
            "B covariance off at λ = {lambda}: {bdiff:?}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Exactly reproducible inputs: the solver recovers the generators
    /// of Π (1 + b_j x)^{β_j} from 2M expansion terms.
    #[test]
    fn exactness_class_round_trip(
        m in 1usize..=3,
        raw_b in prop::collection::vec(0.2f64..5.0, 3),
        raw_beta in prop::collection::vec(-2.0f64..2.0, 3),
    ) {
        let p = prec();
        let mut bs: Vec<f64> = raw_b[..m].to_vec();
        bs.sort_by(f64::total_cmp);
        prop_assume!(bs.windows(2).all(|w| w[1] - w[0] > 1e-2));
        prop_assume!(raw_beta[..m].iter().all(|beta| beta.abs() > 1e-2));
        let pairs: Vec<(f64, f64)> = bs.iter().copied().zip(raw_beta[..m].iter().copied()).collect();

        let k = 2 * m;
        let (coeffs, _) = product_series(&pairs, k);
        let d = log_derivatives(&unit_series(coeffs.clone()), k).unwrap();
        let params = solve_even(&d, &p).unwrap();
        prop_assert_eq!(params.factors().len(), m);

        // factors sorted by descending |A|; generators sorted ascending
        let mut got: Vec<(f64, f64)> = params
            .factors()
            .iter()
            .map(|f| (f.scale.re.to_f64(), f.exponent.re.to_f64()))
            .collect();
        got.sort_by(|a, b| a.0.total_cmp(&b.0));
        for ((gb, gbeta), (wb, wbeta)) in got.iter().zip(&pairs) {
            prop_assert!((gb - wb).abs() <= 1e-15 * wb.abs(), "scale {gb} vs {wb}");
            prop_assert!((gbeta - wbeta).abs() <= 1e-15 * wbeta.abs().max(1.0), "weight {gbeta} vs {wbeta}");
        }

        // and the re-expansion reproduces the series to 1e-20 relative
        let approx = assemble(&unit_series(coeffs.clone()), &params);
        let back = reexpand(&approx, k, &p).unwrap();
        for (g, w) in back.iter().zip(&coeffs) {
            let scale = rconst(1.0).max(&w.abs());
            prop_assert!((&(g - w) / &scale).abs() < Real::pow10(-20, &p));
        }
    }

    /// Any real even-length moment vector that solves at full rank has a
    /// conjugate-closed factor set with a real weight sum.
    #[test]
    fn conjugate_closure_on_random_moments(
        vals in prop::collection::vec(-20.0f64..20.0, 4..=8),
    ) {
        let p = prec();
        let mut vals = vals;
        if vals.len() % 2 == 1 {
            vals.pop();
        }
        let d = LogDerivatives::from_values(
            vals.iter().map(|&v| Real::from_f64(v, &p)).collect(),
        ).unwrap();
        if let Ok(params) = solve_even(&d, &p) {
            let mut weight_sum = Complex::zero(&p);
            for f in params.factors() {
                weight_sum = &weight_sum + &f.exponent;
                if !f.scale.is_real() {
                    let partner = params.factors().iter().any(|g| {
                        g.scale == f.scale.conj() && g.exponent == f.exponent.conj()
                    });
                    prop_assert!(partner, "unpaired factor {:?}", f.scale);
                }
            }
            let bound = &Real::pow10(-20, &p) * &rconst(1.0).max(&weight_sum.re.abs());
            prop_assert!(weight_sum.im.abs() <= bound);
            // residual contract
            let tol = p.residual_tol();
            for (r, dn) in residuals(&params, &d).unwrap().iter().zip(d.values()) {
                prop_assert!(*r <= &tol * &rconst(1.0).max(&dn.abs()));
            }
        }
    }

    /// Rescaling moments scales the factor scales and leaves weights
    /// fixed.
    #[test]
    fn solver_scaling_covariance(
        vals in prop::collection::vec(-10.0f64..10.0, 4),
        lambda in prop::sample::select(vec![0.5f64, 2.0, 10.0]),
    ) {
        let p = prec();
        let d0 = LogDerivatives::from_values(
            vals.iter().map(|&v| Real::from_f64(v, &p)).collect(),
        ).unwrap();
        let lam = Real::from_f64(lambda, &p);
        let d1 = LogDerivatives::from_values(
            d0.values().iter().enumerate().map(|(i, v)| v * &lam.powi(i as i64 + 1)).collect(),
        ).unwrap();
        let (Ok(p0), Ok(p1)) = (solve_even(&d0, &p), solve_even(&d1, &p)) else {
            return Ok(());
        };
        prop_assert_eq!(p0.factors().len(), p1.factors().len());
        for (f0, f1) in p0.factors().iter().zip(p1.factors()) {
            let want = f0.scale.scale(&lam);
            prop_assert!((&f1.scale - &want).abs() <= &Real::pow10(-15, &p) * &want.abs());
            let wscale = rconst(1.0).max(&f0.exponent.abs());
            prop_assert!((&f1.exponent - &f0.exponent).abs() <= &Real::pow10(-15, &p) * &wscale);
        }
    }
}
