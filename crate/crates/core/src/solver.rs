//! Solves the parameter equations Σ_j n_j A_j^n = D_n for the control
//! parameters (A_j, n_j) of a factor approximant.
//!
//! The weighted-power-sum structure of the equations is exactly Prony's
//! problem, so the even-order solver is non-iterative:
//!
//! 1. the moments obey a linear recurrence whose characteristic
//!    polynomial has the A_j as roots; the recurrence coefficients come
//!    from a Hankel-structured linear solve,
//! 2. the characteristic polynomial is rooted (Aberth simultaneous
//!    iteration at working precision, initialized on a Cauchy-bound
//!    circle),
//! 3. the weights n_j follow from a Vandermonde-type linear solve.
//!
//! Moments are equilibrated by the scaling covariance D_n -> D_n/σ^n
//! before the linear algebra; the roots are scaled back afterwards.
//! Without this the Hankel pivots of the factorially growing benchmark
//! series span so many orders of magnitude that genuine pivots become
//! indistinguishable from rank deficiency.
//!
//! Odd orders close the underdetermined system with the A_1 = 1
//! convention and run a damped Newton iteration, re-initialized from an
//! exact known-node reduction if the iteration stalls.

use std::cmp::Ordering;

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::precision::{Precision, Real};
use crate::series::LogDerivatives;

/// One binomial factor (1 + A t)^n: `scale` is A, `exponent` is n.
#[derive(Clone, Debug)]
pub struct Factor {
    pub scale: Complex,
    pub exponent: Complex,
}

/// Control parameters solved from a moment vector of length `order`.
///
/// Non-real factors occur in exact conjugate pairs. Degenerate inputs
/// (series already generated by fewer factors) yield fewer than the
/// nominal k/2 factors; surplus factors with negligible weights are
/// pruned.
#[derive(Clone, Debug)]
pub struct FactorParameters {
    order: usize,
    factors: Vec<Factor>,
}

impl FactorParameters {
    pub fn new(order: usize, factors: Vec<Factor>) -> Self {
        FactorParameters { order, factors }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }
}

/// Number of factors N_k: k/2 for even k, (k+1)/2 for odd k.
pub fn number_of_factors(k: usize) -> usize {
    k.div_ceil(2)
}

const NEWTON_CAP: usize = 200;
const ABERTH_CAP: usize = 2000;

/// Equation residuals |Σ_j n_j A_j^n - D_n| for n = 1..order.
///
/// Imaginary leftovers of the sum count toward the residual, so a factor
/// set that is not conjugate-closed cannot pass the residual contract.
pub fn residuals(params: &FactorParameters, d: &LogDerivatives) -> Result<Vec<Real>> {
    if d.order() < params.order() {
        return Err(Error::InvalidInput(format!(
            "{} moments cannot check a solution of order {}",
            d.order(),
            params.order()
        )));
    }
    Ok(raw_residuals(
        params.factors(),
        &d.values()[..params.order()],
    ))
}

fn raw_residuals(factors: &[Factor], d: &[Real]) -> Vec<Real> {
    d.iter()
        .enumerate()
        .map(|(i, dn)| {
            let n = (i + 1) as u64;
            let mut sum = Complex::from_real(dn.zero_like());
            for f in factors {
                sum = &sum + &(&f.exponent * &f.scale.powi(n));
            }
            Complex::new(&sum.re - dn, sum.im).abs()
        })
        .collect()
}

/// Largest residual relative to max(1, |D_n|); `None` when within `tol`.
fn residual_violation(factors: &[Factor], d: &[Real], tol: &Real) -> Option<f64> {
    let one = Real::const_f64(1.0);
    let mut worst: Option<Real> = None;
    for (r, dn) in raw_residuals(factors, d).iter().zip(d) {
        let rel = r / &one.max(&dn.abs());
        if worst.as_ref().is_none_or(|w| rel > *w) {
            worst = Some(rel);
        }
    }
    let worst = worst?;
    if worst > *tol {
        Some(worst.to_f64())
    } else {
        None
    }
}

/// Solves the even-order system (unique up to factor ordering).
pub fn solve_even(d: &LogDerivatives, prec: &Precision) -> Result<FactorParameters> {
    let k = d.order();
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "even-order solver got k = {k}"
        )));
    }
    let vals = d.values();
    let sigma = moment_scale(vals);
    let scaled = scale_moments(vals, &sigma);

    let mut n_try = k / 2;
    loop {
        match prony_attempt(&scaled, n_try, prec) {
            Ok(pairs) => {
                let factors = finish(pairs, &sigma, vals, prec)?;
                return Ok(FactorParameters { order: k, factors });
            }
            Err(Attempt::RankDeficient) if n_try > 0 => n_try -= 1,
            Err(Attempt::RankDeficient) => {
                // all-zero moments reduce to the empty factor set
                let factors = finish(Vec::new(), &sigma, vals, prec)?;
                return Ok(FactorParameters { order: k, factors });
            }
            Err(Attempt::Failed(e)) => return Err(e),
        }
    }
}

/// Solves an odd-order system under the A_1 = 1 convention.
pub fn solve_odd(d: &LogDerivatives, prec: &Precision) -> Result<FactorParameters> {
    solve_odd_capped(d, prec, NEWTON_CAP)
}

/// [`solve_odd`] with an explicit Newton iteration cap.
pub fn solve_odd_capped(
    d: &LogDerivatives,
    prec: &Precision,
    cap: usize,
) -> Result<FactorParameters> {
    let k = d.order();
    if k.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("odd-order solver got k = {k}")));
    }
    let vals = d.values();
    let tol = prec.residual_tol();

    if k == 1 {
        let factors = vec![Factor {
            scale: Complex::one(prec),
            exponent: Complex::from_real(vals[0].clone()),
        }];
        let factors = prune_and_sort(factors, prec);
        return match residual_violation(&factors, vals, &tol) {
            None => Ok(FactorParameters { order: 1, factors }),
            Some(residual) => Err(Error::NonConvergence { residual }),
        };
    }

    let n_factors = number_of_factors(k);

    // Initialization the solver contract asks for: the even-order
    // solution of D_1..D_{k-1} plus a new factor (1, 0).
    let mut best: Option<(Vec<Factor>, f64)> = None;
    let even_init = LogDerivatives::from_values(vals[..k - 1].to_vec())
        .and_then(|dm| solve_even(&dm, prec))
        .ok()
        .map(|p| pad_odd_init(p.factors().to_vec(), n_factors, prec));

    if let Some(init) = even_init {
        match newton_odd(&init, vals, prec, cap) {
            NewtonOutcome::Converged(factors) => {
                return finalize_odd(factors, k, vals, prec, &tol);
            }
            NewtonOutcome::Stalled(factors, residual) => best = Some((factors, residual)),
        }
    }

    // Exact fallback: with the node A_1 = 1 known, the remaining system
    // linearizes; Newton from there is a polish step.
    if let Some(init) = known_node_init(vals, n_factors, prec) {
        match newton_odd(&init, vals, prec, cap) {
            NewtonOutcome::Converged(factors) => {
                return finalize_odd(factors, k, vals, prec, &tol);
            }
            NewtonOutcome::Stalled(factors, residual) => {
                if best.as_ref().is_none_or(|(_, b)| residual < *b) {
                    best = Some((factors, residual));
                }
            }
        }
    }

    match best {
        Some((factors, residual)) => {
            // the stalled iterate may still satisfy the contract
            match residual_violation(&factors, vals, &tol) {
                None => finalize_odd(factors, k, vals, prec, &tol),
                Some(_) => Err(Error::NonConvergence { residual }),
            }
        }
        None => Err(Error::NonConvergence {
            residual: f64::INFINITY,
        }),
    }
}

fn finalize_odd(
    factors: Vec<Factor>,
    k: usize,
    vals: &[Real],
    prec: &Precision,
    tol: &Real,
) -> Result<FactorParameters> {
    let factors = enforce_closure(factors, prec);
    let factors = prune_and_sort(factors, prec);
    match residual_violation(&factors, vals, tol) {
        None => Ok(FactorParameters { order: k, factors }),
        Some(residual) => Err(Error::NonConvergence { residual }),
    }
}

// ---------- moment equilibration ----------

/// σ = max_n |D_n|^{1/n}; 1 for an all-zero vector.
fn moment_scale(d: &[Real]) -> Real {
    let mut best: Option<Real> = None;
    for (i, v) in d.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let root = (&v.abs().ln() / &Real::const_f64((i + 1) as f64)).exp();
        if best.as_ref().is_none_or(|b| root > *b) {
            best = Some(root);
        }
    }
    best.unwrap_or_else(|| Real::const_f64(1.0))
}

fn scale_moments(d: &[Real], sigma: &Real) -> Vec<Real> {
    let mut pow = sigma.clone();
    d.iter()
        .map(|v| {
            let s = v / &pow;
            pow = &pow * sigma;
            s
        })
        .collect()
}

// ---------- Prony pipeline ----------

enum Attempt {
    RankDeficient,
    Failed(Error),
}

/// Roots and weights of the scaled system with `n_try` candidate factors.
fn prony_attempt(
    scaled: &[Real],
    n_try: usize,
    prec: &Precision,
) -> std::result::Result<Vec<(Complex, Complex)>, Attempt> {
    if n_try == 0 {
        return if scaled.iter().all(|v| v.abs() < prec.residual_tol()) {
            Ok(Vec::new())
        } else {
            Err(Attempt::RankDeficient)
        };
    }

    // Hankel solve for the recurrence coefficients p_1..p_N.
    let n = n_try;
    let mut matrix = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for r in 0..n {
        let row: Vec<Complex> = (0..n)
            .map(|c| Complex::from_real(scaled[n + r - c - 1].clone()))
            .collect();
        matrix.push(row);
        rhs.push(Complex::from_real(-&scaled[n + r]));
    }
    let rec = solve_linear(matrix, rhs, prec).map_err(|e| match e {
        LinearFailure::RankDeficient => Attempt::RankDeficient,
        LinearFailure::NonFinite => Attempt::Failed(Error::NonConvergence {
            residual: f64::INFINITY,
        }),
    })?;

    // Characteristic polynomial λ^N + p_1 λ^{N-1} + ... + p_N.
    let mut roots = aberth_roots(&rec, prec).map_err(Attempt::Failed)?;

    // Zero roots contribute nothing to any equation.
    let drop_tol = prec.pivot_tol();
    roots.retain(|z| z.abs() > drop_tol);

    let roots = snap_and_pair(roots, prec).map_err(Attempt::Failed)?;

    // Vandermonde-type solve for the weights.
    let m = roots.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut matrix = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut powers: Vec<Complex> = vec![Complex::one(prec); m];
    for sn in scaled.iter().take(m) {
        for (p, z) in powers.iter_mut().zip(&roots) {
            *p = &*p * z;
        }
        matrix.push(powers.clone());
        rhs.push(Complex::from_real(sn.clone()));
    }
    let weights = solve_linear(matrix, rhs, prec).map_err(|e| match e {
        // coincident roots make the weight system singular: degenerate input
        LinearFailure::RankDeficient => Attempt::RankDeficient,
        LinearFailure::NonFinite => Attempt::Failed(Error::NonConvergence {
            residual: f64::INFINITY,
        }),
    })?;

    Ok(roots.into_iter().zip(weights).collect())
}

/// Unscale, enforce conjugate closure, prune, sort, verify.
fn finish(
    pairs: Vec<(Complex, Complex)>,
    sigma: &Real,
    vals: &[Real],
    prec: &Precision,
) -> Result<Vec<Factor>> {
    let factors: Vec<Factor> = pairs
        .into_iter()
        .map(|(root, weight)| Factor {
            scale: root.scale(sigma),
            exponent: weight,
        })
        .collect();
    let factors = enforce_closure(factors, prec);
    let factors = prune_and_sort(factors, prec);
    match residual_violation(&factors, vals, &prec.residual_tol()) {
        None => Ok(factors),
        Some(residual) => Err(Error::NonConvergence { residual }),
    }
}

// ---------- conjugate closure ----------

/// Snaps negligible imaginary parts to exact zero and replaces
/// near-conjugate root pairs by exact ones.
fn snap_and_pair(roots: Vec<Complex>, prec: &Precision) -> Result<Vec<Complex>> {
    let snap = prec.pivot_tol();
    let mut real_roots = Vec::new();
    let mut complex_roots = Vec::new();
    for z in roots {
        if z.im.abs() <= &snap * &z.abs() {
            real_roots.push(Complex::from_real(z.re));
        } else {
            complex_roots.push(z);
        }
    }
    if complex_roots.len() % 2 != 0 {
        return Err(Error::NonRealResult(
            "characteristic roots of a real moment vector did not pair up".into(),
        ));
    }
    let mut paired = Vec::new();
    while let Some(z) = complex_roots.pop() {
        // nearest conjugate partner
        let mut best: Option<(usize, Real)> = None;
        for (i, w) in complex_roots.iter().enumerate() {
            let dist = (&z.conj() - w).abs();
            if best.as_ref().is_none_or(|(_, b)| dist < *b) {
                best = Some((i, dist));
            }
        }
        let Some((i, dist)) = best else {
            return Err(Error::NonRealResult(
                "characteristic roots of a real moment vector did not pair up".into(),
            ));
        };
        if dist > &(&snap * &z.abs()) * &Real::const_f64(1e6) {
            return Err(Error::NonRealResult(
                "characteristic roots of a real moment vector did not pair up".into(),
            ));
        }
        let w = complex_roots.swap_remove(i);
        let mean = (&z + &w.conj()).scale(&Real::const_f64(0.5));
        let canonical = if mean.im.is_negative() {
            mean.conj()
        } else {
            mean
        };
        paired.push(canonical.conj());
        paired.push(canonical);
    }
    real_roots.extend(paired);
    Ok(real_roots)
}

/// Symmetrizes weights across conjugate factor pairs and snaps stray
/// imaginary parts on real-scale factors.
fn enforce_closure(factors: Vec<Factor>, prec: &Precision) -> Vec<Factor> {
    let snap = prec.pivot_tol();
    let n = factors.len();
    let mut out: Vec<Option<Factor>> = factors.into_iter().map(Some).collect();
    for i in 0..n {
        let Some(fi) = out[i].clone() else { continue };
        if fi.scale.is_real() {
            let w = &fi.exponent;
            let exponent = if w.im.abs() <= &snap * &Real::const_f64(1.0).max(&w.abs()) {
                Complex::from_real(w.re.clone())
            } else {
                w.clone()
            };
            out[i] = Some(Factor {
                scale: fi.scale,
                exponent,
            });
            continue;
        }
        // find the exact conjugate partner produced by snap_and_pair
        for j in (i + 1)..n {
            let Some(fj) = out[j].clone() else { continue };
            if fj.scale == fi.scale.conj() {
                let mean = (&fi.exponent + &fj.exponent.conj()).scale(&Real::const_f64(0.5));
                out[i] = Some(Factor {
                    scale: fi.scale.clone(),
                    exponent: mean.clone(),
                });
                out[j] = Some(Factor {
                    scale: fj.scale.clone(),
                    exponent: mean.conj(),
                });
                break;
            }
        }
    }
    out.into_iter().flatten().collect()
}

fn prune_and_sort(mut factors: Vec<Factor>, prec: &Precision) -> Vec<Factor> {
    let prune = prec.weight_prune_tol();
    factors.retain(|f| f.exponent.abs() >= prune && !f.scale.is_zero());
    factors.sort_by(|a, b| {
        let mag = b
            .scale
            .abs2()
            .partial_cmp(&a.scale.abs2())
            .unwrap_or(Ordering::Equal);
        mag.then_with(|| {
            b.scale
                .re
                .partial_cmp(&a.scale.re)
                .unwrap_or(Ordering::Equal)
        })
        .then_with(|| {
            b.scale
                .im
                .partial_cmp(&a.scale.im)
                .unwrap_or(Ordering::Equal)
        })
    });
    factors
}

// ---------- linear algebra ----------

enum LinearFailure {
    RankDeficient,
    NonFinite,
}

/// Gaussian elimination with partial pivoting. A pivot below
/// `pivot_tol` relative to the largest entry of the input matrix flags
/// rank deficiency.
fn solve_linear(
    mut a: Vec<Vec<Complex>>,
    mut b: Vec<Complex>,
    prec: &Precision,
) -> std::result::Result<Vec<Complex>, LinearFailure> {
    let n = a.len();
    let mut scale = Real::const_f64(0.0);
    for row in &a {
        for v in row {
            if !v.is_finite() {
                return Err(LinearFailure::NonFinite);
            }
            scale = scale.max(&v.abs2());
        }
    }
    if scale.is_zero() {
        return Err(LinearFailure::RankDeficient);
    }
    // abs2 comparisons: threshold enters squared
    let thresh = &scale * &prec.pivot_tol().powi(2);

    for col in 0..n {
        let mut pivot = col;
        let mut best = a[pivot][col].abs2();
        for (r, row) in a.iter().enumerate().skip(col + 1) {
            let m = row[col].abs2();
            if m > best {
                best = m;
                pivot = r;
            }
        }
        if best <= thresh {
            return Err(LinearFailure::RankDeficient);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let diag = a[col][col].clone();
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let m = &a[r][col] / &diag;
            let (head, tail) = a.split_at_mut(r);
            let pivot_row = &head[col];
            for (c, cell) in tail[0].iter_mut().enumerate().skip(col) {
                *cell = &*cell - &(&m * &pivot_row[c]);
            }
            b[r] = &b[r] - &(&m * &b[col]);
        }
    }

    let mut x = vec![Complex::zero(prec); n];
    for col in (0..n).rev() {
        let mut s = b[col].clone();
        for c in (col + 1)..n {
            s = &s - &(&a[col][c] * &x[c]);
        }
        x[col] = &s / &a[col][col];
        if !x[col].is_finite() {
            return Err(LinearFailure::NonFinite);
        }
    }
    Ok(x)
}

// ---------- polynomial roots ----------

/// All roots of z^n + q_1 z^{n-1} + ... + q_n (Aberth-Ehrlich at working
/// precision; cubic convergence for the simple roots these systems
/// produce after the degenerate-rank retries).
fn aberth_roots(q: &[Complex], prec: &Precision) -> Result<Vec<Complex>> {
    let n = q.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![-&q[0]]);
    }

    // Cauchy bound radius, safe in f64 because the moments were scaled.
    let mut bound = 0.0f64;
    for v in q {
        bound = bound.max(v.abs().to_f64());
    }
    let radius = 1.0 + bound;

    let mut z: Vec<Complex> = (0..n)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * (i as f64) / (n as f64) + 0.41;
            let r = radius * (0.6 + 0.25 * ((i % 3) as f64) / 3.0);
            Complex::new(
                Real::from_f64(r * angle.cos(), prec),
                Real::from_f64(r * angle.sin(), prec),
            )
        })
        .collect();

    let tol = Real::pow10(-(prec.digits() as i64 + 5), prec);
    let mut done = vec![false; n];

    for _ in 0..ABERTH_CAP {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = horner_with_derivative(q, &z[i]);
            if p.is_zero() {
                done[i] = true;
                continue;
            }
            if dp.is_zero() {
                // sitting on a critical point: nudge off it
                z[i] = &z[i] + &Complex::new(Real::pow10(-3, prec), Real::pow10(-3, prec));
                all_done = false;
                continue;
            }
            let w = &p / &dp;
            let mut s = Complex::zero(prec);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    s = &s + &(&z[i] - zj).recip();
                }
            }
            let denom = &Complex::one(prec) - &(&w * &s);
            let step = if denom.is_zero() { w } else { &w / &denom };
            let zi = &z[i] - &step;
            if step.abs() <= &tol * &(&Real::const_f64(1.0) + &zi.abs()) {
                done[i] = true;
            } else {
                all_done = false;
            }
            if !zi.is_finite() {
                return Err(Error::NonConvergence {
                    residual: f64::INFINITY,
                });
            }
            z[i] = zi;
        }
        if all_done {
            return Ok(z);
        }
    }

    // report the worst polynomial residual at the stalled iterate
    let mut worst = 0.0f64;
    for zi in &z {
        let (p, _) = horner_with_derivative(q, zi);
        worst = worst.max(p.abs().to_f64());
    }
    Err(Error::NonConvergence { residual: worst })
}

fn horner_with_derivative(q: &[Complex], z: &Complex) -> (Complex, Complex) {
    let one = Complex::from_real(z.re.one_like());
    let mut p = one.clone();
    let mut dp = Complex::from_real(z.re.zero_like());
    for qi in q {
        dp = &(&dp * z) + &p;
        p = &(&p * z) + qi;
    }
    (p, dp)
}

// ---------- odd-order Newton ----------

fn pad_odd_init(mut factors: Vec<Factor>, n_factors: usize, prec: &Precision) -> Vec<Factor> {
    let mut init = vec![Factor {
        scale: Complex::one(prec),
        exponent: Complex::zero(prec),
    }];
    factors.truncate(n_factors - 1);
    init.append(&mut factors);
    let mut pad = 1;
    while init.len() < n_factors {
        // deterministic distinct placeholders with zero weight
        init.push(Factor {
            scale: Complex::from_real(Real::from_ratio(pad, 2, prec)),
            exponent: Complex::zero(prec),
        });
        pad += 1;
    }
    init
}

enum NewtonOutcome {
    Converged(Vec<Factor>),
    Stalled(Vec<Factor>, f64),
}

/// Damped Newton on the k unknowns (n_1, A_2.., n_2..) with A_1 fixed
/// at one. `init` must have N_k factors, the first with scale 1.
fn newton_odd(init: &[Factor], d: &[Real], prec: &Precision, cap: usize) -> NewtonOutcome {
    let k = d.len();
    let nf = init.len();
    let tol = prec.residual_tol();
    let one = Real::const_f64(1.0);

    let mut factors = init.to_vec();
    let eval_f = |factors: &[Factor]| -> Vec<Complex> {
        (1..=k)
            .map(|n| {
                let mut s = Complex::from_real(-&d[n - 1]);
                for f in factors {
                    s = &s + &(&f.exponent * &f.scale.powi(n as u64));
                }
                s
            })
            .collect()
    };
    let max_rel = |f: &[Complex]| -> Real {
        let mut worst = Real::const_f64(0.0);
        for (i, v) in f.iter().enumerate() {
            let rel = &v.abs() / &one.max(&d[i].abs());
            worst = worst.max(&rel);
        }
        worst
    };
    let norm2 = |f: &[Complex]| -> Real {
        let mut s = Real::const_f64(0.0);
        for v in f {
            s = &s + &v.abs2();
        }
        s
    };

    let mut fval = eval_f(&factors);
    for _ in 0..cap {
        if max_rel(&fval) <= tol {
            return NewtonOutcome::Converged(factors);
        }

        // Jacobian columns: d/dn_1, then d/dA_j, d/dn_j for j >= 2.
        let mut jac: Vec<Vec<Complex>> = Vec::with_capacity(k);
        for n in 1..=k {
            let nr = Real::const_f64(n as f64);
            let mut row = Vec::with_capacity(k);
            row.push(Complex::one(prec)); // A_1^n = 1
            for f in &factors[1..] {
                let a_pow_nm1 = f.scale.powi(n as u64 - 1);
                row.push((&f.exponent * &a_pow_nm1).scale(&nr));
                row.push(&a_pow_nm1 * &f.scale);
            }
            jac.push(row);
        }
        let rhs: Vec<Complex> = fval.iter().map(|v| -v).collect();
        let delta = match solve_linear(jac, rhs, prec) {
            Ok(x) => x,
            Err(_) => return NewtonOutcome::Stalled(factors, max_rel(&fval).to_f64()),
        };

        let apply = |factors: &[Factor], t: f64| -> Vec<Factor> {
            let tr = Real::const_f64(t);
            let mut out = factors.to_vec();
            out[0].exponent = &out[0].exponent + &delta[0].scale(&tr);
            for j in 1..nf {
                out[j].scale = &out[j].scale + &delta[2 * j - 1].scale(&tr);
                out[j].exponent = &out[j].exponent + &delta[2 * j].scale(&tr);
            }
            out
        };

        let f0 = norm2(&fval);
        let mut t = 1.0f64;
        let mut accepted = false;
        for _ in 0..48 {
            let candidate = apply(&factors, t);
            let fc = eval_f(&candidate);
            if fc.iter().all(|v| v.is_finite())
                && norm2(&fc) < &f0 * &Real::const_f64(1.0 - 0.25 * t)
            {
                factors = candidate;
                fval = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return NewtonOutcome::Stalled(factors, max_rel(&fval).to_f64());
        }
    }
    let r = max_rel(&fval);
    if r <= tol {
        NewtonOutcome::Converged(factors)
    } else {
        NewtonOutcome::Stalled(factors, r.to_f64())
    }
}

/// Exact reduction for the odd system: with the node A_1 = 1 known, the
/// recurrence coefficients of the remaining nodes and the combined
/// unknown u = n_1·q(1) satisfy a linear system; roots and weights then
/// follow as in the even case.
fn known_node_init(d: &[Real], n_factors: usize, prec: &Precision) -> Option<Vec<Factor>> {
    let k = d.len();
    let m = n_factors - 1; // nodes besides the fixed one
    if m == 0 {
        return None;
    }
    // rows n = 1..m+1 over unknowns (q_1..q_m, u):
    // Σ_{i=1..m} q_i D_{n+m-i} - u = -D_{n+m}
    let rows = m + 1;
    let mut matrix = Vec::with_capacity(rows);
    let mut rhs = Vec::with_capacity(rows);
    for r in 0..rows {
        let n = r + 1;
        let mut row: Vec<Complex> = (1..=m)
            .map(|i| Complex::from_real(d[n + m - i - 1].clone()))
            .collect();
        row.push(Complex::from_real(-&Real::const_f64(1.0)));
        matrix.push(row);
        debug_assert!(n + m <= k);
        rhs.push(Complex::from_real(-&d[n + m - 1]));
    }
    let sol = solve_linear(matrix, rhs, prec).ok()?;
    let (q, u) = sol.split_at(m);

    let roots = aberth_roots(q, prec).ok()?;
    // q(1) = 1 + Σ q_i
    let mut q_at_one = Complex::one(prec);
    for qi in q {
        q_at_one = &q_at_one + qi;
    }
    if q_at_one.abs() < prec.pivot_tol() {
        return None;
    }
    let n1 = &u[0] / &q_at_one;

    // weights of the remaining nodes from Σ w_j A_j^n = D_n - n_1
    let mut matrix = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut powers: Vec<Complex> = vec![Complex::one(prec); m];
    for dn in d.iter().take(m) {
        for (p, z) in powers.iter_mut().zip(&roots) {
            *p = &*p * z;
        }
        matrix.push(powers.clone());
        rhs.push(&Complex::from_real(dn.clone()) - &n1);
    }
    let weights = solve_linear(matrix, rhs, prec).ok()?;

    let mut init = vec![Factor {
        scale: Complex::one(prec),
        exponent: n1,
    }];
    init.extend(
        roots
            .into_iter()
            .zip(weights)
            .map(|(scale, exponent)| Factor { scale, exponent }),
    );
    Some(init)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    fn moments(vals: &[f64]) -> LogDerivatives {
        let prec = p();
        LogDerivatives::from_values(vals.iter().map(|&v| Real::from_f64(v, &prec)).collect())
            .unwrap()
    }

    fn assert_residual_contract(params: &FactorParameters, d: &LogDerivatives) {
        let prec = p();
        let tol = prec.residual_tol();
        let one = Real::const_f64(1.0);
        for (r, dn) in residuals(params, d).unwrap().iter().zip(d.values()) {
            assert!(
                *r <= &tol * &one.max(&dn.abs()),
                "residual {r:?} above contract for D = {dn:?}"
            );
        }
    }

    #[test]
    fn factor_counts() {
        assert_eq!(number_of_factors(2), 1);
        assert_eq!(number_of_factors(3), 2);
        assert_eq!(number_of_factors(16), 8);
    }

    #[test]
    fn binomial_moments_recover_single_factor() {
        let d = moments(&[3.0, 9.0]);
        let params = solve_even(&d, &p()).unwrap();
        assert_eq!(params.factors().len(), 1);
        let f = &params.factors()[0];
        assert!((f.scale.re.to_f64() - 3.0).abs() < 1e-60);
        assert!(f.scale.im.is_zero());
        assert!((f.exponent.re.to_f64() - 1.0).abs() < 1e-60);
        assert_residual_contract(&params, &d);
    }

    #[test]
    fn cusp_moments_match_printed_parameters() {
        let prec = p();
        let pi2 = Real::pi(&prec).powi(2);
        let d1 = -&(&pi2 / &Real::from_i64(3, &prec));
        // D₂ = a₁² - 2a₂ = -17π⁴/45
        let d2 = -&(&pi2.powi(2) * &Real::from_ratio(17, 45, &prec));
        let d = LogDerivatives::from_values(vec![d1, d2]).unwrap();
        let params = solve_even(&d, &prec).unwrap();
        assert_eq!(params.factors().len(), 1);
        let f = &params.factors()[0];
        assert!((f.scale.re.to_f64() - 11.1856).abs() < 1e-3);
        assert!((f.exponent.re.to_f64() - -0.294118).abs() < 1e-6);
        assert_residual_contract(&params, &d);
    }

    #[test]
    fn continuum_schwinger_parameters() {
        let prec = p();
        let a1 = Real::parse("-0.219", &prec).unwrap() / Real::parse("0.5642", &prec).unwrap();
        let a2 = Real::parse("0.1907", &prec).unwrap() / Real::parse("0.5642", &prec).unwrap();
        let d2 = &a1.powi(2) - &(&a2 * &Real::from_i64(2, &prec));
        let d = LogDerivatives::from_values(vec![a1, d2]).unwrap();
        let params = solve_even(&d, &prec).unwrap();
        let f = &params.factors()[0];
        assert!((f.scale.re.to_f64() - 1.35339).abs() < 1e-4);
        assert!((f.exponent.re.to_f64() - -0.286805).abs() < 1e-4);
    }

    #[test]
    fn harmonium_parameters() {
        let prec = p();
        let a1 = Real::parse("1.987337", &prec).unwrap();
        let a2 = Real::parse("0.1028871", &prec).unwrap();
        let d2 = &a1.powi(2) - &(&a2 * &Real::from_i64(2, &prec));
        let d = LogDerivatives::from_values(vec![a1, d2]).unwrap();
        let params = solve_even(&d, &prec).unwrap();
        let f = &params.factors()[0];
        assert!((f.scale.re.to_f64() - 1.88379).abs() < 1e-4);
        assert!((f.exponent.re.to_f64() - 1.05496).abs() < 1e-4);
    }

    #[test]
    fn degenerate_even_input_reduces_rank() {
        // D_n = b^n is generated by the single factor (b, 1)
        let b: f64 = 1.5;
        let d = moments(&[b, b * b, b * b * b, b * b * b * b]);
        let params = solve_even(&d, &p()).unwrap();
        assert_eq!(params.factors().len(), 1);
        let f = &params.factors()[0];
        assert!((f.scale.re.to_f64() - b).abs() < 1e-50);
        assert!((f.exponent.re.to_f64() - 1.0).abs() < 1e-50);
        assert_residual_contract(&params, &d);
    }

    #[test]
    fn zero_moments_yield_empty_factor_set() {
        let d = moments(&[0.0, 0.0]);
        let params = solve_even(&d, &p()).unwrap();
        assert!(params.factors().is_empty());
    }

    #[test]
    fn inconsistent_moments_are_rejected() {
        // n·A = 0 and n·A² = 8 has no solution
        let d = moments(&[0.0, 8.0]);
        match solve_even(&d, &p()) {
            Err(Error::NonConvergence { .. }) => {}
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn conjugate_pair_recovery() {
        // D_n = Re((1+2i)^n) from the pair (1±2i, 1/2)
        let d = moments(&[1.0, -3.0, -11.0, -7.0]);
        let params = solve_even(&d, &p()).unwrap();
        assert_eq!(params.factors().len(), 2);
        let f0 = &params.factors()[0];
        let f1 = &params.factors()[1];
        assert_eq!(f0.scale, f1.scale.conj());
        assert_eq!(f0.exponent, f1.exponent.conj());
        assert!((f0.scale.re.to_f64() - 1.0).abs() < 1e-50);
        assert!((f0.scale.im.abs().to_f64() - 2.0).abs() < 1e-50);
        assert!((f0.exponent.re.to_f64() - 0.5).abs() < 1e-50);
        assert_residual_contract(&params, &d);
    }

    #[test]
    fn residual_examples() {
        let prec = p();
        let exact = FactorParameters::new(
            2,
            vec![Factor {
                scale: Complex::from_real(Real::from_i64(3, &prec)),
                exponent: Complex::one(&prec),
            }],
        );
        let d = moments(&[3.0, 9.0]);
        let r = residuals(&exact, &d).unwrap();
        assert!(r[0].is_zero() && r[1].is_zero());

        let d_off = moments(&[3.0, 10.0]);
        let r = residuals(&exact, &d_off).unwrap();
        assert!(r[0].is_zero());
        assert_eq!(r[1].to_f64(), 1.0);
    }

    #[test]
    fn odd_first_order_closed_form() {
        let d = moments(&[0.75]);
        let params = solve_odd(&d, &p()).unwrap();
        assert_eq!(params.factors().len(), 1);
        let f = &params.factors()[0];
        assert_eq!(f.scale.re.to_f64(), 1.0);
        assert_eq!(f.exponent.re.to_f64(), 0.75);
        assert_residual_contract(&params, &d);
    }

    #[test]
    fn odd_degenerate_binomial() {
        // (1+x): D_n = 1. The exact factor (1, 1) reproduces the moments
        // and the surplus factor carries no weight (pruned).
        let d = moments(&[1.0, 1.0, 1.0]);
        let params = solve_odd(&d, &p()).unwrap();
        assert_residual_contract(&params, &d);
        assert_eq!(params.factors().len(), 1);
        let f = &params.factors()[0];
        assert!((f.scale.re.to_f64() - 1.0).abs() < 1e-40);
        assert!((f.exponent.re.to_f64() - 1.0).abs() < 1e-40);
    }

    #[test]
    fn odd_third_order_cusp_series() {
        // three-term cusp series truncated with a₃ = 0
        let prec = p();
        let pi2 = Real::pi(&prec).powi(2);
        let a1 = -&(&pi2 / &Real::from_i64(3, &prec));
        let a2 = &pi2.powi(2) * &Real::from_ratio(11, 45, &prec);
        let zero = Real::zero(&prec);
        let s = crate::series::PowerSeries::new(
            Real::from_i64(4, &prec),
            Real::from_i64(2, &prec),
            Real::from_i64(2, &prec),
            vec![a1, a2, zero],
        )
        .unwrap();
        let d = crate::series::log_derivatives(&s, 3).unwrap();
        let params = solve_odd(&d, &prec).unwrap();
        assert_residual_contract(&params, &d);
        // A₁ = 1 convention: one factor sits at scale 1 unless pruned
        let has_unit = params
            .factors()
            .iter()
            .any(|f| f.scale.is_real() && (f.scale.re.to_f64() - 1.0).abs() < 1e-30);
        assert!(has_unit, "factors: {:?}", params.factors());
    }

    #[test]
    fn scaling_covariance() {
        let prec = p();
        let base = [0.8, -1.3, 2.9, 0.4, -5.5, 3.3];
        for lambda in [0.5, 2.0, 10.0] {
            let lam = Real::from_f64(lambda, &prec);
            let d0 = moments(&base);
            let scaled: Vec<Real> = d0
                .values()
                .iter()
                .enumerate()
                .map(|(i, v)| v * &lam.powi(i as i64 + 1))
                .collect();
            let d1 = LogDerivatives::from_values(scaled).unwrap();
            let p0 = solve_even(&d0, &prec).unwrap();
            let p1 = solve_even(&d1, &prec).unwrap();
            assert_eq!(p0.factors().len(), p1.factors().len());
            for (f0, f1) in p0.factors().iter().zip(p1.factors()) {
                let want = f0.scale.scale(&lam);
                let diff = (&f1.scale - &want).abs();
                assert!(diff < &Real::pow10(-60, &prec) * &want.abs());
                let wdiff = (&f1.exponent - &f0.exponent).abs();
                assert!(
                    wdiff
                        < &Real::pow10(-60, &prec) * &Real::const_f64(1.0).max(&f0.exponent.abs())
                );
            }
        }
    }
}
