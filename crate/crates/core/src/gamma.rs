//! Gamma function at working precision.
//!
//! Spouge's approximation with the parameter `a` sized to the requested
//! digit count. The coefficient table is cached per precision on each
//! thread, so coefficient generators (which call this once per series
//! term) stay cheap. Validated against Γ(1/2) = √π, integer factorials
//! and the half-integer closed forms.

use std::cell::RefCell;

use crate::precision::{Precision, Real};

// Spouge's relative error is ~ a^{-1/2} (2π)^{-(a+1/2)}:
// every unit of `a` buys log10(2π) ≈ 0.798 digits.
const DIGITS_PER_A: f64 = 0.79818;

thread_local! {
    static COEFFS: RefCell<Option<(usize, Vec<Real>)>> = const { RefCell::new(None) };
}

fn spouge_a(prec: &Precision) -> usize {
    ((prec.digits() as f64 + 10.0) / DIGITS_PER_A).ceil() as usize + 1
}

/// c_0 = sqrt(2π), c_k = (-1)^{k-1} (a-k)^{k-1/2} e^{a-k} / (k-1)!
fn coefficients(prec: &Precision) -> Vec<Real> {
    let a = spouge_a(prec);
    // Guard digits for the internal exp/ln chain.
    let inner = Precision::decimal_digits(prec.digits() + 20).expect("positive digits");
    let mut c = Vec::with_capacity(a);
    let two_pi = &Real::pi(&inner) * &Real::from_i64(2, &inner);
    c.push(two_pi.sqrt());
    let half = Real::from_ratio(1, 2, &inner);
    let mut factorial = Real::one(&inner);
    for k in 1..a {
        if k > 1 {
            factorial = &factorial * &Real::from_i64((k - 1) as i64, &inner);
        }
        let ak = Real::from_i64((a - k) as i64, &inner);
        let kr = Real::from_i64(k as i64, &inner);
        // (a-k)^{k-1/2} e^{a-k}
        let ln_term = &(&(&kr - &half) * &ak.ln()) + &ak;
        let mut term = &ln_term.exp() / &factorial;
        if k % 2 == 0 {
            term = -term;
        }
        c.push(term);
    }
    c
}

fn with_coefficients<T>(prec: &Precision, f: impl FnOnce(&[Real]) -> T) -> T {
    COEFFS.with(|cell| {
        let mut slot = cell.borrow_mut();
        let refresh = match &*slot {
            Some((bits, _)) => *bits != prec.bits(),
            None => true,
        };
        if refresh {
            *slot = Some((prec.bits(), coefficients(prec)));
        }
        f(&slot.as_ref().expect("just filled").1)
    })
}

/// Γ(x) for finite x > 0. Returns a non-finite value outside the domain.
pub fn gamma(x: &Real, prec: &Precision) -> Real {
    let inner = Precision::decimal_digits(prec.digits() + 20).expect("positive digits");
    let one = Real::one(&inner);
    if !x.is_finite() || !x.is_positive() {
        return &Real::zero(&inner) / &Real::zero(&inner);
    }

    // Shift into x >= 2 where the error bound applies: Γ(x) = Γ(x+n)/(x·...·(x+n-1)).
    let mut shift = Real::one(&inner);
    let mut xs = x.clone();
    let two = Real::from_i64(2, &inner);
    while xs < two {
        shift = &shift * &xs;
        xs = &xs + &one;
    }

    let a = spouge_a(prec) as i64;
    let z = &xs - &one;
    let za = &z + &Real::from_i64(a, &inner);
    let half = Real::from_ratio(1, 2, &inner);

    let sum = with_coefficients(prec, |c| {
        let mut s = c[0].clone();
        for (k, ck) in c.iter().enumerate().skip(1) {
            s = &s + &(ck / &(&z + &Real::from_i64(k as i64, &inner)));
        }
        s
    });

    // (z+a)^{z+1/2} e^{-(z+a)} · sum
    let ln_front = &(&(&z + &half) * &za.ln()) - &za;
    &(&ln_front.exp() * &sum) / &shift
}
