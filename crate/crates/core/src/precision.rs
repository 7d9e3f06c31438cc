//! Configurable-precision real arithmetic.
//!
//! Everything on the solver path runs on [`Real`], a thin wrapper around
//! an arbitrary-precision binary float. The working precision is chosen
//! in decimal digits (default 80) and translated to a bit length with a
//! guard margin. Expansion coefficients grow factorially and the moment
//! systems are badly conditioned, so machine doubles are not an option
//! beyond order ~8.
//!
//! Operations are deterministic: identical inputs at identical precision
//! give bit-identical results, which the golden tables rely on.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

// log2(10), slightly overestimated.
const BITS_PER_DIGIT: f64 = 3.3219280948873626;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Working precision, counted in decimal digits.
///
/// The default of 80 digits keeps the Hankel/Vandermonde solves and the
/// residual contract (1e-30) comfortably inside the mantissa for every
/// built-in case up to order 16.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precision {
    digits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { digits: 80 }
    }
}

impl Precision {
    /// Precision of `digits` decimal digits. Digits below 1 are rejected.
    pub fn decimal_digits(digits: u32) -> Result<Self> {
        if digits == 0 {
            return Err(Error::InvalidInput(
                "precision must be at least 1 digit".into(),
            ));
        }
        Ok(Precision { digits })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Mantissa length in bits, including a 64-bit guard margin.
    pub fn bits(&self) -> usize {
        (self.digits as f64 * BITS_PER_DIGIT).ceil() as usize + 64
    }

    fn scaled_tol(&self, per80: f64) -> Real {
        let d = -((self.digits as f64 * per80 / 80.0).ceil() as i64);
        Real::pow10(d, self)
    }

    /// Residual contract for the parameter equations: 1e-30 at 80 digits.
    pub fn residual_tol(&self) -> Real {
        self.scaled_tol(30.0)
    }

    /// Relative pivot threshold that flags a rank-deficient moment
    /// system: 1e-48 at 80 digits.
    pub fn pivot_tol(&self) -> Real {
        self.scaled_tol(48.0)
    }

    /// Factors with weights below this are numerical noise on exactly
    /// reproducible inputs: 1e-25 at 80 digits.
    pub fn weight_prune_tol(&self) -> Real {
        self.scaled_tol(25.0)
    }

    /// Imaginary-residual tolerance for large-variable asymptotics and
    /// re-expanded coefficients: 1e-20 at 80 digits.
    pub fn imag_tol(&self) -> Real {
        self.scaled_tol(20.0)
    }
}

/// Arbitrary-precision real number.
///
/// Arithmetic operators work on references and carry the larger operand
/// precision through, so a computation stays at the precision its inputs
/// were created with.
#[derive(Clone)]
pub struct Real(BigFloat);

impl Real {
    fn bits_of(&self) -> usize {
        // A zero produced by exact cancellation reports precision 0,
        // which the backend rejects as a target precision.
        self.0.precision().map_or(64, |b| b.max(64))
    }

    fn join_bits(&self, other: &Real) -> usize {
        self.bits_of().max(other.bits_of())
    }

    pub fn zero(prec: &Precision) -> Self {
        Real(BigFloat::new(prec.bits()))
    }

    pub fn one(prec: &Precision) -> Self {
        Real::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: &Precision) -> Self {
        Real(BigFloat::from_i64(v, prec.bits()))
    }

    pub fn from_f64(v: f64, prec: &Precision) -> Self {
        Real(BigFloat::from_f64(v, prec.bits()))
    }

    /// Exact ratio of two machine integers at working precision.
    pub fn from_ratio(num: i64, den: i64, prec: &Precision) -> Self {
        &Real::from_i64(num, prec) / &Real::from_i64(den, prec)
    }

    /// 10^e at working precision (exact while the mantissa allows).
    pub fn pow10(e: i64, prec: &Precision) -> Self {
        let ten = Real::from_i64(10, prec);
        let mut r = Real::one(prec);
        let mut b = ten;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                r = &r * &b;
            }
            b = &b * &b;
            n >>= 1;
        }
        if e < 0 {
            r.recip()
        } else {
            r
        }
    }

    /// A low-precision constant (64 bits); arithmetic joins precisions
    /// by maximum, so this never truncates the other operand.
    pub(crate) fn const_f64(v: f64) -> Real {
        Real(BigFloat::from_f64(v, 64))
    }

    /// Exact zero carrying this value's precision.
    pub fn zero_like(&self) -> Real {
        Real(BigFloat::new(self.bits_of()))
    }

    /// Exact one carrying this value's precision.
    pub fn one_like(&self) -> Real {
        Real(BigFloat::from_i64(1, self.bits_of()))
    }

    /// Parses a decimal string ("0.75", "-2.625e-3", "1e10").
    pub fn parse(s: &str, prec: &Precision) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        // astro-float's parser accepts some non-numeric junk as NaN;
        // pre-validate the shape.
        let ok = t.strip_prefix(['-', '+']).unwrap_or(t);
        if !ok
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_digit() || c == '.')
        {
            return Err(Error::Parse(format!("invalid number '{s}'")));
        }
        let v = with_consts(|cc| BigFloat::parse(t, Radix::Dec, prec.bits(), RM, cc));
        if v.is_nan() {
            return Err(Error::Parse(format!("invalid number '{s}'")));
        }
        Ok(Real(v))
    }

    pub fn pi(prec: &Precision) -> Self {
        Real(with_consts(|cc| cc.pi(prec.bits(), RM)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative() && !self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive() && !self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Real(self.0.reciprocal(self.bits_of(), RM))
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.sqrt(self.bits_of(), RM))
    }

    pub fn ln(&self) -> Self {
        Real(with_consts(|cc| self.0.ln(self.bits_of(), RM, cc)))
    }

    pub fn exp(&self) -> Self {
        Real(with_consts(|cc| self.0.exp(self.bits_of(), RM, cc)))
    }

    pub fn sin(&self) -> Self {
        Real(with_consts(|cc| self.0.sin(self.bits_of(), RM, cc)))
    }

    pub fn cos(&self) -> Self {
        Real(with_consts(|cc| self.0.cos(self.bits_of(), RM, cc)))
    }

    pub fn atan(&self) -> Self {
        Real(with_consts(|cc| self.0.atan(self.bits_of(), RM, cc)))
    }

    /// Four-quadrant arctangent of `y/x` (principal value in (-pi, pi]).
    pub fn atan2(y: &Real, x: &Real) -> Self {
        let bits = y.join_bits(x);
        let pi = Real(with_consts(|cc| cc.pi(bits, RM)));
        if x.is_zero() && y.is_zero() {
            return Real(BigFloat::new(bits));
        }
        if x.is_zero() {
            let half = Real(pi.0.div(&BigFloat::from_i64(2, 64), bits, RM));
            return if y.is_negative() { -&half } else { half };
        }
        let base = (y / x).atan();
        if x.is_positive() {
            base
        } else if y.is_negative() {
            &base - &pi
        } else {
            &base + &pi
        }
    }

    /// Integer power with a machine-integer exponent.
    pub fn powi(&self, n: i64) -> Self {
        let bits = self.bits_of();
        let p = Real(self.0.powi(n.unsigned_abs() as usize, bits, RM));
        if n < 0 {
            p.recip()
        } else {
            p
        }
    }

    /// General power for positive base.
    pub fn pow(&self, e: &Real) -> Self {
        let bits = self.join_bits(e);
        Real(with_consts(|cc| self.0.pow(&e.0, bits, RM, cc)))
    }

    /// Nearest integer (ties away from zero are irrelevant for the
    /// integer-exponent checks this backs).
    pub fn round_int(&self) -> Self {
        let half = Real(BigFloat::from_f64(0.5, 64));
        if self.is_negative() {
            Real((self - &half).0.ceil())
        } else {
            Real((self + &half).0.floor())
        }
    }

    pub fn max(&self, other: &Real) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn min(&self, other: &Real) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Lossy conversion for output surfaces and diagnostics.
    pub fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        if self.0.is_zero() {
            return 0.0;
        }
        let Some((words, _, sign, e, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        // Mantissa words are little-endian; the value is 0.m * 2^e with
        // the top bit of the last word set.
        let nw = words.len();
        let top = words[nw - 1] as f64;
        let next = if nw >= 2 { words[nw - 2] as f64 } else { 0.0 };
        let frac = top * 2f64.powi(-64) + next * 2f64.powi(-128);
        let mag = frac * 2f64.powi(e);
        if sign == Sign::Neg {
            -mag
        } else {
            mag
        }
    }

    /// Decimal string with `sig` significant digits. Plain positional
    /// notation where it stays readable, scientific otherwise.
    pub fn to_decimal_string(&self, sig: usize) -> String {
        let sig = sig.max(1);
        if self.0.is_nan() {
            return "NaN".into();
        }
        if self.0.is_inf_pos() {
            return "Inf".into();
        }
        if self.0.is_inf_neg() {
            return "-Inf".into();
        }
        if self.0.is_zero() {
            return "0".into();
        }
        let s = match with_consts(|cc| self.0.format(Radix::Dec, RM, cc)) {
            Ok(s) => s,
            Err(_) => return "NaN".into(),
        };
        format_decimal(&s, sig)
    }
}

/// Rounds astro-float's normalized "d.ddd...e±K" output to `sig`
/// significant digits and renders it %g-style.
fn format_decimal(s: &str, sig: usize) -> String {
    let (neg, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let (mant, exp) = match rest.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (rest, 0),
    };
    let mut digits: Vec<u8> = mant
        .bytes()
        .filter(u8::is_ascii_digit)
        .map(|b| b - b'0')
        .collect();
    // Normalized output has one digit before the point, so `exp` is the
    // power of ten of that leading digit.
    let mut exp10 = exp;

    // Strip leading zeros (only the all-zero case keeps one).
    while digits.len() > 1 && digits[0] == 0 {
        digits.remove(0);
        exp10 -= 1;
    }
    if digits.iter().all(|&d| d == 0) {
        return "0".into();
    }

    // Round half-up at `sig` digits.
    if digits.len() > sig {
        let carry = digits[sig] >= 5;
        digits.truncate(sig);
        if carry {
            let mut i = sig;
            loop {
                if i == 0 {
                    digits.insert(0, 1);
                    digits.truncate(sig);
                    exp10 += 1;
                    break;
                }
                i -= 1;
                if digits[i] == 9 {
                    digits[i] = 0;
                } else {
                    digits[i] += 1;
                    break;
                }
            }
        }
    } else {
        digits.resize(sig, 0);
    }

    let body = if exp10 < -4 || exp10 >= sig as i64 {
        let mut b = String::new();
        b.push((digits[0] + b'0') as char);
        if sig > 1 {
            b.push('.');
            for &d in &digits[1..] {
                b.push((d + b'0') as char);
            }
        }
        b.push('e');
        if exp10 >= 0 {
            b.push('+');
        }
        b.push_str(&exp10.to_string());
        b
    } else if exp10 >= 0 {
        let ip = exp10 as usize + 1;
        let mut b = String::new();
        for &d in &digits[..ip] {
            b.push((d + b'0') as char);
        }
        if ip < sig {
            b.push('.');
            for &d in &digits[ip..] {
                b.push((d + b'0') as char);
            }
        }
        b
    } else {
        let mut b = String::from("0.");
        for _ in 0..(-exp10 - 1) {
            b.push('0');
        }
        for &d in &digits {
            b.push((d + b'0') as char);
        }
        b
    };

    if neg {
        format!("-{body}")
    } else {
        body
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(20))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(12))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl std::ops::$trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real(self.0.$inner(&rhs.0, self.join_bits(rhs), RM))
            }
        }
        impl std::ops::$trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl std::ops::$trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl std::ops::$trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

real_binop!(Add, add, add);
real_binop!(Sub, sub, sub);
real_binop!(Mul, mul, mul);
real_binop!(Div, div, div);

impl std::ops::Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-&self.0)
    }
}

impl std::ops::Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-&self.0)
    }
}
