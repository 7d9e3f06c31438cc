//! Complex arithmetic over [`Real`].
//!
//! The factor parameters may come in complex-conjugate pairs, so the
//! solver and the approximant evaluate in complex arithmetic throughout
//! and only project to the reals at the end, after an imaginary-residual
//! check. Powers use the principal branch.

use std::fmt;

use crate::precision::{Precision, Real};

#[derive(Clone, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn from_real(re: Real) -> Self {
        let zero = re.zero_like();
        Complex { re, im: zero }
    }

    pub fn zero(prec: &Precision) -> Self {
        Complex::from_real(Real::zero(prec))
    }

    pub fn one(prec: &Precision) -> Self {
        Complex::from_real(Real::one(prec))
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -&self.im)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn abs2(&self) -> Real {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn abs(&self) -> Real {
        self.abs2().sqrt()
    }

    pub fn arg(&self) -> Real {
        Real::atan2(&self.im, &self.re)
    }

    pub fn scale(&self, s: &Real) -> Self {
        Complex::new(&self.re * s, &self.im * s)
    }

    pub fn recip(&self) -> Self {
        let d = self.abs2();
        Complex::new(&self.re / &d, -&(&self.im / &d))
    }

    /// Principal-branch natural logarithm.
    pub fn ln(&self) -> Self {
        Complex::new(&self.abs2().ln() * &Real::const_f64(0.5), self.arg())
    }

    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        Complex::new(&m * &self.im.cos(), &m * &self.im.sin())
    }

    /// Principal-branch power `self^w`. `0^w` is 1 for `w = 0` and 0
    /// otherwise; callers guard the remaining base-zero cases.
    pub fn pow(&self, w: &Complex) -> Self {
        if self.is_zero() {
            return if w.is_zero() {
                Complex::from_real(self.re.one_like())
            } else {
                Complex::new(self.re.clone(), self.im.clone())
            };
        }
        (&self.ln() * w).exp()
    }

    /// Integer power by repeated squaring (exact arithmetic path for
    /// residual checks).
    pub fn powi(&self, n: u64) -> Self {
        if n == 0 {
            return Complex::from_real(self.re.one_like());
        }
        let mut acc: Option<Complex> = None;
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match &acc {
                    Some(a) => a * &base,
                    None => base.clone(),
                });
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc.expect("n > 0")
    }
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}i)", self.re, self.im)
    }
}

macro_rules! complex_ref_forward {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait<Complex> for Complex {
            type Output = Complex;
            fn $method(self, rhs: Complex) -> Complex {
                (&self).$method(&rhs)
            }
        }
        impl std::ops::$trait<&Complex> for Complex {
            type Output = Complex;
            fn $method(self, rhs: &Complex) -> Complex {
                (&self).$method(rhs)
            }
        }
        impl std::ops::$trait<Complex> for &Complex {
            type Output = Complex;
            fn $method(self, rhs: Complex) -> Complex {
                self.$method(&rhs)
            }
        }
    };
}

impl std::ops::Add<&Complex> for &Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        Complex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl std::ops::Sub<&Complex> for &Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        Complex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl std::ops::Mul<&Complex> for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        Complex::new(
            &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        )
    }
}

impl std::ops::Div<&Complex> for &Complex {
    type Output = Complex;
    fn div(self, rhs: &Complex) -> Complex {
        let d = rhs.abs2();
        Complex::new(
            &(&(&self.re * &rhs.re) + &(&self.im * &rhs.im)) / &d,
            &(&(&self.im * &rhs.re) - &(&self.re * &rhs.im)) / &d,
        )
    }
}

complex_ref_forward!(Add, add);
complex_ref_forward!(Sub, sub);
complex_ref_forward!(Mul, mul);
complex_ref_forward!(Div, div);

impl std::ops::Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-&self.re, -&self.im)
    }
}

impl std::ops::Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        -&self
    }
}
