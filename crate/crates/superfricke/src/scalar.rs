//! Ground-field scalars: exact Gaussian rationals or complex doubles.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Exact,
    Float,
}

/// `re + i·im` with both parts kept as reduced fractions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRat { re, im: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<GaussRat> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussRat { re: &self.re / &n, im: -&self.im / &n })
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    /// Principal square root when it is again a Gaussian rational.
    pub fn sqrt(&self) -> Option<GaussRat> {
        if self.is_zero() {
            return Some(self.clone());
        }
        // (A + Bi)/D with D a common positive denominator; sqrt = sqrt((A+Bi)·D)/D.
        let d = self.re.denom().lcm(self.im.denom());
        let a = self.re.numer() * (&d / self.re.denom()) * &d;
        let b = self.im.numer() * (&d / self.im.denom()) * &d;
        let (p, q) = gaussian_int_sqrt(&a, &b)?;
        let dq = BigRational::from_integer(d);
        Some(GaussRat { re: BigRational::from_integer(p) / &dq, im: BigRational::from_integer(q) / &dq })
    }
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// sqrt(a + bi) over the Gaussian integers, principal branch (re > 0, or re = 0 and im >= 0).
fn gaussian_int_sqrt(a: &BigInt, b: &BigInt) -> Option<(BigInt, BigInt)> {
    let n = exact_isqrt(&(a * a + b * b))?;
    let two = BigInt::from(2);
    let (p2, r1) = (&n + a).div_rem(&two);
    let (q2, r2) = (&n - a).div_rem(&two);
    if !r1.is_zero() || !r2.is_zero() {
        return None;
    }
    let p = exact_isqrt(&p2)?;
    let mut q = exact_isqrt(&q2)?;
    if b.sign() == Sign::Minus {
        q = -q;
    }
    if p.is_zero() && q.is_negative() {
        q = -q;
    }
    (&p * &p - &q * &q == *a && &two * &p * &q == *b).then_some((p, q))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(GaussRat),
    Float(Complex64),
}

impl Scalar {
    pub fn zero(mode: Mode) -> Self {
        Self::from_i64(mode, 0)
    }

    pub fn one(mode: Mode) -> Self {
        Self::from_i64(mode, 1)
    }

    pub fn from_i64(mode: Mode, v: i64) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(GaussRat::real(BigRational::from_integer(v.into()))),
            Mode::Float => Scalar::Float(Complex64::new(v as f64, 0.0)),
        }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(GaussRat::real(BigRational::new(num.into(), den.into())))
    }

    pub fn gauss(re: BigRational, im: BigRational) -> Self {
        Scalar::Exact(GaussRat::new(re, im))
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.is_zero(),
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.re.is_one() && g.im.is_zero(),
            Scalar::Float(z) => z.re == 1.0 && z.im == 0.0,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(g) => g.to_complex(),
            Scalar::Float(z) => *z,
        }
    }

    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_complex())
    }

    /// Modulus as a double; used for tolerances and root ordering.
    pub fn abs(&self) -> f64 {
        self.to_complex().norm()
    }

    pub fn check_mode(&self, other: &Scalar) -> Result<()> {
        if self.mode() == other.mode() {
            Ok(())
        } else {
            Err(Error::ModeMismatch)
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(GaussRat::new(&a.re + &b.re, &a.im + &b.im))),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a + b)),
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(exact_mul(a, b))),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a * b)),
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        match self {
            Scalar::Exact(g) => g.inv().map(Scalar::Exact).ok_or(Error::ZeroBody),
            Scalar::Float(_) if self.is_zero() => Err(Error::ZeroBody),
            Scalar::Float(z) => Ok(Scalar::Float(z.inv())),
        }
    }

    pub fn powi(&self, k: i64) -> Result<Scalar> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = Scalar::one(self.mode());
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Principal square root; exact mode fails when the root is irrational.
    pub fn sqrt(&self) -> Result<Scalar> {
        match self {
            Scalar::Exact(g) => {
                g.sqrt().map(Scalar::Exact).ok_or_else(|| Error::Exactness(format!("sqrt({self}) is not a Gaussian rational")))
            }
            Scalar::Float(z) => Ok(Scalar::Float(z.sqrt())),
        }
    }

    pub fn exp(&self) -> Result<Scalar> {
        match self {
            Scalar::Exact(_) if self.is_zero() => Ok(Scalar::one(Mode::Exact)),
            Scalar::Exact(_) => Err(Error::Exactness(format!("exp({self}) is irrational"))),
            Scalar::Float(z) => Ok(Scalar::Float(z.exp())),
        }
    }

    /// Exact rational scalar `p/q` in the given mode.
    pub fn frac(mode: Mode, p: i64, q: i64) -> Scalar {
        match mode {
            Mode::Exact => Scalar::ratio(p, q),
            Mode::Float => Scalar::complex(p as f64 / q as f64, 0.0),
        }
    }
}

fn exact_mul(a: &GaussRat, b: &GaussRat) -> GaussRat {
    if a.im.is_zero() && b.im.is_zero() {
        return GaussRat::real(&a.re * &b.re);
    }
    GaussRat::new(&a.re * &b.re - &a.im * &b.im, &a.re * &b.im + &a.im * &b.re)
}

// Operator forms panic on mode mixing; the checked `try_*` methods report it instead.
impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.try_add(rhs).expect("scalar mode mismatch")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.try_add(&-rhs).expect("scalar mode mismatch")
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar mode mismatch")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(GaussRat::new(-&g.re, -&g.im)),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(g) if g.im.is_zero() => write!(f, "{}", g.re),
            Scalar::Exact(g) if g.re.is_zero() => write!(f, "{}i", g.im),
            Scalar::Exact(g) => write!(f, "({} + {}i)", g.re, g.im),
            Scalar::Float(z) => write!(f, "{z}"),
        }
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| Error::Json(format!("bad rational {s:?}")))?;
    let d: BigInt = d.parse().map_err(|_| Error::Json(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Json(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_sqrt_roundtrip() {
        for (re, im) in [(4, 0), (-4, 0), (3, 4), (-3, 4), (0, 2), (5, -12)] {
            let x = Scalar::gauss(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()));
            let r = x.sqrt().unwrap();
            assert_eq!(&r * &r, x);
            let Scalar::Exact(g) = &r else { unreachable!() };
            assert!(g.re.is_positive() || (g.re.is_zero() && !g.im.is_negative()));
        }
        assert_eq!(Scalar::ratio(9, 4).sqrt().unwrap(), Scalar::ratio(3, 2));
        assert!(matches!(Scalar::ratio(2, 1).sqrt(), Err(Error::Exactness(_))));
    }

    #[test]
    fn mixing_modes_is_an_error() {
        assert_eq!(Scalar::one(Mode::Exact).try_add(&Scalar::one(Mode::Float)), Err(Error::ModeMismatch));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("-6/4").unwrap(), BigRational::new((-3).into(), 2.into()));
        assert_eq!(parse_rational("7").unwrap(), BigRational::from_integer(7.into()));
        assert!(parse_rational("1/0").is_err());
    }
}
