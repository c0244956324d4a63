//! Polynomials in one even unknown with Λ coefficients, and Newton lifting of
//! simple body roots.

use crate::error::{Error, Result};
use crate::grassmann::GrassmannElement;
use crate::scalar::{Mode, Scalar};
use crate::superlinalg::FLOAT_TOL;

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaPolynomial {
    /// Ascending degree, no trailing zeros.
    coeffs: Vec<GrassmannElement>,
    n: u8,
    mode: Mode,
}

impl LambdaPolynomial {
    pub fn new(n: u8, mode: Mode, coeffs: Vec<GrassmannElement>) -> Result<Self> {
        for c in &coeffs {
            if c.n() != n {
                return Err(Error::GeneratorMismatch(n, c.n()));
            }
            if c.mode() != mode {
                return Err(Error::ModeMismatch);
            }
            if !c.is_even() {
                return Err(Error::Parity("coefficients must be even".into()));
            }
        }
        let mut p = LambdaPolynomial { coeffs, n, mode };
        p.trim();
        Ok(p)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[GrassmannElement] {
        &self.coeffs
    }

    /// Degree; the zero polynomial reports None.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn coeff(&self, k: usize) -> GrassmannElement {
        self.coeffs.get(k).cloned().unwrap_or_else(|| GrassmannElement::zero(self.n, self.mode))
    }

    pub fn add(&self, other: &LambdaPolynomial) -> LambdaPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| &self.coeff(k) + &other.coeff(k)).collect();
        let mut p = LambdaPolynomial { coeffs, ..self.clone() };
        p.trim();
        p
    }

    pub fn mul(&self, other: &LambdaPolynomial) -> LambdaPolynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return LambdaPolynomial { coeffs: vec![], ..self.clone() };
        }
        let mut coeffs = vec![GrassmannElement::zero(self.n, self.mode); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        let mut p = LambdaPolynomial { coeffs, ..self.clone() };
        p.trim();
        p
    }

    pub fn derivative(&self) -> LambdaPolynomial {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.scale(&Scalar::from_i64(self.mode, k as i64))).collect();
        let mut p = LambdaPolynomial { coeffs, ..self.clone() };
        p.trim();
        p
    }

    /// Horner evaluation at an even element.
    pub fn eval(&self, y: &GrassmannElement) -> GrassmannElement {
        self.coeffs.iter().rev().fold(GrassmannElement::zero(self.n, self.mode), |acc, c| &(&acc * y) + c)
    }

    pub fn body_eval(&self, y: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(Scalar::zero(self.mode), |acc, c| &(&acc * y) + &c.body())
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }
}

/// Newton iteration y ← y − P(y)·P′(y)⁻¹ from a simple body root.
pub fn hensel_lift_root(p: &LambdaPolynomial, y0: &Scalar) -> Result<GrassmannElement> {
    if y0.mode() != p.mode {
        return Err(Error::ModeMismatch);
    }
    let dp = p.derivative();
    let scale = 1.0 + p.coeffs.iter().map(|c| c.body().abs()).fold(0.0, f64::max);
    let r0 = p.body_eval(y0);
    let is_root = match p.mode {
        Mode::Exact => r0.is_zero(),
        Mode::Float => r0.abs() <= 1e-6 * scale,
    };
    if !is_root {
        return Err(Error::Precondition(format!("{y0} is not a root of the body polynomial")));
    }
    let d0 = dp.body_eval(y0);
    let singular = match p.mode {
        Mode::Exact => d0.is_zero(),
        Mode::Float => d0.abs() <= FLOAT_TOL * scale,
    };
    if singular {
        return Err(Error::SingularRoot);
    }
    let mut y = GrassmannElement::scalar(p.n, y0.clone());
    // Exact: each step doubles the soul order, so N steps are plenty. Float also polishes the body.
    let max_iter = match p.mode {
        Mode::Exact => p.n as usize + 1,
        Mode::Float => p.n as usize + 40,
    };
    for _ in 0..max_iter {
        let r = p.eval(&y);
        let done = match p.mode {
            Mode::Exact => r.is_zero(),
            Mode::Float => r.max_abs() <= 1e-14 * scale,
        };
        if done {
            return Ok(y);
        }
        let step = &r * &dp.eval(&y).inv().map_err(|_| Error::SingularRoot)?;
        y = &y - &step;
    }
    let r = p.eval(&y);
    if r.is_negligible(FLOAT_TOL * scale) {
        Ok(y)
    } else {
        Err(Error::Numerical(format!("Newton lifting did not converge, residual {}", r.max_abs())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: u8 = 8;

    fn k(v: i64) -> GrassmannElement {
        GrassmannElement::from_i64(N, Mode::Exact, v)
    }

    fn th(i: usize) -> GrassmannElement {
        GrassmannElement::generator(N, i, Mode::Exact)
    }

    fn poly(c: Vec<GrassmannElement>) -> LambdaPolynomial {
        LambdaPolynomial::new(N, Mode::Exact, c).unwrap()
    }

    #[test]
    fn linear_lift() {
        let n = &th(1) * &th(2);
        let p = poly(vec![-&n, k(1)]);
        assert_eq!(hensel_lift_root(&p, &Scalar::zero(Mode::Exact)).unwrap(), n);
    }

    #[test]
    fn square_root_lift() {
        let n = &th(1) * &th(2);
        let target = &k(1) + &n;
        let p = poly(vec![-&target, k(0), k(1)]);
        let y = hensel_lift_root(&p, &Scalar::one(Mode::Exact)).unwrap();
        assert_eq!(&y * &y, target);
        assert_eq!(y, &k(1) + &n.scale(&Scalar::ratio(1, 2)));
    }

    #[test]
    fn soul_free_root_is_unchanged() {
        let p = poly(vec![k(-6), k(1), k(1)]);
        let y = hensel_lift_root(&p, &Scalar::from_i64(Mode::Exact, 2)).unwrap();
        assert_eq!(y, k(2));
    }

    #[test]
    fn deep_soul_lift_is_exact() {
        // y³ − 2y + (−4 + s) with s a soul of degree up to 8.
        let s = &(&(&th(1) * &th(2)) + &(&(&th(3) * &th(4)) * &(&th(5) * &th(6)))) + &(&(&th(7) * &th(8)) * &(&th(1) * &th(3)));
        let p = poly(vec![&k(-4) + &s, k(-2), k(0), k(1)]);
        let y = hensel_lift_root(&p, &Scalar::from_i64(Mode::Exact, 2)).unwrap();
        assert!(p.eval(&y).is_zero());
    }

    #[test]
    fn singular_root_is_rejected() {
        let p = poly(vec![k(1), k(-2), k(1)]);
        assert_eq!(hensel_lift_root(&p, &Scalar::one(Mode::Exact)), Err(Error::SingularRoot));
    }

    #[test]
    fn float_lift_polishes() {
        let n = (&th(1) * &th(2)).to_float();
        let target = &GrassmannElement::from_i64(N, Mode::Float, 2) + &n;
        let p = LambdaPolynomial::new(
            N,
            Mode::Float,
            vec![-&target, GrassmannElement::zero(N, Mode::Float), GrassmannElement::from_i64(N, Mode::Float, 1)],
        )
        .unwrap();
        let y0 = Scalar::complex(2f64.sqrt() + 1e-9, 0.0);
        let y = hensel_lift_root(&p, &y0).unwrap();
        assert!((&y * &y).close_to(&target, 1e-12));
    }
}
