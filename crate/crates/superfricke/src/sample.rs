//! Seeded pseudorandom exact test data.
//!
//! Bodies are Gaussian rationals with numerators and denominators of height at
//! most 7; souls are rational combinations of low-degree monomials.

use num_complex::Complex64;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grassmann::{GrassmannElement, Parity};
use crate::normalform::osp_triangulate;
use crate::normalform::sl2::{m2_conj, Mat2};
use crate::osp::{compose_general, from_sl2, OspElement};
use crate::scalar::{Mode, Scalar};
use crate::superlinalg::{SuperMatrix, SuperVector};

pub const DEFAULT_SEED: u64 = 0xF2C3;
const HEIGHT: i64 = 7;

pub struct Sampler {
    rng: ChaCha8Rng,
    n: u8,
    /// Highest monomial degree used in souls.
    pub soul_degree: u32,
    /// Allow nonzero imaginary parts.
    pub gaussian: bool,
}

impl Sampler {
    pub fn new(seed: u64, n: u8) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), n, soul_degree: 3, gaussian: true }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn rational(&mut self) -> BigRational {
        let num = self.rng.gen_range(-HEIGHT..=HEIGHT);
        let den = self.rng.gen_range(1..=HEIGHT);
        BigRational::new(num.into(), den.into())
    }

    pub fn nonzero_rational(&mut self) -> BigRational {
        loop {
            let r = self.rational();
            if r != BigRational::from_integer(0.into()) {
                return r;
            }
        }
    }

    pub fn scalar(&mut self) -> Scalar {
        let re = self.rational();
        let im = if self.gaussian && self.rng.gen_bool(0.5) { self.rational() } else { BigRational::from_integer(0.into()) };
        Scalar::gauss(re, im)
    }

    pub fn nonzero_scalar(&mut self) -> Scalar {
        loop {
            let s = self.scalar();
            if !s.is_zero() {
                return s;
            }
        }
    }

    fn random_mask(&mut self, degree: u32) -> u16 {
        let mut idx: Vec<u16> = (0..self.n as u16).collect();
        idx.shuffle(&mut self.rng);
        idx[..degree as usize].iter().fold(0, |m, b| m | (1 << b))
    }

    /// Soul of the requested parity: a few random monomials of degree <= soul_degree.
    pub fn soul(&mut self, parity: Parity) -> GrassmannElement {
        let mut acc = GrassmannElement::zero(self.n, Mode::Exact);
        let degrees: Vec<u32> = (1..=self.soul_degree.min(self.n as u32)).filter(|d| Parity::of_mask((1u16 << d) - 1) == parity).collect();
        if degrees.is_empty() {
            return acc;
        }
        for _ in 0..self.rng.gen_range(1..=3) {
            let d = *degrees.choose(&mut self.rng).expect("nonempty");
            let m = self.random_mask(d);
            let c = self.nonzero_rational();
            acc = &acc + &GrassmannElement::monomial(self.n, m, Scalar::gauss(c, BigRational::from_integer(0.into())));
        }
        acc
    }

    pub fn even(&mut self) -> GrassmannElement {
        let body = GrassmannElement::scalar(self.n, self.scalar());
        &body + &self.soul(Parity::Even)
    }

    pub fn invertible_even(&mut self) -> GrassmannElement {
        let body = GrassmannElement::scalar(self.n, self.nonzero_scalar());
        &body + &self.soul(Parity::Even)
    }

    pub fn odd(&mut self) -> GrassmannElement {
        self.soul(Parity::Odd)
    }

    pub fn homogeneous(&mut self, parity: Parity) -> GrassmannElement {
        match parity {
            Parity::Even => self.even(),
            Parity::Odd => self.odd(),
        }
    }

    /// Arbitrary (inhomogeneous) element.
    pub fn element(&mut self) -> GrassmannElement {
        &self.even() + &self.odd()
    }

    /// (a, b, c, d) even with ad − bc = 1.
    pub fn sl2_params(&mut self) -> [GrassmannElement; 4] {
        let a = self.invertible_even();
        let b = self.even();
        let c = self.even();
        let one = GrassmannElement::one(self.n, Mode::Exact);
        let d = &(&one + &(&b * &c)) * &a.inv().expect("invertible body");
        [a, b, c, d]
    }

    pub fn osp(&mut self) -> OspElement {
        let [a, b, c, d] = self.sl2_params();
        let (g, dl) = (self.odd(), self.odd());
        compose_general(&a, &b, &c, &d, &g, &dl).expect("sampled parameters are valid")
    }

    pub fn even_matrix(&mut self) -> SuperMatrix {
        SuperMatrix::from_fn(3, 3, Some(Parity::Even), |i, j| if (i == 2) == (j == 2) { self.even() } else { self.odd() })
            .expect("parity pattern")
    }

    /// Even matrix whose Berezinian exists (invertible odd-odd corner).
    pub fn invertible_even_matrix(&mut self) -> SuperMatrix {
        loop {
            let mut m = self.even_matrix();
            m.set(2, 2, self.invertible_even()).expect("same ring");
            let b = m.body_matrix();
            let det = &(&b[0][0] * &b[1][1]) - &(&b[0][1] * &b[1][0]);
            if !det.is_zero() {
                return m.with_parity(Some(Parity::Even)).expect("even");
            }
        }
    }

    /// Even vector (v₁, v₂ even, v₃ odd).
    pub fn even_vector(&mut self) -> SuperVector {
        SuperVector([self.even(), self.even(), self.odd()])
    }

    /// Vector with a nonzero body in every slot, including the odd one.
    pub fn generic_vector(&mut self) -> SuperVector {
        SuperVector([self.invertible_even(), self.invertible_even(), &self.invertible_even() + &self.odd()])
    }

    pub fn homogeneous_vector(&mut self, parity: Parity) -> SuperVector {
        SuperVector([self.homogeneous(parity), self.homogeneous(parity), self.homogeneous(parity.flip())])
    }

    /// Exact SL(2) body matrix as a product of elementary factors.
    pub fn sl2_body(&mut self) -> [[Scalar; 2]; 2] {
        let one = Scalar::one(Mode::Exact);
        let zero = Scalar::zero(Mode::Exact);
        let mut m = [[one.clone(), zero.clone()], [zero.clone(), one.clone()]];
        for _ in 0..3 {
            let t = self.scalar();
            let e = if self.rng.gen_bool(0.5) {
                [[one.clone(), t], [zero.clone(), one.clone()]]
            } else {
                [[one.clone(), zero.clone()], [t, one.clone()]]
            };
            m = mat2_mul(&m, &e);
        }
        let s = self.nonzero_scalar();
        let sinv = s.inv().expect("nonzero");
        mat2_mul(&m, &[[s, zero.clone()], [zero, sinv]])
    }

    pub fn complex_f64(&mut self) -> Complex64 {
        Complex64::new(self.rng.gen_range(-2.0..2.0), self.rng.gen_range(-2.0..2.0))
    }

    /// Random SL(2, ℂ) matrix in float form.
    pub fn sl2_complex(&mut self) -> [[Complex64; 2]; 2] {
        loop {
            let (a, b, c) = (self.complex_f64(), self.complex_f64(), self.complex_f64());
            if a.norm() < 0.3 {
                continue;
            }
            let d = (Complex64::new(1.0, 0.0) + b * c) / a;
            if d.norm() < 4.0 {
                return [[a, b], [c, d]];
            }
        }
    }

    /// Nonzero real rational whose body is not ±1.
    fn off_unit_rational(&mut self) -> Scalar {
        loop {
            let r = Scalar::gauss(self.nonzero_rational(), BigRational::from_integer(0.into()));
            let one = Scalar::one(Mode::Exact);
            if r != one && r != -one.clone() {
                return r;
            }
        }
    }

    /// A pair (diag(μ, μ⁻¹, 1), B) that the exact OSp triangulation accepts.
    /// B's body is C⁻¹UC with U upper triangular and C a conjugator of the
    /// algorithm's shape, so the body root is rational; souls and odd parts
    /// are random. Draws failing the exact root selection are discarded.
    pub fn triangulable_osp_pair(&mut self) -> (OspElement, OspElement) {
        let n = self.n;
        loop {
            let m = self.off_unit_rational();
            let mu = &GrassmannElement::scalar(n, m.clone()) + &self.soul(Parity::Even);
            let Ok(mu_inv) = mu.inv() else { continue };
            let z = GrassmannElement::zero(n, Mode::Exact);
            let a = from_sl2(&mu, &z, &z, &mu_inv).expect("det 1");

            let delta = &m - &m.inv().expect("nonzero");
            let y1 = Scalar::gauss(self.nonzero_rational(), BigRational::from_integer(0.into()));
            let x1 = (&y1 * &delta).inv().expect("nonzero");
            let x1i = x1.inv().expect("nonzero");
            let zero = Scalar::zero(Mode::Exact);
            let c1 = [[zero.clone(), -x1i.clone()], [x1.clone(), y1.clone()]];
            let c1i = [[y1, x1i], [-x1, zero.clone()]];
            let l = self.off_unit_rational();
            let u = [[l.clone(), self.nonzero_scalar()], [zero, l.inv().expect("nonzero")]];
            let body = mat2_mul(&mat2_mul(&c1i, &u), &c1);
            if body[0][0].is_zero() {
                continue;
            }
            let ge = |s: &Scalar| GrassmannElement::scalar(n, s.clone());
            let a1 = &ge(&body[0][0]) + &self.soul(Parity::Even);
            let b1 = &ge(&body[0][1]) + &self.soul(Parity::Even);
            let c1e = &ge(&body[1][0]) + &self.soul(Parity::Even);
            let Ok(a1i) = a1.inv() else { continue };
            let d1 = &(&GrassmannElement::one(n, Mode::Exact) + &(&b1 * &c1e)) * &a1i;
            let (g, d) = (self.odd(), self.odd());
            let Ok(b) = compose_general(&a1, &b1, &c1e, &d1, &g, &d) else { continue };
            if osp_triangulate(&a, &b).is_ok() {
                return (a, b);
            }
        }
    }

    /// Float SL(2) pair; with `unipotent`, A is a conjugate of ±[[1, t], [0, 1]].
    pub fn sl2_complex_pair(&mut self, unipotent: bool) -> (Mat2, Mat2) {
        let b = self.sl2_complex();
        if !unipotent {
            return (self.sl2_complex(), b);
        }
        let p = self.sl2_complex();
        let sign = if self.rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let t = self.complex_f64() + Complex64::new(0.5, 0.0);
        let s = Complex64::new(sign, 0.0);
        let j = [[s, t], [Complex64::new(0.0, 0.0), s]];
        (m2_conj(&p, &j), b)
    }

    pub fn gen_range(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..hi)
    }

    pub fn gen_bool(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }
}

pub fn mat2_mul(a: &[[Scalar; 2]; 2], b: &[[Scalar; 2]; 2]) -> [[Scalar; 2]; 2] {
    std::array::from_fn(|i| std::array::from_fn(|j| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::osp::check_membership;

    #[test]
    fn deterministic_for_a_seed() {
        let a: Vec<_> = (0..5)
            .map({
                let mut s = Sampler::new(7, 8);
                move |_| s.element()
            })
            .collect();
        let b: Vec<_> = (0..5)
            .map({
                let mut s = Sampler::new(7, 8);
                move |_| s.element()
            })
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn triangulable_pairs_triangulate() {
        let mut s = Sampler::new(3, 6);
        for _ in 0..3 {
            let (a, b) = s.triangulable_osp_pair();
            assert!(check_membership(b.matrix()).ok);
            assert!(!b.is_bosonic());
            osp_triangulate(&a, &b).unwrap();
        }
    }

    #[test]
    fn unipotent_pairs_have_trace_two() {
        let mut s = Sampler::new(4, 4);
        let (a, _) = s.sl2_complex_pair(true);
        let tr = crate::normalform::sl2::m2_tr(&a);
        assert!((tr.norm() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn sampled_osp_is_valid() {
        let mut s = Sampler::new(1, 8);
        for _ in 0..5 {
            assert!(check_membership(s.osp().matrix()).ok);
        }
    }

    #[test]
    fn sl2_body_has_unit_determinant() {
        let mut s = Sampler::new(3, 8);
        let m = s.sl2_body();
        let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
        assert!(det.is_one());
    }
}
