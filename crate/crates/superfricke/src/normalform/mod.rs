//! Simultaneous triangulation normal forms and Fricke coordinates.
//!
//! Shape contract for both algorithms: A goes to a lower triangular matrix
//! with unit subdiagonal, B to an upper triangular one.
//!
//! ```text
//!          [ μ⁻¹  0   0  ]           [ λ   κ    λξ' ]
//! normalA = [ 1    μ   μψ ]  normalB = [ 0   λ⁻¹  0   ]
//!          [ ψ    0   1  ]           [ 0   *    *   ]
//! ```

pub mod poly;
pub mod sl2;

use num_complex::Complex64;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

pub use poly::{hensel_lift_root, LambdaPolynomial};
pub use sl2::{sl2_triangulate, Branch, Mat2, Sl2NormalForm};

use crate::error::{Error, Result};
use crate::grassmann::{GrassmannElement, Parity};
use crate::osp::OspElement;
use crate::scalar::{Mode, Scalar};
use crate::superlinalg::{SuperMatrix, FLOAT_TOL};
use sl2::{quadratic_roots, quartic_candidates, select_root};

type GE = GrassmannElement;

#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormRecord {
    pub branch: Branch,
    pub conjugator: SuperMatrix,
    pub normal_a: SuperMatrix,
    pub normal_b: SuperMatrix,
    pub lambda: GE,
    pub mu: GE,
    pub kappa: GE,
    pub psi: GE,
    pub xi: GE,
    /// λ⁻¹ times the (1,3) entry of normalB; differs from ξ by a term in cν.
    pub xi_normal: GE,
    pub nu: GE,
    pub x: GE,
    pub y: GE,
}

impl NormalFormRecord {
    /// Fricke coordinates of the pair. The (1,1) entry of normalA is μ⁻¹, so
    /// the trace of the product is λμ⁻¹ + λ⁻¹μ + κ.
    pub fn fricke(&self) -> Result<FrickeCoords> {
        fricke_coords(&self.lambda, &self.mu.inv()?, &self.kappa)
    }
}

impl Serialize for NormalFormRecord {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        struct Coords<'a>(&'a NormalFormRecord);
        impl Serialize for Coords<'_> {
            fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
                let r = self.0;
                let mut m = ser.serialize_map(Some(5))?;
                m.serialize_entry("lambda", &r.lambda)?;
                m.serialize_entry("mu", &r.mu)?;
                m.serialize_entry("kappa", &r.kappa)?;
                m.serialize_entry("psi", &r.psi)?;
                m.serialize_entry("xi", &r.xi)?;
                m.end()
            }
        }
        struct Aux<'a>(&'a NormalFormRecord);
        impl Serialize for Aux<'_> {
            fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
                let r = self.0;
                let mut m = ser.serialize_map(Some(4))?;
                m.serialize_entry("xi_normal", &r.xi_normal)?;
                m.serialize_entry("nu", &r.nu)?;
                m.serialize_entry("x", &r.x)?;
                m.serialize_entry("y", &r.y)?;
                m.end()
            }
        }
        let mut m = ser.serialize_map(Some(6))?;
        m.serialize_entry("branch", &self.branch)?;
        m.serialize_entry("conjugator", &self.conjugator)?;
        m.serialize_entry("normalA", &self.normal_a)?;
        m.serialize_entry("normalB", &self.normal_b)?;
        m.serialize_entry("coords", &Coords(self))?;
        m.serialize_entry("aux", &Aux(self))?;
        m.end()
    }
}

/// 2×2 complex block embedded with corner 1.
pub fn embed_mat2(n: u8, m: &Mat2) -> SuperMatrix {
    let s = |z: Complex64| Scalar::complex(z.re, z.im);
    let (o, z) = (Scalar::one(Mode::Float), Scalar::zero(Mode::Float));
    SuperMatrix::scalar_matrix(
        n,
        [[s(m[0][0]), s(m[0][1]), z.clone()], [s(m[1][0]), s(m[1][1]), z.clone()], [z.clone(), z, o]],
        Parity::Even,
    )
    .expect("even by construction")
}

impl Sl2NormalForm {
    /// Float record with vanishing odd coordinates.
    pub fn to_record(&self, n: u8) -> NormalFormRecord {
        let c = |z: Complex64| GE::scalar(n, Scalar::complex(z.re, z.im));
        let delta = self.mu - 1.0 / self.mu;
        let x = if self.y.norm() > 0.0 { 1.0 / (self.y * delta) } else { Complex64::new(0.0, 0.0) };
        let zero = GE::zero(n, Mode::Float);
        NormalFormRecord {
            branch: self.branch,
            conjugator: embed_mat2(n, &self.conjugator),
            normal_a: embed_mat2(n, &self.normal_a),
            normal_b: embed_mat2(n, &self.normal_b),
            lambda: c(self.lambda),
            mu: c(self.mu),
            kappa: c(self.kappa),
            psi: zero.clone(),
            xi: zero.clone(),
            xi_normal: zero.clone(),
            nu: zero,
            x: c(x),
            y: c(self.y),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrickeCoords {
    #[serde(rename = "X")]
    pub x: GE,
    #[serde(rename = "Y")]
    pub y: GE,
    #[serde(rename = "Z")]
    pub z: GE,
    pub delta_x: GE,
    pub delta_y: GE,
}

/// X = λ + λ⁻¹, Y = μ + μ⁻¹, Z = λμ + λ⁻¹μ⁻¹ + κ, with Δ_X = λ − λ⁻¹ and Δ_Y = μ − μ⁻¹.
pub fn fricke_coords(lambda: &GE, mu: &GE, kappa: &GE) -> Result<FrickeCoords> {
    let li = lambda.inv()?;
    let mi = mu.inv()?;
    let x = lambda + &li;
    let y = mu + &mi;
    let z = &(&(lambda * mu) + &(&li * &mi)) + kappa;
    let delta_x = lambda - &li;
    let delta_y = mu - &mi;
    let four = GE::from_i64(lambda.n(), lambda.mode(), 4);
    let lhs = &delta_x * &delta_x;
    let rhs = &(&x * &x) - &four;
    if !lhs.close_to(&rhs, FLOAT_TOL * (1.0 + rhs.max_abs())) {
        return Err(Error::Numerical("Δ_X² differs from X² − 4".into()));
    }
    Ok(FrickeCoords { x, y, z, delta_x, delta_y })
}

fn ok_zero(e: &GE, scale: f64) -> bool {
    match e.mode() {
        Mode::Exact => e.is_zero(),
        Mode::Float => e.is_negligible(FLOAT_TOL * scale),
    }
}

fn exact_quadratic_roots(c: &Scalar, p: &Scalar, r: &Scalar) -> Vec<Scalar> {
    let two = Scalar::from_i64(Mode::Exact, 2);
    let four = Scalar::from_i64(Mode::Exact, 4);
    let zs = if c.is_zero() {
        match p.inv() {
            Ok(pi) => vec![-(r * &pi)],
            Err(_) => vec![],
        }
    } else {
        let disc = &(p * p) - &(&four * &(c * r));
        match disc.sqrt() {
            Ok(s) => {
                let den = (&two * c).inv().expect("nonzero");
                vec![&(&(-p) + &s) * &den, &(&(-p) - &s) * &den]
            }
            Err(_) => vec![],
        }
    };
    zs.iter().filter(|z| !z.is_zero()).filter_map(|z| z.sqrt().ok()).flat_map(|y| [y.clone(), -y]).collect()
}

/// Triangulates (A₀, B₀) with A₀ = diag(μ, μ⁻¹, 1) by conjugating both with
/// g = [[0,−x⁻¹,0],[x,y,ν],[0,−x⁻¹ν,1]], xy = (μ − μ⁻¹)⁻¹.
pub fn osp_triangulate(a0: &OspElement, b0: &OspElement) -> Result<NormalFormRecord> {
    let (n, mode) = (a0.n(), a0.mode());
    if b0.n() != n {
        return Err(Error::GeneratorMismatch(n, b0.n()));
    }
    if b0.mode() != mode {
        return Err(Error::ModeMismatch);
    }
    let am = a0.matrix();
    let scale = 1.0 + am.max_abs().max(b0.matrix().max_abs());
    for (i, j) in [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)] {
        if !ok_zero(am.get(i, j), scale) {
            return Err(Error::Precondition("A₀ must be diagonal".into()));
        }
    }
    let one = GE::one(n, mode);
    if !ok_zero(&(am.get(2, 2) - &one), scale) {
        return Err(Error::Precondition("A₀ must have corner entry 1".into()));
    }
    let mu = am.get(0, 0).clone();
    let mu_body = mu.body();
    let one_s = Scalar::one(mode);
    if ok_zero(&GE::scalar(n, &mu_body - &one_s), scale) || ok_zero(&GE::scalar(n, &mu_body + &one_s), scale) {
        return Err(Error::Precondition("body(μ) = ±1".into()));
    }
    let mu_inv = mu.inv()?;
    let delta = &mu - &mu_inv;
    let xt = delta.inv()?;

    let e = |i: usize, j: usize| b0.get(i, j).clone();
    let (a, b, alpha) = (e(0, 0), e(0, 1), e(0, 2));
    let (c, d, beta) = (e(1, 0), e(1, 1), e(1, 2));
    let (gamma, dl, f) = (e(2, 0), e(2, 1), e(2, 2));

    // Q(y) = c y⁴ + (a−d)X̃ y² − b X̃², the bosonic part of y²·nB(2,1).
    let zero = GE::zero(n, mode);
    let amd_xt = &(&a - &d) * &xt;
    let bxt2 = &(&b * &xt) * &xt;
    let q = LambdaPolynomial::new(n, mode, vec![-&bxt2, zero.clone(), amd_xt.clone(), zero.clone(), c.clone()])?;
    // k(y) = (f − a) − cΔ y², the coefficient of ν in nB(2,3).
    let k = LambdaPolynomial::new(n, mode, vec![&f - &a, zero.clone(), -&(&c * &delta)])?;
    // O(y) = −βγ y⁴ + X̃(βδ − αγ) y² + X̃² αδ collects the odd-odd terms.
    let o = LambdaPolynomial::new(
        n,
        mode,
        vec![&(&(&xt * &xt) * &alpha) * &dl, zero.clone(), &xt * &(&(&beta * &dl) - &(&alpha * &gamma)), zero.clone(), -&(&beta * &gamma)],
    )?;
    let fpoly = k.mul(&q).add(&o);

    // Body root: float selection, then exact confirmation when needed.
    let cf = |s: &GE| s.body().to_complex();
    let tol = 1e-12 * scale * scale;
    let zs = quadratic_roots(cf(&c), cf(&amd_xt), -cf(&bxt2), tol);
    let yf = select_root(&quartic_candidates(&zs))
        .ok_or_else(|| Error::Precondition("B₀ is already triangular at body level; reducible pair".into()))?;
    let y0 = match mode {
        Mode::Float => Scalar::complex(yf.re, yf.im),
        Mode::Exact => exact_quadratic_roots(&c.body(), &amd_xt.body(), &-&bxt2.body())
            .into_iter()
            .find(|y| (y.to_complex() - yf).norm() <= 1e-9 * (1.0 + yf.norm()))
            .ok_or_else(|| Error::Exactness(format!("body root {yf} is not Gaussian-rational; use float mode")))?,
    };
    let k0 = k.body_eval(&y0);
    if ok_zero(&GE::scalar(n, k0), scale) {
        return Err(Error::Precondition("B₀ has body eigenvalue 1 on the target line".into()));
    }
    let y = hensel_lift_root(&fpoly, &y0)?;
    let yi = y.inv()?;
    let x = &xt * &yi;
    let xi_ = x.inv()?;
    let kv = k.eval(&y);
    let nu = -&(&kv.inv()? * &(&(&x * &alpha) + &(&y * &beta)));

    let z = &zero;
    let g = SuperMatrix::new(
        vec![vec![z.clone(), -&xi_, z.clone()], vec![x.clone(), y.clone(), nu.clone()], vec![z.clone(), -&(&xi_ * &nu), one.clone()]],
        Some(Parity::Even),
    )?;
    let g_inv = SuperMatrix::new(
        vec![vec![y.clone(), xi_.clone(), -&(&xi_ * &nu)], vec![-&x, z.clone(), z.clone()], vec![-&nu, z.clone(), one.clone()]],
        Some(Parity::Even),
    )?;
    let normal_a = g.try_mul(am)?.try_mul(&g_inv)?;
    let normal_b = g.try_mul(b0.matrix())?.try_mul(&g_inv)?;

    let nscale = scale * (1.0 + g.max_abs()).powi(2);
    for (name, m, i, j) in [
        ("normalA(1,2)", &normal_a, 0, 1),
        ("normalA(1,3)", &normal_a, 0, 2),
        ("normalB(2,1)", &normal_b, 1, 0),
        ("normalB(2,3)", &normal_b, 1, 2),
        ("normalB(3,1)", &normal_b, 2, 0),
    ] {
        if !ok_zero(m.get(i, j), nscale) {
            return Err(Error::Numerical(format!("{name} did not vanish: {}", m.get(i, j))));
        }
    }
    let psi = &nu * &(&mu_inv - &one);
    if !ok_zero(&(normal_a.get(2, 0) - &psi), nscale) {
        return Err(Error::Numerical("normalA(3,1) differs from ψ".into()));
    }
    let lambda = normal_b.get(0, 0).clone();
    let li = lambda.inv()?;
    let xi = -&(&(&li * &xi_) * &beta);
    let xi_normal = &li * normal_b.get(0, 2);
    Ok(NormalFormRecord {
        branch: Branch::Diagonalizable,
        kappa: normal_b.get(0, 1).clone(),
        conjugator: g,
        normal_a,
        normal_b,
        lambda,
        mu,
        psi,
        xi,
        xi_normal,
        nu,
        x,
        y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::osp::{compose_general, from_sl2};

    const N: u8 = 8;

    fn k(p: i64, q: i64) -> GE {
        GE::scalar(N, Scalar::ratio(p, q))
    }

    fn th(i: usize) -> GE {
        GE::generator(N, i, Mode::Exact)
    }

    fn diag_a(m: GE) -> OspElement {
        let z = GE::zero(N, Mode::Exact);
        let mi = m.inv().unwrap();
        from_sl2(&m, &z, &z, &mi).unwrap()
    }

    #[test]
    fn fricke_examples() {
        let z = k(0, 1);
        let f = fricke_coords(&k(1, 1), &k(1, 1), &z).unwrap();
        assert_eq!(f.x, k(2, 1));
        assert!(f.delta_x.is_zero());
        let f = fricke_coords(&k(2, 1), &k(3, 1), &k(1, 1)).unwrap();
        assert_eq!(f.x, k(5, 2));
        assert_eq!(f.delta_x, k(3, 2));
        assert_eq!(&f.delta_x * &f.delta_x, k(9, 4));
        assert_eq!(f.z, k(43, 6));
    }

    #[test]
    fn fricke_rejects_zero_body() {
        let z = k(0, 1);
        assert_eq!(fricke_coords(&z, &k(1, 1), &z), Err(Error::ZeroBody));
    }

    fn bosonic_b() -> OspElement {
        from_sl2(&k(2, 1), &k(3, 1), &k(1, 1), &k(2, 1)).unwrap()
    }

    #[test]
    fn odd_free_pair_matches_sl2() {
        let a = diag_a(k(2, 1));
        let b = bosonic_b();
        let rec = match osp_triangulate(&a, &b) {
            Ok(r) => r,
            Err(Error::Exactness(_)) => osp_triangulate(&a.to_float(), &b.to_float()).unwrap(),
            Err(e) => panic!("{e}"),
        };
        assert!(rec.psi.is_zero() && rec.xi.is_zero());
        let s = sl2::sl2_triangulate(&sl2::mat2([[2.0, 0.0], [0.0, 0.5]]), &sl2::mat2([[2.0, 3.0], [1.0, 2.0]])).unwrap();
        assert!((rec.lambda.body().to_complex() - s.lambda).norm() < 1e-9);
        assert!((rec.kappa.body().to_complex() - s.kappa).norm() < 1e-9);
    }

    #[test]
    fn beta_only_gives_displayed_xi() {
        let a = diag_a(k(2, 1));
        let b0 = bosonic_b().to_float();
        let beta = th(1).to_float();
        let z = GE::zero(N, Mode::Float);
        // exp_odd(0, δ) puts δ in slot β; here use δ = θ₁ on the right.
        let odd = crate::osp::exp_odd(&z, &beta).unwrap();
        let b = b0.try_mul(&odd).unwrap();
        let rec = osp_triangulate(&a.to_float(), &b).unwrap();
        let want = -&(&(&rec.lambda.inv().unwrap() * &rec.x.inv().unwrap()) * b.get(1, 2));
        assert!(rec.xi.close_to(&want, 1e-12));
        assert!(!rec.xi.is_negligible(1e-12));
    }

    #[test]
    fn rejects_nondiagonal_and_central() {
        let b = bosonic_b();
        assert!(matches!(osp_triangulate(&b, &b), Err(Error::Precondition(_))));
        assert!(matches!(osp_triangulate(&diag_a(k(1, 1)), &b), Err(Error::Precondition(_))));
    }

    #[test]
    fn generic_exact_pair_with_planted_root() {
        // μ = 2 (+ soul), y₁ = 3: C₁ = [[0,−9/2],[2/9,3]], U = [[2,2],[0,1/2]].
        let mu = &k(2, 1) + &(&th(1) * &th(2));
        let a = diag_a(mu);
        let c1 = [[k(0, 1), k(-9, 2)], [k(2, 9), k(3, 1)]];
        let c1i = [[k(3, 1), k(9, 2)], [k(-2, 9), k(0, 1)]];
        let u = [[k(2, 1), k(2, 1)], [k(0, 1), k(1, 2)]];
        let m = |p: &[[GE; 2]; 2], q: &[[GE; 2]; 2]| -> [[GE; 2]; 2] {
            std::array::from_fn(|i| std::array::from_fn(|j| &(&p[i][0] * &q[0][j]) + &(&p[i][1] * &q[1][j])))
        };
        let bb = m(&m(&c1i, &u), &c1);
        let soul = &th(3) * &th(4);
        let a1 = &bb[0][0] + &soul;
        let d1 = &(&k(1, 1) + &(&bb[0][1] * &bb[1][0])) * &a1.inv().unwrap();
        let b = compose_general(&a1, &bb[0][1], &bb[1][0], &d1, &th(5), &(&th(6) + &th(7))).unwrap();
        let rec = osp_triangulate(&a, &b).unwrap();
        assert_eq!(
            rec.normal_a,
            rec.conjugator
                .try_mul(a.matrix())
                .unwrap()
                .try_mul(
                    &crate::superlinalg::SuperMatrix::new(
                        vec![
                            vec![rec.y.clone(), rec.x.inv().unwrap(), -&(&rec.x.inv().unwrap() * &rec.nu)],
                            vec![-&rec.x, k(0, 1), k(0, 1)],
                            vec![-&rec.nu, k(0, 1), k(1, 1)],
                        ],
                        Some(Parity::Even),
                    )
                    .unwrap()
                )
                .unwrap()
        );
        assert!(rec.normal_b.get(1, 0).is_zero());
        assert!(rec.normal_a.get(0, 1).is_zero());
        assert!(!rec.psi.is_zero());
        assert_eq!(rec.psi, &rec.nu * &(&rec.mu.inv().unwrap() - &k(1, 1)));
    }
}
