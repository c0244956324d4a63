//! Simultaneous triangulation of a pair in SL(2, ℂ), float mode.
//!
//! Target shape: A lower triangular with unit subdiagonal, B upper triangular.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Mat2 = [[Complex64; 2]; 2];

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

pub fn mat2(a: [[f64; 2]; 2]) -> Mat2 {
    a.map(|r| r.map(|v| Complex64::new(v, 0.0)))
}

pub fn m2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

pub fn m2_det(a: &Mat2) -> Complex64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn m2_inv(a: &Mat2) -> Mat2 {
    let d = m2_det(a);
    [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
}

pub fn m2_tr(a: &Mat2) -> Complex64 {
    a[0][0] + a[1][1]
}

pub fn m2_conj(g: &Mat2, a: &Mat2) -> Mat2 {
    m2_mul(&m2_mul(g, a), &m2_inv(g))
}

pub fn m2_max_abs(a: &Mat2) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

fn m2_sub(a: &Mat2, b: &Mat2) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] - b[i][j]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Diagonalizable,
    Unipotent,
    /// A and B share an eigenvector of A; both end up triangular in the same direction.
    Reducible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sl2NormalForm {
    pub branch: Branch,
    pub conjugator: Mat2,
    pub normal_a: Mat2,
    pub normal_b: Mat2,
    pub lambda: Complex64,
    pub mu: Complex64,
    pub kappa: Complex64,
    pub y: Complex64,
}

/// Larger modulus first, then larger real part, then larger imaginary part.
pub fn root_precedes(a: Complex64, b: Complex64) -> bool {
    let tol = 1e-9 * (1.0 + a.norm().max(b.norm()));
    if (a.norm() - b.norm()).abs() > tol {
        return a.norm() > b.norm();
    }
    if (a.re - b.re).abs() > tol {
        return a.re > b.re;
    }
    a.im > b.im
}

pub fn select_root(cands: &[Complex64]) -> Option<Complex64> {
    cands.iter().copied().reduce(|best, c| if root_precedes(c, best) { c } else { best })
}

/// Nonzero roots z of c z² + p z + r = 0 (float); tiny leading coefficients degrade to linear.
pub fn quadratic_roots(c: Complex64, p: Complex64, r: Complex64, tol: f64) -> Vec<Complex64> {
    let roots = if c.norm() <= tol {
        if p.norm() <= tol {
            vec![]
        } else {
            vec![-r / p]
        }
    } else {
        let s = (p * p - 4.0 * c * r).sqrt();
        // Pick the numerically stable pairing.
        let q = if (p.conj() * s).re >= 0.0 { -0.5 * (p + s) } else { -0.5 * (p - s) };
        if q.norm() <= tol {
            vec![ZERO, ZERO]
        } else {
            vec![q / c, r / q]
        }
    };
    roots.into_iter().filter(|z| z.norm() > tol).collect()
}

/// Candidate y values (both square roots of each root z).
pub fn quartic_candidates(zs: &[Complex64]) -> Vec<Complex64> {
    zs.iter().flat_map(|z| [z.sqrt(), -z.sqrt()]).collect()
}

fn eigenvector(a: &Mat2, lam: Complex64) -> [Complex64; 2] {
    let v1 = [a[0][1], lam - a[0][0]];
    let v2 = [lam - a[1][1], a[1][0]];
    let n1 = v1[0].norm() + v1[1].norm();
    let n2 = v2[0].norm() + v2[1].norm();
    if n1 >= n2 {
        v1
    } else {
        v2
    }
}

fn columns_to_matrix(u: [Complex64; 2], w: [Complex64; 2]) -> Mat2 {
    [[u[0], w[0]], [u[1], w[1]]]
}

fn eigenvalues(a: &Mat2) -> (Complex64, Complex64) {
    let t = m2_tr(a);
    let s = (t * t - 4.0 * m2_det(a)).sqrt();
    ((t + s) / 2.0, (t - s) / 2.0)
}

/// Triangulates (A, B) by simultaneous conjugation.
pub fn sl2_triangulate(a: &Mat2, b: &Mat2) -> Result<Sl2NormalForm> {
    let scale = 1.0 + m2_max_abs(a).max(m2_max_abs(b));
    let tol = 1e-12 * scale * scale;
    for (name, m) in [("A", a), ("B", b)] {
        if (m2_det(m) - ONE).norm() > 1e-9 * scale * scale {
            return Err(Error::Determinant(format!("det {name} = {}", m2_det(m))));
        }
    }
    let tr = m2_tr(a);
    let disc = tr * tr - 4.0;
    if disc.norm() <= 1e-10 * scale * scale {
        let eps = if tr.re >= 0.0 { ONE } else { -ONE };
        let nil = m2_sub(a, &[[eps, ZERO], [ZERO, eps]]);
        if m2_max_abs(&nil) <= 1e-10 * scale {
            return Err(Error::Central);
        }
        return unipotent(a, b, eps, &nil, scale);
    }
    diagonalizable(a, b, tol, scale)
}

fn finish(branch: Branch, g: Mat2, a: &Mat2, b: &Mat2, mu: Complex64, y: Complex64, scale: f64) -> Result<Sl2NormalForm> {
    let normal_a = m2_conj(&g, a);
    let normal_b = m2_conj(&g, b);
    let res = 1e-9 * scale.max(m2_max_abs(&g).powi(2));
    let shape_ok = match branch {
        Branch::Reducible => normal_a[0][1].norm() <= res && normal_a[1][0].norm() <= res && normal_b[1][0].norm() <= res,
        _ => normal_a[0][1].norm() <= res && (normal_a[1][0] - ONE).norm() <= res && normal_b[1][0].norm() <= res,
    };
    if !shape_ok {
        return Err(Error::Numerical("conjugated pair misses the triangular shape".into()));
    }
    Ok(Sl2NormalForm { branch, conjugator: g, lambda: normal_b[0][0], kappa: normal_b[0][1], normal_a, normal_b, mu, y })
}

fn diagonalizable(a: &Mat2, b: &Mat2, tol: f64, scale: f64) -> Result<Sl2NormalForm> {
    let off_diag = a[0][1].norm().max(a[1][0].norm());
    let (mu, d0) = if off_diag <= 1e-14 * scale {
        (a[0][0], [[ONE, ZERO], [ZERO, ONE]])
    } else {
        let (l1, l2) = eigenvalues(a);
        let mu = if root_precedes(l1, l2) { l1 } else { l2 };
        let w1 = eigenvector(a, mu);
        let w2 = eigenvector(a, ONE / mu);
        let mut p = columns_to_matrix(w1, w2);
        let s = m2_det(&p).sqrt();
        for row in &mut p {
            for e in row.iter_mut() {
                *e /= s;
            }
        }
        (mu, m2_inv(&p))
    };
    let bp = m2_conj(&d0, b);
    let (ab, bb, cb, db) = (bp[0][0], bp[0][1], bp[1][0], bp[1][1]);
    let delta = mu - ONE / mu;
    let zs = quadratic_roots(cb, (ab - db) / delta, -bb / (delta * delta), tol);
    if let Some(y) = select_root(&quartic_candidates(&zs)) {
        let x = ONE / (y * delta);
        let c = [[ZERO, -ONE / x], [x, y]];
        return finish(Branch::Diagonalizable, m2_mul(&c, &d0), a, b, mu, y, scale);
    }
    // No usable root: B is triangular against A's eigenbasis.
    let small = |z: Complex64| z.norm() <= tol;
    if small(cb) && small(bb) && small(ab - db) {
        // B = ±I: any y works.
        let y = ONE;
        let x = ONE / (y * delta);
        let c = [[ZERO, -ONE / x], [x, y]];
        return finish(Branch::Diagonalizable, m2_mul(&c, &d0), a, b, mu, y, scale);
    }
    if small(cb) {
        return finish(Branch::Reducible, d0, a, b, mu, ZERO, scale);
    }
    // B lower triangular: rotate so B becomes upper triangular.
    let rot = [[ZERO, -ONE], [ONE, ZERO]];
    finish(Branch::Reducible, m2_mul(&rot, &d0), a, b, ONE / mu, ZERO, scale)
}

/// A non-diagonalizable with eigenvalue ε = ±1: send A to [[ε,0],[1,ε]].
fn unipotent(a: &Mat2, b: &Mat2, eps: Complex64, nil: &Mat2, scale: f64) -> Result<Sl2NormalForm> {
    let w = if nil[0][0].norm() + nil[0][1].norm() >= nil[1][0].norm() + nil[1][1].norm() {
        [nil[0][1], -nil[0][0]]
    } else {
        [nil[1][1], -nil[1][0]]
    };
    let wn = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
    let independence = |u: &[Complex64; 2]| {
        let un = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt();
        (u[0] * w[1] - u[1] * w[0]).norm() / (un * wn)
    };
    let bscal = m2_sub(b, &[[b[0][0], ZERO], [ZERO, b[0][0]]]);
    let u = if m2_max_abs(&bscal) <= 1e-12 * scale && b[1][0].norm() <= 1e-12 * scale {
        [-w[1].conj(), w[0].conj()]
    } else {
        let (l1, l2) = eigenvalues(b);
        let (u1, u2) = (eigenvector(b, l1), eigenvector(b, l2));
        if independence(&u1) >= independence(&u2) {
            u1
        } else {
            u2
        }
    };
    if independence(&u) <= 1e-9 {
        return Err(Error::Precondition("B shares the only eigenline of A; no normal form of this shape".into()));
    }
    // N u = q w.
    let nu = [nil[0][0] * u[0] + nil[0][1] * u[1], nil[1][0] * u[0] + nil[1][1] * u[1]];
    let q = (nu[0] * w[0].conj() + nu[1] * w[1].conj()) / (wn * wn);
    let d = u[0] * w[1] - u[1] * w[0];
    let s = (ONE / (q * d)).sqrt();
    let t = ONE / (s * d);
    let ginv = columns_to_matrix([u[0] * s, u[1] * s], [w[0] * t, w[1] * t]);
    finish(Branch::Unipotent, m2_inv(&ginv), a, b, eps, ZERO, scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat2, b: &Mat2) -> bool {
        m2_max_abs(&m2_sub(a, b)) < 1e-9
    }

    #[test]
    fn diagonal_a_generic_b() {
        let a = mat2([[2.0, 0.0], [0.0, 0.5]]);
        let b = mat2([[1.0, 1.0], [1.0, 2.0]]);
        let nf = sl2_triangulate(&a, &b).unwrap();
        assert_eq!(nf.branch, Branch::Diagonalizable);
        assert!(close(&m2_conj(&nf.conjugator, &a), &nf.normal_a));
        assert!(close(&nf.normal_a, &mat2([[0.5, 0.0], [1.0, 2.0]])));
        assert!(nf.normal_b[1][0].norm() < 1e-9);
        assert!((m2_tr(&nf.normal_b) - m2_tr(&b)).norm() < 1e-9);
    }

    #[test]
    fn unipotent_branch() {
        let a = mat2([[1.0, 1.0], [0.0, 1.0]]);
        let b = mat2([[2.0, 1.0], [3.0, 2.0]]);
        let nf = sl2_triangulate(&a, &b).unwrap();
        assert_eq!(nf.branch, Branch::Unipotent);
        assert!(close(&nf.normal_a, &mat2([[1.0, 0.0], [1.0, 1.0]])));
        assert!(nf.normal_b[1][0].norm() < 1e-9);
        let neg = mat2([[-1.0, 2.0], [0.0, -1.0]]);
        let nf = sl2_triangulate(&neg, &b).unwrap();
        assert!(close(&nf.normal_a, &mat2([[-1.0, 0.0], [1.0, -1.0]])));
    }

    #[test]
    fn commuting_diagonal_pair_has_zero_kappa() {
        let a = mat2([[2.0, 0.0], [0.0, 0.5]]);
        let b = mat2([[3.0, 0.0], [0.0, 1.0 / 3.0]]);
        let nf = sl2_triangulate(&a, &b).unwrap();
        assert_eq!(nf.kappa.norm(), 0.0);
    }

    #[test]
    fn central_a_is_rejected() {
        let b = mat2([[1.0, 1.0], [1.0, 2.0]]);
        assert_eq!(sl2_triangulate(&mat2([[-1.0, 0.0], [0.0, -1.0]]), &b), Err(Error::Central));
    }

    #[test]
    fn lower_triangular_b_is_rotated() {
        let a = mat2([[2.0, 0.0], [0.0, 0.5]]);
        let b = mat2([[1.0, 0.0], [4.0, 1.0]]);
        let nf = sl2_triangulate(&a, &b).unwrap();
        assert_eq!(nf.branch, Branch::Reducible);
        assert!(nf.normal_b[1][0].norm() < 1e-12);
    }

    #[test]
    fn root_order() {
        let c = [Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)];
        assert_eq!(select_root(&c), Some(Complex64::new(1.0, 0.0)));
    }
}
