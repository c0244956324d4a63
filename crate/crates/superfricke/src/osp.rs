//! OSp(1|2) elements: 3×3 even supermatrices preserving the form J.
//!
//! Entry names follow the displayed layout
//! ```text
//!     [ a  b  α ]
//! g = [ c  d  β ]
//!     [ γ  δ  f ]
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmann::{GrassmannElement, Parity};
use crate::scalar::{Mode, Scalar};
use crate::superlinalg::{berezinian, supertranspose, SuperMatrix, FLOAT_TOL};

/// How an element was built; serialized next to the matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub sl2: [GrassmannElement; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub odd: Option<[GrassmannElement; 2]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OspElement {
    matrix: SuperMatrix,
    provenance: Option<Provenance>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub name: &'static str,
    /// Largest coefficient modulus of the residual.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

fn same_ring(xs: &[&GrassmannElement]) -> Result<(u8, Mode)> {
    let (n, mode) = (xs[0].n(), xs[0].mode());
    for x in xs {
        if x.n() != n {
            return Err(Error::GeneratorMismatch(n, x.n()));
        }
        if x.mode() != mode {
            return Err(Error::ModeMismatch);
        }
    }
    Ok((n, mode))
}

/// q₁ = [[0,0,1],[0,0,0],[0,−1,0]], an odd supermatrix.
pub fn q1(n: u8, mode: Mode) -> SuperMatrix {
    SuperMatrix::scalar_matrix(n, [[0, 0, 1], [0, 0, 0], [0, -1, 0]].map(|r| r.map(|v| Scalar::from_i64(mode, v))), Parity::Odd)
        .expect("odd generator")
}

/// q₂ = [[0,0,0],[0,0,1],[1,0,0]].
pub fn q2(n: u8, mode: Mode) -> SuperMatrix {
    SuperMatrix::scalar_matrix(n, [[0, 0, 0], [0, 0, 1], [1, 0, 0]].map(|r| r.map(|v| Scalar::from_i64(mode, v))), Parity::Odd)
        .expect("odd generator")
}

/// The bosonic embedding with corner 1.
pub fn from_sl2(a: &GrassmannElement, b: &GrassmannElement, c: &GrassmannElement, d: &GrassmannElement) -> Result<OspElement> {
    let (n, mode) = same_ring(&[a, b, c, d])?;
    if ![a, b, c, d].iter().all(|x| x.is_even()) {
        return Err(Error::Parity("sl2 entries must be even".into()));
    }
    let det = &(a * d) - &(b * c);
    let one = GrassmannElement::one(n, mode);
    if !det.close_to(&one, FLOAT_TOL) {
        return Err(Error::Determinant(format!("ad - bc = {det}")));
    }
    let z = GrassmannElement::zero(n, mode);
    let matrix = SuperMatrix::new(
        vec![vec![a.clone(), b.clone(), z.clone()], vec![c.clone(), d.clone(), z.clone()], vec![z.clone(), z, one]],
        Some(Parity::Even),
    )?;
    Ok(OspElement { matrix, provenance: Some(Provenance { sl2: [a.clone(), b.clone(), c.clone(), d.clone()], odd: None }) })
}

/// exp(γq₁ + δq₂) = I + γq₁ + δq₂ + ½γδ(q₁q₂ − q₂q₁); higher powers vanish.
pub fn exp_odd(gamma: &GrassmannElement, delta: &GrassmannElement) -> Result<OspElement> {
    let (n, mode) = same_ring(&[gamma, delta])?;
    if !gamma.is_odd() || !delta.is_odd() {
        return Err(Error::Parity("exp_odd needs purely odd parameters".into()));
    }
    let one = GrassmannElement::one(n, mode);
    let gd = gamma * delta;
    let half = gd.scale(&Scalar::frac(mode, 1, 2));
    let diag = &one + &half;
    let z = GrassmannElement::zero(n, mode);
    let matrix = SuperMatrix::new(
        vec![vec![diag.clone(), z.clone(), gamma.clone()], vec![z, diag, delta.clone()], vec![delta.clone(), -gamma, &one - &gd]],
        Some(Parity::Even),
    )?;
    Ok(OspElement {
        matrix,
        provenance: Some(Provenance {
            sl2: [one.clone(), GrassmannElement::zero(n, mode), GrassmannElement::zero(n, mode), one],
            odd: Some([gamma.clone(), delta.clone()]),
        }),
    })
}

/// from_sl2(a,b,c,d) · exp_odd(γ,δ), bosonic factor first.
pub fn compose_general(
    a: &GrassmannElement,
    b: &GrassmannElement,
    c: &GrassmannElement,
    d: &GrassmannElement,
    gamma: &GrassmannElement,
    delta: &GrassmannElement,
) -> Result<OspElement> {
    same_ring(&[a, b, c, d, gamma, delta])?;
    let base = from_sl2(a, b, c, d)?;
    let odd = exp_odd(gamma, delta)?;
    Ok(OspElement {
        matrix: base.matrix.try_mul(&odd.matrix)?,
        provenance: Some(Provenance { sl2: [a.clone(), b.clone(), c.clone(), d.clone()], odd: Some([gamma.clone(), delta.clone()]) }),
    })
}

/// Evaluates every membership residual without failing fast.
pub fn check_membership(m: &SuperMatrix) -> MembershipReport {
    fn record(violations: &mut Vec<Violation>, name: &'static str, r: &GrassmannElement) {
        if !r.is_negligible(FLOAT_TOL) {
            violations.push(Violation { name, residual: r.max_abs() });
        }
    }
    let mut violations = Vec::new();
    if !m.is_square3() {
        return MembershipReport { ok: false, violations: vec![Violation { name: "shape", residual: f64::INFINITY }] };
    }
    if m.check_parity(Parity::Even).is_err() {
        return MembershipReport { ok: false, violations: vec![Violation { name: "parity", residual: f64::INFINITY }] };
    }
    let (n, mode) = (m.n(), m.mode());
    let e = |i: usize, j: usize| m.get(i, j);
    let (a, b, al) = (e(0, 0), e(0, 1), e(0, 2));
    let (c, d, be) = (e(1, 0), e(1, 1), e(1, 2));
    let (ga, de, f) = (e(2, 0), e(2, 1), e(2, 2));
    let one = GrassmannElement::one(n, mode);

    let j = SuperMatrix::j(n, mode);
    let form = supertranspose(m).and_then(|st| st.try_mul(&j)?.try_mul(m)).and_then(|x| x.try_sub(&j));
    match form {
        Ok(r) => {
            let worst = r.entries().map(|x| x.max_abs()).fold(0.0, f64::max);
            if !r.entries().all(|x| x.is_negligible(FLOAT_TOL)) {
                violations.push(Violation { name: "form", residual: worst });
            }
        }
        Err(_) => violations.push(Violation { name: "form", residual: f64::INFINITY }),
    }
    match berezinian(m) {
        Ok(ber) => record(&mut violations, "ber", &(&ber - &one)),
        Err(_) => violations.push(Violation { name: "ber", residual: f64::INFINITY }),
    }
    record(&mut violations, "alpha = b*gamma - a*delta", &(al - &(&(b * ga) - &(a * de))));
    record(&mut violations, "beta = d*gamma - c*delta", &(be - &(&(d * ga) - &(c * de))));
    record(&mut violations, "gamma = a*beta - c*alpha", &(ga - &(&(a * be) - &(c * al))));
    record(&mut violations, "delta = b*beta - d*alpha", &(de - &(&(b * be) - &(d * al))));
    record(&mut violations, "f = 1 + beta*alpha", &(f - &(&one + &(be * al))));
    record(&mut violations, "f*(ad - bc) = 1", &(&(f * &(&(a * d) - &(b * c))) - &one));
    MembershipReport { ok: violations.is_empty(), violations }
}

impl OspElement {
    /// Validates a raw matrix.
    pub fn from_matrix(m: SuperMatrix) -> Result<Self> {
        let report = check_membership(&m);
        if !report.ok {
            let names: Vec<&str> = report.violations.iter().map(|v| v.name).collect();
            return Err(Error::Precondition(format!("not in OSp(1|2): {}", names.join("; "))));
        }
        let matrix = m.with_parity(Some(Parity::Even))?;
        Ok(OspElement { matrix, provenance: None })
    }

    pub fn identity(n: u8, mode: Mode) -> Self {
        let one = GrassmannElement::one(n, mode);
        let z = GrassmannElement::zero(n, mode);
        from_sl2(&one, &z, &z, &one).expect("identity is in SL2")
    }

    pub fn matrix(&self) -> &SuperMatrix {
        &self.matrix
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn n(&self) -> u8 {
        self.matrix.n()
    }

    pub fn mode(&self) -> Mode {
        self.matrix.mode()
    }

    pub fn get(&self, i: usize, j: usize) -> &GrassmannElement {
        self.matrix.get(i, j)
    }

    /// g⁻¹ = J⁻¹ g^st J.
    pub fn inverse(&self) -> OspElement {
        let (n, mode) = (self.n(), self.mode());
        let st = supertranspose(&self.matrix).expect("OSp elements are even 3×3");
        let matrix = SuperMatrix::j_inv(n, mode).try_mul(&st).and_then(|x| x.try_mul(&SuperMatrix::j(n, mode)));
        OspElement { matrix: matrix.expect("same ring"), provenance: None }
    }

    /// Group product; closure is what `check_membership` certifies.
    pub fn try_mul(&self, other: &OspElement) -> Result<OspElement> {
        Ok(OspElement { matrix: self.matrix.try_mul(&other.matrix)?, provenance: None })
    }

    /// g·M·g⁻¹.
    pub fn conjugate(&self, m: &SuperMatrix) -> Result<SuperMatrix> {
        self.matrix.try_mul(m)?.try_mul(&self.inverse().matrix)
    }

    pub fn to_float(&self) -> OspElement {
        OspElement {
            matrix: self.matrix.to_float(),
            provenance: self
                .provenance
                .as_ref()
                .map(|p| Provenance { sl2: p.sl2.clone().map(|x| x.to_float()), odd: p.odd.clone().map(|o| o.map(|x| x.to_float())) }),
        }
    }

    /// Bodies of the even-even block.
    pub fn reduce_body(&self) -> [[Scalar; 2]; 2] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.get(i, j).body()))
    }

    /// Conjugation by diag(−1,−1,1): negates α, β, γ, δ.
    pub fn z2_flip(&self) -> OspElement {
        let mut m = self.matrix.clone();
        for (i, j) in [(0, 2), (1, 2), (2, 0), (2, 1)] {
            m.set(i, j, -self.get(i, j)).expect("same ring");
        }
        OspElement {
            matrix: m,
            provenance: self.provenance.as_ref().map(|p| Provenance { sl2: p.sl2.clone(), odd: p.odd.as_ref().map(|o| [-&o[0], -&o[1]]) }),
        }
    }

    /// True when all odd entries vanish.
    pub fn is_bosonic(&self) -> bool {
        [(0, 2), (1, 2), (2, 0), (2, 1)].iter().all(|&(i, j)| self.get(i, j).is_zero())
    }
}

pub fn inverse(g: &OspElement) -> OspElement {
    g.inverse()
}

pub fn reduce_body(g: &OspElement) -> [[Scalar; 2]; 2] {
    g.reduce_body()
}

pub fn z2_flip(g: &OspElement) -> OspElement {
    g.z2_flip()
}

#[derive(Serialize)]
struct OspJson<'a> {
    #[serde(flatten)]
    matrix: &'a SuperMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<&'a Provenance>,
}

impl Serialize for OspElement {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        OspJson { matrix: &self.matrix, provenance: self.provenance.as_ref() }.serialize(ser)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superlinalg::supertrace;

    const N: u8 = 8;

    fn k(v: i64) -> GrassmannElement {
        GrassmannElement::from_i64(N, Mode::Exact, v)
    }

    fn q(p: i64, d: i64) -> GrassmannElement {
        GrassmannElement::scalar(N, Scalar::ratio(p, d))
    }

    fn th(i: usize) -> GrassmannElement {
        GrassmannElement::generator(N, i, Mode::Exact)
    }

    #[test]
    fn sl2_embedding() {
        assert!(from_sl2(&k(1), &k(0), &k(0), &k(1)).unwrap().matrix().is_identity());
        let u = from_sl2(&k(1), &k(1), &k(0), &k(1)).unwrap();
        assert_eq!(u.matrix(), &SuperMatrix::from_int(N, Mode::Exact, [[1, 1, 0], [0, 1, 0], [0, 0, 1]]));
        let d = from_sl2(&k(2), &k(0), &k(0), &q(1, 2)).unwrap();
        assert!(check_membership(d.matrix()).ok);
        assert!(matches!(from_sl2(&k(2), &k(0), &k(0), &k(1)), Err(Error::Determinant(_))));
    }

    /// exp of X by its power series, truncated when X^k vanishes.
    fn series_exp(x: &SuperMatrix) -> SuperMatrix {
        let mut acc = SuperMatrix::identity(3, N, Mode::Exact);
        let mut term = acc.clone();
        for k in 1..=N as i64 + 1 {
            term = term.try_mul(x).unwrap().map(|e| e.scale(&Scalar::ratio(1, k)));
            if term.is_zero() {
                break;
            }
            acc = acc.try_add(&term).unwrap();
        }
        acc
    }

    #[test]
    fn exp_odd_matches_series() {
        let g = &th(1) + &(&(&th(2) * &th(3)) * &th(4));
        let d = &th(5).scale(&Scalar::ratio(3, 2)) - &th(1);
        let x = q1(N, Mode::Exact).left_scale(&g).try_add(&q2(N, Mode::Exact).left_scale(&d)).unwrap();
        assert_eq!(exp_odd(&g, &d).unwrap().matrix(), &series_exp(&x).with_parity(Some(Parity::Even)).unwrap());
        assert!(exp_odd(&k(0), &k(0)).unwrap().matrix().is_identity());
        let xi = exp_odd(&th(1), &k(0)).unwrap();
        assert_eq!(
            xi.matrix(),
            &SuperMatrix::identity(3, N, Mode::Exact)
                .try_add(&q1(N, Mode::Exact).left_scale(&th(1)))
                .and_then(|m| m.with_parity(Some(Parity::Even)))
                .unwrap()
        );
        assert!(matches!(exp_odd(&k(1), &th(1)), Err(Error::Parity(_))));
    }

    #[test]
    fn stanford_witten_u_and_v() {
        let (l, kap, xi) = (k(2), q(3, 5), th(1));
        let u = compose_general(&l, &kap, &k(0), &q(1, 2), &xi, &k(0)).unwrap();
        let z = k(0);
        let displayed = SuperMatrix::new(
            vec![vec![l.clone(), kap, &l * &xi], vec![z.clone(), q(1, 2), z.clone()], vec![z, -&xi, k(1)]],
            Some(Parity::Even),
        )
        .unwrap();
        assert_eq!(u.matrix(), &displayed);
        let v = compose_general(&q(1, 3), &k(0), &k(1), &k(3), &k(0), &xi).unwrap();
        assert!(check_membership(v.matrix()).ok);
        assert_eq!(v.get(2, 0), &xi);
        assert_eq!(v.get(1, 0), &k(1));
    }

    #[test]
    fn generic_element_satisfies_everything() {
        let a = &k(2) + &(&th(5) * &th(6));
        let b = q(1, 3);
        let c = k(-1);
        let d = &(&k(1) + &(&b * &c)) * &a.inv().unwrap();
        let g = compose_general(&a, &b, &c, &d, &th(1), &(&th(2) + &(&th(3) * &(&th(4) * &th(7))))).unwrap();
        let report = check_membership(g.matrix());
        assert!(report.ok, "{report:?}");
        assert!(berezinian(g.matrix()).unwrap().is_one());
        assert!(g.try_mul(&g.inverse()).unwrap().matrix().is_identity());
        assert_eq!(g.inverse().inverse(), OspElement { matrix: g.matrix().clone(), provenance: None });
    }

    #[test]
    fn literal_f_relation_disagrees_with_form_invariance() {
        // With γ, δ free the form-preserving element has f = 1 − γδ = 1 + βα; 1 + αβ has the wrong sign.
        let g = exp_odd(&th(1), &th(2)).unwrap();
        let (al, be, f) = (g.get(0, 2), g.get(1, 2), g.get(2, 2));
        let one = k(1);
        assert_eq!(f, &(&one + &(be * al)));
        assert_ne!(f, &(&one + &(al * be)));
        assert!(check_membership(g.matrix()).ok);
    }

    #[test]
    fn membership_detects_broken_entry() {
        let mut m = SuperMatrix::identity(3, N, Mode::Exact);
        m.set(0, 2, th(1)).unwrap();
        let r = check_membership(&m);
        assert!(!r.ok);
        assert!(!r.violations.is_empty());
        assert!(check_membership(&SuperMatrix::identity(3, N, Mode::Exact)).ok);
    }

    #[test]
    fn reduce_body_and_flip() {
        let g = compose_general(&k(2), &k(0), &k(0), &q(1, 2), &th(1), &th(2)).unwrap();
        let b = g.reduce_body();
        assert_eq!(b[0][0], Scalar::ratio(2, 1));
        assert!(b[0][1].is_zero() && b[1][0].is_zero());
        assert_eq!(b[1][1], Scalar::ratio(1, 2));
        let flipped = g.z2_flip();
        assert_eq!(flipped.get(0, 2), &-g.get(0, 2));
        assert_eq!(flipped.z2_flip().matrix(), g.matrix());
        assert_eq!(supertrace(flipped.matrix()).unwrap(), supertrace(g.matrix()).unwrap());
        assert!(OspElement::identity(N, Mode::Exact).z2_flip().matrix().is_identity());
    }

    #[test]
    fn displayed_flip_of_unipotent() {
        // I + ξq₁ ↦ I − ξq₁
        let xi = th(3);
        let g = exp_odd(&xi, &k(0)).unwrap();
        assert_eq!(g.z2_flip().matrix(), exp_odd(&-&xi, &k(0)).unwrap().matrix());
    }

    #[test]
    fn displayed_inverse_entry_for_entry() {
        let a = k(3);
        let b = k(2);
        let c = k(4);
        let d = k(3);
        let g = compose_general(&a, &b, &c, &d, &th(1), &th(2)).unwrap();
        let e = |i, j| g.get(i, j).clone();
        let expected = SuperMatrix::new(
            vec![vec![e(1, 1), -e(0, 1), e(2, 1)], vec![-e(1, 0), e(0, 0), -e(2, 0)], vec![-e(1, 2), e(0, 2), e(2, 2)]],
            Some(Parity::Even),
        )
        .unwrap();
        assert_eq!(g.inverse().matrix(), &expected);
    }
}
