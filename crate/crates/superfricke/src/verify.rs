//! Property suites behind `superfricke verify`.
//!
//! Every check draws its own seeded sample stream, so a single check can be
//! rerun in isolation with the same inputs. In float mode sampled exact data
//! is converted before the computation and comparisons use FLOAT_TOL scaled
//! by the operand size; structural checks (calibration, census) are exact in
//! both modes.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::charvar::{parse_word, FreeWord, RepresentationPair};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::grassmann::{GrassmannElement, Parity};
use crate::invariants::census::{generator_census, gram_determinant_expansion, relation_census, CensusConfig, Generators};
use crate::invariants::polynomial::{copy_blocks, polarize, restitute, SuperPolynomial, Variable};
use crate::invariants::{
    dual_pairing, matching_invariant, mu_sigma, mu_sigma_contraction, outer, parity_audit, trace_word, PermutationInvariant,
};
use crate::normalform::sl2::{m2_conj, m2_inv, m2_max_abs, m2_mul, Mat2};
use crate::normalform::{fricke_coords, osp_triangulate, sl2_triangulate, Branch, NormalFormRecord};
use crate::osp::{check_membership, OspElement};
use crate::sample::Sampler;
use crate::scalar::{Mode, Scalar};
use crate::superlinalg::{
    berezinian, calibrate_supertranspose, leibniz_det, pairing, st_pairing, supertrace, supertranspose, SuperMatrix, SuperVector,
    FLOAT_TOL, ST_SIGNS,
};

type GE = GrassmannElement;

pub const DEFAULT_SAMPLES: usize = 20;
const N: u8 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Grassmann,
    Superlinalg,
    Osp,
    Normalform,
    Invariants,
    All,
}

impl Suite {
    pub const MODULES: [Suite; 5] = [Suite::Grassmann, Suite::Superlinalg, Suite::Osp, Suite::Normalform, Suite::Invariants];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Grassmann => "grassmann",
            Suite::Superlinalg => "superlinalg",
            Suite::Osp => "osp",
            Suite::Normalform => "normalform",
            Suite::Invariants => "invariants",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::MODULES.into_iter().chain([Suite::All]).find(|x| x.name() == s).ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
    pub mode: Mode,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: crate::sample::DEFAULT_SEED, samples: DEFAULT_SAMPLES, mode: Mode::Exact }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of one check body: Ok(detail) on success, Err(reason) on failure.
type Outcome = std::result::Result<String, String>;

struct Ctx {
    seed: u64,
    samples: usize,
    mode: Mode,
}

impl Ctx {
    fn sampler(&self, salt: u64) -> Sampler {
        Sampler::new(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15), N)
    }

    fn el(&self, x: GE) -> GE {
        match self.mode {
            Mode::Exact => x,
            Mode::Float => x.to_float(),
        }
    }

    fn mat(&self, m: SuperMatrix) -> SuperMatrix {
        match self.mode {
            Mode::Exact => m,
            Mode::Float => m.to_float(),
        }
    }

    fn vec(&self, v: SuperVector) -> SuperVector {
        SuperVector(v.0.map(|x| self.el(x)))
    }

    fn osp(&self, g: OspElement) -> OspElement {
        match self.mode {
            Mode::Exact => g,
            Mode::Float => g.to_float(),
        }
    }
}

fn same(x: &GE, y: &GE) -> bool {
    match x.mode() {
        Mode::Exact => x == y,
        Mode::Float => x.close_to(y, FLOAT_TOL * (1.0 + x.max_abs().max(y.max_abs()))),
    }
}

fn same_matrix(x: &SuperMatrix, y: &SuperMatrix) -> bool {
    x.rows() == y.rows() && x.cols() == y.cols() && x.entries().zip(y.entries()).all(|(a, b)| same(a, b))
}

fn zero(x: &GE, scale: f64) -> bool {
    match x.mode() {
        Mode::Exact => x.is_zero(),
        Mode::Float => x.is_negligible(FLOAT_TOL * scale),
    }
}

fn lib<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

type Check = (&'static str, fn(&Ctx) -> Outcome);

fn checks(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Grassmann => vec![
            ("product is associative", grassmann_associative),
            ("product distributes over sums", grassmann_distributive),
            ("odd elements anticommute and square to zero", grassmann_anticommute),
            ("even part is central", grassmann_even_central),
            ("inverse of a unit", grassmann_inverse),
            ("json round trip", grassmann_json),
        ],
        Suite::Superlinalg => vec![
            ("supertranspose sign pair is calibrated", superlinalg_calibration),
            ("double supertranspose matches fixture", superlinalg_double_st),
            ("supertranspose reverses products", superlinalg_st_product),
            ("supertrace is cyclic", superlinalg_str_cyclic),
            ("supertrace is OSp-invariant", superlinalg_str_conjugation),
            ("berezinian is multiplicative", superlinalg_ber_multiplicative),
            ("gram determinant of four vectors vanishes", superlinalg_gram_det),
            ("bilinear form is preserved", superlinalg_form_preserved),
        ],
        Suite::Osp => vec![
            ("compose_general passes membership", osp_membership),
            ("inverse is the displayed matrix", osp_displayed_inverse),
            ("closed under products", osp_closure),
            ("body reduction is multiplicative", osp_body_homomorphism),
            ("z2 flip is multiplicative", osp_flip_homomorphism),
        ],
        Suite::Normalform => vec![
            ("sl2 triangulation reconstructs conjugates", normalform_sl2),
            ("osp triangulation zeros and coordinates", normalform_osp),
            ("osp bodies match sl2 normal forms", normalform_bodies),
            ("z2 flip negates psi and xi", normalform_flip),
            ("delta_x squared is x squared minus 4", normalform_fricke),
            ("fixture pairs", normalform_fixtures),
        ],
        Suite::Invariants => vec![
            ("mu_sigma equals cycle supertrace products", invariants_mu_sigma),
            ("dual pairing is a supertrace", invariants_dual_pairing),
            ("polarization then restitution is d! f", invariants_polarization),
            ("matching invariants are preserved", invariants_matching),
            ("trace words are conjugation invariant", invariants_trace_words),
            ("every computed invariant is even", invariants_parity_audit),
            ("cayley-hamilton on sl2 bodies", invariants_cayley_hamilton),
            ("fricke traces have no relation to degree 3", invariants_fricke_census),
            ("gram census contains det G", invariants_gram_census),
            ("generator count 9 = x + 2", invariants_count),
        ],
        Suite::All => Suite::MODULES.into_iter().flat_map(checks).collect(),
    }
}

fn suite_of(name: &str) -> &'static str {
    Suite::MODULES.into_iter().find(|s| checks(*s).iter().any(|(n, _)| *n == name)).map(Suite::name).unwrap_or("?")
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> Vec<CheckResult> {
    let ctx = Ctx { seed: cfg.seed, samples: cfg.samples.max(1), mode: cfg.mode };
    checks(suite)
        .into_iter()
        .map(|(name, f)| {
            let out = std::panic::catch_unwind(|| f(&ctx)).unwrap_or_else(|_| Err("panicked".into()));
            let (passed, detail) = match out {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult { suite: suite_of(name), name, passed, detail }
        })
        .collect()
}

pub struct Table<'a>(pub &'a [CheckResult]);

impl fmt::Display for Table<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.0.iter().map(|r| r.name.len()).max().unwrap_or(0);
        for r in self.0 {
            let tag = if r.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag}  {:<12} {:<w$}  {}", r.suite, r.name, r.detail)?;
        }
        let passed = self.0.iter().filter(|r| r.passed).count();
        write!(f, "{passed}/{} checks passed", self.0.len())
    }
}

// grassmann

fn grassmann_associative(c: &Ctx) -> Outcome {
    let mut s = c.sampler(1);
    for _ in 0..c.samples {
        let (x, y, z) = (c.el(s.element()), c.el(s.element()), c.el(s.element()));
        ensure(same(&(&(&x * &y) * &z), &(&x * &(&y * &z))), || format!("(xy)z != x(yz) for x = {x}"))?;
    }
    Ok(format!("{} triples", c.samples))
}

fn grassmann_distributive(c: &Ctx) -> Outcome {
    let mut s = c.sampler(2);
    for _ in 0..c.samples {
        let (x, y, z) = (c.el(s.element()), c.el(s.element()), c.el(s.element()));
        ensure(same(&(&x * &(&y + &z)), &(&(&x * &y) + &(&x * &z))), || "x(y+z) != xy + xz".into())?;
        ensure(same(&(&(&y + &z) * &x), &(&(&y * &x) + &(&z * &x))), || "(y+z)x != yx + zx".into())?;
    }
    Ok(format!("{} triples", c.samples))
}

fn grassmann_anticommute(c: &Ctx) -> Outcome {
    let mut s = c.sampler(3);
    for _ in 0..c.samples {
        let (u, v) = (c.el(s.odd()), c.el(s.odd()));
        ensure(same(&(&u * &v), &-&(&v * &u)), || format!("uv != -vu for u = {u}"))?;
        ensure(zero(&(&u * &u), 1.0 + u.max_abs().powi(2)), || format!("u^2 != 0 for u = {u}"))?;
    }
    Ok(format!("{} pairs", c.samples))
}

fn grassmann_even_central(c: &Ctx) -> Outcome {
    let mut s = c.sampler(4);
    for _ in 0..c.samples {
        let (x, y) = (c.el(s.element()), c.el(s.element()));
        ensure(same(&(&x.even_part() + &x.odd_part()), &x), || "x != even + odd".into())?;
        let e = x.even_part();
        ensure(same(&(&e * &y), &(&y * &e)), || "even part does not commute".into())?;
    }
    Ok(format!("{} pairs", c.samples))
}

fn grassmann_inverse(c: &Ctx) -> Outcome {
    let mut s = c.sampler(5);
    for _ in 0..c.samples {
        let x = loop {
            let x = s.element();
            if !x.body().is_zero() {
                break c.el(x);
            }
        };
        let xi = lib(x.inv())?;
        let one = GE::one(N, c.mode);
        ensure(same(&(&x * &xi), &one) && same(&(&xi * &x), &one), || format!("x x^-1 != 1 for x = {x}"))?;
    }
    let z = c.el(s.odd());
    ensure(matches!(z.inv(), Err(Error::ZeroBody)), || "odd element inverted".into())?;
    Ok(format!("{} units", c.samples))
}

fn grassmann_json(c: &Ctx) -> Outcome {
    let mut s = c.sampler(6);
    for _ in 0..c.samples {
        let x = c.el(s.element());
        let text = serde_json::to_string(&x).map_err(|e| e.to_string())?;
        let back = lib(GE::from_json_value(&serde_json::from_str(&text).map_err(|e| e.to_string())?, c.mode))?;
        ensure(back == x, || format!("round trip changed {text}"))?;
    }
    Ok(format!("{} elements", c.samples))
}

// superlinalg

fn superlinalg_calibration(_: &Ctx) -> Outcome {
    let got = calibrate_supertranspose();
    ensure(got == Some(ST_SIGNS), || format!("calibration gives {got:?}, frozen {ST_SIGNS:?}"))?;
    Ok(format!("signs {ST_SIGNS:?}"))
}

fn superlinalg_double_st(c: &Ctx) -> Outcome {
    let pattern = fixtures::double_supertranspose_signs();
    let mut s = c.sampler(7);
    for _ in 0..c.samples {
        let m = c.mat(s.even_matrix());
        let twice = lib(supertranspose(&lib(supertranspose(&m))?))?;
        for i in 0..3 {
            for j in 0..3 {
                let expect = if pattern[i][j] < 0 { -m.get(i, j) } else { m.get(i, j).clone() };
                ensure(same(twice.get(i, j), &expect), || format!("entry ({},{}) breaks the frozen pattern", i + 1, j + 1))?;
            }
        }
    }
    Ok(format!("{} matrices", c.samples))
}

fn superlinalg_st_product(c: &Ctx) -> Outcome {
    let mut s = c.sampler(8);
    for _ in 0..c.samples {
        let (m, p) = (c.mat(s.even_matrix()), c.mat(s.even_matrix()));
        let lhs = lib(supertranspose(&lib(m.try_mul(&p))?))?;
        let rhs = lib(lib(supertranspose(&p))?.try_mul(&lib(supertranspose(&m))?))?;
        ensure(same_matrix(&lhs, &rhs), || "(MP)^st != P^st M^st".into())?;
    }
    Ok(format!("{} pairs", c.samples))
}

fn superlinalg_str_cyclic(c: &Ctx) -> Outcome {
    let mut s = c.sampler(9);
    for _ in 0..c.samples {
        let (m, p) = (c.mat(s.even_matrix()), c.mat(s.even_matrix()));
        ensure(same(&lib(supertrace(&lib(m.try_mul(&p))?))?, &lib(supertrace(&lib(p.try_mul(&m))?))?), || "str(MP) != str(PM)".into())?;
    }
    Ok(format!("{} pairs", c.samples))
}

fn superlinalg_str_conjugation(c: &Ctx) -> Outcome {
    let mut s = c.sampler(10);
    for _ in 0..c.samples {
        let m = c.mat(s.even_matrix());
        let g = c.osp(s.osp());
        ensure(same(&lib(supertrace(&lib(g.conjugate(&m))?))?, &lib(supertrace(&m))?), || "str(gMg^-1) != str(M)".into())?;
    }
    Ok(format!("{} conjugations", c.samples))
}

fn superlinalg_ber_multiplicative(c: &Ctx) -> Outcome {
    let mut s = c.sampler(11);
    for _ in 0..c.samples {
        let (m, p) = (c.mat(s.invertible_even_matrix()), c.mat(s.invertible_even_matrix()));
        let lhs = lib(berezinian(&lib(m.try_mul(&p))?))?;
        ensure(same(&lhs, &(&lib(berezinian(&m))? * &lib(berezinian(&p))?)), || "Ber(MP) != Ber(M)Ber(P)".into())?;
    }
    Ok(format!("{} pairs", c.samples))
}

fn superlinalg_gram_det(c: &Ctx) -> Outcome {
    let mut s = c.sampler(12);
    for _ in 0..c.samples {
        let vs: Vec<SuperVector> = (0..4).map(|_| c.vec(s.even_vector())).collect();
        let g = lib(crate::invariants::gram_matrix(&vs))?;
        let d = lib(leibniz_det(&g))?;
        ensure(zero(&d, 1.0 + g.max_abs().powi(4)), || format!("det G = {d}"))?;
    }
    Ok(format!("{} quadruples", c.samples))
}

fn superlinalg_form_preserved(c: &Ctx) -> Outcome {
    let mut s = c.sampler(13);
    for _ in 0..c.samples {
        let g = c.osp(s.osp());
        let m = g.matrix();
        let (v, w) = (c.vec(s.homogeneous_vector(Parity::Odd)), c.vec(s.homogeneous_vector(Parity::Odd)));
        let moved = lib(pairing(&lib(m.apply(&v))?, &lib(m.apply(&w))?))?;
        ensure(same(&moved, &lib(pairing(&v, &w))?), || "B(gv,gw) != B(v,w) on odd-parity vectors".into())?;
        let (v, w) = (c.vec(s.even_vector()), c.vec(s.even_vector()));
        let moved = lib(st_pairing(&lib(m.apply(&v))?, &lib(m.apply(&w))?))?;
        ensure(same(&moved, &lib(st_pairing(&v, &w))?), || "v^st J w not preserved on even vectors".into())?;
    }
    Ok(format!("{} elements", c.samples))
}

// osp

fn osp_membership(c: &Ctx) -> Outcome {
    let mut s = c.sampler(14);
    for _ in 0..c.samples {
        let g = c.osp(s.osp());
        let rep = check_membership(g.matrix());
        ensure(rep.ok, || format!("violations: {:?}", rep.violations.iter().map(|v| v.name).collect::<Vec<_>>()))?;
    }
    Ok(format!("{} elements", c.samples))
}

/// [[d, −b, δ], [−c, a, −γ], [−β, α, f]]
pub fn displayed_inverse(g: &SuperMatrix) -> SuperMatrix {
    let e = |i: usize, j: usize| g.get(i, j).clone();
    SuperMatrix::new(
        vec![vec![e(1, 1), -e(0, 1), e(2, 1)], vec![-e(1, 0), e(0, 0), -e(2, 0)], vec![-e(1, 2), e(0, 2), e(2, 2)]],
        Some(Parity::Even),
    )
    .expect("even layout")
}

fn osp_displayed_inverse(c: &Ctx) -> Outcome {
    let mut s = c.sampler(15);
    for _ in 0..c.samples {
        let g = c.osp(s.osp());
        let gi = g.inverse();
        ensure(same_matrix(gi.matrix(), &displayed_inverse(g.matrix())), || "J^-1 g^st J differs from the displayed inverse".into())?;
        ensure(same_matrix(&lib(g.matrix().try_mul(gi.matrix()))?, &SuperMatrix::identity(3, N, c.mode)), || "g g^-1 != I".into())?;
    }
    Ok(format!("{} elements", c.samples))
}

fn osp_closure(c: &Ctx) -> Outcome {
    let mut s = c.sampler(16);
    for _ in 0..c.samples {
        let (g, h) = (c.osp(s.osp()), c.osp(s.osp()));
        let gh = lib(g.try_mul(&h))?;
        ensure(check_membership(gh.matrix()).ok, || "product left OSp".into())?;
    }
    Ok(format!("{} products", c.samples))
}

fn osp_body_homomorphism(c: &Ctx) -> Outcome {
    let mut s = c.sampler(17);
    for _ in 0..c.samples {
        let (g, h) = (c.osp(s.osp()), c.osp(s.osp()));
        let lhs = lib(g.try_mul(&h))?.reduce_body();
        let rhs = crate::sample::mat2_mul(&g.reduce_body(), &h.reduce_body());
        let ok = (0..2).all(|i| (0..2).all(|j| same(&GE::scalar(N, lhs[i][j].clone()), &GE::scalar(N, rhs[i][j].clone()))));
        ensure(ok, || "body(gh) != body(g) body(h)".into())?;
    }
    Ok(format!("{} products", c.samples))
}

fn osp_flip_homomorphism(c: &Ctx) -> Outcome {
    let mut s = c.sampler(18);
    for _ in 0..c.samples {
        let (g, h) = (c.osp(s.osp()), c.osp(s.osp()));
        let lhs = lib(g.try_mul(&h))?.z2_flip();
        let rhs = lib(g.z2_flip().try_mul(&h.z2_flip()))?;
        ensure(same_matrix(lhs.matrix(), rhs.matrix()), || "flip(gh) != flip(g) flip(h)".into())?;
        ensure(check_membership(g.z2_flip().matrix()).ok, || "flip left OSp".into())?;
    }
    Ok(format!("{} products", c.samples))
}

// normalform

/// Conjugation residual and shape residual of an SL(2) normal form.
pub fn sl2_residual(a: &Mat2, b: &Mat2) -> Result<(f64, Branch)> {
    let nf = sl2_triangulate(a, b)?;
    let g = nf.conjugator;
    let ra = m2_max_abs(&sub2(&m2_conj(&g, a), &nf.normal_a));
    let rb = m2_max_abs(&sub2(&m2_conj(&g, b), &nf.normal_b));
    let shape = nf.normal_a[0][1].norm().max(nf.normal_b[1][0].norm());
    let inv = m2_max_abs(&sub2(&m2_mul(&g, &m2_inv(&g)), &crate::normalform::sl2::mat2([[1.0, 0.0], [0.0, 1.0]])));
    Ok((ra.max(rb).max(shape).max(inv), nf.branch))
}

fn sub2(a: &Mat2, b: &Mat2) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] - b[i][j]))
}

fn normalform_sl2(c: &Ctx) -> Outcome {
    let mut s = c.sampler(19);
    let mut unipotent = 0;
    let mut worst: f64 = 0.0;
    for k in 0..c.samples {
        let (a, b) = s.sl2_complex_pair(k % 5 == 4);
        let (r, branch) = lib(sl2_residual(&a, &b))?;
        worst = worst.max(r);
        if branch == Branch::Unipotent {
            unipotent += 1;
        }
        ensure(r < 1e-9 * (1.0 + m2_max_abs(&a).max(m2_max_abs(&b))).powi(3), || format!("residual {r:.3e}"))?;
    }
    Ok(format!("{} pairs, {unipotent} unipotent, worst residual {worst:.1e}", c.samples))
}

/// The identities an OSp normal form must satisfy, checked exactly in exact mode.
pub fn check_osp_record(a: &OspElement, b: &OspElement, rec: &NormalFormRecord) -> std::result::Result<(), String> {
    let g = lib(OspElement::from_matrix(rec.conjugator.clone()))?;
    let gi = g.inverse();
    let conj = |m: &SuperMatrix| -> std::result::Result<SuperMatrix, String> { lib(lib(g.matrix().try_mul(m))?.try_mul(gi.matrix())) };
    ensure(same_matrix(&conj(a.matrix())?, &rec.normal_a), || "g A g^-1 != normalA".into())?;
    ensure(same_matrix(&conj(b.matrix())?, &rec.normal_b), || "g B g^-1 != normalB".into())?;
    let scale = (1.0 + rec.normal_a.max_abs().max(rec.normal_b.max_abs())).powi(2);
    for (name, m, i, j) in [
        ("normalA(1,2)", &rec.normal_a, 0, 1),
        ("normalA(1,3)", &rec.normal_a, 0, 2),
        ("normalB(2,1)", &rec.normal_b, 1, 0),
        ("normalB(2,3)", &rec.normal_b, 1, 2),
        ("normalB(3,1)", &rec.normal_b, 2, 0),
    ] {
        ensure(zero(m.get(i, j), scale), || format!("{name} = {}", m.get(i, j)))?;
    }
    let n = a.n();
    let one = GE::one(n, a.mode());
    ensure(same(&rec.psi, &(&rec.nu * &(&lib(rec.mu.inv())? - &one))), || "psi != nu(mu^-1 - 1)".into())?;
    let beta = b.get(1, 2);
    let xi = -&(&(&lib(rec.lambda.inv())? * &lib(rec.x.inv())?) * beta);
    ensure(same(&rec.xi, &xi), || "xi != -lambda^-1 x^-1 beta".into())?;
    ensure(same(rec.normal_a.get(2, 0), &rec.psi), || "normalA(3,1) != psi".into())?;
    Ok(())
}

fn normalform_osp(c: &Ctx) -> Outcome {
    let mut s = c.sampler(20);
    s.soul_degree = 2;
    for _ in 0..c.samples {
        let (a, b) = s.triangulable_osp_pair();
        let (a, b) = (c.osp(a), c.osp(b));
        let rec = lib(osp_triangulate(&a, &b))?;
        check_osp_record(&a, &b, &rec)?;
    }
    Ok(format!("{} pairs", c.samples))
}

fn body_mat2(g: &OspElement) -> Mat2 {
    let b = g.reduce_body();
    std::array::from_fn(|i| std::array::from_fn(|j| b[i][j].to_complex()))
}

fn normalform_bodies(c: &Ctx) -> Outcome {
    let mut s = c.sampler(21);
    s.soul_degree = 2;
    let mut worst: f64 = 0.0;
    for _ in 0..c.samples {
        let (a, b) = s.triangulable_osp_pair();
        let (a, b) = (c.osp(a), c.osp(b));
        let rec = lib(osp_triangulate(&a, &b))?;
        let nf = lib(sl2_triangulate(&body_mat2(&a), &body_mat2(&b)))?;
        for (name, x, y) in [("lambda", &rec.lambda, nf.lambda), ("mu", &rec.mu, nf.mu), ("kappa", &rec.kappa, nf.kappa)] {
            let d = (x.body().to_complex() - y).norm();
            worst = worst.max(d);
            ensure(d < 1e-9 * (1.0 + y.norm()), || format!("{name}: body {} vs sl2 {y}", x.body()))?;
        }
    }
    Ok(format!("{} pairs, worst body gap {worst:.1e}", c.samples))
}

fn normalform_flip(c: &Ctx) -> Outcome {
    let mut s = c.sampler(22);
    s.soul_degree = 2;
    for _ in 0..c.samples {
        let (a, b) = s.triangulable_osp_pair();
        let (a, b) = (c.osp(a), c.osp(b));
        let rec = lib(osp_triangulate(&a, &b))?;
        let flipped = lib(osp_triangulate(&a.z2_flip(), &b.z2_flip()))?;
        ensure(same(&flipped.psi, &-&rec.psi) && same(&flipped.xi, &-&rec.xi), || "psi or xi not negated".into())?;
        ensure(same(&flipped.lambda, &rec.lambda) && same(&flipped.mu, &rec.mu) && same(&flipped.kappa, &rec.kappa), || {
            "lambda, mu or kappa moved".into()
        })?;
    }
    Ok(format!("{} pairs", c.samples))
}

fn normalform_fricke(c: &Ctx) -> Outcome {
    let mut s = c.sampler(23);
    for _ in 0..c.samples {
        let lambda = loop {
            let l = s.invertible_even();
            if !l.body().is_zero() {
                break c.el(l);
            }
        };
        let (mu, kappa) = (c.el(s.invertible_even()), c.el(s.even()));
        let f = lib(fricke_coords(&lambda, &mu, &kappa))?;
        let four = GE::from_i64(N, c.mode, 4);
        ensure(same(&(&f.delta_x * &f.delta_x), &(&(&f.x * &f.x) - &four)), || "delta_x^2 != x^2 - 4".into())?;
    }
    Ok(format!("{} values", c.samples))
}

fn normalform_fixtures(c: &Ctx) -> Outcome {
    let mut names = Vec::new();
    for fx in fixtures::pairs() {
        let rho = lib(fx.pair())?;
        let rho = if c.mode == Mode::Float { rho.to_float() } else { rho };
        match fx.expect {
            fixtures::Expect::Osp => {
                let rec = lib(osp_triangulate(rho.a(), rho.b()))?;
                check_osp_record(rho.a(), rho.b(), &rec).map_err(|e| format!("{}: {e}", fx.name))?;
            }
            fixtures::Expect::Sl2(branch) => {
                let (r, got) = lib(sl2_residual(&body_mat2(rho.a()), &body_mat2(rho.b())))?;
                ensure(got == branch && r < 1e-9, || format!("{}: branch {got:?}, residual {r:.1e}", fx.name))?;
            }
            fixtures::Expect::Error => {
                let r = crate::cli::normal_form(&rho);
                ensure(r.is_err(), || format!("{}: expected a rejection", fx.name))?;
            }
        }
        names.push(fx.name);
    }
    Ok(names.join(", "))
}

// invariants

fn invariants_mu_sigma(c: &Ctx) -> Outcome {
    let mut s = c.sampler(24);
    let mut count = 0;
    for k in [2, 3] {
        for sigma in PermutationInvariant::all(k) {
            for _ in 0..c.samples {
                let ms: Vec<SuperMatrix> = (0..k).map(|_| c.mat(s.even_matrix())).collect();
                let lhs = lib(mu_sigma(&ms, &sigma))?;
                let rhs = lib(mu_sigma_contraction(&ms, &sigma))?;
                ensure(same(&lhs, &rhs), || format!("sigma = {sigma}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} evaluations over Sym2 and Sym3"))
}

fn invariants_dual_pairing(c: &Ctx) -> Outcome {
    let mut s = c.sampler(25);
    for _ in 0..c.samples {
        let pv = if s.gen_bool(0.5) { Parity::Even } else { Parity::Odd };
        let pf = if s.gen_bool(0.5) { Parity::Even } else { Parity::Odd };
        let (v, phi) = (c.vec(s.homogeneous_vector(pv)), c.vec(s.homogeneous_vector(pf)));
        ensure(same(&lib(supertrace(&lib(outer(&v, &phi))?))?, &lib(dual_pairing(&v, &phi))?), || format!("{pv:?}/{pf:?} pair"))?;
    }
    Ok(format!("{} pairs", c.samples))
}

/// Random polynomial homogeneous of degree `d` in the block-0 variables.
pub fn random_homogeneous(vars: &[Variable], d: u32, terms: usize, s: &mut Sampler) -> Result<SuperPolynomial> {
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        let mut e = vec![0u8; vars.len()];
        let mut left = d;
        let mut guard = 0;
        while left > 0 && guard < 64 {
            guard += 1;
            let i = s.gen_range(0, vars.len());
            if vars[i].parity == Parity::Odd && e[i] == 1 {
                continue;
            }
            e[i] += 1;
            left -= 1;
        }
        if left == 0 {
            out.push((e, s.nonzero_scalar()));
        }
    }
    SuperPolynomial::from_terms(vars.to_vec(), Mode::Exact, out)
}

pub fn polarization_variables() -> [(&'static str, Vec<Variable>); 3] {
    let v = |name: &str, p, base| Variable::new(name, p, 0, base);
    [
        ("even", vec![v("x", Parity::Even, 0), v("y", Parity::Even, 1), v("z", Parity::Even, 2)]),
        ("odd", vec![v("s", Parity::Odd, 0), v("t", Parity::Odd, 1), v("u", Parity::Odd, 2), v("w", Parity::Odd, 3)]),
        ("mixed", vec![v("x", Parity::Even, 0), v("y", Parity::Even, 1), v("s", Parity::Odd, 2), v("t", Parity::Odd, 3)]),
    ]
}

/// restitute(polarize(f)) compared with d!·f.
pub fn polarization_roundtrip(f: &SuperPolynomial, d: u32) -> Result<bool> {
    let pf = polarize(f, 0)?;
    let back = restitute(&pf, f.vars(), &copy_blocks(f.vars(), d as usize), 0)?;
    let fact: i64 = (1..=d as i64).product();
    Ok(back == f.scale(&Scalar::from_i64(Mode::Exact, fact)))
}

fn invariants_polarization(c: &Ctx) -> Outcome {
    let mut s = c.sampler(26);
    let mut count = 0;
    for (kind, vars) in polarization_variables() {
        for d in 1..=4u32 {
            for _ in 0..c.samples.min(10) {
                let f = lib(random_homogeneous(&vars, d, 3, &mut s))?;
                ensure(lib(polarization_roundtrip(&f, d))?, || format!("{kind} degree {d}: {f}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} polynomials"))
}

fn invariants_matching(c: &Ctx) -> Outcome {
    let mut s = c.sampler(27);
    for _ in 0..c.samples {
        let g = c.osp(s.osp());
        let vs: Vec<SuperVector> = (0..4).map(|_| c.vec(s.homogeneous_vector(Parity::Odd))).collect();
        let moved: Vec<SuperVector> = vs.iter().map(|v| g.matrix().apply(v)).collect::<Result<_>>().map_err(|e| e.to_string())?;
        for m in [[(1, 2), (3, 4)], [(1, 3), (2, 4)], [(1, 4), (2, 3)]] {
            ensure(same(&lib(matching_invariant(&vs, &m))?, &lib(matching_invariant(&moved, &m))?), || format!("matching {m:?}"))?;
        }
    }
    Ok(format!("{} quadruples", c.samples))
}

pub fn shipped_words() -> Vec<FreeWord> {
    fixtures::words().iter().map(|w| parse_word(w).expect("fixture words parse")).collect()
}

fn invariants_trace_words(c: &Ctx) -> Outcome {
    let mut s = c.sampler(28);
    let words = shipped_words();
    for _ in 0..c.samples.min(10) {
        let rho = lib(RepresentationPair::new(c.osp(s.osp()), c.osp(s.osp())))?;
        let moved = lib(rho.conjugate(&c.osp(s.osp())))?;
        for w in &words {
            ensure(same(&lib(trace_word(w, &rho))?, &lib(trace_word(w, &moved))?), || format!("word {w}"))?;
        }
    }
    Ok(format!("{} words", words.len()))
}

fn invariants_parity_audit(c: &Ctx) -> Outcome {
    let mut s = c.sampler(29);
    s.soul_degree = 2;
    let mut values = Vec::new();
    for _ in 0..c.samples.min(10) {
        let rho = lib(RepresentationPair::new(c.osp(s.osp()), c.osp(s.osp())))?;
        for w in shipped_words() {
            values.push(lib(trace_word(&w, &rho))?);
        }
        let (a, b) = s.triangulable_osp_pair();
        let rec = lib(osp_triangulate(&c.osp(a), &c.osp(b)))?;
        let f = lib(rec.fricke())?;
        values.extend([rec.lambda, rec.mu, rec.kappa, f.x, f.y, f.z]);
    }
    ensure(parity_audit(&values), || "an invariant has an odd part".into())?;
    Ok(format!("{} values", values.len()))
}

fn invariants_cayley_hamilton(c: &Ctx) -> Outcome {
    let mut s = c.sampler(30);
    for _ in 0..c.samples {
        let m = s.sl2_body();
        let tr = |m: &[[Scalar; 2]; 2]| c.el(GE::scalar(N, &m[0][0] + &m[1][1]));
        let t = tr(&m);
        let t2 = tr(&crate::sample::mat2_mul(&m, &m));
        ensure(same(&t2, &(&(&t * &t) - &GE::from_i64(N, c.mode, 2))), || "tr(A^2) != tr(A)^2 - 2".into())?;
    }
    Ok(format!("{} matrices", c.samples))
}

fn invariants_fricke_census(c: &Ctx) -> Outcome {
    let r = lib(relation_census(&Generators::fricke_sl2(), 3, 64, c.seed, 4))?;
    ensure(r.kernel_dimension() == 0, || format!("kernel {:?}", r.rendered_kernel()))?;
    Ok(format!("{} monomials, kernel 0", r.monomial_count))
}

fn invariants_gram_census(c: &Ctx) -> Outcome {
    let r = lib(relation_census(&Generators::gram_v4(), 4, 1024, c.seed, N))?;
    ensure(lib(r.contains(&gram_determinant_expansion()))?, || "det G outside the kernel".into())?;
    Ok(format!("{} monomials, kernel {}", r.monomial_count, r.kernel_dimension()))
}

fn invariants_count(c: &Ctx) -> Outcome {
    let rep = lib(generator_census(&CensusConfig { seed: c.seed, ..CensusConfig::default() }))?;
    ensure(rep.total == 9 && rep.ideal == 2 && rep.quotient == 7, || rep.counting_line())?;
    ensure(rep.ber_invariance, || "Ber invariance failed".into())?;
    Ok(rep.counting_line())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::MODULES.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn fast_suites_pass_in_both_modes() {
        for mode in [Mode::Exact, Mode::Float] {
            let cfg = VerifyConfig { samples: 3, mode, ..VerifyConfig::default() };
            for suite in [Suite::Grassmann, Suite::Superlinalg, Suite::Osp] {
                let res = run(suite, &cfg);
                assert!(res.iter().all(|r| r.passed), "{mode:?}\n{}", Table(&res));
            }
        }
    }
}
