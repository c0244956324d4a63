//! Relation and generator census.
//!
//! Every monomial of degree ≤ D in the generators is evaluated at M seeded
//! exact sample points. A polynomial vanishes at a point iff every blade
//! coefficient of its value vanishes, so each point contributes linear
//! conditions on the monomial coefficients. The conditions are reduced modulo
//! a 64-bit prime, compressed to a few random blade combinations per point,
//! and the kernel is lifted back to ℚ by rational reconstruction.

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::modular::{self, DenseElement, Echelon, ModElement};
use crate::charvar::{reduced_words, FreeWord, Letter, RepresentationPair};
use crate::error::{Error, Result};
use crate::grassmann::GrassmannElement;
use crate::sample::{mat2_mul, Sampler};
use crate::scalar::{Mode, Scalar};
use crate::superlinalg::{berezinian, lambda_rank, pairing, supertrace, SuperMatrix, SuperVector};

type GE = GrassmannElement;
type SampleFn = dyn Fn(&mut Sampler) -> Vec<GE> + Send + Sync;

/// Random blade combinations taken per sample point.
const ROWS_PER_POINT: usize = 4;
/// Highest soul degree of census sample points.
const CENSUS_SOUL_DEGREE: u32 = 2;

/// Named generator functions evaluated at seeded random points.
pub struct Generators {
    pub names: Vec<String>,
    sample: Box<SampleFn>,
}

impl Generators {
    pub fn new(names: Vec<String>, sample: impl Fn(&mut Sampler) -> Vec<GE> + Send + Sync + 'static) -> Self {
        Generators { names, sample: Box::new(sample) }
    }

    /// B(v_i, v_j) for 1 ≤ i ≤ j ≤ 4 on four even vectors.
    pub fn gram_v4() -> Self {
        let names = gram_pairs().iter().map(|(i, j)| format!("G{i}{j}")).collect();
        Generators::new(names, |s| {
            let vs: Vec<SuperVector> = (0..4).map(|_| s.even_vector()).collect();
            gram_pairs().iter().map(|&(i, j)| pairing(&vs[i - 1], &vs[j - 1]).expect("same ring")).collect()
        })
    }

    /// X = tr A, Y = tr B, Z = tr AB on exact SL(2) bodies.
    pub fn fricke_sl2() -> Self {
        let names = ["X", "Y", "Z"].map(String::from).to_vec();
        Generators::new(names, |s| {
            let (a, b) = (s.sl2_body(), s.sl2_body());
            let ab = mat2_mul(&a, &b);
            let tr = |m: &[[Scalar; 2]; 2]| GE::scalar(s.n(), &m[0][0] + &m[1][1]);
            vec![tr(&a), tr(&b), tr(&ab)]
        })
    }

    /// x and x² for one random even element: the relation g2 − g1² is planted.
    pub fn planted_square() -> Self {
        Generators::new(vec!["g1".into(), "g2".into()], |s| {
            let x = s.even();
            let x2 = &x * &x;
            vec![x, x2]
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

pub fn gram_pairs() -> Vec<(usize, usize)> {
    (1..=4).flat_map(|i| (i..=4).map(move |j| (i, j))).collect()
}

/// Exponent vectors of degree ≤ d in k variables, by degree then
/// lexicographically on the factor sequence i₁ ≤ … ≤ i_e, with the index of
/// the monomial obtained by dropping the last factor.
pub fn monomials(k: usize, d: u32) -> Vec<(Vec<u8>, Option<(usize, usize)>)> {
    let mut out: Vec<(Vec<u8>, Option<(usize, usize)>)> = vec![(vec![0; k], None)];
    let mut layer: Vec<(usize, usize)> = vec![(0, 0)]; // (index in out, smallest allowed next factor)
    for _ in 0..d {
        let mut next = Vec::new();
        for &(parent, lo) in &layer {
            for g in lo..k {
                let mut e = out[parent].0.clone();
                e[g] += 1;
                out.push((e, Some((parent, g))));
                next.push((out.len() - 1, g));
            }
        }
        layer = next;
    }
    out
}

/// A kernel element: rational coefficients on monomials. `free` is the one
/// monomial where this vector has coefficient 1 and every other basis
/// vector has coefficient 0.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelVector {
    pub terms: Vec<(Vec<u8>, BigRational)>,
    pub free: Vec<u8>,
}

fn monomial_name(e: &[u8], names: &[String]) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{k}", names[i]) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl KernelVector {
    /// Highest monomial first, scaled so the leading coefficient is positive.
    pub fn render(&self, names: &[String]) -> String {
        let flip = self.terms.last().is_some_and(|(_, c)| c.is_negative());
        let mut s = String::new();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let c = if flip { -c } else { c.clone() };
            let mono = monomial_name(e, names);
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if mag.is_one() {
                s.push_str(&mono);
            } else if mono == "1" {
                s.push_str(&mag.to_string());
            } else {
                s.push_str(&format!("{mag}*{mono}"));
            }
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct CensusResult {
    pub names: Vec<String>,
    pub degree: u32,
    pub samples: usize,
    pub monomial_count: usize,
    pub rank: usize,
    pub kernel: Vec<KernelVector>,
    index: HashMap<Vec<u8>, usize>,
}

impl CensusResult {
    pub fn kernel_dimension(&self) -> usize {
        self.kernel.len()
    }

    pub fn rendered_kernel(&self) -> Vec<String> {
        self.kernel.iter().map(|k| k.render(&self.names)).collect()
    }

    /// Exact test of membership in the rational span of the kernel basis.
    /// Each basis vector has coefficient 1 on its own free monomial and 0 on
    /// the other free ones, so the combination is read off directly.
    pub fn contains(&self, v: &[(Vec<u8>, BigRational)]) -> Result<bool> {
        let mut target = vec![BigRational::zero(); self.monomial_count];
        for (e, c) in v {
            let i = *self.index.get(e).ok_or_else(|| Error::Shape("monomial outside the census range".into()))?;
            target[i] += c;
        }
        let mut combo = vec![BigRational::zero(); self.monomial_count];
        for kv in &self.kernel {
            let w = target[self.index[&kv.free]].clone();
            if w.is_zero() {
                continue;
            }
            for (e, c) in &kv.terms {
                combo[self.index[e]] += &w * c;
            }
        }
        Ok(combo == target)
    }
}

/// Evaluation-matrix kernel of the monomials of degree ≤ `degree`.
pub fn relation_census(gens: &Generators, degree: u32, samples: usize, seed: u64, n: u8) -> Result<CensusResult> {
    if degree == 0 {
        return Err(Error::Precondition("degree bound must be at least 1".into()));
    }
    let monos = monomials(gens.len(), degree);
    if samples < monos.len() {
        return Err(Error::InsufficientSamples { needed: monos.len(), got: samples });
    }
    let mut sampler = Sampler::new(seed, n);
    sampler.soul_degree = CENSUS_SOUL_DEGREE;
    let points: Vec<Vec<ModElement>> = (0..samples)
        .map(|_| (gens.sample)(&mut sampler).iter().map(ModElement::from_exact).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let blades = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5E_EDCE_2505);
    let functionals: Vec<Vec<Vec<u64>>> =
        (0..samples).map(|_| (0..ROWS_PER_POINT).map(|_| (0..blades).map(|_| rng.gen_range(0..modular::P)).collect()).collect()).collect();

    let rows: Vec<Vec<Vec<u64>>> =
        points.par_iter().zip(functionals.par_iter()).map(|(vals, funs)| point_rows(vals, funs, &monos, n)).collect();

    let mut ech = Echelon::new(monos.len());
    for point in rows {
        for row in point {
            ech.insert(row);
        }
    }
    let kernel = ech
        .kernel_basis()
        .into_iter()
        .map(|(f, v)| {
            let terms = v
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| {
                    modular::rational_reconstruct(c)
                        .map(|r| (monos[i].0.clone(), r))
                        .ok_or_else(|| Error::Numerical("kernel coefficient has no small rational lift".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(KernelVector { terms, free: monos[f].0.clone() })
        })
        .collect::<Result<Vec<_>>>()?;
    let index = monos.iter().enumerate().map(|(i, (e, _))| (e.clone(), i)).collect();
    Ok(CensusResult { names: gens.names.clone(), degree, samples, monomial_count: monos.len(), rank: ech.rank(), kernel, index })
}

fn point_rows(vals: &[ModElement], funs: &[Vec<u64>], monos: &[(Vec<u8>, Option<(usize, usize)>)], n: u8) -> Vec<Vec<u64>> {
    let mut values: Vec<Option<DenseElement>> = Vec::with_capacity(monos.len());
    let mut rows = vec![vec![0u64; monos.len()]; funs.len()];
    for (i, (_, parent)) in monos.iter().enumerate() {
        let v = match parent {
            None => Some(DenseElement::one(n)),
            Some((p, g)) => values[*p].as_ref().map(|pv| pv.mul_sparse(&vals[*g])).filter(|v| !v.is_zero()),
        };
        if let Some(v) = &v {
            for (row, f) in rows.iter_mut().zip(funs) {
                let mut acc = 0u64;
                for (&c, &w) in v.coeffs.iter().zip(f) {
                    if c != 0 {
                        acc = modular::add(acc, modular::mul(c, w));
                    }
                }
                row[i] = acc;
            }
        }
        values.push(v);
    }
    rows
}

/// det of the symbolic 4×4 Gram matrix with G_ii = x_ii and G_ji = −x_ij,
/// as coefficients on the census monomials.
pub fn gram_determinant_expansion() -> Vec<(Vec<u8>, BigRational)> {
    let pairs = gram_pairs();
    let var = |i: usize, j: usize| -> (usize, i64) {
        let (lo, hi, s) = if i <= j { (i, j, 1) } else { (j, i, -1) };
        (pairs.iter().position(|&p| p == (lo, hi)).expect("pair"), s)
    };
    let mut acc: HashMap<Vec<u8>, i64> = HashMap::new();
    for (perm, odd) in crate::superlinalg::permutations_with_sign(4) {
        let mut e = vec![0u8; pairs.len()];
        let mut sign = if odd { -1 } else { 1 };
        for (i, &j) in perm.iter().enumerate() {
            let (v, s) = var(i + 1, j + 1);
            e[v] += 1;
            sign *= s;
        }
        *acc.entry(e).or_insert(0) += sign;
    }
    let mut out: Vec<(Vec<u8>, BigRational)> =
        acc.into_iter().filter(|(_, c)| *c != 0).map(|(e, c)| (e, BigRational::from_integer(c.into()))).collect();
    out.sort();
    out
}

/// Jacobian of the ten pairings in the twelve vector coordinates.
fn gram_jacobian(vs: &[SuperVector]) -> Result<SuperMatrix> {
    let (n, mode) = (vs[0].n(), vs[0].mode());
    let jv = |v: &SuperVector| [-&v.0[1], v.0[0].clone(), -&v.0[2]];
    let vj = |v: &SuperVector| [v.0[1].clone(), -&v.0[0], -&v.0[2]];
    let rows = gram_pairs()
        .into_iter()
        .map(|(i, j)| {
            let mut row = vec![GE::zero(n, mode); 12];
            let (right, left) = (jv(&vs[j - 1]), vj(&vs[i - 1]));
            for k in 0..3 {
                row[3 * (i - 1) + k] = &row[3 * (i - 1) + k] + &right[k];
                row[3 * (j - 1) + k] = &row[3 * (j - 1) + k] + &left[k];
            }
            row
        })
        .collect();
    SuperMatrix::new(rows, None)
}

/// Λ-ranks of the Gram Jacobian at `points` generic points (every slot has a body).
pub fn gram_jacobian_ranks(seed: u64, n: u8, points: usize, even_points: bool) -> Result<Vec<usize>> {
    let mut s = Sampler::new(seed, n);
    (0..points)
        .map(|_| {
            let vs: Vec<SuperVector> = (0..4).map(|_| if even_points { s.even_vector() } else { s.generic_vector() }).collect();
            Ok(lambda_rank(&gram_jacobian(&vs)?).rank)
        })
        .collect()
}

/// Ber(gAg⁻¹) = Ber(A) for random even A and random OSp g.
pub fn ber_invariance(seed: u64, n: u8, trials: usize) -> Result<bool> {
    let mut s = Sampler::new(seed, n);
    for _ in 0..trials {
        let (a, b) = (s.invertible_even_matrix(), s.invertible_even_matrix());
        let g = s.osp();
        for m in [&a, &b] {
            if berezinian(&g.conjugate(m)?)? != berezinian(m)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Word image with every entry of the generator images perturbed along one
/// direction: M + εE, inverses M⁻¹ − εM⁻¹EM⁻¹.
fn perturbed_word(w: &FreeWord, a: &SuperMatrix, ai: &SuperMatrix, b: &SuperMatrix, bi: &SuperMatrix) -> Result<SuperMatrix> {
    let mut acc = SuperMatrix::identity(3, a.n(), a.mode());
    for l in w.letters() {
        let m = match l {
            Letter::A => a,
            Letter::AInv => ai,
            Letter::B => b,
            Letter::BInv => bi,
        };
        acc = acc.try_mul(m)?;
    }
    Ok(acc)
}

/// Greedy list of trace words whose differentials raise the Λ-rank, with
/// the final rank. Differentials are taken along the 18 matrix-entry
/// directions by adjoining ε = θ_{N+1}θ_{N+2}.
pub fn trace_word_span(seed: u64, n: u8, max_len: usize) -> Result<(Vec<String>, usize)> {
    let mut s = Sampler::new(seed, n);
    s.soul_degree = CENSUS_SOUL_DEGREE;
    let rho = RepresentationPair::new(s.osp(), s.osp())?;
    let wide = n + 2;
    let widen = |m: &SuperMatrix| m.map(|e| e.widen(wide));
    let eps_mask: u16 = 0b11 << n;
    let eps = GE::monomial(wide, eps_mask, Scalar::one(Mode::Exact));
    let (a, b) = (widen(rho.a().matrix()), widen(rho.b().matrix()));
    let (ai, bi) = (widen(rho.a().inverse().matrix()), widen(rho.b().inverse().matrix()));
    let mut dirs = Vec::with_capacity(18);
    for which in 0..2 {
        for k in 0..9 {
            let mut e = SuperMatrix::zeros(3, 3, wide, Mode::Exact, None);
            e.set(k / 3, k % 3, eps.clone())?;
            let (m, mi) = if which == 0 { (&a, &ai) } else { (&b, &bi) };
            let pm = m.try_add(&e)?;
            let pmi = mi.try_sub(&mi.try_mul(&e)?.try_mul(mi)?)?;
            dirs.push(if which == 0 { (pm, pmi, b.clone(), bi.clone()) } else { (a.clone(), ai.clone(), pm, pmi) });
        }
    }
    let strip = |x: &GE| -> GE {
        let terms = x.terms().iter().filter(|(m, _)| m & eps_mask == eps_mask).map(|(m, c)| (m & !eps_mask, c.clone()));
        terms.fold(GE::zero(n, Mode::Exact), |acc, (m, c)| &acc + &GE::monomial(n, m, c))
    };
    let mut kept: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<GE>> = Vec::new();
    let mut rank = 0;
    for w in reduced_words(max_len).into_iter().skip(1) {
        let row = dirs
            .iter()
            .map(|(pa, pai, pb, pbi)| Ok(strip(&supertrace(&perturbed_word(&w, pa, pai, pb, pbi)?)?)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
        let r = lambda_rank(&SuperMatrix::new(rows.clone(), None)?).rank;
        if r > rank {
            rank = r;
            kept.push(w.to_string());
        } else {
            rows.pop();
        }
    }
    Ok((kept, rank))
}

/// The counting report.
#[derive(Clone, Debug)]
pub struct CensusReport {
    pub gram_rank: usize,
    pub gram_ranks: Vec<usize>,
    pub gram_rank_even_points: usize,
    pub ideal_invariants: Vec<String>,
    pub ber_invariance: bool,
    pub total: usize,
    pub ideal: usize,
    pub quotient: i64,
    pub kernel: CensusResult,
    pub det_g_in_kernel: bool,
    pub trace_words: Vec<String>,
    pub trace_word_rank: usize,
    pub seed: u64,
    pub n_generators: u8,
}

impl CensusReport {
    pub fn counting_line(&self) -> String {
        format!("{} = x + {}, x = {}", self.total, self.ideal, self.quotient)
    }
}

impl fmt::Display for CensusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.counting_line())
    }
}

impl Serialize for CensusReport {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Count {
            total: usize,
            ideal: usize,
            quotient: i64,
        }
        let mut m = ser.serialize_map(None)?;
        m.serialize_entry("gram_rank", &self.gram_rank)?;
        m.serialize_entry("gram_rank_even_points", &self.gram_rank_even_points)?;
        m.serialize_entry("ideal_invariants", &self.ideal_invariants)?;
        m.serialize_entry("ber_invariance", &self.ber_invariance)?;
        m.serialize_entry("count", &Count { total: self.total, ideal: self.ideal, quotient: self.quotient })?;
        m.serialize_entry("counting_line", &self.counting_line())?;
        m.serialize_entry("kernel_basis", &self.kernel.rendered_kernel())?;
        m.serialize_entry("kernel_dimension", &self.kernel.kernel_dimension())?;
        m.serialize_entry("det_g_in_kernel", &self.det_g_in_kernel)?;
        m.serialize_entry("trace_words", &self.trace_words)?;
        m.serialize_entry("trace_word_rank", &self.trace_word_rank)?;
        m.serialize_entry("seed", &self.seed)?;
        m.serialize_entry("n_generators", &self.n_generators)?;
        m.serialize_entry("degree", &self.kernel.degree)?;
        m.serialize_entry("samples", &self.kernel.samples)?;
        m.end()
    }
}

pub struct CensusConfig {
    pub degree: u32,
    pub samples: usize,
    pub seed: u64,
    pub n: u8,
    pub word_length: usize,
    pub jacobian_points: usize,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig { degree: 4, samples: 1024, seed: crate::sample::DEFAULT_SEED, n: 8, word_length: 3, jacobian_points: 10 }
    }
}

/// Ber-ideal check, Gram Jacobian rank, the subtraction count, the V⁴ Gram
/// relation census and the exploratory trace-word list.
pub fn generator_census(cfg: &CensusConfig) -> Result<CensusReport> {
    let ideal_invariants = vec!["Ber(A)-1".to_string(), "Ber(B)-1".to_string()];
    let ber_ok = ber_invariance(cfg.seed, cfg.n, 5)?;
    let gram_ranks = gram_jacobian_ranks(cfg.seed, cfg.n, cfg.jacobian_points, false)?;
    let gram_rank = gram_ranks.iter().copied().min().unwrap_or(0);
    let even = gram_jacobian_ranks(cfg.seed, cfg.n, cfg.jacobian_points, true)?;
    let gram_rank_even_points = even.iter().copied().max().unwrap_or(0);
    let ideal = if ber_ok { ideal_invariants.len() } else { 0 };
    let kernel = relation_census(&Generators::gram_v4(), cfg.degree, cfg.samples, cfg.seed, cfg.n)?;
    let det_g_in_kernel = cfg.degree >= 4 && kernel.contains(&gram_determinant_expansion())?;
    let explore_n = cfg.n.min(4);
    let (trace_words, trace_word_rank) = trace_word_span(cfg.seed, explore_n, cfg.word_length)?;
    Ok(CensusReport {
        gram_rank,
        gram_ranks,
        gram_rank_even_points,
        ideal_invariants,
        ber_invariance: ber_ok,
        total: gram_rank,
        ideal,
        quotient: gram_rank as i64 - ideal as i64,
        kernel,
        det_g_in_kernel,
        trace_words,
        trace_word_rank,
        seed: cfg.seed,
        n_generators: cfg.n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_enumeration() {
        let m = monomials(2, 2);
        let e: Vec<Vec<u8>> = m.iter().map(|x| x.0.clone()).collect();
        assert_eq!(e, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(monomials(10, 4).len(), 1001);
    }

    #[test]
    fn planted_square_relation() {
        let r = relation_census(&Generators::planted_square(), 2, 16, 1, 6).unwrap();
        assert_eq!(r.rendered_kernel(), vec!["g1^2 - g2".to_string()]);
    }

    #[test]
    fn insufficient_samples() {
        let e = relation_census(&Generators::planted_square(), 2, 3, 1, 6).unwrap_err();
        assert_eq!(e, Error::InsufficientSamples { needed: 6, got: 3 });
    }

    #[test]
    fn fricke_traces_are_free() {
        let r = relation_census(&Generators::fricke_sl2(), 3, 64, 7, 4).unwrap();
        assert_eq!(r.kernel_dimension(), 0);
    }

    #[test]
    fn determinant_expansion_shape() {
        let d = gram_determinant_expansion();
        // Pf² has 6 distinct monomials from the off-diagonal part alone.
        let off: Vec<_> = d.iter().filter(|(e, _)| [0, 4, 7, 9].iter().all(|&i| e[i] == 0)).collect();
        assert_eq!(off.len(), 6);
    }

    #[test]
    fn jacobian_rank_at_generic_points() {
        assert_eq!(gram_jacobian_ranks(3, 6, 2, false).unwrap(), vec![9, 9]);
    }
}
