//! Pairings, Gram matrices, multilinear trace invariants and the relation census.

pub mod census;
pub mod modular;
pub mod polynomial;

use std::fmt;

use crate::charvar::{evaluate_word, FreeWord, RepresentationPair};
use crate::error::{Error, Result};
use crate::grassmann::{GrassmannElement, Parity};
use crate::scalar::Scalar;
use crate::superlinalg::{pairing, slot_parity, supertrace, SuperMatrix, SuperVector};

pub use census::{generator_census, relation_census, CensusReport, Generators, KernelVector};
pub use polynomial::{polarize, restitute, SuperPolynomial, Variable};

type GE = GrassmannElement;

/// G_ij = B(v_i, v_j).
pub fn gram_matrix(vs: &[SuperVector]) -> Result<SuperMatrix> {
    let rows = vs.iter().map(|v| vs.iter().map(|w| pairing(v, w)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(Error::Shape("Gram matrix of no vectors".into()));
    }
    SuperMatrix::new(rows, None)
}

/// Product of B over the pairs of a perfect matching (1-based), pairs sorted
/// by their smaller endpoint and each evaluated as B(smaller, larger).
pub fn matching_invariant(vs: &[SuperVector], matching: &[(usize, usize)]) -> Result<GE> {
    if vs.len() % 2 == 1 {
        return Err(Error::OddCount(vs.len()));
    }
    let mut seen = vec![false; vs.len()];
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(matching.len());
    for &(i, j) in matching {
        let (lo, hi) = (i.min(j), i.max(j));
        if lo == 0 || hi > vs.len() || lo == hi || seen[lo - 1] || seen[hi - 1] {
            return Err(Error::Precondition(format!("({i},{j}) breaks the perfect matching")));
        }
        seen[lo - 1] = true;
        seen[hi - 1] = true;
        pairs.push((lo, hi));
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Precondition("matching does not cover every vector".into()));
    }
    pairs.sort();
    let v0 = &vs[0];
    let mut acc = GE::one(v0.n(), v0.mode());
    for (i, j) in pairs {
        acc = acc.try_mul(&pairing(&vs[i - 1], &vs[j - 1])?)?;
    }
    Ok(acc)
}

/// A permutation in one-line notation (1-based) with its cycles, each
/// starting at its smallest element, fixed points included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationInvariant {
    sigma: Vec<usize>,
    cycles: Vec<Vec<usize>>,
}

impl PermutationInvariant {
    pub fn new(sigma: Vec<usize>) -> Result<Self> {
        let k = sigma.len();
        let mut hit = vec![false; k];
        for &s in &sigma {
            if s == 0 || s > k || hit[s - 1] {
                return Err(Error::Precondition(format!("{sigma:?} is not a permutation")));
            }
            hit[s - 1] = true;
        }
        let mut done = vec![false; k];
        let mut cycles = Vec::new();
        for start in 1..=k {
            if done[start - 1] {
                continue;
            }
            let mut cyc = vec![start];
            done[start - 1] = true;
            let mut i = sigma[start - 1];
            while i != start {
                cyc.push(i);
                done[i - 1] = true;
                i = sigma[i - 1];
            }
            cycles.push(cyc);
        }
        Ok(PermutationInvariant { sigma, cycles })
    }

    pub fn identity(k: usize) -> Self {
        Self::new((1..=k).collect()).expect("identity")
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// All permutations of 1..=k.
    pub fn all(k: usize) -> Vec<PermutationInvariant> {
        crate::superlinalg::permutations_with_sign(k)
            .into_iter()
            .map(|(p, _)| Self::new(p.into_iter().map(|i| i + 1).collect()).expect("permutation"))
            .collect()
    }
}

impl fmt::Display for PermutationInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cycles {
            let s: Vec<String> = c.iter().map(|i| i.to_string()).collect();
            write!(f, "({})", s.join(" "))?;
        }
        Ok(())
    }
}

fn require_even_square(ms: &[SuperMatrix], sigma: &PermutationInvariant) -> Result<()> {
    if ms.len() != sigma.len() {
        return Err(Error::Shape(format!("{} matrices for a permutation of {}", ms.len(), sigma.len())));
    }
    for m in ms {
        m.check_parity(Parity::Even)?;
        if !m.is_square3() {
            return Err(Error::Shape("μ_σ needs 3×3 matrices".into()));
        }
    }
    Ok(())
}

/// Product over the cycles (i₁ … i_c) of σ of str(A_{i₁}⋯A_{i_c}).
pub fn mu_sigma(ms: &[SuperMatrix], sigma: &PermutationInvariant) -> Result<GE> {
    require_even_square(ms, sigma)?;
    let (n, mode) = ms.first().map(|m| (m.n(), m.mode())).ok_or_else(|| Error::Shape("no matrices".into()))?;
    let mut acc = GE::one(n, mode);
    for cyc in &sigma.cycles {
        let mut p = ms[cyc[0] - 1].clone();
        for &i in &cyc[1..] {
            p = p.try_mul(&ms[i - 1])?;
        }
        acc = acc.try_mul(&supertrace(&p)?)?;
    }
    Ok(acc)
}

/// T = A·J⁻¹: the second index lowered with the form on the right slot.
pub fn end_to_tensor(a: &SuperMatrix) -> Result<SuperMatrix> {
    a.try_mul(&SuperMatrix::j_inv(a.n(), a.mode()))
}

pub fn tensor_to_end(t: &SuperMatrix) -> Result<SuperMatrix> {
    t.try_mul(&SuperMatrix::j(t.n(), t.mode()))
}

/// (s, J[s, t]) for the single s with J[s, t] ≠ 0.
fn form_partner(t: usize) -> (usize, i64) {
    match t {
        0 => (1, 1),
        1 => (0, -1),
        _ => (2, -1),
    }
}

/// μ_σ as a full index contraction of the tensors T_i against the form:
/// Σ over row indices r of Π_i T_i[r_i, s_i]·J[s_i, r_σ(i)], with the Koszul
/// sign for moving the factors into cycle order and (−1)^{p(r)} per cycle.
pub fn mu_sigma_contraction(ms: &[SuperMatrix], sigma: &PermutationInvariant) -> Result<GE> {
    require_even_square(ms, sigma)?;
    let k = ms.len();
    let (n, mode) = (ms[0].n(), ms[0].mode());
    let ts = ms.iter().map(end_to_tensor).collect::<Result<Vec<_>>>()?;
    let order: Vec<usize> = sigma.cycles.iter().flatten().map(|i| i - 1).collect();
    let mut acc = GE::zero(n, mode);
    let total = 3usize.pow(k as u32);
    for code in 0..total {
        let r: Vec<usize> = (0..k).map(|i| (code / 3usize.pow(i as u32)) % 3).collect();
        let mut term = GE::one(n, mode);
        let mut parities = Vec::with_capacity(k);
        let mut coeff = 1i64;
        for i in 0..k {
            let t = r[sigma.sigma[i] - 1];
            let (s, jv) = form_partner(t);
            coeff *= jv;
            term = term.try_mul(ts[i].get(r[i], s))?;
            parities.push(slot_parity(r[i]).add(slot_parity(s)).is_odd());
        }
        if term.is_zero() {
            continue;
        }
        // Inversions among odd factors between index order and cycle order.
        let mut swaps = 0;
        for a in 0..k {
            for b in a + 1..k {
                if parities[order[a]] && parities[order[b]] && order[a] > order[b] {
                    swaps += 1;
                }
            }
        }
        for cyc in &sigma.cycles {
            if slot_parity(r[cyc[0] - 1]).is_odd() {
                coeff = -coeff;
            }
        }
        if swaps % 2 == 1 {
            coeff = -coeff;
        }
        acc = acc.try_add(&term.scale(&Scalar::from_i64(mode, coeff)))?;
    }
    Ok(acc)
}

/// The matrix of v ⊗ φ: entries a_i b_j.
pub fn outer(v: &SuperVector, phi: &SuperVector) -> Result<SuperMatrix> {
    let rows = (0..3).map(|i| (0..3).map(|j| v.0[i].try_mul(&phi.0[j])).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    SuperMatrix::new(rows, None)
}

/// ⟨v, φ⟩ = Σ_i (−1)^{|e_i||φ_i|} a_i b_i, where φ_i is the dual basis
/// vector and |φ_i| = |e_i|.
pub fn dual_pairing(v: &SuperVector, phi: &SuperVector) -> Result<GE> {
    let mut acc = GE::zero(v.n(), v.mode());
    for i in 0..3 {
        let t = v.0[i].try_mul(&phi.0[i])?;
        // |e_i||φ_i| = |e_i|² = |e_i|.
        acc = if slot_parity(i).is_odd() { acc.try_sub(&t)? } else { acc.try_add(&t)? };
    }
    Ok(acc)
}

/// str of the word's image; the empty word gives str(I) = 1.
pub fn trace_word(w: &FreeWord, rho: &RepresentationPair) -> Result<GE> {
    supertrace(&evaluate_word(w, rho)?)
}

/// True iff every value has zero odd part.
pub fn parity_audit(values: &[GE]) -> bool {
    values.iter().all(|v| v.odd_part().is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charvar::parse_word;
    use crate::sample::Sampler;
    use crate::scalar::Mode;
    use crate::superlinalg::leibniz_det;

    const N: u8 = 8;

    fn e(i: usize) -> SuperVector {
        SuperVector::basis(i, N, Mode::Exact)
    }

    fn k(v: i64) -> GE {
        GE::from_i64(N, Mode::Exact, v)
    }

    #[test]
    fn gram_examples() {
        let g = gram_matrix(&[e(1), e(2)]).unwrap();
        assert_eq!(g.get(0, 1), &k(-1));
        assert_eq!(g.get(1, 0), &k(1));
        assert_eq!(gram_matrix(&[e(3)]).unwrap().get(0, 0), &k(-1));
    }

    #[test]
    fn four_vectors_have_vanishing_gram_determinant() {
        let mut s = Sampler::new(11, N);
        for _ in 0..5 {
            let vs: Vec<_> = (0..4).map(|_| s.even_vector()).collect();
            assert!(leibniz_det(&gram_matrix(&vs).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn matching_examples() {
        assert_eq!(matching_invariant(&[e(1), e(2)], &[(1, 2)]).unwrap(), k(-1));
        let vs = [e(1), e(1), e(1), e(1)];
        assert!(matching_invariant(&vs, &[(1, 2), (3, 4)]).unwrap().is_zero());
        assert_eq!(matching_invariant(&[e(1), e(2), e(3)], &[(1, 2)]), Err(Error::OddCount(3)));
    }

    #[test]
    fn matching_is_invariant() {
        let mut s = Sampler::new(5, N);
        let g = s.osp();
        // B is preserved on vectors with odd slots 1, 2 and an even slot 3.
        let vs: Vec<_> = (0..4).map(|_| s.homogeneous_vector(crate::grassmann::Parity::Odd)).collect();
        let moved: Vec<_> = vs.iter().map(|v| g.matrix().apply(v).unwrap()).collect();
        for m in [[(1, 2), (3, 4)], [(1, 3), (2, 4)], [(1, 4), (2, 3)]] {
            assert_eq!(matching_invariant(&vs, &m).unwrap(), matching_invariant(&moved, &m).unwrap());
        }
    }

    #[test]
    fn cycles_include_fixed_points() {
        let p = PermutationInvariant::new(vec![2, 1, 3]).unwrap();
        assert_eq!(p.cycles(), &[vec![1, 2], vec![3]]);
        assert_eq!(p.to_string(), "(1 2)(3)");
        assert!(PermutationInvariant::new(vec![1, 1]).is_err());
    }

    #[test]
    fn mu_sigma_examples() {
        let mut s = Sampler::new(3, N);
        let (a, b) = (s.even_matrix(), s.even_matrix());
        let id = PermutationInvariant::identity(2);
        let swap = PermutationInvariant::new(vec![2, 1]).unwrap();
        let ms = [a.clone(), b.clone()];
        assert_eq!(mu_sigma(&ms, &id).unwrap(), &supertrace(&a).unwrap() * &supertrace(&b).unwrap());
        assert_eq!(mu_sigma(&ms, &swap).unwrap(), supertrace(&a.try_mul(&b).unwrap()).unwrap());
        let i = SuperMatrix::identity(3, N, Mode::Exact);
        assert_eq!(mu_sigma(&[i.clone(), i], &swap).unwrap(), k(1));
    }

    #[test]
    fn contraction_matches_cycles() {
        let mut s = Sampler::new(4, N);
        let ms: Vec<_> = (0..3).map(|_| s.even_matrix()).collect();
        for sigma in PermutationInvariant::all(3) {
            assert_eq!(mu_sigma(&ms, &sigma).unwrap(), mu_sigma_contraction(&ms, &sigma).unwrap(), "{sigma}");
        }
    }

    #[test]
    fn tensor_roundtrip_and_identity() {
        let mut s = Sampler::new(6, N);
        let a = s.even_matrix();
        assert_eq!(tensor_to_end(&end_to_tensor(&a).unwrap()).unwrap(), a);
        let t = end_to_tensor(&SuperMatrix::identity(3, N, Mode::Exact)).unwrap();
        let (v, w) = (s.even_vector(), s.even_vector());
        // Contracting both slots with the form: vᵀ J T J w = vᵀ J w.
        let jt = SuperMatrix::j(N, Mode::Exact).try_mul(&t).unwrap().try_mul(&SuperMatrix::j(N, Mode::Exact)).unwrap();
        let jw = jt.apply(&w).unwrap();
        let lhs = (0..3).fold(GE::zero(N, Mode::Exact), |acc, i| &acc + &(&v.0[i] * &jw.0[i]));
        assert_eq!(lhs, pairing(&v, &w).unwrap());
    }

    #[test]
    fn tensor_equivariance() {
        let mut s = Sampler::new(8, N);
        let g = s.osp();
        let a = s.even_matrix();
        let lhs = end_to_tensor(&g.conjugate(&a).unwrap()).unwrap();
        let st = crate::superlinalg::supertranspose(g.matrix()).unwrap();
        let rhs = g.matrix().try_mul(&end_to_tensor(&a).unwrap()).unwrap().try_mul(&st).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn supertrace_of_outer_product() {
        let mut s = Sampler::new(9, N);
        for (pv, pf) in [(Parity::Even, Parity::Even), (Parity::Odd, Parity::Even), (Parity::Even, Parity::Odd), (Parity::Odd, Parity::Odd)]
        {
            let v = s.homogeneous_vector(pv);
            let phi = s.homogeneous_vector(pf);
            assert_eq!(supertrace(&outer(&v, &phi).unwrap()).unwrap(), dual_pairing(&v, &phi).unwrap());
        }
    }

    #[test]
    fn trace_word_examples() {
        let mut s = Sampler::new(10, N);
        let rho = RepresentationPair::new(s.osp(), s.osp()).unwrap();
        assert_eq!(trace_word(&parse_word("A").unwrap(), &rho).unwrap(), supertrace(rho.a().matrix()).unwrap());
        assert_eq!(trace_word(&FreeWord::default(), &rho).unwrap(), k(1));
        let g = s.osp();
        let conj = rho.conjugate(&g).unwrap();
        let w = parse_word("ABab").unwrap();
        assert_eq!(trace_word(&w, &rho).unwrap(), trace_word(&w, &conj).unwrap());
    }

    #[test]
    fn parity_audit_examples() {
        let mut s = Sampler::new(12, N);
        assert!(parity_audit(&[supertrace(s.osp().matrix()).unwrap()]));
        assert!(!parity_audit(&[GE::generator(N, 1, Mode::Exact)]));
    }
}
