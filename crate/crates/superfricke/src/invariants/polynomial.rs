//! Polynomials in graded coordinates: even variables commute, odd ones
//! anticommute and square to zero. Polarization and restitution.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::grassmann::{GrassmannElement, Parity};
use crate::scalar::{Mode, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub parity: Parity,
    /// Which vector (or matrix) copy the coordinate belongs to.
    pub block: usize,
    /// Position inside the block; copies of one coordinate share it.
    pub base: usize,
}

impl Variable {
    pub fn new(name: impl Into<String>, parity: Parity, block: usize, base: usize) -> Self {
        Variable { name: name.into(), parity, block, base }
    }
}

/// Exponent vector; the monomial is the product of variables in index order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u8>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    /// Factor list with repetitions, in variable order.
    fn factors(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize)).collect()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuperPolynomial {
    vars: Vec<Variable>,
    terms: BTreeMap<Monomial, Scalar>,
    mode: Mode,
}

impl SuperPolynomial {
    pub fn zero(vars: Vec<Variable>, mode: Mode) -> Self {
        SuperPolynomial { vars, terms: BTreeMap::new(), mode }
    }

    pub fn constant(vars: Vec<Variable>, c: Scalar) -> Self {
        let mode = c.mode();
        let mut p = SuperPolynomial::zero(vars, mode);
        let key = Monomial(vec![0; p.vars.len()]);
        p.push(key, c);
        p
    }

    pub fn var(vars: Vec<Variable>, i: usize, mode: Mode) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut p = SuperPolynomial::zero(vars, mode);
        p.push(Monomial(e), Scalar::one(mode));
        p
    }

    /// Builds from (exponents, coefficient) pairs; odd exponents above 1 vanish.
    pub fn from_terms(vars: Vec<Variable>, mode: Mode, terms: impl IntoIterator<Item = (Vec<u8>, Scalar)>) -> Result<Self> {
        let mut p = SuperPolynomial::zero(vars, mode);
        for (e, c) in terms {
            if e.len() != p.vars.len() {
                return Err(Error::Shape("exponent vector length differs from variable count".into()));
            }
            if c.mode() != mode {
                return Err(Error::ModeMismatch);
            }
            if e.iter().zip(&p.vars).any(|(&k, v)| v.parity.is_odd() && k > 1) {
                continue;
            }
            p.push(Monomial(e), c);
        }
        Ok(p)
    }

    fn push(&mut self, m: Monomial, c: Scalar) {
        let e = self.terms.entry(m).or_insert_with(|| Scalar::zero(c.mode()));
        *e = &*e + &c;
        self.terms.retain(|_, v| !v.is_zero());
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn same_vars(&self, other: &SuperPolynomial) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::Shape("polynomials over different variables".into()));
        }
        if self.mode != other.mode {
            return Err(Error::ModeMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &SuperPolynomial) -> Result<SuperPolynomial> {
        self.same_vars(other)?;
        let mut p = self.clone();
        for (m, c) in &other.terms {
            p.push(m.clone(), c.clone());
        }
        Ok(p)
    }

    pub fn scale(&self, s: &Scalar) -> SuperPolynomial {
        let mut p = SuperPolynomial::zero(self.vars.clone(), self.mode);
        for (m, c) in &self.terms {
            p.push(m.clone(), c * s);
        }
        p
    }

    /// Product of two monomials with its Koszul sign, or None if an odd variable repeats.
    fn mono_mul(&self, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
        let mut negative = false;
        let mut odd_after = 0u32;
        // Walk b's odd factors from the right; each must pass a's odd factors of larger index.
        let mut out = a.0.clone();
        for i in (0..self.vars.len()).rev() {
            if self.vars[i].parity.is_odd() {
                if b.0[i] == 1 {
                    if a.0[i] == 1 {
                        return None;
                    }
                    negative ^= odd_after % 2 == 1;
                }
                odd_after += a.0[i] as u32;
            }
            out[i] += b.0[i];
        }
        Some((Monomial(out), negative))
    }

    pub fn try_mul(&self, other: &SuperPolynomial) -> Result<SuperPolynomial> {
        self.same_vars(other)?;
        let mut p = SuperPolynomial::zero(self.vars.clone(), self.mode);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, negative)) = self.mono_mul(ma, mb) {
                    let c = ca * cb;
                    p.push(m, if negative { -c } else { c });
                }
            }
        }
        Ok(p)
    }

    /// Total degree of every term, if all agree.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| m.degree());
        let d = degs.next().unwrap_or(0);
        degs.all(|e| e == d).then_some(d)
    }

    /// Degree in the variables of one block, per term.
    pub fn block_degrees(&self, block: usize) -> Vec<u32> {
        self.terms.keys().map(|m| m.0.iter().zip(&self.vars).filter(|(_, v)| v.block == block).map(|(&e, _)| e as u32).sum()).collect()
    }

    /// Multilinear in the listed blocks: degree exactly one in each, for every term.
    pub fn is_multilinear(&self, blocks: &[usize]) -> bool {
        blocks.iter().all(|&b| self.block_degrees(b).iter().all(|&d| d == 1))
    }

    /// Replaces variable i by images[i]; products keep the factor order.
    pub fn substitute(&self, images: &[SuperPolynomial]) -> Result<SuperPolynomial> {
        if images.len() != self.vars.len() {
            return Err(Error::Shape("one image per variable is required".into()));
        }
        let target = images.first().map(|p| p.vars.clone()).unwrap_or_default();
        for im in images {
            if im.vars != target {
                return Err(Error::Shape("images over different variables".into()));
            }
        }
        let mut acc = SuperPolynomial::zero(target.clone(), self.mode);
        for (m, c) in &self.terms {
            let mut term = SuperPolynomial::constant(target.clone(), c.clone());
            for i in m.factors() {
                term = term.try_mul(&images[i])?;
            }
            acc = acc.try_add(&term)?;
        }
        Ok(acc)
    }

    /// Value at a point; odd variables take odd Grassmann values.
    pub fn evaluate(&self, point: &[GrassmannElement]) -> Result<GrassmannElement> {
        if point.len() != self.vars.len() {
            return Err(Error::Shape("one value per variable is required".into()));
        }
        let (n, mode) = point.first().map(|x| (x.n(), x.mode())).ok_or_else(|| Error::Shape("empty point".into()))?;
        let mut acc = GrassmannElement::zero(n, mode);
        for (m, c) in &self.terms {
            let mut t = GrassmannElement::scalar(n, c.clone());
            for i in m.factors() {
                t = t.try_mul(&point[i])?;
            }
            acc = acc.try_add(&t)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mono: Vec<String> =
                    m.0.iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(i, &e)| if e == 1 { self.vars[i].name.clone() } else { format!("{}^{e}", self.vars[i].name) })
                        .collect();
                if mono.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{}", mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Variables of the polarized polynomial: the block's coordinates are replaced
/// by d copies placed after the untouched variables, copy-major.
pub fn polarized_vars(vars: &[Variable], block: usize, d: usize) -> (Vec<Variable>, Vec<Vec<usize>>) {
    let mut out: Vec<Variable> = vars.iter().filter(|v| v.block != block).cloned().collect();
    let fresh = vars.iter().map(|v| v.block).max().unwrap_or(0) + 1;
    let coords: Vec<&Variable> = vars.iter().filter(|v| v.block == block).collect();
    // copy_index[c][k]: index of copy c of the k-th block coordinate.
    let mut copy_index = Vec::with_capacity(d);
    for c in 0..d {
        let mut row = Vec::with_capacity(coords.len());
        for v in &coords {
            row.push(out.len());
            out.push(Variable::new(format!("{}_{}", v.name, c + 1), v.parity, fresh + c, v.base));
        }
        copy_index.push(row);
    }
    (out, copy_index)
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(d - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, d - 1);
            out.push(q);
        }
    }
    out
}

/// Full polarization in one block: the coefficient of t₁⋯t_d in f(Σ t_c v_c).
pub fn polarize(f: &SuperPolynomial, block: usize) -> Result<SuperPolynomial> {
    let d = f.block_degrees(block).first().copied().unwrap_or(0);
    if f.block_degrees(block).iter().any(|&e| e != d) {
        return Err(Error::Precondition("polarization needs a polynomial homogeneous in the block".into()));
    }
    let d = d as usize;
    let (vars, copy_index) = polarized_vars(&f.vars, block, d);
    let block_pos: Vec<usize> = (0..f.vars.len()).filter(|&i| f.vars[i].block == block).collect();
    let mut other_pos = vec![usize::MAX; f.vars.len()];
    let mut k = 0;
    for (i, v) in f.vars.iter().enumerate() {
        if v.block != block {
            other_pos[i] = k;
            k += 1;
        }
    }
    let perms = permutations(d);
    let mut acc = SuperPolynomial::zero(vars.clone(), f.mode);
    for (m, c) in &f.terms {
        let factors = m.factors();
        for perm in &perms {
            // The j-th block factor goes to copy perm[j].
            let mut term = SuperPolynomial::constant(vars.clone(), c.clone());
            let mut j = 0;
            for &i in &factors {
                let target = if f.vars[i].block == block {
                    let kpos = block_pos.iter().position(|&b| b == i).expect("block coordinate");
                    let t = copy_index[perm[j]][kpos];
                    j += 1;
                    t
                } else {
                    other_pos[i]
                };
                term = term.try_mul(&SuperPolynomial::var(vars.clone(), target, f.mode))?;
                if term.is_zero() {
                    break;
                }
            }
            acc = acc.try_add(&term)?;
        }
    }
    Ok(acc)
}

/// Identifies the copies of each coordinate: copy variables map to the base
/// coordinate of the given block layout, other variables map to themselves.
pub fn restitute(big: &SuperPolynomial, target: &[Variable], copy_blocks: &[usize], block: usize) -> Result<SuperPolynomial> {
    if !big.is_multilinear(copy_blocks) {
        return Err(Error::Precondition("restitution needs a multilinear polynomial".into()));
    }
    let images = big
        .vars
        .iter()
        .map(|v| {
            let idx = if copy_blocks.contains(&v.block) {
                target.iter().position(|t| t.block == block && t.base == v.base && t.parity == v.parity)
            } else {
                target.iter().position(|t| t.name == v.name)
            };
            idx.map(|i| SuperPolynomial::var(target.to_vec(), i, big.mode))
                .ok_or_else(|| Error::Shape(format!("no target coordinate for {}", v.name)))
        })
        .collect::<Result<Vec<_>>>()?;
    big.substitute(&images)
}

/// Blocks holding the copies produced by `polarize(f, block)`.
pub fn copy_blocks(vars: &[Variable], d: usize) -> Vec<usize> {
    let fresh = vars.iter().map(|v| v.block).max().unwrap_or(0) + 1;
    (fresh..fresh + d).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(name: &str, base: usize) -> Variable {
        Variable::new(name, Parity::Even, 0, base)
    }

    fn od(name: &str, base: usize) -> Variable {
        Variable::new(name, Parity::Odd, 0, base)
    }

    fn q(p: i64) -> Scalar {
        Scalar::from_i64(Mode::Exact, p)
    }

    fn chain(f: &SuperPolynomial) -> SuperPolynomial {
        let d = f.homogeneous_degree().unwrap() as usize;
        let pf = polarize(f, 0).unwrap();
        restitute(&pf, f.vars(), &copy_blocks(f.vars(), d), 0).unwrap()
    }

    #[test]
    fn square_of_even_coordinate() {
        let vars = vec![ev("x", 0)];
        let f = SuperPolynomial::from_terms(vars.clone(), Mode::Exact, [(vec![2], q(1))]).unwrap();
        let pf = polarize(&f, 0).unwrap();
        assert_eq!(pf.terms().count(), 1);
        assert_eq!(pf.terms().next().unwrap().1, &q(2));
        assert_eq!(chain(&f), f.scale(&q(2)));
    }

    #[test]
    fn constant_polarizes_to_itself() {
        let vars = vec![ev("x", 0)];
        let f = SuperPolynomial::constant(vars, q(5));
        let pf = polarize(&f, 0).unwrap();
        assert_eq!(pf.terms().next().unwrap().1, &q(5));
    }

    #[test]
    fn odd_pair() {
        let vars = vec![od("t1", 0), od("t2", 1)];
        let f = SuperPolynomial::from_terms(vars, Mode::Exact, [(vec![1, 1], q(1))]).unwrap();
        let pf = polarize(&f, 0).unwrap();
        assert!(pf.is_multilinear(&copy_blocks(f.vars(), 2)));
        assert_eq!(chain(&f), f.scale(&q(2)));
    }

    #[test]
    fn odd_variables_anticommute() {
        let vars = vec![od("t1", 0), od("t2", 1)];
        let a = SuperPolynomial::var(vars.clone(), 0, Mode::Exact);
        let b = SuperPolynomial::var(vars.clone(), 1, Mode::Exact);
        assert_eq!(b.try_mul(&a).unwrap(), a.try_mul(&b).unwrap().scale(&q(-1)));
        assert!(a.try_mul(&a).unwrap().is_zero());
    }

    #[test]
    fn restitute_product_of_copies() {
        let vars = vec![ev("x", 0)];
        let (big, idx) = polarized_vars(&vars, 0, 2);
        let mut e = vec![0; big.len()];
        e[idx[0][0]] = 1;
        e[idx[1][0]] = 1;
        let f = SuperPolynomial::from_terms(big, Mode::Exact, [(e, q(1))]).unwrap();
        let r = restitute(&f, &vars, &copy_blocks(&vars, 2), 0).unwrap();
        assert_eq!(r, SuperPolynomial::from_terms(vars, Mode::Exact, [(vec![2], q(1))]).unwrap());
    }

    #[test]
    fn non_homogeneous_is_rejected() {
        let vars = vec![ev("x", 0)];
        let f = SuperPolynomial::from_terms(vars, Mode::Exact, [(vec![2], q(1)), (vec![1], q(1))]).unwrap();
        assert!(matches!(polarize(&f, 0), Err(Error::Precondition(_))));
    }
}
