//! Arithmetic modulo p = 2⁶⁴ − 2³² + 1 for the census: a prime field with a
//! square root of −1, dense Grassmann elements over it, incremental row
//! reduction and rational reconstruction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::grassmann::{blade_product, GrassmannElement};
use crate::scalar::Scalar;

pub const P: u64 = 0xFFFF_FFFF_0000_0001;
const EPSILON: u64 = 0xFFFF_FFFF;
/// 7^((p−1)/4), a square root of −1.
pub const IOTA: u64 = 281_474_976_710_656;

#[inline]
pub fn reduce128(x: u128) -> u64 {
    let lo = x as u64;
    let hi = (x >> 64) as u64;
    let (hi_hi, hi_lo) = (hi >> 32, hi & EPSILON);
    // 2⁹⁶ ≡ −1 and 2⁶⁴ ≡ 2³² − 1.
    let (mut t0, borrow) = lo.overflowing_sub(hi_hi);
    if borrow {
        t0 = t0.wrapping_sub(EPSILON);
    }
    let t1 = hi_lo * EPSILON;
    let (mut r, carry) = t0.overflowing_add(t1);
    if carry {
        r = r.wrapping_add(EPSILON);
    }
    if r >= P {
        r - P
    } else {
        r
    }
}

#[inline]
pub fn add(a: u64, b: u64) -> u64 {
    let (s, c) = a.overflowing_add(b);
    let s = if c { s.wrapping_add(EPSILON) } else { s };
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
pub fn neg(a: u64) -> u64 {
    if a == 0 {
        0
    } else {
        P - a
    }
}

#[inline]
pub fn sub(a: u64, b: u64) -> u64 {
    add(a, neg(b))
}

#[inline]
pub fn mul(a: u64, b: u64) -> u64 {
    reduce128(a as u128 * b as u128)
}

pub fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

pub fn inv(a: u64) -> Option<u64> {
    (a != 0).then(|| pow(a, P - 2))
}

fn big_to_mod(x: &BigInt) -> u64 {
    let m = x.mod_floor(&BigInt::from(P));
    m.to_u64().expect("reduced below p")
}

pub fn rational_to_mod(r: &BigRational) -> Result<u64> {
    let den = big_to_mod(r.denom());
    let di = inv(den).ok_or_else(|| Error::Domain("denominator divisible by the census prime".into()))?;
    Ok(mul(big_to_mod(r.numer()), di))
}

pub fn scalar_to_mod(s: &Scalar) -> Result<u64> {
    match s {
        Scalar::Exact(g) => Ok(add(rational_to_mod(&g.re)?, mul(IOTA, rational_to_mod(&g.im)?))),
        Scalar::Float(_) => Err(Error::ModeMismatch),
    }
}

/// Smallest-height a/b ≡ x (mod p) with |a|, b below √(p/2).
pub fn rational_reconstruct(x: u64) -> Option<BigRational> {
    let p = BigInt::from(P);
    let bound = BigInt::from(((P / 2) as f64).sqrt() as u64);
    let (mut r0, mut r1) = (p.clone(), BigInt::from(x));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        (r0, r1) = (r1, r2);
        (t0, t1) = (t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let r = BigRational::new(r1, t1);
    (rational_to_mod(&r).ok()? == x).then_some(r)
}

/// Sparse Grassmann element over the field: (mask, coefficient).
#[derive(Clone, Debug, Default)]
pub struct ModElement {
    pub terms: Vec<(u16, u64)>,
}

impl ModElement {
    pub fn from_exact(x: &GrassmannElement) -> Result<Self> {
        let mut terms = Vec::with_capacity(x.terms().len());
        for (m, c) in x.terms() {
            let v = scalar_to_mod(c)?;
            if v != 0 {
                terms.push((*m, v));
            }
        }
        Ok(ModElement { terms })
    }
}

/// Dense representation with 2^n slots indexed by mask.
#[derive(Clone, Debug)]
pub struct DenseElement {
    pub coeffs: Vec<u64>,
}

impl DenseElement {
    pub fn one(n: u8) -> Self {
        let mut coeffs = vec![0; 1 << n];
        coeffs[0] = 1;
        DenseElement { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// self · g with g sparse.
    pub fn mul_sparse(&self, g: &ModElement) -> DenseElement {
        let mut out = vec![0u64; self.coeffs.len()];
        for (s, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for &(t, b) in &g.terms {
                if let Some((m, negative)) = blade_product(s as u16, t) {
                    let v = mul(a, b);
                    let slot = &mut out[m as usize];
                    *slot = if negative { sub(*slot, v) } else { add(*slot, v) };
                }
            }
        }
        DenseElement { coeffs: out }
    }
}

/// Row-echelon form kept reduced, rows added one at a time.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    /// (pivot column, row normalized to 1 at the pivot).
    rows: Vec<(usize, Vec<u64>)>,
    pivot_of_col: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new(), pivot_of_col: vec![None; ncols] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the stored pivots; keeps it if something survives.
    pub fn insert(&mut self, mut row: Vec<u64>) -> bool {
        debug_assert_eq!(row.len(), self.ncols);
        for c in 0..self.ncols {
            if row[c] == 0 {
                continue;
            }
            if let Some(k) = self.pivot_of_col[c] {
                let f = row[c];
                let prow = &self.rows[k].1;
                for j in c..self.ncols {
                    if prow[j] != 0 {
                        row[j] = sub(row[j], mul(f, prow[j]));
                    }
                }
            }
        }
        let Some(c) = row.iter().position(|&v| v != 0) else { return false };
        let ci = inv(row[c]).expect("nonzero");
        for v in row.iter_mut() {
            *v = mul(*v, ci);
        }
        self.pivot_of_col[c] = Some(self.rows.len());
        self.rows.push((c, row));
        true
    }

    /// Back substitution to reduced row-echelon form.
    fn reduced(&self) -> Vec<(usize, Vec<u64>)> {
        let mut rows = self.rows.clone();
        rows.sort_by_key(|r| r.0);
        for i in (0..rows.len()).rev() {
            let (c, prow) = (rows[i].0, rows[i].1.clone());
            for row in rows.iter_mut().take(i) {
                let f = row.1[c];
                if f != 0 {
                    for j in c..self.ncols {
                        if prow[j] != 0 {
                            row.1[j] = sub(row.1[j], mul(f, prow[j]));
                        }
                    }
                }
            }
        }
        rows
    }

    /// One basis vector per free column: 1 there, minus the pivot entries above it.
    pub fn kernel_basis(&self) -> Vec<(usize, Vec<u64>)> {
        let rows = self.reduced();
        let free: Vec<usize> = (0..self.ncols).filter(|&c| self.pivot_of_col[c].is_none()).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u64; self.ncols];
                v[f] = 1;
                for (c, r) in &rows {
                    v[*c] = neg(r[f]);
                }
                (f, v)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn iota_squares_to_minus_one() {
        assert_eq!(mul(IOTA, IOTA), P - 1);
        assert_eq!(pow(7, (P - 1) / 4), IOTA);
    }

    #[test]
    fn reconstruction_roundtrip() {
        for (a, b) in [(3, 7), (-22, 5), (0, 1), (1, 1), (-1, 36)] {
            let r = BigRational::new(a.into(), b.into());
            assert_eq!(rational_reconstruct(rational_to_mod(&r).unwrap()), Some(r));
        }
    }

    #[test]
    fn kernel_of_small_matrix() {
        // Columns (1, x, x²) at points 1, 2: kernel spanned by x² − 3x + 2.
        let mut e = Echelon::new(3);
        e.insert(vec![1, 1, 1]);
        e.insert(vec![1, 2, 4]);
        assert!(!e.insert(vec![2, 3, 5]));
        let k = e.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], (2, vec![2, neg(3), 1]));
    }

    proptest! {
        #[test]
        fn fast_reduction_matches_u128(a in any::<u64>(), b in any::<u64>()) {
            let (a, b) = (a % P, b % P);
            prop_assert_eq!(mul(a, b), ((a as u128 * b as u128) % P as u128) as u64);
            prop_assert_eq!(add(a, b), ((a as u128 + b as u128) % P as u128) as u64);
        }

        #[test]
        fn reduction_of_any_u128(x in any::<u128>()) {
            prop_assert_eq!(reduce128(x), (x % P as u128) as u64);
        }
    }
}
