//! The Grassmann algebra Λ_N over ℂ.
//!
//! Basis monomials θ_S are stored as bitmasks (bit i-1 is generator θ_i) and
//! kept in the canonical order: by size, then lexicographic on the ascending
//! index list. The product sign is the inversion count between the two index
//! sets.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, GaussRat, Mode, Scalar};

pub const MAX_GENERATORS: usize = 16;
pub const DEFAULT_GENERATORS: u8 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_mask(mask: u16) -> Parity {
        if mask.count_ones().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn add(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }
}

/// Sort key realising the canonical subset order.
#[inline]
pub fn canonical_key(mask: u16) -> (u32, u16) {
    (mask.count_ones(), u16::MAX - mask.reverse_bits())
}

/// Number of pairs (s, t), s in S, t in T, with s > t.
#[inline]
pub fn inversions(s: u16, t: u16) -> u32 {
    let mut a = s >> 1;
    let mut count = 0;
    while a != 0 {
        count += (a & t).count_ones();
        a >>= 1;
    }
    count
}

/// θ_S · θ_T = sign · θ_{S∪T}, or None when S and T overlap.
#[inline]
pub fn blade_product(s: u16, t: u16) -> Option<(u16, bool)> {
    if s & t != 0 {
        None
    } else {
        Some((s | t, inversions(s, t) % 2 == 1))
    }
}

pub fn mask_to_indices(mask: u16) -> Vec<usize> {
    (0..16).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect()
}

fn indices_to_mask(n: u8, idx: &[usize]) -> Result<u16> {
    let mut mask = 0u16;
    let mut last = 0;
    for &i in idx {
        if i == 0 || i > n as usize || i <= last {
            return Err(Error::Json(format!("index list {idx:?} is not strictly ascending in 1..={n}")));
        }
        mask |= 1 << (i - 1);
        last = i;
    }
    Ok(mask)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannElement {
    n: u8,
    mode: Mode,
    /// Nonzero coefficients in canonical order.
    terms: Vec<(u16, Scalar)>,
}

fn check_n(n: u8) -> Result<()> {
    if n == 0 || n as usize > MAX_GENERATORS {
        Err(Error::GeneratorCount(n as usize))
    } else {
        Ok(())
    }
}

impl GrassmannElement {
    pub fn zero(n: u8, mode: Mode) -> Self {
        debug_assert!(check_n(n).is_ok());
        GrassmannElement { n, mode, terms: Vec::new() }
    }

    pub fn one(n: u8, mode: Mode) -> Self {
        Self::scalar(n, Scalar::one(mode))
    }

    pub fn scalar(n: u8, s: Scalar) -> Self {
        let mode = s.mode();
        let terms = if s.is_zero() { vec![] } else { vec![(0, s)] };
        GrassmannElement { n, mode, terms }
    }

    pub fn from_i64(n: u8, mode: Mode, v: i64) -> Self {
        Self::scalar(n, Scalar::from_i64(mode, v))
    }

    /// The generator θ_i (1-based).
    pub fn generator(n: u8, i: usize, mode: Mode) -> Self {
        assert!(i >= 1 && i <= n as usize, "generator index {i} outside 1..={n}");
        Self::monomial(n, 1 << (i - 1), Scalar::one(mode))
    }

    pub fn monomial(n: u8, mask: u16, coeff: Scalar) -> Self {
        let mode = coeff.mode();
        let terms = if coeff.is_zero() { vec![] } else { vec![(mask, coeff)] };
        GrassmannElement { n, mode, terms }
    }

    /// Builds an element from (ascending index list, coefficient) pairs.
    pub fn from_terms<I>(n: u8, mode: Mode, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Scalar)>,
    {
        check_n(n)?;
        let mut acc: HashMap<u16, Scalar> = HashMap::new();
        for (idx, c) in terms {
            if c.mode() != mode {
                return Err(Error::ModeMismatch);
            }
            let mask = indices_to_mask(n, &idx)?;
            match acc.get_mut(&mask) {
                Some(v) => *v = &*v + &c,
                None => {
                    acc.insert(mask, c);
                }
            }
        }
        Ok(Self::from_map(n, mode, acc))
    }

    fn from_map(n: u8, mode: Mode, acc: HashMap<u16, Scalar>) -> Self {
        let mut terms: Vec<(u16, Scalar)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by_key(|(m, _)| canonical_key(*m));
        GrassmannElement { n, mode, terms }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn terms(&self) -> &[(u16, Scalar)] {
        &self.terms
    }

    pub fn coeff(&self, mask: u16) -> Scalar {
        self.terms.iter().find(|(m, _)| *m == mask).map(|(_, c)| c.clone()).unwrap_or_else(|| Scalar::zero(self.mode))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    pub fn body(&self) -> Scalar {
        self.coeff(0)
    }

    pub fn soul(&self) -> GrassmannElement {
        self.filter(|m| m != 0)
    }

    pub fn even_part(&self) -> GrassmannElement {
        self.filter(|m| m.count_ones() % 2 == 0)
    }

    pub fn odd_part(&self) -> GrassmannElement {
        self.filter(|m| m.count_ones() % 2 == 1)
    }

    fn filter(&self, keep: impl Fn(u16) -> bool) -> GrassmannElement {
        GrassmannElement { n: self.n, mode: self.mode, terms: self.terms.iter().filter(|(m, _)| keep(*m)).cloned().collect() }
    }

    /// True when the odd part vanishes (zero counts as even).
    pub fn is_even(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.count_ones() % 2 == 0)
    }

    /// True when the even part vanishes (zero counts as odd).
    pub fn is_odd(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.count_ones() % 2 == 1)
    }

    /// Parity when homogeneous and nonzero.
    pub fn parity(&self) -> Option<Parity> {
        if self.is_zero() {
            None
        } else if self.is_even() {
            Some(Parity::Even)
        } else if self.is_odd() {
            Some(Parity::Odd)
        } else {
            None
        }
    }

    fn compatible(&self, other: &GrassmannElement) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GeneratorMismatch(self.n, other.n));
        }
        if self.mode != other.mode {
            return Err(Error::ModeMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &GrassmannElement) -> Result<GrassmannElement> {
        self.compatible(other)?;
        // Both term lists are sorted by canonical key: merge.
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match canonical_key(*ma).cmp(&canonical_key(*mb)) {
                std::cmp::Ordering::Less => {
                    out.push((*ma, ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((*mb, cb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let s = ca + cb;
                    if !s.is_zero() {
                        out.push((*ma, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Ok(GrassmannElement { n: self.n, mode: self.mode, terms: out })
    }

    pub fn try_sub(&self, other: &GrassmannElement) -> Result<GrassmannElement> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &GrassmannElement) -> Result<GrassmannElement> {
        self.compatible(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(GrassmannElement::zero(self.n, self.mode));
        }
        if self.terms.len() == 1 && self.terms[0].0 == 0 {
            return Ok(other.scale(&self.terms[0].1));
        }
        if other.terms.len() == 1 && other.terms[0].0 == 0 {
            return Ok(self.scale(&other.terms[0].1));
        }
        let mut acc: HashMap<u16, Scalar> = HashMap::with_capacity(self.terms.len() * 2);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, neg)) = blade_product(*ma, *mb) {
                    let mut c = ca * cb;
                    if neg {
                        c = -c;
                    }
                    match acc.get_mut(&m) {
                        Some(v) => *v = &*v + &c,
                        None => {
                            acc.insert(m, c);
                        }
                    }
                }
            }
        }
        Ok(Self::from_map(self.n, self.mode, acc))
    }

    pub fn scale(&self, s: &Scalar) -> GrassmannElement {
        assert_eq!(s.mode(), self.mode, "scalar mode mismatch");
        if s.is_zero() {
            return GrassmannElement::zero(self.n, self.mode);
        }
        GrassmannElement { n: self.n, mode: self.mode, terms: self.terms.iter().map(|(m, c)| (*m, c * s)).collect() }
    }

    pub fn pow(&self, k: u32) -> GrassmannElement {
        let mut acc = GrassmannElement::one(self.n, self.mode);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// x⁻¹ = b⁻¹ Σ_k (−b⁻¹·soul)^k; the series stops by nilpotency.
    pub fn inv(&self) -> Result<GrassmannElement> {
        let b = self.body();
        let binv = b.inv()?;
        let step = self.soul().scale(&-&binv);
        let mut term = GrassmannElement::scalar(self.n, binv.clone());
        let mut acc = term.clone();
        for _ in 0..self.n {
            term = &term * &step;
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    pub fn to_float(&self) -> GrassmannElement {
        GrassmannElement { n: self.n, mode: Mode::Float, terms: self.terms.iter().map(|(m, c)| (*m, c.to_float())).collect() }
    }

    /// Re-embeds into Λ_m, m >= n, with the same generators.
    pub fn widen(&self, m: u8) -> GrassmannElement {
        assert!(m >= self.n);
        GrassmannElement { n: m, mode: self.mode, terms: self.terms.clone() }
    }

    /// Largest coefficient modulus; zero for the zero element.
    pub fn max_abs(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.abs()).fold(0.0, f64::max)
    }

    /// Exact equality in exact mode, coefficient residual below `tol` in float mode.
    pub fn close_to(&self, other: &GrassmannElement, tol: f64) -> bool {
        match self.mode {
            Mode::Exact => self == other,
            Mode::Float => self.try_sub(other).map(|d| d.max_abs() < tol).unwrap_or(false),
        }
    }

    /// Zero test honouring the float tolerance.
    pub fn is_negligible(&self, tol: f64) -> bool {
        match self.mode {
            Mode::Exact => self.is_zero(),
            Mode::Float => self.max_abs() < tol,
        }
    }
}

impl Add for &GrassmannElement {
    type Output = GrassmannElement;
    fn add(self, rhs: &GrassmannElement) -> GrassmannElement {
        self.try_add(rhs).expect("incompatible Grassmann operands")
    }
}

impl Sub for &GrassmannElement {
    type Output = GrassmannElement;
    fn sub(self, rhs: &GrassmannElement) -> GrassmannElement {
        self.try_sub(rhs).expect("incompatible Grassmann operands")
    }
}

impl Mul for &GrassmannElement {
    type Output = GrassmannElement;
    fn mul(self, rhs: &GrassmannElement) -> GrassmannElement {
        self.try_mul(rhs).expect("incompatible Grassmann operands")
    }
}

impl Neg for &GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        GrassmannElement { n: self.n, mode: self.mode, terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl Neg for GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        -&self
    }
}

pub fn gadd(x: &GrassmannElement, y: &GrassmannElement) -> Result<GrassmannElement> {
    x.try_add(y)
}

pub fn gmul(x: &GrassmannElement, y: &GrassmannElement) -> Result<GrassmannElement> {
    x.try_mul(y)
}

pub fn body(x: &GrassmannElement) -> Scalar {
    x.body()
}

pub fn soul(x: &GrassmannElement) -> GrassmannElement {
    x.soul()
}

pub fn ginv(x: &GrassmannElement) -> Result<GrassmannElement> {
    x.inv()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalyticFn {
    Exp,
    Sqrt,
    Reciprocal,
    Power(i64),
}

fn binom_rational(top: &BigRational, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    for j in 0..k {
        acc = acc * (top - BigRational::from_integer(j.into())) / BigRational::from_integer((j + 1).into());
    }
    acc
}

fn rational_scalar(mode: Mode, r: BigRational) -> Scalar {
    let g = Scalar::Exact(GaussRat::real(r));
    match mode {
        Mode::Exact => g,
        Mode::Float => g.to_float(),
    }
}

/// Taylor expansion of `f` around the body: Σ_k f^(k)(b)/k! · soul^k.
pub fn analytic_apply(f: AnalyticFn, x: &GrassmannElement) -> Result<GrassmannElement> {
    let (n, mode) = (x.n(), x.mode());
    let b = x.body();
    let s = x.soul();
    // Taylor coefficient c_k = f^(k)(b) / k!.
    let coeff = |k: usize| -> Result<Scalar> {
        match f {
            AnalyticFn::Exp => {
                let e = b.exp()?;
                let mut fact = BigRational::one();
                for j in 1..=k {
                    fact *= BigRational::from_integer(j.into());
                }
                Ok(&e * &rational_scalar(mode, fact.recip()))
            }
            AnalyticFn::Sqrt => {
                if b.is_zero() {
                    return Err(Error::Domain("sqrt needs a nonzero body".into()));
                }
                let r = b.sqrt()?;
                let half = BigRational::new(1.into(), 2.into());
                let c = rational_scalar(mode, binom_rational(&half, k));
                Ok(&(&r * &c) * &b.powi(-(k as i64))?)
            }
            AnalyticFn::Reciprocal => {
                if b.is_zero() {
                    return Err(Error::Domain("reciprocal needs a nonzero body".into()));
                }
                let sign = if k.is_multiple_of(2) { 1 } else { -1 };
                Ok(&Scalar::from_i64(mode, sign) * &b.powi(-(k as i64) - 1)?)
            }
            AnalyticFn::Power(p) => {
                let c = binom_rational(&BigRational::from_integer(p.into()), k);
                let e = p - k as i64;
                let bp = if b.is_zero() {
                    match e.cmp(&0) {
                        std::cmp::Ordering::Greater => Scalar::zero(mode),
                        std::cmp::Ordering::Equal => Scalar::one(mode),
                        std::cmp::Ordering::Less => return Err(Error::Domain("negative power of a zero body".into())),
                    }
                } else {
                    b.powi(e)?
                };
                Ok(&rational_scalar(mode, c) * &bp)
            }
        }
    };
    let mut acc = GrassmannElement::scalar(n, coeff(0)?);
    let mut sk = GrassmannElement::one(n, mode);
    for k in 1..=n as usize {
        sk = &sk * &s;
        if sk.is_zero() {
            break;
        }
        acc = &acc + &sk.scale(&coeff(k)?);
    }
    Ok(acc)
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *m == 0 {
                write!(f, "{c}")?;
            } else {
                let idx: Vec<String> = mask_to_indices(*m).iter().map(|i| format!("θ{i}")).collect();
                write!(f, "{c}·{}", idx.join(""))?;
            }
        }
        Ok(())
    }
}

// JSON: { "n": N, "terms": [ { "idx": [...], "re": "p/q" | number, "im": ... } ] }

#[derive(Serialize, Deserialize, Clone)]
#[serde(untagged)]
pub(crate) enum JsonNum {
    Str(String),
    Num(f64),
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    idx: Vec<usize>,
    re: JsonNum,
    im: JsonNum,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    n: u8,
    terms: Vec<TermJson>,
}

pub(crate) fn scalar_to_json(c: &Scalar) -> (JsonNum, JsonNum) {
    match c {
        Scalar::Exact(g) => (JsonNum::Str(g.re.to_string()), JsonNum::Str(g.im.to_string())),
        Scalar::Float(z) => (JsonNum::Num(z.re), JsonNum::Num(z.im)),
    }
}

pub(crate) fn scalar_from_json(re: &JsonNum, im: &JsonNum) -> Result<Scalar> {
    match (re, im) {
        (JsonNum::Str(a), JsonNum::Str(b)) => Ok(Scalar::gauss(parse_rational(a)?, parse_rational(b)?)),
        (JsonNum::Num(a), JsonNum::Num(b)) => Ok(Scalar::complex(*a, *b)),
        _ => Err(Error::Json("re and im must both be fraction strings or both numbers".into())),
    }
}

impl Serialize for GrassmannElement {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let (re, im) = scalar_to_json(c);
                TermJson { idx: mask_to_indices(*m), re, im }
            })
            .collect();
        ElementJson { n: self.n, terms }.serialize(ser)
    }
}

impl GrassmannElement {
    /// Parses the JSON form; an empty term list defaults to `default_mode`.
    pub fn from_json_value(v: &serde_json::Value, default_mode: Mode) -> Result<Self> {
        let raw: ElementJson = serde_json::from_value(v.clone()).map_err(|e| Error::Json(e.to_string()))?;
        check_n(raw.n)?;
        let mut mode = None;
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in &raw.terms {
            let c = scalar_from_json(&t.re, &t.im)?;
            if *mode.get_or_insert(c.mode()) != c.mode() {
                return Err(Error::ModeMismatch);
            }
            terms.push((t.idx.clone(), c));
        }
        Self::from_terms(raw.n, mode.unwrap_or(default_mode), terms)
    }

    /// Converts an exact zero-term element into the requested mode; used when
    /// a JSON payload carries empty entries next to float ones.
    pub fn coerce_mode(self, mode: Mode) -> Result<Self> {
        if self.mode == mode {
            Ok(self)
        } else if self.is_zero() {
            Ok(GrassmannElement::zero(self.n, mode))
        } else {
            Err(Error::ModeMismatch)
        }
    }
}

impl<'de> Deserialize<'de> for GrassmannElement {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(de)?;
        GrassmannElement::from_json_value(&v, Mode::Exact).map_err(serde::de::Error::custom)
    }
}
