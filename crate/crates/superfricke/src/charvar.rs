//! Words in the free group on A, B and their images in OSp(1|2).
//!
//! Lowercase letters are inverses: `a` = A⁻¹, `b` = B⁻¹.

use std::fmt;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::grassmann::GrassmannElement;
use crate::osp::{check_membership, compose_general, from_sl2, OspElement};
use crate::scalar::Mode;
use crate::superlinalg::SuperMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'A' => Some(Letter::A),
            'a' => Some(Letter::AInv),
            'B' => Some(Letter::B),
            'b' => Some(Letter::BInv),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::A => 'A',
            Letter::AInv => 'a',
            Letter::B => 'B',
            Letter::BInv => 'b',
        }
    }

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FreeWord(pub Vec<Letter>);

impl FreeWord {
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Cancels adjacent inverse pairs until none remain.
    pub fn reduce(&self) -> FreeWord {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord(out)
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        FreeWord(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl std::str::FromStr for FreeWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_word(s)
    }
}

/// Parses `[AaBb]*` with optional whitespace; no reduction.
pub fn parse_word(s: &str) -> Result<FreeWord> {
    let mut letters = Vec::with_capacity(s.len());
    for (position, c) in s.chars().enumerate() {
        if c.is_whitespace() {
            continue;
        }
        letters.push(Letter::from_char(c).ok_or(Error::Syntax { position, found: c })?);
    }
    Ok(FreeWord(letters))
}

/// Every freely reduced word of length at most `max_len`, shortest first.
pub fn reduced_words(max_len: usize) -> Vec<FreeWord> {
    let all = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];
    let mut out = vec![FreeWord::default()];
    let mut layer = vec![FreeWord::default()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &all {
                if w.0.last() != Some(&l.inverse()) {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(FreeWord(v));
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Images of the two free generators.
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentationPair {
    a: OspElement,
    b: OspElement,
}

impl RepresentationPair {
    pub fn new(a: OspElement, b: OspElement) -> Result<Self> {
        if a.n() != b.n() {
            return Err(Error::GeneratorMismatch(a.n(), b.n()));
        }
        if a.mode() != b.mode() {
            return Err(Error::ModeMismatch);
        }
        for (name, g) in [("A", &a), ("B", &b)] {
            let rep = check_membership(g.matrix());
            if !rep.ok {
                let names: Vec<&str> = rep.violations.iter().map(|v| v.name).collect();
                return Err(Error::Domain(format!("image of {name} is not in OSp(1|2): {}", names.join("; "))));
            }
        }
        Ok(RepresentationPair { a, b })
    }

    pub fn a(&self) -> &OspElement {
        &self.a
    }

    pub fn b(&self) -> &OspElement {
        &self.b
    }

    pub fn n(&self) -> u8 {
        self.a.n()
    }

    pub fn mode(&self) -> Mode {
        self.a.mode()
    }

    /// Simultaneous conjugation by g.
    pub fn conjugate(&self, g: &OspElement) -> Result<Self> {
        let gi = g.inverse();
        let a = g.try_mul(&self.a)?.try_mul(&gi)?;
        let b = g.try_mul(&self.b)?.try_mul(&gi)?;
        Ok(RepresentationPair { a, b })
    }

    pub fn to_float(&self) -> Self {
        RepresentationPair { a: self.a.to_float(), b: self.b.to_float() }
    }

    pub fn z2_flip(&self) -> Self {
        RepresentationPair { a: self.a.z2_flip(), b: self.b.z2_flip() }
    }

    /// Parses `{"A": ..., "B": ..., "n": optional}`; each image is a raw
    /// matrix or `{"sl2": [a,b,c,d], "odd": [γ,δ]}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Json("pair must be an object".into()))?;
        let n = match obj.get("n") {
            None => None,
            Some(x) => Some(
                x.as_u64().filter(|&k| (1..=16).contains(&k)).ok_or_else(|| Error::Json("\"n\" must be an integer in 1..=16".into()))?
                    as u8,
            ),
        };
        let get = |key: &str| obj.get(key).ok_or_else(|| Error::Json(format!("pair is missing \"{key}\"")));
        let a = image_from_json(get("A")?, n)?;
        let b = image_from_json(get("B")?, n)?;
        RepresentationPair::new(a, b)
    }
}

impl serde::Serialize for RepresentationPair {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = ser.serialize_map(Some(3))?;
        m.serialize_entry("n", &self.n())?;
        m.serialize_entry("A", &self.a)?;
        m.serialize_entry("B", &self.b)?;
        m.end()
    }
}

fn widen_to(x: GrassmannElement, n: Option<u8>) -> Result<GrassmannElement> {
    match n {
        Some(n) if n < x.n() => Err(Error::GeneratorMismatch(n, x.n())),
        Some(n) => Ok(x.widen(n)),
        None => Ok(x),
    }
}

fn elements(v: &Value, len: usize, n: Option<u8>) -> Result<Vec<GrassmannElement>> {
    let arr = v.as_array().filter(|a| a.len() == len).ok_or_else(|| Error::Json(format!("expected an array of {len} elements")))?;
    let raw = arr.iter().map(|e| GrassmannElement::from_json_value(e, Mode::Exact)).collect::<Result<Vec<_>>>()?;
    let mode = raw.iter().find(|e| !e.is_zero()).map(|e| e.mode()).unwrap_or(Mode::Exact);
    raw.into_iter().map(|e| widen_to(e.coerce_mode(mode)?, n)).collect()
}

fn image_from_json(v: &Value, n: Option<u8>) -> Result<OspElement> {
    if let Some(sl2) = v.get("sl2") {
        let s = elements(sl2, 4, n)?;
        return match v.get("odd") {
            None => from_sl2(&s[0], &s[1], &s[2], &s[3]),
            Some(odd) => {
                let o = elements(odd, 2, n)?;
                let (o0, o1) = (o[0].clone().coerce_mode(s[0].mode())?, o[1].clone().coerce_mode(s[0].mode())?);
                compose_general(&s[0], &s[1], &s[2], &s[3], &o0, &o1)
            }
        };
    }
    let m = SuperMatrix::from_json_value(v)?;
    let m = match n {
        Some(n) => m.map(|e| e.widen(n)),
        None => m,
    };
    OspElement::from_matrix(m)
}

/// Ordered product of the images; inverses use J⁻¹ g^st J.
pub fn evaluate_word(w: &FreeWord, rho: &RepresentationPair) -> Result<SuperMatrix> {
    let (ai, bi) = (rho.a.inverse(), rho.b.inverse());
    let mut acc = SuperMatrix::identity(3, rho.n(), rho.mode());
    for l in &w.0 {
        let g = match l {
            Letter::A => &rho.a,
            Letter::AInv => &ai,
            Letter::B => &rho.b,
            Letter::BInv => &bi,
        };
        acc = acc.try_mul(g.matrix())?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Sampler;

    fn pair(seed: u64) -> RepresentationPair {
        let mut s = Sampler::new(seed, 8);
        RepresentationPair::new(s.osp(), s.osp()).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_word("AB").unwrap().0, vec![Letter::A, Letter::B]);
        assert_eq!(parse_word("Aa").unwrap().0, vec![Letter::A, Letter::AInv]);
        assert_eq!(parse_word("AxB"), Err(Error::Syntax { position: 1, found: 'x' }));
        assert_eq!(parse_word(" A b ").unwrap().to_string(), "Ab");
    }

    #[test]
    fn reduction() {
        assert!(parse_word("AaBb").unwrap().reduce().is_empty());
        assert_eq!(parse_word("ABba").unwrap().reduce().to_string(), "");
        assert_eq!(parse_word("AbBBa").unwrap().reduce().to_string(), "ABa");
    }

    #[test]
    fn empty_word_is_identity() {
        let rho = pair(1);
        assert!(evaluate_word(&FreeWord::default(), &rho).unwrap().is_identity());
    }

    #[test]
    fn single_letter_and_product() {
        let rho = pair(2);
        assert_eq!(&evaluate_word(&parse_word("A").unwrap(), &rho).unwrap(), rho.a().matrix());
        let ab = evaluate_word(&parse_word("AB").unwrap(), &rho).unwrap();
        let abab = evaluate_word(&parse_word("ABAB").unwrap(), &rho).unwrap();
        assert_eq!(abab, ab.try_mul(&ab).unwrap());
    }

    #[test]
    fn commuting_diagonal_commutator() {
        let n = 8;
        let q = |p, d| GrassmannElement::scalar(n, crate::scalar::Scalar::ratio(p, d));
        let z = q(0, 1);
        let a = from_sl2(&q(2, 1), &z, &z, &q(1, 2)).unwrap();
        let b = from_sl2(&q(3, 1), &z, &z, &q(1, 3)).unwrap();
        let rho = RepresentationPair::new(a, b).unwrap();
        assert!(evaluate_word(&parse_word("ABab").unwrap(), &rho).unwrap().is_identity());
    }

    #[test]
    fn reduced_word_count() {
        // 1 + 4 + 12 + 36
        assert_eq!(reduced_words(3).len(), 53);
    }
}
