//! Supermatrices over Λ_N in the (2|1) layout: rows/columns 1 and 2 even, 3 odd.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grassmann::{GrassmannElement, Parity};
use crate::scalar::{Mode, Scalar};

/// Absolute coefficient tolerance used by every float-mode comparison.
pub const FLOAT_TOL: f64 = 1e-9;

/// Parity of row/column index `i` (0-based) in the (2|1) layout.
#[inline]
pub fn slot_parity(i: usize) -> Parity {
    if i == 2 {
        Parity::Odd
    } else {
        Parity::Even
    }
}

/// Supertranspose sign pair (s1, s2) in M^st = [[Aᵗ, s1·Cᵗ], [s2·Bᵗ, D]].
/// Frozen from `calibrate_supertranspose`; see the unit test pinning it.
pub const ST_SIGNS: (i8, i8) = (-1, 1);

#[derive(Clone, Debug, PartialEq)]
pub struct SuperMatrix {
    rows: usize,
    cols: usize,
    n: u8,
    mode: Mode,
    parity: Option<Parity>,
    entries: Vec<GrassmannElement>,
}

impl SuperMatrix {
    pub fn new(entries: Vec<Vec<GrassmannElement>>, parity: Option<Parity>) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map(|r| r.len()).unwrap_or(0);
        if rows == 0 || cols == 0 || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged or empty matrix".into()));
        }
        let flat: Vec<GrassmannElement> = entries.into_iter().flatten().collect();
        let (n, mode) = (flat[0].n(), flat[0].mode());
        for e in &flat {
            if e.n() != n {
                return Err(Error::GeneratorMismatch(n, e.n()));
            }
            if e.mode() != mode {
                return Err(Error::ModeMismatch);
            }
        }
        let m = SuperMatrix { rows, cols, n, mode, parity, entries: flat };
        if let Some(p) = parity {
            m.check_parity(p)?;
        }
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, parity: Option<Parity>, mut f: impl FnMut(usize, usize) -> GrassmannElement) -> Result<Self> {
        let entries = (0..rows).map(|i| (0..cols).map(|j| f(i, j)).collect()).collect();
        Self::new(entries, parity)
    }

    pub fn zeros(rows: usize, cols: usize, n: u8, mode: Mode, parity: Option<Parity>) -> Self {
        SuperMatrix { rows, cols, n, mode, parity, entries: vec![GrassmannElement::zero(n, mode); rows * cols] }
    }

    pub fn identity(size: usize, n: u8, mode: Mode) -> Self {
        let mut m = Self::zeros(size, size, n, mode, (size == 3).then_some(Parity::Even));
        for i in 0..size {
            m.entries[i * size + i] = GrassmannElement::one(n, mode);
        }
        m
    }

    /// Even 3×3 matrix with scalar entries.
    pub fn from_scalars(n: u8, rows: [[Scalar; 3]; 3]) -> Self {
        Self::scalar_matrix(n, rows, Parity::Even).expect("scalar matrix is not even")
    }

    /// 3×3 scalar matrix with the given declared parity.
    pub fn scalar_matrix(n: u8, rows: [[Scalar; 3]; 3], parity: Parity) -> Result<Self> {
        let entries = rows.into_iter().map(|r| r.into_iter().map(|s| GrassmannElement::scalar(n, s)).collect()).collect();
        Self::new(entries, Some(parity))
    }

    /// The form matrix J = [[0,−1,0],[1,0,0],[0,0,−1]].
    pub fn j(n: u8, mode: Mode) -> Self {
        Self::from_int(n, mode, [[0, -1, 0], [1, 0, 0], [0, 0, -1]])
    }

    /// J⁻¹ = [[0,1,0],[−1,0,0],[0,0,−1]].
    pub fn j_inv(n: u8, mode: Mode) -> Self {
        Self::from_int(n, mode, [[0, 1, 0], [-1, 0, 0], [0, 0, -1]])
    }

    pub fn from_int(n: u8, mode: Mode, rows: [[i64; 3]; 3]) -> Self {
        Self::from_scalars(n, rows.map(|r| r.map(|v| Scalar::from_i64(mode, v))))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn parity(&self) -> Option<Parity> {
        self.parity
    }

    pub fn get(&self, i: usize, j: usize) -> &GrassmannElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GrassmannElement) -> Result<()> {
        if v.n() != self.n {
            return Err(Error::GeneratorMismatch(self.n, v.n()));
        }
        if v.mode() != self.mode {
            return Err(Error::ModeMismatch);
        }
        self.entries[i * self.cols + j] = v;
        if let Some(p) = self.parity {
            if self.check_parity(p).is_err() {
                self.parity = None;
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = &GrassmannElement> {
        self.entries.iter()
    }

    pub fn row_vecs(&self) -> Vec<Vec<GrassmannElement>> {
        self.entries.chunks(self.cols).map(|r| r.to_vec()).collect()
    }

    pub fn is_square3(&self) -> bool {
        self.rows == 3 && self.cols == 3
    }

    /// Checks the block parity pattern; only meaningful for the 3×3 layout.
    pub fn check_parity(&self, p: Parity) -> Result<()> {
        if !self.is_square3() {
            return Err(Error::Parity("parity blocks need the 3×3 (2|1) layout".into()));
        }
        for i in 0..3 {
            for j in 0..3 {
                let want = p.add(slot_parity(i)).add(slot_parity(j));
                let e = self.get(i, j);
                let ok = match want {
                    Parity::Even => e.is_even(),
                    Parity::Odd => e.is_odd(),
                };
                if !ok {
                    return Err(Error::Parity(format!("entry ({},{}) is not {want:?}", i + 1, j + 1)));
                }
            }
        }
        Ok(())
    }

    /// Declared parity, or the structural one when undeclared.
    pub fn effective_parity(&self) -> Option<Parity> {
        self.parity.or_else(|| [Parity::Even, Parity::Odd].into_iter().find(|p| self.check_parity(*p).is_ok()))
    }

    pub fn with_parity(mut self, p: Option<Parity>) -> Result<Self> {
        if let Some(p) = p {
            self.check_parity(p)?;
        }
        self.parity = p;
        Ok(self)
    }

    fn same_ring(&self, other: &SuperMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GeneratorMismatch(self.n, other.n));
        }
        if self.mode != other.mode {
            return Err(Error::ModeMismatch);
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &SuperMatrix) -> Result<SuperMatrix> {
        self.same_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!("{}×{} times {}×{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = GrassmannElement::zero(self.n, self.mode);
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                entries.push(acc);
            }
        }
        let parity = match (self.parity, other.parity) {
            (Some(p), Some(q)) if self.is_square3() && other.is_square3() => Some(p.add(q)),
            _ => None,
        };
        Ok(SuperMatrix { rows: self.rows, cols: other.cols, n: self.n, mode: self.mode, parity, entries })
    }

    fn zip(&self, other: &SuperMatrix, f: impl Fn(&GrassmannElement, &GrassmannElement) -> GrassmannElement) -> Result<SuperMatrix> {
        self.same_ring(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape("entrywise operation on different shapes".into()));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect();
        let parity = if self.parity == other.parity { self.parity } else { None };
        Ok(SuperMatrix { entries, parity, ..self.clone() })
    }

    pub fn try_add(&self, other: &SuperMatrix) -> Result<SuperMatrix> {
        self.zip(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &SuperMatrix) -> Result<SuperMatrix> {
        self.zip(other, |a, b| a - b)
    }

    pub fn map(&self, f: impl Fn(&GrassmannElement) -> GrassmannElement) -> SuperMatrix {
        let entries: Vec<GrassmannElement> = self.entries.iter().map(f).collect();
        let mode = entries.first().map(|e| e.mode()).unwrap_or(self.mode);
        let n = entries.first().map(|e| e.n()).unwrap_or(self.n);
        let mut m = SuperMatrix { entries, mode, n, ..self.clone() };
        if let Some(p) = m.parity {
            if m.check_parity(p).is_err() {
                m.parity = None;
            }
        }
        m
    }

    /// Left multiplication of every entry by a ring element.
    pub fn left_scale(&self, c: &GrassmannElement) -> SuperMatrix {
        self.map(|e| c * e)
    }

    pub fn to_float(&self) -> SuperMatrix {
        self.map(|e| e.to_float())
    }

    pub fn body_matrix(&self) -> Vec<Vec<Scalar>> {
        self.entries.chunks(self.cols).map(|r| r.iter().map(|e| e.body()).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.max_abs()).fold(0.0, f64::max)
    }

    /// Exact equality, or all coefficient residuals below FLOAT_TOL in float mode.
    pub fn close_to(&self, other: &SuperMatrix) -> bool {
        if (self.rows, self.cols) != (other.rows, other.cols) || self.mode != other.mode {
            return false;
        }
        self.entries.iter().zip(&other.entries).all(|(a, b)| a.close_to(b, FLOAT_TOL))
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && self.close_to(&SuperMatrix::identity(self.rows, self.n, self.mode))
    }

    /// Plain transpose (no signs); the parity declaration is kept.
    pub fn transpose(&self) -> SuperMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        SuperMatrix { rows: self.cols, cols: self.rows, entries, ..self.clone() }
    }

    pub fn apply(&self, v: &SuperVector) -> Result<SuperVector> {
        if !self.is_square3() {
            return Err(Error::Shape("matrix-vector product needs a 3×3 matrix".into()));
        }
        let comps =
            std::array::from_fn(|i| (0..3).fold(GrassmannElement::zero(self.n, self.mode), |acc, k| &acc + &(self.get(i, k) * &v.0[k])));
        Ok(SuperVector(comps))
    }

    fn require_even3(&self) -> Result<()> {
        if !self.is_square3() {
            return Err(Error::Shape(format!("expected 3×3, got {}×{}", self.rows, self.cols)));
        }
        if self.effective_parity() != Some(Parity::Even) {
            return Err(Error::Parity("expected an even supermatrix".into()));
        }
        Ok(())
    }
}

pub fn smul(m: &SuperMatrix, p: &SuperMatrix) -> Result<SuperMatrix> {
    m.try_mul(p)
}

/// Supertranspose with an explicit sign pair; `supertranspose` uses ST_SIGNS.
pub fn supertranspose_with(m: &SuperMatrix, signs: (i8, i8)) -> Result<SuperMatrix> {
    if m.rows != m.cols {
        return Err(Error::Shape("supertranspose of a non-square matrix".into()));
    }
    m.require_even3()?;
    let sign = |s: i8, e: &GrassmannElement| if s < 0 { -e } else { e.clone() };
    let mut out = m.transpose();
    // Aᵗ and D sit in place; (i,3) of M^st comes from C = row 3, (3,j) from B = column 3.
    for k in 0..2 {
        out.entries[k * 3 + 2] = sign(signs.0, m.get(2, k));
        out.entries[2 * 3 + k] = sign(signs.1, m.get(k, 2));
    }
    out.parity = Some(Parity::Even);
    Ok(out)
}

pub fn supertranspose(m: &SuperMatrix) -> Result<SuperMatrix> {
    supertranspose_with(m, ST_SIGNS)
}

/// Picks the sign pair for which J⁻¹ g^st J reproduces the displayed inverse
/// [[d,−b,δ],[−c,a,−γ],[−β,α,f]] on a generic even matrix with distinct entries.
pub fn calibrate_supertranspose() -> Option<(i8, i8)> {
    let n = 8;
    let mode = Mode::Exact;
    let k = |v: i64| GrassmannElement::from_i64(n, mode, v);
    let t = |i: usize| GrassmannElement::generator(n, i, mode);
    // a, b, c, d, f get distinct primes; α, β, γ, δ distinct generators.
    let (a, b, c, d, f) = (k(2), k(3), k(5), k(7), k(11));
    let (al, be, ga, de) = (t(1), t(2), t(3), t(4));
    let g = SuperMatrix::new(
        vec![vec![a.clone(), b.clone(), al.clone()], vec![c.clone(), d.clone(), be.clone()], vec![ga.clone(), de.clone(), f.clone()]],
        Some(Parity::Even),
    )
    .ok()?;
    let displayed = SuperMatrix::new(vec![vec![d, -&b, de], vec![-&c, a, -&ga], vec![-&be, al, f]], Some(Parity::Even)).ok()?;
    let (j, ji) = (SuperMatrix::j(n, mode), SuperMatrix::j_inv(n, mode));
    [(1, -1), (-1, 1)]
        .into_iter()
        .find(|&s| supertranspose_with(&g, s).and_then(|st| ji.try_mul(&st)?.try_mul(&j)).map(|x| x == displayed).unwrap_or(false))
}

pub fn supertrace(m: &SuperMatrix) -> Result<GrassmannElement> {
    if !m.is_square3() {
        return Err(Error::Shape("supertrace needs a 3×3 matrix".into()));
    }
    Ok(&(m.get(0, 0) + m.get(1, 1)) - m.get(2, 2))
}

/// Ber = det₂(A − B·D⁻¹·C)·D⁻¹.
pub fn berezinian(m: &SuperMatrix) -> Result<GrassmannElement> {
    m.require_even3()?;
    let dinv = m.get(2, 2).inv()?;
    let schur = |i: usize, j: usize| m.get(i, j) - &(&(m.get(i, 2) * &dinv) * m.get(2, j));
    let det = &(&schur(0, 0) * &schur(1, 1)) - &(&schur(0, 1) * &schur(1, 0));
    Ok(&det * &dinv)
}

/// All permutations of 0..r with their signs, in lexicographic order.
pub fn permutations_with_sign(r: usize) -> Vec<(Vec<usize>, bool)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, bool)>) {
        let r = used.len();
        if prefix.len() == r {
            let inv = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).filter(|&(i, j)| prefix[i] > prefix[j]).count();
            out.push((prefix.clone(), inv % 2 == 1));
            return;
        }
        for k in 0..r {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; r], &mut out);
    out
}

/// Σ_σ sgn(σ) G_{1σ(1)}⋯G_{rσ(r)}, factors multiplied in row order.
pub fn leibniz_det(g: &SuperMatrix) -> Result<GrassmannElement> {
    if g.rows != g.cols {
        return Err(Error::Shape("determinant of a non-square matrix".into()));
    }
    let mut acc = GrassmannElement::zero(g.n, g.mode);
    for (perm, odd) in permutations_with_sign(g.rows) {
        let mut term = GrassmannElement::one(g.n, g.mode);
        for (i, &j) in perm.iter().enumerate() {
            term = &term * g.get(i, j);
            if term.is_zero() {
                break;
            }
        }
        acc = if odd { &acc - &term } else { &acc + &term };
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaRank {
    pub rank: usize,
    pub nilpotent_residual: bool,
}

/// Gaussian elimination over the local ring Λ using body-invertible pivots only.
pub fn lambda_rank(m: &SuperMatrix) -> LambdaRank {
    let float = m.mode == Mode::Float;
    let mut rows: Vec<Vec<GrassmannElement>> = m.row_vecs();
    let mut active: Vec<usize> = (0..m.rows).collect();
    let mut rank = 0;
    for c in 0..m.cols {
        let candidates = active.iter().copied().filter(|&r| {
            let b = rows[r][c].body();
            if float {
                b.abs() > FLOAT_TOL
            } else {
                !b.is_zero()
            }
        });
        let pivot =
            if float { candidates.max_by(|&x, &y| rows[x][c].body().abs().total_cmp(&rows[y][c].body().abs())) } else { candidates.min() };
        let Some(p) = pivot else { continue };
        active.retain(|&r| r != p);
        let pinv = rows[p][c].inv().expect("pivot has invertible body");
        let prow = rows[p].clone();
        for &r in &active {
            if rows[r][c].is_zero() {
                continue;
            }
            let factor = &rows[r][c] * &pinv;
            for k in c..m.cols {
                let sub = &factor * &prow[k];
                rows[r][k] = &rows[r][k] - &sub;
            }
        }
        rank += 1;
    }
    let nilpotent_residual = active.iter().any(|&r| rows[r].iter().any(|e| !e.is_negligible(FLOAT_TOL)));
    LambdaRank { rank, nilpotent_residual }
}

/// A column vector (v₁, v₂ | v₃).
#[derive(Clone, Debug, PartialEq)]
pub struct SuperVector(pub [GrassmannElement; 3]);

impl SuperVector {
    pub fn new(v1: GrassmannElement, v2: GrassmannElement, v3: GrassmannElement) -> Result<Self> {
        for e in [&v2, &v3] {
            if e.n() != v1.n() {
                return Err(Error::GeneratorMismatch(v1.n(), e.n()));
            }
            if e.mode() != v1.mode() {
                return Err(Error::ModeMismatch);
            }
        }
        Ok(SuperVector([v1, v2, v3]))
    }

    /// Standard basis vector e_i (1-based).
    pub fn basis(i: usize, n: u8, mode: Mode) -> Self {
        SuperVector(std::array::from_fn(|k| GrassmannElement::from_i64(n, mode, (k + 1 == i) as i64)))
    }

    pub fn n(&self) -> u8 {
        self.0[0].n()
    }

    pub fn mode(&self) -> Mode {
        self.0[0].mode()
    }
}

/// B(v, w) = Σ v_i J_ij w_j, factors in the written order.
pub fn pairing(v: &SuperVector, w: &SuperVector) -> Result<GrassmannElement> {
    let (n, mode) = (v.n(), v.mode());
    if w.n() != n {
        return Err(Error::GeneratorMismatch(n, w.n()));
    }
    if w.mode() != mode {
        return Err(Error::ModeMismatch);
    }
    // J has three nonzero entries: J12 = −1, J21 = 1, J33 = −1.
    let t12 = &v.0[0] * &w.0[1];
    let t21 = &v.0[1] * &w.0[0];
    let t33 = &v.0[2] * &w.0[2];
    Ok(&(&t21 - &t12) - &t33)
}

/// v^st J w for an even column vector, whose supertranspose is the row
/// (v₁, v₂, −v₃) under ST_SIGNS. This is the form OSp preserves on even
/// vectors; the plain `pairing` is preserved on vectors of the opposite parity.
pub fn st_pairing(v: &SuperVector, w: &SuperVector) -> Result<GrassmannElement> {
    let flipped = SuperVector([v.0[0].clone(), v.0[1].clone(), -&v.0[2]]);
    pairing(&flipped, w)
}

fn parity_name(p: Option<Parity>) -> &'static str {
    match p {
        Some(Parity::Even) => "even",
        Some(Parity::Odd) => "odd",
        None => "none",
    }
}

#[derive(Serialize)]
struct MatrixJsonOut<'a> {
    rows: usize,
    cols: usize,
    parity: &'static str,
    entries: Vec<&'a [GrassmannElement]>,
}

impl Serialize for SuperMatrix {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJsonOut {
            rows: self.rows,
            cols: self.cols,
            parity: parity_name(self.parity),
            entries: self.entries.chunks(self.cols).collect(),
        }
        .serialize(ser)
    }
}

impl SuperMatrix {
    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Json("matrix must be an object".into()))?;
        let parity = match obj.get("parity").and_then(|p| p.as_str()).unwrap_or("none") {
            "even" => Some(Parity::Even),
            "odd" => Some(Parity::Odd),
            "none" => None,
            other => return Err(Error::Json(format!("unknown parity {other:?}"))),
        };
        let rows = obj.get("entries").and_then(|e| e.as_array()).ok_or_else(|| Error::Json("matrix needs an \"entries\" array".into()))?;
        let mut parsed = Vec::with_capacity(rows.len());
        for r in rows {
            let r = r.as_array().ok_or_else(|| Error::Json("matrix rows must be arrays".into()))?;
            parsed.push(r.iter().map(|e| GrassmannElement::from_json_value(e, Mode::Exact)).collect::<Result<Vec<_>>>()?);
        }
        // Empty entries default to exact; align them with any float entry.
        let mode = parsed.iter().flatten().find(|e| !e.is_zero()).map(|e| e.mode()).unwrap_or(Mode::Exact);
        let parsed = parsed
            .into_iter()
            .map(|r| r.into_iter().map(|e| e.coerce_mode(mode)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let m = SuperMatrix::new(parsed, parity)?;
        for (key, want) in [("rows", m.rows), ("cols", m.cols)] {
            if let Some(x) = obj.get(key).and_then(|x| x.as_u64()) {
                if x as usize != want {
                    return Err(Error::Json(format!("{key} = {x} disagrees with entries")));
                }
            }
        }
        Ok(m)
    }
}

impl<'de> Deserialize<'de> for SuperMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(de)?;
        SuperMatrix::from_json_value(&v).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for SuperMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.entries.chunks(self.cols) {
            let cells: Vec<String> = r.iter().map(|e| e.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: u8 = 8;

    fn k(v: i64) -> GrassmannElement {
        GrassmannElement::from_i64(N, Mode::Exact, v)
    }

    fn th(i: usize) -> GrassmannElement {
        GrassmannElement::generator(N, i, Mode::Exact)
    }

    fn sl2(a: i64, b: i64, c: i64, d: i64) -> SuperMatrix {
        SuperMatrix::from_int(N, Mode::Exact, [[a, b, 0], [c, d, 0], [0, 0, 1]])
    }

    #[test]
    fn frozen_sign_pair_is_the_calibrated_one() {
        assert_eq!(calibrate_supertranspose(), Some(ST_SIGNS));
    }

    #[test]
    fn identity_and_unipotent_products() {
        let m = sl2(2, 3, 1, 2);
        assert_eq!(SuperMatrix::identity(3, N, Mode::Exact).try_mul(&m).unwrap(), m);
        assert!(sl2(1, 1, 0, 1).try_mul(&sl2(1, -1, 0, 1)).unwrap().is_identity());
    }

    #[test]
    fn odd_generator_squares_to_zero() {
        // γq₁ with q₁ = [[0,0,1],[0,0,0],[0,−1,0]]
        let g = th(1);
        let z = k(0);
        let m = SuperMatrix::new(
            vec![vec![z.clone(), z.clone(), g.clone()], vec![z.clone(), z.clone(), z.clone()], vec![z.clone(), -&g, z]],
            Some(Parity::Even),
        )
        .unwrap();
        assert!(m.try_mul(&m).unwrap().is_zero());
    }

    #[test]
    fn supertranspose_twice_flips_odd_blocks() {
        let m =
            SuperMatrix::new(vec![vec![k(1), k(2), th(1)], vec![k(3), k(4), th(2)], vec![th(3), th(4), k(5)]], Some(Parity::Even)).unwrap();
        let twice = supertranspose(&supertranspose(&m).unwrap()).unwrap();
        let expected =
            SuperMatrix::new(vec![vec![k(1), k(2), -th(1)], vec![k(3), k(4), -th(2)], vec![-th(3), -th(4), k(5)]], Some(Parity::Even))
                .unwrap();
        assert_eq!(twice, expected);
        assert!(supertranspose(&SuperMatrix::identity(3, N, Mode::Exact)).unwrap().is_identity());
    }

    #[test]
    fn supertrace_examples() {
        assert!(supertrace(&SuperMatrix::identity(3, N, Mode::Exact)).unwrap().is_one());
        let e33 = SuperMatrix::from_int(N, Mode::Exact, [[0, 0, 0], [0, 0, 0], [0, 0, 1]]);
        assert_eq!(supertrace(&e33).unwrap(), k(-1));
    }

    #[test]
    fn berezinian_examples() {
        assert!(berezinian(&SuperMatrix::identity(3, N, Mode::Exact)).unwrap().is_one());
        assert!(berezinian(&sl2(2, 3, 1, 2)).unwrap().is_one());
        let m = SuperMatrix::from_int(N, Mode::Exact, [[1, 0, 0], [0, 1, 0], [0, 0, 0]]);
        assert_eq!(berezinian(&m), Err(Error::ZeroBody));
    }

    #[test]
    fn leibniz_examples() {
        assert!(leibniz_det(&SuperMatrix::identity(4, N, Mode::Exact)).unwrap().is_one());
        let e = |i| SuperVector::basis(i, N, Mode::Exact);
        let vs = [e(1), e(2), e(3), e(1)];
        let g = SuperMatrix::from_fn(4, 4, None, |i, j| pairing(&vs[i], &vs[j]).unwrap()).unwrap();
        assert!(leibniz_det(&g).unwrap().is_zero());
        assert_eq!(permutations_with_sign(3).len(), 6);
    }

    #[test]
    fn pairing_examples() {
        let e = |i| SuperVector::basis(i, N, Mode::Exact);
        assert_eq!(pairing(&e(1), &e(2)).unwrap(), k(-1));
        assert_eq!(pairing(&e(2), &e(1)).unwrap(), k(1));
        assert_eq!(pairing(&e(3), &e(3)).unwrap(), k(-1));
    }

    #[test]
    fn pairing_invariance_by_vector_parity() {
        let mut s = crate::sample::Sampler::new(11, N);
        for _ in 0..5 {
            let g = s.osp();
            let m = g.matrix();
            let (v, w) = (s.homogeneous_vector(Parity::Odd), s.homogeneous_vector(Parity::Odd));
            assert_eq!(pairing(&m.apply(&v).unwrap(), &m.apply(&w).unwrap()).unwrap(), pairing(&v, &w).unwrap());
            let (v, w) = (s.even_vector(), s.even_vector());
            assert_eq!(st_pairing(&m.apply(&v).unwrap(), &m.apply(&w).unwrap()).unwrap(), st_pairing(&v, &w).unwrap());
        }
    }

    #[test]
    fn lambda_rank_examples() {
        assert_eq!(lambda_rank(&SuperMatrix::identity(3, N, Mode::Exact)), LambdaRank { rank: 3, nilpotent_residual: false });
        let m = SuperMatrix::new(vec![vec![th(1)]], None).unwrap();
        assert_eq!(lambda_rank(&m), LambdaRank { rank: 0, nilpotent_residual: true });
        // Rank-1 body with a soul-only second row.
        let m = SuperMatrix::new(vec![vec![k(1), k(2)], vec![k(2), &k(4) + &(&th(1) * &th(2))]], None).unwrap();
        assert_eq!(lambda_rank(&m), LambdaRank { rank: 1, nilpotent_residual: true });
    }

    #[test]
    fn parity_declaration_is_checked() {
        let bad = SuperMatrix::new(vec![vec![th(1), k(0), k(0)], vec![k(0), k(1), k(0)], vec![k(0), k(0), k(1)]], Some(Parity::Even));
        assert!(matches!(bad, Err(Error::Parity(_))));
    }

    #[test]
    fn json_roundtrip() {
        let m =
            SuperMatrix::new(vec![vec![k(1), k(2), th(1)], vec![k(3), k(4), th(2)], vec![th(3), th(4), k(5)]], Some(Parity::Even)).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with(r#"{"rows":3,"cols":3,"parity":"even","entries":[[{"n":8"#));
        let back: SuperMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
