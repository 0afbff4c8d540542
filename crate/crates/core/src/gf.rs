//! Arithmetic over a small prime field GF(p) and dense d×d matrices over it.
//!
//! Everything here is value-typed and `Copy`: a matrix is a fixed
//! `MAX_D × MAX_D` byte array plus its [`FieldSpec`], and only the leading
//! `d × d` block is meaningful. Entries are always kept reduced in `[0, p)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_D: usize = 6;
/// Largest supported prime.
pub const MAX_P: u32 = 13;

/// The ambient space GF(p)^d.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldSpec {
    p: u8,
    d: u8,
}

impl FieldSpec {
    pub fn new(p: u32, d: usize) -> Result<Self> {
        let err = |reason| Err(Error::InvalidFieldSpec { p, d, reason });
        if !(2..=MAX_P).contains(&p) || !is_prime(p as u64) {
            return err("p must be a prime not exceeding 13");
        }
        if !(2..=MAX_D).contains(&d) {
            return err("d must lie in 2..=6");
        }
        if (p as u64).checked_pow((d * (d - 1)) as u32).is_none() {
            return err("p^(d(d-1)) does not fit in 64 bits");
        }
        Ok(FieldSpec {
            p: p as u8,
            d: d as u8,
        })
    }

    #[inline]
    pub fn p(self) -> u8 {
        self.p
    }

    #[inline]
    pub fn d(self) -> usize {
        self.d as usize
    }

    /// Number of elements p^d of the ambient space.
    pub fn order(self) -> u64 {
        (self.p as u64).pow(self.d as u32)
    }

    /// Exclusive upper bound p^(d(d-1)) of matrix code values.
    pub fn code_bound(self) -> u64 {
        (self.p as u64).pow((self.d() * (self.d() - 1)) as u32)
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.p as u16) as u8
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(self, a: u8) -> Option<u8> {
        if a == 0 {
            return None;
        }
        (1..self.p).find(|&b| self.mul(a, b) == 1)
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u8 {
        v.rem_euclid(self.p as i64) as u8
    }

    /// Every element of GF(p)^d in lexicographic order (see [`VectorGF::index`]).
    pub fn vectors(self) -> impl Iterator<Item = VectorGF> {
        (0..self.order()).map(move |i| VectorGF::from_index(self, i))
    }

    /// Every nonzero element of GF(p)^d in lexicographic order.
    pub fn nonzero_vectors(self) -> impl Iterator<Item = VectorGF> {
        (1..self.order()).map(move |i| VectorGF::from_index(self, i))
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

/// Distinct prime factors of `n`, ascending, by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            out.push(k);
            while n.is_multiple_of(k) {
                n /= k;
            }
        }
        k += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A column vector of GF(p)^d.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VectorGF {
    spec: FieldSpec,
    coords: [u8; MAX_D],
}

impl VectorGF {
    pub fn zero(spec: FieldSpec) -> Self {
        VectorGF {
            spec,
            coords: [0; MAX_D],
        }
    }

    /// The standard basis vector with a one at 0-based position `i`.
    pub fn unit(spec: FieldSpec, i: usize) -> Self {
        let mut v = Self::zero(spec);
        v.coords[i] = 1;
        v
    }

    /// Builds a vector from `d` coordinates, reducing each mod p.
    pub fn from_slice(spec: FieldSpec, coords: &[u8]) -> Result<Self> {
        if coords.len() != spec.d() {
            return Err(Error::WrongMatrixCount {
                expected: spec.d(),
                found: coords.len(),
            });
        }
        let mut v = Self::zero(spec);
        for (dst, &c) in v.coords.iter_mut().zip(coords) {
            *dst = c % spec.p;
        }
        Ok(v)
    }

    /// Inverse of [`VectorGF::index`].
    pub fn from_index(spec: FieldSpec, mut index: u64) -> Self {
        let mut v = Self::zero(spec);
        let p = spec.p as u64;
        for r in (0..spec.d()).rev() {
            v.coords[r] = (index % p) as u8;
            index /= p;
        }
        v
    }

    /// Position in lexicographic order: the base-p number whose most
    /// significant digit is the first coordinate.
    pub fn index(&self) -> u64 {
        let p = self.spec.p as u64;
        self.coords().iter().fold(0, |acc, &c| acc * p + c as u64)
    }

    #[inline]
    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    #[inline]
    pub fn coords(&self) -> &[u8] {
        &self.coords[..self.spec.d()]
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        self.coords[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: u8) {
        self.coords[i] = value % self.spec.p;
    }

    pub fn is_zero(&self) -> bool {
        self.coords().iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &VectorGF) -> VectorGF {
        let mut out = *self;
        for i in 0..self.spec.d() {
            out.coords[i] = self.spec.add(self.coords[i], other.coords[i]);
        }
        out
    }

    pub fn sub(&self, other: &VectorGF) -> VectorGF {
        let mut out = *self;
        for i in 0..self.spec.d() {
            out.coords[i] = self.spec.sub(self.coords[i], other.coords[i]);
        }
        out
    }

    pub fn scale(&self, s: u8) -> VectorGF {
        let mut out = *self;
        for i in 0..self.spec.d() {
            out.coords[i] = self.spec.mul(self.coords[i], s);
        }
        out
    }
}

impl fmt::Debug for VectorGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

/// Rank of a list of vectors over GF(p).
pub fn rank_of_vectors(spec: FieldSpec, vectors: &[VectorGF]) -> usize {
    let mut rows: Vec<[u8; MAX_D]> = vectors.iter().map(|v| v.coords).collect();
    let d = spec.d();
    let mut rank = 0;
    for col in 0..d {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = spec.inv(rows[rank][col]).expect("pivot is nonzero");
        for c in col..d {
            rows[rank][c] = spec.mul(rows[rank][c], inv);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let factor = rows[r][col];
                for c in col..d {
                    let t = spec.mul(factor, rows[rank][c]);
                    rows[r][c] = spec.sub(rows[r][c], t);
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// A dense d×d matrix over GF(p), stored row-major.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatrixGF {
    spec: FieldSpec,
    rows: [[u8; MAX_D]; MAX_D],
}

impl MatrixGF {
    pub fn zero(spec: FieldSpec) -> Self {
        MatrixGF {
            spec,
            rows: [[0; MAX_D]; MAX_D],
        }
    }

    pub fn identity(spec: FieldSpec) -> Self {
        let mut m = Self::zero(spec);
        for i in 0..spec.d() {
            m.rows[i][i] = 1;
        }
        m
    }

    /// Builds a matrix from `d` rows of `d` entries, reducing each mod p.
    pub fn from_rows(spec: FieldSpec, rows: &[&[u8]]) -> Result<Self> {
        let d = spec.d();
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(Error::WrongMatrixCount {
                expected: d,
                found: rows.len(),
            });
        }
        let mut m = Self::zero(spec);
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                m.rows[r][c] = v % spec.p;
            }
        }
        Ok(m)
    }

    pub fn from_columns(spec: FieldSpec, cols: &[VectorGF]) -> Self {
        debug_assert_eq!(cols.len(), spec.d());
        let mut m = Self::zero(spec);
        for (c, col) in cols.iter().enumerate() {
            m.set_column(c, col);
        }
        m
    }

    #[inline]
    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    /// Entry at 0-based row `r`, column `c`.
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.rows[r][c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: u8) {
        self.rows[r][c] = value % self.spec.p;
    }

    pub fn column(&self, c: usize) -> VectorGF {
        let mut v = VectorGF::zero(self.spec);
        for r in 0..self.spec.d() {
            v.coords[r] = self.rows[r][c];
        }
        v
    }

    pub fn set_column(&mut self, c: usize, v: &VectorGF) {
        for r in 0..self.spec.d() {
            self.rows[r][c] = v.coords[r];
        }
    }

    pub fn columns(&self) -> Vec<VectorGF> {
        (0..self.spec.d()).map(|c| self.column(c)).collect()
    }

    pub fn add(&self, other: &MatrixGF) -> MatrixGF {
        let spec = self.spec;
        let mut out = *self;
        for r in 0..spec.d() {
            for c in 0..spec.d() {
                out.rows[r][c] = spec.add(self.rows[r][c], other.rows[r][c]);
            }
        }
        out
    }

    pub fn sub(&self, other: &MatrixGF) -> MatrixGF {
        self.add(&other.scale(self.spec.p - 1))
    }

    pub fn scale(&self, s: u8) -> MatrixGF {
        let spec = self.spec;
        let mut out = *self;
        for r in 0..spec.d() {
            for c in 0..spec.d() {
                out.rows[r][c] = spec.mul(self.rows[r][c], s);
            }
        }
        out
    }

    /// `self + s·other`.
    #[inline]
    pub fn add_scaled(&mut self, other: &MatrixGF, s: u8) {
        if s == 0 {
            return;
        }
        let spec = self.spec;
        let p = spec.p as u16;
        for r in 0..spec.d() {
            for c in 0..spec.d() {
                self.rows[r][c] =
                    ((self.rows[r][c] as u16 + s as u16 * other.rows[r][c] as u16) % p) as u8;
            }
        }
    }

    pub fn mul(&self, other: &MatrixGF) -> MatrixGF {
        let d = self.spec.d();
        let p = self.spec.p as u32;
        let mut out = Self::zero(self.spec);
        for r in 0..d {
            for c in 0..d {
                let mut acc = 0u32;
                for k in 0..d {
                    acc += self.rows[r][k] as u32 * other.rows[k][c] as u32;
                }
                out.rows[r][c] = (acc % p) as u8;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &VectorGF) -> VectorGF {
        let d = self.spec.d();
        let p = self.spec.p as u32;
        let mut out = VectorGF::zero(self.spec);
        for r in 0..d {
            let mut acc = 0u32;
            for k in 0..d {
                acc += self.rows[r][k] as u32 * v.coords[k] as u32;
            }
            out.coords[r] = (acc % p) as u8;
        }
        out
    }

    pub fn transpose(&self) -> MatrixGF {
        let mut out = Self::zero(self.spec);
        for r in 0..self.spec.d() {
            for c in 0..self.spec.d() {
                out.rows[c][r] = self.rows[r][c];
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.rank_truncated(self.spec.d())
    }

    /// Rank of the d×k matrix formed by the first `k` columns.
    pub fn rank_truncated(&self, k: usize) -> usize {
        let cols: Vec<VectorGF> = (0..k).map(|c| self.column(c)).collect();
        rank_of_vectors(self.spec, &cols)
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.spec.d()
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<MatrixGF> {
        let spec = self.spec;
        let d = spec.d();
        let mut a = self.rows;
        let mut inv = Self::identity(spec).rows;
        for col in 0..d {
            let pivot = (col..d)
                .find(|&r| a[r][col] != 0)
                .ok_or(Error::SingularMatrix)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let s = spec.inv(a[col][col]).expect("pivot is nonzero");
            for c in 0..d {
                a[col][c] = spec.mul(a[col][c], s);
                inv[col][c] = spec.mul(inv[col][c], s);
            }
            for r in 0..d {
                if r != col && a[r][col] != 0 {
                    let f = a[r][col];
                    for c in 0..d {
                        a[r][c] = spec.sub(a[r][c], spec.mul(f, a[col][c]));
                        inv[r][c] = spec.sub(inv[r][c], spec.mul(f, inv[col][c]));
                    }
                }
            }
        }
        Ok(MatrixGF { spec, rows: inv })
    }

    /// det(xI − M), by Berkowitz's division-free recurrence.
    pub fn char_poly(&self) -> PolyGF {
        let d = self.spec.d();
        let p = self.spec.p as u32;
        let m = |r: usize, c: usize| self.rows[r][c] as u32;
        let neg = |x: u32| (p - x % p) % p;

        // v holds the coefficients of the trailing principal submatrix's
        // characteristic polynomial, highest degree first.
        let mut v = [0u32; MAX_D + 1];
        v[0] = 1;
        v[1] = neg(m(d - 1, d - 1));
        for s in 2..=d {
            let top = d - s;
            let mut diags = [0u32; MAX_D + 1];
            diags[0] = 1;
            diags[1] = neg(m(top, top));
            // w = A^k C, starting with C = column below the corner.
            let mut w = [0u32; MAX_D];
            for i in 0..s - 1 {
                w[i] = m(top + 1 + i, top);
            }
            for k in 0..s - 1 {
                let rc: u32 = (0..s - 1).map(|j| m(top, top + 1 + j) * w[j]).sum::<u32>() % p;
                diags[k + 2] = neg(rc);
                if k + 1 < s - 1 {
                    let mut next = [0u32; MAX_D];
                    for (i, slot) in next.iter_mut().enumerate().take(s - 1) {
                        *slot = (0..s - 1)
                            .map(|j| m(top + 1 + i, top + 1 + j) * w[j])
                            .sum::<u32>()
                            % p;
                    }
                    w = next;
                }
            }
            let mut nv = [0u32; MAX_D + 1];
            for (i, slot) in nv.iter_mut().enumerate().take(s + 1) {
                let mut acc = 0u32;
                for j in 0..s.min(i + 1) {
                    acc += diags[i - j] * v[j];
                }
                *slot = acc % p;
            }
            v = nv;
        }
        let mut coeffs = [0u8; MAX_D + 1];
        for k in 0..=d {
            coeffs[k] = v[d - k] as u8;
        }
        PolyGF {
            spec: self.spec,
            coeffs,
        }
    }

    /// Code value of columns 2..d, ignoring the first column.
    pub fn code_value(&self) -> u64 {
        let d = self.spec.d();
        let p = self.spec.p as u64;
        let mut value = 0u64;
        for c in 1..d {
            for r in 0..d {
                value = value * p + self.rows[r][c] as u64;
            }
        }
        value
    }

    /// Integer encoding of a matrix whose first column is a standard basis
    /// vector. Entry (row r, column c), 1-based with c ≥ 2, is the base-p
    /// digit of weight p^((d − c)·d + (d − r)).
    pub fn encode(&self) -> Result<MatrixCode> {
        let first = self.column(0);
        let ones: Vec<usize> = (0..self.spec.d()).filter(|&i| first.get(i) != 0).collect();
        match ones.as_slice() {
            [i] if first.get(*i) == 1 => Ok(MatrixCode {
                first_col_index: i + 1,
                value: self.code_value(),
            }),
            _ => Err(Error::NotStandardColumn),
        }
    }

    pub fn decode(spec: FieldSpec, code: MatrixCode) -> Result<MatrixGF> {
        let d = spec.d();
        if code.value >= spec.code_bound() {
            return Err(Error::CodeOutOfRange { value: code.value });
        }
        if !(1..=d).contains(&code.first_col_index) {
            return Err(Error::NotStandardColumn);
        }
        let p = spec.p as u64;
        let mut m = Self::zero(spec);
        m.rows[code.first_col_index - 1][0] = 1;
        let mut v = code.value;
        for c in (1..d).rev() {
            for r in (0..d).rev() {
                m.rows[r][c] = (v % p) as u8;
                v /= p;
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for MatrixGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.spec.d();
        let rows: Vec<&[u8]> = (0..d).map(|r| &self.rows[r][..d]).collect();
        write!(f, "{rows:?}")
    }
}

impl fmt::Display for MatrixGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.spec.d();
        for r in 0..d {
            let row: Vec<String> = (0..d).map(|c| self.rows[r][c].to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Decimal matrix encoding together with the position of the one in the
/// (unstored) first column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixCode {
    /// 1-based index i such that the first column is e_i.
    pub first_col_index: usize,
    pub value: u64,
}

/// A monic polynomial of degree d over GF(p); `coeffs[k]` multiplies x^k.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PolyGF {
    spec: FieldSpec,
    coeffs: [u8; MAX_D + 1],
}

impl PolyGF {
    /// Accepts either all `d + 1` coefficients (leading one included) or the
    /// `d` lower coefficients with the leading one implied.
    pub fn from_coeffs(spec: FieldSpec, coeffs: &[u8]) -> Result<Self> {
        let d = spec.d();
        let mut out = [0u8; MAX_D + 1];
        match coeffs.len() {
            n if n == d + 1 && coeffs[d] % spec.p == 1 => {}
            n if n == d => {}
            _ => {
                return Err(Error::Parse(format!(
                    "expected a monic polynomial of degree {d}"
                )))
            }
        }
        for (k, &c) in coeffs.iter().take(d).enumerate() {
            out[k] = c % spec.p;
        }
        out[d] = 1;
        Ok(PolyGF { spec, coeffs: out })
    }

    /// The polynomial whose lower coefficients are the base-p digits of
    /// `index` (coeffs[k] is digit k). Ascending index is lexicographic order
    /// on (coeffs[d−1], …, coeffs[0]).
    pub fn from_index(spec: FieldSpec, mut index: u64) -> Self {
        let mut coeffs = [0u8; MAX_D + 1];
        for c in coeffs.iter_mut().take(spec.d()) {
            *c = (index % spec.p as u64) as u8;
            index /= spec.p as u64;
        }
        coeffs[spec.d()] = 1;
        PolyGF { spec, coeffs }
    }

    pub fn index(&self) -> u64 {
        let p = self.spec.p as u64;
        self.coeffs[..self.spec.d()]
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * p + c as u64)
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs[..=self.spec.d()]
    }

    /// Companion matrix: column j is e_(j+1) for j < d and the last column
    /// holds the negated lower coefficients.
    pub fn companion(&self) -> MatrixGF {
        let spec = self.spec;
        let d = spec.d();
        let mut m = MatrixGF::zero(spec);
        for j in 0..d - 1 {
            m.rows[j + 1][j] = 1;
        }
        for r in 0..d {
            m.rows[r][d - 1] = spec.neg(self.coeffs[r]);
        }
        m
    }

    /// True iff the polynomial is irreducible and x generates the
    /// multiplicative group of GF(p)[x]/(f).
    pub fn is_primitive(&self) -> bool {
        let spec = self.spec;
        let d = spec.d();
        if self.coeffs[0] == 0 {
            return false;
        }
        let f: Vec<u8> = self.coeffs().to_vec();
        let group = spec.order() - 1;
        let x = vec![0u8, 1];
        if poly::powmod(spec, &x, group, &f) != [1] {
            return false;
        }
        if prime_factors(group)
            .into_iter()
            .any(|r| poly::powmod(spec, &x, group / r, &f) == [1])
        {
            return false;
        }
        // Rabin's test: gcd(x^(p^(d/r)) − x, f) = 1 for every prime r | d.
        prime_factors(d as u64).into_iter().all(|r| {
            let e = (spec.p as u64).pow((d as u64 / r) as u32);
            let t = poly::powmod(spec, &x, e, &f);
            let t = poly::sub(spec, &t, &x);
            poly::gcd(spec, &t, &f).len() == 1
        })
    }
}

impl fmt::Debug for PolyGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PolyGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for k in (0..=self.spec.d()).rev() {
            let c = self.coeffs[k];
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && k > 0 {
                String::new()
            } else {
                c.to_string()
            };
            terms.push(match k {
                0 => coef,
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{k}"),
            });
        }
        write!(f, "{}", terms.join(" + "))
    }
}

/// All monic primitive polynomials of degree d, ordered lexicographically
/// from the x^(d−1) coefficient down.
pub fn primitive_polys(spec: FieldSpec) -> Vec<PolyGF> {
    (0..spec.order())
        .map(|i| PolyGF::from_index(spec, i))
        .filter(PolyGF::is_primitive)
        .collect()
}

/// Dense polynomials as little-endian coefficient vectors without trailing
/// zeros. The zero polynomial is the empty vector.
mod poly {
    use super::FieldSpec;

    fn trim(mut a: Vec<u8>) -> Vec<u8> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn sub(spec: FieldSpec, a: &[u8], b: &[u8]) -> Vec<u8> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| spec.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect();
        trim(out)
    }

    /// Remainder of `a` modulo nonzero `m`.
    pub fn rem(spec: FieldSpec, a: &[u8], m: &[u8]) -> Vec<u8> {
        let mut a = trim(a.to_vec());
        let lead_inv = spec
            .inv(*m.last().expect("modulus is nonzero"))
            .expect("nonzero");
        while a.len() >= m.len() {
            let shift = a.len() - m.len();
            let factor = spec.mul(*a.last().unwrap(), lead_inv);
            for (i, &c) in m.iter().enumerate() {
                a[shift + i] = spec.sub(a[shift + i], spec.mul(factor, c));
            }
            a = trim(a);
        }
        a
    }

    pub fn mulmod(spec: FieldSpec, a: &[u8], b: &[u8], m: &[u8]) -> Vec<u8> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u8; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = spec.add(out[i + j], spec.mul(x, y));
            }
        }
        rem(spec, &out, m)
    }

    pub fn powmod(spec: FieldSpec, base: &[u8], mut e: u64, m: &[u8]) -> Vec<u8> {
        let mut result = rem(spec, &[1], m);
        let mut b = rem(spec, base, m);
        while e > 0 {
            if e & 1 == 1 {
                result = mulmod(spec, &result, &b, m);
            }
            b = mulmod(spec, &b, &b, m);
            e >>= 1;
        }
        result
    }

    /// Monic gcd.
    pub fn gcd(spec: FieldSpec, a: &[u8], b: &[u8]) -> Vec<u8> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(spec, &a, &b);
            a = b;
            b = r;
        }
        if let Some(&lead) = a.last() {
            let inv = spec.inv(lead).unwrap();
            a.iter_mut().for_each(|c| *c = spec.mul(*c, inv));
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf3(d: usize) -> FieldSpec {
        FieldSpec::new(3, d).unwrap()
    }

    /// det(xI − M) by Leibniz expansion with polynomial entries.
    fn leibniz_char_poly(m: &MatrixGF) -> Vec<u8> {
        let spec = m.spec();
        let d = spec.d();
        let mut perm: Vec<usize> = (0..d).collect();
        let mut total = vec![0u8; d + 1];
        loop {
            let inversions = (0..d)
                .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            let mut prod = vec![1u8];
            for (r, &c) in perm.iter().enumerate() {
                let entry: Vec<u8> = if r == c {
                    vec![spec.neg(m.get(r, c)), 1]
                } else {
                    vec![spec.neg(m.get(r, c))]
                };
                let mut next = vec![0u8; prod.len() + entry.len() - 1];
                for (i, &a) in prod.iter().enumerate() {
                    for (j, &b) in entry.iter().enumerate() {
                        next[i + j] = spec.add(next[i + j], spec.mul(a, b));
                    }
                }
                prod = next;
            }
            for (k, &c) in prod.iter().enumerate() {
                let c = if inversions % 2 == 1 { spec.neg(c) } else { c };
                total[k] = spec.add(total[k], c);
            }
            // next permutation
            let Some(i) = (0..d.saturating_sub(1))
                .rev()
                .find(|&i| perm[i] < perm[i + 1])
            else {
                break;
            };
            let j = (i + 1..d).rev().find(|&j| perm[j] > perm[i]).unwrap();
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
        total
    }

    /// Multiplicative order of x modulo f by repeated multiplication.
    fn brute_order_of_x(f: &PolyGF) -> Option<u64> {
        let spec = f.spec();
        let fv = f.coeffs().to_vec();
        let mut cur = vec![0u8, 1];
        for k in 1..=spec.order() {
            if poly::rem(spec, &cur, &fv) == [1] {
                return Some(k);
            }
            cur = poly::mulmod(spec, &cur, &[0, 1], &fv);
        }
        None
    }

    fn has_nontrivial_factor(f: &PolyGF) -> bool {
        // any monic g with 1 ≤ deg g ≤ d/2 dividing f
        let spec = f.spec();
        let fv = f.coeffs().to_vec();
        let p = spec.p() as u64;
        (1..=spec.d() / 2).any(|deg| {
            (0..p.pow(deg as u32)).any(|i| {
                let mut g: Vec<u8> = (0..deg)
                    .map(|k| ((i / p.pow(k as u32)) % p) as u8)
                    .collect();
                g.push(1);
                poly::rem(spec, &fv, &g).is_empty()
            })
        })
    }

    fn euler_phi(n: u64) -> u64 {
        prime_factors(n).iter().fold(n, |acc, &q| acc / q * (q - 1))
    }

    #[test]
    fn field_spec_bounds() {
        assert!(FieldSpec::new(3, 4).is_ok());
        assert!(FieldSpec::new(4, 3).is_err());
        assert!(FieldSpec::new(3, 1).is_err());
        assert!(FieldSpec::new(17, 2).is_err());
        // 13^30 overflows u64
        assert!(FieldSpec::new(13, 6).is_err());
        assert!(FieldSpec::new(2, 6).is_ok());
    }

    #[test]
    fn rank_examples() {
        let s = gf3(4);
        assert_eq!(MatrixGF::identity(s).rank(), 4);
        assert_eq!(MatrixGF::zero(s).rank(), 0);
        let e1 = VectorGF::unit(s, 0);
        assert_eq!(rank_of_vectors(s, &[e1, e1.scale(2)]), 1);
        let mut m = MatrixGF::zero(s);
        m.set_column(0, &e1);
        m.set_column(1, &e1.scale(2));
        assert_eq!(m.rank_truncated(2), 1);
    }

    #[test]
    fn rank_matches_brute_force_small() {
        for (p, d) in [(2, 2), (3, 2), (2, 3)] {
            let s = FieldSpec::new(p, d).unwrap();
            let n = (p as u64).pow((d * d) as u32);
            let step = if n > 2000 { n / 2000 } else { 1 };
            for code in (0..n).step_by(step as usize) {
                let mut m = MatrixGF::zero(s);
                let mut v = code;
                for r in 0..d {
                    for c in 0..d {
                        m.set(r, c, (v % p as u64) as u8);
                        v /= p as u64;
                    }
                }
                let cols = m.columns();
                // full rank iff no nonzero combination of columns vanishes
                let dependent = s.nonzero_vectors().any(|lam| {
                    let sum = cols
                        .iter()
                        .enumerate()
                        .fold(VectorGF::zero(s), |acc, (i, c)| {
                            acc.add(&c.scale(lam.get(i)))
                        });
                    sum.is_zero()
                });
                assert_eq!(m.rank() == d, !dependent, "{m:?}");
                assert_eq!(m.is_invertible(), m.inverse().is_ok());
            }
        }
    }

    #[test]
    fn invertibility_examples() {
        let s = gf3(4);
        assert!(MatrixGF::identity(s).is_invertible());
        let m = MatrixGF::from_rows(
            s,
            &[&[1, 2, 0, 1], &[1, 2, 0, 1], &[0, 0, 1, 0], &[2, 0, 0, 1]],
        )
        .unwrap();
        assert!(!m.is_invertible());
        assert_eq!(m.inverse(), Err(Error::SingularMatrix));
        let c = PolyGF::from_coeffs(s, &[2, 1, 0, 0, 1])
            .unwrap()
            .companion();
        assert!(c.is_invertible());
        assert_eq!(c.rank(), 4);
    }

    #[test]
    fn inverse_and_products() {
        let s1 = FieldSpec::new(3, 2).unwrap();
        let m = MatrixGF::from_rows(s1, &[&[2, 0], &[0, 2]]).unwrap();
        assert_eq!(m.inverse().unwrap(), m);
        let s = gf3(4);
        let c = PolyGF::from_coeffs(s, &[2, 1, 0, 0, 1])
            .unwrap()
            .companion();
        let id = MatrixGF::identity(s);
        assert_eq!(c.mul(&id), c);
        assert_eq!(c.mul(&c.inverse().unwrap()), id);
        assert_eq!(c.inverse().unwrap().mul(&c), id);
        assert_eq!(c.mul_vec(&VectorGF::unit(s, 0)), VectorGF::unit(s, 1));
    }

    #[test]
    fn char_poly_examples() {
        let s = gf3(4);
        assert_eq!(MatrixGF::identity(s).char_poly().coeffs(), &[1, 2, 0, 2, 1]);
        let f = PolyGF::from_coeffs(s, &[2, 1, 0, 0, 1]).unwrap();
        assert_eq!(f.companion().char_poly(), f);
        let m = MatrixGF::decode(
            s,
            MatrixCode {
                first_col_index: 2,
                value: 19792,
            },
        )
        .unwrap();
        assert_eq!(m.char_poly().coeffs(), &[2, 0, 0, 2, 1]);
        assert!(m.char_poly().is_primitive());
    }

    #[test]
    fn char_poly_matches_leibniz() {
        for (p, d) in [(3, 4), (2, 5), (5, 3), (3, 6), (13, 3)] {
            let s = FieldSpec::new(p, d).unwrap();
            let mut seed = 0x2545F4914F6CDD1Du64;
            for _ in 0..40 {
                let mut m = MatrixGF::zero(s);
                for r in 0..d {
                    for c in 0..d {
                        seed ^= seed << 13;
                        seed ^= seed >> 7;
                        seed ^= seed << 17;
                        m.set(r, c, (seed % p as u64) as u8);
                    }
                }
                assert_eq!(
                    m.char_poly().coeffs(),
                    leibniz_char_poly(&m).as_slice(),
                    "{m:?}"
                );
            }
        }
    }

    #[test]
    fn companion_examples() {
        let s = gf3(4);
        let f = PolyGF::from_coeffs(s, &[2, 0, 0, 2, 1]).unwrap();
        let c = f.companion();
        assert_eq!(c.column(3).coords(), &[1, 0, 0, 1]);
        for j in 0..3 {
            assert_eq!(c.column(j), VectorGF::unit(s, j + 1));
        }
        assert_eq!(
            c.encode().unwrap(),
            MatrixCode {
                first_col_index: 2,
                value: 19792
            }
        );
        let g = PolyGF::from_coeffs(s, &[2, 1, 0, 0, 1]).unwrap();
        assert_eq!(g.companion().column(3).coords(), &[1, 2, 0, 0]);
    }

    #[test]
    fn primitivity_examples() {
        let s = gf3(4);
        let f = |c: &[u8]| PolyGF::from_coeffs(s, c).unwrap();
        assert!(f(&[2, 1, 0, 0, 1]).is_primitive());
        assert!(f(&[2, 0, 0, 1, 1]).is_primitive());
        let x4p1 = f(&[1, 0, 0, 0, 1]);
        assert!(!x4p1.is_primitive());
        assert_eq!(brute_order_of_x(&x4p1), Some(8));
        assert!(has_nontrivial_factor(&x4p1));
    }

    #[test]
    fn primitive_list_gf3_degree4() {
        let s = gf3(4);
        let got: Vec<String> = primitive_polys(s).iter().map(|f| f.to_string()).collect();
        let want = [
            "x^4 + x + 2",
            "x^4 + 2x + 2",
            "x^4 + x^3 + 2",
            "x^4 + x^3 + x^2 + 2x + 2",
            "x^4 + x^3 + 2x^2 + 2x + 2",
            "x^4 + 2x^3 + 2",
            "x^4 + 2x^3 + x^2 + x + 2",
            "x^4 + 2x^3 + 2x^2 + x + 2",
        ];
        assert_eq!(got, want);
        assert_eq!(got.len() as u64, euler_phi(80) / 4);
        for f in primitive_polys(s) {
            assert_eq!(f.companion().char_poly(), f);
        }
    }

    #[test]
    fn primitive_counts_match_brute_force() {
        for (p, d) in [(3, 2), (2, 3), (2, 4), (3, 3), (5, 2), (2, 6), (7, 3)] {
            let s = FieldSpec::new(p, d).unwrap();
            let group = s.order() - 1;
            let brute: Vec<PolyGF> = (0..s.order())
                .map(|i| PolyGF::from_index(s, i))
                .filter(|f| f.coeffs()[0] != 0 && brute_order_of_x(f) == Some(group))
                .collect();
            assert!(brute.iter().all(|f| !has_nontrivial_factor(f)));
            assert_eq!(primitive_polys(s), brute, "p={p} d={d}");
            assert_eq!(brute.len() as u64, euler_phi(group) / d as u64);
        }
    }

    #[test]
    fn encoding_examples() {
        let s = gf3(4);
        assert_eq!(MatrixGF::identity(s).encode().unwrap().value, 59293);
        let m = MatrixGF::decode(
            s,
            MatrixCode {
                first_col_index: 2,
                value: 19792,
            },
        )
        .unwrap();
        let cols: Vec<Vec<u8>> = m.columns().iter().map(|c| c.coords().to_vec()).collect();
        assert_eq!(
            cols,
            vec![
                vec![0, 1, 0, 0],
                vec![0, 0, 1, 0],
                vec![0, 0, 0, 1],
                vec![1, 0, 0, 1]
            ]
        );
        let mut z = MatrixGF::zero(s);
        z.set(0, 0, 1);
        assert_eq!(z.encode().unwrap().value, 0);
        let mut bad = MatrixGF::identity(s);
        bad.set(1, 0, 1);
        assert_eq!(bad.encode(), Err(Error::NotStandardColumn));
        bad = MatrixGF::identity(s);
        bad.set(0, 0, 2);
        assert_eq!(bad.encode(), Err(Error::NotStandardColumn));
        assert!(MatrixGF::decode(
            s,
            MatrixCode {
                first_col_index: 1,
                value: 531441
            }
        )
        .is_err());
    }
}
