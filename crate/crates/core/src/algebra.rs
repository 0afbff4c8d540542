//! Semifields as standard matrix sets and as 3-cubes of structure constants.
//!
//! Conventions: elements are coordinate columns over a basis `x_1..x_d`, and
//! `A_i` is the matrix of right multiplication by `x_i`, so that
//! `a·b = (Σ b_i A_i)·a`. The cube entry `A[i1][i2][i3]` is the
//! `x_{i3}`-coordinate of `x_{i1}·x_{i2}`, i.e. row `i3`, column `i1` of `A_{i2}`.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{FieldSpec, MatrixCode, MatrixGF, VectorGF, MAX_D};

pub type Element = VectorGF;

/// A bilinear multiplication on GF(p)^d given by the right multiplication
/// matrices of the basis vectors. Covers presemifields without identity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Algebra {
    spec: FieldSpec,
    right: [MatrixGF; MAX_D],
}

impl Algebra {
    pub fn from_right_matrices(spec: FieldSpec, mats: &[MatrixGF]) -> Self {
        assert_eq!(mats.len(), spec.d(), "one matrix per basis vector");
        let mut right = [MatrixGF::zero(spec); MAX_D];
        right[..mats.len()].copy_from_slice(mats);
        Algebra { spec, right }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    /// Right multiplication matrices `R_{x_1}, …, R_{x_d}`.
    pub fn right_basis(&self) -> &[MatrixGF] {
        &self.right[..self.spec.d()]
    }

    /// Matrix of `a ↦ a·b`.
    pub fn right_mul(&self, b: &Element) -> MatrixGF {
        let mut m = MatrixGF::zero(self.spec);
        for (i, r) in self.right_basis().iter().enumerate() {
            m.add_scaled(r, b.get(i));
        }
        m
    }

    /// Matrix of `b ↦ a·b`; its column `i` is `a·x_i`.
    pub fn left_mul(&self, a: &Element) -> MatrixGF {
        let cols: Vec<VectorGF> = self.right_basis().iter().map(|r| r.mul_vec(a)).collect();
        MatrixGF::from_columns(self.spec, &cols)
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        self.right_mul(b).mul_vec(a)
    }

    pub fn from_cube(cube: &ThreeCube) -> Self {
        let spec = cube.spec;
        let d = spec.d();
        let mats: Vec<MatrixGF> = (0..d)
            .map(|i2| {
                let mut m = MatrixGF::zero(spec);
                for i1 in 0..d {
                    for i3 in 0..d {
                        m.set(i3, i1, cube.get(i1, i2, i3));
                    }
                }
                m
            })
            .collect();
        Algebra::from_right_matrices(spec, &mats)
    }

    pub fn cube(&self) -> ThreeCube {
        let spec = self.spec;
        let d = spec.d();
        let mut cube = ThreeCube::zero(spec);
        for i2 in 0..d {
            for i1 in 0..d {
                for i3 in 0..d {
                    cube.set(i1, i2, i3, self.right[i2].get(i3, i1));
                }
            }
        }
        cube
    }

    /// The principal isotope with product `a∘b = R_z^{-1}(a)·L_y^{-1}(b)`,
    /// whose identity is `y·z`.
    pub fn principal_isotope(&self, y: &Element, z: &Element) -> Result<UnitalAlgebra> {
        if y.is_zero() || z.is_zero() {
            return Err(Error::ZeroElement);
        }
        let rz_inv = self.right_mul(z).inverse()?;
        let ly_inv = self.left_mul(y).inverse()?;
        Ok(UnitalAlgebra {
            identity: self.mul(y, z),
            algebra: self.isotope_with_inverses(&ly_inv, &rz_inv),
        })
    }

    /// Principal isotope from precomputed `L_y^{-1}` and `R_z^{-1}`.
    pub(crate) fn isotope_with_inverses(&self, ly_inv: &MatrixGF, rz_inv: &MatrixGF) -> Algebra {
        let d = self.spec.d();
        let mut right = [MatrixGF::zero(self.spec); MAX_D];
        for (i, slot) in right.iter_mut().enumerate().take(d) {
            *slot = self.right_mul(&ly_inv.column(i)).mul(rz_inv);
        }
        Algebra {
            spec: self.spec,
            right,
        }
    }

    /// `x_i x_j = x_j x_i` for all basis pairs.
    pub fn is_commutative(&self) -> bool {
        let d = self.spec.d();
        (0..d).all(|i| (i + 1..d).all(|j| self.right[j].column(i) == self.right[i].column(j)))
    }

    /// `(x_i x_j) x_k = x_i (x_j x_k)` for all basis triples.
    pub fn is_associative(&self) -> bool {
        let d = self.spec.d();
        let basis: Vec<Element> = (0..d).map(|i| VectorGF::unit(self.spec, i)).collect();
        basis.iter().all(|a| {
            basis.iter().all(|b| {
                let ab = self.mul(a, b);
                basis
                    .iter()
                    .all(|c| self.mul(&ab, c) == self.mul(a, &self.mul(b, c)))
            })
        })
    }
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.right_basis()).finish()
    }
}

/// An algebra together with the coordinates of its identity element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitalAlgebra {
    pub algebra: Algebra,
    pub identity: Element,
}

impl UnitalAlgebra {
    /// Rebases so that the identity becomes `x_1`. The remaining basis
    /// vectors are the first standard vectors that keep the set independent.
    pub fn to_standard_set(&self) -> Result<StandardSet> {
        let spec = self.algebra.spec;
        let d = spec.d();
        let mut basis = vec![self.identity];
        for i in 0..d {
            if basis.len() == d {
                break;
            }
            let e = VectorGF::unit(spec, i);
            basis.push(e);
            if crate::gf::rank_of_vectors(spec, &basis) < basis.len() {
                basis.pop();
            }
        }
        let p = MatrixGF::from_columns(spec, &basis);
        let p_inv = p.inverse()?;
        let mats: Vec<MatrixGF> = basis
            .iter()
            .map(|b| p_inv.mul(&self.algebra.right_mul(b)).mul(&p))
            .collect();
        validate_standard_set(spec, &mats)
    }
}

/// A semifield given by `A_1 = I, A_2, …, A_d`, the right multiplication
/// matrices of a basis whose first vector is the identity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StandardSet {
    algebra: Algebra,
}

impl StandardSet {
    pub fn spec(&self) -> FieldSpec {
        self.algebra.spec
    }

    pub fn matrices(&self) -> &[MatrixGF] {
        self.algebra.right_basis()
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn identity(&self) -> Element {
        VectorGF::unit(self.spec(), 0)
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        self.algebra.mul(a, b)
    }

    /// Codes of `A_2..A_d`.
    pub fn codes(&self) -> Vec<u64> {
        self.matrices()[1..]
            .iter()
            .map(MatrixGF::code_value)
            .collect()
    }

    /// Decodes `(a2, …, ad)`, or `(a1, a2, …, ad)` with `a1` the identity.
    pub fn from_codes(spec: FieldSpec, codes: &[u64]) -> Result<Self> {
        let d = spec.d();
        let tail = match codes.len() {
            n if n == d - 1 => codes,
            n if n == d => {
                if codes[0] != MatrixGF::identity(spec).code_value() {
                    return Err(Error::NotIdentityFirst);
                }
                &codes[1..]
            }
            n => {
                return Err(Error::WrongMatrixCount {
                    expected: d - 1,
                    found: n,
                })
            }
        };
        let mut mats = vec![MatrixGF::identity(spec)];
        for (i, &value) in tail.iter().enumerate() {
            mats.push(MatrixGF::decode(
                spec,
                MatrixCode {
                    first_col_index: i + 2,
                    value,
                },
            )?);
        }
        validate_standard_set(spec, &mats)
    }

    pub fn cube(&self) -> ThreeCube {
        self.algebra.cube()
    }

    pub fn predicates(&self) -> Predicates {
        Predicates {
            commutative: self.algebra.is_commutative(),
            associative: self.algebra.is_associative(),
        }
    }
}

impl fmt::Debug for StandardSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StandardSet{:?}", self.codes())
    }
}

impl fmt::Display for StandardSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let codes: Vec<String> = self.codes().iter().map(u64::to_string).collect();
        write!(f, "({})", codes.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Predicates {
    pub commutative: bool,
    pub associative: bool,
}

/// Checks the three matrix-set conditions and wraps the matrices.
///
/// The invertibility scan only visits coefficient tuples whose first
/// nonzero entry is one; scaling does not change invertibility.
pub fn validate_standard_set(spec: FieldSpec, mats: &[MatrixGF]) -> Result<StandardSet> {
    let d = spec.d();
    if mats.len() != d {
        return Err(Error::WrongMatrixCount {
            expected: d,
            found: mats.len(),
        });
    }
    if mats.iter().any(|m| m.spec() != spec) {
        return Err(Error::SpecMismatch);
    }
    if mats[0] != MatrixGF::identity(spec) {
        return Err(Error::NotIdentityFirst);
    }
    for (i, m) in mats.iter().enumerate() {
        if m.column(0) != VectorGF::unit(spec, i) {
            return Err(Error::BadFirstColumn(i + 1));
        }
    }
    for lambda in spec.nonzero_vectors() {
        let lead = lambda.coords().iter().find(|&&c| c != 0);
        if lead != Some(&1) {
            continue;
        }
        let mut sum = MatrixGF::zero(spec);
        for (m, &l) in mats.iter().zip(lambda.coords()) {
            sum.add_scaled(m, l);
        }
        if !sum.is_invertible() {
            return Err(Error::SingularCombination(lambda.coords().to_vec()));
        }
    }
    Ok(StandardSet {
        algebra: Algebra::from_right_matrices(spec, mats),
    })
}

/// The d³ structure constants.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ThreeCube {
    spec: FieldSpec,
    entries: Vec<u8>,
}

impl ThreeCube {
    pub fn zero(spec: FieldSpec) -> Self {
        let d = spec.d();
        ThreeCube {
            spec,
            entries: vec![0; d * d * d],
        }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    #[inline]
    fn idx(&self, i1: usize, i2: usize, i3: usize) -> usize {
        let d = self.spec.d();
        (i1 * d + i2) * d + i3
    }

    /// 0-based entry `A[i1][i2][i3]`.
    #[inline]
    pub fn get(&self, i1: usize, i2: usize, i3: usize) -> u8 {
        self.entries[self.idx(i1, i2, i3)]
    }

    #[inline]
    pub fn set(&mut self, i1: usize, i2: usize, i3: usize, v: u8) {
        let k = self.idx(i1, i2, i3);
        self.entries[k] = v % self.spec.p();
    }

    /// `x_1` acts as a two-sided identity.
    pub fn has_identity_slices(&self) -> bool {
        let d = self.spec.d();
        (0..d).all(|j| {
            (0..d).all(|k| {
                let delta = (j == k) as u8;
                self.get(0, j, k) == delta && self.get(j, 0, k) == delta
            })
        })
    }

    pub fn is_symmetric_12(&self) -> bool {
        *self == sigma_transform(self, PermS3::transposition(1, 2))
    }
}

impl fmt::Debug for ThreeCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ThreeCube{:?}", self.entries)
    }
}

pub fn cube_from_set(set: &StandardSet) -> ThreeCube {
    set.cube()
}

pub fn set_from_cube(cube: &ThreeCube) -> Result<StandardSet> {
    if !cube.has_identity_slices() {
        return Err(Error::NoIdentity);
    }
    let alg = Algebra::from_cube(cube);
    validate_standard_set(cube.spec, alg.right_basis())
}

/// A permutation of {1, 2, 3}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermS3 {
    // 0-based images
    map: [u8; 3],
}

impl PermS3 {
    pub const IDENTITY: PermS3 = PermS3 { map: [0, 1, 2] };

    /// From 1-based images `(σ(1), σ(2), σ(3))`.
    pub fn new(images: [u8; 3]) -> Option<Self> {
        let mut seen = [false; 3];
        for &i in &images {
            if !(1..=3).contains(&i) || seen[i as usize - 1] {
                return None;
            }
            seen[i as usize - 1] = true;
        }
        Some(PermS3 {
            map: images.map(|i| i - 1),
        })
    }

    /// The transposition swapping 1-based `a` and `b`.
    pub fn transposition(a: u8, b: u8) -> Self {
        let mut map = [0, 1, 2];
        map.swap(a as usize - 1, b as usize - 1);
        PermS3 { map }
    }

    /// All six permutations: identity, (1 2), (1 3), (2 3), (1 2 3), (1 3 2).
    pub fn all() -> [PermS3; 6] {
        [
            PermS3::IDENTITY,
            PermS3::transposition(1, 2),
            PermS3::transposition(1, 3),
            PermS3::transposition(2, 3),
            PermS3 { map: [1, 2, 0] },
            PermS3 { map: [2, 0, 1] },
        ]
    }

    /// 1-based image of 1-based `k`.
    pub fn apply(self, k: u8) -> u8 {
        self.map[k as usize - 1] + 1
    }

    pub fn inverse(self) -> Self {
        let mut map = [0; 3];
        for (i, &j) in self.map.iter().enumerate() {
            map[j as usize] = i as u8;
        }
        PermS3 { map }
    }
}

impl fmt::Debug for PermS3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "σ({}{}{})",
            self.map[0] + 1,
            self.map[1] + 1,
            self.map[2] + 1
        )
    }
}

/// Output entry `(i1, i2, i3)` is input entry `(i_σ(1), i_σ(2), i_σ(3))`.
pub fn sigma_transform(cube: &ThreeCube, sigma: PermS3) -> ThreeCube {
    let d = cube.spec.d();
    let mut out = ThreeCube::zero(cube.spec);
    for i1 in 0..d {
        for i2 in 0..d {
            for i3 in 0..d {
                let i = [i1, i2, i3];
                let src = sigma.map.map(|k| i[k as usize]);
                out.set(i1, i2, i3, cube.get(src[0], src[1], src[2]));
            }
        }
    }
    out
}

/// Three invertible matrices acting on the three cube indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IsotopyTriple {
    maps: [MatrixGF; 3],
}

impl IsotopyTriple {
    pub fn new(f1: MatrixGF, f2: MatrixGF, f3: MatrixGF) -> Result<Self> {
        if [f1, f2, f3].iter().any(|m| !m.is_invertible()) {
            return Err(Error::SingularMatrix);
        }
        Ok(IsotopyTriple { maps: [f1, f2, f3] })
    }

    pub fn maps(&self) -> &[MatrixGF; 3] {
        &self.maps
    }
}

/// `([F1,F2,F3] × A)_{i1 i2 i3} = Σ F1_{i1 x1} F2_{i2 x2} F3_{i3 x3} A_{x1 x2 x3}`,
/// evaluated one index at a time.
pub fn isotopy_apply(cube: &ThreeCube, triple: &IsotopyTriple) -> ThreeCube {
    let spec = cube.spec;
    let d = spec.d();
    let p = spec.p() as u32;
    let mut cur = cube.clone();
    for (axis, f) in triple.maps.iter().enumerate() {
        let mut next = ThreeCube::zero(spec);
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let mut acc = 0u32;
                    for x in 0..d {
                        let (src, coef) = match axis {
                            0 => ((x, b, c), f.get(a, x)),
                            1 => ((a, x, c), f.get(b, x)),
                            _ => ((a, b, x), f.get(c, x)),
                        };
                        acc += coef as u32 * cur.get(src.0, src.1, src.2) as u32;
                    }
                    next.set(a, b, c, (acc % p) as u8);
                }
            }
        }
        cur = next;
    }
    cur
}

/// Rewrites `set` in the basis whose i-th vector has coordinates given by
/// row i of `p`; the first row must be the identity's coordinates.
pub fn basis_change(set: &StandardSet, p: &MatrixGF) -> Result<StandardSet> {
    let p_inv_t = p.inverse()?.transpose();
    let triple = IsotopyTriple::new(*p, *p, p_inv_t)?;
    set_from_cube(&isotopy_apply(&set.cube(), &triple)).map_err(|e| match e {
        Error::NoIdentity => Error::IdentityNotPreserved,
        other => other,
    })
}

/// The principal isotope `D_(y,z)`, rebased so that its identity `y·z` is `x_1`.
pub fn principal_isotope(set: &StandardSet, y: &Element, z: &Element) -> Result<StandardSet> {
    set.algebra.principal_isotope(y, z)?.to_standard_set()
}

/// Turns a presemifield cube into an isotopic semifield via the principal
/// isotope at `(u, u)`.
pub fn unitalize(cube: &ThreeCube, u: &Element) -> Result<StandardSet> {
    Algebra::from_cube(cube)
        .principal_isotope(u, u)?
        .to_standard_set()
}

pub fn multiply(set: &StandardSet, a: &Element, b: &Element) -> Element {
    set.multiply(a, b)
}

pub fn predicates(set: &StandardSet) -> Predicates {
    set.predicates()
}
