//! Brute-force oracles shared by the integration tests. They rely only on
//! matrix codes, decoding and plain modular arithmetic.
#![allow(dead_code)]

use rand::Rng;
use semifield_core::gf::primitive_polys;
use semifield_core::{FieldSpec, MatrixGF, StandardSet, VectorGF};

/// Determinant by cofactor-free elimination over GF(p), on plain vectors.
pub fn det_mod_p(mut m: Vec<Vec<u32>>, p: u32) -> u32 {
    let n = m.len();
    let mut det = 1u32;
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| !m[r][c].is_multiple_of(p)) else {
            return 0;
        };
        if r != c {
            m.swap(r, c);
            det = (p - det) % p;
        }
        det = det * m[c][c] % p;
        let inv = (1..p).find(|&x| x * m[c][c] % p == 1).unwrap();
        for r in c + 1..n {
            let f = m[r][c] * inv % p;
            for k in c..n {
                m[r][k] = (m[r][k] + (p - f) * m[c][k]) % p;
            }
        }
    }
    det
}

fn to_rows(m: &MatrixGF, d: usize) -> Vec<Vec<u32>> {
    (0..d)
        .map(|r| (0..d).map(|c| m.get(r, c) as u32).collect())
        .collect()
}

/// All coefficient vectors in GF(p)^k except zero.
fn nonzero_lambdas(p: u32, k: usize) -> Vec<Vec<u32>> {
    let total = (p as usize).pow(k as u32);
    (1..total)
        .map(|mut i| {
            (0..k)
                .map(|_| {
                    let v = (i % p as usize) as u32;
                    i /= p as usize;
                    v
                })
                .collect()
        })
        .collect()
}

/// Every nonzero combination of `mats` is nonsingular.
pub fn spans_division(mats: &[MatrixGF], p: u32, d: usize) -> bool {
    let rows: Vec<Vec<Vec<u32>>> = mats.iter().map(|m| to_rows(m, d)).collect();
    nonzero_lambdas(p, mats.len()).iter().all(|lam| {
        let mut acc = vec![vec![0u32; d]; d];
        for (l, m) in lam.iter().zip(&rows) {
            for r in 0..d {
                for c in 0..d {
                    acc[r][c] = (acc[r][c] + l * m[r][c]) % p;
                }
            }
        }
        det_mod_p(acc, p) != 0
    })
}

/// Every matrix whose first column is `e_i` (0-based `i`).
fn matrices_with_first_column(spec: FieldSpec, i: usize) -> Vec<MatrixGF> {
    let d = spec.d();
    let p = spec.p() as u64;
    let free = d * (d - 1);
    (0..p.pow(free as u32))
        .map(|mut code| {
            let mut m = MatrixGF::zero(spec);
            m.set(i, 0, 1);
            for c in 1..d {
                for r in 0..d {
                    m.set(r, c, (code % p) as u8);
                    code /= p;
                }
            }
            m
        })
        .collect()
}

/// All standard sets whose second matrix is the companion matrix of a
/// primitive polynomial, by exhaustive enumeration. Only for tiny fields.
pub fn brute_force_search(spec: FieldSpec) -> Vec<(usize, Vec<u64>)> {
    let d = spec.d();
    let p = spec.p() as u32;
    let pools: Vec<Vec<MatrixGF>> = (2..d)
        .map(|i| matrices_with_first_column(spec, i))
        .collect();
    let mut out = Vec::new();
    for (k, poly) in primitive_polys(spec).iter().enumerate() {
        let mut prefix = vec![MatrixGF::identity(spec), poly.companion()];
        extend(&pools, &mut prefix, p, d, &mut |mats| {
            out.push((k + 1, mats[1..].iter().map(MatrixGF::code_value).collect()));
        });
    }
    out.sort();
    out
}

fn extend(
    pools: &[Vec<MatrixGF>],
    prefix: &mut Vec<MatrixGF>,
    p: u32,
    d: usize,
    emit: &mut dyn FnMut(&[MatrixGF]),
) {
    if !spans_division(prefix, p, d) {
        return;
    }
    let level = prefix.len() - 2;
    if level == pools.len() {
        emit(prefix);
        return;
    }
    for m in &pools[level] {
        prefix.push(*m);
        extend(pools, prefix, p, d, emit);
        prefix.pop();
    }
}

fn basis_products(set: &StandardSet) -> Vec<Vec<VectorGF>> {
    let spec = set.spec();
    let units: Vec<VectorGF> = (0..spec.d()).map(|i| VectorGF::unit(spec, i)).collect();
    units
        .iter()
        .map(|a| units.iter().map(|b| set.multiply(a, b)).collect())
        .collect()
}

/// Counts linear bijections `F` with `F(e) = e` and `F(ab) = F(a)F(b)` from
/// `a` onto `b`.
pub fn brute_isomorphisms(a: &StandardSet, b: &StandardSet) -> u64 {
    let spec = a.spec();
    let d = spec.d();
    let prods = basis_products(a);
    let units: Vec<VectorGF> = (0..d).map(|i| VectorGF::unit(spec, i)).collect();
    matrices_with_first_column(spec, 0)
        .into_iter()
        .filter(|f| f.is_invertible())
        .filter(|f| {
            (0..d).all(|i| {
                (0..d).all(|j| {
                    f.mul_vec(&prods[i][j])
                        == b.multiply(&f.mul_vec(&units[i]), &f.mul_vec(&units[j]))
                })
            })
        })
        .count() as u64
}

pub fn random_matrix(spec: FieldSpec, rng: &mut impl Rng) -> MatrixGF {
    let mut m = MatrixGF::zero(spec);
    for r in 0..spec.d() {
        for c in 0..spec.d() {
            m.set(r, c, rng.gen_range(0..spec.p()));
        }
    }
    m
}

pub fn random_invertible(spec: FieldSpec, rng: &mut impl Rng) -> MatrixGF {
    loop {
        let m = random_matrix(spec, rng);
        if det_mod_p(to_rows(&m, spec.d()), spec.p() as u32) != 0 {
            return m;
        }
    }
}

/// Random invertible matrix whose first row is `e_1`, i.e. a basis change
/// keeping the identity first.
pub fn random_admissible(spec: FieldSpec, rng: &mut impl Rng) -> MatrixGF {
    loop {
        let mut m = random_matrix(spec, rng);
        for c in 0..spec.d() {
            m.set(0, c, (c == 0) as u8);
        }
        if det_mod_p(to_rows(&m, spec.d()), spec.p() as u32) != 0 {
            return m;
        }
    }
}
