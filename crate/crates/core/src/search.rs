//! Backtracking enumeration of standard sets with a fixed second matrix.
//!
//! Matrices `A_3, …, A_d` are filled one column at a time. When a column is
//! appended to a partial matrix `M` (whose earlier columns are already
//! certified), every combination `Σ λ_i A_i + M` over the complete matrices
//! must keep its leading columns independent. For a fixed `λ` the forbidden
//! columns form one coset of the span of the earlier columns, so each
//! extension step marks at most `p^m · p^k` vectors instead of running rank
//! tests on every candidate.

use rayon::prelude::*;

use crate::algebra::{validate_standard_set, StandardSet};
use crate::error::{Error, Result};
use crate::gf::{primitive_polys, FieldSpec, MatrixGF, PolyGF, VectorGF};

/// The first `k` columns of the matrix under construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialMatrix {
    spec: FieldSpec,
    columns: Vec<VectorGF>,
}

impl PartialMatrix {
    /// A one-column matrix `[e_{m+1}]` where `m` matrices are complete.
    pub fn start(spec: FieldSpec, completed: usize) -> Self {
        PartialMatrix {
            spec,
            columns: vec![VectorGF::unit(spec, completed)],
        }
    }

    pub fn from_columns(spec: FieldSpec, columns: Vec<VectorGF>) -> Self {
        PartialMatrix { spec, columns }
    }

    pub fn columns(&self) -> &[VectorGF] {
        &self.columns
    }

    pub fn push(&mut self, c: VectorGF) {
        self.columns.push(c);
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    spec: FieldSpec,
    a2: MatrixGF,
    /// Fixes column 2 of `A_3`, selecting one shard of the search tree.
    prefix: Option<VectorGF>,
}

impl SearchConfig {
    pub fn new(spec: FieldSpec, a2: MatrixGF) -> Result<Self> {
        if a2.column(0) != VectorGF::unit(spec, 1) {
            return Err(Error::BadFirstColumn(2));
        }
        if !a2.char_poly().is_primitive() {
            return Err(Error::NotRightPrimitive);
        }
        Ok(SearchConfig {
            spec,
            a2,
            prefix: None,
        })
    }

    pub fn from_poly(poly: &PolyGF) -> Result<Self> {
        Self::new(poly.spec(), poly.companion())
    }

    pub fn with_prefix(mut self, prefix: VectorGF) -> Self {
        self.prefix = Some(prefix);
        self
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn a2(&self) -> &MatrixGF {
        &self.a2
    }

    /// Candidates for column 2 of `A_3`: the keys of the available shards.
    pub fn shard_keys(&self) -> Vec<VectorGF> {
        if self.spec.d() < 3 {
            return Vec::new();
        }
        let complete = [MatrixGF::identity(self.spec), self.a2];
        valid_columns(&complete, &PartialMatrix::start(self.spec, 2))
    }
}

/// All columns `c` such that `Σ λ_i trunc(A_i) + [M | c]` has full column
/// rank for every `λ` over the complete matrices, in lexicographic order.
pub fn valid_columns(complete: &[MatrixGF], partial: &PartialMatrix) -> Vec<VectorGF> {
    let spec = partial.spec;
    let mut kernel = Kernel::new(spec);
    let comb = kernel.combinations(complete);
    let cols: Vec<u32> = partial.columns.iter().map(|c| c.index() as u32).collect();
    let mut out = Vec::new();
    kernel.extend(&comb, &cols, &mut out);
    out.into_iter()
        .map(|i| VectorGF::from_index(spec, i as u64))
        .collect()
}

/// Vectors of GF(p)^d handled as their lexicographic indices, with lookup
/// tables for scaling and (for small spaces) addition.
struct IndexArith {
    spec: FieldSpec,
    order: usize,
    add: Option<Vec<u16>>,
    scale: Vec<u32>,
}

const ADD_TABLE_LIMIT: usize = 1024;

impl IndexArith {
    fn new(spec: FieldSpec) -> Self {
        let order = spec.order() as usize;
        let vectors: Vec<VectorGF> = spec.vectors().collect();
        let add = (order <= ADD_TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity(order * order);
            for a in &vectors {
                for b in &vectors {
                    t.push(a.add(b).index() as u16);
                }
            }
            t
        });
        let mut scale = Vec::with_capacity(order * spec.p() as usize);
        for s in 0..spec.p() {
            scale.extend(vectors.iter().map(|v| v.scale(s).index() as u32));
        }
        IndexArith {
            spec,
            order,
            add,
            scale,
        }
    }

    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        match &self.add {
            Some(t) => t[a as usize * self.order + b as usize] as u32,
            None => {
                let va = VectorGF::from_index(self.spec, a as u64);
                va.add(&VectorGF::from_index(self.spec, b as u64)).index() as u32
            }
        }
    }

    #[inline]
    fn scale(&self, a: u32, s: u8) -> u32 {
        self.scale[s as usize * self.order + a as usize]
    }
}

/// Scratch state for column extension. Generation stamps replace clearing
/// the marker arrays between calls.
struct Kernel {
    arith: IndexArith,
    forbidden: Vec<u32>,
    seen: Vec<u32>,
    call: u32,
    lambda: u32,
    span: Vec<u32>,
}

impl Kernel {
    fn new(spec: FieldSpec) -> Self {
        let order = spec.order() as usize;
        Kernel {
            arith: IndexArith::new(spec),
            forbidden: vec![0; order],
            seen: vec![0; order],
            call: 0,
            lambda: 0,
            span: Vec::new(),
        }
    }

    /// Column `j` of `Σ λ_i A_i` for every `λ`, as `comb[λ·d + j]`.
    fn combinations(&self, complete: &[MatrixGF]) -> Vec<u32> {
        let spec = self.arith.spec;
        let d = spec.d();
        let p = spec.p() as usize;
        let count = p.pow(complete.len() as u32);
        let mut comb = vec![0u32; count * d];
        for lambda in 0..count {
            let mut rest = lambda;
            for a in complete {
                let l = (rest % p) as u8;
                rest /= p;
                for j in 0..d {
                    let col = self.arith.scale(a.column(j).index() as u32, l);
                    comb[lambda * d + j] = self.arith.add(comb[lambda * d + j], col);
                }
            }
        }
        comb
    }

    fn bump(counter: &mut u32, marks: &mut [u32]) -> u32 {
        if *counter == u32::MAX {
            marks.iter_mut().for_each(|m| *m = 0);
            *counter = 0;
        }
        *counter += 1;
        *counter
    }

    fn extend(&mut self, comb: &[u32], partial: &[u32], out: &mut Vec<u32>) {
        let d = self.arith.spec.d();
        let p = self.arith.spec.p();
        let k = partial.len();
        out.clear();
        let call = Self::bump(&mut self.call, &mut self.forbidden);
        for lambda in 0..comb.len() / d {
            let row = &comb[lambda * d..lambda * d + d];
            let stamp = Self::bump(&mut self.lambda, &mut self.seen);
            // c is forbidden iff c + row[k] lies in the span of the first k columns
            let start = self.arith.scale(row[k], p - 1);
            self.span.clear();
            self.span.push(start);
            self.seen[start as usize] = stamp;
            self.forbidden[start as usize] = call;
            for (&base, &col) in row.iter().zip(partial) {
                let w = self.arith.add(base, col);
                let len = self.span.len();
                for t in 1..p {
                    let step = self.arith.scale(w, t);
                    for i in 0..len {
                        let v = self.arith.add(self.span[i], step);
                        if self.seen[v as usize] == stamp {
                            // the first k columns are dependent for this λ
                            return;
                        }
                        self.seen[v as usize] = stamp;
                        self.forbidden[v as usize] = call;
                        self.span.push(v);
                    }
                }
            }
        }
        out.extend((0..self.arith.order as u32).filter(|&v| self.forbidden[v as usize] != call));
    }
}

struct Frame {
    candidates: Vec<u32>,
    next: usize,
}

/// Depth-first iterator over every standard set `(I, A_2, A_3, …, A_d)`
/// with the configured `A_2`. Output is sorted by the code tuple
/// `(a3, …, ad)`.
pub struct CompleteSearch {
    config: SearchConfig,
    kernel: Kernel,
    /// Chosen columns 2..d of `A_3`, then of `A_4`, and so on.
    chosen: Vec<u32>,
    /// λ-combinations of the complete matrices, one entry per matrix level.
    combs: Vec<Vec<u32>>,
    stack: Vec<Frame>,
    started: bool,
}

impl CompleteSearch {
    fn new(config: SearchConfig) -> Self {
        let spec = config.spec;
        let kernel = Kernel::new(spec);
        let base = kernel.combinations(&[MatrixGF::identity(spec), config.a2]);
        CompleteSearch {
            config,
            kernel,
            chosen: Vec::new(),
            combs: vec![base],
            stack: Vec::new(),
            started: false,
        }
    }

    fn free_columns(&self) -> usize {
        let d = self.config.spec.d();
        (d - 2) * (d - 1)
    }

    fn complete_matrices(&self) -> Vec<MatrixGF> {
        let spec = self.config.spec;
        let d = spec.d();
        let mut mats = vec![MatrixGF::identity(spec), self.config.a2];
        for (j, cols) in self.chosen.chunks_exact(d - 1).enumerate() {
            let mut m = MatrixGF::zero(spec);
            m.set_column(0, &VectorGF::unit(spec, j + 2));
            for (c, &v) in cols.iter().enumerate() {
                m.set_column(c + 1, &VectorGF::from_index(spec, v as u64));
            }
            mats.push(m);
        }
        mats
    }

    fn push_frame(&mut self) {
        let spec = self.config.spec;
        let d = spec.d();
        let depth = self.chosen.len();
        let level = depth / (d - 1);
        if depth.is_multiple_of(d - 1) && level > 0 {
            // a matrix was just completed
            let comb = self.kernel.combinations(&self.complete_matrices());
            self.combs.truncate(level);
            self.combs.push(comb);
        }
        let mut partial = vec![VectorGF::unit(spec, level + 2).index() as u32];
        partial.extend_from_slice(&self.chosen[level * (d - 1)..]);
        let mut candidates = Vec::new();
        self.kernel
            .extend(&self.combs[level], &partial, &mut candidates);
        if depth == 0 {
            if let Some(prefix) = self.config.prefix {
                candidates.retain(|&c| c as u64 == prefix.index());
            }
        }
        self.stack.push(Frame {
            candidates,
            next: 0,
        });
    }

    fn leaf(&self) -> StandardSet {
        validate_standard_set(self.config.spec, &self.complete_matrices())
            .expect("search pruning admitted a matrix set that fails validation")
    }
}

impl Iterator for CompleteSearch {
    type Item = StandardSet;

    fn next(&mut self) -> Option<StandardSet> {
        if !self.started {
            self.started = true;
            if self.free_columns() == 0 {
                return Some(self.leaf());
            }
            self.push_frame();
        }
        let total = self.free_columns();
        loop {
            let frame = self.stack.last_mut()?;
            if frame.next == frame.candidates.len() {
                self.stack.pop();
                continue;
            }
            let c = frame.candidates[frame.next];
            frame.next += 1;
            let depth = self.stack.len() - 1;
            self.chosen.truncate(depth);
            self.chosen.push(c);
            if depth + 1 == total {
                return Some(self.leaf());
            }
            self.push_frame();
        }
    }
}

pub fn complete_search(config: &SearchConfig) -> CompleteSearch {
    CompleteSearch::new(config.clone())
}

/// Runs each shard as an independent search on the rayon pool and
/// concatenates the results in shard order, which reproduces the
/// sequential output exactly.
pub fn complete_search_parallel(config: &SearchConfig) -> Vec<StandardSet> {
    let keys = config.shard_keys();
    if keys.is_empty() {
        return complete_search(config).collect();
    }
    let shards: Vec<Vec<StandardSet>> = keys
        .par_iter()
        .map(|k| complete_search(&config.clone().with_prefix(*k)).collect())
        .collect();
    shards.into_iter().flatten().collect()
}

/// Every standard set over `spec`, seeded by each primitive polynomial in
/// turn. Items carry the 1-based polynomial index.
pub fn search_all(spec: FieldSpec) -> impl Iterator<Item = (usize, StandardSet)> {
    primitive_polys(spec)
        .into_iter()
        .enumerate()
        .flat_map(|(i, poly)| {
            let config =
                SearchConfig::from_poly(&poly).expect("primitive companion is a valid seed");
            complete_search(&config).map(move |set| (i + 1, set))
        })
}
