//! Generalized Hamming weights.
//!
//! `d_r(C)` is the smallest support of an `r`-dimensional subcode. Two
//! independent exact algorithms are provided:
//!
//! * [`ghw_exact_subspaces`] walks every `r`-dimensional subcode through the
//!   RREF form of its coefficient matrix, with branch and bound on the
//!   growing union of row supports.
//! * [`ghw_exact_support`] works on coordinate sets instead. A set `S`
//!   carries `dim C(S) = k - rank(G_{S^c})` codewords supported inside it,
//!   so `d_r = n - max { |T| : rank(G_T) <= k - r }`. The maximum is taken
//!   over the flats of rank `k - r` of the column matroid of `G`, each flat
//!   visited once through its greedy (lexicographically first) basis.
//!
//! Both searches split into chunks that are reduced in a fixed order, so the
//! reported values and witnesses do not depend on the thread count.

use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::cartesian::{dual_code, CodeFamily, EvaluationCode};
use crate::combinatorics::{gaussian_binomial, SquareFreeExponent};
use crate::exec::SearchOptions;
use crate::field::Field;
use crate::footprint::{footprint_bound, FootprintError};
use crate::formulas::{
    ghw_formula_affine_punctured, ghw_formula_cd, ghw_formula_cleqd, ghw_formula_projective, lemma_shadow_lower_bound,
    FormulaError,
};
use crate::linalg::{combinations, Matrix, PivotPattern};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GhwError {
    #[error("r = {r} is outside 1..={k}")]
    BadRank { r: usize, k: usize },
    #[error("{count} subspaces exceed the cap {cap}; use the exact-support or footprint method")]
    CapExceeded { count: BigUint, cap: u64 },
    #[error("search stopped after {nodes} nodes (budget or time limit){}", upper_bound.map(|u| format!("; d_r <= {u}")).unwrap_or_default())]
    BudgetExceeded { nodes: u64, upper_bound: Option<u64> },
    #[error("method not applicable: {0}")]
    NotApplicable(String),
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Footprint(#[from] FootprintError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactSubspace,
    ExactSupport,
    Footprint,
    Formula,
    Duality,
}

impl Method {
    pub const ALL: [Method; 5] =
        [Method::ExactSubspace, Method::ExactSupport, Method::Footprint, Method::Formula, Method::Duality];

    pub fn name(self) -> &'static str {
        match self {
            Method::ExactSubspace => "exact-subspace",
            Method::ExactSupport => "exact-support",
            Method::Footprint => "footprint",
            Method::Formula => "formula",
            Method::Duality => "duality",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| format!("unknown method '{s}'"))
    }
}

/// An `r`-dimensional subcode: coefficient rows with respect to the code's basis, and its support.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubcodeWitness {
    pub coefficients: Vec<Vec<u32>>,
    pub support: Vec<usize>,
}

impl SubcodeWitness {
    pub fn support_size(&self) -> usize {
        self.support.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "data")]
pub enum Witness {
    Subcode(SubcodeWitness),
    /// Leading monomials whose shadow attains the footprint value.
    Monomials(Vec<SquareFreeExponent>),
    /// The support of a minimal subcode, found as the complement of a flat.
    Support(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GhwRecord {
    pub r: usize,
    pub value: u64,
    pub method: Method,
    /// The value is a proven lower bound on `d_r`, not necessarily `d_r` itself.
    pub lower_bound_only: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightHierarchyReport {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub homogeneous: bool,
    pub family: CodeFamily,
    pub records: Vec<GhwRecord>,
}

impl WeightHierarchyReport {
    pub fn values(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.value).collect()
    }
}

// -- bitsets over coordinates ------------------------------------------------

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

fn set_support(codeword: &[u32], out: &mut [u64]) {
    out.iter_mut().for_each(|w| *w = 0);
    for (c, &v) in codeword.iter().enumerate() {
        if v != 0 {
            out[c / 64] |= 1 << (c % 64);
        }
    }
}

fn bits_to_indices(bits: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (w, &word) in bits.iter().enumerate() {
        let mut x = word;
        while x != 0 {
            out.push(w * 64 + x.trailing_zeros() as usize);
            x &= x - 1;
        }
    }
    out
}

fn basis_of(generator: &Matrix) -> Matrix {
    if generator.rank() == generator.rows() {
        generator.clone()
    } else {
        generator.row_basis()
    }
}

// -- subspace oracle ---------------------------------------------------------

struct SubspaceChunk {
    pattern: usize,
    /// Fixed values for the leading free entries of the first row.
    prefix: Vec<u32>,
}

struct SubspaceSearch<'a> {
    field: &'a Field,
    basis: &'a Matrix,
    patterns: &'a [PivotPattern],
    r: usize,
    n: usize,
    words: usize,
    nodes: &'a AtomicU64,
    stop: &'a AtomicBool,
    opts: &'a SearchOptions,
}

struct SubspaceState {
    coeffs: Vec<Vec<u32>>,
    unions: Vec<Vec<u64>>,
    // acc[row][t]: partial codeword after the first t free entries of the row
    acc: Vec<Vec<Vec<u32>>>,
    leaf_bits: Vec<u64>,
    bound: usize,
    best: Option<(usize, Vec<Vec<u32>>, Vec<u64>)>,
}

impl SubspaceSearch<'_> {
    fn axpy(&self, dst: &mut [u32], src: &[u32], a: u32, row: usize) {
        let g = self.basis.row(row);
        if a == 1 {
            for ((d, &s), &x) in dst.iter_mut().zip(src).zip(g) {
                *d = self.field.add(s, x);
            }
        } else {
            for ((d, &s), &x) in dst.iter_mut().zip(src).zip(g) {
                *d = self.field.add(s, self.field.mul(a, x));
            }
        }
    }

    fn run_chunk(&self, chunk: &SubspaceChunk, seed: usize) -> Option<(usize, Vec<Vec<u32>>, Vec<u64>)> {
        let pattern = &self.patterns[chunk.pattern];
        let k = self.basis.rows();
        let mut state = SubspaceState {
            coeffs: vec![vec![0; k]; self.r],
            unions: vec![vec![0; self.words]; self.r + 1],
            acc: pattern.free.iter().map(|f| vec![vec![0; self.n]; f.len() + 1]).collect(),
            leaf_bits: vec![0; self.words],
            bound: seed,
            best: None,
        };
        self.start_row(pattern, 0, &chunk.prefix, &mut state);
        state.best
    }

    fn start_row(&self, pattern: &PivotPattern, row: usize, prefix: &[u32], st: &mut SubspaceState) {
        let pivot = pattern.pivots[row];
        st.coeffs[row].iter_mut().for_each(|c| *c = 0);
        st.coeffs[row][pivot] = 1;
        st.acc[row][0].copy_from_slice(self.basis.row(pivot));
        self.free_entry(pattern, row, 0, prefix, st);
    }

    fn free_entry(&self, pattern: &PivotPattern, row: usize, t: usize, prefix: &[u32], st: &mut SubspaceState) {
        let free = &pattern.free[row];
        if t == free.len() {
            self.row_done(pattern, row, st);
            return;
        }
        if self.stop.load(Ordering::Relaxed) {
            return;
        }
        let col = free[t];
        let values = if row == 0 && t < prefix.len() { prefix[t]..prefix[t] + 1 } else { 0..self.field.order() };
        for a in values {
            let (before, after) = st.acc[row].split_at_mut(t + 1);
            if a == 0 {
                after[0].copy_from_slice(&before[t]);
            } else {
                self.axpy(&mut after[0], &before[t], a, col);
            }
            st.coeffs[row][col] = a;
            self.free_entry(pattern, row, t + 1, prefix, st);
        }
        st.coeffs[row][col] = 0;
    }

    fn row_done(&self, pattern: &PivotPattern, row: usize, st: &mut SubspaceState) {
        let visited = self.nodes.fetch_add(1, Ordering::Relaxed);
        if visited >= self.opts.subset_budget || (visited.is_multiple_of(8192) && self.opts.expired()) {
            self.stop.store(true, Ordering::Relaxed);
            return;
        }
        let free_len = pattern.free[row].len();
        set_support(&st.acc[row][free_len], &mut st.leaf_bits);
        let (lower, upper) = st.unions.split_at_mut(row + 1);
        let mut count = 0;
        for ((u, &prev), &leaf) in upper[0].iter_mut().zip(&lower[row]).zip(&st.leaf_bits) {
            *u = prev | leaf;
            count += u.count_ones() as usize;
        }
        // supports only grow as rows are added
        if count >= st.bound {
            return;
        }
        if row + 1 == self.r {
            st.bound = count;
            st.best = Some((count, st.coeffs.clone(), upper[0].clone()));
        } else {
            self.start_row(pattern, row + 1, &[], st);
        }
    }
}

fn subspace_chunks(patterns: &[PivotPattern], q: u32) -> Vec<SubspaceChunk> {
    let mut chunks = Vec::new();
    for (i, p) in patterns.iter().enumerate() {
        // split the first row's leading free entries until there are enough pieces
        let mut depth = 0;
        let mut pieces = 1u64;
        while depth < p.free[0].len() && pieces < 64 {
            depth += 1;
            pieces *= q as u64;
        }
        for idx in 0..pieces {
            let mut prefix = vec![0; depth];
            let mut x = idx;
            for slot in prefix.iter_mut().rev() {
                *slot = (x % q as u64) as u32;
                x /= q as u64;
            }
            chunks.push(SubspaceChunk { pattern: i, prefix });
        }
    }
    chunks
}

/// Exact `d_r` by enumerating all `r`-dimensional subcodes.
///
/// The witness is the first minimising subcode in enumeration order: pivot
/// patterns lexicographically, then free entries row by row, each entry
/// running through the field encodings in increasing order. Coefficients are
/// relative to the generator when it has full row rank, and to its RREF
/// basis otherwise.
pub fn ghw_exact_subspaces(generator: &Matrix, r: usize, opts: &SearchOptions) -> Result<(u64, SubcodeWitness), GhwError> {
    let basis = basis_of(generator);
    let (k, n) = (basis.rows(), basis.cols());
    if r == 0 || r > k {
        return Err(GhwError::BadRank { r, k });
    }
    let field = basis.field().clone();
    let count = gaussian_binomial(k as u64, r as u64, field.order() as u64).expect("valid arguments");
    if count > BigUint::from(opts.subspace_cap) {
        return Err(GhwError::CapExceeded { count, cap: opts.subspace_cap });
    }
    let patterns: Vec<PivotPattern> = combinations(k, r).into_iter().map(|p| PivotPattern::new(k, p)).collect();
    let words = words_for(n);

    // the first subspace in enumeration order seeds the bound
    let mut seed_bits = vec![0u64; words];
    let mut row_bits = vec![0u64; words];
    for i in 0..r {
        set_support(basis.row(i), &mut row_bits);
        seed_bits.iter_mut().zip(&row_bits).for_each(|(a, b)| *a |= b);
    }
    let seed: usize = seed_bits.iter().map(|w| w.count_ones() as usize).sum();
    let seed_coeffs: Vec<Vec<u32>> = (0..r).map(|i| (0..k).map(|j| (i == j) as u32).collect()).collect();

    let nodes = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let search = SubspaceSearch {
        field: &field,
        basis: &basis,
        patterns: &patterns,
        r,
        n,
        words,
        nodes: &nodes,
        stop: &stop,
        opts,
    };
    let chunks = subspace_chunks(&patterns, field.order());
    let outcomes = opts.execution.map(chunks, |chunk| search.run_chunk(&chunk, seed));

    let mut best = (seed, seed_coeffs, seed_bits);
    for (value, coeffs, bits) in outcomes.into_iter().flatten() {
        if value < best.0 {
            best = (value, coeffs, bits);
        }
    }
    if stop.load(Ordering::Relaxed) {
        return Err(GhwError::BudgetExceeded { nodes: nodes.load(Ordering::Relaxed), upper_bound: Some(best.0 as u64) });
    }
    let witness = SubcodeWitness { coefficients: best.1, support: bits_to_indices(&best.2) };
    Ok((best.0 as u64, witness))
}

// -- coordinate-set oracle ---------------------------------------------------

struct FlatSearch<'a> {
    field: &'a Field,
    k: usize,
    /// One column per class of parallel nonzero columns, each as a length-`k` vector, concatenated.
    columns: Vec<u32>,
    /// Number of original columns in each class.
    weights: Vec<u64>,
    target_rank: usize,
    nodes: &'a AtomicU64,
    stop: &'a AtomicBool,
    opts: &'a SearchOptions,
}

struct FlatOutcome {
    /// Heaviest flat found: its weight and its classes.
    best: Option<(u64, Vec<usize>)>,
    flats: u64,
}

impl FlatSearch<'_> {
    fn count(&self) -> usize {
        self.columns.len() / self.k.max(1)
    }

    fn is_zero(&self, reduced: &[u32], c: usize) -> bool {
        reduced[c * self.k..(c + 1) * self.k].iter().all(|&v| v == 0)
    }

    /// Reduces every column against column `pivot_col` of `reduced`, writing into `out`.
    fn eliminate(&self, reduced: &[u32], pivot_col: usize, out: &mut [u32]) {
        let k = self.k;
        let f = self.field;
        let v = &reduced[pivot_col * k..(pivot_col + 1) * k];
        let p = v.iter().position(|&x| x != 0).expect("pivot column is nonzero");
        let inv = f.inv(v[p]).expect("nonzero");
        let pivot: Vec<u32> = v.iter().map(|&x| f.mul(x, inv)).collect();
        for c in 0..self.count() {
            let src = &reduced[c * k..(c + 1) * k];
            let dst = &mut out[c * k..(c + 1) * k];
            let s = src[p];
            if s == 0 {
                dst.copy_from_slice(src);
            } else {
                for i in 0..k {
                    dst[i] = f.sub(src[i], f.mul(s, pivot[i]));
                }
            }
        }
    }

    fn run_chunk(&self, first: usize, buffers: &mut Vec<Vec<u32>>) -> FlatOutcome {
        let mut out = FlatOutcome { best: None, flats: 0 };
        if self.is_zero(&self.columns, first) {
            return out;
        }
        // nonzero columns before the first chosen one would have been picked by a greedy scan
        let mut forbidden: Vec<usize> = (0..first).filter(|&c| !self.is_zero(&self.columns, c)).collect();
        let mut chosen = vec![first];
        buffers.resize(self.target_rank + 1, Vec::new());
        buffers[0].clone_from(&self.columns);
        let (head, tail) = buffers.split_at_mut(1);
        tail[0].resize(self.columns.len(), 0);
        self.eliminate(&head[0], first, &mut tail[0]);
        if forbidden.iter().all(|&c| !self.is_zero(&tail[0], c)) {
            self.descend(1, buffers, &mut chosen, &mut forbidden, &mut out);
        }
        out
    }

    fn descend(
        &self,
        depth: usize,
        buffers: &mut [Vec<u32>],
        chosen: &mut Vec<usize>,
        forbidden: &mut Vec<usize>,
        out: &mut FlatOutcome,
    ) {
        if depth == self.target_rank {
            out.flats += 1;
            let flat: Vec<usize> = (0..self.count()).filter(|&c| self.is_zero(&buffers[depth], c)).collect();
            let weight = flat.iter().map(|&c| self.weights[c]).sum();
            if out.best.as_ref().is_none_or(|b| weight > b.0) {
                out.best = Some((weight, flat));
            }
            return;
        }
        if self.stop.load(Ordering::Relaxed) {
            return;
        }
        let visited = self.nodes.fetch_add(1, Ordering::Relaxed);
        if visited >= self.opts.subset_budget || (visited.is_multiple_of(4096) && self.opts.expired()) {
            self.stop.store(true, Ordering::Relaxed);
            return;
        }
        let restore = forbidden.len();
        let last = *chosen.last().expect("at least one column chosen");
        for c in last + 1..self.count() {
            if self.is_zero(&buffers[depth], c) {
                continue;
            }
            let (head, tail) = buffers.split_at_mut(depth + 1);
            tail[0].resize(self.columns.len(), 0);
            self.eliminate(&head[depth], c, &mut tail[0]);
            // a skipped independent column must stay outside the closure
            if forbidden.iter().all(|&f| !self.is_zero(&tail[0], f)) {
                chosen.push(c);
                self.descend(depth + 1, buffers, chosen, forbidden, out);
                chosen.pop();
            }
            forbidden.push(c);
        }
        forbidden.truncate(restore);
    }
}

/// Result of the coordinate-set search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSearch {
    pub value: u64,
    /// Support of a minimal `r`-dimensional subcode.
    pub support: Vec<usize>,
    /// Number of flats of rank `k - r` visited.
    pub flats: u64,
}

/// Exact `d_r` from the column matroid of the generator, independent of [`ghw_exact_subspaces`].
pub fn ghw_exact_support(generator: &Matrix, r: usize, opts: &SearchOptions) -> Result<u64, GhwError> {
    support_search(generator, r, opts).map(|s| s.value)
}

pub fn support_search(generator: &Matrix, r: usize, opts: &SearchOptions) -> Result<SupportSearch, GhwError> {
    let basis = basis_of(generator);
    let (k, n) = (basis.rows(), basis.cols());
    if r == 0 || r > k {
        return Err(GhwError::BadRank { r, k });
    }
    let field = basis.field().clone();
    let nonzero: Vec<usize> = (0..n).filter(|&c| (0..k).any(|i| basis.get(i, c) != 0)).collect();
    let target_rank = k - r;
    if target_rank == 0 {
        return Ok(SupportSearch { value: nonzero.len() as u64, support: nonzero.clone(), flats: 1 });
    }
    // parallel columns lie in the same flats, so search over their classes
    let mut class_index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut class_of = Vec::with_capacity(nonzero.len());
    let (mut columns, mut weights) = (Vec::new(), Vec::new());
    for &c in &nonzero {
        let col = basis.column(c);
        let lead = col.iter().copied().find(|&x| x != 0).expect("nonzero column");
        let inv = field.inv(lead).expect("nonzero");
        let normal: Vec<u32> = col.iter().map(|&x| field.mul(x, inv)).collect();
        let next = weights.len();
        let class = *class_index.entry(normal.clone()).or_insert(next);
        if class == next {
            columns.extend_from_slice(&normal);
            weights.push(0);
        }
        weights[class] += 1;
        class_of.push(class);
    }
    let complement = |flat: &[usize]| -> Vec<usize> {
        let inside: BTreeSet<usize> = flat.iter().copied().collect();
        nonzero.iter().zip(&class_of).filter(|(_, k)| !inside.contains(k)).map(|(&c, _)| c).collect()
    };
    let classes = weights.len();
    let nodes = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let search = FlatSearch { field: &field, k, columns, weights, target_rank, nodes: &nodes, stop: &stop, opts };
    let firsts: Vec<usize> = (0..classes).collect();
    let outcomes = opts.execution.map(firsts, |first| search.run_chunk(first, &mut Vec::new()));

    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut flats = 0;
    for o in outcomes {
        flats += o.flats;
        if let Some(f) = o.best {
            if best.as_ref().is_none_or(|b| f.0 > b.0) {
                best = Some(f);
            }
        }
    }
    let upper = best.as_ref().map(|b| nonzero.len() as u64 - b.0);
    if stop.load(Ordering::Relaxed) {
        return Err(GhwError::BudgetExceeded { nodes: nodes.load(Ordering::Relaxed), upper_bound: upper });
    }
    let (_, flat) = best.expect("a full-rank basis has flats of every rank");
    let support = complement(&flat);
    Ok(SupportSearch { value: support.len() as u64, support, flats })
}

// -- hierarchies -------------------------------------------------------------

/// Exact hierarchy of an arbitrary generator matrix.
pub fn hierarchy_of_matrix(generator: &Matrix, method: Method, opts: &SearchOptions) -> Result<Vec<u64>, GhwError> {
    let k = generator.rank();
    match method {
        Method::ExactSubspace => (1..=k).map(|r| ghw_exact_subspaces(generator, r, opts).map(|v| v.0)).collect(),
        Method::ExactSupport => (1..=k).map(|r| ghw_exact_support(generator, r, opts)).collect(),
        Method::Duality => {
            let dual = dual_code(generator);
            // a bound on a dual weight says nothing direct about a single d_r of this code
            let dual_values = hierarchy_of_matrix(&dual, Method::ExactSupport, opts).map_err(|e| match e {
                GhwError::BudgetExceeded { nodes, .. } => GhwError::BudgetExceeded { nodes, upper_bound: None },
                e => e,
            })?;
            Ok(hierarchy_from_dual(generator.cols(), &dual_values))
        }
        other => Err(GhwError::NotApplicable(format!("{} needs an evaluation code", other.name()))),
    }
}

/// `{1..n}` minus `{n + 1 - d_r(dual)}`, ascending.
pub fn hierarchy_from_dual(n: usize, dual_values: &[u64]) -> Vec<u64> {
    let excluded: BTreeSet<u64> = dual_values.iter().map(|&v| n as u64 + 1 - v).collect();
    (1..=n as u64).filter(|v| !excluded.contains(v)).collect()
}

fn formula_value(code: &EvaluationCode, r: usize) -> Result<(u64, bool), GhwError> {
    let q = code.field().order() as u64;
    let d = code.degree();
    let to_u64 = |v: BigUint| u64::try_from(v).map_err(|_| GhwError::NotApplicable("value overflows u64".into()));
    match code.family() {
        CodeFamily::Grid(g) if code.is_homogeneous() => {
            if g.zero_in_every_factor {
                Ok((to_u64(ghw_formula_cd(&g.sizes, d, r)?)?, false))
            } else {
                // without 0 in every factor the expression only bounds d_r from below
                ghw_formula_cd(&g.sizes, d, r)?;
                Ok((to_u64(lemma_shadow_lower_bound(&g.sizes, d, r)?)?, true))
            }
        }
        CodeFamily::Grid(g) => {
            if d == 0 {
                return Err(GhwError::NotApplicable("closed form needs d >= 1".into()));
            }
            Ok((to_u64(ghw_formula_cleqd(&g.sizes, d, r)?)?, false))
        }
        CodeFamily::AffinePunctured { m } if code.is_homogeneous() => {
            Ok((to_u64(ghw_formula_affine_punctured(q, *m, d, r)?)?, false))
        }
        CodeFamily::Projective { m } => Ok((to_u64(ghw_formula_projective(q, *m, d, r)?)?, false)),
        _ => Err(GhwError::NotApplicable("no closed form for this evaluation set".into())),
    }
}

fn footprint_record(code: &EvaluationCode, r: usize, opts: &SearchOptions) -> Result<GhwRecord, GhwError> {
    let (sizes, exact) = match code.family() {
        // exact always for C_{<=d}; for C_d only when every factor contains 0
        CodeFamily::Grid(g) => (g.sizes.clone(), !code.is_homogeneous() || g.zero_in_every_factor),
        // removing the origin does not change supports of homogeneous evaluations
        CodeFamily::AffinePunctured { m } if code.is_homogeneous() => (vec![code.field().order() as usize; *m], true),
        _ => return Err(GhwError::NotApplicable("footprint bound needs a Cartesian evaluation set".into())),
    };
    let res = footprint_bound(&sizes, code.degree(), r, code.is_homogeneous(), opts)?;
    Ok(GhwRecord {
        r,
        value: res.value as u64,
        method: Method::Footprint,
        lower_bound_only: !exact,
        witness: Some(Witness::Monomials(res.witness)),
    })
}

/// `d_r` of an evaluation code by one method.
pub fn ghw_value(code: &EvaluationCode, r: usize, method: Method, opts: &SearchOptions) -> Result<GhwRecord, GhwError> {
    let k = code.dimension();
    if r == 0 || r > k {
        return Err(GhwError::BadRank { r, k });
    }
    let record = |value, lower_bound_only, witness| GhwRecord { r, value, method, lower_bound_only, witness };
    match method {
        Method::ExactSubspace => {
            let (v, w) = ghw_exact_subspaces(code.generator(), r, opts)?;
            Ok(record(v, false, Some(Witness::Subcode(w))))
        }
        Method::ExactSupport => {
            let s = support_search(code.generator(), r, opts)?;
            Ok(record(s.value, false, Some(Witness::Support(s.support))))
        }
        Method::Footprint => footprint_record(code, r, opts),
        Method::Formula => {
            let (v, lower) = formula_value(code, r)?;
            Ok(record(v, lower, None))
        }
        Method::Duality => {
            let values = hierarchy_of_matrix(code.generator(), Method::Duality, opts)?;
            Ok(record(values[r - 1], false, None))
        }
    }
}

/// The full hierarchy `d_1 < ... < d_k` by one method, checked for strict monotonicity.
pub fn hierarchy(code: &EvaluationCode, method: Method, opts: &SearchOptions) -> Result<WeightHierarchyReport, GhwError> {
    let k = code.dimension();
    let records: Vec<GhwRecord> = if method == Method::Duality {
        let values = hierarchy_of_matrix(code.generator(), Method::Duality, opts)?;
        values
            .into_iter()
            .enumerate()
            .map(|(i, value)| GhwRecord { r: i + 1, value, method, lower_bound_only: false, witness: None })
            .collect()
    } else {
        (1..=k).map(|r| ghw_value(code, r, method, opts)).collect::<Result<_, _>>()?
    };
    let report = WeightHierarchyReport {
        q: code.field().order(),
        n: code.len(),
        k,
        d: code.degree(),
        homogeneous: code.is_homogeneous(),
        family: code.family().clone(),
        records,
    };
    if report.records.len() != k {
        return Err(GhwError::Inconsistent(format!("{} values for dimension {k}", report.records.len())));
    }
    if report.records.iter().all(|r| !r.lower_bound_only) && !verify_monotonicity(&report.values(), report.n) {
        return Err(GhwError::Inconsistent(format!("hierarchy {:?} is not strictly increasing", report.values())));
    }
    Ok(report)
}

/// `1 <= d_1 < d_2 < ... < d_k <= n`.
pub fn verify_monotonicity(values: &[u64], n: usize) -> bool {
    values.first().is_none_or(|&v| v >= 1)
        && values.last().is_none_or(|&v| v <= n as u64)
        && values.windows(2).all(|w| w[0] < w[1])
}

/// Checks `{d_r(C)} = {1..n} \ {n + 1 - d_r(C^perp)}` with both hierarchies computed exactly.
pub fn verify_wei_duality(generator: &Matrix, opts: &SearchOptions) -> Result<bool, GhwError> {
    let n = generator.cols();
    let primal = hierarchy_of_matrix(generator, Method::ExactSupport, opts)?;
    let dual = hierarchy_of_matrix(&dual_code(generator), Method::ExactSupport, opts)?;
    let from_dual = hierarchy_from_dual(n, &dual);
    Ok(primal == from_dual && primal.len() + dual.len() == n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartesian::CartesianSet;

    fn f(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    fn repetition() -> Matrix {
        Matrix::from_rows(&f(2), &[vec![1, 1, 1]]).unwrap()
    }

    #[test]
    fn repetition_code() {
        let opts = SearchOptions::default();
        let (v, w) = ghw_exact_subspaces(&repetition(), 1, &opts).unwrap();
        assert_eq!(v, 3);
        assert_eq!(w.support, vec![0, 1, 2]);
        assert_eq!(ghw_exact_support(&repetition(), 1, &opts).unwrap(), 3);
        assert!(matches!(ghw_exact_subspaces(&repetition(), 2, &opts), Err(GhwError::BadRank { .. })));
    }

    #[test]
    fn binary_cube_linear_forms() {
        let opts = SearchOptions::default();
        let code = CartesianSet::affine(&f(2), 3).build_code(1, true).unwrap();
        for method in [Method::ExactSubspace, Method::ExactSupport, Method::Duality, Method::Footprint, Method::Formula] {
            assert_eq!(hierarchy(&code, method, &opts).unwrap().values(), vec![4, 6, 7], "{method:?}");
        }
        let square = CartesianSet::affine(&f(2), 2).build_code(1, true).unwrap();
        assert_eq!(hierarchy(&square, Method::ExactSubspace, &opts).unwrap().values(), vec![2, 3]);
    }

    #[test]
    fn last_weight_is_support() {
        let opts = SearchOptions::default();
        let g = Matrix::from_rows(&f(3), &[vec![1, 0, 2, 0, 0], vec![0, 1, 1, 0, 0]]).unwrap();
        assert_eq!(ghw_exact_subspaces(&g, 2, &opts).unwrap().0, 3);
        assert_eq!(ghw_exact_support(&g, 2, &opts).unwrap(), 3);
    }

    #[test]
    fn monotonicity_examples() {
        assert!(verify_monotonicity(&[4, 6, 7], 8));
        assert!(!verify_monotonicity(&[3, 3], 4));
        assert!(!verify_monotonicity(&[0, 2], 4));
        assert!(!verify_monotonicity(&[2, 5], 4));
        assert!(verify_monotonicity(&[], 4));
    }

    #[test]
    fn duality_examples() {
        let opts = SearchOptions::default();
        assert!(verify_wei_duality(&repetition(), &opts).unwrap());
        assert_eq!(hierarchy_of_matrix(&dual_code(&repetition()), Method::ExactSupport, &opts).unwrap(), vec![2, 3]);
        assert!(verify_wei_duality(&Matrix::identity(&f(2), 2), &opts).unwrap());
        let code = CartesianSet::affine(&f(2), 3).build_code(1, true).unwrap();
        assert!(verify_wei_duality(code.generator(), &opts).unwrap());
    }

    #[test]
    fn witness_is_consistent() {
        let opts = SearchOptions::default();
        let code = CartesianSet::affine(&f(3), 3).build_code(2, true).unwrap();
        for r in 1..=3 {
            let (v, w) = ghw_exact_subspaces(code.generator(), r, &opts).unwrap();
            let coeffs = Matrix::from_rows(&f(3), &w.coefficients).unwrap();
            assert_eq!(coeffs.rank(), r);
            let sub = coeffs.mul(code.generator()).unwrap();
            assert_eq!(sub.row_space_support().into_iter().collect::<Vec<_>>(), w.support);
            assert_eq!(w.support_size() as u64, v);
        }
    }

    #[test]
    fn cap_and_budget_errors() {
        let code = CartesianSet::affine(&f(3), 4).build_code(2, true).unwrap();
        let capped = SearchOptions { subspace_cap: 10, ..SearchOptions::default() };
        assert!(matches!(ghw_exact_subspaces(code.generator(), 2, &capped), Err(GhwError::CapExceeded { .. })));
        let tight = SearchOptions { subset_budget: 5, ..SearchOptions::sequential() };
        assert!(matches!(ghw_exact_support(code.generator(), 2, &tight), Err(GhwError::BudgetExceeded { .. })));
        assert!(matches!(ghw_exact_subspaces(code.generator(), 2, &tight), Err(GhwError::BudgetExceeded { .. })));
    }

    #[test]
    fn sequential_matches_parallel() {
        let code = CartesianSet::parse(&f(5), "0,1;0,1,2;0,1,2,3").unwrap().build_code(1, false).unwrap();
        let seq = SearchOptions::sequential();
        let par = SearchOptions::default();
        for r in 1..=code.dimension() {
            assert_eq!(
                ghw_exact_subspaces(code.generator(), r, &seq).unwrap(),
                ghw_exact_subspaces(code.generator(), r, &par).unwrap()
            );
            assert_eq!(support_search(code.generator(), r, &seq).unwrap(), support_search(code.generator(), r, &par).unwrap());
        }
    }

    #[test]
    fn torus_formula_is_lower_bound_only() {
        let opts = SearchOptions::default();
        let code = CartesianSet::torus(&f(3), 3).build_code(1, true).unwrap();
        let rec = ghw_value(&code, 1, Method::Formula, &opts).unwrap();
        assert!(rec.lower_bound_only);
        let fp = ghw_value(&code, 1, Method::Footprint, &opts).unwrap();
        assert!(fp.lower_bound_only);
        let exact = ghw_value(&code, 1, Method::ExactSupport, &opts).unwrap();
        assert!(exact.value >= fp.value && fp.value >= rec.value);
    }

    #[test]
    fn torus_quadrics_third_weight() {
        let code = CartesianSet::torus(&f(3), 5).build_code(2, true).unwrap();
        assert_eq!((code.len(), code.dimension()), (32, 10));
        assert_eq!(ghw_exact_support(code.generator(), 3, &SearchOptions::default()).unwrap(), 16);
        let fp = ghw_value(&code, 3, Method::Footprint, &SearchOptions::default()).unwrap();
        assert_eq!(fp.value, 14);
    }
}
