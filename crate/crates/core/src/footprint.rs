//! Shadows of square-free monomial sets inside the staircase box
//! `B_X = prod {0, ..., n_i - 1}` and the footprint-bound minimisation.
//!
//! For a set `N` of square-free monomials the shadow is the set of box
//! exponents divisible by some member of `N`. Its size is a lower bound for
//! the support of any `|N|`-dimensional subcode with those leading monomials.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cartesian::evaluate_monomial;
use crate::combinatorics::{enumerate_sd, enumerate_sleqd, CombError, SquareFreeExponent};
use crate::exec::SearchOptions;
use crate::field::Field;

/// Box size up to which `shadow_size_enum` walks every exponent.
pub const DEFAULT_ENUM_BUDGET: u128 = 10_000_000;
/// Largest monomial set accepted by the inclusion-exclusion count.
pub const MAX_IE_MONOMIALS: usize = 30;
/// The footprint search keeps one flag per variable subset.
pub const MAX_SEARCH_VARS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FootprintError {
    #[error("box of {size} exponents exceeds the enumeration budget {budget}")]
    BudgetExceeded { size: u128, budget: u128 },
    #[error("{0} monomials exceed the inclusion-exclusion limit of {MAX_IE_MONOMIALS}")]
    TooManyMonomials(usize),
    #[error("search budget exhausted; best value so far {}", partial.value)]
    SearchBudgetExceeded { partial: Box<FootprintResult> },
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error(transparent)]
    Comb(#[from] CombError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShadowMethod {
    Enumeration,
    InclusionExclusion,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShadowReport {
    pub monomials: Vec<SquareFreeExponent>,
    #[serde(serialize_with = "crate::serialize_display")]
    pub shadow_size: BigUint,
    pub method: ShadowMethod,
    pub sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FootprintResult {
    pub r: usize,
    pub d: usize,
    pub homogeneous: bool,
    pub value: u128,
    pub witness: Vec<SquareFreeExponent>,
    /// Positions of the witness in the descending-deglex monomial pool.
    pub witness_ranks: Vec<usize>,
    /// Complete `r`-subsets whose shadow was evaluated.
    pub examined: u64,
    /// False when the search stopped early; `value` is then only an upper bound on the minimum.
    pub complete: bool,
}

fn check_monomials(sizes: &[usize], monomials: &[SquareFreeExponent]) -> Result<(), FootprintError> {
    if sizes.contains(&0) {
        return Err(FootprintError::BadInput("factor sizes must be positive".into()));
    }
    if monomials.is_empty() {
        return Err(FootprintError::BadInput("empty monomial set".into()));
    }
    for (i, a) in monomials.iter().enumerate() {
        if a.vars() != sizes.len() {
            return Err(CombError::DimensionMismatch(a.vars(), sizes.len()).into());
        }
        if monomials[..i].contains(a) {
            return Err(FootprintError::BadInput(format!("monomial {a} repeated")));
        }
    }
    Ok(())
}

/// Counts the box exponents `beta` with `supp(alpha) ⊆ supp(beta)` for some `alpha` in `monomials`,
/// by walking the whole box.
pub fn shadow_size_enum(sizes: &[usize], monomials: &[SquareFreeExponent], budget: u128) -> Result<u128, FootprintError> {
    check_monomials(sizes, monomials)?;
    let size = sizes.iter().try_fold(1u128, |acc, &n| acc.checked_mul(n as u128)).unwrap_or(u128::MAX);
    if size > budget {
        return Err(FootprintError::BudgetExceeded { size, budget });
    }
    let m = sizes.len();
    let masks: Vec<u64> = monomials.iter().map(SquareFreeExponent::mask).collect();
    let mut beta = vec![0usize; m];
    let mut count = 0u128;
    loop {
        let support = beta.iter().enumerate().filter(|(_, &b)| b > 0).fold(0u64, |acc, (i, _)| acc | 1 << i);
        if masks.iter().any(|&a| a & !support == 0) {
            count += 1;
        }
        let mut pos = m;
        loop {
            if pos == 0 {
                return Ok(count);
            }
            pos -= 1;
            beta[pos] += 1;
            if beta[pos] < sizes[pos] {
                break;
            }
            beta[pos] = 0;
        }
    }
}

/// Inclusion-exclusion over the nonempty subsets `A` of `monomials`:
/// `sum (-1)^{|A|-1} prod_{i in U(A)} (n_i - 1) prod_{i not in U(A)} n_i` with `U(A)` the union of supports.
///
/// Subsets sharing the same union are grouped before the products are formed.
pub fn shadow_size_ie(sizes: &[usize], monomials: &[SquareFreeExponent]) -> Result<BigUint, FootprintError> {
    check_monomials(sizes, monomials)?;
    if monomials.len() > MAX_IE_MONOMIALS {
        return Err(FootprintError::TooManyMonomials(monomials.len()));
    }
    // signed count of subsets A (including the empty one) per union, sign (-1)^{|A|}
    let mut by_union: BTreeMap<u64, i64> = BTreeMap::from([(0, 1)]);
    for a in monomials {
        let snapshot: Vec<(u64, i64)> = by_union.iter().map(|(&u, &c)| (u, c)).collect();
        for (u, c) in snapshot {
            *by_union.entry(u | a.mask()).or_insert(0) -= c;
        }
    }
    let term = |union: u64| -> BigUint {
        sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| BigUint::from(if union >> i & 1 == 1 { n - 1 } else { n }))
            .product()
    };
    // sum over all A of (-1)^{|A|} f(U(A)) = f(empty) - shadow
    let mut alternating = BigInt::zero();
    for (&u, &c) in &by_union {
        if c != 0 {
            alternating += BigInt::from(c) * BigInt::from(term(u));
        }
    }
    let shadow = BigInt::from(term(0)) - alternating;
    debug_assert!(!shadow.is_negative());
    Ok(shadow.to_biguint().expect("shadow size is non-negative"))
}

/// Computes the shadow by enumeration when the box is small enough, by
/// inclusion-exclusion otherwise, and cross-checks whenever both apply.
pub fn shadow_report(sizes: &[usize], monomials: &[SquareFreeExponent]) -> Result<ShadowReport, FootprintError> {
    let enumerated = match shadow_size_enum(sizes, monomials, DEFAULT_ENUM_BUDGET) {
        Ok(v) => Some(v),
        Err(FootprintError::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let ie = match shadow_size_ie(sizes, monomials) {
        Ok(v) => Some(v),
        Err(FootprintError::TooManyMonomials(_)) if enumerated.is_some() => None,
        Err(e) => return Err(e),
    };
    let (shadow_size, method) = match (enumerated, ie) {
        (Some(e), Some(i)) => {
            assert_eq!(BigUint::from(e), i, "shadow methods disagree");
            (i, ShadowMethod::Enumeration)
        }
        (Some(e), None) => (BigUint::from(e), ShadowMethod::Enumeration),
        (None, Some(i)) => (i, ShadowMethod::InclusionExclusion),
        (None, None) => unreachable!(),
    };
    Ok(ShadowReport { monomials: monomials.to_vec(), shadow_size, method, sizes: sizes.to_vec() })
}

/// Number of points at which every monomial of `monomials` evaluates to zero.
pub fn vanishing_count(field: &Field, points: &[Vec<u32>], monomials: &[SquareFreeExponent]) -> usize {
    points
        .iter()
        .filter(|p| monomials.iter().all(|a| evaluate_monomial(field, a, p) == 0))
        .count()
}

/// Per-support-pattern weights: `weight[T] = prod_{i in T} (n_i - 1)` is the
/// number of box exponents whose support is exactly `T`.
struct PatternWeights {
    m: usize,
    weight: Vec<u128>,
}

impl PatternWeights {
    fn new(sizes: &[usize]) -> Result<Self, FootprintError> {
        let m = sizes.len();
        if m > MAX_SEARCH_VARS {
            return Err(FootprintError::BadInput(format!("{m} variables exceed the search limit {MAX_SEARCH_VARS}")));
        }
        let mut weight = vec![1u128; 1 << m];
        for t in 1..1usize << m {
            let low = t.trailing_zeros() as usize;
            weight[t] = weight[t & (t - 1)]
                .checked_mul(sizes[low] as u128 - 1)
                .ok_or_else(|| FootprintError::BadInput("box too large".into()))?;
        }
        Ok(Self { m, weight })
    }

    fn full(&self) -> u64 {
        (1u64 << self.m) - 1
    }
}

/// Covered support patterns for the monomials chosen so far.
struct Coverage<'a> {
    weights: &'a PatternWeights,
    covered: Vec<bool>,
    total: u128,
    undo: Vec<Vec<u64>>,
}

impl<'a> Coverage<'a> {
    fn new(weights: &'a PatternWeights) -> Self {
        Self { weights, covered: vec![false; 1 << weights.m], total: 0, undo: Vec::new() }
    }

    fn push(&mut self, alpha: u64) {
        let full = self.weights.full();
        let mut newly = Vec::new();
        let mut t = alpha;
        loop {
            if !self.covered[t as usize] {
                self.covered[t as usize] = true;
                self.total += self.weights.weight[t as usize];
                newly.push(t);
            }
            if t == full {
                break;
            }
            t = (t + 1) | alpha;
        }
        self.undo.push(newly);
    }

    fn pop(&mut self) {
        for t in self.undo.pop().expect("push before pop") {
            self.covered[t as usize] = false;
            self.total -= self.weights.weight[t as usize];
        }
    }
}

struct ChunkOutcome {
    best: Option<(u128, Vec<usize>)>,
    examined: u64,
}

struct SubsetSearch<'a> {
    pool: &'a [u64],
    r: usize,
    weights: &'a PatternWeights,
    nodes: &'a AtomicU64,
    stop: &'a AtomicBool,
    opts: &'a SearchOptions,
}

impl SubsetSearch<'_> {
    fn run_chunk(&self, first: usize, seed: u128) -> ChunkOutcome {
        let mut cov = Coverage::new(self.weights);
        let mut chosen = vec![first];
        let mut out = ChunkOutcome { best: None, examined: 0 };
        let mut bound = seed;
        cov.push(self.pool[first]);
        if cov.total < bound {
            self.descend(&mut cov, &mut chosen, &mut bound, &mut out);
        }
        out
    }

    fn descend(&self, cov: &mut Coverage, chosen: &mut Vec<usize>, bound: &mut u128, out: &mut ChunkOutcome) {
        if chosen.len() == self.r {
            out.examined += 1;
            if cov.total < *bound {
                *bound = cov.total;
                out.best = Some((cov.total, chosen.clone()));
            }
            return;
        }
        if self.stop.load(Ordering::Relaxed) {
            return;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed);
        if n >= self.opts.subset_budget || (n.is_multiple_of(4096) && self.opts.expired()) {
            self.stop.store(true, Ordering::Relaxed);
            return;
        }
        let start = chosen.last().map_or(0, |&i| i + 1);
        let need = self.r - chosen.len();
        for i in start..=self.pool.len() - need {
            cov.push(self.pool[i]);
            // shadows only grow, so a partial set at or above the bound is dead
            if cov.total < *bound {
                chosen.push(i);
                self.descend(cov, chosen, bound, out);
                chosen.pop();
            }
            cov.pop();
        }
    }
}

/// Minimises the shadow size over all `r`-subsets of the square-free monomials
/// of degree `d` (or `<= d`). Ties go to the lexicographically smallest tuple
/// of pool ranks, the pool being sorted in descending deglex order.
pub fn footprint_bound(
    sizes: &[usize],
    d: usize,
    r: usize,
    homogeneous: bool,
    opts: &SearchOptions,
) -> Result<FootprintResult, FootprintError> {
    let m = sizes.len();
    if sizes.contains(&0) {
        return Err(FootprintError::BadInput("factor sizes must be positive".into()));
    }
    let pool = if homogeneous {
        if d == 0 {
            return Err(CombError::BadDegree { m, d }.into());
        }
        enumerate_sd(m, d)?
    } else {
        enumerate_sleqd(m, d)?
    };
    if r == 0 || r > pool.len() {
        return Err(FootprintError::BadInput(format!("r = {r} outside 1..={}", pool.len())));
    }
    let weights = PatternWeights::new(sizes)?;
    let masks: Vec<u64> = pool.iter().map(SquareFreeExponent::mask).collect();

    // the lexicographically first subset seeds the bound
    let mut cov = Coverage::new(&weights);
    for &a in &masks[..r] {
        cov.push(a);
    }
    let seed = cov.total;
    drop(cov);

    let nodes = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let search = SubsetSearch { pool: &masks, r, weights: &weights, nodes: &nodes, stop: &stop, opts };
    let firsts: Vec<usize> = (0..=masks.len() - r).collect();
    let outcomes = opts.execution.map(firsts, |first| search.run_chunk(first, seed));

    let mut value = seed;
    let mut ranks: Vec<usize> = (0..r).collect();
    let mut examined = 1;
    for o in outcomes {
        examined += o.examined;
        if let Some((v, w)) = o.best {
            if v < value {
                value = v;
                ranks = w;
            }
        }
    }
    let result = FootprintResult {
        r,
        d,
        homogeneous,
        value,
        witness: ranks.iter().map(|&i| pool[i]).collect(),
        witness_ranks: ranks,
        examined,
        complete: !stop.load(Ordering::Relaxed),
    };
    if result.complete {
        Ok(result)
    } else {
        Err(FootprintError::SearchBudgetExceeded { partial: Box::new(result) })
    }
}

/// Shadow size of a single monomial: `prod_{i in supp} (n_i - 1) prod_{else} n_i`.
pub fn single_monomial_shadow(sizes: &[usize], a: &SquareFreeExponent) -> BigUint {
    sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| BigUint::from(if a.mask() >> i & 1 == 1 { n - 1 } else { n }))
        .fold(BigUint::one(), |acc, x| acc * x)
}
