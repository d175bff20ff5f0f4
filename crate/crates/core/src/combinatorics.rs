//! Square-free exponent tuples, the degree-lexicographic order on them, and
//! a few counting helpers.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Exponent tuples are packed into a `u64`, so at most 64 variables.
pub const MAX_VARS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombError {
    #[error("degree {d} out of range for {m} variables")]
    BadDegree { m: usize, d: usize },
    #[error("dimension mismatch: {0} vs {1} variables")]
    DimensionMismatch(usize, usize),
    #[error("invalid arguments: {0}")]
    BadArgs(String),
}

/// A tuple in `{0,1}^m`, i.e. a square-free monomial. Bit `i` of the mask is
/// the exponent of the `(i+1)`-th variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SquareFreeExponent {
    mask: u64,
    m: u8,
}

impl SquareFreeExponent {
    pub fn from_mask(m: usize, mask: u64) -> Result<Self, CombError> {
        if m > MAX_VARS || (m < 64 && mask >> m != 0) {
            return Err(CombError::BadArgs(format!("mask {mask:#b} does not fit {m} variables")));
        }
        Ok(Self { mask, m: m as u8 })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self, CombError> {
        if bits.len() > MAX_VARS {
            return Err(CombError::BadArgs(format!("{} variables exceed {MAX_VARS}", bits.len())));
        }
        let mut mask = 0;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => mask |= 1 << i,
                _ => return Err(CombError::BadArgs(format!("entry {b} is not 0 or 1"))),
            }
        }
        Ok(Self { mask, m: bits.len() as u8 })
    }

    /// Monomial `x_{i_1} ... x_{i_s}` from 0-based variable indices.
    pub fn from_support(m: usize, support: &[usize]) -> Result<Self, CombError> {
        let mut mask = 0u64;
        for &i in support {
            if i >= m {
                return Err(CombError::BadArgs(format!("variable {i} out of range")));
            }
            mask |= 1 << i;
        }
        Self::from_mask(m, mask)
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn vars(&self) -> usize {
        self.m as usize
    }

    pub fn degree(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.vars()).map(|i| ((self.mask >> i) & 1) as u8).collect()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.vars()).filter(|&i| self.mask >> i & 1 == 1).collect()
    }

    /// Renders as `x1x2`, with 1-based indices starting at `first_index`.
    pub fn render(&self, first_index: usize) -> String {
        if self.mask == 0 {
            return "1".to_string();
        }
        self.support().iter().map(|i| format!("x{}", i + first_index)).collect()
    }
}

impl fmt::Display for SquareFreeExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(1))
    }
}

impl Serialize for SquareFreeExponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render(1))
    }
}

fn deglex(a: &SquareFreeExponent, b: &SquareFreeExponent) -> Ordering {
    a.degree().cmp(&b.degree()).then_with(|| {
        let diff = a.mask ^ b.mask;
        if diff == 0 {
            Ordering::Equal
        } else if a.mask >> diff.trailing_zeros() & 1 == 1 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    })
}

impl PartialOrd for SquareFreeExponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree-lexicographic: higher degree is larger; at equal degree the tuple
/// with a 1 at the first differing position is larger.
impl Ord for SquareFreeExponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.m.cmp(&other.m).then_with(|| deglex(self, other))
    }
}

pub fn deglex_compare(a: &SquareFreeExponent, b: &SquareFreeExponent) -> Result<Ordering, CombError> {
    if a.m != b.m {
        return Err(CombError::DimensionMismatch(a.vars(), b.vars()));
    }
    Ok(deglex(a, b))
}

/// An exponent `beta` inside the staircase box `prod {0..n_i-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxExponent {
    entries: Vec<u32>,
    sizes: Vec<u32>,
}

impl BoxExponent {
    pub fn new(entries: Vec<u32>, sizes: Vec<u32>) -> Result<Self, CombError> {
        if entries.len() != sizes.len() {
            return Err(CombError::DimensionMismatch(entries.len(), sizes.len()));
        }
        if let Some(i) = (0..sizes.len()).find(|&i| sizes[i] == 0 || entries[i] >= sizes[i]) {
            return Err(CombError::BadArgs(format!(
                "entry {} not below size {} at position {i}",
                entries[i], sizes[i]
            )));
        }
        Ok(Self { entries, sizes })
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    /// Positions with a nonzero exponent, as a mask.
    pub fn support_mask(&self) -> u64 {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &b)| b > 0)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }
}

/// Square-free divisibility: `x^a | x^b` iff `b_i >= 1` on the support of `a`.
pub fn divides(a: &SquareFreeExponent, b: &BoxExponent) -> Result<bool, CombError> {
    if a.vars() != b.entries.len() {
        return Err(CombError::DimensionMismatch(a.vars(), b.entries.len()));
    }
    Ok(a.mask & !b.support_mask() == 0)
}

fn check_degree(m: usize, d: usize) -> Result<(), CombError> {
    if m > MAX_VARS || d > m {
        return Err(CombError::BadDegree { m, d });
    }
    Ok(())
}

// All masks of popcount d over m bits.
fn masks_of_weight(m: usize, d: usize) -> Vec<u64> {
    fn go(start: usize, m: usize, left: usize, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..=m - left {
            go(i + 1, m, left - 1, acc | 1 << i, out);
        }
    }
    let mut out = Vec::new();
    go(0, m, d, 0, &mut out);
    out
}

/// `S_d(m)` in descending deglex order.
pub fn enumerate_sd(m: usize, d: usize) -> Result<Vec<SquareFreeExponent>, CombError> {
    check_degree(m, d)?;
    let mut out: Vec<_> = masks_of_weight(m, d)
        .into_iter()
        .map(|mask| SquareFreeExponent { mask, m: m as u8 })
        .collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    Ok(out)
}

/// `S_{<=d}(m)` in descending deglex order.
pub fn enumerate_sleqd(m: usize, d: usize) -> Result<Vec<SquareFreeExponent>, CombError> {
    check_degree(m, d)?;
    let mut out = Vec::new();
    for deg in (0..=d).rev() {
        out.extend(enumerate_sd(m, deg)?);
    }
    Ok(out)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn binomial_u64(n: u64, k: u64) -> u64 {
    u64::try_from(binomial(n, k)).unwrap_or(u64::MAX)
}

/// Number of `r`-dimensional subspaces of `F_q^k`.
pub fn gaussian_binomial(k: u64, r: u64, q: u64) -> Result<BigUint, CombError> {
    if r > k || q < 2 {
        return Err(CombError::BadArgs(format!("gaussian_binomial({k}, {r}, {q})")));
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..r {
        num *= q.pow((k - i) as u32) - 1u32;
        den *= q.pow((i + 1) as u32) - 1u32;
    }
    Ok(num / den)
}
