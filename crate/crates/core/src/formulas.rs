//! Closed-form generalized Hamming weights, exact in arbitrary precision.
//!
//! Size vectors are sorted ascending before use, and every size must be at
//! least 2. Ranges outside the proven ones are rejected with
//! [`FormulaError::BadRange`] rather than answered.

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::combinatorics::binomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("parameters out of range: {0}")]
    BadRange(String),
    #[error("invalid sizes: {0}")]
    BadSizes(String),
    #[error("size condition fails; {lower_bound} is only a lower bound")]
    ConditionFails { lower_bound: BigUint },
}

fn sorted_sizes(sizes: &[usize]) -> Result<Vec<u64>, FormulaError> {
    if sizes.is_empty() {
        return Err(FormulaError::BadSizes("no factors".into()));
    }
    if let Some(&n) = sizes.iter().find(|&&n| n < 2) {
        return Err(FormulaError::BadSizes(format!("factor of size {n}; formulas need sizes >= 2")));
    }
    let mut s: Vec<u64> = sizes.iter().map(|&n| n as u64).collect();
    s.sort_unstable();
    Ok(s)
}

fn check_range(m: usize, d: usize, r: usize) -> Result<(), FormulaError> {
    if d < 1 || d > m || r < 1 || r + d > m + 1 {
        return Err(FormulaError::BadRange(format!("need 1 <= d <= m and 1 <= r <= m + 1 - d (m={m}, d={d}, r={r})")));
    }
    Ok(())
}

/// Side condition on the sorted sizes: for every `d <= i < j <= d + r - 2`,
/// `n_{d+r-1} n_{d-1} (n_i + n_j - 1) <= (n_{d+r-1} + n_{d-1} - 1) n_i n_j`,
/// with indices from 1 and `n_0 = 1`.
pub fn condition_holds(sizes: &[usize], d: usize, r: usize) -> Result<bool, FormulaError> {
    let n = sorted_sizes(sizes)?;
    check_range(n.len(), d, r)?;
    let at = |i: usize| -> u128 { if i == 0 { 1 } else { n[i - 1] as u128 } };
    let top = at(d + r - 1);
    let low = at(d - 1);
    for i in d..=(d + r).saturating_sub(2) {
        for j in i + 1..=d + r - 2 {
            let (ni, nj) = (at(i), at(j));
            if top * low * (ni + nj - 1) > (top + low - 1) * ni * nj {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn product(values: impl Iterator<Item = u64>) -> BigUint {
    values.fold(BigUint::one(), |acc, v| acc * v)
}

/// `prod_{i<d} (n_i - 1) * prod_{i>=d+r} n_i * (prod_{d<=i<d+r} n_i - 1)`, 1-based indices.
pub fn lemma_shadow_lower_bound(sizes: &[usize], d: usize, r: usize) -> Result<BigUint, FormulaError> {
    let n = sorted_sizes(sizes)?;
    check_range(n.len(), d, r)?;
    let head = product(n[..d - 1].iter().map(|&x| x - 1));
    let tail = product(n[d + r - 1..].iter().copied());
    let middle = product(n[d - 1..d + r - 1].iter().copied()) - 1u32;
    Ok(head * tail * middle)
}

/// `d_r(C_d)` for a Cartesian set with `0` in every factor.
pub fn ghw_formula_cd(sizes: &[usize], d: usize, r: usize) -> Result<BigUint, FormulaError> {
    let value = lemma_shadow_lower_bound(sizes, d, r)?;
    if !condition_holds(sizes, d, r)? {
        return Err(FormulaError::ConditionFails { lower_bound: value });
    }
    Ok(value)
}

/// `d_r(C_{<=d})` for any Cartesian set; same expression as [`ghw_formula_cd`].
pub fn ghw_formula_cleqd(sizes: &[usize], d: usize, r: usize) -> Result<BigUint, FormulaError> {
    ghw_formula_cd(sizes, d, r)
}

fn check_q(q: u64) -> Result<(), FormulaError> {
    if q < 2 {
        return Err(FormulaError::BadRange(format!("q = {q}")));
    }
    Ok(())
}

/// `(q-1)^{d-1} q^{m-d-r+1} (q^r - 1)`: the code of degree-`d` square-free
/// monomials on `F_q^m` minus the origin.
pub fn ghw_formula_affine_punctured(q: u64, m: usize, d: usize, r: usize) -> Result<BigUint, FormulaError> {
    check_q(q)?;
    check_range(m, d, r)?;
    let qb = BigUint::from(q);
    Ok(BigUint::from(q - 1).pow(d as u32 - 1) * qb.pow((m + 1 - d - r) as u32) * (qb.pow(r as u32) - 1u32))
}

/// `(q-1)^{d-2} q^{m-d-r+2} (q^r - 1)` for the projective code; for `d = 1`
/// the factor `(q^r - 1)/(q - 1)` is an exact quotient.
pub fn ghw_formula_projective(q: u64, m: usize, d: usize, r: usize) -> Result<BigUint, FormulaError> {
    check_q(q)?;
    if d < 1 || d > m + 1 || r < 1 || r + d > m + 2 {
        return Err(FormulaError::BadRange(format!(
            "need 1 <= d <= m + 1 and 1 <= r <= m + 2 - d (m={m}, d={d}, r={r})"
        )));
    }
    let qb = BigUint::from(q);
    let power = qb.pow((m + 2 - d - r) as u32);
    let geometric = qb.pow(r as u32) - 1u32;
    if d == 1 {
        let (quot, rem) = (&geometric / (q - 1), &geometric % (q - 1));
        debug_assert_eq!(rem, BigUint::from(0u32));
        Ok(power * quot)
    } else {
        Ok(power * geometric * BigUint::from(q - 1).pow(d as u32 - 2))
    }
}

/// Number of projective points of `P^m(F_q)` with exactly `w` nonzero coordinates.
pub fn projective_points_of_weight(q: u64, m: usize, w: usize) -> BigUint {
    if w == 0 {
        return BigUint::from(0u32);
    }
    binomial(m as u64 + 1, w as u64) * BigUint::from(q - 1).pow(w as u32 - 1)
}

/// `(full, nondegenerate)` lengths of the degree-`d` projective code: all
/// `(q^{m+1}-1)/(q-1)` points, and the points with at least `d` nonzero coordinates.
pub fn projective_lengths(q: u64, m: usize, d: usize) -> Result<(BigUint, BigUint), FormulaError> {
    check_q(q)?;
    if d < 1 {
        return Err(FormulaError::BadRange("d must be at least 1".into()));
    }
    let qb = BigUint::from(q);
    let full = (qb.pow(m as u32 + 1) - 1u32) / (q - 1);
    let degenerate: BigUint = (1..d.min(m + 2)).map(|w| projective_points_of_weight(q, m, w)).sum();
    let nondegenerate = if degenerate > full { BigUint::from(0u32) } else { &full - degenerate };
    Ok((full, nondegenerate))
}

/// `(dim C_d, dim C_{<=d}, dim of the projective code)` = `(C(m,d), sum_{i<=d} C(m,i), C(m+1,d))`.
pub fn code_dimensions(m: usize, d: usize) -> (BigUint, BigUint, BigUint) {
    let (m, d) = (m as u64, d as u64);
    (binomial(m, d), (0..=d).map(|i| binomial(m, i)).sum(), binomial(m + 1, d))
}
