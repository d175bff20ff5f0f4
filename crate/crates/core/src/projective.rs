//! Projective points, the square-free projective code, and its relation to
//! the code on `F_q^{m+1}` minus the origin.
//!
//! Ordering `A^{m+1} \ {0}` as the blocks `P, xi P, ..., xi^{q-2} P` makes
//! every generator row of the punctured affine code equal to
//! `(1, xi^d, ..., xi^{d(q-2)}) (x) row`, so its supports are `q - 1` copies
//! of the projective ones.

use serde::Serialize;

use crate::cartesian::{build_code_on_points, CodeError, CodeFamily, EvaluationCode};
use crate::field::Field;

/// One representative per point of `P^m(F_q)`, first nonzero coordinate equal to 1.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectiveFrame {
    #[serde(skip)]
    field: Field,
    pub q: u32,
    pub m: usize,
    pub xi: u32,
    pub representatives: Vec<Vec<u32>>,
}

impl ProjectiveFrame {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.q as usize - 1
    }
}

/// Representatives in lexicographic order of their encodings.
pub fn representatives(field: &Field, m: usize) -> ProjectiveFrame {
    let q = field.order();
    let mut reps = Vec::new();
    for lead in 0..=m {
        let tail = m - lead;
        let count = (q as u64).pow(tail as u32);
        for idx in 0..count {
            let mut p = vec![0u32; m + 1];
            p[lead] = 1;
            let mut x = idx;
            for c in (lead + 1..=m).rev() {
                p[c] = (x % q as u64) as u32;
                x /= q as u64;
            }
            reps.push(p);
        }
    }
    reps.sort();
    ProjectiveFrame { field: field.clone(), q, m, xi: field.xi(), representatives: reps }
}

/// Degree-`d` square-free monomials in `x_0..x_m` evaluated at the frame.
pub fn build_projective_code(frame: &ProjectiveFrame, d: usize) -> Result<EvaluationCode, CodeError> {
    Ok(build_code_on_points(&frame.field, frame.m + 1, &frame.representatives, d, true)?
        .with_family(CodeFamily::Projective { m: frame.m }))
}

/// `A^{m+1} \ {0}` as `P, xi P, ..., xi^{q-2} P`, each block in frame order.
pub fn affine_order(frame: &ProjectiveFrame) -> Vec<Vec<u32>> {
    let f = &frame.field;
    (0..frame.block_count() as i64)
        .flat_map(|i| {
            let s = f.xi_pow(i);
            frame.representatives.iter().map(move |p| p.iter().map(|&x| f.mul(s, x)).collect())
        })
        .collect()
}

/// The degree-`d` homogeneous code on `F_q^{m+1}` minus the origin, points in [`affine_order`].
pub fn build_affine_punctured_code(frame: &ProjectiveFrame, d: usize) -> Result<EvaluationCode, CodeError> {
    Ok(build_code_on_points(&frame.field, frame.m + 1, &affine_order(frame), d, true)?
        .with_family(CodeFamily::AffinePunctured { m: frame.m + 1 }))
}

/// Checks that each affine row is `(1, xi^d, ..., xi^{d(q-2)})` tensored with
/// the matching projective row, and that both codes have the same dimension.
pub fn verify_tensor_relation(frame: &ProjectiveFrame, d: usize) -> Result<bool, CodeError> {
    let proj = build_projective_code(frame, d)?;
    let aff = build_affine_punctured_code(frame, d)?;
    if proj.dimension() != aff.dimension() || proj.monomials() != aff.monomials() {
        return Ok(false);
    }
    let f = &frame.field;
    let len = frame.len();
    for (p_row, a_row) in proj.generator().row_iter().zip(aff.generator().row_iter()) {
        if a_row.len() != len * frame.block_count() {
            return Ok(false);
        }
        for (block, chunk) in a_row.chunks(len).enumerate() {
            let s = f.xi_pow((d * block) as i64);
            if chunk.iter().zip(p_row).any(|(&a, &p)| a != f.mul(s, p)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Removes coordinates where every codeword vanishes.
///
/// For the projective code of degree `d` these are the representatives with
/// fewer than `d` nonzero coordinates. The weight hierarchy is unchanged.
pub fn puncture_degenerate(code: &EvaluationCode) -> EvaluationCode {
    code.without_zero_columns()
}
