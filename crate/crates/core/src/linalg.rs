//! Dense matrices over `F_q` stored as canonical element encodings.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::combinatorics::gaussian_binomial;
use crate::field::Field;

/// Default cap on the number of subspaces an enumeration may produce.
pub const DEFAULT_SUBSPACE_CAP: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("{count} subspaces exceed the enumeration cap {cap}")]
    CapExceeded { count: BigUint, cap: u64 },
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("subspace dimension {r} exceeds ambient dimension {k}")]
    BadDimension { k: usize, r: usize },
}

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix over F_{} ({}x{})", self.field.order(), self.rows, self.cols)?;
        for row in self.row_iter() {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Self { field: field.clone(), rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds from row vectors; every entry must be a valid encoding.
    pub fn from_rows(field: &Field, rows: &[Vec<u32>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(field, rows, cols)
    }

    pub fn from_rows_with_cols(field: &Field, rows: &[Vec<u32>], cols: usize) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::Shape(format!("row of length {} in a {cols}-column matrix", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&v| v >= field.order()) {
                return Err(LinalgError::Shape(format!("{bad} is not an element of F_{}", field.order())));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { field: field.clone(), rows: rows.len(), cols, data })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[u32]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.row_iter().map(<[u32]>::to_vec).collect()
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(t, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Self::zeros(&self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    fn scale_row(&mut self, r: usize, s: u32) {
        let f = self.field.clone();
        for v in &mut self.data[r * self.cols..(r + 1) * self.cols] {
            *v = f.mul(*v, s);
        }
    }

    /// `row[dst] -= s * row[src]`
    fn eliminate(&mut self, dst: usize, src: usize, s: u32) {
        let f = self.field.clone();
        for c in 0..self.cols {
            let v = f.sub(self.get(dst, c), f.mul(s, self.get(src, c)));
            self.set(dst, c, v);
        }
    }

    /// Reduced row echelon form and its pivot columns. Zero rows are kept at the bottom.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    m.data.swap(p * m.cols + c, row * m.cols + c);
                }
            }
            let inv = m.field.inv(m.get(row, col)).expect("pivot is nonzero");
            m.scale_row(row, inv);
            for r in 0..m.rows {
                let s = m.get(r, col);
                if r != row && s != 0 {
                    m.eliminate(r, row, s);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of the row space (nonzero rows of the RREF).
    pub fn row_basis(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let mut out = r;
        out.rows = pivots.len();
        out.data.truncate(out.rows * out.cols);
        out
    }

    /// Rows form a basis of `{v : M v^T = 0}`.
    pub fn nullspace_basis(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let f = &self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(f, free.len(), self.cols);
        for (i, &fc) in free.iter().enumerate() {
            out.set(i, fc, 1);
            for (pr, &pc) in pivots.iter().enumerate() {
                out.set(i, pc, f.neg(r.get(pr, fc)));
            }
        }
        out
    }

    /// Coordinates where some row (hence some vector of the row space) is nonzero.
    pub fn row_space_support(&self) -> BTreeSet<usize> {
        (0..self.cols).filter(|&c| (0..self.rows).any(|r| self.get(r, c) != 0)).collect()
    }
}

/// One pivot-column pattern of an `r x k` RREF matrix. Row `i` has a 1 in
/// column `pivots[i]`, zeros in the other pivot columns and to the left of
/// its pivot, and free entries in `free[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotPattern {
    pub pivots: Vec<usize>,
    pub free: Vec<Vec<usize>>,
}

impl PivotPattern {
    pub fn new(k: usize, pivots: Vec<usize>) -> Self {
        let free = pivots
            .iter()
            .map(|&p| (p + 1..k).filter(|c| !pivots.contains(c)).collect())
            .collect();
        Self { pivots, free }
    }

    pub fn free_count(&self) -> usize {
        self.free.iter().map(Vec::len).sum()
    }

    /// All RREF matrices with this pattern, free entries in odometer order
    /// (last free entry fastest).
    pub fn matrices(&self, field: &Field, k: usize) -> impl Iterator<Item = Matrix> + '_ {
        let q = field.order() as u64;
        let slots: Vec<(usize, usize)> = self
            .free
            .iter()
            .enumerate()
            .flat_map(|(i, cols)| cols.iter().map(move |&c| (i, c)))
            .collect();
        let total = q.checked_pow(slots.len() as u32).unwrap_or(u64::MAX);
        let field = field.clone();
        (0..total).map(move |mut idx| {
            let mut m = Matrix::zeros(&field, self.pivots.len(), k);
            for (i, &p) in self.pivots.iter().enumerate() {
                m.set(i, p, 1);
            }
            for &(i, c) in slots.iter().rev() {
                m.set(i, c, (idx % q) as u32);
                idx /= q;
            }
            m
        })
    }
}

/// All `r`-subsets of `0..k` in lexicographic order.
pub fn combinations(k: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, k: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..=k - (r - cur.len()) {
            cur.push(i);
            go(i + 1, k, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r <= k {
        go(0, k, r, &mut Vec::with_capacity(r), &mut out);
    }
    out
}

/// The `r`-dimensional subspaces of `F_q^k`, each represented once by its RREF basis.
#[derive(Clone, Debug)]
pub struct SubspaceEnumeration {
    field: Field,
    k: usize,
    count: BigUint,
    patterns: Vec<PivotPattern>,
}

impl SubspaceEnumeration {
    pub fn count(&self) -> &BigUint {
        &self.count
    }

    /// Disjoint chunks, one per pivot pattern, in lexicographic pattern order.
    pub fn chunks(&self) -> &[PivotPattern] {
        &self.patterns
    }

    pub fn iter(&self) -> impl Iterator<Item = Matrix> + '_ {
        self.patterns.iter().flat_map(move |p| p.matrices(&self.field, self.k))
    }
}

pub fn enumerate_subspaces(k: usize, r: usize, field: &Field, cap: u64) -> Result<SubspaceEnumeration, LinalgError> {
    if r > k {
        return Err(LinalgError::BadDimension { k, r });
    }
    let count = gaussian_binomial(k as u64, r as u64, field.order() as u64).expect("valid arguments");
    if count > BigUint::from(cap) {
        return Err(LinalgError::CapExceeded { count, cap });
    }
    let patterns = combinations(k, r).into_iter().map(|p| PivotPattern::new(k, p)).collect();
    Ok(SubspaceEnumeration { field: field.clone(), k, count, patterns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    fn random_matrix(field: &Field, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let data: Vec<Vec<u32>> =
            (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..field.order())).collect()).collect();
        Matrix::from_rows_with_cols(field, &data, cols).unwrap()
    }

    #[test]
    fn rref_examples() {
        let f2 = f(2);
        let id = Matrix::identity(&f2, 3);
        assert_eq!(id.rref(), (id.clone(), vec![0, 1, 2]));
        let ones = Matrix::from_rows(&f2, &[vec![1, 1, 1]]).unwrap();
        assert_eq!(ones.rref(), (ones.clone(), vec![0]));
        let f3 = f(3);
        let m = Matrix::from_rows(&f3, &[vec![1, 1, 0], vec![2, 2, 0]]).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn nullspace_examples() {
        let f2 = f(2);
        let ones = Matrix::from_rows(&f2, &[vec![1, 1, 1]]).unwrap();
        let ns = ones.nullspace_basis();
        assert_eq!(ns.rows(), 2);
        assert!(ones.mul(&ns.transpose()).unwrap().is_zero());
        assert_eq!(Matrix::identity(&f2, 3).nullspace_basis().rows(), 0);
        assert_eq!(Matrix::zeros(&f(3), 2, 3).nullspace_basis().rows(), 3);
    }

    #[test]
    fn support_examples() {
        let f2 = f(2);
        let b = Matrix::from_rows(&f2, &[vec![0, 1, 0, 1], vec![0, 0, 1, 1]]).unwrap();
        assert_eq!(b.row_space_support(), BTreeSet::from([1, 2, 3]));
        assert!(Matrix::zeros(&f2, 2, 4).row_space_support().is_empty());
        let c = Matrix::from_rows(&f(3), &[vec![1, 2, 0]]).unwrap();
        assert_eq!(c.row_space_support(), BTreeSet::from([0, 1]));
    }

    #[test]
    fn subspace_examples() {
        let e = enumerate_subspaces(2, 1, &f(2), DEFAULT_SUBSPACE_CAP).unwrap();
        let all: Vec<Vec<Vec<u32>>> = e.iter().map(|m| m.to_rows()).collect();
        assert_eq!(all, vec![vec![vec![1, 0]], vec![vec![1, 1]], vec![vec![0, 1]]]);
        let e = enumerate_subspaces(3, 3, &f(3), DEFAULT_SUBSPACE_CAP).unwrap();
        let all: Vec<Matrix> = e.iter().collect();
        assert_eq!(all, vec![Matrix::identity(&f(3), 3)]);
        assert_eq!(enumerate_subspaces(4, 2, &f(2), DEFAULT_SUBSPACE_CAP).unwrap().iter().count(), 35);
        match enumerate_subspaces(4, 2, &f(2), 34) {
            Err(LinalgError::CapExceeded { count, .. }) => assert_eq!(count, 35u32.into()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn subspaces_distinct_and_counted() {
        for q in [2, 3] {
            let field = f(q);
            for k in 0..=4 {
                for r in 0..=k {
                    let e = enumerate_subspaces(k, r, &field, DEFAULT_SUBSPACE_CAP).unwrap();
                    let mut seen = BTreeSet::new();
                    for m in e.iter() {
                        assert_eq!(m.rank(), r);
                        // canonical: RREF of the representative is itself
                        assert_eq!(m.rref().0, m);
                        assert!(seen.insert(m.data().to_vec()));
                    }
                    assert_eq!(BigUint::from(seen.len()), *e.count());
                    assert_eq!(*e.count(), gaussian_binomial(k as u64, r as u64, q).unwrap());
                }
            }
        }
    }

    #[test]
    fn rank_properties_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..200 {
            let field = f([2, 3, 4, 5, 9][trial % 5]);
            let rows = rng.gen_range(1..7);
            let cols = rng.gen_range(1..9);
            let m = random_matrix(&field, rows, cols, &mut rng);
            let (r1, p1) = m.rref();
            assert_eq!(r1.rref(), (r1.clone(), p1.clone()));
            assert_eq!(m.rank(), m.transpose().rank());
            let ns = m.nullspace_basis();
            assert_eq!(p1.len() + ns.rows(), cols);
            if ns.rows() > 0 {
                assert!(m.mul(&ns.transpose()).unwrap().is_zero());
                assert_eq!(ns.rank(), ns.rows());
            }
        }
    }
}
