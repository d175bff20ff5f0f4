//! Cartesian evaluation sets `X = A_1 x ... x A_m` and the square-free
//! evaluation codes `C_d` (monomials of degree exactly `d`) and `C_{<=d}`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{enumerate_sd, enumerate_sleqd, CombError, SquareFreeExponent};
use crate::field::{Field, FieldError};
use crate::linalg::Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("bad degree {d} for {m} variables ({kind})")]
    BadDegree { m: usize, d: usize, kind: &'static str },
    #[error("generator has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("invalid evaluation set: {0}")]
    BadSet(String),
    #[error("unknown or unusable preset: {0}")]
    BadPreset(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Comb(#[from] CombError),
}

/// `A_1 x ... x A_m` with each factor an ordered, duplicate-free list of field elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartesianSet {
    field: Field,
    factors: Vec<Vec<u32>>,
}

impl CartesianSet {
    pub fn new(field: &Field, factors: Vec<Vec<u32>>) -> Result<Self, CodeError> {
        if factors.is_empty() {
            return Err(CodeError::BadSet("no factors".into()));
        }
        for (i, a) in factors.iter().enumerate() {
            if a.is_empty() {
                return Err(CodeError::BadSet(format!("factor {} is empty", i + 1)));
            }
            for (j, &x) in a.iter().enumerate() {
                field.check(x as u64)?;
                if a[..j].contains(&x) {
                    return Err(CodeError::BadSet(format!("factor {} repeats {x}", i + 1)));
                }
            }
        }
        Ok(Self { field: field.clone(), factors })
    }

    /// Parses `"0,1;0,1,2"`: factors separated by `;`, elements by `,`.
    pub fn parse(field: &Field, spec: &str) -> Result<Self, CodeError> {
        let factors = spec
            .split(';')
            .map(|factor| {
                factor
                    .split(',')
                    .map(|tok| {
                        let tok = tok.trim();
                        u32::from_str(tok).map_err(|_| CodeError::BadSet(format!("'{tok}' is not an element encoding")))
                    })
                    .collect::<Result<Vec<u32>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(field, factors)
    }

    /// Every factor equal to `F_q`, ordered `0, 1, xi, xi^2, ...`.
    pub fn affine(field: &Field, m: usize) -> Self {
        let mut a = vec![0];
        a.extend(multiplicative_order(field));
        Self { field: field.clone(), factors: vec![a; m] }
    }

    /// `(F_q^*)^m`, factors ordered `1, xi, xi^2, ...`.
    pub fn torus(field: &Field, m: usize) -> Self {
        Self { field: field.clone(), factors: vec![multiplicative_order(field); m] }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn factors(&self) -> &[Vec<u32>] {
        &self.factors
    }

    pub fn vars(&self) -> usize {
        self.factors.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.factors.iter().map(Vec::len).collect()
    }

    pub fn has_zero(&self) -> Vec<bool> {
        self.factors.iter().map(|a| a.contains(&0)).collect()
    }

    pub fn len(&self) -> usize {
        self.factors.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The same set with the factors permuted: factor `i` of the result is factor `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self { field: self.field.clone(), factors: perm.iter().map(|&i| self.factors[i].clone()).collect() }
    }

    /// All points, lexicographic in the factor indices with the last index fastest.
    pub fn points(&self) -> Vec<Vec<u32>> {
        let m = self.vars();
        let mut out = Vec::with_capacity(self.len());
        let mut idx = vec![0usize; m];
        loop {
            out.push((0..m).map(|i| self.factors[i][idx[i]]).collect());
            let mut pos = m;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < self.factors[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    pub fn build_code(&self, d: usize, homogeneous: bool) -> Result<EvaluationCode, CodeError> {
        let mut code = build_code_on_points(&self.field, self.vars(), &self.points(), d, homogeneous)?;
        code.family = CodeFamily::Grid(GridInfo {
            sizes: self.sizes(),
            zero_in_every_factor: self.has_zero().iter().all(|&z| z),
        });
        Ok(code)
    }
}

fn multiplicative_order(field: &Field) -> Vec<u32> {
    (0..field.order() as i64 - 1).map(|i| field.xi_pow(i)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Affine,
    AffinePunctured,
    Torus,
    Custom,
}

impl FromStr for Preset {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "affine" => Ok(Preset::Affine),
            "affine-punctured" | "affine_punctured" => Ok(Preset::AffinePunctured),
            "torus" => Ok(Preset::Torus),
            "custom" => Ok(Preset::Custom),
            other => Err(CodeError::BadPreset(other.to_string())),
        }
    }
}

/// A Cartesian grid, or an explicit point list in `F_q^m`.
#[derive(Clone, Debug)]
pub enum EvaluationSet {
    Grid(CartesianSet),
    Points { field: Field, m: usize, points: Vec<Vec<u32>>, family: CodeFamily },
}

impl EvaluationSet {
    pub fn points(&self) -> Vec<Vec<u32>> {
        match self {
            EvaluationSet::Grid(x) => x.points(),
            EvaluationSet::Points { points, .. } => points.clone(),
        }
    }

    pub fn vars(&self) -> usize {
        match self {
            EvaluationSet::Grid(x) => x.vars(),
            EvaluationSet::Points { m, .. } => *m,
        }
    }

    pub fn build_code(&self, d: usize, homogeneous: bool) -> Result<EvaluationCode, CodeError> {
        match self {
            EvaluationSet::Grid(x) => x.build_code(d, homogeneous),
            EvaluationSet::Points { field, m, points, family } => {
                Ok(build_code_on_points(field, *m, points, d, homogeneous)?.with_family(family.clone()))
            }
        }
    }
}

pub fn preset(kind: Preset, field: &Field, m: usize, custom: Option<&str>) -> Result<EvaluationSet, CodeError> {
    if m == 0 && kind != Preset::Custom {
        return Err(CodeError::BadPreset("m must be at least 1".into()));
    }
    match kind {
        Preset::Affine => Ok(EvaluationSet::Grid(CartesianSet::affine(field, m))),
        Preset::Torus => Ok(EvaluationSet::Grid(CartesianSet::torus(field, m))),
        Preset::AffinePunctured => {
            let mut points = CartesianSet::affine(field, m).points();
            points.retain(|p| p.iter().any(|&x| x != 0));
            Ok(EvaluationSet::Points { field: field.clone(), m, points, family: CodeFamily::AffinePunctured { m } })
        }
        Preset::Custom => {
            let spec = custom.ok_or_else(|| CodeError::BadPreset("custom preset needs a factor specification".into()))?;
            Ok(EvaluationSet::Grid(CartesianSet::parse(field, spec)?))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridInfo {
    pub sizes: Vec<usize>,
    pub zero_in_every_factor: bool,
}

/// Where the evaluation points came from; decides which closed forms apply.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodeFamily {
    Grid(GridInfo),
    /// `F_q^m` without the origin.
    AffinePunctured { m: usize },
    /// Representatives of `P^m(F_q)`, monomials in `m + 1` variables.
    Projective { m: usize },
    /// Any other point list, including punctured versions of the above.
    Points,
}

/// A code spanned by evaluations of square-free monomials at an ordered point list.
#[derive(Clone, Debug)]
pub struct EvaluationCode {
    generator: Matrix,
    monomials: Vec<SquareFreeExponent>,
    points: Vec<Vec<u32>>,
    homogeneous: bool,
    degree: usize,
    family: CodeFamily,
}

impl EvaluationCode {
    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn monomials(&self) -> &[SquareFreeExponent] {
        &self.monomials
    }

    pub fn points(&self) -> &[Vec<u32>] {
        &self.points
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn family(&self) -> &CodeFamily {
        &self.family
    }

    pub fn with_family(mut self, family: CodeFamily) -> Self {
        self.family = family;
        self
    }

    /// Factor sizes, when the code was built on a Cartesian grid.
    pub fn grid(&self) -> Option<&GridInfo> {
        match &self.family {
            CodeFamily::Grid(g) => Some(g),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.generator.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.generator.cols() == 0
    }

    pub fn dimension(&self) -> usize {
        self.generator.rows()
    }

    pub fn field(&self) -> &Field {
        self.generator.field()
    }

    /// Drops coordinates where every generator row vanishes.
    pub fn without_zero_columns(&self) -> EvaluationCode {
        let keep: Vec<usize> = self.generator.row_space_support().into_iter().collect();
        EvaluationCode {
            generator: self.generator.select_columns(&keep),
            monomials: self.monomials.clone(),
            points: keep.iter().map(|&c| self.points[c].clone()).collect(),
            homogeneous: self.homogeneous,
            degree: self.degree,
            family: CodeFamily::Points,
        }
    }
}

pub fn evaluate_monomial(field: &Field, monomial: &SquareFreeExponent, point: &[u32]) -> u32 {
    monomial.support().iter().fold(1, |acc, &i| field.mul(acc, point[i]))
}

/// Evaluates the square-free monomials of degree `d` (or `<= d`) in `m`
/// variables at `points`. Rows follow descending deglex order.
pub fn build_code_on_points(
    field: &Field,
    m: usize,
    points: &[Vec<u32>],
    d: usize,
    homogeneous: bool,
) -> Result<EvaluationCode, CodeError> {
    let monomials = if homogeneous {
        if d == 0 || d > m {
            return Err(CodeError::BadDegree { m, d, kind: "homogeneous needs 1 <= d <= m" });
        }
        enumerate_sd(m, d)?
    } else {
        if d > m {
            return Err(CodeError::BadDegree { m, d, kind: "needs 0 <= d <= m" });
        }
        enumerate_sleqd(m, d)?
    };
    if let Some(p) = points.iter().find(|p| p.len() != m) {
        return Err(CodeError::BadSet(format!("point {p:?} does not have {m} coordinates")));
    }
    let rows: Vec<Vec<u32>> = monomials
        .iter()
        .map(|mono| points.iter().map(|p| evaluate_monomial(field, mono, p)).collect())
        .collect();
    let generator = Matrix::from_rows_with_cols(field, &rows, points.len()).map_err(|e| CodeError::BadSet(e.to_string()))?;
    let rank = generator.rank();
    if rank != monomials.len() {
        return Err(CodeError::RankDeficient { rank, expected: monomials.len() });
    }
    Ok(EvaluationCode { generator, monomials, points: points.to_vec(), homogeneous, degree: d, family: CodeFamily::Points })
}

/// Generator matrix of the dual code.
pub fn dual_code(generator: &Matrix) -> Matrix {
    generator.nullspace_basis()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::binomial_u64;

    fn f(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    #[test]
    fn point_order() {
        let x = CartesianSet::new(&f(2), vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert_eq!(x.points(), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let x = CartesianSet::new(&f(5), vec![vec![0, 1], vec![0, 1, 2], vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(x.points().len(), 24);
        let t = CartesianSet::torus(&f(3), 2);
        assert_eq!(t.points(), vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
    }

    #[test]
    fn parse_and_validate() {
        let x = CartesianSet::parse(&f(5), "0,1;0,1,2;0,1,2,3").unwrap();
        assert_eq!(x.sizes(), vec![2, 3, 4]);
        assert!(CartesianSet::parse(&f(5), "0,1;0,5").is_err());
        assert!(CartesianSet::parse(&f(5), "0,0").is_err());
        assert!(CartesianSet::parse(&f(5), "0,a").is_err());
        assert!(CartesianSet::parse(&f(5), "0;").is_err());
    }

    #[test]
    fn presets() {
        let f3 = f(3);
        let p = preset(Preset::AffinePunctured, &f3, 2, None).unwrap();
        assert_eq!(p.points().len(), 8);
        assert!(!p.points().contains(&vec![0, 0]));
        assert_eq!(preset(Preset::Torus, &f3, 5, None).unwrap().points().len(), 32);
        assert_eq!(preset(Preset::Affine, &f(2), 3, None).unwrap().points().len(), 8);
        assert!(preset(Preset::Custom, &f3, 2, None).is_err());
        assert!("bogus".parse::<Preset>().is_err());
        // 0, 1, xi, xi^2 ... in F_5 with xi = 2: 0,1,2,4,3
        assert_eq!(CartesianSet::affine(&f(5), 1).factors()[0], vec![0, 1, 2, 4, 3]);
    }

    #[test]
    fn build_examples() {
        let x = CartesianSet::affine(&f(2), 2);
        let c = x.build_code(1, true).unwrap();
        assert_eq!(c.generator().to_rows(), vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1]]);
        assert_eq!(CartesianSet::affine(&f(2), 4).build_code(2, true).unwrap().dimension(), 6);
        assert_eq!(CartesianSet::affine(&f(3), 3).build_code(2, false).unwrap().dimension(), 7);
        assert!(matches!(x.build_code(3, true), Err(CodeError::BadDegree { .. })));
        assert!(matches!(x.build_code(0, true), Err(CodeError::BadDegree { .. })));
        assert_eq!(x.build_code(0, false).unwrap().dimension(), 1);
    }

    #[test]
    fn dual_examples() {
        let f2 = f(2);
        let rep = Matrix::from_rows(&f2, &[vec![1, 1, 1]]).unwrap();
        assert_eq!(dual_code(&rep).rows(), 2);
        assert_eq!(dual_code(&Matrix::identity(&f2, 3)).rows(), 0);
        let c = CartesianSet::affine(&f2, 2).build_code(1, true).unwrap();
        let dual = dual_code(c.generator());
        assert_eq!(dual.rows(), 2);
        assert!(c.generator().mul(&dual.transpose()).unwrap().is_zero());
    }

    /// Dimension claim: rank equals the number of monomials, exhaustively.
    #[test]
    fn dimensions_by_rank() {
        for q in [2, 3, 4] {
            for m in 1..=5usize {
                if q == 4 && m == 5 {
                    continue; // 1024 columns; covered by the acceptance grid for m <= 4
                }
                let x = CartesianSet::affine(&f(q), m);
                for d in 0..=m {
                    let sum: u64 = (0..=d as u64).map(|i| binomial_u64(m as u64, i)).sum();
                    assert_eq!(x.build_code(d, false).unwrap().dimension() as u64, sum);
                    if d >= 1 {
                        let c = x.build_code(d, true).unwrap();
                        assert_eq!(c.dimension() as u64, binomial_u64(m as u64, d as u64));
                    }
                }
            }
        }
    }

    #[test]
    fn zero_column_removal() {
        let c = CartesianSet::affine(&f(2), 3).build_code(1, true).unwrap();
        let p = c.without_zero_columns();
        assert_eq!(p.len(), 7);
        assert!(!p.points().contains(&vec![0, 0, 0]));
    }
}
