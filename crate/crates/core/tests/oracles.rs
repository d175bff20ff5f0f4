//! The two exact GHW searches against each other and against brute force.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqfree_ghw::cartesian::dual_code;
use sqfree_ghw::ghw::{
    ghw_exact_subspaces, ghw_exact_support, hierarchy_from_dual, hierarchy_of_matrix, verify_monotonicity,
    verify_wei_duality, GhwError, Method,
};
use sqfree_ghw::{Field, Matrix, SearchOptions};

fn random_code(rng: &mut ChaCha8Rng, q: u64, n: usize, k: usize) -> Option<Matrix> {
    let field = Field::new(q).unwrap();
    let rows: Vec<Vec<u32>> =
        (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..q as u32)).collect()).collect();
    let g = Matrix::from_rows(&field, &rows).unwrap();
    let basis = g.row_basis();
    (basis.rows() > 0).then_some(basis)
}

/// Every codeword, by running through all coefficient vectors.
fn min_weight(g: &Matrix) -> usize {
    let f = g.field();
    let (k, n) = (g.rows(), g.cols());
    let q = f.order() as u64;
    let mut best = n;
    for idx in 1..q.pow(k as u32) {
        let mut word = vec![0u32; n];
        let mut x = idx;
        for i in 0..k {
            let a = (x % q) as u32;
            x /= q;
            if a != 0 {
                for (w, &v) in word.iter_mut().zip(g.row(i)) {
                    *w = f.add(*w, f.mul(a, v));
                }
            }
        }
        best = best.min(word.iter().filter(|&&v| v != 0).count());
    }
    best
}

#[test]
fn both_oracles_agree_on_random_codes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = SearchOptions::default();
    let mut compared = 0;
    for trial in 0..120 {
        let q = if trial % 2 == 0 { 2 } else { 3 };
        let n = rng.gen_range(2..=16);
        let k = rng.gen_range(1..=n.min(if q == 2 { 8 } else { 6 }));
        let Some(g) = random_code(&mut rng, q, n, k) else { continue };
        let mut values = Vec::new();
        for r in 1..=g.rows() {
            let support = ghw_exact_support(&g, r, &opts).unwrap();
            match ghw_exact_subspaces(&g, r, &opts) {
                Ok((v, w)) => {
                    assert_eq!(v, support, "q={q} n={n} r={r} {g:?}");
                    assert_eq!(w.support.len() as u64, v);
                    compared += 1;
                }
                Err(GhwError::CapExceeded { .. }) => {}
                Err(e) => panic!("{e}"),
            }
            values.push(support);
        }
        assert!(verify_monotonicity(&values, n));
        assert_eq!(values[0] as usize, min_weight(&g));
    }
    assert!(compared > 200);
}

#[test]
fn duality_on_random_codes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let opts = SearchOptions::default();
    for trial in 0..80 {
        let q = if trial % 3 == 0 { 3 } else { 2 };
        let n = rng.gen_range(2..=14);
        let k = rng.gen_range(1..=n.min(7));
        let Some(g) = random_code(&mut rng, q, n, k) else { continue };
        assert!(verify_wei_duality(&g, &opts).unwrap());
        let dual = hierarchy_of_matrix(&dual_code(&g), Method::ExactSupport, &opts).unwrap();
        let via = hierarchy_of_matrix(&g, Method::Duality, &opts).unwrap();
        assert_eq!(via, hierarchy_from_dual(n, &dual));
        assert_eq!(via, hierarchy_of_matrix(&g, Method::ExactSubspace, &opts).unwrap());
    }
}

#[test]
fn zero_columns_do_not_matter() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let opts = SearchOptions::default();
    for _ in 0..30 {
        let Some(g) = random_code(&mut rng, 3, 7, 3) else { continue };
        let mut rows = g.to_rows();
        for row in &mut rows {
            row.insert(2, 0);
            row.push(0);
        }
        let padded = Matrix::from_rows(g.field(), &rows).unwrap();
        assert_eq!(
            hierarchy_of_matrix(&g, Method::ExactSupport, &opts).unwrap(),
            hierarchy_of_matrix(&padded, Method::ExactSupport, &opts).unwrap()
        );
        assert_eq!(
            hierarchy_of_matrix(&g, Method::ExactSubspace, &opts).unwrap(),
            hierarchy_of_matrix(&padded, Method::ExactSubspace, &opts).unwrap()
        );
    }
}
