use std::time::Instant;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqfree_ghw::cartesian::CartesianSet;
use sqfree_ghw::combinatorics::{binomial_u64, gaussian_binomial, SquareFreeExponent};
use sqfree_ghw::footprint::{footprint_bound, shadow_size_enum, shadow_size_ie, vanishing_count, DEFAULT_ENUM_BUDGET};
use sqfree_ghw::formulas::{ghw_formula_cd, ghw_formula_cleqd, ghw_formula_projective, projective_lengths};
use sqfree_ghw::ghw::{
    ghw_exact_subspaces, ghw_exact_support, hierarchy, hierarchy_of_matrix, verify_monotonicity, verify_wei_duality,
    GhwError, Method,
};
use sqfree_ghw::projective::{
    build_affine_punctured_code, build_projective_code, puncture_degenerate, representatives, verify_tensor_relation,
};
use sqfree_ghw::{Field, Matrix, SearchOptions};

use crate::args::{Suite, VerifyArgs};
use crate::commands::{exact_value, field, CliError, Context, EXIT_CHECK_FAILED, EXIT_OK};
use crate::report::{Report, SuiteRow};

const RANDOM_QS: [u64; 5] = [2, 3, 4, 5, 7];
/// Largest factor in the random grids whose full hierarchies are computed.
const HIERARCHY_FACTOR_SIZE: usize = 3;

#[derive(Default)]
struct Outcome {
    trials: usize,
    passed: usize,
    skipped: usize,
    failures: Vec<String>,
}

impl Outcome {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.trials += 1;
        if ok {
            self.passed += 1;
        } else {
            self.failures.push(what());
        }
    }

    fn skip(&mut self) {
        self.trials += 1;
        self.skipped += 1;
    }
}

struct Grid<'a> {
    qs: &'a [usize],
    ms: &'a [usize],
}

fn rng_for(seed: u64, suite: Suite) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite as u64);
    rng
}

fn random_factor(rng: &mut ChaCha8Rng, q: u64, with_zero: bool, max_size: usize) -> Vec<u32> {
    let size = rng.gen_range(2..=max_size.min(q as usize));
    let mut f: Vec<u32> = rand::seq::index::sample(rng, q as usize, size).into_iter().map(|x| x as u32).collect();
    if with_zero && !f.contains(&0) {
        f[0] = 0;
    }
    f.sort_unstable();
    f
}

/// Factors have between 2 and `max_size` elements; exact hierarchies stay cheap with small factors.
fn random_grid(rng: &mut ChaCha8Rng, qs: &[u64], m: usize, with_zero: bool, max_size: usize) -> CartesianSet {
    let q = *qs.choose(rng).expect("nonempty");
    let f = Field::new(q).expect("prime power");
    let factors = (0..m).map(|_| random_factor(rng, q, with_zero, max_size)).collect();
    CartesianSet::new(&f, factors).expect("valid factors")
}

fn random_monomials(rng: &mut ChaCha8Rng, m: usize) -> Vec<SquareFreeExponent> {
    let count = rng.gen_range(1..=5usize.min((1 << m) - 1));
    let mut masks: Vec<u64> = Vec::new();
    while masks.len() < count {
        let x = rng.gen_range(1..(1u64 << m));
        if !masks.contains(&x) {
            masks.push(x);
        }
    }
    masks.into_iter().map(|x| SquareFreeExponent::from_mask(m, x).expect("mask fits")).collect()
}

fn random_code(rng: &mut ChaCha8Rng, max_n: usize, max_k: usize) -> Matrix {
    loop {
        let q = if rng.gen_bool(0.5) { 2 } else { 3 };
        let n = rng.gen_range(2..=max_n);
        let k = rng.gen_range(1..=n.min(max_k));
        let f = Field::new(q).expect("prime");
        let rows: Vec<Vec<u32>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..q as u32)).collect()).collect();
        let basis = Matrix::from_rows(&f, &rows).expect("rectangular").row_basis();
        if basis.rows() > 0 {
            return basis;
        }
    }
}

fn shadow(trials: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let mut out = Outcome::default();
    for _ in 0..trials {
        let m = rng.gen_range(1..=6);
        let sizes: Vec<usize> = (0..m).map(|_| rng.gen_range(2..=7)).collect();
        let mono = random_monomials(rng, m);
        let e = shadow_size_enum(&sizes, &mono, DEFAULT_ENUM_BUDGET).expect("small box");
        let ie = shadow_size_ie(&sizes, &mono).expect("few monomials");
        out.record(ie == BigUint::from(e), || format!("sizes {sizes:?}, {mono:?}: enumeration {e}, inclusion-exclusion {ie}"));
    }
    out
}

fn bijection(trials: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let mut out = Outcome::default();
    for _ in 0..trials {
        let m = rng.gen_range(1..=4);
        let x = random_grid(rng, &RANDOM_QS, m, true, usize::MAX);
        let mono = random_monomials(rng, m);
        let sizes = x.sizes();
        let total: usize = sizes.iter().product();
        let shadow = shadow_size_enum(&sizes, &mono, DEFAULT_ENUM_BUDGET).expect("small box");
        let vanishing = vanishing_count(x.field(), &x.points(), &mono);
        out.record(vanishing as u128 == total as u128 - shadow, || {
            format!("{:?}, {mono:?}: {vanishing} zeros, {total} - {shadow}", x.factors())
        });
    }
    out
}

fn duality(trials: usize, rng: &mut ChaCha8Rng, opts: &SearchOptions) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    for _ in 0..trials {
        let g = random_code(rng, 14, 7);
        match verify_wei_duality(&g, opts) {
            Ok(ok) => out.record(ok, || format!("{g:?}")),
            Err(GhwError::BudgetExceeded { .. }) => out.skip(),
            Err(e) => return Err(CliError::Validation(e.to_string())),
        }
    }
    Ok(out)
}

fn monotonicity(trials: usize, rng: &mut ChaCha8Rng, opts: &SearchOptions) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    for i in 0..trials {
        let (values, n) = if i % 2 == 0 {
            let g = random_code(rng, 14, 7);
            (hierarchy_of_matrix(&g, Method::ExactSupport, opts), g.cols())
        } else {
            let m = rng.gen_range(1..=3);
            let with_zero = rng.gen_bool(0.5);
            let x = random_grid(rng, &RANDOM_QS[..4], m, with_zero, HIERARCHY_FACTOR_SIZE);
            let d = rng.gen_range(1..=m);
            let code = x.build_code(d, rng.gen_bool(0.5))?;
            (hierarchy_of_matrix(code.generator(), Method::ExactSupport, opts), code.len())
        };
        match values {
            Ok(v) => out.record(verify_monotonicity(&v, n), || format!("{v:?} with n = {n}")),
            Err(GhwError::BudgetExceeded { .. }) => out.skip(),
            Err(e) => return Err(CliError::Validation(e.to_string())),
        }
    }
    Ok(out)
}

fn min_weight(g: &Matrix) -> u64 {
    let f = g.field();
    let q = f.order() as u64;
    let mut best = g.cols() as u64;
    for idx in 1..q.pow(g.rows() as u32) {
        let mut word = vec![0u32; g.cols()];
        let mut x = idx;
        for i in 0..g.rows() {
            let a = (x % q) as u32;
            x /= q;
            for (w, &v) in word.iter_mut().zip(g.row(i)) {
                *w = f.add(*w, f.mul(a, v));
            }
        }
        best = best.min(word.iter().filter(|&&v| v != 0).count() as u64);
    }
    best
}

fn oracles(trials: usize, rng: &mut ChaCha8Rng, opts: &SearchOptions) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    for _ in 0..trials {
        let g = random_code(rng, 16, 6);
        let r = rng.gen_range(1..=g.rows());
        let sub = ghw_exact_subspaces(&g, r, opts);
        let sup = ghw_exact_support(&g, r, opts);
        match (sub, sup) {
            (Ok((a, _)), Ok(b)) => {
                let first = if r == 1 { min_weight(&g) } else { a };
                out.record(a == b && first == a, || format!("{g:?}, r = {r}: subspaces {a}, supports {b}, codewords {first}"));
            }
            (Err(GhwError::CapExceeded { .. } | GhwError::BudgetExceeded { .. }), _)
            | (_, Err(GhwError::BudgetExceeded { .. })) => out.skip(),
            (Err(e), _) | (_, Err(e)) => return Err(CliError::Validation(e.to_string())),
        }
    }
    Ok(out)
}

fn dimensions(trials: usize, rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    for _ in 0..trials {
        let m = rng.gen_range(1..=5);
        let with_zero = rng.gen_bool(0.5);
        let x = random_grid(rng, &RANDOM_QS, m, with_zero, usize::MAX);
        let d = rng.gen_range(1..=m);
        let cd = x.build_code(d, true)?.dimension() as u64;
        let cleqd = x.build_code(d, false)?.dimension() as u64;
        let expected = (binomial_u64(m as u64, d as u64), (0..=d as u64).map(|i| binomial_u64(m as u64, i)).sum());
        out.record((cd, cleqd) == expected, || format!("{:?}, d = {d}: ({cd}, {cleqd}) vs {expected:?}", x.factors()));
    }
    Ok(out)
}

fn permutation(trials: usize, rng: &mut ChaCha8Rng, opts: &SearchOptions) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    for _ in 0..trials {
        let m = rng.gen_range(2..=3);
        let with_zero = rng.gen_bool(0.5);
        let x = random_grid(rng, &RANDOM_QS[..4], m, with_zero, HIERARCHY_FACTOR_SIZE);
        let d = rng.gen_range(1..=m);
        let homogeneous = rng.gen_bool(0.5);
        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(rng);
        let a = hierarchy(&x.build_code(d, homogeneous)?, Method::ExactSupport, opts);
        let b = hierarchy(&x.permuted(&perm).build_code(d, homogeneous)?, Method::ExactSupport, opts);
        match (a, b) {
            (Ok(a), Ok(b)) => out.record(a.values() == b.values(), || {
                format!("{:?} permuted by {perm:?}: {:?} vs {:?}", x.factors(), a.values(), b.values())
            }),
            (Err(GhwError::BudgetExceeded { .. }), _) | (_, Err(GhwError::BudgetExceeded { .. })) => out.skip(),
            (Err(e), _) | (_, Err(e)) => return Err(CliError::Validation(e.to_string())),
        }
    }
    Ok(out)
}

fn within_cap(k: usize, r: usize, q: u64, opts: &SearchOptions) -> bool {
    gaussian_binomial(k as u64, r as u64, q).is_ok_and(|c| c <= BigUint::from(opts.subspace_cap))
}

fn sharpness(grid: &Grid, opts: &SearchOptions) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    for &q in grid.qs {
        let f = field(q as u64)?;
        for &m in grid.ms.iter().filter(|&&m| m >= 1) {
            let x = CartesianSet::affine(&f, m);
            for d in 1..=m {
                let code = x.build_code(d, true)?;
                for r in 1..=(m + 1 - d) {
                    if !within_cap(code.dimension(), r, q as u64, opts) {
                        out.skip();
                        continue;
                    }
                    let exact = match ghw_exact_subspaces(code.generator(), r, opts) {
                        Ok((v, _)) => v,
                        Err(GhwError::BudgetExceeded { .. }) => {
                            out.skip();
                            continue;
                        }
                        Err(e) => return Err(CliError::Validation(e.to_string())),
                    };
                    let fp = footprint_bound(&x.sizes(), d, r, true, opts).map_err(|e| CliError::Validation(e.to_string()))?;
                    let formula = ghw_formula_cd(&x.sizes(), d, r).map_err(|e| CliError::Validation(e.to_string()))?;
                    out.record(BigUint::from(exact) == formula && fp.value == exact as u128, || {
                        format!("q={q} m={m} d={d} r={r}: exact {exact}, footprint {}, formula {formula}", fp.value)
                    });
                }
            }
        }
    }
    Ok(out)
}

fn nonhomogeneous(grid: &Grid, opts: &SearchOptions) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    for &q in grid.qs {
        let f = field(q as u64)?;
        for &m in grid.ms.iter().filter(|&&m| m >= 1) {
            let mut sets = vec![("affine", CartesianSet::affine(&f, m))];
            if q >= 3 {
                sets.push(("torus", CartesianSet::torus(&f, m)));
            }
            for (name, x) in sets {
                for d in 1..=m {
                    let code = x.build_code(d, false)?;
                    for r in 1..=code.dimension() {
                        let Some(exact) = exact_value(&code, r, opts)? else {
                            out.skip();
                            continue;
                        };
                        let fp = footprint_bound(&x.sizes(), d, r, false, opts)
                            .map_err(|e| CliError::Validation(e.to_string()))?;
                        let formula = if r + d <= m + 1 { ghw_formula_cleqd(&x.sizes(), d, r).ok() } else { None };
                        let ok = fp.value == exact as u128 && formula.as_ref().is_none_or(|v| *v == BigUint::from(exact));
                        out.record(ok, || {
                            format!("{name} q={q} m={m} d={d} r={r}: exact {exact}, footprint {}, formula {formula:?}", fp.value)
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

fn tensor(grid: &Grid) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    for &q in grid.qs {
        let f = field(q as u64)?;
        for &m in grid.ms.iter().filter(|&&m| m >= 1) {
            let frame = representatives(&f, m);
            for d in 1..=m + 1 {
                let ok = verify_tensor_relation(&frame, d)?;
                out.record(ok, || format!("q={q} m={m} d={d}"));
            }
        }
    }
    Ok(out)
}

fn projective(grid: &Grid, opts: &SearchOptions) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    for &q in grid.qs {
        let f = field(q as u64)?;
        for &m in grid.ms.iter().filter(|&&m| m >= 1) {
            let frame = representatives(&f, m);
            for d in 1..=m + 1 {
                let proj = build_projective_code(&frame, d)?;
                let aff = build_affine_punctured_code(&frame, d)?;
                let punctured = puncture_degenerate(&proj);
                let (_, nondeg) = projective_lengths(q as u64, m, d).map_err(|e| CliError::Validation(e.to_string()))?;
                out.record(nondeg == BigUint::from(punctured.len()), || {
                    format!("q={q} m={m} d={d}: punctured length {} vs {nondeg}", punctured.len())
                });
                for r in 1..=proj.dimension() {
                    let (Some(p), Some(a), Some(pp)) =
                        (exact_value(&proj, r, opts)?, exact_value(&aff, r, opts)?, exact_value(&punctured, r, opts)?)
                    else {
                        out.skip();
                        continue;
                    };
                    let formula = if r + d <= m + 2 { ghw_formula_projective(q as u64, m, d, r).ok() } else { None };
                    let ok = a == (q as u64 - 1) * p && pp == p && formula.as_ref().is_none_or(|v| *v == BigUint::from(p));
                    out.record(ok, || {
                        format!("q={q} m={m} d={d} r={r}: projective {p}, affine {a}, punctured {pp}, formula {formula:?}")
                    });
                }
            }
        }
    }
    Ok(out)
}

const ORDER: [Suite; 11] = [
    Suite::Shadow,
    Suite::Bijection,
    Suite::Duality,
    Suite::Monotonicity,
    Suite::Oracles,
    Suite::Dimensions,
    Suite::Permutation,
    Suite::Sharpness,
    Suite::Nonhomogeneous,
    Suite::Tensor,
    Suite::Projective,
];

fn name(suite: Suite) -> &'static str {
    match suite {
        Suite::Shadow => "shadow",
        Suite::Bijection => "bijection",
        Suite::Duality => "duality",
        Suite::Monotonicity => "monotonicity",
        Suite::Oracles => "oracles",
        Suite::Dimensions => "dimensions",
        Suite::Permutation => "permutation",
        Suite::Sharpness => "sharpness",
        Suite::Nonhomogeneous => "nonhomogeneous",
        Suite::Tensor => "tensor",
        Suite::Projective => "projective",
        Suite::All => "all",
    }
}

fn run_suite(suite: Suite, args: &VerifyArgs, opts: &SearchOptions) -> Result<Outcome, CliError> {
    let rng = &mut rng_for(args.seed, suite);
    let grid = Grid { qs: args.q.values(), ms: args.m.values() };
    let t = args.trials;
    match suite {
        Suite::Shadow => Ok(shadow(t, rng)),
        Suite::Bijection => Ok(bijection(t, rng)),
        Suite::Duality => duality(t, rng, opts),
        Suite::Monotonicity => monotonicity(t, rng, opts),
        Suite::Oracles => oracles(t, rng, opts),
        Suite::Dimensions => dimensions(t, rng),
        Suite::Permutation => permutation(t, rng, opts),
        Suite::Sharpness => sharpness(&grid, opts),
        Suite::Nonhomogeneous => nonhomogeneous(&grid, opts),
        Suite::Tensor => tensor(&grid),
        Suite::Projective => projective(&grid, opts),
        Suite::All => unreachable!("expanded by the caller"),
    }
}

pub fn cmd_verify(args: &VerifyArgs, ctx: &mut Context) -> Result<i32, CliError> {
    let opts = args.budgets.options();
    let suites: Vec<Suite> = if args.suite == Suite::All { ORDER.to_vec() } else { vec![args.suite] };
    let mut report = Report::new("verify", args);
    for suite in suites {
        let start = Instant::now();
        let outcome = run_suite(suite, args, &opts)?;
        let checked = outcome.trials - outcome.skipped;
        let mut detail = format!("{}/{checked} pass", outcome.passed);
        if outcome.skipped > 0 {
            detail.push_str(&format!(", {} skipped by budget", outcome.skipped));
        }
        if let Some(first) = outcome.failures.first() {
            detail.push_str(&format!("; first failure: {first}"));
        }
        report.check(name(suite), outcome.failures.is_empty(), detail);
        report.rows.push(SuiteRow {
            suite: name(suite),
            trials: outcome.trials,
            passed: outcome.passed,
            skipped: outcome.skipped,
            millis: ctx.millis(start),
        });
    }
    ctx.emit(&report)?;
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;
    use sqfree_ghw::combinatorics::enumerate_sd;

    #[test]
    fn random_factors_are_valid() {
        let mut rng = rng_for(1, Suite::Bijection);
        for _ in 0..100 {
            let f = random_factor(&mut rng, 5, true, usize::MAX);
            assert!(f.len() >= 2 && f.contains(&0) && f.windows(2).all(|w| w[0] < w[1]));
        }
        let mono = random_monomials(&mut rng, 3);
        assert!(!mono.is_empty() && mono.iter().all(|a| a.degree() >= 1));
        assert_eq!(enumerate_sd(3, 1).unwrap().len(), 3);
    }

    #[test]
    fn streams_differ_per_suite() {
        let a: u64 = rng_for(7, Suite::Shadow).gen();
        let b: u64 = rng_for(7, Suite::Duality).gen();
        assert_ne!(a, b);
        assert_eq!(a, rng_for(7, Suite::Shadow).gen::<u64>());
    }
}
