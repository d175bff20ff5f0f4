//! Acceptance criteria, one pass/fail line each. Runs without the libtest
//! harness so the lines appear in plain `cargo test` output.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqfree_ghw::cartesian::{CartesianSet, EvaluationCode};
use sqfree_ghw::combinatorics::{binomial_u64, gaussian_binomial, SquareFreeExponent};
use sqfree_ghw::footprint::{footprint_bound, shadow_size_enum, shadow_size_ie, vanishing_count, DEFAULT_ENUM_BUDGET};
use sqfree_ghw::formulas::{condition_holds, ghw_formula_cd, ghw_formula_cleqd, ghw_formula_projective, projective_lengths};
use sqfree_ghw::ghw::{ghw_exact_subspaces, hierarchy_of_matrix, verify_monotonicity, verify_wei_duality, Method};
use sqfree_ghw::projective::{
    build_affine_punctured_code, build_projective_code, puncture_degenerate, representatives, verify_tensor_relation,
};
use sqfree_ghw::{Field, Matrix, SearchOptions};

// Pinned limits. Every comparison of weights below is exact integer equality.
const SUBSPACE_CAP: u64 = 10_000_000;
/// Node budget for the support search.
const SUPPORT_BUDGET: u64 = 200_000_000;
const GRID_LIMIT: Duration = Duration::from_secs(600);
const MIXED_LIMIT: Duration = Duration::from_secs(60);
const FOOTPRINT_LIMIT: Duration = Duration::from_secs(1);
const PROJECTIVE_LIMIT: Duration = Duration::from_secs(300);
const PROPERTY_LIMIT: Duration = Duration::from_secs(300);
const TRIALS: usize = 200;
/// Largest factor in the random grids whose full hierarchies are computed.
const HIERARCHY_FACTOR_SIZE: usize = 3;
const SEED: u64 = 2024;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn opts() -> SearchOptions {
    SearchOptions { subspace_cap: SUBSPACE_CAP, subset_budget: SUPPORT_BUDGET, ..SearchOptions::default() }
}

fn field(q: u64) -> Field {
    Field::new(q).expect("prime power")
}

fn within_cap(code: &EvaluationCode, r: usize) -> bool {
    gaussian_binomial(code.dimension() as u64, r as u64, code.field().order() as u64).unwrap()
        <= BigUint::from(SUBSPACE_CAP)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn in_time(start: Instant, limit: Duration, detail: String) -> Outcome {
    let elapsed = start.elapsed();
    ensure(elapsed < limit, || format!("{detail}; took {elapsed:.1?}, limit {limit:?}"))?;
    Ok(format!("{detail} in {elapsed:.1?}"))
}

/// Exact-subspace value, footprint bound and closed form coincide on the homogeneous affine grid.
fn sharpness_grid() -> Outcome {
    let start = Instant::now();
    let (mut checked, mut over_cap) = (0, 0);
    for q in [2u64, 3, 4, 5] {
        for m in 2..=4 {
            let x = CartesianSet::affine(&field(q), m);
            for d in 1..=m {
                let code = x.build_code(d, true).map_err(|e| e.to_string())?;
                for r in 1..=m + 1 - d {
                    if !within_cap(&code, r) {
                        over_cap += 1;
                        continue;
                    }
                    let (exact, _) = ghw_exact_subspaces(code.generator(), r, &opts()).map_err(|e| e.to_string())?;
                    let fp = footprint_bound(&x.sizes(), d, r, true, &opts()).map_err(|e| e.to_string())?.value;
                    let formula = ghw_formula_cd(&x.sizes(), d, r).map_err(|e| e.to_string())?;
                    ensure(fp == exact as u128 && formula == BigUint::from(exact), || {
                        format!("q={q} m={m} d={d} r={r}: exact {exact}, footprint {fp}, formula {formula}")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    in_time(start, GRID_LIMIT, format!("{checked} instances equal, {over_cap} above the subspace cap"))
}

/// Exact value equals the footprint bound for C_{<=d} on F_q^m and on the torus; closed form where it applies.
fn nonhomogeneous_grid() -> Outcome {
    let start = Instant::now();
    let (mut checked, mut with_formula, mut over_cap) = (0, 0, 0);
    for q in [2u64, 3, 4, 5] {
        for m in 2..=4 {
            let f = field(q);
            let mut sets = vec![("affine", CartesianSet::affine(&f, m))];
            // the torus over F_2 is a single point
            if q > 2 {
                sets.push(("torus", CartesianSet::torus(&f, m)));
            }
            for (name, x) in sets {
                for d in 1..=m {
                    let code = x.build_code(d, false).map_err(|e| e.to_string())?;
                    for r in 1..=code.dimension() {
                        if !within_cap(&code, r) {
                            over_cap += 1;
                            continue;
                        }
                        let (value, _) =
                            ghw_exact_subspaces(code.generator(), r, &opts()).map_err(|e| e.to_string())?;
                        let fp = footprint_bound(&x.sizes(), d, r, false, &opts()).map_err(|e| e.to_string())?.value;
                        ensure(fp == value as u128, || format!("{name} q={q} m={m} d={d} r={r}: exact {value}, footprint {fp}"))?;
                        if r + d <= m + 1 && condition_holds(&x.sizes(), d, r).map_err(|e| e.to_string())? {
                            let formula = ghw_formula_cleqd(&x.sizes(), d, r).map_err(|e| e.to_string())?;
                            ensure(formula == BigUint::from(value), || {
                                format!("{name} q={q} m={m} d={d} r={r}: exact {value}, formula {formula}")
                            })?;
                            with_formula += 1;
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    in_time(
        start,
        GRID_LIMIT,
        format!("{checked} instances equal ({with_formula} also against the closed form), {over_cap} above the subspace cap"),
    )
}

/// Full hierarchies on {0,1} x {0,1,2} x {0,1,2,3} over F_5.
fn mixed_sizes() -> Outcome {
    let start = Instant::now();
    let x = CartesianSet::parse(&field(5), "0,1;0,1,2;0,1,2,3").map_err(|e| e.to_string())?;
    let sizes = x.sizes();
    let mut summary = Vec::new();
    let (mut formula_checks, mut cross_checked) = (0, 0);
    for homogeneous in [true, false] {
        for d in 1..=3 {
            let code = x.build_code(d, homogeneous).map_err(|e| e.to_string())?;
            let a = hierarchy_of_matrix(code.generator(), Method::ExactSupport, &opts()).map_err(|e| e.to_string())?;
            for (i, &v) in a.iter().enumerate() {
                let r = i + 1;
                if within_cap(&code, r) {
                    let (b, _) = ghw_exact_subspaces(code.generator(), r, &opts()).map_err(|e| e.to_string())?;
                    ensure(b == v, || format!("d={d} r={r}: support search {v}, subspace search {b}"))?;
                    cross_checked += 1;
                }
            }
            ensure(verify_monotonicity(&a, code.len()), || format!("{a:?} not increasing"))?;
            for r in 1..=a.len().min(4 - d) {
                let formula = if homogeneous { ghw_formula_cd(&sizes, d, r) } else { ghw_formula_cleqd(&sizes, d, r) };
                if let Ok(v) = formula {
                    ensure(v == BigUint::from(a[r - 1]), || format!("d={d} r={r}: exact {}, formula {v}", a[r - 1]))?;
                    formula_checks += 1;
                }
            }
            summary.push(format!("{}{d}={a:?}", if homogeneous { "C_" } else { "C_<=" }));
            if homogeneous && d == 1 {
                ensure(a[0] == 12, || format!("d_1(C_1) = {}, expected 12", a[0]))?;
            }
            if homogeneous && d == 2 {
                ensure(a[0] == 8, || format!("d_1(C_2) = {}, expected 8", a[0]))?;
            }
        }
    }
    in_time(start, MIXED_LIMIT, format!("{}; {cross_checked} values also by subspace search, {formula_checks} closed-form matches", summary.join(" ")))
}

/// Torus (F_3^*)^5, d = 2, r = 3: footprint 14 with the stated witness, exact value 16.
fn torus_example() -> Outcome {
    let x = CartesianSet::torus(&field(3), 5);
    let start = Instant::now();
    let fp = footprint_bound(&x.sizes(), 2, 3, true, &opts()).map_err(|e| e.to_string())?;
    let fp_time = start.elapsed();
    let witness: Vec<String> = fp.witness.iter().map(|a| a.to_string()).collect();
    ensure(fp.value == 14, || format!("footprint {}", fp.value))?;
    ensure(witness == ["x1x2", "x1x3", "x1x4"], || format!("witness {witness:?}"))?;
    ensure(fp_time < FOOTPRINT_LIMIT, || format!("footprint took {fp_time:?}"))?;

    // the exact value through the command line, as a long run would be requested
    let out = Command::new(env!("CARGO_BIN_EXE_cghw"))
        .args(["--format", "json", "ghw", "--q", "3", "--m", "5", "--d", "2", "--preset", "torus", "--r", "3"])
        .args(["--method", "exact-support", "--extended", "--time-limit", "3600"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("cghw exited with {:?}", out.status.code()))?;
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let exact = report["rows"][0]["value"].as_u64();
    ensure(exact == Some(16), || format!("support search gave {exact:?}, expected 16"))?;
    Ok(format!("footprint 14 at {{x1x2,x1x3,x1x4}} in {fp_time:.1?}; support search d_3 = 16 as published"))
}

/// Projective codes: tensor identity, scaling of weights, closed form, punctured lengths.
fn projective_suite() -> Outcome {
    let start = Instant::now();
    let (mut codes, mut weights) = (0, 0);
    for q in [2u64, 3] {
        for m in 1..=3 {
            let frame = representatives(&field(q), m);
            for d in 1..=m + 1 {
                ensure(verify_tensor_relation(&frame, d).map_err(|e| e.to_string())?, || format!("tensor q={q} m={m} d={d}"))?;
                let proj = build_projective_code(&frame, d).map_err(|e| e.to_string())?;
                let aff = build_affine_punctured_code(&frame, d).map_err(|e| e.to_string())?;
                let hp = hierarchy_of_matrix(proj.generator(), Method::ExactSubspace, &opts()).map_err(|e| e.to_string())?;
                let ha = hierarchy_of_matrix(aff.generator(), Method::ExactSupport, &opts()).map_err(|e| e.to_string())?;
                let scaled: Vec<u64> = hp.iter().map(|v| (q - 1) * v).collect();
                ensure(ha == scaled, || format!("q={q} m={m} d={d}: affine {ha:?}, projective {hp:?}"))?;
                for r in 1..=hp.len().min(m + 2 - d) {
                    let v = ghw_formula_projective(q, m, d, r).map_err(|e| e.to_string())?;
                    ensure(v == BigUint::from(hp[r - 1]), || format!("q={q} m={m} d={d} r={r}: exact {}, formula {v}", hp[r - 1]))?;
                    weights += 1;
                }
                let (_, nondeg) = projective_lengths(q, m, d).map_err(|e| e.to_string())?;
                let punctured = puncture_degenerate(&proj).len();
                ensure(nondeg == BigUint::from(punctured), || format!("q={q} m={m} d={d}: length {punctured}, formula {nondeg}"))?;
                codes += 1;
            }
        }
    }
    in_time(start, PROJECTIVE_LIMIT, format!("{codes} codes, {weights} weights against the closed form"))
}

fn random_code(rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let q = if rng.gen_bool(0.5) { 2u64 } else { 3 };
        let n = rng.gen_range(2..=14);
        let k = rng.gen_range(1..=n.min(7));
        let rows: Vec<Vec<u32>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..q as u32)).collect()).collect();
        let g = Matrix::from_rows(&field(q), &rows).unwrap().row_basis();
        if g.rows() > 0 {
            return g;
        }
    }
}

fn random_grid(rng: &mut ChaCha8Rng, qs: &[u64], m: usize, with_zero: bool, max_size: usize) -> CartesianSet {
    let q = *qs.choose(rng).unwrap();
    let factors = (0..m)
        .map(|_| {
            let size = rng.gen_range(2..=max_size.min(q as usize));
            let mut f: Vec<u32> = rand::seq::index::sample(rng, q as usize, size).into_iter().map(|x| x as u32).collect();
            if with_zero && !f.contains(&0) {
                f[0] = 0;
            }
            f.sort_unstable();
            f
        })
        .collect();
    CartesianSet::new(&field(q), factors).unwrap()
}

fn random_monomials(rng: &mut ChaCha8Rng, m: usize) -> Vec<SquareFreeExponent> {
    let mut masks: Vec<u64> = (1..1u64 << m).collect();
    masks.shuffle(rng);
    masks.truncate(rng.gen_range(1..=masks.len().min(5)));
    masks.into_iter().map(|x| SquareFreeExponent::from_mask(m, x).unwrap()).collect()
}

/// Seeded property suites, TRIALS each.
fn property_suites() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let qs = [2u64, 3, 4, 5, 7];

    for _ in 0..TRIALS {
        let m = rng.gen_range(1..=6);
        let sizes: Vec<usize> = (0..m).map(|_| rng.gen_range(2..=7)).collect();
        let mono = random_monomials(&mut rng, m);
        let e = shadow_size_enum(&sizes, &mono, DEFAULT_ENUM_BUDGET).map_err(|e| e.to_string())?;
        let ie = shadow_size_ie(&sizes, &mono).map_err(|e| e.to_string())?;
        ensure(ie == BigUint::from(e), || format!("shadow {sizes:?} {mono:?}: {e} vs {ie}"))?;
    }

    for _ in 0..TRIALS {
        let m = rng.gen_range(1..=4);
        let x = random_grid(&mut rng, &qs, m, true, usize::MAX);
        let mono = random_monomials(&mut rng, m);
        let total: usize = x.sizes().iter().product();
        let shadow = shadow_size_enum(&x.sizes(), &mono, DEFAULT_ENUM_BUDGET).map_err(|e| e.to_string())?;
        let zeros = vanishing_count(x.field(), &x.points(), &mono);
        ensure(zeros as u128 == total as u128 - shadow, || format!("bijection {:?} {mono:?}", x.factors()))?;
    }

    let mut hierarchies = 0;
    for _ in 0..TRIALS {
        let g = random_code(&mut rng);
        ensure(verify_wei_duality(&g, &opts()).map_err(|e| e.to_string())?, || format!("duality {g:?}"))?;
        let h = hierarchy_of_matrix(&g, Method::ExactSupport, &opts()).map_err(|e| e.to_string())?;
        ensure(verify_monotonicity(&h, g.cols()), || format!("monotonicity {h:?}"))?;
        hierarchies += 1;
    }

    for _ in 0..TRIALS {
        let m = rng.gen_range(1..=5);
        let with_zero = rng.gen_bool(0.5);
        let x = random_grid(&mut rng, &qs, m, with_zero, usize::MAX);
        let d = rng.gen_range(1..=m);
        let cd = x.build_code(d, true).map_err(|e| e.to_string())?.dimension() as u64;
        let cleqd = x.build_code(d, false).map_err(|e| e.to_string())?.dimension() as u64;
        let want: u64 = (0..=d as u64).map(|i| binomial_u64(m as u64, i)).sum();
        ensure(cd == binomial_u64(m as u64, d as u64) && cleqd == want, || format!("dimensions {:?} d={d}", x.factors()))?;
    }

    for _ in 0..TRIALS {
        let m = rng.gen_range(2..=3);
        let with_zero = rng.gen_bool(0.5);
        let x = random_grid(&mut rng, &qs[..4], m, with_zero, HIERARCHY_FACTOR_SIZE);
        let d = rng.gen_range(1..=m);
        let homogeneous = rng.gen_bool(0.5);
        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(&mut rng);
        let a = x.build_code(d, homogeneous).map_err(|e| e.to_string())?;
        let b = x.permuted(&perm).build_code(d, homogeneous).map_err(|e| e.to_string())?;
        let ha = hierarchy_of_matrix(a.generator(), Method::ExactSupport, &opts()).map_err(|e| e.to_string())?;
        let hb = hierarchy_of_matrix(b.generator(), Method::ExactSupport, &opts()).map_err(|e| e.to_string())?;
        ensure(ha == hb, || format!("permutation {:?} by {perm:?}: {ha:?} vs {hb:?}", x.factors()))?;
        ensure(verify_monotonicity(&ha, a.len()), || format!("monotonicity {ha:?}"))?;
        hierarchies += 2;
    }
    in_time(
        start,
        PROPERTY_LIMIT,
        format!("6 suites x {TRIALS} trials pass; {hierarchies} hierarchies strictly increasing"),
    )
}

/// Same commands with different worker counts give byte-identical reports.
fn determinism() -> Outcome {
    let runs: [&[&str]; 4] = [
        &["--format", "json", "verify", "--suite", "all", "--seed", "7", "--trials", "20"],
        &["--format", "json", "ghw", "--q", "3", "--m", "3", "--d", "2", "--preset", "affine", "--method", "all"],
        &["--format", "csv", "table", "--q", "2..3", "--m", "2..3", "--all-r"],
        &["--format", "json", "table", "--q", "2..3", "--m", "1..2", "--projective"],
    ];
    for args in runs {
        let mut outputs = Vec::new();
        for jobs in ["1", "2", "4"] {
            let out = Command::new(env!("CARGO_BIN_EXE_cghw"))
                .arg("--jobs")
                .arg(jobs)
                .args(args)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(out.status.success(), || format!("{args:?} --jobs {jobs} exited with {:?}", out.status.code()))?;
            outputs.push(out.stdout);
        }
        let env_run = Command::new(env!("CARGO_BIN_EXE_cghw")).env("CGHW_JOBS", "3").args(args).output().map_err(|e| e.to_string())?;
        outputs.push(env_run.stdout);
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || format!("{args:?} differs between worker counts"))?;
    }
    Ok(format!("{} commands byte-identical for --jobs 1, 2, 4 and CGHW_JOBS=3", runs.len()))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 sharpness grid", sharpness_grid),
        ("2 non-homogeneous grid", nonhomogeneous_grid),
        ("3 mixed sizes", mixed_sizes),
        ("4 torus example", torus_example),
        ("5 projective suite", projective_suite),
        ("6 property suites", property_suites),
        ("7 determinism", determinism),
    ];
    // keep the filter semantics of libtest loosely: `cargo test -- name` runs matching criteria
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
