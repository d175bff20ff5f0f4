use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use num_bigint::BigUint;
use sqfree_ghw::cartesian::{preset, CartesianSet, CodeError, EvaluationCode, Preset};
use sqfree_ghw::combinatorics::gaussian_binomial;
use sqfree_ghw::footprint::FootprintError;
use sqfree_ghw::formulas::{code_dimensions, FormulaError};
use sqfree_ghw::ghw::{
    ghw_exact_subspaces, ghw_exact_support, ghw_value, hierarchy_of_matrix, verify_monotonicity, GhwError, GhwRecord,
    Method,
};
use sqfree_ghw::projective::{build_affine_punctured_code, build_projective_code, representatives};
use sqfree_ghw::{Field, SearchOptions};
use thiserror::Error;

use crate::args::{CodeArgs, CodeSpec, Format, GhwArgs, MethodArg, PresetArg, TableArgs};
use crate::report::{CodeRow, CodeSummary, GhwRow, ProjectiveRow, Report, TableRow, Tabular};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("methods disagree\n{0}")]
    Disagreement(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Disagreement(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<CodeError> for CliError {
    fn from(e: CodeError) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_DISAGREE: i32 = 4;
pub const EXIT_CHECK_FAILED: i32 = 1;

pub struct Context<'a> {
    pub format: Format,
    pub timings: bool,
    pub out: &'a mut dyn Write,
}

impl Context<'_> {
    pub fn millis(&self, start: Instant) -> Option<u64> {
        self.timings.then(|| start.elapsed().as_millis() as u64)
    }

    pub fn emit<R: Tabular>(&mut self, report: &Report<R>) -> Result<(), CliError> {
        report.write(self.format, &mut self.out)?;
        Ok(())
    }
}

pub fn field(q: u64) -> Result<Field, CliError> {
    Field::new(q).map_err(|e| CliError::Validation(e.to_string()))
}

/// Number of variables of the monomials, and the index of the first one when rendered.
fn variables(spec: &CodeSpec, code: &EvaluationCode) -> (usize, usize) {
    match spec.preset {
        Some(PresetArg::Projective) => (code.monomials().first().map_or(0, |a| a.vars()), 0),
        _ => (code.monomials().first().map_or(0, |a| a.vars()), 1),
    }
}

pub fn build_code(spec: &CodeSpec) -> Result<EvaluationCode, CliError> {
    let f = field(spec.q)?;
    if let Some(sets) = &spec.sets {
        return Ok(CartesianSet::parse(&f, sets)?.build_code(spec.d, !spec.leq)?);
    }
    let m = spec.m.ok_or_else(|| CliError::Validation("--m is required unless --sets is given".into()))?;
    let kind = spec.preset.unwrap_or(PresetArg::Affine);
    match kind {
        PresetArg::Projective => {
            if spec.leq {
                return Err(CliError::Validation("the projective code uses monomials of degree exactly d".into()));
            }
            if m == 0 {
                return Err(CliError::Validation("projective codes need m >= 1".into()));
            }
            Ok(build_projective_code(&representatives(&f, m), spec.d)?)
        }
        PresetArg::Affine => Ok(preset(Preset::Affine, &f, m, None)?.build_code(spec.d, !spec.leq)?),
        PresetArg::AffinePunctured => Ok(preset(Preset::AffinePunctured, &f, m, None)?.build_code(spec.d, !spec.leq)?),
        PresetArg::Torus => Ok(preset(Preset::Torus, &f, m, None)?.build_code(spec.d, !spec.leq)?),
    }
}

pub fn cmd_code(args: &CodeArgs, ctx: &mut Context) -> Result<i32, CliError> {
    let code = build_code(&args.spec)?;
    let (vars, first) = variables(&args.spec, &code);
    let (cd, cleqd, _) = code_dimensions(vars, code.degree());
    let expected = if code.is_homogeneous() { cd } else { cleqd };
    let mut report = Report::new("code", args);
    report.code = Some(CodeSummary::new(&code, first, args.show_generator));
    let ok = expected == BigUint::from(code.dimension());
    report.rows.push(CodeRow { n: code.len(), k: code.dimension(), expected_k: expected.to_string(), dimension_ok: ok });
    report.check("dimension", ok, format!("rank {}, expected {expected}", code.dimension()));
    ctx.emit(&report)?;
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

enum Failure {
    Budget { upper_bound: Option<u64>, message: String },
    NotApplicable(String),
    Invalid(String),
}

fn classify(e: GhwError) -> Failure {
    match e {
        GhwError::CapExceeded { count, cap } => Failure::Budget {
            upper_bound: None,
            message: format!("{count} subspaces exceed --subspace-cap {cap}; use --method exact-support or footprint"),
        },
        GhwError::BudgetExceeded { upper_bound, .. } => Failure::Budget {
            upper_bound,
            message: format!("{e}; raise --subset-budget or use --extended"),
        },
        GhwError::Footprint(FootprintError::BudgetExceeded { .. } | FootprintError::SearchBudgetExceeded { .. }) => {
            Failure::Budget { upper_bound: None, message: format!("{e}; raise --subset-budget or use --extended") }
        }
        GhwError::Footprint(FootprintError::TooManyMonomials { .. }) | GhwError::NotApplicable(_) => {
            Failure::NotApplicable(e.to_string())
        }
        GhwError::Formula(FormulaError::BadRange(_)) => Failure::NotApplicable(format!(
            "{e}; the closed forms cover 1 <= r <= m+1-d (m+2-d for projective codes), use --method exact-support"
        )),
        GhwError::Formula(FormulaError::ConditionFails { lower_bound }) => Failure::NotApplicable(format!(
            "size condition fails, {lower_bound} is only a lower bound; use --method exact-support"
        )),
        GhwError::Formula(FormulaError::BadSizes(_)) => Failure::NotApplicable(e.to_string()),
        other => Failure::Invalid(other.to_string()),
    }
}

fn method_of(arg: MethodArg) -> Vec<Method> {
    match arg {
        MethodArg::ExactSubspace => vec![Method::ExactSubspace],
        MethodArg::ExactSupport => vec![Method::ExactSupport],
        MethodArg::Footprint => vec![Method::Footprint],
        MethodArg::Formula => vec![Method::Formula],
        MethodArg::Duality => vec![Method::Duality],
        MethodArg::All => Method::ALL.to_vec(),
    }
}

fn row_from(rec: GhwRecord, millis: Option<u64>) -> GhwRow {
    GhwRow {
        r: rec.r,
        method: rec.method.name(),
        value: Some(rec.value),
        lower_bound_only: rec.lower_bound_only,
        budget_exceeded: false,
        upper_bound: None,
        witness: rec.witness,
        millis,
    }
}

/// Dual hierarchy, computed once per command, and its wall time.
type DualityRun = (Result<Vec<u64>, GhwError>, Option<u64>);

pub fn cmd_ghw(args: &GhwArgs, ctx: &mut Context) -> Result<i32, CliError> {
    let code = build_code(&args.spec)?;
    let k = code.dimension();
    let rs: Vec<usize> = args.r.as_ref().map_or_else(|| (1..=k).collect(), |r| r.values().to_vec());
    if let Some(&bad) = rs.iter().find(|&&r| r == 0 || r > k) {
        return Err(CliError::Validation(format!("r = {bad} is outside 1..={k}")));
    }
    let opts = args.budgets.options();
    let methods = method_of(args.method);
    let single = methods.len() == 1;
    let (_, first) = variables(&args.spec, &code);

    let mut report = Report::new("ghw", args);
    report.code = Some(CodeSummary::new(&code, first, false));
    let mut duality: Option<DualityRun> = None;
    let mut budget_hit = false;

    for &r in &rs {
        for &method in &methods {
            let start = Instant::now();
            let result = if method == Method::Duality {
                let (values, millis) = duality.get_or_insert_with(|| {
                    let v = hierarchy_of_matrix(code.generator(), Method::Duality, &opts);
                    (v, ctx.millis(start))
                });
                values.clone().map(|v| {
                    let rec = GhwRecord { r, value: v[r - 1], method, lower_bound_only: false, witness: None };
                    row_from(rec, *millis)
                })
            } else {
                ghw_value(&code, r, method, &opts).map(|rec| row_from(rec, ctx.millis(start)))
            };
            match result.map_err(classify) {
                Ok(row) => report.rows.push(row),
                Err(Failure::Invalid(msg)) => return Err(CliError::Validation(msg)),
                Err(Failure::NotApplicable(msg)) if single => return Err(CliError::Validation(msg)),
                Err(Failure::NotApplicable(msg)) => report.notes.push(format!("{} skipped for r={r}: {msg}", method.name())),
                Err(Failure::Budget { upper_bound, message }) => {
                    budget_hit = true;
                    report.notes.push(format!("{} r={r}: {message}", method.name()));
                    report.rows.push(GhwRow {
                        r,
                        method: method.name(),
                        value: None,
                        lower_bound_only: false,
                        budget_exceeded: true,
                        upper_bound,
                        witness: None,
                        millis: ctx.millis(start),
                    });
                }
            }
        }
    }

    if !single {
        check_agreement(&report)?;
        report.check("agreement", true, format!("{} rows, every exact value equal per r", report.rows.len()));
    }
    if rs == (1..=k).collect::<Vec<_>>() {
        for &method in &methods {
            let rows: Vec<&GhwRow> = report.rows.iter().filter(|row| row.method == method.name()).collect();
            if rows.len() == k && rows.iter().all(|row| row.value.is_some() && !row.lower_bound_only) {
                let values: Vec<u64> = rows.iter().filter_map(|row| row.value).collect();
                let ok = verify_monotonicity(&values, code.len());
                report.check(format!("monotonicity {}", method.name()), ok, format!("{values:?} within [1, {}]", code.len()));
            }
        }
    }
    // with several methods a budget failure only matters when no exact method produced d_r
    let unresolved = if single {
        budget_hit
    } else {
        rs.iter().any(|&r| {
            !report.rows.iter().any(|row| row.r == r && row.value.is_some() && !row.lower_bound_only && is_exact(row.method))
        })
    };
    ctx.emit(&report)?;
    Ok(if unresolved {
        EXIT_BUDGET
    } else if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn is_exact(method: &str) -> bool {
    [Method::ExactSubspace, Method::ExactSupport, Method::Duality].iter().any(|m| m.name() == method)
}

fn check_agreement(report: &Report<GhwRow>) -> Result<(), CliError> {
    let mut by_r: BTreeMap<usize, Vec<&GhwRow>> = BTreeMap::new();
    for row in report.rows.iter().filter(|row| row.value.is_some()) {
        by_r.entry(row.r).or_default().push(row);
    }
    for (r, rows) in by_r {
        let exact: Vec<u64> = rows.iter().filter(|x| !x.lower_bound_only).filter_map(|x| x.value).collect();
        let floor = exact.iter().min().copied();
        let disagree = exact.iter().any(|&v| Some(v) != floor)
            || rows.iter().filter(|x| x.lower_bound_only).any(|x| floor.is_some_and(|f| x.value.unwrap_or(0) > f));
        if disagree {
            let dump = serde_json::to_string_pretty(&rows).expect("rows serialize");
            return Err(CliError::Disagreement(format!("r = {r}:\n{dump}")));
        }
    }
    Ok(())
}

/// `d_r` by the subspace search when within the cap, otherwise by the support search.
/// `None` when the node budget runs out.
pub fn exact_value(code: &EvaluationCode, r: usize, opts: &SearchOptions) -> Result<Option<u64>, CliError> {
    let count = gaussian_binomial(code.dimension() as u64, r as u64, code.field().order() as u64)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let result = if count <= BigUint::from(opts.subspace_cap) {
        ghw_exact_subspaces(code.generator(), r, opts).map(|(v, _)| v)
    } else {
        ghw_exact_support(code.generator(), r, opts)
    };
    match result {
        Ok(v) => Ok(Some(v)),
        Err(GhwError::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(CliError::Validation(e.to_string())),
    }
}

/// Value of `method`, and whether it is only a lower bound; `None` when the method does not apply.
fn optional_value(code: &EvaluationCode, r: usize, method: Method, opts: &SearchOptions) -> Option<(u64, bool)> {
    ghw_value(code, r, method, opts).ok().map(|rec| (rec.value, rec.lower_bound_only))
}

fn agreement(exact: Option<u64>, others: &[Option<(u64, bool)>]) -> bool {
    let equal: Vec<u64> = exact.into_iter().chain(others.iter().flatten().filter(|x| !x.1).map(|x| x.0)).collect();
    let floor = equal.iter().min().copied();
    equal.iter().all(|&v| Some(v) == floor)
        && others.iter().flatten().filter(|x| x.1).all(|x| floor.is_none_or(|f| x.0 <= f))
}

pub fn cmd_table(args: &TableArgs, ctx: &mut Context) -> Result<i32, CliError> {
    let opts = args.budgets.options();
    let degree_ok = |d: usize| args.d.as_ref().is_none_or(|ds| ds.values().contains(&d));
    let mut budget_hit = false;
    let mut notes = Vec::new();
    let mut table_rows = Vec::new();

    for &q in args.q.values() {
        let f = field(q as u64)?;
        for &m in args.m.values().iter().filter(|&&m| m >= 1) {
            if args.projective {
                let frame = representatives(&f, m);
                for d in (1..=m + 1).filter(|&d| degree_ok(d)) {
                    let proj = build_projective_code(&frame, d)?;
                    let aff = build_affine_punctured_code(&frame, d)?;
                    let k = proj.dimension();
                    let top = if args.all_r { k } else { k.min(m + 2 - d) };
                    for r in 1..=top {
                        let exact = exact_value(&proj, r, &opts)?;
                        let affine = exact_value(&aff, r, &opts)?;
                        let formula = optional_value(&proj, r, Method::Formula, &opts);
                        let scaled = match (exact, affine) {
                            (Some(p), Some(a)) => Some(a == (q as u64 - 1) * p),
                            _ => None,
                        };
                        if exact.is_none() || affine.is_none() {
                            budget_hit = true;
                            notes.push(format!("q={q} m={m} d={d} r={r}: budget exceeded"));
                        }
                        table_rows.push(TableRow {
                            q,
                            m,
                            d,
                            r,
                            n: proj.len(),
                            k,
                            exact,
                            footprint: None,
                            formula: formula.map(|x| x.0),
                            agree: agreement(exact, &[formula]) && scaled != Some(false),
                            affine_eq_scaled_projective: scaled,
                        });
                    }
                }
                continue;
            }
            let kind = match args.preset {
                PresetArg::Affine => Preset::Affine,
                PresetArg::AffinePunctured => Preset::AffinePunctured,
                PresetArg::Torus => Preset::Torus,
                PresetArg::Projective => {
                    return Err(CliError::Validation("use --projective for the projective sweep".into()));
                }
            };
            let set = preset(kind, &f, m, None)?;
            for d in (1..=m).filter(|&d| degree_ok(d)) {
                let code = set.build_code(d, !args.leq)?;
                let k = code.dimension();
                let top = if args.all_r { k } else { k.min(m + 1 - d) };
                for r in 1..=top {
                    let exact = exact_value(&code, r, &opts)?;
                    if exact.is_none() {
                        budget_hit = true;
                        notes.push(format!("q={q} m={m} d={d} r={r}: budget exceeded"));
                    }
                    let footprint = optional_value(&code, r, Method::Footprint, &opts);
                    let formula = optional_value(&code, r, Method::Formula, &opts);
                    table_rows.push(TableRow {
                        q,
                        m,
                        d,
                        r,
                        n: code.len(),
                        k,
                        exact,
                        footprint: footprint.map(|x| x.0),
                        formula: formula.map(|x| x.0),
                        agree: agreement(exact, &[footprint, formula]),
                        affine_eq_scaled_projective: None,
                    });
                }
            }
        }
    }

    let disagreements: Vec<String> = table_rows
        .iter()
        .filter(|row| !row.agree)
        .map(|row| format!("q={} m={} d={} r={}", row.q, row.m, row.d, row.r))
        .collect();
    let agree = disagreements.is_empty();
    let detail = if agree { format!("{} rows", table_rows.len()) } else { disagreements.join(", ") };
    if args.projective {
        let mut report: Report<ProjectiveRow> = Report::new("table", args);
        report.rows = table_rows.into_iter().map(ProjectiveRow).collect();
        report.notes = notes;
        report.check("agreement", agree, detail);
        ctx.emit(&report)?;
    } else {
        let mut report: Report<TableRow> = Report::new("table", args);
        report.rows = table_rows;
        report.notes = notes;
        report.check("agreement", agree, detail);
        ctx.emit(&report)?;
    }
    Ok(if !agree {
        EXIT_DISAGREE
    } else if budget_hit {
        EXIT_BUDGET
    } else {
        EXIT_OK
    })
}
