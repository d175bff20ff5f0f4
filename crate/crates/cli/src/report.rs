use std::io::Write;

use serde::Serialize;
use sqfree_ghw::cartesian::{CodeFamily, EvaluationCode};
use sqfree_ghw::ghw::Witness;

use crate::args::Format;

pub const SCHEMA_VERSION: u32 = 1;

/// A row that also has a flat projection for CSV and table output.
pub trait Tabular: Serialize {
    fn header() -> Vec<&'static str>;
    fn fields(&self) -> Vec<String>;
}

#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Serialize)]
pub struct CodeSummary {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub homogeneous: bool,
    pub family: CodeFamily,
    pub monomials: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<Vec<Vec<u32>>>,
}

impl CodeSummary {
    pub fn new(code: &EvaluationCode, first_index: usize, generator: bool) -> Self {
        CodeSummary {
            q: code.field().order(),
            n: code.len(),
            k: code.dimension(),
            d: code.degree(),
            homogeneous: code.is_homogeneous(),
            family: code.family().clone(),
            monomials: code.monomials().iter().map(|a| a.render(first_index)).collect(),
            generator: generator.then(|| code.generator().to_rows()),
        }
    }
}

#[derive(Serialize)]
pub struct Report<R: Tabular> {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<CodeSummary>,
    pub rows: Vec<R>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl<R: Tabular> Report<R> {
    pub fn new(command: &'static str, config: &impl Serialize) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command,
            config: serde_json::to_value(config).expect("configuration serializes"),
            code: None,
            rows: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), pass, detail: detail.into() });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(R::header())?;
                for row in &self.rows {
                    w.write_record(row.fields())?;
                }
                w.flush()
            }
            Format::Table => self.write_table(out),
        }
    }

    fn write_table(&self, out: &mut impl Write) -> std::io::Result<()> {
        if let Some(c) = &self.code {
            writeln!(out, "q={} n={} k={} d={} {}", c.q, c.n, c.k, c.d, if c.homogeneous { "C_d" } else { "C_<=d" })?;
            if let Some(g) = &c.generator {
                for row in g {
                    writeln!(out, "  {}", row.iter().map(u32::to_string).collect::<Vec<_>>().join(" "))?;
                }
            }
        }
        let header = R::header();
        let cells: Vec<Vec<String>> = self.rows.iter().map(Tabular::fields).collect();
        if !cells.is_empty() {
            let widths: Vec<usize> = (0..header.len())
                .map(|i| cells.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
                .collect();
            let line = |fields: Vec<&str>| -> String {
                fields.iter().zip(&widths).map(|(f, w)| format!("{f:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
            };
            writeln!(out, "{}", line(header.clone()))?;
            for row in &cells {
                writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
            }
        }
        for c in &self.checks {
            writeln!(out, "[{}] {}: {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail)?;
        }
        for n in &self.notes {
            writeln!(out, "note: {n}")?;
        }
        Ok(())
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

pub fn render_witness(w: &Witness) -> String {
    let set = |items: Vec<String>| format!("{{{}}}", items.join(","));
    match w {
        Witness::Monomials(ms) => set(ms.iter().map(|m| m.to_string()).collect()),
        Witness::Support(s) => format!("support={}", set(s.iter().map(usize::to_string).collect())),
        Witness::Subcode(sc) => {
            let rows: Vec<String> =
                sc.coefficients.iter().map(|r| r.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")).collect();
            format!("rows=[{}] support={}", rows.join("; "), set(sc.support.iter().map(usize::to_string).collect()))
        }
    }
}

#[derive(Serialize)]
pub struct CodeRow {
    pub n: usize,
    pub k: usize,
    pub expected_k: String,
    pub dimension_ok: bool,
}

impl Tabular for CodeRow {
    fn header() -> Vec<&'static str> {
        vec!["n", "k", "expected_k", "dimension_ok"]
    }

    fn fields(&self) -> Vec<String> {
        vec![self.n.to_string(), self.k.to_string(), self.expected_k.clone(), self.dimension_ok.to_string()]
    }
}

#[derive(Serialize)]
pub struct GhwRow {
    pub r: usize,
    pub method: &'static str,
    pub value: Option<u64>,
    pub lower_bound_only: bool,
    pub budget_exceeded: bool,
    /// Best value seen before the search stopped; `d_r` is at most this.
    pub upper_bound: Option<u64>,
    pub witness: Option<Witness>,
    pub millis: Option<u64>,
}

impl Tabular for GhwRow {
    fn header() -> Vec<&'static str> {
        vec!["r", "method", "value", "lower_bound_only", "budget_exceeded", "upper_bound", "witness", "millis"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.r.to_string(),
            self.method.to_string(),
            opt(&self.value),
            self.lower_bound_only.to_string(),
            self.budget_exceeded.to_string(),
            opt(&self.upper_bound),
            self.witness.as_ref().map(render_witness).unwrap_or_default(),
            opt(&self.millis),
        ]
    }
}

#[derive(Serialize)]
pub struct SuiteRow {
    pub suite: &'static str,
    pub trials: usize,
    pub passed: usize,
    pub skipped: usize,
    pub millis: Option<u64>,
}

impl Tabular for SuiteRow {
    fn header() -> Vec<&'static str> {
        vec!["suite", "trials", "passed", "skipped", "millis"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.suite.to_string(),
            self.trials.to_string(),
            self.passed.to_string(),
            self.skipped.to_string(),
            opt(&self.millis),
        ]
    }
}

#[derive(Serialize)]
pub struct TableRow {
    pub q: usize,
    pub m: usize,
    pub d: usize,
    pub r: usize,
    pub n: usize,
    pub k: usize,
    pub exact: Option<u64>,
    pub footprint: Option<u64>,
    pub formula: Option<u64>,
    pub agree: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub affine_eq_scaled_projective: Option<bool>,
}

impl Tabular for TableRow {
    fn header() -> Vec<&'static str> {
        vec!["q", "m", "d", "r", "n", "k", "exact", "footprint", "formula", "agree"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.q.to_string(),
            self.m.to_string(),
            self.d.to_string(),
            self.r.to_string(),
            self.n.to_string(),
            self.k.to_string(),
            opt(&self.exact),
            opt(&self.footprint),
            opt(&self.formula),
            self.agree.to_string(),
        ]
    }
}

/// Projective sweep rows: the table columns plus the scaling check.
#[derive(Serialize)]
#[serde(transparent)]
pub struct ProjectiveRow(pub TableRow);

impl Tabular for ProjectiveRow {
    fn header() -> Vec<&'static str> {
        let mut h = TableRow::header();
        h.push("affine_eq_scaled_projective");
        h
    }

    fn fields(&self) -> Vec<String> {
        let mut f = self.0.fields();
        f.push(opt(&self.0.affine_eq_scaled_projective));
        f
    }
}
