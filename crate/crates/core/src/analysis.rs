//! Error tables, the published-table audit, convergence order, and the
//! CSV/JSON emitters shared by the command-line tool.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::approximations::ApproxSpec;
use crate::bpes_fit::{BpesRun, FitResult};
use crate::error::{Error, Result};
use crate::exact_landau::{landau_sequence, landau_sequence_capped, ExactRational, DEFAULT_N_CAP};

/// Decimals used for the exact column of an [`ErrorReport`].
pub const EXACT_DECIMALS: usize = 10;

/// The published comparison table, shipped with the crate.
pub const EMBEDDED_TABLE: &str = include_str!("../data/table1.csv");

// ---------------------------------------------------------------------------
// Error tables

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxEntry {
    pub value: f64,
    pub abs_error: f64,
    pub sq_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorRow {
    pub n: u64,
    /// `G_n` rounded half-even to [`EXACT_DECIMALS`] places.
    pub exact: String,
    /// One entry per approximation, in report order.
    pub entries: Vec<ApproxEntry>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReportMetadata {
    /// `(a, b, c)` of the fitted form, when one is in the report.
    pub fit_params: Option<[f64; 3]>,
    pub working_precision_digits: u32,
    /// Left empty by default so that emitted output stays byte-stable.
    pub generated_at: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub approximations: Vec<ApproxSpec>,
    pub rows: Vec<ErrorRow>,
    pub metadata: ReportMetadata,
}

/// Exact `G_n` for `n = 0..=n_max` against each approximation. The absolute
/// error is `|G_n - value|` taken exactly, then rounded once.
pub fn error_table(n_max: u64, approx_set: &[ApproxSpec]) -> Result<ErrorReport> {
    error_table_capped(n_max, approx_set, DEFAULT_N_CAP)
}

/// [`error_table`] with an explicit bound on `n_max`.
pub fn error_table_capped(
    n_max: u64,
    approx_set: &[ApproxSpec],
    n_cap: u64,
) -> Result<ErrorReport> {
    if approx_set.is_empty() {
        return Err(Error::Domain("no approximations requested".into()));
    }
    let seq = landau_sequence_capped(n_max, n_cap)?;
    let rows = seq
        .values()
        .par_iter()
        .enumerate()
        .map(|(n, g)| {
            let entries = approx_set
                .iter()
                .map(|spec| {
                    let value = spec.eval(n as u64)?;
                    let abs_error = (g - &ExactRational::from_f64(value)?).abs().to_f64();
                    Ok(ApproxEntry {
                        value,
                        abs_error,
                        sq_error: abs_error * abs_error,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ErrorRow {
                n: n as u64,
                exact: g.to_decimal(EXACT_DECIMALS),
                entries,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit_params = approx_set.iter().find_map(|s| match *s {
        ApproxSpec::Fitted { a, b, c } => Some([a, b, c]),
        _ => None,
    });
    Ok(ErrorReport {
        approximations: approx_set.to_vec(),
        rows,
        metadata: ReportMetadata {
            fit_params,
            working_precision_digits: 17,
            generated_at: None,
        },
    })
}

// ---------------------------------------------------------------------------
// Convergence order

/// Negated least-squares slope of `ln(error)` against `ln(n + 3/4)`.
pub fn convergence_order(ns: &[u64], errors: &[f64]) -> Result<f64> {
    if ns.len() != errors.len() || ns.len() < 3 {
        return Err(Error::Domain(
            "need at least 3 (n, error) pairs of equal length".into(),
        ));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("n values must be strictly increasing".into()));
    }
    if let Some(e) = errors
        .iter()
        .find(|e| e.partial_cmp(&&0.0) != Some(std::cmp::Ordering::Greater) || !e.is_finite())
    {
        return Err(Error::Domain(format!("error {e} is not positive")));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64 + 0.75).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(-sxy / sxx)
}

// ---------------------------------------------------------------------------
// Published table

#[derive(Clone, Debug, PartialEq)]
pub struct PaperRow {
    pub n: u64,
    pub falaleev: ExactRational,
    pub brutman: ExactRational,
    pub bpes: ExactRational,
    pub err_falaleev: ExactRational,
    pub err_brutman: ExactRational,
    /// Half a unit in the last printed digit of the two error cells.
    pub err_half_ulp: (ExactRational, ExactRational),
}

/// The 20-row comparison table, cells kept as exact decimals.
#[derive(Clone, Debug, PartialEq)]
pub struct PaperTable {
    pub rows: Vec<PaperRow>,
}

#[derive(Deserialize)]
struct RawRow {
    n: u64,
    falaleev: String,
    brutman: String,
    bpes: String,
    err_falaleev: String,
    err_brutman: String,
}

/// Half a unit in the last digit of a decimal literal like `9.7924E-9`.
fn half_ulp(literal: &str) -> Result<ExactRational> {
    let s = literal.trim();
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad_cell(s))?),
        None => (s, 0),
    };
    let decimals = mantissa.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
    let power = exponent - decimals;
    let five = ExactRational::new(5, 10)?;
    let ten = ExactRational::from_integer(10);
    let mut unit = ExactRational::one();
    for _ in 0..power.unsigned_abs() {
        unit = if power >= 0 { unit * &ten } else { unit / &ten };
    }
    Ok(unit * five)
}

fn bad_cell(s: &str) -> Error {
    Error::MalformedTable(format!("cannot parse cell {s:?}"))
}

impl PaperTable {
    pub fn embedded() -> Self {
        Self::from_reader(EMBEDDED_TABLE.as_bytes()).expect("embedded table is well-formed")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    /// Reads the CSV layout of the embedded file: `#` comment lines, a
    /// header `n,falaleev,brutman,bpes,err_falaleev,err_brutman`, then rows.
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for record in csv.deserialize::<RawRow>() {
            let raw = record.map_err(|e| Error::MalformedTable(e.to_string()))?;
            let cell = |s: &str| s.parse::<ExactRational>().map_err(|_| bad_cell(s));
            rows.push(PaperRow {
                n: raw.n,
                falaleev: cell(&raw.falaleev)?,
                brutman: cell(&raw.brutman)?,
                bpes: cell(&raw.bpes)?,
                err_falaleev: cell(&raw.err_falaleev)?,
                err_brutman: cell(&raw.err_brutman)?,
                err_half_ulp: (half_ulp(&raw.err_falaleev)?, half_ulp(&raw.err_brutman)?),
            });
        }
        let table = Self { rows };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        if self.rows.len() != 20 {
            return Err(Error::MalformedTable(format!(
                "expected 20 rows, found {}",
                self.rows.len()
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.n != i as u64 {
                return Err(Error::MalformedTable(format!("row {i} has n = {}", row.n)));
            }
        }
        for (name, col) in [
            ("falaleev", self.column(|r| &r.falaleev)),
            ("brutman", self.column(|r| &r.brutman)),
            ("bpes", self.column(|r| &r.bpes)),
        ] {
            if col.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::MalformedTable(format!(
                    "column {name} is not strictly increasing"
                )));
            }
        }
        Ok(())
    }

    fn column<'a>(
        &'a self,
        f: impl Fn(&'a PaperRow) -> &'a ExactRational,
    ) -> Vec<&'a ExactRational> {
        self.rows.iter().map(f).collect()
    }

    /// A value column as `f64`, for fitting.
    pub fn bpes_column(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.bpes.to_f64()).collect()
    }

    pub fn falaleev_column(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.falaleev.to_f64()).collect()
    }

    pub fn brutman_column(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.brutman.to_f64()).collect()
    }
}

// ---------------------------------------------------------------------------
// Audit

/// How a check's deviation is compared against its threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    Below,
    Above,
}

impl Relation {
    fn holds(self, deviation: f64, threshold: f64) -> bool {
        match self {
            Relation::AtMost => deviation <= threshold,
            Relation::Below => deviation < threshold,
            Relation::Above => deviation > threshold,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::Below => "<",
            Relation::Above => ">",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditCheck {
    pub name: &'static str,
    pub passed: bool,
    pub deviation: f64,
    pub threshold: f64,
    pub relation: Relation,
    /// Informational checks are reported but do not decide the verdict.
    pub informational: bool,
}

impl AuditCheck {
    fn new(name: &'static str, deviation: f64, relation: Relation, threshold: f64) -> Self {
        Self {
            name,
            passed: relation.holds(deviation, threshold),
            deviation,
            threshold,
            relation,
            informational: false,
        }
    }

    /// Comparison done on exact rationals; `deviation` is only for display.
    fn exact(
        name: &'static str,
        deviation: &ExactRational,
        relation: Relation,
        threshold: &str,
    ) -> Self {
        let limit: ExactRational = threshold.parse().expect("threshold literal");
        let passed = match relation {
            Relation::AtMost => *deviation <= limit,
            Relation::Below => *deviation < limit,
            Relation::Above => *deviation > limit,
        };
        Self {
            name,
            passed,
            deviation: deviation.to_f64(),
            threshold: limit.to_f64(),
            relation,
            informational: false,
        }
    }

    fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    /// All non-informational checks passed.
    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| !c.informational)
            .all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&AuditCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Largest deviation of `value - ln(n + 3/4)/pi` from its mean over the
/// rows, and that mean.
pub fn log_law_residual(column: &[f64]) -> (f64, f64) {
    let base: Vec<f64> = column
        .iter()
        .enumerate()
        .map(|(n, v)| v - (n as f64 + 0.75).ln() / PI)
        .collect();
    let offset = base.iter().sum::<f64>() / base.len() as f64;
    let max = base.iter().map(|b| (b - offset).abs()).fold(0.0, f64::max);
    (max, offset)
}

#[derive(Clone, Copy)]
enum RefColumn {
    Falaleev,
    Brutman,
}

impl RefColumn {
    /// `(value, printed squared error, half ulp of that print)`.
    fn select(self, r: &PaperRow) -> (&ExactRational, &ExactRational, &ExactRational) {
        match self {
            RefColumn::Falaleev => (&r.falaleev, &r.err_falaleev, &r.err_half_ulp.0),
            RefColumn::Brutman => (&r.brutman, &r.err_brutman, &r.err_half_ulp.1),
        }
    }
}

/// `|(bpes - value)^2 - printed|` for one row.
fn squared_gap_deviation(r: &PaperRow, col: RefColumn) -> ExactRational {
    let (approx, printed, _) = col.select(r);
    let d = &r.bpes - approx;
    (&d * &d - printed.clone()).abs()
}

/// Reference gap between the Brutman and Falaleev columns.
pub const BRUTMAN_FALALEEV_GAP: &str = "6.2790e-5";

/// Measures the relationships between the columns of the published table.
///
/// The six verdict checks:
/// 1. `err_falaleev` equals `(bpes - falaleev)^2` within `2e-12`;
/// 2. `err_brutman` equals `(bpes - brutman)^2` within `2e-12`;
/// 3. `brutman - falaleev` is `6.2790e-5` within `1e-8` on every row;
/// 4. both reference columns follow `ln(n + 3/4)/pi + constant` with
///    residual below `5e-8`;
/// 5. the BPES column misses that law by more than `1e-4`;
/// 6. no value column is within `1e-3` of the exact `G_n` for `n <= 3`.
///
/// Two informational checks repeat 1 and 2 with a per-row bound that
/// propagates the 8-decimal rounding of the value cells and the printed
/// precision of the error cells.
pub fn audit_paper_table(table: &PaperTable) -> Result<AuditReport> {
    table.validate()?;
    let mut checks = Vec::new();

    for (name, col) in [
        ("err_falaleev_is_squared_bpes_gap", RefColumn::Falaleev),
        ("err_brutman_is_squared_bpes_gap", RefColumn::Brutman),
    ] {
        let dev = table
            .rows
            .iter()
            .map(|r| squared_gap_deviation(r, col))
            .max()
            .expect("20 rows");
        checks.push(AuditCheck::exact(name, &dev, Relation::AtMost, "2e-12"));
    }

    let gap: ExactRational = BRUTMAN_FALALEEV_GAP.parse()?;
    let gap_dev = table
        .rows
        .iter()
        .map(|r| (&(&r.brutman - &r.falaleev) - &gap).abs())
        .max()
        .expect("20 rows");
    checks.push(AuditCheck::exact(
        "brutman_minus_falaleev_constant",
        &gap_dev,
        Relation::AtMost,
        "1e-8",
    ));

    let (fal_res, _) = log_law_residual(&table.falaleev_column());
    let (bru_res, _) = log_law_residual(&table.brutman_column());
    checks.push(AuditCheck::new(
        "reference_columns_follow_log_law",
        fal_res.max(bru_res),
        Relation::Below,
        5e-8,
    ));

    let (bpes_res, _) = log_law_residual(&table.bpes_column());
    checks.push(AuditCheck::new(
        "bpes_column_departs_from_log_law",
        bpes_res,
        Relation::Above,
        1e-4,
    ));

    let seq = landau_sequence(3)?;
    let closest = table.rows[..4]
        .iter()
        .flat_map(|r| {
            let g = &seq.values()[r.n as usize];
            [&r.falaleev, &r.brutman, &r.bpes].map(|v| (v - g).abs())
        })
        .min()
        .expect("12 cells");
    checks.push(AuditCheck::exact(
        "value_columns_differ_from_exact",
        &closest,
        Relation::Above,
        "1e-3",
    ));

    // 8-decimal cells: each value is within 5e-9, so the gap is within 1e-8
    let cell = ExactRational::new(1, 100_000_000)?;
    for (name, col) in [
        ("err_falaleev_within_input_rounding", RefColumn::Falaleev),
        ("err_brutman_within_input_rounding", RefColumn::Brutman),
    ] {
        let ratio = table
            .rows
            .iter()
            .map(|r| {
                let (approx, _, ulp) = col.select(r);
                let gap = (&r.bpes - approx).abs();
                let bound =
                    ExactRational::from_integer(2) * gap * &cell + &cell * &cell + ulp.clone();
                (squared_gap_deviation(r, col) / bound).to_f64()
            })
            .fold(0.0, f64::max);
        checks.push(AuditCheck::new(name, ratio, Relation::AtMost, 1.0).informational());
    }

    Ok(AuditReport { checks })
}

// ---------------------------------------------------------------------------
// Emission

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

/// Float rendering in CSV output. JSON always uses shortest round-trip
/// numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FloatStyle {
    /// 17 significant digits.
    #[default]
    Machine,
    /// 8 fixed decimals, as in the published table.
    PaperCompat,
}

impl FloatStyle {
    pub fn format(self, v: f64) -> String {
        match self {
            FloatStyle::Machine => format!("{v:.16e}"),
            FloatStyle::PaperCompat => format!("{v:.8}"),
        }
    }
}

/// Something the command-line tool can print.
pub trait Emit {
    fn to_csv(&self, style: FloatStyle) -> String;
    fn to_json(&self) -> Value;
}

/// Renders `item` in `format`; LF line endings, sorted compact JSON.
pub fn emit(item: &dyn Emit, format: OutputFormat, style: FloatStyle) -> Vec<u8> {
    match format {
        OutputFormat::Csv => item.to_csv(style).into_bytes(),
        OutputFormat::Json => {
            let mut s = serde_json::to_string(&item.to_json()).expect("JSON values serialize");
            s.push('\n');
            s.into_bytes()
        }
    }
}

fn float_json(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

impl ErrorReport {
    /// Column names for each approximation: generic when there is exactly
    /// one, prefixed by the approximation name otherwise.
    fn column_names(&self) -> Vec<[String; 3]> {
        if self.approximations.len() == 1 {
            return vec![["approx".into(), "abs_error".into(), "sq_error".into()]];
        }
        self.approximations
            .iter()
            .map(|a| {
                let name = a.name();
                [
                    name.to_string(),
                    format!("{name}_abs_error"),
                    format!("{name}_sq_error"),
                ]
            })
            .collect()
    }
}

impl Emit for ErrorReport {
    fn to_csv(&self, style: FloatStyle) -> String {
        let names = self.column_names();
        let mut out = String::from("n,exact");
        for cols in &names {
            for c in cols {
                out.push(',');
                out.push_str(c);
            }
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{},{}", row.n, row.exact);
            for e in &row.entries {
                let _ = write!(
                    out,
                    ",{},{},{}",
                    style.format(e.value),
                    style.format(e.abs_error),
                    style.format(e.sq_error)
                );
            }
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> Value {
        let names = self.column_names();
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut obj = Map::new();
                    obj.insert("n".into(), json!(row.n));
                    obj.insert("exact".into(), json!(row.exact));
                    for (cols, e) in names.iter().zip(&row.entries) {
                        obj.insert(cols[0].clone(), float_json(e.value));
                        obj.insert(cols[1].clone(), float_json(e.abs_error));
                        obj.insert(cols[2].clone(), float_json(e.sq_error));
                    }
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

impl Emit for AuditReport {
    fn to_csv(&self, style: FloatStyle) -> String {
        let mut out = String::from("check,passed,deviation,relation,threshold,informational\n");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                c.name,
                c.passed,
                style.format(c.deviation),
                c.relation.symbol(),
                style.format(c.threshold),
                c.informational
            );
        }
        out
    }

    fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "passed": c.passed,
                    "deviation": float_json(c.deviation),
                    "relation": c.relation.symbol(),
                    "threshold": float_json(c.threshold),
                    "informational": c.informational,
                })
            })
            .collect();
        json!({ "passed": self.passed(), "checks": checks })
    }
}

const FIT_HEADER: &str = "a,b,c,objective,iterations,converged,method,n_lo,n_hi";

fn fit_csv_fields(fit: &FitResult, style: FloatStyle) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        style.format(fit.a),
        style.format(fit.b),
        style.format(fit.c),
        style.format(fit.objective),
        fit.iterations,
        fit.converged,
        fit.method,
        fit.n_lo,
        fit.n_hi
    )
}

impl Emit for FitResult {
    fn to_csv(&self, style: FloatStyle) -> String {
        format!("{FIT_HEADER}\n{}\n", fit_csv_fields(self, style))
    }

    fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("FitResult serializes")
    }
}

/// A BPES fit together with the protocol's achieved conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct BpesFitReport {
    pub fit: FitResult,
    pub n0: usize,
    pub delta: f64,
    pub delta_prime: f64,
    pub delta_prime_baseline: f64,
}

impl BpesFitReport {
    pub fn new(run: &BpesRun, fit: FitResult) -> Self {
        Self {
            fit,
            n0: run.coefficients.n0,
            delta: run.delta,
            delta_prime: run.delta_prime,
            delta_prime_baseline: run.delta_prime_baseline,
        }
    }
}

impl Emit for BpesFitReport {
    fn to_csv(&self, style: FloatStyle) -> String {
        format!(
            "{FIT_HEADER},n0,delta,delta_prime,delta_prime_baseline\n{},{},{},{},{}\n",
            fit_csv_fields(&self.fit, style),
            self.n0,
            style.format(self.delta),
            style.format(self.delta_prime),
            style.format(self.delta_prime_baseline)
        )
    }

    fn to_json(&self) -> Value {
        let mut v = self.fit.to_json();
        let obj = v.as_object_mut().expect("FitResult is an object");
        obj.insert("n0".into(), json!(self.n0));
        obj.insert("delta".into(), float_json(self.delta));
        obj.insert("delta_prime".into(), float_json(self.delta_prime));
        obj.insert(
            "delta_prime_baseline".into(),
            float_json(self.delta_prime_baseline),
        );
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approximations::falaleev;
    use crate::bpes_fit::FitMethod;

    #[test]
    fn error_table_single_row() {
        let report = error_table(0, &[ApproxSpec::Falaleev]).unwrap();
        assert_eq!(report.rows.len(), 1);
        let row = &report.rows[0];
        assert_eq!(row.n, 0);
        assert_eq!(row.exact, "1.0000000000");
        let e = row.entries[0];
        assert!((e.value - 0.9747038).abs() < 5e-8);
        assert!((e.abs_error - 0.0252962).abs() < 5e-8);
        assert!((e.sq_error - 6.3990e-4).abs() < 5e-8);
    }

    #[test]
    fn fitted_falaleev_point_matches_falaleev() {
        let a = error_table(2, &[ApproxSpec::Falaleev]).unwrap();
        let b = error_table(2, &[ApproxSpec::fitted(0.75, 0.0, 1.0).unwrap()]).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert!((ra.entries[0].abs_error - rb.entries[0].abs_error).abs() <= 1e-15);
            assert!((ra.entries[0].sq_error - rb.entries[0].sq_error).abs() <= 1e-15);
        }
        assert_eq!(b.metadata.fit_params, Some([0.75, 0.0, 1.0]));
    }

    #[test]
    fn error_table_rows_and_errors() {
        let specs = [
            ApproxSpec::Falaleev,
            ApproxSpec::brutman_default(),
            ApproxSpec::fitted(1.2, 0.1, 1.0).unwrap(),
        ];
        let report = error_table(30, &specs).unwrap();
        let seq = landau_sequence(30).unwrap();
        for (i, row) in report.rows.iter().enumerate() {
            assert_eq!(row.n, i as u64);
            for (spec, e) in specs.iter().zip(&row.entries) {
                assert!(e.abs_error >= 0.0);
                let recomputed = (seq.values()[i].to_f64() - spec.eval(i as u64).unwrap()).abs();
                assert!((e.abs_error - recomputed).abs() <= 1e-12);
                assert_eq!(e.sq_error, e.abs_error * e.abs_error);
            }
        }
        assert!(error_table(3, &[]).is_err());
    }

    #[test]
    fn order_examples() {
        let ns = [10u64, 20, 40, 80, 160];
        let seq = landau_sequence(160).unwrap();
        let errs: Vec<f64> = ns
            .iter()
            .map(|&n| seq.values()[n as usize].to_f64() - falaleev(n))
            .collect();
        let p = convergence_order(&ns, &errs).unwrap();
        assert!((p - 2.0).abs() < 0.1, "{p}");

        let big = [1_000_000u64, 2_000_000, 4_000_000, 8_000_000];
        let inv: Vec<f64> = big.iter().map(|&n| 3.0 / n as f64).collect();
        assert!((convergence_order(&big, &inv).unwrap() - 1.0).abs() < 1e-6);
        let cube: Vec<f64> = big.iter().map(|&n| 3.0 / (n as f64).powi(3)).collect();
        assert!((convergence_order(&big, &cube).unwrap() - 3.0).abs() < 1e-6);

        let shifted: Vec<f64> = ns.iter().map(|&n| 0.5 / (n as f64 + 0.75)).collect();
        assert!((convergence_order(&ns, &shifted).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn order_rejects_bad_input() {
        assert!(convergence_order(&[1, 2], &[1.0, 0.5]).is_err());
        assert!(convergence_order(&[1, 2, 3], &[1.0, 0.0, 0.5]).is_err());
        assert!(convergence_order(&[1, 3, 2], &[1.0, 0.5, 0.2]).is_err());
        assert!(convergence_order(&[1, 2, 3], &[1.0, 0.5]).is_err());
    }

    #[test]
    fn embedded_table_shape() {
        let t = PaperTable::embedded();
        assert_eq!(t.rows.len(), 20);
        assert!(EMBEDDED_TABLE.starts_with("# source: paper Table 1"));
        assert_eq!(t.rows[0].bpes, "0.97473411".parse().unwrap());
        assert_eq!(t.rows[19].err_brutman, "1.16891E-6".parse().unwrap());
        assert_eq!(t.rows[0].err_half_ulp.0, "5e-14".parse().unwrap());
        assert_eq!(t.rows[8].err_half_ulp.1, "5e-12".parse().unwrap());
    }

    #[test]
    fn brutman_offset_is_the_table_mean() {
        let (_, offset) = log_law_residual(&PaperTable::embedded().brutman_column());
        assert!((offset - crate::approximations::BRUTMAN_OFFSET).abs() < 1e-15);
    }

    #[test]
    fn malformed_tables() {
        let short: String = EMBEDDED_TABLE
            .lines()
            .take(10)
            .collect::<Vec<_>>()
            .join("\n");
        assert!(matches!(
            PaperTable::from_reader(short.as_bytes()),
            Err(Error::MalformedTable(_))
        ));
        let garbled = EMBEDDED_TABLE.replace("0.97473411", "zero");
        assert!(matches!(
            PaperTable::from_reader(garbled.as_bytes()),
            Err(Error::MalformedTable(_))
        ));
        let swapped = EMBEDDED_TABLE.replace("\n1,", "\n7,");
        assert!(PaperTable::from_reader(swapped.as_bytes()).is_err());
        let decreasing = EMBEDDED_TABLE.replace("1.24449240", "0.90000000");
        assert!(PaperTable::from_reader(decreasing.as_bytes()).is_err());
    }

    #[test]
    fn audit_measurements() {
        let report = audit_paper_table(&PaperTable::embedded()).unwrap();
        let gap = report.check("brutman_minus_falaleev_constant").unwrap();
        assert!(gap.passed);
        assert!((gap.deviation - 1e-8).abs() < 1e-15);
        let law = report.check("reference_columns_follow_log_law").unwrap();
        assert!(law.passed && law.deviation < 6e-9);
        let bpes = report.check("bpes_column_departs_from_log_law").unwrap();
        assert!(bpes.passed && bpes.deviation > 5e-4);
        let exact = report.check("value_columns_differ_from_exact").unwrap();
        assert!(exact.passed);
        // row n=3, BPES cell: |1.48719911 - 381/256|
        assert!((exact.deviation - 0.00108214).abs() < 1e-8);
        for name in [
            "err_falaleev_within_input_rounding",
            "err_brutman_within_input_rounding",
        ] {
            let c = report.check(name).unwrap();
            assert!(c.informational && c.passed, "{c:?}");
        }
        // printed squared errors carry 6 significant digits, which at 1e-6
        // is a resolution of 1e-11
        let sq = report.check("err_falaleev_is_squared_bpes_gap").unwrap();
        assert!((sq.deviation - 1.23975e-11).abs() < 1e-16);
        let row0 = &PaperTable::embedded().rows[0];
        let d = &row0.bpes - &row0.falaleev;
        let dev0 = (&d * &d - row0.err_falaleev.clone()).abs().to_f64();
        assert!(dev0 <= 2e-12, "{dev0}");
    }

    #[test]
    fn audit_detects_perturbation() {
        let mutated = EMBEDDED_TABLE.replace("1.82281214", "1.82381214");
        let report =
            audit_paper_table(&PaperTable::from_reader(mutated.as_bytes()).unwrap()).unwrap();
        assert!(!report.passed());
        assert!(
            !report
                .check("err_falaleev_within_input_rounding")
                .unwrap()
                .passed
        );
    }

    #[test]
    fn csv_single_approx_schema() {
        let report = error_table(0, &[ApproxSpec::Falaleev]).unwrap();
        let csv = String::from_utf8(emit(&report, OutputFormat::Csv, FloatStyle::Machine)).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,exact,approx,abs_error,sq_error");
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("0,1.0000000000,9.7470380546967"));
        assert!(!csv.contains('\r'));
        let paper =
            String::from_utf8(emit(&report, OutputFormat::Csv, FloatStyle::PaperCompat)).unwrap();
        assert_eq!(
            paper.lines().nth(1).unwrap(),
            "0,1.0000000000,0.97470381,0.02529619,0.00063990"
        );
    }

    #[test]
    fn csv_multi_approx_schema() {
        let report =
            error_table(2, &[ApproxSpec::Falaleev, ApproxSpec::brutman_default()]).unwrap();
        let csv = report.to_csv(FloatStyle::Machine);
        assert_eq!(
            csv.lines().next().unwrap(),
            "n,exact,falaleev,falaleev_abs_error,falaleev_sq_error,brutman,brutman_abs_error,brutman_sq_error"
        );
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn json_is_sorted_and_compact() {
        let report = error_table(0, &[ApproxSpec::Falaleev]).unwrap();
        let text =
            String::from_utf8(emit(&report, OutputFormat::Json, FloatStyle::Machine)).unwrap();
        assert!(text.starts_with("[{\"abs_error\":"));
        assert!(!text.trim_end().contains(' ') && !text.trim_end().contains('\n'));
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 1);

        let fit = FitResult {
            a: 1.0,
            b: 0.5,
            c: 2.0,
            objective: 0.25,
            iterations: 7,
            converged: true,
            method: FitMethod::Direct,
            n_lo: 0,
            n_hi: 200,
            jacobian_rank: 3,
        };
        let text = String::from_utf8(emit(&fit, OutputFormat::Json, FloatStyle::Machine)).unwrap();
        assert_eq!(
            text,
            "{\"a\":1.0,\"b\":0.5,\"c\":2.0,\"converged\":true,\"iterations\":7,\"method\":\"direct\",\"n_hi\":200,\"n_lo\":0,\"objective\":0.25}\n"
        );
        assert_eq!(
            fit.to_csv(FloatStyle::PaperCompat),
            "a,b,c,objective,iterations,converged,method,n_lo,n_hi\n1.00000000,0.50000000,2.00000000,0.25000000,7,true,direct,0,200\n"
        );
    }

    #[test]
    fn emission_is_deterministic_across_thread_counts() {
        let specs = [ApproxSpec::Falaleev, ApproxSpec::brutman_default()];
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    emit(
                        &error_table(50, &specs).unwrap(),
                        OutputFormat::Csv,
                        FloatStyle::Machine,
                    )
                })
        };
        let one = run(1);
        assert_eq!(one, run(4));
        assert_eq!(one, run(1));
    }

    #[test]
    fn unsupported_format() {
        assert!(matches!(
            "xml".parse::<OutputFormat>(),
            Err(Error::UnsupportedFormat(_))
        ));
        assert_eq!("json".parse::<OutputFormat>().unwrap(), OutputFormat::Json);
    }
}
