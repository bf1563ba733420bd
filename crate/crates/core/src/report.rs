//! Stable serializations of every report: an indented key-value text form
//! with nested lists, and CSV tables for plotting. Exact rationals are
//! written as `p/q`, floats with ten decimals.

use num_rational::Ratio;

use crate::arith::CountChkpt;
use crate::diagnostics::{
    AccumulationApprox, CheckStatus, ClosureReport, CoverageReport, DensityEstimate, DensityVerdict, GapReport,
    RatioProfile,
};
use crate::engine::{DirectionSetTruncation, WitnessOutcome};
use crate::error::{Error, Result};
use crate::intsets::SetEnumeration;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Text(String),
    List(Vec<Record>),
}

/// Ordered key-value pairs; values are scalars or lists of records.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Record {
    pub fields: Vec<(String, Value)>,
}

impl Record {
    pub fn new() -> Self {
        Record::default()
    }

    pub fn text(mut self, key: &str, value: impl ToString) -> Self {
        self.fields.push((key.to_string(), Value::Text(value.to_string())));
        self
    }

    pub fn list(mut self, key: &str, items: Vec<Record>) -> Self {
        self.fields.push((key.to_string(), Value::List(items)));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.10}")
}

pub fn fmt_ratio(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn fmt_coords(c: &[f64]) -> String {
    c.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(" ")
}

/// Renders a record as indented `key: value` lines.
pub fn render_structured(r: &Record) -> String {
    let mut out = String::new();
    write_record(r, 0, &mut out);
    out
}

fn write_record(r: &Record, indent: usize, out: &mut String) {
    for (i, (key, value)) in r.fields.iter().enumerate() {
        let pad = if indent >= 2 && i == 0 {
            format!("{}- ", " ".repeat(indent - 2))
        } else {
            " ".repeat(indent)
        };
        match value {
            Value::Text(t) => out.push_str(&format!("{pad}{key}: {t}\n")),
            Value::List(items) if items.is_empty() => out.push_str(&format!("{pad}{key}: []\n")),
            Value::List(items) => {
                out.push_str(&format!("{pad}{key}:\n"));
                for item in items {
                    write_record(item, indent + 4, out);
                }
            }
        }
    }
}

/// A CSV table: header row plus string cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub fn render_csv(t: &Table) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    w.write_record(&t.headers).map_err(csv_err)?;
    for row in &t.rows {
        w.write_record(row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// A report with both serializations.
pub trait Reportable {
    fn kind(&self) -> &'static str;
    fn record(&self) -> Record;
    fn table(&self) -> Table;

    fn structured(&self) -> String {
        render_structured(&Record::new().text("report", self.kind()).merge(self.record()))
    }

    fn csv(&self) -> Result<String> {
        render_csv(&self.table())
    }
}

impl Record {
    fn merge(mut self, other: Record) -> Record {
        self.fields.extend(other.fields);
        self
    }
}

/// Output format selector shared by the CLI and the scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Structured,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "structured" => Ok(Format::Structured),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown format `{other}` (csv or structured)"))),
        }
    }
}

pub fn render(r: &dyn Reportable, format: Format) -> Result<String> {
    match format {
        Format::Structured => Ok(r.structured()),
        Format::Csv => r.csv(),
    }
}

/// Elements of one set up to a bound.
pub struct EnumerationReport<'a> {
    pub spec: String,
    pub bound: u64,
    pub enumeration: &'a SetEnumeration,
}

impl Reportable for EnumerationReport<'_> {
    fn kind(&self) -> &'static str {
        "enumeration"
    }

    fn record(&self) -> Record {
        let e = self.enumeration;
        let mut r = Record::new().text("spec", &self.spec).text("bound", self.bound).text("count", e.values.len());
        if let Some(b) = e.lattice_box {
            r = r.text("lattice_box", format!("{{1..{}}}^{}", b.bound, b.arity));
        }
        r.list("warnings", e.warnings.iter().map(|w| Record::new().text("warning", w)).collect())
            .text("values", e.values.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
    }

    fn table(&self) -> Table {
        let mut t = Table::new(&["value"]);
        for v in &self.enumeration.values {
            t.push(vec![v.to_string()]);
        }
        t
    }
}

impl Reportable for DirectionSetTruncation {
    fn kind(&self) -> &'static str {
        "directions"
    }

    fn record(&self) -> Record {
        Record::new()
            .text("specs", self.specs.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" | "))
            .text("bound", self.bound)
            .text("distinct", self.distinct)
            .text("mode", self.mode)
            .text("count", self.len())
            .list("warnings", self.warnings.iter().map(|w| Record::new().text("warning", w)).collect())
    }

    fn table(&self) -> Table {
        let headers: Vec<String> = (1..=self.dim()).map(|i| format!("u{i}")).collect();
        let mut t = Table { headers, rows: Vec::new() };
        for p in &self.points {
            t.push(p.coords().iter().map(u64::to_string).collect());
        }
        t
    }
}

/// Checkpoints of the representable-count function.
pub struct CountReport<'a> {
    pub kind: &'a str,
    pub bound: u64,
    pub checkpoints: &'a [CountChkpt],
}

impl Reportable for CountReport<'_> {
    fn kind(&self) -> &'static str {
        "count-fx"
    }

    fn record(&self) -> Record {
        Record::new().text("function", self.kind).text("bound", self.bound).list(
            "checkpoints",
            self.checkpoints
                .iter()
                .map(|c| {
                    Record::new().text("x", c.x).text("count", c.count).text(
                        "ratio_to_reference",
                        c.ratio_to_reference.map(fmt_f64).unwrap_or_else(|| "none".into()),
                    )
                })
                .collect(),
        )
    }

    fn table(&self) -> Table {
        let mut t = Table::new(&["x", "count", "ratio_to_reference"]);
        for c in self.checkpoints {
            t.push(vec![c.x.to_string(), c.count.to_string(), c.ratio_to_reference.map(fmt_f64).unwrap_or_default()]);
        }
        t
    }
}

fn verdict_text(v: &DensityVerdict) -> String {
    match v {
        DensityVerdict::Converging { delta } => format!("converging({})", fmt_f64(*delta)),
        DensityVerdict::Oscillating { lo, hi } => format!("oscillating({}, {})", fmt_f64(*lo), fmt_f64(*hi)),
        DensityVerdict::Inconclusive => "inconclusive".into(),
    }
}

impl Reportable for DensityEstimate {
    fn kind(&self) -> &'static str {
        "density"
    }

    fn record(&self) -> Record {
        Record::new().text("verdict", verdict_text(&self.verdict)).list(
            "checkpoints",
            self.checkpoints
                .iter()
                .map(|c| Record::new().text("x", c.x).text("count", c.count).text("ratio", fmt_f64(c.ratio)))
                .collect(),
        )
    }

    fn table(&self) -> Table {
        let mut t = Table::new(&["x", "count", "ratio"]);
        for c in &self.checkpoints {
            t.push(vec![c.x.to_string(), c.count.to_string(), fmt_f64(c.ratio)]);
        }
        t
    }
}

impl Reportable for RatioProfile {
    fn kind(&self) -> &'static str {
        "ratio-profile"
    }

    fn record(&self) -> Record {
        Record::new()
            .text("bound", self.bound)
            .text("window", self.window)
            .text("min", fmt_f64(self.min))
            .text("min_exact", fmt_ratio(self.min_exact()))
            .text("min_pair", format!("{} {}", self.min_pair.0, self.min_pair.1))
            .text("max", fmt_f64(self.max))
            .text("mean", fmt_f64(self.mean))
            .text("threshold", fmt_f64(self.threshold))
            .text("approaches_one", self.approaches_one)
    }

    fn table(&self) -> Table {
        let mut t =
            Table::new(&["bound", "window", "min", "min_exact", "max", "mean", "threshold", "approaches_one"]);
        t.push(vec![
            self.bound.to_string(),
            self.window.to_string(),
            fmt_f64(self.min),
            fmt_ratio(self.min_exact()),
            fmt_f64(self.max),
            fmt_f64(self.mean),
            fmt_f64(self.threshold),
            self.approaches_one.to_string(),
        ]);
        t
    }
}

impl Reportable for CoverageReport {
    fn kind(&self) -> &'static str {
        "coverage"
    }

    fn record(&self) -> Record {
        Record::new()
            .text("source", &self.source)
            .text("epsilon", fmt_f64(self.epsilon))
            .text("probes", self.probe_count)
            .text("visited", self.visited)
            .text("covered", self.covered)
            .text("fraction", fmt_f64(self.fraction))
            .text("axis_adjacent_probes", self.axis_adjacent_probes)
            .text("covered_excluding_axis", self.covered_excluding_axis)
            .text("fraction_excluding_axis", fmt_f64(self.fraction_excluding_axis))
            .text("uncovered_total", self.uncovered_total)
            .list(
                "uncovered",
                self.uncovered
                    .iter()
                    .map(|u| {
                        Record::new()
                            .text("index", u.index)
                            .text("coords", fmt_coords(&u.coords))
                            .text("axis_adjacent", u.axis_adjacent)
                    })
                    .collect(),
            )
    }

    fn table(&self) -> Table {
        let mut t = Table::new(&["probe", "covered", "axis_adjacent"]);
        // every probe, so plots can shade the uncovered arcs
        for (i, &c) in self.covered_mask.iter().enumerate() {
            let axis = self.uncovered.iter().find(|u| u.index == i).map(|u| u.axis_adjacent.to_string());
            t.push(vec![i.to_string(), c.to_string(), axis.unwrap_or_default()]);
        }
        t
    }
}

impl Reportable for GapReport {
    fn kind(&self) -> &'static str {
        "gaps"
    }

    fn record(&self) -> Record {
        Record::new()
            .text("scan", format!("({}, {})", fmt_ratio(self.lo), fmt_ratio(self.hi)))
            .text("resolution", self.resolution)
            .text("mode", self.mode.name())
            .text("bound", self.bound)
            .text("elements", self.element_count)
            .text("pairs_in_scan", self.pairs_in_scan)
            .list(
                "gaps",
                self.gaps
                    .iter()
                    .map(|g| {
                        Record::new()
                            .text("lo", fmt_ratio(g.lo))
                            .text("hi", fmt_ratio(g.hi))
                            .text("width", fmt_f64(g.width()))
                    })
                    .collect(),
            )
    }

    fn table(&self) -> Table {
        let mut t = Table::new(&["lo", "hi", "lo_float", "hi_float", "width"]);
        for g in &self.gaps {
            t.push(vec![
                fmt_ratio(g.lo),
                fmt_ratio(g.hi),
                fmt_f64(crate::diagnostics::gaps::to_f64(g.lo)),
                fmt_f64(crate::diagnostics::gaps::to_f64(g.hi)),
                fmt_f64(g.width()),
            ]);
        }
        t
    }
}

impl Reportable for AccumulationApprox {
    fn kind(&self) -> &'static str {
        "accumulation"
    }

    fn record(&self) -> Record {
        Record::new()
            .text("specs", self.specs.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" | "))
            .text("ladder", self.ladder.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
            .text("epsilon", fmt_f64(self.epsilon))
            .text("distinct", self.distinct)
            .text("base_count", self.base_count)
            .text("persistent", self.len())
    }

    fn table(&self) -> Table {
        let headers: Vec<String> = (1..=self.specs.len()).map(|i| format!("u{i}")).collect();
        let mut t = Table { headers, rows: Vec::new() };
        for p in &self.points {
            t.push(p.coords().iter().map(u64::to_string).collect());
        }
        t
    }
}

fn status_record(name: &str, s: &CheckStatus) -> Record {
    match s {
        CheckStatus::Skipped { reason } => Record::new().text("check", name).text("status", "skipped").text("reason", reason),
        CheckStatus::Checked { checked, violation_count, violations } => Record::new()
            .text("check", name)
            .text("status", "checked")
            .text("checked", checked)
            .text("violations", violation_count)
            .list(
                "examples",
                violations
                    .iter()
                    .map(|v| Record::new().text("point", &v.point).text("action", &v.action).text("image", fmt_coords(&v.image)))
                    .collect(),
            ),
    }
}

impl Reportable for ClosureReport {
    fn kind(&self) -> &'static str {
        "closure"
    }

    fn record(&self) -> Record {
        Record::new()
            .text("epsilon", fmt_f64(self.epsilon))
            .text("tolerance", fmt_f64(self.tolerance))
            .text("approx_size", self.approx_size)
            .text("permutations", self.permutations.len())
            .list(
                "checks",
                vec![status_record("permutation", &self.permutation_check), status_record("projection", &self.projection_check)],
            )
    }

    fn table(&self) -> Table {
        let mut t = Table::new(&["check", "status", "checked", "violations"]);
        for (name, s) in [("permutation", &self.permutation_check), ("projection", &self.projection_check)] {
            match s {
                CheckStatus::Skipped { .. } => t.push(vec![name.into(), "skipped".into(), String::new(), String::new()]),
                CheckStatus::Checked { checked, violation_count, .. } => {
                    t.push(vec![name.into(), "checked".into(), checked.to_string(), violation_count.to_string()])
                }
            }
        }
        t
    }
}

/// The 3-APs found in one set.
pub struct ApReport<'a> {
    pub spec: String,
    pub bound: u64,
    pub aps: &'a [(u64, u64, u64)],
}

impl Reportable for ApReport<'_> {
    fn kind(&self) -> &'static str {
        "three-term-aps"
    }

    fn record(&self) -> Record {
        Record::new().text("spec", &self.spec).text("bound", self.bound).text("count", self.aps.len()).list(
            "progressions",
            self.aps.iter().map(|(a, b, c)| Record::new().text("ap", format!("{a} {b} {c}"))).collect(),
        )
    }

    fn table(&self) -> Table {
        let mut t = Table::new(&["a", "b", "c"]);
        for (a, b, c) in self.aps {
            t.push(vec![a.to_string(), b.to_string(), c.to_string()]);
        }
        t
    }
}

impl Reportable for WitnessOutcome {
    fn kind(&self) -> &'static str {
        "witness"
    }

    fn record(&self) -> Record {
        match self {
            WitnessOutcome::Found { tuple, point, scale } => Record::new()
                .text("status", "found")
                .text("tuple", tuple.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
                .text("point", fmt_coords(point.coords()))
                .text("scale", scale),
            WitnessOutcome::NotFound { scales } => Record::new()
                .text("status", "not-found")
                .text("scales", scales.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")),
        }
    }

    fn table(&self) -> Table {
        let mut t = Table::new(&["status", "tuple", "scale"]);
        match self {
            WitnessOutcome::Found { tuple, scale, .. } => t.push(vec![
                "found".into(),
                tuple.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
                scale.to_string(),
            ]),
            WitnessOutcome::NotFound { scales } => {
                for s in scales {
                    t.push(vec!["not-found".into(), String::new(), s.to_string()]);
                }
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_layout() {
        let r = Record::new()
            .text("a", 1)
            .list("items", vec![Record::new().text("x", "p/q").text("y", 2), Record::new().text("x", 3)])
            .list("empty", vec![]);
        assert_eq!(render_structured(&r), "a: 1\nitems:\n  - x: p/q\n    y: 2\n  - x: 3\nempty: []\n");
    }

    #[test]
    fn csv_quotes_when_needed() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1, 2".into(), "3/4".into()]);
        assert_eq!(render_csv(&t).unwrap(), "a,b\n\"1, 2\",3/4\n");
    }
}
