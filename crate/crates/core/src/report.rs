//! Comparison and docking tables: CSV/JSON emission, reading back, and
//! console summaries.
//!
//! CSV files are UTF-8 with `\n` line endings. Metadata comes first as
//! `# key: value` comment lines, then a header row, then one row per cell.
//! Floats are written with 6 decimal places. JSON mirrors the Rust types and
//! keeps full precision; schemas live in `schema/` at the repository root.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{NkError, Result};
use crate::landscape::DependencyScheme;
use crate::search::SweepOrder;

/// Largest `|fitness difference|` tolerated once `T >= 100`.
pub const PARITY_TOLERANCE: f64 = 0.01;
/// Largest `|fitness difference|` tolerated on the `K = N - 1` sweep.
pub const HIGH_COMPLEXITY_TOLERANCE: f64 = 0.005;
/// Default docking tolerance against the published SMMLS row.
pub const DOCKING_TOLERANCE: f64 = 0.01;

/// What the first row coordinate varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    K,
    KOverN,
}

impl Axis {
    fn as_str(self) -> &'static str {
        match self {
            Axis::K => "k",
            Axis::KOverN => "k_over_n",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub axis: Axis,
    pub n_values: Vec<usize>,
    pub scheme: DependencyScheme,
    pub order_mode: SweepOrder,
    pub iterations: u64,
    #[serde(with = "crate::seed_serde")]
    pub master_seed: u64,
    pub version: String,
    /// Resolved command line that produced the table, when run from the CLI.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
}

/// One `(n, k, T)` cell. Differences are SMMLS minus IMMLS, paired per
/// replication; `*_se` fields are standard errors of the adjacent mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub k: usize,
    pub k_over_n: f64,
    pub t: u64,
    pub fitness_difference: f64,
    pub fitness_difference_se: f64,
    pub final_fitness_smmls: f64,
    pub final_fitness_smmls_se: f64,
    pub final_fitness_immls: f64,
    pub final_fitness_immls_se: f64,
    pub consumption_pct_smmls: f64,
    pub consumption_pct_immls: f64,
    pub consumption_pct_immls_se: f64,
    pub improvement_smmls: f64,
    pub improvement_smmls_se: f64,
    pub improvement_immls: f64,
    pub improvement_immls_se: f64,
    pub moves_smmls: f64,
    pub moves_smmls_se: f64,
    pub moves_immls: f64,
    pub moves_immls_se: f64,
    pub equilibrium_fraction_immls: f64,
}

impl ComparisonRow {
    const FLOATS: usize = 19;

    fn floats(&self) -> [(&'static str, f64); Self::FLOATS] {
        [
            ("k_over_n", self.k_over_n),
            ("fitness_difference", self.fitness_difference),
            ("fitness_difference_se", self.fitness_difference_se),
            ("final_fitness_smmls", self.final_fitness_smmls),
            ("final_fitness_smmls_se", self.final_fitness_smmls_se),
            ("final_fitness_immls", self.final_fitness_immls),
            ("final_fitness_immls_se", self.final_fitness_immls_se),
            ("consumption_pct_smmls", self.consumption_pct_smmls),
            ("consumption_pct_immls", self.consumption_pct_immls),
            ("consumption_pct_immls_se", self.consumption_pct_immls_se),
            ("improvement_smmls", self.improvement_smmls),
            ("improvement_smmls_se", self.improvement_smmls_se),
            ("improvement_immls", self.improvement_immls),
            ("improvement_immls_se", self.improvement_immls_se),
            ("moves_smmls", self.moves_smmls),
            ("moves_smmls_se", self.moves_smmls_se),
            ("moves_immls", self.moves_immls),
            ("moves_immls_se", self.moves_immls_se),
            ("equilibrium_fraction_immls", self.equilibrium_fraction_immls),
        ]
    }

    fn header() -> Vec<&'static str> {
        let sample = ComparisonRow::default();
        let mut cols = vec!["n", "k", "t"];
        cols.extend(sample.floats().iter().map(|(name, _)| *name));
        cols
    }
}

impl Default for ComparisonRow {
    fn default() -> Self {
        Self {
            n: 0,
            k: 0,
            k_over_n: 0.0,
            t: 0,
            fitness_difference: 0.0,
            fitness_difference_se: 0.0,
            final_fitness_smmls: 0.0,
            final_fitness_smmls_se: 0.0,
            final_fitness_immls: 0.0,
            final_fitness_immls_se: 0.0,
            consumption_pct_smmls: 0.0,
            consumption_pct_immls: 0.0,
            consumption_pct_immls_se: 0.0,
            improvement_smmls: 0.0,
            improvement_smmls_se: 0.0,
            improvement_immls: 0.0,
            improvement_immls_se: 0.0,
            moves_smmls: 0.0,
            moves_smmls_se: 0.0,
            moves_immls: 0.0,
            moves_immls_se: 0.0,
            equilibrium_fraction_immls: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub metadata: TableMetadata,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn row(&self, n: usize, k: usize, t: u64) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.n == n && r.k == k && r.t == t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DockingMetadata {
    pub n: usize,
    pub budget: u64,
    pub iterations: u64,
    #[serde(with = "crate::seed_serde")]
    pub master_seed: u64,
    pub scheme: DependencyScheme,
    /// How long each SMMLS walk ran; the published table does not say.
    pub walk_length: String,
    pub tolerance: f64,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
}

/// Measured SMMLS mean final fitness beside the published reference rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DockingTable {
    pub metadata: DockingMetadata,
    pub k_values: Vec<usize>,
    pub kauffman: Vec<f64>,
    pub sendero: Vec<f64>,
    pub published_smmls: Vec<f64>,
    pub measured_smmls: Vec<f64>,
    pub measured_std_error: Vec<f64>,
    /// `|measured - published_smmls|` per column.
    pub deviations: Vec<f64>,
}

impl DockingTable {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }

    pub fn passes(&self) -> bool {
        self.max_deviation() <= self.metadata.tolerance
    }
}

/// Shared serialization surface of the emitted tables.
pub trait ReportTable: Serialize + Sized {
    fn check_finite(&self) -> Result<()>;
    fn to_csv_string(&self) -> Result<String>;
    fn from_csv_str(text: &str) -> Result<Self>;
    fn from_json_str(text: &str) -> Result<Self>;

    fn to_json_string(&self) -> Result<String> {
        self.check_finite()?;
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

pub fn write_csv<T: ReportTable>(table: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, table.to_csv_string()?).map_err(|e| NkError::io(path, e))
}

pub fn write_json<T: ReportTable>(table: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, table.to_json_string()?).map_err(|e| NkError::io(path, e))
}

fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

fn ensure_finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(NkError::NonFinite(field.to_string()))
    }
}

fn join_list<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

fn split_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(';')
        .map(|s| s.parse().map_err(|_| NkError::Parse(format!("bad value {s:?} in `{key}`"))))
        .collect()
}

/// Splits leading `# key: value` lines from the CSV body.
fn split_metadata(text: &str) -> Result<(Vec<(String, String)>, String)> {
    let mut meta = Vec::new();
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            let (key, value) = rest
                .split_once(':')
                .ok_or_else(|| NkError::Parse(format!("comment line without key: {line:?}")))?;
            meta.push((key.trim().to_string(), value.trim().to_string()));
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    Ok((meta, body))
}

fn lookup<'a>(meta: &'a [(String, String)], key: &str) -> Result<&'a str> {
    meta.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| NkError::Parse(format!("missing metadata `{key}`")))
}

fn parse_meta<T: std::str::FromStr>(meta: &[(String, String)], key: &str) -> Result<T> {
    let raw = lookup(meta, key)?;
    raw.parse()
        .map_err(|_| NkError::Parse(format!("bad value {raw:?} for `{key}`")))
}

fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, name: &str) -> Result<T> {
    let raw = record
        .get(idx)
        .ok_or_else(|| NkError::Parse(format!("missing column `{name}`")))?;
    raw.parse()
        .map_err(|_| NkError::Parse(format!("bad value {raw:?} in column `{name}`")))
}

fn csv_writer(out: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn csv_reader(body: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().from_reader(body.as_bytes())
}

impl ReportTable for ComparisonTable {
    fn check_finite(&self) -> Result<()> {
        for row in &self.rows {
            for (name, v) in row.floats() {
                ensure_finite(name, v)?;
            }
        }
        Ok(())
    }

    fn to_csv_string(&self) -> Result<String> {
        self.check_finite()?;
        let m = &self.metadata;
        let mut out = String::new();
        let _ = writeln!(out, "# axis: {}", m.axis.as_str());
        let _ = writeln!(out, "# n_values: {}", join_list(&m.n_values));
        let _ = writeln!(out, "# scheme: {}", m.scheme);
        let _ = writeln!(out, "# order_mode: {}", m.order_mode);
        let _ = writeln!(out, "# iterations: {}", m.iterations);
        let _ = writeln!(out, "# master_seed: {}", m.master_seed);
        let _ = writeln!(out, "# version: {}", m.version);
        if let Some(cmd) = &m.command {
            let _ = writeln!(out, "# command: {cmd}");
        }

        let mut buf = Vec::new();
        {
            let mut w = csv_writer(&mut buf);
            w.write_record(ComparisonRow::header())?;
            for row in &self.rows {
                let mut record = vec![row.n.to_string(), row.k.to_string(), row.t.to_string()];
                record.extend(row.floats().iter().map(|(_, v)| fmt6(*v)));
                w.write_record(&record)?;
            }
            w.flush().map_err(|e| NkError::io("<csv buffer>", e))?;
        }
        out.push_str(&String::from_utf8(buf).expect("csv output is UTF-8"));
        Ok(out)
    }

    fn from_csv_str(text: &str) -> Result<Self> {
        let (meta, body) = split_metadata(text)?;
        let axis = match lookup(&meta, "axis")? {
            "k" => Axis::K,
            "k_over_n" => Axis::KOverN,
            other => return Err(NkError::Parse(format!("unknown axis {other:?}"))),
        };
        let metadata = TableMetadata {
            axis,
            n_values: split_list("n_values", lookup(&meta, "n_values")?)?,
            scheme: parse_meta(&meta, "scheme")?,
            order_mode: parse_meta(&meta, "order_mode")?,
            iterations: parse_meta(&meta, "iterations")?,
            master_seed: parse_meta(&meta, "master_seed")?,
            version: lookup(&meta, "version")?.to_string(),
            command: lookup(&meta, "command").ok().map(str::to_string),
        };

        let mut reader = csv_reader(&body);
        let header = reader.headers()?.clone();
        let expected = ComparisonRow::header();
        if header.iter().ne(expected.iter().copied()) {
            return Err(NkError::Parse("unexpected comparison header".into()));
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let mut v = [0.0; ComparisonRow::FLOATS];
            for (i, slot) in v.iter_mut().enumerate() {
                *slot = parse_field(&record, i + 3, expected[i + 3])?;
            }
            rows.push(ComparisonRow {
                n: parse_field(&record, 0, "n")?,
                k: parse_field(&record, 1, "k")?,
                t: parse_field(&record, 2, "t")?,
                k_over_n: v[0],
                fitness_difference: v[1],
                fitness_difference_se: v[2],
                final_fitness_smmls: v[3],
                final_fitness_smmls_se: v[4],
                final_fitness_immls: v[5],
                final_fitness_immls_se: v[6],
                consumption_pct_smmls: v[7],
                consumption_pct_immls: v[8],
                consumption_pct_immls_se: v[9],
                improvement_smmls: v[10],
                improvement_smmls_se: v[11],
                improvement_immls: v[12],
                improvement_immls_se: v[13],
                moves_smmls: v[14],
                moves_smmls_se: v[15],
                moves_immls: v[16],
                moves_immls_se: v[17],
                equilibrium_fraction_immls: v[18],
            });
        }
        Ok(Self { metadata, rows })
    }

    fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl ReportTable for DockingTable {
    fn check_finite(&self) -> Result<()> {
        let columns = [
            ("kauffman", &self.kauffman),
            ("sendero", &self.sendero),
            ("published_smmls", &self.published_smmls),
            ("measured_smmls", &self.measured_smmls),
            ("measured_std_error", &self.measured_std_error),
            ("deviations", &self.deviations),
        ];
        for (name, values) in columns {
            for &v in values.iter() {
                ensure_finite(name, v)?;
            }
        }
        ensure_finite("tolerance", self.metadata.tolerance)
    }

    fn to_csv_string(&self) -> Result<String> {
        self.check_finite()?;
        let m = &self.metadata;
        let six = |vs: &[f64]| vs.iter().map(|v| fmt6(*v)).collect::<Vec<_>>().join(";");
        let mut out = String::new();
        let _ = writeln!(out, "# n: {}", m.n);
        let _ = writeln!(out, "# budget: {}", m.budget);
        let _ = writeln!(out, "# iterations: {}", m.iterations);
        let _ = writeln!(out, "# master_seed: {}", m.master_seed);
        let _ = writeln!(out, "# scheme: {}", m.scheme);
        let _ = writeln!(out, "# walk_length: {}", m.walk_length);
        let _ = writeln!(out, "# tolerance: {}", fmt6(m.tolerance));
        let _ = writeln!(out, "# version: {}", m.version);
        if let Some(cmd) = &m.command {
            let _ = writeln!(out, "# command: {cmd}");
        }
        let _ = writeln!(out, "# measured_std_error: {}", six(&self.measured_std_error));
        let _ = writeln!(out, "# deviations: {}", six(&self.deviations));
        let _ = writeln!(out, "# max_abs_deviation: {}", fmt6(self.max_deviation()));

        let mut buf = Vec::new();
        {
            let mut w = csv_writer(&mut buf);
            let mut header = vec!["source".to_string()];
            header.extend(self.k_values.iter().map(|k| format!("k_{k}")));
            w.write_record(&header)?;
            let rows = [
                ("kauffman", &self.kauffman),
                ("sendero", &self.sendero),
                ("published_smmls", &self.published_smmls),
                ("measured_smmls", &self.measured_smmls),
            ];
            for (label, values) in rows {
                let mut record = vec![label.to_string()];
                record.extend(values.iter().map(|v| fmt6(*v)));
                w.write_record(&record)?;
            }
            w.flush().map_err(|e| NkError::io("<csv buffer>", e))?;
        }
        out.push_str(&String::from_utf8(buf).expect("csv output is UTF-8"));
        Ok(out)
    }

    fn from_csv_str(text: &str) -> Result<Self> {
        let (meta, body) = split_metadata(text)?;
        let metadata = DockingMetadata {
            n: parse_meta(&meta, "n")?,
            budget: parse_meta(&meta, "budget")?,
            iterations: parse_meta(&meta, "iterations")?,
            master_seed: parse_meta(&meta, "master_seed")?,
            scheme: parse_meta(&meta, "scheme")?,
            walk_length: lookup(&meta, "walk_length")?.to_string(),
            tolerance: parse_meta(&meta, "tolerance")?,
            version: lookup(&meta, "version")?.to_string(),
            command: lookup(&meta, "command").ok().map(str::to_string),
        };
        let mut reader = csv_reader(&body);
        let header = reader.headers()?.clone();
        let k_values = header
            .iter()
            .skip(1)
            .map(|h| {
                h.strip_prefix("k_")
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| NkError::Parse(format!("bad docking column {h:?}")))
            })
            .collect::<Result<Vec<usize>>>()?;
        let mut by_label = std::collections::HashMap::new();
        for record in reader.records() {
            let record = record?;
            let label = record.get(0).unwrap_or_default().to_string();
            let values = (1..=k_values.len())
                .map(|i| parse_field(&record, i, &label))
                .collect::<Result<Vec<f64>>>()?;
            by_label.insert(label, values);
        }
        let mut take = |label: &str| {
            by_label
                .remove(label)
                .ok_or_else(|| NkError::Parse(format!("missing docking row `{label}`")))
        };
        Ok(Self {
            k_values,
            kauffman: take("kauffman")?,
            sendero: take("sendero")?,
            published_smmls: take("published_smmls")?,
            measured_smmls: take("measured_smmls")?,
            measured_std_error: split_list("measured_std_error", lookup(&meta, "measured_std_error")?)?,
            deviations: split_list("deviations", lookup(&meta, "deviations")?)?,
            metadata,
        })
    }

    fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Verdict on one headline claim.
#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Claim {
    fn line(&self) -> String {
        format!(
            "{}: {} ({})",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

/// Console rendering plus claim verdicts.
pub trait Summarize {
    fn claims(&self) -> Vec<Claim>;
    fn summarize(&self) -> String;
}

impl Summarize for DockingTable {
    fn claims(&self) -> Vec<Claim> {
        if self.k_values.is_empty() {
            return Vec::new();
        }
        vec![Claim {
            name: "DOCKING".into(),
            passed: self.passes(),
            detail: format!(
                "max |Δ| = {:.4}, tolerance {:.4}",
                self.max_deviation(),
                self.metadata.tolerance
            ),
        }]
    }

    fn summarize(&self) -> String {
        if self.k_values.is_empty() {
            return "no data\n".into();
        }
        let mut out = String::new();
        let _ = write!(out, "{:<16}", "K");
        for k in &self.k_values {
            let _ = write!(out, "{k:>9}");
        }
        out.push('\n');
        let rows = [
            ("Kauffman", &self.kauffman),
            ("Sendero", &self.sendero),
            ("SMMLS (pub.)", &self.published_smmls),
            ("SMMLS (meas.)", &self.measured_smmls),
            ("  std. error", &self.measured_std_error),
            ("  |Δ|", &self.deviations),
        ];
        for (label, values) in rows {
            let _ = write!(out, "{label:<16}");
            for v in values.iter() {
                let _ = write!(out, "{v:>9.4}");
            }
            out.push('\n');
        }
        for claim in self.claims() {
            out.push_str(&claim.line());
            out.push('\n');
        }
        out
    }
}

impl Summarize for ComparisonTable {
    fn claims(&self) -> Vec<Claim> {
        if self.rows.is_empty() {
            return Vec::new();
        }
        let mut claims = Vec::new();

        let (tolerance, parity_rows): (f64, Vec<&ComparisonRow>) = match self.metadata.axis {
            Axis::K => (PARITY_TOLERANCE, self.rows.iter().filter(|r| r.t >= 100).collect()),
            Axis::KOverN => (HIGH_COMPLEXITY_TOLERANCE, self.rows.iter().collect()),
        };
        if !parity_rows.is_empty() {
            let worst = parity_rows
                .iter()
                .map(|r| r.fitness_difference.abs())
                .fold(0.0, f64::max);
            let scope = match self.metadata.axis {
                Axis::K => "T >= 100",
                Axis::KOverN => "all cells",
            };
            claims.push(Claim {
                name: format!("fitness parity ({scope})"),
                passed: worst < tolerance,
                detail: format!("max |Δ| = {worst:.4}, limit {tolerance:.3}"),
            });
        }

        let smmls_full = self.rows.iter().all(|r| r.consumption_pct_smmls == 100.0);
        claims.push(Claim {
            name: "SMMLS consumes 100%".into(),
            passed: smmls_full,
            detail: format!("{} cells", self.rows.len()),
        });

        let mut series: Vec<(usize, usize)> = self.rows.iter().map(|r| (r.n, r.k)).collect();
        series.dedup();
        let mut monotone = true;
        for &(n, k) in &series {
            let mut cells: Vec<&ComparisonRow> = self
                .rows
                .iter()
                .filter(|r| r.n == n && r.k == k && r.t >= 50)
                .collect();
            cells.sort_by_key(|r| r.t);
            monotone &= cells
                .windows(2)
                .all(|w| w[1].consumption_pct_immls <= w[0].consumption_pct_immls);
        }
        claims.push(Claim {
            name: "IMMLS consumption falls as T rises (T >= 50)".into(),
            passed: monotone,
            detail: format!("{} series", series.len()),
        });

        let max_t = self.rows.iter().map(|r| r.t).max().unwrap_or(0);
        if max_t >= 50 {
            let at_max: Vec<&ComparisonRow> = self.rows.iter().filter(|r| r.t == max_t).collect();
            match self.metadata.axis {
                Axis::K => {
                    let lo = at_max.iter().min_by_key(|r| r.k).expect("non-empty");
                    let hi = at_max.iter().max_by_key(|r| r.k).expect("non-empty");
                    if lo.k != hi.k {
                        claims.push(Claim {
                            name: format!("IMMLS consumption falls as K rises (T = {max_t})"),
                            passed: hi.consumption_pct_immls < lo.consumption_pct_immls,
                            detail: format!(
                                "K={}: {:.2}%, K={}: {:.2}%",
                                lo.k, lo.consumption_pct_immls, hi.k, hi.consumption_pct_immls
                            ),
                        });
                    }
                }
                Axis::KOverN => {
                    let worst = self
                        .rows
                        .iter()
                        .filter(|r| r.t >= 50)
                        .map(|r| r.consumption_pct_immls)
                        .fold(0.0, f64::max);
                    claims.push(Claim {
                        name: "IMMLS consumption below 100% (T >= 50)".into(),
                        passed: worst < 100.0,
                        detail: format!("max {worst:.2}%"),
                    });
                }
            }
        }
        claims
    }

    fn summarize(&self) -> String {
        if self.rows.is_empty() {
            return "no data\n".into();
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>4} {:>4} {:>6} {:>6} {:>10} {:>9} {:>9} {:>9} {:>8} {:>8}",
            "N", "K", "K/N", "T", "Δfitness", "cons% I", "impr S", "impr I", "moves S", "moves I"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>4} {:>4} {:>6.3} {:>6} {:>10.5} {:>9.2} {:>9.4} {:>9.4} {:>8.3} {:>8.3}",
                r.n,
                r.k,
                r.k_over_n,
                r.t,
                r.fitness_difference,
                r.consumption_pct_immls,
                r.improvement_smmls,
                r.improvement_immls,
                r.moves_smmls,
                r.moves_immls
            );
        }
        for claim in self.claims() {
            out.push_str(&claim.line());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample_metadata() -> TableMetadata {
        TableMetadata {
            axis: Axis::K,
            n_values: vec![16],
            scheme: DependencyScheme::Random,
            order_mode: SweepOrder::Fixed,
            iterations: 10,
            master_seed: u64::MAX,
            version: crate::VERSION.into(),
            command: Some("nk sweep".into()),
        }
    }

    fn row(k: usize, t: u64, diff: f64, cons: f64) -> ComparisonRow {
        ComparisonRow {
            n: 16,
            k,
            k_over_n: k as f64 / 16.0,
            t,
            fitness_difference: diff,
            consumption_pct_smmls: 100.0,
            consumption_pct_immls: cons,
            improvement_smmls: 0.1234567,
            ..Default::default()
        }
    }

    #[test]
    fn empty_table_csv_has_header_and_metadata_only() {
        let table = ComparisonTable { metadata: sample_metadata(), rows: vec![] };
        let csv = table.to_csv_string().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines.iter().take_while(|l| l.starts_with('#')).count() >= 7);
        assert!(lines.last().unwrap().starts_with("n,k,t,k_over_n"));
        assert_eq!(Summarize::summarize(&table), "no data\n");
        assert_eq!(ComparisonTable::from_csv_str(&csv).unwrap(), table);
    }

    #[test]
    fn csv_uses_six_decimals() {
        let table = ComparisonTable { metadata: sample_metadata(), rows: vec![row(4, 100, 0.003, 40.0)] };
        let csv = table.to_csv_string().unwrap();
        assert!(csv.contains(",0.123457,"));
        assert!(csv.contains("# master_seed: 18446744073709551615\n"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn json_seed_is_a_string() {
        let table = ComparisonTable { metadata: sample_metadata(), rows: vec![] };
        let v: serde_json::Value = serde_json::from_str(&table.to_json_string().unwrap()).unwrap();
        assert_eq!(v["metadata"]["master_seed"], "18446744073709551615");
    }

    #[test]
    fn non_finite_values_are_refused() {
        let table = ComparisonTable { metadata: sample_metadata(), rows: vec![row(4, 100, f64::NAN, 40.0)] };
        assert!(matches!(table.to_csv_string(), Err(NkError::NonFinite(f)) if f == "fitness_difference"));
        assert!(table.to_json_string().is_err());
    }

    #[test]
    fn parity_claim_line() {
        let table = ComparisonTable {
            metadata: sample_metadata(),
            rows: vec![row(0, 100, 0.003, 60.0), row(15, 100, -0.001, 20.0)],
        };
        let text = Summarize::summarize(&table);
        assert!(text.contains("fitness parity (T >= 100): PASS"), "{text}");
        assert!(text.contains("IMMLS consumption falls as K rises (T = 100): PASS"), "{text}");
        let bad = ComparisonTable { metadata: sample_metadata(), rows: vec![row(0, 100, 0.02, 60.0)] };
        assert!(Summarize::summarize(&bad).contains("fitness parity (T >= 100): FAIL"));
    }

    #[test]
    fn write_reports_io_errors_with_path() {
        let table = ComparisonTable { metadata: sample_metadata(), rows: vec![] };
        let err = write_csv(&table, "/nonexistent-dir/out.csv").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
    }
}
