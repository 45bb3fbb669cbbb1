//! On-disk formats. Every writer is deterministic and every reader
//! accepts exactly what the matching writer emits, so write, read, write
//! reproduces the bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use rxnsplit_core::corpus::{CorpusStats, RawRecord, Removal, StageCounts};
use rxnsplit_core::eval::{EvalMode, EvalReport, PredictionSet, TopK};
use rxnsplit_core::shift::{DistanceReport, SpaceSummary};
use rxnsplit_core::splits::{Role, SplitManifest, SplitParams};

use crate::config::RunConfig;
use crate::error::{Error, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Tabs and newlines inside a TSV field become spaces.
fn field(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

fn schema(source: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Schema { file: source.to_string(), line, message: message.into() }
}

fn lines(input: &str) -> impl Iterator<Item = (usize, &str)> {
    input.lines().enumerate().map(|(i, l)| (i + 1, l))
}

fn expect_header(source: &str, input: &str, header: &str) -> Result<()> {
    match input.lines().next() {
        Some(h) if h == header => Ok(()),
        Some(h) => Err(schema(source, 1, format!("expected header {header:?}, found {h:?}"))),
        None => Err(schema(source, 1, "empty file")),
    }
}

// Reaction records (JSON lines).

/// A line that failed to parse in lenient mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaIssue {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default)]
pub struct Ingested {
    pub records: Vec<RawRecord>,
    pub issues: Vec<SchemaIssue>,
}

/// Parse a JSON-lines record file. Blank lines are ignored. In strict mode
/// the first bad line is an error; otherwise bad lines are collected.
/// A repeated id is always an error.
pub fn read_records(source: &str, input: &str, strict: bool) -> Result<Ingested> {
    let mut out = Ingested::default();
    let mut seen = BTreeSet::new();
    for (n, line) in lines(input) {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<RawRecord>(line) {
            Ok(r) => {
                if !seen.insert(r.id.clone()) {
                    return Err(schema(source, n, format!("duplicate record id {:?}", r.id)));
                }
                out.records.push(r);
            }
            Err(e) if strict => return Err(schema(source, n, e.to_string())),
            Err(e) => {
                log::warn!("{source}:{n}: skipping line: {e}");
                out.issues.push(SchemaIssue { line: n, message: e.to_string() });
            }
        }
    }
    Ok(out)
}

pub fn write_records<W: Write>(mut w: W, records: &[RawRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

// Reject log.

pub const REJECT_HEADER: &str = "record_id\tstage\treason";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RejectRow {
    pub record_id: String,
    pub stage: String,
    pub reason: String,
}

impl From<&Removal> for RejectRow {
    fn from(r: &Removal) -> Self {
        RejectRow { record_id: r.record_id.clone(), stage: r.stage.name().to_string(), reason: r.reason.clone() }
    }
}

pub fn write_reject_log<W: Write>(mut w: W, rows: &[RejectRow]) -> std::io::Result<()> {
    writeln!(w, "{REJECT_HEADER}")?;
    for r in rows {
        writeln!(w, "{}\t{}\t{}", field(&r.record_id), field(&r.stage), field(&r.reason))?;
    }
    Ok(())
}

pub fn read_reject_log(source: &str, input: &str) -> Result<Vec<RejectRow>> {
    expect_header(source, input, REJECT_HEADER)?;
    lines(input)
        .skip(1)
        .map(|(n, l)| {
            let mut parts = l.splitn(3, '\t');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(id), Some(stage), Some(reason)) => {
                    Ok(RejectRow { record_id: id.into(), stage: stage.into(), reason: reason.into() })
                }
                _ => Err(schema(source, n, "expected 3 tab-separated fields")),
            }
        })
        .collect()
}

// Corpus statistics.

pub const STATS_HEADER: &str = "year\tcount";

pub fn write_year_counts<W: Write>(mut w: W, per_year: &BTreeMap<i32, usize>) -> std::io::Result<()> {
    writeln!(w, "{STATS_HEADER}")?;
    for (y, n) in per_year {
        writeln!(w, "{y}\t{n}")?;
    }
    Ok(())
}

pub fn read_year_counts(source: &str, input: &str) -> Result<BTreeMap<i32, usize>> {
    expect_header(source, input, STATS_HEADER)?;
    let mut out = BTreeMap::new();
    for (n, l) in lines(input).skip(1) {
        let (y, c) = l.split_once('\t').ok_or_else(|| schema(source, n, "expected year<TAB>count"))?;
        let y: i32 = y.parse().map_err(|_| schema(source, n, format!("bad year {y:?}")))?;
        let c: usize = c.parse().map_err(|_| schema(source, n, format!("bad count {c:?}")))?;
        out.insert(y, c);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CleanSummary {
    pub config: RunConfig,
    pub input_digest: String,
    pub corpus_digest: String,
    pub counts: StageCounts,
    pub replacements: usize,
    pub stats: CorpusStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub config: RunConfig,
    pub corpus_digest: String,
    pub stats: CorpusStats,
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn from_json<T: for<'de> Deserialize<'de>>(source: &str, input: &str) -> Result<T> {
    serde_json::from_str(input).map_err(|e| schema(source, e.line(), e.to_string()))
}

// Split manifests.

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub name: String,
    pub seed: u64,
    pub parameters: SplitParams,
    pub corpus_digest: String,
    pub config: RunConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestFile {
    pub header: ManifestHeader,
    pub assignments: Vec<(String, Role)>,
}

impl ManifestFile {
    pub fn new(m: SplitManifest, corpus_digest: &str, config: &RunConfig) -> Self {
        ManifestFile {
            header: ManifestHeader {
                name: m.name,
                seed: m.seed,
                parameters: m.params,
                corpus_digest: corpus_digest.to_string(),
                config: config.clone(),
            },
            assignments: m.assignments,
        }
    }

    pub fn manifest(&self) -> SplitManifest {
        SplitManifest {
            name: self.header.name.clone(),
            seed: self.header.seed,
            params: self.header.parameters.clone(),
            assignments: self.assignments.clone(),
        }
    }

    /// Error unless the manifest was built from a corpus with this digest.
    pub fn verify(&self, corpus_digest: &str) -> Result<()> {
        if self.header.corpus_digest != corpus_digest {
            return Err(Error::DigestMismatch {
                manifest: self.header.name.clone(),
                expected: self.header.corpus_digest.clone(),
                actual: corpus_digest.to_string(),
            });
        }
        Ok(())
    }
}

/// One-line JSON header, then `record_id<TAB>role` per assignment.
pub fn write_manifest<W: Write>(mut w: W, m: &ManifestFile) -> std::io::Result<()> {
    serde_json::to_writer(&mut w, &m.header)?;
    w.write_all(b"\n")?;
    for (id, role) in &m.assignments {
        writeln!(w, "{id}\t{role}")?;
    }
    Ok(())
}

pub fn read_manifest(source: &str, input: &str) -> Result<ManifestFile> {
    let mut it = lines(input);
    let (_, head) = it.next().ok_or_else(|| schema(source, 1, "empty manifest"))?;
    let header: ManifestHeader = serde_json::from_str(head).map_err(|e| schema(source, 1, e.to_string()))?;
    let mut assignments = Vec::new();
    let mut seen = BTreeSet::new();
    for (n, l) in it {
        let (id, role) = l.split_once('\t').ok_or_else(|| schema(source, n, "expected record_id<TAB>role"))?;
        let role: Role = role.parse().map_err(|e| schema(source, n, format!("{e}")))?;
        if !seen.insert(id.to_string()) {
            return Err(schema(source, n, format!("record {id:?} assigned twice")));
        }
        assignments.push((id.to_string(), role));
    }
    Ok(ManifestFile { header, assignments })
}

// Predictions.

pub const PREDICTION_HEADER: &str = "record_id\trank\tsmiles";

pub fn write_predictions<W: Write>(mut w: W, p: &PredictionSet) -> std::io::Result<()> {
    writeln!(w, "{PREDICTION_HEADER}")?;
    for (id, rank, smiles) in p.rows() {
        writeln!(w, "{}\t{rank}\t{}", field(id), field(smiles))?;
    }
    Ok(())
}

/// The header row is optional so hand-made files are accepted.
pub fn read_predictions(source: &str, input: &str) -> Result<PredictionSet> {
    let mut rows = Vec::new();
    for (n, l) in lines(input) {
        if (n == 1 && l == PREDICTION_HEADER) || l.is_empty() {
            continue;
        }
        let mut parts = l.splitn(3, '\t');
        let (Some(id), Some(rank), Some(smiles)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(schema(source, n, "expected record_id<TAB>rank<TAB>smiles"));
        };
        let rank: usize = rank.parse().map_err(|_| schema(source, n, format!("bad rank {rank:?}")))?;
        rows.push((id.to_string(), rank, smiles.to_string()));
    }
    PredictionSet::from_rows(rows).map_err(|e| schema(source, 0, e.to_string()))
}

// Evaluation reports.

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub manifest: String,
    /// Manifest whose train role fed the predictor.
    pub train_manifest: String,
    pub role: Role,
    pub predictor: String,
    pub mode: EvalMode,
    pub beam_width: usize,
    pub topk: Vec<TopK>,
    pub corpus_digest: String,
    pub config: RunConfig,
}

impl ReportFile {
    pub fn new(
        report: &EvalReport,
        manifest: &str,
        train_manifest: &str,
        role: Role,
        predictor: &str,
        digest: &str,
        config: &RunConfig,
    ) -> Self {
        ReportFile {
            manifest: manifest.to_string(),
            train_manifest: train_manifest.to_string(),
            role,
            predictor: predictor.to_string(),
            mode: report.mode,
            beam_width: report.beam_width,
            topk: report.topk.clone(),
            corpus_digest: digest.to_string(),
            config: config.clone(),
        }
    }
}

pub const HIT_RANK_HEADER: &str = "record_id\thit_rank";

/// Hit rank per record, `-1` for a miss.
pub fn write_hit_ranks<W: Write>(mut w: W, ranks: &[(String, Option<usize>)]) -> std::io::Result<()> {
    writeln!(w, "{HIT_RANK_HEADER}")?;
    for (id, r) in ranks {
        match r {
            Some(r) => writeln!(w, "{}\t{r}", field(id))?,
            None => writeln!(w, "{}\t-1", field(id))?,
        }
    }
    Ok(())
}

pub fn read_hit_ranks(source: &str, input: &str) -> Result<Vec<(String, Option<usize>)>> {
    expect_header(source, input, HIT_RANK_HEADER)?;
    lines(input)
        .skip(1)
        .map(|(n, l)| {
            let (id, r) = l.split_once('\t').ok_or_else(|| schema(source, n, "expected record_id<TAB>hit_rank"))?;
            let rank = match r {
                "-1" => None,
                _ => Some(r.parse().map_err(|_| schema(source, n, format!("bad rank {r:?}")))?),
            };
            Ok((id.to_string(), rank))
        })
        .collect()
}

// Shift reports.

pub const SHIFT_HEADER: &str = "record_id\tspace\tmean_distance";

/// Two rows per record, reactant space first.
pub fn write_shift_rows<W: Write>(mut w: W, report: &DistanceReport) -> std::io::Result<()> {
    writeln!(w, "{SHIFT_HEADER}")?;
    for (id, row) in report.ids.iter().zip(&report.rows) {
        writeln!(w, "{}\treactant\t{}", field(id), row.reactant_mean)?;
        writeln!(w, "{}\treaction\t{}", field(id), row.reaction_mean)?;
    }
    Ok(())
}

/// `(record_id, reactant_mean, reaction_mean)` per record.
pub fn read_shift_rows(source: &str, input: &str) -> Result<Vec<(String, f64, f64)>> {
    expect_header(source, input, SHIFT_HEADER)?;
    let mut out: Vec<(String, f64, f64)> = Vec::new();
    let body: Vec<(usize, &str)> = lines(input).skip(1).collect();
    for pair in body.chunks(2) {
        let parse = |(n, l): (usize, &str), space: &str| -> Result<(String, f64)> {
            let parts: Vec<&str> = l.split('\t').collect();
            if parts.len() != 3 || parts[1] != space {
                return Err(schema(source, n, format!("expected record_id<TAB>{space}<TAB>distance")));
            }
            let d: f64 = parts[2].parse().map_err(|_| schema(source, n, format!("bad distance {:?}", parts[2])))?;
            Ok((parts[0].to_string(), d))
        };
        let [a, b] = pair else {
            return Err(schema(source, pair[0].0, "reactant row without reaction row"));
        };
        let (id, r) = parse(*a, "reactant")?;
        let (id2, x) = parse(*b, "reaction")?;
        if id != id2 {
            return Err(schema(source, b.0, format!("row pair mixes {id:?} and {id2:?}")));
        }
        out.push((id, r, x));
    }
    Ok(out)
}

/// JSON-safe summary: an empty split has no median.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceSummaryFile {
    pub count: usize,
    pub median: Option<f64>,
    pub lo: f64,
    pub hi: f64,
    pub bins: Vec<usize>,
}

impl From<&SpaceSummary> for SpaceSummaryFile {
    fn from(s: &SpaceSummary) -> Self {
        SpaceSummaryFile {
            count: s.count,
            median: (!s.median.is_nan()).then_some(s.median),
            lo: s.lo,
            hi: s.hi,
            bins: s.bins.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftSummaryFile {
    pub manifest: String,
    pub train_manifest: String,
    pub test_role: Role,
    pub train_roles: Vec<Role>,
    pub k: usize,
    pub reactant: SpaceSummaryFile,
    pub reaction: SpaceSummaryFile,
    pub corpus_digest: String,
    pub config: RunConfig,
}
