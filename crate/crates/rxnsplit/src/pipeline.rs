//! Commands as library functions. Each reads its inputs, writes its
//! artifacts under the configured output directory and returns what it
//! wrote. Parallel stages collect in input order, so outputs do not
//! depend on the worker count.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use rxnsplit_core::corpus::{corpus_stats, finish_clean, screen, standardize, CleanOutcome, RawRecord, ReactionRecord};
use rxnsplit_core::eval::{hit_ranks_all_modes, missing_ids, BaselineIndex, EvalMode, EvalReport, MissingPrediction, PredictionSet};
use rxnsplit_core::shift::{featurize, DistanceReport, Featurized, FingerprintConfig, ShiftError, ShiftIndex};
use rxnsplit_core::splits::{
    class_test_manifest, split_author_document, split_random, split_reaction_type, split_time, ClassCodeSet, Role,
    SplitManifest, SplitRecord,
};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::formats::{self, ManifestFile, RejectRow, ReportFile, ShiftSummaryFile, SpaceSummaryFile};

pub fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(Error::Usage("--workers must be at least 1".into()));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Usage(format!("thread pool: {e}")))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(Error::io(path))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(Error::io(dir))?;
    }
    fs::write(path, bytes).map_err(Error::io(path))
}

fn render(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory");
    buf
}

/// A cleaned corpus and the digest of its file.
#[derive(Debug)]
pub struct Corpus {
    pub records: Vec<ReactionRecord>,
    pub digest: String,
}

impl Corpus {
    pub fn split_records(&self) -> Vec<SplitRecord> {
        self.records.iter().map(SplitRecord::from).collect()
    }
}

/// Read a cleaned corpus. Every line must parse and standardize.
pub fn load_corpus(path: &Path, pool: &rayon::ThreadPool) -> Result<Corpus> {
    let text = read(path)?;
    let source = path.display().to_string();
    let raws = formats::read_records(&source, &text, true)?.records;
    let records: Vec<std::result::Result<ReactionRecord, String>> =
        pool.install(|| raws.par_iter().map(|r| standardize(r).map_err(|e| format!("{}: {e}", r.id))).collect());
    let records = records
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.map_err(|m| Error::Schema { file: source.clone(), line: i + 1, message: m }))
        .collect::<Result<Vec<_>>>()?;
    Ok(Corpus { records, digest: formats::sha256_hex(text.as_bytes()) })
}

/// Standardize and filter in parallel, then deduplicate in input order.
pub fn clean_records(raws: &[RawRecord], pool: &rayon::ThreadPool) -> CleanOutcome {
    let screened = pool.install(|| raws.par_iter().map(screen).collect());
    let ids: Vec<&str> = raws.iter().map(|r| r.id.as_str()).collect();
    finish_clean(&ids, screened)
}

#[derive(Debug)]
pub struct CleanResult {
    pub outcome: CleanOutcome,
    pub schema_issues: usize,
    pub files: Vec<PathBuf>,
}

pub const CLEAN_CORPUS: &str = "corpus.jsonl";
pub const CLEAN_REJECTS: &str = "rejects.tsv";
pub const CLEAN_STATS: &str = "stats.tsv";
pub const CLEAN_SUMMARY: &str = "clean_summary.json";

/// Standardize, filter and deduplicate the raw corpus.
pub fn cmd_clean(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<CleanResult> {
    let input = cfg.corpus_path()?;
    let text = read(input)?;
    let ingested = formats::read_records(&input.display().to_string(), &text, cfg.strict)?;
    let outcome = clean_records(&ingested.records, pool);

    let cleaned: Vec<RawRecord> = outcome.records.iter().map(ReactionRecord::to_raw).collect();
    let corpus = render(|w| formats::write_records(w, &cleaned));
    let mut rows: Vec<RejectRow> = ingested
        .issues
        .iter()
        .map(|i| RejectRow { record_id: format!("line:{}", i.line), stage: "ingest".into(), reason: i.message.clone() })
        .collect();
    rows.extend(outcome.removals.iter().map(RejectRow::from));
    let rejects = render(|w| formats::write_reject_log(w, &rows));
    let stats = corpus_stats(&outcome.records);
    let stats_tsv = render(|w| formats::write_year_counts(w, &stats.per_year));
    let summary = formats::CleanSummary {
        config: cfg.clone(),
        input_digest: formats::sha256_hex(text.as_bytes()),
        corpus_digest: formats::sha256_hex(&corpus),
        counts: outcome.counts.clone(),
        replacements: outcome.replacements.len(),
        stats,
    };

    let out = &cfg.output;
    let files = vec![out.join(CLEAN_CORPUS), out.join(CLEAN_REJECTS), out.join(CLEAN_STATS), out.join(CLEAN_SUMMARY)];
    write(&files[0], &corpus)?;
    write(&files[1], &rejects)?;
    write(&files[2], &stats_tsv)?;
    write(&files[3], formats::to_json(&summary).as_bytes())?;
    log::info!(
        "clean: {} in, {} skipped, {} rejected, {} duplicates, {} kept",
        outcome.counts.input,
        outcome.counts.skipped,
        outcome.counts.rejected,
        outcome.counts.duplicates,
        outcome.counts.kept
    );
    Ok(CleanResult { outcome, schema_issues: ingested.issues.len(), files })
}

/// Per-year table and summary of a cleaned corpus.
pub fn cmd_stats(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Vec<PathBuf>> {
    let corpus = load_corpus(cfg.corpus_path()?, pool)?;
    let stats = corpus_stats(&corpus.records);
    let files = vec![cfg.output.join("stats.tsv"), cfg.output.join("stats.json")];
    write(&files[0], &render(|w| formats::write_year_counts(w, &stats.per_year)))?;
    let summary = formats::StatsSummary { config: cfg.clone(), corpus_digest: corpus.digest, stats };
    write(&files[1], formats::to_json(&summary).as_bytes())?;
    Ok(files)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Random,
    DocAuthor,
    Time,
    ReactionType,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Random, Family::DocAuthor, Family::Time, Family::ReactionType];

    pub fn name(self) -> &'static str {
        match self {
            Family::Random => "random",
            Family::DocAuthor => "doc-author",
            Family::Time => "time",
            Family::ReactionType => "reaction-type",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| format!("unknown split family {s:?}"))
    }
}

/// Build the family's manifests (several for the time split).
pub fn build_manifests(family: Family, cfg: &RunConfig, records: &[SplitRecord]) -> Result<Vec<SplitManifest>> {
    let seed = cfg.seed;
    Ok(match family {
        Family::Random => vec![split_random(records, &cfg.split.random, seed)?],
        Family::DocAuthor => vec![split_author_document(records, &cfg.split.doc_author, seed)?],
        Family::Time => {
            let t = split_time(records, &cfg.split.time, seed)?;
            let mut out = vec![t.test];
            out.extend(t.cutoffs);
            if !cfg.split.class_test.is_empty() {
                let codes = ClassCodeSet::parse(cfg.split.class_test.iter().map(String::as_str))
                    .map_err(|e| Error::Usage(format!("class_test: {e}")))?;
                let exclude: Vec<&SplitManifest> = out[1..].iter().collect();
                let m = class_test_manifest("time-class-test".into(), records, &codes, &exclude);
                out.push(m);
            }
            out
        }
        Family::ReactionType => vec![split_reaction_type(records, &cfg.split.reaction_type.params()?, seed)?],
    })
}

pub fn manifest_path(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.output.join("manifests").join(format!("{name}.manifest"))
}

pub fn cmd_split(cfg: &RunConfig, family: Family, pool: &rayon::ThreadPool) -> Result<Vec<PathBuf>> {
    let corpus = load_corpus(cfg.corpus_path()?, pool)?;
    let manifests = build_manifests(family, cfg, &corpus.split_records())?;
    let mut files = Vec::new();
    for m in manifests {
        let path = manifest_path(cfg, &m.name);
        let counts = m.role_counts();
        let file = ManifestFile::new(m, &corpus.digest, cfg);
        write(&path, &render(|w| formats::write_manifest(w, &file)))?;
        log::info!("{}: {:?}", path.display(), counts);
        files.push(path);
    }
    Ok(files)
}

pub fn load_manifest(path: &Path, corpus: &Corpus) -> Result<ManifestFile> {
    let m = formats::read_manifest(&path.display().to_string(), &read(path)?)?;
    m.verify(&corpus.digest)?;
    Ok(m)
}

/// Records with the given roles, in corpus order.
pub fn records_with_roles<'a>(corpus: &'a Corpus, m: &SplitManifest, roles: &[Role]) -> Vec<&'a ReactionRecord> {
    let map = m.role_map();
    corpus
        .records
        .iter()
        .filter(|r| map.get(r.id.as_str()).is_some_and(|role| roles.contains(role)))
        .collect()
}

/// Baseline ranking for every query record, in query order.
pub fn baseline_predictions(
    index: &BaselineIndex,
    queries: &[&ReactionRecord],
    width: usize,
    pool: &rayon::ThreadPool,
) -> PredictionSet {
    let ranked: Vec<Vec<String>> = pool.install(|| {
        queries
            .par_iter()
            .map(|r| index.predict(&r.reactants, width))
            .collect()
    });
    let mut p = PredictionSet::default();
    for (r, v) in queries.iter().zip(ranked) {
        p.insert(r.id.clone(), v);
    }
    p
}

/// One report per mode, scoring every truth record once per mode.
pub fn score_modes(
    preds: &PredictionSet,
    truth: &[&ReactionRecord],
    ks: &[usize],
    modes: &[EvalMode],
    beam_width: usize,
    pool: &rayon::ThreadPool,
) -> std::result::Result<Vec<EvalReport>, MissingPrediction> {
    let missing = missing_ids(preds, truth.iter().map(|r| r.id.as_str()));
    if !missing.is_empty() {
        return Err(MissingPrediction(missing));
    }
    let ranks: Vec<[Option<usize>; 3]> = pool.install(|| {
        truth
            .par_iter()
            .map(|r| hit_ranks_all_modes(preds.get(&r.id).unwrap_or_default(), &r.products, beam_width))
            .collect()
    });
    Ok(modes
        .iter()
        .map(|&mode| {
            let slot = EvalMode::ALL.iter().position(|m| *m == mode).expect("mode listed");
            let per: Vec<(String, Option<usize>)> =
                truth.iter().zip(&ranks).map(|(r, h)| (r.id.clone(), h[slot])).collect();
            EvalReport::from_hit_ranks(mode, beam_width, ks, per)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PredictionSource {
    Baseline,
    File(PathBuf),
}

#[derive(Debug)]
pub struct EvalResult {
    pub reports: Vec<EvalReport>,
    pub files: Vec<PathBuf>,
}

/// `test` alone, or `test+train` when training records come from elsewhere.
fn pair_name(test: &SplitManifest, train: &SplitManifest) -> String {
    if test.name == train.name {
        test.name.clone()
    } else {
        format!("{}+{}", test.name, train.name)
    }
}

fn eval_stem(cfg: &RunConfig, pair: &str, role: Role, predictor: &str) -> PathBuf {
    cfg.output.join("eval").join(format!("{pair}.{role}.{predictor}"))
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Where training records come from: the test manifest itself, or a
/// separate one (the time split keeps train/val per cutoff).
pub fn training_manifest(corpus: &Corpus, test: &SplitManifest, train: Option<&Path>) -> Result<SplitManifest> {
    match train {
        Some(p) => Ok(load_manifest(p, corpus)?.manifest()),
        None => Ok(test.clone()),
    }
}

pub fn cmd_eval(
    cfg: &RunConfig,
    manifest: &Path,
    role: Role,
    train_manifest: Option<&Path>,
    source: &PredictionSource,
    pool: &rayon::ThreadPool,
) -> Result<EvalResult> {
    let corpus = load_corpus(cfg.corpus_path()?, pool)?;
    let m = load_manifest(manifest, &corpus)?.manifest();
    let tm = training_manifest(&corpus, &m, train_manifest)?;
    let pair = pair_name(&m, &tm);
    let truth = records_with_roles(&corpus, &m, &[role]);
    if truth.is_empty() {
        return Err(Error::Usage(format!("manifest {} has no {role} records", m.name)));
    }
    let mut files = Vec::new();
    let (preds, predictor) = match source {
        PredictionSource::Baseline => {
            let train: Vec<ReactionRecord> =
                records_with_roles(&corpus, &tm, &[Role::Train]).into_iter().cloned().collect();
            let index = BaselineIndex::build(&train, &cfg.fingerprint)?;
            let preds = baseline_predictions(&index, &truth, cfg.eval.beam_width, pool);
            let path = with_suffix(&eval_stem(cfg, &pair, role, "baseline"), ".predictions.tsv");
            write(&path, &render(|w| formats::write_predictions(w, &preds)))?;
            files.push(path);
            (preds, "baseline".to_string())
        }
        PredictionSource::File(path) => {
            let p = formats::read_predictions(&path.display().to_string(), &read(path)?)?;
            (p, "predictions".to_string())
        }
    };
    let reports = score_modes(&preds, &truth, &cfg.eval.ks, &cfg.eval.modes, cfg.eval.beam_width, pool)?;
    for rep in &reports {
        let stem = eval_stem(cfg, &pair, role, &format!("{predictor}.{}", rep.mode));
        let file = ReportFile::new(rep, &m.name, &tm.name, role, &predictor, &corpus.digest, cfg);
        let json = with_suffix(&stem, ".json");
        let hits = with_suffix(&stem, ".hits.tsv");
        write(&json, formats::to_json(&file).as_bytes())?;
        write(&hits, &render(|w| formats::write_hit_ranks(w, &rep.hit_ranks)))?;
        for t in &rep.topk {
            log::info!("{pair} {role} {}: top-{} {}/{} = {:.4}", rep.mode, t.k, t.hits, t.total, t.accuracy);
        }
        files.push(json);
        files.push(hits);
    }
    Ok(EvalResult { reports, files })
}

pub fn featurize_all(records: &[&ReactionRecord], cfg: &FingerprintConfig, pool: &rayon::ThreadPool) -> Vec<Featurized> {
    pool.install(|| records.par_iter().map(|r| featurize(r, cfg)).collect())
}

/// Exact k-NN shift of `test` against `train`, parallel over test records.
pub fn shift_report(
    name: &str,
    test: &[&ReactionRecord],
    train: &[&ReactionRecord],
    cfg: &RunConfig,
    pool: &rayon::ThreadPool,
) -> Result<DistanceReport> {
    let k = cfg.shift.k;
    if k == 0 || train.len() < k {
        return Err(ShiftError::InsufficientData { needed: k.max(1), available: train.len() }.into());
    }
    let train_f = featurize_all(train, &cfg.fingerprint, pool);
    let test_f = featurize_all(test, &cfg.fingerprint, pool);
    let index = ShiftIndex::new(&train_f);
    let rows = pool.install(|| test_f.par_iter().map(|f| index.query(f, k)).collect());
    let ids = test.iter().map(|r| r.id.clone()).collect();
    Ok(DistanceReport::new(name.to_string(), k, ids, rows, cfg.shift.bins))
}

#[derive(Debug)]
pub struct ShiftResult {
    pub report: DistanceReport,
    pub files: Vec<PathBuf>,
}

pub fn cmd_shift(
    cfg: &RunConfig,
    manifest: &Path,
    test_role: Role,
    train_manifest: Option<&Path>,
    pool: &rayon::ThreadPool,
) -> Result<ShiftResult> {
    let corpus = load_corpus(cfg.corpus_path()?, pool)?;
    let m = load_manifest(manifest, &corpus)?.manifest();
    let tm = training_manifest(&corpus, &m, train_manifest)?;
    let test = records_with_roles(&corpus, &m, &[test_role]);
    let train = records_with_roles(&corpus, &tm, &cfg.shift.train_roles);
    let pair = pair_name(&m, &tm);
    let report = shift_report(&pair, &test, &train, cfg, pool)?;
    let stem = cfg.output.join("shift").join(format!("{pair}.{test_role}"));
    let tsv = with_suffix(&stem, ".tsv");
    let json = with_suffix(&stem, ".json");
    write(&tsv, &render(|w| formats::write_shift_rows(w, &report)))?;
    let summary = ShiftSummaryFile {
        manifest: m.name.clone(),
        train_manifest: tm.name.clone(),
        test_role,
        train_roles: cfg.shift.train_roles.clone(),
        k: report.k,
        reactant: SpaceSummaryFile::from(&report.reactant),
        reaction: SpaceSummaryFile::from(&report.reaction),
        corpus_digest: corpus.digest.clone(),
        config: cfg.clone(),
    };
    write(&json, formats::to_json(&summary).as_bytes())?;
    log::info!(
        "{pair} {test_role}: median reactant {:.4}, reaction {:.4} over {} records",
        report.reactant.median,
        report.reaction.median,
        report.rows.len()
    );
    Ok(ShiftResult { report, files: vec![tsv, json] })
}

pub fn cmd_demo(path: &Path, params: &crate::demo::DemoParams) -> Result<usize> {
    let records = crate::demo::demo_corpus(params);
    write(path, &render(|w| formats::write_records(w, &records)))?;
    Ok(records.len())
}
