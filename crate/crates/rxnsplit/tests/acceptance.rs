//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! fails.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rxnsplit::config::RunConfig;
use rxnsplit::demo::{demo_corpus, DemoParams};
use rxnsplit::formats::{self, ManifestFile, RejectRow, ReportFile};
use rxnsplit::pipeline::{self, build_manifests, records_with_roles, shift_report, Corpus, Family};
use rxnsplit_core::chem::{canonical_smiles, parse_smiles, write_smiles, FingerprintVector, Molecule, MoleculeSet};
use rxnsplit_core::corpus::{
    clean, deduplicate, filter, firing_criteria, standardize, ClassCode, RawRecord, ReactionRecord, Verdict,
};
use rxnsplit_core::eval::{
    classify_grignard_addition, score_topk, two_step_predict, EvalMode, EvalReport, GrignardAddition, PredictionSet,
};
use rxnsplit_core::shift::{featurize, knn_shift, Featurized, FingerprintConfig, ShiftIndex};
use rxnsplit_core::splits::{
    check, split_random, split_time, ClassCodeSet, RandomParams, ReactionTypePreset, Role, SplitManifest,
    SplitRecord, TimeParams, TrainSize,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($fmt)+)),
        }
    };
}

fn raw(id: &str, rxn: &str, year: i32, class: Option<&str>) -> RawRecord {
    RawRecord {
        id: id.into(),
        rxn: rxn.into(),
        doc: "d".into(),
        authors: vec![],
        year,
        class: class.map(|c| ClassCode::parse(c).unwrap()),
    }
}

fn cleaned(records: usize, seed: u64, noise: bool) -> Vec<ReactionRecord> {
    clean(&demo_corpus(&DemoParams { records, seed, noise, ..DemoParams::default() })).records
}

fn pool() -> rayon::ThreadPool {
    pipeline::thread_pool(None).unwrap()
}

/// Distinct molecules of the demo corpus, 1000 sampled with a fixed seed.
fn sample_molecules() -> Vec<Molecule> {
    let mut distinct: BTreeMap<String, Molecule> = BTreeMap::new();
    for r in cleaned(5000, 11, false) {
        for m in r.reactants.molecules().iter().chain(r.products.molecules()) {
            distinct.entry(canonical_smiles(m)).or_insert_with(|| m.clone());
        }
    }
    let mut all: Vec<Molecule> = distinct.into_values().collect();
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(1));
    all.truncate(1000);
    all
}

fn random_ranks(n: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut r: Vec<u32> = (0..n as u32).collect();
    r.shuffle(rng);
    r
}

fn c1_canonical_invariance(mols: &[Molecule]) -> Outcome {
    ensure!(mols.len() == 1000, "only {} distinct molecules", mols.len());
    let stereo = mols.iter().filter(|m| m.has_stereo()).count();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for m in mols {
        let mut seen = BTreeSet::new();
        for _ in 0..100 {
            let s = write_smiles(m, &random_ranks(m.atom_count(), &mut rng));
            let back = parse_smiles(&s).map_err(|e| format!("{s}: {e}"))?;
            ensure!(back.len() == 1, "{s}: {} components", back.len());
            seen.insert(canonical_smiles(&back[0]));
        }
        ensure!(seen.len() == 1, "{} canonical strings: {seen:?}", seen.len());
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(60), "took {t:?}");
    Ok(format!("1000 molecules ({stereo} with stereo) x 100 writings in {:.1}s", t.as_secs_f64()))
}

type AtomLabel = [i64; 7];

/// Graph invariants computed without the canonicalizer: per-atom labels
/// and labelled bond multisets.
fn graph_invariants(m: &Molecule) -> (Vec<AtomLabel>, Vec<(AtomLabel, AtomLabel, u8)>) {
    let label = |i: usize| {
        let a = &m.atoms()[i];
        [
            a.atomic_number as i64,
            a.charge as i64,
            m.total_hydrogens(i) as i64,
            a.aromatic as i64,
            a.isotope as i64,
            m.neighbors(i).len() as i64,
            a.chirality.is_some() as i64,
        ]
    };
    let mut atoms: Vec<AtomLabel> = (0..m.atom_count()).map(label).collect();
    atoms.sort();
    let mut bonds: Vec<_> = m
        .bonds()
        .iter()
        .map(|b| {
            let (x, y) = (label(b.begin), label(b.end));
            (x.min(y), x.max(y), b.order.code())
        })
        .collect();
    bonds.sort();
    (atoms, bonds)
}

fn c2_idempotence_round_trip(mols: &[Molecule]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in mols {
        let c = canonical_smiles(m);
        let again = parse_smiles(&c).map_err(|e| format!("{c}: {e}"))?;
        ensure!(canonical_smiles(&again[0]) == c, "not idempotent: {c}");
        ensure!(graph_invariants(&again[0]) == graph_invariants(m), "canonical form changes the graph: {c}");
        let s = write_smiles(m, &random_ranks(m.atom_count(), &mut rng));
        let back = parse_smiles(&s).map_err(|e| format!("{s}: {e}"))?;
        ensure!(graph_invariants(&back[0]) == graph_invariants(m), "round trip changes the graph: {s}");
    }
    Ok(format!("{} molecules, zero failures", mols.len()))
}

/// (reaction, first firing criterion or 0 for keep, other criteria that
/// must also fire)
fn filter_fixture() -> Vec<(String, u8, Vec<u8>)> {
    let long = "C".repeat(500);
    let edge = "C".repeat(400);
    let fits = "C".repeat(399);
    let toluenes = vec!["Cc1ccccc1"; 90].join(".");
    let rows: Vec<(String, u8, &[u8])> = vec![
        ("CCO>>CC=O".into(), 1, &[]),
        ("C.O>>CO".into(), 1, &[]),
        // Worked examples whose named criterion fires after criterion 1.
        ("CCO>>CCO.[H][H]".into(), 1, &[5]),
        ("[Na+].[Cl-]>>[Na]Cl".into(), 1, &[2]),
        ("CC(=O)[O-]>>CC(=O)O".into(), 1, &[4]),
        ("[Na+].[Cl-].[K+].[Br-].[I-]>>[Na+].[I-]".into(), 2, &[]),
        ("O.O.O.N.N>>[NH4+].[OH-]".into(), 2, &[]),
        ("OS(=O)(=O)O.NN>>NS(=O)(=O)O".into(), 2, &[]),
        ("ClP(Cl)(Cl)=O.O>>OP(O)(O)=O".into(), 2, &[]),
        ("CC.CC.CC>>CCCCCC".into(), 3, &[]),
        ("C.C.C.C.C>>CCCCC".into(), 3, &[]),
        ("CCl.CBr.CI>>ClCCBr".into(), 3, &[]),
        ("CC(=O)[O-].[Na+]>>CC(=O)O.[Na+]".into(), 4, &[]),
        ("CC(=O)[O-].CCCC>>CC(=O)O.CCCC".into(), 4, &[]),
        ("C[NH3+].CCCCC>>CN.CCCCC".into(), 4, &[]),
        ("CCCC[S-].CC>>CCCCS.CC".into(), 4, &[]),
        ("[O-]c1ccccc1>>Oc1ccccc1".into(), 4, &[]),
        ("CCCCO>>CCCCO.[H][H]".into(), 5, &[]),
        ("CCCCCBr>>Br".into(), 5, &[]),
        ("CCCCCCO>>O".into(), 5, &[]),
        ("CCCCCCl.O>>Cl".into(), 5, &[]),
        (format!("{long}>>{long}O"), 6, &[]),
        (format!("{edge}>>{edge}O"), 6, &[]),
        (format!("{toluenes}>>CC"), 6, &[]),
        ("CC(=O)OC.O>>CC(=O)O.CO".into(), 0, &[]),
        ("c1ccccc1Br.OB(O)c1ccccc1>>c1ccc(-c2ccccc2)cc1".into(), 0, &[]),
        (format!("{fits}>>{fits}O"), 0, &[]),
        ("CC(=O)Cl.NCC>CCN(CC)CC>CC(=O)NCC".into(), 0, &[]),
        ("C=CC=C.C=CC(=O)OC>>COC(=O)C1CC=CCC1".into(), 0, &[]),
        ("CCCCCBr.[Na+].[I-]>>CCCCCI.[Na+].[Br-]".into(), 0, &[]),
    ];
    rows.into_iter().map(|(r, c, also)| (r, c, also.to_vec())).collect()
}

fn c3_filter_conformance() -> Outcome {
    let rows = filter_fixture();
    ensure!(rows.len() == 30, "{} rows", rows.len());
    for c in 1..=6u8 {
        let n = rows.iter().filter(|r| r.1 == c).count();
        ensure!(n >= 3, "criterion {c} has {n} cases");
    }
    for (rxn, want, also) in &rows {
        let rec = standardize(&raw("x", rxn, 2000, None)).map_err(|e| format!("{rxn}: {e}"))?;
        let got = match filter(&rec) {
            Verdict::Keep => 0,
            Verdict::Reject(r) => r.criterion.id(),
        };
        ensure!(got == *want, "{}: got {got}, want {want}", &rxn[..rxn.len().min(60)]);
        let fired: Vec<u8> = firing_criteria(&rec).iter().map(|c| c.id()).collect();
        for a in also {
            ensure!(fired.contains(a), "{rxn}: criterion {a} should also fire, got {fired:?}");
        }
    }
    Ok("30 cases, labels exact".into())
}

/// Reaction string with every molecule re-written from random ranks and
/// the molecules of each side shuffled.
fn rewrite(rxn: &str, rng: &mut ChaCha8Rng) -> String {
    let side = |s: &str, rng: &mut ChaCha8Rng| -> String {
        let mut parts: Vec<String> = parse_smiles(s)
            .unwrap()
            .iter()
            .map(|m| write_smiles(m, &random_ranks(m.atom_count(), rng)))
            .collect();
        parts.shuffle(rng);
        parts.join(".")
    };
    let (r, p) = rxn.split_once(">>").unwrap();
    format!("{}>>{}", side(r, rng), side(p, rng))
}

/// First kept, displaced by a newcomer with a tag the kept one lacks, or
/// else by an equally tagged newcomer from an earlier year.
fn dedup_oracle(recs: &[ReactionRecord], group: &[usize]) -> Vec<String> {
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..recs.len() {
        match kept.iter().position(|&j| group[j] == group[i]) {
            None => kept.push(i),
            Some(s) => {
                let (k, n) = (&recs[kept[s]], &recs[i]);
                let tag = k.class_code.is_none() && n.class_code.is_some();
                let year = k.class_code.is_some() == n.class_code.is_some() && n.year < k.year;
                if tag || year {
                    kept[s] = i;
                }
            }
        }
    }
    kept.into_iter().map(|i| recs[i].id.clone()).collect()
}

fn c4_dedup_oracle() -> Outcome {
    // Distinct reactions from the demo corpus, written as reactants>>products.
    let mut distinct: BTreeMap<String, String> = BTreeMap::new();
    for r in cleaned(6000, 21, false) {
        distinct.entry(r.reaction_smiles()).or_insert_with(|| r.reaction_smiles());
    }
    let reactions: Vec<String> = distinct.into_values().take(1500).collect();
    ensure!(reactions.len() == 1500, "only {} distinct reactions", reactions.len());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut recs = Vec::with_capacity(10_000);
    let mut group = Vec::with_capacity(10_000);
    for i in 0..10_000 {
        // Skewed group sizes: a few large groups, many small ones.
        let g = (rng.random::<f64>().powi(2) * reactions.len() as f64) as usize;
        let class = match rng.random_range(0..3) {
            0 => None,
            1 => Some("3.1.1"),
            _ => Some("0.0"),
        };
        let year = rng.random_range(1976..2023);
        let rec = standardize(&raw(&format!("p{i:05}"), &rewrite(&reactions[g], &mut rng), year, class))
            .map_err(|e| format!("{e}"))?;
        recs.push(rec);
        group.push(g);
    }
    let groups = group.iter().collect::<BTreeSet<_>>().len();
    let got: Vec<String> = deduplicate(recs.clone()).records.into_iter().map(|r| r.id).collect();
    let want = dedup_oracle(&recs, &group);
    ensure!(got == want, "module keeps {} records, oracle {}", got.len(), want.len());
    Ok(format!("10000 records in {groups} groups, {} kept, identical to oracle", got.len()))
}

fn split_config() -> RunConfig {
    RunConfig::from_toml(
        r#"
        seed = 5
        [split.random]
        train = 1000
        val = 100
        id_test = 300
        [split.doc_author]
        train = 700
        val = 50
        id_test = 150
        ood_doc = 150
        ood_author = 150
        [split.time]
        cutoffs = [1996, 2008, 2020]
        per_year_test = 2
        val = 30
        [split.reaction_type]
        train = 600
        val = 50
        id_test = 100
        ood_train_inject = 10
        ood_test_cap = 60
        "#,
    )
    .unwrap()
}

fn manifest_bytes(m: &SplitManifest, cfg: &RunConfig) -> Vec<u8> {
    let mut v = Vec::new();
    formats::write_manifest(&mut v, &ManifestFile::new(m.clone(), "corpus", cfg)).unwrap();
    v
}

fn check_family(family: Family, cfg: &RunConfig, recs: &[SplitRecord]) -> Result<Vec<SplitManifest>, String> {
    let ms = build_manifests(family, cfg, recs).map_err(|e| format!("{family}: {e}"))?;
    let again = build_manifests(family, cfg, recs).map_err(|e| format!("{family}: {e}"))?;
    for (a, b) in ms.iter().zip(&again) {
        ensure!(manifest_bytes(a, cfg) == manifest_bytes(b, cfg), "{} not regenerated byte-identically", a.name);
        check::disjoint_and_known(a, recs)?;
    }
    Ok(ms)
}

fn c5_split_invariants() -> Outcome {
    let recs: Vec<SplitRecord> = cleaned(2000, 0, true).iter().map(SplitRecord::from).collect();
    let mut cfg = split_config();
    let mut built = 0;

    let r = &cfg.split.random;
    let m = check_family(Family::Random, &cfg, &recs)?;
    check::sizes(&m[0], &[(Role::Train, r.train), (Role::Val, r.val), (Role::IdTest, r.id_test)])?;
    built += m.len();

    let p = &cfg.split.doc_author;
    let m = &check_family(Family::DocAuthor, &cfg, &recs)?[0];
    check::sizes(
        m,
        &[
            (Role::Train, p.train),
            (Role::Val, p.val),
            (Role::IdTest, p.id_test),
            (Role::OodDocTest, p.ood_doc),
            (Role::OodAuthorTest, p.ood_author),
        ],
    )?;
    let id = [Role::Train, Role::Val, Role::IdTest];
    check::document_closure(m, &recs, &id, &[Role::OodDocTest])?;
    check::document_closure(m, &recs, &id, &[Role::OodAuthorTest])?;
    check::document_closure(m, &recs, &[Role::OodDocTest], &[Role::OodAuthorTest])?;
    check::author_closure(m, &recs)?;
    built += 1;

    let t = &cfg.split.time;
    let ms = check_family(Family::Time, &cfg, &recs)?;
    let (test, cutoffs, class_test) = (&ms[0], &ms[1..ms.len() - 1], &ms[ms.len() - 1]);
    let last = recs.iter().map(|r| r.year).max().unwrap();
    let per_year: Vec<(Role, usize)> = (t.start_year..=last).map(|y| (Role::TestYear(y), t.per_year_test)).collect();
    check::sizes(test, &per_year)?;
    ensure!(test.assignments.len() == per_year.len() * t.per_year_test, "stray test roles");
    let train_sizes: BTreeSet<usize> = cutoffs.iter().map(|c| c.count(Role::Train)).collect();
    ensure!(train_sizes.len() == 1, "controlled train sizes differ: {train_sizes:?}");
    for c in cutoffs {
        check::year_containment(c, &recs)?;
        check::cross_document_closure(test, c, &recs)?;
        check::sizes(c, &[(Role::Val, t.val)])?;
        let barred: BTreeSet<&str> = c.assignments.iter().filter(|a| a.1.is_training()).map(|a| a.0.as_str()).collect();
        ensure!(class_test.assignments.iter().all(|a| !barred.contains(a.0.as_str())), "class test overlaps {}", c.name);
    }
    let codes = ClassCodeSet::parse(cfg.split.class_test.iter().map(String::as_str)).unwrap();
    let by_id: BTreeMap<&str, &SplitRecord> = recs.iter().map(|r| (r.id.as_str(), r)).collect();
    ensure!(
        class_test.assignments.iter().all(|a| codes.matches_opt(by_id[a.0.as_str()].class_code.as_ref())),
        "class test holds other classes"
    );
    ensure!(!class_test.assignments.is_empty(), "class test is empty");
    built += ms.len();

    for preset in ReactionTypePreset::ALL {
        cfg.split.reaction_type.preset = preset;
        let p = cfg.split.reaction_type.params().unwrap();
        let m = &check_family(Family::ReactionType, &cfg, &recs)?[0];
        check::held_out_exclusion(m, &recs, &p.held_out)?;
        let mut sizes = vec![(Role::Train, p.train), (Role::Val, p.val), (Role::IdTest, p.id_test)];
        if !p.held_out.is_empty() {
            sizes.push((Role::OodTrainInject, p.ood_train_inject));
            ensure!((1..=p.ood_test_cap).contains(&m.count(Role::OodTest)), "{}: ood_test {}", m.name, m.count(Role::OodTest));
            check::document_closure(m, &recs, &[Role::Train, Role::Val, Role::IdTest], &[Role::OodTest, Role::OodTrainInject])?;
            check::document_closure(m, &recs, &[Role::OodTrainInject], &[Role::OodTest])?;
        }
        check::sizes(m, &sizes)?;
        built += 1;
    }
    Ok(format!("{} records, {built} manifests checked", recs.len()))
}

fn c6_time_size_control() -> Outcome {
    let recs: Vec<SplitRecord> = cleaned(2000, 0, true).iter().map(SplitRecord::from).collect();
    let (lo, hi) = (recs.iter().map(|r| r.year).min().unwrap(), recs.iter().map(|r| r.year).max().unwrap());
    ensure!(lo <= 1976 && hi >= 2022, "corpus spans {lo}..{hi}");
    let params = |train| TimeParams { cutoffs: vec![1996, 2020], per_year_test: 2, val: 30, train, ..TimeParams::default() };
    let sizes = |train| -> Result<(usize, usize), String> {
        let s = split_time(&recs, &params(train), 0).map_err(|e| e.to_string())?;
        Ok((s.cutoffs[0].count(Role::Train), s.cutoffs[1].count(Role::Train)))
    };
    let (c96, c20) = sizes(TrainSize::Controlled)?;
    let (u96, u20) = sizes(TrainSize::All)?;
    ensure!(c96 == c20, "controlled {c96} vs {c20}");
    ensure!(u20 > u96, "uncontrolled {u96} vs {u20}");
    Ok(format!("controlled {c96} == {c20}; uncontrolled {u96} < {u20}"))
}

fn c7_scoring() -> Outcome {
    let recs = cleaned(7000, 31, false);
    let recs = &recs[..5000.min(recs.len())];
    ensure!(recs.len() == 5000, "only {} records", recs.len());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut preds = PredictionSet::default();
    for r in recs {
        let n = rng.random_range(0..8);
        let mut ranked = Vec::new();
        for _ in 0..n {
            let c = match rng.random_range(0..6) {
                0 => r.products.canonical(),
                1 => r.products.strip_stereo().canonical(),
                2 => {
                    let m = &r.products.molecules()[0];
                    write_smiles(m, &random_ranks(m.atom_count(), &mut rng))
                }
                3 => recs[rng.random_range(0..recs.len())].products.canonical(),
                4 => recs[rng.random_range(0..recs.len())].reactants.canonical(),
                _ => "C1CC(".to_string(),
            };
            ranked.push(c);
        }
        preds.insert(r.id.clone(), ranked);
    }
    let truth: Vec<(&str, &MoleculeSet)> = recs.iter().map(|r| (r.id.as_str(), &r.products)).collect();
    let ks = [1, 2, 3, 4, 5];
    let reports: Vec<EvalReport> =
        EvalMode::ALL.iter().map(|&m| score_topk(&preds, &truth, &ks, m, 5).unwrap()).collect();
    for rep in &reports {
        ensure!(rep.topk.windows(2).all(|w| w[0].accuracy <= w[1].accuracy), "{} not monotone", rep.mode);
    }
    let hits = |rep: &EvalReport, k: usize| -> BTreeSet<String> {
        rep.hit_ranks.iter().filter(|h| h.1.is_some_and(|r| r <= k)).map(|h| h.0.clone()).collect()
    };
    for k in ks {
        let exact = hits(&reports[0], k);
        ensure!(exact.is_subset(&hits(&reports[1], k)), "exact not within stereo_agnostic at k={k}");
        ensure!(exact.is_subset(&hits(&reports[2], k)), "exact not within regio_agnostic at k={k}");
    }

    // Hand fixture: truth at rank 1..=5 and one miss.
    let truth_smiles = ["CCO", "CCN", "CCCl", "c1ccccc1O", "CC(=O)O", "CCBr"];
    let truth_sets: Vec<MoleculeSet> = truth_smiles.iter().map(|s| MoleculeSet::parse(s).unwrap()).collect();
    let mut hand = PredictionSet::default();
    for (i, t) in truth_smiles.iter().enumerate() {
        let mut ranked = vec!["CCCC".to_string(); 5];
        if i < 5 {
            ranked[i] = t.to_string();
        }
        hand.insert(format!("h{i}"), ranked);
    }
    let ids: Vec<String> = (0..6).map(|i| format!("h{i}")).collect();
    let ht: Vec<(&str, &MoleculeSet)> = ids.iter().map(String::as_str).zip(truth_sets.iter()).collect();
    let rep = score_topk(&hand, &ht, &ks, EvalMode::Exact, 5).unwrap();
    for t in &rep.topk {
        ensure!(t.hits == t.k && t.total == 6, "hand fixture top-{}: {}/{}", t.k, t.hits, t.total);
        ensure!(t.accuracy == t.k as f64 / 6.0, "hand fixture accuracy {}", t.accuracy);
    }
    let top1: Vec<String> = reports.iter().map(|r| format!("{} {:.3}", r.mode, r.topk[0].accuracy)).collect();
    Ok(format!("5000 records, top-1 {}; hand fixture exact", top1.join(", ")))
}

fn naive_cosine(u: &FingerprintVector, v: &FingerprintVector) -> f64 {
    let (a, b) = (u.to_dense(), v.to_dense());
    let dot: i128 = a.iter().zip(&b).map(|(x, y)| *x as i128 * *y as i128).sum();
    let na: i128 = a.iter().map(|x| *x as i128 * *x as i128).sum();
    let nb: i128 = b.iter().map(|x| *x as i128 * *x as i128).sum();
    if na == 0 || nb == 0 {
        return 1.0;
    }
    (1.0 - dot as f64 / ((na as f64).sqrt() * (nb as f64).sqrt())).clamp(0.0, 2.0)
}

/// Double loop over every test/train pair: (neighbor indices, mean distance).
fn naive_knn(q: &FingerprintVector, train: &[FingerprintVector], k: usize) -> (Vec<usize>, f64) {
    let mut d: Vec<(f64, usize)> = train.iter().enumerate().map(|(i, t)| (naive_cosine(q, t), i)).collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d.truncate(k);
    (d.iter().map(|x| x.1).collect(), d.iter().map(|x| x.0).sum::<f64>() / k as f64)
}

fn c8_knn_oracle() -> Outcome {
    let start = Instant::now();
    let recs = cleaned(1000, 41, false);
    let split_recs: Vec<SplitRecord> = recs.iter().map(SplitRecord::from).collect();
    let m = split_random(&split_recs, &RandomParams { train: 500, val: 0, id_test: 49 }, 8).map_err(|e| e.to_string())?;
    let corpus = Corpus { records: recs, digest: String::new() };
    let train: Vec<&ReactionRecord> = records_with_roles(&corpus, &m, &[Role::Train]);
    let mut test: Vec<ReactionRecord> = records_with_roles(&corpus, &m, &[Role::IdTest]).into_iter().cloned().collect();
    let mut twin = train[7].clone();
    twin.id = "twin".into();
    test.push(twin);
    ensure!(train.len() == 500 && test.len() == 50, "{} train, {} test", train.len(), test.len());

    let cfg = FingerprintConfig::default();
    let train_f: Vec<Featurized> = train.iter().map(|r| featurize(r, &cfg)).collect();
    let test_f: Vec<Featurized> = test.iter().map(|r| featurize(r, &cfg)).collect();
    let k = 5;
    let rows = knn_shift(&test_f, &train_f, k).map_err(|e| e.to_string())?;
    let tr: Vec<FingerprintVector> = train_f.iter().map(|f| f.reactant.clone()).collect();
    let tx: Vec<FingerprintVector> = train_f.iter().map(|f| f.reaction.clone()).collect();
    let mut worst: f64 = 0.0;
    for (i, (f, row)) in test_f.iter().zip(&rows).enumerate() {
        let (nr, mr) = naive_knn(&f.reactant, &tr, k);
        let (nx, mx) = naive_knn(&f.reaction, &tx, k);
        ensure!(row.reactant_neighbors == nr, "test {i}: reactant neighbors {:?} vs {nr:?}", row.reactant_neighbors);
        ensure!(row.reaction_neighbors == nx, "test {i}: reaction neighbors {:?} vs {nx:?}", row.reaction_neighbors);
        worst = worst.max((row.reactant_mean - mr).abs()).max((row.reaction_mean - mx).abs());
    }
    ensure!(worst <= 1e-12, "mean distance differs by {worst:e}");
    let index = ShiftIndex::new(&train_f);
    let twin = &test_f[49];
    let r0 = index.reactant.nearest(&twin.reactant, 1)[0];
    let x0 = index.reaction.nearest(&twin.reaction, 1)[0];
    ensure!(r0.distance == 0.0 && x0.distance == 0.0, "identity record: {} / {}", r0.distance, x0.distance);
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(30), "took {t:?}");
    Ok(format!("500x50, both spaces match, max mean error {worst:e}, {:.2}s", t.as_secs_f64()))
}

fn demo_config() -> RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/demo.toml");
    RunConfig::load(&path).unwrap()
}

fn c9_doc_vs_random_shift() -> Outcome {
    let cfg = demo_config();
    let pool = pool();
    let corpus = Corpus { records: cleaned(5000, 0, true), digest: String::new() };
    let recs = corpus.split_records();
    let median = |family: Family, role: Role| -> Result<f64, String> {
        let m = build_manifests(family, &cfg, &recs).map_err(|e| e.to_string())?.remove(0);
        let test = records_with_roles(&corpus, &m, &[role]);
        let train = records_with_roles(&corpus, &m, &[Role::Train]);
        let rep = shift_report(&m.name, &test, &train, &cfg, &pool).map_err(|e| e.to_string())?;
        Ok(rep.reactant.median)
    };
    let doc = median(Family::DocAuthor, Role::OodDocTest)?;
    let random = median(Family::Random, Role::IdTest)?;
    ensure!(doc > random, "document median {doc} <= random median {random}");
    Ok(format!("median reactant distance: document {doc:.4} > random {random:.4}"))
}

fn cli(dir: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rxnsplit")).current_dir(dir).args(args).output().map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn top1(dir: &Path, file: &str) -> Result<f64, String> {
    let text = fs::read_to_string(dir.join(file)).map_err(|e| format!("{file}: {e}"))?;
    let rep: ReportFile = formats::from_json(file, &text).map_err(|e| e.to_string())?;
    rep.topk.iter().find(|t| t.k == 1).map(|t| t.accuracy).ok_or_else(|| "no top-1".into())
}

fn c10_end_to_end(dir: &Path) -> Outcome {
    let start = Instant::now();
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/demo.toml");
    let config = config.to_str().unwrap();
    let g = ["--config", config, "--out", "o"];
    let run = |args: &[&str]| {
        let mut all = args.to_vec();
        all.extend_from_slice(&g);
        cli(dir, &all)
    };
    run(&["demo-corpus", "raw.jsonl"])?;
    run(&["clean", "--corpus", "raw.jsonl"])?;
    let c = ["--corpus", "o/corpus.jsonl"];
    run(&[&["split", "doc-author"][..], &c].concat())?;
    let manifest = ["--manifest", "o/manifests/doc-author.manifest"];
    for role in ["id_test", "ood_doc_test"] {
        run(&[&["eval", "--baseline", "--role", role][..], &c, &manifest].concat())?;
        run(&[&["shift", "--test-role", role][..], &c, &manifest].concat())?;
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(300), "took {t:?}");
    let id = top1(dir, "o/eval/doc-author.id_test.baseline.exact.json")?;
    let doc = top1(dir, "o/eval/doc-author.ood_doc_test.baseline.exact.json")?;
    ensure!(id >= doc, "ID top-1 {id} < document top-1 {doc}");
    Ok(format!("{:.1}s; baseline top-1 ID {id:.3} >= document {doc:.3}", t.as_secs_f64()))
}

fn rewritten<T>(text: &str, read: impl Fn(&str) -> T, write: impl Fn(&mut Vec<u8>, &T)) -> Vec<u8> {
    let v = read(text);
    let mut out = Vec::new();
    write(&mut out, &v);
    out
}

fn c12_format_round_trips(dir: &Path) -> Outcome {
    let mut checked = Vec::new();
    let mut same = |file: &str, again: &dyn Fn(&str) -> Vec<u8>| -> Result<(), String> {
        let text = fs::read_to_string(dir.join(file)).map_err(|e| format!("{file}: {e}"))?;
        ensure!(again(&text) == text.as_bytes(), "{file} changes on write -> read -> write");
        checked.push(file.to_string());
        Ok(())
    };
    same("o/eval/doc-author.id_test.baseline.predictions.tsv", &|t| {
        rewritten(t, |t| formats::read_predictions("p", t).unwrap(), |w, v| formats::write_predictions(w, v).unwrap())
    })?;
    same("o/manifests/doc-author.manifest", &|t| {
        rewritten(t, |t| formats::read_manifest("m", t).unwrap(), |w, v| formats::write_manifest(w, v).unwrap())
    })?;
    same("o/rejects.tsv", &|t| {
        rewritten(
            t,
            |t| formats::read_reject_log("r", t).unwrap(),
            |w, v: &Vec<RejectRow>| formats::write_reject_log(w, v).unwrap(),
        )
    })?;
    for mode in ["exact", "stereo_agnostic", "regio_agnostic"] {
        same(&format!("o/eval/doc-author.ood_doc_test.baseline.{mode}.json"), &|t| {
            let v: ReportFile = formats::from_json("e", t).unwrap();
            formats::to_json(&v).into_bytes()
        })?;
        same(&format!("o/eval/doc-author.ood_doc_test.baseline.{mode}.hits.tsv"), &|t| {
            rewritten(t, |t| formats::read_hit_ranks("h", t).unwrap(), |w, v| formats::write_hit_ranks(w, v).unwrap())
        })?;
    }
    same("o/shift/doc-author.ood_doc_test.json", &|t| {
        let v: formats::ShiftSummaryFile = formats::from_json("s", t).unwrap();
        formats::to_json(&v).into_bytes()
    })?;
    same("o/stats.tsv", &|t| {
        rewritten(t, |t| formats::read_year_counts("y", t).unwrap(), |w, v| formats::write_year_counts(w, v).unwrap())
    })?;
    Ok(format!("{} files byte-identical", checked.len()))
}

/// (ester substituent, Grignard reagent, transferred group)
const ESTERS: &[&str] = &["C", "CC", "c1ccccc1", "OCCC", "C1CCCCC1"];
const GRIGNARDS: &[(&str, &str)] = &[("C[Mg]Br", "C"), ("CC[Mg]Br", "CC"), ("Br[Mg]c1ccccc1", "c1ccccc1"), ("C=CC[Mg]Br", "CC=C")];

struct GrignardCase {
    reactants: MoleculeSet,
    product: MoleculeSet,
    double: bool,
}

fn canon(s: &str) -> String {
    MoleculeSet::parse(s).unwrap().canonical()
}

fn c11_two_step_grignard() -> Outcome {
    // One addition per call: ketone + Grignard gives the alcohol, ester +
    // Grignard gives the ketone.
    let mut ketone_step: BTreeMap<(String, String), String> = BTreeMap::new();
    let mut ester_step: BTreeMap<(String, String), String> = BTreeMap::new();
    let mut cases = Vec::new();
    for (i, (r, (reagent, g))) in ESTERS.iter().flat_map(|r| GRIGNARDS.iter().map(move |x| (r, x))).enumerate() {
        let ester = canon(&format!("{r}C(=O)OC"));
        let ketone = canon(&format!("{r}C(=O){g}"));
        let alcohol = canon(&format!("{r}C({g})({g})O"));
        let reagent = canon(reagent);
        ester_step.insert((ester.clone(), reagent.clone()), ketone.clone());
        ketone_step.insert((ketone.clone(), reagent.clone()), alcohol.clone());
        let double = i % 5 != 1 && i % 5 != 3;
        cases.push(GrignardCase {
            reactants: MoleculeSet::parse(&format!("{ester}.{reagent}")).unwrap(),
            product: MoleculeSet::parse(if double { &alcohol } else { &ketone }).unwrap(),
            double,
        });
    }
    let oracle = |reactants: &MoleculeSet, _width: usize| -> Vec<String> {
        let have = reactants.canonical_list();
        for (table, _) in [(&ketone_step, "ketone"), (&ester_step, "ester")] {
            for ((sub, reagent), out) in table {
                if have.contains(sub) && have.contains(reagent) {
                    return vec![out.clone()];
                }
            }
        }
        Vec::new()
    };
    ensure!(cases.len() == 20, "{} cases", cases.len());
    let doubles = cases.iter().filter(|c| c.double).count();
    for c in &cases {
        let label = classify_grignard_addition(&c.reactants, &c.product);
        let want = if c.double { GrignardAddition::Double } else { GrignardAddition::Single };
        ensure!(label == want, "{}: labelled {label:?}", c.product.canonical());
        if c.double {
            let single = oracle(&c.reactants, 5);
            ensure!(single.first() != Some(&c.product.canonical()), "oracle adds twice in one step");
            let two = two_step_predict(&oracle, &c.reactants, 5);
            ensure!(
                two.first() == Some(&c.product.canonical()),
                "{}: two-step gave {two:?}",
                c.reactants.canonical()
            );
        }
    }
    Ok(format!("20 fixtures ({doubles} double) labelled; every double addition recovered at rank 1"))
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(r) => r,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("criterion {n:>2} PASS  {name}: {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {msg} [{secs:.1}s]");
            }
        }
    };
    let mols = sample_molecules();
    let dir = tempfile::tempdir().unwrap();
    report(1, "canonical invariance", &mut || c1_canonical_invariance(&mols));
    report(2, "idempotence and round trip", &mut || c2_idempotence_round_trip(&mols));
    report(3, "filter conformance", &mut c3_filter_conformance);
    report(4, "dedup oracle", &mut c4_dedup_oracle);
    report(5, "split invariants", &mut c5_split_invariants);
    report(6, "time-split size control", &mut c6_time_size_control);
    report(7, "scoring properties", &mut c7_scoring);
    report(8, "k-NN oracle", &mut c8_knn_oracle);
    report(9, "document vs random shift", &mut c9_doc_vs_random_shift);
    report(10, "end-to-end baseline", &mut || c10_end_to_end(dir.path()));
    report(11, "two-step Grignard", &mut c11_two_step_grignard);
    report(12, "format round trips", &mut || c12_format_round_trips(dir.path()));
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 12 criteria pass");
}
