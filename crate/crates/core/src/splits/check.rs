//! Assertions over a finished manifest. Each returns the first violation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;

use super::{ClassCodeSet, Role, SplitManifest, SplitParams, SplitRecord};

pub type Check = Result<(), String>;

fn by_id(records: &[SplitRecord]) -> BTreeMap<&str, &SplitRecord> {
    records.iter().map(|r| (r.id.as_str(), r)).collect()
}

/// Every id appears once and exists in the corpus.
pub fn disjoint_and_known(m: &SplitManifest, records: &[SplitRecord]) -> Check {
    let ids = by_id(records);
    let mut seen = BTreeSet::new();
    for (id, _) in &m.assignments {
        if !seen.insert(id.as_str()) {
            return Err(format!("{}: {id} assigned twice", m.name));
        }
        if !ids.contains_key(id.as_str()) {
            return Err(format!("{}: {id} not in corpus", m.name));
        }
    }
    Ok(())
}

/// No document has records on both sides.
pub fn document_closure(m: &SplitManifest, records: &[SplitRecord], side_a: &[Role], side_b: &[Role]) -> Check {
    let ids = by_id(records);
    let docs_of = |roles: &[Role]| -> BTreeSet<&str> {
        m.assignments
            .iter()
            .filter(|a| roles.contains(&a.1))
            .filter_map(|a| ids.get(a.0.as_str()).map(|r| r.doc.as_str()))
            .collect()
    };
    let a = docs_of(side_a);
    match docs_of(side_b).intersection(&a).next() {
        Some(d) => Err(format!("{}: document {d} spans {side_a:?} and {side_b:?}", m.name)),
        None => Ok(()),
    }
}

/// No document of a test-manifest record reaches train or val of `train`.
pub fn cross_document_closure(test: &SplitManifest, train: &SplitManifest, records: &[SplitRecord]) -> Check {
    let ids = by_id(records);
    let test_docs: BTreeSet<&str> = test
        .assignments
        .iter()
        .filter_map(|a| ids.get(a.0.as_str()).map(|r| r.doc.as_str()))
        .collect();
    for (id, role) in &train.assignments {
        if role.is_training() && test_docs.contains(ids[id.as_str()].doc.as_str()) {
            return Err(format!("{}: {id} shares a document with {}", train.name, test.name));
        }
    }
    Ok(())
}

/// Every document of every author appearing in `ood_author_test` stays out
/// of all other roles.
pub fn author_closure(m: &SplitManifest, records: &[SplitRecord]) -> Check {
    let ids = by_id(records);
    let ood_authors: BTreeSet<&str> = m
        .ids(Role::OodAuthorTest)
        .flat_map(|id| ids[id].authors.iter().map(String::as_str))
        .collect();
    let barred_docs: BTreeSet<&str> = records
        .iter()
        .filter(|r| r.authors.iter().any(|a| ood_authors.contains(a.as_str())))
        .map(|r| r.doc.as_str())
        .collect();
    for (id, role) in &m.assignments {
        if *role != Role::OodAuthorTest && barred_docs.contains(ids[id.as_str()].doc.as_str()) {
            return Err(format!("{}: {id} ({role}) belongs to an OOD author's document", m.name));
        }
    }
    Ok(())
}

/// Train and val hold nothing after the manifest's cutoff year.
pub fn year_containment(m: &SplitManifest, records: &[SplitRecord]) -> Check {
    let SplitParams::TimeTrain { cutoff, .. } = m.params else {
        return Err(format!("{}: not a cutoff manifest", m.name));
    };
    let ids = by_id(records);
    for (id, role) in &m.assignments {
        let y = ids[id.as_str()].year;
        if role.is_training() && y > cutoff {
            return Err(format!("{}: {id} from {y} after cutoff {cutoff}", m.name));
        }
    }
    Ok(())
}

/// No held-out class in train, val or id_test.
pub fn held_out_exclusion(m: &SplitManifest, records: &[SplitRecord], codes: &ClassCodeSet) -> Check {
    let ids = by_id(records);
    for (id, role) in &m.assignments {
        if matches!(role, Role::Train | Role::Val | Role::IdTest) && codes.matches_opt(ids[id.as_str()].class_code.as_ref())
        {
            return Err(format!("{}: held-out {id} in {role}", m.name));
        }
    }
    Ok(())
}

pub fn sizes(m: &SplitManifest, expected: &[(Role, usize)]) -> Check {
    for &(role, n) in expected {
        let got = m.count(role);
        if got != n {
            return Err(format!("{}: {role} has {got}, expected {n}", m.name));
        }
    }
    Ok(())
}
