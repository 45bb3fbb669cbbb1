//! Author pass, then document pass, then a random division of the ID pool.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{divide, group_by, insufficient, stream, trim, Role, SplitError, SplitManifest, SplitParams, SplitRecord};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuthorDocumentParams {
    pub train: usize,
    pub val: usize,
    pub id_test: usize,
    pub ood_doc: usize,
    pub ood_author: usize,
}

impl Default for AuthorDocumentParams {
    fn default() -> Self {
        AuthorDocumentParams { train: 1_000_000, val: 30_000, id_test: 100_000, ood_doc: 100_000, ood_author: 100_000 }
    }
}

impl AuthorDocumentParams {
    fn id_doc_target(&self) -> usize {
        self.train + self.val + self.id_test
    }

    fn id_author_target(&self) -> usize {
        self.id_doc_target() + self.ood_doc
    }
}

const TAG_AUTHORS: u64 = 10;
const TAG_OOD_AUTHOR_TRIM: u64 = 11;
const TAG_DOCS: u64 = 12;
const TAG_OOD_DOC_TRIM: u64 = 13;
const TAG_ID_TRIM: u64 = 14;
const TAG_DIVIDE: u64 = 15;

/// Pools fill with whole documents until they reach their target, then
/// are trimmed uniformly. Authors of any document drawn into the OOD
/// author pool are barred from the ID side: documents they (co-)wrote are
/// left unassigned.
pub fn split_author_document(
    records: &[SplitRecord],
    params: &AuthorDocumentParams,
    seed: u64,
) -> Result<SplitManifest, SplitError> {
    let docs = group_by(records.iter().map(|r| r.doc.as_str()));
    let doc_index: alloc::collections::BTreeMap<&str, usize> =
        docs.iter().enumerate().map(|(i, (d, _))| (*d, i)).collect();
    let doc_authors: Vec<BTreeSet<&str>> = docs
        .iter()
        .map(|(_, members)| {
            members
                .iter()
                .flat_map(|&i| records[i].authors.iter().map(String::as_str))
                .collect()
        })
        .collect();

    // Author to documents, both in first-appearance order.
    let mut author_docs: Vec<(&str, Vec<usize>)> = Vec::new();
    {
        let mut slot = alloc::collections::BTreeMap::new();
        for r in records {
            let d = doc_index[r.doc.as_str()];
            for a in &r.authors {
                let s = *slot.entry(a.as_str()).or_insert_with(|| {
                    author_docs.push((a.as_str(), Vec::new()));
                    author_docs.len() - 1
                });
                if !author_docs[s].1.contains(&d) {
                    author_docs[s].1.push(d);
                }
            }
        }
    }
    let mut author_order: Vec<usize> = (0..author_docs.len()).collect();
    author_order.shuffle(&mut stream(seed, &[TAG_AUTHORS]));

    let mut encountered = vec![false; docs.len()];
    let mut ood_author_docs: Vec<usize> = Vec::new();
    let mut ood_author_count = 0;
    let mut id_author_docs: Vec<usize> = Vec::new();
    let mut id_author_count = 0;
    let mut tainted: BTreeSet<&str> = BTreeSet::new();
    let mut phase_ood = params.ood_author > 0;
    let id_target = params.id_author_target();

    for &a in &author_order {
        if phase_ood && ood_author_count >= params.ood_author {
            phase_ood = false;
            for &d in &ood_author_docs {
                tainted.extend(doc_authors[d].iter().copied());
            }
        }
        if !phase_ood && id_author_count >= id_target {
            break;
        }
        let (name, ref ds) = author_docs[a];
        if !phase_ood && tainted.contains(name) {
            continue;
        }
        for &d in ds {
            if encountered[d] {
                continue;
            }
            if phase_ood {
                encountered[d] = true;
                ood_author_docs.push(d);
                ood_author_count += docs[d].1.len();
            } else if doc_authors[d].is_disjoint(&tainted) {
                encountered[d] = true;
                id_author_docs.push(d);
                id_author_count += docs[d].1.len();
            }
        }
    }
    if ood_author_count < params.ood_author {
        return Err(insufficient("ood_author_test", params.ood_author, ood_author_count));
    }
    if id_author_count < id_target {
        return Err(insufficient("id_author", id_target, id_author_count));
    }

    let members = |ds: &[usize]| -> Vec<usize> { ds.iter().flat_map(|&d| docs[d].1.iter().copied()).collect() };
    let ood_author = trim(&members(&ood_author_docs), params.ood_author, &mut stream(seed, &[TAG_OOD_AUTHOR_TRIM]));

    // Document pass over the ID author pool.
    let mut doc_order = id_author_docs;
    doc_order.shuffle(&mut stream(seed, &[TAG_DOCS]));
    let mut ood_doc_pool = Vec::new();
    let mut id_doc_pool = Vec::new();
    let id_doc_target = params.id_doc_target();
    for &d in &doc_order {
        if ood_doc_pool.len() < params.ood_doc {
            ood_doc_pool.extend_from_slice(&docs[d].1);
        } else if id_doc_pool.len() < id_doc_target {
            id_doc_pool.extend_from_slice(&docs[d].1);
        } else {
            break;
        }
    }
    if ood_doc_pool.len() < params.ood_doc {
        return Err(insufficient("ood_doc_test", params.ood_doc, ood_doc_pool.len()));
    }
    if id_doc_pool.len() < id_doc_target {
        return Err(insufficient("id_document", id_doc_target, id_doc_pool.len()));
    }
    let ood_doc = trim(&ood_doc_pool, params.ood_doc, &mut stream(seed, &[TAG_OOD_DOC_TRIM]));
    let id_pool = trim(&id_doc_pool, id_doc_target, &mut stream(seed, &[TAG_ID_TRIM]));
    let parts = divide(&id_pool, &[params.train, params.val, params.id_test], &mut stream(seed, &[TAG_DIVIDE]));

    let mut roles = vec![None; records.len()];
    for &i in &ood_author {
        roles[i] = Some(Role::OodAuthorTest);
    }
    for &i in &ood_doc {
        roles[i] = Some(Role::OodDocTest);
    }
    for (part, role) in parts.iter().zip([Role::Train, Role::Val, Role::IdTest]) {
        for &i in part {
            roles[i] = Some(role);
        }
    }
    Ok(SplitManifest::from_roles(
        String::from("doc-author"),
        seed,
        SplitParams::AuthorDocument(params.clone()),
        records,
        &roles,
    ))
}
