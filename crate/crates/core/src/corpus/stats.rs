use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;

use serde::{Deserialize, Serialize};

use super::record::ReactionRecord;

/// Aggregate counts over a cleaned corpus.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub reactions: usize,
    pub documents: usize,
    pub authors: usize,
    pub per_year: BTreeMap<i32, usize>,
    /// Full class code to count; records without a code are counted in
    /// `unclassified`.
    pub classes: BTreeMap<String, usize>,
    pub unclassified: usize,
}

pub fn corpus_stats<'a>(records: impl IntoIterator<Item = &'a ReactionRecord>) -> CorpusStats {
    let mut s = CorpusStats::default();
    let mut docs = BTreeSet::new();
    let mut authors = BTreeSet::new();
    for r in records {
        s.reactions += 1;
        *s.per_year.entry(r.year).or_default() += 1;
        docs.insert(r.doc.as_str());
        authors.extend(r.authors.iter().map(String::as_str));
        match &r.class_code {
            Some(c) => *s.classes.entry(String::from(c.as_str())).or_default() += 1,
            None => s.unclassified += 1,
        }
    }
    s.documents = docs.len();
    s.authors = authors.len();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::MoleculeSet;
    use crate::corpus::record::ClassCode;
    use alloc::vec;
    use alloc::vec::Vec;

    fn rec(doc: &str, authors: &[&str], year: i32, code: Option<&str>) -> ReactionRecord {
        ReactionRecord {
            id: String::new(),
            reactants: MoleculeSet::default(),
            reagents: MoleculeSet::default(),
            products: MoleculeSet::default(),
            doc: doc.into(),
            authors: authors.iter().map(|a| String::from(*a)).collect(),
            year,
            class_code: code.map(|c| ClassCode::parse(c).unwrap()),
        }
    }

    #[test]
    fn per_year_table() {
        let rs = vec![
            rec("d1", &["a", "b"], 1999, Some("3.1.2")),
            rec("d1", &["a"], 1999, None),
            rec("d2", &["b"], 1999, Some("3.1.2")),
            rec("d3", &["c"], 2001, Some("1.3")),
            rec("d3", &["c"], 2001, None),
        ];
        let s = corpus_stats(&rs);
        assert_eq!(s.per_year.into_iter().collect::<Vec<_>>(), vec![(1999, 3), (2001, 2)]);
        assert_eq!((s.reactions, s.documents, s.authors, s.unclassified), (5, 3, 3, 2));
        assert_eq!(s.classes.get("3.1.2"), Some(&2));
    }

    #[test]
    fn empty() {
        let s = corpus_stats(&[]);
        assert!(s.per_year.is_empty());
        assert_eq!(s.reactions, 0);
    }
}
