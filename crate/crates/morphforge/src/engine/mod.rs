//! The runtime engine over a compiled database: read-only, shareable, with
//! generation and analysis as independent entry points.

pub mod analyze;
pub mod generate;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::conditions::Side;
use crate::db::{ComplexMorph, MorphDb};
use crate::features::{MergeError, Pos};

/// Read-only wrapper around a database with precomputed adjacency indices.
pub struct Engine<'a> {
    pub db: &'a MorphDb,
    /// (lemma, pos) -> stem-side entries.
    stems_by_lexeme: BTreeMap<(String, Pos), Vec<&'a ComplexMorph>>,
    /// stem category -> compatible prefix categories (table AB).
    prefixes_of_stem_cat: BTreeMap<&'a str, Vec<&'a str>>,
    /// stem category -> compatible suffix categories (table BC).
    suffixes_of_stem_cat: BTreeMap<&'a str, Vec<&'a str>>,
    prefixes_by_cat: BTreeMap<&'a str, Vec<&'a ComplexMorph>>,
    suffixes_by_cat: BTreeMap<&'a str, Vec<&'a ComplexMorph>>,
    max_prefix_key: usize,
    max_suffix_key: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("unknown lemma `{0}`")]
    UnknownLemma(String),
    #[error("empty input")]
    EmptyInput,
    #[error("internal feature merge failure: {0}")]
    Internal(MergeError),
}

impl<'a> Engine<'a> {
    pub fn new(db: &'a MorphDb) -> Engine<'a> {
        let mut stems_by_lexeme: BTreeMap<(String, Pos), Vec<&ComplexMorph>> = BTreeMap::new();
        for cm in db.all_of(Side::Stem) {
            if let Some(pos) = cm.features.pos {
                stems_by_lexeme.entry((cm.lemma.clone(), pos)).or_default().push(cm);
            }
        }
        let mut prefixes_of_stem_cat: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (a, b) in &db.table_ab {
            prefixes_of_stem_cat.entry(b.as_str()).or_default().push(a.as_str());
        }
        let mut suffixes_of_stem_cat: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (b, c) in &db.table_bc {
            suffixes_of_stem_cat.entry(b.as_str()).or_default().push(c.as_str());
        }
        let mut prefixes_by_cat: BTreeMap<&str, Vec<&ComplexMorph>> = BTreeMap::new();
        for cm in db.all_of(Side::Prefix) {
            prefixes_by_cat.entry(cm.category.as_str()).or_default().push(cm);
        }
        let mut suffixes_by_cat: BTreeMap<&str, Vec<&ComplexMorph>> = BTreeMap::new();
        for cm in db.all_of(Side::Suffix) {
            suffixes_by_cat.entry(cm.category.as_str()).or_default().push(cm);
        }
        // split bounds default to the longest compiled keys, from the header
        let max_prefix_key = db
            .header
            .flag_usize("maxpfxkey")
            .unwrap_or_else(|| db.prefixes.keys().map(|k| k.chars().count()).max().unwrap_or(0));
        let max_suffix_key = db
            .header
            .flag_usize("maxsfxkey")
            .unwrap_or_else(|| db.suffixes.keys().map(|k| k.chars().count()).max().unwrap_or(0));
        Engine {
            db,
            stems_by_lexeme,
            prefixes_of_stem_cat,
            suffixes_of_stem_cat,
            prefixes_by_cat,
            suffixes_by_cat,
            max_prefix_key,
            max_suffix_key,
        }
    }

    pub fn max_prefix_key(&self) -> usize {
        self.max_prefix_key
    }

    pub fn max_suffix_key(&self) -> usize {
        self.max_suffix_key
    }

    pub(crate) fn stems_for(
        &self,
        lemma: &str,
        pos: Option<Pos>,
    ) -> Vec<&'a ComplexMorph> {
        let mut out = Vec::new();
        for p in [Pos::Noun, Pos::Adj, Pos::AdjComp] {
            if pos.is_some() && pos != Some(p) {
                continue;
            }
            if let Some(v) = self.stems_by_lexeme.get(&(lemma.to_string(), p)) {
                out.extend(v.iter().copied());
            }
        }
        out
    }

    pub(crate) fn prefix_cats_for(&self, stem_cat: &str) -> &[&'a str] {
        self.prefixes_of_stem_cat.get(stem_cat).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub(crate) fn suffix_cats_for(&self, stem_cat: &str) -> &[&'a str] {
        self.suffixes_of_stem_cat.get(stem_cat).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub(crate) fn prefixes_in(&self, cat: &str) -> &[&'a ComplexMorph] {
        self.prefixes_by_cat.get(cat).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub(crate) fn suffixes_in(&self, cat: &str) -> &[&'a ComplexMorph] {
        self.suffixes_by_cat.get(cat).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub(crate) fn ac_ok(&self, prefix_cat: &str, suffix_cat: &str) -> bool {
        self.db
            .table_ac
            .contains(&(prefix_cat.to_string(), suffix_cat.to_string()))
    }

    /// Every lexeme key present in the database.
    pub fn lexemes(&self) -> impl Iterator<Item = &(String, Pos)> {
        self.stems_by_lexeme.keys()
    }

    fn dedup_sort(mut v: Vec<crate::analysis::Analysis>) -> Vec<crate::analysis::Analysis> {
        v.sort_by_key(|a| a.sort_key());
        v.dedup_by_key(|a| a.sort_key());
        v
    }
}
