//! Coverage evaluation against gold analysis files, and database-vs-database
//! analysis diffing.
//!
//! A gold row is recalled iff some analysis of its word matches it on all of
//! lemma, diacritization and BW tag. Rows carrying placeholder values are
//! dropped before scoring and counted separately, never entering the recall
//! denominator.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::engine::Engine;

/// Placeholder token marking incomplete gold rows.
pub const PLACEHOLDER: &str = "NOAN";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldRow {
    pub word: String,
    pub lemma: String,
    pub diac: String,
    pub bw_tag: String,
    /// Token frequency weight.
    pub count: u64,
}

#[derive(Debug, Clone, Default)]
pub struct GoldFile {
    pub rows: Vec<GoldRow>,
    pub dropped: usize,
}

#[derive(Debug, Error)]
pub enum GoldError {
    #[error("cannot read gold file: {0}")]
    Io(#[from] io::Error),
    #[error("gold file line {0}: expected 5 tab-separated columns")]
    Malformed(usize),
    #[error("gold file line {0}: bad count")]
    BadCount(usize),
}

/// Parse a gold TSV: `word  lemma  diac  bw_tag  count`, with a header row.
/// Rows whose lemma, diac or tag is the placeholder are dropped and counted.
pub fn parse_gold(text: &str) -> Result<GoldFile, GoldError> {
    let mut out = GoldFile::default();
    let mut seen_header = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            seen_header = true;
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != 5 {
            return Err(GoldError::Malformed(i + 1));
        }
        if cells[1] == PLACEHOLDER || cells[2] == PLACEHOLDER || cells[3] == PLACEHOLDER {
            out.dropped += 1;
            continue;
        }
        out.rows.push(GoldRow {
            word: cells[0].to_string(),
            lemma: cells[1].to_string(),
            diac: cells[2].to_string(),
            bw_tag: cells[3].to_string(),
            count: cells[4].parse().map_err(|_| GoldError::BadCount(i + 1))?,
        });
    }
    Ok(out)
}

pub fn read_gold(path: &Path) -> Result<GoldFile, GoldError> {
    parse_gold(&fs::read_to_string(path)?)
}

pub fn write_gold(path: &Path, rows: &[GoldRow]) -> io::Result<()> {
    let mut text = String::from("WORD\tLEMMA\tDIAC\tBW_TAG\tCOUNT\n");
    for r in rows {
        text.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.word, r.lemma, r.diac, r.bw_tag, r.count
        ));
    }
    fs::write(path, text)
}

/// Which of the three matched fields differed for the closest analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Miss {
    pub word: String,
    pub lemma_differs: bool,
    pub diac_differs: bool,
    pub tag_differs: bool,
}

#[derive(Debug, Clone, Default)]
pub struct CoverageReport {
    pub token_total: u64,
    pub token_recalled: u64,
    pub type_total: u64,
    pub type_recalled: u64,
    pub dropped: usize,
    pub misses: Vec<Miss>,
}

impl CoverageReport {
    pub fn token_recall(&self) -> f64 {
        if self.token_total == 0 {
            return 0.0;
        }
        self.token_recalled as f64 / self.token_total as f64
    }

    pub fn type_recall(&self) -> f64 {
        if self.type_total == 0 {
            return 0.0;
        }
        self.type_recalled as f64 / self.type_total as f64
    }
}

impl fmt::Display for CoverageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "token recall\t{:.1}%\t({}/{})",
            100.0 * self.token_recall(),
            self.token_recalled,
            self.token_total
        )?;
        writeln!(
            f,
            "type recall\t{:.1}%\t({}/{})",
            100.0 * self.type_recall(),
            self.type_recalled,
            self.type_total
        )?;
        write!(f, "dropped rows\t{}", self.dropped)
    }
}

/// Recall of the gold file in token space (weighted by counts) and unique
/// type space. Misses carry a nearest-miss diff of the three fields.
pub fn coverage(engine: &Engine, gold: &GoldFile) -> CoverageReport {
    let mut report = CoverageReport {
        dropped: gold.dropped,
        ..CoverageReport::default()
    };
    // analyses cached per surface word
    let mut cache: BTreeMap<&str, Vec<(String, String, String)>> = BTreeMap::new();
    for row in &gold.rows {
        let analyses = cache.entry(row.word.as_str()).or_insert_with(|| {
            engine
                .analyze(&row.word)
                .map(|v| {
                    v.into_iter()
                        .map(|a| (a.lemma, a.diac, a.bw_tag))
                        .collect()
                })
                .unwrap_or_default()
        });
        let hit = analyses
            .iter()
            .any(|(l, d, t)| *l == row.lemma && *d == row.diac && *t == row.bw_tag);
        report.token_total += row.count;
        report.type_total += 1;
        if hit {
            report.token_recalled += row.count;
            report.type_recalled += 1;
        } else {
            // closest analysis: the one matching the most fields
            let best = analyses
                .iter()
                .map(|(l, d, t)| {
                    (
                        (*l == row.lemma) as u8 + (*d == row.diac) as u8 + (*t == row.bw_tag) as u8,
                        l,
                        d,
                        t,
                    )
                })
                .max_by_key(|(score, ..)| *score);
            let miss = match best {
                Some((_, l, d, t)) => Miss {
                    word: row.word.clone(),
                    lemma_differs: *l != row.lemma,
                    diac_differs: *d != row.diac,
                    tag_differs: *t != row.bw_tag,
                },
                None => Miss {
                    word: row.word.clone(),
                    lemma_differs: true,
                    diac_differs: true,
                    tag_differs: true,
                },
            };
            report.misses.push(miss);
        }
    }
    report
}

/// Per-word analysis sets of two databases, keyed on lemma+diac+bw_tag.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordDiff {
    pub word: String,
    pub both: BTreeSet<String>,
    pub only_a: BTreeSet<String>,
    pub only_b: BTreeSet<String>,
}

#[derive(Debug, Clone, Default)]
pub struct DiffReport {
    pub words: Vec<WordDiff>,
}

impl DiffReport {
    pub fn totals(&self) -> (usize, usize, usize) {
        let both = self.words.iter().map(|w| w.both.len()).sum();
        let a = self.words.iter().map(|w| w.only_a.len()).sum();
        let b = self.words.iter().map(|w| w.only_b.len()).sum();
        (both, a, b)
    }

    /// Percentages over the union of all inspected analyses, in the shape
    /// both / only-A / only-B.
    pub fn percentages(&self) -> (f64, f64, f64) {
        let (both, a, b) = self.totals();
        let total = (both + a + b) as f64;
        if total == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        (
            100.0 * both as f64 / total,
            100.0 * a as f64 / total,
            100.0 * b as f64 / total,
        )
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (both, a, b) = self.totals();
        let (pb, pa, pbb) = self.percentages();
        writeln!(f, "analyses in both\t{both}\t{pb:.0}%")?;
        writeln!(f, "analyses only in A\t{a}\t{pa:.0}%")?;
        write!(f, "analyses only in B\t{b}\t{pbb:.0}%")
    }
}

fn analysis_keys(engine: &Engine, word: &str) -> BTreeSet<String> {
    engine
        .analyze(word)
        .map(|v| {
            v.into_iter()
                .map(|a| format!("{}\u{1}{}\u{1}{}", a.lemma, a.diac, a.bw_tag))
                .collect()
        })
        .unwrap_or_default()
}

/// Compare all analyses two databases produce for a word list.
pub fn diff_analyses(engine_a: &Engine, engine_b: &Engine, words: &[String]) -> DiffReport {
    let mut report = DiffReport::default();
    for word in words {
        let a = analysis_keys(engine_a, word);
        let b = analysis_keys(engine_b, word);
        report.words.push(WordDiff {
            word: word.clone(),
            both: a.intersection(&b).cloned().collect(),
            only_a: a.difference(&b).cloned().collect(),
            only_b: b.difference(&a).cloned().collect(),
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gold_parsing_drops_placeholders() {
        let text = "WORD\tLEMMA\tDIAC\tBW_TAG\tCOUNT\n\
                    w1\tl1\td1\tt1\t3\n\
                    w2\tNOAN\td2\tt2\t5\n\
                    w3\tl3\tNOAN\tt3\t1\n";
        let gold = parse_gold(text).unwrap();
        assert_eq!(gold.rows.len(), 1);
        assert_eq!(gold.dropped, 2);
        assert_eq!(gold.rows[0].count, 3);
    }

    #[test]
    fn gold_parsing_rejects_malformed() {
        assert!(matches!(
            parse_gold("WORD\nonly\tthree\tcolumns\n"),
            Err(GoldError::Malformed(2))
        ));
        assert!(matches!(
            parse_gold("WORD\tLEMMA\tDIAC\tBW_TAG\tCOUNT\nw\tl\td\tt\tx\n"),
            Err(GoldError::BadCount(2))
        ));
    }

    #[test]
    fn recall_denominator_excludes_dropped_rows() {
        let text = "H\nw\tNOAN\td\tt\t9\n";
        let gold = parse_gold(text).unwrap();
        assert_eq!(gold.rows.len(), 0);
        assert_eq!(gold.dropped, 1);
    }
}
