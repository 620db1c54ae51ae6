//! The compiled six-table morphological database: three surface lexicons
//! (complex prefixes, stems, complex suffixes) and three pairwise
//! category-compatibility tables.
//!
//! The text layout is fixed and fully deterministic: rows sorted
//! lexicographically, features in fixed key order, so compiling the same
//! spec twice yields byte-identical files.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::conditions::Side;
use crate::features::FeatureBundle;
use crate::rewrite::{RewriteRule, Stage};

/// One row of a surface lexicon: a fully merged run of allomorphs on one
/// side of the word, addressable by its dediacritized key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexMorph {
    pub side: Side,
    /// Dediacritized match key (may be empty for the all-nothing prefix or
    /// a vowel-only suffix).
    pub surface_key: String,
    /// Concatenated diacritized form.
    pub surface_diac: String,
    pub category: String,
    /// BW fragment; a trailing `+form` piece without a tag is a stem buffer
    /// that glues onto the first suffix segment at assembly time.
    pub bw_fragment: String,
    pub features: FeatureBundle,
    // stem-side columns; empty on prefix/suffix rows
    pub lemma: String,
    pub gloss: String,
    pub root: String,
    pub pattern: String,
}

impl ComplexMorph {
    fn row_string(&self) -> String {
        let base = format!(
            "{}\t{}\t{}\t{}\t{}",
            self.surface_key, self.surface_diac, self.category, self.bw_fragment,
            self.features.serialize()
        );
        if self.side == Side::Stem {
            format!(
                "{base}\t{}\t{}\t{}\t{}",
                self.lemma, self.gloss, self.root, self.pattern
            )
        } else {
            base
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DbHeader {
    pub version: String,
    /// Space-separated `key:value` flags; carries the longest compiled
    /// prefix/suffix key lengths the analyzer uses as split bounds.
    pub flags: BTreeMap<String, String>,
}

impl DbHeader {
    pub fn flag_usize(&self, key: &str) -> Option<usize> {
        self.flags.get(key).and_then(|v| v.parse().ok())
    }
}

#[derive(Debug, Clone, Default)]
pub struct MorphDb {
    pub header: DbHeader,
    pub prefixes: BTreeMap<String, Vec<ComplexMorph>>,
    pub stems: BTreeMap<String, Vec<ComplexMorph>>,
    pub suffixes: BTreeMap<String, Vec<ComplexMorph>>,
    pub table_ab: BTreeSet<(String, String)>,
    pub table_bc: BTreeSet<(String, String)>,
    pub table_ac: BTreeSet<(String, String)>,
    /// Engine rewrite rules, macro-expanded, so a database file is
    /// self-contained for any engine that reads the format.
    pub rewrite_rules: Vec<RewriteRule>,
}

impl PartialEq for MorphDb {
    fn eq(&self, other: &Self) -> bool {
        self.serialize() == other.serialize()
    }
}

impl Eq for MorphDb {}

const SEC_HEADER: &str = "###HEADER###";
const SEC_PREFIXES: &str = "###PREFIXES###";
const SEC_STEMS: &str = "###STEMS###";
const SEC_SUFFIXES: &str = "###SUFFIXES###";
const SEC_AB: &str = "###TABLE AB###";
const SEC_BC: &str = "###TABLE BC###";
const SEC_AC: &str = "###TABLE AC###";
const SEC_REWRITE: &str = "###REWRITE###";

impl MorphDb {
    /// A triple is engine-valid iff all three pairwise tables admit it.
    pub fn triple_valid(&self, p_cat: &str, s_cat: &str, x_cat: &str) -> bool {
        self.table_ab.contains(&(p_cat.to_string(), s_cat.to_string()))
            && self.table_bc.contains(&(s_cat.to_string(), x_cat.to_string()))
            && self.table_ac.contains(&(p_cat.to_string(), x_cat.to_string()))
    }

    pub fn all_of(&self, side: Side) -> impl Iterator<Item = &ComplexMorph> {
        let map = match side {
            Side::Prefix => &self.prefixes,
            Side::Stem => &self.stems,
            Side::Suffix => &self.suffixes,
        };
        map.values().flatten()
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{SEC_HEADER}");
        let flags = self
            .header
            .flags
            .iter()
            .map(|(k, v)| format!("{k}:{v}"))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(out, "{}\t{}", self.header.version, flags);
        for (sec, map) in [
            (SEC_PREFIXES, &self.prefixes),
            (SEC_STEMS, &self.stems),
            (SEC_SUFFIXES, &self.suffixes),
        ] {
            let _ = writeln!(out, "{sec}");
            let mut rows: Vec<String> =
                map.values().flatten().map(ComplexMorph::row_string).collect();
            rows.sort();
            for r in rows {
                let _ = writeln!(out, "{r}");
            }
        }
        for (sec, table) in [
            (SEC_AB, &self.table_ab),
            (SEC_BC, &self.table_bc),
            (SEC_AC, &self.table_ac),
        ] {
            let _ = writeln!(out, "{sec}");
            for (a, b) in table {
                let _ = writeln!(out, "{a}\t{b}");
            }
        }
        let _ = writeln!(out, "{SEC_REWRITE}");
        for r in &self.rewrite_rules {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.id,
                r.stage.as_str(),
                r.pattern.as_str(),
                r.replacement,
                r.bidirectional,
                r.inverse.as_ref().map(|(rx, _)| rx.as_str()).unwrap_or(""),
                r.inverse.as_ref().map(|(_, repl)| repl.as_str()).unwrap_or(""),
            );
        }
        out
    }

    pub fn parse(text: &str) -> Result<MorphDb, DbParseError> {
        let mut db = MorphDb::default();
        let mut section: Option<&str> = None;
        let mut header_done = false;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            if line.starts_with("###") {
                match line {
                    SEC_HEADER | SEC_PREFIXES | SEC_STEMS | SEC_SUFFIXES | SEC_AB | SEC_BC
                    | SEC_AC | SEC_REWRITE => section = Some(match line {
                        SEC_HEADER => SEC_HEADER,
                        SEC_PREFIXES => SEC_PREFIXES,
                        SEC_STEMS => SEC_STEMS,
                        SEC_SUFFIXES => SEC_SUFFIXES,
                        SEC_AB => SEC_AB,
                        SEC_BC => SEC_BC,
                        SEC_AC => SEC_AC,
                        _ => SEC_REWRITE,
                    }),
                    other => {
                        return Err(DbParseError::UnknownSection(lineno, other.to_string()))
                    }
                }
                continue;
            }
            let cells: Vec<&str> = line.split('\t').collect();
            match section {
                Some(SEC_HEADER) => {
                    if header_done {
                        return Err(DbParseError::Malformed(lineno, "extra header line".into()));
                    }
                    db.header.version = cells[0].to_string();
                    if let Some(flags) = cells.get(1) {
                        for pair in flags.split_whitespace() {
                            if let Some((k, v)) = pair.split_once(':') {
                                db.header.flags.insert(k.to_string(), v.to_string());
                            } else {
                                return Err(DbParseError::Malformed(
                                    lineno,
                                    format!("bad header flag `{pair}`"),
                                ));
                            }
                        }
                    }
                    header_done = true;
                }
                Some(sec @ (SEC_PREFIXES | SEC_STEMS | SEC_SUFFIXES)) => {
                    let side = match sec {
                        SEC_PREFIXES => Side::Prefix,
                        SEC_STEMS => Side::Stem,
                        _ => Side::Suffix,
                    };
                    let want = if side == Side::Stem { 9 } else { 5 };
                    if cells.len() != want {
                        return Err(DbParseError::Malformed(
                            lineno,
                            format!("expected {want} columns, got {}", cells.len()),
                        ));
                    }
                    let features = FeatureBundle::parse(cells[4])
                        .map_err(|e| DbParseError::Malformed(lineno, e.to_string()))?;
                    let cm = ComplexMorph {
                        side,
                        surface_key: cells[0].to_string(),
                        surface_diac: cells[1].to_string(),
                        category: cells[2].to_string(),
                        bw_fragment: cells[3].to_string(),
                        features,
                        lemma: cells.get(5).unwrap_or(&"").to_string(),
                        gloss: cells.get(6).unwrap_or(&"").to_string(),
                        root: cells.get(7).unwrap_or(&"").to_string(),
                        pattern: cells.get(8).unwrap_or(&"").to_string(),
                    };
                    let map = match side {
                        Side::Prefix => &mut db.prefixes,
                        Side::Stem => &mut db.stems,
                        Side::Suffix => &mut db.suffixes,
                    };
                    map.entry(cm.surface_key.clone()).or_default().push(cm);
                }
                Some(sec @ (SEC_AB | SEC_BC | SEC_AC)) => {
                    if cells.len() != 2 {
                        return Err(DbParseError::Malformed(
                            lineno,
                            "table rows have exactly two columns".into(),
                        ));
                    }
                    let pair = (cells[0].to_string(), cells[1].to_string());
                    match sec {
                        SEC_AB => db.table_ab.insert(pair),
                        SEC_BC => db.table_bc.insert(pair),
                        _ => db.table_ac.insert(pair),
                    };
                }
                Some(SEC_REWRITE) => {
                    if cells.len() != 7 {
                        return Err(DbParseError::Malformed(
                            lineno,
                            "rewrite rows have exactly seven columns".into(),
                        ));
                    }
                    let stage = Stage::parse(cells[1]).ok_or_else(|| {
                        DbParseError::Malformed(lineno, format!("unknown stage `{}`", cells[1]))
                    })?;
                    let bidirectional = match cells[4] {
                        "true" => true,
                        "false" => false,
                        other => {
                            return Err(DbParseError::Malformed(
                                lineno,
                                format!("bad bidirectional flag `{other}`"),
                            ))
                        }
                    };
                    let rule = RewriteRule::new(
                        cells[0], stage, cells[2], cells[3], bidirectional, cells[5], cells[6],
                    )
                    .map_err(|e| DbParseError::Malformed(lineno, e.to_string()))?;
                    db.rewrite_rules.push(rule);
                }
                _ => return Err(DbParseError::Malformed(lineno, "row outside any section".into())),
            }
        }
        if !header_done {
            return Err(DbParseError::MissingHeader);
        }
        Ok(db)
    }

    pub fn write_file(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.serialize())
    }

    pub fn read_file(path: &Path) -> Result<MorphDb, DbError> {
        let text = fs::read_to_string(path).map_err(DbError::Io)?;
        MorphDb::parse(&text).map_err(DbError::Parse)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DbParseError {
    #[error("line {0}: unknown section `{1}`")]
    UnknownSection(usize, String),
    #[error("line {0}: {1}")]
    Malformed(usize, String),
    #[error("missing ###HEADER### section")]
    MissingHeader,
}

#[derive(Debug, Error)]
pub enum DbError {
    #[error("cannot read database: {0}")]
    Io(io::Error),
    #[error("cannot parse database: {0}")]
    Parse(DbParseError),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MorphDb {
        let mut db = MorphDb::default();
        db.header.version = "1".into();
        db.header.flags.insert("maxpfxkey".into(), "3".into());
        db.header.flags.insert("maxsfxkey".into(), "4".into());
        db.prefixes.entry(String::new()).or_default().push(ComplexMorph {
            side: Side::Prefix,
            surface_key: String::new(),
            surface_diac: String::new(),
            category: "A|x=|ab=|ac=".into(),
            bw_fragment: String::new(),
            features: FeatureBundle::default(),
            lemma: String::new(),
            gloss: String::new(),
            root: String::new(),
            pattern: String::new(),
        });
        db.stems.entry("كتب".into()).or_default().push(ComplexMorph {
            side: Side::Stem,
            surface_key: "كتب".into(),
            surface_diac: "كُتُب".into(),
            category: "B|x=|ab=|bc=MS".into(),
            bw_fragment: "kutub/NOUN".into(),
            features: FeatureBundle::parse("pos:noun gen:m num:p").unwrap(),
            lemma: "كِتاب".into(),
            gloss: "books".into(),
            root: "كتب".into(),
            pattern: "1u2u3".into(),
        });
        db.table_ab.insert(("A|x=|ab=|ac=".into(), "B|x=|ab=|bc=MS".into()));
        db
    }

    #[test]
    fn serialize_parse_round_trip() {
        let db = sample();
        let text = db.serialize();
        let back = MorphDb::parse(&text).unwrap();
        assert_eq!(back.serialize(), text);
        assert_eq!(back.header.flag_usize("maxpfxkey"), Some(3));
        assert_eq!(back.stems.len(), 1);
        assert_eq!(back.table_ab.len(), 1);
    }

    #[test]
    fn serialization_is_deterministic() {
        assert_eq!(sample().serialize(), sample().serialize());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(MorphDb::parse("hello").is_err());
        assert!(MorphDb::parse("###BOGUS###\n").is_err());
        assert_eq!(MorphDb::parse(""), Err(DbParseError::MissingHeader));
        // wrong column count inside a section
        let bad = "###HEADER###\n1\t\n###PREFIXES###\nonly-one-column\n";
        assert!(matches!(MorphDb::parse(bad), Err(DbParseError::Malformed(4, _))));
    }
}
