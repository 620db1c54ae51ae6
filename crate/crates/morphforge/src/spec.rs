//! Loading, validating and serializing the editable specification sheets.
//!
//! A spec directory holds five UTF-8 TSV sheets, each with a header row:
//!
//! * `order.tsv`      — LINE_ID, CLASS_SEQUENCE
//! * `morph.tsv`      — CLASS, MORPHEME, FORM, BW_SEG, FEATURES, SET, REQUIRE
//! * `lexicon.tsv`    — LEMMA, FORM, GLOSS, POS, ROOT, PATTERN, RAT, FEATURES, SET, REQUIRE
//! * `conditions.tsv` — LABEL, DESCRIPTION, SCOPE
//! * `rewrite.tsv`    — ID, STAGE, MATCH, REPLACEMENT, BIDIRECTIONAL, INV_MATCH, INV_REPLACEMENT
//!
//! Arabic script is stored as-is. Lines starting with `#` are comments;
//! `rewrite.tsv` additionally allows `#MACRO NAME body` definitions before
//! its header. The literal form token `NONE` spells the nothing allomorph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use crate::conditions::{
    parse_require, parse_set, require_to_sheet, set_to_sheet, ConditionExpr, ConditionLabel,
    Polarity, RawRequire, RawTerm, Scope, Side,
};
use crate::features::{FeatureBundle, Pos};
use crate::morphotax::{
    expand_else, Allomorph, ClassKind, LexemeKey, LexiconEntry, MorphClass, Morpheme, OrderLine,
    Rationality,
};
use crate::rewrite::{expand_macros, RewriteRule, Stage};
use crate::translit::to_hsb;

pub const STEM_CLASS: &str = "[STEM]";
const BUFFER_PREFIX: &str = "[BUFFER";
pub const NONE_FORM: &str = "NONE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SheetFile {
    Order,
    Morph,
    Lexicon,
    Conditions,
    Rewrite,
    Paradigms,
}

impl SheetFile {
    pub fn file_name(&self) -> &'static str {
        match self {
            SheetFile::Order => "order.tsv",
            SheetFile::Morph => "morph.tsv",
            SheetFile::Lexicon => "lexicon.tsv",
            SheetFile::Conditions => "conditions.tsv",
            SheetFile::Rewrite => "rewrite.tsv",
            SheetFile::Paradigms => "paradigms.tsv",
        }
    }
}

/// One finding, anchored to a (file, row) location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecDiagnostic {
    pub severity: Severity,
    pub file: SheetFile,
    pub row: usize,
    pub message: String,
}

impl SpecDiagnostic {
    fn error(file: SheetFile, row: usize, message: String) -> SpecDiagnostic {
        SpecDiagnostic { severity: Severity::Error, file, row, message }
    }

    fn warning(file: SheetFile, row: usize, message: String) -> SpecDiagnostic {
        SpecDiagnostic { severity: Severity::Warning, file, row, message }
    }
}

impl fmt::Display for SpecDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}: {}:{}: {}", self.file.file_name(), self.row, self.message)
    }
}

pub fn has_errors(diags: &[SpecDiagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}

/// Raw sheet texts, the unit the loader consumes (and the fuzzer feeds).
#[derive(Debug, Clone, Default)]
pub struct SpecSheets {
    pub order: String,
    pub morph: String,
    pub lexicon: String,
    pub conditions: String,
    pub rewrite: String,
}

impl SpecSheets {
    pub fn read_dir(dir: &Path) -> io::Result<SpecSheets> {
        Ok(SpecSheets {
            order: fs::read_to_string(dir.join(SheetFile::Order.file_name()))?,
            morph: fs::read_to_string(dir.join(SheetFile::Morph.file_name()))?,
            lexicon: fs::read_to_string(dir.join(SheetFile::Lexicon.file_name()))?,
            conditions: fs::read_to_string(dir.join(SheetFile::Conditions.file_name()))?,
            rewrite: fs::read_to_string(dir.join(SheetFile::Rewrite.file_name()))?,
        })
    }

    pub fn write_dir(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(SheetFile::Order.file_name()), &self.order)?;
        fs::write(dir.join(SheetFile::Morph.file_name()), &self.morph)?;
        fs::write(dir.join(SheetFile::Lexicon.file_name()), &self.lexicon)?;
        fs::write(dir.join(SheetFile::Conditions.file_name()), &self.conditions)?;
        fs::write(dir.join(SheetFile::Rewrite.file_name()), &self.rewrite)?;
        Ok(())
    }
}

/// The fully resolved specification: referentially closed, `else` expanded,
/// lexemes groupable by (lemma, pos). Immutable once built.
#[derive(Debug, Clone)]
pub struct SpecSet {
    pub order_lines: Vec<OrderLine>,
    pub classes: BTreeMap<String, MorphClass>,
    pub lexicon: Vec<LexiconEntry>,
    pub condition_index: BTreeMap<String, ConditionLabel>,
    pub rewrite_macros: Vec<(String, String)>,
    pub rewrite_rules: Vec<RewriteRule>,
}

impl SpecSet {
    /// Stems grouped into lexemes by (lemma, pos).
    pub fn lexemes(&self) -> BTreeMap<LexemeKey, Vec<&LexiconEntry>> {
        let mut map: BTreeMap<LexemeKey, Vec<&LexiconEntry>> = BTreeMap::new();
        for e in &self.lexicon {
            map.entry((e.lemma.clone(), e.pos)).or_default().push(e);
        }
        map
    }

    pub fn side_of_class(&self, class_id: &str) -> Option<Side> {
        if class_id == STEM_CLASS {
            return Some(Side::Stem);
        }
        self.classes.get(class_id).map(|c| match c.kind {
            ClassKind::Proclitic => Side::Prefix,
            ClassKind::Stem | ClassKind::Buffer => Side::Stem,
            ClassKind::Suffix | ClassKind::Enclitic => Side::Suffix,
        })
    }

    /// Which sides actually set each label, per the loaded sheets.
    pub fn label_setter_sides(&self) -> BTreeMap<String, BTreeSet<Side>> {
        let mut map: BTreeMap<String, BTreeSet<Side>> = BTreeMap::new();
        for class in self.classes.values() {
            let side = self.side_of_class(&class.id).unwrap_or(Side::Stem);
            for m in &class.morphemes {
                for a in &m.allomorphs {
                    for l in &a.set_conditions {
                        map.entry(l.clone()).or_default().insert(side);
                    }
                }
            }
        }
        for e in &self.lexicon {
            for l in &e.set_conditions {
                map.entry(l.clone()).or_default().insert(Side::Stem);
            }
        }
        map
    }

    /// Serialize back to sheet text. Loading the result reproduces this
    /// SpecSet (the round-trip fixpoint), with `else` markers already
    /// expanded into explicit negated terms.
    pub fn to_sheets(&self) -> SpecSheets {
        let mut order = String::from("LINE_ID\tCLASS_SEQUENCE\n");
        for l in &self.order_lines {
            order.push_str(&format!("{}\t{}\n", l.id, l.classes.join(" ")));
        }

        let mut morph =
            String::from("CLASS\tMORPHEME\tFORM\tBW_SEG\tFEATURES\tSET\tREQUIRE\n");
        for class in self.classes.values() {
            for m in &class.morphemes {
                for a in &m.allomorphs {
                    let form = if a.form.is_empty() { NONE_FORM.to_string() } else { a.form.clone() };
                    let bw = if a.bw_segment.is_empty() { "-".to_string() } else { a.bw_segment.clone() };
                    morph.push_str(&format!(
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                        class.id,
                        m.id,
                        form,
                        bw,
                        sparse_features(&a.features),
                        set_to_sheet(&a.set_conditions),
                        require_to_sheet(&a.require),
                    ));
                }
            }
        }

        let mut lexicon = String::from(
            "LEMMA\tFORM\tGLOSS\tPOS\tROOT\tPATTERN\tRAT\tFEATURES\tSET\tREQUIRE\n",
        );
        for e in &self.lexicon {
            let mut overrides = e.feature_overrides.clone();
            overrides.pos = None; // POS has its own column
            lexicon.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                e.lemma,
                e.stem_form,
                e.gloss,
                e.pos,
                if e.root.is_empty() { "-" } else { &e.root },
                if e.pattern.is_empty() { "-" } else { &e.pattern },
                e.rationality.as_str(),
                sparse_features(&overrides),
                set_to_sheet(&e.set_conditions),
                require_to_sheet(&e.require),
            ));
        }

        let mut conditions = String::from("LABEL\tDESCRIPTION\tSCOPE\n");
        for c in self.condition_index.values() {
            conditions.push_str(&format!("{}\t{}\t{}\n", c.name, c.description, c.scope));
        }

        let mut rewrite = String::new();
        for (name, body) in &self.rewrite_macros {
            rewrite.push_str(&format!("#MACRO {name} {body}\n"));
        }
        rewrite.push_str("ID\tSTAGE\tMATCH\tREPLACEMENT\tBIDIRECTIONAL\tINV_MATCH\tINV_REPLACEMENT\n");
        for r in &self.rewrite_rules {
            rewrite.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                r.id,
                r.stage.as_str(),
                r.match_src,
                r.replacement,
                r.bidirectional,
                if r.inv_match_src.is_empty() { "-" } else { &r.inv_match_src },
                if r.inv_replacement_src.is_empty() { "-" } else { &r.inv_replacement_src },
            ));
        }

        SpecSheets { order, morph, lexicon, conditions, rewrite }
    }
}

fn sparse_features(fb: &FeatureBundle) -> String {
    let mut parts: Vec<String> = Vec::new();
    if let Some(p) = fb.pos {
        parts.push(format!("pos:{p}"));
    }
    if fb.gender.is_set() {
        parts.push(format!("gen:{}", fb.gender));
    }
    if fb.number.is_set() {
        parts.push(format!("num:{}", fb.number));
    }
    if fb.case.is_set() {
        parts.push(format!("cas:{}", fb.case));
    }
    if fb.state.is_set() {
        parts.push(format!("stt:{}", fb.state));
    }
    if fb.form_gender.is_set() {
        parts.push(format!("fgen:{}", fb.form_gender));
    }
    if fb.form_number.is_set() {
        parts.push(format!("fnum:{}", fb.form_number));
    }
    for (k, v) in [
        ("prc0", &fb.prc0),
        ("prc1", &fb.prc1),
        ("prc2", &fb.prc2),
        ("prc3", &fb.prc3),
        ("enc0", &fb.enc0),
    ] {
        if let Some(v) = v {
            parts.push(format!("{k}:{v}"));
        }
    }
    if parts.is_empty() {
        "-".to_string()
    } else {
        parts.join(" ")
    }
}

/// Rows of one sheet with their 1-based physical line numbers, header and
/// comments removed. Comment lines start with `##` (a single `#` would
/// collide with condition labels like `#A'`); `#MACRO` lines belong to the
/// rewrite sheet's macro block and are consumed separately.
fn rows(text: &str, diags: &mut Vec<SpecDiagnostic>, file: SheetFile) -> Vec<(usize, Vec<String>)> {
    let mut out = Vec::new();
    let mut seen_header = false;
    for (i, line) in text.lines().enumerate() {
        let row = i + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with("##") || line.starts_with("#MACRO ") {
            continue;
        }
        if !seen_header {
            seen_header = true; // header row carries column names only
            continue;
        }
        out.push((row, line.split('\t').map(|c| c.trim().to_string()).collect()));
    }
    if !seen_header && !text.trim().is_empty() {
        diags.push(SpecDiagnostic::error(file, 1, "missing header row".into()));
    }
    out
}

fn need<'a>(
    cells: &'a [String],
    idx: usize,
    what: &str,
    file: SheetFile,
    row: usize,
    diags: &mut Vec<SpecDiagnostic>,
) -> Option<&'a str> {
    match cells.get(idx) {
        Some(c) => Some(c.as_str()),
        None => {
            diags.push(SpecDiagnostic::error(
                file,
                row,
                format!("malformed row: missing {what} column"),
            ));
            None
        }
    }
}

fn opt(cells: &[String], idx: usize) -> &str {
    cells.get(idx).map(|s| s.as_str()).unwrap_or("")
}

/// Load and resolve a spec from sheet texts. All problems are collected;
/// any error blocks the result.
pub fn load_from_sheets(sheets: &SpecSheets) -> Result<SpecSet, Vec<SpecDiagnostic>> {
    let mut diags: Vec<SpecDiagnostic> = Vec::new();

    // conditions first: everything else references the index
    let mut condition_index: BTreeMap<String, ConditionLabel> = BTreeMap::new();
    for (row, cells) in rows(&sheets.conditions, &mut diags, SheetFile::Conditions) {
        let Some(label) = need(&cells, 0, "LABEL", SheetFile::Conditions, row, &mut diags) else {
            continue;
        };
        let description = opt(&cells, 1).to_string();
        let scope_str = opt(&cells, 2);
        let Some(scope) = Scope::parse(scope_str) else {
            diags.push(SpecDiagnostic::error(
                SheetFile::Conditions,
                row,
                format!("unknown scope `{scope_str}`"),
            ));
            continue;
        };
        if condition_index.contains_key(label) {
            diags.push(SpecDiagnostic::error(
                SheetFile::Conditions,
                row,
                format!("duplicate condition label `{label}`"),
            ));
            continue;
        }
        condition_index.insert(
            label.to_string(),
            ConditionLabel { name: label.to_string(), description, scope },
        );
    }

    let check_labels = |labels: &BTreeSet<String>,
                        file: SheetFile,
                        row: usize,
                        index: &BTreeMap<String, ConditionLabel>,
                        diags: &mut Vec<SpecDiagnostic>| {
        for l in labels {
            if !index.contains_key(l) {
                diags.push(SpecDiagnostic::error(
                    file,
                    row,
                    format!("unknown condition label `{l}`"),
                ));
            }
        }
    };

    // morph.tsv
    struct RawAllomorphRow {
        row: usize,
        class: String,
        morpheme: String,
        form: String,
        bw: String,
        features: FeatureBundle,
        set: BTreeSet<String>,
        require: RawRequire,
    }
    let mut morph_rows: Vec<RawAllomorphRow> = Vec::new();
    for (row, cells) in rows(&sheets.morph, &mut diags, SheetFile::Morph) {
        let (Some(class), Some(morpheme), Some(form)) = (
            need(&cells, 0, "CLASS", SheetFile::Morph, row, &mut diags),
            need(&cells, 1, "MORPHEME", SheetFile::Morph, row, &mut diags),
            need(&cells, 2, "FORM", SheetFile::Morph, row, &mut diags),
        ) else {
            continue;
        };
        let form = if form == NONE_FORM { String::new() } else { form.to_string() };
        let bw_raw = opt(&cells, 3);
        let bw = if bw_raw == "-" { String::new() } else { bw_raw.to_string() };
        let features = match FeatureBundle::parse(opt(&cells, 4)) {
            Ok(f) => f,
            Err(e) => {
                diags.push(SpecDiagnostic::error(SheetFile::Morph, row, e.to_string()));
                continue;
            }
        };
        let set = parse_set(opt(&cells, 5));
        check_labels(&set, SheetFile::Morph, row, &condition_index, &mut diags);
        let require = match parse_require(opt(&cells, 6)) {
            Ok(r) => r,
            Err(e) => {
                diags.push(SpecDiagnostic::error(SheetFile::Morph, row, e.to_string()));
                continue;
            }
        };
        for t in &require.terms {
            if let RawTerm::Term(term) = t {
                check_labels(&term.labels, SheetFile::Morph, row, &condition_index, &mut diags);
            }
        }
        // the BW fragment must tile the surface form exactly
        if form.is_empty() {
            if !bw.is_empty() {
                diags.push(SpecDiagnostic::error(
                    SheetFile::Morph,
                    row,
                    "NONE allomorph must have an empty BW_SEG".into(),
                ));
            }
        } else {
            let tiled: String = bw
                .split('+')
                .map(|piece| piece.rsplit_once('/').map(|(f, _)| f).unwrap_or(piece))
                .collect();
            if tiled != to_hsb(&form) {
                diags.push(SpecDiagnostic::error(
                    SheetFile::Morph,
                    row,
                    format!(
                        "BW_SEG forms `{tiled}` do not tile the surface form `{}`",
                        to_hsb(&form)
                    ),
                ));
            }
        }
        morph_rows.push(RawAllomorphRow {
            row,
            class: class.to_string(),
            morpheme: morpheme.to_string(),
            form,
            bw,
            features,
            set,
            require,
        });
    }

    // group rows into morphemes and classes, preserving first-seen order
    let mut class_order: Vec<String> = Vec::new();
    let mut morphemes_of: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut rows_of: BTreeMap<(String, String), Vec<RawAllomorphRow>> = BTreeMap::new();
    for r in morph_rows {
        if !class_order.contains(&r.class) {
            class_order.push(r.class.clone());
        }
        let morphs = morphemes_of.entry(r.class.clone()).or_default();
        if !morphs.contains(&r.morpheme) {
            morphs.push(r.morpheme.clone());
        }
        rows_of
            .entry((r.class.clone(), r.morpheme.clone()))
            .or_default()
            .push(r);
    }

    // order.tsv (classes must exist before kinds can be assigned)
    let mut order_lines: Vec<OrderLine> = Vec::new();
    for (row, cells) in rows(&sheets.order, &mut diags, SheetFile::Order) {
        let (Some(id), Some(seq)) = (
            need(&cells, 0, "LINE_ID", SheetFile::Order, row, &mut diags),
            need(&cells, 1, "CLASS_SEQUENCE", SheetFile::Order, row, &mut diags),
        ) else {
            continue;
        };
        let classes: Vec<String> = seq.split_whitespace().map(str::to_string).collect();
        let stem_positions: Vec<usize> = classes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.as_str() == STEM_CLASS)
            .map(|(i, _)| i)
            .collect();
        if stem_positions.len() != 1 {
            diags.push(SpecDiagnostic::error(
                SheetFile::Order,
                row,
                format!("order line must contain exactly one {STEM_CLASS}"),
            ));
            continue;
        }
        let stem_at = stem_positions[0];
        let mut prefix_part = Vec::new();
        let mut stem_part = vec![STEM_CLASS.to_string()];
        let mut suffix_part = Vec::new();
        let mut bad = false;
        for (i, c) in classes.iter().enumerate() {
            if i == stem_at {
                continue;
            }
            let is_buffer = c.starts_with(BUFFER_PREFIX);
            if i < stem_at {
                if is_buffer {
                    diags.push(SpecDiagnostic::error(
                        SheetFile::Order,
                        row,
                        format!("buffer class `{c}` must immediately follow {STEM_CLASS}"),
                    ));
                    bad = true;
                }
                prefix_part.push(c.clone());
            } else if is_buffer {
                if stem_part.len() + prefix_part.len() != i {
                    // a non-buffer class intervened between stem and buffer
                    diags.push(SpecDiagnostic::error(
                        SheetFile::Order,
                        row,
                        format!("buffer class `{c}` must immediately follow {STEM_CLASS}"),
                    ));
                    bad = true;
                }
                stem_part.push(c.clone());
            } else {
                suffix_part.push(c.clone());
            }
            if c != STEM_CLASS && !morphemes_of.contains_key(c) {
                diags.push(SpecDiagnostic::error(
                    SheetFile::Order,
                    row,
                    format!("order line names nonexistent class `{c}`"),
                ));
                bad = true;
            }
        }
        if bad {
            continue;
        }
        order_lines.push(OrderLine {
            id: id.to_string(),
            classes,
            prefix_part,
            stem_part,
            suffix_part,
            row,
        });
    }

    // assign class kinds from order positions
    let mut kinds: BTreeMap<String, ClassKind> = BTreeMap::new();
    let mut note_kind = |id: &str, kind: ClassKind, row: usize, diags: &mut Vec<SpecDiagnostic>| {
        if let Some(prev) = kinds.get(id) {
            if *prev != kind {
                diags.push(SpecDiagnostic::error(
                    SheetFile::Order,
                    row,
                    format!("class `{id}` used on different sides across order lines"),
                ));
            }
        } else {
            kinds.insert(id.to_string(), kind);
        }
    };
    for line in &order_lines {
        for c in &line.prefix_part {
            note_kind(c, ClassKind::Proclitic, line.row, &mut diags);
        }
        for c in line.stem_part.iter().skip(1) {
            note_kind(c, ClassKind::Buffer, line.row, &mut diags);
        }
        for c in &line.suffix_part {
            // enclitic iff every concrete allomorph of the class fills enc0
            let all_enc = morphemes_of
                .get(c)
                .map(|ms| {
                    ms.iter()
                        .flat_map(|m| &rows_of[&(c.clone(), m.clone())])
                        .filter(|r| !r.form.is_empty())
                        .all(|r| r.features.enc0.is_some())
                })
                .unwrap_or(false);
            let kind = if all_enc { ClassKind::Enclitic } else { ClassKind::Suffix };
            note_kind(c, kind, line.row, &mut diags);
        }
    }

    // build classes with else expansion
    let mut classes: BTreeMap<String, MorphClass> = BTreeMap::new();
    for class_id in &class_order {
        let kind = kinds.get(class_id).copied().unwrap_or(ClassKind::Suffix);
        let mut morphemes = Vec::new();
        for mid in &morphemes_of[class_id] {
            let rows = &rows_of[&(class_id.clone(), mid.clone())];
            let raw_requires: Vec<RawRequire> = rows.iter().map(|r| r.require.clone()).collect();
            let expanded = match expand_else(mid, &raw_requires) {
                Ok(e) => e,
                Err(e) => {
                    diags.push(SpecDiagnostic::error(
                        SheetFile::Morph,
                        rows[0].row,
                        e.to_string(),
                    ));
                    continue;
                }
            };
            let allomorphs = rows
                .iter()
                .zip(expanded)
                .map(|(r, require)| Allomorph {
                    morpheme_id: mid.clone(),
                    class_id: class_id.clone(),
                    form: r.form.clone(),
                    features: r.features.clone(),
                    set_conditions: r.set.clone(),
                    require,
                    bw_segment: r.bw.clone(),
                    row: r.row,
                })
                .collect();
            morphemes.push(Morpheme { id: mid.clone(), class_id: class_id.clone(), allomorphs });
        }
        classes.insert(
            class_id.clone(),
            MorphClass { id: class_id.clone(), kind, morphemes },
        );
    }

    // lexicon.tsv
    let mut lexicon: Vec<LexiconEntry> = Vec::new();
    let mut seen_stems: BTreeSet<String> = BTreeSet::new();
    for (row, cells) in rows(&sheets.lexicon, &mut diags, SheetFile::Lexicon) {
        let (Some(lemma), Some(form), Some(pos_str)) = (
            need(&cells, 0, "LEMMA", SheetFile::Lexicon, row, &mut diags),
            need(&cells, 1, "FORM", SheetFile::Lexicon, row, &mut diags),
            need(&cells, 3, "POS", SheetFile::Lexicon, row, &mut diags),
        ) else {
            continue;
        };
        let Some(pos) = Pos::parse(pos_str) else {
            diags.push(SpecDiagnostic::error(
                SheetFile::Lexicon,
                row,
                format!("unknown POS `{pos_str}`"),
            ));
            continue;
        };
        let gloss = opt(&cells, 2).to_string();
        let root = dash_empty(opt(&cells, 4));
        let pattern = dash_empty(opt(&cells, 5));
        let rat_str = opt(&cells, 6);
        let Some(rationality) = Rationality::parse(rat_str) else {
            diags.push(SpecDiagnostic::error(
                SheetFile::Lexicon,
                row,
                format!("unknown rationality `{rat_str}`"),
            ));
            continue;
        };
        let mut feature_overrides = match FeatureBundle::parse(opt(&cells, 7)) {
            Ok(f) => f,
            Err(e) => {
                diags.push(SpecDiagnostic::error(SheetFile::Lexicon, row, e.to_string()));
                continue;
            }
        };
        feature_overrides.pos = Some(pos);
        let set_conditions = parse_set(opt(&cells, 8));
        check_labels(&set_conditions, SheetFile::Lexicon, row, &condition_index, &mut diags);
        let raw_require = match parse_require(opt(&cells, 9)) {
            Ok(r) => r,
            Err(e) => {
                diags.push(SpecDiagnostic::error(SheetFile::Lexicon, row, e.to_string()));
                continue;
            }
        };
        if raw_require.has_else() {
            diags.push(SpecDiagnostic::error(
                SheetFile::Lexicon,
                row,
                "`else` is not allowed in lexicon require expressions".into(),
            ));
            continue;
        }
        let mut terms = Vec::new();
        for t in &raw_require.terms {
            if let RawTerm::Term(term) = t {
                check_labels(&term.labels, SheetFile::Lexicon, row, &condition_index, &mut diags);
                terms.push(term.clone());
            }
        }
        let require = ConditionExpr::new(terms);
        let dup_key = format!(
            "{lemma}\u{1}{pos}\u{1}{form}\u{1}{}\u{1}{}",
            set_to_sheet(&set_conditions),
            require_to_sheet(&require)
        );
        if !seen_stems.insert(dup_key) {
            diags.push(SpecDiagnostic::error(
                SheetFile::Lexicon,
                row,
                format!("duplicate (lemma, stem form, conditions) entry for `{lemma}`"),
            ));
            continue;
        }
        lexicon.push(LexiconEntry {
            lemma: lemma.to_string(),
            stem_form: form.to_string(),
            gloss,
            pos,
            root,
            pattern,
            rationality,
            feature_overrides,
            set_conditions,
            require,
            row,
        });
    }

    // rewrite.tsv: macro lines first, then rows
    let mut rewrite_macros: Vec<(String, String)> = Vec::new();
    for line in sheets.rewrite.lines() {
        if let Some(rest) = line.strip_prefix("#MACRO ") {
            if let Some((name, body)) = rest.split_once(' ') {
                rewrite_macros.push((name.trim().to_string(), body.trim().to_string()));
            }
        }
    }
    let mut rewrite_rules: Vec<RewriteRule> = Vec::new();
    for (row, cells) in rows(&sheets.rewrite, &mut diags, SheetFile::Rewrite) {
        let (Some(id), Some(stage_str), Some(m)) = (
            need(&cells, 0, "ID", SheetFile::Rewrite, row, &mut diags),
            need(&cells, 1, "STAGE", SheetFile::Rewrite, row, &mut diags),
            need(&cells, 2, "MATCH", SheetFile::Rewrite, row, &mut diags),
        ) else {
            continue;
        };
        let Some(stage) = Stage::parse(stage_str) else {
            diags.push(SpecDiagnostic::error(
                SheetFile::Rewrite,
                row,
                format!("unknown stage `{stage_str}`"),
            ));
            continue;
        };
        let replacement = opt(&cells, 3);
        let bidirectional = match opt(&cells, 4) {
            "true" => true,
            "false" | "" => false,
            other => {
                diags.push(SpecDiagnostic::error(
                    SheetFile::Rewrite,
                    row,
                    format!("BIDIRECTIONAL must be true or false, got `{other}`"),
                ));
                continue;
            }
        };
        let inv_match = dash_empty(opt(&cells, 5));
        let inv_repl = dash_empty(opt(&cells, 6));
        match RewriteRule::new(
            id,
            stage,
            &expand_macros(m, &rewrite_macros),
            replacement,
            bidirectional,
            &expand_macros(&inv_match, &rewrite_macros),
            &inv_repl,
        ) {
            Ok(mut rule) => {
                // keep the un-expanded sources for round-trip serialization
                rule.match_src = m.to_string();
                rule.inv_match_src = inv_match;
                rewrite_rules.push(rule);
            }
            Err(e) => {
                diags.push(SpecDiagnostic::error(SheetFile::Rewrite, row, e.to_string()));
            }
        }
    }

    if has_errors(&diags) {
        return Err(diags);
    }
    Ok(SpecSet {
        order_lines,
        classes,
        lexicon,
        condition_index,
        rewrite_macros,
        rewrite_rules,
    })
}

fn dash_empty(s: &str) -> String {
    if s == "-" {
        String::new()
    } else {
        s.to_string()
    }
}

/// Load a spec directory.
pub fn load_specs(dir: &Path) -> Result<SpecSet, SpecError> {
    let sheets = SpecSheets::read_dir(dir).map_err(SpecError::Io)?;
    load_from_sheets(&sheets).map_err(SpecError::Diagnostics)
}

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("cannot read spec sheets: {0}")]
    Io(io::Error),
    #[error("{} spec error(s)", .0.iter().filter(|d| d.severity == Severity::Error).count())]
    Diagnostics(Vec<SpecDiagnostic>),
}

/// Consistency and hygiene reporting over a loaded spec. Errors block
/// compilation; warnings do not.
pub fn validate_specs(specs: &SpecSet) -> Vec<SpecDiagnostic> {
    let mut diags = Vec::new();
    let setter_sides = specs.label_setter_sides();
    let mut required_labels: BTreeSet<String> = BTreeSet::new();

    // reachability: classes never named in any order line
    let used_classes: BTreeSet<&String> =
        specs.order_lines.iter().flat_map(|l| l.classes.iter()).collect();
    for class in specs.classes.values() {
        if !used_classes.contains(&class.id) {
            for m in &class.morphemes {
                diags.push(SpecDiagnostic::warning(
                    SheetFile::Morph,
                    m.allomorphs.first().map(|a| a.row).unwrap_or(0),
                    format!("morpheme `{}` unreachable: class `{}` appears in no order line", m.id, class.id),
                ));
            }
        }
    }

    // per-requirement checks
    let mut check_require = |side: Side,
                             expr: &ConditionExpr,
                             file: SheetFile,
                             row: usize,
                             who: &str,
                             diags: &mut Vec<SpecDiagnostic>| {
        for term in &expr.terms {
            required_labels.extend(term.labels.iter().cloned());
            for l in &term.labels {
                if let Some(info) = specs.condition_index.get(l) {
                    if !info.scope.allows(side) {
                        diags.push(SpecDiagnostic::error(
                            file,
                            row,
                            format!(
                                "{who} on the {side} side requires `{l}` whose scope is {}",
                                info.scope
                            ),
                        ));
                    }
                }
            }
            match term.polarity {
                Polarity::Positive => {
                    let settable = term
                        .labels
                        .iter()
                        .any(|l| setter_sides.get(l).is_some_and(|s| !s.is_empty()));
                    if !settable {
                        diags.push(SpecDiagnostic::error(
                            file,
                            row,
                            format!("dead requirement: no allomorph sets any of `{term}` ({who})"),
                        ));
                    } else {
                        for l in &term.labels {
                            if !setter_sides.contains_key(l) {
                                diags.push(SpecDiagnostic::warning(
                                    file,
                                    row,
                                    format!("label `{l}` in `{term}` is never set ({who})"),
                                ));
                            }
                        }
                    }
                    // pairwise expressibility: at most one foreign side may
                    // have to discharge this term
                    let mut foreign: BTreeSet<Side> = BTreeSet::new();
                    for l in &term.labels {
                        if let Some(sides) = setter_sides.get(l) {
                            foreign.extend(sides.iter().filter(|s| **s != side));
                        }
                    }
                    if foreign.len() > 1 {
                        diags.push(SpecDiagnostic::error(
                            file,
                            row,
                            format!(
                                "term `{term}` required by {who} spans setters on {} sides; \
                                 not expressible in a single pairwise table",
                                foreign.len()
                            ),
                        ));
                    }
                }
                Polarity::Negated => {} // negations split per table; always expressible
            }
        }
    };

    for class in specs.classes.values() {
        let side = specs.side_of_class(&class.id).unwrap_or(Side::Stem);
        for m in &class.morphemes {
            for a in &m.allomorphs {
                check_require(
                    side,
                    &a.require,
                    SheetFile::Morph,
                    a.row,
                    &format!("allomorph of `{}`", m.id),
                    &mut diags,
                );
                for l in &a.set_conditions {
                    if let Some(info) = specs.condition_index.get(l) {
                        if !info.scope.allows(side) {
                            diags.push(SpecDiagnostic::error(
                                SheetFile::Morph,
                                a.row,
                                format!(
                                    "allomorph of `{}` on the {side} side sets `{l}` whose scope is {}",
                                    m.id, info.scope
                                ),
                            ));
                        }
                    }
                }
                // proclitics are assumed never to carry functional features
                if class.kind == ClassKind::Proclitic
                    && (a.features.gender.is_set()
                        || a.features.number.is_set()
                        || a.features.case.is_set()
                        || a.features.state.is_set())
                {
                    diags.push(SpecDiagnostic::warning(
                        SheetFile::Morph,
                        a.row,
                        format!("proclitic `{}` carries functional features", m.id),
                    ));
                }
            }
        }
    }
    for e in &specs.lexicon {
        check_require(
            Side::Stem,
            &e.require,
            SheetFile::Lexicon,
            e.row,
            &format!("stem `{}`", to_hsb(&e.stem_form)),
            &mut diags,
        );
        for l in &e.set_conditions {
            if let Some(info) = specs.condition_index.get(l) {
                if !info.scope.allows(Side::Stem) {
                    diags.push(SpecDiagnostic::error(
                        SheetFile::Lexicon,
                        e.row,
                        format!("stem sets `{l}` whose scope is {}", info.scope),
                    ));
                }
            }
        }
    }

    // set-but-never-required, and index entries never used at all
    for (label, info) in &specs.condition_index {
        let set = setter_sides.contains_key(label);
        let required = required_labels.contains(label);
        if set && !required {
            diags.push(SpecDiagnostic::warning(
                SheetFile::Conditions,
                0,
                format!("label `{label}` is set but never required"),
            ));
        }
        if !set && !required {
            diags.push(SpecDiagnostic::warning(
                SheetFile::Conditions,
                0,
                format!("label `{label}` ({}) is unused", info.description),
            ));
        }
    }

    diags
}
