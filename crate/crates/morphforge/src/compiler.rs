//! The offline compiler: enumerate condition-coherent allomorph sequences
//! per order line, discharge requirements that resolve inside one side,
//! fold the rest into category labels, and emit the six-table database.
//!
//! Every require term has a single scope, so the conjunction of all
//! requirements factorizes exactly into side-internal checks plus the three
//! pairwise tables. Soundness and completeness of the decomposition are
//! checked against a brute-force oracle in the acceptance suite.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::conditions::{Polarity, Side, Term};
use crate::db::{ComplexMorph, MorphDb};
use crate::features::{FeatureBundle, MergeError};
use crate::morphotax::LexiconEntry;
use crate::spec::{has_errors, validate_specs, SpecDiagnostic, SpecSet, STEM_CLASS};
use crate::translit::{dediacritize, to_hsb};

/// One allomorph-sized unit of a side under construction.
#[derive(Debug, Clone)]
struct Piece {
    form: String,
    features: FeatureBundle,
    set: BTreeSet<String>,
    require: Vec<Term>,
    bw: String,
    lemma: String,
    gloss: String,
    root: String,
    pattern: String,
}

impl Piece {
    fn from_stem(e: &LexiconEntry) -> Piece {
        Piece {
            form: e.stem_form.clone(),
            features: e.feature_overrides.clone(),
            set: e.set_conditions.clone(),
            require: e.require.terms.clone(),
            bw: format!("{}/{}", to_hsb(&e.stem_form), e.pos.bw_tag()),
            lemma: e.lemma.clone(),
            gloss: e.gloss.clone(),
            root: e.root.clone(),
            pattern: e.pattern.clone(),
        }
    }
}

/// A complex morph before category assignment: exports plus per-table
/// residual requirements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Signature {
    exports: BTreeSet<String>,
    residual_near: Vec<Term>,
    residual_far: Vec<Term>,
}

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("spec validation reported errors:\n{}", format_diags(.0))]
    ValidationFailed(Vec<SpecDiagnostic>),
    #[error("pairwise-expressibility failure: term `{term}` required on the {side} side has setters on more than one other side")]
    PairwiseExpressibility { term: String, side: Side },
    #[error("clitic slot collision while merging a complex morph: {0}")]
    CliticCollision(MergeError),
}

fn format_diags(diags: &[SpecDiagnostic]) -> String {
    diags.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n")
}

/// The two foreign sides of a given side, in (near, far) category order:
/// prefix -> (stem, suffix); stem -> (prefix, suffix); suffix -> (stem, prefix).
/// "near" and "far" match the table naming: AB pairs prefix/stem, BC pairs
/// stem/suffix, AC pairs prefix/suffix.
fn foreign_sides(side: Side) -> (Side, Side) {
    match side {
        Side::Prefix => (Side::Stem, Side::Suffix),
        Side::Stem => (Side::Prefix, Side::Suffix),
        Side::Suffix => (Side::Stem, Side::Prefix),
    }
}

/// Deterministic category token: the condition signature spelled out.
/// Equal signatures yield equal categories by construction, distinct
/// signatures distinct categories.
pub fn assign_category(
    side: Side,
    exports: &BTreeSet<String>,
    residual_near: &[Term],
    residual_far: &[Term],
) -> String {
    let terms = |ts: &[Term]| -> String {
        let mut v: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
        v.sort();
        v.dedup();
        v.join(";")
    };
    let x = exports.iter().cloned().collect::<Vec<_>>().join(",");
    let (near, far) = match side {
        Side::Prefix => ("ab", "ac"),
        Side::Stem => ("ab", "bc"),
        Side::Suffix => ("bc", "ac"),
    };
    // stem-side near table is AB (vs prefix), far is BC (vs suffix); for the
    // prefix side near is AB (vs stem), far AC (vs suffix); for the suffix
    // side near is BC (vs stem), far AC (vs prefix).
    format!(
        "{}|x={}|{}={}|{}={}",
        side.letter(),
        x,
        near,
        terms(residual_near),
        far,
        terms(residual_far)
    )
}

struct SideBuilder<'a> {
    specs: &'a SpecSet,
    setter_sides: BTreeMap<String, BTreeSet<Side>>,
    exportable: BTreeSet<String>,
}

impl<'a> SideBuilder<'a> {
    fn new(specs: &'a SpecSet) -> SideBuilder<'a> {
        let setter_sides = specs.label_setter_sides();
        let exportable = specs
            .condition_index
            .values()
            .filter(|c| c.scope.sides().len() == 2)
            .map(|c| c.name.clone())
            .collect();
        SideBuilder { specs, setter_sides, exportable }
    }

    /// Discharge what this side can and classify the rest. Returns `None`
    /// when the combination is internally contradictory.
    fn resolve(
        &self,
        side: Side,
        pieces: &[Piece],
    ) -> Result<Option<Signature>, CompileError> {
        let side_sets: BTreeSet<String> =
            pieces.iter().flat_map(|p| p.set.iter().cloned()).collect();
        let (near_side, far_side) = foreign_sides(side);
        let mut residual_near: Vec<Term> = Vec::new();
        let mut residual_far: Vec<Term> = Vec::new();

        for piece in pieces {
            for term in &piece.require {
                match term.polarity {
                    Polarity::Positive => {
                        if term.labels.iter().any(|l| side_sets.contains(l)) {
                            continue; // satisfied inside this side
                        }
                        let mut foreign: BTreeSet<Side> = BTreeSet::new();
                        for l in &term.labels {
                            if let Some(sides) = self.setter_sides.get(l) {
                                foreign.extend(sides.iter().filter(|s| **s != side));
                            }
                        }
                        match foreign.len() {
                            0 => return Ok(None), // nothing can ever satisfy it
                            1 => {
                                let target = *foreign.iter().next().unwrap();
                                if target == near_side {
                                    residual_near.push(term.clone());
                                } else {
                                    residual_far.push(term.clone());
                                }
                            }
                            _ => {
                                return Err(CompileError::PairwiseExpressibility {
                                    term: term.to_string(),
                                    side,
                                })
                            }
                        }
                    }
                    Polarity::Negated => {
                        // a negated disjunction splits exactly: every label
                        // must be absent on its own setter side(s)
                        let mut near_labels: BTreeSet<String> = BTreeSet::new();
                        let mut far_labels: BTreeSet<String> = BTreeSet::new();
                        for l in &term.labels {
                            let Some(sides) = self.setter_sides.get(l) else {
                                continue; // set nowhere: trivially absent
                            };
                            if sides.contains(&side) && side_sets.contains(l) {
                                return Ok(None); // violated internally
                            }
                            if sides.contains(&near_side) {
                                near_labels.insert(l.clone());
                            }
                            if sides.contains(&far_side) {
                                far_labels.insert(l.clone());
                            }
                        }
                        if !near_labels.is_empty() {
                            residual_near.push(Term::negated(near_labels));
                        }
                        if !far_labels.is_empty() {
                            residual_far.push(Term::negated(far_labels));
                        }
                    }
                }
            }
        }

        let exports: BTreeSet<String> = side_sets
            .intersection(&self.exportable)
            .cloned()
            .collect();
        residual_near.sort();
        residual_near.dedup();
        residual_far.sort();
        residual_far.dedup();
        Ok(Some(Signature { exports, residual_near, residual_far }))
    }

    fn class_pieces(&self, class_id: &str) -> Vec<Piece> {
        let mut out = Vec::new();
        if let Some(class) = self.specs.classes.get(class_id) {
            for m in &class.morphemes {
                for a in &m.allomorphs {
                    out.push(Piece {
                        form: a.form.clone(),
                        features: a.features.clone(),
                        set: a.set_conditions.clone(),
                        require: a.require.terms.clone(),
                        bw: a.bw_segment.clone(),
                        lemma: String::new(),
                        gloss: String::new(),
                        root: String::new(),
                        pattern: String::new(),
                    });
                }
            }
        }
        out
    }
}

fn product(options: &[Vec<Piece>]) -> Vec<Vec<Piece>> {
    let mut combos: Vec<Vec<Piece>> = vec![Vec::new()];
    for opts in options {
        let mut next = Vec::with_capacity(combos.len() * opts.len().max(1));
        for combo in &combos {
            for o in opts {
                let mut c = combo.clone();
                c.push(o.clone());
                next.push(c);
            }
        }
        combos = next;
    }
    combos
}

fn merge_complex(side: Side, pieces: &[Piece]) -> Result<ComplexMorph, CompileError> {
    let mut features = FeatureBundle::default();
    let mut first = true;
    for p in pieces {
        if first {
            features = p.features.clone();
            first = false;
            continue;
        }
        features.pos = features.pos.or(p.features.pos);
        features.gender = features.gender.or(p.features.gender);
        features.number = features.number.or(p.features.number);
        features.case = features.case.or(p.features.case);
        features.state = features.state.or(p.features.state);
        features.form_gender = features.form_gender.or(p.features.form_gender);
        features.form_number = features.form_number.or(p.features.form_number);
        for (slot, incoming, name) in [
            (&mut features.prc0, &p.features.prc0, "prc0"),
            (&mut features.prc1, &p.features.prc1, "prc1"),
            (&mut features.prc2, &p.features.prc2, "prc2"),
            (&mut features.prc3, &p.features.prc3, "prc3"),
            (&mut features.enc0, &p.features.enc0, "enc0"),
        ] {
            if let Some(v) = incoming {
                if slot.is_some() {
                    return Err(CompileError::CliticCollision(
                        MergeError::DuplicateCliticSlot(match name {
                            "prc0" => "prc0",
                            "prc1" => "prc1",
                            "prc2" => "prc2",
                            "prc3" => "prc3",
                            _ => "enc0",
                        }),
                    ));
                }
                *slot = Some(v.clone());
            }
        }
    }
    let surface_diac: String = pieces.iter().map(|p| p.form.as_str()).collect();
    let bw_fragment = pieces
        .iter()
        .map(|p| p.bw.as_str())
        .filter(|b| !b.is_empty())
        .collect::<Vec<_>>()
        .join("+");
    let stem_piece = pieces.iter().find(|p| !p.lemma.is_empty());
    Ok(ComplexMorph {
        side,
        surface_key: dediacritize(&surface_diac),
        surface_diac,
        category: String::new(),
        bw_fragment,
        features,
        lemma: stem_piece.map(|p| p.lemma.clone()).unwrap_or_default(),
        gloss: stem_piece.map(|p| p.gloss.clone()).unwrap_or_default(),
        root: stem_piece.map(|p| p.root.clone()).unwrap_or_default(),
        pattern: stem_piece.map(|p| p.pattern.clone()).unwrap_or_default(),
    })
}

/// Compile a validated spec into the six-table database.
pub fn compile(specs: &SpecSet) -> Result<MorphDb, CompileError> {
    let diags = validate_specs(specs);
    if has_errors(&diags) {
        return Err(CompileError::ValidationFailed(
            diags.into_iter().filter(|d| d.severity == crate::spec::Severity::Error).collect(),
        ));
    }

    let builder = SideBuilder::new(specs);
    // category -> signature, and per-side deduplicated entries
    let mut signatures: BTreeMap<String, Signature> = BTreeMap::new();
    let mut entries: BTreeMap<String, ComplexMorph> = BTreeMap::new();

    let mut emit = |side: Side,
                    pieces: &[Piece],
                    builder: &SideBuilder|
     -> Result<(), CompileError> {
        let Some(sig) = builder.resolve(side, pieces)? else {
            return Ok(());
        };
        let mut cm = merge_complex(side, pieces)?;
        cm.category = assign_category(side, &sig.exports, &sig.residual_near, &sig.residual_far);
        signatures.insert(cm.category.clone(), sig);
        entries.entry(cm.row_key()).or_insert(cm);
        Ok(())
    };

    for line in &specs.order_lines {
        let prefix_options: Vec<Vec<Piece>> = line
            .prefix_part
            .iter()
            .map(|c| builder.class_pieces(c))
            .collect();
        let buffer_options: Vec<Vec<Piece>> = line
            .stem_part
            .iter()
            .filter(|c| c.as_str() != STEM_CLASS)
            .map(|c| builder.class_pieces(c))
            .collect();
        let suffix_options: Vec<Vec<Piece>> = line
            .suffix_part
            .iter()
            .map(|c| builder.class_pieces(c))
            .collect();

        for combo in product(&prefix_options) {
            emit(Side::Prefix, &combo, &builder)?;
        }
        for stem in &specs.lexicon {
            let stem_piece = Piece::from_stem(stem);
            for tail in product(&buffer_options) {
                let mut pieces = vec![stem_piece.clone()];
                pieces.extend(tail);
                emit(Side::Stem, &pieces, &builder)?;
            }
        }
        for combo in product(&suffix_options) {
            emit(Side::Suffix, &combo, &builder)?;
        }
    }

    let mut db = MorphDb::default();
    for cm in entries.into_values() {
        let map = match cm.side {
            Side::Prefix => &mut db.prefixes,
            Side::Stem => &mut db.stems,
            Side::Suffix => &mut db.suffixes,
        };
        map.entry(cm.surface_key.clone()).or_default().push(cm);
    }

    // pairwise tables over categories
    let cats = |side: Side| -> Vec<(&str, &Signature)> {
        let mut v: Vec<(&str, &Signature)> = signatures
            .iter()
            .filter(|(c, _)| c.starts_with(side.letter()))
            .map(|(c, s)| (c.as_str(), s))
            .collect();
        v.sort();
        v.dedup();
        v
    };
    let admit = |near: &[Term], far_exports: &BTreeSet<String>| -> bool {
        near.iter().all(|t| t.holds(far_exports))
    };
    let pref = cats(Side::Prefix);
    let stem = cats(Side::Stem);
    let suff = cats(Side::Suffix);
    for (pc, ps) in &pref {
        for (sc, ss) in &stem {
            // prefix near-residual targets the stem; stem near-residual targets the prefix
            if admit(&ps.residual_near, &ss.exports) && admit(&ss.residual_near, &ps.exports) {
                db.table_ab.insert((pc.to_string(), sc.to_string()));
            }
        }
        for (xc, xs) in &suff {
            if admit(&ps.residual_far, &xs.exports) && admit(&xs.residual_far, &ps.exports) {
                db.table_ac.insert((pc.to_string(), xc.to_string()));
            }
        }
    }
    for (sc, ss) in &stem {
        for (xc, xs) in &suff {
            if admit(&ss.residual_far, &xs.exports) && admit(&xs.residual_near, &ss.exports) {
                db.table_bc.insert((sc.to_string(), xc.to_string()));
            }
        }
    }

    let maxkey = |map: &BTreeMap<String, Vec<ComplexMorph>>| {
        map.keys().map(|k| k.chars().count()).max().unwrap_or(0)
    };
    db.header.version = "1".to_string();
    db.header.flags.insert("maxpfxkey".into(), maxkey(&db.prefixes).to_string());
    db.header.flags.insert("maxsfxkey".into(), maxkey(&db.suffixes).to_string());
    db.header.flags.insert("script".into(), "arabic".into());
    // rules travel with the database so the engine is self-contained
    db.rewrite_rules = specs.rewrite_rules.clone();
    Ok(db)
}

impl ComplexMorph {
    /// Deduplication key across order lines.
    fn row_key(&self) -> String {
        format!(
            "{:?}|{}|{}|{}|{}|{}|{}",
            self.side,
            self.surface_diac,
            self.category,
            self.bw_fragment,
            self.features.serialize(),
            self.lemma,
            self.gloss
        )
    }
}

/// Database statistics in the shape of the published comparison table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsReport {
    pub lemmas: usize,
    pub spec_stems: usize,
    pub db_stems: usize,
    pub allomorphs_per_class: BTreeMap<String, usize>,
    pub db_complex_prefixes: usize,
    pub db_complex_suffixes: usize,
    pub analyses_with_clitics: u64,
    pub analyses_without_clitics: u64,
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lemmas\t{}", self.lemmas)?;
        writeln!(f, "stems (specs)\t{}", self.spec_stems)?;
        writeln!(f, "stems (db)\t{}", self.db_stems)?;
        for (class, n) in &self.allomorphs_per_class {
            writeln!(f, "allomorphs {class}\t{n}")?;
        }
        writeln!(f, "complex prefixes\t{}", self.db_complex_prefixes)?;
        writeln!(f, "complex suffixes\t{}", self.db_complex_suffixes)?;
        writeln!(f, "analyses (with clitics)\t{}", self.analyses_with_clitics)?;
        write!(f, "analyses (no clitics)\t{}", self.analyses_without_clitics)
    }
}

/// Combinatoric triple count: sum over admissible category triples of the
/// entry-count products, optionally restricted to clitic-free morphs.
fn triple_count(db: &MorphDb, with_clitics: bool) -> u64 {
    let clitic_free_prefix = |cm: &&ComplexMorph| {
        cm.features.prc0.is_none()
            && cm.features.prc1.is_none()
            && cm.features.prc2.is_none()
            && cm.features.prc3.is_none()
    };
    let clitic_free_suffix = |cm: &&ComplexMorph| cm.features.enc0.is_none();

    fn count_by_cat<'a>(
        it: impl Iterator<Item = &'a ComplexMorph>,
    ) -> BTreeMap<&'a str, u64> {
        let mut m: BTreeMap<&str, u64> = BTreeMap::new();
        for cm in it {
            *m.entry(cm.category.as_str()).or_default() += 1;
        }
        m
    }
    let n_a = if with_clitics {
        count_by_cat(db.all_of(Side::Prefix))
    } else {
        count_by_cat(db.all_of(Side::Prefix).filter(clitic_free_prefix))
    };
    let n_b = count_by_cat(db.all_of(Side::Stem));
    let n_c = if with_clitics {
        count_by_cat(db.all_of(Side::Suffix))
    } else {
        count_by_cat(db.all_of(Side::Suffix).filter(clitic_free_suffix))
    };

    let mut total = 0u64;
    for (a, na) in &n_a {
        for (b, nb) in &n_b {
            if !db.table_ab.contains(&(a.to_string(), b.to_string())) {
                continue;
            }
            for (c, nc) in &n_c {
                if db.table_bc.contains(&(b.to_string(), c.to_string()))
                    && db.table_ac.contains(&(a.to_string(), c.to_string()))
                {
                    total += na * nb * nc;
                }
            }
        }
    }
    total
}

/// Counts over a compiled database and the spec it came from.
pub fn stats(db: &MorphDb, specs: &SpecSet) -> StatsReport {
    let mut allomorphs_per_class = BTreeMap::new();
    for class in specs.classes.values() {
        let n = class.morphemes.iter().map(|m| m.allomorphs.len()).sum();
        allomorphs_per_class.insert(class.id.clone(), n);
    }
    StatsReport {
        lemmas: specs.lexemes().len(),
        spec_stems: specs.lexicon.len(),
        db_stems: db.all_of(Side::Stem).count(),
        allomorphs_per_class,
        db_complex_prefixes: db.all_of(Side::Prefix).count(),
        db_complex_suffixes: db.all_of(Side::Suffix).count(),
        analyses_with_clitics: triple_count(db, true),
        analyses_without_clitics: triple_count(db, false),
    }
}
