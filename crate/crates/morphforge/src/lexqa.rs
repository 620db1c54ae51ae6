//! Lexicographic quality assurance: derive templatic patterns from roots,
//! classify lexemes into the paradigm index, and flag out-of-norm stem
//! clusters. QA reports; humans decide.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use crate::conditions::satisfies;
use crate::features::{merge_features, Gender, Number};
use crate::morphotax::{ClassKind, LexemeKey, LexiconEntry};
use crate::spec::{SpecSet, STEM_CLASS};
use crate::translit::{dediacritize, is_diacritic};

/// Weak-radical realizations: a root consonant may surface as one of these
/// in a stem. The table is fixed; it covers the long-vowel and hamza-seat
/// alternations of w, y and hamza roots.
fn radical_substitutes(radical: char) -> &'static [char] {
    match radical {
        'و' => &['و', 'ا', 'ؤ', 'ي'],
        'ي' => &['ي', 'ا', 'ئ', 'ى'],
        'ء' => &['ء', 'أ', 'إ', 'ؤ', 'ئ', 'آ'],
        _ => &[],
    }
}

/// Replace the leftmost embedding of the root's radicals in the stem with
/// placeholders 1..n. Diacritics are preserved; weak radicals may match
/// their substitution table. `None` when the root does not embed, which
/// flags the entry for review.
pub fn derive_pattern(stem_form: &str, root: &str) -> Option<String> {
    let radicals: Vec<char> = root.chars().filter(|c| !c.is_whitespace()).collect();
    if radicals.is_empty() {
        return None;
    }
    let stem: Vec<char> = stem_form.chars().collect();
    let mut matched: Vec<usize> = Vec::with_capacity(radicals.len());
    let mut pos = 0usize;
    for r in &radicals {
        let mut found = None;
        while pos < stem.len() {
            let c = stem[pos];
            if !is_diacritic(c) && (c == *r || radical_substitutes(*r).contains(&c)) {
                found = Some(pos);
                pos += 1;
                break;
            }
            pos += 1;
        }
        matched.push(found?);
    }
    let mut out = String::new();
    for (i, c) in stem.iter().enumerate() {
        match matched.iter().position(|m| *m == i) {
            Some(k) => out.push_str(&(k + 1).to_string()),
            None => out.push(*c),
        }
    }
    Some(out)
}

/// Substitute the actually matched stem characters back into a pattern.
/// On non-weak stems this reproduces the stem exactly.
pub fn substitute_radicals(pattern: &str, root: &str) -> String {
    let radicals: Vec<char> = root.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = String::new();
    for c in pattern.chars() {
        match c.to_digit(10) {
            Some(d) if d >= 1 && (d as usize) <= radicals.len() => {
                out.push(radicals[d as usize - 1])
            }
            _ => out.push(c),
        }
    }
    out
}

/// Simplified four-slot paradigm grid: functional gender crossed with
/// singular/plural. Duals are omitted for their regularity.
pub const SLOTS: [(Gender, Number); 4] = [
    (Gender::M, Number::S),
    (Gender::F, Number::S),
    (Gender::M, Number::P),
    (Gender::F, Number::P),
];

fn slot_name(g: Gender, n: Number) -> String {
    format!("{g}{n}")
}

/// One row of the paradigm index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParadigmClass {
    pub id: String,
    /// Expected form-suffix tag sets per slot; an empty set is a declared
    /// paradigm gap.
    pub slots: BTreeMap<(Gender, Number), BTreeSet<String>>,
    pub stem_min: usize,
    pub stem_max: usize,
    /// Informational labels (e.g. `semi_sound`); derived mismatch flags are
    /// computed from the signature, not matched against these.
    pub flags: BTreeSet<String>,
}

/// Load `paradigms.tsv`: CLASS_ID, MS, FS, MP, FP, STEMS, FLAGS.
pub fn parse_paradigms(text: &str) -> Result<Vec<ParadigmClass>, String> {
    let mut out = Vec::new();
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
        if cells.len() < 6 {
            return Err(format!("paradigms.tsv:{}: expected at least 6 columns", i + 1));
        }
        let mut slots = BTreeMap::new();
        for (idx, (g, n)) in SLOTS.iter().enumerate() {
            let cell = cells[idx + 1].trim();
            let tags: BTreeSet<String> = if cell == "-" || cell.is_empty() {
                BTreeSet::new()
            } else {
                cell.split('|').map(str::to_string).collect()
            };
            slots.insert((*g, *n), tags);
        }
        let stems = cells[5].trim();
        let (stem_min, stem_max) = match stems.split_once('-') {
            Some((a, b)) => (
                a.parse().map_err(|_| format!("paradigms.tsv:{}: bad STEMS", i + 1))?,
                b.parse().map_err(|_| format!("paradigms.tsv:{}: bad STEMS", i + 1))?,
            ),
            None => {
                let v = stems
                    .parse()
                    .map_err(|_| format!("paradigms.tsv:{}: bad STEMS", i + 1))?;
                (v, v)
            }
        };
        let flags: BTreeSet<String> = match cells.get(6) {
            Some(f) if *f != "-" && !f.is_empty() => f.split(';').map(str::to_string).collect(),
            _ => BTreeSet::new(),
        };
        out.push(ParadigmClass {
            id: cells[0].to_string(),
            slots,
            stem_min,
            stem_max,
            flags,
        });
    }
    Ok(out)
}

pub fn load_paradigms(path: &Path) -> io::Result<Result<Vec<ParadigmClass>, String>> {
    Ok(parse_paradigms(&fs::read_to_string(path)?))
}

/// The observed clitic-free behaviour of a lexeme: which form-suffix tags
/// realize each simplified slot, plus the distinct stem count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservedSignature {
    pub slots: BTreeMap<(Gender, Number), BTreeSet<String>>,
    pub stem_count: usize,
    /// Slots realized by a suffix whose default function differs, e.g.
    /// `mp~FP` for a masculine plural wearing a feminine-plural suffix.
    pub mismatches: BTreeSet<String>,
}

/// Form tag of a suffix allomorph: its form gender/number when declared,
/// `ZERO` for an empty form, `LV` for irregular long-vowel endings.
fn form_tag(a: &crate::morphotax::Allomorph) -> String {
    if a.features.form_gender.is_set() && a.features.form_number.is_set() {
        format!("{}{}", a.features.form_gender, a.features.form_number)
    } else if a.form.is_empty() {
        "ZERO".to_string()
    } else {
        "LV".to_string()
    }
}

fn default_function(tag: &str) -> Option<(Gender, Number)> {
    match tag {
        "MS" => Some((Gender::M, Number::S)),
        "FS" => Some((Gender::F, Number::S)),
        "MD" => Some((Gender::M, Number::D)),
        "FD" => Some((Gender::F, Number::D)),
        "MP" => Some((Gender::M, Number::P)),
        "FP" => Some((Gender::F, Number::P)),
        _ => None,
    }
}

/// Enumerate the clitic-free stem+buffer+suffix combinations a lexeme
/// admits, by direct evaluation of the original condition expressions, and
/// project them onto the simplified grid. Independent of the compiled
/// database on purpose.
pub fn observe(specs: &SpecSet, stems: &[&LexiconEntry]) -> ObservedSignature {
    let mut slots: BTreeMap<(Gender, Number), BTreeSet<String>> = BTreeMap::new();
    for (g, n) in SLOTS {
        slots.insert((g, n), BTreeSet::new());
    }
    let mut mismatches = BTreeSet::new();

    for line in &specs.order_lines {
        let buffer_classes: Vec<_> = line
            .stem_part
            .iter()
            .filter(|c| c.as_str() != STEM_CLASS)
            .filter_map(|c| specs.classes.get(c))
            .collect();
        let suffix_classes: Vec<_> = line
            .suffix_part
            .iter()
            .filter_map(|c| specs.classes.get(c))
            .filter(|c| c.kind == ClassKind::Suffix)
            .collect();
        for stem in stems {
            // buffer options: one allomorph per buffer class (classes in the
            // seed hold at most one buffer position)
            let mut buffer_opts: Vec<Option<&crate::morphotax::Allomorph>> = vec![None];
            for bc in &buffer_classes {
                let mut next = Vec::new();
                for m in &bc.morphemes {
                    for a in &m.allomorphs {
                        next.push(Some(a));
                    }
                }
                if !next.is_empty() {
                    buffer_opts = next;
                }
            }
            for buf in &buffer_opts {
                for sc in &suffix_classes {
                    for m in &sc.morphemes {
                        for a in &m.allomorphs {
                            let mut union: BTreeSet<String> =
                                stem.set_conditions.iter().cloned().collect();
                            if let Some(b) = buf {
                                union.extend(b.set_conditions.iter().cloned());
                            }
                            union.extend(a.set_conditions.iter().cloned());
                            let ok = satisfies(&union, &stem.require)
                                && buf.map_or(true, |b| satisfies(&union, &b.require))
                                && satisfies(&union, &a.require);
                            if !ok {
                                continue;
                            }
                            let Ok(merged) = merge_features(
                                &stem.feature_overrides,
                                &[],
                                &[&a.features],
                            ) else {
                                continue;
                            };
                            if merged.number == Number::D {
                                continue; // duals omitted from the grid
                            }
                            let (Gender::M | Gender::F, Number::S | Number::P) =
                                (merged.gender, merged.number)
                            else {
                                continue;
                            };
                            let tag = form_tag(a);
                            if let Some(default) = default_function(&tag) {
                                if default != (merged.gender, merged.number) {
                                    mismatches.insert(format!(
                                        "{}~{}",
                                        slot_name(merged.gender, merged.number),
                                        tag
                                    ));
                                }
                            }
                            slots
                                .get_mut(&(merged.gender, merged.number))
                                .unwrap()
                                .insert(tag);
                        }
                    }
                }
            }
        }
    }

    let stem_count = stems
        .iter()
        .map(|e| e.stem_form.as_str())
        .collect::<BTreeSet<_>>()
        .len();
    ObservedSignature { slots, stem_count, mismatches }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassifyOutcome {
    Class(String),
    /// No class matches, or several match equally well.
    OutOfNorm { observed: ObservedSignature, candidates: Vec<String> },
}

/// Match the observed signature against the paradigm index. Ties break
/// toward the most specific signature (most constrained slots).
pub fn classify_paradigm(
    specs: &SpecSet,
    index: &[ParadigmClass],
    stems: &[&LexiconEntry],
) -> ClassifyOutcome {
    let observed = observe(specs, stems);
    let mut matches: Vec<&ParadigmClass> = index
        .iter()
        .filter(|c| {
            c.slots == observed.slots
                && observed.stem_count >= c.stem_min
                && observed.stem_count <= c.stem_max
        })
        .collect();
    matches.sort_by_key(|c| {
        std::cmp::Reverse(
            c.slots.values().filter(|s| !s.is_empty()).count() * 100
                + c.slots.values().map(|s| s.len()).sum::<usize>()
                + (c.stem_max - c.stem_min == 0) as usize,
        )
    });
    match matches.len() {
        1 => ClassifyOutcome::Class(matches[0].id.clone()),
        0 => ClassifyOutcome::OutOfNorm { observed, candidates: Vec::new() },
        _ => {
            // a genuine tie only when equally specific
            let spec0 = matches[0].slots.values().map(|s| s.len()).sum::<usize>();
            let spec1 = matches[1].slots.values().map(|s| s.len()).sum::<usize>();
            if spec0 != spec1 {
                ClassifyOutcome::Class(matches[0].id.clone())
            } else {
                ClassifyOutcome::OutOfNorm {
                    observed,
                    candidates: matches.iter().map(|c| c.id.clone()).collect(),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum IssueCode {
    LemmaStemMismatch,
    InterParadigmAmbiguity,
    MissingBrokenOverride,
    ContradictoryDuplicates,
    NoPattern,
    OutOfNorm,
}

impl IssueCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            IssueCode::LemmaStemMismatch => "lemma-stem-mismatch",
            IssueCode::InterParadigmAmbiguity => "inter-paradigm-ambiguity",
            IssueCode::MissingBrokenOverride => "missing-broken-override",
            IssueCode::ContradictoryDuplicates => "contradictory-duplicates",
            IssueCode::NoPattern => "no-pattern",
            IssueCode::OutOfNorm => "out-of-norm",
        }
    }

    /// Errors demand a fix; warnings are review queue material.
    pub fn is_error(&self) -> bool {
        matches!(
            self,
            IssueCode::MissingBrokenOverride | IssueCode::ContradictoryDuplicates
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub lemma: String,
    pub pos: crate::features::Pos,
    pub code: IssueCode,
    pub detail: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}",
            self.lemma,
            self.pos,
            self.code.as_str(),
            self.detail
        )
    }
}

/// Acceptable undiacritized relations between a lemma and one of its stems:
/// identical, or the lemma adds a feminine/defective/pluralia ending.
fn lemma_matches_stem(lemma_key: &str, stem_key: &str) -> bool {
    if lemma_key == stem_key {
        return true;
    }
    for ending in ["ة", "ى", "ء", "اء", "ات"] {
        if let Some(rest) = lemma_key.strip_suffix(ending) {
            if rest == stem_key {
                return true;
            }
        }
    }
    false
}

/// Well-formedness report for one lexeme.
pub fn wellformedness(
    specs: &SpecSet,
    key: &LexemeKey,
    stems: &[&LexiconEntry],
    stem_form_owners: &BTreeMap<String, BTreeSet<LexemeKey>>,
) -> Vec<Issue> {
    let mut issues = Vec::new();
    let (lemma, pos) = key;
    let lemma_key = dediacritize(lemma);

    if !stems
        .iter()
        .any(|e| lemma_matches_stem(&lemma_key, &dediacritize(&e.stem_form)))
    {
        issues.push(Issue {
            lemma: lemma.clone(),
            pos: *pos,
            code: IssueCode::LemmaStemMismatch,
            detail: "no stem is spelling-consistent with the lemma".into(),
        });
    }

    for e in stems {
        if let Some(owners) = stem_form_owners.get(&dediacritize(&e.stem_form)) {
            if owners.len() > 1 {
                let others: Vec<String> = owners
                    .iter()
                    .filter(|k| *k != key)
                    .map(|(l, p)| format!("{l}/{p}"))
                    .collect();
                issues.push(Issue {
                    lemma: lemma.clone(),
                    pos: *pos,
                    code: IssueCode::InterParadigmAmbiguity,
                    detail: format!(
                        "stem `{}` could fit paradigm slots of: {}",
                        e.stem_form,
                        others.join(", ")
                    ),
                });
            }
        }
    }

    // secondary stems admitting only singular-form suffixes are broken
    // plurals and must override gender and number
    let distinct_forms: BTreeSet<&str> = stems.iter().map(|e| e.stem_form.as_str()).collect();
    if distinct_forms.len() > 1 {
        for e in stems {
            if lemma_matches_stem(&lemma_key, &dediacritize(&e.stem_form)) {
                continue; // base stem
            }
            let labels: BTreeSet<&str> = e
                .require
                .terms
                .iter()
                .flat_map(|t| t.labels.iter().map(String::as_str))
                .collect();
            let singular_form = labels.contains("MS") || labels.contains("FS");
            let plural_form = ["MP", "FP", "MD", "FD"].iter().any(|l| labels.contains(l));
            if singular_form
                && !plural_form
                && !(e.feature_overrides.gender.is_set() && e.feature_overrides.number.is_set())
            {
                issues.push(Issue {
                    lemma: lemma.clone(),
                    pos: *pos,
                    code: IssueCode::MissingBrokenOverride,
                    detail: format!(
                        "broken-plural stem `{}` lacks a gender/number override",
                        e.stem_form
                    ),
                });
            }
        }
    }

    // same surface + same conditions but different overrides contradict
    for (i, a) in stems.iter().enumerate() {
        for b in stems.iter().skip(i + 1) {
            if a.stem_form == b.stem_form
                && a.require == b.require
                && a.set_conditions == b.set_conditions
                && a.feature_overrides != b.feature_overrides
            {
                issues.push(Issue {
                    lemma: lemma.clone(),
                    pos: *pos,
                    code: IssueCode::ContradictoryDuplicates,
                    detail: format!(
                        "stem `{}` duplicated with contradictory overrides",
                        a.stem_form
                    ),
                });
            }
        }
    }

    let _ = specs;
    issues
}

/// Full QA pass: derive patterns, classify every lexeme, run
/// well-formedness. Returns one row per issue, ordered by lemma.
pub fn qa_report(specs: &SpecSet, index: &[ParadigmClass]) -> Vec<Issue> {
    let lexemes = specs.lexemes();
    let mut stem_form_owners: BTreeMap<String, BTreeSet<LexemeKey>> = BTreeMap::new();
    for (key, stems) in &lexemes {
        for e in stems {
            stem_form_owners
                .entry(dediacritize(&e.stem_form))
                .or_default()
                .insert(key.clone());
        }
    }
    let mut issues = Vec::new();
    for (key, stems) in &lexemes {
        for e in stems {
            if !e.root.is_empty() && derive_pattern(&e.stem_form, &e.root).is_none() {
                issues.push(Issue {
                    lemma: key.0.clone(),
                    pos: key.1,
                    code: IssueCode::NoPattern,
                    detail: format!(
                        "root `{}` does not embed in stem `{}`",
                        e.root, e.stem_form
                    ),
                });
            }
        }
        if let ClassifyOutcome::OutOfNorm { candidates, .. } =
            classify_paradigm(specs, index, stems)
        {
            issues.push(Issue {
                lemma: key.0.clone(),
                pos: key.1,
                code: IssueCode::OutOfNorm,
                detail: if candidates.is_empty() {
                    "no paradigm class matches".to_string()
                } else {
                    format!("ambiguous between: {}", candidates.join(", "))
                },
            });
        }
        issues.extend(wellformedness(specs, key, stems, &stem_form_owners));
    }
    issues
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::translit::{to_arabic, to_hsb};

    #[test]
    fn pattern_of_broken_plural_with_buffered_hamza() {
        // sufaraA (the hamza lives in the buffer) against root s-f-r
        let p = derive_pattern(&to_arabic("sufaraA"), &to_arabic("sfr")).unwrap();
        assert_eq!(to_hsb(&p), "1u2a3aA");
        // with the hamza included the tail survives as literal text
        let p = derive_pattern(&to_arabic("sufaraA'"), &to_arabic("sfr")).unwrap();
        assert_eq!(to_hsb(&p), "1u2a3aA'");
    }

    #[test]
    fn pattern_of_active_participle() {
        let p = derive_pattern(&to_arabic("kaAtib"), &to_arabic("ktb")).unwrap();
        assert_eq!(to_hsb(&p), "1aA2i3");
    }

    #[test]
    fn resubstitution_reproduces_nonweak_stems() {
        for (stem, root) in [("kaAtib", "ktb"), ("sufaraA'", "sfr"), ("muhandis", "hnds")] {
            let stem = to_arabic(stem);
            let root = to_arabic(root);
            let p = derive_pattern(&stem, &root).unwrap();
            assert_eq!(substitute_radicals(&p, &root), stem);
        }
    }

    #[test]
    fn weak_radicals_match_their_realizations() {
        // naAr from n-w-r: the w surfaces as alif
        let p = derive_pattern(&to_arabic("naAr"), &to_arabic("nwr")).unwrap();
        assert_eq!(to_hsb(&p), "1a23");
        // dun.yA from d-n-w: the w surfaces as ya
        let p = derive_pattern(&to_arabic("dun.yA"), &to_arabic("dnw")).unwrap();
        assert_eq!(to_hsb(&p), "1u2.3A");
    }

    #[test]
    fn unembeddable_root_is_flagged() {
        // qaAD lacks the final y radical of q-D-y
        assert_eq!(derive_pattern(&to_arabic("qaAD"), &to_arabic("qDy")), None);
        assert!(derive_pattern(&to_arabic("qaADiy"), &to_arabic("qDy")).is_some());
    }
}
