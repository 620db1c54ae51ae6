//! Morphotactic building blocks: allomorphs grouped into morphemes, grouped
//! into positional classes, arranged by order lines; plus the open-class
//! lexicon entries that fill the stem position.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::conditions::{ConditionExpr, RawRequire, RawTerm, Term};
use crate::features::{FeatureBundle, Pos};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassKind {
    Proclitic,
    Stem,
    Buffer,
    Suffix,
    Enclitic,
}

/// One surface variant of a morpheme. `form` is Arabic script and empty for
/// the "nothing" option (spelled `NONE` in the sheets); an empty-form
/// allomorph still carries features and conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allomorph {
    pub morpheme_id: String,
    pub class_id: String,
    pub form: String,
    pub features: FeatureBundle,
    pub set_conditions: BTreeSet<String>,
    pub require: ConditionExpr,
    pub bw_segment: String,
    /// Sheet row, for diagnostics.
    pub row: usize,
}

/// An abstract closed-class unit and its contextual variants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morpheme {
    pub id: String,
    pub class_id: String,
    pub allomorphs: Vec<Allomorph>,
}

/// A position in the word template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphClass {
    pub id: String,
    pub kind: ClassKind,
    pub morphemes: Vec<Morpheme>,
}

impl MorphClass {
    /// True when the class may be skipped, i.e. some morpheme offers a
    /// nothing allomorph.
    pub fn is_optional(&self) -> bool {
        self.morphemes
            .iter()
            .any(|m| m.allomorphs.iter().any(|a| a.form.is_empty()))
    }
}

/// A class sequence defining the positions of one word shape, already split
/// into its three database sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderLine {
    pub id: String,
    pub classes: Vec<String>,
    pub prefix_part: Vec<String>,
    pub stem_part: Vec<String>,
    pub suffix_part: Vec<String>,
    pub row: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rationality {
    Rational,
    Irrational,
    NotApplicable,
}

impl Rationality {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rationality::Rational => "r",
            Rationality::Irrational => "i",
            Rationality::NotApplicable => "-",
        }
    }

    pub fn parse(s: &str) -> Option<Rationality> {
        match s {
            "r" => Some(Rationality::Rational),
            "i" => Some(Rationality::Irrational),
            "-" | "na" => Some(Rationality::NotApplicable),
            _ => None,
        }
    }
}

/// One stem row of the lexicon. Stems sharing (lemma, pos) form a lexeme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub lemma: String,
    pub stem_form: String,
    pub gloss: String,
    pub pos: Pos,
    pub root: String,
    pub pattern: String,
    pub rationality: Rationality,
    /// Feature overrides (typically gender/number on broken-plural stems);
    /// `pos` is carried here too so the entry is self-describing.
    pub feature_overrides: FeatureBundle,
    pub set_conditions: BTreeSet<String>,
    pub require: ConditionExpr,
    pub row: usize,
}

/// Lexeme identity: stems group by (lemma, pos) — identical lemmas under
/// different POS are distinct lexemes.
pub type LexemeKey = (String, Pos);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ElseError {
    #[error("`else` in morpheme `{morpheme}` column {column}: sibling allomorphs list no labels there")]
    NoSiblingLabels { morpheme: String, column: usize },
    #[error("morpheme `{morpheme}` has more than one `else` in require column {column}")]
    DuplicateElse { morpheme: String, column: usize },
}

/// Replace every `else` marker by the negated disjunction of the labels its
/// sibling allomorphs list in the same require column. Column position, not
/// row position, scopes the expansion, so the result does not depend on the
/// order allomorphs are listed in.
pub fn expand_else(
    morpheme_id: &str,
    raws: &[RawRequire],
) -> Result<Vec<ConditionExpr>, ElseError> {
    // labels per column over all rows
    let mut column_labels: Vec<BTreeSet<String>> = Vec::new();
    let mut else_count: Vec<usize> = Vec::new();
    for raw in raws {
        for (col, t) in raw.terms.iter().enumerate() {
            if column_labels.len() <= col {
                column_labels.resize(col + 1, BTreeSet::new());
                else_count.resize(col + 1, 0);
            }
            match t {
                RawTerm::Term(term) => column_labels[col].extend(term.labels.iter().cloned()),
                RawTerm::Else => else_count[col] += 1,
            }
        }
    }
    for (col, n) in else_count.iter().enumerate() {
        if *n > 1 {
            return Err(ElseError::DuplicateElse {
                morpheme: morpheme_id.to_string(),
                column: col + 1,
            });
        }
    }

    let mut out = Vec::with_capacity(raws.len());
    for raw in raws {
        let mut terms = Vec::with_capacity(raw.terms.len());
        for (col, t) in raw.terms.iter().enumerate() {
            match t {
                RawTerm::Term(term) => terms.push(term.clone()),
                RawTerm::Else => {
                    let labels = &column_labels[col];
                    if labels.is_empty() {
                        return Err(ElseError::NoSiblingLabels {
                            morpheme: morpheme_id.to_string(),
                            column: col + 1,
                        });
                    }
                    terms.push(Term::negated(labels.iter().cloned()));
                }
            }
        }
        out.push(ConditionExpr::new(terms));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::parse_require;

    fn raw(s: &str) -> RawRequire {
        parse_require(s).unwrap()
    }

    #[test]
    fn msig_else_becomes_negated_dip() {
        // Suff.MSIG: one allomorph requires #dip, the sibling requires else
        let out = expand_else("Suff.MSIG", &[raw("#dip"), raw("else")]).unwrap();
        assert_eq!(out[0], ConditionExpr::new(vec![Term::positive(["#dip"])]));
        assert_eq!(out[1], ConditionExpr::new(vec![Term::negated(["#dip"])]));
    }

    #[test]
    fn pron_3mp_him_hum_split() {
        // him requires c + suff-i; hum requires c + else(-> !suff-i)
        let out = expand_else("Pron.3MP", &[raw("c suff-i"), raw("c else")]).unwrap();
        assert_eq!(
            out[1],
            ConditionExpr::new(vec![Term::positive(["c"]), Term::negated(["suff-i"])])
        );
    }

    #[test]
    fn no_else_is_identity_and_idempotent() {
        let inputs = [raw("MS|FS"), raw("!obj x")];
        let once = expand_else("M", &inputs).unwrap();
        // re-running on the expanded output changes nothing
        let reraw: Vec<RawRequire> = once
            .iter()
            .map(|e| RawRequire {
                terms: e.terms.iter().cloned().map(RawTerm::Term).collect(),
            })
            .collect();
        let twice = expand_else("M", &reraw).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn else_column_union_spans_all_siblings() {
        // column 2 collects suff-i and suff-u from both seat rows
        let out = expand_else(
            "Buff",
            &[raw("#A' suff-i"), raw("#A' suff-u"), raw("#A' else")],
        )
        .unwrap();
        assert_eq!(
            out[2].terms[1],
            Term::negated(["suff-i", "suff-u"])
        );
    }

    #[test]
    fn else_without_sibling_labels_is_an_error() {
        let err = expand_else("M", &[raw("else")]).unwrap_err();
        assert!(matches!(err, ElseError::NoSiblingLabels { .. }));
    }
}
