//! The condition calculus: opaque surface-fact labels, set/require
//! semantics, and the scope discipline that keeps every requirement
//! dischargeable in exactly one pairwise compatibility table.
//!
//! A require expression is a conjunction of terms; each term is a
//! disjunction of labels, optionally negated as a whole. Labels say nothing
//! about functional features — they record surface facts only (`#A'` "the
//! stem ends in alif-hamza", `suff-i` "the suffix ends in /i/", `obj` "a
//! pronominal enclitic is present", ...).

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// The three sides of the compiled database.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Prefix,
    Stem,
    Suffix,
}

impl Side {
    pub fn letter(&self) -> char {
        match self {
            Side::Prefix => 'A',
            Side::Stem => 'B',
            Side::Suffix => 'C',
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Prefix => f.write_str("prefix"),
            Side::Stem => f.write_str("stem"),
            Side::Suffix => f.write_str("suffix"),
        }
    }
}

/// Where a condition label may be set and required. A label whose scope is a
/// side pair is discharged either inside one of the two sides or in the
/// pairwise table between them; an internal label never crosses its side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scope {
    PrefixInternal,
    StemInternal,
    SuffixInternal,
    PrefixStem,
    StemSuffix,
    PrefixSuffix,
}

impl Scope {
    pub fn sides(&self) -> &'static [Side] {
        match self {
            Scope::PrefixInternal => &[Side::Prefix],
            Scope::StemInternal => &[Side::Stem],
            Scope::SuffixInternal => &[Side::Suffix],
            Scope::PrefixStem => &[Side::Prefix, Side::Stem],
            Scope::StemSuffix => &[Side::Stem, Side::Suffix],
            Scope::PrefixSuffix => &[Side::Prefix, Side::Suffix],
        }
    }

    pub fn allows(&self, side: Side) -> bool {
        self.sides().contains(&side)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Scope::PrefixInternal => "prefix-internal",
            Scope::StemInternal => "stem-internal",
            Scope::SuffixInternal => "suffix-internal",
            Scope::PrefixStem => "prefix↔stem",
            Scope::StemSuffix => "stem↔suffix",
            Scope::PrefixSuffix => "prefix↔suffix",
        }
    }

    pub fn parse(s: &str) -> Option<Scope> {
        match s {
            "prefix-internal" => Some(Scope::PrefixInternal),
            "stem-internal" => Some(Scope::StemInternal),
            "suffix-internal" => Some(Scope::SuffixInternal),
            "prefix↔stem" | "prefix<->stem" => Some(Scope::PrefixStem),
            "stem↔suffix" | "stem<->suffix" => Some(Scope::StemSuffix),
            "prefix↔suffix" | "prefix<->suffix" => Some(Scope::PrefixSuffix),
            _ => None,
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One entry of the condition index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionLabel {
    pub name: String,
    pub description: String,
    pub scope: Scope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negated,
}

/// A (possibly negated) disjunction of labels.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub polarity: Polarity,
    pub labels: BTreeSet<String>,
}

impl Term {
    pub fn positive<I: IntoIterator<Item = S>, S: Into<String>>(labels: I) -> Term {
        Term {
            polarity: Polarity::Positive,
            labels: labels.into_iter().map(Into::into).collect(),
        }
    }

    pub fn negated<I: IntoIterator<Item = S>, S: Into<String>>(labels: I) -> Term {
        Term {
            polarity: Polarity::Negated,
            labels: labels.into_iter().map(Into::into).collect(),
        }
    }

    /// Positive: some label is in the set. Negated: no label is in the set.
    pub fn holds(&self, set_union: &BTreeSet<String>) -> bool {
        let overlap = self.labels.iter().any(|l| set_union.contains(l));
        match self.polarity {
            Polarity::Positive => overlap,
            Polarity::Negated => !overlap,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.polarity == Polarity::Negated {
            f.write_str("!")?;
        }
        let mut first = true;
        for l in &self.labels {
            if !first {
                f.write_str("|")?;
            }
            f.write_str(l)?;
            first = false;
        }
        Ok(())
    }
}

/// Conjunction of terms; the empty expression is vacuously satisfied.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ConditionExpr {
    pub terms: Vec<Term>,
}

impl ConditionExpr {
    pub fn new(terms: Vec<Term>) -> ConditionExpr {
        ConditionExpr { terms }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for ConditionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for t in &self.terms {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
            first = false;
        }
        Ok(())
    }
}

/// Truth of `expr` against the union of all labels set in a word.
pub fn satisfies(set_union: &BTreeSet<String>, expr: &ConditionExpr) -> bool {
    expr.terms.iter().all(|t| t.holds(set_union))
}

/// A require column entry before `else` expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawTerm {
    Else,
    Term(Term),
}

/// Require column list as written in a sheet, `else` markers included.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawRequire {
    pub terms: Vec<RawTerm>,
}

impl RawRequire {
    pub fn has_else(&self) -> bool {
        self.terms.iter().any(|t| matches!(t, RawTerm::Else))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConditionParseError {
    #[error("empty term in require expression")]
    EmptyTerm,
    #[error("`else` cannot be negated")]
    NegatedElse,
}

/// Parse a SET column: space-separated labels, `-` or empty for none.
pub fn parse_set(s: &str) -> BTreeSet<String> {
    s.split_whitespace()
        .filter(|t| *t != "-")
        .map(str::to_string)
        .collect()
}

/// Parse a REQUIRE column: space-separated terms, `|` joins a disjunction,
/// `!` prefixes a negated term, literal `else` marks a column to expand.
pub fn parse_require(s: &str) -> Result<RawRequire, ConditionParseError> {
    let mut terms = Vec::new();
    for tok in s.split_whitespace() {
        if tok == "-" {
            continue;
        }
        if tok == "else" {
            terms.push(RawTerm::Else);
            continue;
        }
        if tok == "!else" {
            return Err(ConditionParseError::NegatedElse);
        }
        let (polarity, body) = match tok.strip_prefix('!') {
            Some(rest) => (Polarity::Negated, rest),
            None => (Polarity::Positive, tok),
        };
        let labels: BTreeSet<String> = body
            .split('|')
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        if labels.is_empty() {
            return Err(ConditionParseError::EmptyTerm);
        }
        terms.push(RawTerm::Term(Term { polarity, labels }));
    }
    Ok(RawRequire { terms })
}

/// Serialize a require expression back to sheet syntax.
pub fn require_to_sheet(expr: &ConditionExpr) -> String {
    if expr.terms.is_empty() {
        "-".to_string()
    } else {
        expr.terms
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Serialize a SET column.
pub fn set_to_sheet(set: &BTreeSet<String>) -> String {
    if set.is_empty() {
        "-".to_string()
    } else {
        set.iter().cloned().collect::<Vec<_>>().join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(labels: &[&str]) -> BTreeSet<String> {
        labels.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn figure_level_examples() {
        // the permitted diptote form: sets and requirements coincide
        let s = set(&["#A'", "#dip", "MS"]);
        let expr = ConditionExpr::new(vec![
            Term::positive(["#A'"]),
            Term::positive(["#dip"]),
            Term::positive(["MS"]),
        ]);
        assert!(satisfies(&s, &expr));

        // the rejected form: requires obj, suff-i and the negation of #dip
        let expr = ConditionExpr::new(vec![
            Term::positive(["MS"]),
            Term::positive(["#A'"]),
            Term::positive(["obj"]),
            Term::positive(["suff-i"]),
            Term::negated(["#dip"]),
        ]);
        assert!(!satisfies(&s, &expr));

        // vacuous conjunction
        assert!(satisfies(&set(&[]), &ConditionExpr::default()));
    }

    #[test]
    fn parse_require_syntax() {
        let r = parse_require("MS|FS|FP !obj else").unwrap();
        assert_eq!(r.terms.len(), 3);
        assert_eq!(
            r.terms[0],
            RawTerm::Term(Term::positive(["MS", "FS", "FP"]))
        );
        assert_eq!(r.terms[1], RawTerm::Term(Term::negated(["obj"])));
        assert_eq!(r.terms[2], RawTerm::Else);
        assert!(parse_require("-").unwrap().terms.is_empty());
        assert!(parse_require("").unwrap().terms.is_empty());
        assert_eq!(parse_require("!else"), Err(ConditionParseError::NegatedElse));
    }

    #[test]
    fn scope_parsing_accepts_both_arrows() {
        assert_eq!(Scope::parse("stem↔suffix"), Some(Scope::StemSuffix));
        assert_eq!(Scope::parse("stem<->suffix"), Some(Scope::StemSuffix));
        assert_eq!(Scope::parse("prefix-internal"), Some(Scope::PrefixInternal));
        assert_eq!(Scope::parse("bogus"), None);
    }

    prop_compose! {
        fn arb_labels()(v in proptest::collection::btree_set("[a-e]", 1..4)) -> BTreeSet<String> {
            v
        }
    }

    proptest! {
        /// Monotonicity in S for purely positive expressions.
        #[test]
        fn positive_terms_monotone(
            base in proptest::collection::btree_set("[a-h]", 0..6),
            extra in proptest::collection::btree_set("[a-h]", 0..4),
            terms in proptest::collection::vec(arb_labels(), 0..4),
        ) {
            let expr = ConditionExpr::new(
                terms.into_iter().map(|labels| Term { polarity: Polarity::Positive, labels }).collect(),
            );
            let mut bigger = base.clone();
            bigger.extend(extra);
            if satisfies(&base, &expr) {
                prop_assert!(satisfies(&bigger, &expr));
            }
        }
    }
}
