//! Ortho-phonological rewrite rules applied by the engine after
//! concatenation (generation) and inverted before lookup (analysis).
//!
//! The shipped inventory is deliberately tiny: sun-letter gemination after
//! the determiner. Everything else the grammar needs (li+Al elision,
//! ta-marbuta to t before enclitics, hamza seats, defective endings) is
//! condition-selected allomorphy resolved at compile time, not string
//! rewriting.

use std::collections::BTreeSet;

use regex::Regex;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Applied to the concatenated surface after generation.
    GenerationPost,
    /// Applied to raw input before analysis lookup.
    AnalysisPre,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::GenerationPost => "generation-post",
            Stage::AnalysisPre => "analysis-pre",
        }
    }

    pub fn parse(s: &str) -> Option<Stage> {
        match s {
            "generation-post" => Some(Stage::GenerationPost),
            "analysis-pre" => Some(Stage::AnalysisPre),
            _ => None,
        }
    }
}

/// One rewrite rule. Bidirectional rules carry an explicit inverse pattern;
/// mechanical inversion of an arbitrary regex is not decidable, and an
/// explicit pair is checked by the forward-closure property instead
/// (every string the inverse produces must rewrite forward to the input).
#[derive(Debug, Clone)]
pub struct RewriteRule {
    pub id: String,
    pub stage: Stage,
    pub pattern: Regex,
    pub replacement: String,
    pub bidirectional: bool,
    pub inverse: Option<(Regex, String)>,
    /// Source strings as written in the sheet, kept for serialization.
    pub match_src: String,
    pub inv_match_src: String,
    pub inv_replacement_src: String,
}

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("rule `{0}`: bad regex: {1}")]
    BadRegex(String, regex::Error),
    #[error("rule `{0}`: bidirectional rule lacks an inverse pattern")]
    MissingInverse(String),
}

impl RewriteRule {
    pub fn new(
        id: &str,
        stage: Stage,
        match_src: &str,
        replacement: &str,
        bidirectional: bool,
        inv_match: &str,
        inv_replacement: &str,
    ) -> Result<RewriteRule, RewriteError> {
        let pattern = Regex::new(match_src)
            .map_err(|e| RewriteError::BadRegex(id.to_string(), e))?;
        let inverse = if bidirectional {
            if inv_match.is_empty() {
                return Err(RewriteError::MissingInverse(id.to_string()));
            }
            let inv = Regex::new(inv_match)
                .map_err(|e| RewriteError::BadRegex(id.to_string(), e))?;
            Some((inv, inv_replacement.to_string()))
        } else {
            None
        };
        Ok(RewriteRule {
            id: id.to_string(),
            stage,
            pattern,
            replacement: replacement.to_string(),
            bidirectional,
            inverse,
            match_src: match_src.to_string(),
            inv_match_src: inv_match.to_string(),
            inv_replacement_src: inv_replacement.to_string(),
        })
    }
}

/// One left-to-right pass per rule, rules in listed order.
pub fn apply_forward(surface: &str, rules: &[RewriteRule]) -> String {
    let mut s = surface.to_string();
    for r in rules {
        if r.stage == Stage::GenerationPost {
            s = r.pattern.replace_all(&s, r.replacement.as_str()).into_owned();
        }
    }
    s
}

/// Apply the analysis-pre rules (forward direction) to raw input.
pub fn apply_analysis_pre(surface: &str, rules: &[RewriteRule]) -> String {
    let mut s = surface.to_string();
    for r in rules {
        if r.stage == Stage::AnalysisPre {
            s = r.pattern.replace_all(&s, r.replacement.as_str()).into_owned();
        }
    }
    s
}

/// All candidate preimages of `surface` under the bidirectional
/// generation-post rules: the input itself, plus every string reachable by
/// reversing one or more single rule applications that passes the
/// forward-closure check (rewriting it forward reproduces the input).
pub fn apply_backward(surface: &str, rules: &[RewriteRule]) -> BTreeSet<String> {
    let mut out: BTreeSet<String> = BTreeSet::new();
    out.insert(surface.to_string());
    let mut work: Vec<String> = vec![surface.to_string()];
    while let Some(s) = work.pop() {
        for r in rules {
            let Some((inv, repl)) = &r.inverse else { continue };
            // reverse one occurrence at a time so partial reversals are kept
            for m in inv.find_iter(&s) {
                let mut candidate = String::with_capacity(s.len());
                candidate.push_str(&s[..m.start()]);
                let rewritten = inv.replace(&s[m.start()..], repl.as_str());
                candidate.push_str(&rewritten);
                if !out.contains(&candidate) && apply_forward(&candidate, rules) == surface {
                    out.insert(candidate.clone());
                    work.push(candidate);
                }
            }
        }
    }
    out
}

/// The fourteen sun letters: coronal consonants that geminate after the
/// determiner.
pub const SUN_LETTERS: &str = "تثدذرزسشصضطظلن";

/// Expand `{SUN}`-style macros in a match pattern.
pub fn expand_macros(pattern: &str, macros: &[(String, String)]) -> String {
    let mut s = pattern.to_string();
    for (name, body) in macros {
        s = s.replace(&format!("{{{name}}}"), &format!("[{body}]"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::translit::to_arabic;

    fn sun_rule() -> RewriteRule {
        // mirrors the shipped rule in rewrite.tsv; macros expand before
        // romanization is resolved so the macro name survives intact
        let macros = [("SUN".to_string(), SUN_LETTERS.to_string())];
        let m = to_arabic(&expand_macros(
            "^((?:Âa)?(?:wa|fa)?(?:(?:bi|ka)?Al|lil))({SUN})~?",
            &macros,
        ));
        let inv = to_arabic(&expand_macros(
            "^((?:Âa)?(?:wa|fa)?(?:(?:bi|ka)?Al|lil))({SUN})~",
            &macros,
        ));
        RewriteRule::new(
            "sun-gemination",
            Stage::GenerationPost,
            &m,
            &to_arabic("${1}${2}~"),
            true,
            &inv,
            "${1}${2}",
        )
        .unwrap()
    }

    #[test]
    fn sun_letter_gemination() {
        let rules = [sun_rule()];
        let input = to_arabic("Alšam.si");
        assert_eq!(apply_forward(&input, &rules), to_arabic("Alš~am.si"));
        // elided prefix already fused at compile time: forward only adds shadda
        let input = to_arabic("lilšam.si");
        assert_eq!(apply_forward(&input, &rules), to_arabic("lilš~am.si"));
        // no sun letter, no change
        assert_eq!(apply_forward(&to_arabic("AlkitaAbu"), &rules), to_arabic("AlkitaAbu"));
        // moon-initial word without determiner untouched
        assert_eq!(apply_forward(&to_arabic("kitaAbu"), &rules), to_arabic("kitaAbu"));
    }

    #[test]
    fn forward_is_idempotent() {
        let rules = [sun_rule()];
        let once = apply_forward(&to_arabic("Alšam.su"), &rules);
        assert_eq!(apply_forward(&once, &rules), once);
    }

    #[test]
    fn anchored_rule_ignores_stem_internal_alif_lam() {
        let rules = [sun_rule()];
        // a bare stem containing alif+lam+sun-letter must not geminate
        let input = to_arabic("xAld");
        assert_eq!(apply_forward(&input, &rules), input);
    }

    #[test]
    fn backward_includes_identity_and_ungeminated() {
        let rules = [sun_rule()];
        let s = to_arabic("Alš~ams");
        let pre = apply_backward(&s, &rules);
        assert!(pre.contains(&s));
        assert!(pre.contains(&to_arabic("Alšams")));
        assert_eq!(pre.len(), 2);
        // string with no rule residue maps to itself only
        let plain = to_arabic("kitaAb");
        assert_eq!(apply_backward(&plain, &rules).len(), 1);
    }

    #[test]
    fn backward_members_forward_close() {
        let rules = [sun_rule()];
        for w in ["Alš~amsu", "lilš~am.si", "waAlt~ajriba", "bAlz~", "sufaraA'a"] {
            let s = to_arabic(w);
            for p in apply_backward(&s, &rules) {
                if p != s {
                    assert_eq!(apply_forward(&p, &rules), s, "preimage {p} of {s}");
                }
            }
        }
    }
}
