//! Analysis: map an input token (diacritized or not) to every reading the
//! database admits, via rewrite preimages, key segmentation, and the three
//! compatibility tables.

use crate::analysis::{assemble, Analysis};
use crate::features::merge_features;
use crate::rewrite::{apply_analysis_pre, apply_backward};
use crate::translit::{diacritics_compatible, strip, Stripped};

use super::{Engine, EngineError};

impl<'a> Engine<'a> {
    /// All readings of a single orthographic token. No reading is not an
    /// error; empty input is.
    ///
    /// Diacritic filtering is lenient: an input diacritic conflicts only
    /// when the aligned letter of the candidate carries different marks;
    /// absence never conflicts.
    pub fn analyze(&self, word: &str) -> Result<Vec<Analysis>, EngineError> {
        if word.trim().is_empty() {
            return Err(EngineError::EmptyInput);
        }
        let word = apply_analysis_pre(word, &self.db.rewrite_rules);
        let mut out = Vec::new();
        for preimage in apply_backward(&word, &self.db.rewrite_rules) {
            let stripped = strip(&preimage);
            let letters: Vec<char> = stripped.key.chars().collect();
            let n = letters.len();
            if n == 0 {
                continue;
            }
            let max_p = self.max_prefix_key().min(n - 1);
            for plen in 0..=max_p {
                let pkey: String = letters[..plen].iter().collect();
                let Some(prefixes) = self.db.prefixes.get(&pkey) else { continue };
                let max_s = self.max_suffix_key().min(n - 1 - plen);
                for slen in 0..=max_s {
                    let skey: String = letters[n - slen..].iter().collect();
                    let stem_key: String = letters[plen..n - slen].iter().collect();
                    let Some(suffixes) = self.db.suffixes.get(&skey) else { continue };
                    let Some(stems) = self.db.stems.get(&stem_key) else { continue };
                    for s in stems {
                        for x in suffixes {
                            if !self
                                .db
                                .table_bc
                                .contains(&(s.category.clone(), x.category.clone()))
                            {
                                continue;
                            }
                            for p in prefixes {
                                if !self
                                    .db
                                    .table_ab
                                    .contains(&(p.category.clone(), s.category.clone()))
                                    || !self.ac_ok(&p.category, &x.category)
                                {
                                    continue;
                                }
                                let merged = merge_features(
                                    &s.features,
                                    &[&p.features],
                                    &[&x.features],
                                )
                                .map_err(EngineError::Internal)?;
                                let analysis =
                                    assemble(p, s, x, merged, &self.db.rewrite_rules);
                                if diacritics_compatible(&word, &analysis.diac) {
                                    out.push(analysis);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(Self::dedup_sort(out))
    }
}

/// Strip a word to its match key, recording the stripped diacritics for the
/// post-lookup filter.
pub fn normalize(word: &str) -> Stripped {
    strip(word)
}

/// All (prefix, stem, suffix) character splits of a word with a non-empty
/// stem and the affix lengths within bounds.
pub fn segmentations(
    word: &str,
    max_prefix_len: usize,
    max_suffix_len: usize,
) -> Vec<(String, String, String)> {
    let letters: Vec<char> = word.chars().collect();
    let n = letters.len();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    for plen in 0..=max_prefix_len.min(n - 1) {
        for slen in 0..=max_suffix_len.min(n - 1 - plen) {
            out.push((
                letters[..plen].iter().collect(),
                letters[plen..n - slen].iter().collect(),
                letters[n - slen..].iter().collect(),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::translit::{to_arabic, to_hsb};

    #[test]
    fn split_counts_match_closed_form() {
        // length-9 word with bounds (4,3): (4+1)*(3+1) splits, stems all non-empty
        let w = to_arabic("wbsfrAŷhm");
        assert_eq!(w.chars().count(), 9);
        let splits = segmentations(&w, 4, 3);
        assert_eq!(splits.len(), 20);
        // each split enumerated exactly once
        let mut uniq = splits.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), splits.len());
        assert!(splits.iter().all(|(_, stem, _)| !stem.is_empty()));
    }

    #[test]
    fn zero_bounds_give_single_split() {
        let w = to_arabic("ktb");
        assert_eq!(segmentations(&w, 0, 0).len(), 1);
    }

    #[test]
    fn bounds_clamp_to_word_length() {
        let w = to_arabic("kt");
        let splits = segmentations(&w, 99, 99);
        // prefix/suffix lengths clamped, no empty stems
        assert!(splits.iter().all(|(_, stem, _)| !stem.is_empty()));
        assert_eq!(splits.len(), 3); // ("",kt,""), ("",k,"t"), ("k","t","")
    }

    #[test]
    fn normalize_examples() {
        let s = normalize(&to_arabic("sufaraA'a"));
        assert_eq!(to_hsb(&s.key), "sfrA'");
        assert!(s.marks.iter().any(|m| !m.is_empty()));
        let s = normalize(&to_arabic("lilš~am.si"));
        assert_eq!(to_hsb(&s.key), "llšms");
        let s = normalize(&to_arabic("wbsfrAŷhm"));
        assert_eq!(to_hsb(&s.key), "wbsfrAŷhm");
        assert!(s.marks.iter().all(|m| m.is_empty()));
    }
}
