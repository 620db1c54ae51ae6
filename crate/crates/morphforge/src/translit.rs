//! Arabic script utilities and the HSB romanization.
//!
//! All storage (spec sheets, compiled databases) is Arabic script. The HSB
//! scheme is a strict one-to-one character romanization used for terminal
//! display (`--translit hsb`) and for accepting Latin-keyboard input: every
//! Arabic letter and diacritic maps to exactly one Latin/IPA-ish character,
//! so both directions are lossless.

/// One-to-one (Arabic, HSB) character pairs.
///
/// Letters first, then the diacritic block. The diacritic block must stay in
/// sync with [`is_diacritic`].
const PAIRS: &[(char, char)] = &[
    // hamza and carriers
    ('\u{0621}', '\''), // ء
    ('\u{0622}', 'Ā'),  // آ
    ('\u{0623}', 'Â'),  // أ
    ('\u{0624}', 'ŵ'),  // ؤ
    ('\u{0625}', 'Ǎ'),  // إ
    ('\u{0626}', 'ŷ'),  // ئ
    ('\u{0627}', 'A'),  // ا
    // consonants
    ('\u{0628}', 'b'),
    ('\u{0629}', 'ħ'), // ة
    ('\u{062A}', 't'),
    ('\u{062B}', 'v'),
    ('\u{062C}', 'j'),
    ('\u{062D}', 'H'),
    ('\u{062E}', 'x'),
    ('\u{062F}', 'd'),
    ('\u{0630}', 'ð'),
    ('\u{0631}', 'r'),
    ('\u{0632}', 'z'),
    ('\u{0633}', 's'),
    ('\u{0634}', 'š'),
    ('\u{0635}', 'S'),
    ('\u{0636}', 'D'),
    ('\u{0637}', 'T'),
    ('\u{0638}', 'Ď'),
    ('\u{0639}', 'ς'),
    ('\u{063A}', 'γ'),
    ('\u{0641}', 'f'),
    ('\u{0642}', 'q'),
    ('\u{0643}', 'k'),
    ('\u{0644}', 'l'),
    ('\u{0645}', 'm'),
    ('\u{0646}', 'n'),
    ('\u{0647}', 'h'),
    ('\u{0648}', 'w'),
    ('\u{0649}', 'ý'), // ى
    ('\u{064A}', 'y'),
    // diacritics
    ('\u{064B}', 'ã'), // fathatan
    ('\u{064C}', 'ũ'), // dammatan
    ('\u{064D}', 'ĩ'), // kasratan
    ('\u{064E}', 'a'), // fatha
    ('\u{064F}', 'u'), // damma
    ('\u{0650}', 'i'), // kasra
    ('\u{0651}', '~'), // shadda
    ('\u{0652}', '.'), // sukun
    ('\u{0670}', 'á'), // dagger alif
];

/// True for the marks stripped by [`strip`]: short vowels, tanween, shadda,
/// sukun and the dagger alif. Letters, including all hamza seats and the
/// ta-marbuta, are never stripped.
pub fn is_diacritic(c: char) -> bool {
    matches!(c, '\u{064B}'..='\u{0652}' | '\u{0670}')
}

/// True for any character of the Arabic block we handle.
pub fn is_arabic(c: char) -> bool {
    ('\u{0600}'..='\u{06FF}').contains(&c)
}

fn ar_to_hsb_char(c: char) -> Option<char> {
    PAIRS.iter().find(|(a, _)| *a == c).map(|(_, h)| *h)
}

fn hsb_to_ar_char(c: char) -> Option<char> {
    PAIRS.iter().find(|(_, h)| *h == c).map(|(a, _)| *a)
}

/// Romanize an Arabic string. Characters outside the table pass through.
pub fn to_hsb(s: &str) -> String {
    s.chars().map(|c| ar_to_hsb_char(c).unwrap_or(c)).collect()
}

/// Inverse of [`to_hsb`]. Characters outside the table pass through.
pub fn to_arabic(s: &str) -> String {
    s.chars().map(|c| hsb_to_ar_char(c).unwrap_or(c)).collect()
}

/// Heuristic used by the CLI: input containing any Arabic-block character is
/// taken as Arabic script, anything else as HSB romanization.
pub fn ensure_arabic(s: &str) -> String {
    if s.chars().any(is_arabic) {
        s.to_string()
    } else {
        to_arabic(s)
    }
}

/// A word split into its bare-letter match key and the diacritics that were
/// attached to each letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stripped {
    /// Letters only; this is the lookup key used by the analyzer.
    pub key: String,
    /// Marks preceding the first letter (degenerate input).
    pub leading: String,
    /// `marks[i]` holds the diacritics that followed letter `i`, in order.
    pub marks: Vec<String>,
}

/// Remove diacritics, recording where each one stood.
pub fn strip(word: &str) -> Stripped {
    let mut key = String::new();
    let mut leading = String::new();
    let mut marks: Vec<String> = Vec::new();
    for c in word.chars() {
        if is_diacritic(c) {
            match marks.last_mut() {
                Some(m) => m.push(c),
                None => leading.push(c),
            }
        } else {
            key.push(c);
            marks.push(String::new());
        }
    }
    Stripped { key, leading, marks }
}

/// Dediacritized match key of a surface form.
pub fn dediacritize(word: &str) -> String {
    word.chars().filter(|c| !is_diacritic(*c)).collect()
}

/// Lenient diacritic compatibility: `input` conflicts with `candidate` only
/// when some letter of the input carries a mark sequence that is not a
/// subsequence of the candidate's marks at the same letter. Absent marks
/// never conflict. Returns `true` when the (fully diacritized) candidate is
/// compatible. If the letter skeletons differ the filter abstains and
/// accepts.
pub fn diacritics_compatible(input: &str, candidate: &str) -> bool {
    let i = strip(input);
    let c = strip(candidate);
    if i.key != c.key {
        return true;
    }
    for (im, cm) in i.marks.iter().zip(c.marks.iter()) {
        if !is_subsequence(im, cm) {
            return false;
        }
    }
    true
}

fn is_subsequence(needle: &str, hay: &str) -> bool {
    let mut it = hay.chars();
    'outer: for n in needle.chars() {
        for h in it.by_ref() {
            if h == n {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hsb_round_trips_attested_words() {
        for w in [
            "sufaraA'a",
            "wabisufaraAŷihim",
            "lilš~am.si",
            "safiyratunaA",
            "mab.naAya",
            "hwA'ã",
            "qaADĩ",
            "qaADiyAã",
            "dun.yA",
            "Âbuw",
            "xaliyfaħ",
        ] {
            let ar = to_arabic(w);
            assert!(ar.chars().all(is_arabic), "{w} -> {ar}");
            assert_eq!(to_hsb(&ar), w);
        }
    }

    #[test]
    fn strip_examples() {
        // sufaraA'a -> key sfrA' with the final fatha recorded on the hamza
        let s = strip(&to_arabic("sufaraA'a"));
        assert_eq!(to_hsb(&s.key), "sfrA'");
        assert_eq!(to_hsb(&s.marks[4]), "a");

        let s = strip(&to_arabic("lilš~am.si"));
        assert_eq!(to_hsb(&s.key), "llšms");

        // undiacritized input is its own key
        let s = strip(&to_arabic("ktAb"));
        assert_eq!(to_hsb(&s.key), "ktAb");
        assert!(s.marks.iter().all(|m| m.is_empty()));
    }

    #[test]
    fn diacritic_filter_is_lenient() {
        let full = to_arabic("kitaAbũ");
        assert!(diacritics_compatible(&to_arabic("ktAb"), &full));
        assert!(diacritics_compatible(&full, &full));
        // a contradictory tanween conflicts
        assert!(!diacritics_compatible(&to_arabic("kitaAbã"), &full));
        // a contradictory short vowel conflicts
        assert!(!diacritics_compatible(&to_arabic("kutaAb"), &full));
        // shadda present in input but not in candidate conflicts
        assert!(!diacritics_compatible(&to_arabic("kit~aAb"), &full));
    }

    fn hsb_alphabet() -> Vec<char> {
        super::PAIRS.iter().map(|(_, h)| *h).collect()
    }

    proptest! {
        #[test]
        fn translit_round_trip(idx in proptest::collection::vec(0usize..super::PAIRS.len(), 0..24)) {
            let alpha = hsb_alphabet();
            let hsb: String = idx.iter().map(|i| alpha[*i]).collect();
            prop_assert_eq!(to_hsb(&to_arabic(&hsb)), hsb);
        }

        #[test]
        fn strip_preserves_letters(idx in proptest::collection::vec(0usize..super::PAIRS.len(), 0..24)) {
            let alpha = hsb_alphabet();
            let hsb: String = idx.iter().map(|i| alpha[*i]).collect();
            let ar = to_arabic(&hsb);
            let s = strip(&ar);
            // reinserting every mark after its letter reproduces the word
            let mut rebuilt = s.leading.clone();
            for (c, m) in s.key.chars().zip(s.marks.iter()) {
                rebuilt.push(c);
                rebuilt.push_str(m);
            }
            prop_assert_eq!(rebuilt, ar);
        }
    }
}
