//! Functional and form features of words and morphemes.
//!
//! Functional gender/number describe what a word *is*; form gender/number
//! describe the shape of its suffix. The two legally diverge (a functionally
//! masculine-plural noun may wear a feminine-plural suffix), which is why
//! they are carried as separate fields and never conflated.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pos {
    Noun,
    Adj,
    AdjComp,
}

impl Pos {
    pub fn as_str(&self) -> &'static str {
        match self {
            Pos::Noun => "noun",
            Pos::Adj => "adj",
            Pos::AdjComp => "adj_comp",
        }
    }

    pub fn parse(s: &str) -> Option<Pos> {
        match s {
            "noun" => Some(Pos::Noun),
            "adj" => Some(Pos::Adj),
            "adj_comp" => Some(Pos::AdjComp),
            _ => None,
        }
    }

    /// Tag used in the stem segment of a BW analysis string.
    pub fn bw_tag(&self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Adj => "ADJ",
            Pos::AdjComp => "ADJ_COMP",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

macro_rules! feature_enum {
    ($name:ident { $($variant:ident => $tag:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
        pub enum $name {
            $($variant,)+
            #[default]
            Unset,
        }

        impl $name {
            pub fn as_str(&self) -> &'static str {
                match self {
                    $($name::$variant => $tag,)+
                    $name::Unset => "-",
                }
            }

            pub fn parse(s: &str) -> Option<$name> {
                match s {
                    $($tag => Some($name::$variant),)+
                    "-" => Some($name::Unset),
                    _ => None,
                }
            }

            pub fn is_set(&self) -> bool {
                !matches!(self, $name::Unset)
            }

            /// `self` when set, otherwise `other`.
            pub fn or(self, other: $name) -> $name {
                if self.is_set() { self } else { other }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

feature_enum!(Gender { M => "m", F => "f" });
feature_enum!(Number { S => "s", D => "d", P => "p" });
// `u` ("undefined") is a legal terminal value for case and state, distinct
// from unset.
feature_enum!(Case { N => "n", A => "a", G => "g", U => "u" });
feature_enum!(State { I => "i", D => "d", C => "c", U => "u" });
feature_enum!(FormGender { M => "M", F => "F" });
feature_enum!(FormNumber { S => "S", D => "D", P => "P" });

/// Clitic slot occupancy. The slot label is a closed vocabulary token such
/// as `Al_det`, `bi_prep`, `wa_conj`, `Âa_ques` or `3mp_poss`; `None` means
/// the slot is empty.
pub type Slot = Option<String>;

/// The morphosyntactic feature bundle of a word or of a morpheme's
/// contribution to one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FeatureBundle {
    pub pos: Option<Pos>,
    pub gender: Gender,
    pub number: Number,
    pub case: Case,
    pub state: State,
    pub form_gender: FormGender,
    pub form_number: FormNumber,
    pub prc0: Slot,
    pub prc1: Slot,
    pub prc2: Slot,
    pub prc3: Slot,
    pub enc0: Slot,
}

pub const FEATURE_KEYS: [&str; 12] = [
    "pos", "gen", "num", "cas", "stt", "fgen", "fnum", "prc0", "prc1", "prc2", "prc3", "enc0",
];

fn slot_str(s: &Slot) -> &str {
    s.as_deref().unwrap_or("0")
}

impl FeatureBundle {
    /// Serialize as space-separated `key:value` pairs in the fixed key
    /// order. Every key is always present; unset scalar features print as
    /// `-`, empty clitic slots as `0`.
    pub fn serialize(&self) -> String {
        format!(
            "pos:{} gen:{} num:{} cas:{} stt:{} fgen:{} fnum:{} prc0:{} prc1:{} prc2:{} prc3:{} enc0:{}",
            self.pos.map(|p| p.as_str()).unwrap_or("-"),
            self.gender,
            self.number,
            self.case,
            self.state,
            self.form_gender,
            self.form_number,
            slot_str(&self.prc0),
            slot_str(&self.prc1),
            slot_str(&self.prc2),
            slot_str(&self.prc3),
            slot_str(&self.enc0),
        )
    }

    /// Parse `key:value` pairs. Keys may appear in any order and may be
    /// omitted (sparse form used in the spec sheets).
    pub fn parse(s: &str) -> Result<FeatureBundle, FeatureParseError> {
        let mut fb = FeatureBundle::default();
        for pair in s.split_whitespace() {
            if pair == "-" {
                continue;
            }
            let (key, value) = pair
                .split_once(':')
                .ok_or_else(|| FeatureParseError::Malformed(pair.to_string()))?;
            let bad = || FeatureParseError::BadValue(key.to_string(), value.to_string());
            match key {
                "pos" => {
                    fb.pos = if value == "-" {
                        None
                    } else {
                        Some(Pos::parse(value).ok_or_else(bad)?)
                    }
                }
                "gen" => fb.gender = Gender::parse(value).ok_or_else(bad)?,
                "num" => fb.number = Number::parse(value).ok_or_else(bad)?,
                "cas" => fb.case = Case::parse(value).ok_or_else(bad)?,
                "stt" => fb.state = State::parse(value).ok_or_else(bad)?,
                "fgen" => fb.form_gender = FormGender::parse(value).ok_or_else(bad)?,
                "fnum" => fb.form_number = FormNumber::parse(value).ok_or_else(bad)?,
                "prc0" => fb.prc0 = parse_slot(value),
                "prc1" => fb.prc1 = parse_slot(value),
                "prc2" => fb.prc2 = parse_slot(value),
                "prc3" => fb.prc3 = parse_slot(value),
                "enc0" => fb.enc0 = parse_slot(value),
                _ => return Err(FeatureParseError::UnknownKey(key.to_string())),
            }
        }
        Ok(fb)
    }

    /// True when the bundle constrains nothing (wildcard request).
    pub fn is_empty(&self) -> bool {
        *self == FeatureBundle::default()
    }
}

fn parse_slot(v: &str) -> Slot {
    if v == "0" || v == "-" {
        None
    } else {
        Some(v.to_string())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeatureParseError {
    #[error("malformed feature pair `{0}` (expected key:value)")]
    Malformed(String),
    #[error("bad value `{1}` for feature key `{0}`")]
    BadValue(String, String),
    #[error("unknown feature key `{0}`")]
    UnknownKey(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MergeError {
    /// Two morphemes of one word claimed the same clitic slot. The compiler
    /// is supposed to make this impossible, so hitting it means a database
    /// construction bug, not bad input.
    #[error("two contributors to clitic slot {0}")]
    DuplicateCliticSlot(&'static str),
}

fn merge_slot(
    name: &'static str,
    acc: &mut Slot,
    next: &Slot,
) -> Result<(), MergeError> {
    if let Some(v) = next {
        if acc.is_some() {
            return Err(MergeError::DuplicateCliticSlot(name));
        }
        *acc = Some(v.clone());
    }
    Ok(())
}

/// Fold the feature contributions of a whole word.
///
/// Precedence: the stem's gender/number override whatever the suffixes say;
/// case, state and the form features come from the suffix side only; POS
/// comes from the stem; each clitic slot comes from the single clitic that
/// fills it.
pub fn merge_features(
    stem: &FeatureBundle,
    prefixes: &[&FeatureBundle],
    suffixes: &[&FeatureBundle],
) -> Result<FeatureBundle, MergeError> {
    let mut out = FeatureBundle {
        pos: stem.pos,
        ..FeatureBundle::default()
    };

    let mut sfx_gender = Gender::Unset;
    let mut sfx_number = Number::Unset;
    for s in suffixes {
        sfx_gender = sfx_gender.or(s.gender);
        sfx_number = sfx_number.or(s.number);
        out.case = out.case.or(s.case);
        out.state = out.state.or(s.state);
        out.form_gender = out.form_gender.or(s.form_gender);
        out.form_number = out.form_number.or(s.form_number);
    }
    out.gender = stem.gender.or(sfx_gender);
    out.number = stem.number.or(sfx_number);

    for fb in prefixes.iter().chain(suffixes.iter()) {
        merge_slot("prc0", &mut out.prc0, &fb.prc0)?;
        merge_slot("prc1", &mut out.prc1, &fb.prc1)?;
        merge_slot("prc2", &mut out.prc2, &fb.prc2)?;
        merge_slot("prc3", &mut out.prc3, &fb.prc3)?;
        merge_slot("enc0", &mut out.enc0, &fb.enc0)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fb(s: &str) -> FeatureBundle {
        FeatureBundle::parse(s).unwrap()
    }

    #[test]
    fn broken_plural_override_wins() {
        // sufaraA carries gen:m num:p; the MS suffix would say m/s
        let stem = fb("pos:noun gen:m num:p");
        let sfx = fb("gen:m num:s cas:g stt:i fgen:M fnum:S");
        let merged = merge_features(&stem, &[], &[&sfx]).unwrap();
        assert_eq!(merged.gender, Gender::M);
        assert_eq!(merged.number, Number::P);
        assert_eq!(merged.case, Case::G);
        assert_eq!(merged.form_number, FormNumber::S);
    }

    #[test]
    fn pure_default_mapping() {
        let stem = fb("pos:noun");
        let sfx = fb("gen:f num:p cas:n stt:d fgen:F fnum:P");
        let merged = merge_features(&stem, &[], &[&sfx]).unwrap();
        assert_eq!(merged.serialize(), fb("pos:noun gen:f num:p cas:n stt:d fgen:F fnum:P").serialize());
    }

    #[test]
    fn functional_mp_with_fp_form() {
        // AmtHAn: functionally masculine plural under a feminine-plural suffix
        let stem = fb("pos:noun gen:m num:p");
        let sfx = fb("gen:f num:p cas:n stt:i fgen:F fnum:P");
        let merged = merge_features(&stem, &[], &[&sfx]).unwrap();
        assert_eq!(merged.gender, Gender::M);
        assert_eq!(merged.number, Number::P);
        assert_eq!(merged.form_gender, FormGender::F);
        assert_eq!(merged.form_number, FormNumber::P);
    }

    #[test]
    fn duplicate_clitic_slot_is_internal_error() {
        let stem = fb("pos:noun");
        let a = fb("prc1:bi_prep");
        let b = fb("prc1:li_prep");
        let err = merge_features(&stem, &[&a, &b], &[]).unwrap_err();
        assert_eq!(err, MergeError::DuplicateCliticSlot("prc1"));
    }

    #[test]
    fn serialize_parse_round_trip() {
        let b = fb("pos:adj gen:f num:d cas:u stt:c fgen:F fnum:D prc0:Al_det enc0:3mp_poss");
        assert_eq!(FeatureBundle::parse(&b.serialize()).unwrap(), b);
    }

    proptest! {
        /// merge_features must not depend on the listing order of prefix
        /// contributors.
        #[test]
        fn prefix_order_irrelevant(perm in proptest::sample::select(vec![
            [0usize, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0],
        ])) {
            let stem = fb("pos:noun gen:f");
            let parts = [fb("prc2:wa_conj"), fb("prc1:bi_prep"), fb("prc3:Âa_ques")];
            let base = merge_features(&stem, &[&parts[0], &parts[1], &parts[2]], &[]).unwrap();
            let permuted = merge_features(
                &stem,
                &[&parts[perm[0]], &parts[perm[1]], &parts[perm[2]]],
                &[],
            ).unwrap();
            prop_assert_eq!(base, permuted);
        }
    }
}
