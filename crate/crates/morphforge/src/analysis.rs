//! The analysis record: one complete morphological reading of a word, plus
//! the request type used to filter generation.

use std::fmt;

use crate::db::ComplexMorph;
use crate::features::{Case, FeatureBundle, FormGender, FormNumber, Gender, Number, Pos, State};
use crate::rewrite::{apply_forward, RewriteRule};
use crate::translit::to_arabic;

/// One segment of a word: Arabic surface form plus an identifying tag
/// (the BW tag for closed-class morphemes, the lemma for stems, `BUFF` for
/// stem buffers).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Segment {
    pub form: String,
    pub id: String,
}

/// Word segmentation into (prefix sequence, stem, buffer, suffix sequence).
/// Concatenating all forms and applying the forward rewrite rules
/// reproduces the diacritized word exactly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Segmentation {
    pub prefixes: Vec<Segment>,
    pub stem: Segment,
    pub buffer: Option<Segment>,
    pub suffixes: Vec<Segment>,
}

impl Default for Segment {
    fn default() -> Segment {
        Segment { form: String::new(), id: String::new() }
    }
}

impl Segmentation {
    pub fn concat_forms(&self) -> String {
        let mut s = String::new();
        for p in &self.prefixes {
            s.push_str(&p.form);
        }
        s.push_str(&self.stem.form);
        if let Some(b) = &self.buffer {
            s.push_str(&b.form);
        }
        for x in &self.suffixes {
            s.push_str(&x.form);
        }
        s
    }

    fn render_part(segs: &[Segment]) -> String {
        segs.iter()
            .map(|s| format!("{}/{}", s.form, s.id))
            .collect::<Vec<_>>()
            .join("+")
    }

    /// `pfx/ID+pfx/ID|stem/lemma|buffer|sfx/ID+sfx/ID`; empty parts stay
    /// empty between the pipes.
    pub fn render(&self) -> String {
        format!(
            "{}|{}/{}|{}|{}",
            Self::render_part(&self.prefixes),
            self.stem.form,
            self.stem.id,
            self.buffer.as_ref().map(|b| b.form.clone()).unwrap_or_default(),
            Self::render_part(&self.suffixes),
        )
    }
}

/// One morphological reading.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Analysis {
    pub diac: String,
    pub lemma: String,
    pub bw_tag: String,
    pub features: FeatureBundle,
    pub segmentation: Segmentation,
    pub gloss: String,
    pub root: String,
    pub pattern: String,
}

impl Analysis {
    /// Key used for deduplication and deterministic ordering.
    pub fn sort_key(&self) -> (String, String, String, String) {
        (
            self.diac.clone(),
            self.bw_tag.clone(),
            self.lemma.clone(),
            self.features.serialize(),
        )
    }

    /// Line-oriented TSV in field order:
    /// diac, lemma, bw_tag, features, segmentation, gloss, root, pattern.
    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.diac,
            self.lemma,
            self.bw_tag,
            self.features.serialize(),
            self.segmentation.render(),
            self.gloss,
            self.root,
            self.pattern
        )
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_tsv())
    }
}

/// Join BW fragments of the three sides. A fragment piece without a `/` tag
/// (a stem buffer) glues onto the piece that follows it, mirroring how the
/// buffer letter is written as part of the case ending in BW notation.
pub fn join_bw(prefix_bw: &str, stem_bw: &str, suffix_bw: &str) -> String {
    let joined = [prefix_bw, stem_bw, suffix_bw]
        .iter()
        .filter(|b| !b.is_empty())
        .cloned()
        .collect::<Vec<_>>()
        .join("+");
    let mut out: Vec<String> = Vec::new();
    let mut pending = String::new();
    for piece in joined.split('+').filter(|p| !p.is_empty()) {
        if piece.contains('/') {
            out.push(format!("{pending}{piece}"));
            pending.clear();
        } else {
            pending.push_str(piece);
        }
    }
    if !pending.is_empty() {
        out.push(pending);
    }
    out.join("+")
}

/// Segmentation derived from the three complex morphs. Forms are converted
/// back to Arabic from the romanized BW fragment pieces, which tile the
/// surface exactly (enforced when sheets load).
pub fn build_segmentation(p: &ComplexMorph, s: &ComplexMorph, x: &ComplexMorph) -> Segmentation {
    let parse_part = |bw: &str| -> Vec<Segment> {
        bw.split('+')
            .filter(|p| !p.is_empty())
            .map(|piece| match piece.rsplit_once('/') {
                Some((form, id)) => Segment { form: to_arabic(form), id: id.to_string() },
                None => Segment { form: to_arabic(piece), id: "BUFF".to_string() },
            })
            .collect()
    };
    let prefixes = parse_part(&p.bw_fragment);
    let stem_pieces = parse_part(&s.bw_fragment);
    let mut stem = Segment::default();
    let mut buffer: Option<Segment> = None;
    for (i, piece) in stem_pieces.into_iter().enumerate() {
        if i == 0 {
            stem = Segment { form: piece.form, id: s.lemma.clone() };
        } else {
            // concatenate multi-piece buffers into one segment
            match &mut buffer {
                Some(b) => b.form.push_str(&piece.form),
                None => buffer = Some(Segment { form: piece.form, id: "BUFF".into() }),
            }
        }
    }
    let suffixes = parse_part(&x.bw_fragment);
    Segmentation { prefixes, stem, buffer, suffixes }
}

/// Assemble the full analysis for an admitted triple.
pub fn assemble(
    p: &ComplexMorph,
    s: &ComplexMorph,
    x: &ComplexMorph,
    merged: FeatureBundle,
    rules: &[RewriteRule],
) -> Analysis {
    let concat = format!("{}{}{}", p.surface_diac, s.surface_diac, x.surface_diac);
    let diac = apply_forward(&concat, rules);
    Analysis {
        diac,
        lemma: s.lemma.clone(),
        bw_tag: join_bw(&p.bw_fragment, &s.bw_fragment, &x.bw_fragment),
        features: merged,
        segmentation: build_segmentation(p, s, x),
        gloss: s.gloss.clone(),
        root: s.root.clone(),
        pattern: s.pattern.clone(),
    }
}

/// One clitic slot of a request: unconstrained, explicitly empty, or a
/// specific clitic.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SlotReq {
    #[default]
    Any,
    Empty,
    Is(String),
}

impl SlotReq {
    fn matches(&self, slot: &Option<String>) -> bool {
        match self {
            SlotReq::Any => true,
            SlotReq::Empty => slot.is_none(),
            SlotReq::Is(v) => slot.as_deref() == Some(v.as_str()),
        }
    }
}

/// A (possibly partial) feature request. Unset scalar fields are wildcards;
/// set fields are conjunctive filters, never defaults — an empty request
/// returns the whole lexeme.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureRequest {
    pub gender: Gender,
    pub number: Number,
    pub case: Case,
    pub state: State,
    pub form_gender: FormGender,
    pub form_number: FormNumber,
    pub prc0: SlotReq,
    pub prc1: SlotReq,
    pub prc2: SlotReq,
    pub prc3: SlotReq,
    pub enc0: SlotReq,
}

impl FeatureRequest {
    /// All clitic slots required empty (baseword requests).
    pub fn no_clitics() -> FeatureRequest {
        FeatureRequest {
            prc0: SlotReq::Empty,
            prc1: SlotReq::Empty,
            prc2: SlotReq::Empty,
            prc3: SlotReq::Empty,
            enc0: SlotReq::Empty,
            ..FeatureRequest::default()
        }
    }

    pub fn matches(&self, fb: &FeatureBundle) -> bool {
        (!self.gender.is_set() || self.gender == fb.gender)
            && (!self.number.is_set() || self.number == fb.number)
            && (!self.case.is_set() || self.case == fb.case)
            && (!self.state.is_set() || self.state == fb.state)
            && (!self.form_gender.is_set() || self.form_gender == fb.form_gender)
            && (!self.form_number.is_set() || self.form_number == fb.form_number)
            && self.prc0.matches(&fb.prc0)
            && self.prc1.matches(&fb.prc1)
            && self.prc2.matches(&fb.prc2)
            && self.prc3.matches(&fb.prc3)
            && self.enc0.matches(&fb.enc0)
    }
}

/// POS filter for generation: a concrete POS or any.
pub type PosReq = Option<Pos>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dangling_buffer_merges_into_following_suffix_segment() {
        let bw = join_bw(
            "wa/CONJ+bi/PREP",
            "sufaraA/NOUN+ŷ",
            "i/CASE_GEN+him/POSS_PRON_3MP",
        );
        assert_eq!(bw, "wa/CONJ+bi/PREP+sufaraA/NOUN+ŷi/CASE_GEN+him/POSS_PRON_3MP");
    }

    #[test]
    fn dangling_buffer_without_suffix_stands_alone() {
        assert_eq!(join_bw("", "x/NOUN+'", ""), "x/NOUN+'");
        assert_eq!(join_bw("", "x/NOUN", ""), "x/NOUN");
    }

    #[test]
    fn request_matching() {
        let fb = FeatureBundle::parse("pos:noun gen:m num:p cas:g stt:c enc0:3mp_poss").unwrap();
        let mut req = FeatureRequest::default();
        assert!(req.matches(&fb));
        req.number = Number::P;
        req.enc0 = SlotReq::Is("3mp_poss".into());
        assert!(req.matches(&fb));
        req.case = Case::N;
        assert!(!req.matches(&fb));
        let bare = FeatureRequest::no_clitics();
        assert!(!bare.matches(&fb));
    }
}
