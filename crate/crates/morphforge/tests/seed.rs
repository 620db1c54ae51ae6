//! Behavioural checks over the bundled seed lexicon: phenomenon coverage,
//! grid shape, lexeme QA, and evaluation-harness plumbing.

use std::collections::BTreeSet;
use std::path::PathBuf;

use morphforge::analysis::{FeatureRequest, SlotReq};
use morphforge::engine::generate::Axis;
use morphforge::engine::Engine;
use morphforge::features::{Case, Gender, Number, Pos, State};
use morphforge::lexqa::{classify_paradigm, parse_paradigms, ClassifyOutcome};
use morphforge::spec::{has_errors, load_specs, validate_specs};
use morphforge::translit::{to_arabic, to_hsb};
use morphforge::{compile, MorphDb, SpecSet};

fn seed_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs/seed")
}

fn seed() -> (SpecSet, MorphDb) {
    let specs = load_specs(&seed_dir()).expect("seed loads");
    let db = compile(&specs).expect("seed compiles");
    (specs, db)
}

fn req(pairs: &str) -> FeatureRequest {
    let mut r = FeatureRequest::no_clitics();
    for pair in pairs.split_whitespace() {
        let (k, v) = pair.split_once(':').unwrap();
        match k {
            "gen" => r.gender = Gender::parse(v).unwrap(),
            "num" => r.number = Number::parse(v).unwrap(),
            "cas" => r.case = Case::parse(v).unwrap(),
            "stt" => r.state = State::parse(v).unwrap(),
            "prc0" => r.prc0 = SlotReq::Is(v.to_string()),
            "prc1" => r.prc1 = SlotReq::Is(v.to_string()),
            "prc2" => r.prc2 = SlotReq::Is(v.to_string()),
            "prc3" => r.prc3 = SlotReq::Is(v.to_string()),
            "enc0" => r.enc0 = SlotReq::Is(v.to_string()),
            _ => panic!("bad key {k}"),
        }
    }
    r
}

fn surfaces(engine: &Engine, lemma: &str, pos: Pos, request: &FeatureRequest) -> Vec<String> {
    let mut v: Vec<String> = engine
        .generate(&to_arabic(lemma), Some(pos), request)
        .unwrap()
        .iter()
        .map(|a| to_hsb(&a.diac))
        .collect();
    v.sort();
    v.dedup();
    v
}

#[test]
fn seed_validates_without_errors() {
    let specs = load_specs(&seed_dir()).expect("seed loads");
    let diags = validate_specs(&specs);
    assert!(!has_errors(&diags), "{diags:#?}");
}

#[test]
fn table_one_running_example() {
    let (_, db) = seed();
    let engine = Engine::new(&db);
    let analyses = engine
        .generate(
            &to_arabic("safiyr"),
            Some(Pos::Noun),
            &req("gen:m num:p cas:g stt:c enc0:3mp_poss prc1:bi_prep prc2:wa_conj"),
        )
        .unwrap();
    let with_empty_rest: Vec<_> = analyses
        .iter()
        .filter(|a| a.features.prc0.is_none() && a.features.prc3.is_none())
        .collect();
    assert_eq!(with_empty_rest.len(), 1, "{analyses:#?}");
    let a = with_empty_rest[0];
    assert_eq!(to_hsb(&a.diac), "wabisufaraAŷihim");
    assert_eq!(
        a.bw_tag,
        "wa/CONJ+bi/PREP+sufaraA/NOUN+ŷi/CASE_GEN+him/POSS_PRON_3MP"
    );
    assert_eq!(to_hsb(&a.lemma), "safiyr");
    // undiacritized lookup recovers the same reading
    let back = engine.analyze(&to_arabic("wbsfrAŷhm")).unwrap();
    assert!(back.iter().any(|b| b.diac == a.diac && b.bw_tag == a.bw_tag));
}

#[test]
fn diptote_indefinite_accusative_uses_the_definite_shape() {
    let (_, db) = seed();
    let engine = Engine::new(&db);
    assert_eq!(
        surfaces(&engine, "safiyr", Pos::Noun, &req("num:p cas:a stt:i gen:m")),
        vec!["sufaraA'a".to_string()]
    );
}

#[test]
fn diptote_surface_is_four_ways_ambiguous() {
    let (_, db) = seed();
    let engine = Engine::new(&db);
    let analyses = engine.analyze(&to_arabic("sufaraA'a")).unwrap();
    let mut readings: BTreeSet<(Case, State)> = BTreeSet::new();
    for a in &analyses {
        assert_eq!(to_hsb(&a.diac), "sufaraA'a");
        readings.insert((a.features.case, a.features.state));
    }
    let want: BTreeSet<(Case, State)> = [
        (Case::A, State::I),
        (Case::G, State::I),
        (Case::A, State::D),
        (Case::A, State::C),
    ]
    .into_iter()
    .collect();
    assert_eq!(readings, want, "{analyses:#?}");
}

#[test]
fn phenomenon_sun_letter_after_elided_determiner() {
    let (_, db) = seed();
    let engine = Engine::new(&db);
    let forms = surfaces(
        &engine,
        "šamos",
        Pos::Noun,
        &req("cas:g stt:d prc0:Al_det prc1:li_prep"),
    );
    assert_eq!(forms, vec!["lilš~am.si".to_string()]);
}

#[test]
fn phenomenon_ta_marbuta_before_enclitic() {
    let (_, db) = seed();
    let engine = Engine::new(&db);
    let forms = surfaces(
        &engine,
        "safiyr",
        Pos::Noun,
        &req("gen:f num:s cas:n stt:c enc0:1p_poss"),
    );
    assert_eq!(forms, vec!["safiyratunaA".to_string()]);
}

#[test]
fn phenomenon_maqsura_turns_to_alif_before_enclitic() {
    let (_, db) = seed();
    let engine = Engine::new(&db);
    let forms = surfaces(&engine, "mab.naý", Pos::Noun, &req("enc0:1s_poss"));
    assert_eq!(forms, vec!["mab.naAya".to_string()]);
}

#[test]
fn phenomenon_him_hum_allomorph_selection() {
    let (_, db) = seed();
    let engine = Engine::new(&db);
    // after the construct genitive /i/ the enclitic fronts to him
    assert_eq!(
        surfaces(&engine, "kitaAb", Pos::Noun, &req("num:s cas:g stt:c enc0:3mp_poss")),
        vec!["kitaAbihim".to_string()]
    );
    // after /u/ it stays hum
    assert_eq!(
        surfaces(&engine, "kitaAb", Pos::Noun, &req("num:s cas:n stt:c enc0:3mp_poss")),
        vec!["kitaAbuhum".to_string()]
    );
}

#[test]
fn phenomenon_tanween_alif_drop_after_hamza() {
    let (_, db) = seed();
    let engine = Engine::new(&db);
    assert_eq!(
        surfaces(&engine, "hwA'", Pos::Noun, &req("cas:a stt:i")),
        vec!["hwA'ã".to_string()]
    );
    // a plain stem keeps the alif
    assert_eq!(
        surfaces(&engine, "kitaAb", Pos::Noun, &req("num:s cas:a stt:i")),
        vec!["kitaAbAã".to_string()]
    );
}

#[test]
fn phenomenon_defective_pair() {
    let (_, db) = seed();
    let engine = Engine::new(&db);
    // nominative indefinite realized with the genitive-form suffix
    assert_eq!(
        surfaces(&engine, "qaADĩ", Pos::Noun, &req("cas:n stt:i")),
        vec!["qaADĩ".to_string()]
    );
    assert_eq!(
        surfaces(&engine, "qaADĩ", Pos::Noun, &req("cas:g stt:i")),
        vec!["qaADĩ".to_string()]
    );
    assert_eq!(
        surfaces(&engine, "qaADĩ", Pos::Noun, &req("cas:a stt:i")),
        vec!["qaADiyAã".to_string()]
    );
}

#[test]
fn phenomenon_invariable_identical_across_case_and_state() {
    let (_, db) = seed();
    let engine = Engine::new(&db);
    let grid = engine
        .paradigm_grid(&to_arabic("dun.yA"), Some(Pos::Noun), Axis::Case, Axis::State)
        .unwrap();
    for (ri, _) in grid.row_values.iter().enumerate() {
        for (ci, _) in grid.col_values.iter().enumerate() {
            let cell = grid.cell_surfaces(ri, ci);
            assert_eq!(
                cell,
                vec![to_arabic("dun.yA")],
                "cell ({ri},{ci}) differs"
            );
        }
    }
}

#[test]
fn phenomenon_five_nouns_mark_case_with_long_vowels() {
    let (_, db) = seed();
    let engine = Engine::new(&db);
    assert_eq!(
        surfaces(&engine, "Âb", Pos::Noun, &req("cas:n stt:c")),
        vec!["Âbuw".to_string()]
    );
    assert_eq!(
        surfaces(&engine, "Âb", Pos::Noun, &req("cas:a stt:c")),
        vec!["ÂbaA".to_string()]
    );
    assert_eq!(
        surfaces(&engine, "Âb", Pos::Noun, &req("cas:g stt:c")),
        vec!["Âbiy".to_string()]
    );
    // with an enclitic the him/hum choice follows the long vowel
    assert_eq!(
        surfaces(&engine, "Âb", Pos::Noun, &req("cas:g stt:c enc0:3mp_poss")),
        vec!["Âbiyhim".to_string()]
    );
    assert_eq!(
        surfaces(&engine, "Âb", Pos::Noun, &req("cas:n stt:c enc0:3mp_poss")),
        vec!["Âbuwhum".to_string()]
    );
}

#[test]
fn hamza_seat_follows_the_vowel_under_enclitics() {
    let (_, db) = seed();
    let engine = Engine::new(&db);
    assert_eq!(
        surfaces(&engine, "safiyr", Pos::Noun, &req("num:p cas:n stt:c enc0:3ms_poss")),
        vec!["sufaraAŵuhu".to_string()]
    );
    assert_eq!(
        surfaces(&engine, "safiyr", Pos::Noun, &req("num:p cas:g stt:c enc0:3ms_poss")),
        vec!["sufaraAŷihi".to_string()]
    );
    assert_eq!(
        surfaces(&engine, "safiyr", Pos::Noun, &req("num:p cas:a stt:c enc0:3ms_poss")),
        vec!["sufaraA'ahu".to_string()]
    );
    // word-final hamza stays on the line even in construct
    assert_eq!(
        surfaces(&engine, "safiyr", Pos::Noun, &req("num:p cas:n stt:c enc0:0")),
        vec!["sufaraA'u".to_string()]
    );
    // 1s iy forces the ya seat
    assert_eq!(
        surfaces(&engine, "safiyr", Pos::Noun, &req("num:p stt:c enc0:1s_poss gen:m")),
        vec!["sufaraAŷiy".to_string()]
    );
}

#[test]
fn paradigm_gap_feminine_of_masculine_only_noun() {
    let (_, db) = seed();
    let engine = Engine::new(&db);
    let forms = surfaces(&engine, "kitaAb", Pos::Noun, &req("gen:f"));
    assert!(forms.is_empty());
}

#[test]
fn unknown_lemma_is_signalled() {
    let (_, db) = seed();
    let engine = Engine::new(&db);
    assert!(engine
        .generate(&to_arabic("zzz"), Some(Pos::Noun), &FeatureRequest::default())
        .is_err());
}

#[test]
fn two_plural_forms_share_one_slot() {
    let (_, db) = seed();
    let engine = Engine::new(&db);
    let forms = surfaces(&engine, "kabiyr", Pos::Adj, &req("gen:m num:p cas:n stt:i"));
    assert_eq!(forms, vec!["kabiyruwna".to_string(), "kibaArũ".to_string()]);
}

#[test]
fn seed_classifies_totally_and_uniquely() {
    let (specs, _) = seed();
    let text = std::fs::read_to_string(seed_dir().join("paradigms.tsv")).unwrap();
    let index = parse_paradigms(&text).unwrap();
    let mut seen = Vec::new();
    for (key, stems) in specs.lexemes() {
        match classify_paradigm(&specs, &index, &stems) {
            ClassifyOutcome::Class(id) => seen.push((to_hsb(&key.0), id)),
            ClassifyOutcome::OutOfNorm { observed, candidates } => panic!(
                "{} is out of norm: observed {observed:?}, candidates {candidates:?}",
                to_hsb(&key.0)
            ),
        }
    }
    let expect = [
        ("safiyr", "N_PROF_BRK"),
        ("kitaAb", "N_MS_BRK"),
        ("jadiyd", "ADJ_FULL_SOUND"),
        ("kabiyr", "ADJ_SOUND_BRK"),
        ("dun.yA", "N_INVAR"),
        ("mab.naý", "N_INDECL"),
        ("Âb", "N_FIVE"),
        ("qaADĩ", "N_DEFECTIVE"),
        ("AimotiHaAn", "N_MP_FPFORM"),
        ("TaAlib", "N_MP_FSFORM"),
        ("rajul", "N_MS_BRK_POP"),
        ("naAr", "N_FS_MSFORM"),
        ("muxaAbaraAt", "N_PLT"),
        ("hwA'", "MS_ONLY"),
        ("Âakobar", "MS_ONLY"),
    ];
    for (lemma, class) in expect {
        assert!(
            seen.iter().any(|(l, c)| l == lemma && c == class),
            "{lemma} should classify as {class}; got {:?}",
            seen.iter().find(|(l, _)| l == lemma)
        );
    }
}

#[test]
fn amthan_classifies_as_mp_with_fp_form() {
    let (specs, _) = seed();
    let text = std::fs::read_to_string(seed_dir().join("paradigms.tsv")).unwrap();
    let index = parse_paradigms(&text).unwrap();
    let lexemes = specs.lexemes();
    let stems = &lexemes[&(to_arabic("AimotiHaAn"), Pos::Noun)];
    match classify_paradigm(&specs, &index, stems) {
        ClassifyOutcome::Class(id) => assert_eq!(id, "N_MP_FPFORM"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn qa_flags_the_planted_ambiguity_and_nothing_fatal() {
    let (specs, _) = seed();
    let text = std::fs::read_to_string(seed_dir().join("paradigms.tsv")).unwrap();
    let index = parse_paradigms(&text).unwrap();
    let issues = morphforge::lexqa::qa_report(&specs, &index);
    use morphforge::lexqa::IssueCode;
    // kitaAb (book) and kitaAbaħ (writing) share a stem surface
    assert!(issues
        .iter()
        .any(|i| i.code == IssueCode::InterParadigmAmbiguity && to_hsb(&i.lemma) == "kitaAb"));
    // the defective first stem embeds no final radical
    assert!(issues
        .iter()
        .any(|i| i.code == IssueCode::NoPattern && to_hsb(&i.lemma) == "qaADĩ"));
    // nothing is out of norm and no QA errors
    assert!(!issues.iter().any(|i| i.code == IssueCode::OutOfNorm));
    assert!(!issues.iter().any(|i| i.code.is_error()), "{issues:#?}");
}

#[test]
fn stripped_override_is_reported_as_error() {
    let (specs, _) = seed();
    let mut sheets = specs.to_sheets();
    // drop the override on kutub: a broken plural without gender/number
    sheets.lexicon = sheets
        .lexicon
        .lines()
        .map(|l| {
            if l.contains("\u{643}\u{64F}\u{62A}\u{64F}\u{628}") {
                l.replace("gen:m num:p", "-")
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    let broken = morphforge::spec::load_from_sheets(&sheets).unwrap();
    let text = std::fs::read_to_string(seed_dir().join("paradigms.tsv")).unwrap();
    let index = parse_paradigms(&text).unwrap();
    let issues = morphforge::lexqa::qa_report(&broken, &index);
    assert!(issues
        .iter()
        .any(|i| i.code == morphforge::lexqa::IssueCode::MissingBrokenOverride));
}
