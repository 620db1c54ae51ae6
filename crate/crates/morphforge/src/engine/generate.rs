//! Generation: all surface forms of a lemma under a (possibly partial)
//! feature request, and paradigm grids for debugging.

use crate::analysis::{assemble, Analysis, FeatureRequest};
use crate::features::{merge_features, Case, Gender, Number, Pos, State};

use super::{Engine, EngineError};

impl<'a> Engine<'a> {
    /// All word forms of (lemma, pos) whose merged features match the
    /// request. Deterministic order: sorted by diac, then BW tag;
    /// duplicates (same diac, tag, features) collapsed.
    ///
    /// A lemma absent from the database is an error; a contradictory
    /// request is an empty result.
    pub fn generate(
        &self,
        lemma: &str,
        pos: Option<Pos>,
        request: &FeatureRequest,
    ) -> Result<Vec<Analysis>, EngineError> {
        let stems = self.stems_for(lemma, pos);
        if stems.is_empty() {
            return Err(EngineError::UnknownLemma(lemma.to_string()));
        }
        let mut out = Vec::new();
        for stem in stems {
            for sfx_cat in self.suffix_cats_for(&stem.category) {
                for sfx in self.suffixes_in(sfx_cat) {
                    for pfx_cat in self.prefix_cats_for(&stem.category) {
                        if !self.ac_ok(pfx_cat, sfx_cat) {
                            continue;
                        }
                        for pfx in self.prefixes_in(pfx_cat) {
                            let merged = merge_features(
                                &stem.features,
                                &[&pfx.features],
                                &[&sfx.features],
                            )
                            .map_err(EngineError::Internal)?;
                            if !request.matches(&merged) {
                                continue;
                            }
                            out.push(assemble(pfx, stem, sfx, merged, &self.db.rewrite_rules));
                        }
                    }
                }
            }
        }
        Ok(Self::dedup_sort(out))
    }

    /// Render an inflection grid over two feature axes, clitic-free.
    /// Cells hold every form of their slot; paradigm gaps stay empty; a
    /// form whose case or state is `u` (undefined) spreads across every
    /// cell of that axis.
    pub fn paradigm_grid(
        &self,
        lemma: &str,
        pos: Option<Pos>,
        rows: Axis,
        cols: Axis,
    ) -> Result<Grid, EngineError> {
        let analyses = self.generate(lemma, pos, &FeatureRequest::no_clitics())?;
        let row_values = rows.values();
        let col_values = cols.values();
        let mut cells: Vec<Vec<Vec<Analysis>>> =
            vec![vec![Vec::new(); col_values.len()]; row_values.len()];
        for a in &analyses {
            for (ri, rv) in row_values.iter().enumerate() {
                if !rows.matches(a, rv) {
                    continue;
                }
                for (ci, cv) in col_values.iter().enumerate() {
                    if cols.matches(a, cv) {
                        cells[ri][ci].push(a.clone());
                    }
                }
            }
        }
        Ok(Grid { rows, cols, row_values, col_values, cells })
    }
}

/// A grid axis over one functional feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Gender,
    Number,
    Case,
    State,
}

impl Axis {
    pub fn parse(s: &str) -> Option<Axis> {
        match s {
            "gender" | "gen" => Some(Axis::Gender),
            "number" | "num" => Some(Axis::Number),
            "case" | "cas" => Some(Axis::Case),
            "state" | "stt" => Some(Axis::State),
            _ => None,
        }
    }

    pub fn values(&self) -> Vec<String> {
        let v: &[&str] = match self {
            Axis::Gender => &["m", "f"],
            Axis::Number => &["s", "d", "p"],
            Axis::Case => &["n", "a", "g", "u"],
            Axis::State => &["i", "d", "c", "u"],
        };
        v.iter().map(|s| s.to_string()).collect()
    }

    fn matches(&self, a: &Analysis, value: &str) -> bool {
        match self {
            Axis::Gender => a.features.gender == Gender::parse(value).unwrap_or_default(),
            Axis::Number => a.features.number == Number::parse(value).unwrap_or_default(),
            // undefined case/state underspecifies the whole axis
            Axis::Case => {
                a.features.case == Case::U
                    || a.features.case == Case::parse(value).unwrap_or_default()
            }
            Axis::State => {
                a.features.state == State::U
                    || a.features.state == State::parse(value).unwrap_or_default()
            }
        }
    }
}

/// A rendered paradigm grid.
#[derive(Debug, Clone)]
pub struct Grid {
    pub rows: Axis,
    pub cols: Axis,
    pub row_values: Vec<String>,
    pub col_values: Vec<String>,
    pub cells: Vec<Vec<Vec<Analysis>>>,
}

impl Grid {
    /// Distinct surfaces of one cell.
    pub fn cell_surfaces(&self, ri: usize, ci: usize) -> Vec<String> {
        let mut v: Vec<String> = self.cells[ri][ci].iter().map(|a| a.diac.clone()).collect();
        v.sort();
        v.dedup();
        v
    }
}
