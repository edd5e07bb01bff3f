//! Decision/objective space types, Pareto dominance and non-dominated lists.
//!
//! A solver run is built out of [`ListEntry`] pairs: a decision point together
//! with the per-direction stepsizes the expansion left behind. [`ParetoList`]
//! keeps such entries mutually non-dominated and preserves insertion order,
//! which is the tie-break used everywhere (selection, filtering, dedup).

use crate::error::{Error, Result};

/// A point in decision space.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionPoint {
    coords: Vec<f64>,
}

impl DecisionPoint {
    /// Builds a point, rejecting NaN or infinite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "decision coordinates {coords:?}"
            )));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// The objective values `F(x)` of one point; the space where dominance and
/// hypervolume live.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveVector {
    values: Vec<f64>,
}

impl ObjectiveVector {
    /// Builds an objective vector, rejecting NaN or infinite entries. A NaN
    /// coming out of an objective is an evaluation error and is never stored.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("objective vector must not be empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("objective values {values:?}")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Per-direction stepsizes `α̃` attached to an archive entry, one strictly
/// positive value per search direction.
#[derive(Debug, Clone, PartialEq)]
pub struct StepsizeVector {
    alphas: Vec<f64>,
}

impl StepsizeVector {
    /// Builds a stepsize vector; every component must be finite and `> 0`.
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::Config("stepsize vector must not be empty".into()));
        }
        if alphas.iter().any(|a| !a.is_finite() || *a <= 0.0) {
            return Err(Error::Config(format!(
                "stepsizes must be strictly positive, got {alphas:?}"
            )));
        }
        Ok(Self { alphas })
    }

    /// All components equal to `alpha`.
    pub fn uniform(r: usize, alpha: f64) -> Result<Self> {
        Self::new(vec![alpha; r])
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// Largest component; the `Δ` of the entry carrying this vector.
    pub fn max(&self) -> f64 {
        self.alphas.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Componentwise scaling, used by the failure branch (`θ·α`).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            alphas: self.alphas.iter().map(|a| a * factor).collect(),
        }
    }
}

/// Identifier of an archive entry, unique within one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntryId(pub u64);

impl std::fmt::Display for EntryId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One archive pair `(x, α̃)` with its cached objectives and lineage metadata.
///
/// Objectives are evaluated once when the entry is created and never
/// recomputed, so evaluation counts stay exact. `id`/`parent_id` record which
/// exploration generated the entry; they never influence algorithmic
/// decisions.
#[derive(Debug, Clone)]
pub struct ListEntry {
    pub point: DecisionPoint,
    pub objectives: ObjectiveVector,
    pub steps: StepsizeVector,
    pub id: EntryId,
    pub parent_id: Option<EntryId>,
    /// Index of the first list `L_k` that contained this entry.
    pub born_iter: u64,
}

impl ListEntry {
    pub fn new(
        point: DecisionPoint,
        objectives: ObjectiveVector,
        steps: StepsizeVector,
        id: EntryId,
        parent_id: Option<EntryId>,
        born_iter: u64,
    ) -> Self {
        Self {
            point,
            objectives,
            steps,
            id,
            parent_id,
            born_iter,
        }
    }

    /// `Δ = max_i α̃^i` of this entry.
    pub fn max_step(&self) -> f64 {
        self.steps.max()
    }
}

/// Returns true when `a` Pareto-dominates `b`: `a_i ≤ b_i` in every
/// coordinate and `a ≠ b`.
///
/// Panics when the vectors have different lengths.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    assert_eq!(
        a.len(),
        b.len(),
        "objective dimension mismatch in dominance test"
    );
    let mut strict = false;
    for (ai, bi) in a.values().iter().zip(b.values()) {
        if ai > bi {
            return false;
        }
        if ai < bi {
            strict = true;
        }
    }
    strict
}

/// True when `y > f − margin·𝟏` strictly in every coordinate, the rejection
/// condition of the expansion acceptance test.
pub(crate) fn strictly_exceeds_shifted(
    y: &ObjectiveVector,
    f: &ObjectiveVector,
    margin: f64,
) -> bool {
    assert_eq!(
        y.len(),
        f.len(),
        "objective dimension mismatch in sufficiency test"
    );
    y.values()
        .iter()
        .zip(f.values())
        .all(|(yi, fi)| *yi > fi - margin)
}

/// The expansion acceptance test: `y` is sufficiently non-dominated by the
/// archive when no member `x_j` satisfies `y > F(x_j) − γ·step²·𝟏` strictly in
/// every coordinate. Vacuously true for an empty archive.
pub fn sufficiently_nondominated(
    y: &ObjectiveVector,
    archive: &[ObjectiveVector],
    gamma: f64,
    step: f64,
) -> bool {
    debug_assert!(step > 0.0 && gamma > 0.0 && gamma < 1.0);
    let margin = gamma * step * step;
    archive
        .iter()
        .all(|f| !strictly_exceeds_shifted(y, f, margin))
}

/// The non-dominated subset of `entries`, in input order.
///
/// An entry survives when no other entry dominates it; among entries with
/// identical objective vectors only the earliest is kept.
pub fn filter_nondominated(entries: Vec<ListEntry>) -> ParetoList {
    filter_with_trusted_prefix(entries, 0)
}

/// Same result as [`filter_nondominated`], skipping comparisons within the
/// first `trusted` entries, which the caller guarantees are already mutually
/// non-dominated with distinct objective vectors.
pub(crate) fn filter_with_trusted_prefix(entries: Vec<ListEntry>, trusted: usize) -> ParetoList {
    debug_assert!(trusted <= entries.len());
    let mut keep = vec![true; entries.len()];
    for (j, e) in entries.iter().enumerate() {
        let start = if j < trusted { trusted } else { 0 };
        for (i, other) in entries.iter().enumerate().skip(start) {
            if i == j {
                continue;
            }
            if dominates(&other.objectives, &e.objectives)
                || (i < j && other.objectives == e.objectives)
            {
                keep[j] = false;
                break;
            }
        }
    }
    let survivors = entries
        .into_iter()
        .zip(keep)
        .filter_map(|(e, k)| k.then_some(e))
        .collect();
    ParetoList { entries: survivors }
}

/// The solver state: a mutually non-dominated collection of entries with no
/// duplicate objective vectors, in insertion order.
#[derive(Debug, Clone, Default)]
pub struct ParetoList {
    entries: Vec<ListEntry>,
}

impl ParetoList {
    /// Validates mutual non-domination and objective uniqueness of `entries`.
    pub fn try_new(entries: Vec<ListEntry>) -> Result<Self> {
        for (j, e) in entries.iter().enumerate() {
            for (i, other) in entries.iter().enumerate() {
                if i != j && dominates(&other.objectives, &e.objectives) {
                    return Err(Error::Config(format!(
                        "entry {} dominates entry {}",
                        other.id, e.id
                    )));
                }
                if i < j && other.objectives == e.objectives {
                    return Err(Error::Config(format!(
                        "entries {} and {} share an objective vector",
                        other.id, e.id
                    )));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[ListEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Cloned objective vectors of all entries, in order.
    pub fn objectives(&self) -> Vec<ObjectiveVector> {
        self.entries.iter().map(|e| e.objectives.clone()).collect()
    }

    /// `Δ̄ = max` over entries of each entry's maximum stepsize.
    ///
    /// Panics on an empty list.
    pub fn max_step(&self) -> f64 {
        assert!(!self.entries.is_empty(), "max_step of empty list");
        self.entries
            .iter()
            .map(ListEntry::max_step)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `ξ = min` over entries of each entry's maximum stepsize.
    ///
    /// Panics on an empty list.
    pub fn min_step(&self) -> f64 {
        assert!(!self.entries.is_empty(), "min_step of empty list");
        self.entries
            .iter()
            .map(ListEntry::max_step)
            .fold(f64::INFINITY, f64::min)
    }

    /// Sorted entry ids; two lists hold the same points exactly when their id
    /// sets match, because ids are stable across stepsize updates.
    pub fn id_set(&self) -> Vec<u64> {
        let mut ids: Vec<u64> = self.entries.iter().map(|e| e.id.0).collect();
        ids.sort_unstable();
        ids
    }

    pub(crate) fn replace_steps(&mut self, id: EntryId, steps: StepsizeVector) {
        let entry = self
            .entries
            .iter_mut()
            .find(|e| e.id == id)
            .expect("entry to update present in list");
        entry.steps = steps;
    }

    /// Appends `new` entries and re-filters, exploiting that the existing
    /// entries are already mutually non-dominated. The result equals
    /// [`filter_nondominated`] applied to the concatenation.
    pub(crate) fn insert_filtered(&mut self, new: Vec<ListEntry>) {
        let mut all = std::mem::take(&mut self.entries);
        let trusted = all.len();
        all.extend(new);
        *self = filter_with_trusted_prefix(all, trusted);
    }
}
