//! MM5, rank distance: where measure B places the map that measure A ranks
//! first. Images with a nonzero distance are where the two measures disagree
//! most visibly, so they make good stimuli for a human preference study.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::{item_rng, Contribution, MetaResult, RankVector, ScoreMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankDistanceEntry {
    pub image_id: String,
    /// Model ranked first by measure A.
    pub top_a: usize,
    /// Model ranked first by measure B.
    pub top_b: usize,
    /// `position_B(top_a) − 1`.
    pub distance: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDistances {
    pub model_ids: Vec<String>,
    pub entries: Vec<RankDistanceEntry>,
    /// `histogram[d]` = number of images at distance `d`.
    pub histogram: Vec<u64>,
}

impl RankDistances {
    /// Images with distance above zero.
    pub fn candidates(&self) -> impl Iterator<Item = &RankDistanceEntry> {
        self.entries.iter().filter(|e| e.distance > 0)
    }

    /// MM5 as a [`MetaResult`]; the value is the mean distance.
    pub fn to_meta_result(&self) -> MetaResult {
        let n = self.entries.len().max(1) as f64;
        let value = self.entries.iter().map(|e| e.distance as f64).sum::<f64>() / n;
        let mut r = MetaResult::new(5, value);
        r.histogram = Some(self.histogram.clone());
        r.per_image = Some(
            self.entries
                .iter()
                .map(|e| Contribution {
                    id: e.image_id.clone(),
                    value: e.distance as f64,
                    structure_change: None,
                    degenerate: false,
                })
                .collect(),
        );
        r
    }
}

/// Rank distance per image between two measures' rankings of the same models.
pub fn mm5_rank_distance(image_ids: &[String], model_ids: &[String], a: &[RankVector], b: &[RankVector]) -> Result<RankDistances> {
    if a.len() != image_ids.len() || b.len() != image_ids.len() {
        return Err(Error::IdMismatch(format!(
            "{} image ids, {} and {} rank vectors",
            image_ids.len(),
            a.len(),
            b.len()
        )));
    }
    if model_ids.is_empty() {
        return Err(Error::EmptyInput("mm5: no models"));
    }
    let mut entries = Vec::with_capacity(image_ids.len());
    let mut histogram = vec![0u64; model_ids.len()];
    for ((id, ra), rb) in image_ids.iter().zip(a).zip(b) {
        if ra.len() != model_ids.len() || rb.len() != model_ids.len() {
            return Err(Error::IdMismatch(format!(
                "image '{id}': rank vectors do not cover {} models",
                model_ids.len()
            )));
        }
        let top_a = ra.top().expect("non-empty");
        let top_b = rb.top().expect("non-empty");
        let distance = rb.position(top_a) - 1;
        histogram[distance] += 1;
        entries.push(RankDistanceEntry {
            image_id: id.clone(),
            top_a,
            top_b,
            distance,
        });
    }
    Ok(RankDistances {
        model_ids: model_ids.to_vec(),
        entries,
        histogram,
    })
}

/// [`mm5_rank_distance`] from two score tables over the same images and models.
pub fn mm5_from_scores(a: &ScoreMatrix, b: &ScoreMatrix) -> Result<RankDistances> {
    let b = b.aligned_to(a)?;
    let ranks = |m: &ScoreMatrix| (0..m.n_images()).map(|i| RankVector::from_scores(m.row(i))).collect::<Vec<_>>();
    mm5_rank_distance(a.image_ids(), a.model_ids(), &ranks(a), &ranks(&b))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyPair {
    pub image_id: String,
    pub model_a: String,
    pub model_b: String,
    pub distance: usize,
}

/// Seeded sample of at most `max_pairs` images with distance at least
/// `min_distance`, kept in input order.
pub fn select_study_pairs(distances: &RankDistances, max_pairs: usize, min_distance: usize, seed: u64) -> Result<Vec<StudyPair>> {
    let min_distance = min_distance.max(1);
    let qualifying: Vec<&RankDistanceEntry> = distances.entries.iter().filter(|e| e.distance >= min_distance).collect();
    if qualifying.is_empty() {
        return Err(Error::NoQualifyingImages);
    }
    let mut chosen: Vec<usize> = if qualifying.len() <= max_pairs {
        (0..qualifying.len()).collect()
    } else {
        sample(&mut item_rng(seed, 0), qualifying.len(), max_pairs).into_vec()
    };
    chosen.sort_unstable();
    Ok(chosen
        .into_iter()
        .map(|i| {
            let e = qualifying[i];
            StudyPair {
                image_id: e.image_id.clone(),
                model_a: distances.model_ids[e.top_a].clone(),
                model_b: distances.model_ids[e.top_b].clone(),
                distance: e.distance,
            }
        })
        .collect())
}
