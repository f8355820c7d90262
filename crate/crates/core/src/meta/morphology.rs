//! Binary morphology with disk structuring elements, used to simulate slight
//! annotation errors on ground-truth masks.
//!
//! Pixels outside the image never contribute: dilation only stamps inside the
//! image and erosion only inspects in-image neighbours, so the two are dual
//! and opening/closing stay idempotent up to the border.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::BinMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbMode {
    Dilate,
    Erode,
    Open,
    Close,
    /// Dilate or erode each 8-connected foreground component, chosen at random.
    #[default]
    Mixed,
}

impl fmt::Display for PerturbMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PerturbMode::Dilate => "dilate",
            PerturbMode::Erode => "erode",
            PerturbMode::Open => "open",
            PerturbMode::Close => "close",
            PerturbMode::Mixed => "mixed",
        })
    }
}

impl FromStr for PerturbMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "dilate" => PerturbMode::Dilate,
            "erode" => PerturbMode::Erode,
            "open" => PerturbMode::Open,
            "close" => PerturbMode::Close,
            "mixed" => PerturbMode::Mixed,
            other => return Err(Error::InvalidParameter(format!("unknown perturbation mode '{other}'"))),
        })
    }
}

/// Offsets `(dr, dc)` with `dr² + dc² <= radius²`.
pub fn disk(radius: usize) -> Vec<(isize, isize)> {
    let r = radius as isize;
    let mut out = Vec::new();
    for dr in -r..=r {
        for dc in -r..=r {
            if dr * dr + dc * dc <= r * r {
                out.push((dr, dc));
            }
        }
    }
    out
}

fn offset(m: &BinMap, i: usize, (dr, dc): (isize, isize)) -> Option<usize> {
    let (w, h) = (m.width() as isize, m.height() as isize);
    let r = (i / m.width()) as isize + dr;
    let c = (i % m.width()) as isize + dc;
    ((0..h).contains(&r) && (0..w).contains(&c)).then(|| (r * w + c) as usize)
}

pub fn dilate(m: &BinMap, radius: usize) -> BinMap {
    let se = disk(radius);
    let mut out = vec![false; m.len()];
    for i in (0..m.len()).filter(|&i| m.values()[i]) {
        for &o in &se {
            if let Some(j) = offset(m, i, o) {
                out[j] = true;
            }
        }
    }
    BinMap::new(m.width(), m.height(), out).expect("same dims")
}

pub fn erode(m: &BinMap, radius: usize) -> BinMap {
    let se = disk(radius);
    let v = m.values();
    let out = (0..m.len())
        .map(|i| v[i] && se.iter().all(|&o| offset(m, i, o).is_none_or(|j| v[j])))
        .collect();
    BinMap::new(m.width(), m.height(), out).expect("same dims")
}

pub fn open(m: &BinMap, radius: usize) -> BinMap {
    dilate(&erode(m, radius), radius)
}

pub fn close(m: &BinMap, radius: usize) -> BinMap {
    erode(&dilate(m, radius), radius)
}

/// 8-connected foreground labelling; labels start at 1 in scan order, 0 is
/// background. Returns the labels and the component count.
pub fn connected_components(m: &BinMap) -> (Vec<u32>, u32) {
    let v = m.values();
    let mut labels = vec![0u32; m.len()];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for seed in 0..m.len() {
        if !v[seed] || labels[seed] != 0 {
            continue;
        }
        next += 1;
        labels[seed] = next;
        stack.push(seed);
        while let Some(i) = stack.pop() {
            for dr in -1..=1 {
                for dc in -1..=1 {
                    if let Some(j) = offset(m, i, (dr, dc)) {
                        if v[j] && labels[j] == 0 {
                            labels[j] = next;
                            stack.push(j);
                        }
                    }
                }
            }
        }
    }
    (labels, next)
}

fn mixed(m: &BinMap, radius: usize, seed: u64) -> BinMap {
    let (labels, count) = connected_components(m);
    let mut rng = super::item_rng(seed, 0);
    let dilate_component: Vec<bool> = (0..count).map(|_| rng.random_bool(0.5)).collect();
    let se = disk(radius);
    let mut out = vec![false; m.len()];
    for i in 0..m.len() {
        let label = labels[i];
        if label == 0 {
            continue;
        }
        if dilate_component[(label - 1) as usize] {
            for &o in &se {
                if let Some(j) = offset(m, i, o) {
                    out[j] = true;
                }
            }
        } else if se.iter().all(|&o| offset(m, i, o).is_none_or(|j| labels[j] == label)) {
            out[i] = true;
        }
    }
    BinMap::new(m.width(), m.height(), out).expect("same dims")
}

/// Slightly altered copy of a ground truth. Deterministic for a given seed
/// (only `Mixed` consumes randomness).
pub fn perturb_gt(gt: &BinMap, radius: usize, mode: PerturbMode, seed: u64) -> Result<BinMap> {
    if radius == 0 {
        return Err(Error::InvalidParameter("perturbation radius must be >= 1".into()));
    }
    Ok(match mode {
        PerturbMode::Dilate => dilate(gt, radius),
        PerturbMode::Erode => erode(gt, radius),
        PerturbMode::Open => open(gt, radius),
        PerturbMode::Close => close(gt, radius),
        PerturbMode::Mixed => mixed(gt, radius, seed),
    })
}

/// Size of the major structural change between two masks: the pixel count of
/// their difference map after erosion with a disk of `erosion_radius`.
/// Thin boundary slivers vanish; thick changed regions survive.
pub fn structure_change(gt: &BinMap, perturbed: &BinMap, erosion_radius: usize) -> Result<u64> {
    if gt.dims() != perturbed.dims() {
        return Err(Error::dims(gt.dims(), perturbed.dims()));
    }
    let diff: Vec<bool> = gt.values().iter().zip(perturbed.values()).map(|(a, b)| a != b).collect();
    let diff = BinMap::new(gt.width(), gt.height(), diff)?;
    let eroded = if erosion_radius == 0 { diff } else { erode(&diff, erosion_radius) };
    Ok(eroded.foreground_count() as u64)
}
