//! Structure-measure: a region-aware term built from per-block SSIM over a
//! centroid-anchored partition of the ground truth, and an object-aware term
//! comparing foreground and background distributions separately.
//!
//! ```
//! use smeval::{BinMap, GrayMap, SMeasureParams, structure_measure};
//!
//! let gt = BinMap::from_ascii(&["....", ".##.", ".##.", "...."]).unwrap();
//! let sm = GrayMap::from(&gt);
//! let s = structure_measure(&sm, &gt, &SMeasureParams::default()).unwrap();
//! assert!((s - 1.0).abs() < 1e-12);
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{region_stats, BinMap, GrayMap};

/// How block weights in the region term are assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockWeighting {
    /// Share of the ground-truth foreground that falls in the block.
    #[default]
    Foreground,
    /// Share of the image area covered by the block.
    Area,
}

impl fmt::Display for BlockWeighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockWeighting::Foreground => "foreground",
            BlockWeighting::Area => "area",
        })
    }
}

impl FromStr for BlockWeighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "foreground" => Ok(BlockWeighting::Foreground),
            "area" => Ok(BlockWeighting::Area),
            other => Err(Error::InvalidParameter(format!("unknown weighting '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SMeasureParams {
    /// Mix between the object term (weight `alpha`) and the region term.
    pub alpha: f64,
    /// Weight of the dispersion penalty in the object term.
    pub lambda: f64,
    /// Number of blocks in the region term; a power of four.
    pub k_blocks: usize,
    pub weighting: BlockWeighting,
}

impl Default for SMeasureParams {
    fn default() -> Self {
        SMeasureParams {
            alpha: 0.5,
            lambda: 0.5,
            k_blocks: 4,
            weighting: BlockWeighting::Foreground,
        }
    }
}

impl SMeasureParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda {} must be >= 0", self.lambda)));
        }
        split_depth(self.k_blocks)?;
        Ok(())
    }
}

/// Number of recursive four-way splits for `k_blocks`.
fn split_depth(k_blocks: usize) -> Result<u32> {
    let mut k = k_blocks;
    let mut depth = 0;
    while k > 1 && k.is_multiple_of(4) {
        k /= 4;
        depth += 1;
    }
    if k != 1 || depth == 0 {
        return Err(Error::InvalidParameter(format!(
            "k_blocks must be a power of 4 (4, 16, 64, ...), got {k_blocks}"
        )));
    }
    Ok(depth)
}

/// Axis-aligned block of the partition with its weight in the region term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub row: usize,
    pub col: usize,
    pub height: usize,
    pub width: usize,
    pub weight: f64,
}

impl Block {
    pub fn area(&self) -> usize {
        self.height * self.width
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        (self.row..self.row + self.height).contains(&row) && (self.col..self.col + self.width).contains(&col)
    }

    fn gather<T: Copy>(&self, stride: usize, data: &[T]) -> Vec<T> {
        let mut out = Vec::with_capacity(self.area());
        for r in self.row..self.row + self.height {
            let start = r * stride + self.col;
            out.extend_from_slice(&data[start..start + self.width]);
        }
        out
    }
}

/// Disjoint cover of the image. Blocks that a split would leave empty are
/// omitted, so fewer than `k_blocks` entries can appear on tiny images.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectScores {
    pub o_fg: f64,
    pub o_bg: f64,
    /// Foreground fraction of the image.
    pub mu: f64,
}

impl ObjectScores {
    pub fn combined(&self) -> f64 {
        self.mu * self.o_fg + (1.0 - self.mu) * self.o_bg
    }
}

struct Moments {
    mean_x: f64,
    mean_y: f64,
    var_x: f64,
    var_y: f64,
    cov: f64,
}

fn moments(x: &[f64], y: &[f64]) -> Moments {
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    if x.len() == 1 {
        return Moments {
            mean_x,
            mean_y,
            var_x: 0.0,
            var_y: 0.0,
            cov: 0.0,
        };
    }
    let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mean_x, b - mean_y);
        vx += dx * dx;
        vy += dy * dy;
        cxy += dx * dy;
    }
    Moments {
        mean_x,
        mean_y,
        var_x: vx / (n - 1.0),
        var_y: vy / (n - 1.0),
        cov: cxy / (n - 1.0),
    }
}

/// Product of luminance, contrast and structure comparisons, which collapses
/// to `4 mx my cov / ((mx² + my²)(vx + vy))`. No stabilizing constants; the
/// vanishing-denominator cases are resolved explicitly.
pub fn ssim_block(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyInput("ssim_block"));
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let m = moments(x, y);
    if m.var_x == 0.0 && m.var_y == 0.0 {
        return Ok(if (m.mean_x - m.mean_y).abs() <= 1e-8 { 1.0 } else { 0.0 });
    }
    let denom = (m.mean_x * m.mean_x + m.mean_y * m.mean_y) * (m.var_x + m.var_y);
    if denom == 0.0 {
        return Ok(if x == y { 1.0 } else { 0.0 });
    }
    let q = 4.0 * m.mean_x * m.mean_y * m.cov / denom;
    Ok(q.clamp(-1.0, 1.0))
}

/// Split offset along one axis: the 1-based index of the centroid row (or
/// column), rounded half-to-even, closes the first part. Clamped so both parts
/// are nonempty whenever the extent allows it.
fn split_offset(centroid: f64, extent: usize) -> usize {
    let s = (centroid + 1.0).round_ties_even() as usize;
    s.clamp(1, extent.saturating_sub(1).max(1))
}

/// Foreground count and block-local centroid of `gt` inside a rectangle.
fn local_foreground(gt: &BinMap, row: usize, col: usize, height: usize, width: usize) -> (usize, Option<(f64, f64)>) {
    let (mut n, mut sr, mut sc) = (0usize, 0.0f64, 0.0f64);
    let w = gt.width();
    let vals = gt.values();
    for r in 0..height {
        let base = (row + r) * w + col;
        for (c, &b) in vals[base..base + width].iter().enumerate() {
            if b {
                n += 1;
                sr += r as f64;
                sc += c as f64;
            }
        }
    }
    if n == 0 {
        (0, None)
    } else {
        (n, Some((sr / n as f64, sc / n as f64)))
    }
}

fn split_rect(gt: &BinMap, rect: (usize, usize, usize, usize), depth: u32, out: &mut Vec<(usize, usize, usize, usize, usize)>) {
    let (row, col, height, width) = rect;
    let (fg, centroid) = local_foreground(gt, row, col, height, width);
    if depth == 0 {
        out.push((row, col, height, width, fg));
        return;
    }
    let (sr, sc) = match centroid {
        Some((cr, cc)) => (split_offset(cr, height), split_offset(cc, width)),
        // no foreground: split at the block center
        None => ((height / 2).max(1), (width / 2).max(1)),
    };
    let parts = [
        (row, col, sr, sc),
        (row, col + sc, sr, width - sc),
        (row + sr, col, height - sr, sc),
        (row + sr, col + sc, height - sr, width - sc),
    ];
    for p in parts {
        if p.2 > 0 && p.3 > 0 {
            split_rect(gt, p, depth - 1, out);
        }
    }
}

/// Recursive four-way split at ground-truth foreground centroids with
/// foreground-proportional weights (area weights when the mask is empty).
pub fn partition_blocks(gt: &BinMap, k_blocks: usize) -> Result<BlockPartition> {
    partition_blocks_weighted(gt, k_blocks, BlockWeighting::Foreground)
}

pub fn partition_blocks_weighted(gt: &BinMap, k_blocks: usize, weighting: BlockWeighting) -> Result<BlockPartition> {
    let depth = split_depth(k_blocks)?;
    let mut rects = Vec::with_capacity(k_blocks);
    split_rect(gt, (0, 0, gt.height(), gt.width()), depth, &mut rects);
    let total_fg: usize = rects.iter().map(|r| r.4).sum();
    let area = gt.len() as f64;
    let blocks = rects
        .into_iter()
        .map(|(row, col, height, width, fg)| {
            let weight = match weighting {
                BlockWeighting::Foreground if total_fg > 0 => fg as f64 / total_fg as f64,
                _ => (height * width) as f64 / area,
            };
            Block {
                row,
                col,
                height,
                width,
                weight,
            }
        })
        .collect();
    Ok(BlockPartition { blocks })
}

fn check_same_dims(sm: &GrayMap, gt: &BinMap) -> Result<()> {
    if sm.dims() != gt.dims() {
        return Err(Error::dims(sm.dims(), gt.dims()));
    }
    Ok(())
}

/// Weighted sum of per-block SSIM between the map and the ground truth cast
/// to `{0.0, 1.0}`.
pub fn region_score(sm: &GrayMap, gt: &BinMap, k_blocks: usize) -> Result<f64> {
    region_score_weighted(sm, gt, k_blocks, BlockWeighting::Foreground)
}

pub fn region_score_weighted(sm: &GrayMap, gt: &BinMap, k_blocks: usize, weighting: BlockWeighting) -> Result<f64> {
    check_same_dims(sm, gt)?;
    let partition = partition_blocks_weighted(gt, k_blocks, weighting)?;
    let gt_gray = GrayMap::from(gt);
    let w = gt.width();
    let mut score = 0.0;
    for block in partition.blocks.iter().filter(|b| b.weight != 0.0) {
        let x = block.gather(w, sm.values());
        let y = block.gather(w, gt_gray.values());
        score += block.weight * ssim_block(&x, &y)?;
    }
    Ok(score)
}

/// `2m / (m² + 1 + 2·lambda·s)` for the mean `m` and standard deviation `s`
/// of the region.
pub fn object_component(region_values: &[f64], lambda: f64) -> Result<f64> {
    let stats = region_stats(region_values, None)?;
    let m = stats.mean;
    Ok(2.0 * m / (m * m + 1.0 + 2.0 * lambda * stats.stddev))
}

/// Foreground and background object terms. Requires a ground truth with both
/// classes present.
pub fn object_score(sm: &GrayMap, gt: &BinMap, lambda: f64) -> Result<ObjectScores> {
    check_same_dims(sm, gt)?;
    let n_fg = gt.foreground_count();
    let mut fg = Vec::with_capacity(n_fg);
    let mut bg = Vec::with_capacity(gt.len() - n_fg);
    for (&v, &g) in sm.values().iter().zip(gt.values()) {
        if g {
            fg.push(v);
        } else {
            bg.push(1.0 - v);
        }
    }
    if fg.is_empty() || bg.is_empty() {
        return Err(Error::ConstantGroundTruth);
    }
    Ok(ObjectScores {
        o_fg: object_component(&fg, lambda)?,
        o_bg: object_component(&bg, lambda)?,
        mu: n_fg as f64 / gt.len() as f64,
    })
}

/// `alpha · S_object + (1 − alpha) · S_region`, clamped to `[0, 1]`.
///
/// A ground truth without foreground scores `1 − mean(sm)`; one without
/// background scores `mean(sm)`.
pub fn structure_measure(sm: &GrayMap, gt: &BinMap, params: &SMeasureParams) -> Result<f64> {
    params.validate()?;
    check_same_dims(sm, gt)?;
    let n_fg = gt.foreground_count();
    if n_fg == 0 {
        return Ok(1.0 - sm.mean());
    }
    if n_fg == gt.len() {
        return Ok(sm.mean());
    }
    let object = object_score(sm, gt, params.lambda)?.combined();
    let region = region_score_weighted(sm, gt, params.k_blocks, params.weighting)?;
    let s = params.alpha * object + (1.0 - params.alpha) * region;
    Ok(s.clamp(0.0, 1.0))
}
