//! Weighted Fβ. Errors are taken as `|gt − sm|`; foreground errors are
//! smoothed by a Gaussian dependency kernel (background pixels borrow the
//! error of their nearest foreground pixel before smoothing), and background
//! errors are amplified with their Euclidean distance to the foreground.
//!
//! Default constants (β² = 1, σ = 5 px on a 7×7 kernel, decay 5) follow the
//! published weighted F-measure procedure, not anything derived here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{BinMap, GrayMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FbwParams {
    pub beta_sq: f64,
    /// Standard deviation of the dependency kernel, in pixels.
    pub dependency_sigma: f64,
    /// Kernel half-width; the kernel is `(2r + 1)²`.
    pub dependency_kernel_radius: usize,
    /// Distance (pixels) at which a background error's extra weight halves.
    pub importance_decay: f64,
}

impl Default for FbwParams {
    fn default() -> Self {
        FbwParams {
            beta_sq: 1.0,
            dependency_sigma: 5.0,
            dependency_kernel_radius: 3,
            importance_decay: 5.0,
        }
    }
}

impl FbwParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.beta_sq) || !positive(self.dependency_sigma) || !positive(self.importance_decay) {
            return Err(Error::InvalidParameter(format!("Fbw parameters must be positive: {self:?}")));
        }
        if self.dependency_kernel_radius == 0 {
            return Err(Error::InvalidParameter("Fbw kernel radius must be >= 1".into()));
        }
        Ok(())
    }
}

/// Nearest foreground pixel of every pixel as `(squared distance, index)`,
/// ties resolved toward the smaller row-major index.
///
/// Column pass first (nearest foreground row per column), then a row scan
/// that widens until the horizontal offset alone exceeds the best distance.
pub fn nearest_foreground(gt: &BinMap) -> Option<Vec<(u64, usize)>> {
    let (w, h) = gt.dims();
    if gt.foreground_count() == 0 {
        return None;
    }
    let vals = gt.values();
    // per-column nearest foreground row, None when the column has none
    let mut col_near: Vec<Option<usize>> = vec![None; w * h];
    for c in 0..w {
        let mut above: Option<usize> = None;
        for r in 0..h {
            if vals[r * w + c] {
                above = Some(r);
            }
            col_near[r * w + c] = above;
        }
        let mut below: Option<usize> = None;
        for r in (0..h).rev() {
            if vals[r * w + c] {
                below = Some(r);
            }
            let i = r * w + c;
            col_near[i] = match (col_near[i], below) {
                (Some(a), Some(b)) => Some(if r - a <= b - r { a } else { b }),
                (a, b) => a.or(b),
            };
        }
    }

    let mut out = Vec::with_capacity(w * h);
    for r in 0..h {
        for c in 0..w {
            let mut best: Option<(u64, usize)> = None;
            let consider = |cc: usize, best: &mut Option<(u64, usize)>| {
                if let Some(rr) = col_near[r * w + cc] {
                    let dr = r.abs_diff(rr) as u64;
                    let dc = c.abs_diff(cc) as u64;
                    let cand = (dr * dr + dc * dc, rr * w + cc);
                    if best.is_none_or(|b| cand < b) {
                        *best = Some(cand);
                    }
                }
            };
            for off in 0..w {
                let reach = (off as u64) * (off as u64);
                if best.is_some_and(|b| reach > b.0) {
                    break;
                }
                if off <= c {
                    consider(c - off, &mut best);
                }
                if off > 0 && c + off < w {
                    consider(c + off, &mut best);
                }
            }
            out.push(best.expect("foreground exists"));
        }
    }
    Some(out)
}

fn gaussian_1d(sigma: f64, radius: usize) -> Vec<f64> {
    let r = radius as isize;
    let raw: Vec<f64> = (-r..=r).map(|x| (-((x * x) as f64) / (2.0 * sigma * sigma)).exp()).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// Separable correlation with a normalized Gaussian, zero outside the image.
fn gaussian_filter(data: &[f64], w: usize, h: usize, sigma: f64, radius: usize) -> Vec<f64> {
    let k = gaussian_1d(sigma, radius);
    let r = radius as isize;
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (ki, kv) in k.iter().enumerate() {
                let xx = x as isize + ki as isize - r;
                if (0..w as isize).contains(&xx) {
                    acc += kv * data[y * w + xx as usize];
                }
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (ki, kv) in k.iter().enumerate() {
                let yy = y as isize + ki as isize - r;
                if (0..h as isize).contains(&yy) {
                    acc += kv * tmp[yy as usize * w + x];
                }
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// Weighted Fβ of a non-binary map against a ground truth with at least one
/// foreground pixel.
pub fn fbw(sm: &GrayMap, gt: &BinMap, params: &FbwParams) -> Result<f64> {
    params.validate()?;
    if sm.dims() != gt.dims() {
        return Err(Error::dims(sm.dims(), gt.dims()));
    }
    let nearest = nearest_foreground(gt).ok_or(Error::EmptyForeground)?;
    let (w, h) = gt.dims();
    let g = gt.values();
    let err: Vec<f64> = sm.values().iter().zip(g).map(|(&v, &f)| if f { (1.0 - v).abs() } else { v }).collect();

    let borrowed: Vec<f64> = (0..w * h).map(|i| if g[i] { err[i] } else { err[nearest[i].1] }).collect();
    let smoothed = gaussian_filter(&borrowed, w, h, params.dependency_sigma, params.dependency_kernel_radius);

    let decay = 0.5f64.ln() / params.importance_decay;
    let (mut fg_err, mut bg_err) = (0.0, 0.0);
    for i in 0..w * h {
        if g[i] {
            fg_err += err[i].min(smoothed[i]);
        } else {
            let d = (nearest[i].0 as f64).sqrt();
            bg_err += err[i] * (2.0 - (decay * d).exp());
        }
    }

    let n_fg = gt.foreground_count() as f64;
    let tp = n_fg - fg_err;
    let recall = 1.0 - fg_err / n_fg;
    let precision = if tp + bg_err > 0.0 { tp / (tp + bg_err) } else { 0.0 };
    let denom = recall + params.beta_sq * precision;
    if denom <= 0.0 {
        return Ok(0.0);
    }
    Ok((1.0 + params.beta_sq) * recall * precision / denom)
}
