//! Map representations and the pixel-level quantities every measure shares.
//!
//! A [`GrayMap`] is a non-binary prediction with values in `[0, 1]`; a
//! [`BinMap`] is a boolean mask, used for ground truth and for thresholded
//! predictions. Both are stored row-major.

use std::path::Path;

use image::DynamicImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Non-binary foreground map with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

/// Boolean mask, `true` marks foreground.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinMap {
    width: usize,
    height: usize,
    values: Vec<bool>,
}

/// Pixel-wise confusion totals between a prediction and a ground truth mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

/// Mean and (n-1)-normalized standard deviation of a sample, plus the
/// covariance with a partner sample when one was supplied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionStats {
    pub mean: f64,
    pub stddev: f64,
    pub covariance: Option<f64>,
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(format!("map dimensions must be positive, got {width}x{height}")));
    }
    if width.checked_mul(height) != Some(len) {
        return Err(Error::LengthMismatch(width.saturating_mul(height), len));
    }
    Ok(())
}

impl GrayMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        check_dims(width, height, values.len())?;
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidParameter(format!("gray map value {bad} outside [0, 1]")));
        }
        Ok(GrayMap { width, height, values })
    }

    /// Constant map.
    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    /// Builds a map from 8-bit samples, mapping `p` to `p / 255`.
    pub fn from_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        check_dims(width, height, bytes.len())?;
        Ok(GrayMap {
            width,
            height,
            values: bytes.iter().map(|&p| f64::from(p) / 255.0).collect(),
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(width.saturating_mul(height));
        for r in 0..height {
            for c in 0..width {
                values.push(f(r, c));
            }
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `(width, height)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Quantizes back to 8 bits (`round(v * 255)`).
    pub fn to_bytes(&self) -> Vec<u8> {
        self.values.iter().map(|v| (v * 255.0).round().clamp(0.0, 255.0) as u8).collect()
    }

    /// Writes the map as an 8-bit grayscale image; format follows the extension.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        save_luma(path.as_ref(), self.width, self.height, self.to_bytes())
    }
}

impl From<&BinMap> for GrayMap {
    fn from(m: &BinMap) -> Self {
        GrayMap {
            width: m.width,
            height: m.height,
            values: m.values.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }
}

impl BinMap {
    pub fn new(width: usize, height: usize, values: Vec<bool>) -> Result<Self> {
        check_dims(width, height, values.len())?;
        Ok(BinMap { width, height, values })
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut values = Vec::with_capacity(width.saturating_mul(height));
        for r in 0..height {
            for c in 0..width {
                values.push(f(r, c));
            }
        }
        Self::new(width, height, values)
    }

    /// Parses rows of `#` (foreground) and `.` (background); handy for fixtures.
    pub fn from_ascii(rows: &[&str]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut values = Vec::with_capacity(width * height);
        for row in rows {
            if row.len() != width {
                return Err(Error::LengthMismatch(width, row.len()));
            }
            values.extend(row.bytes().map(|b| b == b'#'));
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `(width, height)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.values[row * self.width + col]
    }

    pub fn foreground_count(&self) -> usize {
        self.values.iter().filter(|&&b| b).count()
    }

    pub fn not(&self) -> BinMap {
        BinMap {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|b| !b).collect(),
        }
    }

    /// Writes the mask as an 8-bit {0, 255} image; format follows the extension.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let bytes = self.values.iter().map(|&b| if b { 255 } else { 0 }).collect();
        save_luma(path.as_ref(), self.width, self.height, bytes)
    }
}

fn save_luma(path: &Path, width: usize, height: usize, bytes: Vec<u8>) -> Result<()> {
    let img = image::GrayImage::from_raw(width as u32, height as u32, bytes).expect("buffer length matches dimensions");
    img.save(path).map_err(|e| match e {
        image::ImageError::IoError(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => Error::UnsupportedFormat {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// Decodes a raster into 8-bit luma. Color is reduced with BT.601 weights.
fn decode_luma(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let reader = image::ImageReader::open(path)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?
        .with_guessed_format()
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    if reader.format().is_none() {
        return Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
            message: "unrecognized image format".into(),
        });
    }
    let img = reader.decode().map_err(|e| match e {
        image::ImageError::Unsupported(u) => Error::UnsupportedFormat {
            path: path.to_path_buf(),
            message: u.to_string(),
        },
        other => Error::Decode {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    if w == 0 || h == 0 {
        return Err(Error::EmptyImage(path.to_path_buf()));
    }
    let bytes = match img {
        DynamicImage::ImageLuma8(buf) => buf.into_raw(),
        DynamicImage::ImageLumaA8(buf) => buf.pixels().map(|p| p.0[0]).collect(),
        DynamicImage::ImageRgb8(buf) => buf.pixels().map(|p| bt601(p.0[0], p.0[1], p.0[2])).collect(),
        DynamicImage::ImageRgba8(buf) => buf.pixels().map(|p| bt601(p.0[0], p.0[1], p.0[2])).collect(),
        other => {
            return Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                message: format!("only 8-bit rasters are supported, got {:?}", other.color()),
            })
        }
    };
    Ok((w, h, bytes))
}

fn bt601(r: u8, g: u8, b: u8) -> u8 {
    let y = 299 * u32::from(r) + 587 * u32::from(g) + 114 * u32::from(b);
    ((y + 500) / 1000) as u8
}

/// Loads a raster as a [`GrayMap`], each byte `p` becoming `p / 255`.
pub fn load_gray_map(path: impl AsRef<Path>) -> Result<GrayMap> {
    let (w, h, bytes) = decode_luma(path.as_ref())?;
    GrayMap::from_bytes(w, h, &bytes)
}

/// Loads a raster as a mask: foreground iff `p / 255 >= threshold`.
pub fn load_binary_map(path: impl AsRef<Path>, threshold: f64) -> Result<BinMap> {
    let gray = load_gray_map(path)?;
    Ok(BinMap {
        width: gray.width,
        height: gray.height,
        values: gray.values.iter().map(|&v| v >= threshold).collect(),
    })
}

pub fn confusion_counts(pred: &BinMap, gt: &BinMap) -> Result<ConfusionCounts> {
    if pred.dims() != gt.dims() {
        return Err(Error::dims(pred.dims(), gt.dims()));
    }
    let mut c = ConfusionCounts::default();
    for (&p, &g) in pred.values.iter().zip(&gt.values) {
        match (p, g) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// Foreground iff `value >= t`.
pub fn threshold_map(sm: &GrayMap, t: f64) -> Result<BinMap> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("threshold {t} outside [0, 1]")));
    }
    Ok(BinMap {
        width: sm.width,
        height: sm.height,
        values: sm.values.iter().map(|&v| v >= t).collect(),
    })
}

/// Mean `(row, col)` of the foreground pixels, or the image center when the
/// mask has no foreground.
pub fn foreground_centroid(gt: &BinMap) -> (f64, f64) {
    let (mut sr, mut sc, mut n) = (0.0f64, 0.0f64, 0u64);
    for (i, _) in gt.values.iter().enumerate().filter(|(_, &b)| b) {
        sr += (i / gt.width) as f64;
        sc += (i % gt.width) as f64;
        n += 1;
    }
    if n == 0 {
        return ((gt.height - 1) as f64 / 2.0, (gt.width - 1) as f64 / 2.0);
    }
    (sr / n as f64, sc / n as f64)
}

pub fn invert(m: &GrayMap) -> GrayMap {
    GrayMap {
        width: m.width,
        height: m.height,
        values: m.values.iter().map(|v| 1.0 - v).collect(),
    }
}

/// Sample statistics with the unbiased `(n - 1)` divisor. A single sample has
/// zero spread.
pub fn region_stats(values: &[f64], partner: Option<&[f64]>) -> Result<RegionStats> {
    if values.is_empty() {
        return Err(Error::EmptyInput("region_stats"));
    }
    if let Some(p) = partner {
        if p.len() != values.len() {
            return Err(Error::LengthMismatch(values.len(), p.len()));
        }
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok(RegionStats {
            mean,
            stddev: 0.0,
            covariance: partner.map(|_| 0.0),
        });
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    let covariance = partner.map(|p| {
        let pm = p.iter().sum::<f64>() / n;
        values.iter().zip(p).map(|(a, b)| (a - mean) * (b - pm)).sum::<f64>() / (n - 1.0)
    });
    Ok(RegionStats {
        mean,
        stddev: var.sqrt(),
        covariance,
    })
}
