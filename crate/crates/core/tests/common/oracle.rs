//! Reference implementations written straight from the formulas, sharing no
//! code with the library: nested vectors, explicit loops, brute force.

#![allow(clippy::needless_range_loop)]

pub type Grid<T> = Vec<Vec<T>>;

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample variance with the n − 1 divisor; zero for a single value.
fn var(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
}

fn cov(x: &[f64], y: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let (mx, my) = (mean(x), mean(y));
    x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (x.len() - 1) as f64
}

/// Luminance × contrast × structure, with the degenerate cases spelled out.
pub fn ssim(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let (vx, vy) = (var(x), var(y));
    if vx == 0.0 && vy == 0.0 {
        return if (mx - my).abs() <= 1e-8 { 1.0 } else { 0.0 };
    }
    let den = (mx * mx + my * my) * (vx + vy);
    if den == 0.0 {
        return if x == y { 1.0 } else { 0.0 };
    }
    let q = 4.0 * mx * my * cov(x, y) / den;
    q.clamp(-1.0, 1.0)
}

/// Rectangle `[r0, r1) × [c0, c1)`.
#[derive(Debug, Clone, Copy)]
struct Rect {
    r0: usize,
    r1: usize,
    c0: usize,
    c1: usize,
}

/// Number of leading rows (or columns) of the first part of a split.
/// The foreground centroid, taken 1-based, is rounded half-to-even and
/// clamped so both parts are non-empty; without foreground, split in half.
fn cut(extent: usize, centroid_0based: Option<f64>) -> usize {
    match centroid_0based {
        None => (extent / 2).max(1),
        Some(c) => {
            let k = (c + 1.0).round_ties_even() as i64;
            k.clamp(1, (extent as i64 - 1).max(1)) as usize
        }
    }
}

fn split(gt: &Grid<bool>, rect: Rect, depth: u32, out: &mut Vec<Rect>) {
    if depth == 0 {
        out.push(rect);
        return;
    }
    let (mut n, mut sr, mut sc) = (0usize, 0.0, 0.0);
    for r in rect.r0..rect.r1 {
        for c in rect.c0..rect.c1 {
            if gt[r][c] {
                n += 1;
                sr += (r - rect.r0) as f64;
                sc += (c - rect.c0) as f64;
            }
        }
    }
    let (h, w) = (rect.r1 - rect.r0, rect.c1 - rect.c0);
    let centroid = (n > 0).then(|| (sr / n as f64, sc / n as f64));
    let rows = if h >= 2 { cut(h, centroid.map(|c| c.0)) } else { h };
    let cols = if w >= 2 { cut(w, centroid.map(|c| c.1)) } else { w };
    let quads = [
        Rect {
            r0: rect.r0,
            r1: rect.r0 + rows,
            c0: rect.c0,
            c1: rect.c0 + cols,
        },
        Rect {
            r0: rect.r0,
            r1: rect.r0 + rows,
            c0: rect.c0 + cols,
            c1: rect.c1,
        },
        Rect {
            r0: rect.r0 + rows,
            r1: rect.r1,
            c0: rect.c0,
            c1: rect.c0 + cols,
        },
        Rect {
            r0: rect.r0 + rows,
            r1: rect.r1,
            c0: rect.c0 + cols,
            c1: rect.c1,
        },
    ];
    for q in quads {
        if q.r1 > q.r0 && q.c1 > q.c0 {
            split(gt, q, depth - 1, out);
        }
    }
}

fn object_term(v: &[f64], lambda: f64) -> f64 {
    let m = mean(v);
    let s = var(v).sqrt();
    2.0 * m / (m * m + 1.0 + 2.0 * lambda * s)
}

/// Structure-measure on nested grids, foreground-proportional block weights.
pub fn s_measure(sm: &Grid<f64>, gt: &Grid<bool>, alpha: f64, lambda: f64, k_blocks: usize) -> f64 {
    let h = gt.len();
    let w = gt[0].len();
    let all: Vec<(usize, usize)> = (0..h).flat_map(|r| (0..w).map(move |c| (r, c))).collect();
    let n_fg = all.iter().filter(|&&(r, c)| gt[r][c]).count();
    let sm_mean = all.iter().map(|&(r, c)| sm[r][c]).sum::<f64>() / all.len() as f64;
    if n_fg == 0 {
        return 1.0 - sm_mean;
    }
    if n_fg == all.len() {
        return sm_mean;
    }

    // object-aware term
    let fg: Vec<f64> = all.iter().filter(|&&(r, c)| gt[r][c]).map(|&(r, c)| sm[r][c]).collect();
    let bg: Vec<f64> = all.iter().filter(|&&(r, c)| !gt[r][c]).map(|&(r, c)| 1.0 - sm[r][c]).collect();
    let mu = n_fg as f64 / all.len() as f64;
    let s_o = mu * object_term(&fg, lambda) + (1.0 - mu) * object_term(&bg, lambda);

    // region-aware term
    let mut depth = 0;
    let mut k = k_blocks;
    while k > 1 {
        k /= 4;
        depth += 1;
    }
    let mut blocks = Vec::new();
    split(gt, Rect { r0: 0, r1: h, c0: 0, c1: w }, depth, &mut blocks);
    let mut s_r = 0.0;
    for b in blocks {
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut fg_in = 0;
        for r in b.r0..b.r1 {
            for c in b.c0..b.c1 {
                x.push(sm[r][c]);
                y.push(if gt[r][c] { 1.0 } else { 0.0 });
                fg_in += usize::from(gt[r][c]);
            }
        }
        s_r += fg_in as f64 / n_fg as f64 * ssim(&x, &y);
    }

    (alpha * s_o + (1.0 - alpha) * s_r).clamp(0.0, 1.0)
}

/// Weighted Fβ by brute force: nearest foreground pixel by exhaustive search
/// (ties to the first in row-major order), full 2D Gaussian convolution with
/// zero padding.
pub fn fbw(sm: &Grid<f64>, gt: &Grid<bool>, beta_sq: f64, sigma: f64, radius: usize, decay: f64) -> f64 {
    let h = gt.len();
    let w = gt[0].len();
    let e: Grid<f64> = (0..h)
        .map(|r| (0..w).map(|c| ((if gt[r][c] { 1.0 } else { 0.0 }) - sm[r][c]).abs()).collect())
        .collect();

    let fg_pixels: Vec<(usize, usize)> = (0..h).flat_map(|r| (0..w).map(move |c| (r, c))).filter(|&(r, c)| gt[r][c]).collect();
    let mut dist = vec![vec![0.0; w]; h];
    let mut borrowed = e.clone();
    for r in 0..h {
        for c in 0..w {
            if gt[r][c] {
                continue;
            }
            let mut best = (f64::INFINITY, (0, 0));
            for &(fr, fc) in &fg_pixels {
                let d = ((r as f64 - fr as f64).powi(2) + (c as f64 - fc as f64).powi(2)).sqrt();
                if d < best.0 {
                    best = (d, (fr, fc));
                }
            }
            dist[r][c] = best.0;
            borrowed[r][c] = e[best.1 .0][best.1 .1];
        }
    }

    let ri = radius as i64;
    let mut kernel = vec![vec![0.0; 2 * radius + 1]; 2 * radius + 1];
    let mut ksum = 0.0;
    for dy in -ri..=ri {
        for dx in -ri..=ri {
            let v = (-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp();
            kernel[(dy + ri) as usize][(dx + ri) as usize] = v;
            ksum += v;
        }
    }
    let mut smoothed = vec![vec![0.0; w]; h];
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for dy in -ri..=ri {
                for dx in -ri..=ri {
                    let (rr, cc) = (r as i64 + dy, c as i64 + dx);
                    if rr >= 0 && rr < h as i64 && cc >= 0 && cc < w as i64 {
                        acc += kernel[(dy + ri) as usize][(dx + ri) as usize] / ksum * borrowed[rr as usize][cc as usize];
                    }
                }
            }
            smoothed[r][c] = acc;
        }
    }

    let mut fg_err = 0.0;
    let mut bg_err = 0.0;
    for r in 0..h {
        for c in 0..w {
            if gt[r][c] {
                fg_err += if smoothed[r][c] < e[r][c] { smoothed[r][c] } else { e[r][c] };
            } else {
                let importance = 2.0 - ((0.5f64).ln() / decay * dist[r][c]).exp();
                bg_err += e[r][c] * importance;
            }
        }
    }
    let n_fg = fg_pixels.len() as f64;
    let tp = n_fg - fg_err;
    let recall = 1.0 - fg_err / n_fg;
    let precision = if tp + bg_err == 0.0 { 0.0 } else { tp / (tp + bg_err) };
    if recall + beta_sq * precision == 0.0 {
        return 0.0;
    }
    (1.0 + beta_sq) * recall * precision / (recall + beta_sq * precision)
}
