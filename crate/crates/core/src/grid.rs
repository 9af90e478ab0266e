//! Rectangular pixel grids over a window of the complex plane, with the
//! binary-image operations the slice pipeline needs.
//!
//! Pixel `(i, j)` has column `i` from the left and row `j` from the top, so
//! row 0 sits at `y1` and the last row at `y0`.

use std::collections::VecDeque;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        let w = Self { x0, y0, x1, y1 };
        w.validate()?;
        Ok(w)
    }

    /// The square `[−r, r]²`.
    pub fn centered(r: f64) -> Self {
        Self {
            x0: -r,
            y0: -r,
            x1: r,
            y1: r,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.x0, self.y0, self.x1, self.y1];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidWindow("non-finite bound".into()));
        }
        if !(self.x1 > self.x0 && self.y1 > self.y0) {
            return Err(Error::InvalidWindow(format!(
                "need x0 < x1 and y0 < y1, got [{}, {}] x [{}, {}]",
                self.x0, self.x1, self.y0, self.y1
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Resolution {
    pub width: u32,
    pub height: u32,
}

impl Resolution {
    pub const MAX_SIDE: u32 = 8192;

    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 || width > Self::MAX_SIDE || height > Self::MAX_SIDE {
            return Err(Error::InvalidResolution(width, height));
        }
        Ok(Self { width, height })
    }

    pub fn square(n: u32) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn len(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Maps between pixels and points for a window sampled at a resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelGrid {
    pub window: Window,
    pub resolution: Resolution,
}

impl PixelGrid {
    pub fn new(window: Window, resolution: Resolution) -> Self {
        Self { window, resolution }
    }

    pub fn width(&self) -> usize {
        self.resolution.width as usize
    }

    pub fn height(&self) -> usize {
        self.resolution.height as usize
    }

    pub fn len(&self) -> usize {
        self.resolution.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        self.window.width() / self.resolution.width as f64
    }

    pub fn dy(&self) -> f64 {
        self.window.height() / self.resolution.height as f64
    }

    /// Center of pixel `(i, j)`.
    pub fn center(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(
            self.window.x0 + (i as f64 + 0.5) * self.dx(),
            self.window.y1 - (j as f64 + 0.5) * self.dy(),
        )
    }

    pub fn center_of_index(&self, idx: usize) -> Complex64 {
        self.center(idx % self.width(), idx / self.width())
    }

    /// Pixel containing `z`, if inside the window.
    pub fn locate(&self, z: Complex64) -> Option<(usize, usize)> {
        let fi = (z.re - self.window.x0) / self.dx();
        let fj = (self.window.y1 - z.im) / self.dy();
        if !(fi >= 0.0 && fj >= 0.0) {
            return None;
        }
        let (i, j) = (fi as usize, fj as usize);
        (i < self.width() && j < self.height()).then_some((i, j))
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.width() + i
    }

    /// Index of the pixel mirrored through the window center.
    pub fn reflect_index(&self, idx: usize) -> usize {
        let (w, h) = (self.width(), self.height());
        let (i, j) = (idx % w, idx / w);
        (h - 1 - j) * w + (w - 1 - i)
    }
}

/// 4-neighbours of pixel `idx` in a `w × h` grid.
#[inline]
pub fn neighbors4(idx: usize, w: usize, h: usize) -> impl Iterator<Item = usize> {
    let (i, j) = (idx % w, idx / w);
    let left = (i > 0).then(|| idx - 1);
    let right = (i + 1 < w).then(|| idx + 1);
    let up = (j > 0).then(|| idx - w);
    let down = (j + 1 < h).then(|| idx + w);
    [left, right, up, down].into_iter().flatten()
}

/// Labels the 4-connected components of `mask`. Background is 0 and
/// components are numbered from 1 in row-major order of first pixel.
pub fn label_components(mask: &[bool], w: usize, h: usize) -> (Vec<u32>, u32) {
    assert_eq!(mask.len(), w * h);
    let mut labels = vec![0u32; mask.len()];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..mask.len() {
        if !mask[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            for q in neighbors4(p, w, h) {
                if mask[q] && labels[q] == 0 {
                    labels[q] = next;
                    queue.push_back(q);
                }
            }
        }
    }
    (labels, next)
}

/// Dilation by the 3×3 cross: a pixel is set when it or a 4-neighbour is.
pub fn dilate4(mask: &[bool], w: usize, h: usize) -> Vec<bool> {
    assert_eq!(mask.len(), w * h);
    (0..mask.len())
        .map(|idx| mask[idx] || neighbors4(idx, w, h).any(|q| mask[q]))
        .collect()
}

/// True when any border pixel is set.
pub fn touches_border(mask: &[bool], w: usize, h: usize) -> bool {
    (0..w).any(|i| mask[i] || mask[(h - 1) * w + i])
        || (0..h).any(|j| mask[j * w] || mask[j * w + w - 1])
}

/// `mask` together with every unset pixel that the border cannot reach
/// through 4-connected unset pixels.
pub fn fill_holes(mask: &[bool], w: usize, h: usize) -> Result<Vec<bool>> {
    fill_holes_with_exterior(mask, &vec![false; mask.len()], w, h)
}

/// Like [`fill_holes`], with the unset pixels of `exterior` also treated as
/// reachable from outside.
pub fn fill_holes_with_exterior(mask: &[bool], exterior: &[bool], w: usize, h: usize) -> Result<Vec<bool>> {
    assert_eq!(mask.len(), w * h);
    assert_eq!(exterior.len(), w * h);
    if touches_border(mask, w, h) {
        return Err(Error::WindowTooSmall);
    }
    let mut outside = vec![false; mask.len()];
    let mut queue = VecDeque::new();
    let border = (0..w)
        .flat_map(|i| [i, (h - 1) * w + i])
        .chain((0..h).flat_map(|j| [j * w, j * w + w - 1]));
    let seeds = border.chain((0..mask.len()).filter(|&k| exterior[k] && !mask[k]));
    for idx in seeds {
        if !outside[idx] {
            outside[idx] = true;
            queue.push_back(idx);
        }
    }
    while let Some(p) = queue.pop_front() {
        for q in neighbors4(p, w, h) {
            if !mask[q] && !outside[q] {
                outside[q] = true;
                queue.push_back(q);
            }
        }
    }
    Ok(outside.iter().map(|&o| !o).collect())
}

/// City-block distance from each set pixel to the nearest unset pixel or
/// the outside of the grid; unset pixels get 0.
pub fn distance_transform(mask: &[bool], w: usize, h: usize) -> Vec<u32> {
    assert_eq!(mask.len(), w * h);
    let inf = (w + h) as u32;
    let mut d: Vec<u32> = mask.iter().map(|&m| if m { inf } else { 0 }).collect();
    for j in 0..h {
        for i in 0..w {
            let idx = j * w + i;
            if d[idx] == 0 {
                continue;
            }
            let up = if j > 0 { d[idx - w] } else { 0 };
            let left = if i > 0 { d[idx - 1] } else { 0 };
            d[idx] = d[idx].min(up + 1).min(left + 1);
        }
    }
    for j in (0..h).rev() {
        for i in (0..w).rev() {
            let idx = j * w + i;
            if d[idx] == 0 {
                continue;
            }
            let down = if j + 1 < h { d[idx + w] } else { 0 };
            let right = if i + 1 < w { d[idx + 1] } else { 0 };
            d[idx] = d[idx].min(down + 1).min(right + 1);
        }
    }
    d
}
