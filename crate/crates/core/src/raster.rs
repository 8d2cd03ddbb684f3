//! Pixel grids over a viewport, boolean attractor masks and RGB pictures.

use crate::error::{Error, Result};
use crate::geometry::{Point2, Viewport};

pub type Rgb = [u8; 3];

/// Points this far outside the viewport (in pixels) still bin to an edge pixel.
const EDGE_SLACK: f64 = 1e-3;

/// A `width × height` raster over a viewport. Pixel `(i, j)` is the cell whose
/// center is `min + ((i + ½)·pitch_x, (j + ½)·pitch_y)`; row 0 sits at the
/// viewport's minimum `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelGrid {
    width: usize,
    height: usize,
    viewport: Viewport,
}

impl PixelGrid {
    pub fn new(width: usize, height: usize, viewport: Viewport) -> Result<Self> {
        if width == 0 || height == 0 || (width as u128) * (height as u128) > 1u128 << 31 {
            return Err(Error::BadGrid { width, height });
        }
        Ok(Self {
            width,
            height,
            viewport,
        })
    }

    pub fn square(size: usize, viewport: Viewport) -> Result<Self> {
        Self::new(size, size, viewport)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn viewport(&self) -> Viewport {
        self.viewport
    }

    pub fn pitch_x(&self) -> f64 {
        self.viewport.width() / self.width as f64
    }

    pub fn pitch_y(&self) -> f64 {
        self.viewport.height() / self.height as f64
    }

    /// The larger of the two pixel pitches.
    pub fn pitch(&self) -> f64 {
        self.pitch_x().max(self.pitch_y())
    }

    pub fn pixel_area(&self) -> f64 {
        self.pitch_x() * self.pitch_y()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.width + i
    }

    #[inline]
    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.width, index / self.width)
    }

    pub fn center(&self, i: usize, j: usize) -> Point2 {
        Point2::new(
            self.viewport.min.x + (i as f64 + 0.5) * self.pitch_x(),
            self.viewport.min.y + (j as f64 + 0.5) * self.pitch_y(),
        )
    }

    /// Unclamped pixel coordinates: may be negative or past the last pixel.
    #[inline]
    pub fn pixel_signed(&self, p: Point2) -> Option<(i64, i64)> {
        if !p.is_finite() {
            return None;
        }
        let fx = (p.x - self.viewport.min.x) / self.pitch_x();
        let fy = (p.y - self.viewport.min.y) / self.pitch_y();
        if fx.abs() > 1e15 || fy.abs() > 1e15 {
            return None;
        }
        Some((bin(fx, self.width), bin(fy, self.height)))
    }

    /// Half-open binning; the maximum edge belongs to the last pixel.
    #[inline]
    pub fn pixel_of(&self, p: Point2) -> Option<(usize, usize)> {
        let (i, j) = self.pixel_signed(p)?;
        self.in_range(i, j)
    }

    #[inline]
    pub fn in_range(&self, i: i64, j: i64) -> Option<(usize, usize)> {
        (i >= 0 && j >= 0 && (i as usize) < self.width && (j as usize) < self.height)
            .then_some((i as usize, j as usize))
    }

    #[inline]
    pub fn index_of(&self, p: Point2) -> Option<usize> {
        self.pixel_of(p).map(|(i, j)| self.index(i, j))
    }
}

#[inline]
fn bin(f: f64, n: usize) -> i64 {
    let nf = n as f64;
    if (-EDGE_SLACK..0.0).contains(&f) {
        0
    } else if f >= nf && f <= nf + EDGE_SLACK {
        n as i64 - 1
    } else {
        f.floor() as i64
    }
}

/// One boolean per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct AttractorMask {
    grid: PixelGrid,
    bits: Vec<bool>,
}

impl AttractorMask {
    pub fn empty(grid: PixelGrid) -> Self {
        Self {
            grid,
            bits: vec![false; grid.len()],
        }
    }

    pub fn full(grid: PixelGrid) -> Self {
        Self {
            grid,
            bits: vec![true; grid.len()],
        }
    }

    pub fn from_bits(grid: PixelGrid, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, bits })
    }

    pub fn grid(&self) -> &PixelGrid {
        &self.grid
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[self.grid.index(i, j)]
    }

    #[inline]
    pub fn get_index(&self, index: usize) -> bool {
        self.bits[index]
    }

    #[inline]
    pub fn get_signed(&self, i: i64, j: i64) -> bool {
        self.grid
            .in_range(i, j)
            .is_some_and(|(i, j)| self.get(i, j))
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize) {
        let k = self.grid.index(i, j);
        self.bits[k] = true;
    }

    #[inline]
    pub fn set_index(&mut self, index: usize) {
        self.bits[index] = true;
    }

    /// Sets the pixel containing `p`; returns false when `p` is outside the grid.
    #[inline]
    pub fn plot(&mut self, p: Point2) -> bool {
        match self.grid.index_of(p) {
            Some(k) => {
                self.bits[k] = true;
                true
            }
            None => false,
        }
    }

    #[inline]
    pub fn contains_point(&self, p: Point2) -> bool {
        self.grid.index_of(p).is_some_and(|k| self.bits[k])
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    pub fn iter_set(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(k, _)| self.grid.coords(k))
    }

    pub fn union_with(&mut self, other: &AttractorMask) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= *b;
        }
        Ok(())
    }

    pub fn intersection_count(&self, other: &AttractorMask) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| **a && **b)
            .count()
    }

    /// Chebyshev dilation by `radius` pixels.
    pub fn dilate(&self, radius: usize) -> AttractorMask {
        if radius == 0 {
            return self.clone();
        }
        let (w, h) = (self.grid.width, self.grid.height);
        let mut rows = vec![false; self.bits.len()];
        for j in 0..h {
            for i in 0..w {
                if self.bits[j * w + i] {
                    let lo = i.saturating_sub(radius);
                    let hi = (i + radius).min(w - 1);
                    rows[j * w + lo..=j * w + hi]
                        .iter_mut()
                        .for_each(|b| *b = true);
                }
            }
        }
        let mut out = vec![false; self.bits.len()];
        for j in 0..h {
            let lo = j.saturating_sub(radius);
            let hi = (j + radius).min(h - 1);
            for i in 0..w {
                if (lo..=hi).any(|jj| rows[jj * w + i]) {
                    out[j * w + i] = true;
                }
            }
        }
        AttractorMask {
            grid: self.grid,
            bits: out,
        }
    }

    /// True iff a set pixel lies within Chebyshev distance `dilation` of the
    /// pixel containing `pt`. Points outside the viewport are never members.
    pub fn membership(&self, pt: Point2, dilation: usize) -> bool {
        let Some((i, j)) = self.grid.pixel_of(pt) else {
            return false;
        };
        let r = dilation as i64;
        let (i, j) = (i as i64, j as i64);
        for dj in -r..=r {
            for di in -r..=r {
                if self.get_signed(i + di, j + dj) {
                    return true;
                }
            }
        }
        false
    }
}

/// An RGB picture on a grid, with a coverage flag per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterPicture {
    grid: PixelGrid,
    pixels: Vec<Rgb>,
    coverage: Vec<bool>,
}

impl RasterPicture {
    pub fn blank(grid: PixelGrid) -> Self {
        Self {
            grid,
            pixels: vec![[0, 0, 0]; grid.len()],
            coverage: vec![false; grid.len()],
        }
    }

    /// A fully covered picture with colors from a function of the pixel center.
    pub fn from_fn(grid: PixelGrid, mut color: impl FnMut(Point2) -> Rgb) -> Self {
        let mut pixels = Vec::with_capacity(grid.len());
        for j in 0..grid.height() {
            for i in 0..grid.width() {
                pixels.push(color(grid.center(i, j)));
            }
        }
        Self {
            grid,
            pixels,
            coverage: vec![true; grid.len()],
        }
    }

    pub fn from_parts(grid: PixelGrid, pixels: Vec<Rgb>, coverage: Vec<bool>) -> Result<Self> {
        if pixels.len() != grid.len() || coverage.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid,
            pixels,
            coverage,
        })
    }

    pub fn grid(&self) -> &PixelGrid {
        &self.grid
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    pub fn coverage(&self) -> &[bool] {
        &self.coverage
    }

    pub fn covered_count(&self) -> usize {
        self.coverage.iter().filter(|c| **c).count()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<Rgb> {
        let k = self.grid.index(i, j);
        self.coverage[k].then(|| self.pixels[k])
    }

    #[inline]
    pub fn color_at_index(&self, index: usize) -> Option<Rgb> {
        self.coverage[index].then(|| self.pixels[index])
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, color: Rgb) {
        let k = self.grid.index(i, j);
        self.set_index(k, color);
    }

    #[inline]
    pub fn set_index(&mut self, index: usize, color: Rgb) {
        self.pixels[index] = color;
        self.coverage[index] = true;
    }

    /// Color of the pixel containing `p`, if that pixel is covered.
    ///
    /// Uncovered pixels fall back to the nearest covered 8-neighbour, which
    /// absorbs the one-pixel disagreement between a mask and a point lying on
    /// its attractor.
    pub fn sample(&self, p: Point2) -> Option<Rgb> {
        let (i, j) = self.grid.pixel_signed(p)?;
        if let Some((ui, uj)) = self.grid.in_range(i, j) {
            if let Some(c) = self.get(ui, uj) {
                return Some(c);
            }
        }
        for (di, dj) in NEIGHBOURS {
            if let Some((ui, uj)) = self.grid.in_range(i + di, j + dj) {
                if let Some(c) = self.get(ui, uj) {
                    return Some(c);
                }
            }
        }
        None
    }

    /// Keeps coverage only where `mask` is set.
    pub fn masked(&self, mask: &AttractorMask) -> Result<RasterPicture> {
        if self.grid != *mask.grid() {
            return Err(Error::GridMismatch);
        }
        let coverage = self
            .coverage
            .iter()
            .zip(mask.bits())
            .map(|(c, m)| *c && *m)
            .collect();
        Ok(RasterPicture {
            grid: self.grid,
            pixels: self.pixels.clone(),
            coverage,
        })
    }
}

const NEIGHBOURS: [(i64, i64); 8] = [
    (-1, 0),
    (1, 0),
    (0, -1),
    (0, 1),
    (-1, -1),
    (1, -1),
    (-1, 1),
    (1, 1),
];
