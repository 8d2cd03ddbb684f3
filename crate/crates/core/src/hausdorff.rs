//! Exact Euclidean distance transforms and pixel Hausdorff distances.

use crate::error::{Error, Result};
use crate::raster::AttractorMask;

/// Squared distance from every pixel center to the nearest set pixel center,
/// in viewport units. Empty masks give `+∞` everywhere.
pub fn squared_distance_transform(mask: &AttractorMask) -> Vec<f64> {
    let grid = mask.grid();
    let (w, h) = (grid.width(), grid.height());
    let (sx, sy) = (grid.pitch_x(), grid.pitch_y());
    let mut d: Vec<f64> = mask
        .bits()
        .iter()
        .map(|&b| if b { 0.0 } else { f64::INFINITY })
        .collect();
    let mut scratch = Scratch::new(w.max(h));
    let mut column = vec![0.0; h];
    for i in 0..w {
        for j in 0..h {
            column[j] = d[j * w + i];
        }
        let out = scratch.transform(&column, sy);
        for j in 0..h {
            d[j * w + i] = out[j];
        }
    }
    for j in 0..h {
        let row = d[j * w..(j + 1) * w].to_vec();
        let out = scratch.transform(&row, sx);
        d[j * w..(j + 1) * w].copy_from_slice(out);
    }
    d
}

/// Buffers for the lower envelope of parabolas.
struct Scratch {
    v: Vec<usize>,
    z: Vec<f64>,
    out: Vec<f64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            v: vec![0; n],
            z: vec![0.0; n + 1],
            out: vec![0.0; n],
        }
    }

    /// `out[q] = min_p ((q - p)·s)² + f[p]`.
    fn transform(&mut self, f: &[f64], s: f64) -> &[f64] {
        let n = f.len();
        let out = &mut self.out[..n];
        let finite: Vec<usize> = (0..n).filter(|&p| f[p].is_finite()).collect();
        if finite.is_empty() {
            out.fill(f64::INFINITY);
            return out;
        }
        let pos = |p: usize| p as f64 * s;
        let (v, z) = (&mut self.v, &mut self.z);
        let mut k = 0;
        v[0] = finite[0];
        z[0] = f64::NEG_INFINITY;
        z[1] = f64::INFINITY;
        for &q in &finite[1..] {
            let cross = |p: usize| {
                ((f[q] + pos(q) * pos(q)) - (f[p] + pos(p) * pos(p))) / (2.0 * (pos(q) - pos(p)))
            };
            // z[0] is -∞, so this stops at k = 0 at the latest.
            while cross(v[k]) <= z[k] {
                k -= 1;
            }
            let c = cross(v[k]);
            k += 1;
            v[k] = q;
            z[k] = c;
            z[k + 1] = f64::INFINITY;
        }
        let mut k = 0;
        for (q, o) in out.iter_mut().enumerate() {
            while z[k + 1] < pos(q) {
                k += 1;
            }
            let dx = pos(q) - pos(v[k]);
            *o = dx * dx + f[v[k]];
        }
        out
    }
}

/// Directed distance: the largest distance from a set pixel of `from` to the
/// nearest set pixel of `to`.
pub fn directed_hausdorff(from: &AttractorMask, to: &AttractorMask) -> Result<f64> {
    if from.grid() != to.grid() {
        return Err(Error::GridMismatch);
    }
    if from.is_empty() || to.is_empty() {
        return Err(Error::EmptyMask);
    }
    let dt = squared_distance_transform(to);
    let worst = from
        .bits()
        .iter()
        .zip(&dt)
        .filter(|(b, _)| **b)
        .map(|(_, d)| *d)
        .fold(0.0, f64::max);
    Ok(worst.sqrt())
}

/// Symmetric Hausdorff distance between the set pixel centers of two masks,
/// in viewport units.
pub fn hausdorff_pixels(m1: &AttractorMask, m2: &AttractorMask) -> Result<f64> {
    Ok(directed_hausdorff(m1, m2)?.max(directed_hausdorff(m2, m1)?))
}
