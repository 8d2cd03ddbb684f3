//! Fractal transformations `φ_G ∘ τ_F`: tops plus color stealing, and a
//! deterministic per-pixel variant.

use std::cmp::Ordering;

use crate::address::{tops_compare_padded, ReverseAccumulator, DEFAULT_MAX_DEPTH};
use crate::attractor::{phi_eval, run_sharded, PhiValue, DEFAULT_BURN_IN};
use crate::error::{Error, Result};
use crate::geometry::{Ifs, Point2};
use crate::raster::{AttractorMask, PixelGrid, RasterPicture, Rgb};
use crate::rng::{SplitMix64, SymbolSampler};
use crate::tops::{tops_orbit, DomainPartition};

/// Best reverse address seen at one pixel and the color stolen with it.
#[derive(Debug, Clone, PartialEq)]
pub struct TopsRecord {
    /// Padded reverse address, most recent symbol first.
    pub best: Vec<u8>,
    pub color: Option<Rgb>,
    pub g_point: Point2,
}

impl TopsRecord {
    /// Orders records by address, then by color so that merging is
    /// independent of arrival order.
    fn rank(&self, best: &[u8], color: Option<Rgb>) -> Ordering {
        tops_compare_padded(best, &self.best).then_with(|| color.cmp(&self.color))
    }
}

/// Per-pixel records of a color-stealing run.
#[derive(Debug, Clone, PartialEq)]
pub struct StealCanvas {
    grid: PixelGrid,
    records: Vec<Option<TopsRecord>>,
    writes: u64,
    conflicts: u64,
}

impl StealCanvas {
    pub fn new(grid: PixelGrid) -> Self {
        Self {
            grid,
            records: vec![None; grid.len()],
            writes: 0,
            conflicts: 0,
        }
    }

    pub fn grid(&self) -> &PixelGrid {
        &self.grid
    }

    pub fn record(&self, index: usize) -> Option<&TopsRecord> {
        self.records[index].as_ref()
    }

    /// Keeps the sample if its address beats the stored one. An empty pixel
    /// accepts anything. Returns whether the record changed.
    pub fn offer(
        &mut self,
        index: usize,
        best: &[u8],
        color: Option<Rgb>,
        g_point: Point2,
    ) -> bool {
        let slot = &mut self.records[index];
        match slot {
            Some(r) if r.rank(best, color) != Ordering::Greater => false,
            Some(r) => {
                debug_assert_ne!(tops_compare_padded(best, &r.best), Ordering::Less);
                if r.color != color {
                    self.conflicts += 1;
                }
                r.best.clear();
                r.best.extend_from_slice(best);
                r.color = color;
                r.g_point = g_point;
                self.writes += 1;
                true
            }
            None => {
                *slot = Some(TopsRecord {
                    best: best.to_vec(),
                    color,
                    g_point,
                });
                self.writes += 1;
                true
            }
        }
    }

    /// Per-pixel maximum of two canvases.
    pub fn merge(&mut self, other: &StealCanvas) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        for (k, r) in other.records.iter().enumerate() {
            if let Some(r) = r {
                self.offer(k, &r.best, r.color, r.g_point);
            }
        }
        Ok(())
    }

    pub fn picture(&self) -> RasterPicture {
        let mut pic = RasterPicture::blank(self.grid);
        for (k, r) in self.records.iter().enumerate() {
            if let Some(TopsRecord { color: Some(c), .. }) = r {
                pic.set_index(k, *c);
            }
        }
        pic
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformReport {
    pub pixels_written: u64,
    pub update_conflicts: u64,
    /// Fraction of the reference attractor pixels that received a color.
    pub coverage_fraction: f64,
}

impl TransformReport {
    /// The run covered at least 99% of the attractor.
    pub fn sampling_ok(&self) -> bool {
        self.coverage_fraction >= 0.99
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StealOptions {
    pub iterations: u64,
    pub seed: u64,
    pub depth: usize,
    pub burn_in: u64,
    pub workers: usize,
}

impl Default for StealOptions {
    fn default() -> Self {
        Self {
            iterations: 10_000_000,
            seed: 1,
            depth: DEFAULT_MAX_DEPTH,
            burn_in: DEFAULT_BURN_IN,
            workers: 1,
        }
    }
}

/// Tops plus color stealing.
///
/// Two orbits `x_k = f_{σk}(x_{k-1})` and `y_k = g_{σk}(y_{k-1})` start at the
/// viewport centers and share one symbol stream drawn with `F`'s
/// probabilities. After burn-in, the pixel of `x_k` takes the color of
/// `picture_g` at `y_k` whenever `σ_k σ_{k-1} … σ_1 1̄` beats the pixel's
/// stored reverse address. With several workers each runs its own orbit on
/// stream `SplitMix64::for_stream(seed, w)` and the canvases merge by maximum.
///
/// `attractor_f` fixes the output grid and is the reference for coverage.
pub fn color_steal(
    f: &Ifs,
    g: &Ifs,
    picture_g: &RasterPicture,
    attractor_f: &AttractorMask,
    opts: &StealOptions,
) -> Result<(RasterPicture, TransformReport)> {
    let canvas = steal_canvas(f, g, picture_g, attractor_f.grid(), opts)?;
    let pic = canvas.picture();
    let covered = pic
        .coverage()
        .iter()
        .zip(attractor_f.bits())
        .filter(|(c, a)| **c && **a)
        .count();
    let total = attractor_f.count();
    let report = TransformReport {
        pixels_written: canvas.records.iter().filter(|r| r.is_some()).count() as u64,
        update_conflicts: canvas.conflicts,
        coverage_fraction: if total == 0 {
            0.0
        } else {
            covered as f64 / total as f64
        },
    };
    Ok((pic, report))
}

/// The record canvas behind [`color_steal`].
pub fn steal_canvas(
    f: &Ifs,
    g: &Ifs,
    picture_g: &RasterPicture,
    grid_f: &PixelGrid,
    opts: &StealOptions,
) -> Result<StealCanvas> {
    if f.len() != g.len() {
        return Err(Error::MapCountMismatch {
            expected: f.len(),
            found: g.len(),
        });
    }
    if opts.depth == 0 {
        return Err(Error::InvalidParameter(
            "reverse address depth must be positive".into(),
        ));
    }
    let workers = opts.workers.max(1);
    let canvases = run_sharded(workers, workers, |w| {
        let share = opts.iterations / workers as u64
            + u64::from((w as u64) < opts.iterations % workers as u64);
        steal_orbit(
            f,
            g,
            picture_g,
            grid_f,
            opts,
            share,
            SplitMix64::for_stream(opts.seed, w as u64),
        )
    });
    let mut it = canvases.into_iter();
    let mut canvas = it.next().expect("at least one worker");
    for c in it {
        canvas.merge(&c)?;
    }
    Ok(canvas)
}

fn steal_orbit(
    f: &Ifs,
    g: &Ifs,
    picture_g: &RasterPicture,
    grid_f: &PixelGrid,
    opts: &StealOptions,
    iterations: u64,
    mut rng: SplitMix64,
) -> StealCanvas {
    let mut canvas = StealCanvas::new(*grid_f);
    let sampler = SymbolSampler::new(f.probabilities());
    let mut acc = ReverseAccumulator::new(opts.depth);
    let mut x = f.viewport().center();
    let mut y = g.viewport().center();
    for k in 1..=iterations {
        let s = sampler.select(rng.next_u64());
        x = f.map(s).apply(x);
        y = g.map(s).apply(y);
        acc.push(s);
        if k <= opts.burn_in {
            continue;
        }
        if let Some(index) = grid_f.index_of(x) {
            let best = acc.padded();
            let beats = canvas.records[index]
                .as_ref()
                .is_none_or(|r| tops_compare_padded(best, &r.best) != Ordering::Less);
            if beats {
                canvas.offer(index, best, picture_g.sample(y), y);
            }
        }
    }
    canvas
}

/// `φ_G` of the depth-`d` tops itinerary of `x` under `F`.
pub fn transform_point(
    f_part: &DomainPartition,
    g: &Ifs,
    x: Point2,
    depth: usize,
) -> Result<PhiValue> {
    if f_part.ifs().len() != g.len() {
        return Err(Error::MapCountMismatch {
            expected: f_part.ifs().len(),
            found: g.len(),
        });
    }
    let it = tops_orbit(f_part, x, depth)?;
    Ok(phi_eval(g, &it.prefix, None))
}

/// Transforms each attractor pixel of `F` through its representative point,
/// sampling `picture_g` at the image. Uncovered where the orbit or the
/// sample fails.
pub fn transform_picture_deterministic(
    f_part: &DomainPartition,
    g: &Ifs,
    picture_g: &RasterPicture,
    depth: usize,
    workers: usize,
) -> Result<(RasterPicture, TransformReport)> {
    let grid = *f_part.grid();
    let images = transform_pixels(f_part, g, depth, workers)?;
    let mut pic = RasterPicture::blank(grid);
    let mut written = 0u64;
    for (k, p) in images.iter().enumerate() {
        if let Some(c) = p.and_then(|p| picture_g.sample(p.point)) {
            pic.set_index(k, c);
            written += 1;
        }
    }
    let total = f_part.mask().count();
    let report = TransformReport {
        pixels_written: written,
        update_conflicts: 0,
        coverage_fraction: if total == 0 {
            0.0
        } else {
            written as f64 / total as f64
        },
    };
    Ok((pic, report))
}

/// `φ_G ∘ τ_F` at every attractor pixel's representative point, indexed by
/// pixel. A truncated itinerary shows up as a larger radius.
pub fn transform_pixels(
    f_part: &DomainPartition,
    g: &Ifs,
    depth: usize,
    workers: usize,
) -> Result<Vec<Option<PhiValue>>> {
    if f_part.ifs().len() != g.len() {
        return Err(Error::MapCountMismatch {
            expected: f_part.ifs().len(),
            found: g.len(),
        });
    }
    let grid = *f_part.grid();
    let rows = run_sharded(grid.height(), workers, |j| {
        (0..grid.width())
            .map(|i| {
                let k = grid.index(i, j);
                if !f_part.mask().get_index(k) {
                    return None;
                }
                let x = f_part
                    .render()
                    .representative(k)
                    .unwrap_or_else(|| grid.center(i, j));
                transform_point(f_part, g, x, depth).ok()
            })
            .collect::<Vec<_>>()
    });
    Ok(rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{fern, mask_picture, square_cts, triangle_family, TriangleSpec};
    use crate::tops::build_partition;

    fn gradient(grid: PixelGrid) -> RasterPicture {
        let vp = grid.viewport();
        RasterPicture::from_fn(grid, |p| {
            [
                (255.0 * (p.x - vp.min.x) / vp.width()) as u8,
                (255.0 * (p.y - vp.min.y) / vp.height()) as u8,
                128,
            ]
        })
    }

    fn padded(s: &[u8], depth: usize) -> Vec<u8> {
        let mut acc = ReverseAccumulator::new(depth);
        for &x in s.iter().rev() {
            acc.push(x);
        }
        acc.padded().to_vec()
    }

    #[test]
    fn larger_address_wins() {
        let grid = PixelGrid::square(4, crate::geometry::Viewport::unit()).unwrap();
        let mut canvas = StealCanvas::new(grid);
        let origin = Point2::new(0.0, 0.0);
        assert!(canvas.offer(0, &padded(&[2], 8), Some([1, 1, 1]), origin));
        assert!(canvas.offer(0, &padded(&[1, 3], 8), Some([2, 2, 2]), origin));
        assert!(!canvas.offer(0, &padded(&[2, 1], 8), Some([3, 3, 3]), origin));
        assert_eq!(canvas.record(0).unwrap().color, Some([2, 2, 2]));
    }

    #[test]
    fn merge_is_order_independent() {
        let grid = PixelGrid::square(3, crate::geometry::Viewport::unit()).unwrap();
        let mut rng = SplitMix64::new(11);
        let log: Vec<(usize, Vec<u8>, Rgb)> = (0..400)
            .map(|_| {
                let k = (rng.next_f64() * 9.0) as usize;
                let word: Vec<u8> = (0..3).map(|_| 1 + (rng.next_f64() * 3.0) as u8).collect();
                let c = (rng.next_f64() * 4.0) as u8;
                (k, padded(&word, 6), [c, c, c])
            })
            .collect();
        let play = |order: &[usize]| {
            let mut c = StealCanvas::new(grid);
            for &i in order {
                let (k, w, col) = &log[i];
                c.offer(*k, w, Some(*col), Point2::default());
            }
            c.picture()
        };
        let forward: Vec<usize> = (0..log.len()).collect();
        let mut shuffled = forward.clone();
        for i in (1..shuffled.len()).rev() {
            let j = (rng.next_f64() * (i + 1) as f64) as usize;
            shuffled.swap(i, j);
        }
        let reversed: Vec<usize> = forward.iter().rev().copied().collect();
        assert_eq!(play(&forward), play(&shuffled));
        assert_eq!(play(&forward), play(&reversed));
    }

    #[test]
    fn burn_in_only_gives_empty_output() {
        let f = fern();
        let grid = PixelGrid::square(32, f.viewport()).unwrap();
        let mask = AttractorMask::full(grid);
        let opts = StealOptions {
            iterations: 100,
            ..StealOptions::default()
        };
        let (pic, report) = color_steal(&f, &f, &gradient(grid), &mask, &opts).unwrap();
        assert_eq!(pic.covered_count(), 0);
        assert_eq!(report.coverage_fraction, 0.0);
    }

    #[test]
    fn identity_steal_reproduces_picture() {
        let f = fern();
        let grid = PixelGrid::square(128, f.viewport()).unwrap();
        let part = build_partition(&f, &grid, 2).unwrap();
        let input = mask_picture(&gradient(grid), part.mask()).unwrap();
        let opts = StealOptions {
            iterations: 2_000_000,
            workers: 2,
            ..StealOptions::default()
        };
        let (out, report) = color_steal(&f, &f, &input, part.mask(), &opts).unwrap();
        assert!(report.sampling_ok(), "{report:?}");
        let same = part
            .mask()
            .iter_set()
            .filter(|&(i, j)| out.get(i, j).is_some() && out.get(i, j) == input.get(i, j))
            .count();
        assert!(same as f64 >= 0.99 * part.mask().count() as f64);
    }

    #[test]
    fn constant_picture_stays_constant() {
        let f = fern();
        let g = square_cts();
        let grid = PixelGrid::square(96, f.viewport()).unwrap();
        let part = build_partition(&f, &grid, 2).unwrap();
        let flat = RasterPicture::from_fn(PixelGrid::square(96, g.viewport()).unwrap(), |_| {
            [9, 99, 199]
        });
        let (out, report) = transform_picture_deterministic(&part, &g, &flat, 30, 2).unwrap();
        assert!(report.coverage_fraction > 0.99);
        assert!(out
            .pixels()
            .iter()
            .zip(out.coverage())
            .filter(|(_, c)| **c)
            .all(|(p, _)| *p == [9, 99, 199]));
    }

    #[test]
    fn known_point_images() {
        let f = fern();
        let g = square_cts();
        let part = build_partition(&f, &PixelGrid::square(256, f.viewport()).unwrap(), 2).unwrap();
        let tip = transform_point(&part, &g, Point2::new(0.5, 1.0), 30).unwrap();
        assert!(tip.point.distance(Point2::new(1.0, 1.0)) <= tip.radius);

        let spec = |a| TriangleSpec::canonical(a, a, a).unwrap();
        let tf = triangle_family(&spec(0.525)).unwrap();
        let tg = triangle_family(&spec(0.475)).unwrap();
        let tpart =
            build_partition(&tf, &PixelGrid::square(256, tf.viewport()).unwrap(), 2).unwrap();
        let a = transform_point(&tpart, &tg, Point2::new(0.0, 0.0), 40).unwrap();
        assert!(a.point.distance(Point2::new(0.0, 0.0)) <= a.radius + 1e-12);
    }

    #[test]
    fn identity_transform_is_close() {
        let f = fern();
        let part = build_partition(&f, &PixelGrid::square(128, f.viewport()).unwrap(), 2).unwrap();
        let mut rng = SplitMix64::new(4);
        let d = 60;
        for _ in 0..200 {
            let x = part.sample(&mut rng);
            let y = transform_point(&part, &f, x, d).unwrap();
            assert!(y.point.distance(x) <= y.radius + 2.0 * part.grid().pitch());
        }
    }
}
