//! Address evaluation and attractor rasterization.

use std::thread;

use crate::address::AddressPrefix;
use crate::error::{Error, Result};
use crate::geometry::{AffineMap2, Ifs, Point2};
use crate::raster::{AttractorMask, PixelGrid};
use crate::rng::{SplitMix64, SymbolSampler};

/// Largest number of composed points a fixed-depth render may produce.
pub const RENDER_BUDGET: f64 = 1e8;
/// Node budget for the adaptive render.
pub const ADAPTIVE_NODE_BUDGET: u64 = 2_000_000_000;
pub const DEFAULT_BURN_IN: u64 = 100;

const ADAPTIVE_MAX_DEPTH: usize = 2048;

/// A composed image together with a bound on its distance from the limit point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiValue {
    pub point: Point2,
    pub radius: f64,
}

/// `f_{σ1} ∘ … ∘ f_{σk}(x0)`, the depth-`k` approximation of `φ(σ)`.
///
/// The radius is `l^k · diam(viewport)`. `x0` defaults to the viewport center.
pub fn phi_eval(ifs: &Ifs, prefix: &AddressPrefix, x0: Option<Point2>) -> PhiValue {
    let mut p = x0.unwrap_or_else(|| ifs.viewport().center());
    for &s in prefix.symbols().iter().rev() {
        p = ifs.map(s).apply(p);
    }
    PhiValue {
        point: p,
        radius: ifs.contraction().powi(prefix.len() as i32) * ifs.viewport().diameter(),
    }
}

/// Least depth `K` with `l^K · diam(viewport)` below one pixel pitch.
pub fn converged_depth(ifs: &Ifs, grid: &PixelGrid) -> u32 {
    let l = ifs.contraction();
    let target = grid.pitch_x().min(grid.pitch_y()) / ifs.viewport().diameter();
    if l <= 0.0 {
        return 1;
    }
    (target.ln() / l.ln()).ceil().max(1.0) as u32
}

/// The fixed point of `f_1`, a point on the attractor.
pub fn render_seed(ifs: &Ifs) -> Point2 {
    ifs.maps()[0]
        .fixed_point()
        .unwrap_or_else(|| ifs.viewport().center())
}

/// Plots all `N^K` points `f_{σ1} ∘ … ∘ f_{σK}(x)` with `x` the viewport center.
pub fn render_deterministic(ifs: &Ifs, depth: u32, grid: &PixelGrid) -> Result<AttractorMask> {
    render_deterministic_from(ifs, depth, grid, ifs.viewport().center(), 1)
}

/// Fixed-depth render from an explicit seed point, sharded over `workers` threads.
///
/// Enumeration is depth first with symbols in increasing order. Shards are
/// merged by bitwise OR, so the mask does not depend on `workers`.
pub fn render_deterministic_from(
    ifs: &Ifs,
    depth: u32,
    grid: &PixelGrid,
    x0: Point2,
    workers: usize,
) -> Result<AttractorMask> {
    let n = ifs.len();
    let required = (n as f64).powi(depth as i32);
    if required > RENDER_BUDGET {
        return Err(Error::BudgetExceeded {
            required,
            budget: RENDER_BUDGET,
            converged_depth: converged_depth(ifs, grid),
        });
    }
    if depth == 0 {
        let mut mask = AttractorMask::empty(*grid);
        mask.plot(x0);
        return Ok(mask);
    }
    let maps = ifs.maps();
    // Images of x0 under one map are the leaves' innermost step.
    let inner: Vec<Point2> = maps.iter().map(|m| m.apply(x0)).collect();
    let shard = |first: usize| {
        let mut mask = AttractorMask::empty(*grid);
        if depth == 1 {
            mask.plot(inner[first]);
        } else {
            fixed_depth_dfs(maps, &inner, &maps[first], depth as usize - 2, &mut mask);
        }
        mask
    };
    let masks = run_sharded(n, workers, shard);
    let mut mask = AttractorMask::empty(*grid);
    for m in &masks {
        mask.union_with(m)?;
    }
    Ok(mask)
}

fn fixed_depth_dfs(
    maps: &[AffineMap2],
    inner: &[Point2],
    prefix: &AffineMap2,
    remaining: usize,
    mask: &mut AttractorMask,
) {
    if remaining == 0 {
        for p in inner {
            mask.plot(prefix.apply(*p));
        }
        return;
    }
    for m in maps {
        fixed_depth_dfs(maps, inner, &prefix.compose(m), remaining - 1, mask);
    }
}

/// Output of the adaptive render.
#[derive(Debug, Clone)]
pub struct AttractorRender {
    /// Pixels containing a leaf point.
    pub mask: AttractorMask,
    /// `images[n-1]`: pixels containing a leaf point with first symbol `n`.
    pub images: Vec<AttractorMask>,
    representatives: Vec<Point2>,
    pub leaves: u64,
}

impl AttractorRender {
    /// An attractor point inside the pixel, if one was plotted there.
    pub fn representative(&self, index: usize) -> Option<Point2> {
        let p = self.representatives[index];
        p.is_finite().then_some(p)
    }

    pub fn grid(&self) -> &PixelGrid {
        self.mask.grid()
    }

    /// Every attractor point lies within half a pitch of a leaf point, so the
    /// one-pixel dilation contains the exact rasterization.
    pub fn cover(&self) -> AttractorMask {
        self.mask.dilate(1)
    }
}

/// Attractor render converged at pixel resolution.
///
/// Words are expanded depth first until the composed map moves every
/// attractor point by at most half a pixel, and the fixed point of `f_1` is
/// plotted through the word. A subtree is skipped once every pixel its image
/// of the attractor's bounding box touches is already set: its leaf points
/// could only land in those pixels. Each first symbol is rendered separately,
/// giving the image masks of `f_n(A)`.
pub fn render_adaptive(ifs: &Ifs, grid: &PixelGrid, workers: usize) -> Result<AttractorRender> {
    let (lo, hi) = ifs.attractor_bounds();
    let diam = (hi.x - lo.x).hypot(hi.y - lo.y);
    let tol = 0.5 * grid.pitch_x().min(grid.pitch_y());
    let seed = render_seed(ifs);
    let corners = [lo, Point2::new(hi.x, lo.y), hi, Point2::new(lo.x, hi.y)];
    let maps = ifs.maps();
    let results = run_sharded(maps.len(), workers, |first| {
        adaptive_dfs(maps, maps[first], &corners, diam, tol, seed, grid)
    });
    let mut mask = AttractorMask::empty(*grid);
    let mut representatives = vec![Point2::new(f64::NAN, f64::NAN); grid.len()];
    let mut images = Vec::with_capacity(maps.len());
    let mut leaves = 0;
    for r in results {
        let (image, reps, count) = r?;
        mask.union_with(&image)?;
        for (slot, p) in representatives.iter_mut().zip(reps) {
            if !slot.is_finite() && p.is_finite() {
                *slot = p;
            }
        }
        leaves += count;
        images.push(image);
    }
    Ok(AttractorRender {
        mask,
        images,
        representatives,
        leaves,
    })
}

type Shard = Result<(AttractorMask, Vec<Point2>, u64)>;

fn adaptive_dfs(
    maps: &[AffineMap2],
    root: AffineMap2,
    corners: &[Point2; 4],
    diam: f64,
    tol: f64,
    seed: Point2,
    grid: &PixelGrid,
) -> Shard {
    let mut mask = AttractorMask::empty(*grid);
    let mut reps = vec![Point2::new(f64::NAN, f64::NAN); grid.len()];
    let mut leaves = 0u64;
    let mut nodes = 0u64;
    let mut stack = vec![(root, 1usize)];
    while let Some((m, depth)) = stack.pop() {
        nodes += 1;
        if nodes > ADAPTIVE_NODE_BUDGET || depth > ADAPTIVE_MAX_DEPTH {
            return Err(Error::BudgetExceeded {
                required: nodes as f64,
                budget: ADAPTIVE_NODE_BUDGET as f64,
                converged_depth: depth as u32,
            });
        }
        let Some(footprint) = footprint(grid, corners.map(|c| m.apply(c))) else {
            continue;
        };
        if footprint_saturated(&mask, footprint) {
            continue;
        }
        let single = footprint.0 == footprint.2 && footprint.1 == footprint.3;
        if single || m.contraction_factor() * diam <= tol {
            leaves += 1;
            let p = m.apply(seed);
            if let Some(k) = grid.index_of(p) {
                mask.set_index(k);
                if !reps[k].is_finite() {
                    reps[k] = p;
                }
            }
            continue;
        }
        for s in maps.iter().rev() {
            stack.push((m.compose(s), depth + 1));
        }
    }
    Ok((mask, reps, leaves))
}

/// Clamped pixel bounding box `(i0, j0, i1, j1)` of a quadrilateral, or `None`
/// when it misses the grid.
fn footprint(grid: &PixelGrid, quad: [Point2; 4]) -> Option<(usize, usize, usize, usize)> {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for q in quad {
        lo.x = lo.x.min(q.x);
        lo.y = lo.y.min(q.y);
        hi.x = hi.x.max(q.x);
        hi.y = hi.y.max(q.y);
    }
    let (i0, j0) = grid.pixel_signed(lo)?;
    let (i1, j1) = grid.pixel_signed(hi)?;
    let (w, h) = (grid.width() as i64, grid.height() as i64);
    if i1 < 0 || j1 < 0 || i0 >= w || j0 >= h {
        return None;
    }
    Some((
        i0.max(0) as usize,
        j0.max(0) as usize,
        i1.min(w - 1) as usize,
        j1.min(h - 1) as usize,
    ))
}

fn footprint_saturated(
    mask: &AttractorMask,
    (i0, j0, i1, j1): (usize, usize, usize, usize),
) -> bool {
    let w = mask.grid().width();
    let bits = mask.bits();
    (j0..=j1).all(|j| bits[j * w + i0..=j * w + i1].iter().all(|b| *b))
}

/// Chaos game: `x_k = f_{σk}(x_{k-1})` from the viewport center, plotting
/// `x_k` for `k > burn_in`. Symbols come from SplitMix64 by cumulative threshold.
pub fn render_chaos(
    ifs: &Ifs,
    iterations: u64,
    seed: u64,
    grid: &PixelGrid,
    burn_in: u64,
) -> AttractorMask {
    render_chaos_with(ifs, iterations, seed, grid, burn_in, 1)
}

/// Chaos game split into `workers` independent orbits, stream `w` seeded by
/// `SplitMix64::for_stream(seed, w)`, each with its own burn-in. One worker
/// reproduces [`render_chaos`].
pub fn render_chaos_with(
    ifs: &Ifs,
    iterations: u64,
    seed: u64,
    grid: &PixelGrid,
    burn_in: u64,
    workers: usize,
) -> AttractorMask {
    let workers = workers.max(1);
    let shards = run_sharded(workers, workers, |w| {
        let share =
            iterations / workers as u64 + u64::from((w as u64) < iterations % workers as u64);
        let mut mask = AttractorMask::empty(*grid);
        let mut rng = SplitMix64::for_stream(seed, w as u64);
        let sampler = SymbolSampler::new(ifs.probabilities());
        let mut p = ifs.viewport().center();
        for k in 1..=share {
            p = ifs.map(sampler.select(rng.next_u64())).apply(p);
            if k > burn_in {
                mask.plot(p);
            }
        }
        mask
    });
    let mut mask = AttractorMask::empty(*grid);
    for m in &shards {
        mask.union_with(m).expect("shards share a grid");
    }
    mask
}

/// Runs `job(0..count)` on up to `workers` scoped threads, returning results in index order.
pub(crate) fn run_sharded<T: Send>(
    count: usize,
    workers: usize,
    job: impl Fn(usize) -> T + Sync,
) -> Vec<T> {
    let workers = workers.clamp(1, count.max(1));
    if workers == 1 {
        return (0..count).map(&job).collect();
    }
    let job = &job;
    let mut out: Vec<Option<T>> = (0..count).map(|_| None).collect();
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..count)
                        .step_by(workers)
                        .map(|i| (i, job(i)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, v) in h.join().expect("worker panicked") {
                out[i] = Some(v);
            }
        }
    });
    out.into_iter()
        .map(|v| v.expect("every shard ran"))
        .collect()
}
