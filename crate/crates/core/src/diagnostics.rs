//! Finite-resolution probes of continuity, address-structure refinement and
//! area preservation for `T = φ_G ∘ τ_F`. They test consequences, not proofs.

use crate::address::AddressPrefix;
use crate::attractor::{phi_eval, run_sharded};
use crate::error::{Error, Result};
use crate::geometry::{Ifs, Point2, Viewport};
use crate::raster::{AttractorMask, PixelGrid};
use crate::rng::SplitMix64;
use crate::tops::{build_partition, enumerate_addresses, DomainPartition, DEFAULT_MAX_BRANCHES};
use crate::transform::{transform_pixels, transform_point};

/// Largest `|T(x) − T(x′)|` seen over pairs with `|x − x′| ≤ epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityRow {
    pub epsilon: f64,
    pub max_displacement: f64,
    pub pairs: usize,
}

/// Samples attractor pairs at each scale and records the worst displacement.
///
/// `T` is evaluated once per attractor pixel at its representative point.
/// Pairs are drawn by choosing a random attractor pixel and a random
/// attractor pixel within `epsilon` of it. Pixels whose tops orbit leaves
/// the attractor before `depth` steps are skipped.
pub fn continuity_probe(
    f_part: &DomainPartition,
    g: &Ifs,
    scales: &[f64],
    samples: usize,
    depth: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<ContinuityRow>> {
    let grid = *f_part.grid();
    if let Some(&e) = scales
        .iter()
        .find(|&&e| e.is_nan() || e < 2.0 * grid.pitch())
    {
        return Err(Error::InvalidParameter(format!(
            "scale {e} is below two pixel pitches"
        )));
    }
    let full = g.contraction().powi(depth as i32) * g.viewport().diameter();
    let images: Vec<Option<Point2>> = transform_pixels(f_part, g, depth, workers)?
        .into_iter()
        .map(|v| {
            v.filter(|v| v.radius <= full * (1.0 + 1e-9))
                .map(|v| v.point)
        })
        .collect();
    let pool = f_part.sample_pixels();
    let rep = |k: usize| f_part.render().representative(k);
    let mut rng = SplitMix64::new(seed);
    let mut rows = Vec::with_capacity(scales.len());
    for &eps in scales {
        let ri = (eps / grid.pitch_x()).ceil() as i64;
        let rj = (eps / grid.pitch_y()).ceil() as i64;
        let mut worst = 0.0f64;
        let mut pairs = 0;
        let mut attempts = 0usize;
        while pairs < samples && attempts < samples * 64 {
            attempts += 1;
            let k = pool[(rng.next_f64() * pool.len() as f64) as usize];
            let (i, j) = grid.coords(k);
            let di = (rng.next_f64() * (2 * ri + 1) as f64) as i64 - ri;
            let dj = (rng.next_f64() * (2 * rj + 1) as f64) as i64 - rj;
            let Some((i2, j2)) = grid.in_range(i as i64 + di, j as i64 + dj) else {
                continue;
            };
            let k2 = grid.index(i2, j2);
            let (Some(x), Some(x2)) = (rep(k), rep(k2)) else {
                continue;
            };
            if x.distance(x2) > eps {
                continue;
            }
            let (Some(y), Some(y2)) = (images[k], images[k2]) else {
                continue;
            };
            worst = worst.max(y.distance(y2));
            pairs += 1;
        }
        rows.push(ContinuityRow {
            epsilon: eps,
            max_displacement: worst,
            pairs,
        });
    }
    Ok(rows)
}

/// Two depth-`d` addresses of one `F`-point whose `G`-images are too far apart.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementWitness {
    pub point: Point2,
    pub first: AddressPrefix,
    pub second: AddressPrefix,
    pub images: (Point2, Point2),
    pub spread: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    ConsistentWithRefinement,
    Violation(Box<RefinementWitness>),
}

impl Verdict {
    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::Violation(_))
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::ConsistentWithRefinement => f.write_str("ConsistentWithRefinement"),
            Verdict::Violation(w) => write!(
                f,
                "Violation at ({}, {}): {} -> ({}, {}) and {} -> ({}, {}), spread {:.4} > {:.4}",
                w.point.x,
                w.point.y,
                w.first,
                w.images.0.x,
                w.images.0.y,
                w.second,
                w.images.1.x,
                w.images.1.y,
                w.spread,
                w.tolerance
            ),
        }
    }
}

/// Tests whether every depth-`d` address class of `F` collapses to one point
/// under `φ_G`, which is necessary for `C_F ≺ C_G`.
///
/// Points with several addresses sit where images overlap, so the test
/// points are the overlap pixels' representatives (up to `samples`, drawn
/// at random) together with every eventually periodic point `φ_F(u v̄)`
/// with `|u| ≤ 2`, `|v| ≤ 2` that lands in the overlap. The tolerance is four
/// pixels of a `G` grid with the same dimensions plus `l_G^d · diam`.
pub fn refinement_check(
    f: &Ifs,
    g: &Ifs,
    depth: usize,
    samples: usize,
    grid: &PixelGrid,
    seed: u64,
    workers: usize,
) -> Result<Verdict> {
    if f.len() != g.len() {
        return Err(Error::MapCountMismatch {
            expected: f.len(),
            found: g.len(),
        });
    }
    let part = build_partition(f, grid, workers)?;
    let near: Vec<AttractorMask> = part.images().iter().map(|m| m.dilate(1)).collect();
    let overlap = |p: Point2| {
        grid.index_of(p)
            .is_some_and(|k| near.iter().filter(|m| m.get_index(k)).count() > 1)
    };

    let mut points = periodic_points(f, 2, 2)
        .into_iter()
        .filter(|p| overlap(*p))
        .collect::<Vec<_>>();
    let mut pool: Vec<usize> = part
        .sample_pixels()
        .iter()
        .copied()
        .filter(|&k| near.iter().filter(|m| m.get_index(k)).count() > 1)
        .collect();
    let mut rng = SplitMix64::new(seed);
    for i in 0..pool.len().min(samples) {
        let j = i + (rng.next_f64() * (pool.len() - i) as f64) as usize;
        pool.swap(i, j);
        points.push(part.render().representative(pool[i]).expect("sample pixel"));
    }

    let g_grid = PixelGrid::new(grid.width(), grid.height(), g.viewport())?;
    let tolerance =
        4.0 * g_grid.pitch() + g.contraction().powi(depth as i32) * g.viewport().diameter();
    let verdicts = run_sharded(
        points.len(),
        workers,
        |i| -> Result<Option<RefinementWitness>> {
            let x = points[i];
            let addrs = enumerate_addresses(f, part.images(), x, depth, DEFAULT_MAX_BRANCHES)?;
            let imgs: Vec<Point2> = addrs.iter().map(|w| phi_eval(g, w, None).point).collect();
            let mut worst: Option<RefinementWitness> = None;
            for a in 0..imgs.len() {
                for b in a + 1..imgs.len() {
                    let spread = imgs[a].distance(imgs[b]);
                    if spread > tolerance && worst.as_ref().is_none_or(|w| spread > w.spread) {
                        worst = Some(RefinementWitness {
                            point: x,
                            first: addrs[a].clone(),
                            second: addrs[b].clone(),
                            images: (imgs[a], imgs[b]),
                            spread,
                            tolerance,
                        });
                    }
                }
            }
            Ok(worst)
        },
    );
    let mut worst: Option<RefinementWitness> = None;
    for v in verdicts {
        if let Some(w) = v? {
            if worst.as_ref().is_none_or(|o| w.spread > o.spread) {
                worst = Some(w);
            }
        }
    }
    Ok(match worst {
        Some(w) => Verdict::Violation(Box::new(w)),
        None => Verdict::ConsistentWithRefinement,
    })
}

/// `φ(u v̄)` for every word `u` of length at most `max_head` and nonempty `v`
/// of length at most `max_period`.
pub fn periodic_points(ifs: &Ifs, max_head: usize, max_period: usize) -> Vec<Point2> {
    let words = |max_len: usize, min_len: usize| {
        let mut all = vec![AddressPrefix::empty()];
        let mut layer = vec![AddressPrefix::empty()];
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|w| {
                    (1..=ifs.len() as u8).map(move |n| {
                        let mut v = w.clone();
                        v.push(n);
                        v
                    })
                })
                .collect();
            all.extend(layer.iter().cloned());
        }
        all.retain(|w| w.len() >= min_len);
        all
    };
    let mut out = Vec::new();
    for v in words(max_period, 1) {
        let cycle = v
            .symbols()
            .iter()
            .rev()
            .fold(crate::geometry::AffineMap2::IDENTITY, |acc, &s| {
                ifs.map(s).compose(&acc)
            });
        let Some(fixed) = cycle.fixed_point() else {
            continue;
        };
        for u in words(max_head, 0) {
            let p = u
                .symbols()
                .iter()
                .rev()
                .fold(fixed, |p, &s| ifs.map(s).apply(p));
            out.push(p);
        }
    }
    out
}

/// Occupied-pixel area of a point set, with half the boundary-pixel area as
/// its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaEstimate {
    pub area: f64,
    pub uncertainty: f64,
    pub pixels: usize,
}

/// Areas of `region ∩ A_F` and of its image under `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaReport {
    /// Hit fraction of uniform region samples times the region area.
    pub monte_carlo_f: f64,
    pub monte_carlo_f_error: f64,
    pub area_f: AreaEstimate,
    pub area_g: AreaEstimate,
    pub hits: usize,
}

impl AreaReport {
    pub fn ratio(&self) -> f64 {
        self.area_g.area / self.area_f.area
    }

    /// Half-width of the ratio's uncertainty from the pixel-boundary terms.
    pub fn ratio_uncertainty(&self) -> f64 {
        self.ratio()
            * (self.area_f.uncertainty / self.area_f.area
                + self.area_g.uncertainty / self.area_g.area)
    }
}

/// Samples `region` uniformly, keeps points on `A_F`, and measures the area
/// they occupy on `F`'s grid and the area their images occupy on a `G` grid
/// of the same dimensions.
pub fn area_probe(
    f_part: &DomainPartition,
    g: &Ifs,
    region: Viewport,
    samples: usize,
    seed: u64,
    depth: usize,
    workers: usize,
) -> Result<AreaReport> {
    let grid = *f_part.grid();
    let g_grid = PixelGrid::new(grid.width(), grid.height(), g.viewport())?;
    let workers = workers.max(1);
    let shards = run_sharded(
        workers,
        workers,
        |w| -> Result<(AttractorMask, AttractorMask, usize)> {
            let mut rng = SplitMix64::for_stream(seed, w as u64);
            let share = samples / workers + usize::from(w < samples % workers);
            let mut occ_f = AttractorMask::empty(grid);
            let mut occ_g = AttractorMask::empty(g_grid);
            let mut hits = 0;
            for _ in 0..share {
                let x = Point2::new(
                    region.min.x + rng.next_f64() * region.width(),
                    region.min.y + rng.next_f64() * region.height(),
                );
                if !f_part.mask().contains_point(x) {
                    continue;
                }
                hits += 1;
                occ_f.plot(x);
                if let Ok(y) = transform_point(f_part, g, x, depth) {
                    occ_g.plot(y.point);
                }
            }
            Ok((occ_f, occ_g, hits))
        },
    );
    let mut occ_f = AttractorMask::empty(grid);
    let mut occ_g = AttractorMask::empty(g_grid);
    let mut hits = 0;
    for s in shards {
        let (a, b, h) = s?;
        occ_f.union_with(&a)?;
        occ_g.union_with(&b)?;
        hits += h;
    }
    if hits == 0 {
        return Err(Error::EmptyRegion);
    }
    let p = hits as f64 / samples as f64;
    Ok(AreaReport {
        monte_carlo_f: p * region.area(),
        monte_carlo_f_error: (p * (1.0 - p) / samples as f64).sqrt() * region.area(),
        area_f: occupied_area(&occ_f),
        area_g: occupied_area(&occ_g),
        hits,
    })
}

fn occupied_area(mask: &AttractorMask) -> AreaEstimate {
    let grid = mask.grid();
    let boundary = mask
        .iter_set()
        .filter(|&(i, j)| {
            let (i, j) = (i as i64, j as i64);
            [(1, 0), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .any(|(di, dj)| !mask.get_signed(i + di, j + dj))
        })
        .count();
    let pixels = mask.count();
    AreaEstimate {
        area: pixels as f64 * grid.pixel_area(),
        uncertainty: 0.5 * boundary as f64 * grid.pixel_area(),
        pixels,
    }
}
