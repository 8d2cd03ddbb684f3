//! The tops dynamical system: domain partition, orbit itineraries and
//! backwards-orbit address enumeration.

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::address::{tops_compare, AddressPrefix};
use crate::attractor::{render_adaptive, run_sharded, AttractorRender};
use crate::error::{Error, Result};
use crate::geometry::{AffineMap2, Ifs, Point2};
use crate::raster::{AttractorMask, PixelGrid};
use crate::rng::SplitMix64;

/// Default cap on simultaneous backwards-orbit branches.
pub const DEFAULT_MAX_BRANCHES: usize = 4096;

/// Pixel cells `D_n = f_n(A) \ (f_1(A) ∪ … ∪ f_{n-1}(A))` of a converged render.
#[derive(Debug, Clone)]
pub struct DomainPartition {
    ifs: Ifs,
    inverses: Vec<AffineMap2>,
    render: AttractorRender,
    cells: Vec<AttractorMask>,
    near: Vec<AttractorMask>,
    cover: AttractorMask,
    samples: Vec<usize>,
}

impl DomainPartition {
    pub fn ifs(&self) -> &Ifs {
        &self.ifs
    }

    pub fn grid(&self) -> &PixelGrid {
        self.render.grid()
    }

    /// Attractor mask, the union of the cells.
    pub fn mask(&self) -> &AttractorMask {
        &self.render.mask
    }

    pub fn cells(&self) -> &[AttractorMask] {
        &self.cells
    }

    /// Masks of `f_n(A)`.
    pub fn images(&self) -> &[AttractorMask] {
        &self.render.images
    }

    pub fn render(&self) -> &AttractorRender {
        &self.render
    }

    /// Attractor mask dilated by one pixel.
    pub fn cover(&self) -> &AttractorMask {
        &self.cover
    }

    pub fn inverse(&self, symbol: u8) -> &AffineMap2 {
        &self.inverses[symbol as usize - 1]
    }

    /// Symbols whose image lies within one pixel of `x`'s pixel, in increasing order.
    pub fn candidates(&self, x: Point2) -> Vec<u8> {
        match self.grid().index_of(x) {
            Some(k) => self.candidates_at(k),
            None => Vec::new(),
        }
    }

    fn candidates_at(&self, k: usize) -> Vec<u8> {
        (0..self.near.len())
            .filter(|&n| self.near[n].get_index(k))
            .map(|n| n as u8 + 1)
            .collect()
    }

    /// True when `x` is within one pixel of two or more images.
    pub fn on_boundary(&self, x: Point2) -> bool {
        self.candidates(x).len() > 1
    }

    /// Attractor pixels with a plotted point, for sampling.
    pub fn sample_pixels(&self) -> &[usize] {
        &self.samples
    }

    /// A uniformly chosen attractor pixel's representative point.
    pub fn sample(&self, rng: &mut SplitMix64) -> Point2 {
        let k = self.samples[(rng.next_f64() * self.samples.len() as f64) as usize];
        self.render
            .representative(k)
            .expect("sample pixels have representatives")
    }
}

/// Renders `A` at pixel convergence and splits it into the cells `D_n`.
pub fn build_partition(ifs: &Ifs, grid: &PixelGrid, workers: usize) -> Result<DomainPartition> {
    let render = render_adaptive(ifs, grid, workers)?;
    let mut taken = AttractorMask::empty(*grid);
    let mut cells = Vec::with_capacity(ifs.len());
    for image in &render.images {
        let bits = image
            .bits()
            .iter()
            .zip(taken.bits())
            .map(|(a, t)| *a && !*t)
            .collect();
        let cell = AttractorMask::from_bits(*grid, bits)?;
        taken.union_with(&cell)?;
        cells.push(cell);
    }
    let near = run_sharded(render.images.len(), workers, |n| render.images[n].dilate(1));
    let cover = render.cover();
    let samples = (0..grid.len())
        .filter(|&k| render.representative(k).is_some())
        .collect::<Vec<_>>();
    if samples.is_empty() {
        return Err(Error::EmptyMask);
    }
    Ok(DomainPartition {
        ifs: ifs.clone(),
        inverses: ifs.inverses(),
        render,
        cells,
        near,
        cover,
        samples,
    })
}

/// One application of `T_F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub symbol: u8,
    pub next: Point2,
    /// More than one image lies within a pixel of the point.
    pub ambiguous: bool,
}

/// `T_F(x) = f_n⁻¹(x)` for the least `n` with `x ∈ f_n(A)`.
///
/// Membership is tested on the image masks with one pixel of slack. When
/// several images qualify, the least `n` whose preimage `f_n⁻¹(x)` lands on
/// the attractor wins; that test is sharper than the mask itself because
/// `f_n⁻¹` expands. If no preimage lands, the least `n` whose mask contains
/// `x`'s pixel wins, then the least candidate.
pub fn tops_step(part: &DomainPartition, x: Point2) -> Result<Step> {
    let k = part.grid().index_of(x).ok_or(Error::OffAttractor(x))?;
    let cands = part.candidates_at(k);
    let (symbol, ambiguous) = match cands.as_slice() {
        [] => return Err(Error::OffAttractor(x)),
        [n] => (*n, false),
        _ => {
            let landing = cands
                .iter()
                .copied()
                .find(|&n| part.cover.contains_point(part.inverse(n).apply(x)));
            let inside = || {
                cands
                    .iter()
                    .copied()
                    .find(|&n| part.images()[n as usize - 1].get_index(k))
            };
            (landing.or_else(inside).unwrap_or(cands[0]), true)
        }
    };
    Ok(Step {
        symbol,
        next: part.inverse(symbol).apply(x),
        ambiguous,
    })
}

/// A finite stretch of a tops orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct Itinerary {
    pub prefix: AddressPrefix,
    /// Last orbit point.
    pub terminal: Point2,
    /// Some orbit point was within a pixel of two images.
    pub boundary_flag: bool,
    /// False when the orbit left the attractor before the requested depth.
    pub complete: bool,
}

/// Follows `x, T_F(x), T_F²(x), …` for `depth` steps, recording the symbols.
///
/// Fails only if `x` itself is off the attractor; a later escape returns the
/// symbols gathered so far with `complete = false`.
pub fn tops_orbit(part: &DomainPartition, x: Point2, depth: usize) -> Result<Itinerary> {
    let mut prefix = AddressPrefix::empty();
    let mut p = x;
    let mut boundary_flag = false;
    for i in 0..depth {
        match tops_step(part, p) {
            Ok(step) => {
                prefix.push(step.symbol);
                boundary_flag |= step.ambiguous;
                p = step.next;
            }
            Err(e) if i == 0 => return Err(e),
            Err(_) => {
                return Ok(Itinerary {
                    prefix,
                    terminal: p,
                    boundary_flag,
                    complete: false,
                })
            }
        }
    }
    Ok(Itinerary {
        prefix,
        terminal: p,
        boundary_flag,
        complete: true,
    })
}

/// Depth-`d` prefixes of every address of `x`, largest first in tops order.
///
/// Backwards orbits branch on every `n` with `x` within a pixel of `f_n(A)`
/// and `f_n⁻¹(x)` within a pixel of `A`; branches that leave the attractor
/// are dropped.
pub fn enumerate_addresses(
    ifs: &Ifs,
    image_masks: &[AttractorMask],
    x: Point2,
    depth: usize,
    max_count: usize,
) -> Result<Vec<AddressPrefix>> {
    if image_masks.len() != ifs.len() {
        return Err(Error::MapCountMismatch {
            expected: ifs.len(),
            found: image_masks.len(),
        });
    }
    let grid = *image_masks[0].grid();
    let mut union = AttractorMask::empty(grid);
    for m in image_masks {
        union.union_with(m)?;
    }
    let inverses = ifs.inverses();
    let admissible = |p: Point2| -> Vec<(u8, Point2)> {
        (0..image_masks.len())
            .filter(|&n| image_masks[n].membership(p, 1))
            .map(|n| (n as u8 + 1, inverses[n].apply(p)))
            .filter(|(_, q)| union.membership(*q, 1))
            .collect()
    };
    if !(0..image_masks.len()).any(|n| image_masks[n].membership(x, 1)) {
        return Err(Error::OffAttractor(x));
    }
    let mut frontier = vec![(AddressPrefix::empty(), x)];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (prefix, p) in &frontier {
            for (n, q) in admissible(*p) {
                let mut w = prefix.clone();
                w.push(n);
                next.push((w, q));
                if next.len() > max_count {
                    return Err(Error::BranchExplosion { limit: max_count });
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<AddressPrefix> = frontier.into_iter().map(|(w, _)| w).collect();
    out.sort_by(|a, b| tops_compare(b, a));
    out.dedup();
    Ok(out)
}

/// `ln(#distinct depth-n itineraries) / n` over `samples` random attractor
/// points: a lower estimate of the itinerary complexity, not an entropy.
pub fn shift_complexity(part: &DomainPartition, samples: usize, depth: usize, seed: u64) -> f64 {
    if depth == 0 {
        return 0.0;
    }
    let mut rng = SplitMix64::new(seed);
    let mut seen = HashSet::new();
    for _ in 0..samples {
        let x = part.sample(&mut rng);
        if let Ok(it) = tops_orbit(part, x, depth) {
            if it.complete {
                seen.insert(it.prefix);
            }
        }
    }
    if seen.is_empty() {
        return 0.0;
    }
    (seen.len() as f64).ln() / depth as f64
}

/// True if `p` is at least every member of `others` in tops order.
pub fn is_tops_maximum(p: &AddressPrefix, others: &[AddressPrefix]) -> bool {
    others.iter().all(|q| tops_compare(p, q) != Ordering::Less)
}
