//! Planar points, invertible affine contractions and the hyperbolic IFS container.

use crate::error::{Error, Result};

/// Validation margin on the contraction boundary.
pub const CONTRACTION_TOLERANCE: f64 = 1e-12;
/// Determinants below this magnitude are treated as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-14;
/// Allowed drift of a probability vector's sum from one.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        Point2::new(
            self.x + t * (other.x - self.x),
            self.y + t * (other.y - self.y),
        )
    }
}

/// The affine map `(x, y) -> (a x + b y + c, d x + e y + l)`.
///
/// Coefficients follow the usual six-column IFS table layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub l: f64,
}

impl AffineMap2 {
    pub const IDENTITY: AffineMap2 = AffineMap2::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64, e: f64, l: f64) -> Self {
        Self { a, b, c, d, e, l }
    }

    pub fn from_row(row: [f64; 6]) -> Self {
        Self::new(row[0], row[1], row[2], row[3], row[4], row[5])
    }

    pub fn to_row(self) -> [f64; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.l]
    }

    /// Evaluates the map, summing `a·x + b·y + c` left to right.
    #[inline]
    pub fn apply(&self, p: Point2) -> Point2 {
        Point2 {
            x: self.a * p.x + self.b * p.y + self.c,
            y: self.d * p.x + self.e * p.y + self.l,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.e - self.b * self.d
    }

    pub fn invert(&self) -> Result<AffineMap2> {
        let det = self.determinant();
        if det.abs() < SINGULAR_TOLERANCE {
            return Err(Error::SingularMap { index: 0, det });
        }
        let a = self.e / det;
        let b = -self.b / det;
        let d = -self.d / det;
        let e = self.a / det;
        Ok(AffineMap2 {
            a,
            b,
            c: -(a * self.c + b * self.l),
            d,
            e,
            l: -(d * self.c + e * self.l),
        })
    }

    /// `self ∘ inner`: applies `inner` first.
    #[inline]
    pub fn compose(&self, inner: &AffineMap2) -> AffineMap2 {
        AffineMap2 {
            a: self.a * inner.a + self.b * inner.d,
            b: self.a * inner.b + self.b * inner.e,
            c: self.a * inner.c + self.b * inner.l + self.c,
            d: self.d * inner.a + self.e * inner.d,
            e: self.d * inner.b + self.e * inner.e,
            l: self.d * inner.c + self.e * inner.l + self.l,
        }
    }

    /// Largest singular value of the linear part (operator 2-norm), from the
    /// eigenvalues of the Gram matrix in closed form.
    pub fn contraction_factor(&self) -> f64 {
        let p = self.a * self.a + self.d * self.d;
        let q = self.b * self.b + self.e * self.e;
        let r = self.a * self.b + self.d * self.e;
        let half_gap = 0.5 * (p - q);
        let largest = 0.5 * (p + q) + (half_gap * half_gap + r * r).sqrt();
        largest.max(0.0).sqrt()
    }

    /// Solves `(I - L) x = t` for the unique fixed point of a contraction.
    pub fn fixed_point(&self) -> Option<Point2> {
        let m11 = 1.0 - self.a;
        let m12 = -self.b;
        let m21 = -self.d;
        let m22 = 1.0 - self.e;
        let det = m11 * m22 - m12 * m21;
        if det.abs() < SINGULAR_TOLERANCE {
            return None;
        }
        Some(Point2::new(
            (self.c * m22 - m12 * self.l) / det,
            (m11 * self.l - m21 * self.c) / det,
        ))
    }
}

/// Axis-aligned rectangle in viewport units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub min: Point2,
    pub max: Point2,
}

impl Viewport {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Result<Self> {
        let vp = Viewport {
            min: Point2::new(min_x, min_y),
            max: Point2::new(max_x, max_y),
        };
        if !(vp.min.is_finite() && vp.max.is_finite()) || vp.width() <= 0.0 || vp.height() <= 0.0 {
            return Err(Error::BadViewport);
        }
        Ok(vp)
    }

    pub fn unit() -> Self {
        Viewport {
            min: Point2::new(0.0, 0.0),
            max: Point2::new(1.0, 1.0),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point2 {
        self.min.lerp(self.max, 0.5)
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// A hyperbolic iterated function system: maps, selection probabilities and a viewport.
#[derive(Debug, Clone, PartialEq)]
pub struct Ifs {
    maps: Vec<AffineMap2>,
    probabilities: Vec<f64>,
    viewport: Viewport,
}

impl Ifs {
    /// Validates the maps and builds an IFS. Omitted probabilities default to
    /// `|det f_n|` normalised, i.e. proportional to the area of each image.
    pub fn new(
        maps: Vec<AffineMap2>,
        probabilities: Option<Vec<f64>>,
        viewport: Viewport,
    ) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::EmptyIfs);
        }
        if viewport.width() <= 0.0 || viewport.height() <= 0.0 {
            return Err(Error::BadViewport);
        }
        for (index, m) in maps.iter().enumerate() {
            if !m.to_row().iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "map {index} has non-finite coefficients"
                )));
            }
            let det = m.determinant();
            if det.abs() < SINGULAR_TOLERANCE {
                return Err(Error::SingularMap { index, det });
            }
            let factor = m.contraction_factor();
            if factor >= 1.0 - CONTRACTION_TOLERANCE {
                return Err(Error::NonContractive { index, factor });
            }
        }
        let probabilities = match probabilities {
            Some(p) => {
                check_probabilities(&p, maps.len())?;
                p
            }
            None => area_weights(&maps),
        };
        Ok(Ifs {
            maps,
            probabilities,
            viewport,
        })
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[AffineMap2] {
        &self.maps
    }

    /// Map for a 1-based symbol.
    pub fn map(&self, symbol: u8) -> &AffineMap2 {
        &self.maps[symbol as usize - 1]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn viewport(&self) -> Viewport {
        self.viewport
    }

    pub fn with_viewport(mut self, viewport: Viewport) -> Self {
        self.viewport = viewport;
        self
    }

    /// `l = max l_n`.
    pub fn contraction(&self) -> f64 {
        self.maps
            .iter()
            .map(AffineMap2::contraction_factor)
            .fold(0.0, f64::max)
    }

    pub fn inverses(&self) -> Vec<AffineMap2> {
        self.maps
            .iter()
            .map(|m| m.invert().expect("validated maps are invertible"))
            .collect()
    }

    /// A rectangle containing the attractor, from iterating the set map on boxes.
    ///
    /// Starts from a ball that every map sends into itself, then repeatedly
    /// replaces the box by the bounding box of its images. Every iterate
    /// contains the attractor.
    pub fn attractor_bounds(&self) -> (Point2, Point2) {
        let c = self.viewport.center();
        let mut radius: f64 = 0.0;
        for m in &self.maps {
            let l = m.contraction_factor();
            radius = radius.max(m.apply(c).distance(c) / (1.0 - l));
        }
        let mut lo = Point2::new(c.x - radius, c.y - radius);
        let mut hi = Point2::new(c.x + radius, c.y + radius);
        for _ in 0..400 {
            let mut nlo = Point2::new(f64::INFINITY, f64::INFINITY);
            let mut nhi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
            for m in &self.maps {
                for corner in [lo, Point2::new(hi.x, lo.y), hi, Point2::new(lo.x, hi.y)] {
                    let q = m.apply(corner);
                    nlo.x = nlo.x.min(q.x);
                    nlo.y = nlo.y.min(q.y);
                    nhi.x = nhi.x.max(q.x);
                    nhi.y = nhi.y.max(q.y);
                }
            }
            // Each step can only shrink the box; keep the intersection.
            nlo.x = nlo.x.max(lo.x);
            nlo.y = nlo.y.max(lo.y);
            nhi.x = nhi.x.min(hi.x);
            nhi.y = nhi.y.min(hi.y);
            let moved = (nlo.x - lo.x).abs()
                + (nlo.y - lo.y).abs()
                + (nhi.x - hi.x).abs()
                + (nhi.y - hi.y).abs();
            lo = nlo;
            hi = nhi;
            if moved < 1e-15 {
                break;
            }
        }
        (lo, hi)
    }

    /// Upper bound on the attractor's diameter.
    pub fn attractor_diameter_bound(&self) -> f64 {
        let (lo, hi) = self.attractor_bounds();
        (hi.x - lo.x).hypot(hi.y - lo.y)
    }
}

fn check_probabilities(p: &[f64], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::BadProbabilities(format!(
            "expected {n} entries, found {}",
            p.len()
        )));
    }
    if let Some(bad) = p.iter().find(|v| !v.is_finite() || **v <= 0.0) {
        return Err(Error::BadProbabilities(format!(
            "entry {bad} is not positive"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(Error::BadProbabilities(format!("entries sum to {sum}")));
    }
    Ok(())
}

fn area_weights(maps: &[AffineMap2]) -> Vec<f64> {
    let dets: Vec<f64> = maps.iter().map(|m| m.determinant().abs()).collect();
    let total: f64 = dets.iter().sum();
    if total > 0.0 {
        dets.iter().map(|d| d / total).collect()
    } else {
        vec![1.0 / maps.len() as f64; maps.len()]
    }
}
