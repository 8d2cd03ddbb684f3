//! Built-in IFSs and the affine correspondence solver.

use crate::error::{Error, Result};
use crate::geometry::{AffineMap2, Ifs, Point2, Viewport};
use crate::raster::{AttractorMask, RasterPicture};

/// The unique affine map with `src[i] ↦ dst[i]`.
pub fn affine_from_correspondence(src: [Point2; 3], dst: [Point2; 3]) -> Result<AffineMap2> {
    let (p1, p2, p3) = (src[0], src[1], src[2]);
    let (u1, u2) = (p2.x - p1.x, p2.y - p1.y);
    let (v1, v2) = (p3.x - p1.x, p3.y - p1.y);
    let det = u1 * v2 - v1 * u2;
    let scale = (u1 * u1 + u2 * u2).max(v1 * v1 + v2 * v2);
    if det.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::CollinearSource);
    }
    // Columns of P^{-1} for P = [p2 - p1, p3 - p1].
    let (i11, i12, i21, i22) = (v2 / det, -v1 / det, -u2 / det, u1 / det);
    let solve = |q1: f64, q2: f64, q3: f64| {
        let (s, t) = (q2 - q1, q3 - q1);
        let x = s * i11 + t * i21;
        let y = s * i12 + t * i22;
        (x, y, q1 - x * p1.x - y * p1.y)
    };
    let (a, b, c) = solve(dst[0].x, dst[1].x, dst[2].x);
    let (d, e, l) = solve(dst[0].y, dst[1].y, dst[2].y);
    Ok(AffineMap2::new(a, b, c, d, e, l))
}

/// A triangle `ABC` with the three division ratios of the four-map family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleSpec {
    pub a: Point2,
    pub b: Point2,
    pub c: Point2,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// The division points: `c` on `AB` with `|Bc| = α|AB|`, `a` on `BC` with
/// `|Ca| = β|BC|`, and `b` on `CA` with `|Ab| = γ|CA|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisionPoints {
    pub a: Point2,
    pub b: Point2,
    pub c: Point2,
}

impl TriangleSpec {
    /// `A = (0, 0)`, `B = (1, 0)`, `C = (0.5, 1)`.
    pub fn canonical(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        Self::new(
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, 1.0),
            alpha,
            beta,
            gamma,
        )
    }

    pub fn new(a: Point2, b: Point2, c: Point2, alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} is not in (0, 1)"
                )));
            }
        }
        let area = 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)).abs();
        if area.is_nan() || area <= 1e-12 {
            return Err(Error::CollinearSource);
        }
        Ok(Self {
            a,
            b,
            c,
            alpha,
            beta,
            gamma,
        })
    }

    pub fn division_points(&self) -> DivisionPoints {
        DivisionPoints {
            c: self.b.lerp(self.a, self.alpha),
            a: self.c.lerp(self.b, self.beta),
            b: self.a.lerp(self.c, self.gamma),
        }
    }

    /// `h1(ABC) = aBc`, `h2(ABC) = abC`, `h3(ABC) = Abc`, `h4(ABC) = abc`.
    pub fn maps(&self) -> Result<[AffineMap2; 4]> {
        let DivisionPoints { a, b, c } = self.division_points();
        let src = [self.a, self.b, self.c];
        Ok([
            affine_from_correspondence(src, [a, self.b, c])?,
            affine_from_correspondence(src, [a, b, self.c])?,
            affine_from_correspondence(src, [self.a, b, c])?,
            affine_from_correspondence(src, [a, b, c])?,
        ])
    }

    fn viewport(&self) -> Viewport {
        let xs = [self.a.x, self.b.x, self.c.x];
        let ys = [self.a.y, self.b.y, self.c.y];
        let lo = |v: [f64; 3]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = |v: [f64; 3]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (x0, x1, y0, y1) = (lo(xs), hi(xs), lo(ys), hi(ys));
        let side = (x1 - x0).max(y1 - y0);
        Viewport::new(x0, y0, x0 + side, y0 + side).expect("triangle has positive extent")
    }
}

/// The four-map IFS whose attractor is the filled triangle.
pub fn triangle_family(spec: &TriangleSpec) -> Result<Ifs> {
    Ifs::new(spec.maps()?.to_vec(), None, spec.viewport())
}

/// The first three maps of the triangle family: an affine Sierpinski triangle.
pub fn sierpinski(spec: &TriangleSpec) -> Result<Ifs> {
    Ifs::new(spec.maps()?[..3].to_vec(), None, spec.viewport())
}

fn rows(rows: &[[f64; 6]]) -> Vec<AffineMap2> {
    rows.iter().map(|r| AffineMap2::from_row(*r)).collect()
}

pub fn fern() -> Ifs {
    Ifs::new(
        rows(&[
            [0.85, -0.05, 0.125, 0.05, 0.85, -0.039],
            [0.06, 0.02, 0.45, 0.0, 0.165, 0.835],
            [0.17, 0.22, 0.195, -0.22, 0.17, 0.776],
            [-0.17, -0.22, 0.805, -0.22, 0.17, 0.776],
        ]),
        None,
        Viewport::unit(),
    )
    .expect("fern maps are contractive")
}

/// Filled unit square tiled by `[0,0.8]²`, `[0.8,1]²` and two strips. The
/// maps send `K = (0,0)` to `K`, `M = (0.8,0.8)`, `L = (1,0)` and `J = (0,1)`.
pub fn square_cts() -> Ifs {
    Ifs::new(
        rows(&[
            [0.8, 0.0, 0.0, 0.0, 0.8, 0.0],
            [0.2, 0.0, 0.8, 0.0, 0.2, 0.8],
            [-0.2, 0.0, 1.0, 0.0, 0.8, 0.0],
            [0.8, 0.0, 0.0, 0.0, -0.2, 1.0],
        ]),
        None,
        Viewport::unit(),
    )
    .expect("square maps are contractive")
}

/// The square IFS with second row `(0.2, 0, 0.8, 0, 0.8, 0.2)`.
///
/// Its second image is a `0.2 × 0.8` strip that overlaps the third, so the
/// maps do not tile the square; kept to compare against [`square_cts`].
pub fn square_cts_table() -> Ifs {
    Ifs::new(
        rows(&[
            [0.8, 0.0, 0.0, 0.0, 0.8, 0.0],
            [0.2, 0.0, 0.8, 0.0, 0.8, 0.2],
            [-0.2, 0.0, 1.0, 0.0, 0.8, 0.0],
            [0.8, 0.0, 0.0, 0.0, -0.2, 1.0],
        ]),
        None,
        Viewport::unit(),
    )
    .expect("square maps are contractive")
}

/// Same attractor as [`square_cts`] with a different tiling and orientations.
pub fn square_disc() -> Ifs {
    Ifs::new(
        rows(&[
            [-0.8, 0.0, 0.8, 0.0, -0.8, 0.8],
            [-0.2, 0.0, 1.0, 0.0, -0.2, 1.0],
            [0.8, 0.0, 0.0, 0.0, 0.2, 0.8],
            [0.2, 0.0, 0.8, 0.0, 0.8, 0.0],
        ]),
        None,
        Viewport::unit(),
    )
    .expect("square maps are contractive")
}

/// `z ↦ s z − 1` and `z ↦ s z + 1` on `[−3.5, 3.5]²`.
pub fn dragon_ifs(s_re: f64, s_im: f64) -> Result<Ifs> {
    if s_re.hypot(s_im).is_nan() || s_re.hypot(s_im) >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "|s| = {} is not below 1",
            s_re.hypot(s_im)
        )));
    }
    Ifs::new(
        vec![
            AffineMap2::new(s_re, -s_im, -1.0, s_im, s_re, 0.0),
            AffineMap2::new(s_re, -s_im, 1.0, s_im, s_re, 0.0),
        ],
        None,
        Viewport::new(-3.5, -3.5, 3.5, 3.5)?,
    )
}

/// Closed-form coefficients of the four triangle maps for `A = (0,0)`,
/// `B = (0,1)`, `C = (0.5,1)`, as tabulated. Reference data only: these rows
/// do not satisfy the defining correspondences.
pub fn table1_reference(alpha: f64, beta: f64, gamma: f64) -> [AffineMap2; 4] {
    let (al, be, ga) = (alpha, beta, gamma);
    [
        AffineMap2::new(
            -1.0 + be,
            -0.5 + 0.5 * be + 0.5 * al,
            1.0 - be,
            0.0,
            al,
            0.0,
        ),
        AffineMap2::new(
            be + 0.5 * ga - 0.5,
            0.5 * be - 0.25 * ga + 0.25,
            1.0 - be,
            1.0 - ga,
            0.5 * ga - 0.5,
            0.0,
        ),
        AffineMap2::new(
            0.5 * ga,
            -0.5 + 0.5 * al - 0.25 * ga,
            0.5,
            -ga,
            -1.0 + al + 0.5 * ga,
            1.0,
        ),
        AffineMap2::new(
            be + 0.5 * ga - 0.5,
            -0.75 + 0.5 * be + 0.5 * al - 0.25 * ga,
            1.0 - be,
            1.0 - ga,
            al - 0.5 + 0.5 * ga,
            0.0,
        ),
    ]
}

/// One row of the comparison between tabulated and constructed maps.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientDiff {
    pub index: usize,
    pub reference: [f64; 6],
    pub constructed: [f64; 6],
    pub max_abs_diff: f64,
}

/// Compares [`table1_reference`] with the maps built from the correspondences
/// on the same triangle.
pub fn table1_comparison(alpha: f64, beta: f64, gamma: f64) -> Result<Vec<CoefficientDiff>> {
    let spec = TriangleSpec::new(
        Point2::new(0.0, 0.0),
        Point2::new(0.0, 1.0),
        Point2::new(0.5, 1.0),
        alpha,
        beta,
        gamma,
    )?;
    let built = spec.maps()?;
    Ok(table1_reference(alpha, beta, gamma)
        .iter()
        .zip(built.iter())
        .enumerate()
        .map(|(i, (r, c))| {
            let (reference, constructed) = (r.to_row(), c.to_row());
            let max_abs_diff = reference
                .iter()
                .zip(&constructed)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            CoefficientDiff {
                index: i + 1,
                reference,
                constructed,
                max_abs_diff,
            }
        })
        .collect())
}

/// Keeps the picture only on the mask.
pub fn mask_picture(picture: &RasterPicture, mask: &AttractorMask) -> Result<RasterPicture> {
    picture.masked(mask)
}

/// A built-in IFS and a one-line description.
#[derive(Debug, Clone, Copy)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub description: &'static str,
}

pub const GALLERY: &[GalleryEntry] = &[
    GalleryEntry {
        name: "fern",
        description: "four-map fern on [0,1]^2",
    },
    GalleryEntry {
        name: "square-cts",
        description: "filled unit square; g2 = (0.2, 0, 0.8, 0, 0.2, 0.8), address structure refined by the fern's",
    },
    GalleryEntry {
        name: "square-cts-table",
        description: "filled unit square; g2 = (0.2, 0, 0.8, 0, 0.8, 0.2), overlapping strips",
    },
    GalleryEntry {
        name: "square-disc",
        description: "filled unit square with reflected corner maps",
    },
    GalleryEntry {
        name: "dragon:<re>,<im>",
        description: "z -> s z - 1, z -> s z + 1 with s = re + i im, on [-3.5,3.5]^2",
    },
    GalleryEntry {
        name: "tri:<alpha>,<beta>,<gamma>",
        description: "four maps tiling A=(0,0), B=(1,0), C=(0.5,1) at the given division ratios",
    },
    GalleryEntry {
        name: "sierpinski:<alpha>,<beta>,<gamma>",
        description: "first three maps of tri:<alpha>,<beta>,<gamma>",
    },
];

/// Looks up a gallery name such as `fern`, `dragon:0.5,0.5` or `tri:0.5,0.5,0.5`.
pub fn by_name(name: &str) -> Result<Ifs> {
    let name = name.trim();
    let (head, args) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let numbers = |count: usize| -> Result<Vec<f64>> {
        let text =
            args.ok_or_else(|| Error::Parse(format!("'{name}' needs {count} parameters")))?;
        let v = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number '{t}' in '{name}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        if v.len() != count {
            return Err(Error::Parse(format!("'{name}' needs {count} parameters")));
        }
        Ok(v)
    };
    match head {
        "fern" if args.is_none() => Ok(fern()),
        "square-cts" if args.is_none() => Ok(square_cts()),
        "square-cts-table" if args.is_none() => Ok(square_cts_table()),
        "square-disc" if args.is_none() => Ok(square_disc()),
        "dragon" => {
            let v = numbers(2)?;
            dragon_ifs(v[0], v[1])
        }
        "tri" => {
            let v = numbers(3)?;
            triangle_family(&TriangleSpec::canonical(v[0], v[1], v[2])?)
        }
        "sierpinski" => {
            let v = numbers(3)?;
            sierpinski(&TriangleSpec::canonical(v[0], v[1], v[2])?)
        }
        _ => Err(Error::Parse(format!("unknown gallery name '{name}'"))),
    }
}
