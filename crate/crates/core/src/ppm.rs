//! Binary PPM (P6) pictures and PGM (P5) coverage masks, maxval 255.
//!
//! Files store the top row (largest y) first, so grid row `height - 1`
//! comes first in the payload.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::raster::{AttractorMask, PixelGrid, RasterPicture, Rgb};

/// A decoded netpbm payload: width, height and the samples in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netpbm {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<u8>,
}

fn header(magic: &str, width: usize, height: usize) -> Vec<u8> {
    format!("{magic}\n{width} {height}\n255\n").into_bytes()
}

fn file_rows(grid: &PixelGrid) -> impl Iterator<Item = usize> + '_ {
    (0..grid.height()).rev()
}

/// P6 bytes of a picture; uncovered pixels are black.
pub fn encode_ppm(pic: &RasterPicture) -> Vec<u8> {
    let grid = pic.grid();
    let mut out = header("P6", grid.width(), grid.height());
    out.reserve(grid.len() * 3);
    for j in file_rows(grid) {
        for i in 0..grid.width() {
            out.extend_from_slice(&pic.get(i, j).unwrap_or([0, 0, 0]));
        }
    }
    out
}

/// P5 bytes with 255 on covered pixels and 0 elsewhere.
pub fn encode_coverage(pic: &RasterPicture) -> Vec<u8> {
    let grid = pic.grid();
    let mut out = header("P5", grid.width(), grid.height());
    for j in file_rows(grid) {
        for i in 0..grid.width() {
            out.push(if pic.get(i, j).is_some() { 255 } else { 0 });
        }
    }
    out
}

/// P6 bytes of a mask, white on black.
pub fn encode_mask(mask: &AttractorMask) -> Vec<u8> {
    let grid = mask.grid();
    let mut out = header("P6", grid.width(), grid.height());
    for j in file_rows(grid) {
        for i in 0..grid.width() {
            let v = if mask.get(i, j) { 255 } else { 0 };
            out.extend_from_slice(&[v, v, v]);
        }
    }
    out
}

/// Parses a binary P6 or P5 file. Comments in the header are allowed.
pub fn decode(bytes: &[u8]) -> Result<Netpbm> {
    let mut pos = 0usize;
    let token = |pos: &mut usize| -> Result<String> {
        loop {
            match bytes.get(*pos) {
                Some(b'#') => {
                    while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                        *pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => *pos += 1,
                Some(_) => break,
                None => return Err(Error::Parse("truncated header".into())),
            }
        }
        let start = *pos;
        while bytes.get(*pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            *pos += 1;
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };
    let magic = token(&mut pos)?;
    let channels = match magic.as_str() {
        "P6" => 3,
        "P5" => 1,
        m => return Err(Error::Parse(format!("unsupported magic {m:?}"))),
    };
    let number = |pos: &mut usize, what: &str| -> Result<usize> {
        let t = token(pos)?;
        t.parse()
            .map_err(|_| Error::Parse(format!("bad {what} {t:?}")))
    };
    let width = number(&mut pos, "width")?;
    let height = number(&mut pos, "height")?;
    let maxval = number(&mut pos, "maxval")?;
    if maxval != 255 {
        return Err(Error::Parse(format!("maxval {maxval} is not 255")));
    }
    if width == 0 || height == 0 {
        return Err(Error::Parse("empty image".into()));
    }
    if !bytes.get(pos).is_some_and(|b| b.is_ascii_whitespace()) {
        return Err(Error::Parse("truncated header".into()));
    }
    pos += 1;
    let need = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::Parse("image too large".into()))?;
    let data = &bytes[pos..];
    if data.len() < need {
        return Err(Error::Parse(format!(
            "payload has {} of {need} bytes",
            data.len()
        )));
    }
    Ok(Netpbm {
        width,
        height,
        channels,
        data: data[..need].to_vec(),
    })
}

/// Builds a picture on `grid` from a P6 payload and an optional P5 coverage payload.
pub fn picture_from(
    grid: PixelGrid,
    image: &Netpbm,
    coverage: Option<&Netpbm>,
) -> Result<RasterPicture> {
    if image.channels != 3 {
        return Err(Error::Parse("expected a P6 picture".into()));
    }
    let check = |n: &Netpbm| {
        if n.width != grid.width() || n.height != grid.height() {
            Err(Error::GridMismatch)
        } else {
            Ok(())
        }
    };
    check(image)?;
    if let Some(c) = coverage {
        check(c)?;
        if c.channels != 1 {
            return Err(Error::Parse("expected a P5 coverage mask".into()));
        }
    }
    let mut pixels = vec![[0u8; 3]; grid.len()];
    let mut covered = vec![true; grid.len()];
    for (row, j) in file_rows(&grid).enumerate() {
        for i in 0..grid.width() {
            let f = row * grid.width() + i;
            let k = grid.index(i, j);
            let px: Rgb = image.data[3 * f..3 * f + 3]
                .try_into()
                .expect("three bytes");
            pixels[k] = px;
            if let Some(c) = coverage {
                covered[k] = c.data[f] != 0;
            }
        }
    }
    RasterPicture::from_parts(grid, pixels, covered)
}

/// `out.ppm` → `out.coverage.pgm`.
pub fn coverage_path(path: &Path) -> PathBuf {
    path.with_extension("coverage.pgm")
}

/// Writes the picture and its coverage sidecar.
pub fn save_picture(path: &Path, pic: &RasterPicture) -> Result<()> {
    fs::write(path, encode_ppm(pic))?;
    fs::write(coverage_path(path), encode_coverage(pic))?;
    Ok(())
}

/// Reads a P6 file onto a grid spanning `viewport`. The sidecar is used when
/// present; otherwise every pixel counts as covered.
pub fn load_picture(path: &Path, viewport: crate::geometry::Viewport) -> Result<RasterPicture> {
    let image = decode(&fs::read(path)?)?;
    let side = coverage_path(path);
    let coverage = if side.exists() {
        Some(decode(&fs::read(side)?)?)
    } else {
        None
    };
    let grid = PixelGrid::new(image.width, image.height, viewport)?;
    picture_from(grid, &image, coverage.as_ref())
}

pub fn save_mask(path: &Path, mask: &AttractorMask) -> Result<()> {
    fs::write(path, encode_mask(mask))?;
    Ok(())
}
