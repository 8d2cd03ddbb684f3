//! Hyperbolic iterated function systems in the plane: attractors, tops
//! functions, and fractal transformations between attractors.

pub mod address;
pub mod attractor;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod gallery;
pub mod geometry;
pub mod hausdorff;
pub mod ppm;
pub mod raster;
pub mod rng;
pub mod tops;
pub mod transform;

pub use address::{code_metric, shift, tops_compare, AddressPrefix, ReverseAccumulator, Symbol};
pub use error::{Error, Result};
pub use geometry::{AffineMap2, Ifs, Point2, Viewport};
pub use raster::{AttractorMask, PixelGrid, RasterPicture, Rgb};
pub use rng::{select_symbol, SplitMix64, SymbolSampler};
