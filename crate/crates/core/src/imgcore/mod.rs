//! Raster substrate: image containers, geometry, integral images, scaling,
//! quadrangle warping and the netpbm codec.

pub mod geometry;
pub mod integral;
pub mod pnm;
pub mod raster;
pub mod scale;
pub mod warp;

pub use geometry::{Point, Quad, Rect};
pub use integral::{build_integral, window_stats, IntegralImage};
pub use raster::{to_gray, BinaryImage, ColorImage, GrayImage};
pub use scale::{scale_to_limit, DEFAULT_MAX_H, DEFAULT_MAX_W};
pub use warp::warp_quad_to_rect;
