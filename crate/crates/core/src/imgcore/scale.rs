//! Uniform downscaling to a working-size limit.

use crate::imgcore::raster::ColorImage;

/// Default working-size limit, the largest input size the pipeline is tuned for.
pub const DEFAULT_MAX_W: usize = 1350;
pub const DEFAULT_MAX_H: usize = 700;

/// Output dimensions for fitting `width x height` inside the limit with one
/// uniform factor. The binding axis lands exactly on its limit; the other is
/// rounded half up in exact integer arithmetic.
pub fn fitted_dims(width: usize, height: usize, max_w: usize, max_h: usize) -> (usize, usize) {
    if width <= max_w && height <= max_h {
        return (width, height);
    }
    // Compare max_w/width with max_h/height without floating point.
    let (num, den) = if (max_w as u128) * (height as u128) <= (max_h as u128) * (width as u128) {
        (max_w as u128, width as u128)
    } else {
        (max_h as u128, height as u128)
    };
    let round = |d: usize| -> usize {
        let v = (2 * d as u128 * num + den) / (2 * den);
        (v as usize).max(1)
    };
    (round(width).min(max_w), round(height).min(max_h))
}

/// Box-filter resampling weights: output cell `i` covers source interval
/// `[i * s, (i + 1) * s)` with `s = src / dst`.
fn area_weights(src: usize, dst: usize) -> Vec<Vec<(usize, f32)>> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|i| {
            let lo = i as f64 * scale;
            let hi = ((i + 1) as f64 * scale).min(src as f64);
            let first = lo.floor() as usize;
            let last = (hi.ceil() as usize).min(src);
            let mut w: Vec<(usize, f32)> = (first..last)
                .filter_map(|j| {
                    let overlap = (hi.min(j as f64 + 1.0) - lo.max(j as f64)).max(0.0);
                    (overlap > 0.0).then_some((j, (overlap / (hi - lo)) as f32))
                })
                .collect();
            if w.is_empty() {
                w.push((first.min(src - 1), 1.0));
            }
            w
        })
        .collect()
}

/// Downscales by area averaging when the image exceeds `max_w x max_h`;
/// otherwise returns an unchanged copy.
pub fn scale_to_limit(img: &ColorImage, max_w: usize, max_h: usize) -> ColorImage {
    let (w, h) = (img.width(), img.height());
    let (ow, oh) = fitted_dims(w, h, max_w.max(1), max_h.max(1));
    if (ow, oh) == (w, h) {
        return img.clone();
    }
    let xw = area_weights(w, ow);
    let yw = area_weights(h, oh);
    let src = img.pixels();

    let mut horiz = vec![0f32; 3 * ow * h];
    for y in 0..h {
        let row = &src[3 * y * w..3 * (y + 1) * w];
        let out = &mut horiz[3 * y * ow..3 * (y + 1) * ow];
        for (ox, weights) in xw.iter().enumerate() {
            let mut acc = [0f32; 3];
            for &(sx, wt) in weights {
                for c in 0..3 {
                    acc[c] += wt * row[3 * sx + c] as f32;
                }
            }
            out[3 * ox..3 * ox + 3].copy_from_slice(&acc);
        }
    }

    let mut pixels = vec![0u8; 3 * ow * oh];
    for (oy, weights) in yw.iter().enumerate() {
        let out = &mut pixels[3 * oy * ow..3 * (oy + 1) * ow];
        for (i, o) in out.iter_mut().enumerate() {
            let v: f32 = weights.iter().map(|&(sy, wt)| wt * horiz[3 * sy * ow + i]).sum();
            *o = v.round().clamp(0.0, 255.0) as u8;
        }
    }
    ColorImage::new(ow, oh, pixels).expect("fitted dims are nonzero")
}
