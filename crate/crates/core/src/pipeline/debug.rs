use std::fs;
use std::path::{Path, PathBuf};

use super::run::Trace;
use crate::error::Result;
use crate::imgcore::{pnm, ColorImage, Point, Quad, Rect};

const GREEN: [u8; 3] = [0, 200, 0];
const CYAN: [u8; 3] = [0, 170, 220];
const YELLOW: [u8; 3] = [230, 200, 0];
const MAGENTA: [u8; 3] = [220, 0, 220];
const BLUE: [u8; 3] = [0, 0, 255];
const RED: [u8; 3] = [255, 0, 0];

fn plot(img: &mut ColorImage, x: f64, y: f64, c: [u8; 3]) {
    if x >= 0.0 && y >= 0.0 && (x as usize) < img.width() && (y as usize) < img.height() {
        img.set(x as usize, y as usize, c);
    }
}

pub fn draw_segment(img: &mut ColorImage, a: Point, b: Point, c: [u8; 3]) {
    let steps = (b.x - a.x).abs().max((b.y - a.y).abs()).ceil().max(1.0) as usize;
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        plot(img, a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t, c);
    }
}

pub fn draw_quad(img: &mut ColorImage, q: &Quad, c: [u8; 3]) {
    for i in 0..4 {
        draw_segment(img, q.corners[i], q.corners[(i + 1) % 4], c);
    }
}

/// Outline along the boundary pixels of `r`.
pub fn draw_rect(img: &mut ColorImage, r: &Rect, c: [u8; 3]) {
    let (x0, y0) = (r.x as f64, r.y as f64);
    let (x1, y1) = ((r.right() - 1) as f64, (r.bottom() - 1) as f64);
    let q = Quad::new([Point::new(x0, y0), Point::new(x1, y0), Point::new(x1, y1), Point::new(x0, y1)]);
    draw_quad(img, &q, c);
}

/// Writes the trace images into `dir` with file names prefixed by `stem`:
/// candidate components, cluster box before and after widening, the zone
/// before and after skew compensation, and the binary intermediates.
pub fn write_debug(dir: impl AsRef<Path>, stem: &str, trace: &Trace) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let save_color = |name: &str, img: &ColorImage, written: &mut Vec<PathBuf>| -> Result<()> {
        let p = dir.join(format!("{stem}_{name}.ppm"));
        pnm::write_color(&p, img)?;
        written.push(p);
        Ok(())
    };
    let Some(scaled) = &trace.scaled else {
        return Ok(written);
    };

    let mut comps = scaled.clone();
    for c in &trace.candidates_raw {
        draw_rect(&mut comps, &c.bbox, CYAN);
    }
    for c in &trace.candidates_opened {
        draw_rect(&mut comps, &c.bbox, GREEN);
    }
    save_color("components", &comps, &mut written)?;

    if let Some(sel) = &trace.selected {
        let mut cl = scaled.clone();
        if let Some(u) = &trace.unextended {
            draw_rect(&mut cl, u, YELLOW);
        }
        draw_rect(&mut cl, &sel.bbox, MAGENTA);
        save_color("cluster", &cl, &mut written)?;

        let mut qs = scaled.clone();
        draw_quad(&mut qs, &Quad::from_rect(&sel.bbox), BLUE);
        if let Some(z) = &trace.zone {
            draw_quad(&mut qs, z, RED);
        }
        save_color("zone", &qs, &mut written)?;
    }
    if let Some(crop) = &trace.crop {
        save_color("crop", crop, &mut written)?;
    }
    for (name, bin) in [("raw", &trace.raw), ("opened", &trace.opened), ("crop_binary", &trace.crop_binary)] {
        if let Some(b) = bin {
            let p = dir.join(format!("{stem}_{name}.pgm"));
            pnm::write_binary(&p, b)?;
            written.push(p);
        }
    }
    Ok(written)
}
