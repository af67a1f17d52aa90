//! Diagnostic PNG renders: level curves of ω and part sheets.

use std::path::Path;

use image::{ImageFormat, Rgb, RgbImage};
use parthier_core::{Field, Lattice};

use crate::error::{Error, Result};

const BACKGROUND: Rgb<u8> = Rgb([255, 255, 255]);
const OUTLINE: Rgb<u8> = Rgb([0, 0, 0]);
const ZERO_LEVEL: Rgb<u8> = Rgb([220, 0, 0]);
const LEVEL_CURVE: Rgb<u8> = Rgb([60, 60, 60]);
const SHAPE: Rgb<u8> = Rgb([205, 205, 205]);
const PART: Rgb<u8> = Rgb([100, 100, 100]);
const SEED: Rgb<u8> = Rgb([0, 0, 0]);
const TILE_GAP: u32 = 4;

fn mix(a: [u8; 3], b: [u8; 3], t: f64) -> Rgb<u8> {
    let c = |i: usize| (a[i] as f64 + (b[i] as f64 - a[i] as f64) * t.clamp(0.0, 1.0)).round() as u8;
    Rgb([c(0), c(1), c(2)])
}

/// Shaded |ω| with `levels` level curves per sign region, the zero level in
/// red and the shape outline in black. |ω| is normalized separately inside
/// Ω⁺ and Ω₋. Each raster pixel becomes a `scale × scale` block and curves
/// run along block edges.
pub fn render_field(field: &Field, levels: usize, scale: u32) -> RgbImage {
    let grid = field.grid();
    let omega = field.raster();
    let peak_pos = omega.iter().fold(0.0f64, |m, &v| m.max(v));
    let peak_neg = omega.iter().fold(0.0f64, |m, &v| m.max(-v));
    let levels = levels.max(1);
    let norm = |v: f64| {
        if v > 0.0 {
            v / peak_pos
        } else if v < 0.0 {
            -v / peak_neg
        } else {
            0.0
        }
    };
    let band = |v: f64| ((norm(v) * levels as f64).floor() as usize).min(levels - 1);
    let fill = |p: usize| {
        let v = omega[p];
        if !grid.mask()[p] {
            BACKGROUND
        } else if v > 0.0 {
            mix([255, 240, 215], [215, 110, 20], norm(v))
        } else {
            mix([225, 238, 255], [25, 90, 190], norm(v))
        }
    };
    // colour of the edge between raster pixels p and q, if one is drawn
    let edge = |p: usize, q: usize| match (grid.mask()[p], grid.mask()[q]) {
        (false, false) => None,
        (true, false) | (false, true) => Some(OUTLINE),
        _ if (omega[p] > 0.0) != (omega[q] > 0.0) => Some(ZERO_LEVEL),
        _ if band(omega[p]) != band(omega[q]) => Some(LEVEL_CURVE),
        _ => None,
    };
    let scale = scale.max(1);
    let (w, h) = (grid.width(), grid.height());
    let plane = grid.lattice() == Lattice::Plane;
    RgbImage::from_fn(w as u32 * scale, h as u32 * scale, |x, y| {
        let (px, py) = ((x / scale) as usize, (y / scale) as usize);
        let p = py * w + px;
        let left = (x % scale == 0 && px > 0).then(|| edge(p, p - 1)).flatten();
        let top = (plane && y % scale == 0 && py > 0).then(|| edge(p, p - w)).flatten();
        left.or(top).unwrap_or_else(|| fill(p))
    })
}

fn upscale(w: usize, h: usize, colors: &[Rgb<u8>], scale: u32) -> RgbImage {
    let scale = scale.max(1);
    RgbImage::from_fn(w as u32 * scale, h as u32 * scale, |x, y| {
        colors[(y / scale) as usize * w + (x / scale) as usize]
    })
}

/// One node of a part sheet: its seed and part pixels on the raster.
pub struct SheetTile<'a> {
    pub seed: &'a [usize],
    pub part: &'a [usize],
}

/// Tiles in reading order, one per node: the shape in light grey, the part
/// in dark grey and the seed in black.
pub fn render_part_sheet(
    width: usize,
    height: usize,
    shape: &[usize],
    tiles: &[SheetTile<'_>],
    scale: u32,
) -> RgbImage {
    let scale = scale.max(1);
    let cols = (tiles.len() as f64).sqrt().ceil().max(1.0) as u32;
    let rows = (tiles.len() as u32).div_ceil(cols).max(1);
    let (tw, th) = (width as u32 * scale, height as u32 * scale);
    let mut sheet =
        RgbImage::from_pixel(cols * tw + (cols - 1) * TILE_GAP, rows * th + (rows - 1) * TILE_GAP, BACKGROUND);
    for (k, tile) in tiles.iter().enumerate() {
        let mut colors = vec![BACKGROUND; width * height];
        for (set, color) in [(shape, SHAPE), (tile.part, PART), (tile.seed, SEED)] {
            for &p in set {
                colors[p] = color;
            }
        }
        let img = upscale(width, height, &colors, scale);
        let (cx, cy) = (k as u32 % cols, k as u32 / cols);
        image::imageops::replace(&mut sheet, &img, (cx * (tw + TILE_GAP)).into(), (cy * (th + TILE_GAP)).into());
    }
    sheet
}

pub fn save_png(image: &RgbImage, path: &Path) -> Result<()> {
    image.save_with_format(path, ImageFormat::Png).map_err(|e| Error::invalid(path, format!("cannot write image: {e}")))
}
