//! Shape rasters from image files or synthetic specs.

use std::collections::BTreeSet;
use std::path::Path;

use image::{DynamicImage, ImageFormat};
use parthier_core::{ShapeGrid, SyntheticShape};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeFormat {
    Pgm,
    Png,
}

impl ShapeFormat {
    pub fn from_path(path: &Path) -> Option<ShapeFormat> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "pgm" | "pnm" | "pbm" => Some(ShapeFormat::Pgm),
            "png" => Some(ShapeFormat::Png),
            _ => None,
        }
    }
}

/// Reads a single-channel bilevel image. Pixels brighter than half the
/// sample range are foreground. The result carries a one-pixel margin.
pub fn load_shape(path: &Path, format: ShapeFormat) -> Result<ShapeGrid> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io { path: path.into(), source })?;
    let image_format = match format {
        ShapeFormat::Pgm => ImageFormat::Pnm,
        ShapeFormat::Png => ImageFormat::Png,
    };
    let image = image::load_from_memory_with_format(&bytes, image_format)
        .map_err(|e| Error::invalid(path, format!("unreadable image: {e}")))?;
    let (width, height) = (image.width() as usize, image.height() as usize);
    let (samples, max): (Vec<u32>, u32) = match image {
        DynamicImage::ImageLuma8(buf) => (buf.into_raw().into_iter().map(u32::from).collect(), u8::MAX.into()),
        DynamicImage::ImageLuma16(buf) => (buf.into_raw().into_iter().map(u32::from).collect(), u16::MAX.into()),
        other => {
            return Err(Error::invalid(path, format!("image is not single-channel ({:?})", other.color())));
        }
    };
    let levels: BTreeSet<u32> = samples.iter().copied().collect();
    if levels.len() > 2 {
        return Err(Error::invalid(path, format!("non-bilevel image: {} distinct grey levels", levels.len())));
    }
    let mask: Vec<bool> = samples.iter().map(|&v| 2 * v > max).collect();
    ShapeGrid::from_mask(width, height, &mask).map_err(Error::core("load"))
}

/// Writes the mask of a grid, margin included, as an 8-bit binary PGM.
pub fn save_shape_pgm(grid: &ShapeGrid, path: &Path) -> Result<()> {
    let (w, h) = (grid.width(), grid.height());
    let pixels: Vec<u8> = (0..w * h).map(|p| if grid.mask()[p] { 255 } else { 0 }).collect();
    image::save_buffer_with_format(path, &pixels, w as u32, h as u32, image::ExtendedColorType::L8, ImageFormat::Pnm)
        .map_err(|e| Error::invalid(path, format!("cannot write image: {e}")))
}

/// A shape named on the command line: an image path or a synthetic spec.
#[derive(Debug, Clone, PartialEq)]
pub enum ShapeInput {
    File(std::path::PathBuf, ShapeFormat),
    Synthetic(SyntheticShape),
}

impl ShapeInput {
    /// Paths with a known image extension are files; anything else must
    /// parse as a synthetic spec such as `annulus:8,16`.
    pub fn parse(arg: &str) -> Result<ShapeInput> {
        let path = Path::new(arg);
        if let Some(format) = ShapeFormat::from_path(path) {
            return Ok(ShapeInput::File(path.into(), format));
        }
        arg.parse::<SyntheticShape>()
            .map(ShapeInput::Synthetic)
            .map_err(|e| Error::Usage(format!("`{arg}` is neither a .pgm/.png file nor a synthetic shape ({e})")))
    }

    pub fn load(&self) -> Result<ShapeGrid> {
        match self {
            ShapeInput::File(path, format) => load_shape(path, *format),
            ShapeInput::Synthetic(shape) => shape.rasterize().map_err(Error::core("load")),
        }
    }

    /// A file-name-safe stem: the file stem, or the shape name with separators
    /// replaced (`annulus:8,16` → `annulus_8_16`).
    pub fn stem(&self) -> String {
        match self {
            ShapeInput::File(path, _) => path.file_stem().map_or("shape".into(), |s| s.to_string_lossy().into_owned()),
            ShapeInput::Synthetic(shape) => shape.to_string().replace([':', ','], "_"),
        }
    }
}
