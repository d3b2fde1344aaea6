//! Deterministic image analysis and synthesis.
//!
//! The analysis side centers an image in a zero-padded square frame, grids it
//! into equal blocks, and takes each block's mean intensity as one feature;
//! the synthesis side paints blocks back and crops to the source frame. The
//! pair is exact on block-constant images and approximate elsewhere, which is
//! all retrieval needs to render its outputs. Externally computed features
//! can bypass this entirely via the interchange format in [`io`].

pub mod io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantizer::FeatureVector;

/// 8-bit grayscale image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::dimension(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        GrayImage {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.pixels[y * self.width + x] = value;
    }
}

/// Which analysis mechanism produced (or will produce) feature vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractorKind {
    /// Built-in block-average analysis with its approximate inverse.
    BlockAverage,
    /// Features imported from a file; no analysis or synthesis available.
    External,
}

/// Geometry of the block-average extractor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractorSpec {
    pub kind: ExtractorKind,
    /// Blocks per side; features per image is `grid * grid`.
    pub grid: usize,
    /// Side of the zero-padded square frame images are centered into.
    pub pad: usize,
    /// Source frame synthesis crops back to.
    pub frame_width: usize,
    pub frame_height: usize,
}

impl ExtractorSpec {
    pub fn block_average(
        grid: usize,
        pad: usize,
        frame_width: usize,
        frame_height: usize,
    ) -> Result<Self> {
        if grid == 0 || pad == 0 || pad % grid != 0 {
            return Err(Error::dimension(format!(
                "pad {pad} must be a positive multiple of grid {grid}"
            )));
        }
        if frame_width > pad || frame_height > pad {
            return Err(Error::ImageTooLarge {
                width: frame_width,
                height: frame_height,
                pad,
            });
        }
        Ok(ExtractorSpec {
            kind: ExtractorKind::BlockAverage,
            grid,
            pad,
            frame_width,
            frame_height,
        })
    }

    /// The default geometry for 28x28 digit images: an 8x8 grid over a 32x32
    /// frame, yielding 64 features.
    pub fn mnist() -> Self {
        ExtractorSpec::block_average(8, 32, 28, 28).expect("static geometry")
    }

    pub fn n_features(&self) -> usize {
        self.grid * self.grid
    }

    fn block_side(&self) -> usize {
        self.pad / self.grid
    }

    fn require_block_average(&self) -> Result<()> {
        if self.kind != ExtractorKind::BlockAverage {
            return Err(Error::Unsupported {
                reason: "extractor kind 'external' has no analysis/synthesis".into(),
            });
        }
        Ok(())
    }
}

/// Mean block intensities of `img`, centered in the padded frame, scaled to
/// `[0, 1]`, in row-major block order.
pub fn extract(spec: &ExtractorSpec, img: &GrayImage) -> Result<FeatureVector> {
    spec.require_block_average()?;
    if img.width > spec.pad || img.height > spec.pad {
        return Err(Error::ImageTooLarge {
            width: img.width,
            height: img.height,
            pad: spec.pad,
        });
    }
    let off_x = (spec.pad - img.width) / 2;
    let off_y = (spec.pad - img.height) / 2;
    let side = spec.block_side();
    let mut sums = vec![0u64; spec.n_features()];
    for y in 0..img.height {
        let by = (y + off_y) / side;
        for x in 0..img.width {
            let bx = (x + off_x) / side;
            sums[by * spec.grid + bx] += img.get(x, y) as u64;
        }
    }
    let denom = (side * side * 255) as f64;
    FeatureVector::new(sums.into_iter().map(|s| s as f64 / denom).collect())
}

/// Paints each block with its feature value and crops the padded frame back
/// to the source frame. Values are clamped to `[0, 1]` and rounded half up.
pub fn synthesize(spec: &ExtractorSpec, v: &FeatureVector) -> Result<GrayImage> {
    spec.require_block_average()?;
    if v.len() != spec.n_features() {
        return Err(Error::dimension(format!(
            "{} features for a {}x{} grid",
            v.len(),
            spec.grid,
            spec.grid
        )));
    }
    let side = spec.block_side();
    let off_x = (spec.pad - spec.frame_width) / 2;
    let off_y = (spec.pad - spec.frame_height) / 2;
    let mut out = GrayImage::filled(spec.frame_width, spec.frame_height, 0);
    for y in 0..spec.frame_height {
        let by = (y + off_y) / side;
        for x in 0..spec.frame_width {
            let bx = (x + off_x) / side;
            let value = (255.0 * v.values()[by * spec.grid + bx]).round();
            out.set(x, y, value.clamp(0.0, 255.0) as u8);
        }
    }
    Ok(out)
}
