//! IDX file reading and writing (the MNIST distribution format).
//!
//! Images: big-endian u32 magic 0x00000803, count, rows, cols, then raw u8
//! pixels. Labels: magic 0x00000801, count, raw u8 labels. Files ending in
//! `.gz` are transparently gunzipped on read.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;

use crate::error::{Error, Result};
use crate::features::GrayImage;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

/// Side length every image file must carry.
pub const IMAGE_SIDE: usize = 28;

fn open_maybe_gz(path: &Path) -> Result<Box<dyn Read>> {
    let file = BufReader::new(File::open(path)?);
    if path.extension().is_some_and(|e| e == "gz") {
        Ok(Box::new(GzDecoder::new(file)))
    } else {
        Ok(Box::new(file))
    }
}

fn read_u32_be(r: &mut impl Read, path: &Path) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|_| Error::format(path, "truncated header"))?;
    Ok(u32::from_be_bytes(buf))
}

pub fn load_idx_images(path: &Path) -> Result<Vec<GrayImage>> {
    let mut r = open_maybe_gz(path)?;
    let magic = read_u32_be(&mut r, path)?;
    if magic != IMAGE_MAGIC {
        return Err(Error::format(
            path,
            format!("bad magic {magic:#010x}, expected {IMAGE_MAGIC:#010x}"),
        ));
    }
    let count = read_u32_be(&mut r, path)? as usize;
    let rows = read_u32_be(&mut r, path)? as usize;
    let cols = read_u32_be(&mut r, path)? as usize;
    if rows != IMAGE_SIDE || cols != IMAGE_SIDE {
        return Err(Error::format(
            path,
            format!("image dimensions {rows}x{cols}, expected {IMAGE_SIDE}x{IMAGE_SIDE}"),
        ));
    }
    let mut pixels = vec![0u8; count * rows * cols];
    r.read_exact(&mut pixels).map_err(|_| {
        Error::format(path, format!("truncated payload, expected {count} images"))
    })?;
    Ok(pixels
        .chunks_exact(rows * cols)
        .map(|c| GrayImage::new(cols, rows, c.to_vec()).expect("chunk size matches"))
        .collect())
}

pub fn load_idx_labels(path: &Path) -> Result<Vec<u8>> {
    let mut r = open_maybe_gz(path)?;
    let magic = read_u32_be(&mut r, path)?;
    if magic != LABEL_MAGIC {
        return Err(Error::format(
            path,
            format!("bad magic {magic:#010x}, expected {LABEL_MAGIC:#010x}"),
        ));
    }
    let count = read_u32_be(&mut r, path)? as usize;
    let mut labels = vec![0u8; count];
    r.read_exact(&mut labels).map_err(|_| {
        Error::format(path, format!("truncated payload, expected {count} labels"))
    })?;
    Ok(labels)
}

pub fn write_idx_images(mut w: impl Write, images: &[GrayImage]) -> Result<()> {
    w.write_all(&IMAGE_MAGIC.to_be_bytes())?;
    w.write_all(&(images.len() as u32).to_be_bytes())?;
    w.write_all(&(IMAGE_SIDE as u32).to_be_bytes())?;
    w.write_all(&(IMAGE_SIDE as u32).to_be_bytes())?;
    for img in images {
        w.write_all(img.pixels())?;
    }
    Ok(())
}

pub fn write_idx_labels(mut w: impl Write, labels: &[u8]) -> Result<()> {
    w.write_all(&LABEL_MAGIC.to_be_bytes())?;
    w.write_all(&(labels.len() as u32).to_be_bytes())?;
    w.write_all(labels)?;
    Ok(())
}
