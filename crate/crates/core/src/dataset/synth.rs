//! Deterministic synthetic digit corpus.
//!
//! Renders 28x28 grayscale digits from fixed 5x7 glyph prototypes with
//! per-instance translation, shear, stroke dilation, intensity variation and
//! pixel noise. The result is a stand-in corpus with the same shape and
//! class structure as scanned handwritten digits, for environments where the
//! real files are not available. Same seed, same corpus, bit for bit.

use rand::Rng;

use super::LabeledCorpus;
use crate::amr::Label;
use crate::features::GrayImage;
use crate::seeding;

const SIDE: usize = 28;
const SCALE: usize = 3;

/// 5x7 digit glyphs, one row per scanline, low bit on the right.
const GLYPHS: [[u8; 7]; 10] = [
    [0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110], // 0
    [0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110], // 1
    [0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111], // 2
    [0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110], // 3
    [0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010], // 4
    [0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110], // 5
    [0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110], // 6
    [0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000], // 7
    [0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110], // 8
    [0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100], // 9
];

/// Renders one digit instance; deterministic in `(class, seed)`.
pub fn render_digit(class: Label, seed: u64) -> GrayImage {
    let mut rng = seeding::rng(seed);
    let glyph = &GLYPHS[class as usize % GLYPHS.len()];

    let dx = rng.random_range(-2i32..=2);
    let dy = rng.random_range(-2i32..=2);
    let shear = rng.random_range(-0.2f64..=0.2);
    let dilate = rng.random_bool(0.4);
    let base: i32 = rng.random_range(170..=255);

    let glyph_h = (7 * SCALE) as i32; // 21
    let glyph_w = (5 * SCALE) as i32; // 15
    let off_x = (SIDE as i32 - glyph_w) / 2 + dx;
    let off_y = (SIDE as i32 - glyph_h) / 2 + dy;

    let mut img = GrayImage::filled(SIDE, SIDE, 0);
    let mut paint = |x: i32, y: i32, rng: &mut rand_chacha::ChaCha8Rng| {
        if (0..SIDE as i32).contains(&x) && (0..SIDE as i32).contains(&y) {
            let jitter: i32 = rng.random_range(-30..=0);
            img.set(x as usize, y as usize, (base + jitter).clamp(0, 255) as u8);
        }
    };
    for (gy, row) in glyph.iter().enumerate() {
        for gx in 0..5 {
            if row >> (4 - gx) & 1 == 0 {
                continue;
            }
            for sy in 0..SCALE {
                let y = (gy * SCALE + sy) as i32;
                let skew = (shear * (y - glyph_h / 2) as f64).round() as i32;
                for sx in 0..SCALE {
                    let x = (gx * SCALE + sx) as i32 + skew;
                    paint(off_x + x, off_y + y, &mut rng);
                    if dilate && sx == SCALE - 1 {
                        paint(off_x + x + 1, off_y + y, &mut rng);
                    }
                }
            }
        }
    }
    // sparse background speckle
    for y in 0..SIDE {
        for x in 0..SIDE {
            if rng.random_bool(0.002) && img.get(x, y) == 0 {
                img.set(x, y, rng.random_range(1..=60));
            }
        }
    }
    img
}

/// Generates `count` labeled digits, classes balanced round-robin.
pub fn generate(count: usize, seed: u64) -> LabeledCorpus {
    let mut images = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for i in 0..count {
        let label = (i % 10) as Label;
        images.push(render_digit(label, seeding::derive(seed, &[i as u64])));
        labels.push(label);
    }
    LabeledCorpus::new(images, labels).expect("generator output is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_and_balanced() {
        let a = generate(50, 9);
        let b = generate(50, 9);
        assert_eq!(a.images(), b.images());
        for class in 0..10u8 {
            assert_eq!(a.labels().iter().filter(|&&l| l == class).count(), 5);
        }
        let c = generate(50, 10);
        assert_ne!(a.images(), c.images());
    }

    #[test]
    fn instances_of_one_class_vary() {
        let corpus = generate(40, 3);
        assert_ne!(corpus.images()[0], corpus.images()[10]);
        // something is actually drawn
        for img in corpus.images() {
            assert!(img.pixels().iter().filter(|&&p| p > 100).count() > 30);
        }
    }
}
