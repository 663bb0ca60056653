//! Image and mask files.
//!
//! Grayscale PNG and PGM at 8 or 16 bits are read as-is and scaled to
//! `[0, 1]`; anything with colour channels is reduced to its green channel.

use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, ImageFormat, ImageReader};
use tubetrack_core::extract::BinaryMask;
use tubetrack_core::{GrayImage, Pixel};

use crate::error::{Error, Result};

pub fn read_image(path: &Path) -> Result<GrayImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes)
}

pub fn decode_image(bytes: &[u8]) -> Result<GrayImage> {
    let img = ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| Error::Image(e.to_string()))?
        .decode()
        .map_err(|e| Error::Image(e.to_string()))?;
    to_gray(&img)
}

fn to_gray(img: &DynamicImage) -> Result<GrayImage> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data: Vec<f64> = match img {
        DynamicImage::ImageLuma8(b) => b.pixels().map(|p| p.0[0] as f64 / 255.0).collect(),
        DynamicImage::ImageLumaA8(b) => b.pixels().map(|p| p.0[0] as f64 / 255.0).collect(),
        DynamicImage::ImageLuma16(b) => b.pixels().map(|p| p.0[0] as f64 / 65535.0).collect(),
        DynamicImage::ImageLumaA16(b) => b.pixels().map(|p| p.0[0] as f64 / 65535.0).collect(),
        DynamicImage::ImageRgb8(b) => b.pixels().map(|p| p.0[1] as f64 / 255.0).collect(),
        DynamicImage::ImageRgba8(b) => b.pixels().map(|p| p.0[1] as f64 / 255.0).collect(),
        DynamicImage::ImageRgb16(b) => b.pixels().map(|p| p.0[1] as f64 / 65535.0).collect(),
        DynamicImage::ImageRgba16(b) => b.pixels().map(|p| p.0[1] as f64 / 65535.0).collect(),
        other => other
            .to_rgb32f()
            .pixels()
            .map(|p| (p.0[1] as f64).clamp(0.0, 1.0))
            .collect(),
    };
    Ok(GrayImage::new(w, h, data)?)
}

/// 16-bit grayscale PNG, so a round trip loses at most `1 / 65535`.
pub fn encode_png16(img: &GrayImage) -> Vec<u8> {
    let buf = image::ImageBuffer::<image::Luma<u16>, _>::from_fn(
        img.width() as u32,
        img.height() as u32,
        |x, y| image::Luma([(img.get(x as usize, y as usize) * 65535.0).round() as u16]),
    );
    encode(DynamicImage::ImageLuma16(buf))
}

/// 8-bit grayscale PNG for display.
pub fn encode_png8(img: &GrayImage) -> Vec<u8> {
    encode_plane8(img.width(), img.height(), img.data())
}

/// 8-bit PNG of a plane, linearly stretched from its minimum to maximum.
pub fn encode_plane8(width: usize, height: usize, values: &[f64]) -> Vec<u8> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let buf = image::GrayImage::from_fn(width as u32, height as u32, |x, y| {
        let v = values[y as usize * width + x as usize];
        image::Luma([(((v - lo) / span) * 255.0).round().clamp(0.0, 255.0) as u8])
    });
    encode(DynamicImage::ImageLuma8(buf))
}

fn encode(img: DynamicImage) -> Vec<u8> {
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, ImageFormat::Png)
        .expect("PNG encoding into memory cannot fail");
    out.into_inner()
}

pub fn write_png16(path: &Path, img: &GrayImage) -> Result<()> {
    std::fs::write(path, encode_png16(img)).map_err(|e| Error::io(path, e))
}

/// Nonzero pixels are inside.
pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    let img = read_image(path)?;
    let bits = img.data().iter().map(|&v| v > 0.0).collect();
    Ok(BinaryMask::from_bits(img.width(), img.height(), bits))
}

pub fn write_mask(path: &Path, mask: &BinaryMask) -> Result<()> {
    let buf = image::GrayImage::from_fn(mask.width() as u32, mask.height() as u32, |x, y| {
        image::Luma([if mask.get(Pixel::new(x as i32, y as i32)) { 255 } else { 0 }])
    });
    let bytes = encode(DynamicImage::ImageLuma8(buf));
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png16_round_trip() {
        let img = GrayImage::from_fn(20, 17, |x, y| ((x * 7 + y * 3) % 23) as f64 / 22.0).unwrap();
        let back = decode_image(&encode_png16(&img)).unwrap();
        assert_eq!((back.width(), back.height()), (20, 17));
        for (a, b) in img.data().iter().zip(back.data()) {
            assert!((a - b).abs() <= 0.5 / 65535.0 + 1e-12);
        }
    }

    #[test]
    fn colour_uses_green() {
        let rgb = image::RgbImage::from_fn(16, 16, |x, _| image::Rgb([255, (x * 10) as u8, 0]));
        let bytes = encode(DynamicImage::ImageRgb8(rgb));
        let g = decode_image(&bytes).unwrap();
        assert_eq!(g.get(5, 3), 50.0 / 255.0);
    }

    #[test]
    fn pgm_is_read() {
        let mut bytes = b"P5\n16 16\n255\n".to_vec();
        bytes.extend((0..256).map(|i| i as u8));
        let g = decode_image(&bytes).unwrap();
        assert_eq!(g.get(3, 2), 35.0 / 255.0);
    }

    #[test]
    fn garbage_is_rejected() {
        assert!(matches!(decode_image(b"not an image"), Err(Error::Image(_))));
    }
}
