//! Raster frames and fixed-size crops.

use std::path::Path;

use crate::error::{invalid, Error, Result};

/// Side length every crop is resized to before encoding.
pub const CROP_SIZE: usize = 127;

/// A `127 x 127` crop with 1 or 3 interleaved channels, values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageCrop {
    channels: usize,
    data: Vec<f32>,
}

impl ImageCrop {
    pub fn new(channels: usize, data: Vec<f32>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(invalid(format!("crops need 1 or 3 channels, got {channels}")));
        }
        if data.len() != CROP_SIZE * CROP_SIZE * channels {
            return Err(Error::Shape(format!(
                "crop holds {} values, expected {CROP_SIZE}x{CROP_SIZE}x{channels}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("crop"));
        }
        Ok(Self { channels, data })
    }

    pub fn filled(channels: usize, value: f32) -> Result<Self> {
        Self::new(channels, vec![value; CROP_SIZE * CROP_SIZE * channels])
    }

    /// Build a crop by evaluating `f(x, y, channel)` at every pixel.
    pub fn from_fn(channels: usize, mut f: impl FnMut(usize, usize, usize) -> f32) -> Result<Self> {
        let mut data = Vec::with_capacity(CROP_SIZE * CROP_SIZE * channels);
        for y in 0..CROP_SIZE {
            for x in 0..CROP_SIZE {
                for c in 0..channels {
                    data.push(f(x, y, c));
                }
            }
        }
        Self::new(channels, data)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f32 {
        self.data[(y * CROP_SIZE + x) * self.channels + c]
    }
}

/// Full image frame, row-major with interleaved channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f32>,
}

impl Frame {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(invalid("frame must be non-empty"));
        }
        if channels != 1 && channels != 3 {
            return Err(invalid(format!("frames need 1 or 3 channels, got {channels}")));
        }
        if data.len() != width * height * channels {
            return Err(Error::Shape(format!(
                "frame holds {} values, expected {width}x{height}x{channels}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Decode a PNG or PPM/PGM file.
    pub fn load(path: &Path) -> Result<Self> {
        let img = image::open(path)?;
        let color = img.color();
        if color.has_color() {
            let rgb = img.to_rgb8();
            let (w, h) = rgb.dimensions();
            let data = rgb.into_raw().into_iter().map(|v| v as f32 / 255.0).collect();
            Self::new(w as usize, h as usize, 3, data)
        } else {
            let g = img.to_luma8();
            let (w, h) = g.dimensions();
            let data = g.into_raw().into_iter().map(|v| v as f32 / 255.0).collect();
            Self::new(w as usize, h as usize, 1, data)
        }
    }

    /// Write as 8-bit PNG (the extension decides the container).
    pub fn save(&self, path: &Path) -> Result<()> {
        let bytes: Vec<u8> = self.data.iter().map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8).collect();
        let (w, h) = (self.width as u32, self.height as u32);
        if self.channels == 3 {
            image::RgbImage::from_raw(w, h, bytes)
                .expect("buffer sized by constructor")
                .save(path)?;
        } else {
            image::GrayImage::from_raw(w, h, bytes)
                .expect("buffer sized by constructor")
                .save(path)?;
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    #[inline]
    fn at(&self, x: usize, y: usize, c: usize) -> f32 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    /// Resample the pixel rectangle `(left, top, width, height)` to a crop.
    pub fn crop(&self, left: f64, top: f64, width: f64, height: f64) -> Result<ImageCrop> {
        let rect = CropRect::new(self.width, self.height, left, top, width, height)?;
        rect.resample(self.channels, |x, y, c| self.at(x, y, c))
    }
}

/// A crop rectangle on a `width x height` pixel grid, sampled bilinearly at
/// the centres of a `CROP_SIZE x CROP_SIZE` lattice and clamped at the border.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CropRect {
    width: usize,
    height: usize,
    left: f64,
    top: f64,
    sx: f64,
    sy: f64,
}

impl CropRect {
    pub(crate) fn new(width: usize, height: usize, left: f64, top: f64, w: f64, h: f64) -> Result<Self> {
        if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite() && left.is_finite() && top.is_finite()) {
            return Err(invalid("crop rectangle must be finite with positive size"));
        }
        if width == 0 || height == 0 {
            return Err(invalid("cannot crop an empty image"));
        }
        Ok(Self {
            width,
            height,
            left,
            top,
            sx: w / CROP_SIZE as f64,
            sy: h / CROP_SIZE as f64,
        })
    }

    fn grid_x(&self, i: usize) -> f64 {
        (self.left + (i as f64 + 0.5) * self.sx - 0.5).clamp(0.0, (self.width - 1) as f64)
    }

    fn grid_y(&self, i: usize) -> f64 {
        (self.top + (i as f64 + 0.5) * self.sy - 0.5).clamp(0.0, (self.height - 1) as f64)
    }

    /// Inclusive pixel ranges `(x0, x1, y0, y1)` read by [`CropRect::resample`].
    pub(crate) fn footprint(&self) -> (usize, usize, usize, usize) {
        let last = CROP_SIZE - 1;
        let x0 = self.grid_x(0).floor() as usize;
        let x1 = (self.grid_x(last).floor() as usize + 1).min(self.width - 1);
        let y0 = self.grid_y(0).floor() as usize;
        let y1 = (self.grid_y(last).floor() as usize + 1).min(self.height - 1);
        (x0, x1, y0, y1)
    }

    pub(crate) fn resample(&self, channels: usize, fetch: impl Fn(usize, usize, usize) -> f32) -> Result<ImageCrop> {
        let xs: Vec<(usize, usize, f32)> = (0..CROP_SIZE).map(|i| self.taps(self.grid_x(i), self.width)).collect();
        let ys: Vec<(usize, usize, f32)> = (0..CROP_SIZE).map(|i| self.taps(self.grid_y(i), self.height)).collect();
        ImageCrop::from_fn(channels, |x, y, c| {
            let (x0, x1, tx) = xs[x];
            let (y0, y1, ty) = ys[y];
            let top = fetch(x0, y0, c) * (1.0 - tx) + fetch(x1, y0, c) * tx;
            let bottom = fetch(x0, y1, c) * (1.0 - tx) + fetch(x1, y1, c) * tx;
            top * (1.0 - ty) + bottom * ty
        })
    }

    fn taps(&self, f: f64, n: usize) -> (usize, usize, f32) {
        let i0 = f.floor() as usize;
        (i0, (i0 + 1).min(n - 1), (f - i0 as f64) as f32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crop_shape_is_validated() {
        assert!(ImageCrop::new(3, vec![0.0; 10]).is_err());
        assert!(ImageCrop::new(2, vec![0.0; CROP_SIZE * CROP_SIZE * 2]).is_err());
        assert!(ImageCrop::filled(1, 0.5).is_ok());
    }

    #[test]
    fn constant_frame_gives_constant_crop() {
        let f = Frame::new(40, 30, 3, vec![0.25; 40 * 30 * 3]).unwrap();
        let c = f.crop(3.0, 4.0, 20.0, 10.0).unwrap();
        assert!(c.data().iter().all(|&v| (v - 0.25).abs() < 1e-6));
    }

    #[test]
    fn bilinear_preserves_linear_ramp() {
        let (w, h) = (200, 10);
        let data = (0..h).flat_map(|_| (0..w).map(|x| x as f32 / w as f32)).collect();
        let f = Frame::new(w, h, 1, data).unwrap();
        let c = f.crop(50.0, 0.0, 100.0, 10.0).unwrap();
        for x in 0..CROP_SIZE {
            let px = 50.0 + (x as f64 + 0.5) * 100.0 / CROP_SIZE as f64 - 0.5;
            assert!((c.get(x, 5, 0) as f64 - px / w as f64).abs() < 1e-5);
        }
    }

    #[test]
    fn png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.png");
        let data = (0..12 * 8 * 3).map(|i| (i % 256) as f32 / 255.0).collect();
        let f = Frame::new(12, 8, 3, data).unwrap();
        f.save(&path).unwrap();
        let back = Frame::load(&path).unwrap();
        assert_eq!(back.width(), 12);
        for (a, b) in f.data().iter().zip(back.data()) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}
