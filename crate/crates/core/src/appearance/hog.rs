//! Gradient-orientation histogram encoder.
//!
//! Each channel of the crop gets its own histogram cube, so a 3-channel crop
//! yields `3 * bins` feature channels per cell. Orientation is unsigned
//! (0 to 180 degrees) and votes are weighted by gradient magnitude. There is
//! no bias term: a constant crop encodes to the zero template.

use crate::error::{Error, Result};

use super::image::{ImageCrop, CROP_SIZE};
use super::template::Template;
use super::TemplateEncoder;

#[derive(Debug, Clone, PartialEq)]
pub struct HogEncoder {
    cell: usize,
    bins: usize,
    /// Unit vectors on the bin boundaries `k * π / bins`, `k = 1..bins`.
    boundaries: Vec<(f64, f64)>,
}

impl Default for HogEncoder {
    fn default() -> Self {
        Self::new(8, 9).expect("default encoder parameters are valid")
    }
}

impl HogEncoder {
    pub fn new(cell: usize, bins: usize) -> Result<Self> {
        if cell == 0 || cell > CROP_SIZE || bins == 0 {
            return Err(crate::error::invalid("cell size and bin count must be positive"));
        }
        let boundaries = (1..bins)
            .map(|k| {
                let a = k as f64 * std::f64::consts::PI / bins as f64;
                (a.cos(), a.sin())
            })
            .collect();
        Ok(Self { cell, bins, boundaries })
    }

    pub fn grid(&self) -> usize {
        CROP_SIZE.div_ceil(self.cell)
    }

    /// Orientation bin of the gradient `(gx, gy)` folded into `[0, π)`.
    ///
    /// With both vectors in the upper half plane, the angle of `g` is at
    /// least the boundary angle exactly when their cross product is
    /// non-negative, so counting such boundaries yields the bin.
    #[inline]
    fn bin(&self, mut gx: f64, mut gy: f64) -> usize {
        if gy < 0.0 || (gy == 0.0 && gx < 0.0) {
            gx = -gx;
            gy = -gy;
        }
        self.boundaries
            .iter()
            .take_while(|(c, s)| c * gy - s * gx >= 0.0)
            .count()
    }
}

impl TemplateEncoder for HogEncoder {
    fn output_shape(&self, crop_channels: usize) -> (usize, usize, usize) {
        (self.grid(), self.grid(), crop_channels * self.bins)
    }

    fn encode(&self, crop: &ImageCrop) -> Result<Template> {
        let ch = crop.channels();
        let (gh, gw, fc) = self.output_shape(ch);
        let mut data = vec![0.0; gh * gw * fc];
        let n = CROP_SIZE;
        let px = crop.data();
        let idx = |x: usize, y: usize, c: usize| (y * n + x) * ch + c;
        for y in 0..n {
            let (ym, yp) = (y.saturating_sub(1), (y + 1).min(n - 1));
            let cy = y / self.cell;
            for x in 0..n {
                let (xm, xp) = (x.saturating_sub(1), (x + 1).min(n - 1));
                let cell_base = ((cy * gw) + x / self.cell) * fc;
                for c in 0..ch {
                    let gx = (px[idx(xp, y, c)] - px[idx(xm, y, c)]) as f64;
                    let gy = (px[idx(x, yp, c)] - px[idx(x, ym, c)]) as f64;
                    if gx == 0.0 && gy == 0.0 {
                        continue;
                    }
                    let mag = (gx * gx + gy * gy).sqrt();
                    data[cell_base + c * self.bins + self.bin(gx, gy)] += mag;
                }
            }
        }
        Template::new(gh, gw, fc, data).map_err(|e| match e {
            Error::NonFinite(_) => Error::NonFinite("encoded template"),
            other => other,
        })
    }
}
