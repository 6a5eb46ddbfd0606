use crate::error::{invalid, Error, Result};

/// Feature map of shape `height x width x channels`, channels innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Template {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(invalid("template dimensions must be positive"));
        }
        if data.len() != height * width * channels {
            return Err(Error::Shape(format!(
                "template holds {} values, expected {height}x{width}x{channels}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("template"));
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize, channels: usize) -> Self {
        Self {
            height,
            width,
            channels,
            data: vec![0.0; height * width * channels],
        }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.height, self.width, self.channels)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    /// Unit-norm copy; the zero template stays zero.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            self.clone()
        } else {
            self.scaled(1.0 / n)
        }
    }
}

/// Sliding dot products of `b` over `a` in valid mode.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCorrelationMap {
    pub height: usize,
    pub width: usize,
    pub values: Vec<f64>,
}

impl CrossCorrelationMap {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Slide `b` over `a`. Equal shapes give a `1 x 1` map holding `<a, b>`.
pub fn cross_correlate(a: &Template, b: &Template) -> Result<CrossCorrelationMap> {
    if a.channels != b.channels {
        return Err(Error::Shape(format!(
            "channel counts differ ({} vs {})",
            a.channels, b.channels
        )));
    }
    if b.height > a.height || b.width > a.width {
        return Err(Error::Shape("sliding template is larger than the search template".into()));
    }
    let (oh, ow) = (a.height - b.height + 1, a.width - b.width + 1);
    let c = a.channels;
    let row_len = b.width * c;
    let mut values = Vec::with_capacity(oh * ow);
    for oy in 0..oh {
        for ox in 0..ow {
            let mut acc = 0.0;
            for y in 0..b.height {
                let a_start = ((oy + y) * a.width + ox) * c;
                let b_start = y * row_len;
                acc += a.data[a_start..a_start + row_len]
                    .iter()
                    .zip(&b.data[b_start..b_start + row_len])
                    .map(|(p, q)| p * q)
                    .sum::<f64>();
            }
            values.push(acc);
        }
    }
    Ok(CrossCorrelationMap {
        height: oh,
        width: ow,
        values,
    })
}

/// `γ · track + (1 − γ) · detection`, elementwise.
pub fn update_template(track: &Template, detection: &Template, gamma: f64) -> Result<Template> {
    if track.shape() != detection.shape() {
        return Err(Error::Shape(format!(
            "template shapes differ ({:?} vs {:?})",
            track.shape(),
            detection.shape()
        )));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(invalid(format!("occlusion fraction {gamma} outside [0, 1]")));
    }
    // The endpoints return an input unchanged rather than a rounded mix.
    if gamma == 0.0 {
        return Ok(detection.clone());
    }
    if gamma == 1.0 {
        return Ok(track.clone());
    }
    let data = track
        .data
        .iter()
        .zip(&detection.data)
        .map(|(t, d)| gamma * t + (1.0 - gamma) * d)
        .collect();
    Ok(Template {
        data,
        ..track.clone()
    })
}
