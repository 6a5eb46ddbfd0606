//! Encode crops into HOG templates, correlate them and blend a track
//! template with a new observation.

use siamtrack::appearance::{
    cross_correlate, pair_cost, update_template, AppearanceParams, HogEncoder, ImageCrop, TemplateEncoder,
};

fn stripes(period: usize, phase: usize) -> siamtrack::Result<ImageCrop> {
    ImageCrop::from_fn(3, |x, y, c| {
        let on = ((x + phase) / period) % 2 == 0;
        let base = if on { 0.8 } else { 0.2 };
        base * (1.0 - 0.2 * c as f32) + 0.1 * (y as f32 / 127.0)
    })
}

fn main() -> siamtrack::Result<()> {
    let encoder = HogEncoder::default();
    let params = AppearanceParams::default();
    let a = encoder.encode(&stripes(12, 0)?)?;
    let a_shifted = encoder.encode(&stripes(12, 3)?)?;
    let b = encoder.encode(&stripes(5, 0)?)?;
    println!("template shape {:?}", a.shape());

    let map = cross_correlate(&a.normalized(), &a_shifted.normalized())?;
    println!("correlation map {}x{}, peak {:.3}", map.height, map.width, map.peak());
    println!("cost(self)         = {:.3}", pair_cost(&a, &a, &params)?);
    println!("cost(shifted copy) = {:.3}", pair_cost(&a, &a_shifted, &params)?);
    println!("cost(other object) = {:.3}", pair_cost(&a, &b, &params)?);

    // A heavily occluded observation (gamma near 1) barely moves the template.
    for gamma in [0.0, 0.5, 0.9] {
        let t = update_template(&a, &b, gamma)?;
        println!("gamma {gamma}: cost vs original {:.3}", pair_cost(&a, &t, &params)?);
    }
    Ok(())
}
