//! Write a simulated dataset to disk, reload it and check its digest.

use siamtrack::eval::{dataset_digest, load_dataset, occlusion_scenario, write_dataset};

fn main() -> siamtrack::Result<()> {
    let dir = std::env::temp_dir().join("siamtrack-dataset");
    let scenario = occlusion_scenario(7, 60, 10)?;
    let manifest = write_dataset(&dir, &scenario, 7, false)?;
    println!("wrote {} ({} frames), digest {}", dir.display(), manifest.frames, manifest.digest);

    let ds = load_dataset(&dir)?;
    println!(
        "reloaded {} detections and {} ground-truth rows",
        ds.detections.len(),
        ds.ground_truth.len()
    );
    println!("digest matches: {}", dataset_digest(&dir)? == manifest.digest);

    let crops = ds.crop_source()?;
    let first = &ds.detections[0];
    let crop = crops.crop(first.frame, &first.bbox)?;
    println!("crop of the first detection has {} values", crop.data().len());
    Ok(())
}
