//! Read and write MOT16-style files and KITTI tracking labels.

use std::path::Path;

use siamtrack::eval::{format_ground_truth, format_tracks, parse_kitti_str, parse_mot_str, score, TrackRecord};

const GT: &str = "\
1,1,100,200,40,90,1,1,1.0
2,1,104,200,40,90,1,1,1.0
1,2,300,210,38,88,1,1,0.7
2,2,296,210,38,88,1,1,0.6
";

const KITTI: &str = "\
0 0 Car 0 0 -1.57 100 150 200 220 1.5 1.6 3.9 2.0 1.6 18.0 0.0
0 -1 DontCare -1 -1 -10 400 160 420 180 -1 -1 -1 -1000 -1000 -1000 -10
1 0 Car 0 1 -1.57 104 150 204 220 1.5 1.6 3.9 2.1 1.6 17.8 0.0
";

fn main() -> siamtrack::Result<()> {
    let data = parse_mot_str(GT, Path::new("gt.txt"))?;
    println!("{} ground-truth rows", data.ground_truth.len());

    // Hypotheses that swap the two ids in frame 2.
    let hyp: Vec<TrackRecord> = data
        .ground_truth
        .iter()
        .map(|g| TrackRecord {
            frame: g.frame,
            id: if g.frame == 2 { 3 - g.track_id } else { g.track_id },
            bbox: g.bbox,
            confidence: 1.0,
            class_label: g.class_label.clone(),
        })
        .collect();
    let m = score(&data.ground_truth, &hyp, 0.5)?;
    println!("MOTA {:.3} with {} id switches", m.mota, m.id_switches);
    print!("{}", format_tracks(&hyp)?);

    let kitti = parse_kitti_str(KITTI, Path::new("0000.txt"))?;
    let gt: Vec<_> = kitti.iter().map(|r| r.to_ground_truth()).collect();
    println!("{} KITTI rows kept (DontCare skipped), as MOT ground truth:", kitti.len());
    print!("{}", format_ground_truth(&gt)?);
    Ok(())
}
