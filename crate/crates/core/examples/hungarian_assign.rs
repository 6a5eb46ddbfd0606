//! Minimum-cost assignment on a rectangular cost matrix.

use siamtrack::association::{assignment_cost, hungarian, hungarian_solve, CostMatrix};

fn main() -> siamtrack::Result<()> {
    // Rows are detections, columns tracks.
    let costs = vec![
        0.9, 0.1, 0.8, //
        0.2, 0.7, 0.6, //
        0.5, 0.4, 0.3, //
        0.8, 0.9, 0.7,
    ];
    let m = CostMatrix::from_vec(4, 3, costs)?;
    let pairs = hungarian(&m)?;
    println!("assignment {pairs:?}, total cost {:.2}", assignment_cost(&m, &pairs));

    // Pairs at or above the gate cost are dropped after solving.
    let gated = hungarian_solve(&m, 0.25)?;
    println!("with gate 0.25: {gated:?}");
    Ok(())
}
