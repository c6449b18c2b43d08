//! Classifies points of the Bell-diagonal tetrahedron by dominant Bell state
//! and by what global dephasing does to their entanglement.

use bell_dephasing::correlations::{asymptotic_values, classify_region};
use bell_dephasing::state::BellCoeffs;

fn main() {
    let points = [
        [0.0, 0.0, 0.0],
        [1.0, 0.4, -0.4],
        [-0.5, -1.0, -0.5],
        [0.7, -0.7, 0.5],
        [1.0, -1.0, 1.0],
        [0.2, 0.2, -0.9],
        [-0.8, -0.8, -0.8],
        [0.3, 0.3, 0.3],
    ];
    println!(
        "{:<22} {:<10} {:<6} {:<17} {:>6} {:>8}",
        "c", "region", "frozen", "fate", "E_inf", "B_inf"
    );
    for c in points {
        let bc = BellCoeffs::from_array(c).expect("inside the tetrahedron");
        let r = classify_region(&bc);
        let (e, b) = asymptotic_values(&bc);
        println!(
            "{:<22} {:<10} {:<6} {:<17} {e:>6.3} {b:>8.4}",
            format!("{c:?}"),
            format!("{:?}", r.region),
            r.time_invariant_entanglement,
            format!("{:?}", r.entanglement_fate)
        );
    }
}
