//! Bloch directions selected by half- and quarter-wave plate angles, and the
//! inverse map from a direction back to plate angles.

use bell_dephasing::experiment::{analyzer_vector, measurement_probabilities, WaveplateSetting};
use bell_dephasing::state::{BellLabel, DensityMatrix};

fn main() {
    for letter in ['H', 'V', 'D', 'A', 'R', 'L'] {
        let w = WaveplateSetting::named(letter).expect("known analyzer");
        let v = analyzer_vector(&w);
        println!(
            "{letter}: hwp {:6.2}, qwp {:6.2} -> ({:+.3}, {:+.3}, {:+.3})",
            w.hwp_deg, w.qwp_deg, v[0], v[1], v[2]
        );
    }
    let target = [0.48, -0.6, 0.64];
    let w = WaveplateSetting::for_direction(&target);
    println!(
        "direction {target:?} needs hwp {:.4}, qwp {:.4} -> {:.6?}",
        w.hwp_deg,
        w.qwp_deg,
        analyzer_vector(&w)
    );
    let rho = DensityMatrix::bell_state(BellLabel::PhiPlus);
    let z = [0.0, 0.0, 1.0];
    let x = [1.0, 0.0, 0.0];
    println!("phi+ in Z/Z: {:?}", measurement_probabilities(&rho, &z, &z));
    println!("phi+ in X/X: {:?}", measurement_probabilities(&rho, &x, &x));
    println!("phi+ in Z/X: {:?}", measurement_probabilities(&rho, &z, &x));
}
