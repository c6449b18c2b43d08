//! CHSH value as each of the eight waveplates is rotated alone away from
//! the optimal measurement.

use bell_dephasing::correlations::{chsh_max, OptimizerConfig};
use bell_dephasing::experiment::{chsh_angle_scan, optimal_angles, Plate};
use bell_dephasing::state::BellCoeffs;

fn main() -> bell_dephasing::Result<()> {
    let rho = BellCoeffs::new(1.0, 0.4, -0.4)?.to_density();
    let center = optimal_angles(&rho, &OptimizerConfig::default())?;
    for (name, w) in ["a", "a'", "b", "b'"].iter().zip(center.0) {
        println!(
            "{name:>2}: hwp {:8.3} deg, qwp {:8.3} deg",
            w.hwp_deg, w.qwp_deg
        );
    }
    println!("chsh_max = {:.6}", chsh_max(&rho));
    let deltas: Vec<f64> = (-6..=6).map(|k| 5.0 * k as f64).collect();
    print!("{:>6}", "delta");
    for p in Plate::ALL {
        print!(" {:>7}", p.to_string());
    }
    println!();
    let curves: Vec<_> = Plate::ALL
        .iter()
        .map(|&p| chsh_angle_scan(&rho, &center, p, &deltas))
        .collect();
    for (k, d) in deltas.iter().enumerate() {
        print!("{d:>6}");
        for c in &curves {
            print!(" {:>7.4}", c[k].1);
        }
        println!();
    }
    Ok(())
}
