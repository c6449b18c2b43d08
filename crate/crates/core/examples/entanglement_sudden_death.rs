//! Finite-time loss of entanglement versus asymptotic decay.

use bell_dephasing::correlations::{
    classify_region, coeffs_at, concurrence_bell, entanglement_sudden_death_time,
};
use bell_dephasing::state::BellCoeffs;

fn main() -> bell_dephasing::Result<()> {
    let gamma = 2.0;
    for c0 in [
        BellCoeffs::new(0.7, -0.7, 0.5)?,
        BellCoeffs::new(1.0, -1.0, 1.0)?,
    ] {
        let report = classify_region(&c0);
        println!("{:?}: {:?}", c0.as_array(), report.entanglement_fate);
        match entanglement_sudden_death_time(&c0, gamma)? {
            Some(t) => println!(
                "  E = 0 at t = {t:.10} (ln(14/5) / (2 Gamma) = {:.10})",
                (14.0f64 / 5.0).ln() / (2.0 * gamma)
            ),
            None => {
                for tg in [0.5, 1.0, 2.0, 5.0] {
                    let e = concurrence_bell(&coeffs_at(&c0, tg));
                    println!(
                        "  tG = {tg}: E = {e:.6e}, gamma^4 = {:.6e}",
                        (-2.0 * tg).exp()
                    );
                }
            }
        }
    }
    Ok(())
}
