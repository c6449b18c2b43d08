//! Numerical maximization of the CHSH expectation over measurement
//! directions, compared with the Horodecki bound.

use bell_dephasing::correlations::{chsh_max, chsh_optimize_numeric, horodecki_m, OptimizerConfig};
use bell_dephasing::state::{BellCoeffs, DensityMatrix};
use num_complex::Complex64 as C;

fn main() -> bell_dephasing::Result<()> {
    let cfg = OptimizerConfig::default();
    let (a, b) = (0.4f64.cos(), 0.4f64.sin());
    let tilted = DensityMatrix::pure([
        C::new(a, 0.0),
        C::new(0.0, 0.0),
        C::new(0.0, 0.0),
        C::new(0.0, b),
    ])?;
    let states = [
        ("psi+ region", BellCoeffs::new(1.0, 0.4, -0.4)?.to_density()),
        ("trapped", BellCoeffs::new(-0.5, -1.0, -0.5)?.to_density()),
        ("tilted pure", tilted),
    ];
    for (name, rho) in &states {
        let opt = chsh_optimize_numeric(rho, &cfg)?;
        println!(
            "{name}: M = {:.9}, 2 sqrt(M) = {:.9}, numeric = {:.9}",
            horodecki_m(rho),
            chsh_max(rho),
            opt.value
        );
        let s = &opt.setting;
        println!(
            "  a = {:.4?}\n  a' = {:.4?}\n  b = {:.4?}\n  b' = {:.4?}",
            s.a, s.a_prime, s.b, s.b_prime
        );
    }
    Ok(())
}
