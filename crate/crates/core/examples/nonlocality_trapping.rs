//! A CHSH violation that decays but stays above the classical bound forever.

use bell_dephasing::correlations::{
    asymptotic_values, chsh_bell, coeffs_at, concurrence_bell, nonlocality_sudden_death_time,
};
use bell_dephasing::state::BellCoeffs;

fn main() -> bell_dephasing::Result<()> {
    for c0 in [
        BellCoeffs::new(-0.5, -1.0, -0.5)?,
        BellCoeffs::new(1.0, 0.4, -0.4)?,
    ] {
        let (e_inf, b_inf) = asymptotic_values(&c0);
        let death = nonlocality_sudden_death_time(&c0, 1.0)?;
        println!("initial {:?}", c0.as_array());
        println!(
            "  B(0) = {:.6}, B(inf) = {b_inf:.9}, E(inf) = {e_inf:.3}",
            chsh_bell(&c0)
        );
        match death {
            Some(t) => println!("  non-locality dies at tG = {t:.9}"),
            None => println!("  trapped: B never reaches 2"),
        }
        let b_min = (0..=400)
            .map(|k| chsh_bell(&coeffs_at(&c0, 0.01 * k as f64)))
            .fold(f64::INFINITY, f64::min);
        println!(
            "  min B over tG in [0, 4] = {b_min:.9}, E(4) = {:.3}",
            concurrence_bell(&coeffs_at(&c0, 4.0))
        );
    }
    println!("2 sqrt(1.125) = {:.9}", 2.0 * 1.125f64.sqrt());
    Ok(())
}
