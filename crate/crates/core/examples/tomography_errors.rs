//! Simulated photon-counting tomography: one reconstruction, then the
//! Monte-Carlo spread of concurrence and CHSH value at the count levels of
//! the experiment.

use bell_dephasing::correlations::{chsh_max, concurrence_general};
use bell_dephasing::experiment::{
    simulate_counts, statistical_error_mc, tomography_reconstruct, write_counts_csv,
    TomographyScheme,
};
use bell_dephasing::state::{trace_distance, BellCoeffs};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rho = BellCoeffs::new(1.0, 0.4, -0.4)?.to_density();
    let settings = TomographyScheme::Mub36.settings();
    let records = simulate_counts(&rho, &settings, 50_000.0, 150.0, 7)?;
    let mut head = Vec::new();
    write_counts_csv(&records[..4], &mut head)?;
    print!("{}", String::from_utf8(head)?);
    let est = tomography_reconstruct(&records)?;
    println!(
        "one run: E = {:.4}, B = {:.4}, trace distance = {:.4}",
        concurrence_general(&est),
        chsh_max(&est),
        trace_distance(&est, &rho)
    );

    for (c, n) in [
        ([1.0, 0.4, -0.4], 50_000.0),
        ([-0.5, -1.0, -0.5], 100_000.0),
    ] {
        let rho = BellCoeffs::from_array(c)?.to_density();
        for total in [n, 4.0 * n] {
            let e = statistical_error_mc(&rho, TomographyScheme::Mub36, total, 500, 99)?;
            println!(
                "{c:?} N = {total}: sigma_E = {:.4}, sigma_B = {:.4}, mean trace distance = {:.4}",
                e.sigma_concurrence, e.sigma_chsh, e.mean_trace_distance
            );
        }
    }
    Ok(())
}
