//! Averages random phase kicks over many trajectories and compares the
//! result with the closed-form dephasing channel.

use std::time::Instant;

use bell_dephasing::channels::{
    global_dephase, stochastic_trajectory_oracle, GlobalDephasingParams,
};
use bell_dephasing::state::{trace_distance, BellCoeffs, DensityMatrix};

fn main() -> bell_dephasing::Result<()> {
    let psi = [0.5, 0.5, 0.5, 0.5].map(|x| num_complex::Complex64::new(x, 0.0));
    let states = [
        ("|++>", DensityMatrix::pure(psi)?),
        (
            "bell-diagonal",
            BellCoeffs::new(1.0, 0.4, -0.4)?.to_density(),
        ),
    ];
    for (name, rho) in &states {
        for tg in [0.1, 0.5, 2.0] {
            let p = GlobalDephasingParams::at_scaled_time(tg)?;
            let start = Instant::now();
            let mc = stochastic_trajectory_oracle(rho, &p, 1_000_000, 12345)?;
            let exact = global_dephase(rho, &p);
            println!(
                "{name:>14} tG = {tg:<4} trace distance = {:.2e} ({:.2?})",
                trace_distance(&mc, &exact),
                start.elapsed()
            );
        }
    }
    Ok(())
}
