//! Concurrence of arbitrary two-qubit states via the spin-flip construction,
//! checked against the closed form on Bell-diagonal states.

use bell_dephasing::correlations::{concurrence_bell, concurrence_general};
use bell_dephasing::state::{BellCoeffs, DensityMatrix};
use num_complex::Complex64 as C;

fn main() -> bell_dephasing::Result<()> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let phi = DensityMatrix::pure([
        C::new(s, 0.0),
        C::new(0.0, 0.0),
        C::new(0.0, 0.0),
        C::new(0.0, s),
    ])?;
    let (a, b) = (0.3f64.cos(), 0.3f64.sin());
    let partial = DensityMatrix::pure([
        C::new(a, 0.0),
        C::new(0.0, 0.0),
        C::new(0.0, 0.0),
        C::new(b, 0.0),
    ])?;
    println!("phi+            : {:.12}", concurrence_general(&phi));
    println!(
        "cos|HH>+sin|VV> : {:.12} (sin 0.6 = {:.12})",
        concurrence_general(&partial),
        0.6f64.sin()
    );
    println!(
        "product |HV>    : {:.12}",
        concurrence_general(&DensityMatrix::basis_state(1))
    );
    for c in [[1.0, 0.4, -0.4], [-0.5, -1.0, -0.5], [0.3, 0.3, 0.3]] {
        let c = BellCoeffs::from_array(c)?;
        println!(
            "{:?}: spin-flip {:.12}, closed form {:.12}",
            c.as_array(),
            concurrence_general(&c.to_density()),
            concurrence_bell(&c)
        );
    }
    Ok(())
}
