//! Concurrence that stays constant under global dephasing while the CHSH
//! violation disappears at a finite time.

use bell_dephasing::correlations::{
    chsh_bell, classify_region, coeffs_at, concurrence_bell, nonlocality_sudden_death_time,
};
use bell_dephasing::state::BellCoeffs;

fn main() -> bell_dephasing::Result<()> {
    let c0 = BellCoeffs::new(1.0, 0.4, -0.4)?;
    println!("region report: {:?}", classify_region(&c0));
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>8} {:>10}",
        "tG", "c1", "c2", "c3", "E", "B"
    );
    for k in 0..=20 {
        let tg = 0.1 * k as f64;
        let c = coeffs_at(&c0, tg);
        println!(
            "{tg:>6.2} {:>10.6} {:>10.6} {:>10.6} {:>8.5} {:>10.6}",
            c.c1(),
            c.c2(),
            c.c3(),
            concurrence_bell(&c),
            chsh_bell(&c)
        );
    }
    let t = nonlocality_sudden_death_time(&c0, 1.0)?.expect("violation dies");
    println!(
        "B reaches 2 at tG = {t:.9} (ln 3 / 2 = {:.9})",
        3f64.ln() / 2.0
    );
    Ok(())
}
