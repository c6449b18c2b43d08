//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! `cargo test -p bell-dephasing --test acceptance`

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bell_dephasing::channels::{
    bell_coeff_flow, global_dephase, relabelled_photonic_channel, stochastic_trajectory_oracle,
    GlobalDephasingParams, PhotonEnvParams,
};
use bell_dephasing::correlations::{
    asymptotic_values, chsh_bell, chsh_max, chsh_optimize_numeric, coeffs_at, concurrence_bell,
    concurrence_general, entanglement_sudden_death_time, nonlocality_sudden_death_time,
    OptimizerConfig,
};
use bell_dephasing::experiment::{
    chsh_angle_scan, optimal_angles, simulate_counts, statistical_error_mc, Plate, TomographyScheme,
};
use bell_dephasing::linalg::{self, C64};
use bell_dephasing::scenario::{self, OutputFormat};
use bell_dephasing::state::{bell_mixture, trace_distance, BellCoeffs, DensityMatrix};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn bc(c1: f64, c2: f64, c3: f64) -> BellCoeffs {
    BellCoeffs::new(c1, c2, c3).expect("valid coefficients")
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn random_bell_diagonal(rng: &mut StdRng) -> BellCoeffs {
    let e: [f64; 4] = std::array::from_fn(|_| -rng.random::<f64>().ln());
    let s: f64 = e.iter().sum();
    let w = e.map(|x| x / s);
    let rest = 1.0 - w[0] - w[1] - w[2];
    bell_mixture(w[0], w[1], w[2], rest).expect("weights sum to one")
}

fn random_density(rng: &mut StdRng) -> DensityMatrix {
    let a: linalg::Mat4 = std::array::from_fn(|_| {
        std::array::from_fn(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
    });
    let m = linalg::matmul(&a, &linalg::adjoint(&a));
    let tr = linalg::trace(&m);
    DensityMatrix::new(linalg::scale(&m, C64::new(1.0 / tr.re, 0.0))).expect("valid state")
}

fn random_local_unitary(rng: &mut StdRng) -> linalg::Mat2 {
    let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
    let (phi, chi): (f64, f64) = (rng.random_range(0.0..6.3), rng.random_range(0.0..6.3));
    let (c, s) = (theta.cos(), theta.sin());
    [
        [C64::from_polar(c, phi), C64::from_polar(s, chi)],
        [-C64::from_polar(s, -chi), C64::from_polar(c, -phi)],
    ]
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (c, target) in [(bc(1.0, 0.4, -0.4), 0.4), (bc(-0.5, -1.0, -0.5), 0.5)] {
        for k in 0..=4000 {
            let e = concurrence_bell(&coeffs_at(&c, 4.0 * k as f64 / 4000.0));
            worst = worst.max((e - target).abs());
        }
        let text = format!(
            "[state]\ncoeffs = {:?}\n[sweep]\nvariable = \"t_gamma\"\nmin = 0.0\nmax = 4.0\nsteps = 401\n",
            c.as_array()
        );
        let table =
            scenario::sweep_table(&scenario::parse_config(&text).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
        for row in &table.rows {
            worst = worst.max((row[4] - target).abs());
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-12 && within(elapsed, Duration::from_secs(1)),
        format!("max |E - E0| = {worst:.1e} over tG in [0, 4], {elapsed:.2?} (< 1 s)"),
    )
}

fn criterion_2() -> Outcome {
    let c = bc(1.0, 0.4, -0.4);
    let t = nonlocality_sudden_death_time(&c, 1.0)
        .map_err(|e| e.to_string())?
        .ok_or("no crossing reported")?;
    let (_, b_inf) = asymptotic_values(&c);
    let dt = (t - 3f64.ln() / 2.0).abs();
    let db = (b_inf - 2.0 * 0.98f64.sqrt()).abs();
    check(
        dt <= 1e-9 && db <= 1e-12,
        format!("tG = {t:.9} (|err| {dt:.1e}), B(inf) = {b_inf:.12} (|err| {db:.1e})"),
    )
}

fn criterion_3() -> Outcome {
    let c = bc(-0.5, -1.0, -0.5);
    let death = nonlocality_sudden_death_time(&c, 1.0).map_err(|e| e.to_string())?;
    // B is non-increasing along the flow, so its infimum is the limit.
    let samples: Vec<f64> = (0..=5000)
        .map(|k| chsh_bell(&coeffs_at(&c, 0.01 * k as f64)))
        .collect();
    let monotone = samples.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    let (_, b_inf) = asymptotic_values(&c);
    let sampled_min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let target = 2.0 * 1.125f64.sqrt();
    let err = (b_inf - target).abs();
    check(
        death.is_none() && monotone && err <= 1e-9 && sampled_min >= target - 1e-12 && (sampled_min - target).abs() <= 1e-9,
        format!("no crossing: {}, inf B = {b_inf:.12} (|err| {err:.1e}), min over tG in [0, 50] = {sampled_min:.12}", death.is_none()),
    )
}

fn criterion_4() -> Outcome {
    let mut worst_t = 0.0f64;
    for gamma in [0.5, 1.0, 2.5] {
        let t = entanglement_sudden_death_time(&bc(0.7, -0.7, 0.5), gamma)
            .map_err(|e| e.to_string())?
            .ok_or("no death time for (0.7, -0.7, 0.5)")?;
        worst_t = worst_t.max((t - (14.0f64 / 5.0).ln() / (2.0 * gamma)).abs());
    }
    let v = bc(1.0, -1.0, 1.0);
    let none = entanglement_sudden_death_time(&v, 1.0)
        .map_err(|e| e.to_string())?
        .is_none();
    let mut worst_e = 0.0f64;
    let mut positive = true;
    for k in 0..=400 {
        let tg = 0.05 * k as f64;
        let e = concurrence_bell(&coeffs_at(&v, tg));
        worst_e = worst_e.max((e - (-2.0 * tg).exp()).abs());
        positive &= e > 0.0;
    }
    check(
        worst_t <= 1e-9 && none && worst_e <= 1e-12 && positive,
        format!("death time |err| {worst_t:.1e}; (1,-1,1): no zero = {none}, max |E - gamma^4| = {worst_e:.1e}"),
    )
}

fn criterion_5a() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(501);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for k in 0..24 {
        let rho = if k % 2 == 0 {
            random_density(&mut rng)
        } else {
            random_bell_diagonal(&mut rng).to_density()
        };
        let tg = [0.05, 0.3, 1.0, 3.0][k % 4];
        let p = GlobalDephasingParams::at_scaled_time(tg).map_err(|e| e.to_string())?;
        let mc = stochastic_trajectory_oracle(&rho, &p, 1_000_000, 1000 + k as u64)
            .map_err(|e| e.to_string())?;
        worst = worst.max(trace_distance(&mc, &global_dephase(&rho, &p)));
        cases += 1;
    }
    let elapsed = start.elapsed();
    check(
        worst <= 5e-3 && within(elapsed, Duration::from_secs(60)),
        format!("{cases} cases at 1e6 trajectories, max trace distance {worst:.1e}, {elapsed:.2?} (< 60 s)"),
    )
}

fn criterion_5b() -> Outcome {
    let mut rng = StdRng::seed_from_u64(502);
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let c = random_bell_diagonal(&mut rng);
        let mut rho = c.to_density();
        if k % 2 == 1 {
            let (u1, u2) = (
                random_local_unitary(&mut rng),
                random_local_unitary(&mut rng),
            );
            rho = bell_dephasing::channels::apply_local_unitary(&rho, &u1, &u2)
                .map_err(|e| e.to_string())?;
        }
        worst = worst.max((concurrence_general(&rho) - concurrence_bell(&c)).abs());
    }
    check(
        worst <= 1e-10,
        format!("1000 states (half locally rotated), max |diff| {worst:.1e}"),
    )
}

fn criterion_5c() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(503);
    let cfg = OptimizerConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let rho = random_bell_diagonal(&mut rng).to_density();
        let opt = chsh_optimize_numeric(&rho, &cfg).map_err(|e| e.to_string())?;
        worst = worst.max((opt.value - chsh_max(&rho)).abs());
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-4 && within(elapsed, Duration::from_secs(120)),
        format!("100 states, max |numeric - 2 sqrt M| {worst:.1e}, {elapsed:.2?} (< 120 s)"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let mut states = vec![bc(1.0, 0.4, -0.4), bc(-0.5, -1.0, -0.5), bc(0.7, -0.7, 0.5)];
    states.extend((0..7).map(|_| random_bell_diagonal(&mut rng)));
    let mut worst = 0.0f64;
    for (c11, delta_n, omega0) in [(1.0, 1.0, 0.0), (0.37, 2.0, 5.0), (2.5, 0.4, -1.3)] {
        for c in &states {
            let rho = c.to_density();
            for k in 0..50 {
                let t = 2.0 * k as f64 / 49.0;
                let p = PhotonEnvParams::new(omega0, c11, -1.0, delta_n, t, t)
                    .map_err(|e| e.to_string())?;
                let out = relabelled_photonic_channel(&rho, &p, true);
                let g4 = (-2.0 * c11 * delta_n * delta_n * t * t).exp();
                let flow = bell_coeff_flow(c, g4).to_density();
                worst = worst.max(linalg::max_abs_diff(out.entries(), flow.entries()));
            }
        }
    }
    check(
        worst <= 1e-12,
        format!(
            "{} states x 3 parameter sets x 50 points, max |diff| {worst:.1e}",
            states.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    let cases = [
        (bc(1.0, 0.4, -0.4), 50_000.0, (0.003, 0.012), (0.004, 0.016)),
        (
            bc(-0.5, -1.0, -0.5),
            100_000.0,
            (0.002, 0.008),
            (0.003, 0.012),
        ),
    ];
    for (i, (c, n, band_e, band_b)) in cases.iter().enumerate() {
        let rho = c.to_density();
        let at_n = statistical_error_mc(&rho, TomographyScheme::Mub36, *n, 500, 70 + i as u64)
            .map_err(|e| e.to_string())?;
        let at_4n =
            statistical_error_mc(&rho, TomographyScheme::Mub36, 4.0 * n, 500, 80 + i as u64)
                .map_err(|e| e.to_string())?;
        let (se, sb) = (at_n.sigma_concurrence, at_n.sigma_chsh);
        let in_band = band_e.0 <= se && se <= band_e.1 && band_b.0 <= sb && sb <= band_b.1;
        let ratio_e = at_4n.sigma_concurrence / (se / 2.0);
        let ratio_b = at_4n.sigma_chsh / (sb / 2.0);
        let scaling = (ratio_e - 1.0).abs() <= 0.2 && (ratio_b - 1.0).abs() <= 0.2;
        ok &= in_band && scaling;
        lines.push(format!(
            "{:?} N={n}: sigma_E {se:.4} in {band_e:?}, sigma_B {sb:.4} in {band_b:?}; 4N ratios {ratio_e:.3}/{ratio_b:.3}",
            c.as_array()
        ));
    }
    let elapsed = start.elapsed();
    ok &= within(elapsed, Duration::from_secs(300));
    check(ok, format!("{}; {elapsed:.2?} (< 5 min)", lines.join("; ")))
}

fn criterion_8() -> Outcome {
    let rho = bc(1.0, 0.4, -0.4).to_density();
    let center = optimal_angles(&rho, &OptimizerConfig::default()).map_err(|e| e.to_string())?;
    let deltas: Vec<f64> = (-180..=180).map(|k| 0.5 * k as f64).collect();
    let target = 2.0 * 1.16f64.sqrt();
    let mut worst_peak = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    for plate in Plate::ALL {
        let curve = chsh_angle_scan(&rho, &center, plate, &deltas);
        let peak = curve[180].1;
        worst_peak = worst_peak.max((peak - target).abs());
        for (_, v) in &curve {
            worst_excess = worst_excess.max(v - peak);
        }
    }
    check(
        worst_peak <= 1e-4 && worst_excess <= 1e-6,
        format!("8 plates x 361 offsets: max |peak - 2 sqrt 1.16| {worst_peak:.1e}, max excess over peak {worst_excess:.1e}"),
    )
}

fn fingerprint(threads: usize) -> Result<Vec<u8>, String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| e.to_string())?;
    pool.install(|| {
        let mut out = Vec::new();
        let rho = bc(1.0, 0.4, -0.4).to_density();
        let p = GlobalDephasingParams::at_scaled_time(0.7).map_err(|e| e.to_string())?;
        let mc = stochastic_trajectory_oracle(&rho, &p, 300_000, 9).map_err(|e| e.to_string())?;
        out.extend(serde_json::to_vec(&mc).map_err(|e| e.to_string())?);
        for z in mc.entries().iter().flatten() {
            out.extend(z.re.to_bits().to_le_bytes());
            out.extend(z.im.to_bits().to_le_bytes());
        }
        let recs = simulate_counts(&rho, &TomographyScheme::Mub36.settings(), 50_000.0, 150.0, 9).map_err(|e| e.to_string())?;
        out.extend(recs.iter().flat_map(|r| r.counts.to_le_bytes()));
        let est = statistical_error_mc(&rho, TomographyScheme::Mub36, 50_000.0, 200, 9).map_err(|e| e.to_string())?;
        out.extend(format!("{:?}", est).bytes());
        let text = "seed = 9\n[state]\ncoeffs = [-0.5, -1.0, -0.5]\n[tomography]\ntotal_coincidences = 1e5\nrepetitions = 150\n[sweep]\nvariable = \"t_gamma\"\nmin = 0.0\nmax = 4.0\nsteps = 101\n";
        let s = scenario::parse_config(text).map_err(|e| e.to_string())?;
        for run in [scenario::run_tomo_sim, scenario::run_sweep] {
            for f in [OutputFormat::Csv, OutputFormat::Json] {
                for a in run(&s, f).map_err(|e| e.to_string())? {
                    out.extend(a.file_name.bytes());
                    out.extend(a.contents.bytes());
                }
            }
        }
        Ok(out)
    })
}

fn criterion_9() -> Outcome {
    let reference = fingerprint(1)?;
    let mut same = true;
    for threads in [2, 4, 8] {
        same &= fingerprint(threads)? == reference;
    }
    same &= fingerprint(4)? == fingerprint(4)?;
    check(same, format!("trajectories, counts, error MC and CLI artifacts ({} bytes) identical across 1/2/4/8 threads", reference.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1 frozen entanglement", criterion_1),
        ("2 non-locality sudden death", criterion_2),
        ("3 non-locality trapping", criterion_3),
        (
            "4 entanglement sudden death vs asymptotic decay",
            criterion_4,
        ),
        ("5a trajectory oracle vs closed form", criterion_5a),
        ("5b spin-flip vs closed-form concurrence", criterion_5b),
        ("5c numeric CHSH vs Horodecki", criterion_5c),
        (
            "6 anticorrelated photonic channel vs global flow",
            criterion_6,
        ),
        ("7 photon-statistics errors", criterion_7),
        ("8 angle scan peak", criterion_8),
        ("9 determinism", criterion_9),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS [{name}] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{name}] {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
