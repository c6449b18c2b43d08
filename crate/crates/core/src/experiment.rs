//! Simulated photonic measurement pipeline.
//!
//! Each analyzer is a half-wave plate and a quarter-wave plate in front of a
//! polarizer that transmits `H`. With Jones matrices `U_HWP(h)` and
//! `U_QWP(q)` (fast axis measured from horizontal), the analyzer projects
//! onto `U_HWP(h)^dagger U_QWP(q)^dagger |H>`. Its Bloch vector is
//!
//! ```text
//! v(h, q) = (cos 2q sin(4h - 2q), -sin 2q, cos 2q cos(4h - 2q))
//! ```
//!
//! in the convention `z = H/V`, `x = D/A`, `y = R/L` with `|R> = (|H> + i|V>)/sqrt2`.
//!
//! A count record holds the coincidences of one analyzer pair. Expected
//! counts are `p * N_setting` with `N_setting = 4 N / (number of records)`,
//! so that the expected grand total is `N` whenever the records group into
//! complete product bases.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{half_wave_plate, quarter_wave_plate};
use crate::correlations::{
    chsh_expectation, chsh_max, chsh_optimize_numeric, concurrence_general, BlochVector,
    MeasurementSetting, OptimizerConfig,
};
use crate::error::{Error, Result};
use crate::linalg::{self, C64, ONE, PAULI, ZERO};
use crate::rng::{derive_seed, CounterRng};
use crate::state::{from_pauli_coordinates, trace_distance, DensityMatrix};

/// Fast-axis angles of one arm's analyzer, in degrees, reduced mod 180.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveplateSetting {
    pub hwp_deg: f64,
    pub qwp_deg: f64,
}

impl WaveplateSetting {
    pub fn new(hwp_deg: f64, qwp_deg: f64) -> Self {
        Self {
            hwp_deg: hwp_deg.rem_euclid(180.0),
            qwp_deg: qwp_deg.rem_euclid(180.0),
        }
    }

    /// Plate angles that make the analyzer project onto Bloch direction `v`.
    pub fn for_direction(v: &BlochVector) -> Self {
        let n = crate::correlations::norm3(v);
        let [x, y, z] = v.map(|c| c / n);
        let two_q = (-y).clamp(-1.0, 1.0).asin();
        let psi = x.atan2(z);
        Self::new(
            ((psi + two_q) / 4.0).to_degrees(),
            (two_q / 2.0).to_degrees(),
        )
    }

    pub fn horizontal() -> Self {
        Self::new(0.0, 0.0)
    }
    pub fn vertical() -> Self {
        Self::new(45.0, 0.0)
    }
    pub fn diagonal() -> Self {
        Self::new(22.5, 0.0)
    }
    pub fn antidiagonal() -> Self {
        Self::new(-22.5, 0.0)
    }
    pub fn right_circular() -> Self {
        Self::new(0.0, 135.0)
    }
    pub fn left_circular() -> Self {
        Self::new(0.0, 45.0)
    }

    /// Analyzer by polarization letter (H, V, D, A, R, L).
    pub fn named(letter: char) -> Option<Self> {
        Some(match letter {
            'H' => Self::horizontal(),
            'V' => Self::vertical(),
            'D' => Self::diagonal(),
            'A' => Self::antidiagonal(),
            'R' => Self::right_circular(),
            'L' => Self::left_circular(),
            _ => return None,
        })
    }
}

/// Polarization state transmitted by the analyzer.
pub fn analyzer_state(w: &WaveplateSetting) -> [C64; 2] {
    let u = linalg::matmul(&quarter_wave_plate(w.qwp_deg), &half_wave_plate(w.hwp_deg));
    let ud = linalg::adjoint(&u);
    [ud[0][0], ud[1][0]]
}

pub fn analyzer_vector(w: &WaveplateSetting) -> BlochVector {
    let [a, b] = analyzer_state(w);
    let n = a.norm_sqr() + b.norm_sqr();
    let cross = a.conj() * b;
    [
        2.0 * cross.re / n,
        2.0 * cross.im / n,
        (a.norm_sqr() - b.norm_sqr()) / n,
    ]
}

fn projector(v: &BlochVector, sign: f64) -> linalg::Mat2 {
    let mut m = [[ONE * 0.5, ZERO], [ZERO, ONE * 0.5]];
    for k in 0..3 {
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += PAULI[k + 1][i][j] * (0.5 * sign * v[k]);
            }
        }
    }
    m
}

/// Born probabilities of the outcomes `(++, +-, -+, --)` for projective
/// measurements along `a` on arm 1 and `b` on arm 2.
pub fn measurement_probabilities(
    rho: &DensityMatrix,
    a: &BlochVector,
    b: &BlochVector,
) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (k, (sa, sb)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .into_iter()
        .enumerate()
    {
        out[k] = rho.expectation(&linalg::kron(&projector(a, sa), &projector(b, sb)));
    }
    out
}

/// Analyzer configuration for one coincidence record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzerPair {
    pub label: String,
    pub arm1: WaveplateSetting,
    pub arm2: WaveplateSetting,
}

impl AnalyzerPair {
    pub fn probability(&self, rho: &DensityMatrix) -> f64 {
        let a = analyzer_vector(&self.arm1);
        let b = analyzer_vector(&self.arm2);
        rho.expectation(&linalg::kron(&projector(&a, 1.0), &projector(&b, 1.0)))
            .max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TomographyScheme {
    /// All 36 pairs of the six eigenstates of X, Y, Z.
    Mub36,
    /// The 16 pairs drawn from {H, V, D, R}.
    Pauli16,
}

impl TomographyScheme {
    pub fn settings(self) -> Vec<AnalyzerPair> {
        let letters: &[char] = match self {
            TomographyScheme::Mub36 => &['H', 'V', 'D', 'A', 'R', 'L'],
            TomographyScheme::Pauli16 => &['H', 'V', 'D', 'R'],
        };
        let mut out = Vec::with_capacity(letters.len() * letters.len());
        for &l1 in letters {
            for &l2 in letters {
                out.push(AnalyzerPair {
                    label: format!("{l1}{l2}"),
                    arm1: WaveplateSetting::named(l1).expect("known letter"),
                    arm2: WaveplateSetting::named(l2).expect("known letter"),
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub setting_label: String,
    pub arm1: WaveplateSetting,
    pub arm2: WaveplateSetting,
    pub counts: u64,
    pub integration_s: f64,
}

/// Expected coincidences for each setting at total rate `total`.
pub fn expected_counts(rho: &DensityMatrix, settings: &[AnalyzerPair], total: f64) -> Vec<f64> {
    let per_setting = 4.0 * total / settings.len() as f64;
    settings
        .iter()
        .map(|s| s.probability(rho) * per_setting)
        .collect()
}

/// Poisson-sampled coincidence records. Record `k` draws from stream `k`.
pub fn simulate_counts(
    rho: &DensityMatrix,
    settings: &[AnalyzerPair],
    total_coincidences: f64,
    integration_s: f64,
    seed: u64,
) -> Result<Vec<CountRecord>> {
    if !(total_coincidences > 0.0 && total_coincidences.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "total_coincidences must be > 0, got {total_coincidences}"
        )));
    }
    if settings.is_empty() {
        return Err(Error::InvalidParameter("empty setting list".into()));
    }
    let means = expected_counts(rho, settings, total_coincidences);
    Ok(settings
        .iter()
        .zip(means)
        .enumerate()
        .map(|(k, (s, mean))| {
            let mut rng = CounterRng::new(seed, k as u64);
            let counts = if mean > 0.0 {
                Poisson::new(mean)
                    .expect("positive finite mean")
                    .sample(&mut rng) as u64
            } else {
                0
            };
            CountRecord {
                setting_label: s.label.clone(),
                arm1: s.arm1,
                arm2: s.arm2,
                counts,
                integration_s,
            }
        })
        .collect())
}

/// Design row: `p = (1/4) sum_ij r_ij a~_i b~_j` with `a~ = (1, a)`.
fn design_row(arm1: &WaveplateSetting, arm2: &WaveplateSetting) -> [f64; 16] {
    let a = analyzer_vector(arm1);
    let b = analyzer_vector(arm2);
    let at = [1.0, a[0], a[1], a[2]];
    let bt = [1.0, b[0], b[1], b[2]];
    std::array::from_fn(|k| 0.25 * at[k / 4] * bt[k % 4])
}

/// Solves the normal equations by Gauss-Jordan elimination with partial
/// pivoting; returns the rank on failure.
fn solve_least_squares(rows: &[[f64; 16]], rhs: &[f64]) -> std::result::Result<[f64; 16], usize> {
    let mut ata = [[0.0f64; 17]; 16];
    for (row, &y) in rows.iter().zip(rhs) {
        for i in 0..16 {
            for j in 0..16 {
                ata[i][j] += row[i] * row[j];
            }
            ata[i][16] += row[i] * y;
        }
    }
    let scale = (0..16)
        .map(|i| ata[i][i])
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut rank = 0;
    for col in 0..16 {
        let pivot = (col..16)
            .max_by(|&x, &y| ata[x][col].abs().total_cmp(&ata[y][col].abs()))
            .expect("non-empty range");
        if ata[pivot][col].abs() <= 1e-10 * scale {
            continue;
        }
        rank += 1;
        ata.swap(col, pivot);
        let p = ata[col][col];
        for j in col..17 {
            ata[col][j] /= p;
        }
        for i in 0..16 {
            if i != col {
                let f = ata[i][col];
                if f != 0.0 {
                    for j in col..17 {
                        ata[i][j] -= f * ata[col][j];
                    }
                }
            }
        }
    }
    if rank < 16 {
        return Err(rank);
    }
    Ok(std::array::from_fn(|i| ata[i][16]))
}

/// Hermitian, unit-trace linear-inversion estimate (not necessarily positive).
pub fn linear_inversion(
    settings: &[(WaveplateSetting, WaveplateSetting)],
    counts: &[f64],
) -> Result<linalg::Mat4> {
    if settings.len() != counts.len() {
        return Err(Error::InvalidParameter(
            "settings and counts differ in length".into(),
        ));
    }
    let rows: Vec<[f64; 16]> = settings.iter().map(|(a, b)| design_row(a, b)).collect();
    let x = solve_least_squares(&rows, counts).map_err(Error::RankDeficient)?;
    if !(x[0] > 0.0) {
        return Err(Error::InvalidParameter("no coincidences recorded".into()));
    }
    let r: [[f64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| x[4 * i + j] / x[0]));
    Ok(from_pauli_coordinates(&r))
}

/// Clips negative eigenvalues to zero and renormalizes the trace.
pub fn project_to_physical(m: &linalg::Mat4) -> DensityMatrix {
    let eig = linalg::hermitian_eigen(m);
    let total: f64 = eig.values.iter().map(|x| x.max(0.0)).sum();
    DensityMatrix::from_trusted(eig.map_spectrum(|x| x.max(0.0) / total))
}

/// Linear inversion then projection onto the positive cone.
pub fn reconstruct_from_weights(
    settings: &[(WaveplateSetting, WaveplateSetting)],
    counts: &[f64],
) -> Result<DensityMatrix> {
    Ok(project_to_physical(&linear_inversion(settings, counts)?))
}

pub fn tomography_reconstruct(records: &[CountRecord]) -> Result<DensityMatrix> {
    let settings: Vec<_> = records.iter().map(|r| (r.arm1, r.arm2)).collect();
    let counts: Vec<f64> = records.iter().map(|r| r.counts as f64).collect();
    reconstruct_from_weights(&settings, &counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub repetitions: usize,
    pub sigma_concurrence: f64,
    pub sigma_chsh: f64,
    pub mean_concurrence: f64,
    pub mean_chsh: f64,
    pub mean_trace_distance: f64,
    pub sd_trace_distance: f64,
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Photon-statistics error of concurrence and optimal CHSH value: spread of
/// the quantities over independently re-simulated reconstructions.
pub fn statistical_error_mc(
    rho: &DensityMatrix,
    scheme: TomographyScheme,
    total_coincidences: f64,
    repetitions: usize,
    seed: u64,
) -> Result<ErrorEstimate> {
    if repetitions < 100 {
        return Err(Error::InvalidParameter(format!(
            "repetitions must be >= 100, got {repetitions}"
        )));
    }
    let settings = scheme.settings();
    let samples: Vec<(f64, f64, f64)> = (0..repetitions)
        .into_par_iter()
        .map(|rep| -> Result<(f64, f64, f64)> {
            let records = simulate_counts(
                rho,
                &settings,
                total_coincidences,
                0.0,
                derive_seed(seed, rep as u64),
            )?;
            let est = tomography_reconstruct(&records)?;
            Ok((
                concurrence_general(&est),
                chsh_max(&est),
                trace_distance(&est, rho),
            ))
        })
        .collect::<Result<_>>()?;
    let (mean_e, sd_e) = mean_sd(&samples.iter().map(|s| s.0).collect::<Vec<_>>());
    let (mean_b, sd_b) = mean_sd(&samples.iter().map(|s| s.1).collect::<Vec<_>>());
    let (mean_d, sd_d) = mean_sd(&samples.iter().map(|s| s.2).collect::<Vec<_>>());
    Ok(ErrorEstimate {
        repetitions,
        sigma_concurrence: sd_e,
        sigma_chsh: sd_b,
        mean_concurrence: mean_e,
        mean_chsh: mean_b,
        mean_trace_distance: mean_d,
        sd_trace_distance: sd_d,
    })
}

/// One of the eight plates of a CHSH measurement: `H1..H4` are the half-wave
/// plates of bases `a, a', b, b'` and `Q1..Q4` the matching quarter-wave plates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Plate {
    H1,
    H2,
    H3,
    H4,
    Q1,
    Q2,
    Q3,
    Q4,
}

impl Plate {
    pub const ALL: [Plate; 8] = [
        Plate::H1,
        Plate::H2,
        Plate::H3,
        Plate::H4,
        Plate::Q1,
        Plate::Q2,
        Plate::Q3,
        Plate::Q4,
    ];

    fn basis_index(self) -> usize {
        match self {
            Plate::H1 | Plate::Q1 => 0,
            Plate::H2 | Plate::Q2 => 1,
            Plate::H3 | Plate::Q3 => 2,
            Plate::H4 | Plate::Q4 => 3,
        }
    }

    pub fn is_half_wave(self) -> bool {
        matches!(self, Plate::H1 | Plate::H2 | Plate::H3 | Plate::H4)
    }
}

impl FromStr for Plate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Plate::ALL
            .into_iter()
            .find(|p| p.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownPlate(s.to_string()))
    }
}

impl fmt::Display for Plate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Waveplate angles for the four CHSH bases `a, a', b, b'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshAngles(pub [WaveplateSetting; 4]);

impl ChshAngles {
    pub fn from_setting(s: &MeasurementSetting) -> Self {
        Self([s.a, s.a_prime, s.b, s.b_prime].map(|v| WaveplateSetting::for_direction(&v)))
    }

    pub fn to_setting(&self) -> MeasurementSetting {
        let [a, ap, b, bp] = self.0.map(|w| analyzer_vector(&w));
        MeasurementSetting {
            a,
            a_prime: ap,
            b,
            b_prime: bp,
        }
    }

    pub fn with_offset(&self, plate: Plate, delta_deg: f64) -> Self {
        let mut out = *self;
        let w = &mut out.0[plate.basis_index()];
        *w = if plate.is_half_wave() {
            WaveplateSetting::new(w.hwp_deg + delta_deg, w.qwp_deg)
        } else {
            WaveplateSetting::new(w.hwp_deg, w.qwp_deg + delta_deg)
        };
        out
    }
}

/// Angles of the numerically optimal CHSH measurement.
pub fn optimal_angles(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<ChshAngles> {
    Ok(ChshAngles::from_setting(
        &chsh_optimize_numeric(rho, cfg)?.setting,
    ))
}

/// CHSH value as one plate is rotated away from `center`.
pub fn chsh_angle_scan(
    rho: &DensityMatrix,
    center: &ChshAngles,
    plate: Plate,
    deltas_deg: &[f64],
) -> Vec<(f64, f64)> {
    deltas_deg
        .iter()
        .map(|&d| {
            (
                d,
                chsh_expectation(rho, &center.with_offset(plate, d).to_setting()),
            )
        })
        .collect()
}

/// Like [`chsh_angle_scan`] with the plate given by name.
pub fn chsh_angle_scan_named(
    rho: &DensityMatrix,
    center: &ChshAngles,
    plate: &str,
    deltas_deg: &[f64],
) -> Result<Vec<(f64, f64)>> {
    Ok(chsh_angle_scan(rho, center, plate.parse()?, deltas_deg))
}

#[derive(Serialize, Deserialize)]
struct CountRow {
    setting_label: String,
    h1: f64,
    q1: f64,
    h2: f64,
    q2: f64,
    counts: u64,
    integration_s: f64,
}

/// CSV with header `setting_label,h1,q1,h2,q2,counts,integration_s`.
pub fn write_counts_csv<W: Write>(records: &[CountRecord], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CountRow {
            setting_label: r.setting_label.clone(),
            h1: r.arm1.hwp_deg,
            q1: r.arm1.qwp_deg,
            h2: r.arm2.hwp_deg,
            q2: r.arm2.qwp_deg,
            counts: r.counts,
            integration_s: r.integration_s,
        })?;
    }
    w.flush()
}

pub fn read_counts_csv<R: Read>(input: R) -> std::result::Result<Vec<CountRecord>, csv::Error> {
    csv::Reader::from_reader(input)
        .deserialize::<CountRow>()
        .map(|row| {
            row.map(|r| CountRecord {
                setting_label: r.setting_label,
                arm1: WaveplateSetting::new(r.h1, r.q1),
                arm2: WaveplateSetting::new(r.h2, r.q2),
                counts: r.counts,
                integration_s: r.integration_s,
            })
        })
        .collect()
}
