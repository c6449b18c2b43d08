//! Entanglement and non-locality quantifiers.
//!
//! Each closed form for Bell-diagonal states has a general-state
//! counterpart that serves as its oracle:
//!
//! | quantity       | Bell-diagonal closed form             | general route                          |
//! |----------------|---------------------------------------|----------------------------------------|
//! | concurrence    | `max(0, |c1|+|c2|+|c3| - 1)/2`        | spin-flip construction                 |
//! | CHSH maximum   | `2 sqrt(max_{i<j}(c_i^2 + c_j^2))`    | correlation matrix, then numeric search |

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::bell_coeff_flow;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat4, C64, PAULI};
use crate::state::{correlation_matrix, BellCoeffs, BellLabel, DensityMatrix};

/// `E = max(0, |c1| + |c2| + |c3| - 1) / 2`.
///
/// The 1 is subtracted from the largest magnitude first, which is exact, so
/// states near a vertex keep full relative precision in `E`.
pub fn concurrence_bell(c: &BellCoeffs) -> f64 {
    let mut a = c.as_array().map(f64::abs);
    a.sort_by(|x, y| y.total_cmp(x));
    (0.5 * ((a[0] - 1.0) + a[1] + a[2])).max(0.0)
}

/// Eigenvalues of `rho` below this are treated as exact zeros by the
/// spin-flip construction.
const RANK_CUTOFF: f64 = 1e-14;

/// Spin-flip concurrence `max(0, s1 - s2 - s3 - s4)` where `s_k^2` are the
/// eigenvalues of `rho (sigma_y (x) sigma_y) rho* (sigma_y (x) sigma_y)`.
///
/// With `rho = W W^dagger` (`W = V sqrt(D)`) these are the eigenvalues of
/// `tau^dagger tau` for the symmetric `tau = W^T (sigma_y (x) sigma_y) W`.
pub fn concurrence_general(rho: &DensityMatrix) -> f64 {
    let yy = linalg::kron(&PAULI[2], &PAULI[2]);
    let eig = linalg::hermitian_eigen(rho.entries());
    let mut w = eig.vectors;
    for k in 0..4 {
        let d = eig.values[k];
        let root = if d > RANK_CUTOFF { d.sqrt() } else { 0.0 };
        for row in w.iter_mut() {
            row[k] *= root;
        }
    }
    let w_t: Mat4 = std::array::from_fn(|i| std::array::from_fn(|j| w[j][i]));
    let tau = linalg::matmul(&linalg::matmul(&w_t, &yy), &w);
    let mu = linalg::hermitian_eigen(&linalg::matmul(&linalg::adjoint(&tau), &tau)).values;
    let s: Vec<f64> = mu.iter().rev().map(|x| x.max(0.0).sqrt()).collect();
    (s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0)
}

/// Horodecki quantity: sum of the two largest eigenvalues of `T^T T`.
pub fn horodecki_m(rho: &DensityMatrix) -> f64 {
    horodecki_m_from_t(&correlation_matrix(rho))
}

pub fn horodecki_m_from_t(t: &[[f64; 3]; 3]) -> f64 {
    let mut u = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            u[i][j] = (0..3).map(|k| t[k][i] * t[k][j]).sum();
        }
    }
    let ev = linalg::symmetric_eigenvalues(&u);
    (ev[1] + ev[2]).clamp(0.0, 2.0)
}

/// Optimal CHSH value `2 sqrt(M)`.
pub fn chsh_max(rho: &DensityMatrix) -> f64 {
    2.0 * horodecki_m(rho).sqrt()
}

/// `max{c1^2 + c2^2, c2^2 + c3^2, c1^2 + c3^2}`.
pub fn horodecki_m_bell(c: &BellCoeffs) -> f64 {
    let [a, b, d] = c.as_array().map(|x| x * x);
    (a + b).max(b + d).max(a + d)
}

/// Closed-form CHSH maximum of a Bell-diagonal state.
pub fn chsh_bell(c: &BellCoeffs) -> f64 {
    2.0 * horodecki_m_bell(c).sqrt()
}

pub type BlochVector = [f64; 3];

pub(crate) fn norm3(v: &BlochVector) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Measurement directions for the CHSH operator
/// `a.s (x) (b + b').s + a'.s (x) (b - b').s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub a: BlochVector,
    pub a_prime: BlochVector,
    pub b: BlochVector,
    pub b_prime: BlochVector,
}

impl MeasurementSetting {
    pub fn new(
        a: BlochVector,
        a_prime: BlochVector,
        b: BlochVector,
        b_prime: BlochVector,
    ) -> Result<Self> {
        for (name, v) in [("a", &a), ("a'", &a_prime), ("b", &b), ("b'", &b_prime)] {
            if !((norm3(v) - 1.0).abs() <= 1e-10) {
                return Err(Error::NotUnitVector(name));
            }
        }
        Ok(Self {
            a,
            a_prime,
            b,
            b_prime,
        })
    }

    /// `a = z, a' = x, b = (z + x)/sqrt2, b' = (z - x)/sqrt2`.
    pub fn canonical() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            a: [0.0, 0.0, 1.0],
            a_prime: [1.0, 0.0, 0.0],
            b: [h, 0.0, h],
            b_prime: [-h, 0.0, h],
        }
    }

    pub fn operator(&self) -> Mat4 {
        let sb: BlochVector = std::array::from_fn(|k| self.b[k] + self.b_prime[k]);
        let db: BlochVector = std::array::from_fn(|k| self.b[k] - self.b_prime[k]);
        let first = linalg::kron(&pauli_dot(&self.a), &pauli_dot(&sb));
        let second = linalg::kron(&pauli_dot(&self.a_prime), &pauli_dot(&db));
        let mut out = first;
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] += second[i][j];
            }
        }
        out
    }
}

/// `v . sigma` for a real vector (not necessarily unit).
pub fn pauli_dot(v: &[f64; 3]) -> linalg::Mat2 {
    let mut m = linalg::zeros::<2>();
    for k in 0..3 {
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += PAULI[k + 1][i][j] * C64::new(v[k], 0.0);
            }
        }
    }
    m
}

/// `Tr(rho B_CHSH)` evaluated from the explicit operator.
pub fn chsh_expectation(rho: &DensityMatrix, s: &MeasurementSetting) -> f64 {
    rho.expectation(&s.operator())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Polar grid points per Alice direction over the upper hemisphere.
    pub grid_polar: usize,
    /// Azimuthal grid points per Alice direction.
    pub grid_azimuth: usize,
    /// Simplex diameter at which refinement stops.
    pub step_tol: f64,
    pub max_iterations: usize,
    /// Number of best grid points refined.
    pub refine_starts: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_polar: 12,
            grid_azimuth: 24,
            step_tol: 1e-8,
            max_iterations: 20_000,
            refine_starts: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshOptimum {
    pub setting: MeasurementSetting,
    pub value: f64,
    /// Simplex iterations spent by the winning start.
    pub iterations: usize,
}

fn direction(theta: f64, phi: f64) -> BlochVector {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

fn t_transpose_times(t: &[[f64; 3]; 3], v: &BlochVector) -> BlochVector {
    std::array::from_fn(|j| (0..3).map(|i| t[i][j] * v[i]).sum())
}

fn unit_or_z(v: BlochVector) -> BlochVector {
    let n = norm3(&v);
    if n > 1e-300 {
        v.map(|x| x / n)
    } else {
        [0.0, 0.0, 1.0]
    }
}

/// For fixed Alice directions the best Bob directions are aligned with
/// `T^T(a + a')` and `T^T(a - a')`, giving `|T^T(a + a')| + |T^T(a - a')|`.
fn alice_objective(t: &[[f64; 3]; 3], angles: &[f64; 4]) -> f64 {
    let a = direction(angles[0], angles[1]);
    let ap = direction(angles[2], angles[3]);
    let plus = t_transpose_times(t, &std::array::from_fn(|k| a[k] + ap[k]));
    let minus = t_transpose_times(t, &std::array::from_fn(|k| a[k] - ap[k]));
    norm3(&plus) + norm3(&minus)
}

fn setting_from_angles(t: &[[f64; 3]; 3], angles: &[f64; 4]) -> MeasurementSetting {
    let a = direction(angles[0], angles[1]);
    let ap = direction(angles[2], angles[3]);
    MeasurementSetting {
        a,
        a_prime: ap,
        b: unit_or_z(t_transpose_times(t, &std::array::from_fn(|k| a[k] + ap[k]))),
        b_prime: unit_or_z(t_transpose_times(t, &std::array::from_fn(|k| a[k] - ap[k]))),
    }
}

/// Nelder-Mead maximization; returns (point, value, iterations, converged).
fn nelder_mead_max<const D: usize>(
    f: impl Fn(&[f64; D]) -> f64,
    start: [f64; D],
    step: [f64; D],
    step_tol: f64,
    max_iterations: usize,
) -> ([f64; D], f64, usize, bool) {
    let neg = |x: &[f64; D]| -f(x);
    let mut simplex: Vec<([f64; D], f64)> = Vec::with_capacity(D + 1);
    simplex.push((start, neg(&start)));
    for k in 0..D {
        let mut p = start;
        p[k] += step[k];
        simplex.push((p, neg(&p)));
    }
    let diameter = |s: &[([f64; D], f64)]| {
        let best = s[0].0;
        s[1..]
            .iter()
            .map(|(p, _)| (0..D).map(|k| (p[k] - best[k]).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    };
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        simplex.sort_by(|x, y| x.1.total_cmp(&y.1));
        if diameter(&simplex) <= step_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let worst = simplex[D];
        let mut centroid = [0.0; D];
        for (p, _) in &simplex[..D] {
            for k in 0..D {
                centroid[k] += p[k] / D as f64;
            }
        }
        let along = |coef: f64| -> [f64; D] {
            std::array::from_fn(|k| centroid[k] + coef * (worst.0[k] - centroid[k]))
        };
        let reflected = along(-1.0);
        let fr = neg(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(-2.0);
            let fe = neg(&expanded);
            simplex[D] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[D - 1].1 {
            simplex[D] = (reflected, fr);
        } else {
            let accepted = if fr < worst.1 {
                let p = along(-0.5);
                let fc = neg(&p);
                (fc <= fr).then_some((p, fc))
            } else {
                let p = along(0.5);
                let fc = neg(&p);
                (fc < worst.1).then_some((p, fc))
            };
            match accepted {
                Some(entry) => simplex[D] = entry,
                None => {
                    let best = simplex[0].0;
                    for entry in simplex.iter_mut().skip(1) {
                        let p: [f64; D] =
                            std::array::from_fn(|k| best[k] + 0.5 * (entry.0[k] - best[k]));
                        *entry = (p, neg(&p));
                    }
                }
            }
        }
    }
    simplex.sort_by(|x, y| x.1.total_cmp(&y.1));
    (simplex[0].0, -simplex[0].1, iterations, converged)
}

/// Numeric CHSH maximization: coarse grid over the two Alice directions
/// (Bob's optimal directions are closed-form given Alice's), followed by
/// simplex refinement from the best grid points.
///
/// Only the upper hemisphere is gridded for `a` and `a'`: flipping either
/// one swaps the roles of `b` and `b'` up to sign and leaves the value
/// unchanged. Grid ties resolve to the lexicographically smallest angle tuple.
pub fn chsh_optimize_numeric(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<ChshOptimum> {
    if cfg.grid_polar == 0 || cfg.grid_azimuth == 0 || cfg.refine_starts == 0 {
        return Err(Error::InvalidParameter(
            "optimizer grid and start counts must be >= 1".into(),
        ));
    }
    let t = correlation_matrix(rho);
    let dtheta = std::f64::consts::FRAC_PI_2 / cfg.grid_polar as f64;
    let dphi = std::f64::consts::TAU / cfg.grid_azimuth as f64;
    let per_vector = cfg.grid_polar * cfg.grid_azimuth;
    let point = |idx: usize| -> [f64; 4] {
        let (ia, iap) = (idx / per_vector, idx % per_vector);
        [
            (ia / cfg.grid_azimuth) as f64 * dtheta + 0.5 * dtheta,
            (ia % cfg.grid_azimuth) as f64 * dphi,
            (iap / cfg.grid_azimuth) as f64 * dtheta + 0.5 * dtheta,
            (iap % cfg.grid_azimuth) as f64 * dphi,
        ]
    };
    let values: Vec<f64> = (0..per_vector * per_vector)
        .into_par_iter()
        .map(|idx| alice_objective(&t, &point(idx)))
        .collect();
    let mut order: Vec<usize> = (0..values.len()).collect();
    // Stable sort keeps index (lexicographic angle) order among ties.
    order.sort_by(|&x, &y| values[y].total_cmp(&values[x]));

    let step = [dtheta, dphi, dtheta, dphi];
    let mut best: Option<([f64; 4], f64, usize, bool)> = None;
    for &idx in order.iter().take(cfg.refine_starts) {
        let run = nelder_mead_max(
            |x| alice_objective(&t, x),
            point(idx),
            step,
            cfg.step_tol,
            cfg.max_iterations,
        );
        if best.as_ref().is_none_or(|b| run.1 > b.1) {
            best = Some(run);
        }
    }
    let (angles, _, iterations, converged) = best.expect("at least one start");
    let setting = setting_from_angles(&t, &angles);
    let value = chsh_expectation(rho, &setting);
    if !converged {
        return Err(Error::NotConverged {
            iterations,
            best_value: value,
        });
    }
    Ok(ChshOptimum {
        setting,
        value,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Separable,
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
    Boundary,
}

impl From<BellLabel> for Region {
    fn from(label: BellLabel) -> Self {
        match label {
            BellLabel::PhiPlus => Region::PhiPlus,
            BellLabel::PhiMinus => Region::PhiMinus,
            BellLabel::PsiPlus => Region::PsiPlus,
            BellLabel::PsiMinus => Region::PsiMinus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntanglementFate {
    Frozen,
    SuddenDeath,
    AsymptoticDecay,
    None,
    /// Entangled but on a surface where the sign test is undecided.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionReport {
    pub region: Region,
    pub time_invariant_entanglement: bool,
    pub entanglement_fate: EntanglementFate,
}

const REGION_TOL: f64 = 1e-12;

/// Locates `c` in the tetrahedron and predicts what global dephasing does
/// to its entanglement.
pub fn classify_region(c: &BellCoeffs) -> RegionReport {
    if c.l1_norm() <= 1.0 + REGION_TOL {
        return RegionReport {
            region: Region::Separable,
            time_invariant_entanglement: false,
            entanglement_fate: EntanglementFate::None,
        };
    }
    let weights = BellLabel::ALL.map(|l| l.weight_in(c.as_array()));
    let top = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let leaders: Vec<BellLabel> = BellLabel::ALL
        .iter()
        .zip(weights)
        .filter(|(_, w)| top - w <= REGION_TOL)
        .map(|(l, _)| *l)
        .collect();
    let product = c.c1() * c.c2();
    if leaders.len() != 1 || product.abs() <= REGION_TOL {
        return RegionReport {
            region: Region::Boundary,
            time_invariant_entanglement: false,
            entanglement_fate: EntanglementFate::Boundary,
        };
    }
    let region = Region::from(leaders[0]);
    if product > 0.0 {
        RegionReport {
            region,
            time_invariant_entanglement: true,
            entanglement_fate: EntanglementFate::Frozen,
        }
    } else {
        let fate = if (c.c3() - 1.0).abs() <= REGION_TOL {
            EntanglementFate::AsymptoticDecay
        } else {
            EntanglementFate::SuddenDeath
        };
        RegionReport {
            region,
            time_invariant_entanglement: false,
            entanglement_fate: fate,
        }
    }
}

/// Coefficients after dimensionless time `t Gamma` of global dephasing.
pub fn coeffs_at(c: &BellCoeffs, t_gamma: f64) -> BellCoeffs {
    bell_coeff_flow(c, (-2.0 * t_gamma).exp())
}

/// Bracket end for root searches, in units of `1/Gamma`.
pub const T_CAP_GAMMA: f64 = 50.0;
const BISECTION_REL_TOL: f64 = 1e-10;

fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "gamma_rate must be > 0, got {rate}"
        )))
    }
}

/// Smallest `t` in `[0, t_cap]` with `excess(t) <= 0`, given `excess(0) > 0`
/// and `excess(t_cap) <= 0` for a non-increasing `excess`.
fn first_crossing(excess: impl Fn(f64) -> f64, t_cap: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, t_cap);
    for _ in 0..400 {
        if hi - lo <= BISECTION_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Time at which concurrence first reaches zero under global dephasing at
/// rate `gamma_rate`; `None` when entanglement is frozen, decays only
/// asymptotically, or is absent to begin with.
pub fn entanglement_sudden_death_time(c: &BellCoeffs, gamma_rate: f64) -> Result<Option<f64>> {
    check_rate(gamma_rate)?;
    let report = classify_region(c);
    if matches!(
        report.entanglement_fate,
        EntanglementFate::Frozen | EntanglementFate::AsymptoticDecay | EntanglementFate::None
    ) {
        return Ok(None);
    }
    let excess = |t: f64| coeffs_at(c, t * gamma_rate).l1_norm() - 1.0;
    let t_cap = T_CAP_GAMMA / gamma_rate;
    if excess(0.0) <= 0.0 || excess(t_cap) > 0.0 {
        return Ok(None);
    }
    Ok(Some(first_crossing(excess, t_cap)))
}

/// Time at which the optimal CHSH value first drops to 2; `None` when the
/// state never violates or the violation is trapped above 2.
pub fn nonlocality_sudden_death_time(c: &BellCoeffs, gamma_rate: f64) -> Result<Option<f64>> {
    check_rate(gamma_rate)?;
    let excess = |t: f64| horodecki_m_bell(&coeffs_at(c, t * gamma_rate)) - 1.0;
    let t_cap = T_CAP_GAMMA / gamma_rate;
    let (_, b_inf) = asymptotic_values(c);
    if excess(0.0) <= 0.0 || excess(t_cap) > 0.0 || b_inf > 2.0 {
        return Ok(None);
    }
    Ok(Some(first_crossing(excess, t_cap)))
}

/// `(E, B)` at the fixed point `((c1 + c2)/2, (c1 + c2)/2, c3)` of the flow.
pub fn asymptotic_values(c: &BellCoeffs) -> (f64, f64) {
    let limit = bell_coeff_flow(c, 0.0);
    (concurrence_bell(&limit), chsh_bell(&limit))
}
